//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use triperim_core::gallery::{
    verify_figure1_claims, verify_random_claims, verify_three_point_claims,
};
use triperim_core::metric::default_tolerance;
use triperim_core::solver::{check_perimeter_chain, solve_with_modulus};
use triperim_core::{
    validate_metric, ClassifyError, FiniteMetricSpace, GalleryConfig, GalleryError, MetricError,
    Sweep, TripleAggregator,
};

use crate::parallel;
use crate::report::{
    ClassifyReport, ErrorKind, ErrorReport, GalleryReport, Report, SolveReport, ValidateReport,
};
use crate::schema::SpaceDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Classify,
    Solve,
    Gallery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryName {
    ThreePoint,
    Figure1,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Classify self-maps of finite metric spaces by how they contract
/// distances, perimeters of triangles and (F,G)-aggregates.
#[derive(Debug, Clone, Parser)]
#[command(name = "triperim", version)]
pub struct Cli {
    pub command: Command,
    /// Example to build (gallery only).
    pub name: Option<GalleryName>,
    /// JSON instance: {"labels": [...], "dist": [[...]], "map": [...]}.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Numerator aggregator: `sum`, `qnorm:<q>`, `phimean:square`,
    /// `phimean:power:<p>`, `phimean:expm1` or `sumpair:<g>,<h>`.
    #[arg(long)]
    pub f: Option<TripleAggregator>,
    /// Denominator aggregator.
    #[arg(long)]
    pub g: Option<TripleAggregator>,
    /// Metric tolerance (validate, classify) or certification tolerance (solve).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Label of the starting point (solve); defaults to the first label.
    #[arg(long)]
    pub start: Option<String>,
    /// Truncation depth (figure1) or point count (random).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the gallery instance to this path in the input format.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub gallery: Option<GalleryName>,
    pub fg: Option<(TripleAggregator, TripleAggregator)>,
    pub tol: Option<f64>,
    pub max_steps: usize,
    pub start: Option<String>,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, String> {
        let fg = match (&cli.f, &cli.g) {
            (Some(f), Some(g)) => Some((f.clone(), g.clone())),
            (None, None) => None,
            _ => return Err("--f and --g must be given together".into()),
        };
        if let Some(tol) = cli.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(format!("--tol must be finite and nonnegative, got {tol}"));
            }
        }
        match (cli.command, cli.name) {
            (Command::Gallery, None) => {
                return Err("gallery needs a name: three-point, figure1 or random".into())
            }
            (Command::Gallery, Some(_)) => {}
            (_, Some(_)) => return Err("only gallery takes a name".into()),
            (_, None) if cli.input.is_none() => return Err("--input is required".into()),
            _ => {}
        }
        Ok(RunConfig {
            command: cli.command,
            gallery: cli.name,
            fg,
            tol: cli.tol,
            max_steps: cli.max_steps,
            start: cli.start.clone(),
            n: cli.n,
            epsilon: cli.epsilon,
            seed: cli.seed,
        })
    }
}

/// Result of one run: the report and the process exit code
/// (0 clean, 1 violation found, 2 input error).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
}

impl Outcome {
    fn clean(report: Report) -> Self {
        Outcome { report, exit_code: 0 }
    }

    fn flagged(report: Report, violation: bool) -> Self {
        Outcome { report, exit_code: u8::from(violation) }
    }

    fn input(message: impl Into<String>) -> Self {
        Outcome { report: Report::input_error(message), exit_code: 2 }
    }

    fn violation(message: impl Into<String>) -> Self {
        let report = ErrorReport {
            kind: ErrorKind::Violation,
            message: message.into(),
            labels: Vec::new(),
            validation: None,
        };
        Outcome { report: Report::Error(report), exit_code: 1 }
    }
}

/// Runs a command. `input` is the text of the instance document for
/// validate, classify and solve; gallery ignores it.
pub fn run(config: &RunConfig, input: Option<&str>) -> Outcome {
    if config.command == Command::Gallery {
        return gallery(config);
    }
    let Some(text) = input else {
        return Outcome::input("no input document");
    };
    let doc = match SpaceDocument::parse(text) {
        Ok(d) => d,
        Err(e) => return Outcome::input(e.to_string()),
    };
    match config.command {
        Command::Validate => validate(config, &doc),
        Command::Classify => classify(config, &doc),
        Command::Solve => solve(config, &doc),
        Command::Gallery => unreachable!("handled above"),
    }
}

fn validate(config: &RunConfig, doc: &SpaceDocument) -> Outcome {
    let matrix = doc.matrix();
    let tol = config.tol.unwrap_or_else(|| default_tolerance(&matrix));
    match validate_metric(&matrix, tol) {
        Ok(validation) => {
            let ok = validation.ok;
            let report = ValidateReport { labels: doc.labels.clone(), validation };
            Outcome::flagged(Report::Validate(report), !ok)
        }
        Err(e) => Outcome::input(e.to_string()),
    }
}

fn load_space(tol: Option<f64>, doc: &SpaceDocument) -> Result<FiniteMetricSpace, Box<Outcome>> {
    let matrix = doc.matrix();
    let tol = tol.unwrap_or_else(|| default_tolerance(&matrix));
    match FiniteMetricSpace::with_tolerance(doc.labels.clone(), matrix, tol) {
        Ok(s) => Ok(s),
        Err(MetricError::NotAMetric(validation)) => Err(Box::new(Outcome {
            report: Report::Error(ErrorReport {
                kind: ErrorKind::Violation,
                message: "input distances are not a metric".into(),
                labels: doc.labels.clone(),
                validation: Some(validation),
            }),
            exit_code: 1,
        })),
        Err(e) => Err(Box::new(Outcome::input(e.to_string()))),
    }
}

fn classify(config: &RunConfig, doc: &SpaceDocument) -> Outcome {
    let space = match load_space(config.tol, doc) {
        Ok(s) => s,
        Err(o) => return *o,
    };
    let Some(map) = doc.self_map() else {
        return Outcome::input("classify needs a `map`");
    };
    let sweep = Sweep::new(&space, &map).expect("map length checked on parse");
    let fg = config.fg.as_ref().map(|(f, g)| (f, g));
    match parallel::classify_sweep(&sweep, fg) {
        Ok(r) => {
            let names = config.fg.as_ref().map(|(f, g)| (f.to_string(), g.to_string()));
            Outcome::clean(Report::Classify(ClassifyReport::new(space.labels(), names, r)))
        }
        Err(e @ ClassifyError::InadmissibleDenominator { .. }) => Outcome::input(e.to_string()),
        Err(e) => Outcome::violation(e.to_string()),
    }
}

fn solve(config: &RunConfig, doc: &SpaceDocument) -> Outcome {
    // --tol is the certification tolerance here; the metric uses the default.
    let space = match load_space(None, doc) {
        Ok(s) => s,
        Err(o) => return *o,
    };
    let Some(map) = doc.self_map() else {
        return Outcome::input("solve needs a `map`");
    };
    let x0 = match &config.start {
        None => 0,
        Some(label) => match space.index_of(label) {
            Some(i) => i,
            None => return Outcome::input(format!("--start {label:?} is not a label")),
        },
    };
    let sweep = Sweep::new(&space, &map).expect("map length checked on parse");
    let alpha = parallel::perimeter(&sweep).modulus;
    let tol = config.tol.unwrap_or(0.0);
    let result = match solve_with_modulus(&space, &map, x0, tol, config.max_steps, alpha) {
        Ok(r) => r,
        Err(e) => return Outcome::input(e.to_string()),
    };
    let chain = (alpha < 1.0).then(|| check_perimeter_chain(&result.trace, alpha));
    let violation = chain.as_ref().is_some_and(|c| !c.holds);
    let label = |i: usize| space.label(i).to_string();
    let report = SolveReport {
        labels: space.labels().to_vec(),
        start: label(x0),
        tol,
        orbit: result.trace.points.iter().map(|&i| label(i)).collect(),
        fixed_point: result.fixed_point.map(label),
        chain,
        result,
    };
    Outcome::flagged(Report::Solve(report), violation)
}

fn gallery(config: &RunConfig) -> Outcome {
    let name = config.gallery.expect("checked in RunConfig");
    let defaults = GalleryConfig::default();
    let result: Result<_, GalleryError> = match name {
        GalleryName::ThreePoint => {
            verify_three_point_claims().map(|c| ("three-point", None, None, None, c))
        }
        GalleryName::Figure1 => {
            let cfg = GalleryConfig {
                depth: config.n.unwrap_or(defaults.depth),
                epsilon: config.epsilon.unwrap_or(defaults.epsilon),
                seed: defaults.seed,
            };
            verify_figure1_claims(&cfg)
                .map(|c| ("figure1", Some(cfg.depth), Some(cfg.epsilon), None, c))
        }
        GalleryName::Random => {
            let n = config.n.unwrap_or(8);
            let seed = config.seed.unwrap_or(defaults.seed);
            verify_random_claims(n, seed).map(|c| ("random", Some(n), None, Some(seed), c))
        }
    };
    match result {
        Ok((name, n, epsilon, seed, claims)) => {
            let failed = !claims.all_passed();
            let report = GalleryReport { name: name.into(), n, epsilon, seed, claims };
            Outcome::flagged(Report::Gallery(report), failed)
        }
        Err(e) => Outcome::input(e.to_string()),
    }
}

/// Builds the instance behind a gallery command, for `--export`.
pub fn gallery_instance(config: &RunConfig) -> Result<SpaceDocument, GalleryError> {
    use triperim_core::gallery::{build_figure1_space, build_three_point_example, random_instance};
    let defaults = GalleryConfig::default();
    let (space, map, meta) = match config.gallery.expect("checked in RunConfig") {
        GalleryName::ThreePoint => {
            let (s, m) = build_three_point_example();
            (s, m, serde_json::json!({ "example": "three-point" }))
        }
        GalleryName::Figure1 => {
            let cfg = GalleryConfig {
                depth: config.n.unwrap_or(defaults.depth),
                epsilon: config.epsilon.unwrap_or(defaults.epsilon),
                seed: defaults.seed,
            };
            let (s, m) = build_figure1_space(&cfg)?;
            (
                s,
                m,
                serde_json::json!({ "example": "figure1", "n": cfg.depth, "epsilon": cfg.epsilon }),
            )
        }
        GalleryName::Random => {
            let n = config.n.unwrap_or(8);
            let seed = config.seed.unwrap_or(defaults.seed);
            let (s, m) = random_instance(n, seed)?;
            (s, m, serde_json::json!({ "example": "random", "n": n, "seed": seed }))
        }
    };
    Ok(SpaceDocument::from_instance(&space, Some(&map), Some(meta)))
}
