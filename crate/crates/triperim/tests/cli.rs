use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use triperim::cli::{run, Cli, Outcome, RunConfig};
use triperim::report::{ErrorKind, Report};
use triperim::schema::SpaceDocument;
use triperim_core::gallery::{build_figure1_space, random_instance};
use triperim_core::{classify, GalleryConfig, TripleAggregator};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn invoke(args: &[&str], input: Option<&str>) -> Outcome {
    let mut argv = vec!["triperim"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("arguments parse");
    let config = RunConfig::from_cli(&cli).expect("valid config");
    run(&config, input)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

#[test]
fn classify_three_point_file() {
    let out = invoke(&["classify", "--input", "x"], Some(&read("three_point.json")));
    assert_eq!(out.exit_code, 0);
    let Report::Classify(r) = out.report else { panic!("{:?}", out.report) };
    assert!(r.edelstein_perimeter.holds);
    assert!(!r.edelstein_contractive.holds);
    assert_eq!(r.fixed_points, ["x", "y"]);
    assert_eq!(r.banach.modulus, 1.0);
    assert_eq!(r.perimeter.modulus, 2.0 / 3.0);
}

#[test]
fn validate_reports_triangle_violation() {
    let out = invoke(&["validate", "--input", "x"], Some(&read("not_a_metric.json")));
    assert_eq!(out.exit_code, 1);
    let Report::Validate(r) = out.report else { panic!() };
    assert!(!r.validation.ok);
    let v = &r.validation.violations[0];
    assert_eq!(v.witness, [0, 2, 1]);
    assert_eq!(v.slack, 1.0);
}

#[test]
fn classify_rejects_non_metric_as_violation() {
    let out = invoke(&["classify", "--input", "x"], Some(&read("not_a_metric.json")));
    assert_eq!(out.exit_code, 1);
    let Report::Error(e) = out.report else { panic!() };
    assert_eq!(e.kind, ErrorKind::Violation);
    assert!(e.validation.is_some());
}

#[test]
fn gallery_figure1_claims_pass() {
    let out = invoke(&["gallery", "figure1", "--n", "20", "--epsilon", "0.01"], None);
    assert_eq!(out.exit_code, 0);
    let Report::Gallery(r) = out.report else { panic!() };
    assert_eq!(r.claims.claims.len(), 3);
    assert!(r.claims.all_passed());
}

#[test]
fn gallery_three_point_and_random() {
    assert_eq!(invoke(&["gallery", "three-point"], None).exit_code, 0);
    for seed in 0..20 {
        let out = invoke(&["gallery", "random", "--n", "7", "--seed", &seed.to_string()], None);
        assert_eq!(out.exit_code, 0, "{:?}", out.report);
    }
}

#[test]
fn solve_reaches_fixed_point() {
    let out = invoke(&["solve", "--input", "x", "--start", "d"], Some(&read("line.json")));
    assert_eq!(out.exit_code, 0);
    let Report::Solve(r) = out.report else { panic!() };
    assert_eq!(r.orbit, ["d", "c", "b", "a"]);
    assert_eq!(r.fixed_point.as_deref(), Some("a"));
    assert_eq!(r.result.alpha, 0.5);
    assert!(r.chain.unwrap().holds);
}

#[test]
fn input_errors_exit_2() {
    let cases = [
        (
            vec!["classify", "--input", "x"],
            r#"{"labels":["a","b","c"],"dist":[[0,1,1],[1,0,1],[1,1,0]]}"#,
            "map",
        ),
        (
            vec!["validate", "--input", "x"],
            r#"{"labels":["a","b","c"],"dist":[[0,1,1],[1,0,1],[1,1,0]],"weights":[]}"#,
            "weights",
        ),
        (vec!["validate", "--input", "x"], "not json", "invalid JSON"),
        (
            vec!["solve", "--input", "x", "--start", "q"],
            r#"{"labels":["a","b","c"],"dist":[[0,1,1],[1,0,1],[1,1,0]],"map":[0,0,0]}"#,
            "\"q\"",
        ),
    ];
    for (args, doc, needle) in cases {
        let out = invoke(&args, Some(doc));
        assert_eq!(out.exit_code, 2, "{args:?}");
        let Report::Error(e) = out.report else { panic!() };
        assert_eq!(e.kind, ErrorKind::Input);
        assert!(e.message.contains(needle), "{} lacks {needle}", e.message);
    }
    let cli = Cli::try_parse_from(["triperim", "classify", "--input", "x", "--f", "sum"]).unwrap();
    assert!(RunConfig::from_cli(&cli).is_err());
    assert!(Cli::try_parse_from(["triperim", "classify", "--f", "qnorm:0.5"]).is_err());
}

#[test]
fn classify_json_round_trips_bit_exactly() {
    let f: TripleAggregator = "phimean:square".parse().unwrap();
    let g = TripleAggregator::Sum;
    let mut instances = vec![build_figure1_space(&GalleryConfig::default()).unwrap()];
    instances.extend((0..30).map(|seed| random_instance(3 + seed as usize % 10, seed).unwrap()));
    for (space, map) in instances {
        let doc = SpaceDocument::from_instance(&space, Some(&map), None).to_json();
        let out = invoke(
            &["classify", "--input", "x", "--f", "phimean:square", "--g", "sum"],
            Some(&doc),
        );
        assert_eq!(out.exit_code, 0);
        let Report::Classify(parsed) = Report::from_json(&out.report.to_json()).unwrap() else {
            panic!()
        };
        let direct = classify(&space, &map, Some((&f, &g))).unwrap();
        let fg = parsed.fg.as_ref().unwrap();
        assert_eq!(parsed.banach.modulus.to_bits(), direct.banach.modulus.to_bits());
        assert_eq!(parsed.perimeter.modulus.to_bits(), direct.perimeter.modulus.to_bits());
        assert_eq!(fg.modulus.to_bits(), direct.fg.as_ref().unwrap().modulus.to_bits());
        assert_eq!(
            parsed.edelstein_perimeter.witness_slack.to_bits(),
            direct.edelstein_perimeter.witness_slack.to_bits()
        );
        assert_eq!(parsed.perimeter.witness, direct.perimeter.witness);
        assert_eq!(out.report, Report::Classify(parsed));
    }
}

fn binary(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_triperim")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn binary_exit_codes() {
    let three = data("three_point.json");
    let bad = data("not_a_metric.json");
    let (code, stdout, _) =
        binary(&["classify", "--input", three.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"fixed_points\": [\n    \"x\",\n    \"y\"\n  ]"), "{stdout}");
    assert_eq!(binary(&["validate", "--input", bad.to_str().unwrap()]).0, 1);
    let (code, _, stderr) = binary(&["validate", "--input", "/nonexistent/file.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot read"));
    assert_eq!(binary(&["frobnicate"]).0, 2);
    assert_eq!(binary(&["gallery"]).0, 2);
    assert_eq!(binary(&["--help"]).0, 0);
}

#[test]
fn exported_instance_classifies_like_the_original() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("figure1.json");
    let p = path.to_str().unwrap();
    let (code, stdout, _) = binary(&["gallery", "figure1", "--n", "12", "--export", p]);
    assert_eq!(code, 0, "{stdout}");
    let (code, stdout, _) = binary(&["classify", "--input", p, "--format", "json"]);
    assert_eq!(code, 0);
    let Report::Classify(r) = Report::from_json(&stdout).unwrap() else { panic!() };
    let config = GalleryConfig { depth: 12, ..GalleryConfig::default() };
    let (space, map) = build_figure1_space(&config).unwrap();
    let direct = classify(&space, &map, None).unwrap();
    assert_eq!(r.banach.modulus.to_bits(), direct.banach.modulus.to_bits());
    assert_eq!(r.perimeter.modulus.to_bits(), direct.perimeter.modulus.to_bits());
    assert_eq!(r.labels, space.labels());
}
