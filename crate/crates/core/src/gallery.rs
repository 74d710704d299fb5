//! Worked example spaces and random instances.
//!
//! The two-chain space is infinite: points `x_0, x_1, ...` and
//! `x_0', x_1', ...` accumulating at `x*`, with the shift map. It is truncated
//! at depth `N`; `x_N` and `x_N'` are sent to `x*` so the truncation stays
//! closed under the map. Claims about the infinite space are then checked on
//! the interior points (chain index `<= N - 2`, plus `x*`), away from that
//! patch.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::classifier::{ClassifyError, Sweep};
use crate::metric::{validate_metric, DistanceMatrix, FiniteMetricSpace, MetricError, SelfMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalleryError {
    #[error("truncation depth must be at least 6, got {0}")]
    DepthTooSmall(usize),
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("random instances need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("constructed distances are not a metric: triangle {labels:?} off by {slack:e}")]
    NotAMetric { labels: Vec<String>, slack: f64 },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GalleryConfig {
    /// Truncation depth `N`.
    pub depth: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for GalleryConfig {
    fn default() -> Self {
        GalleryConfig { depth: 20, epsilon: 0.01, seed: 0 }
    }
}

/// `X = {x, y, z}` with unit distances and `x ↦ x, y ↦ y, z ↦ x`.
pub fn build_three_point_example() -> (FiniteMetricSpace, SelfMap) {
    let dist = DistanceMatrix::from_upper(3, |_, _| 1.0).expect("finite");
    let labels = ["x", "y", "z"].map(String::from).to_vec();
    let space = FiniteMetricSpace::new(labels, dist).expect("unit distances form a metric");
    let map = SelfMap::new(alloc::vec![0, 1, 0], 3).expect("valid indices");
    (space, map)
}

/// Index layout of the truncated two-chain space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChainLayout {
    pub depth: usize,
}

/// Which chain a point of the two-chain space lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainPoint {
    Plain(usize),
    Primed(usize),
    Limit,
}

impl ChainLayout {
    pub fn len(&self) -> usize {
        2 * self.depth + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn plain(&self, i: usize) -> usize {
        i
    }

    pub fn primed(&self, i: usize) -> usize {
        self.depth + 1 + i
    }

    pub fn limit(&self) -> usize {
        2 * self.depth + 2
    }

    pub fn point(&self, index: usize) -> ChainPoint {
        let n = self.depth;
        if index <= n {
            ChainPoint::Plain(index)
        } else if index <= 2 * n + 1 {
            ChainPoint::Primed(index - n - 1)
        } else {
            ChainPoint::Limit
        }
    }

    /// Chain index of a point, `None` for `x*`.
    pub fn chain_index(&self, index: usize) -> Option<usize> {
        match self.point(index) {
            ChainPoint::Plain(i) | ChainPoint::Primed(i) => Some(i),
            ChainPoint::Limit => None,
        }
    }

    /// Points with chain index `<= N - 2`, together with `x*`.
    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|p| self.chain_index(p).is_none_or(|i| i + 2 <= self.depth)).collect()
    }
}

/// `1 / k²`, the gap between chain levels `k - 1` and `k`.
fn gap(k: usize) -> f64 {
    let k = k as f64;
    1.0 / (k * k)
}

/// Distance between `x_i` and `x_i'`: `ε / m²` with `m = i` for odd `i`
/// and `m = i + 1` for even `i`.
fn rung(i: usize, epsilon: f64) -> f64 {
    let m = if i % 2 == 1 { i } else { i + 1 } as f64;
    epsilon / (m * m)
}

/// `Σ_{k=i+1..=j} 1/k²` for `i < j`.
fn chain_distance(i: usize, j: usize) -> f64 {
    ((i + 1)..=j).map(gap).sum()
}

/// `π²/6 - d(x_0, x_i)`.
fn limit_distance(i: usize) -> f64 {
    PI * PI / 6.0 - chain_distance(0, i)
}

/// Builds the truncated two-chain space and its shift map.
///
/// `d(x_i', x*)` is taken equal to `d(x_i, x*)`; the construction is checked
/// with the metric validator rather than assumed.
pub fn build_figure1_space(
    config: &GalleryConfig,
) -> Result<(FiniteMetricSpace, SelfMap), GalleryError> {
    let n = config.depth;
    if n < 6 {
        return Err(GalleryError::DepthTooSmall(n));
    }
    let eps = config.epsilon;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GalleryError::BadEpsilon(eps));
    }
    let layout = ChainLayout { depth: n };
    let dist = DistanceMatrix::from_upper(layout.len(), |a, b| {
        match (layout.point(a), layout.point(b)) {
            (ChainPoint::Limit, p) | (p, ChainPoint::Limit) => match p {
                ChainPoint::Plain(i) | ChainPoint::Primed(i) => limit_distance(i),
                ChainPoint::Limit => 0.0,
            },
            (
                ChainPoint::Plain(i) | ChainPoint::Primed(i),
                ChainPoint::Plain(j) | ChainPoint::Primed(j),
            ) => {
                if i == j {
                    rung(i, eps)
                } else {
                    chain_distance(i.min(j), i.max(j))
                }
            }
        }
    })?;
    let labels: Vec<String> = (0..layout.len())
        .map(|p| match layout.point(p) {
            ChainPoint::Plain(i) => format!("x{i}"),
            ChainPoint::Primed(i) => format!("x{i}'"),
            ChainPoint::Limit => String::from("x*"),
        })
        .collect();

    let tol = crate::metric::default_tolerance(&dist);
    let report = validate_metric(&dist, tol)?;
    if let Some(v) = report.violations.first() {
        return Err(GalleryError::NotAMetric {
            labels: v.witness.iter().map(|&i| labels[i].clone()).collect(),
            slack: v.slack,
        });
    }
    let space = FiniteMetricSpace::with_tolerance(labels, dist, tol)?;

    let image = (0..layout.len())
        .map(|p| match layout.point(p) {
            ChainPoint::Plain(i) if i < n => layout.plain(i + 1),
            ChainPoint::Primed(i) if i < n => layout.primed(i + 1),
            _ => layout.limit(),
        })
        .collect();
    let map = SelfMap::new(image, layout.len())?;
    Ok((space, map))
}

/// Perimeter ratio of `(x_i, x_{i+1}, x_{i+2})` under the shift:
/// `(2/(i+2)² + 2/(i+3)²) / (2/(i+1)² + 2/(i+2)²)`.
pub fn consecutive_triple_ratio(i: usize) -> f64 {
    let sq = |k: usize| {
        let k = k as f64;
        k * k
    };
    (2.0 / sq(i + 2) + 2.0 / sq(i + 3)) / (2.0 / sq(i + 1) + 2.0 / sq(i + 2))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Labels of the witnessing tuple, if any.
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ClaimReport {
    pub example: String,
    pub claims: Vec<Claim>,
    /// Points excluded from the interior population.
    pub excluded_points: Vec<String>,
    /// Number of triples touching an excluded point.
    pub excluded_triples: u64,
}

impl ClaimReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

fn labels_of(space: &FiniteMetricSpace, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| String::from(space.label(i))).collect()
}

/// Checks the claims made about the three-point example.
pub fn verify_three_point_claims() -> Result<ClaimReport, GalleryError> {
    let (space, map) = build_three_point_example();
    let r = crate::classifier::classify(&space, &map, None)?;
    let claims = alloc::vec![
        Claim {
            name: "strict perimeter decrease on every triangle".into(),
            passed: r.edelstein_perimeter.holds,
            detail: format!("least relative slack {}", r.edelstein_perimeter.margin),
            witness: labels_of(&space, &r.edelstein_perimeter.witness),
        },
        Claim {
            name: "not contractive".into(),
            passed: !r.edelstein_contractive.holds,
            detail: format!("relative slack {} at witness", r.edelstein_contractive.witness_slack),
            witness: labels_of(&space, &r.edelstein_contractive.witness),
        },
        Claim {
            name: "x and y are the fixed points".into(),
            passed: labels_of(&space, &r.fixed_points) == ["x", "y"],
            detail: format!("{} fixed points", r.fixed_points.len()),
            witness: labels_of(&space, &r.fixed_points),
        },
        Claim {
            name: "perimeter modulus 2/3".into(),
            passed: (r.perimeter.modulus - 2.0 / 3.0).abs() <= 1e-15,
            detail: format!("modulus {}", r.perimeter.modulus),
            witness: labels_of(&space, &r.perimeter.witness),
        },
    ];
    Ok(ClaimReport {
        example: "three-point".into(),
        claims,
        excluded_points: Vec::new(),
        excluded_triples: 0,
    })
}

/// Checks the claims made about the two-chain space on its interior:
/// (a) the Banach modulus is 1, attained on a rung `(x_i, x_i')` with even `i`;
/// (b) the perimeter modulus is at least `consecutive_triple_ratio(N - 5)`;
/// (c) every interior triangle strictly shrinks.
pub fn verify_figure1_claims(config: &GalleryConfig) -> Result<ClaimReport, GalleryError> {
    let (space, map) = build_figure1_space(config)?;
    let layout = ChainLayout { depth: config.depth };
    let mask = layout.interior_mask();
    let sweep = Sweep::new(&space, &map)?.restricted(&mask)?;
    let all = 0..space.len();

    let banach = sweep.banach(all.clone()).into_report();
    let rung_witness = match banach.witness[..] {
        [a, b] => match (layout.point(a), layout.point(b)) {
            (ChainPoint::Plain(i), ChainPoint::Primed(j)) => i == j && i % 2 == 0,
            _ => false,
        },
        _ => false,
    };
    let claim_a = Claim {
        name: "Banach modulus 1 attained on an even rung".into(),
        passed: banach.modulus == 1.0 && rung_witness,
        detail: format!("modulus {} over {} pairs", banach.modulus, banach.evaluated_count),
        witness: labels_of(&space, &banach.witness),
    };

    let perimeter = sweep.perimeter(all.clone()).into_report();
    let floor = consecutive_triple_ratio(config.depth - 5);
    let claim_b = Claim {
        name: "perimeter modulus approaches 1".into(),
        passed: perimeter.modulus >= floor && perimeter.modulus < 1.0,
        detail: format!("modulus {} >= ratio(N-5) = {}", perimeter.modulus, floor),
        witness: labels_of(&space, &perimeter.witness),
    };

    let strict = sweep.perimeter_strict(all).into_verdict();
    let claim_c = Claim {
        name: "strict perimeter decrease on interior triangles".into(),
        passed: strict.holds,
        detail: format!(
            "{} triangles, least relative slack {}",
            strict.evaluated_count, strict.margin
        ),
        witness: labels_of(&space, &strict.witness),
    };

    let excluded: Vec<usize> = (0..space.len()).filter(|&p| !mask[p]).collect();
    let kept = space.len() - excluded.len();
    Ok(ClaimReport {
        example: "figure1".into(),
        claims: alloc::vec![claim_a, claim_b, claim_c],
        excluded_points: labels_of(&space, &excluded),
        excluded_triples: crate::metric::triple_count(space.len())
            - crate::metric::triple_count(kept),
    })
}

/// Shortest-path completion of a complete graph, repeated until no entry
/// changes so that every stored `d(i, j) <= d(i, k) + d(k, j)` in floating
/// point.
pub fn shortest_path_completion(weights: &mut [f64], n: usize) {
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = weights[i * n + k] + weights[k * n + j];
                    if via < weights[i * n + j] {
                        weights[i * n + j] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// A random metric on `n` points and a random self-map, deterministic in `seed`.
///
/// Edge weights are uniform on `[1, 2)`, completed by shortest paths. The map
/// is uniform over all index functions and, with probability 1/2, replaced by
/// its square.
pub fn random_instance(n: usize, seed: u64) -> Result<(FiniteMetricSpace, SelfMap), GalleryError> {
    if n < 3 {
        return Err(GalleryError::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(1.0..2.0);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
    }
    shortest_path_completion(&mut w, n);
    let dist = DistanceMatrix::from_upper(n, |i, j| w[i * n + j])?;
    let space = FiniteMetricSpace::unlabeled(dist)?;
    let image: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut map = SelfMap::new(image, n)?;
    if rng.gen_bool(0.5) {
        map = map.compose(&map);
    }
    Ok((space, map))
}

/// Checks a random instance against the class hierarchy and, when
/// `alpha < 1` and no point has prime period 2, against the fixed-point
/// theorem: one or two fixed points, the a priori bound along every orbit,
/// and the perimeter chain.
pub fn verify_random_claims(n: usize, seed: u64) -> Result<ClaimReport, GalleryError> {
    let (space, map) = random_instance(n, seed)?;
    let mut claims = Vec::new();

    let validation = space.validate(0.0)?;
    claims.push(Claim {
        name: "metric holds with zero tolerance".into(),
        passed: validation.ok,
        detail: format!("{} violations", validation.violations.len()),
        witness: validation
            .violations
            .first()
            .map_or_else(Vec::new, |v| labels_of(&space, &v.witness)),
    });

    let report = match crate::classifier::classify(&space, &map, None) {
        Ok(r) => r,
        Err(ClassifyError::Hierarchy(msg)) => {
            claims.push(Claim {
                name: "class hierarchy".into(),
                passed: false,
                detail: msg.into(),
                witness: Vec::new(),
            });
            return Ok(random_report(claims));
        }
        Err(e) => return Err(e.into()),
    };
    claims.push(Claim {
        name: "class hierarchy".into(),
        passed: true,
        detail: format!(
            "Banach modulus {}, perimeter modulus {}",
            report.banach.modulus, report.perimeter.modulus
        ),
        witness: labels_of(&space, &report.perimeter.witness),
    });

    let alpha = report.perimeter.modulus;
    if alpha >= 1.0 || !report.period2_points.is_empty() {
        return Ok(random_report(claims));
    }

    let count = report.fixed_points.len();
    claims.push(Claim {
        name: "one or two fixed points".into(),
        passed: (1..=2).contains(&count),
        detail: format!("{count} fixed points"),
        witness: labels_of(&space, &report.fixed_points),
    });

    let mut bound_failure = None;
    let mut chain_failure = None;
    for x0 in 0..n {
        let trace = crate::solver::picard_orbit(&space, &map, x0, n, None)?;
        let limit = trace.last();
        let p0 = trace.perimeters[0];
        for (step, &x) in trace.points.iter().enumerate().skip(1) {
            let bound = p0 * libm::pow(alpha, (step - 1) as f64) / (1.0 - alpha);
            if space.d(x, limit) > bound * (1.0 + crate::solver::CHAIN_SLACK) {
                bound_failure.get_or_insert((x0, step));
            }
        }
        if !crate::solver::check_perimeter_chain(&trace, alpha).holds {
            chain_failure.get_or_insert(x0);
        }
    }
    claims.push(Claim {
        name: "a priori bound along every orbit".into(),
        passed: bound_failure.is_none(),
        detail: match bound_failure {
            Some((_, step)) => format!("fails at step {step}"),
            None => format!("{n} orbits"),
        },
        witness: bound_failure.map_or_else(Vec::new, |(x0, _)| labels_of(&space, &[x0])),
    });
    claims.push(Claim {
        name: "perimeter chain along every orbit".into(),
        passed: chain_failure.is_none(),
        detail: format!("{n} orbits"),
        witness: chain_failure.map_or_else(Vec::new, |x0| labels_of(&space, &[x0])),
    });
    Ok(random_report(claims))
}

fn random_report(claims: Vec<Claim>) -> ClaimReport {
    ClaimReport {
        example: "random".into(),
        claims,
        excluded_points: Vec::new(),
        excluded_triples: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::perimeter_modulus;

    #[test]
    fn three_point_claims_hold() {
        let r = verify_three_point_claims().unwrap();
        assert!(r.all_passed(), "{r:?}");
        let (s, t) = build_three_point_example();
        assert_eq!(perimeter_modulus(&s, &t).modulus, 2.0 / 3.0);
    }

    #[test]
    fn figure1_distances() {
        let cfg = GalleryConfig::default();
        let (s, t) = build_figure1_space(&cfg).unwrap();
        let l = ChainLayout { depth: 20 };
        assert_eq!(s.len(), 43);
        assert!(s.validate(0.0).is_ok());
        assert_eq!(s.d(l.plain(4), l.primed(4)), 0.01 / 25.0);
        assert_eq!(s.d(l.plain(0), l.primed(0)), 0.01);
        assert_eq!(s.d(l.plain(1), l.primed(1)), 0.01);
        assert_eq!(s.d(l.plain(2), l.primed(2)), 0.01 / 9.0);
        assert_eq!(s.d(l.plain(3), l.primed(3)), 0.01 / 9.0);
        assert_eq!(s.d(l.plain(0), l.plain(2)), 1.25);
        assert_eq!(s.d(l.plain(0), l.primed(2)), 1.25);
        assert_eq!(s.d(l.primed(3), l.plain(4)), 1.0 / 16.0);
        assert_eq!(s.label(l.limit()), "x*");
        assert_eq!(s.label(l.primed(7)), "x7'");
        assert_eq!(t.apply(l.plain(3)), l.plain(4));
        assert_eq!(t.apply(l.primed(3)), l.primed(4));
        assert_eq!(t.apply(l.plain(20)), l.limit());
        assert_eq!(t.apply(l.primed(20)), l.limit());
        assert_eq!(t.apply(l.limit()), l.limit());
    }

    #[test]
    fn figure1_series_closes_at_the_limit() {
        let (s, _) = build_figure1_space(&GalleryConfig::default()).unwrap();
        let l = ChainLayout { depth: 20 };
        let residual = PI * PI / 6.0 - s.d(l.plain(0), l.plain(20)) - s.d(l.plain(20), l.limit());
        assert!(residual.abs() < 1e-15);
    }

    #[test]
    fn figure1_rejects_bad_config() {
        let small = GalleryConfig { depth: 5, ..Default::default() };
        assert_eq!(build_figure1_space(&small), Err(GalleryError::DepthTooSmall(5)));
        let bad = GalleryConfig { epsilon: 0.0, ..Default::default() };
        assert!(matches!(build_figure1_space(&bad), Err(GalleryError::BadEpsilon(_))));
        // rungs longer than two chain gaps break the triangle inequality
        let wide = GalleryConfig { epsilon: 50.0, ..Default::default() };
        match build_figure1_space(&wide) {
            Err(GalleryError::NotAMetric { labels, slack }) => {
                assert_eq!(labels.len(), 3);
                assert!(slack > 0.0);
            }
            other => panic!("expected a metric failure, got {other:?}"),
        }
    }

    #[test]
    fn figure1_claims_hold() {
        let r = verify_figure1_claims(&GalleryConfig::default()).unwrap();
        assert!(r.all_passed(), "{r:#?}");
        assert_eq!(r.claims[0].witness, ["x0", "x0'"]);
        assert_eq!(r.excluded_points, ["x19", "x20", "x19'", "x20'"]);
    }

    #[test]
    fn consecutive_ratio_examples() {
        assert!((consecutive_triple_ratio(0) - 13.0 / 45.0).abs() < 1e-15);
        // exact rationals from the closed form
        assert!((consecutive_triple_ratio(10) - 37873.0 / 44785.0).abs() < 1e-15);
        assert!((consecutive_triple_ratio(15) - 39232.0 / 44145.0).abs() < 1e-15);
        assert!(consecutive_triple_ratio(197) <= 0.99);
        assert!(consecutive_triple_ratio(198) > 0.99);
        assert!(consecutive_triple_ratio(300) > 0.99);
    }

    #[test]
    fn random_instances_are_deterministic_metrics() {
        for seed in 0..200 {
            let (a, ta) = random_instance(8, seed).unwrap();
            let (b, tb) = random_instance(8, seed).unwrap();
            assert_eq!(a, b);
            assert_eq!(ta, tb);
            assert!(a.validate(0.0).unwrap().ok);
        }
        assert!(random_instance(3, 1).is_ok());
        assert_eq!(random_instance(2, 1), Err(GalleryError::TooFewPoints(2)));
    }

    #[test]
    fn random_claims_hold() {
        let mut with_theorem = 0;
        for seed in 0..200 {
            let r = verify_random_claims(5, seed).unwrap();
            assert!(r.all_passed(), "seed {seed}: {r:?}");
            if r.claims.len() > 2 {
                with_theorem += 1;
            }
        }
        assert!(with_theorem > 20, "{with_theorem}");
    }
}
