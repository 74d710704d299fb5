//! Symmetric aggregators `F`, `G` of three side lengths and their admissibility.
//!
//! A pair `(F, G)` is admissible when both are symmetric, `G(ξ,η,ζ) >= ξ`,
//! `F >= G`, `G(0,0,0) = 0` with `G` continuous at the origin, and `G` is
//! nondecreasing in each argument. Those properties cannot be proven from
//! samples, so [`check_admissible_pair`] sweeps a finite grid and reports the
//! first counterexample it finds for each condition.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::metric::{sort3, sum3};

/// Relative tolerance used by the grid checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// `G` on the smallest positive grid triple must stay below this many grid steps.
pub const ORIGIN_BUDGET_STEPS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AggregatorError {
    #[error("aggregator argument {0} is negative or not finite")]
    Domain(f64),
    #[error("q-norm exponent must be >= 1, got {0}")]
    BadExponent(f64),
    #[error("power convex function needs p > 1, got {0}")]
    BadPower(f64),
    #[error("grid must be nonempty, finite, nonnegative and contain 0")]
    BadGrid,
    #[error("constant must be positive and finite, got {0}")]
    BadConstant(f64),
    #[error("cannot parse aggregator spec {0:?}")]
    Parse(String),
}

/// A strictly increasing convex `φ` with `φ(0) = 0` and a closed-form inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSpec {
    /// `t²`
    Square,
    /// `tᵖ`, `p > 1`
    Power(f64),
    /// `eᵗ - 1`
    Expm1,
}

impl PhiSpec {
    pub fn power(p: f64) -> Result<Self, AggregatorError> {
        if p > 1.0 && p.is_finite() {
            Ok(PhiSpec::Power(p))
        } else {
            Err(AggregatorError::BadPower(p))
        }
    }

    #[inline]
    pub fn forward(&self, t: f64) -> f64 {
        match *self {
            PhiSpec::Square => t * t,
            PhiSpec::Power(p) => libm::pow(t, p),
            PhiSpec::Expm1 => libm::expm1(t),
        }
    }

    #[inline]
    pub fn inverse(&self, s: f64) -> f64 {
        match *self {
            PhiSpec::Square => libm::sqrt(s),
            PhiSpec::Power(p) => libm::pow(s, 1.0 / p),
            PhiSpec::Expm1 => libm::log1p(s),
        }
    }
}

/// A symmetric function of three nonnegative reals.
#[derive(Debug, Clone, PartialEq)]
pub enum TripleAggregator {
    /// `ξ + η + ζ`
    Sum,
    /// `(ξ^q + η^q + ζ^q)^(1/q)`, `q >= 1`
    QNorm(f64),
    /// `3 φ⁻¹((φ(ξ) + φ(η) + φ(ζ)) / 3)`
    PhiMean(PhiSpec),
    /// Pointwise sum of two aggregators.
    SumPair(Box<TripleAggregator>, Box<TripleAggregator>),
}

impl TripleAggregator {
    pub fn qnorm(q: f64) -> Result<Self, AggregatorError> {
        if q >= 1.0 && q.is_finite() {
            Ok(TripleAggregator::QNorm(q))
        } else {
            Err(AggregatorError::BadExponent(q))
        }
    }

    pub fn sum_pair(g: TripleAggregator, h: TripleAggregator) -> Self {
        TripleAggregator::SumPair(Box::new(g), Box::new(h))
    }

    /// Evaluates on nonnegative finite arguments.
    pub fn evaluate(&self, a: f64, b: f64, c: f64) -> Result<f64, AggregatorError> {
        for v in [a, b, c] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(AggregatorError::Domain(v));
            }
        }
        Ok(self.eval(a, b, c))
    }

    /// Evaluation without the domain check. Arguments are sorted first, so
    /// the result is bit-identical under every permutation.
    #[inline]
    pub fn eval(&self, a: f64, b: f64, c: f64) -> f64 {
        let s = sort3(a, b, c);
        self.eval_sorted(s)
    }

    #[inline]
    pub(crate) fn eval_sides(&self, sides: [f64; 3]) -> f64 {
        self.eval(sides[0], sides[1], sides[2])
    }

    fn eval_sorted(&self, [x, y, z]: [f64; 3]) -> f64 {
        match self {
            TripleAggregator::Sum => sum3(x, y, z),
            TripleAggregator::QNorm(q) if *q == 1.0 => sum3(x, y, z),
            TripleAggregator::QNorm(q) if *q == 2.0 => libm::sqrt((x * x + y * y) + z * z),
            TripleAggregator::QNorm(q) => {
                let q = *q;
                libm::pow((libm::pow(x, q) + libm::pow(y, q)) + libm::pow(z, q), 1.0 / q)
            }
            TripleAggregator::PhiMean(phi) => {
                let mean = ((phi.forward(x) + phi.forward(y)) + phi.forward(z)) / 3.0;
                3.0 * phi.inverse(mean)
            }
            TripleAggregator::SumPair(g, h) => g.eval_sorted([x, y, z]) + h.eval_sorted([x, y, z]),
        }
    }
}

impl fmt::Display for TripleAggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleAggregator::Sum => f.write_str("sum"),
            TripleAggregator::QNorm(q) => write!(f, "qnorm:{q}"),
            TripleAggregator::PhiMean(PhiSpec::Square) => f.write_str("phimean:square"),
            TripleAggregator::PhiMean(PhiSpec::Power(p)) => write!(f, "phimean:power:{p}"),
            TripleAggregator::PhiMean(PhiSpec::Expm1) => f.write_str("phimean:expm1"),
            TripleAggregator::SumPair(g, h) => write!(f, "sumpair:{g},{h}"),
        }
    }
}

fn parse_real(s: &str, whole: &str) -> Result<f64, AggregatorError> {
    s.trim().parse::<f64>().map_err(|_| AggregatorError::Parse(whole.to_string()))
}

impl FromStr for TripleAggregator {
    type Err = AggregatorError;

    /// Grammar: `sum`, `qnorm:<q>`, `phimean:square`, `phimean:power:<p>`,
    /// `phimean:expm1`, `sumpair:<spec>,<spec>`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let s = spec.trim();
        let err = || AggregatorError::Parse(spec.to_string());
        if s == "sum" {
            return Ok(TripleAggregator::Sum);
        }
        if let Some(q) = s.strip_prefix("qnorm:") {
            return TripleAggregator::qnorm(parse_real(q, spec)?);
        }
        if let Some(phi) = s.strip_prefix("phimean:") {
            let phi = match phi {
                "square" => PhiSpec::Square,
                "expm1" => PhiSpec::Expm1,
                other => match other.strip_prefix("power:") {
                    Some(p) => PhiSpec::power(parse_real(p, spec)?)?,
                    None => return Err(err()),
                },
            };
            return Ok(TripleAggregator::PhiMean(phi));
        }
        if let Some(rest) = s.strip_prefix("sumpair:") {
            // Nested pairs also contain commas: take the first split where
            // both halves parse.
            for (pos, _) in rest.match_indices(',') {
                if let (Ok(g), Ok(h)) = (rest[..pos].parse(), rest[pos + 1..].parse()) {
                    return Ok(TripleAggregator::sum_pair(g, h));
                }
            }
        }
        Err(err())
    }
}

/// Outcome of one grid condition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Verdict {
    pub passed: bool,
    /// First failing argument triple in sweep order.
    pub counterexample: Option<[f64; 3]>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { passed: true, counterexample: None }
    }

    fn fail(t: [f64; 3]) -> Self {
        Verdict { passed: false, counterexample: Some(t) }
    }

    fn first_failure(
        triples: impl IntoIterator<Item = [f64; 3]>,
        ok: impl Fn([f64; 3]) -> bool,
    ) -> Self {
        triples.into_iter().find(|&t| !ok(t)).map_or_else(Verdict::pass, Verdict::fail)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConstantVerdict {
    pub constant: f64,
    pub verdict: Verdict,
}

/// Grid verdicts for the admissibility conditions of an `(F, G)` pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AdmissibilityReport {
    /// Sorted, deduplicated grid the verdicts refer to.
    pub grid: Vec<f64>,
    pub tolerance: f64,
    pub symmetric_f: Verdict,
    pub symmetric_g: Verdict,
    /// `G(ξ, η, ζ) >= ξ` for every ordered grid triple.
    pub g_dominates_first: Verdict,
    /// `F >= G`.
    pub f_dominates_g: Verdict,
    /// `G(0,0,0) = 0` and `G(h,h,h) < 10 h` for the smallest positive grid value `h`.
    pub g_vanishes_at_origin: Verdict,
    /// `G` nondecreasing along every axis-aligned grid increment.
    pub g_monotone: Verdict,
    /// Optional `G(ξ,η,ζ) <= K ξ` over all rotations.
    pub condition_k: Option<ConstantVerdict>,
    /// Optional `G(ξ,ξ,0) <= k ξ`.
    pub condition_k0: Option<ConstantVerdict>,
}

impl AdmissibilityReport {
    /// All of the mandatory conditions hold on the grid.
    pub fn admissible(&self) -> bool {
        [
            &self.symmetric_f,
            &self.symmetric_g,
            &self.g_dominates_first,
            &self.f_dominates_g,
            &self.g_vanishes_at_origin,
            &self.g_monotone,
        ]
        .iter()
        .all(|v| v.passed)
    }

    pub fn with_condition_k(
        mut self,
        g: &TripleAggregator,
        k: f64,
    ) -> Result<Self, AggregatorError> {
        let verdict = check_condition_k(g, k, &grid_triples(&self.grid))?;
        self.condition_k = Some(ConstantVerdict { constant: k, verdict });
        Ok(self)
    }

    pub fn with_condition_k0(
        mut self,
        g: &TripleAggregator,
        k: f64,
    ) -> Result<Self, AggregatorError> {
        let verdict = check_condition_k0(g, k, &self.grid)?;
        self.condition_k0 = Some(ConstantVerdict { constant: k, verdict });
        Ok(self)
    }
}

#[inline]
fn ge_tol(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs >= rhs - tol * (1.0 + rhs.abs())
}

fn normalize_grid(grid: &[f64]) -> Result<Vec<f64>, AggregatorError> {
    if grid.is_empty() || grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(AggregatorError::BadGrid);
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    if g[0] != 0.0 {
        return Err(AggregatorError::BadGrid);
    }
    Ok(g)
}

/// Every ordered triple of grid values, lexicographic in grid order.
pub fn grid_triples(grid: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(grid.len().pow(3));
    for &a in grid {
        for &b in grid {
            for &c in grid {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// `{0, step, 2 step, ..., count * step}` computed as `i * step`.
pub fn uniform_grid(step: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| i as f64 * step).collect()
}

fn permutations([a, b, c]: [f64; 3]) -> [[f64; 3]; 6] {
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

fn symmetric_on(agg: &TripleAggregator, triples: &[[f64; 3]]) -> Verdict {
    Verdict::first_failure(triples.iter().copied(), |t| {
        let base = agg.eval_sides(t).to_bits();
        permutations(t).iter().all(|&p| agg.eval_sides(p).to_bits() == base)
    })
}

/// Sweeps the admissibility conditions over every ordered triple of `grid`.
pub fn check_admissible_pair(
    f: &TripleAggregator,
    g: &TripleAggregator,
    grid: &[f64],
) -> Result<AdmissibilityReport, AggregatorError> {
    check_admissible_pair_with_tolerance(f, g, grid, DEFAULT_TOLERANCE)
}

pub fn check_admissible_pair_with_tolerance(
    f: &TripleAggregator,
    g: &TripleAggregator,
    grid: &[f64],
    tol: f64,
) -> Result<AdmissibilityReport, AggregatorError> {
    let grid = normalize_grid(grid)?;
    let triples = grid_triples(&grid);

    let symmetric_f = symmetric_on(f, &triples);
    let symmetric_g = symmetric_on(g, &triples);
    let g_dominates_first =
        Verdict::first_failure(triples.iter().copied(), |t| ge_tol(g.eval_sides(t), t[0], tol));
    let f_dominates_g = Verdict::first_failure(triples.iter().copied(), |t| {
        ge_tol(f.eval_sides(t), g.eval_sides(t), tol)
    });

    let g_vanishes_at_origin = if g.eval(0.0, 0.0, 0.0) != 0.0 {
        Verdict::fail([0.0; 3])
    } else {
        match grid.get(1) {
            Some(&h) if !(g.eval(h, h, h) < ORIGIN_BUDGET_STEPS * h) => Verdict::fail([h, h, h]),
            _ => Verdict::pass(),
        }
    };

    let len = grid.len();
    let mut g_monotone = Verdict::pass();
    'outer: for ia in 0..len {
        for ib in 0..len {
            for ic in 0..len {
                let idx = [ia, ib, ic];
                let here = g.eval(grid[ia], grid[ib], grid[ic]);
                for axis in 0..3 {
                    if idx[axis] + 1 == len {
                        continue;
                    }
                    let mut up = [grid[ia], grid[ib], grid[ic]];
                    up[axis] = grid[idx[axis] + 1];
                    if !ge_tol(g.eval_sides(up), here, tol) {
                        g_monotone = Verdict::fail([grid[ia], grid[ib], grid[ic]]);
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(AdmissibilityReport {
        grid,
        tolerance: tol,
        symmetric_f,
        symmetric_g,
        g_dominates_first,
        f_dominates_g,
        g_vanishes_at_origin,
        g_monotone,
        condition_k: None,
        condition_k0: None,
    })
}

fn check_constant(k: f64) -> Result<(), AggregatorError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(AggregatorError::BadConstant(k))
    }
}

/// `G(ξ, η, ζ) <= K ξ` for every listed triple and every rotation of it,
/// i.e. `G <= K min(ξ, η, ζ)`. Uses [`DEFAULT_TOLERANCE`] relative slack.
pub fn check_condition_k(
    g: &TripleAggregator,
    k: f64,
    triples: &[[f64; 3]],
) -> Result<Verdict, AggregatorError> {
    check_constant(k)?;
    Ok(Verdict::first_failure(triples.iter().copied(), |[a, b, c]| {
        let value = g.eval(a, b, c);
        [a, b, c].iter().all(|&first| ge_tol(k * first, value, DEFAULT_TOLERANCE))
    }))
}

/// `G(t, t, 0) <= k t` for every grid value `t`.
pub fn check_condition_k0(
    g: &TripleAggregator,
    k: f64,
    grid: &[f64],
) -> Result<Verdict, AggregatorError> {
    check_constant(k)?;
    Ok(Verdict::first_failure(grid.iter().map(|&t| [t, t, 0.0]), |[t, _, _]| {
        ge_tol(k * t, g.eval(t, t, 0.0), DEFAULT_TOLERANCE)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn q(v: f64) -> TripleAggregator {
        TripleAggregator::qnorm(v).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(TripleAggregator::Sum.evaluate(1.0, 1.0, 1.0).unwrap(), 3.0);
        assert_eq!(q(2.0).evaluate(3.0, 4.0, 0.0).unwrap(), 5.0);
        assert_eq!(
            TripleAggregator::PhiMean(PhiSpec::Square).evaluate(1.0, 1.0, 1.0).unwrap(),
            3.0
        );
        let pair = TripleAggregator::sum_pair(TripleAggregator::Sum, q(2.0));
        assert_eq!(pair.evaluate(3.0, 4.0, 0.0).unwrap(), 12.0);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            TripleAggregator::Sum.evaluate(-1.0, 0.0, 0.0),
            Err(AggregatorError::Domain(-1.0))
        );
        assert!(TripleAggregator::Sum.evaluate(f64::INFINITY, 0.0, 0.0).is_err());
        assert!(TripleAggregator::Sum.evaluate(0.0, f64::NAN, 0.0).is_err());
        assert!(TripleAggregator::qnorm(0.5).is_err());
        assert!(PhiSpec::power(1.0).is_err());
    }

    #[test]
    fn phi_inverses_round_trip() {
        for phi in [PhiSpec::Square, PhiSpec::Power(3.5), PhiSpec::Expm1] {
            assert_eq!(phi.forward(0.0), 0.0);
            for t in [0.1, 0.7, 1.0, 2.0, 5.0] {
                let back = phi.inverse(phi.forward(t));
                assert!((back - t).abs() <= 1e-13 * t, "{phi:?} at {t}");
            }
        }
    }

    #[test]
    fn spec_strings_parse_and_display() {
        let cases = [
            "sum",
            "qnorm:1.5",
            "phimean:square",
            "phimean:power:3",
            "phimean:expm1",
            "sumpair:sum,qnorm:2",
            "sumpair:sumpair:sum,phimean:expm1,qnorm:3",
            "sumpair:sum,sumpair:qnorm:2,sum",
        ];
        for c in cases {
            let agg: TripleAggregator = c.parse().unwrap();
            let again: TripleAggregator = agg.to_string().parse().unwrap();
            assert_eq!(agg, again, "{c}");
        }
        let nested: TripleAggregator = "sumpair:sumpair:sum,phimean:expm1,qnorm:3".parse().unwrap();
        assert_eq!(
            nested,
            TripleAggregator::sum_pair(
                TripleAggregator::sum_pair(
                    TripleAggregator::Sum,
                    TripleAggregator::PhiMean(PhiSpec::Expm1)
                ),
                q(3.0)
            )
        );
        for bad in [
            "",
            "qnorm",
            "qnorm:x",
            "qnorm:0.5",
            "phimean:cube",
            "phimean:power:1",
            "sumpair:sum",
            "max",
        ] {
            assert!(bad.parse::<TripleAggregator>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sum_and_l2_are_admissible() {
        let r =
            check_admissible_pair(&TripleAggregator::Sum, &q(2.0), &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(r.admissible(), "{r:?}");
    }

    #[test]
    fn reversed_roles_fail_domination() {
        let grid = [0.0, 0.5, 1.0, 2.0];
        let r = check_admissible_pair(&q(2.0), &TripleAggregator::Sum, &grid).unwrap();
        assert!(!r.f_dominates_g.passed);
        let t = r.f_dominates_g.counterexample.unwrap();
        assert!(q(2.0).eval_sides(t) < TripleAggregator::Sum.eval_sides(t));
        // the illustrative witness from the equal triple
        assert_eq!(q(2.0).eval(1.0, 1.0, 1.0), libm::sqrt(3.0));
        assert!(q(2.0).eval(1.0, 1.0, 1.0) < TripleAggregator::Sum.eval(1.0, 1.0, 1.0));
        // everything about G = Sum alone is fine
        assert!(r.g_dominates_first.passed && r.g_monotone.passed && r.g_vanishes_at_origin.passed);
    }

    #[test]
    fn equal_pair_passes() {
        let s = TripleAggregator::Sum;
        assert!(check_admissible_pair(&s, &s, &[0.0, 1.0]).unwrap().admissible());
    }

    #[test]
    fn bad_grids() {
        let s = TripleAggregator::Sum;
        assert_eq!(check_admissible_pair(&s, &s, &[]), Err(AggregatorError::BadGrid));
        assert_eq!(check_admissible_pair(&s, &s, &[1.0, 2.0]), Err(AggregatorError::BadGrid));
        assert_eq!(check_admissible_pair(&s, &s, &[0.0, -1.0]), Err(AggregatorError::BadGrid));
    }

    #[test]
    fn origin_budget_catches_large_g() {
        let mut big = TripleAggregator::Sum;
        for _ in 0..4 {
            big = TripleAggregator::sum_pair(big.clone(), big);
        }
        // 16 * Sum on (0.1, 0.1, 0.1) = 4.8 >= 10 * 0.1
        let r = check_admissible_pair(&TripleAggregator::Sum, &big, &uniform_grid(0.1, 3)).unwrap();
        assert!(!r.g_vanishes_at_origin.passed);
        assert!(!r.f_dominates_g.passed);
        assert!(r.g_dominates_first.passed);
    }

    #[test]
    fn condition_k_examples() {
        let s = TripleAggregator::Sum;
        let equal: Vec<[f64; 3]> = (0..=20).map(|i| [i as f64 * 0.1; 3]).collect();
        assert!(check_condition_k(&s, 3.0, &equal).unwrap().passed);

        let v = check_condition_k(&s, 3.0, &[[1.0, 2.0, 3.0]]).unwrap();
        assert!(!v.passed);
        assert_eq!(v.counterexample, Some([1.0, 2.0, 3.0]));

        let grid = uniform_grid(0.1, 10);
        let v = check_condition_k(&q(1.0), 9.0, &grid_triples(&grid)).unwrap();
        assert!(!v.passed);
        let [a, b, c] = v.counterexample.unwrap();
        let min = a.min(b).min(c);
        assert!(q(1.0).eval(a, b, c) > 9.0 * min);
        let direct = check_condition_k(&q(1.0), 9.0, &[[0.1, 1.0, 1.0]]).unwrap();
        assert!(!direct.passed, "2.1 > 0.9");
        assert!(check_condition_k(&s, 0.0, &equal).is_err());
    }

    #[test]
    fn condition_k0_examples() {
        let grid = uniform_grid(0.1, 20);
        let s = TripleAggregator::Sum;
        assert!(check_condition_k0(&s, 2.0, &grid).unwrap().passed);
        assert!(check_condition_k0(&q(2.0), 1.5, &grid).unwrap().passed);
        let v = check_condition_k0(&s, 1.9, &grid).unwrap();
        assert!(!v.passed);
        assert_eq!(v.counterexample, Some([0.1, 0.1, 0.0]));
    }

    #[test]
    fn report_carries_optional_constants() {
        let g = q(2.0);
        let r = check_admissible_pair(&TripleAggregator::Sum, &g, &uniform_grid(0.5, 4))
            .unwrap()
            .with_condition_k(&g, 3.0)
            .unwrap()
            .with_condition_k0(&g, 1.5)
            .unwrap();
        assert!(!r.condition_k.as_ref().unwrap().verdict.passed);
        assert!(r.condition_k0.as_ref().unwrap().verdict.passed);
        assert!(r.admissible());
    }

    fn builtins() -> Vec<TripleAggregator> {
        vec![
            TripleAggregator::Sum,
            q(1.0),
            q(1.5),
            q(2.0),
            q(3.0),
            TripleAggregator::PhiMean(PhiSpec::Square),
            TripleAggregator::PhiMean(PhiSpec::Power(2.5)),
            TripleAggregator::PhiMean(PhiSpec::Expm1),
            TripleAggregator::sum_pair(TripleAggregator::Sum, q(2.0)),
        ]
    }

    proptest! {
        #[test]
        fn evaluation_is_permutation_invariant(a in 0.0f64..10.0, b in 0.0f64..10.0, c in 0.0f64..10.0) {
            for agg in builtins() {
                let base = agg.eval(a, b, c).to_bits();
                for p in permutations([a, b, c]) {
                    prop_assert_eq!(agg.eval_sides(p).to_bits(), base);
                }
            }
        }

        #[test]
        fn l1_norm_matches_sum(a in 0.0f64..10.0, b in 0.0f64..10.0, c in 0.0f64..10.0) {
            let s = TripleAggregator::Sum.eval(a, b, c);
            let n = q(1.0).eval(a, b, c);
            prop_assert!((s - n).abs() <= 1e-12 * s.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn jensen_phi_mean_dominates_sum(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0) {
            for phi in [PhiSpec::Square, PhiSpec::Power(1.7), PhiSpec::Expm1] {
                let f = TripleAggregator::PhiMean(phi).eval(a, b, c);
                let g = TripleAggregator::Sum.eval(a, b, c);
                prop_assert!(ge_tol(f, g, DEFAULT_TOLERANCE), "{:?}: {} < {}", phi, f, g);
            }
        }
    }
}
