//! Picard iteration with the perimeter-chain certificate.
//!
//! For a map with perimeter (or `(F, G)`) modulus `alpha < 1` and no points of
//! prime period 2, any three consecutive non-fixed iterates are pairwise
//! distinct, the window values `p_n` strictly decrease, and
//! `d(x_n, x_{n+p}) <= p_0 alpha^(n-1) / (1 - alpha)` for `n >= 1`. On a finite
//! space the orbit must then land on a fixed point.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::aggregators::TripleAggregator;
use crate::classifier::perimeter_modulus;
use crate::metric::{sum3, FiniteMetricSpace, SelfMap};

/// Relative rounding allowance for the chain inequalities and bound checks.
pub const CHAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("contraction constant must lie in [0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("a priori bound needs n >= 1")]
    ZeroStep,
    #[error("initial perimeter must be finite and nonnegative, got {0}")]
    BadPerimeter(f64),
    #[error("tolerance must be finite and nonnegative, got {0}")]
    BadTolerance(f64),
    #[error("start index {index} out of range for {n} points")]
    StartOutOfRange { index: usize, n: usize },
    #[error("map has {map} entries but the space has {space} points")]
    SizeMismatch { space: usize, map: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum Termination {
    /// `T(x_s) = x_s` for the last recorded point.
    FixedPointHit,
    /// The last recorded point already appeared `period` steps earlier.
    CycleDetected {
        period: usize,
    },
    MaxSteps,
}

/// `p̃_n = F(window n)` and `p_n = G(window n)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AggregateTrace {
    pub f_values: Vec<f64>,
    pub g_values: Vec<f64>,
}

/// A Picard orbit `x_0, T x_0, T² x_0, ...` with its window data.
///
/// `points` holds `x_0..=x_s` where `s` is the number of steps taken. For
/// every recorded `x_n` the window `(x_n, x_{n+1}, x_{n+2})` is formed with
/// the map, so `step_dists`, `perimeters` and the aggregate sequences all
/// have one entry per recorded point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct OrbitTrace {
    pub points: Vec<usize>,
    /// `d(x_n, x_{n+1})`
    pub step_dists: Vec<f64>,
    /// `d(x_n,x_{n+1}) + d(x_{n+1},x_{n+2}) + d(x_{n+2},x_n)`
    pub perimeters: Vec<f64>,
    /// Whether window `n` consists of three pairwise distinct points.
    pub distinct_windows: Vec<bool>,
    pub aggregates: Option<AggregateTrace>,
    pub termination: Termination,
}

impl OrbitTrace {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> usize {
        *self.points.last().expect("orbit has a start point")
    }
}

/// Iterates `T` from `x0` until a fixed point, a repeated state, or `max_steps`.
pub fn picard_orbit(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x0: usize,
    max_steps: usize,
    fg: Option<(&TripleAggregator, &TripleAggregator)>,
) -> Result<OrbitTrace, SolverError> {
    check_inputs(space, map, x0)?;
    let n = space.len();
    let mut seen = alloc::vec![usize::MAX; n];
    let mut points = alloc::vec![x0];
    seen[x0] = 0;
    let termination = loop {
        let s = points.len() - 1;
        let x = points[s];
        let next = map.apply(x);
        if next == x {
            break Termination::FixedPointHit;
        }
        if s >= max_steps {
            break Termination::MaxSteps;
        }
        points.push(next);
        if seen[next] != usize::MAX {
            break Termination::CycleDetected { period: s + 1 - seen[next] };
        }
        seen[next] = s + 1;
    };

    let windows: Vec<[usize; 3]> = points
        .iter()
        .map(|&a| {
            let b = map.apply(a);
            [a, b, map.apply(b)]
        })
        .collect();
    let step_dists = windows.iter().map(|&[a, b, _]| space.d(a, b)).collect();
    let perimeters = windows
        .iter()
        .map(|&[a, b, c]| sum3(space.d(a, b), space.d(b, c), space.d(c, a)))
        .collect();
    let distinct_windows = windows.iter().map(|&[a, b, c]| a != b && b != c && a != c).collect();
    let aggregates = fg.map(|(f, g)| AggregateTrace {
        f_values: windows.iter().map(|&[a, b, c]| f.eval_sides(space.sides(a, b, c))).collect(),
        g_values: windows.iter().map(|&[a, b, c]| g.eval_sides(space.sides(a, b, c))).collect(),
    });
    Ok(OrbitTrace { points, step_dists, perimeters, distinct_windows, aggregates, termination })
}

fn check_inputs(space: &FiniteMetricSpace, map: &SelfMap, x0: usize) -> Result<(), SolverError> {
    if map.len() != space.len() {
        return Err(SolverError::SizeMismatch { space: space.len(), map: map.len() });
    }
    if x0 >= space.len() {
        return Err(SolverError::StartOutOfRange { index: x0, n: space.len() });
    }
    Ok(())
}

/// `p0 * alpha^(n-1) / (1 - alpha)`, the tail bound on `d(x_n, x_{n+p})`.
pub fn a_priori_bound(p0: f64, alpha: f64, n: usize) -> Result<f64, SolverError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(SolverError::AlphaOutOfRange(alpha));
    }
    if n == 0 {
        return Err(SolverError::ZeroStep);
    }
    if !(p0.is_finite() && p0 >= 0.0) {
        return Err(SolverError::BadPerimeter(p0));
    }
    Ok(p0 * libm::pow(alpha, (n - 1) as f64) / (1.0 - alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SolveStatus {
    /// An exact fixed point was reached.
    Converged,
    /// The a priori bound fell below the tolerance before an exact hit; the
    /// last iterate is within `tol` of the fixed point.
    Certified,
    Cycle,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CertifiedBound {
    pub step: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FixedPointResult {
    pub status: SolveStatus,
    /// Exact fixed point when converged.
    pub fixed_point: Option<usize>,
    /// Last iterate; the approximate fixed point when certified.
    pub last_point: usize,
    pub steps: usize,
    /// Perimeter modulus of the whole space used for the certificate.
    pub alpha: f64,
    /// Perimeter of the first window, when it is a proper triangle and `alpha < 1`.
    pub p0: Option<f64>,
    /// `a_priori_bound(p0, alpha, n)` for `n = 1..=steps`.
    pub certified_bounds: Vec<CertifiedBound>,
    pub trace: OrbitTrace,
}

/// Picard iteration with the perimeter certificate.
///
/// Exact fixed-point hits stop the iteration regardless of `tol`. When the
/// perimeter modulus `alpha` of the whole space is below one and the first
/// window is a proper triangle, the iteration also stops at the first `n`
/// with `a_priori_bound(p0, alpha, n) <= tol`.
pub fn solve_fixed_point(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x0: usize,
    tol: f64,
    max_steps: usize,
) -> Result<FixedPointResult, SolverError> {
    check_inputs(space, map, x0)?;
    let alpha = perimeter_modulus(space, map).modulus;
    solve_with_modulus(space, map, x0, tol, max_steps, alpha)
}

/// As [`solve_fixed_point`] with a precomputed perimeter modulus.
pub fn solve_with_modulus(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x0: usize,
    tol: f64,
    max_steps: usize,
    alpha: f64,
) -> Result<FixedPointResult, SolverError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(SolverError::BadTolerance(tol));
    }
    let full = picard_orbit(space, map, x0, max_steps, None)?;
    let p0 = (alpha < 1.0 && full.distinct_windows[0]).then(|| full.perimeters[0]);

    let mut certified_bounds = Vec::new();
    let mut certified_at = None;
    if let Some(p0) = p0 {
        for step in 1..=full.steps() {
            let bound = a_priori_bound(p0, alpha, step)?;
            certified_bounds.push(CertifiedBound { step, bound });
            let x = full.points[step];
            if map.apply(x) != x && bound <= tol {
                certified_at = Some(step);
                break;
            }
        }
    }

    let trace = match certified_at {
        Some(step) => truncate(full, step),
        None => full,
    };
    let last_point = trace.last();
    let steps = trace.steps();
    let (status, fixed_point) = match (certified_at, trace.termination) {
        (Some(_), _) => (SolveStatus::Certified, None),
        (None, Termination::FixedPointHit) => (SolveStatus::Converged, Some(last_point)),
        (None, Termination::CycleDetected { .. }) => (SolveStatus::Cycle, None),
        (None, Termination::MaxSteps) => (SolveStatus::Exhausted, None),
    };
    Ok(FixedPointResult {
        status,
        fixed_point,
        last_point,
        steps,
        alpha,
        p0,
        certified_bounds,
        trace,
    })
}

fn truncate(mut trace: OrbitTrace, step: usize) -> OrbitTrace {
    let keep = step + 1;
    trace.points.truncate(keep);
    trace.step_dists.truncate(keep);
    trace.perimeters.truncate(keep);
    trace.distinct_windows.truncate(keep);
    if let Some(a) = trace.aggregates.as_mut() {
        a.f_values.truncate(keep);
        a.g_values.truncate(keep);
    }
    trace.termination = Termination::MaxSteps;
    trace
}

/// All `x` with `T(x) = x`, ascending.
pub fn enumerate_fixed_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&x| map.apply(x) == x).collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChainVerdict {
    pub holds: bool,
    /// Number of proper-triangle windows that were checked.
    pub windows_checked: usize,
    /// First window index at which a link of the chain fails.
    pub first_violation: Option<usize>,
}

/// Checks `p_n > alpha p_n >= p̃_{n+1} >= p_{n+1}` along the orbit.
///
/// Only windows made of three pairwise distinct points carry the strict part
/// and the contraction link. Without aggregates, `p̃_n = p_n` is the
/// perimeter. Comparisons allow [`CHAIN_SLACK`] relative rounding.
pub fn check_perimeter_chain(trace: &OrbitTrace, alpha: f64) -> ChainVerdict {
    let (f_vals, g_vals) = match &trace.aggregates {
        Some(a) => (&a.f_values[..], &a.g_values[..]),
        None => (&trace.perimeters[..], &trace.perimeters[..]),
    };
    let le = |a: f64, b: f64| a <= b + CHAIN_SLACK * b.abs();
    let mut windows_checked = 0;
    for n in 0..g_vals.len() {
        if !trace.distinct_windows[n] {
            continue;
        }
        windows_checked += 1;
        let p = g_vals[n];
        let mut ok = p > alpha * p;
        if let (Some(&f_next), Some(&g_next)) = (f_vals.get(n + 1), g_vals.get(n + 1)) {
            ok &= le(f_next, alpha * p) && le(g_next, f_next);
        }
        if !ok {
            return ChainVerdict { holds: false, windows_checked, first_violation: Some(n) };
        }
    }
    ChainVerdict { holds: true, windows_checked, first_violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistanceMatrix;
    use alloc::string::String;
    use alloc::vec;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("p{i}")).collect()
    }

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let m =
            DistanceMatrix::from_upper(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap();
        FiniteMetricSpace::new(labels(points.len()), m).unwrap()
    }

    fn line013() -> (FiniteMetricSpace, SelfMap) {
        (line(&[0.0, 1.0, 3.0]), SelfMap::new(vec![0, 0, 1], 3).unwrap())
    }

    #[test]
    fn orbit_examples() {
        let (s, t) = line013();
        let o = picard_orbit(&s, &t, 2, 10, None).unwrap();
        assert_eq!(o.points, vec![2, 1, 0]);
        assert_eq!(o.termination, Termination::FixedPointHit);
        assert_eq!(o.steps(), 2);
        assert_eq!(o.step_dists, vec![2.0, 1.0, 0.0]);
        assert_eq!(o.perimeters[0], 6.0);
        assert_eq!(o.distinct_windows, vec![true, false, false]);

        let id = picard_orbit(&s, &SelfMap::identity(3), 1, 10, None).unwrap();
        assert_eq!(id.points, vec![1]);
        assert_eq!(id.termination, Termination::FixedPointHit);

        let swap = SelfMap::new(vec![1, 0, 2], 3).unwrap();
        let o = picard_orbit(&s, &swap, 0, 10, None).unwrap();
        assert_eq!(o.points, vec![0, 1, 0]);
        assert_eq!(o.termination, Termination::CycleDetected { period: 2 });
    }

    #[test]
    fn orbit_respects_step_limit_and_inputs() {
        let s = line(&[0.0, 1.0, 2.0, 4.0]);
        let shift = SelfMap::new(vec![1, 2, 3, 3], 4).unwrap();
        let o = picard_orbit(&s, &shift, 0, 2, None).unwrap();
        assert_eq!(o.points, vec![0, 1, 2]);
        assert_eq!(o.termination, Termination::MaxSteps);
        assert!(picard_orbit(&s, &shift, 9, 2, None).is_err());
        assert!(picard_orbit(&s, &SelfMap::identity(3), 0, 2, None).is_err());
    }

    #[test]
    fn aggregate_windows() {
        let (s, t) = line013();
        let sum = TripleAggregator::Sum;
        let l2 = TripleAggregator::qnorm(2.0).unwrap();
        let o = picard_orbit(&s, &t, 2, 10, Some((&sum, &l2))).unwrap();
        let a = o.aggregates.unwrap();
        assert_eq!(a.f_values, o.perimeters);
        assert!((a.g_values[0] - libm::sqrt(14.0)).abs() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        assert!((a_priori_bound(6.0, 1.0 / 3.0, 1).unwrap() - 9.0).abs() < 1e-14);
        assert!((a_priori_bound(6.0, 1.0 / 3.0, 3).unwrap() - 1.0).abs() < 1e-15);
        for alpha in [0.0, 0.3, 0.99] {
            for n in [1, 5, 40] {
                assert_eq!(a_priori_bound(0.0, alpha, n).unwrap(), 0.0);
            }
        }
        assert_eq!(a_priori_bound(1.0, 1.0, 1), Err(SolverError::AlphaOutOfRange(1.0)));
        assert_eq!(a_priori_bound(1.0, -0.1, 1), Err(SolverError::AlphaOutOfRange(-0.1)));
        assert_eq!(a_priori_bound(1.0, 0.5, 0), Err(SolverError::ZeroStep));
    }

    #[test]
    fn solve_line_example() {
        let (s, t) = line013();
        let r = solve_fixed_point(&s, &t, 2, 0.0, 50).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.fixed_point, Some(0));
        assert_eq!(r.steps, 2);
        assert_eq!(r.alpha, 1.0 / 3.0);
        assert_eq!(r.p0, Some(6.0));
        for b in &r.certified_bounds {
            let x = r.trace.points[b.step];
            assert!(s.d(x, 0) <= b.bound);
            let expected = 9.0 * libm::pow(1.0 / 3.0, (b.step - 1) as f64);
            assert!((b.bound - expected).abs() <= 1e-14 * expected);
        }
        assert_eq!(r.certified_bounds.len(), 2);
    }

    #[test]
    fn solve_identity_and_swap() {
        let (s, _) = line013();
        for tol in [0.0, 1e-3, 10.0] {
            let r = solve_fixed_point(&s, &SelfMap::identity(3), 1, tol, 5).unwrap();
            assert_eq!(r.status, SolveStatus::Converged);
            assert_eq!(r.steps, 0);
            assert_eq!(r.fixed_point, Some(1));
        }
        let swap = SelfMap::new(vec![1, 0, 2], 3).unwrap();
        let r = solve_fixed_point(&s, &swap, 0, 0.0, 5).unwrap();
        assert_eq!(r.status, SolveStatus::Cycle);
        assert_eq!(crate::classifier::find_period2_points(&swap), vec![0, 1]);
    }

    #[test]
    fn loose_tolerance_certifies_early() {
        let (s, t) = line013();
        // bound at n = 1 is 9 <= 10, and x_1 = 1 is not fixed
        let r = solve_fixed_point(&s, &t, 2, 10.0, 50).unwrap();
        assert_eq!(r.status, SolveStatus::Certified);
        assert_eq!(r.last_point, 1);
        assert_eq!(r.steps, 1);
        assert!(s.d(1, 0) <= 10.0);
        assert!(solve_fixed_point(&s, &t, 2, -1.0, 50).is_err());
    }

    #[test]
    fn exhausted_when_too_few_steps() {
        let (s, t) = line013();
        let r = solve_fixed_point(&s, &t, 2, 0.0, 1).unwrap();
        assert_eq!(r.status, SolveStatus::Exhausted);
        assert_eq!(r.fixed_point, None);
    }

    #[test]
    fn fixed_point_enumeration() {
        assert_eq!(enumerate_fixed_points(&SelfMap::new(vec![0, 1, 0], 3).unwrap()), vec![0, 1]);
        assert_eq!(enumerate_fixed_points(&SelfMap::constant(5, 3)), vec![3]);
        assert!(enumerate_fixed_points(&SelfMap::new(vec![1, 0, 3, 2], 4).unwrap()).is_empty());
    }

    #[test]
    fn chain_examples() {
        let (s, t) = line013();
        let o = picard_orbit(&s, &t, 2, 10, None).unwrap();
        let v = check_perimeter_chain(&o, 1.0 / 3.0);
        assert!(v.holds);
        assert_eq!(v.windows_checked, 1);

        let id = picard_orbit(&s, &SelfMap::identity(3), 0, 10, None).unwrap();
        let v = check_perimeter_chain(&id, 0.5);
        assert!(v.holds);
        assert_eq!(v.windows_checked, 0);

        // a modulus that is too small breaks the contraction link
        let shift = SelfMap::new(vec![1, 2, 3, 3], 4).unwrap();
        let s4 = line(&[0.0, 1.0, 2.0, 4.0]);
        let o = picard_orbit(&s4, &shift, 0, 10, None).unwrap();
        let v = check_perimeter_chain(&o, 0.1);
        assert!(!v.holds);
        assert_eq!(v.first_violation, Some(0));
        assert!(!check_perimeter_chain(&o, 1.0).holds);
    }
}
