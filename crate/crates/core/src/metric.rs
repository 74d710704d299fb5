//! Finite metric spaces, self-maps and the triple population.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Errors raised while building spaces, maps and triples.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("a space needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("tolerance must be finite and nonnegative, got {0}")]
    BadTolerance(f64),
    #[error("not a metric: {} violation(s), first: {}", .0.violations.len(), .0.violations[0])]
    NotAMetric(MetricValidationReport),
    #[error("triple ({0}, {1}, {2}) has a repeated index")]
    InvalidTriple(usize, usize, usize),
    #[error("index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("map has {got} entries, expected {expected}")]
    MapLength { expected: usize, got: usize },
}

/// Sum of three reals in ascending order.
///
/// Every symmetric three-term sum in the crate goes through here so that
/// perimeters and the `Sum` aggregator agree bit for bit under any argument
/// permutation.
#[inline]
pub fn sum3(a: f64, b: f64, c: f64) -> f64 {
    let [x, y, z] = sort3(a, b, c);
    (x + y) + z
}

#[inline]
pub(crate) fn sort3(a: f64, b: f64, c: f64) -> [f64; 3] {
    let (a, b) = if b < a { (b, a) } else { (a, b) };
    let (b, c) = if c < b { (c, b) } else { (b, c) };
    let (a, b) = if b < a { (b, a) } else { (a, b) };
    [a, b, c]
}

/// A square matrix of finite reals, not yet known to be a metric.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, MetricError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
            for (col, &v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MetricError::NonFinite { row, col });
                }
                data.push(v);
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Builds a symmetric matrix with a zero diagonal from `f(i, j)`, `i < j`.
    pub fn from_upper(
        n: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, MetricError> {
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(MetricError::NonFinite { row: i, col: j });
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }
}

/// Which metric axiom a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Axiom {
    /// `d(x, x) = 0` fails.
    Identity,
    /// `d(x, y) > 0` fails for some `x != y`.
    Positivity,
    Symmetry,
    /// `d(i, j) > d(i, k) + d(k, j) + tol`, witness `(i, j, k)`.
    Triangle,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
    /// Signed amount by which the axiom fails; positive means violated.
    pub slack: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} violated at {:?} by {:e}", self.axiom, self.witness, self.slack)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MetricValidationReport {
    pub ok: bool,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
}

/// Default triangle tolerance: `1e-12` times the largest entry.
pub fn default_tolerance(matrix: &DistanceMatrix) -> f64 {
    1e-12 * matrix.max_entry()
}

/// Checks identity of indiscernibles, symmetry and the triangle inequality.
///
/// Every violation is reported. Triangle violations are listed once per
/// unordered pair `{i, j}` (with `i < j`) and intermediate point `k`.
pub fn validate_metric(
    matrix: &DistanceMatrix,
    tol: f64,
) -> Result<MetricValidationReport, MetricError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(MetricError::BadTolerance(tol));
    }
    let n = matrix.len();
    let d = |i, j| matrix.get(i, j);
    let mut violations = Vec::new();
    for i in 0..n {
        if d(i, i) != 0.0 {
            violations.push(Violation {
                axiom: Axiom::Identity,
                witness: alloc::vec![i],
                slack: d(i, i).abs(),
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for (a, b) in [(i, j), (j, i)] {
                if !(d(a, b) > 0.0) {
                    violations.push(Violation {
                        axiom: Axiom::Positivity,
                        witness: alloc::vec![a, b],
                        slack: -d(a, b),
                    });
                }
            }
            if d(i, j) != d(j, i) {
                violations.push(Violation {
                    axiom: Axiom::Symmetry,
                    witness: alloc::vec![i, j],
                    slack: (d(i, j) - d(j, i)).abs(),
                });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let slack = d(i, j) - (d(i, k) + d(k, j));
                if slack > tol {
                    violations.push(Violation {
                        axiom: Axiom::Triangle,
                        witness: alloc::vec![i, j, k],
                        slack,
                    });
                }
            }
        }
    }
    Ok(MetricValidationReport { ok: violations.is_empty(), tolerance: tol, violations })
}

/// A validated finite metric space with at least three points.
///
/// Points are identified by index; labels are only for display and lookup.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: DistanceMatrix,
}

impl FiniteMetricSpace {
    /// Validates at [`default_tolerance`].
    pub fn new(labels: Vec<String>, dist: DistanceMatrix) -> Result<Self, MetricError> {
        let tol = default_tolerance(&dist);
        Self::with_tolerance(labels, dist, tol)
    }

    pub fn with_tolerance(
        labels: Vec<String>,
        dist: DistanceMatrix,
        tol: f64,
    ) -> Result<Self, MetricError> {
        let n = dist.len();
        if n < 3 {
            return Err(MetricError::TooFewPoints(n));
        }
        if labels.len() != n {
            return Err(MetricError::LabelCount { expected: n, got: labels.len() });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        let report = validate_metric(&dist, tol)?;
        if !report.ok {
            return Err(MetricError::NotAMetric(report));
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Labels `p0, p1, ...`.
    pub fn unlabeled(dist: DistanceMatrix) -> Result<Self, MetricError> {
        let labels = (0..dist.len()).map(|i| alloc::format!("p{i}")).collect();
        Self::new(labels, dist)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn validate(&self, tol: f64) -> Result<MetricValidationReport, MetricError> {
        validate_metric(&self.dist, tol)
    }

    /// The same space with every distance multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0 && lambda.is_finite(), "scale must be positive");
        let n = self.len();
        let data = self.dist.data.iter().map(|v| v * lambda).collect();
        FiniteMetricSpace { labels: self.labels.clone(), dist: DistanceMatrix { n, data } }
    }

    /// Perimeter of a triple without the distinctness check.
    #[inline]
    pub(crate) fn perimeter_raw(&self, i: usize, j: usize, k: usize) -> f64 {
        sum3(self.d(i, j), self.d(j, k), self.d(k, i))
    }

    /// The three sides `(d(i,j), d(j,k), d(i,k))`.
    #[inline]
    pub fn sides(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.d(i, j), self.d(j, k), self.d(i, k)]
    }
}

/// `d(i,j) + d(j,k) + d(k,i)` for pairwise distinct indices.
pub fn perimeter(
    space: &FiniteMetricSpace,
    i: usize,
    j: usize,
    k: usize,
) -> Result<f64, MetricError> {
    let n = space.len();
    for index in [i, j, k] {
        if index >= n {
            return Err(MetricError::IndexOutOfRange { index, n });
        }
    }
    if i == j || j == k || i == k {
        return Err(MetricError::InvalidTriple(i, j, k));
    }
    Ok(space.perimeter_raw(i, j, k))
}

/// A total map on point indices; `image[i]` is the index of `T(x_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SelfMap {
    image: Vec<usize>,
}

impl SelfMap {
    pub fn new(image: Vec<usize>, n: usize) -> Result<Self, MetricError> {
        if image.len() != n {
            return Err(MetricError::MapLength { expected: n, got: image.len() });
        }
        if let Some(&index) = image.iter().find(|&&t| t >= n) {
            return Err(MetricError::IndexOutOfRange { index, n });
        }
        Ok(SelfMap { image })
    }

    pub fn identity(n: usize) -> Self {
        SelfMap { image: (0..n).collect() }
    }

    pub fn constant(n: usize, target: usize) -> Self {
        assert!(target < n);
        SelfMap { image: alloc::vec![target; n] }
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &SelfMap) -> SelfMap {
        SelfMap { image: other.image.iter().map(|&i| self.image[i]).collect() }
    }
}

/// Number of unordered triples of `n` points.
pub fn triple_count(n: usize) -> u64 {
    let n = n as u64;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Lexicographic stream of `(i, j, k)` with `i < j < k < n` and `i` in a range.
#[derive(Debug, Clone)]
pub struct Triples {
    n: usize,
    end_first: usize,
    next: Option<(usize, usize, usize)>,
}

impl Triples {
    /// Triples whose first index lies in `firsts`. Disjoint ranges give
    /// disjoint streams whose concatenation is the full enumeration.
    pub fn with_first_in(n: usize, firsts: Range<usize>) -> Self {
        let end_first = firsts.end.min(n.saturating_sub(2));
        let next = if firsts.start < end_first {
            Some((firsts.start, firsts.start + 1, firsts.start + 2))
        } else {
            None
        };
        Triples { n, end_first, next }
    }
}

impl Iterator for Triples {
    type Item = (usize, usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.next?;
        let (i, j, k) = cur;
        self.next = if k + 1 < self.n {
            Some((i, j, k + 1))
        } else if j + 2 < self.n {
            Some((i, j + 1, j + 2))
        } else if i + 1 < self.end_first {
            Some((i + 1, i + 2, i + 3))
        } else {
            None
        };
        Some(cur)
    }
}

/// All `C(n, 3)` triples `i < j < k` in lexicographic order.
pub fn enumerate_triples(space: &FiniteMetricSpace) -> Triples {
    Triples::with_first_in(space.len(), 0..space.len())
}
