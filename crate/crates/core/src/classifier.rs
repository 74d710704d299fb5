//! Contraction moduli and class membership of a self-map.
//!
//! Every quantity is an exact maximum (or minimum) over a finite population of
//! point pairs or triples. The sweeps are written as reductions over ranges of
//! the first index: [`Sweep`] produces partial accumulators for a range and
//! the accumulators merge associatively and commutatively, with ties broken
//! toward the lexicographically smallest tuple. Any partition of `0..n`
//! therefore yields the same modulus and witness bit for bit.

use alloc::vec::Vec;
use core::ops::Range;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::aggregators::TripleAggregator;
use crate::metric::{FiniteMetricSpace, SelfMap, Triples};

/// Relative strict margin below which a strict verdict is flagged marginal.
pub const MARGINAL_MARGIN: f64 = 1e-12;

/// Rounding allowance when comparing the perimeter modulus with the Banach modulus.
pub const HIERARCHY_SLACK: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("G vanishes on distinct triple {triple:?} (value {value}); G is not admissible on this space")]
    InadmissibleDenominator { triple: [usize; 3], value: f64 },
    #[error("map has {map} entries but the space has {space} points")]
    SizeMismatch { space: usize, map: usize },
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("mask has {mask} entries but the space has {space} points")]
    MaskSize { space: usize, mask: usize },
    #[error("class hierarchy violated: {0}")]
    Hierarchy(&'static str),
}

/// Exact maximum of a contraction ratio over a tuple population.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ModulusReport {
    pub modulus: f64,
    /// Lexicographically smallest tuple attaining the modulus; empty if the
    /// population is empty.
    pub witness: Vec<usize>,
    pub evaluated_count: u64,
    /// Smallest relative slack `(den - num) / den` over the population, or 0
    /// when some tuple has ratio >= 1.
    pub strict_margin: f64,
}

impl ModulusReport {
    /// Modulus strictly below one.
    pub fn is_contracting(&self) -> bool {
        self.modulus < 1.0
    }
}

/// Outcome of a strict (Edelstein-style) inequality over a population.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct StrictVerdict {
    pub holds: bool,
    /// First violating tuple if any, otherwise the tuple with the least slack.
    pub witness: Vec<usize>,
    /// Relative slack `(orig - image) / orig` at the witness.
    pub witness_slack: f64,
    /// Least relative slack when the inequality holds, 0 otherwise.
    pub margin: f64,
    pub marginal: bool,
    pub evaluated_count: u64,
}

/// Partial max-reduction of `num / den` over tuples of arity `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioMax<const K: usize> {
    best: f64,
    witness: Option<[usize; K]>,
    min_margin: f64,
    count: u64,
}

impl<const K: usize> Default for RatioMax<K> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<const K: usize> RatioMax<K> {
    pub fn empty() -> Self {
        RatioMax { best: 0.0, witness: None, min_margin: f64::INFINITY, count: 0 }
    }

    /// Tuples must be offered in increasing lexicographic order for the
    /// tie-break to pick the smallest one.
    #[inline]
    pub fn offer(&mut self, tuple: [usize; K], num: f64, den: f64) {
        let ratio = num / den;
        if self.witness.is_none() || ratio > self.best {
            self.best = ratio;
            self.witness = Some(tuple);
        }
        self.min_margin = self.min_margin.min((den - num) / den);
        self.count += 1;
    }

    pub fn merge(self, other: Self) -> Self {
        let (best, witness) = match (self.witness, other.witness) {
            (None, _) => (other.best, other.witness),
            (_, None) => (self.best, self.witness),
            (Some(a), Some(b)) => {
                if other.best > self.best || (other.best == self.best && b < a) {
                    (other.best, other.witness)
                } else {
                    (self.best, self.witness)
                }
            }
        };
        RatioMax {
            best,
            witness,
            min_margin: self.min_margin.min(other.min_margin),
            count: self.count + other.count,
        }
    }

    pub fn into_report(self) -> ModulusReport {
        let strict_margin =
            if self.count == 0 || !(self.min_margin > 0.0) { 0.0 } else { self.min_margin };
        ModulusReport {
            modulus: self.best,
            witness: self.witness.map(|w| w.to_vec()).unwrap_or_default(),
            evaluated_count: self.count,
            strict_margin,
        }
    }
}

/// Partial reduction for a strict inequality `image < orig`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictMin<const K: usize> {
    first_violation: Option<([usize; K], f64)>,
    tightest: Option<([usize; K], f64)>,
    count: u64,
}

impl<const K: usize> Default for StrictMin<K> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<const K: usize> StrictMin<K> {
    pub fn empty() -> Self {
        StrictMin { first_violation: None, tightest: None, count: 0 }
    }

    #[inline]
    pub fn offer(&mut self, tuple: [usize; K], image: f64, orig: f64) {
        let rel = (orig - image) / orig;
        if !(image < orig) && self.first_violation.is_none() {
            self.first_violation = Some((tuple, rel));
        }
        match self.tightest {
            Some((_, r)) if r <= rel => {}
            _ => self.tightest = Some((tuple, rel)),
        }
        self.count += 1;
    }

    pub fn merge(self, other: Self) -> Self {
        fn pick<const K: usize>(
            a: Option<([usize; K], f64)>,
            b: Option<([usize; K], f64)>,
            prefer_b: impl Fn(&([usize; K], f64), &([usize; K], f64)) -> bool,
        ) -> Option<([usize; K], f64)> {
            match (a, b) {
                (Some(x), Some(y)) => Some(if prefer_b(&x, &y) { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            }
        }
        StrictMin {
            first_violation: pick(self.first_violation, other.first_violation, |x, y| y.0 < x.0),
            tightest: pick(self.tightest, other.tightest, |x, y| {
                y.1 < x.1 || (y.1 == x.1 && y.0 < x.0)
            }),
            count: self.count + other.count,
        }
    }

    pub fn into_verdict(self) -> StrictVerdict {
        let holds = self.first_violation.is_none();
        let (witness, witness_slack) = match self.first_violation.or(self.tightest) {
            Some((w, s)) => (w.to_vec(), s),
            None => (Vec::new(), 0.0),
        };
        let margin = if holds { self.tightest.map_or(0.0, |t| t.1) } else { 0.0 };
        StrictVerdict {
            holds,
            witness,
            witness_slack,
            margin,
            marginal: holds && self.count > 0 && margin < MARGINAL_MARGIN,
            evaluated_count: self.count,
        }
    }
}

/// Sweeps over the pairs and triples of a space, optionally restricted to
/// the points selected by a mask.
#[derive(Debug, Clone, Copy)]
pub struct Sweep<'a> {
    space: &'a FiniteMetricSpace,
    map: &'a SelfMap,
    mask: Option<&'a [bool]>,
}

impl<'a> Sweep<'a> {
    pub fn new(space: &'a FiniteMetricSpace, map: &'a SelfMap) -> Result<Self, ClassifyError> {
        if space.len() != map.len() {
            return Err(ClassifyError::SizeMismatch { space: space.len(), map: map.len() });
        }
        Ok(Sweep { space, map, mask: None })
    }

    /// Only tuples made entirely of points with `mask[i] == true` are evaluated.
    pub fn restricted(self, mask: &'a [bool]) -> Result<Self, ClassifyError> {
        if mask.len() != self.space.len() {
            return Err(ClassifyError::MaskSize { space: self.space.len(), mask: mask.len() });
        }
        Ok(Sweep { mask: Some(mask), ..self })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn map(&self) -> &'a SelfMap {
        self.map
    }

    pub fn mask(&self) -> Option<&'a [bool]> {
        self.mask
    }

    #[inline]
    fn keep(&self, i: usize) -> bool {
        self.mask.is_none_or(|m| m[i])
    }

    fn pairs(&self, firsts: Range<usize>) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        let firsts = firsts.start..firsts.end.min(n);
        firsts
            .filter(move |&i| self.keep(i))
            .flat_map(move |i| ((i + 1)..n).filter(move |&j| self.keep(j)).map(move |j| (i, j)))
    }

    fn triples(&self, firsts: Range<usize>) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        Triples::with_first_in(self.len(), firsts)
            .filter(move |&(i, j, k)| self.keep(i) && self.keep(j) && self.keep(k))
    }

    pub fn banach(&self, firsts: Range<usize>) -> RatioMax<2> {
        let (s, t) = (self.space, self.map);
        let mut acc = RatioMax::empty();
        for (i, j) in self.pairs(firsts) {
            acc.offer([i, j], s.d(t.apply(i), t.apply(j)), s.d(i, j));
        }
        acc
    }

    pub fn perimeter(&self, firsts: Range<usize>) -> RatioMax<3> {
        let (s, t) = (self.space, self.map);
        let mut acc = RatioMax::empty();
        for (i, j, k) in self.triples(firsts) {
            let image = s.perimeter_raw(t.apply(i), t.apply(j), t.apply(k));
            acc.offer([i, j, k], image, s.perimeter_raw(i, j, k));
        }
        acc
    }

    pub fn fg(
        &self,
        f: &TripleAggregator,
        g: &TripleAggregator,
        firsts: Range<usize>,
    ) -> Result<RatioMax<3>, ClassifyError> {
        let (s, t) = (self.space, self.map);
        let mut acc = RatioMax::empty();
        for (i, j, k) in self.triples(firsts) {
            let den = g.eval_sides(s.sides(i, j, k));
            if !(den > 0.0) {
                return Err(ClassifyError::InadmissibleDenominator {
                    triple: [i, j, k],
                    value: den,
                });
            }
            let num = f.eval_sides(s.sides(t.apply(i), t.apply(j), t.apply(k)));
            acc.offer([i, j, k], num, den);
        }
        Ok(acc)
    }

    pub fn contractive(&self, firsts: Range<usize>) -> StrictMin<2> {
        let (s, t) = (self.space, self.map);
        let mut acc = StrictMin::empty();
        for (i, j) in self.pairs(firsts) {
            acc.offer([i, j], s.d(t.apply(i), t.apply(j)), s.d(i, j));
        }
        acc
    }

    pub fn perimeter_strict(&self, firsts: Range<usize>) -> StrictMin<3> {
        let (s, t) = (self.space, self.map);
        let mut acc = StrictMin::empty();
        for (i, j, k) in self.triples(firsts) {
            let image = s.perimeter_raw(t.apply(i), t.apply(j), t.apply(k));
            acc.offer([i, j, k], image, s.perimeter_raw(i, j, k));
        }
        acc
    }
}

/// `max d(Tx,Ty) / d(x,y)` over unordered pairs of distinct points.
///
/// # Panics
/// If the map and the space have different sizes.
pub fn banach_modulus(space: &FiniteMetricSpace, map: &SelfMap) -> ModulusReport {
    let sweep = Sweep::new(space, map).expect("map size matches space");
    sweep.banach(0..space.len()).into_report()
}

/// `max p(Tx,Ty,Tz) / p(x,y,z)` over triples of pairwise distinct points.
///
/// # Panics
/// If the map and the space have different sizes.
pub fn perimeter_modulus(space: &FiniteMetricSpace, map: &SelfMap) -> ModulusReport {
    let sweep = Sweep::new(space, map).expect("map size matches space");
    sweep.perimeter(0..space.len()).into_report()
}

/// `max F(image sides) / G(sides)` over triples of pairwise distinct points.
pub fn fg_modulus(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    f: &TripleAggregator,
    g: &TripleAggregator,
) -> Result<ModulusReport, ClassifyError> {
    Ok(Sweep::new(space, map)?.fg(f, g, 0..space.len())?.into_report())
}

/// `d(Tx,Ty) < d(x,y)` for every pair of distinct points.
pub fn is_edelstein_contractive(space: &FiniteMetricSpace, map: &SelfMap) -> StrictVerdict {
    let sweep = Sweep::new(space, map).expect("map size matches space");
    sweep.contractive(0..space.len()).into_verdict()
}

/// Strict perimeter decrease on every triple of pairwise distinct points.
pub fn is_edelstein_perimeter(space: &FiniteMetricSpace, map: &SelfMap) -> StrictVerdict {
    let sweep = Sweep::new(space, map).expect("map size matches space");
    sweep.perimeter_strict(0..space.len()).into_verdict()
}

/// `d(Tx,Ty) < d(x,y)` for all `y != x`; the witness is `[y]`.
pub fn pointwise_contractive_at(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    x: usize,
) -> Result<StrictVerdict, ClassifyError> {
    let n = space.len();
    if map.len() != n {
        return Err(ClassifyError::SizeMismatch { space: n, map: map.len() });
    }
    if x >= n {
        return Err(ClassifyError::IndexOutOfRange { index: x, n });
    }
    let tx = map.apply(x);
    let mut acc = StrictMin::<1>::empty();
    for y in (0..n).filter(|&y| y != x) {
        acc.offer([y], space.d(tx, map.apply(y)), space.d(x, y));
    }
    Ok(acc.into_verdict())
}

/// Points of prime period 2: `T(T(x)) = x` and `T(x) != x`.
pub fn find_period2_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&x| map.apply(x) != x && map.apply(map.apply(x)) == x).collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ClassificationReport {
    pub banach: ModulusReport,
    pub perimeter: ModulusReport,
    pub fg: Option<ModulusReport>,
    pub edelstein_contractive: StrictVerdict,
    pub edelstein_perimeter: StrictVerdict,
    pub period2_points: Vec<usize>,
    pub fixed_points: Vec<usize>,
    /// Points `x` at which `d(Tx,Ty) < d(x,y)` for every other `y`.
    pub contractive_points: Vec<usize>,
}

impl ClassificationReport {
    /// Builds a report from already computed sweeps and checks the class
    /// hierarchy. Used by [`classify`] and by parallel drivers.
    pub fn assemble(
        sweep: &Sweep<'_>,
        banach: ModulusReport,
        perimeter: ModulusReport,
        fg: Option<ModulusReport>,
        edelstein_contractive: StrictVerdict,
        edelstein_perimeter: StrictVerdict,
    ) -> Result<Self, ClassifyError> {
        let (space, map) = (sweep.space(), sweep.map());
        let n = space.len();
        let mut contractive_points = Vec::new();
        for x in 0..n {
            if pointwise_contractive_at(space, map, x)?.holds {
                contractive_points.push(x);
            }
        }
        let report = ClassificationReport {
            banach,
            perimeter,
            fg,
            edelstein_contractive,
            edelstein_perimeter,
            period2_points: find_period2_points(map),
            fixed_points: crate::solver::enumerate_fixed_points(map),
            contractive_points,
        };
        let in_population =
            report.fixed_points.iter().filter(|&&x| sweep.mask().is_none_or(|m| m[x])).count();
        report.check_hierarchy(in_population)?;
        Ok(report)
    }

    fn check_hierarchy(&self, fixed_in_population: usize) -> Result<(), ClassifyError> {
        let (b, p) = (&self.banach, &self.perimeter);
        if b.evaluated_count > 0
            && p.evaluated_count > 0
            && p.modulus > b.modulus * (1.0 + HIERARCHY_SLACK)
        {
            return Err(ClassifyError::Hierarchy("perimeter modulus exceeds Banach modulus"));
        }
        if p.is_contracting() && !self.edelstein_perimeter.holds {
            return Err(ClassifyError::Hierarchy(
                "perimeter modulus < 1 but a triple keeps its perimeter",
            ));
        }
        if b.is_contracting() && !self.edelstein_contractive.holds {
            return Err(ClassifyError::Hierarchy(
                "Banach modulus < 1 but a pair keeps its distance",
            ));
        }
        if self.edelstein_perimeter.holds && fixed_in_population > 2 {
            return Err(ClassifyError::Hierarchy(
                "three fixed points under a strict perimeter decrease",
            ));
        }
        Ok(())
    }
}

/// Runs every check on the full space.
pub fn classify(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    fg: Option<(&TripleAggregator, &TripleAggregator)>,
) -> Result<ClassificationReport, ClassifyError> {
    classify_sweep(&Sweep::new(space, map)?, fg)
}

/// Runs every check on the population selected by `sweep`.
pub fn classify_sweep(
    sweep: &Sweep<'_>,
    fg: Option<(&TripleAggregator, &TripleAggregator)>,
) -> Result<ClassificationReport, ClassifyError> {
    let all = 0..sweep.len();
    let fg = match fg {
        Some((f, g)) => Some(sweep.fg(f, g, all.clone())?.into_report()),
        None => None,
    };
    ClassificationReport::assemble(
        sweep,
        sweep.banach(all.clone()).into_report(),
        sweep.perimeter(all.clone()).into_report(),
        fg,
        sweep.contractive(all.clone()).into_verdict(),
        sweep.perimeter_strict(all).into_verdict(),
    )
}
