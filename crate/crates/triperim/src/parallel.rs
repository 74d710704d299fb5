//! Rayon drivers for the classifier sweeps.
//!
//! Each first index of a pair or triple is one task. Partial results merge
//! with ties broken toward the lexicographically smallest tuple, so the
//! output is the same as the sequential sweep for any thread count.

use rayon::prelude::*;
use triperim_core::classifier::{ClassificationReport, ClassifyError, RatioMax, StrictMin, Sweep};
use triperim_core::{FiniteMetricSpace, ModulusReport, SelfMap, StrictVerdict, TripleAggregator};

fn ratio_max<const K: usize>(
    sweep: &Sweep<'_>,
    part: impl Fn(&Sweep<'_>, usize) -> RatioMax<K> + Sync,
) -> ModulusReport {
    (0..sweep.len())
        .into_par_iter()
        .map(|i| part(sweep, i))
        .reduce(RatioMax::empty, RatioMax::merge)
        .into_report()
}

fn strict_min<const K: usize>(
    sweep: &Sweep<'_>,
    part: impl Fn(&Sweep<'_>, usize) -> StrictMin<K> + Sync,
) -> StrictVerdict {
    (0..sweep.len())
        .into_par_iter()
        .map(|i| part(sweep, i))
        .reduce(StrictMin::empty, StrictMin::merge)
        .into_verdict()
}

pub fn banach(sweep: &Sweep<'_>) -> ModulusReport {
    ratio_max(sweep, |s, i| s.banach(i..i + 1))
}

pub fn perimeter(sweep: &Sweep<'_>) -> ModulusReport {
    ratio_max(sweep, |s, i| s.perimeter(i..i + 1))
}

pub fn fg(
    sweep: &Sweep<'_>,
    f: &TripleAggregator,
    g: &TripleAggregator,
) -> Result<ModulusReport, ClassifyError> {
    let merged = (0..sweep.len())
        .into_par_iter()
        .map(|i| sweep.fg(f, g, i..i + 1))
        .try_reduce(RatioMax::empty, |a, b| Ok(a.merge(b)));
    // A failing denominator is reported for the smallest first index, as in
    // the sequential sweep.
    match merged {
        Ok(acc) => Ok(acc.into_report()),
        Err(_) => sweep.fg(f, g, 0..sweep.len()).map(RatioMax::into_report),
    }
}

pub fn contractive(sweep: &Sweep<'_>) -> StrictVerdict {
    strict_min(sweep, |s, i| s.contractive(i..i + 1))
}

pub fn perimeter_strict(sweep: &Sweep<'_>) -> StrictVerdict {
    strict_min(sweep, |s, i| s.perimeter_strict(i..i + 1))
}

/// Parallel counterpart of [`triperim_core::classify`].
pub fn classify(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    fg_pair: Option<(&TripleAggregator, &TripleAggregator)>,
) -> Result<ClassificationReport, ClassifyError> {
    classify_sweep(&Sweep::new(space, map)?, fg_pair)
}

/// Parallel counterpart of [`triperim_core::classifier::classify_sweep`].
pub fn classify_sweep(
    sweep: &Sweep<'_>,
    fg_pair: Option<(&TripleAggregator, &TripleAggregator)>,
) -> Result<ClassificationReport, ClassifyError> {
    let fg_report = fg_pair.map(|(f, g)| fg(sweep, f, g)).transpose()?;
    ClassificationReport::assemble(
        sweep,
        banach(sweep),
        perimeter(sweep),
        fg_report,
        contractive(sweep),
        perimeter_strict(sweep),
    )
}
