//! Independent checks of a finished decomposition.
//!
//! Nothing cached in the decomposition is trusted: means, masses and the
//! essential suprema are recomputed from the density in exact arithmetic.
//! Float-mode outputs are checked by converting their coordinates exactly and
//! comparing against a caller-supplied tolerance.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::decompose::{CubeDecomposition, Decomposition, DivisionNode, LeafReason, Outcome};
use crate::density::{CumulativeTable, GridDensity};
use crate::geometry::{Interval, Rect, Relation};
use crate::scalar::{int, Exact};

/// Visit every pair of rectangles whose axis-0 projections overlap.
/// Pairs that are disjoint on axis 0 are disjoint outright and need no test.
fn overlapping_pairs(rects: &[Rect<Exact>], mut visit: impl FnMut(&Rect<Exact>, &Rect<Exact>) -> bool) -> bool {
    let mut order: Vec<&Rect<Exact>> = rects.iter().filter(|r| !r.is_degenerate()).collect();
    order.sort_by(|a, b| a.side(0).lo().cmp(b.side(0).lo()));
    for (i, a) in order.iter().enumerate() {
        for b in &order[i + 1..] {
            if b.side(0).lo() >= a.side(0).hi() {
                break;
            }
            if !visit(a, b) {
                return false;
            }
        }
    }
    true
}

/// All pairs disjoint under half-open semantics.
pub fn check_disjoint(rects: &[Rect<Exact>]) -> bool {
    if rects.windows(2).any(|p| p[0].dim() != p[1].dim()) {
        return false;
    }
    overlapping_pairs(rects, |a, b| !a.intersects(b))
}

/// Every pair nested or disjoint.
pub fn check_nested_or_disjoint(rects: &[Rect<Exact>]) -> bool {
    if rects.windows(2).any(|p| p[0].dim() != p[1].dim()) {
        return false;
    }
    overlapping_pairs(rects, |a, b| a.relation(b).is_ok_and(Relation::is_nested_or_disjoint))
}

/// Why a rectangle failed the mean check.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanFailure {
    ZeroMeasure { index: usize },
    OutsideDomain { index: usize },
    OffLevel { index: usize, mean: Exact },
}

/// Result of [`check_means`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeansCheck {
    pub ok: bool,
    /// Largest `|mean - A|` over rectangles with positive measure.
    pub worst_deviation: Exact,
    pub failures: Vec<MeanFailure>,
}

/// Every rectangle has `|∫ f dμ - A·μ| <= tolerance·μ`; tolerance zero demands
/// exact equality.
pub fn check_means(table: &CumulativeTable<'_, Exact>, rects: &[Rect<Exact>], level: &Exact, tolerance: &Exact) -> MeansCheck {
    let mut worst = int(0);
    let mut failures = Vec::new();
    for (index, rect) in rects.iter().enumerate() {
        let Ok((f, m)) = table.masses(rect) else {
            failures.push(MeanFailure::OutsideDomain { index });
            continue;
        };
        if m.is_zero() {
            failures.push(MeanFailure::ZeroMeasure { index });
            continue;
        }
        let mean = f.clone() / m.clone();
        let deviation = (mean.clone() - level.clone()).abs();
        if deviation > worst {
            worst = deviation;
        }
        if (f - level.clone() * m.clone()).abs() > tolerance.clone() * m {
            failures.push(MeanFailure::OffLevel { index, mean });
        }
    }
    MeansCheck { ok: failures.is_empty(), worst_deviation: worst, failures }
}

/// Exact volume of a union of boxes given as side lists, by sweeping the first
/// axis and recursing on the boxes active in each slab.
fn union_volume(boxes: &[&[Interval<Exact>]]) -> Exact {
    if boxes.is_empty() {
        return int(0);
    }
    let mut cuts: Vec<&Exact> = boxes.iter().flat_map(|b| [b[0].lo(), b[0].hi()]).collect();
    cuts.sort();
    cuts.dedup();
    let mut total = int(0);
    for slab in cuts.windows(2) {
        let (a, b) = (slab[0], slab[1]);
        let active: Vec<&[Interval<Exact>]> =
            boxes.iter().filter(|bx| bx[0].lo() <= a && bx[0].hi() >= b).map(|bx| &bx[1..]).collect();
        if active.is_empty() {
            continue;
        }
        let width = b.clone() - a.clone();
        if active[0].is_empty() {
            total += width;
        } else {
            total += width * union_volume(&active);
        }
    }
    total
}

/// For each cell accepted by `want`, the volume of the cell covered by the
/// union of `rects`.
fn covered_per_cell(
    density: &GridDensity<Exact>,
    rects: &[Rect<Exact>],
    want: impl Fn(usize) -> bool,
    mut visit: impl FnMut(usize, Exact),
) {
    let domain = density.domain();
    let mut buckets: Vec<Vec<Rect<Exact>>> = vec![Vec::new(); density.cell_count()];
    for rect in rects {
        if rect.dim() != density.dim() {
            continue;
        }
        let Some(clipped) = rect.intersection(domain) else { continue };
        for cell in density.cells_meeting(&clipped) {
            if want(cell) {
                if let Some(piece) = clipped.intersection(&density.cell_rect(cell)) {
                    buckets[cell].push(piece);
                }
            }
        }
    }
    for (cell, pieces) in buckets.iter().enumerate() {
        if !want(cell) {
            continue;
        }
        let boxes: Vec<&[Interval<Exact>]> = pieces.iter().map(|r| r.sides()).collect();
        visit(cell, union_volume(&boxes));
    }
}

/// `μ(∪ rects)`, exact. Within a cell `w` is constant, so the mass is `w`
/// times the covered volume of each cell.
pub fn union_measure(density: &GridDensity<Exact>, rects: &[Rect<Exact>]) -> Exact {
    let w = density.w_values();
    let mut total = int(0);
    covered_per_cell(density, rects, |cell| w[cell].is_positive(), |cell, covered| total += w[cell].clone() * covered);
    total
}

/// `μ({x ∈ I_0 \ ∪ selected : f(x) > A})`, exact.
pub fn residual_violation_measure(density: &GridDensity<Exact>, selected: &[Rect<Exact>], level: &Exact) -> Exact {
    let (f, w) = (density.f_values(), density.w_values());
    let mut total = int(0);
    covered_per_cell(
        density,
        selected,
        |cell| w[cell].is_positive() && f[cell] > *level,
        |cell, covered| total += w[cell].clone() * (density.cell_rect(cell).volume() - covered),
    );
    total
}

/// Division rectangles are pairwise nested or disjoint. `None` when the
/// decomposition carries no tree.
pub fn check_dyadic_property(dec: &Decomposition<Exact>) -> Option<bool> {
    dec.root.as_ref()?;
    Some(check_nested_or_disjoint(&dec.division_rects()))
}

/// `(halving, diameter decay)`:
/// every midpoint child and every continuing piece spans at most half its
/// parent along the cut axis; and along every chain of non-selected nodes the
/// longest side at least halves every `n` levels. `None` without a tree.
pub fn check_halving_and_decay(dec: &Decomposition<Exact>) -> Option<(bool, bool)> {
    let root = dec.root.as_ref()?;
    let n = root.rect.dim();
    let mut halving = true;
    let mut decay = true;
    let mut chain: Vec<Exact> = Vec::new();
    walk_chains(root, n, &mut chain, &mut halving, &mut decay);
    Some((halving, decay))
}

fn extent(rect: &Rect<Exact>, axis: usize) -> Option<Exact> {
    (axis < rect.dim()).then(|| rect.side(axis).length())
}

fn walk_chains(node: &DivisionNode<Exact>, n: usize, chain: &mut Vec<Exact>, halving: &mut bool, decay: &mut bool) {
    if matches!(node.outcome, Outcome::SelectedWhole) {
        return;
    }
    let longest = node.rect.longest_side();
    if chain.len() >= n {
        let ancestor = &chain[chain.len() - n];
        if longest.clone() * int(2) > *ancestor {
            *decay = false;
        }
    }
    let parent_half = |axis: usize| extent(&node.rect, axis).map(|e| e / int(2));
    let shorter = |child: &DivisionNode<Exact>, axis: usize| match (extent(&child.rect, axis), parent_half(axis)) {
        (Some(c), Some(h)) => c <= h,
        _ => false,
    };
    match &node.outcome {
        Outcome::SplitBoth { axis, lower, upper, .. } => {
            *halving &= shorter(lower, *axis) && shorter(upper, *axis);
        }
        Outcome::CutSelected { axis, continuing, .. } => {
            *halving &= shorter(continuing, *axis);
        }
        _ => {}
    }
    chain.push(longest);
    for child in node.children() {
        walk_chains(child, n, chain, halving, decay);
    }
    chain.pop();
}

/// Every cube's recomputed mean lies in `(A, 2^n A]`.
pub fn check_cz_bounds(table: &CumulativeTable<'_, Exact>, cz: &CubeDecomposition<Exact>) -> bool {
    let dim = table.density().dim();
    let top = cz.upper_bound(dim);
    cz.cubes.iter().all(|c| match table.mean(&c.cube) {
        Ok(Some(mean)) => mean > cz.level && mean <= top,
        _ => false,
    })
}

/// Every conclusion of the decomposition, recomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub contained_ok: bool,
    pub disjoint_ok: bool,
    /// `None` for cube decompositions, whose means are not meant to equal `A`.
    pub means_ok: Option<bool>,
    pub worst_mean_deviation: Option<Exact>,
    pub residual_violation: Exact,
    /// Residual mass is within tolerance, or for truncated runs within the
    /// mass of the unresolved leaves.
    pub residual_ok: bool,
    /// The `complete` flag matches the recomputed resolution-limit leaves.
    pub complete_flag_ok: bool,
    pub dyadic_ok: Option<bool>,
    pub halving_ok: Option<bool>,
    pub diameter_decay_ok: Option<bool>,
    pub cz_bounds_ok: Option<bool>,
}

impl VerificationReport {
    /// All applicable checks pass.
    pub fn all_ok(&self) -> bool {
        self.contained_ok
            && self.disjoint_ok
            && self.residual_ok
            && self.complete_flag_ok
            && [self.means_ok, self.dyadic_ok, self.halving_ok, self.diameter_decay_ok, self.cz_bounds_ok]
                .iter()
                .all(|c| c.unwrap_or(true))
    }
}

fn opt<T: fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map_or_else(|| "n/a".to_string(), ToString::to_string)
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "contained_ok: {}", self.contained_ok)?;
        writeln!(f, "disjoint_ok: {}", self.disjoint_ok)?;
        writeln!(f, "means_ok: {}", opt(&self.means_ok))?;
        writeln!(f, "worst_mean_deviation: {}", opt(&self.worst_mean_deviation))?;
        writeln!(f, "residual_violation: {}", self.residual_violation)?;
        writeln!(f, "residual_ok: {}", self.residual_ok)?;
        writeln!(f, "complete_flag_ok: {}", self.complete_flag_ok)?;
        writeln!(f, "dyadic_ok: {}", opt(&self.dyadic_ok))?;
        writeln!(f, "halving_ok: {}", opt(&self.halving_ok))?;
        writeln!(f, "diameter_decay_ok: {}", opt(&self.diameter_decay_ok))?;
        writeln!(f, "cz_bounds_ok: {}", opt(&self.cz_bounds_ok))?;
        writeln!(f, "all_ok: {}", self.all_ok())
    }
}

/// Mass of the residual leaves that the policy cut short while `f > A` on a
/// set of positive measure inside them.
pub fn unresolved_mass(
    table: &CumulativeTable<'_, Exact>,
    leaves: &[(Rect<Exact>, LeafReason)],
    level: &Exact,
) -> (Exact, bool) {
    let density = table.density();
    let mut mass = int(0);
    let mut any = false;
    for (rect, reason) in leaves {
        if *reason != LeafReason::ResolutionLimit {
            continue;
        }
        let Some(clipped) = rect.intersection(density.domain()) else { continue };
        if density.essential_sup_f(&clipped).is_some_and(|s| s > *level) {
            any = true;
            mass += table.measure(&clipped).unwrap_or_else(|_| int(0));
        }
    }
    (mass, any)
}

fn residual_checks(
    table: &CumulativeTable<'_, Exact>,
    selected: &[Rect<Exact>],
    leaves: &[(Rect<Exact>, LeafReason)],
    level: &Exact,
    claimed_complete: bool,
    tolerance: &Exact,
) -> (Exact, bool, bool) {
    let density = table.density();
    let violation = residual_violation_measure(density, selected, level);
    let slack = tolerance.clone() * table.total().1;
    let (unresolved, any_unresolved) = unresolved_mass(table, leaves, level);
    let residual_ok = if claimed_complete { violation <= slack } else { violation <= unresolved + slack };
    (violation, residual_ok, claimed_complete != any_unresolved)
}

/// Check a rising-sun decomposition against its density.
pub fn verify_decomposition(density: &GridDensity<Exact>, dec: &Decomposition<Exact>, tolerance: &Exact) -> VerificationReport {
    let table = CumulativeTable::build(density);
    let selected = dec.selected_rects();
    let contained_ok = selected.iter().all(|r| r.dim() == density.dim() && r.is_subset_of(density.domain()));
    let disjoint_ok = check_disjoint(&selected);
    let means = check_means(&table, &selected, &dec.level, tolerance);
    let leaves: Vec<_> = dec.residual.iter().map(|r| (r.rect.clone(), r.reason)).collect();
    let (residual_violation, residual_ok, complete_flag_ok) =
        residual_checks(&table, &selected, &leaves, &dec.level, dec.complete, tolerance);
    let halving = check_halving_and_decay(dec);
    VerificationReport {
        contained_ok,
        disjoint_ok,
        means_ok: Some(means.ok),
        worst_mean_deviation: Some(means.worst_deviation),
        residual_violation,
        residual_ok,
        complete_flag_ok,
        dyadic_ok: check_dyadic_property(dec),
        halving_ok: halving.map(|h| h.0),
        diameter_decay_ok: halving.map(|h| h.1),
        cz_bounds_ok: None,
    }
}

/// Check a cube decomposition: disjointness, the `(A, 2^n A]` bracket, and
/// `f <= A` off the cubes.
pub fn verify_cz(density: &GridDensity<Exact>, cz: &CubeDecomposition<Exact>) -> VerificationReport {
    let table = CumulativeTable::build(density);
    let cubes: Vec<_> = cz.cubes.iter().map(|c| c.cube.clone()).collect();
    let leaves: Vec<_> = cz.residual.iter().map(|r| (r.rect.clone(), r.reason)).collect();
    let (residual_violation, residual_ok, complete_flag_ok) =
        residual_checks(&table, &cubes, &leaves, &cz.level, cz.complete, &int(0));
    VerificationReport {
        contained_ok: cubes.iter().all(|r| r.is_subset_of(density.domain())),
        disjoint_ok: check_disjoint(&cubes),
        means_ok: None,
        worst_mean_deviation: None,
        residual_violation,
        residual_ok,
        complete_flag_ok,
        dyadic_ok: None,
        halving_ok: None,
        diameter_decay_ok: None,
        cz_bounds_ok: Some(check_cz_bounds(&table, cz)),
    }
}
