use std::cmp::Ordering;

use super::{Decomposition, DivisionNode, LeafReason, Level, MeanClass, Outcome, Residual, Selected, StoppingPolicy};
use crate::density::{AxisProfile, CumulativeTable, GridDensity};
use crate::error::DecomposeError;
use crate::geometry::{Rect, Side};
use crate::scalar::Scalar;

/// Result of one application of the division argument to a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub enum DivisionStep<S> {
    SplitBoth {
        axis: usize,
        midpoint: S,
        lower: Rect<S>,
        upper: Rect<S>,
    },
    CutSelected {
        axis: usize,
        cut: S,
        selected_side: Side,
        selected: Rect<S>,
        continuing: Rect<S>,
    },
}

/// Slide the hyperplane `x_axis = t` away from the midpoint, growing the
/// `grow_from` half, until the grown piece has mean exactly `A`.
///
/// The excess `h(t) = ∫ f dμ - A·μ` of the grown piece is piecewise linear in
/// `t` with breakpoints at cell edges, positive at the midpoint and negative
/// at the far end. The crossing nearest the midpoint is returned.
pub fn find_cut<S: Scalar>(
    table: &CumulativeTable<'_, S>,
    rect: &Rect<S>,
    axis: usize,
    level: &Level<S>,
    grow_from: Side,
) -> Result<S, DecomposeError> {
    if axis >= rect.dim() {
        return Err(DecomposeError::Precondition(format!("axis {axis} out of range")));
    }
    let total = table.total().1;
    let profile = table.axis_profile(rect, axis)?;
    let side = rect.side(axis);
    let (f, m) = profile.between(side.lo(), side.hi());
    if level.classify(&f, &m, &total) != MeanClass::Below {
        return Err(DecomposeError::Precondition(format!("{rect} needs positive measure and mean below the level")));
    }
    cut_from_profile(&profile, rect, axis, level, grow_from)
}

fn cut_from_profile<S: Scalar>(
    profile: &AxisProfile<'_, '_, S>,
    rect: &Rect<S>,
    axis: usize,
    level: &Level<S>,
    grow_from: Side,
) -> Result<S, DecomposeError> {
    let side = rect.side(axis);
    let (lo, hi) = (side.lo(), side.hi());
    let mid = side.midpoint();
    let edges = profile_edges(profile, rect, axis);
    // breakpoints from the midpoint outwards, ending at the far end
    let mut points = vec![mid.clone()];
    match grow_from {
        Side::Lower => {
            points.extend(edges.iter().filter(|e| **e > mid && *e < hi).cloned());
            points.push(hi.clone());
        }
        Side::Upper => {
            points.extend(edges.iter().rev().filter(|e| **e < mid && *e > lo).cloned());
            points.push(lo.clone());
        }
    }
    let excess_at = |p: &S| {
        let (f, m) = match grow_from {
            Side::Lower => profile.between(lo, p),
            Side::Upper => profile.between(p, hi),
        };
        (level.excess(&f, &m), level.excess_sign(&f, &m))
    };

    let (mut prev_h, start_sign) = excess_at(&points[0]);
    if start_sign != Ordering::Greater {
        return Err(DecomposeError::Precondition(format!(
            "{} half of {rect} does not have mean above the level",
            grow_from.name()
        )));
    }
    let mut prev_p = points[0].clone();
    for p in &points[1..] {
        let (h, sign) = excess_at(p);
        match sign {
            Ordering::Greater => {
                prev_h = h;
                prev_p = p.clone();
            }
            Ordering::Equal if p != points.last().unwrap() => return Ok(p.clone()),
            Ordering::Equal => break,
            Ordering::Less => {
                let t = prev_p.clone() + prev_h.clone() * (p.clone() - prev_p) / (prev_h - h);
                return Ok(t);
            }
        }
    }
    Err(DecomposeError::Internal(format!("no sign change of the excess on {rect} along axis {axis}")))
}

fn profile_edges<S: Scalar>(profile: &AxisProfile<'_, '_, S>, rect: &Rect<S>, axis: usize) -> Vec<S> {
    let side = rect.side(axis);
    profile
        .table_edges()
        .iter()
        .filter(|e| *e > side.lo() && *e < side.hi())
        .cloned()
        .collect()
}

/// Apply the division argument to `rect`, which must have positive measure
/// and mean below `A`.
pub fn divide_step<S: Scalar>(
    table: &CumulativeTable<'_, S>,
    rect: &Rect<S>,
    level: &Level<S>,
) -> Result<DivisionStep<S>, DecomposeError> {
    let axis = rect.longest_axis()?;
    let profile = table.axis_profile(rect, axis)?;
    divide_with_profile(&profile, table.total().1, rect, axis, level)
}

fn divide_with_profile<S: Scalar>(
    profile: &AxisProfile<'_, '_, S>,
    total: S,
    rect: &Rect<S>,
    axis: usize,
    level: &Level<S>,
) -> Result<DivisionStep<S>, DecomposeError> {
    let side = rect.side(axis);
    let mid = side.midpoint();
    let (f, m) = profile.between(side.lo(), side.hi());
    if level.classify(&f, &m, &total) != MeanClass::Below {
        return Err(DecomposeError::Precondition(format!("{rect} needs positive measure and mean below the level")));
    }
    let (fl, ml) = profile.between(side.lo(), &mid);
    let (fu, mu) = profile.between(&mid, side.hi());
    let lower_class = level.classify(&fl, &ml, &total);
    let upper_class = level.classify(&fu, &mu, &total);
    let (lower, upper) = rect.split_at(axis, &mid)?;

    let cut_selected = |cut: S, selected_side: Side| -> Result<DivisionStep<S>, DecomposeError> {
        let (low, high) = rect.split_at(axis, &cut)?;
        let (selected, continuing) = match selected_side {
            Side::Lower => (low, high),
            Side::Upper => (high, low),
        };
        Ok(DivisionStep::CutSelected { axis, cut, selected_side, selected, continuing })
    };

    use MeanClass::*;
    match (lower_class, upper_class) {
        (Above, Above) | (Equal, Above) | (Above, Equal) => Err(DecomposeError::Internal(format!(
            "both halves of {rect} reach the level although the whole is below it"
        ))),
        (Equal, _) => cut_selected(mid, Side::Lower),
        (_, Equal) => cut_selected(mid, Side::Upper),
        (Above, _) => cut_selected(cut_from_profile(profile, rect, axis, level, Side::Lower)?, Side::Lower),
        (_, Above) => cut_selected(cut_from_profile(profile, rect, axis, level, Side::Upper)?, Side::Upper),
        _ => Ok(DivisionStep::SplitBoth { axis, midpoint: mid, lower, upper }),
    }
}

struct Engine<'t, 'a, S> {
    table: &'t CumulativeTable<'a, S>,
    density: &'a GridDensity<S>,
    level: &'t Level<S>,
    policy: &'t StoppingPolicy<S>,
    total: S,
    selected: Vec<Selected<S>>,
    residual: Vec<Residual<S>>,
    complete: bool,
    /// Float rounding can make a piece look like it violates the division
    /// invariant; in float mode such pieces become resolution-limit leaves.
    lenient: bool,
}

impl<S: Scalar> Engine<'_, '_, S> {
    fn leaf(&mut self, rect: Rect<S>, mean: Option<S>, depth: usize, reason: LeafReason) -> DivisionNode<S> {
        if reason == LeafReason::ResolutionLimit {
            let sup = self.density.essential_sup_f(&rect);
            if sup.is_some_and(|s| s > *self.level.value()) {
                self.complete = false;
            }
        }
        self.residual.push(Residual { rect: rect.clone(), reason, depth });
        DivisionNode { rect, mean, depth, outcome: Outcome::ResidualLeaf(reason) }
    }

    fn select(&mut self, rect: Rect<S>, mean: Option<S>, depth: usize) -> DivisionNode<S> {
        let recorded = mean.clone().unwrap_or_else(|| self.level.value().clone());
        self.selected.push(Selected { rect: rect.clone(), mean: recorded, depth });
        DivisionNode { rect, mean, depth, outcome: Outcome::SelectedWhole }
    }

    fn visit(&mut self, rect: Rect<S>, depth: usize) -> Result<DivisionNode<S>, DecomposeError> {
        let (f, m) = self.table.masses(&rect)?;
        let class = self.level.classify(&f, &m, &self.total);
        let mean = (class != MeanClass::Undefined).then(|| f / m);
        match class {
            MeanClass::Undefined => return Ok(self.leaf(rect, None, depth, LeafReason::ZeroMeasure)),
            MeanClass::Equal => return Ok(self.select(rect, mean, depth)),
            MeanClass::Above if self.lenient => {
                return Ok(self.leaf(rect, mean, depth, LeafReason::ResolutionLimit));
            }
            MeanClass::Above => {
                return Err(DecomposeError::Internal(format!("division rectangle {rect} has mean above the level")));
            }
            MeanClass::Below => {}
        }
        let sup = self.density.essential_sup_f(&rect);
        if sup.is_none_or(|s| s <= *self.level.value()) {
            return Ok(self.leaf(rect, mean, depth, LeafReason::BelowLevel));
        }
        if self.policy.exhausted(&rect, depth, self.selected.len()) {
            return Ok(self.leaf(rect, mean, depth, LeafReason::ResolutionLimit));
        }
        let axis = rect.longest_axis()?;
        let profile = self.table.axis_profile(&rect, axis)?;
        let step = match divide_with_profile(&profile, self.total.clone(), &rect, axis, self.level) {
            Ok(step) => step,
            Err(DecomposeError::Precondition(_)) if self.lenient => {
                return Ok(self.leaf(rect, mean, depth, LeafReason::ResolutionLimit));
            }
            Err(e) => return Err(e),
        };
        let outcome = match step {
            DivisionStep::SplitBoth { axis, midpoint, lower, upper } => {
                let lower = Box::new(self.visit(lower, depth + 1)?);
                let upper = Box::new(self.visit(upper, depth + 1)?);
                Outcome::SplitBoth { axis, midpoint, lower, upper }
            }
            DivisionStep::CutSelected { axis, cut, selected_side, selected, continuing } => {
                let (sf, sm) = self.table.masses(&selected)?;
                let selected_mean = (sm != S::zero()).then(|| sf / sm);
                let selected = Box::new(self.select(selected, selected_mean, depth + 1));
                let continuing = Box::new(self.visit(continuing, depth + 1)?);
                Outcome::CutSelected { axis, cut, selected_side, selected, continuing }
            }
        };
        Ok(DivisionNode { rect, mean, depth, outcome })
    }
}

/// Disjoint rectangles with mean exactly `A` such that `f <= A` μ-a.e. off
/// their union, up to the stopping policy.
///
/// Traversal is depth-first: the lower child of a midpoint split first, and
/// the selected piece of a cut before the continuing piece.
pub fn rising_sun_decompose<S: Scalar>(
    density: &GridDensity<S>,
    level: &Level<S>,
    policy: &StoppingPolicy<S>,
) -> Result<Decomposition<S>, DecomposeError> {
    policy.validate()?;
    let table = CumulativeTable::build(density);
    let (f, m) = table.total();
    match level.classify(&f, &m, &m) {
        MeanClass::Undefined => return Err(DecomposeError::ZeroTotalMeasure),
        MeanClass::Above => {
            return Err(DecomposeError::LevelBelowMean {
                mean: (f / m).to_string(),
                level: level.value().to_string(),
            })
        }
        _ => {}
    }
    let mut engine = Engine {
        table: &table,
        density,
        level,
        policy,
        total: m,
        selected: Vec::new(),
        residual: Vec::new(),
        complete: true,
        lenient: S::DEFAULT_TOLERANCE > 0.0,
    };
    let root = engine.visit(density.domain().clone(), 0)?;
    Ok(Decomposition {
        level: level.value().clone(),
        selected: engine.selected,
        residual: engine.residual,
        root: Some(root),
        complete: engine.complete,
    })
}

/// The same process on an interval.
pub fn riesz_1d<S: Scalar>(
    density: &GridDensity<S>,
    level: &Level<S>,
    policy: &StoppingPolicy<S>,
) -> Result<Decomposition<S>, DecomposeError> {
    if density.dim() != 1 {
        return Err(DecomposeError::NotOneDimensional(density.dim()));
    }
    rising_sun_decompose(density, level, policy)
}
