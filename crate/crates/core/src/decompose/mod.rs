//! Decompositions of a density at a level `A`.
//!
//! [`rising_sun_decompose`] runs the rectangle division process: halve the
//! longest side, slide the cut until one piece has mean exactly `A`, keep the
//! not-smaller piece, recurse on the rest. [`cz_decompose`] is the dyadic cube
//! baseline whose selected means only land in `(A, 2^n A]`.

mod cz;
mod rising_sun;

pub use cz::{cz_decompose, CubeDecomposition, SelectedCube};
pub use rising_sun::{divide_step, find_cut, riesz_1d, rising_sun_decompose, DivisionStep};

use std::cmp::Ordering;
use std::fmt;

use crate::error::DecomposeError;
use crate::geometry::{Rect, Side};
use crate::scalar::{Exact, Scalar};

/// The level `A`, with the relative tolerance used when comparing means to it.
/// Exact types always compare exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Level<S> {
    value: S,
    rel_tol: f64,
}

/// Where a mean falls relative to the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanClass {
    /// Zero measure: no mean.
    Undefined,
    Below,
    Equal,
    Above,
}

impl<S: Scalar> Level<S> {
    pub fn new(value: S) -> Self {
        Level { value, rel_tol: S::DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(value: S, rel_tol: f64) -> Self {
        Level { value, rel_tol }
    }

    pub fn value(&self) -> &S {
        &self.value
    }

    pub fn tolerance(&self) -> f64 {
        self.rel_tol
    }

    /// `∫ f dμ - A·μ` for a piece with the given masses.
    pub fn excess(&self, integral: &S, measure: &S) -> S {
        integral.clone() - self.value.clone() * measure.clone()
    }

    /// Sign of the excess, scaled so float noise on large masses is ignored.
    pub fn excess_sign(&self, integral: &S, measure: &S) -> Ordering {
        let scale = integral.abs_value() + self.value.abs_value() * measure.clone();
        self.excess(integral, measure).sign_within(&scale, self.rel_tol)
    }

    /// Classify the mean of a piece. `total` is `μ(I_0)`, the scale for
    /// deciding that a float measure is zero.
    pub fn classify(&self, integral: &S, measure: &S, total: &S) -> MeanClass {
        if measure.sign_within(total, self.rel_tol) != Ordering::Greater {
            return MeanClass::Undefined;
        }
        match self.excess_sign(integral, measure) {
            Ordering::Less => MeanClass::Below,
            Ordering::Equal => MeanClass::Equal,
            Ordering::Greater => MeanClass::Above,
        }
    }

    pub fn convert<T: Scalar>(&self) -> Level<T> {
        Level { value: T::from_exact(&self.value.to_exact()), rel_tol: self.rel_tol }
    }
}

/// Guards that keep the process finite. At least one of `min_side > 0` or a
/// finite `max_depth` is required.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingPolicy<S> {
    pub min_side: S,
    pub max_depth: Option<usize>,
    pub max_selected: Option<usize>,
}

impl<S: Scalar> StoppingPolicy<S> {
    pub fn max_depth(depth: usize) -> Self {
        StoppingPolicy { min_side: S::zero(), max_depth: Some(depth), max_selected: None }
    }

    pub fn min_side(min_side: S) -> Self {
        StoppingPolicy { min_side, max_depth: None, max_selected: None }
    }

    pub fn validate(&self) -> Result<(), DecomposeError> {
        if self.min_side < S::zero() {
            return Err(DecomposeError::InvalidPolicy("min_side must be >= 0"));
        }
        if self.max_depth == Some(0) {
            return Err(DecomposeError::InvalidPolicy("max_depth must be positive"));
        }
        if self.max_selected == Some(0) {
            return Err(DecomposeError::InvalidPolicy("max_selected must be positive"));
        }
        if self.min_side <= S::zero() && self.max_depth.is_none() {
            return Err(DecomposeError::UnboundedPolicy);
        }
        Ok(())
    }

    /// Whether a rectangle at `depth` may not be divided further.
    pub(crate) fn exhausted(&self, rect: &Rect<S>, depth: usize, selected: usize) -> bool {
        self.max_depth.is_some_and(|d| depth >= d)
            || self.max_selected.is_some_and(|k| selected >= k)
            || (self.min_side > S::zero() && rect.longest_side().half() < self.min_side)
    }

    pub fn convert<T: Scalar>(&self) -> StoppingPolicy<T> {
        StoppingPolicy {
            min_side: T::from_exact(&self.min_side.to_exact()),
            max_depth: self.max_depth,
            max_selected: self.max_selected,
        }
    }
}

/// Why a rectangle was left undivided and unselected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafReason {
    /// `f <= A` μ-almost everywhere on the rectangle.
    BelowLevel,
    ZeroMeasure,
    /// The stopping policy cut the process short here.
    ResolutionLimit,
}

impl LeafReason {
    pub fn name(self) -> &'static str {
        match self {
            LeafReason::BelowLevel => "below-level",
            LeafReason::ZeroMeasure => "zero-measure",
            LeafReason::ResolutionLimit => "resolution-limit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "below-level" => Some(LeafReason::BelowLevel),
            "zero-measure" => Some(LeafReason::ZeroMeasure),
            "resolution-limit" => Some(LeafReason::ResolutionLimit),
            _ => None,
        }
    }
}

impl fmt::Display for LeafReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What happened to a rectangle of the division tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<S> {
    /// The rectangle has mean `A` and joins the selected family.
    SelectedWhole,
    /// Both midpoint halves have mean below `A`; both are divided further.
    SplitBoth {
        axis: usize,
        midpoint: S,
        lower: Box<DivisionNode<S>>,
        upper: Box<DivisionNode<S>>,
    },
    /// A cut at `cut` produced a piece of mean `A` on `selected_side`; the
    /// other piece continues.
    CutSelected {
        axis: usize,
        cut: S,
        selected_side: Side,
        selected: Box<DivisionNode<S>>,
        continuing: Box<DivisionNode<S>>,
    },
    ResidualLeaf(LeafReason),
}

/// A rectangle of the division tree with its mean (`None` when `μ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionNode<S> {
    pub rect: Rect<S>,
    pub mean: Option<S>,
    pub depth: usize,
    pub outcome: Outcome<S>,
}

impl<S: Scalar> DivisionNode<S> {
    /// Children in traversal order.
    pub fn children(&self) -> Vec<&DivisionNode<S>> {
        match &self.outcome {
            Outcome::SplitBoth { lower, upper, .. } => vec![lower, upper],
            Outcome::CutSelected { selected, continuing, .. } => vec![selected, continuing],
            _ => Vec::new(),
        }
    }

    /// Divided further without being selected.
    pub fn is_division(&self) -> bool {
        matches!(self.outcome, Outcome::SplitBoth { .. } | Outcome::CutSelected { .. })
    }

    /// Pre-order walk.
    pub fn walk<'s>(&'s self, visit: &mut impl FnMut(&'s DivisionNode<S>)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }

    pub fn convert<T: Scalar>(&self) -> DivisionNode<T> {
        let conv = |x: &S| T::from_exact(&x.to_exact());
        let outcome = match &self.outcome {
            Outcome::SelectedWhole => Outcome::SelectedWhole,
            Outcome::SplitBoth { axis, midpoint, lower, upper } => Outcome::SplitBoth {
                axis: *axis,
                midpoint: conv(midpoint),
                lower: Box::new(lower.convert()),
                upper: Box::new(upper.convert()),
            },
            Outcome::CutSelected { axis, cut, selected_side, selected, continuing } => Outcome::CutSelected {
                axis: *axis,
                cut: conv(cut),
                selected_side: *selected_side,
                selected: Box::new(selected.convert()),
                continuing: Box::new(continuing.convert()),
            },
            Outcome::ResidualLeaf(reason) => Outcome::ResidualLeaf(*reason),
        };
        DivisionNode {
            rect: self.rect.map(conv),
            mean: self.mean.as_ref().map(conv),
            depth: self.depth,
            outcome,
        }
    }
}

/// A member of the selected family.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected<S> {
    pub rect: Rect<S>,
    pub mean: S,
    pub depth: usize,
}

/// A leaf that is neither selected nor divided.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual<S> {
    pub rect: Rect<S>,
    pub reason: LeafReason,
    pub depth: usize,
}

/// Output of the rectangle division process.
///
/// The residual leaves tile `I_0` minus the selected rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S> {
    pub level: S,
    pub selected: Vec<Selected<S>>,
    pub residual: Vec<Residual<S>>,
    /// Absent when the decomposition was read back without a tree dump.
    pub root: Option<DivisionNode<S>>,
    /// No resolution-limit leaf has essential supremum above `A`.
    pub complete: bool,
}

impl<S: Scalar> Decomposition<S> {
    pub fn selected_rects(&self) -> Vec<Rect<S>> {
        self.selected.iter().map(|s| s.rect.clone()).collect()
    }

    /// The division rectangles: internal nodes that were not selected.
    pub fn division_rects(&self) -> Vec<Rect<S>> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            root.walk(&mut |node| {
                if node.is_division() {
                    out.push(node.rect.clone());
                }
            });
        }
        out
    }

    pub fn convert<T: Scalar>(&self) -> Decomposition<T> {
        let conv = |x: &S| T::from_exact(&x.to_exact());
        Decomposition {
            level: conv(&self.level),
            selected: self
                .selected
                .iter()
                .map(|s| Selected { rect: s.rect.map(conv), mean: conv(&s.mean), depth: s.depth })
                .collect(),
            residual: self
                .residual
                .iter()
                .map(|r| Residual { rect: r.rect.map(conv), reason: r.reason, depth: r.depth })
                .collect(),
            root: self.root.as_ref().map(DivisionNode::convert),
            complete: self.complete,
        }
    }

    pub fn to_exact(&self) -> Decomposition<Exact> {
        self.convert()
    }
}
