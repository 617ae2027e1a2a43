//! Half-open intervals `[lo, hi)` and axis-aligned rectangles built from them.
//!
//! Splitting a rectangle at an interior coordinate produces two pieces whose
//! union is the original and whose intersection is empty, with no rounding in
//! exact mode. All values are immutable once built.

use std::fmt;

use crate::error::GeometryError;
use crate::scalar::{Exact, Scalar};

/// Half-open interval `[lo, hi)` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self, GeometryError> {
        if lo > hi {
            return Err(GeometryError::InvertedInterval(lo.to_string(), hi.to_string()));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn length(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> S {
        (self.lo.clone() + self.hi.clone()).half()
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, x: &S) -> bool {
        self.lo <= *x && *x < self.hi
    }

    /// `self` is a subset of `other` as a point set. Empty intervals are
    /// subsets of everything.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo < other.hi && other.lo < self.hi && !self.is_empty() && !other.is_empty()
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        (lo < hi).then(|| Interval { lo: lo.clone(), hi: hi.clone() })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Interval<T> {
        Interval { lo: f(&self.lo), hi: f(&self.hi) }
    }
}

impl<S: fmt::Display> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.lo, self.hi)
    }
}

/// Product of `n >= 1` half-open intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect<S> {
    sides: Vec<Interval<S>>,
}

/// How two rectangles sit relative to each other as point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Disjoint,
    /// Same point set; both containments hold.
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
    ProperOverlap,
}

impl Relation {
    /// Nested or disjoint: the dyadic relation between division rectangles.
    pub fn is_nested_or_disjoint(self) -> bool {
        !matches!(self, Relation::ProperOverlap)
    }

    pub fn first_inside_second(self) -> bool {
        matches!(self, Relation::Equal | Relation::FirstInsideSecond)
    }
}

impl<S: Scalar> Rect<S> {
    pub fn new(sides: Vec<Interval<S>>) -> Result<Self, GeometryError> {
        if sides.is_empty() {
            return Err(GeometryError::Empty);
        }
        Ok(Rect { sides })
    }

    /// Build from `(lo, hi)` pairs.
    pub fn from_bounds(bounds: impl IntoIterator<Item = (S, S)>) -> Result<Self, GeometryError> {
        let sides = bounds
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Rect::new(sides)
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval<S>] {
        &self.sides
    }

    pub fn side(&self, axis: usize) -> &Interval<S> {
        &self.sides[axis]
    }

    pub fn volume(&self) -> S {
        self.sides.iter().fold(S::one(), |acc, side| acc * side.length())
    }

    pub fn is_degenerate(&self) -> bool {
        self.sides.iter().any(Interval::is_empty)
    }

    /// Largest side length.
    pub fn longest_side(&self) -> S {
        let mut best = self.sides[0].length();
        for side in &self.sides[1..] {
            let len = side.length();
            if len > best {
                best = len;
            }
        }
        best
    }

    /// Index of a side of maximal length; ties go to the smallest index.
    pub fn longest_axis(&self) -> Result<usize, GeometryError> {
        if self.is_degenerate() {
            return Err(GeometryError::Degenerate);
        }
        let mut best_axis = 0;
        let mut best = self.sides[0].length();
        for (axis, side) in self.sides.iter().enumerate().skip(1) {
            let len = side.length();
            if len > best {
                best = len;
                best_axis = axis;
            }
        }
        Ok(best_axis)
    }

    /// Replace one side, keeping the others.
    pub fn with_side(&self, axis: usize, lo: S, hi: S) -> Result<Self, GeometryError> {
        self.check_axis(axis)?;
        let mut sides = self.sides.clone();
        sides[axis] = Interval::new(lo, hi)?;
        Ok(Rect { sides })
    }

    /// Cut by the hyperplane `x_axis = t` into `(lower, upper)`.
    pub fn split_at(&self, axis: usize, t: &S) -> Result<(Self, Self), GeometryError> {
        self.check_axis(axis)?;
        let side = &self.sides[axis];
        if !(side.lo < *t && *t < side.hi) {
            return Err(GeometryError::SplitOutOfRange(t.to_string()));
        }
        let mut lower = self.sides.clone();
        let mut upper = self.sides.clone();
        lower[axis] = Interval { lo: side.lo.clone(), hi: t.clone() };
        upper[axis] = Interval { lo: t.clone(), hi: side.hi.clone() };
        Ok((Rect { sides: lower }, Rect { sides: upper }))
    }

    pub fn contains_point(&self, point: &[S]) -> bool {
        point.len() == self.dim() && self.sides.iter().zip(point).all(|(s, x)| s.contains(x))
    }

    /// Point-set containment; degenerate rectangles are contained in anything.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.is_degenerate() || self.sides.iter().zip(&other.sides).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.sides.iter().zip(&other.sides).all(|(a, b)| a.overlaps(b))
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let sides = self
            .sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| a.intersection(b))
            .collect::<Option<Vec<_>>>()?;
        Some(Rect { sides })
    }

    /// Classify under half-open semantics. Degenerate rectangles are empty
    /// point sets and come out disjoint from everything.
    pub fn relation(&self, other: &Self) -> Result<Relation, GeometryError> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch(self.dim(), other.dim()));
        }
        if !self.intersects(other) {
            return Ok(Relation::Disjoint);
        }
        let first_in = self.is_subset_of(other);
        let second_in = other.is_subset_of(self);
        Ok(match (first_in, second_in) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::FirstInsideSecond,
            (false, true) => Relation::SecondInsideFirst,
            (false, false) => Relation::ProperOverlap,
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Rect<T> {
        Rect { sides: self.sides.iter().map(|s| s.map(&f)).collect() }
    }

    pub fn to_exact(&self) -> Rect<Exact> {
        self.map(Scalar::to_exact)
    }

    fn check_axis(&self, axis: usize) -> Result<(), GeometryError> {
        if axis >= self.dim() {
            return Err(GeometryError::AxisOutOfRange { axis, dim: self.dim() });
        }
        Ok(())
    }
}

impl<S: fmt::Display> fmt::Display for Rect<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, side) in self.sides.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{side}")?;
        }
        Ok(())
    }
}

/// Either end of a side: which half of a split grows or gets selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    fn rect(bounds: &[(Exact, Exact)]) -> Rect<Exact> {
        Rect::from_bounds(bounds.iter().cloned()).unwrap()
    }

    fn unit2() -> Rect<Exact> {
        rect(&[(int(0), int(1)), (int(0), int(1))])
    }

    #[test]
    fn volume_examples() {
        assert_eq!(unit2().volume(), int(1));
        assert_eq!(rect(&[(int(0), ratio(2, 3)), (int(0), int(1))]).volume(), ratio(2, 3));
        let flat = rect(&[(ratio(1, 2), ratio(1, 2)), (int(0), int(1))]);
        assert_eq!(flat.volume(), int(0));
        assert!(flat.is_degenerate());
    }

    #[test]
    fn longest_axis_examples() {
        assert_eq!(unit2().longest_axis().unwrap(), 0);
        assert_eq!(rect(&[(ratio(2, 3), int(1)), (int(0), int(1))]).longest_axis().unwrap(), 1);
        let r = rect(&[(int(0), int(5)), (int(0), int(2)), (int(0), int(3))]);
        assert_eq!(r.longest_axis().unwrap(), 0);
        let flat = rect(&[(int(1), int(1)), (int(0), int(1))]);
        assert_eq!(flat.longest_axis(), Err(GeometryError::Degenerate));
    }

    #[test]
    fn split_examples() {
        let (lo, hi) = unit2().split_at(0, &ratio(1, 2)).unwrap();
        assert_eq!(lo.to_string(), "[0,1/2)x[0,1)");
        assert_eq!(hi.to_string(), "[1/2,1)x[0,1)");
        let (lo, hi) = unit2().split_at(0, &ratio(2, 3)).unwrap();
        assert_eq!(lo.to_string(), "[0,2/3)x[0,1)");
        assert_eq!(hi.to_string(), "[2/3,1)x[0,1)");
        assert!(unit2().split_at(0, &int(0)).is_err());
        assert!(unit2().split_at(0, &int(1)).is_err());
        assert!(unit2().split_at(2, &ratio(1, 2)).is_err());
    }

    #[test]
    fn relation_examples() {
        let a = rect(&[(int(0), ratio(1, 2)), (int(0), int(1))]);
        let b = rect(&[(ratio(1, 2), int(1)), (int(0), int(1))]);
        assert_eq!(a.relation(&b).unwrap(), Relation::Disjoint);

        let c = rect(&[(ratio(2, 3), int(1)), (int(0), ratio(4, 7))]);
        let d = rect(&[(ratio(2, 3), int(1)), (int(0), int(1))]);
        assert_eq!(c.relation(&d).unwrap(), Relation::FirstInsideSecond);
        assert_eq!(d.relation(&c).unwrap(), Relation::SecondInsideFirst);

        let e = rect(&[(int(0), ratio(3, 4)), (int(0), int(1))]);
        assert_eq!(e.relation(&b).unwrap(), Relation::ProperOverlap);
        assert_eq!(e.relation(&e).unwrap(), Relation::Equal);

        let flat = rect(&[(ratio(1, 4), ratio(1, 4)), (int(0), int(1))]);
        assert_eq!(flat.relation(&unit2()).unwrap(), Relation::Disjoint);
        assert_eq!(flat.relation(&flat).unwrap(), Relation::Disjoint);

        let line = Rect::from_bounds([(int(0), int(1))]).unwrap();
        assert!(matches!(line.relation(&unit2()), Err(GeometryError::DimensionMismatch(1, 2))));
    }

    #[test]
    fn rejects_inverted_interval() {
        assert!(Interval::new(int(1), int(0)).is_err());
    }

    fn arb_rect() -> impl Strategy<Value = Rect<Exact>> {
        prop::collection::vec((-20i64..20, 0i64..20, 1i64..8), 1..4).prop_map(|sides| {
            Rect::from_bounds(sides.into_iter().map(|(a, len, q)| (ratio(a, q), ratio(a + len, q))))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn split_preserves_volume(r in arb_rect(), axis_seed in 0usize..3, num in 1i64..100) {
            let axis = axis_seed % r.dim();
            let side = r.side(axis);
            prop_assume!(!side.is_empty());
            let t = side.lo().clone() + side.length() * ratio(num, 101);
            let (lo, hi) = r.split_at(axis, &t).unwrap();
            prop_assert_eq!(lo.volume() + hi.volume(), r.volume());
            prop_assert_eq!(lo.relation(&hi).unwrap(), Relation::Disjoint);
            prop_assert!(lo.is_subset_of(&r) && hi.is_subset_of(&r));
        }

        #[test]
        fn relation_is_symmetric(a in arb_rect(), b in arb_rect()) {
            prop_assume!(a.dim() == b.dim());
            let ab = a.relation(&b).unwrap();
            let ba = b.relation(&a).unwrap();
            let swapped = match ab {
                Relation::FirstInsideSecond => Relation::SecondInsideFirst,
                Relation::SecondInsideFirst => Relation::FirstInsideSecond,
                other => other,
            };
            prop_assert_eq!(ba, swapped);
        }
    }
}
