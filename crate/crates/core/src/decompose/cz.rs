use super::{Level, LeafReason, MeanClass, Residual, StoppingPolicy};
use crate::density::{CumulativeTable, GridDensity};
use crate::error::DecomposeError;
use crate::geometry::Rect;
use crate::scalar::Scalar;

/// A dyadic subcube whose mean exceeds the level.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedCube<S> {
    pub cube: Rect<S>,
    pub mean: S,
    pub depth: usize,
}

/// Output of the dyadic cube recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeDecomposition<S> {
    pub level: S,
    pub cubes: Vec<SelectedCube<S>>,
    pub residual: Vec<Residual<S>>,
    pub complete: bool,
}

impl<S: Scalar> CubeDecomposition<S> {
    /// `2^n·A`, the upper end of the bracket every selected mean falls in.
    pub fn upper_bound(&self, dim: usize) -> S {
        (0..dim).fold(self.level.clone(), |acc, _| acc.clone() + acc)
    }
}

/// Split a cube into its `2^n` dyadic children. Child `k` takes the upper
/// half on axis `i` when bit `n-1-i` of `k` is set, so the lower child comes
/// first on every axis.
fn dyadic_children<S: Scalar>(cube: &Rect<S>) -> Result<Vec<Rect<S>>, DecomposeError> {
    let n = cube.dim();
    let mut out = Vec::with_capacity(1 << n);
    for k in 0..(1usize << n) {
        let mut child = cube.clone();
        for axis in 0..n {
            let side = cube.side(axis);
            let mid = side.midpoint();
            child = if (k >> (n - 1 - axis)) & 1 == 1 {
                child.with_side(axis, mid, side.hi().clone())?
            } else {
                child.with_side(axis, side.lo().clone(), mid)?
            };
        }
        out.push(child);
    }
    Ok(out)
}

struct CzEngine<'t, 'a, S> {
    table: &'t CumulativeTable<'a, S>,
    density: &'a GridDensity<S>,
    level: &'t Level<S>,
    policy: &'t StoppingPolicy<S>,
    total: S,
    out: CubeDecomposition<S>,
}

impl<S: Scalar> CzEngine<'_, '_, S> {
    fn residual(&mut self, cube: Rect<S>, depth: usize, reason: LeafReason) {
        if reason == LeafReason::ResolutionLimit
            && self.density.essential_sup_f(&cube).is_some_and(|s| s > *self.level.value())
        {
            self.out.complete = false;
        }
        self.out.residual.push(Residual { rect: cube, reason, depth });
    }

    fn visit(&mut self, cube: Rect<S>, depth: usize) -> Result<(), DecomposeError> {
        if self.density.essential_sup_f(&cube).is_none_or(|s| s <= *self.level.value()) {
            self.residual(cube, depth, LeafReason::BelowLevel);
            return Ok(());
        }
        if self.policy.exhausted(&cube, depth, self.out.cubes.len()) {
            self.residual(cube, depth, LeafReason::ResolutionLimit);
            return Ok(());
        }
        for child in dyadic_children(&cube)? {
            let (f, m) = self.table.masses(&child)?;
            match self.level.classify(&f, &m, &self.total) {
                MeanClass::Above => self.out.cubes.push(SelectedCube { cube: child, mean: f / m, depth: depth + 1 }),
                MeanClass::Undefined => self.residual(child, depth + 1, LeafReason::ZeroMeasure),
                _ => self.visit(child, depth + 1)?,
            }
        }
        Ok(())
    }
}

/// The classical dyadic stopping-time decomposition: split each cube into
/// `2^n` congruent children and select a child as soon as its mean exceeds
/// `A`. Needs a cube domain, `f >= 0` and Lebesgue measure.
pub fn cz_decompose<S: Scalar>(
    density: &GridDensity<S>,
    level: &Level<S>,
    policy: &StoppingPolicy<S>,
) -> Result<CubeDecomposition<S>, DecomposeError> {
    policy.validate()?;
    let domain = density.domain();
    let side = domain.side(0).length();
    if domain.is_degenerate() || domain.sides().iter().any(|s| s.length() != side) {
        return Err(DecomposeError::NotCube);
    }
    if density.f_values().iter().any(|f| *f < S::zero()) {
        return Err(DecomposeError::NegativeDensity);
    }
    if !density.is_lebesgue() {
        return Err(DecomposeError::NonLebesgue);
    }
    let table = CumulativeTable::build(density);
    let (f, m) = table.total();
    if level.classify(&f, &m, &m) == MeanClass::Above {
        return Err(DecomposeError::LevelBelowMean { mean: (f / m).to_string(), level: level.value().to_string() });
    }
    let mut engine = CzEngine {
        table: &table,
        density,
        level,
        policy,
        total: m,
        out: CubeDecomposition { level: level.value().clone(), cubes: Vec::new(), residual: Vec::new(), complete: true },
    };
    engine.visit(domain.clone(), 0)?;
    Ok(engine.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::{int, ratio, Exact};

    fn unit_square() -> Rect<Exact> {
        Rect::from_bounds([(int(0), int(1)), (int(0), int(1))]).unwrap()
    }

    #[test]
    fn one_level_selection() {
        let d = GridDensity::uniform(unit_square(), &[2, 2], vec![int(4), int(0), int(0), int(0)], None).unwrap();
        let out = cz_decompose(&d, &Level::new(ratio(3, 2)), &StoppingPolicy::max_depth(8)).unwrap();
        assert_eq!(out.cubes.len(), 1);
        assert_eq!(out.cubes[0].cube.to_string(), "[0,1/2)x[0,1/2)");
        assert_eq!(out.cubes[0].mean, int(4));
        assert_eq!(out.upper_bound(2), int(6));
        assert!(out.complete);
    }

    #[test]
    fn zero_density_selects_nothing() {
        let d = GridDensity::uniform(unit_square(), &[2, 2], vec![int(0); 4], None).unwrap();
        let out = cz_decompose(&d, &Level::new(int(1)), &StoppingPolicy::max_depth(8)).unwrap();
        assert!(out.cubes.is_empty());
        assert_eq!(out.residual.len(), 1);
    }

    #[test]
    fn counterexample_means_miss_the_level() {
        let d = fixtures::counterexample();
        let a = fixtures::counterexample_level();
        let out = cz_decompose(&d, &Level::new(a.clone()), &StoppingPolicy::max_depth(8)).unwrap();
        assert_eq!(out.cubes.len(), 3);
        assert!(out.cubes.iter().all(|c| c.mean == int(1) && c.mean != a));
        assert!(out.complete);
    }

    #[test]
    fn children_order_and_partition() {
        let kids = dyadic_children(&unit_square()).unwrap();
        let names: Vec<_> = kids.iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["[0,1/2)x[0,1/2)", "[0,1/2)x[1/2,1)", "[1/2,1)x[0,1/2)", "[1/2,1)x[1/2,1)"]);
        let vol = kids.iter().fold(int(0), |acc, k| acc + k.volume());
        assert_eq!(vol, int(1));
    }

    #[test]
    fn rejects_invalid_inputs() {
        let policy = StoppingPolicy::max_depth(4);
        let wide = Rect::from_bounds([(int(0), int(2)), (int(0), int(1))]).unwrap();
        let d = GridDensity::uniform(wide, &[2, 2], vec![int(1); 4], None).unwrap();
        assert!(matches!(cz_decompose(&d, &Level::new(int(1)), &policy), Err(DecomposeError::NotCube)));
        let d = GridDensity::uniform(unit_square(), &[2, 2], vec![int(-1), int(1), int(1), int(1)], None).unwrap();
        assert!(matches!(cz_decompose(&d, &Level::new(int(1)), &policy), Err(DecomposeError::NegativeDensity)));
        let d = GridDensity::uniform(unit_square(), &[2, 2], vec![int(1); 4], Some(vec![int(2); 4])).unwrap();
        assert!(matches!(cz_decompose(&d, &Level::new(int(1)), &policy), Err(DecomposeError::NonLebesgue)));
        let d = fixtures::counterexample();
        assert!(matches!(
            cz_decompose(&d, &Level::new(ratio(1, 2)), &policy),
            Err(DecomposeError::LevelBelowMean { .. })
        ));
    }
}
