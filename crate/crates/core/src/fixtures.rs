//! Built-in densities: the two-by-two cube counterexample, the one-dimensional
//! step, and seeded random grids.
//!
//! The counterexample is `f = 1 - χ` of the upper-right quarter of the unit
//! square. The closed square and closed indicator are represented half-open;
//! the difference is a null set.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::{CumulativeTable, GridDensity};
use crate::geometry::Rect;
use crate::scalar::{int, ratio, Exact};

/// `f = (1, 1, 1, 0)` on a 2×2 grid over `[0,1)²`, Lebesgue measure.
pub fn counterexample() -> GridDensity<Exact> {
    let domain = Rect::from_bounds([(int(0), int(1)), (int(0), int(1))]).unwrap();
    GridDensity::uniform(domain, &[2, 2], vec![int(1), int(1), int(1), int(0)], None).unwrap()
}

/// Level used with the counterexample.
pub fn counterexample_level() -> Exact {
    ratio(7, 8)
}

/// `f = (2, 0)` on `[0,1)` with two cells.
pub fn riesz_step() -> GridDensity<Exact> {
    step_1d(int(2), int(0))
}

/// `f = (0, 2)` on `[0,1)`, the mirror image of [`riesz_step`].
pub fn riesz_step_mirror() -> GridDensity<Exact> {
    step_1d(int(0), int(2))
}

fn step_1d(a: Exact, b: Exact) -> GridDensity<Exact> {
    let domain = Rect::from_bounds([(int(0), int(1))]).unwrap();
    GridDensity::uniform(domain, &[2], vec![a, b], None).unwrap()
}

/// Knobs for [`random_density`].
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub dims: Vec<usize>,
    pub max_cells: usize,
    /// `|f| <= f_bound`.
    pub f_bound: i64,
    pub max_denominator: i64,
    pub signed: bool,
    /// Weights drawn from `[0, w_bound]`; `None` means Lebesgue.
    pub w_bound: Option<i64>,
    /// Probability that a weight is exactly zero.
    pub zero_weight_chance: f64,
    pub uniform_edges: bool,
    pub unit_domain: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            dims: vec![1, 2, 3],
            max_cells: 8,
            f_bound: 16,
            max_denominator: 4,
            signed: true,
            w_bound: Some(4),
            zero_weight_chance: 0.1,
            uniform_edges: false,
            unit_domain: false,
        }
    }
}

impl RandomSpec {
    /// Nonnegative `f` on a cube with Lebesgue measure and uniform cells.
    pub fn cube() -> Self {
        RandomSpec {
            signed: false,
            w_bound: None,
            uniform_edges: true,
            unit_domain: true,
            ..RandomSpec::default()
        }
    }
}

fn random_ratio(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Exact {
    let q = rng.gen_range(1..=max_den.max(1));
    let p = rng.gen_range(lo * q..=hi * q);
    ratio(p, q)
}

/// Draw a density from `spec`. Equal seeds give equal densities on every
/// platform.
pub fn random_density(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> GridDensity<Exact> {
    let dim = spec.dims[rng.gen_range(0..spec.dims.len())];
    let cube_cells = rng.gen_range(1..=spec.max_cells);
    let cube_side = random_ratio(rng, 1, 3, spec.max_denominator);
    let mut bounds = Vec::with_capacity(dim);
    let mut cells = Vec::with_capacity(dim);
    for _ in 0..dim {
        if spec.unit_domain {
            bounds.push((int(0), cube_side.clone()));
            cells.push(cube_cells);
        } else {
            let lo = random_ratio(rng, -2, 2, spec.max_denominator);
            let len = random_ratio(rng, 1, 3, spec.max_denominator);
            bounds.push((lo.clone(), lo + len));
            cells.push(rng.gen_range(1..=spec.max_cells));
        }
    }
    let count: usize = cells.iter().product();
    let f_lo = if spec.signed { -spec.f_bound } else { 0 };
    let f: Vec<Exact> = (0..count).map(|_| random_ratio(rng, f_lo, spec.f_bound, spec.max_denominator)).collect();
    let w: Option<Vec<Exact>> = spec.w_bound.map(|bound| {
        let mut w: Vec<Exact> = (0..count)
            .map(|_| {
                if rng.gen_bool(spec.zero_weight_chance) {
                    int(0)
                } else {
                    random_ratio(rng, 0, bound, spec.max_denominator)
                }
            })
            .collect();
        if w.iter().all(|x| *x == int(0)) {
            w[0] = int(1);
        }
        w
    });
    let domain = Rect::from_bounds(bounds).unwrap();
    if spec.uniform_edges {
        return GridDensity::uniform(domain, &cells, f, w).unwrap();
    }
    let edges = domain
        .sides()
        .iter()
        .zip(&cells)
        .map(|(side, &m)| {
            // m - 1 distinct interior points chosen from a fine lattice
            let lattice = 4 * m as i64;
            let mut picks: Vec<i64> = Vec::new();
            while picks.len() < m - 1 {
                let k = rng.gen_range(1..lattice);
                if !picks.contains(&k) {
                    picks.push(k);
                }
            }
            picks.sort_unstable();
            let mut e = vec![side.lo().clone()];
            e.extend(picks.into_iter().map(|k| side.lo().clone() + side.length() * ratio(k, lattice)));
            e.push(side.hi().clone());
            e
        })
        .collect();
    let w = w.unwrap_or_else(|| vec![int(1); count]);
    GridDensity::new(domain, edges, f, w).unwrap()
}

/// A level `A >= mean(I_0)`: the mean itself, the essential maximum, or a
/// random point in between.
pub fn random_level(rng: &mut ChaCha8Rng, density: &GridDensity<Exact>) -> Exact {
    let table = CumulativeTable::build(density);
    let mean = table.mean(density.domain()).unwrap().expect("positive total measure");
    let top = density.essential_sup_f(density.domain()).unwrap_or_else(|| mean.clone());
    match rng.gen_range(0..10) {
        0 => mean,
        1 => top.max(mean),
        _ => {
            let q = rng.gen_range(1..=8);
            let p = rng.gen_range(0..=q);
            let span = if top > mean { top - mean.clone() } else { int(0) };
            mean + span * ratio(p, q)
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
