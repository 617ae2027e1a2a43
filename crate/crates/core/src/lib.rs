//! Exact rising-sun decompositions of piecewise-constant densities.
//!
//! Given `f` and an absolutely continuous measure `dμ = w·dx` on a rectangle
//! `I_0`, and a level `A` at least the mean of `f`, the rectangle division
//! process finds pairwise disjoint rectangles on which the mean of `f` is
//! exactly `A`, with `f <= A` μ-almost everywhere outside them. The dyadic
//! Calderón-Zygmund decomposition is provided as a baseline, and [`verify`]
//! rechecks every conclusion from scratch.
//!
//! ```
//! use rising_sun::decompose::{rising_sun_decompose, Level, StoppingPolicy};
//! use rising_sun::{fixtures, scalar::ratio};
//!
//! let density = fixtures::counterexample();
//! let dec = rising_sun_decompose(&density, &Level::new(ratio(7, 8)), &StoppingPolicy::max_depth(16)).unwrap();
//! assert_eq!(dec.selected[0].rect.to_string(), "[0,2/3)x[0,1)");
//! assert_eq!(dec.selected[1].rect.to_string(), "[2/3,1)x[0,4/7)");
//! ```

pub mod decompose;
pub mod density;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod verify;

pub use decompose::{Decomposition, Level, StoppingPolicy};
pub use density::{CumulativeTable, GridDensity};
pub use error::{DecomposeError, DensityError, GeometryError, ParseError};
pub use geometry::{Interval, Rect, Relation, Side};
pub use scalar::{Exact, Scalar};
