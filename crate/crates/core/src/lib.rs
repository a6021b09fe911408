//! Numerical kernel for bilateral grand Lebesgue spaces `G(ψ; a,b)` over
//! weighted product domains: norms, fundamental functions, dilation and
//! matrix-dilation norms, Boyd and Shimogaki indices, and the boundedness
//! criteria for Hardy-type operators.
//!
//! The crate is `no_std` with `alloc`. Quantities that overflow `f64` for
//! large exponents are carried as natural logarithms.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod criteria;
pub mod dilation;
pub mod domain;
pub mod error;
pub mod function;
pub mod indices;
pub mod math;
pub mod psi;
pub mod quad;
pub mod search;
pub mod space;

pub use domain::{BlockSpec, DefectConstants, WeightProfile, WeightedDomain};
pub use error::{Error, Result};
pub use function::{Factor, LpResult, NumericFactor, Piece, PiecewisePowerFactor, ProductFunction};
pub use psi::{Interval, PsiFunction};
pub use search::{ArgMax, SupOverP};
pub use space::GrandSpace;
