pub mod copula;
pub mod error;
pub mod gof;
pub mod gridfn;
pub mod hypi;
pub mod regress;
pub mod resample;
pub mod stats;
pub mod taildep;

pub use error::{Error, Result};

// Guide chapters, compiled and run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypi.md")]
    mod hypi {}
    #[doc = include_str!("../../../book/src/copula.md")]
    mod copula {}
    #[doc = include_str!("../../../book/src/resample.md")]
    mod resample {}
    #[doc = include_str!("../../../book/src/taildep.md")]
    mod taildep {}
    #[doc = include_str!("../../../book/src/regression.md")]
    mod regression {}
}
