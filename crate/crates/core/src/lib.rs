pub mod asymptotics;
pub mod error;
pub mod galerkin;
pub mod io;
pub mod potential;
pub mod prufer;
pub mod sensitivity;
pub mod sequence;
pub mod spectrum;

mod chebyshev;
mod moments;
mod ode;
mod roots;

pub use error::{Error, Result};
pub use ode::Tolerance;
pub use potential::{PotentialKind, PotentialSpec};
pub use spectrum::{BoundaryCondition, Method, SpectralProblem, Spectrum};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/remainders.md")]
    mod remainders {}
    #[doc = include_str!("../../../book/src/expansions.md")]
    mod expansions {}
    #[doc = include_str!("../../../book/src/sensitivity.md")]
    mod sensitivity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
}
