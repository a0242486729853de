//! Spectral solvers and analysis tools for the Vlasov–Poisson–Fokker–Planck
//! system linearised around a Maxwellian on the one-dimensional torus.

pub mod constants;
pub mod echo;
pub mod error;
pub mod fit;
pub mod gevrey;
pub mod grid;
pub mod io;
pub mod linear_flow;
pub mod linear_theory;
pub mod norm;
pub mod numeric;
pub mod sim;
pub mod state;
pub mod transform;

pub use error::{Error, Result};
pub use grid::Grid;
pub use state::SpectralState;
