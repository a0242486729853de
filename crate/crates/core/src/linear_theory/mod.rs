//! Linear density dynamics: kernel, Laplace transform, Penrose margin,
//! dispersion roots, resolvent and Volterra solvers.

pub mod dispersion;
pub mod filon;
pub mod forcing;
pub mod kernel;
pub mod laplace;
pub mod penrose;
pub mod resolvent;
pub mod volterra;

pub use dispersion::{dispersion_roots, RootSearch};
pub use forcing::volterra_forcing_from_history;
pub use kernel::{kernel_k, mu_hat, KernelTable};
pub use laplace::{admissible_abscissa, laplace_k, laplace_k_derivative, LaplaceEvaluator};
pub use penrose::{penrose_margin, PenroseReport, PenroseScan};
pub use resolvent::{convolve, identity_residual, resolvent, resolvent_with, ResolventOptions};
pub use volterra::{solve_volterra, solve_with_resolvent, volterra_residual};
