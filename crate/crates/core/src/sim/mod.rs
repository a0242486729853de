//! Pseudo-spectral integration of the perturbation equation.

pub mod bootstrap;
pub mod config;
pub mod entropy;
pub mod fields;
pub mod run;
pub mod stepper;

pub use bootstrap::{bootstrap_functionals, energy_functionals, monitor_ratio, shell_norm, BootstrapMonitor, BootstrapRecord};
pub use config::{GaussianBump, InitialData, MonitorConfig, SimConfig};
pub use entropy::{entropy_energy, maxwellian};
pub use fields::{density, efield, field_energy, DensityTrace};
pub use run::{run, run_from, Diagnostic, RunOutput};
pub use stepper::{field_rhs, nonlinear_rhs, step, StepReport, Stepper};
