//! Named experiments. Each reads its parameters, rejects unknown keys, then
//! computes and writes its artifacts.

mod echo;
mod linear;
mod nonlinear;

use std::path::PathBuf;

use clap::ValueEnum;
use vpfp_core::io::LinePlot;
use vpfp_core::sim::DensityTrace;
use vpfp_core::Grid;

use crate::params::Params;
use crate::report::{Artifacts, CliError, Context, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Penrose,
    Dispersion,
    LinearRun,
    Sim,
    Echo,
    EdScaling,
    ThresholdSweep,
    KernelScaling,
    VolterraXcheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Penrose => "penrose",
            Experiment::Dispersion => "dispersion",
            Experiment::LinearRun => "linear-run",
            Experiment::Sim => "sim",
            Experiment::Echo => "echo",
            Experiment::EdScaling => "ed-scaling",
            Experiment::ThresholdSweep => "threshold-sweep",
            Experiment::KernelScaling => "kernel-scaling",
            Experiment::VolterraXcheck => "volterra-xcheck",
        }
    }
}

pub struct Setup {
    pub experiment: Experiment,
    pub params: Params,
    pub out: PathBuf,
}

impl Setup {
    /// Validates the parameter set and opens the output directory; call
    /// after every parameter has been read.
    fn start(&self) -> Result<Artifacts, CliError> {
        self.params.finish()?;
        Artifacts::new(&self.out)
    }

    fn finish(&self, art: Artifacts, results: serde_json::Value) -> Result<Summary, CliError> {
        art.finish(self.experiment.name(), self.params.resolved(), results)
    }
}

pub fn run(setup: Setup) -> Result<Summary, CliError> {
    // Accepted everywhere; no shipped experiment samples randomly, so the
    // value is only recorded.
    setup.params.get("seed", 0u64)?;
    match setup.experiment {
        Experiment::Penrose => linear::penrose(setup),
        Experiment::Dispersion => linear::dispersion(setup),
        Experiment::LinearRun => linear::linear_run(setup),
        Experiment::VolterraXcheck => linear::volterra_xcheck(setup),
        Experiment::EdScaling => linear::ed_scaling(setup),
        Experiment::Sim => nonlinear::sim(setup),
        Experiment::ThresholdSweep => nonlinear::threshold_sweep(setup),
        Experiment::Echo => echo::echo(setup),
        Experiment::KernelScaling => echo::kernel_scaling(setup),
    }
}

/// `grid.kmax`, `grid.d_eta`, `grid.eta_max` plus the optional velocity
/// window `grid.v_max` and `grid.nv`.
fn grid_from(p: &Params, kmax: i64, d_eta: f64, eta_max: f64) -> Result<Grid, CliError> {
    let mut g = Grid::with_spacing(p.get("grid.kmax", kmax)?, p.get("grid.d_eta", d_eta)?, p.get("grid.eta_max", eta_max)?)
        .ctx("grid")?;
    if let Some(v) = p.get_opt("grid.v_max")? {
        g.v_max = v;
    }
    if let Some(n) = p.get_opt("grid.nv")? {
        g.nv = n;
    }
    g.validate().ctx("grid")?;
    Ok(g)
}

/// `|rho_hat(t,k)|` for every positive mode on a logarithmic axis.
fn rho_plot(title: &str, trace: &DensityTrace) -> LinePlot {
    let mut plot = LinePlot::new(title, "t", "|rho_hat(t,k)|").log_y();
    for k in 1..=trace.kmax {
        let pts = trace
            .times
            .iter()
            .zip(trace.abs_series(k))
            .filter(|(_, v)| *v > 0.0)
            .map(|(t, v)| (*t, v))
            .collect();
        plot = plot.with_series(&format!("k = {k}"), pts);
    }
    plot
}
