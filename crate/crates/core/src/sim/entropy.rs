//! Relative entropy plus field energy,
//! `\iint F log(F/mu) dv dx + (1/2) \int E^2 dx` with `F = mu + h`.

use std::f64::consts::PI;

use super::fields::{density, efield, field_energy};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::state::SpectralState;
use crate::transform::{inverse_transform, trapezoid_weights};

/// `mu(v) = (2 pi)^{-3/2} e^{-v^2/2}`, normalised to unit mass on the torus.
pub fn maxwellian(v: f64) -> f64 {
    (2.0 * PI).powf(-1.5) * (-0.5 * v * v).exp()
}

/// Energy–entropy on the physical grid of the state. The integrand is
/// written as `F log(F/mu) - h`, which is pointwise non-negative and has the
/// same integral because `h` has zero mass.
pub fn entropy_energy(state: &SpectralState) -> Result<f64> {
    let grid = &state.grid;
    let h = inverse_transform(state);
    let dx = 2.0 * PI / grid.nx as f64;
    let wv = trapezoid_weights(grid.nv, grid.d_v());
    let mut rows = Vec::with_capacity(grid.nx);
    for i in 0..grid.nx {
        let mut terms = Vec::with_capacity(grid.nv);
        for (j, w) in wv.iter().enumerate() {
            let v = grid.v(j);
            let mu = maxwellian(v);
            let hv = h.at(i, j);
            let f = mu + hv;
            if !(f > 0.0) {
                return Err(Error::Positivity { x: grid.x(i), v });
            }
            let r = hv / mu;
            // F log(F/mu) - h = mu ((1+r) log1p(r) - r), evaluated stably.
            let g = if r.abs() < 1e-4 {
                mu * r * r * (0.5 - r / 6.0 + r * r / 12.0)
            } else {
                mu * ((1.0 + r) * r.ln_1p() - r)
            };
            terms.push(g * w);
        }
        rows.push(pairwise_sum(&terms) * dx);
    }
    let entropy = pairwise_sum(&rows);
    let e = efield(&density(state), grid.kmax);
    Ok(entropy + field_energy(&e))
}
