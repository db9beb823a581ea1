//! Dipole-dipole interactions mediated by the zero-energy bound state of a
//! chiral lattice.
//!
//! The closed form sums residues of `z^{x - x_c} / f(z)` over the zeros of the
//! characteristic polynomial, with `x_c = 1 - P`. Zeros inside the unit circle
//! build the profile for `x >= x_c`; zeros outside build it for `x < x_c`.
//! A zero of multiplicity `n` yields a polynomial prefactor of degree `n - 1`,
//! which is the power-law-exponential (PLE) form.

mod kernel;
mod profile;
mod twod;
mod zeros;

pub use kernel::{kernel_eval, profile_fidelity, ExpTerm, Kernel};
pub use profile::{analytic_profile, contour_profile, InteractionProfile, ProfileTerm, Side};
pub use twod::{profile_2d, Profile2d};
pub use zeros::{find_zeros, Location, ZeroCluster, ZeroSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::HoppingModel;

/// `(P + W, Q - W)`: bounds on the right and left polynomial degree plus one.
pub fn exponent_bounds(model: &HoppingModel) -> Result<(usize, usize)> {
    let w = model.winding_number()?;
    let p = model.p() as i32;
    let q = model.q() as i32;
    Ok(((p + w) as usize, (q - w) as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PleCheck {
    pub is_ple: bool,
    pub gapped: bool,
}

/// PLE condition `4 t_{+1} t_{-1} = t0^2` for the three-term model.
pub fn check_ple_minimal(t0: f64, t_minus1: f64, t_plus1: f64) -> PleCheck {
    let is_ple = (4.0 * t_plus1 * t_minus1 - t0 * t0).abs() <= 1e-12 * (t0 * t0).max(1.0);
    let gapped = HoppingModel::sigma_z_real(&[(0, t0), (-1, t_minus1), (1, t_plus1)])
        .map(|m| m.is_gapped())
        .unwrap_or(false);
    PleCheck { is_ple, gapped }
}

/// `ξ = -1 / ln(1 - (Δg/2)^{1/ν})`.
pub fn xi_from_gap(gap: f64, nu: u32) -> Result<f64> {
    if !(gap > 0.0 && gap < 2.0) {
        return Err(Error::InvalidArgument(format!("gap {gap} outside (0, 2)")));
    }
    if nu == 0 {
        return Err(Error::InvalidArgument("nu must be positive".into()));
    }
    let z = 1.0 - (gap / 2.0).powf(1.0 / nu as f64);
    Ok(-1.0 / z.ln())
}
