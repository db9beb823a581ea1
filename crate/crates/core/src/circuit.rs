//! LC-resonator array element values to lattice hopping strengths.
//!
//! Site A of cell `j + m` and site B of cell `j` are joined by a capacitance
//! (and, for `m = 0, -1`, a mutual inductance). In the weak-coupling limit the
//! array is a two-band chiral lattice with
//! `t_m = (ω0/2)(C_m/C_t + M_m/L_f)` and `ω0 = 1/√(L_f C_t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::HoppingModel;

/// Ratio above which a weak-coupling assumption is reported as doubtful.
pub const WEAK_COUPLING_RATIO: f64 = 0.3;

/// Element values in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    #[serde(rename = "c_f_farad")]
    pub c_f: f64,
    #[serde(rename = "c_0_farad", default)]
    pub c_0: f64,
    /// `C_{-m}` for `m = 1..=P`.
    #[serde(rename = "c_minus_farad", default)]
    pub c_minus: Vec<f64>,
    /// `C_{+n}` for `n = 1..=Q`.
    #[serde(rename = "c_plus_farad", default)]
    pub c_plus: Vec<f64>,
    #[serde(rename = "m_0_henry", default)]
    pub m_0: f64,
    #[serde(rename = "m_minus1_henry", default)]
    pub m_minus1: f64,
    #[serde(rename = "l_f_henry")]
    pub l_f: f64,
}

impl CircuitParams {
    /// 253 fF, 46 fF, 41 fF, 13 fF, -1 pH, -1 pH, 1.9 nH.
    pub fn reference() -> Self {
        Self {
            c_f: 253e-15,
            c_0: 46e-15,
            c_minus: vec![41e-15],
            c_plus: vec![13e-15],
            m_0: -1e-12,
            m_minus1: -1e-12,
            l_f: 1.9e-9,
        }
    }

    pub fn total_capacitance(&self) -> f64 {
        self.c_f + self.coupling_capacitance()
    }

    fn coupling_capacitance(&self) -> f64 {
        self.c_0 + self.c_minus.iter().sum::<f64>() + self.c_plus.iter().sum::<f64>()
    }

    pub fn capacitance_ratio(&self) -> f64 {
        self.coupling_capacitance() / self.c_f
    }

    pub fn inductance_ratio(&self) -> f64 {
        (self.m_0.abs() + self.m_minus1.abs()) / self.l_f
    }

    fn validate(&self) -> Result<()> {
        if !(self.c_f > 0.0 && self.c_f.is_finite()) {
            return Err(Error::InvalidArgument(format!("C_f must be positive, got {}", self.c_f)));
        }
        if !(self.l_f > 0.0 && self.l_f.is_finite()) {
            return Err(Error::InvalidArgument(format!("L_f must be positive, got {}", self.l_f)));
        }
        let all = [self.c_0, self.m_0, self.m_minus1].into_iter().chain(self.c_minus.iter().copied()).chain(self.c_plus.iter().copied());
        for v in all {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("non-finite element value".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitHoppings {
    #[serde(rename = "c_t_farad")]
    pub c_t: f64,
    /// `ω0/2π`.
    pub omega0_hz: f64,
    /// `(m, t_m/2π)` in MHz, sorted by `m`.
    pub hoppings_mhz: Vec<(i32, f64)>,
    /// Same hoppings in units of `t_0`; absent when `t_0 = 0`.
    pub model: Option<HoppingModel>,
    pub warnings: Vec<String>,
}

impl CircuitHoppings {
    pub fn t_mhz(&self, m: i32) -> f64 {
        self.hoppings_mhz.iter().find(|h| h.0 == m).map_or(0.0, |h| h.1)
    }
}

pub fn hoppings_from_circuit(p: &CircuitParams) -> Result<CircuitHoppings> {
    p.validate()?;
    let c_t = p.total_capacitance();
    let omega0 = 1.0 / (p.l_f * c_t).sqrt();
    // ordinary frequency, MHz
    let half = omega0 / (2.0 * PI) / 2.0 * 1e-6;
    let mut hop = vec![(0, half * (p.c_0 / c_t + p.m_0 / p.l_f))];
    for (i, &c) in p.c_minus.iter().enumerate() {
        let m = -(i as i32 + 1);
        let mutual = if m == -1 { p.m_minus1 / p.l_f } else { 0.0 };
        hop.push((m, half * (c / c_t + mutual)));
    }
    if p.c_minus.is_empty() && p.m_minus1 != 0.0 {
        hop.push((-1, half * p.m_minus1 / p.l_f));
    }
    for (i, &c) in p.c_plus.iter().enumerate() {
        hop.push((i as i32 + 1, half * c / c_t));
    }
    hop.sort_by_key(|h| h.0);

    let mut warnings = Vec::new();
    if p.capacitance_ratio() > WEAK_COUPLING_RATIO {
        warnings.push(format!(
            "coupling capacitances are {:.3} of C_f; weak-coupling approximation is doubtful",
            p.capacitance_ratio()
        ));
    }
    if p.inductance_ratio() > WEAK_COUPLING_RATIO {
        warnings.push(format!(
            "mutual inductances are {:.3} of L_f; weak-coupling approximation is doubtful",
            p.inductance_ratio()
        ));
    }

    let t0 = hop.iter().find(|h| h.0 == 0).map_or(0.0, |h| h.1);
    let model = if t0 != 0.0 {
        let scaled: Vec<(i32, f64)> = hop.iter().filter(|h| h.1 != 0.0).map(|&(m, t)| (m, t / t0)).collect();
        Some(HoppingModel::sigma_z_real(&scaled)?)
    } else {
        None
    };
    Ok(CircuitHoppings { c_t, omega0_hz: omega0 / (2.0 * PI), hoppings_mhz: hop, model, warnings })
}
