//! Ground-state observables shared by exact diagonalization and DMRG.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Sites dropped at each end of the entropy fit.
pub const ENTROPY_EDGE: usize = 4;
/// Drop of `c` below 1 that marks an XY-to-gapped boundary.
pub const C_DROP: f64 = 0.04;

/// Allowed momenta `2πn/N`, `n = 0..N-1`.
pub fn momenta(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `S_xy(q) = (1/N) Σ_{m,n} e^{iq(m-n)} ⟨S⁺_m S⁻_n⟩` on the allowed momenta.
pub fn structure_factor(spm: &DMatrix<f64>) -> Vec<f64> {
    let n = spm.nrows();
    momenta(n)
        .into_iter()
        .map(|q| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += (q * (a as f64 - b as f64)).cos() * spm[(a, b)];
                }
            }
            s / n as f64
        })
        .collect()
}

/// Peak of `S_xy` restricted to `q ∈ [0, π]`; ties go to the smaller `q`.
pub fn peak_momentum(sxy: &[f64]) -> f64 {
    let n = sxy.len();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (k, &v) in sxy.iter().enumerate().take(n / 2 + 1) {
        if v > best.1 + 1e-12 {
            best = (k, v);
        }
    }
    2.0 * PI * best.0 as f64 / n as f64
}

/// `-Σ p ln p` with `p = s²`.
pub fn entropy_from_singular(sv: impl IntoIterator<Item = f64>) -> f64 {
    sv.into_iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralChargeFit {
    pub c: f64,
    pub g: f64,
    /// Amplitude of the `(-1)^{N_A}` term; zero when not fitted.
    pub f: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit of `S(N_A) = (c/6) ln((2N/π) sin(π N_A/N)) + g [+ F (-1)^{N_A}]`.
///
/// `profile[k]` is `S(N_A = k + 1)`. Cuts within `ENTROPY_EDGE` sites of either
/// end are excluded.
pub fn fit_central_charge(profile: &[f64], n: usize, oscillating: bool) -> Result<CentralChargeFit> {
    if profile.len() + 1 != n {
        return Err(Error::InvalidArgument(format!("profile length {} for N = {n}", profile.len())));
    }
    let cuts: Vec<usize> = (ENTROPY_EDGE + 1..n.saturating_sub(ENTROPY_EDGE)).collect();
    if cuts.len() < 6 {
        return Err(Error::TooFewPoints(cuts.len()));
    }
    let cols = if oscillating { 3 } else { 2 };
    let a = DMatrix::from_fn(cuts.len(), cols, |i, j| {
        let na = cuts[i];
        match j {
            0 => ((2.0 * n as f64 / PI) * (PI * na as f64 / n as f64).sin()).ln() / 6.0,
            1 => 1.0,
            _ => if na.is_multiple_of(2) { 1.0 } else { -1.0 },
        }
    });
    let y = DVector::from_iterator(cuts.len(), cuts.iter().map(|&na| profile[na - 1]));
    let sol = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidArgument("entropy fit did not converge".into()))?
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.into()))?;
    let r = &a * &sol - &y;
    Ok(CentralChargeFit {
        c: sol[0],
        g: sol[1],
        f: if oscillating { sol[2] } else { 0.0 },
        residual: (r.norm_squared() / cuts.len() as f64).sqrt(),
        points: cuts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaFit {
    pub eta: f64,
    /// RMS residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Power-law fit `|⟨S⁺_{i0} S⁻_{i0+r}⟩| ∝ r^{-η}` with `i0 = N/4` (1-based)
/// and `r ∈ [2, N/2]`.
///
/// An oscillating correlator (three or more interior local maxima of the
/// modulus) is fitted on its maxima, i.e. on the envelope.
pub fn fit_eta(spm: &DMatrix<f64>) -> Result<EtaFit> {
    let n = spm.nrows();
    let i0 = (n / 4).max(1) - 1;
    let all: Vec<(f64, f64)> = (2..=n / 2)
        .filter(|&r| i0 + r < n)
        .map(|r| (r as f64, spm[(i0, i0 + r)].abs()))
        .collect();
    let peaks: Vec<(f64, f64)> = all
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect();
    let chosen = if peaks.len() >= 3 { peaks } else { all };
    let pts: Vec<(f64, f64)> = chosen
        .into_iter()
        .filter(|p| p.1 > 0.0)
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let res = pts.iter().map(|p| (my + slope * (p.0 - mx) - p.1).powi(2)).sum::<f64>() / m;
    Ok(EtaFit { eta: -slope, residual: res.sqrt(), points: pts.len() })
}

/// `|⟨S_i·S_{i+1}⟩ - ⟨S_{i+1}·S_{i+2}⟩|` at `i = N/2` (1-based).
pub fn dimerization(ss: &DMatrix<f64>) -> f64 {
    let n = ss.nrows();
    if n < 3 {
        return 0.0;
    }
    let i = (n / 2 - 1).min(n - 3);
    (ss[(i, i + 1)] - ss[(i + 1, i + 2)]).abs()
}

fn first_crossing(points: &[(f64, f64)], pred: impl Fn(f64) -> bool, level: f64) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        if !pred(p0.1) && pred(p1.1) {
            let t = (level - p0.1) / (p1.1 - p0.1);
            return Some(p0.0 + t * (p1.0 - p0.0));
        }
    }
    None
}

/// First parameter where `c` falls below `1 - drop`, linearly interpolated.
pub fn detect_c_drop(points: &[(f64, f64)], drop: f64) -> Option<f64> {
    let level = 1.0 - drop;
    first_crossing(points, |c| c < level, level)
}

/// First parameter where `c` rises above `1 + rise`, linearly interpolated.
pub fn detect_c_rise(points: &[(f64, f64)], rise: f64) -> Option<f64> {
    let level = 1.0 + rise;
    first_crossing(points, |c| c > level, level)
}

/// First parameter whose `S_xy` peak leaves `q = π`.
pub fn detect_peak_departure(points: &[(f64, f64)]) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted.iter().find(|p| (p.1 - PI).abs() > 1e-9).map(|p| p.0)
}

/// Observables of one ground state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub n: usize,
    /// `⟨S_i·S_j⟩`.
    pub ss: DMatrix<f64>,
    /// `⟨S⁺_i S⁻_j⟩`.
    pub spm: DMatrix<f64>,
    pub sxy: Vec<f64>,
    pub q_peak: f64,
    /// `S(N_A)` for `N_A = 1..N-1`.
    pub entropy: Vec<f64>,
    pub central_charge: Option<CentralChargeFit>,
    pub dimerization: f64,
    pub eta: Option<EtaFit>,
}

impl Observables {
    pub fn from_parts(ss: DMatrix<f64>, spm: DMatrix<f64>, entropy: Vec<f64>, oscillating: bool) -> Self {
        let n = ss.nrows();
        let sxy = structure_factor(&spm);
        Self {
            n,
            q_peak: peak_momentum(&sxy),
            central_charge: fit_central_charge(&entropy, n, oscillating).ok(),
            dimerization: dimerization(&ss),
            eta: fit_eta(&spm).ok(),
            ss,
            spm,
            sxy,
            entropy,
        }
    }

    /// Period implied by the structure-factor peak; `None` at `q = 0`.
    pub fn period(&self) -> Option<f64> {
        (self.q_peak > 0.0).then(|| 2.0 * PI / self.q_peak)
    }

    /// Largest entrywise difference over all observables.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let m = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).abs().max();
        let v = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        m(&self.ss, &other.ss)
            .max(m(&self.spm, &other.spm))
            .max(v(&self.sxy, &other.sxy))
            .max(v(&self.entropy, &other.entropy))
            .max((self.dimerization - other.dimerization).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(n: usize, c: f64, g: f64, f: f64) -> Vec<f64> {
        (1..n)
            .map(|na| {
                let s = (2.0 * n as f64 / PI * (PI * na as f64 / n as f64).sin()).ln();
                c / 6.0 * s + g + f * if na % 2 == 0 { 1.0 } else { -1.0 }
            })
            .collect()
    }

    #[test]
    fn central_charge_self_consistency() {
        let fit = fit_central_charge(&synthetic(64, 1.0, 0.7, 0.0), 64, false).unwrap();
        assert_relative_eq!(fit.c, 1.0, epsilon = 1e-6);
        assert_relative_eq!(fit.g, 0.7, epsilon = 1e-6);
    }

    #[test]
    fn central_charge_with_oscillation() {
        let fit = fit_central_charge(&synthetic(64, 1.0, 0.7, 0.05), 64, true).unwrap();
        assert!((fit.c - 1.0).abs() < 0.01);
        assert_relative_eq!(fit.f, 0.05, epsilon = 1e-8);
    }

    #[test]
    fn central_charge_too_few_points() {
        assert!(matches!(fit_central_charge(&[0.0; 13], 14, true), Err(Error::TooFewPoints(5))));
    }

    #[test]
    fn ferromagnet_structure_factor_is_flat() {
        let spm = DMatrix::<f64>::identity(8, 8);
        for v in structure_factor(&spm) {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eta_of_power_law() {
        let n = 40;
        let spm = DMatrix::from_fn(n, n, |i, j| if i == j { 0.5 } else { 0.3 * (i.abs_diff(j) as f64).powf(-0.25) });
        let fit = fit_eta(&spm).unwrap();
        assert_relative_eq!(fit.eta, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn eta_of_oscillating_power_law() {
        let n = 64;
        let q = 0.42;
        let spm = DMatrix::from_fn(n, n, |i, j| {
            let r = i.abs_diff(j) as f64;
            if i == j { 0.5 } else { 0.3 * (q * r).cos() * r.powf(-0.2) }
        });
        let fit = fit_eta(&spm).unwrap();
        assert!((fit.eta - 0.2).abs() < 0.02, "{}", fit.eta);
        assert!(fit.points >= 3);
    }

    #[test]
    fn detectors() {
        let pts = [(0.1, 1.0), (0.2, 0.99), (0.3, 0.9), (0.4, 0.5)];
        let x = detect_c_drop(&pts, C_DROP).unwrap();
        assert!(x > 0.2 && x < 0.3);
        assert!(detect_c_rise(&pts, 0.02).is_none());
        let q = [(0.5, PI), (1.0, PI), (2.0, 2.9)];
        assert_eq!(detect_peak_departure(&q), Some(2.0));
    }

    #[test]
    fn entropy_of_singlet_cut() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(entropy_from_singular([s, s]), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(entropy_from_singular([1.0]), 0.0);
    }
}
