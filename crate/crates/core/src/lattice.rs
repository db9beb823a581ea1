//! Two-band chiral Bloch Hamiltonians.
//!
//! A `SigmaZ` model is `H(k) = [[0, h(k)], [h(k)*, 0]]` with
//! `h(k) = Σ_m t_m e^{imk}`, where `t_m` couples sublattice A of cell `j` to
//! sublattice B of cell `j + m`. A `SigmaX` model is
//! `H(k) = d_y(k) σ_y + d_z(k) σ_z` with `d_y = t'1 sin k` and
//! `d_z = t'0 cos k + m0`; it is stored together with its rotated `SigmaZ`
//! form `h_rot(k) = -d_z(k) - i d_y(k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::C64;

/// Relative threshold below which `min_k |h(k)|` counts as a closed gap.
pub const GAPLESS_REL: f64 = 1e-9;
/// Coarse grid used before golden-section refinement of the gap.
pub const GAP_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiralClass {
    SigmaZ,
    SigmaX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaXParams {
    pub tp0: f64,
    pub tp1: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoppingModel {
    pub class: ChiralClass,
    /// `(offset, amplitude)` of the `SigmaZ` form (rotated form for `SigmaX`).
    pub terms: Vec<(i32, C64)>,
    pub sigma_x: Option<SigmaXParams>,
}

/// `h(z) = f(z) / z^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub f: Poly,
    pub p: usize,
    pub q: usize,
    pub class: ChiralClass,
}

pub type Block = [[C64; 2]; 2];

impl HoppingModel {
    pub fn sigma_z(terms: Vec<(i32, C64)>) -> Result<Self> {
        let m = Self {
            class: ChiralClass::SigmaZ,
            terms: merge_terms(terms),
            sigma_x: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Real amplitudes, `(offset, t_m)`.
    pub fn sigma_z_real(terms: &[(i32, f64)]) -> Result<Self> {
        Self::sigma_z(terms.iter().map(|&(m, t)| (m, C64::new(t, 0.0))).collect())
    }

    pub fn sigma_x(p: SigmaXParams) -> Result<Self> {
        let m = Self {
            class: ChiralClass::SigmaX,
            terms: rotated_terms(&p),
            sigma_x: Some(p),
        };
        m.validate()?;
        Ok(m)
    }

    /// `h(k) = (e^{ik} + s)^2 / e^{ik}` with `s = sqrt(6/19)`.
    pub fn fig8() -> Self {
        Self::squared_family((6.0f64 / 19.0).sqrt())
    }

    /// `h(k) = (e^{ik} + s)^2 / e^{ik}`: double zero at `-s`, gap `2 (1 - s)^2`.
    pub fn squared_family(s: f64) -> Self {
        Self::sigma_z_real(&[(1, 1.0), (0, 2.0 * s), (-1, s * s)]).expect("valid")
    }

    /// `h(k) = (e^{ik} - 3/5)^4 / e^{3ik}`.
    pub fn fig5() -> Self {
        let a = -0.6f64;
        let terms: Vec<(i32, f64)> = (0..=4)
            .map(|j| {
                let c = crate::poly::binom(4, j) * a.powi(4 - j as i32);
                (j as i32 - 3, c)
            })
            .collect();
        Self::sigma_z_real(&terms).expect("valid")
    }

    fn validate(&self) -> Result<()> {
        if self.terms.iter().all(|(_, t)| t.norm() == 0.0) {
            return Err(Error::InvalidModel("all hopping amplitudes are zero".into()));
        }
        Ok(())
    }

    fn nonzero(&self) -> impl Iterator<Item = &(i32, C64)> {
        self.terms.iter().filter(|(_, t)| t.norm() != 0.0)
    }

    /// `P = max(0, -min offset)`.
    pub fn p(&self) -> usize {
        let m = self.nonzero().map(|t| t.0).min().unwrap_or(0);
        (-m).max(0) as usize
    }

    /// `Q = max(0, max offset)`.
    pub fn q(&self) -> usize {
        let m = self.nonzero().map(|t| t.0).max().unwrap_or(0);
        m.max(0) as usize
    }

    pub fn amplitude(&self, m: i32) -> C64 {
        self.terms
            .iter()
            .filter(|t| t.0 == m)
            .map(|t| t.1)
            .sum()
    }

    pub fn max_abs_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).fold(0.0, f64::max)
    }

    /// `h(k)` of the `SigmaZ` (or rotated) form.
    pub fn bloch_h(&self, k: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(m, t)| t * C64::from_polar(1.0, m as f64 * k))
            .sum()
    }

    /// Full 2x2 Bloch matrix in the model's own basis.
    pub fn bloch_matrix(&self, k: f64) -> Block {
        let z = C64::new(0.0, 0.0);
        match (self.class, self.sigma_x) {
            (ChiralClass::SigmaX, Some(p)) => {
                let dy = p.tp1 * k.sin();
                let dz = p.tp0 * k.cos() + p.m0;
                [
                    [C64::new(dz, 0.0), C64::new(0.0, -dy)],
                    [C64::new(0.0, dy), C64::new(-dz, 0.0)],
                ]
            }
            _ => {
                let h = self.bloch_h(k);
                [[z, h], [h.conj(), z]]
            }
        }
    }

    /// Real-space blocks `H_m` with `<j,α|H|j+m,β> = (H_m)_{αβ}`, for all
    /// offsets `m` with a nonzero block.
    pub fn real_space_blocks(&self) -> Vec<(i32, Block)> {
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        match (self.class, self.sigma_x) {
            (ChiralClass::SigmaX, Some(p)) => {
                let a = p.tp0 / 2.0;
                let b = p.tp1 / 2.0;
                vec![
                    (-1, [[r(a), r(b)], [r(-b), r(-a)]]),
                    (0, [[r(p.m0), z], [z, r(-p.m0)]]),
                    (1, [[r(a), r(-b)], [r(b), r(-a)]]),
                ]
            }
            _ => {
                let mut offs: Vec<i32> = self
                    .nonzero()
                    .flat_map(|t| [t.0, -t.0])
                    .collect();
                offs.sort_unstable();
                offs.dedup();
                offs.into_iter()
                    .map(|m| (m, [[z, self.amplitude(m)], [self.amplitude(-m).conj(), z]]))
                    .collect()
            }
        }
    }

    /// `f(z) = Σ_m t_m z^{m+P}`.
    pub fn char_poly(&self) -> Result<CharPoly> {
        self.validate()?;
        let p = self.p();
        let q = self.q();
        let mut c = vec![C64::new(0.0, 0.0); p + q + 1];
        for &(m, t) in self.nonzero() {
            c[(m + p as i32) as usize] += t;
        }
        while c.len() > 1 && c.last().map(|x| x.norm() == 0.0).unwrap_or(false) {
            c.pop();
        }
        Ok(CharPoly {
            f: Poly::new(c),
            p,
            q,
            class: self.class,
        })
    }

    /// The `SigmaZ` form of this model; identity for `SigmaZ` models.
    pub fn rotate_to_sigma_z(&self) -> HoppingModel {
        HoppingModel {
            class: ChiralClass::SigmaZ,
            terms: self.terms.clone(),
            sigma_x: None,
        }
    }

    /// Coarse grid minimum of `|h(k)|` refined by golden-section search.
    pub fn min_abs_h(&self) -> (f64, f64) {
        let g = |k: f64| self.bloch_h(k).norm();
        let dk = 2.0 * std::f64::consts::PI / GAP_GRID as f64;
        let vals: Vec<f64> = (0..GAP_GRID)
            .map(|i| g(-std::f64::consts::PI + (i as f64 + 1.0) * dk))
            .collect();
        let mut order: Vec<usize> = (0..GAP_GRID).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut best = (vals[order[0]], -std::f64::consts::PI + (order[0] as f64 + 1.0) * dk);
        for &i in order.iter().take(4) {
            let c = -std::f64::consts::PI + (i as f64 + 1.0) * dk;
            let (k, v) = golden_min(&g, c - dk, c + dk, 1e-13);
            if v < best.0 {
                best = (v, k);
            }
        }
        best
    }

    pub fn is_gapped(&self) -> bool {
        self.min_abs_h().0 >= GAPLESS_REL * self.max_abs_amplitude()
    }

    /// Full gap `2 min_k |h(k)|`.
    pub fn band_gap(&self) -> f64 {
        2.0 * self.min_abs_h().0
    }

    /// `W = (#zeros of f inside the unit circle) - P`.
    pub fn winding_number(&self) -> Result<i32> {
        let (mn, _) = self.min_abs_h();
        if mn < GAPLESS_REL * self.max_abs_amplitude() {
            return Err(Error::GapClosed(mn));
        }
        let cp = self.char_poly()?;
        let inside = cp.f.roots().iter().filter(|z| z.norm() < 1.0).count() as i32;
        Ok(inside - cp.p as i32)
    }

    /// Winding from the accumulated phase of `h(k)` on `n` grid points.
    pub fn winding_by_argument(&self, n: usize) -> Result<i32> {
        let (mn, _) = self.min_abs_h();
        if mn < GAPLESS_REL * self.max_abs_amplitude() {
            return Err(Error::GapClosed(mn));
        }
        let dk = 2.0 * std::f64::consts::PI / n as f64;
        let mut prev = self.bloch_h(-std::f64::consts::PI);
        let mut total = 0.0;
        for i in 1..=n {
            let cur = self.bloch_h(-std::f64::consts::PI + i as f64 * dk);
            total += (cur / prev).arg();
            prev = cur;
        }
        Ok((total / (2.0 * std::f64::consts::PI)).round() as i32)
    }
}

fn merge_terms(terms: Vec<(i32, C64)>) -> Vec<(i32, C64)> {
    let mut out: Vec<(i32, C64)> = Vec::new();
    for (m, t) in terms {
        match out.iter_mut().find(|e| e.0 == m) {
            Some(e) => e.1 += t,
            None => out.push((m, t)),
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

fn rotated_terms(p: &SigmaXParams) -> Vec<(i32, C64)> {
    vec![
        (-1, C64::new(-(p.tp0 - p.tp1) / 2.0, 0.0)),
        (0, C64::new(-p.m0, 0.0)),
        (1, C64::new(-(p.tp0 + p.tp1) / 2.0, 0.0)),
    ]
}

fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while (b - a).abs() > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let k = 0.5 * (a + b);
    (k, g(k))
}

/// Eigenvalues of a 2x2 Hermitian block, ascending.
pub fn hermitian2_eigs(h: &Block) -> [f64; 2] {
    let a = h[0][0].re;
    let d = h[1][1].re;
    let b = h[0][1].norm();
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [m - r, m + r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bloch_h_examples() {
        let m = HoppingModel::sigma_z_real(&[(1, 1.0)]).unwrap();
        assert_relative_eq!(m.bloch_h(0.0).re, 1.0);
        let s = (6.0f64 / 19.0).sqrt();
        assert_relative_eq!(HoppingModel::fig8().bloch_h(0.0).re, (1.0 + s).powi(2), epsilon = 1e-14);
        let ssh = HoppingModel::sigma_z_real(&[(0, 1.0), (-1, 0.5)]).unwrap();
        assert!((ssh.bloch_h(std::f64::consts::PI) - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_poly_examples() {
        let ssh = HoppingModel::sigma_z_real(&[(0, 1.0), (-1, 0.5)]).unwrap();
        let cp = ssh.char_poly().unwrap();
        assert_eq!(cp.p, 1);
        assert_eq!(cp.f.c, vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)]);
        let cp5 = HoppingModel::fig5().char_poly().unwrap();
        assert_eq!(cp5.p, 3);
        let want = [0.1296, -0.864, 2.16, -2.4, 1.0];
        for (a, w) in cp5.f.c.iter().zip(want) {
            assert_relative_eq!(a.re, w, epsilon = 1e-14);
        }
    }

    #[test]
    fn all_zero_rejected() {
        assert!(HoppingModel::sigma_z_real(&[(0, 0.0)]).is_err());
    }

    #[test]
    fn winding_examples() {
        let m = HoppingModel::sigma_z_real(&[(1, 1.0)]).unwrap();
        assert_eq!(m.winding_number().unwrap(), 1);
        assert_eq!(HoppingModel::fig8().winding_number().unwrap(), 1);
        assert_eq!(HoppingModel::fig8().winding_by_argument(100_000).unwrap(), 1);
        let c = HoppingModel::sigma_z_real(&[(0, 1.0)]).unwrap();
        assert_eq!(c.winding_number().unwrap(), 0);
        let gapless = HoppingModel::sigma_z_real(&[(0, 1.0), (-1, 1.0)]).unwrap();
        assert!(matches!(gapless.winding_number(), Err(Error::GapClosed(_))));
    }

    #[test]
    fn band_gap_examples() {
        let m = HoppingModel::sigma_z_real(&[(1, 1.0)]).unwrap();
        assert_relative_eq!(m.band_gap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(HoppingModel::fig5().band_gap(), 0.0512, epsilon = 1e-12);
        let ssh = HoppingModel::sigma_z_real(&[(0, 1.0), (-1, 0.5)]).unwrap();
        assert_relative_eq!(ssh.band_gap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_examples() {
        let m = HoppingModel::sigma_x(SigmaXParams { tp0: 0.7, tp1: 0.7, m0: 0.3 }).unwrap();
        assert_relative_eq!(m.amplitude(1).re, -0.7);
        assert_relative_eq!(m.amplitude(0).re, -0.3);
        assert_eq!(m.amplitude(-1).norm(), 0.0);
        let g = HoppingModel::sigma_x(SigmaXParams { tp0: 1.0, tp1: 0.4, m0: 0.2 }).unwrap();
        let cp = g.char_poly().unwrap();
        assert_relative_eq!(cp.f.c[0].re, -0.3);
        assert_relative_eq!(cp.f.c[1].re, -0.2);
        assert_relative_eq!(cp.f.c[2].re, -0.7);
        let c = HoppingModel::sigma_x(SigmaXParams { tp0: 0.0, tp1: 0.0, m0: 1.0 }).unwrap();
        assert_relative_eq!(c.bloch_h(0.4).re, -1.0);
    }

    #[test]
    fn blocks_reassemble_bloch_matrix() {
        let models = [
            HoppingModel::fig5(),
            HoppingModel::sigma_x(SigmaXParams { tp0: 1.0, tp1: 0.4, m0: 0.2 }).unwrap(),
        ];
        for m in &models {
            for &k in &[0.0, 0.3, -1.7, 2.9] {
                let mut acc = [[C64::new(0.0, 0.0); 2]; 2];
                for (off, b) in m.real_space_blocks() {
                    let ph = C64::from_polar(1.0, off as f64 * k);
                    for a in 0..2 {
                        for c in 0..2 {
                            acc[a][c] += b[a][c] * ph;
                        }
                    }
                }
                let h = m.bloch_matrix(k);
                for a in 0..2 {
                    for c in 0..2 {
                        assert!((acc[a][c] - h[a][c]).norm() < 1e-14);
                    }
                }
            }
        }
    }
}
