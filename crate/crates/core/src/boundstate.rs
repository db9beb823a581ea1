//! Single-excitation numerics of a finite chiral lattice with emitters.
//!
//! Basis ordering: bath site `(cell, α)` with 1-based `cell` sits at index
//! `2 (cell - 1) + α` (`A = 0`, `B = 1`); emitters follow the `2L` bath sites.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{ChiralClass, HoppingModel};
use crate::C64;

/// Emitter weight above which an in-gap state counts as dressed.
pub const DRESSED_THRESHOLD: f64 = 0.1;
/// Eigenvalues closer than this (relative to the largest matrix entry) form one cluster.
pub const DEGENERACY_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn index(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emitter {
    /// 1-based cell index.
    pub cell: usize,
    pub sublattice: Sublattice,
    pub coupling: f64,
    #[serde(default)]
    pub detuning: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSpaceSpec {
    pub l: usize,
    pub boundary: Boundary,
    pub model: HoppingModel,
    pub emitters: Vec<Emitter>,
}

impl RealSpaceSpec {
    pub fn dim(&self) -> usize {
        2 * self.l + self.emitters.len()
    }

    pub fn site(&self, cell: usize, s: Sublattice) -> usize {
        2 * (cell - 1) + s.index()
    }

    pub fn emitter_index(&self, i: usize) -> usize {
        2 * self.l + i
    }

    fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one cell".into()));
        }
        for e in &self.emitters {
            if e.cell == 0 || e.cell > self.l {
                return Err(Error::InvalidArgument(format!(
                    "emitter cell {} outside 1..={}",
                    e.cell, self.l
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderClass {
    Preserving,
    Breaking,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub class: DisorderClass,
    /// Standard deviation of each Gaussian coefficient.
    pub strength: f64,
    pub realizations: usize,
    pub seed: u64,
}

/// Coefficients `ε_{1..4, j}` for every cell of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderDraw {
    pub class: DisorderClass,
    pub eps: Vec<[f64; 4]>,
}

/// Draw realization `index`; the stream depends only on `(seed, index)`.
pub fn draw_disorder(spec: &DisorderSpec, l: usize, index: u64) -> Result<DisorderDraw> {
    if !(spec.strength >= 0.0) {
        return Err(Error::InvalidArgument("disorder strength must be >= 0".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let normal = Normal::new(0.0, spec.strength)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let eps = (0..l)
        .map(|_| {
            [
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            ]
        })
        .collect();
    Ok(DisorderDraw { class: spec.class, eps })
}

fn add_herm(h: &mut DMatrix<C64>, i: usize, j: usize, v: C64) {
    if i == j {
        h[(i, i)] += C64::new(v.re, 0.0);
    } else {
        h[(i, j)] += v;
        h[(j, i)] += v.conj();
    }
}

/// Dense Hermitian single-excitation Hamiltonian.
pub fn build_hamiltonian(spec: &RealSpaceSpec, disorder: Option<&DisorderDraw>) -> Result<DMatrix<C64>> {
    spec.validate()?;
    let l = spec.l as i64;
    let n = spec.dim();
    let mut h = DMatrix::<C64>::zeros(n, n);
    let cell = |c: i64| -> Option<usize> {
        match spec.boundary {
            Boundary::Open => (1..=l).contains(&c).then_some(c as usize),
            Boundary::Periodic => Some(((c - 1).rem_euclid(l) + 1) as usize),
        }
    };
    // each unordered pair of sites once: blocks with m > 0, and the upper part of m = 0
    for (m, b) in spec.model.real_space_blocks() {
        if m < 0 {
            continue;
        }
        for j in 1..=l {
            let Some(k) = cell(j + m as i64) else { continue };
            for a in 0..2 {
                for c in 0..2 {
                    if m == 0 && c < a {
                        continue;
                    }
                    let v = b[a][c];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let i1 = 2 * (j as usize - 1) + a;
                    let i2 = 2 * (k - 1) + c;
                    if m == 0 && a == c {
                        h[(i1, i1)] += v;
                    } else {
                        add_herm(&mut h, i1, i2, v);
                    }
                }
            }
        }
    }
    if let Some(d) = disorder {
        if d.eps.len() != spec.l {
            return Err(Error::InvalidArgument("disorder draw has wrong length".into()));
        }
        add_disorder(&mut h, spec, d, &cell);
    }
    for (i, e) in spec.emitters.iter().enumerate() {
        let ei = spec.emitter_index(i);
        h[(ei, ei)] += C64::new(e.detuning, 0.0);
        add_herm(&mut h, ei, spec.site(e.cell, e.sublattice), C64::new(e.coupling, 0.0));
    }
    Ok(h)
}

fn add_disorder(h: &mut DMatrix<C64>, spec: &RealSpaceSpec, d: &DisorderDraw, cell: &dyn Fn(i64) -> Option<usize>) {
    let (a, b) = (0usize, 1usize);
    let idx = |c: usize, s: usize| 2 * (c - 1) + s;
    let r = |x: f64| C64::new(x, 0.0);
    for j in 1..=spec.l {
        let e = d.eps[j - 1];
        let next = cell(j as i64 + 1);
        match (spec.model.class, d.class) {
            (ChiralClass::SigmaZ, DisorderClass::Preserving) => {
                if let Some(k) = next {
                    add_herm(h, idx(j, b), idx(k, a), r(e[0]));
                    add_herm(h, idx(j, a), idx(k, b), r(e[2]));
                }
                add_herm(h, idx(j, a), idx(j, b), r(e[1]));
            }
            (ChiralClass::SigmaZ, DisorderClass::Breaking) => {
                h[(idx(j, a), idx(j, a))] += r(e[0]);
                h[(idx(j, b), idx(j, b))] += r(e[1]);
                if let Some(k) = next {
                    add_herm(h, idx(j, a), idx(k, a), r(e[2]));
                    add_herm(h, idx(j, b), idx(k, b), r(e[3]));
                }
            }
            (ChiralClass::SigmaX, DisorderClass::Preserving) => {
                h[(idx(j, a), idx(j, a))] += r(e[0]);
                h[(idx(j, b), idx(j, b))] -= r(e[0]);
            }
            (ChiralClass::SigmaX, DisorderClass::Breaking) => {
                h[(idx(j, a), idx(j, a))] += r(e[0]);
                h[(idx(j, b), idx(j, b))] += r(e[1]);
                add_herm(h, idx(j, a), idx(j, b), r(e[2]));
            }
        }
    }
}

/// Eigenpairs of a Hermitian matrix, ascending; uses the real solver when
/// the matrix is real.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let is_real = h.iter().all(|v| v.im == 0.0);
    let (vals, vecs): (Vec<f64>, DMatrix<C64>) = if is_real {
        let re = h.map(|v| v.re);
        let e = SymmetricEigen::new(re);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|v| C64::new(v, 0.0)))
    } else {
        let e = SymmetricEigen::new(h.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedState {
    pub energy: f64,
    /// L2-normalized amplitudes over the full basis, emitter amplitude real positive.
    pub amplitudes: Vec<C64>,
    pub emitter_weight: f64,
    /// Remaining in-gap energies (bare edge states).
    pub edge_energies: Vec<f64>,
    pub in_gap_energies: Vec<f64>,
}

impl DressedState {
    /// Per-cell `(A, B)` bath amplitudes for a lattice of `l` cells.
    pub fn bath_profile(&self, l: usize) -> (Vec<C64>, Vec<C64>) {
        (0..l).map(|c| (self.amplitudes[2 * c], self.amplitudes[2 * c + 1])).unzip()
    }

    /// Total weight on bath sublattice A.
    pub fn a_weight(&self, l: usize) -> f64 {
        (0..l).map(|c| self.amplitudes[2 * c].norm_sqr()).sum()
    }
}

/// Dressed bound state among eigenpairs with energy inside `gap_window`.
///
/// Near-degenerate in-gap eigenvalues are grouped; within a group the
/// candidate state is the normalized projection of the emitter basis vector
/// onto the group. The group with the largest emitter weight wins, ties
/// broken toward positive energy.
pub fn dressed_state(h: &DMatrix<C64>, emitters: &[usize], gap_window: (f64, f64)) -> Result<DressedState> {
    if emitters.is_empty() {
        return Err(Error::InvalidArgument("no emitter indices".into()));
    }
    let (vals, vecs) = hermitian_eigen(h);
    let in_gap: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] > gap_window.0 && vals[i] < gap_window.1)
        .collect();
    if in_gap.is_empty() {
        return Err(Error::NoInGapState);
    }
    let scale = h.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = DEGENERACY_REL * scale;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &in_gap {
        match clusters.last_mut() {
            Some(c) if vals[i] - vals[*c.last().unwrap()] < tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let e0 = emitters[0];
    let emitter_weight = |v: &DVector<C64>| emitters.iter().map(|&e| v[e].norm_sqr()).sum::<f64>();
    let mut best: Option<(f64, f64, DVector<C64>, usize)> = None;
    for (ci, c) in clusters.iter().enumerate() {
        let v = if c.len() == 1 {
            vecs.column(c[0]).into_owned()
        } else {
            let mut p = DVector::<C64>::zeros(h.nrows());
            for &i in c {
                let col = vecs.column(i);
                p += col * col[e0].conj();
            }
            let nrm = p.norm();
            if nrm == 0.0 {
                continue;
            }
            p / C64::new(nrm, 0.0)
        };
        let w = emitter_weight(&v);
        if w > 1.0 - 1e-12 {
            // bare emitter without bath admixture
            continue;
        }
        let energy = (v.adjoint() * h * &v)[(0, 0)].re;
        let better = match &best {
            None => true,
            Some((bw, be, _, _)) => w > bw + 1e-9 || ((w - bw).abs() <= 1e-9 && energy > *be),
        };
        if better {
            best = Some((w, energy, v, ci));
        }
    }
    let Some((w, energy, mut v, ci)) = best else {
        return Err(Error::NoDressedState(0.0));
    };
    if w <= DRESSED_THRESHOLD {
        return Err(Error::NoDressedState(w));
    }
    let ph = v[e0];
    if ph.norm() > 0.0 {
        v *= ph.conj() / C64::new(ph.norm(), 0.0);
    }
    let mut edge = Vec::new();
    for (k, c) in clusters.iter().enumerate() {
        let skip = if k == ci { 1 } else { 0 };
        edge.extend(c.iter().skip(skip).map(|&i| vals[i]));
    }
    Ok(DressedState {
        energy,
        amplitudes: v.iter().copied().collect(),
        emitter_weight: w,
        edge_energies: edge,
        in_gap_energies: in_gap.iter().map(|&i| vals[i]).collect(),
    })
}

/// Dressed state of `spec`, using the first emitter and the window `±gap/2`.
pub fn solve_spec(spec: &RealSpaceSpec, disorder: Option<&DisorderDraw>) -> Result<DressedState> {
    let h = build_hamiltonian(spec, disorder)?;
    let g = spec.model.band_gap() / 2.0;
    let em: Vec<usize> = (0..spec.emitters.len()).map(|i| spec.emitter_index(i)).collect();
    dressed_state(&h, &em, (-g, g))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderStats {
    /// Per bath site, basis order.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Dressed energy of each successful realization, in realization order.
    pub energies: Vec<f64>,
    /// Total sublattice-A weight of each successful realization.
    pub a_weights: Vec<f64>,
    pub failures: usize,
    pub clean_energy: f64,
}

impl DisorderStats {
    pub fn median_std(&self) -> f64 {
        median(&self.std)
    }

    pub fn max_energy_shift(&self) -> f64 {
        self.energies
            .iter()
            .map(|e| (e - self.clean_energy).abs())
            .fold(0.0, f64::max)
    }

    pub fn median_energy_shift(&self) -> f64 {
        let v: Vec<f64> = self.energies.iter().map(|e| (e - self.clean_energy).abs()).collect();
        median(&v)
    }
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Ensemble statistics of `|amplitude|` on the bath sites over independent draws.
pub fn disorder_stats(spec: &RealSpaceSpec, disorder: &DisorderSpec, exec: Exec) -> Result<DisorderStats> {
    if disorder.realizations == 0 {
        return Err(Error::InvalidArgument("realizations must be >= 1".into()));
    }
    let clean = solve_spec(spec, None)?;
    let runs: Vec<Result<DressedState>> = exec.map(disorder.realizations, |i| {
        let d = draw_disorder(disorder, spec.l, i as u64)?;
        solve_spec(spec, Some(&d))
    });
    let nb = 2 * spec.l;
    let mut sum = vec![0.0; nb];
    let mut sum2 = vec![0.0; nb];
    let mut energies = Vec::new();
    let mut a_weights = Vec::new();
    let mut failures = 0;
    for r in &runs {
        match r {
            Ok(s) => {
                for i in 0..nb {
                    let a = s.amplitudes[i].norm();
                    sum[i] += a;
                    sum2[i] += a * a;
                }
                energies.push(s.energy);
                a_weights.push(s.a_weight(spec.l));
            }
            Err(_) => failures += 1,
        }
    }
    let n = energies.len().max(1) as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std = sum2
        .iter()
        .zip(&mean)
        .map(|(s2, m)| (s2 / n - m * m).max(0.0).sqrt())
        .collect();
    Ok(DisorderStats {
        mean,
        std,
        energies,
        a_weights,
        failures,
        clean_energy: clean.energy,
    })
}

/// Least-squares fit `φ ≈ c J` over the given pairs and the relative
/// deviation `max|φ - c J| / max|c J|`.
pub fn profile_deviation(numeric: &[C64], analytic: &[C64]) -> (C64, f64) {
    let num: C64 = analytic.iter().zip(numeric).map(|(j, p)| j.conj() * p).sum();
    let den: f64 = analytic.iter().map(|j| j.norm_sqr()).sum();
    let c = num / den;
    let dev = analytic
        .iter()
        .zip(numeric)
        .map(|(j, p)| (p - c * j).norm())
        .fold(0.0, f64::max);
    let mx = analytic.iter().map(|j| (c * j).norm()).fold(0.0, f64::max);
    (c, dev / mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ssh() -> HoppingModel {
        HoppingModel::sigma_z_real(&[(0, 1.0), (-1, 0.5)]).unwrap()
    }

    #[test]
    fn ssh_two_cells() {
        let spec = RealSpaceSpec { l: 2, boundary: Boundary::Open, model: ssh(), emitters: vec![] };
        let h = build_hamiltonian(&spec, None).unwrap();
        assert_eq!(h.nrows(), 4);
        // A1-B1 = 1, A2-B2 = 1, A2-B1 = 0.5 (t_{-1}: A at j+1... B at j)
        assert_eq!(h[(0, 1)].re, 1.0);
        assert_eq!(h[(2, 3)].re, 1.0);
        assert_eq!(h[(2, 1)].re, 0.5);
        assert_eq!(h[(0, 3)].re, 0.0);
        let (vals, _) = hermitian_eigen(&h);
        for i in 0..2 {
            assert_relative_eq!(vals[i], -vals[3 - i], epsilon = 1e-14);
        }
    }

    #[test]
    fn fig8_dimension() {
        let spec = RealSpaceSpec {
            l: 20,
            boundary: Boundary::Open,
            model: HoppingModel::fig8(),
            emitters: vec![Emitter { cell: 10, sublattice: Sublattice::A, coupling: 90.0 / 355.0, detuning: 0.0 }],
        };
        assert_eq!(build_hamiltonian(&spec, None).unwrap().nrows(), 41);
    }

    #[test]
    fn zero_disorder_is_clean() {
        let spec = RealSpaceSpec {
            l: 10,
            boundary: Boundary::Open,
            model: HoppingModel::fig8(),
            emitters: vec![Emitter { cell: 5, sublattice: Sublattice::A, coupling: 0.3, detuning: 0.0 }],
        };
        let ds = DisorderSpec { class: DisorderClass::Breaking, strength: 0.0, realizations: 1, seed: 7 };
        let d = draw_disorder(&ds, 10, 0).unwrap();
        assert_eq!(build_hamiltonian(&spec, Some(&d)).unwrap(), build_hamiltonian(&spec, None).unwrap());
    }

    #[test]
    fn uncoupled_emitter_is_not_dressed() {
        let spec = RealSpaceSpec {
            l: 20,
            boundary: Boundary::Open,
            model: HoppingModel::fig8(),
            emitters: vec![Emitter { cell: 10, sublattice: Sublattice::A, coupling: 0.0, detuning: 0.0 }],
        };
        assert!(matches!(solve_spec(&spec, None), Err(Error::NoDressedState(_))));
    }

    #[test]
    fn periodic_bath_spectrum_matches_bloch() {
        let m = HoppingModel::fig5();
        let l = 12;
        let spec = RealSpaceSpec { l, boundary: Boundary::Periodic, model: m.clone(), emitters: vec![] };
        let (vals, _) = hermitian_eigen(&build_hamiltonian(&spec, None).unwrap());
        let mut want: Vec<f64> = (0..l)
            .flat_map(|n| {
                let k = 2.0 * std::f64::consts::PI * n as f64 / l as f64;
                let a = m.bloch_h(k).norm();
                [a, -a]
            })
            .collect();
        want.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in vals.iter().zip(&want) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }
}
