//! Exact ground states of the open long-range XXZ chain
//! `H = Σ_{m>n} J(m-n) (S⁺_m S⁻_n/2 + S⁻_m S⁺_n/2 + Jz S^z_m S^z_n)`
//! in a fixed total-`S^z` sector.
//!
//! Basis states are bit strings with bit `m` set when site `m` points up.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::Kernel;
use crate::lanczos::{lanczos_ground, LanczosOptions};
use crate::observables::{entropy_from_singular, Observables};

pub const ED_MAX_N: usize = 18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n: usize,
    pub kernel: Kernel,
    pub jz: f64,
    /// Total `S^z`.
    #[serde(default)]
    pub sz: i32,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("N must be even and >= 2, got {}", self.n)));
        }
        self.kernel.validate()?;
        if self.sz.unsigned_abs() as usize > self.n / 2 {
            return Err(Error::InvalidArgument(format!("sector Sz = {} is empty for N = {}", self.sz, self.n)));
        }
        Ok(())
    }

    pub fn couplings(&self) -> Vec<f64> {
        (0..self.n).map(|r| if r == 0 { 0.0 } else { self.kernel.eval(r) }).collect()
    }

    pub fn n_up(&self) -> usize {
        (self.n as i32 / 2 + self.sz) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub n: usize,
    pub states: Vec<u32>,
    index: Vec<u32>,
}

impl SectorBasis {
    pub fn new(n: usize, n_up: usize) -> Self {
        let mut index = vec![u32::MAX; 1 << n];
        let mut states = Vec::new();
        for s in 0u32..(1u32 << n) {
            if s.count_ones() as usize == n_up {
                index[s as usize] = states.len() as u32;
                states.push(s);
            }
        }
        Self { n, states, index }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, s: u32) -> Option<usize> {
        match self.index[s as usize] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }
}

/// Sector-restricted Hamiltonian in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct XxzOperator {
    pub basis: SectorBasis,
    pub diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl XxzOperator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.dim() {
            let mut acc = self.diag[i] * x[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.diag[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[p] as usize)] += self.vals[p];
            }
        }
        m
    }

    pub fn expectation(&self, psi: &[f64]) -> f64 {
        let mut y = vec![0.0; psi.len()];
        self.matvec(psi, &mut y);
        psi.iter().zip(&y).map(|(a, b)| a * b).sum()
    }
}

pub fn build_xxz(spec: &ChainSpec) -> Result<XxzOperator> {
    spec.validate()?;
    if spec.n > ED_MAX_N {
        return Err(Error::TooLarge(spec.n));
    }
    let n = spec.n;
    let j = spec.couplings();
    let basis = SectorBasis::new(n, spec.n_up());
    let mut diag = Vec::with_capacity(basis.dim());
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for &s in &basis.states {
        let mut d = 0.0;
        let mut row: Vec<(u32, f64)> = Vec::new();
        for m in 0..n {
            for k in m + 1..n {
                let jr = j[k - m];
                if jr == 0.0 {
                    continue;
                }
                let (a, b) = ((s >> m) & 1, (s >> k) & 1);
                if a == b {
                    d += 0.25 * spec.jz * jr;
                } else {
                    d -= 0.25 * spec.jz * jr;
                    let t = s ^ (1 << m) ^ (1 << k);
                    row.push((basis.index_of(t).expect("flip stays in sector") as u32, 0.5 * jr));
                }
            }
        }
        row.sort_by_key(|e| e.0);
        diag.push(d);
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(XxzOperator { basis, diag, row_ptr, cols, vals })
}

/// Lowest eigenpair with a fixed seeded start vector.
pub fn ground_lanczos(op: &XxzOperator) -> Result<(f64, Vec<f64>)> {
    let opts = LanczosOptions::default();
    let (e, v, _) = lanczos_ground(op.dim(), |x, y| op.matvec(x, y), None, &opts)?;
    Ok((e, v))
}

/// `(⟨S_i·S_j⟩, ⟨S⁺_i S⁻_j⟩)`.
pub fn correlations(basis: &SectorBasis, psi: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = basis.n;
    let mut zz = DMatrix::<f64>::zeros(n, n);
    let mut spm = DMatrix::<f64>::zeros(n, n);
    for (idx, &s) in basis.states.iter().enumerate() {
        let p = psi[idx];
        if p == 0.0 {
            continue;
        }
        let w = p * p;
        for i in 0..n {
            let si = if (s >> i) & 1 == 1 { 0.5 } else { -0.5 };
            for k in 0..n {
                let sk = if (s >> k) & 1 == 1 { 0.5 } else { -0.5 };
                zz[(i, k)] += w * si * sk;
            }
            if si > 0.0 {
                spm[(i, i)] += w;
            } else {
                // S⁺_i S⁻_k acting on |s⟩ needs k up and i down
                for k in 0..n {
                    if (s >> k) & 1 == 1 {
                        let t = s ^ (1 << i) ^ (1 << k);
                        if let Some(ti) = basis.index_of(t) {
                            spm[(i, k)] += psi[ti] * p;
                        }
                    }
                }
            }
        }
    }
    // S_i·S_k = S^z S^z + (S⁺_i S⁻_k + S⁻_i S⁺_k)/2, and S_i·S_i = 3/4
    let ss = DMatrix::from_fn(n, n, |i, k| if i == k { 0.75 } else { zz[(i, k)] + 0.5 * (spm[(i, k)] + spm[(k, i)]) });
    (ss, spm)
}

/// `S(N_A)` for `N_A = 1..N-1` from the Schmidt values of each cut.
pub fn entropy_profile(basis: &SectorBasis, psi: &[f64]) -> Vec<f64> {
    let n = basis.n;
    (1..n)
        .map(|na| {
            let mask = (1u32 << na) - 1;
            // block by number of up spins on the left
            let mut blocks: Vec<(Vec<u32>, Vec<u32>, Vec<(u32, u32, f64)>)> = vec![(Vec::new(), Vec::new(), Vec::new()); na + 1];
            for (idx, &s) in basis.states.iter().enumerate() {
                let (l, r) = (s & mask, s >> na);
                let b = &mut blocks[l.count_ones() as usize];
                b.2.push((l, r, psi[idx]));
            }
            let mut sv = Vec::new();
            for (mut ls, mut rs, entries) in blocks {
                if entries.is_empty() {
                    continue;
                }
                ls.extend(entries.iter().map(|e| e.0));
                rs.extend(entries.iter().map(|e| e.1));
                ls.sort_unstable();
                ls.dedup();
                rs.sort_unstable();
                rs.dedup();
                let mut m = DMatrix::<f64>::zeros(ls.len(), rs.len());
                for (l, r, v) in entries {
                    let i = ls.binary_search(&l).unwrap();
                    let k = rs.binary_search(&r).unwrap();
                    m[(i, k)] = v;
                }
                sv.extend(m.singular_values().iter().copied());
            }
            entropy_from_singular(sv)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdResult {
    pub spec: ChainSpec,
    pub energy: f64,
    pub dim: usize,
    pub observables: Observables,
}

/// Ground state and all observables of one chain.
pub fn solve_chain(spec: &ChainSpec, oscillating_fit: bool) -> Result<EdResult> {
    let op = build_xxz(spec)?;
    let (energy, psi) = ground_lanczos(&op)?;
    let (ss, spm) = correlations(&op.basis, &psi);
    let entropy = entropy_profile(&op.basis, &psi);
    Ok(EdResult {
        spec: spec.clone(),
        energy,
        dim: op.dim(),
        observables: Observables::from_parts(ss, spm, entropy, oscillating_fit),
    })
}

/// Full `2^N` Hamiltonian as a dense matrix, for cross-checks.
pub fn dense_full_hamiltonian(spec: &ChainSpec) -> DMatrix<f64> {
    let n = spec.n;
    let j = spec.couplings();
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim as u32 {
        for m in 0..n {
            for k in m + 1..n {
                let (a, b) = ((s >> m) & 1, (s >> k) & 1);
                h[(s as usize, s as usize)] += if a == b { 0.25 } else { -0.25 } * spec.jz * j[k - m];
                if a != b {
                    let t = s ^ (1 << m) ^ (1 << k);
                    h[(t as usize, s as usize)] += 0.5 * j[k - m];
                }
            }
        }
    }
    h
}

/// `Σ_i S^z_i` on the full space, for commutator checks.
pub fn dense_total_sz(n: usize) -> DMatrix<f64> {
    let d = DVector::from_iterator(1 << n, (0..1u32 << n).map(|s| s.count_ones() as f64 - n as f64 / 2.0));
    DMatrix::from_diagonal(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::SymmetricEigen;

    fn nn(n: usize, jz: f64) -> ChainSpec {
        ChainSpec { n, kernel: Kernel::Table { values: vec![1.0] }, jz, sz: 0 }
    }

    #[test]
    fn two_site_singlet() {
        let op = build_xxz(&nn(2, 1.0)).unwrap();
        assert_eq!(op.dim(), 2);
        let (e, psi) = ground_lanczos(&op).unwrap();
        assert_relative_eq!(e, -0.75, epsilon = 1e-12);
        let (ss, _) = correlations(&op.basis, &psi);
        assert_relative_eq!(ss[(0, 1)], -0.75, epsilon = 1e-12);
        let ent = entropy_profile(&op.basis, &psi);
        assert_relative_eq!(ent[0], 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn sector_dimension() {
        assert_eq!(SectorBasis::new(12, 6).dim(), 924);
    }

    #[test]
    fn four_site_heisenberg_against_full_space() {
        let spec = nn(4, 1.0);
        let full = SymmetricEigen::new(dense_full_hamiltonian(&spec)).eigenvalues.min();
        let (e, _) = ground_lanczos(&build_xxz(&spec).unwrap()).unwrap();
        // open 4-site Heisenberg: -(3 + 2√3)/4
        assert_relative_eq!(full, -(3.0 + 2.0 * 3f64.sqrt()) / 4.0, epsilon = 1e-12);
        assert_relative_eq!(e, full, epsilon = 1e-12);
    }

    #[test]
    fn ferromagnet_correlations() {
        let basis = SectorBasis::new(6, 6);
        let (ss, spm) = correlations(&basis, &[1.0]);
        for i in 0..6 {
            for k in 0..6 {
                if i != k {
                    assert_relative_eq!(ss[(i, k)], 0.25);
                    assert_eq!(spm[(i, k)], 0.0);
                }
            }
            assert_eq!(spm[(i, i)], 1.0);
        }
        assert!(entropy_profile(&basis, &[1.0]).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn correlations_match_dense_operators() {
        let spec = ChainSpec { n: 6, kernel: Kernel::Ple { xi: 1.2 }, jz: 0.4, sz: 0 };
        let op = build_xxz(&spec).unwrap();
        let (_, psi) = ground_lanczos(&op).unwrap();
        let (ss, spm) = correlations(&op.basis, &psi);
        for i in 0..6 {
            for k in 0..6 {
                // direct: Σ_s ψ(s) ψ(s') over S⁺_i S⁻_k
                let mut v = 0.0;
                for (a, &s) in op.basis.states.iter().enumerate() {
                    if i == k {
                        if (s >> i) & 1 == 1 {
                            v += psi[a] * psi[a];
                        }
                    } else if (s >> k) & 1 == 1 && (s >> i) & 1 == 0 {
                        let t = s ^ (1 << i) ^ (1 << k);
                        v += psi[op.basis.index_of(t).unwrap()] * psi[a];
                    }
                }
                assert_relative_eq!(spm[(i, k)], v, epsilon = 1e-13);
                assert_relative_eq!(ss[(i, k)], ss[(k, i)], epsilon = 1e-13);
            }
        }
        assert_relative_eq!(spm.trace(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_symmetric() {
        let spec = ChainSpec { n: 10, kernel: Kernel::Ple { xi: 0.8 }, jz: 0.0, sz: 0 };
        let r = solve_chain(&spec, true).unwrap();
        let s = &r.observables.entropy;
        for k in 0..s.len() {
            assert_relative_eq!(s[k], s[s.len() - 1 - k], epsilon = 1e-10);
        }
    }

    #[test]
    fn structure_factor_sum_rule() {
        let spec = ChainSpec { n: 12, kernel: Kernel::Ple { xi: 1.0 }, jz: 0.0, sz: 0 };
        let r = solve_chain(&spec, true).unwrap();
        let s: f64 = r.observables.sxy.iter().sum();
        assert_relative_eq!(s, 6.0, epsilon = 1e-10);
        assert!(r.observables.sxy.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn empty_sector_rejected() {
        let spec = ChainSpec { n: 4, kernel: Kernel::Ple { xi: 1.0 }, jz: 0.0, sz: 3 };
        assert!(build_xxz(&spec).is_err());
    }
}
