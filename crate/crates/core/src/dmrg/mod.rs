//! Two-site DMRG for the long-range XXZ chain.
//!
//! Kernels of the form `Σ_a c_a r^{α_a} λ_a^r` compile to an exact MPO with
//! Jordan blocks. The sweep starts from the Néel product state, so with a
//! real `S^z`-conserving Hamiltonian the state stays in the `S^z = 0` sector.

mod mpo;
mod tensor;

pub use mpo::{compile_mpo, compile_mpo_with_penalty, compile_terms, fit_table, KernelMpo, MpoTerm, TABLE_FIT_TOL, TABLE_MAX_TERMS};
pub use tensor::Tensor;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lanczos::{lanczos_best, LanczosOptions};
use crate::observables::{entropy_from_singular, Observables};
use mpo::{sminus, splus, sz, PHYS};
use tensor::{svd_checked, tensordot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DmrgOptions {
    pub chi_max: usize,
    pub max_sweeps: usize,
    /// Stop when the sweep energy changes by less than this at `chi_max`.
    pub tol: f64,
    /// Largest discarded weight per truncation.
    pub cutoff: f64,
    /// Bond dimension of the first sweep; doubled each sweep up to `chi_max`.
    pub chi_start: usize,
    /// Krylov dimension of the local eigensolver.
    pub krylov: usize,
    /// Restarts of the local eigensolver.
    pub local_restarts: usize,
}

impl Default for DmrgOptions {
    fn default() -> Self {
        Self { chi_max: 128, max_sweeps: 30, tol: 1e-9, cutoff: 1e-10, chi_start: 16, krylov: 10, local_restarts: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepLog {
    pub sweep: usize,
    pub chi: usize,
    pub energy: f64,
    pub max_truncation: f64,
    /// Local eigensolver matrix-vector products in this sweep.
    pub matvecs: usize,
}

/// MPS with site tensors `[left, phys, right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    pub tensors: Vec<Tensor>,
    pub center: usize,
    /// Discarded weight of every truncation, in order.
    pub truncation_log: Vec<f64>,
}

impl MpsState {
    /// Product state with site `i` up when `up(i)`.
    pub fn product(n: usize, up: impl Fn(usize) -> bool) -> Self {
        let tensors = (0..n)
            .map(|i| {
                let mut t = Tensor::zeros(&[1, PHYS, 1]);
                t.set(&[0, usize::from(up(i)), 0], 1.0);
                t
            })
            .collect();
        Self { tensors, center: 0, truncation_log: Vec::new() }
    }

    pub fn neel(n: usize) -> Self {
        Self::product(n, |i| i % 2 == 0)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors.iter().skip(1).map(|t| t.dims[0]).collect()
    }

    /// Largest deviation from left-orthonormality left of the center and
    /// right-orthonormality right of it.
    pub fn gauge_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for (i, t) in self.tensors.iter().enumerate() {
            if i == self.center {
                continue;
            }
            let (ax, bx) = if i < self.center { (vec![0, 1], vec![0, 1]) } else { (vec![1, 2], vec![1, 2]) };
            let g = tensordot(t, t, &ax, &bx);
            let d = g.dims[0];
            for r in 0..d {
                for c in 0..d {
                    let want = if r == c { 1.0 } else { 0.0 };
                    err = err.max((g.get(&[r, c]) - want).abs());
                }
            }
        }
        err
    }

    /// Moves the center to site 0 by successive SVDs.
    pub fn right_canonicalize(&mut self) {
        for i in (1..self.len()).rev() {
            let t = &self.tensors[i];
            let (dl, dr) = (t.dims[0], t.dims[2]);
            let m = DMatrix::from_column_slice(dl, PHYS * dr, &t.data);
            let (u, s, vt) = svd_checked(&m);
            let k = s.len();
            self.tensors[i] = Tensor::from_data(&[k, PHYS, dr], vt.as_slice().to_vec());
            let us = u * DMatrix::from_diagonal(&s);
            let prev = &self.tensors[i - 1];
            let pm = DMatrix::from_column_slice(prev.dims[0] * PHYS, dl, &prev.data);
            let nm = pm * us;
            self.tensors[i - 1] = Tensor::from_data(&[prev.dims[0], PHYS, k], nm.as_slice().to_vec());
        }
        let nrm = self.tensors[0].norm();
        self.tensors[0].scale(1.0 / nrm);
        self.center = 0;
    }

    /// Moves the center to the last site by successive SVDs.
    pub fn left_canonicalize(&mut self) {
        let n = self.len();
        for i in 0..n - 1 {
            let t = &self.tensors[i];
            let (dl, dr) = (t.dims[0], t.dims[2]);
            let m = DMatrix::from_column_slice(dl * PHYS, dr, &t.data);
            let (u, s, vt) = svd_checked(&m);
            let k = s.len();
            self.tensors[i] = Tensor::from_data(&[dl, PHYS, k], u.as_slice().to_vec());
            let sv = DMatrix::from_diagonal(&s) * vt;
            let next = &self.tensors[i + 1];
            let nm = sv * DMatrix::from_column_slice(dr, PHYS * next.dims[2], &next.data);
            self.tensors[i + 1] = Tensor::from_data(&[k, PHYS, next.dims[2]], nm.as_slice().to_vec());
        }
        let nrm = self.tensors[n - 1].norm();
        self.tensors[n - 1].scale(1.0 / nrm);
        self.center = n - 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmrgResult {
    pub energy: f64,
    pub state: MpsState,
    pub sweeps: Vec<SweepLog>,
    pub converged: bool,
}

fn left_boundary(chi: usize) -> Tensor {
    let mut t = Tensor::zeros(&[1, chi, 1]);
    t.set(&[0, 0, 0], 1.0);
    t
}

fn right_boundary(chi: usize) -> Tensor {
    let mut t = Tensor::zeros(&[1, chi, 1]);
    t.set(&[0, chi - 1, 0], 1.0);
    t
}

/// `L'[c, b', c'] = Σ A[a,s,c] L[a,b,a'] W[b,b',s,s'] A[a',s',c']`.
fn grow_left(l: &Tensor, w: &Tensor, a: &Tensor) -> Tensor {
    let t1 = tensordot(l, a, &[2], &[0]); // [a, b, s', c']
    let t2 = tensordot(&t1, w, &[1, 2], &[0, 3]); // [a, c', b', s]
    let t3 = tensordot(&t2, a, &[0, 3], &[0, 1]); // [c', b', c]
    t3.permute(&[2, 1, 0])
}

/// `R'[a, b, a'] = Σ B[a,s,c] W[b,b2,s,s'] B[a',s',c'] R[c,b2,c']`.
fn grow_right(r: &Tensor, w: &Tensor, b: &Tensor) -> Tensor {
    let t1 = tensordot(b, r, &[2], &[2]); // [a', s', c, b2]
    let t2 = tensordot(&t1, w, &[3, 1], &[1, 3]); // [a', c, b, s]
    let t3 = tensordot(&t2, b, &[1, 3], &[2, 1]); // [a', b, a]
    t3.permute(&[2, 1, 0])
}

fn apply_two_site(l: &Tensor, w: &Tensor, r: &Tensor, theta: &Tensor) -> Tensor {
    let x = tensordot(l, theta, &[2], &[0]); // [a, b, s1', s2', c']
    let y = tensordot(&x, w, &[1, 2], &[0, 3]); // [a, s2', c', b2, s1]
    let z = tensordot(&y, w, &[3, 1], &[0, 3]); // [a, c', s1, b3, s2]
    tensordot(&z, r, &[3, 1], &[1, 2]) // [a, s1, s2, c]
}

struct Split {
    left: Tensor,
    right: Tensor,
    discarded: f64,
}

/// SVD of `θ[a, s1, s2, c]`; singular values go right when `center_right`.
fn split_theta(theta: &Tensor, chi: usize, cutoff: f64, center_right: bool) -> Split {
    let (dl, dr) = (theta.dims[0], theta.dims[3]);
    let m = DMatrix::from_column_slice(dl * PHYS, PHYS * dr, &theta.data);
    let (u, s, vt) = svd_checked(&m);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let total: f64 = s.iter().map(|x| x * x).sum();
    let mut keep = order.len().min(chi).max(1);
    // shrink while the discarded weight stays under the cutoff
    let mut tail: f64 = order[keep..].iter().map(|&i| s[i] * s[i]).sum();
    while keep > 1 && tail + s[order[keep - 1]].powi(2) <= cutoff * total {
        keep -= 1;
        tail += s[order[keep]].powi(2);
    }
    let kept = &order[..keep];
    let norm: f64 = kept.iter().map(|&i| s[i] * s[i]).sum::<f64>().sqrt();
    let mut ld = Vec::with_capacity(dl * PHYS * keep);
    for &i in kept {
        let f = if center_right { 1.0 } else { s[i] / norm };
        ld.extend(u.column(i).iter().map(|x| x * f));
    }
    let mut rd = vec![0.0; keep * PHYS * dr];
    for (row, &i) in kept.iter().enumerate() {
        let f = if center_right { s[i] / norm } else { 1.0 };
        for col in 0..PHYS * dr {
            rd[row + keep * col] = vt[(i, col)] * f;
        }
    }
    Split {
        left: Tensor::from_data(&[dl, PHYS, keep], ld),
        right: Tensor::from_data(&[keep, PHYS, dr], rd),
        discarded: tail / total.max(f64::MIN_POSITIVE),
    }
}

/// Two-site DMRG from the Néel state.
pub fn dmrg(mpo: &KernelMpo, opts: &DmrgOptions) -> Result<DmrgResult> {
    dmrg_from(mpo, MpsState::neel(mpo.n), opts)
}

pub fn dmrg_from(mpo: &KernelMpo, state: MpsState, opts: &DmrgOptions) -> Result<DmrgResult> {
    dmrg_observed(mpo, state, opts, |_| {})
}

/// Like [`dmrg_from`], calling `on_sweep` after every full sweep.
pub fn dmrg_observed<F>(mpo: &KernelMpo, mut state: MpsState, opts: &DmrgOptions, mut on_sweep: F) -> Result<DmrgResult>
where
    F: FnMut(&SweepLog),
{
    let n = mpo.n;
    if state.len() != n {
        return Err(Error::InvalidArgument(format!("state has {} sites, MPO has {n}", state.len())));
    }
    if opts.chi_max == 0 || opts.max_sweeps == 0 {
        return Err(Error::InvalidArgument("chi_max and max_sweeps must be positive".into()));
    }
    let w = &mpo.w;
    let chi_w = mpo.chi;
    state.right_canonicalize();
    let mut lenv: Vec<Tensor> = vec![left_boundary(chi_w); n + 1];
    let mut renv: Vec<Tensor> = vec![right_boundary(chi_w); n + 1];
    for i in (1..n).rev() {
        renv[i] = grow_right(&renv[i + 1], w, &state.tensors[i]);
    }
    let lopts = LanczosOptions { krylov: opts.krylov, max_restarts: opts.local_restarts, tol: 1e-11, seed: 1 };
    let mut logs = Vec::new();
    let mut energy = f64::INFINITY;
    let mut converged = false;
    let mut chi = opts.chi_start.max(1).min(opts.chi_max);
    let mut at_max = 0;
    for sweep in 0..opts.max_sweeps {
        let mut max_trunc: f64 = 0.0;
        let mut matvecs = 0;
        let mut e_sweep = energy;
        for right_moving in [true, false] {
            let sites: Vec<usize> = if right_moving { (0..n - 1).collect() } else { (0..n - 1).rev().collect() };
            for i in sites {
                let theta = tensordot(&state.tensors[i], &state.tensors[i + 1], &[2], &[0]);
                let dims = theta.dims.clone();
                let (l, r) = (&lenv[i], &renv[i + 2]);
                let (e, v, info) = lanczos_best(
                    theta.len(),
                    |x, y| {
                        let t = Tensor::from_data(&dims, x.to_vec());
                        y.copy_from_slice(&apply_two_site(l, w, r, &t).data);
                    },
                    Some(&theta.data),
                    &lopts,
                )?;
                e_sweep = e;
                matvecs += info.matvecs;
                let theta = Tensor::from_data(&dims, v);
                let sp = split_theta(&theta, chi, opts.cutoff, right_moving);
                max_trunc = max_trunc.max(sp.discarded);
                state.truncation_log.push(sp.discarded);
                state.tensors[i] = sp.left;
                state.tensors[i + 1] = sp.right;
                if right_moving {
                    lenv[i + 1] = grow_left(&lenv[i], w, &state.tensors[i]);
                    state.center = i + 1;
                } else {
                    renv[i + 1] = grow_right(&renv[i + 2], w, &state.tensors[i + 1]);
                    state.center = i;
                }
            }
        }
        let de = (e_sweep - energy).abs();
        energy = e_sweep;
        let log = SweepLog { sweep, chi, energy, max_truncation: max_trunc, matvecs };
        on_sweep(&log);
        logs.push(log);
        if chi == opts.chi_max {
            at_max += 1;
            if at_max >= 2 && de < opts.tol {
                converged = true;
                break;
            }
        }
        chi = (chi * 2).min(opts.chi_max);
    }
    Ok(DmrgResult { energy, state, sweeps: logs, converged })
}

/// Exact `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩` by full contraction.
pub fn mpo_expectation(mpo: &KernelMpo, state: &MpsState) -> f64 {
    let mut l = left_boundary(mpo.chi);
    let mut nrm = Tensor::from_data(&[1, 1], vec![1.0]);
    for t in &state.tensors {
        l = grow_left(&l, &mpo.w, t);
        let x = tensordot(&nrm, t, &[1], &[0]); // [a, s, c']
        nrm = tensordot(t, &x, &[0, 1], &[0, 1]); // [c, c']
    }
    l.get(&[0, mpo.chi - 1, 0]) / nrm.get(&[0, 0])
}

fn op_tensor(op: [[f64; 2]; 2]) -> Tensor {
    let mut t = Tensor::zeros(&[PHYS, PHYS]);
    for s in 0..2 {
        for s2 in 0..2 {
            t.set(&[s, s2], op[s][s2]);
        }
    }
    t
}

/// `E[c, c'] = Σ C[a,s,c] O[s,s'] C[a,s',c']` with a left-canonical left side.
fn open_string(c: &Tensor, op: &Tensor) -> Tensor {
    let oc = tensordot(op, c, &[1], &[1]); // [s, a, c']
    tensordot(c, &oc, &[0, 1], &[1, 0]) // [c, c']
}

/// Correlations, Schmidt spectra and derived observables by contraction.
pub fn mps_measure(state: &MpsState, oscillating_fit: bool) -> Observables {
    let n = state.len();
    let mut st = state.clone();
    st.right_canonicalize();
    let ops = [op_tensor(splus()), op_tensor(sminus()), op_tensor(sz())];
    let mut spm = DMatrix::<f64>::zeros(n, n);
    let mut zz = DMatrix::<f64>::zeros(n, n);
    let mut entropy = Vec::with_capacity(n - 1);
    for i in 0..n {
        let c = st.tensors[i].clone();
        // probability of up at site i
        spm[(i, i)] = (0..c.dims[0])
            .flat_map(|a| (0..c.dims[2]).map(move |b| (a, b)))
            .map(|(a, b)| c.get(&[a, 1, b]).powi(2))
            .sum();
        if i + 1 < n {
            // strings: (S⁺_i, S⁻_j) -> spm[i][j], (S⁻_i, S⁺_j) -> spm[j][i], (Sz_i, Sz_j) -> zz
            let pairs = [(0usize, 1usize), (1, 0), (2, 2)];
            let mut strings: Vec<Tensor> = pairs.iter().map(|&(a, _)| open_string(&c, &ops[a])).collect();
            for j in i + 1..n {
                let b = &st.tensors[j];
                for (k, &(_, bop)) in pairs.iter().enumerate() {
                    let eb = tensordot(&strings[k], b, &[1], &[0]); // [c, s', d']
                    let oeb = tensordot(&ops[bop], &eb, &[1], &[1]); // [s, c, d']
                    let val: f64 = {
                        let bp = b.permute(&[1, 0, 2]); // [s, c, d]
                        bp.data.iter().zip(&oeb.data).map(|(x, y)| x * y).sum()
                    };
                    match k {
                        0 => spm[(i, j)] = val,
                        1 => spm[(j, i)] = val,
                        _ => {
                            zz[(i, j)] = val;
                            zz[(j, i)] = val;
                        }
                    }
                    if j + 1 < n {
                        strings[k] = tensordot(b, &eb, &[0, 1], &[0, 1]);
                    }
                }
            }
            // move the center right and record the Schmidt values of bond i
            let (dl, dr) = (c.dims[0], c.dims[2]);
            let m = DMatrix::from_column_slice(dl * PHYS, dr, &c.data);
            let (u, s, vt) = svd_checked(&m);
            let k = s.len();
            entropy.push(entropy_from_singular(s.iter().copied()));
            st.tensors[i] = Tensor::from_data(&[dl, PHYS, k], u.as_slice().to_vec());
            let next = &st.tensors[i + 1];
            let nm = DMatrix::from_diagonal(&s) * vt * DMatrix::from_column_slice(dr, PHYS * next.dims[2], &next.data);
            st.tensors[i + 1] = Tensor::from_data(&[k, PHYS, next.dims[2]], nm.as_slice().to_vec());
        }
    }
    for i in 0..n {
        zz[(i, i)] = 0.25;
    }
    let ss = DMatrix::from_fn(n, n, |i, k| if i == k { 0.75 } else { zz[(i, k)] + 0.5 * (spm[(i, k)] + spm[(k, i)]) });
    Observables::from_parts(ss, spm, entropy, oscillating_fit)
}
