use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::interaction::{ExpTerm, Kernel};
use crate::poly::{binom, Poly};
use crate::C64;

/// Most exponentials a TABLE kernel may be fitted with.
pub const TABLE_MAX_TERMS: usize = 6;
/// Largest tolerated TABLE fit error.
pub const TABLE_FIT_TOL: f64 = 1e-10;

/// One kernel term `amplitude * r^alpha * lambda^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpoTerm {
    pub amplitude: f64,
    pub alpha: usize,
    pub lambda: f64,
}

impl From<ExpTerm> for MpoTerm {
    fn from(t: ExpTerm) -> Self {
        Self { amplitude: t.amplitude, alpha: t.alpha, lambda: t.lambda }
    }
}

impl MpoTerm {
    pub fn eval(&self, r: usize) -> f64 {
        self.amplitude * (r as f64).powi(self.alpha as i32) * self.lambda.powi(r as i32)
    }
}

pub(crate) const PHYS: usize = 2;

/// `σ = 0` is down, `σ = 1` is up; `op[s][s']` acts as `|s⟩⟨s'|`.
pub(crate) fn splus() -> [[f64; 2]; 2] {
    [[0.0, 0.0], [1.0, 0.0]]
}
pub(crate) fn sminus() -> [[f64; 2]; 2] {
    [[0.0, 1.0], [0.0, 0.0]]
}
pub(crate) fn sz() -> [[f64; 2]; 2] {
    [[-0.5, 0.0], [0.0, 0.5]]
}
fn ident() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 1.0]]
}

/// Uniform MPO of `Σ_{m>n} J(m-n) (S⁺_m S⁻_n/2 + S⁻_m S⁺_n/2 + Jz S^z_m S^z_n)`.
///
/// Bond state 0 is "nothing placed yet" and state `chi - 1` is "done". Each
/// kernel term of order `alpha` carries a Jordan block of size `alpha + 1` per
/// operator channel, so `chi = 2 + 3 Σ (alpha + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelMpo {
    pub n: usize,
    pub chi: usize,
    pub jz: f64,
    pub terms: Vec<MpoTerm>,
    /// Coefficient `μ` of the optional `μ (S^z_tot)²` term.
    pub sz_penalty: f64,
    #[serde(skip)]
    pub(crate) w: Tensor,
}

/// `s_k` with `r^alpha = Σ_k s_k C(r-1, k)`.
fn binomial_basis(alpha: usize) -> Vec<f64> {
    let mut s = vec![0.0; alpha + 1];
    for r in 1..=alpha + 1 {
        let mut acc = (r as f64).powi(alpha as i32);
        for (k, sk) in s.iter().enumerate().take(r - 1) {
            acc -= sk * binom(r - 1, k);
        }
        s[r - 1] = acc;
    }
    s
}

pub fn compile_mpo(kernel: &Kernel, jz: f64, n: usize) -> Result<KernelMpo> {
    compile_mpo_with_penalty(kernel, jz, n, 0.0)
}

pub fn compile_mpo_with_penalty(kernel: &Kernel, jz: f64, n: usize, sz_penalty: f64) -> Result<KernelMpo> {
    if n < 2 {
        return Err(Error::InvalidArgument("MPO needs N >= 2".into()));
    }
    kernel.validate()?;
    let terms: Vec<MpoTerm> = match kernel {
        Kernel::Pow { .. } => {
            return Err(Error::UnsupportedKernel("power-law kernels have no finite MPO".into()));
        }
        Kernel::Table { values } => fit_table(values, n)?,
        k => k.exp_terms()?.into_iter().map(MpoTerm::from).collect(),
    };
    compile_terms(terms, jz, n, sz_penalty)
}

/// MPO of an explicit sum of kernel terms.
pub fn compile_terms(terms: Vec<MpoTerm>, jz: f64, n: usize, sz_penalty: f64) -> Result<KernelMpo> {
    if n < 2 {
        return Err(Error::InvalidArgument("MPO needs N >= 2".into()));
    }
    let mut channels: Vec<(MpoTerm, [[f64; 2]; 2], [[f64; 2]; 2], f64)> = Vec::new();
    for t in &terms {
        channels.push((*t, sminus(), splus(), 0.5));
        channels.push((*t, splus(), sminus(), 0.5));
        channels.push((*t, sz(), sz(), jz));
    }
    if sz_penalty != 0.0 {
        // μ (Σ S^z)² = μ N/4 + 2μ Σ_{m>n} S^z_m S^z_n
        channels.push((MpoTerm { amplitude: 1.0, alpha: 0, lambda: 1.0 }, sz(), sz(), 2.0 * sz_penalty));
    }
    let chi = 2 + channels.iter().map(|c| c.0.alpha + 1).sum::<usize>();
    let fin = chi - 1;
    let mut w = Tensor::zeros(&[chi, chi, PHYS, PHYS]);
    let put = |w: &mut Tensor, b: usize, b2: usize, op: [[f64; 2]; 2], c: f64| {
        for s in 0..2 {
            for s2 in 0..2 {
                let o = w.offset(&[b, b2, s, s2]);
                w.data[o] += c * op[s][s2];
            }
        }
    };
    put(&mut w, 0, 0, ident(), 1.0);
    put(&mut w, fin, fin, ident(), 1.0);
    if sz_penalty != 0.0 {
        put(&mut w, 0, fin, ident(), 0.25 * sz_penalty);
    }
    let mut base = 1;
    for (t, left, right, coef) in &channels {
        let size = t.alpha + 1;
        let s = binomial_basis(t.alpha);
        put(&mut w, 0, base, *left, 1.0);
        for k in 0..size {
            put(&mut w, base + k, base + k, ident(), t.lambda);
            if k + 1 < size {
                put(&mut w, base + k, base + k + 1, ident(), t.lambda);
            }
            put(&mut w, base + k, fin, *right, coef * t.amplitude * t.lambda * s[k]);
        }
        base += size;
    }
    Ok(KernelMpo { n, chi, jz, terms, sz_penalty, w })
}

/// Prony fit of `J(r)`, `r = 1..n-1` (zero past the table), by at most
/// `TABLE_MAX_TERMS` real exponentials.
pub fn fit_table(values: &[f64], n: usize) -> Result<Vec<MpoTerm>> {
    let m = n.saturating_sub(1).max(1);
    let y: Vec<f64> = (1..=m).map(|r| values.get(r - 1).copied().unwrap_or(0.0)).collect();
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    if m == 1 {
        return Ok(vec![MpoTerm { amplitude: y[0], alpha: 0, lambda: 1.0 }]);
    }
    for p in 1..=TABLE_MAX_TERMS.min(m / 2) {
        if let Some(terms) = prony(&y, p) {
            let err = (1..=m)
                .map(|r| (terms.iter().map(|t| t.eval(r)).sum::<f64>() - y[r - 1]).abs())
                .fold(0.0, f64::max);
            if err < TABLE_FIT_TOL {
                return Ok(terms);
            }
        }
    }
    Err(Error::UnsupportedKernel(format!(
        "table is not fitted by {TABLE_MAX_TERMS} exponentials to {TABLE_FIT_TOL:e} over the chain"
    )))
}

fn prony(y: &[f64], p: usize) -> Option<Vec<MpoTerm>> {
    let m = y.len();
    if m < 2 * p {
        return None;
    }
    // linear prediction y[i+p] = Σ_k a_k y[i+k]
    let rows = m - p;
    let a = DMatrix::from_fn(rows, p, |i, k| y[i + k]);
    let b = DVector::from_iterator(rows, (0..rows).map(|i| y[i + p]));
    let coef = a.try_svd(true, true, f64::EPSILON, 10_000)?.solve(&b, 1e-14).ok()?;
    let mut c: Vec<C64> = coef.iter().map(|v| C64::new(-v, 0.0)).collect();
    c.push(C64::new(1.0, 0.0));
    let roots = Poly::new(c).roots();
    let lambdas: Vec<f64> = roots
        .iter()
        .map(|z| (z.im.abs() <= 1e-9 * z.norm().max(1e-300)).then_some(z.re))
        .collect::<Option<_>>()?;
    // amplitudes from y_r = Σ_j c_j λ_j^r
    let v = DMatrix::from_fn(m, p, |i, j| lambdas[j].powi(i as i32 + 1));
    let yy = DVector::from_column_slice(y);
    let amp = v.try_svd(true, true, f64::EPSILON, 10_000)?.solve(&yy, 1e-15).ok()?;
    Some(
        lambdas
            .iter()
            .zip(amp.iter())
            .map(|(&lambda, &amplitude)| MpoTerm { amplitude, alpha: 0, lambda })
            .collect(),
    )
}

impl KernelMpo {
    /// Kernel value encoded by the MPO at distance `r`.
    pub fn coupling(&self, r: usize) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    /// Dense `2^N` matrix from contracting the MPO; site `m` is bit `m`.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n > 12 {
            return Err(Error::TooLarge(self.n));
        }
        let chi = self.chi;
        let mut cur: Vec<DMatrix<f64>> = (0..chi)
            .map(|b| {
                let mut m = DMatrix::zeros(2, 2);
                for s in 0..2 {
                    for s2 in 0..2 {
                        m[(s, s2)] = self.w.get(&[0, b, s, s2]);
                    }
                }
                m
            })
            .collect();
        for site in 1..self.n {
            let dim = 1usize << site;
            let mut next = vec![DMatrix::<f64>::zeros(2 * dim, 2 * dim); chi];
            for b in 0..chi {
                if cur[b].iter().all(|&v| v == 0.0) {
                    continue;
                }
                for b2 in 0..chi {
                    for s in 0..2 {
                        for s2 in 0..2 {
                            let wv = self.w.get(&[b, b2, s, s2]);
                            if wv == 0.0 {
                                continue;
                            }
                            let mut blk = next[b2].view_mut((s * dim, s2 * dim), (dim, dim));
                            blk += &cur[b] * wv;
                        }
                    }
                }
            }
            cur = next;
        }
        Ok(cur.swap_remove(chi - 1))
    }
}
