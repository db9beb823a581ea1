//! Lowest eigenpair of a real symmetric operator given as a matvec closure.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per restart.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Target `‖Hv - E v‖`.
    pub tol: f64,
    /// Seed of the start vector when none is given.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { krylov: 120, max_restarts: 40, tol: 1e-10, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosInfo {
    pub matvecs: usize,
    pub restarts: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Restarted Lanczos with full reorthogonalization.
///
/// Each cycle builds a Krylov basis from the current vector, takes the lowest
/// Ritz pair and restarts from it until the true residual meets `opts.tol`.
pub fn lanczos_ground<F>(dim: usize, matvec: F, start: Option<&[f64]>, opts: &LanczosOptions) -> Result<(f64, Vec<f64>, LanczosInfo)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let (e, v, info) = lanczos_best(dim, matvec, start, opts)?;
    if info.residual < opts.tol {
        Ok((e, v, info))
    } else {
        Err(Error::NotConverged { iters: info.matvecs, residual: info.residual })
    }
}

/// Like [`lanczos_ground`] but returns the last Ritz pair even when the
/// residual target was not met.
pub fn lanczos_best<F>(dim: usize, mut matvec: F, start: Option<&[f64]>, opts: &LanczosOptions) -> Result<(f64, Vec<f64>, LanczosInfo)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let mut v: Vec<f64> = match start {
        Some(s) if s.len() == dim && norm(s) > 0.0 => s.to_vec(),
        _ => {
            let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
            (0..dim).map(|_| rng.random::<f64>() - 0.5).collect()
        }
    };
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![0.0; dim];
    let mut matvecs = 0;
    if dim == 1 {
        matvec(&v, &mut w);
        return Ok((w[0] / v[0], v, LanczosInfo { matvecs: 1, restarts: 0, residual: 0.0 }));
    }
    let mut best = None;
    for restart in 0..=opts.max_restarts {
        let m = opts.krylov.min(dim).max(2);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        basis.push(v.clone());
        for j in 0..m {
            matvec(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if j + 1 == m || b < 1e-14 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
        let y = eig.eigenvectors.column(imin);
        let mut x = vec![0.0; dim];
        for (c, q) in y.iter().zip(&basis) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nx);
        matvec(&x, &mut w);
        matvecs += 1;
        let e = dot(&x, &w);
        let res = w.iter().zip(&x).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        let info = LanczosInfo { matvecs, restarts: restart, residual: res };
        if res < opts.tol {
            return Ok((e, x, info));
        }
        v = x.clone();
        best = Some((e, x, info));
    }
    Ok(best.expect("at least one cycle"))
}
