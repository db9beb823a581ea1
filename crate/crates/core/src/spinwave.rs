//! Linear spin waves over the fully polarized state.
//!
//! With unnormalized couplings `J(r)` (`r λ^r`, `λ^r`, `r^{-ξ}` for PLE, EXP
//! and POW) the magnon dispersion is `ω_k = Σ_r J(r) (cos kr - Jz)`. The
//! polarized state is stable while `min_k ω_k >= 0`, i.e. for `Jz` at or
//! below `Jz* = min_k Σ J(r) cos kr / Σ J(r)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interaction::Kernel;

/// `ξ* = -1/ln(2 - √3)`, where the PLE minimum leaves `k = π`.
pub fn ple_threshold() -> f64 {
    -1.0 / (2.0 - 3f64.sqrt()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SwKernel {
    Ple { xi: f64 },
    Exp { xi: f64 },
    Pow { xi: f64 },
}

impl SwKernel {
    pub fn from_kernel(k: &Kernel) -> Result<Self> {
        match *k {
            Kernel::Ple { xi } => Ok(SwKernel::Ple { xi }),
            Kernel::Exp { xi } => Ok(SwKernel::Exp { xi }),
            Kernel::Pow { xi } => Ok(SwKernel::Pow { xi }),
            _ => Err(Error::UnsupportedKernel(format!("{k:?} has no spin-wave closed form"))),
        }
    }

    pub fn xi(&self) -> f64 {
        match *self {
            SwKernel::Ple { xi } | SwKernel::Exp { xi } | SwKernel::Pow { xi } => xi,
        }
    }

    /// Unnormalized coupling `J(r)`.
    pub fn coupling(&self, r: usize) -> f64 {
        let rf = r as f64;
        match *self {
            SwKernel::Ple { xi } => rf * (-rf / xi).exp(),
            SwKernel::Exp { xi } => (-rf / xi).exp(),
            SwKernel::Pow { xi } => rf.powf(-xi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSpec {
    pub kernel: SwKernel,
    pub jz: f64,
    /// `e^{-1/ξ}` for PLE and EXP.
    pub lambda: Option<f64>,
}

impl DispersionSpec {
    pub fn new(kernel: SwKernel, jz: f64) -> Result<Self> {
        let xi = kernel.xi();
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidArgument(format!("xi must be positive, got {xi}")));
        }
        let lambda = match kernel {
            SwKernel::Ple { .. } | SwKernel::Exp { .. } => Some((-1.0 / xi).exp()),
            SwKernel::Pow { .. } => None,
        };
        Ok(Self { kernel, jz, lambda })
    }

    /// `Σ_r J(r)`, the `k = 0` coupling sum; `None` when it diverges.
    pub fn coupling_sum(&self) -> Option<f64> {
        match (self.kernel, self.lambda) {
            (SwKernel::Ple { .. }, Some(l)) => Some(l / (1.0 - l).powi(2)),
            (SwKernel::Exp { .. }, Some(l)) => Some(l / (1.0 - l)),
            (SwKernel::Pow { xi }, _) if xi > 1.0 => Some(zeta(xi)),
            _ => None,
        }
    }

    /// `Σ_r J(r) cos kr`.
    pub fn cosine_sum(&self, k: f64) -> Result<f64> {
        match (self.kernel, self.lambda) {
            (SwKernel::Ple { .. }, Some(l)) => {
                let c = k.cos();
                let d = 1.0 + l * l - 2.0 * l * c;
                Ok(l * ((1.0 + l * l) * c - 2.0 * l) / (d * d))
            }
            (SwKernel::Exp { .. }, Some(l)) => {
                let c = k.cos();
                Ok((l * c - l * l) / (1.0 + l * l - 2.0 * l * c))
            }
            (SwKernel::Pow { xi }, _) => {
                let k = wrap(k);
                if k == 0.0 {
                    return if xi > 1.0 { Ok(zeta(xi)) } else { Err(Error::Divergent("power-law sum at k = 0".into())) };
                }
                Ok(cos_power_sum(xi, k))
            }
            _ => unreachable!("lambda cached for PLE/EXP"),
        }
    }
}

fn wrap(k: f64) -> f64 {
    let mut k = k.rem_euclid(2.0 * PI);
    if k > PI {
        k -= 2.0 * PI;
    }
    k
}

/// `ω_k = Σ_r J(r) (cos kr - Jz)`.
pub fn dispersion(spec: &DispersionSpec, k: f64) -> Result<f64> {
    let cs = spec.cosine_sum(k)?;
    if spec.jz == 0.0 {
        return Ok(cs);
    }
    match spec.coupling_sum() {
        Some(s) => Ok(cs - spec.jz * s),
        None => Err(Error::Divergent("Σ J(r) diverges for power law with xi <= 1".into())),
    }
}

/// Momentum of the dispersion minimum in `[0, π]`.
pub fn k_min(spec: &DispersionSpec) -> f64 {
    match (spec.kernel, spec.lambda) {
        (SwKernel::Ple { xi }, Some(l)) if xi > ple_threshold() => {
            let (l2, l4) = (l * l, l.powi(4));
            let num = (-(l4 - 14.0 * l2 + 1.0) * (l2 - 1.0).powi(2)).max(0.0).sqrt();
            let den = -l4 + 6.0 * l2 - 1.0;
            num.atan2(den)
        }
        _ => PI,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FmBoundary {
    pub jz: f64,
    pub k0: f64,
    /// Power law with `ξ <= 1`: the polarized energy is super-extensive and
    /// the boundary is pinned at `Jz = 0`.
    pub super_extensive: bool,
}

/// `Jz*` with `min_k ω_k(Jz*) = 0`.
pub fn fm_boundary(kernel: SwKernel) -> Result<FmBoundary> {
    let spec = DispersionSpec::new(kernel, 0.0)?;
    let k0 = k_min(&spec);
    let jz = match (kernel, spec.lambda) {
        (SwKernel::Ple { .. }, Some(l)) => {
            let c = k0.cos();
            let d = 1.0 + l * l - 2.0 * l * c;
            (l - 1.0).powi(2) * ((1.0 + l * l) * c - 2.0 * l) / (d * d)
        }
        (SwKernel::Exp { .. }, Some(l)) => (l - 1.0) / (l + 1.0),
        (SwKernel::Pow { xi }, _) => {
            if xi <= 1.0 {
                return Ok(FmBoundary { jz: 0.0, k0, super_extensive: true });
            }
            cos_power_sum(xi, PI) / zeta(xi)
        }
        _ => unreachable!(),
    };
    Ok(FmBoundary { jz, k0, super_extensive: false })
}

/// Minimum of `ω_k` over `[0, π]` by a dense grid and golden-section refinement.
pub fn min_dispersion(spec: &DispersionSpec, grid: usize) -> Result<(f64, f64)> {
    let grid = grid.max(8);
    let h = PI / grid as f64;
    let mut vals = Vec::with_capacity(grid + 1);
    for i in 0..=grid {
        let k = (i as f64 * h).max(if spec.coupling_sum().is_none() { 1e-9 } else { 0.0 });
        vals.push((k, dispersion(spec, k)?));
    }
    let mut best = vals.iter().cloned().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let i = vals.iter().position(|v| v.0 == best.0).unwrap_or(0);
    let (mut a, mut b) = (vals[i.saturating_sub(1)].0, vals[(i + 1).min(grid)].0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        if b - a < 1e-14 {
            break;
        }
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if dispersion(spec, c)? < dispersion(spec, d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let k = 0.5 * (a + b);
    let w = dispersion(spec, k)?;
    if w < best.1 {
        best = (k, w);
    }
    Ok(best)
}

/// Riemann zeta for real `s > 1`: direct sum plus Euler–Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: usize = 32;
    // B_{2j}/(2j)!
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|r| (r as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // (s)_{2j-1} N^{-s-2j+1}
    let mut rising = s;
    let mut pw = n.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * pw;
        let m = 2 * j as i32 + 1;
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        pw /= n * n;
    }
    sum
}

/// Dirichlet eta `Σ (-1)^{r-1} r^{-s}`.
pub fn eta(s: f64) -> f64 {
    -cos_power_sum(s, PI)
}

/// `Σ_{r>=1} cos(kr) r^{-s}` for `k ≠ 0 mod 2π`, `s > 0`.
///
/// Direct sum to `N` plus the asymptotic tail
/// `Re z^N Σ_j b^{(j)}(N)/j! Σ_{m>=0} m^j z^m` with `z = e^{ik}`,
/// `b(r) = r^{-s}`, and `N` large compared to `1/|1 - z|`.
pub fn cos_power_sum(s: f64, k: f64) -> f64 {
    use crate::C64;
    let z = C64::from_polar(1.0, k);
    let omz = C64::new(1.0, 0.0) - z;
    assert!(omz.norm() > 0.0, "k must be nonzero mod 2π");
    let n = (48.0 / omz.norm()).ceil().clamp(64.0, 2.0e7) as usize;
    let direct: f64 = (1..n).map(|r| (k * r as f64).cos() * (r as f64).powf(-s)).sum();

    const JMAX: usize = 40;
    // Stirling numbers of the second kind S(j, i)
    let mut st = vec![vec![0.0f64; JMAX + 1]; JMAX + 1];
    st[0][0] = 1.0;
    for j in 1..=JMAX {
        for i in 1..=j {
            st[j][i] = i as f64 * st[j - 1][i] + st[j - 1][i - 1];
        }
    }
    // g_i = i! z^i / (1-z)^{i+1}
    let mut g = vec![C64::new(0.0, 0.0); JMAX + 1];
    g[0] = 1.0 / omz;
    for i in 1..=JMAX {
        g[i] = g[i - 1] * z * i as f64 / omz;
    }
    let nf = n as f64;
    let mut coef = nf.powf(-s); // b^{(j)}(N)/j!
    let mut tail = C64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for j in 0..=JMAX {
        let (lj, bound): (C64, f64) = if j == 0 {
            (g[0], g[0].norm())
        } else {
            (1..=j).fold((C64::new(0.0, 0.0), 0.0), |(s, b), i| (s + g[i] * st[j][i], b + g[i].norm() * st[j][i]))
        };
        // the bound, not the term, decides: some orders cancel (even j at k = π)
        let t = bound * coef.abs();
        if t > last {
            break;
        }
        last = t;
        tail += lj * coef;
        if last < 1e-20 {
            break;
        }
        coef *= -(s + j as f64) / ((j + 1) as f64 * nf);
    }
    direct + (C64::from_polar(1.0, k * nf) * tail).re
}
