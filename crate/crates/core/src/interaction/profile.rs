use serde::Serialize;

use super::zeros::{Location, ZeroSet};
use crate::error::{Error, Result};
use crate::lattice::{CharPoly, ChiralClass};
use crate::poly::{binom, factorial, stirling1_table};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `x >= x_c`
    Right,
    /// `x < x_c`
    Left,
}

/// One term `amplitude * n^exponent * zero^n` with `n = x - x_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileTerm {
    pub side: Side,
    pub amplitude: C64,
    pub exponent: usize,
    pub zero: C64,
    /// `1/ξ = -ln(zero)`.
    pub rate: C64,
}

/// Closed-form profile sampled on an integer window.
///
/// For `SigmaZ` sources `b` holds the profile on sublattice B and `a` is
/// identically zero. For `SigmaX` sources both sublattices carry weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionProfile {
    pub class: ChiralClass,
    pub x_c: i32,
    pub terms: Vec<ProfileTerm>,
    /// Inclusive integer window.
    pub window: (i32, i32),
    /// Max-abs of the raw samples; the stored samples are divided by it.
    pub scale: f64,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

impl InteractionProfile {
    /// Unnormalized residue sum of the `SigmaZ` form at `x`.
    pub fn raw(&self, x: i32) -> C64 {
        let n = x - self.x_c;
        let side = if n >= 0 { Side::Right } else { Side::Left };
        let nf = n as f64;
        self.terms
            .iter()
            .filter(|t| t.side == side)
            .map(|t| t.amplitude * nf.powi(t.exponent as i32) * t.zero.powi(n))
            .sum()
    }

    fn raw_pair(&self, x: i32) -> (C64, C64) {
        match self.class {
            ChiralClass::SigmaZ => (C64::new(0.0, 0.0), self.raw(x)),
            ChiralClass::SigmaX => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let m = self.raw(-x).conj();
                let p = self.raw(x);
                ((m - p) * s, (m + p) * s)
            }
        }
    }

    /// Normalized value on sublattice A.
    pub fn eval_a(&self, x: i32) -> C64 {
        self.raw_pair(x).0 / self.scale
    }

    /// Normalized value on sublattice B.
    pub fn eval_b(&self, x: i32) -> C64 {
        self.raw_pair(x).1 / self.scale
    }

    pub fn xs(&self) -> impl Iterator<Item = i32> {
        self.window.0..=self.window.1
    }

    /// Position of the largest `|J|` on sublattice B.
    pub fn argmax_b(&self) -> i32 {
        let mut best = (self.window.0, -1.0);
        for (x, v) in self.xs().zip(&self.b) {
            if v.norm() > best.1 {
                best = (x, v.norm());
            }
        }
        best.0
    }

    pub fn max_exponent(&self, side: Side) -> Option<usize> {
        self.terms.iter().filter(|t| t.side == side).map(|t| t.exponent).max()
    }
}

/// Series of `(d + w)^{-n}` in `w`, truncated to `len` terms.
fn inverse_power_series(d: C64, n: usize, len: usize) -> Vec<C64> {
    (0..len)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * binom(n + k - 1, k) * d.powi(-((n + k) as i32))
        })
        .collect()
}

fn series_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let len = a.len();
    let mut out = vec![C64::new(0.0, 0.0); len];
    for i in 0..len {
        for j in 0..len - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Residue-sum terms of `z^n / f(z)`.
fn residue_terms(zs: &ZeroSet) -> Result<Vec<ProfileTerm>> {
    let mmax = zs.clusters.iter().map(|c| c.multiplicity).max().unwrap_or(1);
    let s1 = stirling1_table(mmax);
    let mut terms = Vec::new();
    for (mu, c) in zs.clusters.iter().enumerate() {
        if c.z.norm() == 0.0 {
            return Err(Error::InvalidModel("zero of f at the origin".into()));
        }
        let m = c.multiplicity;
        // Taylor series of 1/(a Π_{ν≠μ} (z - z_ν)^{n_ν}) around z_μ
        let mut fser = vec![C64::new(0.0, 0.0); m];
        fser[0] = 1.0 / zs.lead;
        for (nu, o) in zs.clusters.iter().enumerate() {
            if nu != mu {
                fser = series_mul(&fser, &inverse_power_series(c.z - o.z, o.multiplicity, m));
            }
        }
        let (side, sign) = match c.location {
            Location::Inside => (Side::Right, 1.0),
            Location::Outside => (Side::Left, -1.0),
        };
        for alpha in 0..m {
            let mut r = C64::new(0.0, 0.0);
            for s in alpha..m {
                r += s1[s][alpha] / factorial(s) * c.z.powi(-(s as i32)) * fser[m - 1 - s];
            }
            terms.push(ProfileTerm {
                side,
                amplitude: r * sign,
                exponent: alpha,
                zero: c.z,
                rate: -c.z.ln(),
            });
        }
    }
    Ok(terms)
}

/// Closed-form profile from the zeros, sampled on the inclusive `window`
/// and normalized to unit max-abs.
pub fn analytic_profile(zs: &ZeroSet, window: (i32, i32)) -> Result<InteractionProfile> {
    if window.1 < window.0 {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    let mut prof = InteractionProfile {
        class: zs.class,
        x_c: zs.x_c(),
        terms: residue_terms(zs)?,
        window,
        scale: 1.0,
        a: Vec::new(),
        b: Vec::new(),
    };
    let (a, b): (Vec<C64>, Vec<C64>) = (window.0..=window.1).map(|x| prof.raw_pair(x)).unzip();
    let scale = a.iter().chain(&b).map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidModel("profile vanishes on the window".into()));
    }
    prof.scale = scale;
    prof.a = a.into_iter().map(|v| v / scale).collect();
    prof.b = b.into_iter().map(|v| v / scale).collect();
    Ok(prof)
}

/// Unnormalized `(1/2π) ∫ e^{ik(n+1)} / f(e^{ik}) dk`, `n = x - x_c`, by the
/// trapezoid rule on `npts` points.
pub fn contour_profile(cp: &CharPoly, window: (i32, i32), npts: usize) -> Vec<C64> {
    let x_c = 1 - cp.p as i32;
    let inv: Vec<(C64, C64)> = (0..npts)
        .map(|j| {
            let k = 2.0 * std::f64::consts::PI * j as f64 / npts as f64;
            let z = C64::from_polar(1.0, k);
            (z, 1.0 / cp.f.eval(z))
        })
        .collect();
    (window.0..=window.1)
        .map(|x| {
            let e = x - x_c + 1;
            let s: C64 = inv.iter().map(|(z, g)| z.powi(e) * g).sum();
            s / npts as f64
        })
        .collect()
}
