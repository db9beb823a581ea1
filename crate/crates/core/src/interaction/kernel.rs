use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Coupling `J(x)` of a spin chain at integer distance `x >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Kernel {
    /// `x e^{-x/ξ}`
    Ple { xi: f64 },
    /// `e^{-x/ξ}`
    Exp { xi: f64 },
    /// `x^{-ξ}`
    Pow { xi: f64 },
    /// `(e^{-x/ξ0} - e^{-x/ξ1}) / (e^{-1/ξ0} - e^{-1/ξ1})`, `ξ1 = ξ0 - μ`
    Diff { xi0: f64, mu: f64 },
    /// `values[x - 1]`, zero beyond the table
    Table { values: Vec<f64> },
}

/// `amplitude * x^alpha * lambda^x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpTerm {
    pub amplitude: f64,
    pub alpha: usize,
    pub lambda: f64,
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidArgument(s));
        match *self {
            Kernel::Ple { xi } | Kernel::Exp { xi } | Kernel::Pow { xi } if !(xi > 0.0) => {
                bad(format!("xi must be positive, got {xi}"))
            }
            Kernel::Diff { xi0, mu } if !(mu > 0.0 && mu < xi0) => {
                bad(format!("diff kernel needs 0 < mu < xi0, got mu={mu}, xi0={xi0}"))
            }
            _ => Ok(()),
        }
    }

    /// `J(x)`; the kernel must be valid.
    pub fn eval(&self, x: usize) -> f64 {
        let xf = x as f64;
        match self {
            Kernel::Ple { xi } => xf * (-xf / xi).exp(),
            Kernel::Exp { xi } => (-xf / xi).exp(),
            Kernel::Pow { xi } => xf.powf(-xi),
            Kernel::Diff { xi0, mu } => {
                let a = 1.0 / xi0;
                let d = 1.0 / (xi0 - mu) - a;
                (-(xf - 1.0) * a).exp() * (-xf * d).exp_m1() / (-d).exp_m1()
            }
            Kernel::Table { values } => {
                if x >= 1 && x <= values.len() {
                    values[x - 1]
                } else {
                    0.0
                }
            }
        }
    }

    /// `J(1..=n)`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|x| self.eval(x)).collect()
    }

    /// Smallest range `R` beyond which `|J| < rel * max|J|`; tables give
    /// their length. Capped at `cap`.
    pub fn cutoff(&self, rel: f64, cap: usize) -> usize {
        match self {
            Kernel::Table { values } => values.len().min(cap),
            Kernel::Pow { .. } => cap,
            _ => {
                let mut mx: f64 = 0.0;
                let mut last = 0;
                for x in 1..=cap {
                    let v = self.eval(x).abs();
                    mx = mx.max(v);
                    if v >= rel * mx {
                        last = x;
                    } else if x > 2 * last.max(1) + 8 {
                        break;
                    }
                }
                last.max(1)
            }
        }
    }

    /// Exact exponential-polynomial representation, when one exists.
    pub fn exp_terms(&self) -> Result<Vec<ExpTerm>> {
        self.validate()?;
        match *self {
            Kernel::Ple { xi } => Ok(vec![ExpTerm { amplitude: 1.0, alpha: 1, lambda: (-1.0 / xi).exp() }]),
            Kernel::Exp { xi } => Ok(vec![ExpTerm { amplitude: 1.0, alpha: 0, lambda: (-1.0 / xi).exp() }]),
            Kernel::Diff { xi0, mu } => {
                let l0 = (-1.0 / xi0).exp();
                let l1 = (-1.0 / (xi0 - mu)).exp();
                let a = 1.0 / (l0 - l1);
                Ok(vec![
                    ExpTerm { amplitude: a, alpha: 0, lambda: l0 },
                    ExpTerm { amplitude: -a, alpha: 0, lambda: l1 },
                ])
            }
            Kernel::Pow { .. } => Err(Error::UnsupportedKernel("power-law kernel has no finite exponential form".into())),
            Kernel::Table { .. } => Err(Error::UnsupportedKernel("table kernels need an exponential fit".into())),
        }
    }
}

pub fn kernel_eval(kernel: &Kernel, x: usize) -> Result<f64> {
    kernel.validate()?;
    if x == 0 {
        return Err(Error::InvalidArgument("kernel distance must be >= 1".into()));
    }
    Ok(kernel.eval(x))
}

/// `|<φ1|φ2>|` of the two sampled profiles after L2 normalization.
pub fn profile_fidelity(p1: &[C64], p2: &[C64]) -> Result<f64> {
    if p1.len() != p2.len() {
        return Err(Error::InvalidArgument("profiles sampled on different windows".into()));
    }
    let n1: f64 = p1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let n2: f64 = p2.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::InvalidArgument("zero-norm profile".into()));
    }
    let ov: C64 = p1.iter().zip(p2).map(|(a, b)| a.conj() * b).sum();
    Ok((ov.norm() / (n1 * n2)).min(1.0))
}
