//! Dense complex polynomials in ascending coefficient order.

use nalgebra::DMatrix;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// `c[i]` multiplies `z^i`.
    pub c: Vec<C64>,
}

impl Poly {
    pub fn new(c: Vec<C64>) -> Self {
        Self { c }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        *self.c.last().unwrap_or(&C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::new(vec![C64::new(0.0, 0.0)]);
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * i as f64)
                .collect(),
        )
    }

    /// Taylor coefficients `b_j = f^{(j)}(z0)/j!`, j = 0..=degree.
    pub fn taylor_at(&self, z0: C64) -> Vec<C64> {
        // repeated synthetic division
        let mut b = self.c.clone();
        let n = b.len();
        for k in 0..n {
            for i in (k..n - 1).rev() {
                let hi = b[i + 1];
                b[i] += hi * z0;
            }
        }
        b
    }

    /// Scale `S_j = Σ_i |a_i| C(i,j) |z0|^{i-j}` bounding rounding error in `taylor_at`.
    pub fn taylor_scale_at(&self, z0: C64) -> Vec<f64> {
        let r = z0.norm();
        let n = self.c.len();
        (0..n)
            .map(|j| {
                (j..n)
                    .map(|i| self.c[i].norm() * binom(i, j) * r.powi((i - j) as i32))
                    .sum()
            })
            .collect()
    }

    /// All roots from the eigenvalues of the companion matrix, each polished
    /// by Newton steps that are kept only while they reduce |f|.
    pub fn roots(&self) -> Vec<C64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        // exact zero roots are split off; a nilpotent companion block stalls Schur
        let zeros = self.c.iter().take_while(|a| a.norm() == 0.0).count().min(n);
        if zeros > 0 {
            let mut out = vec![C64::new(0.0, 0.0); zeros];
            out.extend(Poly::new(self.c[zeros..].to_vec()).roots());
            return out;
        }
        let lead = self.leading();
        let mut comp = DMatrix::<C64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -self.c[i] / lead;
        }
        let seeds: Vec<C64> = match nalgebra::Schur::try_new(comp, f64::EPSILON, 1000 * n) {
            Some(schur) => {
                let (_, t) = schur.unpack();
                (0..n).map(|i| t[(i, i)]).collect()
            }
            None => self.aberth(),
        };
        let d = self.derivative();
        seeds
            .into_iter()
            .map(|mut z| {
                let mut fz = self.eval(z).norm();
                for _ in 0..8 {
                    let dz = d.eval(z);
                    if dz.norm() == 0.0 {
                        break;
                    }
                    let cand = z - self.eval(z) / dz;
                    let fc = self.eval(cand).norm();
                    if fc < fz {
                        z = cand;
                        fz = fc;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// Simultaneous Aberth iteration from points on the Cauchy bound circle.
    fn aberth(&self) -> Vec<C64> {
        let n = self.degree();
        let lead = self.leading().norm();
        let bound = 1.0 + self.c[..n].iter().map(|a| a.norm() / lead).fold(0.0, f64::max);
        let d = self.derivative();
        let mut z: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let ratio = self.eval(z[i]) / d.eval(z[i]);
                let repel: C64 = (0..n).filter(|&j| j != i).map(|j| C64::new(1.0, 0.0) / (z[i] - z[j])).sum();
                let step = ratio / (C64::new(1.0, 0.0) - ratio * repel);
                if step.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / z[i].norm().max(1.0));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Signed Stirling numbers of the first kind `s(n, k)`, as a table indexed `[n][k]`.
pub fn stirling1_table(nmax: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; nmax + 1]; nmax + 1];
    s[0][0] = 1.0;
    for n in 1..=nmax {
        for k in 1..=n {
            s[n][k] = s[n - 1][k - 1] - (n - 1) as f64 * s[n - 1][k];
        }
    }
    s
}
