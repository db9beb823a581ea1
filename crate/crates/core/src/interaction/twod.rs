//! Solvable square-lattice model `h = t00 + t_{-1,0} e^{-ik_x} + t_{0,-1} e^{-ik_y}`.
//!
//! Its bound state is `J(x,y) ∝ r_x^x r_y^y (x+y)!/(x! y!)` on `x, y >= 0`,
//! with `r = |t / t00|`. Raising `h^{-1}` to the third power with a shift
//! multiplies the profile by `x y`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile2d {
    /// `j[x][y]`, max-abs normalized.
    pub j: Vec<Vec<f64>>,
    /// `x y J(x,y)`, max-abs normalized.
    pub j_enhanced: Vec<Vec<f64>>,
    /// Binomial factor `F(x,y) = (x+y)!/(x! y!)`.
    pub f: Vec<Vec<f64>>,
    pub xi_x: f64,
    pub xi_y: f64,
}

pub fn profile_2d(t00: f64, t_m10: f64, t_0m1: f64, extent: (usize, usize)) -> Result<Profile2d> {
    if !(t_m10.abs() + t_0m1.abs() < t00.abs()) {
        return Err(Error::InvalidArgument(
            "gap condition |t_-1,0| + |t_0,-1| < |t_00| violated".into(),
        ));
    }
    let (nx, ny) = (extent.0 + 1, extent.1 + 1);
    let rx = (t_m10 / t00).abs();
    let ry = (t_0m1 / t00).abs();
    let mut f = vec![vec![0.0; ny]; nx];
    let mut j = vec![vec![0.0; ny]; nx];
    for x in 0..nx {
        for y in 0..ny {
            if x == 0 && y == 0 {
                f[x][y] = 1.0;
                j[x][y] = 1.0;
                continue;
            }
            let (mut fv, mut jv) = (0.0, 0.0);
            if x > 0 {
                fv += f[x - 1][y];
                jv += rx * j[x - 1][y];
            }
            if y > 0 {
                fv += f[x][y - 1];
                jv += ry * j[x][y - 1];
            }
            f[x][y] = fv;
            j[x][y] = jv;
        }
    }
    let mut je: Vec<Vec<f64>> = (0..nx)
        .map(|x| (0..ny).map(|y| (x * y) as f64 * j[x][y]).collect())
        .collect();
    normalize(&mut j);
    normalize(&mut je);
    Ok(Profile2d {
        j,
        j_enhanced: je,
        f,
        xi_x: -1.0 / rx.ln(),
        xi_y: -1.0 / ry.ln(),
    })
}

fn normalize(a: &mut [Vec<f64>]) {
    let m = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        a.iter_mut().flatten().for_each(|v| *v /= m);
    }
}
