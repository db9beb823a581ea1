use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CharPoly, ChiralClass};
use crate::poly::Poly;
use crate::C64;

/// Roots closer than this (relative) are merged without further checks.
pub const CLUSTER_REL: f64 = 1e-6;
/// Largest relative separation considered for a verified merge.
const MERGE_SEARCH_REL: f64 = 1e-2;
/// Multiple of machine epsilon tolerated in the vanishing Taylor coefficients.
const TAYLOR_K: f64 = 1e3;
/// Roots with `||z| - 1|` below this mark a closed gap.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Location {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCluster {
    pub z: C64,
    pub multiplicity: usize,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub clusters: Vec<ZeroCluster>,
    /// Leading coefficient of `f`.
    pub lead: C64,
    pub p: usize,
    pub q: usize,
    /// Chiral class of the source model.
    pub class: ChiralClass,
}

impl ZeroSet {
    pub fn inside_count(&self) -> usize {
        self.count(Location::Inside)
    }

    pub fn outside_count(&self) -> usize {
        self.count(Location::Outside)
    }

    fn count(&self, loc: Location) -> usize {
        self.clusters
            .iter()
            .filter(|c| c.location == loc)
            .map(|c| c.multiplicity)
            .sum()
    }

    pub fn winding(&self) -> i32 {
        self.inside_count() as i32 - self.p as i32
    }

    /// `x_c = 1 - P`.
    pub fn x_c(&self) -> i32 {
        1 - self.p as i32
    }
}

/// Roots of `f`, grouped into multiplicity clusters and classified against
/// the unit circle.
pub fn find_zeros(cp: &CharPoly) -> Result<ZeroSet> {
    let f = &cp.f;
    if f.degree() == 0 {
        return Ok(ZeroSet {
            clusters: Vec::new(),
            lead: f.leading(),
            p: cp.p,
            q: cp.q,
            class: cp.class,
        });
    }
    let roots = f.roots();
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for r in roots {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - r).norm() <= CLUSTER_REL * c.norm().max(1.0))
        {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m + 1) as f64;
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    // refine the pre-merged clusters and verify them
    for cl in clusters.iter_mut() {
        if cl.1 > 1 {
            cl.0 = refine_center(f, cl.0, cl.1);
        }
    }
    merge_verified(f, &mut clusters);

    let mut out = Vec::with_capacity(clusters.len());
    for (z, m) in clusters {
        let r = z.norm();
        if (r - 1.0).abs() < UNIT_CIRCLE_TOL {
            return Err(Error::GapClosed((r - 1.0).abs()));
        }
        out.push(ZeroCluster {
            z,
            multiplicity: m,
            location: if r < 1.0 { Location::Inside } else { Location::Outside },
        });
    }
    out.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()).then(a.z.arg().total_cmp(&b.z.arg())));
    Ok(ZeroSet {
        clusters: out,
        lead: f.leading(),
        p: cp.p,
        q: cp.q,
        class: cp.class,
    })
}

/// Newton on `f^{(m-1)}`, which has a simple root at an `m`-fold root of `f`.
fn refine_center(f: &Poly, c: C64, m: usize) -> C64 {
    let mut d = f.clone();
    for _ in 0..m - 1 {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = c;
    let mut best = d.eval(z).norm();
    for _ in 0..20 {
        let den = dd.eval(z);
        if den.norm() == 0.0 {
            break;
        }
        let cand = z - d.eval(z) / den;
        let v = d.eval(cand).norm();
        if v < best {
            z = cand;
            best = v;
        } else {
            break;
        }
    }
    z
}

/// Taylor coefficients `j < m` at `c` vanish to rounding accuracy.
fn is_multiple_root(f: &Poly, c: C64, m: usize) -> bool {
    let b = f.taylor_at(c);
    let s = f.taylor_scale_at(c);
    (0..m).all(|j| b[j].norm() <= TAYLOR_K * f64::EPSILON * s[j])
}

/// Greedily merge the closest pair of clusters while the merged root passes
/// the Taylor-coefficient test.
fn merge_verified(f: &Poly, clusters: &mut Vec<(C64, usize)>) {
    let mut rejected: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if rejected.contains(&(i, j)) {
                    continue;
                }
                let (a, b) = (clusters[i].0, clusters[j].0);
                let d = (a - b).norm() / a.norm().max(b.norm()).max(1.0);
                if d < MERGE_SEARCH_REL && best.map(|x| d < x.0).unwrap_or(true) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let (a, ma) = clusters[i];
        let (b, mb) = clusters[j];
        let m = ma + mb;
        let c0 = (a * ma as f64 + b * mb as f64) / m as f64;
        let c = refine_center(f, c0, m);
        if is_multiple_root(f, c, m) {
            clusters[i] = (c, m);
            clusters.remove(j);
            rejected.clear();
        } else {
            rejected.push((i, j));
        }
    }
}
