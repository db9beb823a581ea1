//! Classical long-range Ising chain `H = Σ_{m>n} J(m-n) s_m s_n` with open ends.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::interaction::Kernel;

/// Largest chain handled by exhaustive enumeration.
pub const EXACT_MAX_N: usize = 24;
/// Relative kernel tail below which couplings are dropped.
pub const CUTOFF_REL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    pub n: usize,
    pub kernel: Kernel,
    /// Maximum interaction range `R`.
    pub range: usize,
    /// `couplings[r]` is `J(r)` for `r = 1..=range`; index 0 unused.
    couplings: Vec<f64>,
}

impl IsingInstance {
    /// Range from the kernel tail, capped at `n - 1`.
    pub fn new(n: usize, kernel: Kernel) -> Result<Self> {
        let r = kernel.cutoff(CUTOFF_REL, n.saturating_sub(1).max(1));
        Self::with_range(n, kernel, r)
    }

    pub fn with_range(n: usize, kernel: Kernel, range: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("Ising chain needs N >= 2".into()));
        }
        kernel.validate()?;
        let range = range.min(n - 1).max(1);
        let mut couplings = vec![0.0; range + 1];
        for (r, c) in couplings.iter_mut().enumerate().skip(1) {
            *c = kernel.eval(r);
        }
        Ok(Self { n, kernel, range, couplings })
    }

    pub fn j(&self, r: usize) -> f64 {
        if r >= 1 && r <= self.range {
            self.couplings[r]
        } else {
            0.0
        }
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        energy_with(&self.couplings, s)
    }

    fn scale(&self) -> f64 {
        self.couplings.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE) * self.n as f64
    }
}

fn energy_with(j: &[f64], s: &[i8]) -> f64 {
    let n = s.len();
    let r = j.len() - 1;
    let mut e = 0.0;
    for m in 0..n {
        for d in 1..=r.min(n - 1 - m) {
            e += j[d] * (s[m] * s[m + d]) as f64;
        }
    }
    e
}

/// `Σ_{m>n, m-n<=R} J(m-n) s_m s_n`.
pub fn ising_energy(config: &[i8], kernel: &Kernel, range: usize) -> Result<f64> {
    if config.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidArgument("spins must be +1 or -1".into()));
    }
    kernel.validate()?;
    let j: Vec<f64> = (0..=range).map(|r| if r == 0 { 0.0 } else { kernel.eval(r) }).collect();
    Ok(energy_with(&j, config))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingResult {
    pub config: Vec<i8>,
    pub energy: f64,
    pub period: Option<usize>,
    pub method: Method,
}

impl IsingResult {
    fn new(inst: &IsingInstance, mut config: Vec<i8>, method: Method) -> Self {
        if config[0] < 0 {
            config.iter_mut().for_each(|s| *s = -*s);
        }
        let energy = inst.energy(&config);
        let period = detect_period(&config);
        Self { config, energy, period, method }
    }

    /// `+`/`-` string of the configuration.
    pub fn config_string(&self) -> String {
        self.config.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

/// Smallest `T <= N/2` with `s[i+T] = s[i]` across the bulk.
///
/// The bulk drops `e = min(T, (N - 2T)/2)` sites at each end and must still
/// contain at least `T` comparisons. A uniform chain returns 1.
pub fn detect_period(config: &[i8]) -> Option<usize> {
    let n = config.len();
    for t in 1..=n / 2 {
        let e = t.min((n - 2 * t) / 2);
        let hi = n - e - t;
        if hi <= e || hi - e < t {
            continue;
        }
        if (e..hi).all(|i| config[i] == config[i + t]) {
            return Some(t);
        }
    }
    None
}

fn bits_to_config(bits: u64, n: usize) -> Vec<i8> {
    // spin 0 fixed up; spin k (k >= 1) is down when bit k-1 is set
    let mut s = vec![1i8; n];
    for k in 1..n {
        if bits >> (k - 1) & 1 == 1 {
            s[k] = -1;
        }
    }
    s
}

fn period_key(p: Option<usize>) -> usize {
    p.unwrap_or(usize::MAX)
}

/// Lower-energy-first ordering; ties by smaller period, then by bit pattern.
fn better(a: (f64, Option<usize>, u64), b: (f64, Option<usize>, u64), tol: f64) -> bool {
    if a.0 < b.0 - tol {
        return true;
    }
    if a.0 > b.0 + tol {
        return false;
    }
    (period_key(a.1), a.2) < (period_key(b.1), b.2)
}

/// Exhaustive minimum over the `2^{N-1}` configurations with `s_1 = +1`.
pub fn ground_exact(inst: &IsingInstance, exec: Exec) -> Result<IsingResult> {
    let n = inst.n;
    if n > EXACT_MAX_N {
        return Err(Error::TooLarge(n));
    }
    let free = n - 1;
    let prefix_bits = free.min(6);
    let inner = free - prefix_bits;
    let tol = 1e-10 * inst.scale();
    let blocks = exec.map(1usize << prefix_bits, |blk| {
        let base = (blk as u64) << inner;
        enumerate_block(inst, base, inner, tol)
    });
    let mut best: Option<(f64, Option<usize>, u64)> = None;
    for cands in blocks {
        for (e, bits) in cands {
            let key = (e, detect_period(&bits_to_config(bits, n)), bits);
            if best.map(|b| better(key, b, tol)).unwrap_or(true) {
                best = Some(key);
            }
        }
    }
    let (_, _, bits) = best.expect("at least one configuration");
    Ok(IsingResult::new(inst, bits_to_config(bits, n), Method::Exact))
}

/// Gray-code walk over the low `inner` bits; returns all configurations
/// within `tol` of the block minimum (capped).
fn enumerate_block(inst: &IsingInstance, base: u64, inner: usize, tol: f64) -> Vec<(f64, u64)> {
    const MAX_TIES: usize = 256;
    let n = inst.n;
    let r = inst.range;
    let j = &inst.couplings;
    let mut s = bits_to_config(base, n);
    let mut e = inst.energy(&s);
    // local fields h_i = Σ_{j≠i} J(|i-j|) s_j
    let mut h = vec![0.0; n];
    for i in 0..n {
        for d in 1..=r {
            if i + d < n {
                h[i] += j[d] * s[i + d] as f64;
            }
            if i >= d {
                h[i] += j[d] * s[i - d] as f64;
            }
        }
    }
    let mut bits = base;
    let mut best = e;
    let mut ties: Vec<(f64, u64)> = vec![(e, bits)];
    let total = 1u64 << inner;
    for g in 1..total {
        let b = g.trailing_zeros() as usize;
        let k = b + 1;
        let sk = s[k] as f64;
        e -= 2.0 * sk * h[k];
        s[k] = -s[k];
        let ds = -2.0 * sk;
        for d in 1..=r {
            if k + d < n {
                h[k + d] += j[d] * ds;
            }
            if k >= d {
                h[k - d] += j[d] * ds;
            }
        }
        bits ^= 1 << b;
        if e < best - tol {
            best = e;
            ties.clear();
            ties.push((e, bits));
        } else if e <= best + tol && ties.len() < MAX_TIES {
            ties.push((e, bits));
        }
    }
    ties.retain(|t| t.0 <= best + tol);
    ties
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    /// Start temperature in units of `max_r |J(r)|`.
    pub t_start: f64,
    /// Final temperature in units of `max_r |J(r)|`.
    pub t_end: f64,
    /// Block-flip attempts per sweep, as a fraction of `N`.
    pub block_fraction: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self { sweeps: 2000, t_start: 2.0, t_end: 1e-3, block_fraction: 0.5 }
    }
}

struct Chain<'a> {
    inst: &'a IsingInstance,
    s: Vec<i8>,
    h: Vec<f64>,
    e: f64,
}

impl<'a> Chain<'a> {
    fn new(inst: &'a IsingInstance, s: Vec<i8>) -> Self {
        let mut c = Chain { inst, h: vec![0.0; s.len()], e: inst.energy(&s), s };
        c.recompute_fields();
        c
    }

    fn recompute_fields(&mut self) {
        let n = self.s.len();
        for i in 0..n {
            let mut acc = 0.0;
            for d in 1..=self.inst.range {
                if i + d < n {
                    acc += self.inst.j(d) * self.s[i + d] as f64;
                }
                if i >= d {
                    acc += self.inst.j(d) * self.s[i - d] as f64;
                }
            }
            self.h[i] = acc;
        }
    }

    fn flip_delta(&self, i: usize) -> f64 {
        -2.0 * self.s[i] as f64 * self.h[i]
    }

    /// Energy change of flipping the segment `[a, b)`.
    fn block_delta(&self, a: usize, b: usize) -> f64 {
        let mut cross = 0.0;
        for i in a..b {
            let mut inner = 0.0;
            for jx in a..b {
                if jx != i {
                    inner += self.inst.j(i.abs_diff(jx)) * self.s[jx] as f64;
                }
            }
            cross += self.s[i] as f64 * (self.h[i] - inner);
        }
        -2.0 * cross
    }

    fn flip_block(&mut self, a: usize, b: usize, de: f64) {
        let n = self.s.len();
        for i in a..b {
            let ds = -2.0 * self.s[i] as f64;
            self.s[i] = -self.s[i];
            for d in 1..=self.inst.range {
                if i + d < n {
                    self.h[i + d] += self.inst.j(d) * ds;
                }
                if i >= d {
                    self.h[i - d] += self.inst.j(d) * ds;
                }
            }
        }
        self.e += de;
    }

    /// Steepest descent over all single flips and contiguous block flips,
    /// with `O(1)` block energies from 2D prefix sums.
    fn quench(&mut self) {
        let n = self.s.len();
        let tol = 1e-12 * self.inst.scale();
        loop {
            // prefix sums of M_ij = J(|i-j|) s_i s_j
            let mut ps = vec![0.0; (n + 1) * (n + 1)];
            let idx = |i: usize, j: usize| i * (n + 1) + j;
            for i in 0..n {
                for jx in 0..n {
                    let m = if i == jx { 0.0 } else { self.inst.j(i.abs_diff(jx)) * (self.s[i] * self.s[jx]) as f64 };
                    ps[idx(i + 1, jx + 1)] = m + ps[idx(i, jx + 1)] + ps[idx(i + 1, jx)] - ps[idx(i, jx)];
                }
            }
            let rect = |a: usize, b: usize, c: usize, d: usize| ps[idx(b, d)] - ps[idx(a, d)] - ps[idx(b, c)] + ps[idx(a, c)];
            let mut best = (0.0, 0, 0);
            for a in 0..n {
                for b in a + 1..=n {
                    if a == 0 && b == n {
                        continue;
                    }
                    // rows in segment, columns outside
                    let cross = rect(a, b, 0, n) - rect(a, b, a, b);
                    let de = -2.0 * cross;
                    if de < best.0 - tol {
                        best = (de, a, b);
                    }
                }
            }
            if best.0 >= -tol {
                break;
            }
            self.flip_block(best.1, best.2, best.0);
        }
        self.e = self.inst.energy(&self.s);
    }
}

fn periodic_seed(n: usize, half: usize, phase: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if ((i + phase) / half).is_multiple_of(2) { 1 } else { -1 })
        .collect()
}

/// Best configuration over `restarts` independent annealing runs.
///
/// Even restarts start from random configurations; odd restarts start from
/// periodic `↑^h ↓^h` patterns cycling over `h` and phase. Every run anneals
/// with single and block flips under geometric cooling, and both its seed
/// and its final state are polished by a zero-temperature block-flip quench.
pub fn ground_anneal(
    inst: &IsingInstance,
    schedule: &AnnealSchedule,
    restarts: usize,
    seed: u64,
    exec: Exec,
) -> Result<IsingResult> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    let n = inst.n;
    let seeds: Vec<(usize, usize)> = (1..=n / 2)
        .flat_map(|h| (0..2 * h).map(move |p| (h, p)))
        .collect();
    let runs = exec.map(restarts, |r| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let init: Vec<i8> = if r % 2 == 1 {
            let (h, p) = seeds[(r / 2) % seeds.len()];
            periodic_seed(n, h, p)
        } else {
            (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
        };
        let mut quenched = Chain::new(inst, init.clone());
        quenched.quench();
        let annealed = anneal_once(inst, schedule, init, &mut rng);
        if quenched.e < annealed.0 - 1e-12 * inst.scale() {
            (quenched.e, quenched.s)
        } else {
            annealed
        }
    });
    let tol = 1e-10 * inst.scale();
    let mut best: Option<(f64, Option<usize>, usize)> = None;
    for (r, (e, s)) in runs.iter().enumerate() {
        let key = (*e, detect_period(s), r);
        let take = match best {
            None => true,
            Some(b) => {
                key.0 < b.0 - tol
                    || ((key.0 - b.0).abs() <= tol && (period_key(key.1), key.2) < (period_key(b.1), b.2))
            }
        };
        if take {
            best = Some(key);
        }
    }
    let r = best.expect("restarts >= 1").2;
    Ok(IsingResult::new(inst, runs[r].1.clone(), Method::Anneal))
}

fn anneal_once(inst: &IsingInstance, sch: &AnnealSchedule, init: Vec<i8>, rng: &mut ChaCha20Rng) -> (f64, Vec<i8>) {
    let n = inst.n;
    let jmax = (1..=inst.range).map(|r| inst.j(r).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut c = Chain::new(inst, init);
    let mut best = (c.e, c.s.clone());
    let sweeps = sch.sweeps.max(1);
    let ratio = if sweeps > 1 { (sch.t_end / sch.t_start).powf(1.0 / (sweeps - 1) as f64) } else { 1.0 };
    let mut temp = sch.t_start * jmax;
    let blocks = ((n as f64) * sch.block_fraction).round() as usize;
    let max_len = (2 * inst.range).clamp(2, n / 2);
    for _ in 0..sweeps {
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let de = c.flip_delta(i);
            if de <= 0.0 || rng.random::<f64>() < (-de / temp).exp() {
                c.flip_block(i, i + 1, de);
            }
        }
        for _ in 0..blocks {
            let len = rng.random_range(2..=max_len);
            let a = rng.random_range(0..=n - len);
            let de = c.block_delta(a, a + len);
            if de <= 0.0 || rng.random::<f64>() < (-de / temp).exp() {
                c.flip_block(a, a + len, de);
            }
        }
        if c.e < best.0 {
            best = (c.e, c.s.clone());
        }
        temp *= ratio;
    }
    let mut polished = Chain::new(inst, best.1);
    polished.quench();
    (polished.e, polished.s)
}
