use ple_core::boundstate::{disorder_stats, solve_spec, DisorderSpec, RealSpaceSpec};
use ple_core::circuit::{hoppings_from_circuit, CircuitParams};
use ple_core::dmrg::{compile_mpo_with_penalty, dmrg, mps_measure, DmrgOptions};
use ple_core::interaction::{analytic_profile, contour_profile, exponent_bounds, find_zeros};
use ple_core::ising::{ground_anneal, ground_exact, IsingInstance, Method};
use ple_core::observables::{momenta, Observables};
use ple_core::spinwave::{dispersion, fm_boundary, min_dispersion, DispersionSpec, SwKernel};
use ple_core::xxz_ed::{solve_chain, ChainSpec};
use ple_core::Exec;
use serde_json::{json, Value};

use crate::config::{BoundstateCfg, DisorderCfg, DmrgCfg, EdCfg, InteractionCfg, IsingCfg, SpinwaveCfg};
use crate::output::Csv;
use crate::CliError;

/// Everything one command produces.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    /// `(file stem, table)`.
    pub tables: Vec<(String, Csv)>,
    pub result: Value,
    /// Scalar summary used as a sweep row.
    pub scalars: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl Artifacts {
    fn scalar(&mut self, name: &str, v: f64) {
        self.scalars.push((name.to_string(), v));
    }
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn interaction(cfg: &InteractionCfg) -> Result<Artifacts, CliError> {
    let model = cfg.model.build()?;
    let cp = model.char_poly()?;
    let zs = find_zeros(&cp)?;
    let window = (cfg.window[0], cfg.window[1]);
    let prof = analytic_profile(&zs, window)?;
    let contour = (cfg.contour_points > 0).then(|| contour_profile(&cp, window, cfg.contour_points));
    let mut csv = Csv::new(&["x", "re_a", "im_a", "re_b", "im_b", "abs_b", "re_contour", "im_contour"]);
    for (i, x) in prof.xs().enumerate() {
        let (a, b) = (prof.a[i], prof.b[i]);
        let c = contour.as_ref().map(|c| c[i] / prof.scale);
        csv.push(vec![
            x.into(),
            a.re.into(),
            a.im.into(),
            b.re.into(),
            b.im.into(),
            b.norm().into(),
            c.map_or(f64::NAN, |c| c.re).into(),
            c.map_or(f64::NAN, |c| c.im).into(),
        ]);
    }
    let (right, left) = exponent_bounds(&model)?;
    let gap = model.band_gap();
    let zeros: Vec<Value> = zs
        .clusters
        .iter()
        .map(|c| json!({"re": c.z.re, "im": c.z.im, "multiplicity": c.multiplicity, "location": format!("{:?}", c.location)}))
        .collect();
    let mut a = Artifacts {
        tables: vec![("profile".into(), csv)],
        result: json!({
            "x_c": zs.x_c(),
            "winding": zs.winding(),
            "band_gap": gap,
            "exponent_bounds": [right, left],
            "argmax_b": prof.argmax_b(),
            "zeros": zeros,
            "terms": prof.terms,
        }),
        ..Default::default()
    };
    a.scalar("band_gap", gap);
    a.scalar("winding", zs.winding() as f64);
    a.scalar("argmax_b", prof.argmax_b() as f64);
    Ok(a)
}

fn real_space(model: &crate::config::ModelCfg, l: usize, boundary: ple_core::boundstate::Boundary, emitters: &[ple_core::boundstate::Emitter]) -> Result<RealSpaceSpec, CliError> {
    Ok(RealSpaceSpec { l, boundary, model: model.build()?, emitters: emitters.to_vec() })
}

pub fn boundstate(cfg: &BoundstateCfg) -> Result<Artifacts, CliError> {
    let spec = real_space(&cfg.model, cfg.l, cfg.boundary, &cfg.emitters)?;
    let d = solve_spec(&spec, None)?;
    let (pa, pb) = d.bath_profile(spec.l);
    let mut csv = Csv::new(&["cell", "re_a", "im_a", "re_b", "im_b"]);
    for (c, (a, b)) in pa.iter().zip(&pb).enumerate() {
        csv.push(vec![(c + 1).into(), a.re.into(), a.im.into(), b.re.into(), b.im.into()]);
    }
    let mut a = Artifacts {
        tables: vec![("dressed_state".into(), csv)],
        result: json!({
            "energy": d.energy,
            "emitter_weight": d.emitter_weight,
            "a_weight": d.a_weight(spec.l),
            "edge_energies": d.edge_energies,
            "in_gap_energies": d.in_gap_energies,
        }),
        ..Default::default()
    };
    a.scalar("energy", d.energy);
    a.scalar("emitter_weight", d.emitter_weight);
    a.scalar("a_weight", d.a_weight(spec.l));
    Ok(a)
}

pub fn disorder(cfg: &DisorderCfg, seed: u64, exec: Exec) -> Result<Artifacts, CliError> {
    let spec = real_space(&cfg.model, cfg.l, cfg.boundary, &cfg.emitters)?;
    let ds = DisorderSpec { class: cfg.class, strength: cfg.strength, realizations: cfg.realizations, seed };
    let st = disorder_stats(&spec, &ds, exec)?;
    let mut sites = Csv::new(&["site", "mean_abs", "std_abs"]);
    for (i, (m, s)) in st.mean.iter().zip(&st.std).enumerate() {
        sites.push(vec![i.into(), (*m).into(), (*s).into()]);
    }
    let mut real = Csv::new(&["realization", "energy", "a_weight"]);
    for (i, (e, w)) in st.energies.iter().zip(&st.a_weights).enumerate() {
        real.push(vec![i.into(), (*e).into(), (*w).into()]);
    }
    let max_a = st.a_weights.iter().copied().fold(0.0, f64::max);
    let mut a = Artifacts {
        tables: vec![("sites".into(), sites), ("realizations".into(), real)],
        result: json!({
            "clean_energy": st.clean_energy,
            "failures": st.failures,
            "median_std": st.median_std(),
            "max_energy_shift": st.max_energy_shift(),
            "median_energy_shift": st.median_energy_shift(),
            "max_a_weight": max_a,
        }),
        ..Default::default()
    };
    if st.failures > 0 {
        a.warnings.push(format!("{} realizations had no dressed state", st.failures));
    }
    a.scalar("median_std", st.median_std());
    a.scalar("max_energy_shift", st.max_energy_shift());
    a.scalar("max_a_weight", max_a);
    Ok(a)
}

pub fn ising(cfg: &IsingCfg, seed: u64, exec: Exec) -> Result<Artifacts, CliError> {
    let inst = match cfg.range {
        Some(r) => IsingInstance::with_range(cfg.n, cfg.kernel.clone(), r)?,
        None => IsingInstance::new(cfg.n, cfg.kernel.clone())?,
    };
    let r = match cfg.method {
        Method::Exact => ground_exact(&inst, exec)?,
        Method::Anneal => ground_anneal(&inst, &cfg.schedule, cfg.restarts, seed, exec)?,
    };
    let mut csv = Csv::new(&["site", "spin"]);
    for (i, &s) in r.config.iter().enumerate() {
        csv.push(vec![(i + 1).into(), (s as i64).into()]);
    }
    let mut a = Artifacts {
        tables: vec![("config".into(), csv)],
        result: json!({
            "energy": r.energy,
            "period": r.period,
            "config": r.config_string(),
            "range": inst.range,
        }),
        ..Default::default()
    };
    a.scalar("energy", r.energy);
    a.scalar("period", opt(r.period.map(|p| p as f64)));
    Ok(a)
}

pub fn spinwave(cfg: &SpinwaveCfg) -> Result<Artifacts, CliError> {
    let kernel = SwKernel::from_kernel(&cfg.kernel)?;
    let spec = DispersionSpec::new(kernel, cfg.jz)?;
    let grid = cfg.grid.max(2);
    let mut csv = Csv::new(&["k", "omega"]);
    for i in 0..=grid {
        let k = std::f64::consts::PI * i as f64 / grid as f64;
        // the power law with xi <= 1 diverges at k = 0
        match dispersion(&spec, k) {
            Ok(w) => csv.push(vec![k.into(), w.into()]),
            Err(_) if i == 0 => csv.push(vec![k.into(), f64::NAN.into()]),
            Err(e) => return Err(e.into()),
        }
    }
    let b = fm_boundary(kernel)?;
    let (kmin, wmin) = min_dispersion(&spec, 4 * grid)?;
    let mut a = Artifacts {
        tables: vec![("dispersion".into(), csv)],
        result: json!({
            "fm_boundary_jz": b.jz,
            "k0": b.k0,
            "super_extensive": b.super_extensive,
            "k_min": kmin,
            "omega_min": wmin,
            "fm_stable": wmin >= 0.0,
        }),
        ..Default::default()
    };
    a.scalar("fm_boundary_jz", b.jz);
    a.scalar("k0", b.k0);
    a.scalar("omega_min", wmin);
    Ok(a)
}

fn observable_tables(o: &Observables) -> Vec<(String, Csv)> {
    let mut corr = Csv::new(&["i", "j", "ss", "spm"]);
    for i in 0..o.n {
        for j in 0..o.n {
            corr.push(vec![(i + 1).into(), (j + 1).into(), o.ss[(i, j)].into(), o.spm[(i, j)].into()]);
        }
    }
    let mut sq = Csv::new(&["q", "sxy"]);
    for (q, s) in momenta(o.n).into_iter().zip(&o.sxy) {
        sq.push(vec![q.into(), (*s).into()]);
    }
    let mut ent = Csv::new(&["n_a", "entropy"]);
    for (i, s) in o.entropy.iter().enumerate() {
        ent.push(vec![(i + 1).into(), (*s).into()]);
    }
    vec![("correlations".into(), corr), ("structure_factor".into(), sq), ("entropy".into(), ent)]
}

fn observable_summary(a: &mut Artifacts, energy: f64, o: &Observables) -> Value {
    let c = o.central_charge.map(|f| f.c);
    let eta = o.eta.map(|f| f.eta);
    a.scalar("energy", energy);
    a.scalar("q_peak", o.q_peak);
    a.scalar("central_charge", opt(c));
    a.scalar("eta", opt(eta));
    a.scalar("dimerization", o.dimerization);
    json!({
        "energy": energy,
        "q_peak": o.q_peak,
        "period": o.period(),
        "central_charge": o.central_charge,
        "eta": o.eta,
        "dimerization": o.dimerization,
    })
}

pub fn ed(cfg: &EdCfg) -> Result<Artifacts, CliError> {
    let spec = ChainSpec { n: cfg.n, kernel: cfg.kernel.clone(), jz: cfg.jz, sz: cfg.sz };
    let r = solve_chain(&spec, cfg.oscillating_fit)?;
    let mut a = Artifacts { tables: observable_tables(&r.observables), ..Default::default() };
    let mut v = observable_summary(&mut a, r.energy, &r.observables);
    v["dim"] = json!(r.dim);
    a.result = v;
    Ok(a)
}

pub fn dmrg_run(cfg: &DmrgCfg) -> Result<Artifacts, CliError> {
    let mpo = compile_mpo_with_penalty(&cfg.kernel, cfg.jz, cfg.n, cfg.sz_penalty)?;
    let opts = DmrgOptions {
        chi_max: cfg.chi_max,
        max_sweeps: cfg.max_sweeps,
        tol: cfg.tol,
        cutoff: cfg.cutoff,
        ..Default::default()
    };
    let r = dmrg(&mpo, &opts)?;
    let o = mps_measure(&r.state, cfg.oscillating_fit);
    let mut a = Artifacts { tables: observable_tables(&o), ..Default::default() };
    let mut log = Csv::new(&["sweep", "chi", "energy", "max_truncation"]);
    for s in &r.sweeps {
        log.push(vec![s.sweep.into(), s.chi.into(), s.energy.into(), s.max_truncation.into()]);
    }
    a.tables.push(("convergence".into(), log));
    let mut v = observable_summary(&mut a, r.energy, &o);
    v["converged"] = json!(r.converged);
    v["options"] = json!(opts);
    v["mpo_bond_dimension"] = json!(mpo.chi);
    v["bond_dimensions"] = json!(r.state.bond_dims());
    if !r.converged {
        a.warnings.push(format!("DMRG did not converge in {} sweeps", r.sweeps.len()));
    }
    a.result = v;
    Ok(a)
}

pub fn circuit(p: &CircuitParams) -> Result<Artifacts, CliError> {
    let h = hoppings_from_circuit(p)?;
    let t0 = h.t_mhz(0);
    let mut csv = Csv::new(&["m", "t_mhz", "t_over_t0"]);
    for &(m, t) in &h.hoppings_mhz {
        csv.push(vec![m.into(), t.into(), (if t0 != 0.0 { t / t0 } else { f64::NAN }).into()]);
    }
    let mut a = Artifacts {
        tables: vec![("hoppings".into(), csv)],
        result: serde_json::to_value(&h).map_err(|e| CliError::Io(e.to_string()))?,
        warnings: h.warnings.clone(),
        ..Default::default()
    };
    a.scalar("omega0_hz", h.omega0_hz);
    a.scalar("t0_mhz", t0);
    Ok(a)
}
