//! TOML run configuration. Every table rejects unknown keys.

use std::path::PathBuf;

use ple_core::boundstate::{Boundary, DisorderClass, Emitter};
use ple_core::circuit::CircuitParams;
use ple_core::interaction::Kernel;
use ple_core::ising::{AnnealSchedule, Method};
use ple_core::lattice::{HoppingModel, SigmaXParams};
use ple_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Interaction,
    Boundstate,
    Disorder,
    Ising,
    Spinwave,
    Ed,
    Dmrg,
    Circuit,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Interaction => "interaction",
            CommandKind::Boundstate => "boundstate",
            CommandKind::Disorder => "disorder",
            CommandKind::Ising => "ising",
            CommandKind::Spinwave => "spinwave",
            CommandKind::Ed => "ed",
            CommandKind::Dmrg => "dmrg",
            CommandKind::Circuit => "circuit",
            CommandKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub interaction: Option<InteractionCfg>,
    pub boundstate: Option<BoundstateCfg>,
    pub disorder: Option<DisorderCfg>,
    pub ising: Option<IsingCfg>,
    pub spinwave: Option<SpinwaveCfg>,
    pub ed: Option<EdCfg>,
    pub dmrg: Option<DmrgCfg>,
    pub circuit: Option<CircuitParams>,
    pub sweep: Option<SweepCfg>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let target = match self.command {
            CommandKind::Sweep => {
                let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
                if s.base == CommandKind::Sweep {
                    return Err(CliError::Config("sweep.base cannot be `sweep`".into()));
                }
                if s.param.is_empty() {
                    return Err(CliError::Config("sweep needs at least one [[sweep.param]]".into()));
                }
                s.base
            }
            c => c,
        };
        if !self.has_block(target) {
            return Err(missing(target.name()));
        }
        Ok(())
    }

    pub fn has_block(&self, c: CommandKind) -> bool {
        match c {
            CommandKind::Interaction => self.interaction.is_some(),
            CommandKind::Boundstate => self.boundstate.is_some(),
            CommandKind::Disorder => self.disorder.is_some(),
            CommandKind::Ising => self.ising.is_some(),
            CommandKind::Spinwave => self.spinwave.is_some(),
            CommandKind::Ed => self.ed.is_some(),
            CommandKind::Dmrg => self.dmrg.is_some(),
            CommandKind::Circuit => self.circuit.is_some(),
            CommandKind::Sweep => self.sweep.is_some(),
        }
    }
}

fn missing(block: &str) -> CliError {
    CliError::Config(format!("missing table [{block}] for the selected command"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `(e^{ik} + s)^2 / e^{ik}` with `s = sqrt(6/19)`.
    Fig8,
    /// `(e^{ik} - 3/5)^4 / e^{3ik}`.
    Fig5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hop {
    pub m: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelCfg {
    Preset { name: Preset },
    /// `h(k) = (e^{ik} + s)^2 / e^{ik}`.
    Squared { s: f64 },
    Hoppings { terms: Vec<Hop> },
    SigmaX { tp0: f64, tp1: f64, m0: f64 },
}

impl ModelCfg {
    pub fn build(&self) -> ple_core::Result<HoppingModel> {
        match self {
            ModelCfg::Preset { name: Preset::Fig8 } => Ok(HoppingModel::fig8()),
            ModelCfg::Preset { name: Preset::Fig5 } => Ok(HoppingModel::fig5()),
            ModelCfg::Squared { s } => Ok(HoppingModel::squared_family(*s)),
            ModelCfg::Hoppings { terms } => HoppingModel::sigma_z(terms.iter().map(|h| (h.m, C64::new(h.re, h.im))).collect()),
            ModelCfg::SigmaX { tp0, tp1, m0 } => HoppingModel::sigma_x(SigmaXParams { tp0: *tp0, tp1: *tp1, m0: *m0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionCfg {
    pub model: ModelCfg,
    /// Inclusive `[x_min, x_max]`.
    pub window: [i32; 2],
    /// Quadrature points of the contour cross-check; 0 disables it.
    #[serde(default)]
    pub contour_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundstateCfg {
    pub model: ModelCfg,
    pub l: usize,
    #[serde(default)]
    pub boundary: Boundary,
    pub emitters: Vec<Emitter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderCfg {
    pub model: ModelCfg,
    pub l: usize,
    #[serde(default)]
    pub boundary: Boundary,
    pub emitters: Vec<Emitter>,
    pub class: DisorderClass,
    pub strength: f64,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingCfg {
    pub n: usize,
    pub kernel: Kernel,
    pub method: Method,
    /// Coupling range; defaults to where the kernel falls below 1e-15 of its peak.
    pub range: Option<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub schedule: AnnealSchedule,
}

fn default_restarts() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinwaveCfg {
    pub kernel: Kernel,
    #[serde(default)]
    pub jz: f64,
    /// Number of `k` intervals over `[0, π]` in the dispersion table.
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    512
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdCfg {
    pub n: usize,
    pub kernel: Kernel,
    #[serde(default)]
    pub jz: f64,
    #[serde(default)]
    pub sz: i32,
    /// Include the `(-1)^{N_A}` term in the entropy fit.
    #[serde(default = "yes")]
    pub oscillating_fit: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmrgCfg {
    pub n: usize,
    pub kernel: Kernel,
    #[serde(default)]
    pub jz: f64,
    #[serde(default = "yes")]
    pub oscillating_fit: bool,
    #[serde(default = "default_chi")]
    pub chi_max: usize,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    /// Weight of the `(S^z_tot)^2` term that pins the zero-magnetization sector.
    #[serde(default = "default_penalty")]
    pub sz_penalty: f64,
}

fn default_chi() -> usize {
    128
}
fn default_sweeps() -> usize {
    30
}
fn default_tol() -> f64 {
    1e-9
}
fn default_cutoff() -> f64 {
    1e-10
}
fn default_penalty() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub base: CommandKind,
    /// Grid axes; the grid is their Cartesian product, first axis slowest.
    pub param: Vec<SweepParam>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParam {
    /// Dotted path inside the base command's table, e.g. `kernel.xi`.
    pub name: String,
    pub values: Vec<toml::Value>,
}
