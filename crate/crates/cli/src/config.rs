use std::path::{Path, PathBuf};

use miura_core::gp::{GpConfig, PipelineBoundary};
use miura_core::miura::MiuraConfig;
use miura_core::study::StudyCase;
use miura_core::{Algebra, CliffordField, GridSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    AlgebraCheck,
    Identities,
    MiuraSolve,
    GpRun,
    Kernels,
    ConvergenceStudy,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::AlgebraCheck => "algebra-check",
            CommandKind::Identities => "identities",
            CommandKind::MiuraSolve => "miura-solve",
            CommandKind::GpRun => "gp-run",
            CommandKind::Kernels => "kernels",
            CommandKind::ConvergenceStudy => "convergence-study",
        }
    }
}

/// Closed-form test states with known `Dφ/φ` and `-Δφ/φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiFamily {
    /// `exp(0.1 x1 x2)`
    ExpBilinear,
    /// `exp(0.2 Σ x_j)`
    ExpLinear,
    /// `exp(-|x|²/2)`
    Gaussian,
    Constant,
}

const BILINEAR: f64 = 0.1;
const LINEAR: f64 = 0.2;

impl PhiFamily {
    pub fn phi(self, x: &[f64]) -> f64 {
        match self {
            PhiFamily::ExpBilinear => (BILINEAR * x[0] * x.get(1).copied().unwrap_or(0.0)).exp(),
            PhiFamily::ExpLinear => (LINEAR * x.iter().sum::<f64>()).exp(),
            PhiFamily::Gaussian => (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
            PhiFamily::Constant => 1.0,
        }
    }

    /// Components of `∇ ln φ`.
    pub fn log_gradient(self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        match self {
            PhiFamily::ExpBilinear => {
                if x.len() >= 2 {
                    g[0] = BILINEAR * x[1];
                    g[1] = BILINEAR * x[0];
                }
            }
            PhiFamily::ExpLinear => g.fill(LINEAR),
            PhiFamily::Gaussian => g.iter_mut().zip(x).for_each(|(g, x)| *g = -x),
            PhiFamily::Constant => {}
        }
        g
    }

    /// `-Δφ/φ`.
    pub fn potential(self, x: &[f64]) -> f64 {
        match self {
            PhiFamily::ExpBilinear if x.len() >= 2 => -BILINEAR * BILINEAR * (x[0] * x[0] + x[1] * x[1]),
            PhiFamily::ExpBilinear => 0.0,
            PhiFamily::ExpLinear => -LINEAR * LINEAR * x.len() as f64,
            PhiFamily::Gaussian => x.len() as f64 - x.iter().map(|v| v * v).sum::<f64>(),
            PhiFamily::Constant => 0.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// The potential `-Δφ/φ` of a named state (for gp-run: the state itself).
    Manufactured { phi: PhiFamily },
    /// Scalar field CSV, path relative to the config file.
    Sampled { file: PathBuf },
    #[default]
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_n() -> usize {
    3
}

fn default_samples() -> usize {
    1000
}

impl Default for AlgebraSection {
    fn default() -> Self {
        Self { n: default_n(), samples: default_samples() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub case: StudyCase,
    pub levels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub miura: Option<MiuraConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gp: Option<GpConfig>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub boundary: PipelineBoundary,
    /// Run seed; overrides `miura.seed`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl RunConfig {
    /// Parses JSON text; errors carry `path:line:column`.
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| invalid(format!("{}:{}:{}: {e}", origin.display(), e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<&GridSpec, CliError> {
        self.grid.as_ref().ok_or_else(|| invalid(format!("{} needs a \"grid\" section", self.command.name())))
    }

    /// Miura settings with the run seed applied.
    pub fn miura_config(&self, dim: usize) -> MiuraConfig {
        let mut m = self.miura.clone().unwrap_or_else(|| MiuraConfig::for_dimension(dim));
        m.seed = self.seed;
        m
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let core = |e: miura_core::Error| invalid(e.to_string());
        match self.command {
            CommandKind::AlgebraCheck => {
                let a = self.algebra.clone().unwrap_or_default();
                Algebra::plain(a.n).map_err(core)?;
                if a.samples == 0 {
                    return Err(invalid("algebra.samples must be positive"));
                }
            }
            CommandKind::Identities => {
                let g = self.grid()?;
                if g.dim() < 2 {
                    return Err(invalid("identities needs a grid of dimension >= 2"));
                }
            }
            CommandKind::MiuraSolve => {
                let g = self.grid()?;
                if !(2..=3).contains(&g.dim()) {
                    return Err(invalid("miura-solve needs a 2D or 3D grid"));
                }
                self.miura_config(g.dim()).validate(g.dim()).map_err(core)?;
                if self.boundary == PipelineBoundary::Trace && !matches!(self.potential, PotentialSpec::Manufactured { .. }) {
                    return Err(invalid("boundary \"trace\" needs a manufactured potential (its exact trace)"));
                }
            }
            CommandKind::GpRun => {
                let g = self.grid()?;
                if !(2..=3).contains(&g.dim()) {
                    return Err(invalid("gp-run needs a 2D or 3D grid"));
                }
                self.miura_config(g.dim()).validate(g.dim()).map_err(core)?;
                self.gp.clone().unwrap_or_default().validate().map_err(core)?;
                if self.potential == PotentialSpec::Zero {
                    return Err(invalid("gp-run needs a positive state: set \"potential\" to a manufactured or sampled phi"));
                }
            }
            CommandKind::Kernels => {
                if let Some(gp) = &self.gp {
                    gp.validate().map_err(core)?;
                }
            }
            CommandKind::ConvergenceStudy => {
                let s = self.study.as_ref().ok_or_else(|| invalid("convergence-study needs a \"study\" section"))?;
                if s.levels.len() < 2 || s.levels.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("study.levels must hold at least two increasing node counts"));
                }
                if let Some(&n) = s.levels.iter().find(|&&n| n < miura_core::grid::MIN_COUNT) {
                    return Err(invalid(format!("study level {n} below the minimum node count")));
                }
            }
        }
        Ok(())
    }

    /// Samples the potential (or, for gp-run, the state) on `grid`.
    pub fn sample_potential(&self, grid: &GridSpec, alg: Algebra, base: &Path, as_state: bool) -> Result<CliffordField, CliError> {
        match &self.potential {
            PotentialSpec::Zero => Ok(CliffordField::zeros(grid, alg)),
            PotentialSpec::Manufactured { phi } => {
                let phi = *phi;
                Ok(if as_state {
                    CliffordField::scalar_from_fn(grid, alg, |x| phi.phi(x))
                } else {
                    CliffordField::scalar_from_fn(grid, alg, |x| phi.potential(x))
                })
            }
            PotentialSpec::Sampled { file } => {
                let path = base.join(file);
                let meta = miura_core::field::FieldMeta { grid: grid.clone(), n: alg.n(), witt: false };
                let f = std::fs::File::open(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                let field = CliffordField::read_csv(std::io::BufReader::new(f), &meta)
                    .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                field.real_scalar_values().map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                Ok(field)
            }
        }
    }
}
