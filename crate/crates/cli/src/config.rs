//! Run configuration: parsing, validation and conversion to library types.

use std::path::Path;

use ionic_lattice::charges::ChargeFile;
use ionic_lattice::{Charges, Interaction, Lattice, PotentialSpec, Route};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-2;
pub const MAX_CELL: usize = 4096;

fn default_tol() -> f64 {
    1e-12
}

fn default_grid() -> usize {
    12
}

fn default_samples() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Preset(LatticePreset),
    Generator {
        /// Rows of the d×d generator; its columns are the basis vectors.
        generator: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticePreset {
    Cubic { dim: usize },
    Orthorhombic { sides: Vec<f64> },
    Triangular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChargeSpec {
    Named(NamedCharges),
    Random { random: RandomCharges },
    Explicit(ChargeFile),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedCharges {
    /// (−1)^{m1+…+md}, needs N = 2.
    Alternating,
    /// √2 cos(2π(m+n)/3) on the triangular lattice, N = 3.
    Honeycomb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCharges {
    #[serde(default = "yes")]
    pub neutral: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<String>,
    pub landscape: Option<String>,
    pub modes: Option<String>,
    pub charges: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(rename = "N", default)]
    pub period: Option<usize>,
    #[serde(default)]
    pub charges: Option<ChargeSpec>,
    #[serde(default)]
    pub routes: Vec<Route>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Ewald splitting parameter for the energy routes; √π when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// α samples for theta landscapes and minimization.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Also write the per-mode table.
    #[serde(default)]
    pub mode_table: bool,
    #[serde(default)]
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks everything that can be checked without running a computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !self.tol.is_finite() || !(MIN_TOL..=MAX_TOL).contains(&self.tol) {
            return bad(format!("tol must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {}", self.tol));
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 0.0) {
                return bad(format!("alpha must be positive and finite, got {a}"));
            }
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return bad(format!("alphas must be positive and finite, got {a}"));
        }
        if self.grid == 0 {
            return bad("grid must be at least 1".into());
        }
        match self.potential {
            Some(PotentialSpec::Riesz { s }) if !s.is_finite() => return bad("s must be finite".into()),
            Some(PotentialSpec::Gaussian { t0, weight }) if !(t0.is_finite() && weight.is_finite()) => {
                return bad("Gaussian parameters must be finite".into())
            }
            _ => {}
        }
        let lattice = self.lattice()?;
        if let Some(n) = self.period {
            let d = lattice.dim() as u32;
            if n == 0 || n.checked_pow(d).is_none_or(|c| c > MAX_CELL) {
                return bad(format!("N = {n} gives more than {MAX_CELL} sites in dimension {d}"));
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        let built = match &self.lattice {
            LatticeSpec::Preset(LatticePreset::Cubic { dim }) => Lattice::cubic(*dim),
            LatticeSpec::Preset(LatticePreset::Orthorhombic { sides }) => Lattice::orthorhombic(sides),
            LatticeSpec::Preset(LatticePreset::Triangular) => Ok(Lattice::triangular()),
            LatticeSpec::Generator { generator } => {
                let d = generator.len();
                if generator.iter().any(|row| row.len() != d) {
                    return Err(CliError::Config("generator must be square".into()));
                }
                Lattice::from_generator(d, generator.concat())
            }
        };
        built.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn potential(&self) -> Result<Interaction, CliError> {
        let spec = self.potential.ok_or_else(|| CliError::Config("missing \"potential\"".into()))?;
        Interaction::from_spec(&spec).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn period(&self) -> Result<usize, CliError> {
        self.period.ok_or_else(|| CliError::Config("missing \"N\"".into()))
    }

    pub fn charges(&self, dim: usize) -> Result<Charges, CliError> {
        let spec = self.charges.as_ref().ok_or_else(|| CliError::Config("missing \"charges\"".into()))?;
        let config = |e: ionic_lattice::Error| CliError::Config(e.to_string());
        let phi = match spec {
            ChargeSpec::Named(NamedCharges::Alternating) => Charges::alternating(dim).map_err(config)?,
            ChargeSpec::Named(NamedCharges::Honeycomb) => {
                if dim != 2 {
                    return Err(CliError::Config("the honeycomb configuration is two-dimensional".into()));
                }
                Charges::honeycomb_triangular()
            }
            ChargeSpec::Random { random } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                Charges::random(dim, self.period()?, random.neutral, &mut rng).map_err(config)?
            }
            ChargeSpec::Explicit(file) => Charges::from_file(file).map_err(config)?,
        };
        if phi.dim() != dim {
            return Err(CliError::Config(format!(
                "charges are {}-dimensional, lattice is {dim}-dimensional",
                phi.dim()
            )));
        }
        if let Some(n) = self.period {
            if n != phi.period() {
                return Err(CliError::Config(format!("charges have period {}, config says N = {n}", phi.period())));
            }
        }
        Ok(phi)
    }
}
