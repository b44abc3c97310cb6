//! Run configuration read from TOML.
//!
//! ```toml
//! bc = "clamped"
//! eta = "auto"
//! refinements = 2
//!
//! [material]
//! lambda = 762.7e6
//! mu = 104e6
//! alpha = 4.333e6
//! beta = 39.49
//! gamma = 4.688
//! epsilon = 4.675
//! thickness = 0.1
//!
//! [geometry]
//! kind = "rectangle"
//! a = 2.0
//! b = 2.0
//!
//! [load]
//! kind = "sinusoidal"
//! amplitude = 1.0
//! ```

use std::path::{Path, PathBuf};

use cosserat_core::assembly::BcSpec;
use cosserat_core::material::{derive_coefficients, MaterialParams};
use cosserat_core::mesh::{generate_plate_with_hole, generate_rectangle, msh, native, HoleSpec, TriMesh};
use cosserat_core::operator::{build_operator_table, LoadSpec, OperatorTable};
use cosserat_core::solver::{SolverKind, SolverOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub thickness: f64,
    #[serde(default = "one")]
    pub k1: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    Rectangle {
        a: f64,
        b: f64,
        #[serde(default = "four")]
        nx: usize,
        #[serde(default = "four")]
        ny: usize,
    },
    Msh {
        path: PathBuf,
    },
    Hole {
        a: f64,
        b: f64,
        radius: f64,
        center: Option<[f64; 2]>,
        density: f64,
    },
}

fn four() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcConfig {
    Clamped,
    SimplySupported,
}

impl BcConfig {
    pub fn spec(self) -> BcSpec {
        match self {
            BcConfig::Clamped => BcSpec::clamped(),
            BcConfig::SimplySupported => BcSpec::simply_supported(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKindConfig {
    Uniform,
    Sinusoidal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    pub kind: LoadKindConfig,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMode {
    Auto,
}

/// `"auto"` or a fixed number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EtaConfig {
    Mode(EtaMode),
    Fixed(f64),
}

impl Default for EtaConfig {
    fn default() -> Self {
        EtaConfig::Mode(EtaMode::Auto)
    }
}

/// File names inside the output directory; an empty name disables the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsConfig {
    pub csv: String,
    pub resultants_csv: String,
    pub vtk: String,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            csv: "fields.csv".into(),
            resultants_csv: "resultants.csv".into(),
            vtk: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolverMethod::Direct,
            tol: SolverOptions::default().tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MmsBc {
    Dirichlet,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmsConfig {
    pub bc: MmsBc,
    pub amplitudes: [f64; 9],
}

impl Default for MmsConfig {
    fn default() -> Self {
        Self {
            bc: MmsBc::Dirichlet,
            amplitudes: [1.0; 9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfConfig {
    pub radii: Vec<f64>,
    /// Target edge length of the hole-free and holed meshes.
    pub density: f64,
    pub center: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    #[serde(default = "clamped")]
    pub bc: BcConfig,
    pub load: Option<LoadConfig>,
    #[serde(default)]
    pub eta: EtaConfig,
    #[serde(default)]
    pub refinements: usize,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub mms: Option<MmsConfig>,
    pub scf: Option<ScfConfig>,
}

fn clamped() -> BcConfig {
    BcConfig::Clamped
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text)?;
        // relative mesh paths are taken from the config's directory
        if let GeometryConfig::Msh { path: p } = &mut cfg.geometry {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Effective configuration with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.material_params()?;
        if !self.material.k1.is_finite() {
            return Err(invalid("material.k1 must be finite"));
        }
        self.solver_options()?;
        if let EtaConfig::Fixed(e) = self.eta {
            if !e.is_finite() {
                return Err(invalid("eta must be \"auto\" or a finite number"));
            }
        }
        if let Some(l) = &self.load {
            if !l.amplitude.is_finite() {
                return Err(invalid("load.amplitude must be finite"));
            }
        }
        if self.refinements > 8 {
            return Err(invalid("refinements must be at most 8"));
        }
        match &self.geometry {
            GeometryConfig::Rectangle { a, b, nx, ny } => {
                if !(*a > 0.0 && *b > 0.0) || *nx == 0 || *ny == 0 {
                    return Err(invalid("geometry: rectangle needs a, b > 0 and nx, ny >= 1"));
                }
            }
            GeometryConfig::Hole { a, b, radius, density, .. } => {
                if !(*a > 0.0 && *b > 0.0 && *radius > 0.0 && *density > 0.0) {
                    return Err(invalid("geometry: hole needs a, b, radius, density > 0"));
                }
            }
            GeometryConfig::Msh { .. } => {}
        }
        if let Some(s) = &self.scf {
            if !(s.density > 0.0) || s.radii.iter().any(|r| !(*r > 0.0)) {
                return Err(invalid("scf: radii and density must be positive"));
            }
        }
        Ok(())
    }

    pub fn material_params(&self) -> Result<MaterialParams<f64>, ConfigError> {
        let m = &self.material;
        MaterialParams::new(m.lambda, m.mu, m.alpha, m.beta, m.gamma, m.epsilon, m.thickness)
            .map_err(|e| invalid(format!("material: {e}")))
    }

    pub fn operator(&self) -> Result<OperatorTable<f64>, ConfigError> {
        let c = derive_coefficients(&self.material_params()?, self.material.k1)
            .map_err(|e| invalid(format!("material: {e}")))?;
        Ok(build_operator_table(&c))
    }

    pub fn solver_options(&self) -> Result<SolverOptions, ConfigError> {
        let opts = SolverOptions {
            kind: match self.solver.method {
                SolverMethod::Direct => SolverKind::Direct,
                SolverMethod::Iterative => SolverKind::Iterative,
            },
            tol: self.solver.tol,
            ..SolverOptions::default()
        };
        opts.validate().map_err(|e| invalid(format!("solver: {e}")))?;
        Ok(opts)
    }

    pub fn load_spec(&self) -> Result<LoadSpec<f64>, ConfigError> {
        let l = self
            .load
            .as_ref()
            .ok_or_else(|| invalid("missing [load] section"))?;
        match l.kind {
            LoadKindConfig::Uniform => Ok(LoadSpec::uniform(l.amplitude)),
            LoadKindConfig::Sinusoidal => {
                let (a, b) = self.extent()?;
                LoadSpec::sinusoidal(l.amplitude, a, b).map_err(|e| invalid(format!("load: {e}")))
            }
        }
    }

    /// Plate side lengths, needed by the sinusoidal load and the manufactured solution.
    pub fn extent(&self) -> Result<(f64, f64), ConfigError> {
        match &self.geometry {
            GeometryConfig::Rectangle { a, b, .. } | GeometryConfig::Hole { a, b, .. } => Ok((*a, *b)),
            GeometryConfig::Msh { path } => {
                let mesh = read_mesh(path)?;
                let (lo, hi) = mesh.bounding_box();
                Ok((hi[0] - lo[0], hi[1] - lo[1]))
            }
        }
    }

    /// The unrefined mesh described by the geometry block.
    pub fn base_mesh(&self) -> Result<TriMesh<f64>, ConfigError> {
        match &self.geometry {
            GeometryConfig::Rectangle { a, b, nx, ny } => generate_rectangle(*a, *b, *nx, *ny).map_err(invalid),
            GeometryConfig::Msh { path } => read_mesh(path),
            GeometryConfig::Hole { a, b, radius, center, density } => generate_plate_with_hole(&HoleSpec {
                a: *a,
                b: *b,
                radius: *radius,
                center: center.unwrap_or([a / 2.0, b / 2.0]),
                density: *density,
            })
            .map_err(invalid),
        }
    }

    pub fn bc_spec(&self) -> BcSpec {
        let bc = self.bc.spec();
        match self.geometry {
            GeometryConfig::Hole { .. } => bc.with_free(cosserat_core::mesh::SegmentTag::HOLE),
            _ => bc,
        }
    }
}

/// Reads a Gmsh (`.msh`) or native (any other extension) mesh file.
pub fn read_mesh(path: &Path) -> Result<TriMesh<f64>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let where_ = path.display();
    if path.extension().is_some_and(|e| e == "msh") {
        msh::parse_msh(&text).map_err(|e| invalid(format!("{where_}: {e}")))
    } else {
        native::parse_native(&text).map_err(|e| invalid(format!("{where_}: {e}")))
    }
}
