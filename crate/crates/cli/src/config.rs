//! Run configuration: a TOML document with one table per concern.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use cuf_flutter::assembly::BoundaryCondition;
use cuf_flutter::fem::{ElementOptions, ShearInterpolation};
use cuf_flutter::flutter::SweepOptions;
use cuf_flutter::kinematics::TheoryExpansion;
use cuf_flutter::laminate::{Laminate, OrthotropicMaterial, Ply};
use cuf_flutter::model::{FlowOptions, PanelCase, SolverStrategy, SweepAxis};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
}

fn invalid<T>(key: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub material: Material,
    pub layup: Layup,
    pub model: ModelSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Length along the flow-reference x axis.
    pub a: f64,
    pub b: f64,
    /// Total thickness; give this or `a_over_h`, or list ply thicknesses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_over_h: Option<f64>,
}

/// Orthotropic ply material; out-of-plane constants default to transverse
/// isotropy (`E_z = E_T`, `G_Lz = G_LT`, `ν_Lz = ν_Tz = ν_LT`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub e_l: f64,
    pub e_t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_z: Option<f64>,
    pub g_lt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_lz: Option<f64>,
    pub g_tz: f64,
    pub nu_lt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_lz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_tz: Option<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layup {
    /// Ply angles in degrees, bottom to top.
    pub angles: Vec<f64>,
    /// Absolute ply thicknesses; plies split `h` equally when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thicknesses: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// `SSSS` or `CCCC`.
    pub boundary: String,
    #[serde(default = "default_theory")]
    pub theory: String,
    /// `field-consistent` or `standard`.
    #[serde(default = "default_shear")]
    pub shear: String,
}

fn default_theory() -> String {
    "sinus-w2".into()
}

fn default_shear() -> String {
    "field-consistent".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub nx: usize,
    pub ny: usize,
    /// Square meshes used by the convergence command.
    pub ladder: Vec<usize>,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            nx: 10,
            ny: 10,
            ladder: vec![5, 10, 14, 20, 30],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    /// Flow direction in degrees from the x axis.
    pub angle: f64,
    pub damped: bool,
    pub mach: f64,
    pub mass_ratio: f64,
}

impl Default for FlowSection {
    fn default() -> Self {
        let d = FlowOptions::default();
        Self {
            angle: d.angle_deg,
            damped: d.damped,
            mach: d.mach,
            mass_ratio: d.mass_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// `sparse` (default), `dense` or `modal`.
    pub strategy: String,
    pub n_modes: usize,
    /// Frequencies reported by the modes and convergence commands.
    pub frequencies: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub coarse_steps: usize,
    pub tol: f64,
    pub tracked_branches: usize,
    /// Modulus in the bending rigidity used for the nondimensional outputs;
    /// `e_t` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_modulus: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SweepOptions::default();
        Self {
            strategy: SolverStrategy::default().to_string(),
            n_modes: 20,
            frequencies: 6,
            lambda_min: s.lambda_star_min,
            lambda_max: s.lambda_star_max,
            coarse_steps: s.coarse_steps,
            tol: s.tol_rel,
            tracked_branches: s.tracked_branches,
            reference_modulus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// `aspect_ratio`, `flow_angle` or `thickness` (`a/h`).
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Stem of every file written by a run.
    pub name: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { name: "run".into() }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_column(text, s.start)).unwrap_or((1, 1));
        ConfigError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(key, format!("must be a positive number, got {v}"))
    }
}

impl RunConfig {
    /// Checks every field; `to_case` relies on this having passed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        positive("geometry.a", g.a)?;
        positive("geometry.b", g.b)?;
        if let Some(h) = g.h {
            positive("geometry.h", h)?;
        }
        if let Some(r) = g.a_over_h {
            positive("geometry.a_over_h", r)?;
        }
        if g.h.is_some() && g.a_over_h.is_some() {
            return invalid("geometry.h", "give either h or a_over_h, not both");
        }

        let m = &self.material;
        for (key, v) in [
            ("material.e_l", m.e_l),
            ("material.e_t", m.e_t),
            ("material.g_lt", m.g_lt),
            ("material.g_tz", m.g_tz),
            ("material.rho", m.rho),
        ] {
            positive(key, v)?;
        }
        for (key, v) in [("material.e_z", m.e_z), ("material.g_lz", m.g_lz)] {
            if let Some(v) = v {
                positive(key, v)?;
            }
        }
        for (key, v) in [("material.nu_lt", Some(m.nu_lt)), ("material.nu_lz", m.nu_lz), ("material.nu_tz", m.nu_tz)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return invalid(key, format!("must be finite, got {v}"));
                }
            }
        }
        if let Err(e) = self.ply_material() {
            return invalid("material", e.to_string());
        }

        let l = &self.layup;
        if l.angles.is_empty() {
            return invalid("layup.angles", "at least one ply is required");
        }
        if let Some(v) = l.angles.iter().find(|v| !v.is_finite()) {
            return invalid("layup.angles", format!("angle {v} is not finite"));
        }
        match &l.thicknesses {
            Some(t) => {
                if t.len() != l.angles.len() {
                    return invalid(
                        "layup.thicknesses",
                        format!("{} thicknesses for {} plies", t.len(), l.angles.len()),
                    );
                }
                for &v in t {
                    positive("layup.thicknesses", v)?;
                }
                let sum: f64 = t.iter().sum();
                if let Some(h) = self.geometry_thickness() {
                    if (sum - h).abs() > 1e-9 * h {
                        return invalid("layup.thicknesses", format!("plies sum to {sum}, geometry gives h = {h}"));
                    }
                }
            }
            None => {
                if self.geometry_thickness().is_none() {
                    return invalid("geometry.h", "thickness missing: set geometry.h, geometry.a_over_h or layup.thicknesses");
                }
            }
        }

        let md = &self.model;
        if let Err(e) = md.boundary.parse::<BoundaryCondition>() {
            return invalid("model.boundary", e.to_string());
        }
        if let Err(e) = TheoryExpansion::by_name(&md.theory, 1.0) {
            return invalid("model.theory", e.to_string());
        }
        self.shear()?;

        let mesh = &self.mesh;
        if mesh.nx == 0 || mesh.ny == 0 {
            return invalid("mesh.nx", format!("mesh must have at least one element per side, got {} x {}", mesh.nx, mesh.ny));
        }
        if mesh.ladder.is_empty() || mesh.ladder.contains(&0) {
            return invalid("mesh.ladder", "needs at least one positive mesh size");
        }

        let f = &self.flow;
        if !f.angle.is_finite() {
            return invalid("flow.angle", "must be finite");
        }
        positive("flow.mass_ratio", f.mass_ratio)?;
        if !(f.mach > 2f64.sqrt() && f.mach.is_finite()) {
            return invalid("flow.mach", format!("must exceed sqrt(2), got {}", f.mach));
        }

        let s = &self.solver;
        if let Err(e) = s.strategy.parse::<SolverStrategy>() {
            return invalid("solver.strategy", e);
        }
        if s.n_modes < 2 {
            return invalid("solver.n_modes", format!("at least 2 modes are required, got {}", s.n_modes));
        }
        if s.frequencies == 0 {
            return invalid("solver.frequencies", "must be at least 1");
        }
        positive("solver.lambda_min", s.lambda_min)?;
        if !(s.lambda_max > s.lambda_min && s.lambda_max.is_finite()) {
            return invalid("solver.lambda_max", format!("must exceed lambda_min = {}, got {}", s.lambda_min, s.lambda_max));
        }
        if s.coarse_steps < 10 {
            return invalid("solver.coarse_steps", format!("must be at least 10, got {}", s.coarse_steps));
        }
        if !(s.tol > 0.0 && s.tol < 0.1) {
            return invalid("solver.tol", format!("must lie in (0, 0.1), got {}", s.tol));
        }
        if s.tracked_branches < 2 {
            return invalid("solver.tracked_branches", format!("must be at least 2, got {}", s.tracked_branches));
        }
        if s.tracked_branches > s.n_modes {
            return invalid(
                "solver.tracked_branches",
                format!("cannot exceed solver.n_modes = {}, got {}", s.n_modes, s.tracked_branches),
            );
        }
        if let Some(e) = s.reference_modulus {
            positive("solver.reference_modulus", e)?;
        }

        if let Some(sw) = &self.sweep {
            self.sweep_axis()?;
            if sw.values.is_empty() {
                return invalid("sweep.values", "needs at least one value");
            }
            if let Some(v) = sw.values.iter().find(|v| !v.is_finite()) {
                return invalid("sweep.values", format!("value {v} is not finite"));
            }
        }

        let name = &self.output.name;
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return invalid("output.name", format!("must be a plain file stem, got `{name}`"));
        }
        Ok(())
    }

    fn geometry_thickness(&self) -> Option<f64> {
        self.geometry.h.or(self.geometry.a_over_h.map(|r| self.geometry.a / r))
    }

    /// Total thickness after resolving `h`, `a_over_h` and ply thicknesses.
    pub fn thickness(&self) -> f64 {
        self.geometry_thickness()
            .or_else(|| self.layup.thicknesses.as_ref().map(|t| t.iter().sum()))
            .expect("validated config has a thickness")
    }

    fn ply_material(&self) -> Result<OrthotropicMaterial, cuf_flutter::laminate::LaminateError> {
        let m = &self.material;
        OrthotropicMaterial::new(
            m.e_l,
            m.e_t,
            m.e_z.unwrap_or(m.e_t),
            m.g_lt,
            m.g_lz.unwrap_or(m.g_lt),
            m.g_tz,
            m.nu_lt,
            m.nu_lz.unwrap_or(m.nu_lt),
            m.nu_tz.unwrap_or(m.nu_lt),
            m.rho,
        )
    }

    fn shear(&self) -> Result<ShearInterpolation, ConfigError> {
        match self.model.shear.to_ascii_lowercase().as_str() {
            "field-consistent" | "field_consistent" => Ok(ShearInterpolation::FieldConsistent),
            "standard" => Ok(ShearInterpolation::Standard),
            other => invalid("model.shear", format!("unknown shear interpolation `{other}` (expected field-consistent or standard)")),
        }
    }

    pub fn sweep_axis(&self) -> Result<SweepAxis, ConfigError> {
        match &self.sweep {
            Some(s) => s.axis.parse().or_else(|e: String| invalid("sweep.axis", e)),
            None => invalid("sweep", "the sweep command needs a [sweep] table or --axis/--values"),
        }
    }

    pub fn laminate(&self) -> Result<Laminate, ConfigError> {
        let material = self.ply_material().or_else(|e| invalid("material", e.to_string()))?;
        let h = self.thickness();
        let n = self.layup.angles.len();
        let thicknesses = self.layup.thicknesses.clone().unwrap_or_else(|| vec![h / n as f64; n]);
        let plies = self
            .layup
            .angles
            .iter()
            .zip(thicknesses)
            .map(|(&angle, thickness)| Ply {
                material,
                angle,
                thickness,
            })
            .collect();
        Laminate::new(plies).or_else(|e| invalid("layup", e.to_string()))
    }

    /// Panel case on the configured mesh.
    pub fn to_case(&self) -> Result<PanelCase, ConfigError> {
        self.validate()?;
        let s = &self.solver;
        let mut case = PanelCase::new(self.geometry.a, self.geometry.b, self.laminate()?);
        case.nx = self.mesh.nx;
        case.ny = self.mesh.ny;
        case.boundary = self.model.boundary.parse().expect("validated");
        case.theory = self.model.theory.clone();
        case.element = ElementOptions {
            shear: self.shear()?,
            ..ElementOptions::default()
        };
        case.flow = FlowOptions {
            angle_deg: self.flow.angle,
            damped: self.flow.damped,
            mach: self.flow.mach,
            mass_ratio: self.flow.mass_ratio,
        };
        case.strategy = s.strategy.parse().expect("validated");
        case.n_modes = s.n_modes;
        case.sweep = SweepOptions {
            lambda_star_min: s.lambda_min,
            lambda_star_max: s.lambda_max,
            coarse_steps: s.coarse_steps,
            tol_rel: s.tol,
            tracked_branches: s.tracked_branches,
        };
        case.reference_modulus = s.reference_modulus;
        Ok(case)
    }

    /// The resolved configuration as TOML, defaults included.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
