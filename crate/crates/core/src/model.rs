//! Panel cases: geometry, layup and run options bundled into a solvable model.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::assembly::{apply_bc, assemble, AssemblyError, BoundaryCondition, GlobalSystem};
use crate::eigen::{free_vibration, DensePencil, EigenError, ModalBasis, ModalPencil, SparsePencil};
use crate::fem::{build_structured_mesh, ElementOptions, FemError, Mesh, PlateSection};
use crate::flutter::{candidate_count, find_flutter_damped, find_flutter_undamped, AeroDamping, FlutterError, FlutterResult, Nondim, SweepOptions};
use crate::kinematics::{KinematicsError, TheoryExpansion};
use crate::laminate::{Laminate, LaminateError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid case: {0}")]
    Invalid(String),
    #[error(transparent)]
    Laminate(#[from] LaminateError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Flutter(#[from] FlutterError),
}

/// How the flutter pencil is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverStrategy {
    /// Projection on the lowest undamped modes.
    Modal,
    /// Full-order pencil, one dense eigensolve per λ.
    Dense,
    /// Full-order pencil, sparse shift-invert Arnoldi per λ.
    #[default]
    Sparse,
}

impl FromStr for SolverStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "modal" => Ok(Self::Modal),
            "dense" => Ok(Self::Dense),
            "sparse" => Ok(Self::Sparse),
            _ => Err(format!("unknown solver strategy `{s}` (expected modal, dense or sparse)")),
        }
    }
}

impl fmt::Display for SolverStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Modal => "modal",
            Self::Dense => "dense",
            Self::Sparse => "sparse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Flow direction θ′ in degrees from the x axis.
    pub angle_deg: f64,
    pub damped: bool,
    pub mach: f64,
    /// Air-to-panel mass ratio `ρ_a a / (ρ h)`.
    pub mass_ratio: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            angle_deg: 0.0,
            damped: false,
            mach: 2.0,
            mass_ratio: 0.1,
        }
    }
}

/// A complete panel flutter case.
#[derive(Debug, Clone)]
pub struct PanelCase {
    /// Panel length along x.
    pub a: f64,
    /// Panel width along y.
    pub b: f64,
    pub laminate: Laminate,
    pub nx: usize,
    pub ny: usize,
    pub boundary: BoundaryCondition,
    pub theory: String,
    pub element: ElementOptions,
    pub flow: FlowOptions,
    pub strategy: SolverStrategy,
    /// Retained modes for the modal strategy and the damped search.
    pub n_modes: usize,
    pub sweep: SweepOptions,
    /// Modulus in the bending rigidity used for `λ*`, `ω*`; `E_T` of the
    /// first ply when unset.
    pub reference_modulus: Option<f64>,
}

impl PanelCase {
    /// A case with default mesh (10 × 10), SSSS edges, the sinus-w2 theory,
    /// undamped flow along x and the sparse full-order pencil.
    pub fn new(a: f64, b: f64, laminate: Laminate) -> Self {
        Self {
            a,
            b,
            laminate,
            nx: 10,
            ny: 10,
            boundary: BoundaryCondition::Ssss,
            theory: "sinus-w2".into(),
            element: ElementOptions::default(),
            flow: FlowOptions::default(),
            strategy: SolverStrategy::Sparse,
            n_modes: 20,
            sweep: SweepOptions::default(),
            reference_modulus: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::Invalid(m));
        if !(self.a > 0.0 && self.a.is_finite() && self.b > 0.0 && self.b.is_finite()) {
            return bad(format!("panel dimensions must be positive, got a = {}, b = {}", self.a, self.b));
        }
        if self.nx == 0 || self.ny == 0 {
            return bad(format!("mesh must have at least one element per side, got {} x {}", self.nx, self.ny));
        }
        if self.n_modes < 2 {
            return bad(format!("at least two modes are required, got {}", self.n_modes));
        }
        if !(self.flow.mach > 2f64.sqrt()) && self.flow.damped {
            return bad(format!("damped runs need Mach > sqrt(2), got {}", self.flow.mach));
        }
        if !(self.flow.mass_ratio > 0.0) {
            return bad(format!("mass ratio must be positive, got {}", self.flow.mass_ratio));
        }
        if let Some(e) = self.reference_modulus {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("reference modulus must be positive, got {e}"));
            }
        }
        Ok(())
    }

    pub fn thickness(&self) -> f64 {
        self.laminate.thickness()
    }

    pub fn nondim(&self) -> Nondim {
        Nondim::new(&self.laminate, self.a, self.reference_modulus)
    }

    /// Copy of the case with one sweep parameter replaced.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<Self, ModelError> {
        if !(value.is_finite()) {
            return Err(ModelError::Invalid(format!("{axis} value is not finite")));
        }
        let mut case = self.clone();
        match axis {
            SweepAxis::AspectRatio => {
                if value <= 0.0 {
                    return Err(ModelError::Invalid(format!("a/b must be positive, got {value}")));
                }
                case.b = self.a / value;
            }
            SweepAxis::FlowAngle => case.flow.angle_deg = value,
            SweepAxis::Thickness => {
                if value <= 0.0 {
                    return Err(ModelError::Invalid(format!("a/h must be positive, got {value}")));
                }
                case.laminate = self.laminate.scaled_to(self.a / value)?;
            }
        }
        Ok(case)
    }

    /// Assembles the reduced global system.
    pub fn build(&self) -> Result<PanelModel, ModelError> {
        self.validate()?;
        let expansion = TheoryExpansion::by_name(&self.theory, self.thickness())?;
        let section = PlateSection::new(&self.laminate, &expansion)?;
        let mesh = build_structured_mesh(self.a, self.b, self.nx, self.ny)?;
        let full = assemble(&mesh, &section, self.flow.angle_deg, self.element)?;
        let system = apply_bc(&full, &mesh, &section, self.boundary);
        Ok(PanelModel {
            nondim: self.nondim(),
            case: self.clone(),
            mesh,
            section,
            system,
        })
    }
}

/// One natural frequency in the three scalings in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrequency {
    pub omega: f64,
    pub omega_star: f64,
    pub omega_bar: f64,
}

/// An assembled, constrained panel.
#[derive(Debug, Clone)]
pub struct PanelModel {
    pub case: PanelCase,
    pub mesh: Mesh,
    pub section: PlateSection,
    pub system: GlobalSystem,
    pub nondim: Nondim,
}

impl PanelModel {
    pub fn modal_basis(&self, n_modes: usize) -> Result<ModalBasis, ModelError> {
        Ok(free_vibration(&self.system, n_modes)?)
    }

    /// Lowest `n` natural frequencies.
    pub fn frequencies(&self, n: usize) -> Result<Vec<ModeFrequency>, ModelError> {
        let basis = self.modal_basis(n)?;
        Ok(basis
            .omega
            .iter()
            .map(|&omega| ModeFrequency {
                omega,
                omega_star: self.nondim.omega_star(omega),
                omega_bar: self.nondim.omega_bar(omega),
            })
            .collect())
    }

    pub fn aero_damping(&self) -> AeroDamping {
        AeroDamping {
            mach: self.case.flow.mach,
            mass_ratio: self.case.flow.mass_ratio,
            a: self.case.a,
            rho_h: self.nondim.rho_h,
        }
    }

    /// Flutter boundary for the case's damping flag and strategy.
    pub fn flutter(&self) -> Result<FlutterResult, ModelError> {
        self.flutter_with(self.case.flow.damped)
    }

    pub fn flutter_with(&self, damped: bool) -> Result<FlutterResult, ModelError> {
        let opts = &self.case.sweep;
        if damped {
            let aero = self.aero_damping();
            return match self.case.strategy {
                SolverStrategy::Modal => {
                    let basis = self.modal_basis(self.case.n_modes)?;
                    Ok(find_flutter_damped(&ModalPencil::new(&basis), &self.nondim, &aero, opts)?)
                }
                SolverStrategy::Dense => Ok(find_flutter_damped(&DensePencil::new(&self.system)?, &self.nondim, &aero, opts)?),
                SolverStrategy::Sparse => {
                    let count = candidate_count(opts.tracked_branches).min(self.system.size());
                    Ok(find_flutter_damped(&SparsePencil::new(&self.system, count)?, &self.nondim, &aero, opts)?)
                }
            };
        }
        match self.case.strategy {
            SolverStrategy::Modal => {
                let basis = self.modal_basis(self.case.n_modes)?;
                Ok(find_flutter_undamped(&ModalPencil::new(&basis), &self.nondim, opts)?)
            }
            SolverStrategy::Dense => {
                let pencil = DensePencil::new(&self.system)?;
                Ok(find_flutter_undamped(&pencil, &self.nondim, opts)?)
            }
            SolverStrategy::Sparse => {
                let count = candidate_count(opts.tracked_branches).min(self.system.size());
                let pencil = SparsePencil::new(&self.system, count)?;
                Ok(find_flutter_undamped(&pencil, &self.nondim, opts)?)
            }
        }
    }
}

/// Parameter varied by [`parametric_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// `a/b`, with `a` held fixed.
    AspectRatio,
    /// θ′ in degrees.
    FlowAngle,
    /// `a/h`, with ply thickness fractions held fixed.
    Thickness,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aspect_ratio" => Ok(Self::AspectRatio),
            "flow_angle" => Ok(Self::FlowAngle),
            "thickness" => Ok(Self::Thickness),
            _ => Err(format!("unknown sweep axis `{s}` (expected aspect_ratio, flow_angle or thickness)")),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AspectRatio => "aspect_ratio",
            Self::FlowAngle => "flow_angle",
            Self::Thickness => "thickness",
        })
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<FlutterResult, ModelError>,
}

/// Flutter boundary at every grid value. Points run in parallel; a failing
/// point is recorded and the rest of the sweep continues. Results are in
/// grid order.
pub fn parametric_sweep(axis: SweepAxis, grid: &[f64], base: &PanelCase) -> Result<Vec<SweepPoint>, ModelError> {
    if grid.is_empty() {
        return Err(ModelError::Invalid("sweep grid is empty".into()));
    }
    base.validate()?;
    Ok(grid
        .par_iter()
        .map(|&value| SweepPoint {
            value,
            outcome: base.with_axis(axis, value).and_then(|c| c.build()?.flutter()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminate::OrthotropicMaterial;

    fn cross_ply(h: f64) -> Laminate {
        let m = OrthotropicMaterial::transversely_isotropic(10.0, 1.0, 0.25, 0.2, 0.3, 1.0).unwrap();
        Laminate::equal_plies(m, &[0.0, 90.0, 0.0], h).unwrap()
    }

    fn small_case() -> PanelCase {
        let mut c = PanelCase::new(1.0, 1.0, cross_ply(0.01));
        c.nx = 4;
        c.ny = 4;
        c.n_modes = 12;
        c.sweep.lambda_star_max = 20000.0;
        c
    }

    #[test]
    fn names_round_trip() {
        for s in [SolverStrategy::Modal, SolverStrategy::Dense, SolverStrategy::Sparse] {
            assert_eq!(s.to_string().parse::<SolverStrategy>().unwrap(), s);
        }
        for a in [SweepAxis::AspectRatio, SweepAxis::FlowAngle, SweepAxis::Thickness] {
            assert_eq!(a.to_string().parse::<SweepAxis>().unwrap(), a);
        }
        assert!("lanczos".parse::<SolverStrategy>().is_err());
        assert!("mach".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn validation_rejects_bad_cases() {
        let mut c = small_case();
        c.b = -1.0;
        assert!(matches!(c.validate(), Err(ModelError::Invalid(_))));
        let mut c = small_case();
        c.nx = 0;
        assert!(c.validate().is_err());
        let mut c = small_case();
        c.flow.damped = true;
        c.flow.mach = 1.3;
        assert!(c.validate().is_err());
        c.flow.mach = 2.0;
        assert!(c.validate().is_ok());
        let mut c = small_case();
        c.reference_modulus = Some(0.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn axis_substitution() {
        let c = small_case();
        let r = c.with_axis(SweepAxis::AspectRatio, 2.0).unwrap();
        assert_eq!((r.a, r.b), (1.0, 0.5));
        let t = c.with_axis(SweepAxis::Thickness, 20.0).unwrap();
        assert!((t.thickness() - 0.05).abs() < 1e-15);
        assert_eq!(t.laminate.ply_count(), 3);
        let f = c.with_axis(SweepAxis::FlowAngle, 30.0).unwrap();
        assert_eq!(f.flow.angle_deg, 30.0);
        assert!(c.with_axis(SweepAxis::AspectRatio, 0.0).is_err());
        assert!(c.with_axis(SweepAxis::Thickness, f64::NAN).is_err());
    }

    #[test]
    fn frequencies_are_ascending_and_consistent() {
        let m = small_case().build().unwrap();
        let f = m.frequencies(4).unwrap();
        assert!(f.windows(2).all(|w| w[0].omega <= w[1].omega));
        for x in &f {
            assert!(x.omega > 0.0);
            assert!((m.nondim.omega_star(x.omega) - x.omega_star).abs() < 1e-12 * x.omega_star);
        }
    }

    #[test]
    fn strategies_agree_on_a_small_model() {
        let mut c = small_case();
        c.n_modes = 30;
        for damped in [false, true] {
            let run = |s| {
                let mut c = c.clone();
                c.strategy = s;
                c.flow.damped = damped;
                c.build().unwrap().flutter().unwrap().lambda_star_cr
            };
            let dense = run(SolverStrategy::Dense);
            let sparse = run(SolverStrategy::Sparse);
            let modal = run(SolverStrategy::Modal);
            // same full-order system, so only the bisection tolerance separates them
            assert!((sparse - dense).abs() <= 2.0 * c.sweep.tol_rel * dense, "damped {damped}: sparse {sparse} dense {dense}");
            assert!((modal - dense).abs() < 0.01 * dense, "damped {damped}: modal {modal} dense {dense}");
        }
    }

    #[test]
    fn sweep_keeps_grid_order_and_records_failures() {
        let grid = [60.0, -1.0, 0.0, 90.0];
        let pts = parametric_sweep(SweepAxis::FlowAngle, &grid[..1], &small_case()).unwrap();
        assert!(pts[0].outcome.is_ok());
        let pts = parametric_sweep(SweepAxis::Thickness, &grid, &small_case()).unwrap();
        let values: Vec<f64> = pts.iter().map(|p| p.value).collect();
        assert_eq!(values, grid);
        assert!(pts[0].outcome.is_ok() && pts[3].outcome.is_ok());
        assert!(matches!(pts[1].outcome, Err(ModelError::Invalid(_))));
        assert!(pts[2].outcome.is_err());
        assert!(parametric_sweep(SweepAxis::Thickness, &[], &small_case()).is_err());
    }

    #[test]
    fn sweep_matches_individual_runs() {
        let base = small_case();
        let pts = parametric_sweep(SweepAxis::FlowAngle, &[0.0, 45.0], &base).unwrap();
        for p in pts {
            let single = base.with_axis(SweepAxis::FlowAngle, p.value).unwrap().build().unwrap().flutter().unwrap();
            assert_eq!(p.outcome.unwrap().lambda_star_cr, single.lambda_star_cr);
        }
    }
}
