//! Laminates and cases shared by the integration targets.
#![allow(dead_code)]

use cuf_flutter::assembly::BoundaryCondition;
use cuf_flutter::laminate::{Laminate, OrthotropicMaterial};
use cuf_flutter::model::PanelCase;

/// Bending-rigidity modulus for the boron/epoxy cross-ply cases, fixed from
/// the converged clamped fundamental frequency (see README).
pub const BORON_EPOXY_REFERENCE_MODULUS: f64 = 1.9634e11;

pub const ANGLE_PLY_5: [f64; 5] = [45.0, -45.0, 45.0, -45.0, 45.0];
pub const CROSS_PLY_2S: [f64; 8] = [0.0, 90.0, 0.0, 90.0, 90.0, 0.0, 90.0, 0.0];

/// `E_L/E_T = 40`, `G_LT/E_T = 0.6`, `G_TT/E_T = 0.5`, `ν_LT = 0.25`.
pub fn high_modulus_material() -> OrthotropicMaterial {
    OrthotropicMaterial::transversely_isotropic(40.0, 1.0, 0.6, 0.5, 0.25, 1.0).unwrap()
}

pub fn boron_epoxy() -> OrthotropicMaterial {
    OrthotropicMaterial::new(206.84e9, 20.68e9, 20.68e9, 5.17e9, 5.17e9, 4.14e9, 0.3, 0.3, 0.3, 2000.0).unwrap()
}

/// Unit square angle-ply plate, `a/h = 100`.
pub fn angle_ply_case(n: usize) -> PanelCase {
    let lam = Laminate::equal_plies(high_modulus_material(), &ANGLE_PLY_5, 0.01).unwrap();
    let mut c = PanelCase::new(1.0, 1.0, lam);
    c.nx = n;
    c.ny = n;
    c.boundary = BoundaryCondition::Ssss;
    c
}

/// Unit square boron/epoxy `[(0/90)2s]` plate.
pub fn cross_ply_case(n: usize, boundary: BoundaryCondition, a_over_h: f64) -> PanelCase {
    let lam = Laminate::equal_plies(boron_epoxy(), &CROSS_PLY_2S, 1.0 / a_over_h).unwrap();
    let mut c = PanelCase::new(1.0, 1.0, lam);
    c.nx = n;
    c.ny = n;
    c.boundary = boundary;
    c.reference_modulus = Some(BORON_EPOXY_REFERENCE_MODULUS);
    c
}

/// Thin isotropic square plate (`a/h = 1000`, `ν = 0.3`).
pub fn thin_isotropic_case(n: usize) -> PanelCase {
    let iso = OrthotropicMaterial::isotropic(1.0, 0.3, 1.0).unwrap();
    let lam = Laminate::equal_plies(iso, &[0.0], 1e-3).unwrap();
    let mut c = PanelCase::new(1.0, 1.0, lam);
    c.nx = n;
    c.ny = n;
    c
}

pub fn rel(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}
