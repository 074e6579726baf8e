//! Whole-model checks against classical thin-plate solutions.

mod common;

use common::{rel, thin_isotropic_case};
use cuf_flutter::fem::ShearInterpolation;
use cuf_flutter::model::SweepAxis;
use faer::Mat;
use std::f64::consts::PI;

/// Critical `λ*` of a simply supported Kirchhoff plate from a Galerkin
/// expansion in `sin(mπx/a) sin(πy/b)`, `m = 1..=terms`.
fn galerkin_flutter(aspect: f64, terms: usize) -> f64 {
    let pencil = |lambda: f64| {
        Mat::from_fn(terms, terms, |i, j| {
            let (p, m) = ((i + 1) as f64, (j + 1) as f64);
            if i == j {
                PI.powi(4) * (p * p + aspect * aspect).powi(2)
            } else if (i + j) % 2 == 1 {
                lambda * 4.0 * m * p / (p * p - m * m)
            } else {
                0.0
            }
        })
    };
    let complex = |lambda: f64| {
        pencil(lambda)
            .eigenvalues()
            .unwrap()
            .iter()
            .any(|v| v.im.abs() > 1e-9 * v.norm())
    };
    let mut lo = 1.0;
    let mut hi = lo;
    while !complex(hi) {
        lo = hi;
        hi += 5.0;
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if complex(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn galerkin_oracle_is_converged() {
    // sanity of the oracle itself: adding terms stops changing the answer
    let a = galerkin_flutter(1.0, 12);
    let b = galerkin_flutter(1.0, 16);
    assert!(rel(a, b) < 1e-4, "{a} {b}");
    assert!((500.0..530.0).contains(&b), "{b}");
}

#[test]
fn thin_plate_flutter_matches_galerkin() {
    let base = thin_isotropic_case(20);
    for aspect in [1.0, 2.0] {
        let fe = base
            .with_axis(SweepAxis::AspectRatio, aspect)
            .unwrap()
            .build()
            .unwrap()
            .flutter()
            .unwrap();
        let oracle = galerkin_flutter(aspect, 16);
        assert!(rel(fe.lambda_star_cr, oracle) < 0.02, "a/b = {aspect}: {} vs {oracle}", fe.lambda_star_cr);
    }
}

#[test]
fn thin_plate_frequencies_follow_navier() {
    // ω* = π² (m² + n²) for a simply supported square plate
    let f = thin_isotropic_case(30).build().unwrap().frequencies(4).unwrap();
    let w: Vec<f64> = f.iter().map(|x| x.omega_star).collect();
    assert!(rel(w[0], 2.0 * PI * PI) < 0.01, "{w:?}");
    for (got, expected) in w.iter().zip([1.0, 2.5, 2.5, 4.0]) {
        assert!(rel(got / w[0], expected) < 0.01, "{w:?}");
    }
}

#[test]
fn field_consistent_shear_avoids_locking() {
    let exact = 2.0 * PI * PI;
    let error = |shear| {
        let mut c = thin_isotropic_case(10);
        c.element.shear = shear;
        rel(c.build().unwrap().frequencies(1).unwrap()[0].omega_star, exact)
    };
    let consistent = error(ShearInterpolation::FieldConsistent);
    let standard = error(ShearInterpolation::Standard);
    assert!(consistent < 0.02, "{consistent}");
    assert!(standard >= 10.0 * consistent, "{standard} vs {consistent}");
}

#[test]
fn flutter_boundary_scales_out_plate_size() {
    // λ* and ω* are invariant when a, b and h scale together
    let base = thin_isotropic_case(8);
    let mut big = base.clone();
    big.a = 3.0;
    big.b = 3.0;
    big.laminate = big.laminate.scaled_to(3e-3).unwrap();
    let r1 = base.build().unwrap().flutter().unwrap();
    let r2 = big.build().unwrap().flutter().unwrap();
    assert!(rel(r2.lambda_star_cr, r1.lambda_star_cr) < 1e-3);
    assert!(rel(r2.omega_star_cr, r1.omega_star_cr) < 1e-3);
}
