//! Through-thickness displacement expansions.
//!
//! Each displacement component is written as `Σ_τ F_τ(z) q_τ(x, y)`. A
//! [`TheoryExpansion`] holds the list of thickness functions `F_τ` for the
//! three components and fixes the nodal DOF ordering used by the element and
//! assembly code.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("expansion index {index} out of range for component {component} ({len} functions)")]
    IndexOutOfRange {
        component: Component,
        index: usize,
        len: usize,
    },
    #[error("unknown theory `{0}` (supported: sinus-w2)")]
    UnknownTheory(String),
    #[error("plate thickness must be positive, got {0}")]
    BadThickness(f64),
}

/// Displacement component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    U,
    V,
    W,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::U, Component::V, Component::W];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::U => "u",
            Component::V => "v",
            Component::W => "w",
        })
    }
}

/// A single thickness function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThicknessFunction {
    /// `z^p`
    Power(u32),
    /// `sin(π z / h)`
    Sine,
}

impl ThicknessFunction {
    pub fn value(self, z: f64, h: f64) -> f64 {
        match self {
            ThicknessFunction::Power(p) => z.powi(p as i32),
            ThicknessFunction::Sine => (PI * z / h).sin(),
        }
    }

    pub fn derivative(self, z: f64, h: f64) -> f64 {
        match self {
            ThicknessFunction::Power(0) => 0.0,
            ThicknessFunction::Power(p) => p as f64 * z.powi(p as i32 - 1),
            ThicknessFunction::Sine => PI / h * (PI * z / h).cos(),
        }
    }
}

/// One nodal degree of freedom: component `component`, expansion index `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DofKind {
    pub component: Component,
    pub tau: usize,
}

/// Thickness functions for u, v and w, bound to a plate thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryExpansion {
    name: String,
    h: f64,
    u: Vec<ThicknessFunction>,
    v: Vec<ThicknessFunction>,
    w: Vec<ThicknessFunction>,
}

impl TheoryExpansion {
    /// Generic expansion; used for degenerate theories in tests.
    pub fn new(
        name: impl Into<String>,
        h: f64,
        u: Vec<ThicknessFunction>,
        v: Vec<ThicknessFunction>,
        w: Vec<ThicknessFunction>,
    ) -> Result<Self, KinematicsError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(KinematicsError::BadThickness(h));
        }
        Ok(Self {
            name: name.into(),
            h,
            u,
            v,
            w,
        })
    }

    /// Sinusoidal in-plane, quadratic transverse displacement:
    /// `u, v ∈ {1, z, sin(πz/h)}`, `w ∈ {1, z, z²}`.
    pub fn sinus_w2(h: f64) -> Result<Self, KinematicsError> {
        use ThicknessFunction::*;
        Self::new(
            "sinus-w2",
            h,
            vec![Power(0), Power(1), Sine],
            vec![Power(0), Power(1), Sine],
            vec![Power(0), Power(1), Power(2)],
        )
    }

    /// Look up a theory by its config name.
    pub fn by_name(name: &str, h: f64) -> Result<Self, KinematicsError> {
        match name.to_ascii_lowercase().as_str() {
            "sinus-w2" | "sinusw2" | "sinus_w2" => Self::sinus_w2(h),
            _ => Err(KinematicsError::UnknownTheory(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn thickness(&self) -> f64 {
        self.h
    }

    pub fn functions(&self, component: Component) -> &[ThicknessFunction] {
        match component {
            Component::U => &self.u,
            Component::V => &self.v,
            Component::W => &self.w,
        }
    }

    pub fn count(&self, component: Component) -> usize {
        self.functions(component).len()
    }

    fn function(&self, component: Component, tau: usize) -> Result<ThicknessFunction, KinematicsError> {
        let fs = self.functions(component);
        fs.get(tau).copied().ok_or(KinematicsError::IndexOutOfRange {
            component,
            index: tau,
            len: fs.len(),
        })
    }

    /// `F_τ(z)` for the given component.
    pub fn eval_f(&self, component: Component, tau: usize, z: f64) -> Result<f64, KinematicsError> {
        Ok(self.function(component, tau)?.value(z, self.h))
    }

    /// `dF_τ/dz (z)` for the given component.
    pub fn eval_df_dz(&self, component: Component, tau: usize, z: f64) -> Result<f64, KinematicsError> {
        Ok(self.function(component, tau)?.derivative(z, self.h))
    }

    /// Nodal DOF layout: τ-major, then u, v, w. For SINUS-W2 this is
    /// `(u0, v0, w0, u1, v1, w1, u2, v2, w2)`.
    pub fn dof_layout(&self) -> Vec<DofKind> {
        let max = self.u.len().max(self.v.len()).max(self.w.len());
        let mut out = Vec::with_capacity(self.dofs_per_node());
        for tau in 0..max {
            for c in Component::ALL {
                if tau < self.count(c) {
                    out.push(DofKind { component: c, tau });
                }
            }
        }
        out
    }

    pub fn dofs_per_node(&self) -> usize {
        self.u.len() + self.v.len() + self.w.len()
    }

    /// Position of `(component, tau)` within a node's DOF block.
    pub fn local_dof(&self, component: Component, tau: usize) -> Option<usize> {
        self.dof_layout()
            .iter()
            .position(|d| d.component == component && d.tau == tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sw2() -> TheoryExpansion {
        TheoryExpansion::sinus_w2(0.1).unwrap()
    }

    #[test]
    fn sinus_w2_values() {
        let e = sw2();
        let h = 0.1;
        assert_eq!(e.eval_f(Component::U, 2, 0.0).unwrap(), 0.0);
        assert!((e.eval_f(Component::W, 2, h / 2.0).unwrap() - h * h / 4.0).abs() < 1e-15);
        assert!((e.eval_f(Component::U, 2, h / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.eval_df_dz(Component::U, 2, 0.0).unwrap() - PI / h).abs() < 1e-12);
        assert_eq!(e.eval_df_dz(Component::W, 1, 0.037).unwrap(), 1.0);
        assert!(e.eval_df_dz(Component::U, 2, h / 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn out_of_range_index() {
        let e = sw2();
        assert_eq!(
            e.eval_f(Component::V, 3, 0.0),
            Err(KinematicsError::IndexOutOfRange {
                component: Component::V,
                index: 3,
                len: 3
            })
        );
        assert!(e.eval_df_dz(Component::W, 7, 0.0).is_err());
    }

    #[test]
    fn layout_matches_nodal_order() {
        let e = sw2();
        let names: Vec<String> = e
            .dof_layout()
            .iter()
            .map(|d| format!("{}{}", d.component, d.tau))
            .collect();
        assert_eq!(names, ["u0", "v0", "w0", "u1", "v1", "w1", "u2", "v2", "w2"]);
        assert_eq!(e.dofs_per_node(), 9);
        assert_eq!(e.local_dof(Component::W, 0), Some(2));
    }

    #[test]
    fn unknown_theory() {
        assert!(TheoryExpansion::by_name("sinus-w2", 1.0).is_ok());
        assert!(matches!(
            TheoryExpansion::by_name("layerwise-4", 1.0),
            Err(KinematicsError::UnknownTheory(_))
        ));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let e = sw2();
        let h = e.thickness();
        let step = 1e-6 * h;
        // deterministic scatter of 20 points in [-h/2 + step, h/2 - step]
        for k in 0..20 {
            let z = (-0.5 + (k as f64 * 0.618_033_988_7).fract()) * (h - 2.0 * step);
            for c in Component::ALL {
                for tau in 0..3 {
                    let fd = (e.eval_f(c, tau, z + step).unwrap() - e.eval_f(c, tau, z - step).unwrap())
                        / (2.0 * step);
                    let an = e.eval_df_dz(c, tau, z).unwrap();
                    let scale = an.abs().max(1.0);
                    assert!((fd - an).abs() <= 1e-6 * scale, "{c}{tau} z={z}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn in_plane_functions_linearly_independent() {
        // Gram matrix of {1, z, sin(πz/h)} by composite Simpson on [-h/2, h/2]
        let e = sw2();
        let h = e.thickness();
        let n = 2000;
        let dz = h / n as f64;
        let mut g = [[0.0; 3]; 3];
        for k in 0..=n {
            let z = -h / 2.0 + k as f64 * dz;
            let wgt = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 } * dz / 3.0;
            for i in 0..3 {
                for j in 0..3 {
                    g[i][j] += wgt * e.eval_f(Component::U, i, z).unwrap() * e.eval_f(Component::U, j, z).unwrap();
                }
            }
        }
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        // scale-free check against the product of diagonal entries
        assert!(det / (g[0][0] * g[1][1] * g[2][2]) > 1e-3, "det = {det}");
    }
}
