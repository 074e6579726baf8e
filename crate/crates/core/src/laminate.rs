//! Ply materials, stiffness rotation and through-thickness integration.
//!
//! Stress/strain vectors use the partitioned ordering
//! `(ε_xx, ε_yy, γ_xy | γ_xz, γ_yz, ε_zz)`: the first three entries form the
//! in-plane (`p`) group and the last three the out-of-plane (`n`) group.

use nalgebra::{Matrix3, Matrix6};
use thiserror::Error;

use crate::kinematics::{Component, KinematicsError, TheoryExpansion};
use crate::quadrature::gauss_legendre;

/// Gauss points per ply for thickness integrals.
pub const THICKNESS_GAUSS_POINTS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum LaminateError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid ply {index}: {reason}")]
    InvalidPly { index: usize, reason: String },
    #[error("laminate has no plies")]
    Empty,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Nine-constant orthotropic material, axes `L` (fibre), `T`, `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthotropicMaterial {
    pub e_l: f64,
    pub e_t: f64,
    pub e_z: f64,
    pub g_lt: f64,
    pub g_lz: f64,
    pub g_tz: f64,
    pub nu_lt: f64,
    pub nu_lz: f64,
    pub nu_tz: f64,
    pub rho: f64,
}

impl OrthotropicMaterial {
    /// Validates moduli, density and positive definiteness of the compliance.
    pub fn new(
        e_l: f64,
        e_t: f64,
        e_z: f64,
        g_lt: f64,
        g_lz: f64,
        g_tz: f64,
        nu_lt: f64,
        nu_lz: f64,
        nu_tz: f64,
        rho: f64,
    ) -> Result<Self, LaminateError> {
        let m = Self {
            e_l,
            e_t,
            e_z,
            g_lt,
            g_lz,
            g_tz,
            nu_lt,
            nu_lz,
            nu_tz,
            rho,
        };
        m.validate()?;
        Ok(m)
    }

    /// Fills the out-of-plane constants with `E_z = E_T`, `G_Lz = G_LT`,
    /// `G_Tz = G_TT` and `ν_Lz = ν_Tz = ν_LT`.
    pub fn transversely_isotropic(
        e_l: f64,
        e_t: f64,
        g_lt: f64,
        g_tt: f64,
        nu_lt: f64,
        rho: f64,
    ) -> Result<Self, LaminateError> {
        Self::new(e_l, e_t, e_t, g_lt, g_lt, g_tt, nu_lt, nu_lt, nu_lt, rho)
    }

    pub fn isotropic(e: f64, nu: f64, rho: f64) -> Result<Self, LaminateError> {
        let g = e / (2.0 * (1.0 + nu));
        Self::new(e, e, e, g, g, g, nu, nu, nu, rho)
    }

    fn validate(&self) -> Result<(), LaminateError> {
        let named = [
            ("E_L", self.e_l),
            ("E_T", self.e_t),
            ("E_z", self.e_z),
            ("G_LT", self.g_lt),
            ("G_Lz", self.g_lz),
            ("G_Tz", self.g_tz),
            ("rho", self.rho),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LaminateError::InvalidMaterial(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("nu_LT", self.nu_lt), ("nu_Lz", self.nu_lz), ("nu_Tz", self.nu_tz)] {
            if !v.is_finite() {
                return Err(LaminateError::InvalidMaterial(format!("{name} is not finite")));
            }
        }
        if self.compliance().cholesky().is_none() {
            return Err(LaminateError::InvalidMaterial(
                "compliance matrix is not positive definite".into(),
            ));
        }
        Ok(())
    }

    /// 6×6 compliance in material axes, partitioned ordering.
    pub fn compliance(&self) -> Matrix6<f64> {
        let mut s = Matrix6::zeros();
        // normal block: indices 0 (L), 1 (T), 5 (z)
        s[(0, 0)] = 1.0 / self.e_l;
        s[(1, 1)] = 1.0 / self.e_t;
        s[(5, 5)] = 1.0 / self.e_z;
        s[(0, 1)] = -self.nu_lt / self.e_l;
        s[(1, 0)] = s[(0, 1)];
        s[(0, 5)] = -self.nu_lz / self.e_l;
        s[(5, 0)] = s[(0, 5)];
        s[(1, 5)] = -self.nu_tz / self.e_t;
        s[(5, 1)] = s[(1, 5)];
        s[(2, 2)] = 1.0 / self.g_lt;
        s[(3, 3)] = 1.0 / self.g_lz;
        s[(4, 4)] = 1.0 / self.g_tz;
        s
    }

    /// Areal-density contribution per unit thickness.
    pub fn density(&self) -> f64 {
        self.rho
    }
}

/// 3D stiffness in material axes: the inverse of the orthotropic compliance.
pub fn build_3d_stiffness(material: &OrthotropicMaterial) -> Result<Matrix6<f64>, LaminateError> {
    let chol = material.compliance().cholesky().ok_or_else(|| {
        LaminateError::InvalidMaterial("compliance matrix is not positive definite".into())
    })?;
    let c = chol.inverse();
    Ok((c + c.transpose()) * 0.5)
}

/// The `C_pp, C_pn, C_np, C_nn` blocks of a stiffness in laminate axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutivePartition {
    pub c_pp: Matrix3<f64>,
    pub c_pn: Matrix3<f64>,
    pub c_np: Matrix3<f64>,
    pub c_nn: Matrix3<f64>,
}

impl ConstitutivePartition {
    pub fn from_matrix(c: &Matrix6<f64>) -> Self {
        Self {
            c_pp: c.fixed_view::<3, 3>(0, 0).into_owned(),
            c_pn: c.fixed_view::<3, 3>(0, 3).into_owned(),
            c_np: c.fixed_view::<3, 3>(3, 0).into_owned(),
            c_nn: c.fixed_view::<3, 3>(3, 3).into_owned(),
        }
    }

    pub fn to_matrix(&self) -> Matrix6<f64> {
        let mut c = Matrix6::zeros();
        c.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.c_pp);
        c.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.c_pn);
        c.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.c_np);
        c.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.c_nn);
        c
    }

    /// Entry `(i, j)` of the full 6×6 in partitioned ordering.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let block = match (i < 3, j < 3) {
            (true, true) => &self.c_pp,
            (true, false) => &self.c_pn,
            (false, true) => &self.c_np,
            (false, false) => &self.c_nn,
        };
        block[(i % 3, j % 3)]
    }
}

/// Voigt index pairs for the partitioned ordering.
const VOIGT: [(usize, usize); 6] = [(0, 0), (1, 1), (0, 1), (0, 2), (1, 2), (2, 2)];

/// Stress transformation for a rotation `angle_deg` about z, mapping
/// material-axis stress to laminate-axis stress.
fn stress_rotation(angle_deg: f64) -> Matrix6<f64> {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let r = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
    let mut t = Matrix6::zeros();
    for (a, &(i, j)) in VOIGT.iter().enumerate() {
        for (b, &(k, l)) in VOIGT.iter().enumerate() {
            t[(a, b)] = if k == l {
                r[(i, k)] * r[(j, l)]
            } else {
                r[(i, k)] * r[(j, l)] + r[(i, l)] * r[(j, k)]
            };
        }
    }
    t
}

/// Rotates a material-axis stiffness by the ply angle (degrees, ccw from x)
/// and splits it into the in-plane / out-of-plane blocks.
pub fn rotate_partition(c: &Matrix6<f64>, angle_deg: f64) -> ConstitutivePartition {
    let t = stress_rotation(angle_deg);
    let rotated = t * c * t.transpose();
    ConstitutivePartition::from_matrix(&((rotated + rotated.transpose()) * 0.5))
}

/// One ply of the stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ply {
    pub material: OrthotropicMaterial,
    /// Fibre angle in degrees, counter-clockwise from x.
    pub angle: f64,
    pub thickness: f64,
}

#[derive(Debug, Clone)]
struct PlyData {
    ply: Ply,
    z_bottom: f64,
    z_top: f64,
    stiffness: ConstitutivePartition,
}

/// Ordered bottom-to-top ply stack with the mid-plane at `z = 0`.
#[derive(Debug, Clone)]
pub struct Laminate {
    plies: Vec<PlyData>,
    h: f64,
}

impl Laminate {
    pub fn new(plies: Vec<Ply>) -> Result<Self, LaminateError> {
        if plies.is_empty() {
            return Err(LaminateError::Empty);
        }
        for (index, p) in plies.iter().enumerate() {
            if !(p.thickness > 0.0 && p.thickness.is_finite()) {
                return Err(LaminateError::InvalidPly {
                    index,
                    reason: format!("thickness must be positive, got {}", p.thickness),
                });
            }
            if !p.angle.is_finite() {
                return Err(LaminateError::InvalidPly {
                    index,
                    reason: "angle is not finite".into(),
                });
            }
        }
        let h: f64 = plies.iter().map(|p| p.thickness).sum();
        let mut z = -h / 2.0;
        let mut data = Vec::with_capacity(plies.len());
        for p in plies {
            let c = build_3d_stiffness(&p.material)?;
            let z_top = z + p.thickness;
            data.push(PlyData {
                ply: p,
                z_bottom: z,
                z_top,
                stiffness: rotate_partition(&c, p.angle),
            });
            z = z_top;
        }
        // pin the top interface exactly
        if let Some(last) = data.last_mut() {
            last.z_top = h / 2.0;
        }
        Ok(Self { plies: data, h })
    }

    /// Plies of one material and equal thickness `h / angles.len()`.
    pub fn equal_plies(material: OrthotropicMaterial, angles: &[f64], h: f64) -> Result<Self, LaminateError> {
        let t = h / angles.len().max(1) as f64;
        Self::new(
            angles
                .iter()
                .map(|&angle| Ply {
                    material,
                    angle,
                    thickness: t,
                })
                .collect(),
        )
    }

    pub fn thickness(&self) -> f64 {
        self.h
    }

    /// Same stack with every ply thickness scaled so the total is `h`.
    pub fn scaled_to(&self, h: f64) -> Result<Self, LaminateError> {
        let f = h / self.h;
        Self::new(
            self.plies()
                .map(|p| Ply {
                    thickness: p.thickness * f,
                    ..*p
                })
                .collect(),
        )
    }

    pub fn plies(&self) -> impl Iterator<Item = &Ply> {
        self.plies.iter().map(|d| &d.ply)
    }

    pub fn ply_count(&self) -> usize {
        self.plies.len()
    }

    /// `[z_bottom, z_top]` per ply.
    pub fn z_interfaces(&self) -> Vec<[f64; 2]> {
        self.plies.iter().map(|d| [d.z_bottom, d.z_top]).collect()
    }

    /// Rotated stiffness of ply `k` in laminate axes.
    pub fn ply_stiffness(&self, k: usize) -> &ConstitutivePartition {
        &self.plies[k].stiffness
    }

    /// Reference material for nondimensionalization: the first ply's.
    pub fn reference_material(&self) -> &OrthotropicMaterial {
        &self.plies[0].ply.material
    }

    /// `∫ ρ dz` over the stack.
    pub fn areal_density(&self) -> f64 {
        self.plies.iter().map(|d| d.ply.material.rho * (d.z_top - d.z_bottom)).sum()
    }
}

/// A thickness factor `F_τ` or `dF_τ/dz` of one displacement component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThicknessTerm {
    pub component: Component,
    pub tau: usize,
    pub derivative: bool,
}

impl ThicknessTerm {
    pub fn value(component: Component, tau: usize) -> Self {
        Self {
            component,
            tau,
            derivative: false,
        }
    }

    pub fn slope(component: Component, tau: usize) -> Self {
        Self {
            component,
            tau,
            derivative: true,
        }
    }

    fn eval(&self, expansion: &TheoryExpansion, z: f64) -> Result<f64, KinematicsError> {
        if self.derivative {
            expansion.eval_df_dz(self.component, self.tau, z)
        } else {
            expansion.eval_f(self.component, self.tau, z)
        }
    }
}

/// Per-ply coefficient multiplying the thickness integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerCoefficient {
    /// `C_ij` of the rotated ply stiffness, partitioned indices.
    Stiffness(usize, usize),
    Density,
    Unit,
}

/// `Σ_k ∫_{z_k} coef_k · a(z) · b(z) dz` with a fixed Gauss rule per ply.
pub fn thickness_integral(
    laminate: &Laminate,
    expansion: &TheoryExpansion,
    a: ThicknessTerm,
    b: ThicknessTerm,
    coef: LayerCoefficient,
) -> Result<f64, LaminateError> {
    let (xs, ws) = gauss_legendre(THICKNESS_GAUSS_POINTS);
    let mut total = 0.0;
    for d in &laminate.plies {
        let c = match coef {
            LayerCoefficient::Stiffness(i, j) => d.stiffness.get(i, j),
            LayerCoefficient::Density => d.ply.material.rho,
            LayerCoefficient::Unit => 1.0,
        };
        if c == 0.0 {
            continue;
        }
        let half = 0.5 * (d.z_top - d.z_bottom);
        let mid = 0.5 * (d.z_top + d.z_bottom);
        let mut layer = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let z = mid + half * x;
            layer += w * a.eval(expansion, z)? * b.eval(expansion, z)?;
        }
        total += c * half * layer;
    }
    Ok(total)
}
