//! Structured QUAD-4 meshes and element matrices.
//!
//! The element energy is written in terms of *generalized strains*: every
//! 3D strain component is a sum of in-plane fields (a displacement
//! coefficient, or one of its x/y derivatives) times a thickness factor
//! `F_τ(z)` or `F_τ,z(z)`. Integrating the ply stiffness against the
//! thickness factors once per laminate gives a section matrix; the element
//! stiffness is then `∫ Bᵀ S B dΩ` with a 2×2 Gauss rule.
//!
//! Transverse shear terms that do not carry an in-plane derivative are
//! interpolated with the field-redistributed functions
//! `Ñ1(η)` (in `γ_xz`) and `Ñ2(ξ)` (in `γ_yz`), which removes shear locking.

use nalgebra::{DMatrix, Matrix2};
use thiserror::Error;

use crate::kinematics::{Component, DofKind, TheoryExpansion};
use crate::laminate::{thickness_integral, Laminate, LaminateError, LayerCoefficient, ThicknessTerm};
use crate::quadrature::gauss_legendre;

#[derive(Debug, Error, PartialEq)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("element {elem}: non-positive Jacobian determinant {det_j:e}")]
    DegenerateJacobian { elem: usize, det_j: f64 },
    #[error("expansion has no transverse mid-surface term w0")]
    MissingW0,
    #[error(transparent)]
    Laminate(#[from] LaminateError),
}

/// Uniform rectangular grid of 4-node elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major: node `(i, j)` has id `j * (nx + 1) + i`.
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise connectivity starting at the lower-left corner.
    pub elems: Vec<[usize; 4]>,
}

pub fn build_structured_mesh(a: f64, b: f64, nx: usize, ny: usize) -> Result<Mesh, FemError> {
    if nx == 0 || ny == 0 {
        return Err(FemError::InvalidMesh(format!("element counts must be >= 1, got {nx}x{ny}")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(FemError::InvalidMesh(format!("plate dimensions must be positive, got {a}x{b}")));
    }
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([i as f64 * a / nx as f64, j as f64 * b / ny as f64]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elems = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elems.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Ok(Mesh {
        a,
        b,
        nx,
        ny,
        nodes,
        elems,
    })
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elems.len()
    }

    pub fn element_coords(&self, elem: usize) -> [[f64; 2]; 4] {
        self.elems[elem].map(|n| self.nodes[n])
    }

    /// `(on x = 0 or x = a, on y = 0 or y = b)` for a node.
    pub fn boundary_flags(&self, node: usize) -> (bool, bool) {
        let i = node % (self.nx + 1);
        let j = node / (self.nx + 1);
        (i == 0 || i == self.nx, j == 0 || j == self.ny)
    }
}

const XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// Bilinear Lagrange functions and their `(∂/∂ξ, ∂/∂η)` derivatives.
pub fn shape_functions(xi: f64, eta: f64) -> ([f64; 4], [[f64; 2]; 4]) {
    let mut n = [0.0; 4];
    let mut dn = [[0.0; 2]; 4];
    for k in 0..4 {
        n[k] = 0.25 * (1.0 + XI[k] * xi) * (1.0 + ETA[k] * eta);
        dn[k] = [
            0.25 * XI[k] * (1.0 + ETA[k] * eta),
            0.25 * ETA[k] * (1.0 + XI[k] * xi),
        ];
    }
    (n, dn)
}

/// Field-redistributed substitutes `(Ñ1(η), Ñ2(ξ))`.
pub fn substitute_shape_functions(xi: f64, eta: f64) -> ([f64; 4], [f64; 4]) {
    (
        [0.25 * (1.0 - eta), 0.25 * (1.0 - eta), 0.25 * (1.0 + eta), 0.25 * (1.0 + eta)],
        [0.25 * (1.0 - xi), 0.25 * (1.0 + xi), 0.25 * (1.0 + xi), 0.25 * (1.0 - xi)],
    )
}

/// How the derivative-free transverse shear terms are interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShearInterpolation {
    #[default]
    FieldConsistent,
    /// Plain bilinear interpolation; locks for thin plates.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementOptions {
    /// Gauss points per direction.
    pub gauss_order: usize,
    pub shear: ShearInterpolation,
}

impl Default for ElementOptions {
    fn default() -> Self {
        Self {
            gauss_order: 2,
            shear: ShearInterpolation::FieldConsistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InPlaneOp {
    Dx,
    Dy,
    Value,
    /// value interpolated with Ñ1(η), γ_xz
    ValueAlongX,
    /// value interpolated with Ñ2(ξ), γ_yz
    ValueAlongY,
}

#[derive(Debug, Clone, Copy)]
struct GeneralizedStrain {
    /// Row of the partitioned strain vector this term feeds.
    row: usize,
    term: ThicknessTerm,
    local_dof: usize,
    op: InPlaneOp,
}

/// Thickness-integrated section matrices of a laminate under an expansion.
#[derive(Debug, Clone)]
pub struct PlateSection {
    layout: Vec<DofKind>,
    strains: Vec<GeneralizedStrain>,
    stiffness: DMatrix<f64>,
    inertia: DMatrix<f64>,
    w0: usize,
    areal_density: f64,
}

impl PlateSection {
    pub fn new(laminate: &Laminate, expansion: &TheoryExpansion) -> Result<Self, FemError> {
        let layout = expansion.dof_layout();
        let mut strains = Vec::new();
        for (local_dof, d) in layout.iter().enumerate() {
            let f = ThicknessTerm::value(d.component, d.tau);
            let df = ThicknessTerm::slope(d.component, d.tau);
            let mut push = |row, term, op| strains.push(GeneralizedStrain { row, term, local_dof, op });
            match d.component {
                Component::U => {
                    push(0, f, InPlaneOp::Dx);
                    push(2, f, InPlaneOp::Dy);
                    push(3, df, InPlaneOp::ValueAlongX);
                }
                Component::V => {
                    push(2, f, InPlaneOp::Dx);
                    push(1, f, InPlaneOp::Dy);
                    push(4, df, InPlaneOp::ValueAlongY);
                }
                Component::W => {
                    push(3, f, InPlaneOp::Dx);
                    push(4, f, InPlaneOp::Dy);
                    push(5, df, InPlaneOp::Value);
                }
            }
        }
        let ns = strains.len();
        let mut stiffness = DMatrix::zeros(ns, ns);
        for i in 0..ns {
            for j in i..ns {
                let (a, b) = (&strains[i], &strains[j]);
                let v = thickness_integral(laminate, expansion, a.term, b.term, LayerCoefficient::Stiffness(a.row, b.row))?;
                stiffness[(i, j)] = v;
                stiffness[(j, i)] = v;
            }
        }
        let nd = layout.len();
        let mut inertia = DMatrix::zeros(nd, nd);
        for i in 0..nd {
            for j in i..nd {
                let (a, b) = (layout[i], layout[j]);
                if a.component != b.component {
                    continue;
                }
                let v = thickness_integral(
                    laminate,
                    expansion,
                    ThicknessTerm::value(a.component, a.tau),
                    ThicknessTerm::value(b.component, b.tau),
                    LayerCoefficient::Density,
                )?;
                inertia[(i, j)] = v;
                inertia[(j, i)] = v;
            }
        }
        let w0 = expansion.local_dof(Component::W, 0).ok_or(FemError::MissingW0)?;
        Ok(Self {
            layout,
            strains,
            stiffness,
            inertia,
            w0,
            areal_density: laminate.areal_density(),
        })
    }

    pub fn dofs_per_node(&self) -> usize {
        self.layout.len()
    }

    pub fn layout(&self) -> &[DofKind] {
        &self.layout
    }

    /// Local index of the mid-surface transverse displacement `w0`.
    pub fn w0_dof(&self) -> usize {
        self.w0
    }

    pub fn areal_density(&self) -> f64 {
        self.areal_density
    }

    /// Section stiffness over generalized strains.
    pub fn stiffness_matrix(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    /// `∫ρ F_τ F_s dz` per component, zero across components.
    pub fn inertia_matrix(&self) -> &DMatrix<f64> {
        &self.inertia
    }
}

/// Isoparametric quantities at one integration point.
struct GaussPoint {
    n: [f64; 4],
    dn_dx: [[f64; 2]; 4],
    sub_x: [f64; 4],
    sub_y: [f64; 4],
    weight: f64,
}

fn gauss_points(coords: &[[f64; 2]; 4], order: usize, elem: usize) -> Result<Vec<GaussPoint>, FemError> {
    let (gx, gw) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * order);
    for (&eta, &we) in gx.iter().zip(&gw) {
        for (&xi, &wx) in gx.iter().zip(&gw) {
            let (n, dn) = shape_functions(xi, eta);
            let mut jac = Matrix2::zeros();
            for k in 0..4 {
                for r in 0..2 {
                    for c in 0..2 {
                        // J[r][c] = ∂x_c / ∂ξ_r
                        jac[(r, c)] += dn[k][r] * coords[k][c];
                    }
                }
            }
            let det_j = jac.determinant();
            if !(det_j > 0.0) {
                return Err(FemError::DegenerateJacobian { elem, det_j });
            }
            let inv = jac.try_inverse().ok_or(FemError::DegenerateJacobian { elem, det_j })?;
            let mut dn_dx = [[0.0; 2]; 4];
            for k in 0..4 {
                for c in 0..2 {
                    dn_dx[k][c] = inv[(c, 0)] * dn[k][0] + inv[(c, 1)] * dn[k][1];
                }
            }
            let (sub_x, sub_y) = substitute_shape_functions(xi, eta);
            out.push(GaussPoint {
                n,
                dn_dx,
                sub_x,
                sub_y,
                weight: wx * we * det_j,
            });
        }
    }
    Ok(out)
}

/// Jacobian determinant of element `elem` at `(xi, eta)`.
pub fn jacobian_determinant(mesh: &Mesh, elem: usize, xi: f64, eta: f64) -> f64 {
    let coords = mesh.element_coords(elem);
    let (_, dn) = shape_functions(xi, eta);
    let mut jac = Matrix2::zeros();
    for k in 0..4 {
        for r in 0..2 {
            for c in 0..2 {
                jac[(r, c)] += dn[k][r] * coords[k][c];
            }
        }
    }
    jac.determinant()
}

/// Element matrices, `4 × dofs_per_node` square, node-major ordering.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub ke: DMatrix<f64>,
    pub me: DMatrix<f64>,
    pub ae: DMatrix<f64>,
}

pub fn element_stiffness(
    mesh: &Mesh,
    elem: usize,
    section: &PlateSection,
    options: ElementOptions,
) -> Result<DMatrix<f64>, FemError> {
    let nd = section.dofs_per_node();
    let ne = 4 * nd;
    let ns = section.strains.len();
    let mut ke = DMatrix::zeros(ne, ne);
    let mut b = DMatrix::zeros(ns, ne);
    for gp in gauss_points(&mesh.element_coords(elem), options.gauss_order, elem)? {
        b.fill(0.0);
        for (g, s) in section.strains.iter().enumerate() {
            for node in 0..4 {
                let v = match (s.op, options.shear) {
                    (InPlaneOp::Dx, _) => gp.dn_dx[node][0],
                    (InPlaneOp::Dy, _) => gp.dn_dx[node][1],
                    (InPlaneOp::Value, _) => gp.n[node],
                    (InPlaneOp::ValueAlongX, ShearInterpolation::FieldConsistent) => gp.sub_x[node],
                    (InPlaneOp::ValueAlongY, ShearInterpolation::FieldConsistent) => gp.sub_y[node],
                    (_, ShearInterpolation::Standard) => gp.n[node],
                };
                b[(g, node * nd + s.local_dof)] = v;
            }
        }
        let sb = &section.stiffness * &b;
        ke.gemm_tr(gp.weight, &b, &sb, 1.0);
    }
    Ok((&ke + ke.transpose()) * 0.5)
}

pub fn element_mass(mesh: &Mesh, elem: usize, section: &PlateSection, options: ElementOptions) -> Result<DMatrix<f64>, FemError> {
    let nd = section.dofs_per_node();
    let mut me = DMatrix::zeros(4 * nd, 4 * nd);
    for gp in gauss_points(&mesh.element_coords(elem), options.gauss_order, elem)? {
        for i in 0..4 {
            for j in 0..4 {
                let f = gp.weight * gp.n[i] * gp.n[j];
                for p in 0..nd {
                    for q in 0..nd {
                        let m = section.inertia[(p, q)];
                        if m != 0.0 {
                            me[(i * nd + p, j * nd + q)] += f * m;
                        }
                    }
                }
            }
        }
    }
    Ok(me)
}

/// Unit-pressure aerodynamic matrix `∫ N_wᵀ (cosθ′ ∂N_w/∂x + sinθ′ ∂N_w/∂y) dΩ`
/// on the `w0` DOFs.
pub fn element_aero(
    mesh: &Mesh,
    elem: usize,
    section: &PlateSection,
    theta_prime_deg: f64,
    options: ElementOptions,
) -> Result<DMatrix<f64>, FemError> {
    let nd = section.dofs_per_node();
    let w0 = section.w0;
    let (s, c) = theta_prime_deg.to_radians().sin_cos();
    let mut ae = DMatrix::zeros(4 * nd, 4 * nd);
    for gp in gauss_points(&mesh.element_coords(elem), options.gauss_order, elem)? {
        for i in 0..4 {
            for j in 0..4 {
                let slope = c * gp.dn_dx[j][0] + s * gp.dn_dx[j][1];
                ae[(i * nd + w0, j * nd + w0)] += gp.weight * gp.n[i] * slope;
            }
        }
    }
    Ok(ae)
}

/// `∫ N_wᵀ N_w dΩ` on the `w0` DOFs; scaled by the aerodynamic damping
/// coefficient it gives the piston-theory damping matrix.
pub fn element_aero_damping(mesh: &Mesh, elem: usize, section: &PlateSection, options: ElementOptions) -> Result<DMatrix<f64>, FemError> {
    let nd = section.dofs_per_node();
    let w0 = section.w0;
    let mut ge = DMatrix::zeros(4 * nd, 4 * nd);
    for gp in gauss_points(&mesh.element_coords(elem), options.gauss_order, elem)? {
        for i in 0..4 {
            for j in 0..4 {
                ge[(i * nd + w0, j * nd + w0)] += gp.weight * gp.n[i] * gp.n[j];
            }
        }
    }
    Ok(ge)
}

pub fn element_matrices(
    mesh: &Mesh,
    elem: usize,
    section: &PlateSection,
    theta_prime_deg: f64,
    options: ElementOptions,
) -> Result<ElementMatrices, FemError> {
    Ok(ElementMatrices {
        ke: element_stiffness(mesh, elem, section, options)?,
        me: element_mass(mesh, elem, section, options)?,
        ae: element_aero(mesh, elem, section, theta_prime_deg, options)?,
    })
}
