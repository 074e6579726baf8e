//! Global DOF numbering, scatter-add and boundary conditions.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::fem::{element_aero, element_aero_damping, element_mass, element_stiffness, ElementOptions, FemError, Mesh, PlateSection};
use crate::kinematics::Component;
use crate::sparse::CsrMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum AssemblyError {
    #[error("unknown boundary condition `{0}` (expected SSSS or CCCC)")]
    UnknownBoundary(String),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Edge support applied on all four edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Hard simple support: tangential in-plane and all transverse terms fixed.
    Ssss,
    /// Every DOF fixed on every boundary node.
    Cccc,
}

impl FromStr for BoundaryCondition {
    type Err = AssemblyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SSSS" => Ok(Self::Ssss),
            "CCCC" => Ok(Self::Cccc),
            _ => Err(AssemblyError::UnknownBoundary(s.to_string())),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ssss => "SSSS",
            Self::Cccc => "CCCC",
        })
    }
}

/// Node-major global numbering: global DOF = `node * dofs_per_node + local`.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    dofs_per_node: usize,
    constrained: Vec<bool>,
    free: Vec<usize>,
    to_free: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(node_count: usize, dofs_per_node: usize, constrained: Vec<bool>) -> Self {
        assert_eq!(constrained.len(), node_count * dofs_per_node);
        let free: Vec<usize> = (0..constrained.len()).filter(|&d| !constrained[d]).collect();
        let mut to_free = vec![None; constrained.len()];
        for (k, &g) in free.iter().enumerate() {
            to_free[g] = Some(k);
        }
        Self {
            dofs_per_node,
            constrained,
            free,
            to_free,
        }
    }

    pub fn total(&self) -> usize {
        self.constrained.len()
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dofs_per_node
    }

    pub fn global(&self, node: usize, local: usize) -> usize {
        node * self.dofs_per_node + local
    }

    pub fn is_constrained(&self, global: usize) -> bool {
        self.constrained[global]
    }

    /// Free global DOFs in ascending order.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn free_index(&self, global: usize) -> Option<usize> {
        self.to_free[global]
    }

    pub fn constrained_count(&self) -> usize {
        self.constrained.iter().filter(|&&c| c).count()
    }
}

/// Global matrices before boundary conditions.
#[derive(Debug, Clone)]
pub struct AssembledMatrices {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    /// Aerodynamic matrix per unit λ.
    pub a: CsrMatrix,
    /// `∫ N_wᵀ N_w dΩ` on `w0`; the damping matrix per unit damping coefficient.
    pub g: CsrMatrix,
    pub dofs_per_node: usize,
    pub w0_dof: usize,
}

fn scatter(triplets: &mut Vec<(usize, usize, f64)>, conn: &[usize; 4], nd: usize, e: &nalgebra::DMatrix<f64>) {
    for (i, &ni) in conn.iter().enumerate() {
        for (j, &nj) in conn.iter().enumerate() {
            for p in 0..nd {
                for q in 0..nd {
                    let v = e[(i * nd + p, j * nd + q)];
                    if v != 0.0 {
                        triplets.push((ni * nd + p, nj * nd + q, v));
                    }
                }
            }
        }
    }
}

/// Assembles `K`, `M`, `Ā` and the aerodynamic damping shape matrix.
///
/// Element matrices are computed in parallel and scattered in element order,
/// so the result does not depend on thread scheduling.
pub fn assemble(
    mesh: &Mesh,
    section: &PlateSection,
    theta_prime_deg: f64,
    options: ElementOptions,
) -> Result<AssembledMatrices, AssemblyError> {
    let nd = section.dofs_per_node();
    let n = mesh.node_count() * nd;
    let per_elem: Vec<_> = (0..mesh.element_count())
        .into_par_iter()
        .map(|e| -> Result<_, FemError> {
            Ok((
                element_stiffness(mesh, e, section, options)?,
                element_mass(mesh, e, section, options)?,
                element_aero(mesh, e, section, theta_prime_deg, options)?,
                element_aero_damping(mesh, e, section, options)?,
            ))
        })
        .collect::<Result<_, _>>()?;
    let (mut tk, mut tm, mut ta, mut tg) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (e, (ke, me, ae, ge)) in per_elem.iter().enumerate() {
        let conn = &mesh.elems[e];
        scatter(&mut tk, conn, nd, ke);
        scatter(&mut tm, conn, nd, me);
        scatter(&mut ta, conn, nd, ae);
        scatter(&mut tg, conn, nd, ge);
    }
    Ok(AssembledMatrices {
        k: CsrMatrix::from_triplets(n, n, &tk),
        m: CsrMatrix::from_triplets(n, n, &tm),
        a: CsrMatrix::from_triplets(n, n, &ta),
        g: CsrMatrix::from_triplets(n, n, &tg),
        dofs_per_node: nd,
        w0_dof: section.w0_dof(),
    })
}

/// Constrained DOFs for a boundary condition.
pub fn boundary_dofs(mesh: &Mesh, section: &PlateSection, bc: BoundaryCondition) -> DofMap {
    let nd = section.dofs_per_node();
    let layout = section.layout();
    let mut constrained = vec![false; mesh.node_count() * nd];
    for node in 0..mesh.node_count() {
        let (on_x_edge, on_y_edge) = mesh.boundary_flags(node);
        if !(on_x_edge || on_y_edge) {
            continue;
        }
        for (local, d) in layout.iter().enumerate() {
            let fixed = match bc {
                BoundaryCondition::Cccc => true,
                BoundaryCondition::Ssss => match d.component {
                    Component::W => true,
                    // v is tangential on x = 0, a
                    Component::V => on_x_edge,
                    Component::U => on_y_edge,
                },
            };
            if fixed {
                constrained[node * nd + local] = true;
            }
        }
    }
    DofMap::new(mesh.node_count(), nd, constrained)
}

/// Reduced system after deleting constrained rows and columns.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    pub a: CsrMatrix,
    pub g: CsrMatrix,
    pub dof_map: DofMap,
    pub w0_dof: usize,
}

impl GlobalSystem {
    pub fn size(&self) -> usize {
        self.k.nrows()
    }
}

pub fn apply_bc(system: &AssembledMatrices, mesh: &Mesh, section: &PlateSection, bc: BoundaryCondition) -> GlobalSystem {
    let dof_map = boundary_dofs(mesh, section, bc);
    let keep = dof_map.free_dofs();
    GlobalSystem {
        k: system.k.submatrix(keep),
        m: system.m.submatrix(keep),
        a: system.a.submatrix(keep),
        g: system.g.submatrix(keep),
        w0_dof: system.w0_dof,
        dof_map,
    }
}
