//! Eigen-solvers for free vibration, the flutter pencil `(K + λĀ) x = κ̄ M x`
//! and the damped state-space spectrum.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{c64, Mat, Side};
use thiserror::Error;

use crate::assembly::GlobalSystem;
use crate::sparse::CsrMatrix;

/// Below this many free DOFs `free_vibration` uses a dense solve.
pub const DENSE_FREE_VIBRATION_LIMIT: usize = 600;

/// Relative imaginary part above which an eigenvalue counts as complex.
pub const COMPLEX_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum EigenError {
    #[error("matrix factorization failed: {0}")]
    Singular(String),
    #[error("eigen-solver did not converge at lambda = {lambda:e}")]
    NoConvergence { lambda: f64 },
    #[error("requested {requested} modes but the system has only {available} DOFs")]
    TooManyModes { requested: usize, available: usize },
}

/// Mass-normalized undamped modes and the reduced matrices.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    /// `n × m` mode shapes, `Φᵀ M Φ = I`.
    pub phi: Mat<f64>,
    /// Natural frequencies, rad/s, ascending.
    pub omega: Vec<f64>,
    /// `Φᵀ K Φ`
    pub k: Mat<f64>,
    /// `Φᵀ M Φ`
    pub m: Mat<f64>,
    /// `Φᵀ Ā Φ`
    pub a: Mat<f64>,
    /// `Φᵀ G Φ`, the damping matrix per unit damping coefficient.
    pub g: Mat<f64>,
}

impl ModalBasis {
    pub fn mode_count(&self) -> usize {
        self.omega.len()
    }

    /// Projects the system matrices onto the given mass-normalized modes.
    pub fn from_modes(system: &GlobalSystem, phi: Mat<f64>, omega: Vec<f64>) -> Self {
        let project = |s: &CsrMatrix| -> Mat<f64> { phi.transpose() * s.mul_dense(&phi) };
        let k = project(&system.k);
        let m = project(&system.m);
        let a = project(&system.a);
        let g = project(&system.g);
        Self { phi, omega, k, m, a, g }
    }
}

/// `diag(M)^(-1/2)`; the thickness DOFs (`z²`, `sin` terms) make the raw
/// pencil badly scaled, so dense solves work on `S K S`, `S M S`.
fn mass_scaling(m: &CsrMatrix) -> Result<Vec<f64>, EigenError> {
    (0..m.nrows())
        .map(|i| {
            let d = m.get(i, i);
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(EigenError::Singular(format!("mass diagonal {i} is {d:e}")))
            }
        })
        .collect()
}

fn scaled_dense(s: &CsrMatrix, scale: &[f64]) -> Mat<f64> {
    let mut d = s.to_dense();
    for j in 0..d.ncols() {
        for i in 0..d.nrows() {
            d[(i, j)] *= scale[i] * scale[j];
        }
    }
    d
}

/// Lowest `n_modes` natural frequencies (rad/s) and a modal basis.
///
/// Small systems are solved densely; larger ones by shift-invert Lanczos on
/// a sparse Cholesky factor of `K`.
pub fn free_vibration(system: &GlobalSystem, n_modes: usize) -> Result<ModalBasis, EigenError> {
    let n = system.size();
    if n_modes > n || n_modes == 0 {
        return Err(EigenError::TooManyModes {
            requested: n_modes,
            available: n,
        });
    }
    let (omega, phi) = if n <= DENSE_FREE_VIBRATION_LIMIT {
        dense_free_vibration(&system.k, &system.m, n_modes)?
    } else {
        lanczos_free_vibration(&system.k, &system.m, n_modes)?
    };
    Ok(ModalBasis::from_modes(system, phi, omega))
}

/// Dense symmetric-definite solve in inverse form, `L⁻¹ M L⁻ᵀ` with
/// `K = L Lᵀ`, so the lowest frequencies come from the best-resolved end of
/// the spectrum. Returns `(ω, Φ)` with `Φᵀ M Φ = I`.
pub fn dense_free_vibration(k: &CsrMatrix, m: &CsrMatrix, n_modes: usize) -> Result<(Vec<f64>, Mat<f64>), EigenError> {
    let scale = mass_scaling(m)?;
    let kd = scaled_dense(k, &scale);
    let md = scaled_dense(m, &scale);
    let n = kd.nrows();
    let llt = kd
        .llt(Side::Lower)
        .map_err(|e| EigenError::Singular(format!("stiffness matrix: {e:?}")))?;
    let l = llt.L().to_owned();
    let reduced = congruence(&l, &md);
    let evd = reduced
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| EigenError::NoConvergence { lambda: 0.0 })?;
    let mu = evd.S().column_vector();
    let u = evd.U();
    let mut omega = Vec::with_capacity(n_modes);
    let mut y = Mat::zeros(n, n_modes);
    for j in 0..n_modes {
        let col = n - 1 - j;
        let m_j = mu[col];
        if !(m_j > 0.0) {
            return Err(EigenError::Singular(format!("non-positive inverse eigenvalue {m_j:e}")));
        }
        omega.push((1.0 / m_j).sqrt());
        for i in 0..n {
            y[(i, j)] = u[(i, col)] / m_j.sqrt();
        }
    }
    // Φ = S L⁻ᵀ Y
    l.transpose().solve_upper_triangular_in_place(&mut y);
    for j in 0..n_modes {
        for (i, s) in scale.iter().enumerate() {
            y[(i, j)] *= s;
        }
    }
    Ok((omega, y))
}

/// `L⁻¹ X L⁻ᵀ` for a dense square `X`.
fn congruence(l: &Mat<f64>, x: &Mat<f64>) -> Mat<f64> {
    let mut y = x.clone();
    l.solve_lower_triangular_in_place(&mut y);
    let mut z = y.transpose().to_owned();
    l.solve_lower_triangular_in_place(&mut z);
    z.transpose().to_owned()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Shift-invert Lanczos with full reorthogonalization in the `M` inner
/// product, operator `K⁻¹ M`.
pub fn lanczos_free_vibration(k: &CsrMatrix, m: &CsrMatrix, n_modes: usize) -> Result<(Vec<f64>, Mat<f64>), EigenError> {
    let n = k.nrows();
    let llt = k
        .to_faer()
        .sp_cholesky(Side::Lower)
        .map_err(|e| EigenError::Singular(format!("stiffness matrix: {e:?}")))?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x = Mat::from_fn(n, 1, |i, _| rhs[i]);
        llt.solve_in_place(&mut x);
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut steps = (3 * n_modes).max(n_modes + 40).min(n);
    loop {
        // deterministic, non-symmetric start vector
        let mut q: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 1013) as f64 / 1013.0).collect();
        let mq = m.mul_vec(&q);
        let nrm = dot(&q, &mq).sqrt();
        q.iter_mut().for_each(|v| *v /= nrm);
        let mut basis: Vec<Vec<f64>> = vec![q];
        let mut mbasis: Vec<Vec<f64>> = vec![m.mul_vec(&basis[0])];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for j in 0..steps {
            let mut r = solve(&mbasis[j]);
            let a = dot(&r, &mbasis[j]);
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for (qb, mqb) in basis.iter().zip(&mbasis) {
                    let c = dot(&r, mqb);
                    r.iter_mut().zip(qb).for_each(|(ri, qi)| *ri -= c * qi);
                }
            }
            let mr = m.mul_vec(&r);
            let b = dot(&r, &mr).max(0.0).sqrt();
            if j + 1 == steps || b <= 1e-14 * a.abs() {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(r.iter().map(|v| v / b).collect());
            mbasis.push(mr.iter().map(|v| v / b).collect());
        }
        let kk = alpha.len();
        let t = Mat::from_fn(kk, kk, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| EigenError::NoConvergence { lambda: 0.0 })?;
        let theta = evd.S().column_vector();
        let s = evd.U();
        // largest θ = lowest ω², eigenvalues are ascending
        let available = kk.min(n_modes);
        let last_beta = *beta.last().unwrap_or(&0.0);
        let converged = (0..available).all(|i| {
            let col = kk - 1 - i;
            (last_beta * s[(kk - 1, col)]).abs() <= 1e-10 * theta[col].abs()
        });
        if (converged && available == n_modes) || steps >= n {
            if available < n_modes {
                return Err(EigenError::NoConvergence { lambda: 0.0 });
            }
            let mut omega = Vec::with_capacity(n_modes);
            let mut phi = Mat::zeros(n, n_modes);
            for i in 0..n_modes {
                let col = kk - 1 - i;
                let th = theta[col];
                if !(th > 0.0) {
                    return Err(EigenError::Singular(format!("non-positive Ritz value {th:e}")));
                }
                omega.push((1.0 / th).sqrt());
                for (j, qb) in basis.iter().enumerate().take(kk) {
                    let c = s[(j, col)];
                    for r in 0..n {
                        phi[(r, i)] += c * qb[r];
                    }
                }
            }
            return Ok((omega, phi));
        }
        steps = (steps * 2).min(n);
    }
}

/// Eigenvalues `κ̄` of a flutter pencil, sorted by modulus.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<c64>,
}

impl Spectrum {
    pub fn from_unsorted(mut values: Vec<c64>) -> Self {
        values.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
        Self { values }
    }

    pub fn is_complex(&self, i: usize) -> bool {
        let v = self.values[i];
        v.im.abs() > COMPLEX_TOLERANCE * v.norm()
    }

    /// The `count` smallest values.
    pub fn head(&self, count: usize) -> &[c64] {
        &self.values[..count.min(self.values.len())]
    }
}

/// A pencil `(K + λĀ, M)` that can be evaluated at any λ.
pub trait FlutterPencil {
    fn size(&self) -> usize;
    fn spectrum(&self, lambda: f64) -> Result<Spectrum, EigenError>;
}

/// A flutter pencil that also carries the aerodynamic damping matrix.
pub trait DampedPencil: FlutterPencil {
    /// State-space eigenvalues `s` of `M q̈ + g_a G q̇ + (K + λĀ) q = 0`;
    /// both members of each conjugate pair, lowest `|s|` first.
    fn state_eigenvalues(&self, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError>;
}

/// `s = 1/μ` for the nonzero eigenvalues `μ` of an inverse-form operator,
/// ordered by `|s|`.
fn invert_sorted(mu: impl IntoIterator<Item = c64>) -> Vec<c64> {
    let mut s: Vec<c64> = mu.into_iter().filter(|v| v.norm() > 0.0).map(|v| c64::new(1.0, 0.0) / v).collect();
    s.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    s
}

/// Dense full-order pencil. Each λ is solved in inverse form,
/// `(K + λĀ)⁻¹ M x = κ̄⁻¹ x`, which resolves the low end of the spectrum to
/// working precision despite the stiff thickness-stretch modes.
#[derive(Debug, Clone)]
pub struct DensePencil {
    k: Mat<f64>,
    a: Mat<f64>,
    m: Mat<f64>,
    g: Mat<f64>,
}

impl DensePencil {
    pub fn new(system: &GlobalSystem) -> Result<Self, EigenError> {
        let scale = mass_scaling(&system.m)?;
        Ok(Self {
            k: scaled_dense(&system.k, &scale),
            a: scaled_dense(&system.a, &scale),
            m: scaled_dense(&system.m, &scale),
            g: scaled_dense(&system.g, &scale),
        })
    }
}

impl FlutterPencil for DensePencil {
    fn size(&self) -> usize {
        self.k.nrows()
    }

    fn spectrum(&self, lambda: f64) -> Result<Spectrum, EigenError> {
        let lu = (&self.k + lambda * &self.a).partial_piv_lu();
        let t = lu.solve(&self.m);
        let mu = t.eigenvalues().map_err(|_| EigenError::NoConvergence { lambda })?;
        let values = mu
            .into_iter()
            .filter(|v| v.norm() > 0.0)
            .map(|v| c64::new(1.0, 0.0) / v)
            .collect();
        Ok(Spectrum::from_unsorted(values))
    }
}

impl DampedPencil for DensePencil {
    /// Inverse state matrix `[[-B⁻¹C, -B⁻¹M], [I, 0]]` with `B = K + λĀ`,
    /// `C = g_a G`, solved in full.
    fn state_eigenvalues(&self, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError> {
        let n = self.size();
        let lu = (&self.k + lambda * &self.a).partial_piv_lu();
        let bc = lu.solve(damping * &self.g);
        let bm = lu.solve(&self.m);
        let inv = Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => -bc[(i, j)],
            (true, false) => -bm[(i, j - n)],
            (false, true) => {
                if i - n == j {
                    1.0
                } else {
                    0.0
                }
            }
            (false, false) => 0.0,
        });
        let mu = inv.eigenvalues().map_err(|_| EigenError::NoConvergence { lambda })?;
        Ok(invert_sorted(mu))
    }
}

/// Full-order sparse pencil for large meshes: shift-invert Arnoldi on
/// `(K + λĀ)⁻¹ M`, returning the `count` eigenvalues `κ̄` of smallest
/// modulus. The sparse LU reuses one symbolic factorization for every λ.
#[derive(Debug, Clone)]
pub struct SparsePencil {
    pattern: SymbolicSparseColMat<usize>,
    symbolic: SymbolicLu<usize>,
    k: Vec<f64>,
    a: Vec<f64>,
    m: CsrMatrix,
    g: CsrMatrix,
    count: usize,
}

/// Relative Ritz residual accepted by [`SparsePencil`].
const ARNOLDI_TOLERANCE: f64 = 1e-10;

impl SparsePencil {
    pub fn new(system: &GlobalSystem, count: usize) -> Result<Self, EigenError> {
        let n = system.size();
        if count == 0 || count > n {
            return Err(EigenError::TooManyModes {
                requested: count,
                available: n,
            });
        }
        let scale = mass_scaling(&system.m)?;
        let k = system.k.scaled(&scale);
        let a = system.a.scaled(&scale);
        // union pattern of K and Ā
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(k.nnz() + a.nnz());
        for s in [&k, &a] {
            for r in 0..n {
                t.extend(s.row(r).map(|(c, _)| (r, c, 0.0)));
            }
        }
        let union = CsrMatrix::from_triplets(n, n, &t);
        let mut kv = Vec::with_capacity(union.nnz());
        let mut av = Vec::with_capacity(union.nnz());
        for r in 0..n {
            for (c, _) in union.row(r) {
                kv.push(k.get(r, c));
                av.push(a.get(r, c));
            }
        }
        // CSR arrays of B are the CSC arrays of Bᵀ, so Bᵀ is factored and
        // systems in B use the transposed solve
        let pattern = SymbolicSparseColMat::new_checked(n, n, union.row_ptr().to_vec(), None, union.col_indices().to_vec());
        let symbolic = SymbolicLu::try_new(pattern.as_ref()).map_err(|e| EigenError::Singular(format!("symbolic LU: {e:?}")))?;
        Ok(Self {
            pattern,
            symbolic,
            k: kv,
            a: av,
            m: system.m.scaled(&scale),
            g: system.g.scaled(&scale),
            count,
        })
    }
}

impl FlutterPencil for SparsePencil {
    fn size(&self) -> usize {
        self.m.nrows()
    }

    fn spectrum(&self, lambda: f64) -> Result<Spectrum, EigenError> {
        let n = self.size();
        let lu = self.factor(lambda)?;
        let op = |v: &[f64]| -> Vec<f64> { solve_with(&lu, self.m.mul_vec(v)) };
        let mu = arnoldi_dominant(op, n, self.count).ok_or(EigenError::NoConvergence { lambda })?;
        Ok(Spectrum::from_unsorted(
            mu.into_iter().map(|v| c64::new(1.0, 0.0) / v).collect(),
        ))
    }
}

impl SparsePencil {
    /// Numeric LU of `(K + λĀ)ᵀ`.
    fn factor(&self, lambda: f64) -> Result<Lu<usize, f64>, EigenError> {
        let values: Vec<f64> = self.k.iter().zip(&self.a).map(|(k, a)| k + lambda * a).collect();
        let bt = SparseColMatRef::new(self.pattern.as_ref(), &values);
        Lu::try_new_with_symbolic(self.symbolic.clone(), bt)
            .map_err(|e| EigenError::Singular(format!("K + lambda A at lambda = {lambda:e}: {e:?}")))
    }
}

/// `(K + λĀ)⁻¹ rhs` from the factor of the transpose.
fn solve_with(lu: &Lu<usize, f64>, rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    let mut x = Mat::from_fn(n, 1, |i, _| rhs[i]);
    lu.solve_transpose_in_place(&mut x);
    (0..n).map(|i| x[(i, 0)]).collect()
}

impl DampedPencil for SparsePencil {
    /// Arnoldi on the inverse state matrix, `(a, b) ↦ (-B⁻¹(C a + M b), a)`,
    /// for the `2 × count` eigenvalues of smallest `|s|`.
    fn state_eigenvalues(&self, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError> {
        let n = self.size();
        let lu = self.factor(lambda)?;
        let op = |v: &[f64]| -> Vec<f64> {
            let (a, b) = v.split_at(n);
            let ca = self.g.mul_vec(a);
            let mb = self.m.mul_vec(b);
            let rhs = ca.iter().zip(&mb).map(|(c, m)| -(damping * c + m)).collect();
            let mut out = solve_with(&lu, rhs);
            out.extend_from_slice(a);
            out
        };
        let count = (2 * self.count).min(2 * n);
        let mu = arnoldi_dominant(op, 2 * n, count).ok_or(EigenError::NoConvergence { lambda })?;
        Ok(invert_sorted(mu))
    }
}

/// The `count` eigenvalues of largest modulus of a linear operator, by
/// Arnoldi with full reorthogonalization; the subspace grows until every
/// wanted Ritz pair has a relative residual below [`ARNOLDI_TOLERANCE`].
fn arnoldi_dominant(op: impl Fn(&[f64]) -> Vec<f64>, n: usize, count: usize) -> Option<Vec<c64>> {
    let mut steps = (3 * count).max(count + 40).min(n);
    loop {
        let mut q: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 1013) as f64 / 1013.0).collect();
        let nrm = dot(&q, &q).sqrt();
        q.iter_mut().for_each(|v| *v /= nrm);
        let mut basis = vec![q];
        let mut h = Mat::<f64>::zeros(steps + 1, steps);
        let mut size = steps;
        for j in 0..steps {
            let mut w = op(&basis[j]);
            for _ in 0..2 {
                for (i, qi) in basis.iter().enumerate() {
                    let c = dot(&w, qi);
                    h[(i, j)] += c;
                    w.iter_mut().zip(qi).for_each(|(wv, qv)| *wv -= c * qv);
                }
            }
            let b = dot(&w, &w).sqrt();
            h[(j + 1, j)] = b;
            if b <= 1e-14 * h[(j, j)].abs().max(f64::MIN_POSITIVE) {
                // invariant subspace: its Ritz values are exact
                size = j + 1;
                break;
            }
            basis.push(w.iter().map(|v| v / b).collect());
        }
        let hk = h.submatrix(0, 0, size, size).to_owned();
        let evd = hk.eigen().ok()?;
        let theta = evd.S().column_vector();
        let u = evd.U();
        let tail = h[(size, size - 1)];
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&x, &y| theta[y].norm().total_cmp(&theta[x].norm()));
        let wanted = &order[..count.min(size)];
        let converged = wanted.iter().all(|&i| {
            let col_norm = (0..size).map(|r| u[(r, i)].norm_sqr()).sum::<f64>().sqrt();
            (tail * u[(size - 1, i)].norm()).abs() <= ARNOLDI_TOLERANCE * theta[i].norm() * col_norm
        });
        if (converged && wanted.len() == count) || steps >= n || size < steps {
            if wanted.len() < count {
                return None;
            }
            return Some(wanted.iter().map(|&i| theta[i]).collect());
        }
        steps = (steps * 2).min(n);
    }
}

/// Modal pencil `k̂ + λâ` with `m̂ = I`.
#[derive(Debug, Clone)]
pub struct ModalPencil<'a> {
    basis: &'a ModalBasis,
}

impl<'a> ModalPencil<'a> {
    pub fn new(basis: &'a ModalBasis) -> Self {
        Self { basis }
    }
}

impl FlutterPencil for ModalPencil<'_> {
    fn size(&self) -> usize {
        self.basis.mode_count()
    }

    fn spectrum(&self, lambda: f64) -> Result<Spectrum, EigenError> {
        flutter_spectrum_dense(&self.basis.k, &self.basis.a, &self.basis.m, lambda)
    }
}

/// Eigenvalues of `(K + λA) x = κ̄ M x` for small dense matrices.
pub fn flutter_spectrum_dense(k: &Mat<f64>, a: &Mat<f64>, m: &Mat<f64>, lambda: f64) -> Result<Spectrum, EigenError> {
    let llt = m
        .llt(Side::Lower)
        .map_err(|e| EigenError::Singular(format!("mass matrix: {e:?}")))?;
    let l = llt.L().to_owned();
    let mat = congruence(&l, &(k + lambda * a));
    let values = mat.eigenvalues().map_err(|_| EigenError::NoConvergence { lambda })?;
    Ok(Spectrum::from_unsorted(values))
}

/// Full-order spectrum of the flutter pencil at one λ.
pub fn flutter_spectrum(system: &GlobalSystem, lambda: f64) -> Result<Spectrum, EigenError> {
    DensePencil::new(system)?.spectrum(lambda)
}

impl DampedPencil for ModalPencil<'_> {
    fn state_eigenvalues(&self, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError> {
        let mut s = damped_state_eigenvalues(self.basis, lambda, damping)?;
        s.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
        Ok(s)
    }
}

/// State-space eigenvalues `s` of `m̂ q̈ + g_a ĝ q̇ + (k̂ + λâ) q = 0`.
pub fn damped_state_eigenvalues(basis: &ModalBasis, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError> {
    let m = basis.mode_count();
    let llt = basis
        .m
        .llt(Side::Lower)
        .map_err(|e| EigenError::Singular(format!("modal mass: {e:?}")))?;
    let mut stiff = &basis.k + lambda * &basis.a;
    let mut damp = damping * &basis.g;
    llt.solve_in_place(&mut stiff);
    llt.solve_in_place(&mut damp);
    let state = Mat::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
        (true, true) => 0.0,
        (true, false) => {
            if j - m == i {
                1.0
            } else {
                0.0
            }
        }
        (false, true) => -stiff[(i - m, j)],
        (false, false) => -damp[(i - m, j - m)],
    });
    state.eigenvalues().map_err(|_| EigenError::NoConvergence { lambda })
}

/// Complex frequencies `ω = s / i` of the damped modal system; a mode
/// `e^{iωt}` decays when `Im ω > 0`.
pub fn damped_spectrum(basis: &ModalBasis, lambda: f64, damping: f64) -> Result<Vec<c64>, EigenError> {
    Ok(damped_state_eigenvalues(basis, lambda, damping)?
        .into_iter()
        .map(|s| c64::new(s.im, -s.re))
        .collect())
}
