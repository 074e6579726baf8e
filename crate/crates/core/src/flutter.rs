//! Flutter-boundary search.
//!
//! Undamped flutter is the first dynamic-pressure value at which two of the
//! lowest eigenvalues of `(K + λĀ) x = κ̄ M x` merge into a complex pair.
//! With aerodynamic damping the boundary is where the largest growth rate
//! `Re s` of the state-space modal system crosses zero. Both searches use a
//! coarse sweep in `λ*` followed by bisection.

use faer::c64;
use thiserror::Error;

use crate::eigen::{DampedPencil, EigenError, FlutterPencil, COMPLEX_TOLERANCE};
use crate::laminate::Laminate;

#[derive(Debug, Error)]
pub enum FlutterError {
    #[error("no flutter in lambda* range [{min}, {max}] ({} sweep points)", trace.len())]
    NotFound { min: f64, max: f64, trace: Vec<TracePoint> },
    #[error("invalid sweep options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Bending rigidity `D = E_ref h³ / 12(1 − ν_LT²)` and the nondimensional
/// conversions built on it. `E_ref` defaults to `E_T` of the first ply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nondim {
    pub d: f64,
    pub a: f64,
    pub h: f64,
    /// `∫ρ dz`
    pub rho_h: f64,
    /// Modulus entering `D`.
    pub reference_modulus: f64,
    e_t: f64,
    rho: f64,
}

pub fn nondim(laminate: &Laminate, a: f64) -> Nondim {
    Nondim::new(laminate, a, None)
}

impl Nondim {
    pub fn new(laminate: &Laminate, a: f64, reference_modulus: Option<f64>) -> Self {
        let m = laminate.reference_material();
        let h = laminate.thickness();
        let e_ref = reference_modulus.unwrap_or(m.e_t);
        Self {
            d: e_ref * h.powi(3) / (12.0 * (1.0 - m.nu_lt * m.nu_lt)),
            a,
            h,
            rho_h: laminate.areal_density(),
            reference_modulus: e_ref,
            e_t: m.e_t,
            rho: m.rho,
        }
    }

    /// `λ* = λ a³ / D`
    pub fn lambda_star(&self, lambda: f64) -> f64 {
        lambda * self.a.powi(3) / self.d
    }

    pub fn lambda_from_star(&self, lambda_star: f64) -> f64 {
        lambda_star * self.d / self.a.powi(3)
    }

    /// `ω* = ω a² √(ρh / D)`
    pub fn omega_star(&self, omega: f64) -> f64 {
        omega * self.a * self.a * (self.rho_h / self.d).sqrt()
    }

    pub fn omega_from_star(&self, omega_star: f64) -> f64 {
        omega_star / (self.a * self.a * (self.rho_h / self.d).sqrt())
    }

    /// `Ω = ω a² / (π² h) · √(ρ / E_T)`, the thickness-scaled frequency used
    /// for angle-ply free-vibration benchmarks.
    pub fn omega_bar(&self, omega: f64) -> f64 {
        omega * self.a * self.a / (std::f64::consts::PI.powi(2) * self.h) * (self.rho / self.e_t).sqrt()
    }
}

/// Piston-theory aerodynamic damping.
///
/// With `λ = ρ_a U² / √(M² − 1)` and mass ratio `μ = ρ_a a / (ρh)`, the
/// damping pressure coefficient is `g_a = λ (M² − 2) / ((M² − 1) U)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroDamping {
    pub mach: f64,
    pub mass_ratio: f64,
    pub a: f64,
    pub rho_h: f64,
}

impl AeroDamping {
    /// Flow speed implied by a dimensional λ.
    pub fn velocity(&self, lambda: f64) -> f64 {
        let beta = (self.mach * self.mach - 1.0).sqrt();
        let rho_air = self.mass_ratio * self.rho_h / self.a;
        (lambda * beta / rho_air).sqrt()
    }

    /// `g_a` in Pa·s/m at a dimensional λ.
    pub fn coefficient(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let m2 = self.mach * self.mach;
        lambda * (m2 - 2.0) / ((m2 - 1.0) * self.velocity(lambda))
    }
}

/// Coarse-sweep and bisection controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub lambda_star_min: f64,
    pub lambda_star_max: f64,
    pub coarse_steps: usize,
    pub tol_rel: f64,
    /// Lowest eigenvalue branches watched for coalescence.
    pub tracked_branches: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            lambda_star_min: 1.0,
            lambda_star_max: 2000.0,
            coarse_steps: 50,
            tol_rel: 1e-4,
            tracked_branches: 6,
        }
    }
}

impl SweepOptions {
    fn validate(&self) -> Result<(), FlutterError> {
        if !(self.lambda_star_min > 0.0 && self.lambda_star_max > self.lambda_star_min) {
            return Err(FlutterError::InvalidOptions(format!(
                "range must satisfy 0 < min < max, got [{}, {}]",
                self.lambda_star_min, self.lambda_star_max
            )));
        }
        if self.coarse_steps < 10 {
            return Err(FlutterError::InvalidOptions(format!("coarse_steps must be >= 10, got {}", self.coarse_steps)));
        }
        if !(self.tol_rel > 0.0 && self.tol_rel < 1.0) {
            return Err(FlutterError::InvalidOptions(format!("tol_rel must be in (0, 1), got {}", self.tol_rel)));
        }
        if self.tracked_branches < 2 {
            return Err(FlutterError::InvalidOptions("at least two branches must be tracked".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.coarse_steps;
        (0..=n)
            .map(|k| self.lambda_star_min + (self.lambda_star_max - self.lambda_star_min) * k as f64 / n as f64)
            .collect()
    }
}

/// One coarse-sweep sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub lambda_star: f64,
    /// Lowest eigenvalues: `κ̄` for undamped runs, state eigenvalues `s`
    /// (positive-frequency half) for damped runs.
    pub values: Vec<c64>,
    /// `max |Im κ̄| / |κ̄|` (undamped) or `max Re s / |s|` (damped).
    pub indicator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlutterResult {
    /// Dimensional critical λ.
    pub lambda_cr: f64,
    /// Critical frequency, rad/s.
    pub omega_cr: f64,
    pub lambda_star_cr: f64,
    pub omega_star_cr: f64,
    /// 1-based mode numbers of the coalescing pair just below `λ_cr`.
    pub mode_pair: (usize, usize),
    /// `|Im κ̄| / √(Re κ̄)` of the undamped coalesced pair at `λ_cr`.
    pub g_tau: f64,
    pub damped: bool,
    pub trace: Vec<TracePoint>,
    /// Width of the final bracket relative to `λ*_cr`.
    pub bracket_rel: f64,
}

/// Greedy nearest-value matching of tracked branches onto a new set of
/// eigenvalues; each candidate is used at most once.
pub fn match_branches(previous: &[c64], candidates: &[c64]) -> Vec<c64> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(previous.len() * candidates.len());
    for (i, p) in previous.iter().enumerate() {
        for (j, c) in candidates.iter().enumerate() {
            pairs.push(((p - c).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![None; previous.len()];
    let mut used = vec![false; candidates.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(candidates[j]);
            used[j] = true;
        }
    }
    out.into_iter()
        .zip(previous)
        .map(|(v, p)| v.unwrap_or(*p))
        .collect()
}

/// Stability test evaluated at one λ*, continued from the branches at a
/// lower λ*.
struct Probe {
    unstable: bool,
    point: TracePoint,
    /// Tracked branch with the largest indicator.
    critical: usize,
}

/// A search problem: the tracked branches at λ = 0, and a map from λ* and the
/// previous branches to the continued branches plus their indicator values.
trait Tracker {
    fn initial(&self) -> Result<Vec<c64>, FlutterError>;
    fn continue_at(&self, lambda_star: f64, previous: &[c64]) -> Result<Vec<c64>, FlutterError>;
    fn indicator(&self, value: c64) -> f64;
}

fn probe(tracker: &dyn Tracker, lambda_star: f64, previous: &[c64]) -> Result<Probe, FlutterError> {
    let values = tracker.continue_at(lambda_star, previous)?;
    let mut indicator = f64::NEG_INFINITY;
    let mut critical = 0;
    for (i, v) in values.iter().enumerate() {
        let r = tracker.indicator(*v);
        if r > indicator {
            indicator = r;
            critical = i;
        }
    }
    Ok(Probe {
        unstable: indicator > COMPLEX_TOLERANCE,
        point: TracePoint {
            lambda_star,
            values,
            indicator,
        },
        critical,
    })
}

struct Located {
    lo: f64,
    hi: f64,
    at: Probe,
    trace: Vec<TracePoint>,
}

/// Coarse sweep over the grid, then bisection on the first unstable interval.
/// Branches are continued from the stable side only, so the bracket always
/// holds a stable lower end and an unstable upper end.
fn locate(tracker: &dyn Tracker, options: &SweepOptions) -> Result<Located, FlutterError> {
    let mut state = tracker.initial()?;
    let mut lo = 0.0;
    let mut trace = Vec::new();
    let mut found = None;
    for ls in options.grid() {
        let p = probe(tracker, ls, &state)?;
        trace.push(p.point.clone());
        if p.unstable {
            found = Some((ls, p));
            break;
        }
        state = p.point.values;
        lo = ls;
    }
    let Some((mut hi, mut at)) = found else {
        return Err(FlutterError::NotFound {
            min: options.lambda_star_min,
            max: options.lambda_star_max,
            trace,
        });
    };
    while hi - lo > options.tol_rel * hi {
        let mid = 0.5 * (lo + hi);
        let p = probe(tracker, mid, &state)?;
        if p.unstable {
            hi = mid;
            at = p;
        } else {
            lo = mid;
            state = p.point.values;
        }
    }
    Ok(Located {
        lo,
        hi,
        at,
        trace,
    })
}

/// The two tracked branches (1-based) that form the unstable pair: the most
/// unstable branch and the branch nearest to its conjugate.
fn unstable_pair(at: &[c64], critical: usize, conjugate: impl Fn(c64) -> c64) -> (usize, usize) {
    let target = conjugate(at[critical]);
    let partner = (0..at.len())
        .filter(|&j| j != critical)
        .min_by(|&i, &j| (at[i] - target).norm().total_cmp(&(at[j] - target).norm()))
        .unwrap_or(critical);
    let (i, j) = if critical < partner { (critical, partner) } else { (partner, critical) };
    (i + 1, j + 1)
}

/// `|Im κ̄| / √(Re κ̄)` of the most complex eigenvalue in a set.
fn damping_to_neutralize(values: &[c64]) -> f64 {
    values
        .iter()
        .filter(|v| v.im.abs() > COMPLEX_TOLERANCE * v.norm() && v.re > 0.0)
        .map(|v| v.im.abs() / v.re.sqrt())
        .fold(0.0, f64::max)
}

/// Candidates passed to the matcher: enough of the low spectrum that a
/// tracked branch can always find its continuation.
pub fn candidate_count(tracked: usize) -> usize {
    3 * tracked + 4
}

struct Undamped<'a> {
    pencil: &'a dyn FlutterPencil,
    nd: &'a Nondim,
    tracked: usize,
}

impl Tracker for Undamped<'_> {
    fn initial(&self) -> Result<Vec<c64>, FlutterError> {
        Ok(self.pencil.spectrum(0.0)?.head(self.tracked).to_vec())
    }

    fn continue_at(&self, lambda_star: f64, previous: &[c64]) -> Result<Vec<c64>, FlutterError> {
        let spec = self.pencil.spectrum(self.nd.lambda_from_star(lambda_star))?;
        Ok(match_branches(previous, spec.head(candidate_count(self.tracked))))
    }

    fn indicator(&self, v: c64) -> f64 {
        v.im.abs() / v.norm()
    }
}

/// Locates the first eigenvalue coalescence among the lowest
/// `tracked_branches` branches of a flutter pencil.
pub fn find_flutter_undamped(pencil: &dyn FlutterPencil, nd: &Nondim, options: &SweepOptions) -> Result<FlutterResult, FlutterError> {
    options.validate()?;
    let tracker = Undamped {
        pencil,
        nd,
        tracked: options.tracked_branches.min(pencil.size()),
    };
    let found = locate(&tracker, options)?;
    let values = &found.at.point.values;
    let critical = values[found.at.critical];
    let omega = critical.re.max(0.0).sqrt();
    Ok(FlutterResult {
        lambda_cr: nd.lambda_from_star(found.hi),
        omega_cr: omega,
        lambda_star_cr: found.hi,
        omega_star_cr: nd.omega_star(omega),
        mode_pair: unstable_pair(values, found.at.critical, |v| v.conj()),
        g_tau: damping_to_neutralize(values),
        damped: false,
        trace: found.trace,
        bracket_rel: (found.hi - found.lo) / found.hi,
    })
}

struct Damped<'a> {
    pencil: &'a dyn DampedPencil,
    nd: &'a Nondim,
    damping: &'a AeroDamping,
    tracked: usize,
}

impl Tracker for Damped<'_> {
    fn initial(&self) -> Result<Vec<c64>, FlutterError> {
        // undamped free vibration: s = iω
        let free = self.pencil.spectrum(0.0)?;
        Ok(free.head(self.tracked).iter().map(|k| c64::new(0.0, k.re.max(0.0).sqrt())).collect())
    }

    fn continue_at(&self, lambda_star: f64, previous: &[c64]) -> Result<Vec<c64>, FlutterError> {
        let lambda = self.nd.lambda_from_star(lambda_star);
        let s = self.pencil.state_eigenvalues(lambda, self.damping.coefficient(lambda))?;
        Ok(match_branches(previous, &s))
    }

    fn indicator(&self, s: c64) -> f64 {
        s.re / s.norm()
    }
}

/// Locates the λ where the largest growth rate `Re s` of the tracked
/// branches crosses zero, with piston-theory damping that scales with the
/// flow speed.
pub fn find_flutter_damped(
    pencil: &dyn DampedPencil,
    nd: &Nondim,
    damping: &AeroDamping,
    options: &SweepOptions,
) -> Result<FlutterResult, FlutterError> {
    options.validate()?;
    let tracker = Damped {
        pencil,
        nd,
        damping,
        tracked: options.tracked_branches.min(pencil.size()),
    };
    let found = locate(&tracker, options)?;
    let values = &found.at.point.values;
    let omega = values[found.at.critical].im.abs();
    let undamped = pencil.spectrum(nd.lambda_from_star(found.hi))?;
    // partner: the branch closest in frequency to the critical one
    let pair = unstable_pair(values, found.at.critical, |s| c64::new(-s.re, s.im));
    Ok(FlutterResult {
        lambda_cr: nd.lambda_from_star(found.hi),
        omega_cr: omega,
        lambda_star_cr: found.hi,
        omega_star_cr: nd.omega_star(omega),
        mode_pair: pair,
        g_tau: damping_to_neutralize(undamped.head(candidate_count(options.tracked_branches))),
        damped: true,
        trace: found.trace,
        bracket_rel: (found.hi - found.lo) / found.hi,
    })
}
