//! Geometric entanglement witnesses: operators of the form
//! G = ρ₁ − ρ₂ − ⟨ρ₁, ρ₁−ρ₂⟩·1, certification by global minimization of the
//! expectation value over pure product states, and bisection along shift
//! families ρ_λ = λρ + (1−λ)ρ̃ for the witness/non-witness crossing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GewError, Result};
use crate::matcore::{hs_inner, kron_vec, CMat, DensityMatrix, C64};

/// G = ρ₁ − ρ₂ − ⟨ρ₁, ρ₁−ρ₂⟩·1. Its zero-plane passes through ρ₁ orthogonal
/// (in Hilbert-Schmidt geometry) to ρ₁−ρ₂, and ρ₂ sits strictly on the
/// negative side: Tr ρ₂G = −‖ρ₁−ρ₂‖².
#[derive(Clone, Debug)]
pub struct GeometricOperator {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub g: CMat,
}

pub fn geometric_operator(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<GeometricOperator> {
    if rho1.dim_a() != rho2.dim_a() || rho1.dim_b() != rho2.dim_b() {
        return Err(GewError::DimensionMismatch(format!(
            "geometric_operator: {}x{} vs {}x{} systems",
            rho1.dim_a(),
            rho1.dim_b(),
            rho2.dim_a(),
            rho2.dim_b()
        )));
    }
    let diff = rho1.mat().sub(rho2.mat());
    let dist2 = hs_inner(&diff, &diff)?.re;
    if dist2.sqrt() <= 1e-12 {
        return Err(GewError::Domain(
            "geometric_operator: states coincide; no direction to build from".into(),
        ));
    }
    let inner = hs_inner(rho1.mat(), &diff)?.re;
    let g = diff.sub(&CMat::identity(rho1.dim()).scale(C64::new(inner, 0.0)));
    Ok(GeometricOperator { rho1: rho1.clone(), rho2: rho2.clone(), g })
}

/// The line segment ρ_λ = λρ + (1−λ)ρ̃, λ ∈ [0,1]. Convexity keeps every
/// point a valid state.
#[derive(Clone, Debug)]
pub struct ShiftFamily {
    pub rho: DensityMatrix,
    pub rho_tilde: DensityMatrix,
}

impl ShiftFamily {
    pub fn new(rho: DensityMatrix, rho_tilde: DensityMatrix) -> Result<Self> {
        if rho.dim_a() != rho_tilde.dim_a() || rho.dim_b() != rho_tilde.dim_b() {
            return Err(GewError::DimensionMismatch(format!(
                "shift family endpoints live on {}x{} and {}x{}",
                rho.dim_a(),
                rho.dim_b(),
                rho_tilde.dim_a(),
                rho_tilde.dim_b()
            )));
        }
        Ok(ShiftFamily { rho, rho_tilde })
    }

    pub fn state_at(&self, lambda: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(GewError::OutOfRange(format!("λ = {lambda} outside [0,1]")));
        }
        let m = self
            .rho
            .mat()
            .scale(C64::new(lambda, 0.0))
            .add(&self.rho_tilde.mat().scale(C64::new(1.0 - lambda, 0.0)));
        DensityMatrix::new_relaxed(m, self.rho.dim_a(), self.rho.dim_b())
    }

    /// Hilbert-Schmidt distance between the endpoints.
    pub fn separation(&self) -> f64 {
        let diff = self.rho.mat().sub(self.rho_tilde.mat());
        diff.hs_norm()
    }
}

/// G_λ = ρ_λ − ρ − ⟨ρ_λ, ρ_λ−ρ⟩·1: the geometric operator whose plane passes
/// through ρ_λ and cuts off the λ=1 endpoint.
pub fn shift_operator(f: &ShiftFamily, lambda: f64) -> Result<GeometricOperator> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(GewError::OutOfRange(format!("shift_operator: λ = {lambda} outside [0,1)")));
    }
    geometric_operator(&f.state_at(lambda)?, &f.rho)
}

/// Settings for the see-saw product-state minimization.
#[derive(Clone, Debug)]
pub struct SeesawOpts {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Convergence threshold on |Δvalue| between iterations.
    pub tol: f64,
    pub parallel: bool,
}

impl Default for SeesawOpts {
    fn default() -> Self {
        SeesawOpts { restarts: 32, seed: 42, max_iters: 500, tol: 1e-12, parallel: true }
    }
}

/// Outcome of the product-state minimization.
#[derive(Clone, Debug)]
pub struct ProductOptimum {
    pub psi: Vec<C64>,
    pub phi: Vec<C64>,
    /// min over restarts of ⟨ψ⊗φ|C|ψ⊗φ⟩, re-evaluated directly at the end.
    pub value: f64,
    /// S at the optimum, from value = δμ(1+S); absent when Tr C ≈ 0.
    pub s_min: Option<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

pub fn product_expectation(c: &CMat, psi: &[C64], phi: &[C64]) -> Result<f64> {
    let v = kron_vec(psi, phi);
    if v.len() != c.rows() {
        return Err(GewError::DimensionMismatch(format!(
            "product_expectation: vector length {} vs operator size {}",
            v.len(),
            c.rows()
        )));
    }
    let cv = c.apply(&v);
    Ok(v.iter().zip(&cv).map(|(a, b)| (a.conj() * b).re).sum())
}

fn random_unit_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Pinch the Bob index: K_A[i,k] = Σ_{j,l} φ_j* C[(i,j),(k,l)] φ_l.
fn pinch_b(c: &CMat, phi: &[C64], da: usize, db: usize) -> CMat {
    CMat::from_fn(da, da, |i, k| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..db {
            for l in 0..db {
                acc += phi[j].conj() * c.at(i * db + j, k * db + l) * phi[l];
            }
        }
        acc
    })
}

/// Pinch the Alice index: K_B[j,l] = Σ_{i,k} ψ_i* C[(i,j),(k,l)] ψ_k.
fn pinch_a(c: &CMat, psi: &[C64], da: usize, db: usize) -> CMat {
    CMat::from_fn(db, db, |j, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..da {
            for k in 0..da {
                acc += psi[i].conj() * c.at(i * db + j, k * db + l) * psi[k];
            }
        }
        acc
    })
}

struct RestartOutcome {
    value: f64,
    psi: Vec<C64>,
    phi: Vec<C64>,
    converged: bool,
}

fn seesaw_once(
    c: &CMat,
    da: usize,
    db: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<RestartOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = random_unit_vec(&mut rng, da);
    let mut phi = random_unit_vec(&mut rng, db);
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for _ in 0..max_iters {
        // Each half-step solves its party exactly, so the objective can only
        // decrease.
        let ka = pinch_b(c, &phi, da, db);
        let eig = crate::matcore::herm_eig(&ka)?;
        psi = eig.eigenvector(0);
        let kb = pinch_a(c, &psi, da, db);
        let eig = crate::matcore::herm_eig(&kb)?;
        phi = eig.eigenvector(0);
        let value = eig.eigenvalues[0];
        debug_assert!(value <= prev + 1e-9, "see-saw objective rose: {prev} -> {value}");
        let done = (prev - value).abs() <= tol;
        prev = value;
        if done {
            converged = true;
            break;
        }
    }
    let _ = prev;
    let value = product_expectation(c, &psi, &phi)?;
    Ok(RestartOutcome { value, psi, phi, converged })
}

/// Globally minimizes ⟨ψ⊗φ|C|ψ⊗φ⟩ over product vectors by alternating exact
/// single-party eigenvector solves from multiple seeded starts. Deterministic
/// for fixed options, including under parallel execution.
pub fn min_product_expectation(
    c: &CMat,
    dims: (usize, usize),
    opts: &SeesawOpts,
) -> Result<ProductOptimum> {
    let (da, db) = dims;
    crate::matcore::check_bipartite(c, da, db, "min_product_expectation")?;
    let scale = c.max_abs().max(1.0);
    if c.hermiticity_error() > 1e-10 * scale {
        return Err(GewError::NotHermitian(format!(
            "min_product_expectation: hermiticity error {:.3e}",
            c.hermiticity_error()
        )));
    }
    if opts.restarts == 0 {
        return Err(GewError::OutOfRange("min_product_expectation: zero restarts".into()));
    }
    let run = |r: usize| -> Result<RestartOutcome> {
        let seed = opts.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        seesaw_once(c, da, db, seed, opts.max_iters, opts.tol)
    };
    let outcomes: Vec<RestartOutcome> = if opts.parallel && opts.restarts > 1 {
        (0..opts.restarts).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..opts.restarts).map(run).collect::<Result<_>>()?
    };
    let mut best = 0usize;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value < outcomes[best].value {
            best = i;
        }
    }
    let best = &outcomes[best];
    let e = c.trace().re / c.rows() as f64;
    let s_min = if e.abs() > 1e-12 { Some(best.value / e - 1.0) } else { None };
    Ok(ProductOptimum {
        psi: best.psi.clone(),
        phi: best.phi.clone(),
        value: best.value,
        s_min,
        restarts_used: opts.restarts,
        converged: best.converged,
    })
}

/// Verdict of the witness certification.
#[derive(Clone, Debug)]
pub struct WitnessCheck {
    /// Minimum product expectation ≥ −1e−8 (evaluated at unit HS norm, so the
    /// verdict is scale-invariant).
    pub witness: bool,
    /// Some state has negative expectation, i.e. the smallest eigenvalue is
    /// negative; a witness that is not detecting never certifies anything.
    pub detecting: bool,
    /// Witness, detecting, and the product minimum sits within 1e−6 of zero:
    /// some product state reaches S = −1.
    pub optimal: bool,
    /// Product minimum of the operator normalized to unit HS norm.
    pub min_normalized: f64,
    /// Optimum rescaled back to the original operator.
    pub optimum: ProductOptimum,
}

pub fn is_witness(c: &CMat, dims: (usize, usize), opts: &SeesawOpts) -> Result<WitnessCheck> {
    let norm = c.hs_norm();
    if norm <= 1e-14 {
        return Err(GewError::Domain("is_witness: zero operator".into()));
    }
    let cn = c.scale(C64::new(1.0 / norm, 0.0));
    let opt_n = min_product_expectation(&cn, dims, opts)?;
    let witness = opt_n.value >= -1e-8;
    let min_eig = crate::matcore::herm_eig(&cn)?.eigenvalues[0];
    let detecting = min_eig < -1e-10;
    let optimal = witness && detecting && opt_n.value.abs() <= 1e-6;
    let optimum = ProductOptimum { value: opt_n.value * norm, ..opt_n.clone() };
    Ok(WitnessCheck { witness, detecting, optimal, min_normalized: opt_n.value, optimum })
}

/// Which crossing along the shift family to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMode {
    /// Smallest λ with G_λ a certified witness: every ρ_μ with μ > λ* is then
    /// entangled, because Tr ρ_μ G_{λ*} < 0.
    OutsideIn,
    /// Largest λ where the product minimum still reaches −1 in S: the position
    /// where the shifted plane becomes tangent to the product-state body.
    InsideOut,
}

#[derive(Clone, Debug)]
pub struct CrossingReport {
    pub lambda_star: f64,
    /// Final bracket (non-witness side resolution ≤ requested tol).
    pub bracket: (f64, f64),
    pub mode: ShiftMode,
    /// Every (λ, witness?) pair evaluated, in evaluation order.
    pub trace: Vec<(f64, bool)>,
}

/// Bisects is_witness(G_λ) over λ ∈ [0, 1). Requires the witness status to
/// differ at the endpoints; a family that never crosses is reported as
/// `NoBracketing`, not silently clamped.
pub fn find_witness_crossing(
    f: &ShiftFamily,
    mode: ShiftMode,
    tol: f64,
    opts: &SeesawOpts,
) -> Result<CrossingReport> {
    if f.separation() <= 1e-12 {
        return Err(GewError::Domain(
            "find_witness_crossing: endpoints coincide; the family is a point".into(),
        ));
    }
    if tol <= 0.0 {
        return Err(GewError::OutOfRange(format!("bisection tolerance {tol} must be positive")));
    }
    let dims = (f.rho.dim_a(), f.rho.dim_b());
    let mut trace = Vec::new();
    let mut eval = |lam: f64| -> Result<bool> {
        let g = shift_operator(f, lam)?;
        let w = is_witness(&g.g, dims, opts)?.witness;
        trace.push((lam, w));
        Ok(w)
    };

    let hi0 = 1.0 - 1e-9;
    let w_lo = eval(0.0)?;
    let w_hi = eval(hi0)?;
    if w_lo == w_hi {
        return Err(GewError::NoBracketing(format!(
            "witness status is {w_lo} at both λ=0 and λ={hi0}; no crossing to bisect"
        )));
    }
    let (mut lo, mut hi) = (0.0, hi0);
    for _ in 0..80 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if eval(mid)? == w_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // One end of the bracket is certified witness, the other not.
    let (witness_end, plain_end) = if w_hi { (hi, lo) } else { (lo, hi) };
    let lambda_star = match mode {
        ShiftMode::OutsideIn => witness_end,
        ShiftMode::InsideOut => plain_end,
    };
    Ok(CrossingReport { lambda_star, bracket: (lo, hi), mode, trace })
}
