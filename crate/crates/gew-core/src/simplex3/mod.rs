//! The two-qutrit three-parameter case study: Bell projectors built from Weyl
//! operators, the state family
//!
//!   ρ_{α,β,γ} = (1−α−β−γ)/9·1 + α P₀₀ + (β/2)(P₁₀+P₂₀) + (γ/3)(P₀₁+P₁₁+P₂₁),
//!
//! its closed-form constraint surfaces (positivity, PPT, realignment), an
//! orthogonal Euclidean chart for the parameter space, the tangent witness
//! family G_re on the realignment surface, the four kernel-polygon edge
//! operators, and the embedded Horodecki line.

pub mod mesh;
pub mod scan;
pub mod surfaces;
pub mod tangency;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bloch::weyl_op;
use crate::error::{GewError, Result};
use crate::matcore::{kron, CMat, DensityMatrix, C64};

/// Mixing parameters (α, β, γ) of the state family. Not every point is a
/// state; validity is decided by the positivity constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FamilyPoint {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        FamilyPoint { alpha, beta, gamma }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        FamilyPoint { alpha: v[0], beta: v[1], gamma: v[2] }
    }
}

/// Image of a family point in coordinates where Hilbert-Schmidt distances
/// between family states are proportional to Euclidean distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclidPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// a = α − β/8 − γ/8, b = (√3/8)(3β − γ), c = (√3/4)γ.
pub fn to_euclid(p: FamilyPoint) -> EuclidPoint {
    EuclidPoint {
        a: p.alpha - p.beta / 8.0 - p.gamma / 8.0,
        b: 3f64.sqrt() / 8.0 * (3.0 * p.beta - p.gamma),
        c: 3f64.sqrt() / 4.0 * p.gamma,
    }
}

/// Inverse of [`to_euclid`].
pub fn from_euclid(e: EuclidPoint) -> FamilyPoint {
    let gamma = 4.0 * e.c / 3f64.sqrt();
    let beta = (8.0 * e.b / 3f64.sqrt() + gamma) / 3.0;
    FamilyPoint { alpha: e.a + beta / 8.0 + gamma / 8.0, beta, gamma }
}

/// ‖ρ(p₁) − ρ(p₂)‖_HS / |E(p₁) − E(p₂)| = 2√2/3 for all point pairs.
pub fn hs_euclid_ratio() -> f64 {
    (8.0f64).sqrt() / 3.0
}

/// Bell projector P_nm = (U_nm ⊗ 1)|φ⁺_d⟩⟨φ⁺_d|(U†_nm ⊗ 1): pure, locally
/// maximally mixed, and mutually orthogonal across all d² index pairs.
pub fn bell_state(d: usize, n: usize, m: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(GewError::OutOfRange(format!("bell_state: dimension {d} < 2")));
    }
    if n >= d || m >= d {
        return Err(GewError::OutOfRange(format!(
            "bell_state: indices ({n},{m}) outside 0..{d}"
        )));
    }
    let u = kron(&weyl_op(d, n, m), &CMat::identity(d));
    let mut phi = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        phi[j * d + j] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    DensityMatrix::from_pure(&u.apply(&phi), d, d)
}

/// The nine d = 3 Bell projector matrices, row-major in (n, m).
fn bell3() -> &'static Vec<CMat> {
    static CELL: OnceLock<Vec<CMat>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut v = Vec::with_capacity(9);
        for n in 0..3 {
            for m in 0..3 {
                v.push(bell_state(3, n, m).expect("fixed valid indices").mat().clone());
            }
        }
        v
    })
}

fn bell3_at(n: usize, m: usize) -> &'static CMat {
    &bell3()[n * 3 + m]
}

/// The family state ρ_{α,β,γ}. Always Hermitian with unit trace; positive
/// exactly when the four closed-form constraints hold, so the matrix is
/// returned without a positivity gate.
pub fn family_state(p: FamilyPoint) -> DensityMatrix {
    let m = (1.0 - p.alpha - p.beta - p.gamma) / 9.0;
    let mut rho = CMat::identity(9).scale(C64::new(m, 0.0));
    rho = rho.add(&bell3_at(0, 0).scale(C64::new(p.alpha, 0.0)));
    for n in 1..3 {
        rho = rho.add(&bell3_at(n, 0).scale(C64::new(p.beta / 2.0, 0.0)));
    }
    for n in 0..3 {
        rho = rho.add(&bell3_at(n, 1).scale(C64::new(p.gamma / 3.0, 0.0)));
    }
    DensityMatrix::new_relaxed(rho, 3, 3).expect("family states are Hermitian with unit trace")
}

/// The nine eigenvalues of ρ_{α,β,γ} in closed form, with multiplicities:
/// m+α, m+β/2 (×2), m+γ/3 (×3), m (×3), where m = (1−α−β−γ)/9.
pub fn family_eigenvalues(p: FamilyPoint) -> [f64; 9] {
    let m = (1.0 - p.alpha - p.beta - p.gamma) / 9.0;
    let b2 = m + p.beta / 2.0;
    let g3 = m + p.gamma / 3.0;
    [m + p.alpha, b2, b2, g3, g3, g3, m, m, m]
}

/// The embedded one-parameter line with NPT, separable, and bound entangled
/// segments: b ↦ (α, β, γ) = ((6−b)/21, −2b/21, (5−2b)/7), 0 ≤ b ≤ 5. All of
/// its points lie on the positivity boundary plane α = (7/2)β + 1 − γ.
pub fn horodecki(b: f64) -> Result<(FamilyPoint, DensityMatrix)> {
    if !(0.0..=5.0).contains(&b) {
        return Err(GewError::OutOfRange(format!("horodecki: b = {b} outside [0, 5]")));
    }
    let p = FamilyPoint::new((6.0 - b) / 21.0, -2.0 * b / 21.0, (5.0 - 2.0 * b) / 7.0);
    let rho = family_state(p);
    Ok((p, rho))
}

fn u1() -> CMat {
    let pairs = [
        ((0, 1), (0, 1)),
        ((0, 2), (0, 2)),
        ((1, 1), (2, 1)),
        ((1, 2), (2, 2)),
        ((2, 1), (1, 1)),
        ((2, 2), (1, 2)),
    ];
    let mut acc = CMat::zeros(9, 9);
    for ((n1, m1), (n2, m2)) in pairs {
        acc = acc.add(&kron(&weyl_op(3, n1, m1), &weyl_op(3, n2, m2)));
    }
    acc
}

fn u2_parts() -> (CMat, CMat) {
    (
        kron(&weyl_op(3, 1, 0), &weyl_op(3, 2, 0)),
        kron(&weyl_op(3, 2, 0), &weyl_op(3, 1, 0)),
    )
}

fn weyl_combo(prefactor: f64, u1_sign: f64, c: C64) -> CMat {
    let (u2i, u2ii) = u2_parts();
    CMat::identity(9)
        .scale(C64::new(2.0, 0.0))
        .add(&u1().scale(C64::new(u1_sign, 0.0)))
        .add(&u2i.scale(c))
        .add(&u2ii.scale(c.conj()))
        .scale(C64::new(prefactor, 0.0))
}

/// A tangent witness on the realignment surface.
#[derive(Clone, Debug)]
pub struct TangentWitness {
    pub op: CMat,
    /// The touching family point (α_t, β_t, γ_t) with α_t on the surface.
    pub tangent: FamilyPoint,
    /// Overall prefactor a; positive on the valid domain.
    pub a: f64,
    /// Complex coefficient multiplying the first single-slot Weyl term.
    pub c: C64,
    pub delta1: f64,
}

/// The geometric operator tangent to the realignment surface above
/// (β_t, γ_t):
///
///   G_re = a(2·1 − U₁ + c·U₂^I + c*·U₂^{II}),
///
/// with a and c in closed form. It is Hermitian with vanishing local Bloch
/// parts, all eight normalized singular values equal to 1, and nonnegative on
/// every product state; it detects all family states strictly above the
/// tangent plane.
///
/// Errors where the construction degenerates: a ≤ 0 or vanishing denominator
/// (both happen only at the surface's contact with the maximally mixed state,
/// (β, γ) = (−2/9, 0)).
pub fn g_re(beta_t: f64, gamma_t: f64) -> Result<TangentWitness> {
    let d1 = surfaces::delta1(beta_t, gamma_t)?;
    let a = (-2.0 - 9.0 * beta_t + 3.0 * gamma_t + 3.0 * d1) / 36.0;
    if a <= 1e-12 {
        return Err(GewError::Domain(format!(
            "g_re: degenerate prefactor a = {a:.3e} at ({beta_t}, {gamma_t})"
        )));
    }
    let den = (2.0 + 9.0 * beta_t).powi(2) - 6.0 * (2.0 + 9.0 * beta_t) * gamma_t
        + 36.0 * gamma_t * gamma_t;
    if den.abs() < 1e-12 {
        return Err(GewError::Domain(format!(
            "g_re: vanishing denominator at ({beta_t}, {gamma_t})"
        )));
    }
    let re = (9.0 * gamma_t * gamma_t + (-2.0 - 9.0 * beta_t + 3.0 * gamma_t) * d1) / den;
    let im = -(3f64.sqrt()) * gamma_t * (2.0 + 9.0 * beta_t - 3.0 * gamma_t + 3.0 * d1) / den;
    let c = C64::new(re, im);
    let alpha_t = surfaces::realign_surface_alpha(beta_t, gamma_t)?;
    Ok(TangentWitness {
        op: weyl_combo(a, -1.0, c),
        tangent: FamilyPoint::new(alpha_t, beta_t, gamma_t),
        a,
        c,
        delta1: d1,
    })
}

/// The four fixed operators whose zero-planes carry the edges of the kernel
/// polygon: a = 1/63, c = −1 ± √3·i, the "u" pair with −U₁ and the "d" pair
/// with +U₁. They are not witnesses themselves; shifted outward they become
/// tangent to the product-state body.
#[derive(Clone, Debug)]
pub struct PolygonOps {
    pub gu_plus: CMat,
    pub gu_minus: CMat,
    pub gd_plus: CMat,
    pub gd_minus: CMat,
}

impl PolygonOps {
    /// Name/operator pairs in a fixed order.
    pub fn named(&self) -> [(&'static str, &CMat); 4] {
        [
            ("gu+", &self.gu_plus),
            ("gu-", &self.gu_minus),
            ("gd+", &self.gd_plus),
            ("gd-", &self.gd_minus),
        ]
    }
}

pub fn polygon_ops() -> PolygonOps {
    let a = 1.0 / 63.0;
    let cp = C64::new(-1.0, 3f64.sqrt());
    let cm = C64::new(-1.0, -(3f64.sqrt()));
    PolygonOps {
        gu_plus: weyl_combo(a, -1.0, cp),
        gu_minus: weyl_combo(a, -1.0, cm),
        gd_plus: weyl_combo(a, 1.0, cp),
        gd_minus: weyl_combo(a, 1.0, cm),
    }
}

/// Default vertices of the kernel polygon, in figure order 1–5. These points
/// are asserted separable (their separability rests on external arguments,
/// not on anything this crate proves): the two ends of the vertex line at
/// γ = ∓1 where the realignment surface meets the boundary plane, and the
/// three corners of the γ = 0 cross-section.
pub fn kernel_polygon_default() -> [FamilyPoint; 5] {
    [
        FamilyPoint::new(-1.0 / 3.0, -2.0 / 3.0, -1.0),
        FamilyPoint::new(-1.0 / 12.0, 1.0 / 3.0, 0.0),
        FamilyPoint::new(1.0 / 3.0, 2.0 / 3.0, 0.0),
        FamilyPoint::new(2.0 / 9.0, -2.0 / 9.0, 0.0),
        FamilyPoint::new(0.0, 0.0, 1.0),
    ]
}
