//! Closed-form constraint surfaces of the three-parameter family: positivity
//! (four planes), PPT (a slab and a conic section), and realignment (two
//! curved sheets), plus the convex body they bound and ray queries against it.
//!
//! Margin conventions: every margin is a signed slack in α-units, ≥ 0 when
//! the constraint is satisfied. The constraint directions were reconciled
//! against numeric partial-transpose and realignment oracles (see the tests
//! at the bottom); the corrected directions are what ships.

use crate::error::{GewError, Result};
use crate::simplex3::{family_eigenvalues, FamilyPoint};

/// Realignment discriminant Δ₁ = √(4+36β+81β²−12γ−54βγ+33γ²). The radicand
/// is nonnegative everywhere (minimum 0 at (β,γ) = (−2/9, 0)); tiny negative
/// round-off is clamped, anything materially negative is a domain error.
pub fn delta1(beta: f64, gamma: f64) -> Result<f64> {
    let rad = 4.0 + 36.0 * beta + 81.0 * beta * beta - 12.0 * gamma - 54.0 * beta * gamma
        + 33.0 * gamma * gamma;
    radicand_sqrt(rad, "Δ₁")
}

/// Realignment discriminant Δ₂ = √(4−36β+81β²+12γ−54βγ+33γ²); nonnegative
/// radicand with minimum 0 at (β,γ) = (2/9, 0).
pub fn delta2(beta: f64, gamma: f64) -> Result<f64> {
    let rad = 4.0 - 36.0 * beta + 81.0 * beta * beta + 12.0 * gamma - 54.0 * beta * gamma
        + 33.0 * gamma * gamma;
    radicand_sqrt(rad, "Δ₂")
}

fn radicand_sqrt(rad: f64, what: &str) -> Result<f64> {
    if rad < -1e-9 {
        return Err(GewError::Domain(format!("{what}: radicand {rad:.3e} is negative")));
    }
    Ok(rad.max(0.0).sqrt())
}

/// PPT conic discriminant Δ = 4+9β²+4γ−7γ²−6β(2+γ). May be negative; there
/// the PPT quadratic has no real α-interval and the point is NPT for every α.
pub fn delta_ppt(beta: f64, gamma: f64) -> f64 {
    4.0 + 9.0 * beta * beta + 4.0 * gamma - 7.0 * gamma * gamma - 6.0 * beta * (2.0 + gamma)
}

/// The binding realignment sheet: the largest α at (β, γ) with realignment
/// sum ≤ 1, α = (6+11β−γ−Δ₁)/16. Tangent witnesses are constructed on it.
pub fn realign_surface_alpha(beta: f64, gamma: f64) -> Result<f64> {
    Ok((6.0 + 11.0 * beta - gamma - delta1(beta, gamma)?) / 16.0)
}

/// Q(α,β,γ): the partial-transpose spectrum consists of (1+2α+2β−γ)/9 and
/// the roots of 324λ² + (72α+72β−36γ−72)λ − Q, each threefold. Q ≤ 0 is the
/// conic part of the PPT condition.
fn ppt_q(p: FamilyPoint) -> f64 {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    32.0 * a * a - 44.0 * a * b + 4.0 * a * g + 8.0 * a + 5.0 * b * b + 4.0 * b * g + 8.0 * b
        + 8.0 * g * g
        - 4.0 * g
        - 4.0
}

/// The three distinct partial-transpose eigenvalues in closed form:
/// [slab value, smaller quadratic root, larger quadratic root].
pub fn ppt_eigenvalues_closed(p: FamilyPoint) -> [f64; 3] {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let slab = (1.0 + 2.0 * a + 2.0 * b - g) / 9.0;
    let bq = 72.0 * a + 72.0 * b - 36.0 * g - 72.0;
    // Hermitian spectrum, so the discriminant is nonnegative up to round-off
    let disc = (bq * bq + 4.0 * 324.0 * ppt_q(p)).max(0.0).sqrt();
    [slab, (-bq - disc) / 648.0, (-bq + disc) / 648.0]
}

/// Closed-form smallest eigenvalue of the partial transpose.
pub fn ppt_margin_closed(p: FamilyPoint) -> f64 {
    let ev = ppt_eigenvalues_closed(p);
    ev[0].min(ev[1])
}

/// Closed-form smallest eigenvalue of the state itself.
pub fn positivity_margin_closed(p: FamilyPoint) -> f64 {
    family_eigenvalues(p).into_iter().fold(f64::INFINITY, f64::min)
}

/// All closed-form constraint margins at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintReport {
    /// Positivity slacks: [α ≤ (7/2)β+1−γ, α ≤ 1−β−γ, α ≤ 1−β+2γ,
    /// α ≥ (β+γ−1)/8], scaled multiples of the four eigenvalue groups.
    pub positivity: [f64; 4],
    /// PPT slacks: [lower slab α ≥ γ/2−β−1/2, upper bound
    /// min(slab α ≤ 1−β+γ/2, conic α ≤ (−2+11β−γ+3√Δ)/16), conic lower
    /// α ≥ (−2+11β−γ−3√Δ)/16]. For Δ < 0 the two conic entries both report
    /// −Q/32 < 0 (NPT for every α).
    pub ppt_closed: [f64; 3],
    /// Realignment slacks: [α ≤ (6+11β−γ−Δ₁)/16, α ≤ (6+11β−γ+Δ₁)/16,
    /// α ≥ (−6+11β−γ−Δ₂)/16, α ≥ (−6+11β−γ+Δ₂)/16]; the first and last are
    /// the binding sheets.
    pub realign_closed: [f64; 4],
    /// Inside the region bounded below by the realignment surface and above
    /// by the boundary plane and the PPT conic: PPT yet realignment-violating,
    /// hence bound entangled.
    pub in_bound_region: bool,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl ConstraintReport {
    pub fn positivity_ok(&self) -> bool {
        self.positivity.iter().all(|&m| m >= 0.0)
    }

    pub fn ppt_ok(&self) -> bool {
        self.ppt_closed.iter().all(|&m| m >= 0.0)
    }

    pub fn realign_ok(&self) -> bool {
        self.realign_closed.iter().all(|&m| m >= 0.0)
    }
}

pub fn constraint_report(p: FamilyPoint) -> ConstraintReport {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);

    let positivity = [
        3.5 * b + 1.0 - g - a,
        1.0 - b - g - a,
        1.0 - b + 2.0 * g - a,
        a - (b + g - 1.0) / 8.0,
    ];

    let delta = delta_ppt(b, g);
    let m1 = a + b + 0.5 - 0.5 * g;
    let ppt_closed = if delta >= 0.0 {
        let s = delta.sqrt();
        let upper_conic = (-2.0 + 11.0 * b - g + 3.0 * s) / 16.0 - a;
        let upper_slab = 1.0 - b + 0.5 * g - a;
        let lower_conic = a - (-2.0 + 11.0 * b - g - 3.0 * s) / 16.0;
        [m1, upper_conic.min(upper_slab), lower_conic]
    } else {
        let q = -ppt_q(p) / 32.0;
        [m1, q, q]
    };

    // the realignment radicands are globally nonnegative, so these cannot fail
    let d1 = delta1(b, g).expect("Δ₁ radicand is nonnegative");
    let d2 = delta2(b, g).expect("Δ₂ radicand is nonnegative");
    let realign_closed = [
        (6.0 + 11.0 * b - g - d1) / 16.0 - a,
        (6.0 + 11.0 * b - g + d1) / 16.0 - a,
        a - (-6.0 + 11.0 * b - g - d2) / 16.0,
        a - (-6.0 + 11.0 * b - g + d2) / 16.0,
    ];

    let in_bound_region = delta >= 0.0
        && positivity[0] >= -1e-12
        && ((-2.0 + 11.0 * b - g + 3.0 * delta.max(0.0).sqrt()) / 16.0 - a) >= -1e-12
        && -realign_closed[0] >= -1e-12;

    ConstraintReport {
        positivity,
        ppt_closed,
        realign_closed,
        in_bound_region,
        delta,
        delta1: d1,
        delta2: d2,
    }
}

/// Positivity margins at `p` (full report; see [`ConstraintReport`]).
pub fn positivity_check(p: FamilyPoint) -> ConstraintReport {
    constraint_report(p)
}

/// Reconciled closed-form PPT margins at `p`.
pub fn ppt_closed_form(p: FamilyPoint) -> ConstraintReport {
    constraint_report(p)
}

/// Closed-form realignment margins at `p`.
pub fn realign_closed_form(p: FamilyPoint) -> ConstraintReport {
    constraint_report(p)
}

/// Bound-entanglement region membership at `p`.
pub fn bound_region(p: FamilyPoint) -> ConstraintReport {
    constraint_report(p)
}

/// Smallest slack over every constraint bounding the convex body
/// positivity ∧ PPT ∧ realignment; ≥ 0 inside.
pub fn body_margin(p: FamilyPoint) -> f64 {
    let r = constraint_report(p);
    r.positivity
        .iter()
        .chain(r.ppt_closed.iter())
        .chain(r.realign_closed.iter())
        .fold(f64::INFINITY, |acc, &m| acc.min(m))
}

/// Largest r ≥ 0 with `from + r·dir` still inside the body. The body is
/// convex and contains the origin (the maximally mixed state) strictly, so
/// the exit point along any ray from an interior start is unique.
pub fn ray_support(from: FamilyPoint, dir: [f64; 3]) -> f64 {
    let at = |r: f64| {
        FamilyPoint::new(
            from.alpha + r * dir[0],
            from.beta + r * dir[1],
            from.gamma + r * dir[2],
        )
    };
    let (mut lo, mut hi) = (0.0f64, 0.05f64);
    while body_margin(at(hi)) >= 0.0 && hi < 10.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if body_margin(at(mid)) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
