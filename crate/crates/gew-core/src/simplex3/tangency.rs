//! Locating the tangent point of a witness plane on the PPT ∩ realignment
//! body and driving the inside-out shift construction from it.
//!
//! Every operator that is affine on the family induces a plane in parameter
//! space. The routine here finds where the convex constraint body comes
//! closest to that plane, builds a shift family along the Euclidean plane
//! normal through that touch point, and bisects the see-saw minimum of the
//! shifted plane over the family: the λ where the minimum reaches zero is
//! the tangency position, and its state lands on the boundary surface.

use serde::Serialize;

use crate::error::{GewError, Result};
use crate::matcore::CMat;
use crate::simplex3::surfaces::{body_margin, constraint_report, ray_support};
use crate::simplex3::{family_state, to_euclid, EuclidPoint, FamilyPoint};
use crate::witness::{min_product_expectation, shift_operator, SeesawOpts, ShiftFamily};

/// Tr O ρ_p = t0 + g·(α,β,γ) for any operator O: the trace is linear in ρ
/// and ρ_p is affine in the parameters.
#[derive(Clone, Copy, Debug)]
pub struct PlaneInfo {
    pub t0: f64,
    pub g: [f64; 3],
}

impl PlaneInfo {
    pub fn value(&self, p: FamilyPoint) -> f64 {
        self.t0 + self.g[0] * p.alpha + self.g[1] * p.beta + self.g[2] * p.gamma
    }
}

pub fn plane_of(op: &CMat) -> Result<PlaneInfo> {
    if op.rows() != 9 || op.cols() != 9 {
        return Err(GewError::DimensionMismatch(format!(
            "plane_of: expected a 9x9 operator, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    let tr_at = |p: FamilyPoint| op.matmul(family_state(p).mat()).trace().re;
    let t0 = tr_at(FamilyPoint::new(0.0, 0.0, 0.0));
    let g = [
        tr_at(FamilyPoint::new(1.0, 0.0, 0.0)) - t0,
        tr_at(FamilyPoint::new(0.0, 1.0, 0.0)) - t0,
        tr_at(FamilyPoint::new(0.0, 0.0, 1.0)) - t0,
    ];
    Ok(PlaneInfo { t0, g })
}

/// Jacobian of the parameter→Euclid coordinate map and its inverse.
fn jmat() -> [[f64; 3]; 3] {
    let s3 = 3.0f64.sqrt();
    [
        [1.0, -0.125, -0.125],
        [0.0, 3.0 * s3 / 8.0, -s3 / 8.0],
        [0.0, 0.0, s3 / 4.0],
    ]
}

fn jinv() -> [[f64; 3]; 3] {
    let s3 = 3.0f64.sqrt();
    [
        [1.0, 1.0 / (3.0 * s3), 2.0 / (3.0 * s3)],
        [0.0, 8.0 / (3.0 * s3), 4.0 / (3.0 * s3)],
        [0.0, 0.0, 4.0 / s3],
    ]
}

fn matvec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn matvec_t(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(v: [f64; 3]) -> f64 {
    dot(v, v).sqrt()
}

fn axpy(p: FamilyPoint, t: f64, d: [f64; 3]) -> FamilyPoint {
    FamilyPoint::new(p.alpha + t * d[0], p.beta + t * d[1], p.gamma + t * d[2])
}

/// Support point of the constraint body in direction w: argmax w·p. Coarse
/// sweep of boundary points reached by rays from the maximally mixed state
/// (ray directions sampled uniformly on the Euclidean sphere, then mapped to
/// parameter space), followed by pattern refinement in the two angles.
pub fn touch_point(w: [f64; 3]) -> FamilyPoint {
    let origin = FamilyPoint::new(0.0, 0.0, 0.0);
    let ji = jinv();
    let boundary = move |theta: f64, phi: f64| -> (FamilyPoint, f64) {
        let d_e = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let d = matvec(&ji, d_e);
        let r = ray_support(origin, d);
        let p = axpy(origin, r, d);
        (p, dot(w, [p.alpha, p.beta, p.gamma]))
    };

    let (n_th, n_ph) = (60usize, 120usize);
    let mut best = (0.001f64, 0.0f64, f64::NEG_INFINITY);
    for i in 0..n_th {
        let th = 0.001 + (std::f64::consts::PI - 0.002) * i as f64 / (n_th - 1) as f64;
        for j in 0..n_ph {
            let ph = 2.0 * std::f64::consts::PI * j as f64 / n_ph as f64;
            let (_, score) = boundary(th, ph);
            if score > best.2 {
                best = (th, ph, score);
            }
        }
    }

    let mut step = std::f64::consts::PI / 60.0;
    for _ in 0..40 {
        let (th, ph, _) = best;
        let mut improved = false;
        for (dt, df) in [
            (step, 0.0),
            (-step, 0.0),
            (0.0, step),
            (0.0, -step),
            (step, step),
            (-step, -step),
            (step, -step),
            (-step, step),
        ] {
            let (_, s) = boundary(th + dt, ph + df);
            if s > best.2 + 1e-16 {
                best = (th + dt, ph + df, s);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    boundary(best.0, best.1).0
}

/// Outcome of the inside-out construction for one witness plane.
#[derive(Clone, Debug, Serialize)]
pub struct TangencyReport {
    /// Support point of the constraint body toward the plane.
    pub touch: FamilyPoint,
    /// Euclidean-orthogonal projection of the touch point onto {Tr Gρ = 0}.
    pub foot: FamilyPoint,
    /// Start of the shift family: past the touch point along the outward
    /// normal, still a valid state.
    pub outer: FamilyPoint,
    /// Bisected λ where the raw see-saw minimum of the shifted plane first
    /// clears −1e−8 (the S = −1 tangency position).
    pub lambda_star: f64,
    /// foot + λ*(outer − foot): the state pinned on the constraint surface.
    pub crossing: FamilyPoint,
    pub crossing_euclid: EuclidPoint,
    /// Distance (in parameter coordinates) from the crossing to the body
    /// surface, measured along the plane normal.
    pub surface_distance: f64,
    /// (λ, witness?) bisection log.
    pub trace: Vec<(f64, bool)>,
}

/// Runs the full inside-out pipeline for one plane-inducing operator.
pub fn inside_out_tangency(
    op: &CMat,
    opts: &SeesawOpts,
    lambda_tol: f64,
) -> Result<TangencyReport> {
    let plane = plane_of(op)?;
    if norm(plane.g) < 1e-12 {
        return Err(GewError::Domain(
            "inside_out_tangency: the operator is constant on the family".into(),
        ));
    }

    // inward Euclidean normal of the plane, mapped back to parameter coords
    let mut u_e = matvec_t(&jinv(), plane.g);
    let n = norm(u_e);
    u_e = [-u_e[0] / n, -u_e[1] / n, -u_e[2] / n];
    let w = matvec_t(&jmat(), u_e);
    let dp = matvec(&jinv(), u_e);

    let touch = touch_point(w);
    let tau = plane.value(touch) / dot(plane.g, dp);
    let foot = axpy(touch, -tau, dp);

    // march along the outward normal until positivity breaks, then back off
    let positive = |t: f64| constraint_report(axpy(touch, t, dp)).positivity_ok();
    let mut t_in = 0.0f64;
    while positive(t_in + 0.01) && t_in < 5.0 {
        t_in += 0.01;
    }
    let mut t_out = t_in + 0.01;
    for _ in 0..60 {
        let mid = 0.5 * (t_in + t_out);
        if positive(mid) {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    let outer = axpy(touch, 0.8 * t_in, dp);

    // Bisect the raw see-saw minimum of the shifted plane against −1e−8.
    // λ→1 is the cleared side by construction (the plane leaves the body
    // through the touch point); the λ=0 plane must still be violated.
    let fam = ShiftFamily::new(family_state(outer), family_state(foot))?;
    let mut trace = Vec::new();
    let cleared_at = |lam: f64, trace: &mut Vec<(f64, bool)>| -> Result<bool> {
        let g = shift_operator(&fam, lam)?;
        let ok = min_product_expectation(&g.g, (3, 3), opts)?.value >= -1e-8;
        trace.push((lam, ok));
        Ok(ok)
    };
    if cleared_at(0.0, &mut trace)? {
        return Err(GewError::NoBracketing(
            "inside_out_tangency: the plane already clears all product states at λ = 0".into(),
        ));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iters = 0;
    while hi - lo > lambda_tol && iters < 80 {
        let mid = 0.5 * (lo + hi);
        if cleared_at(mid, &mut trace)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    let lam = 0.5 * (lo + hi);
    let crossing = FamilyPoint::new(
        foot.alpha + lam * (outer.alpha - foot.alpha),
        foot.beta + lam * (outer.beta - foot.beta),
        foot.gamma + lam * (outer.gamma - foot.gamma),
    );

    let surface_distance = distance_to_surface(crossing, dp)?;
    Ok(TangencyReport {
        touch,
        foot,
        outer,
        lambda_star: lam,
        crossing,
        crossing_euclid: to_euclid(crossing),
        surface_distance,
        trace,
    })
}

/// Distance from `p` to the zero level of the body margin along ±dir,
/// in parameter coordinates.
fn distance_to_surface(p: FamilyPoint, dir: [f64; 3]) -> Result<f64> {
    let m0 = body_margin(p);
    if m0 == 0.0 {
        return Ok(0.0);
    }
    // inside: the margin flips sign outward along +dir; outside: along −dir.
    // Probe both orientations in case the normal points the unexpected way.
    let sgn = if m0 > 0.0 { 1.0 } else { -1.0 };
    for s in [sgn, -sgn] {
        let d = [s * dir[0], s * dir[1], s * dir[2]];
        if body_margin(axpy(p, 0.2, d)) * m0 < 0.0 {
            let at = |t: f64| body_margin(axpy(p, t, d));
            let (mut lo, mut hi) = (0.0f64, 0.2f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if at(mid) * m0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi) * norm(d));
        }
    }
    Err(GewError::Domain(format!(
        "distance_to_surface: no boundary within 0.2 of {p:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::CMat;
    use crate::simplex3::{polygon_ops, surfaces};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn jacobian_matches_coordinate_map() {
        // jmat·jinv = 1
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += jmat()[i][k] * jinv()[k][j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s, want, epsilon = 1e-14);
            }
        }
        // matvec(jmat, p) = to_euclid(p)
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let p = FamilyPoint::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let e = to_euclid(p);
            let v = matvec(&jmat(), [p.alpha, p.beta, p.gamma]);
            assert_abs_diff_eq!(v[0], e.a, epsilon = 1e-14);
            assert_abs_diff_eq!(v[1], e.b, epsilon = 1e-14);
            assert_abs_diff_eq!(v[2], e.c, epsilon = 1e-14);
        }
    }

    #[test]
    fn plane_reproduces_traces_exactly() {
        let ops = polygon_ops();
        let plane = plane_of(&ops.gu_plus).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..12 {
            let p = FamilyPoint::new(
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
            );
            let tr = ops.gu_plus.matmul(family_state(p).mat()).trace().re;
            assert_abs_diff_eq!(plane.value(p), tr, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_operators_are_rejected() {
        let id = CMat::identity(9);
        let err = inside_out_tangency(&id, &SeesawOpts::default(), 1e-6).unwrap_err();
        assert!(err.to_string().contains("constant"));
    }

    #[test]
    fn touch_point_maximizes_support() {
        // support in −γ direction: the body floor sits below the origin
        let p = touch_point([0.0, 0.0, -1.0]);
        assert!(p.gamma < -0.4);
        assert!(surfaces::body_margin(p).abs() < 1e-6);
        // no sampled boundary point does better than the reported support
        let score = -p.gamma;
        let origin = FamilyPoint::new(0.0, 0.0, 0.0);
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..200 {
            let th: f64 = rng.gen_range(0.001..std::f64::consts::PI - 0.001);
            let ph: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let d = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let r = surfaces::ray_support(origin, d);
            assert!(-r * d[2] <= score + 1e-4);
        }
    }

    #[test]
    fn inside_out_pins_the_boundary_state() {
        let ops = polygon_ops();
        let opts = SeesawOpts { restarts: 16, ..Default::default() };
        let rep = inside_out_tangency(&ops.gd_plus, &opts, 1e-6).unwrap();
        assert!(rep.lambda_star > 0.99 && rep.lambda_star < 1.0, "λ* = {}", rep.lambda_star);
        assert!(rep.surface_distance < 1e-3, "distance {}", rep.surface_distance);
        assert_abs_diff_eq!(rep.touch.alpha, -0.19247196, epsilon = 1e-4);
        assert_abs_diff_eq!(rep.touch.beta, -0.02001798, epsilon = 1e-4);
        assert_abs_diff_eq!(rep.touch.gamma, -0.51975774, epsilon = 1e-4);
        // the foot lies on the witness plane
        let plane = plane_of(&ops.gd_plus).unwrap();
        assert_abs_diff_eq!(plane.value(rep.foot), 0.0, epsilon = 1e-10);
    }
}

