//! OBJ-text emission of the region boundaries in Euclidean coordinates:
//! the positivity tetrahedron and the PPT ∩ realignment body.

use std::fmt::Write as _;

use crate::error::{GewError, Result};
use crate::simplex3::surfaces::ray_support;
use crate::simplex3::{to_euclid, FamilyPoint};

fn push_vertex(out: &mut String, p: FamilyPoint) {
    let e = to_euclid(p);
    writeln!(out, "v {} {} {}", e.a, e.b, e.c).expect("write to String");
}

/// The positivity tetrahedron: four corner states, four triangular faces.
pub fn pyramid_obj() -> String {
    let corners = [
        FamilyPoint::new(1.0, 0.0, 0.0),
        FamilyPoint::new(0.0, 1.0, 0.0),
        FamilyPoint::new(0.0, 0.0, 1.0),
        FamilyPoint::new(-1.0 / 3.0, -2.0 / 3.0, -1.0),
    ];
    let mut out = String::from("o positivity_pyramid\n");
    for c in corners {
        push_vertex(&mut out, c);
    }
    for f in [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
        writeln!(out, "f {} {} {}", f[0], f[1], f[2]).expect("write to String");
    }
    out
}

/// The boundary of the PPT ∩ realignment ∩ positivity body, sampled as a
/// UV sphere of support rays from the maximally mixed state. `n_theta` is
/// the number of latitude bands, `n_phi` the number of longitudes.
pub fn body_obj(n_theta: usize, n_phi: usize) -> Result<String> {
    if n_theta < 3 || n_phi < 3 {
        return Err(GewError::OutOfRange(format!(
            "body_obj: resolution {n_theta}x{n_phi} must be at least 3x3"
        )));
    }
    let origin = FamilyPoint::new(0.0, 0.0, 0.0);
    let surface_at = |theta: f64, phi: f64| {
        let d = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let r = ray_support(origin, d);
        FamilyPoint::new(r * d[0], r * d[1], r * d[2])
    };

    let mut out = String::from("o constraint_body\n");
    // vertex 1: north pole; rings of n_phi vertices; last vertex: south pole
    push_vertex(&mut out, surface_at(0.0, 0.0));
    for i in 1..n_theta {
        let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            push_vertex(&mut out, surface_at(theta, phi));
        }
    }
    push_vertex(&mut out, surface_at(std::f64::consts::PI, 0.0));

    let ring = |i: usize, j: usize| 2 + (i - 1) * n_phi + (j % n_phi);
    let south = 2 + (n_theta - 1) * n_phi;
    for j in 0..n_phi {
        writeln!(out, "f 1 {} {}", ring(1, j), ring(1, j + 1)).expect("write to String");
    }
    for i in 1..n_theta - 1 {
        for j in 0..n_phi {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
            writeln!(out, "f {a} {b} {c}").expect("write to String");
            writeln!(out, "f {a} {c} {d}").expect("write to String");
        }
    }
    for j in 0..n_phi {
        writeln!(out, "f {} {} {}", south, ring(n_theta - 1, j + 1), ring(n_theta - 1, j))
            .expect("write to String");
    }
    Ok(out)
}
