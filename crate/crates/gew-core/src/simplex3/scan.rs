//! Grid scans of the parameter box: per-point numeric margins, Euclidean
//! coordinates, and classification labels, with CSV/JSON emission.

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{classify, Label};
use crate::error::{GewError, Result};
use crate::matcore::{herm_eig, svd};
use crate::simplex3::{family_state, to_euclid, FamilyPoint};

/// One scanned grid point. Margins are the numeric oracles: smallest state
/// eigenvalue, smallest partial-transpose eigenvalue, and the realignment
/// singular-value sum; (a, b, c) are the Euclidean coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub pos_margin: f64,
    pub ppt_margin: f64,
    pub realign_sum: f64,
    pub label: Label,
}

fn scan_point(p: FamilyPoint) -> ScanRow {
    let rho = family_state(p);
    let e = to_euclid(p);
    let pos_margin = herm_eig(rho.mat()).expect("9x9 eigensolve").eigenvalues[0];
    let ppt_margin = herm_eig(&rho.partial_transpose()).expect("9x9 eigensolve").eigenvalues[0];
    let realign_sum = svd(&rho.realign()).sum();
    let label = classify(&rho, &[], false).expect("classify without witnesses").label;
    ScanRow {
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        a: e.a,
        b: e.b,
        c: e.c,
        pos_margin,
        ppt_margin,
        realign_sum,
        label,
    }
}

fn axis_values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == hi {
        return vec![lo];
    }
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Evaluates every point of an α×β×γ grid (γ varies fastest). Degenerate
/// axes (lo = hi) collapse to a single value instead of repeating rows.
pub fn scan_grid(bounds: [[f64; 2]; 3], resolution: usize) -> Result<Vec<ScanRow>> {
    if resolution < 2 {
        return Err(GewError::OutOfRange(format!(
            "scan_grid: resolution {resolution} must be at least 2"
        )));
    }
    for (name, [lo, hi]) in ["alpha", "beta", "gamma"].iter().zip(bounds) {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(GewError::OutOfRange(format!(
                "scan_grid: empty {name} range [{lo}, {hi}]"
            )));
        }
    }
    let alphas = axis_values(bounds[0][0], bounds[0][1], resolution);
    let betas = axis_values(bounds[1][0], bounds[1][1], resolution);
    let gammas = axis_values(bounds[2][0], bounds[2][1], resolution);
    let mut points = Vec::with_capacity(alphas.len() * betas.len() * gammas.len());
    for &a in &alphas {
        for &b in &betas {
            for &g in &gammas {
                points.push(FamilyPoint::new(a, b, g));
            }
        }
    }
    Ok(points.into_par_iter().map(scan_point).collect())
}

/// Renders rows with the fixed header
/// `alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label`.
pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.alpha,
            r.beta,
            r.gamma,
            r.a,
            r.b,
            r.c,
            r.pos_margin,
            r.ppt_margin,
            r.realign_sum,
            r.label
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex3::surfaces::constraint_report;

    /// Label implied by the closed-form margins, or None inside the dead band
    /// where verdict flips are round-off, not disagreement.
    fn closed_label(p: FamilyPoint, band: f64) -> Option<Label> {
        let r = constraint_report(p);
        let clear = |ms: &[f64]| ms.iter().all(|m| m.abs() > band);
        if !clear(&r.positivity) || !clear(&r.ppt_closed) || !clear(&r.realign_closed) {
            return None;
        }
        Some(if !r.positivity_ok() {
            Label::InvalidState
        } else if !r.ppt_ok() {
            Label::NptEntangled
        } else if !r.realign_ok() {
            Label::BoundEntangled
        } else {
            Label::PptUndecided
        })
    }

    #[test]
    fn grid_covers_the_box_in_order() {
        let rows = scan_grid([[-0.2, 0.4], [-0.1, 0.1], [0.0, 0.3]], 3).unwrap();
        assert_eq!(rows.len(), 27);
        assert_eq!(rows[0].alpha, -0.2);
        assert_eq!(rows[0].gamma, 0.0);
        assert_eq!(rows[1].gamma, 0.15);
        assert_eq!(rows[26].alpha, 0.4);
        assert_eq!(rows[26].beta, 0.1);
        assert_eq!(rows[26].gamma, 0.3);
        for r in &rows {
            let e = to_euclid(FamilyPoint::new(r.alpha, r.beta, r.gamma));
            assert_eq!(r.a, e.a);
            assert_eq!(r.c, e.c);
        }
    }

    #[test]
    fn closed_form_labels_match_scan_labels() {
        let rows = scan_grid([[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]], 6).unwrap();
        for r in &rows {
            let p = FamilyPoint::new(r.alpha, r.beta, r.gamma);
            if let Some(expect) = closed_label(p, 1e-8) {
                assert_eq!(r.label, expect, "at {p:?}");
            }
        }
    }

    #[test]
    fn gamma_zero_slice_has_no_bound_labels() {
        let rows = scan_grid([[-1.0, 1.0], [-1.0, 1.0], [0.0, 0.0]], 15).unwrap();
        assert_eq!(rows.len(), 15 * 15);
        assert!(rows.iter().all(|r| r.label != Label::BoundEntangled));
        assert!(rows.iter().any(|r| r.label == Label::PptUndecided));
        assert!(rows.iter().any(|r| r.label == Label::NptEntangled));
    }

    #[test]
    fn csv_has_fixed_header_and_is_deterministic() {
        let rows = scan_grid([[-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3]], 4).unwrap();
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label"
        );
        assert_eq!(csv.lines().count(), 1 + rows.len());
        for line in lines {
            assert_eq!(line.split(',').count(), 10);
        }
        let again = rows_to_csv(&scan_grid([[-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3]], 4).unwrap());
        assert_eq!(csv, again);
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(scan_grid([[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]], 1).is_err());
        assert!(scan_grid([[0.5, -0.5], [0.0, 1.0], [0.0, 1.0]], 4).is_err());
        let nan = f64::NAN;
        assert!(scan_grid([[0.0, nan], [0.0, 1.0], [0.0, 1.0]], 4).is_err());
    }

    #[test]
    fn rows_serialize_with_label_names() {
        let rows = scan_grid([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], 2).unwrap();
        assert_eq!(rows.len(), 1);
        let json = serde_json::to_string(&rows).unwrap();
        assert!(json.contains("\"label\":\"PPT_UNDECIDED\""));
        assert!(json.contains("\"pos_margin\""));
    }
}
