//! Operator-basis machinery: Bloch decompositions of states and operators,
//! the singular-value-optimized (SVO) form, the normalized witness form, the
//! product-expectation quantity S, and the sufficient singular-value test for
//! witnesses with vanishing local parts.
//!
//! Bases are sets of d²-1 traceless operators {A_i} orthogonal in the dagger
//! form Tr A_i†A_j = N δ_ij, which also covers non-Hermitian families such as
//! the Weyl operators. All coefficient extraction uses the dagger form, so for
//! an operator O = e·1 + Σ a_i A_i ⊗ 1 + Σ b_j 1 ⊗ B_j + Σ c_ij A_i ⊗ B_j
//! the coefficients come out as plain Hilbert-Schmidt projections.

use crate::error::{GewError, Result};
use crate::matcore::{hs_inner, kron, svd, CMat, C64};

/// A d-dimensional operator basis: d²-1 traceless units plus the implicit
/// identity, with Tr A_i†A_j = N δ_ij.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    d: usize,
    units: Vec<CMat>,
    n: f64,
}

impl OperatorBasis {
    /// Validates tracelessness and dagger-orthogonality to 1e-10.
    pub fn new(d: usize, units: Vec<CMat>, n: f64) -> Result<Self> {
        if d < 2 {
            return Err(GewError::OutOfRange(format!("basis dimension {d} < 2")));
        }
        if units.len() != d * d - 1 {
            return Err(GewError::DimensionMismatch(format!(
                "{} units for dimension {d} (need {})",
                units.len(),
                d * d - 1
            )));
        }
        if n <= 0.0 {
            return Err(GewError::OutOfRange(format!("normalization N = {n}")));
        }
        for (i, u) in units.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(GewError::DimensionMismatch(format!(
                    "unit {i} is {}x{}, basis dimension {d}",
                    u.rows(),
                    u.cols()
                )));
            }
            if u.trace().norm() > 1e-10 {
                return Err(GewError::OutOfRange(format!(
                    "unit {i} has trace {:.3e}",
                    u.trace().norm()
                )));
            }
        }
        for i in 0..units.len() {
            for j in i..units.len() {
                let g = hs_inner(&units[i], &units[j])?;
                let expect = if i == j { n } else { 0.0 };
                if (g - C64::new(expect, 0.0)).norm() > 1e-10 {
                    return Err(GewError::OutOfRange(format!(
                        "units {i},{j}: Tr A_i†A_j = {g} differs from {expect}"
                    )));
                }
            }
        }
        Ok(OperatorBasis { d, units, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn units(&self) -> &[CMat] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

/// The Weyl operator U_nm = Σ_k ω^{kn} |k⟩⟨(k+m) mod d| with ω = e^{2πi/d}.
pub fn weyl_op(d: usize, n: usize, m: usize) -> CMat {
    let mut u = CMat::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (k * n) as f64 / d as f64;
        u.set(k, (k + m) % d, C64::new(phase.cos(), phase.sin()));
    }
    u
}

/// The d²-1 non-identity Weyl operators, (n,m) in lexicographic order with
/// (0,0) excluded; N = d.
pub fn weyl_basis(d: usize) -> Result<OperatorBasis> {
    if d < 2 {
        return Err(GewError::OutOfRange(format!("weyl_basis: d = {d} < 2")));
    }
    let mut units = Vec::with_capacity(d * d - 1);
    for n in 0..d {
        for m in 0..d {
            if n == 0 && m == 0 {
                continue;
            }
            units.push(weyl_op(d, n, m));
        }
    }
    OperatorBasis::new(d, units, d as f64)
}

/// Bloch vector of a single-party state: n_i = √(d/(N(d-1))) Tr A_i†ρ.
/// Pure states have |n| = 1, mixed states |n| < 1.
pub fn bloch_vector(rho: &CMat, basis: &OperatorBasis) -> Result<Vec<C64>> {
    if rho.rows() != basis.d() || rho.cols() != basis.d() {
        return Err(GewError::DimensionMismatch(format!(
            "bloch_vector: state is {}x{}, basis dimension {}",
            rho.rows(),
            rho.cols(),
            basis.d()
        )));
    }
    let d = basis.d() as f64;
    let scale = (d / (basis.n() * (d - 1.0))).sqrt();
    basis
        .units()
        .iter()
        .map(|a| Ok(hs_inner(a, rho)? * scale))
        .collect()
}

/// Inverse of [`bloch_vector`]: ρ = (1/d)·1 + √((d-1)/(dN)) Σ n_i A_i.
pub fn state_from_bloch(nvec: &[C64], basis: &OperatorBasis) -> Result<CMat> {
    if nvec.len() != basis.len() {
        return Err(GewError::DimensionMismatch(format!(
            "state_from_bloch: {} components for {} units",
            nvec.len(),
            basis.len()
        )));
    }
    let d = basis.d() as f64;
    let coef = ((d - 1.0) / (d * basis.n())).sqrt();
    let mut rho = CMat::identity(basis.d()).scale(C64::new(1.0 / d, 0.0));
    for (ni, a) in nvec.iter().zip(basis.units()) {
        rho = rho.add(&a.scale(ni * coef));
    }
    Ok(rho)
}

/// Bloch coefficients of a bipartite operator.
#[derive(Clone, Debug)]
pub struct OpDecomp {
    pub e: C64,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    /// Correlation coefficient matrix, a[i] x b[j].
    pub c: CMat,
    pub basis_a: OperatorBasis,
    pub basis_b: OperatorBasis,
}

/// Decomposes O over the product of two operator bases; the reconstruction
/// is exact because the bases are complete.
pub fn decompose_op(o: &CMat, basis_a: &OperatorBasis, basis_b: &OperatorBasis) -> Result<OpDecomp> {
    let (da, db) = (basis_a.d(), basis_b.d());
    if o.rows() != da * db || o.cols() != da * db {
        return Err(GewError::DimensionMismatch(format!(
            "decompose_op: operator is {}x{} but bases give {}",
            o.rows(),
            o.cols(),
            da * db
        )));
    }
    let d_total = (da * db) as f64;
    let (na, nb) = (basis_a.n(), basis_b.n());
    let e = o.trace() / d_total;

    let ia = CMat::identity(da);
    let ib = CMat::identity(db);
    let mut a = Vec::with_capacity(basis_a.len());
    for ai in basis_a.units() {
        a.push(hs_inner(&kron(ai, &ib), o)? / (na * db as f64));
    }
    let mut b = Vec::with_capacity(basis_b.len());
    for bj in basis_b.units() {
        b.push(hs_inner(&kron(&ia, bj), o)? / (da as f64 * nb));
    }
    let mut c = CMat::zeros(basis_a.len(), basis_b.len());
    for (i, ai) in basis_a.units().iter().enumerate() {
        for (j, bj) in basis_b.units().iter().enumerate() {
            c.set(i, j, hs_inner(&kron(ai, bj), o)? / (na * nb));
        }
    }
    Ok(OpDecomp { e, a, b, c, basis_a: basis_a.clone(), basis_b: basis_b.clone() })
}

impl OpDecomp {
    pub fn reconstruct(&self) -> CMat {
        let (da, db) = (self.basis_a.d(), self.basis_b.d());
        let mut o = CMat::identity(da * db).scale(self.e);
        let ia = CMat::identity(da);
        let ib = CMat::identity(db);
        for (ai, &coef) in self.basis_a.units().iter().zip(&self.a) {
            o = o.add(&kron(ai, &ib).scale(coef));
        }
        for (bj, &coef) in self.basis_b.units().iter().zip(&self.b) {
            o = o.add(&kron(&ia, bj).scale(coef));
        }
        for (i, ai) in self.basis_a.units().iter().enumerate() {
            for (j, bj) in self.basis_b.units().iter().enumerate() {
                let coef = self.c.at(i, j);
                if coef.norm_sqr() > 0.0 {
                    o = o.add(&kron(ai, bj).scale(coef));
                }
            }
        }
        o
    }

    /// Largest |a_i| and |b_j|; zero for operators with vanishing local parts.
    pub fn local_part_norm(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Singular-value-optimized form: the correlation matrix is diagonalized by
/// an SVD c = U Σ V†, the basis rotated accordingly, and the local vectors
/// carried along. Requires equal subsystem dimensions.
#[derive(Clone, Debug)]
pub struct SvoForm {
    pub e: C64,
    pub r: Vec<C64>,
    pub t: Vec<C64>,
    /// Singular values of c, descending.
    pub s: Vec<f64>,
    /// Rotated bases; same orthogonality as the originals.
    pub basis_a: OperatorBasis,
    pub basis_b: OperatorBasis,
}

pub fn svo(dec: &OpDecomp) -> Result<SvoForm> {
    if dec.basis_a.d() != dec.basis_b.d() {
        return Err(GewError::DimensionMismatch(format!(
            "svo: subsystem dimensions {} and {} differ",
            dec.basis_a.d(),
            dec.basis_b.d()
        )));
    }
    let k = dec.basis_a.len();
    let f = svd(&dec.c);

    // D^A_i = Σ_j U[j,i] A_j and D^B_i = Σ_j conj(V[j,i]) B_j reproduce
    // c = Σ_i s_i D^A_i ⊗ D^B_i; r, t follow from unitarity.
    let mut units_a = Vec::with_capacity(k);
    let mut units_b = Vec::with_capacity(k);
    let mut r = vec![C64::new(0.0, 0.0); k];
    let mut t = vec![C64::new(0.0, 0.0); k];
    for i in 0..k {
        let mut da = CMat::zeros(dec.basis_a.d(), dec.basis_a.d());
        let mut db = CMat::zeros(dec.basis_b.d(), dec.basis_b.d());
        for j in 0..k {
            da = da.add(&dec.basis_a.units()[j].scale(f.u.at(j, i)));
            db = db.add(&dec.basis_b.units()[j].scale(f.v.at(j, i).conj()));
            r[i] += dec.a[j] * f.u.at(j, i).conj();
            t[i] += dec.b[j] * f.v.at(j, i);
        }
        units_a.push(da);
        units_b.push(db);
    }
    let basis_a = OperatorBasis::new(dec.basis_a.d(), units_a, dec.basis_a.n())?;
    let basis_b = OperatorBasis::new(dec.basis_b.d(), units_b, dec.basis_b.n())?;
    Ok(SvoForm { e: dec.e, r, t, s: f.singular_values, basis_a, basis_b })
}

impl SvoForm {
    pub fn reconstruct(&self) -> CMat {
        let dec = OpDecomp {
            e: self.e,
            a: self.r.clone(),
            b: self.t.clone(),
            c: CMat::diag_real(&self.s),
            basis_a: self.basis_a.clone(),
            basis_b: self.basis_b.clone(),
        };
        dec.reconstruct()
    }

    pub fn local_part_norm(&self) -> f64 {
        self.r
            .iter()
            .chain(self.t.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Singular values in the witness normalization, s̃_i = s_i / δ with
    /// δ = |e| / μ. This is the scale in which the sufficient witness test
    /// compares against 1. Errors when the identity component is too small
    /// to normalize by.
    pub fn tilde_s(&self) -> Result<Vec<f64>> {
        let delta = delta_from_e(self.e, self.basis_a.d(), self.basis_b.d())?;
        Ok(self.s.iter().map(|s| s / delta).collect())
    }
}

fn mu(d_a: usize, d_b: usize) -> f64 {
    (((d_a - 1) * (d_b - 1)) as f64).sqrt()
}

fn delta_from_e(e: C64, d_a: usize, d_b: usize) -> Result<f64> {
    if e.im.abs() > 1e-10 * e.norm().max(1.0) {
        return Err(GewError::Domain(format!(
            "identity coefficient {e} is not real; operator is not Hermitian"
        )));
    }
    if e.re.abs() <= 1e-12 {
        return Err(GewError::Domain(
            "identity coefficient vanishes; no witness normalization exists".into(),
        ));
    }
    Ok(e.re.abs() / mu(d_a, d_b))
}

/// Normalized (tilde) form C = δ(μ·1 + Σ ã_i A_i⊗1 + Σ b̃_j 1⊗B_j + Σ c̃_ij A_i⊗B_j)
/// with δ > 0 and μ = √((d_A-1)(d_B-1)). Operators whose natural decomposition
/// has e < 0 are globally negated first and flagged.
#[derive(Clone, Debug)]
pub struct WitnessForm {
    pub delta: f64,
    pub mu: f64,
    pub a_tilde: Vec<C64>,
    pub b_tilde: Vec<C64>,
    pub c_tilde: CMat,
    /// True when the operator was negated to make δ positive.
    pub negated: bool,
    pub basis_a: OperatorBasis,
    pub basis_b: OperatorBasis,
}

impl WitnessForm {
    pub fn from_decomp(dec: &OpDecomp) -> Result<Self> {
        let delta = delta_from_e(dec.e, dec.basis_a.d(), dec.basis_b.d())?;
        let negated = dec.e.re < 0.0;
        let sgn = if negated { -1.0 } else { 1.0 };
        let scale = C64::new(sgn / delta, 0.0);
        Ok(WitnessForm {
            delta,
            mu: mu(dec.basis_a.d(), dec.basis_b.d()),
            a_tilde: dec.a.iter().map(|z| z * scale).collect(),
            b_tilde: dec.b.iter().map(|z| z * scale).collect(),
            c_tilde: dec.c.scale(scale),
            negated,
            basis_a: dec.basis_a.clone(),
            basis_b: dec.basis_b.clone(),
        })
    }

    /// Witness form over the rotated SVO bases, where c̃ is diagonal with the
    /// tilde singular values on the diagonal. A negation is absorbed into the
    /// A-side basis so the diagonal stays nonnegative.
    pub fn from_svo(form: &SvoForm) -> Result<Self> {
        let delta = delta_from_e(form.e, form.basis_a.d(), form.basis_b.d())?;
        let negated = form.e.re < 0.0;
        let inv = C64::new(1.0 / delta, 0.0);
        let basis_a = if negated {
            let flipped =
                form.basis_a.units().iter().map(|u| u.scale(C64::new(-1.0, 0.0))).collect();
            OperatorBasis::new(form.basis_a.d(), flipped, form.basis_a.n())?
        } else {
            form.basis_a.clone()
        };
        let sgn = if negated { -1.0 } else { 1.0 };
        Ok(WitnessForm {
            delta,
            mu: mu(form.basis_a.d(), form.basis_b.d()),
            a_tilde: form.r.iter().map(|z| z * inv).collect(),
            b_tilde: form.t.iter().map(|z| z * (inv * sgn)).collect(),
            c_tilde: CMat::diag_real(&form.s).scale(inv),
            negated,
            basis_a,
            basis_b: form.basis_b.clone(),
        })
    }

    /// Singular values of c̃.
    pub fn tilde_s(&self) -> Vec<f64> {
        svd(&self.c_tilde).singular_values
    }

    /// The operator back at its original scale and sign.
    pub fn un_normalize(&self) -> CMat {
        let sgn = if self.negated { -1.0 } else { 1.0 };
        let scale = C64::new(sgn * self.delta, 0.0);
        let dec = OpDecomp {
            e: C64::new(self.mu, 0.0) * scale,
            a: self.a_tilde.iter().map(|z| z * scale).collect(),
            b: self.b_tilde.iter().map(|z| z * scale).collect(),
            c: self.c_tilde.scale(scale),
            basis_a: self.basis_a.clone(),
            basis_b: self.basis_b.clone(),
        };
        dec.reconstruct()
    }
}

/// The product-expectation quantity S for single-party Bloch vectors n, m:
///
///   Tr σ_p†C = δμ(1 + S),  σ_p the product state with those Bloch vectors.
///
/// The per-term scale factors follow from expanding the trace:
/// √(N_A/(d_A(d_B-1))) on the ã-term, √(N_B/(d_B(d_A-1))) on the b̃-term and
/// √(N_A N_B/(d_A d_B)) on the c̃-term. A witness requires S ≥ -1 for all
/// product states.
pub fn s_value(w: &WitnessForm, nv: &[C64], mv: &[C64]) -> Result<f64> {
    if nv.len() != w.basis_a.len() || mv.len() != w.basis_b.len() {
        return Err(GewError::DimensionMismatch(format!(
            "s_value: Bloch vectors of length {}/{} for bases of {}/{} units",
            nv.len(),
            mv.len(),
            w.basis_a.len(),
            w.basis_b.len()
        )));
    }
    let da = w.basis_a.d() as f64;
    let db = w.basis_b.d() as f64;
    let (na, nb) = (w.basis_a.n(), w.basis_b.n());
    let fa = (na / (da * (db - 1.0))).sqrt();
    let fb = (nb / (db * (da - 1.0))).sqrt();
    let fc = (na * nb / (da * db)).sqrt();

    let mut s = C64::new(0.0, 0.0);
    for (at, n) in w.a_tilde.iter().zip(nv) {
        s += at * n.conj() * fa;
    }
    for (bt, m) in w.b_tilde.iter().zip(mv) {
        s += bt * m.conj() * fb;
    }
    for (i, n) in nv.iter().enumerate() {
        for (j, m) in mv.iter().enumerate() {
            s += w.c_tilde.at(i, j) * n.conj() * m.conj() * fc;
        }
    }
    Ok(s.re)
}

/// Sufficient witness test for operators with vanishing local parts: if every
/// tilde singular value is at most 1, the (sign-normalized) operator is
/// nonnegative on all product states. The converse holds only at 2x2.
///
/// Errors if the local parts do not vanish or no witness normalization exists.
pub fn lemma1_check(form: &SvoForm) -> Result<bool> {
    if form.local_part_norm() > 1e-10 {
        return Err(GewError::Domain(format!(
            "singular-value test needs vanishing local parts; |r|,|t| up to {:.3e}",
            form.local_part_norm()
        )));
    }
    let tilde = form.tilde_s()?;
    Ok(tilde.iter().all(|&s| s <= 1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{kron_vec, DensityMatrix};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut StdRng, n: usize) -> CMat {
        let a = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a.add(&a.adjoint()).scale(c(0.5, 0.0))
    }

    fn random_unit(rng: &mut StdRng, d: usize) -> Vec<C64> {
        let v: Vec<C64> =
            (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / nrm).collect()
    }

    fn bell_p00(d: usize) -> CMat {
        let mut v = vec![c(0.0, 0.0); d * d];
        for j in 0..d {
            v[j * d + j] = c(1.0 / (d as f64).sqrt(), 0.0);
        }
        DensityMatrix::from_pure(&v, d, d).unwrap().mat().clone()
    }

    #[test]
    fn weyl_d2_units() {
        let b = weyl_basis(2).unwrap();
        assert_eq!(b.n(), 2.0);
        // lexicographic (n,m): U01 = σx, U10 = σz, U11 = |0><1| - |1><0| = iσy
        let sx = CMat::from_rows(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sz = CMat::diag_real(&[1.0, -1.0]);
        let isy = CMat::from_rows(2, 2, &[c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)]).unwrap();
        assert!(b.units()[0].max_abs_diff(&sx) < 1e-14);
        assert!(b.units()[1].max_abs_diff(&sz) < 1e-14);
        assert!(b.units()[2].max_abs_diff(&isy) < 1e-14);
        assert!(weyl_basis(1).is_err());
    }

    #[test]
    fn weyl_orthogonality_d3() {
        // Tr U_nm† U_lj = 3 δ_nl δ_mj over all 81 pairs
        for n in 0..3 {
            for m in 0..3 {
                for l in 0..3 {
                    for j in 0..3 {
                        let g = hs_inner(&weyl_op(3, n, m), &weyl_op(3, l, j)).unwrap();
                        let expect = if (n, m) == (l, j) { 3.0 } else { 0.0 };
                        assert!((g - c(expect, 0.0)).norm() < 1e-12, "pair ({n}{m}),({l}{j})");
                    }
                }
            }
        }
        assert_abs_diff_eq!(
            hs_inner(&weyl_op(3, 1, 2), &weyl_op(3, 1, 2)).unwrap().re,
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn decompose_identity_and_bell() {
        let b3 = weyl_basis(3).unwrap();
        let dec = decompose_op(&CMat::identity(9), &b3, &b3).unwrap();
        assert!((dec.e - c(1.0, 0.0)).norm() < 1e-14);
        assert!(dec.local_part_norm() < 1e-14);
        assert!(dec.c.max_abs() < 1e-14);

        // Bell projector: vanishing locals; one 1/9-magnitude entry per row of c
        let dec = decompose_op(&bell_p00(3), &b3, &b3).unwrap();
        assert!((dec.e - c(1.0 / 9.0, 0.0)).norm() < 1e-12);
        assert!(dec.local_part_norm() < 1e-12);
        let mut per_row = vec![0usize; 8];
        for (i, row_count) in per_row.iter_mut().enumerate() {
            for j in 0..8 {
                let v = dec.c.at(i, j).norm();
                if v > 1e-12 {
                    *row_count += 1;
                    assert_abs_diff_eq!(v, 1.0 / 9.0, epsilon = 1e-12);
                }
            }
        }
        assert_eq!(per_row, vec![1; 8]);
        // the P00 phases are all exactly +1/9
        for i in 0..8 {
            for j in 0..8 {
                let v = dec.c.at(i, j);
                if v.norm() > 1e-12 {
                    assert!((v - c(1.0 / 9.0, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decompose_roundtrip_random() {
        let mut rng = StdRng::seed_from_u64(23);
        let b3 = weyl_basis(3).unwrap();
        for _ in 0..10 {
            let o = random_hermitian(&mut rng, 9);
            let dec = decompose_op(&o, &b3, &b3).unwrap();
            assert!(dec.reconstruct().max_abs_diff(&o) < 1e-10);
        }
    }

    #[test]
    fn svo_diagonal_c_and_reconstruction() {
        let b3 = weyl_basis(3).unwrap();
        let mut rng = StdRng::seed_from_u64(29);
        let o = random_hermitian(&mut rng, 9);
        let dec = decompose_op(&o, &b3, &b3).unwrap();
        let form = svo(&dec).unwrap();
        // descending, reconstructs, rotated bases orthogonal (validated by constructor)
        for w in form.s.windows(2) {
            assert!(w[0] >= w[1] - 1e-15);
        }
        assert!(form.reconstruct().max_abs_diff(&o) < 1e-9);

        // already-diagonal real nonnegative c: singular values are the diagonal
        let mut cdiag = dec.clone();
        cdiag.c = CMat::diag_real(&[0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02]);
        let form = svo(&cdiag).unwrap();
        let expect = [0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02];
        for (got, want) in form.s.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn svo_requires_equal_dims() {
        let b2 = weyl_basis(2).unwrap();
        let b3 = weyl_basis(3).unwrap();
        let o = CMat::identity(6);
        let dec = decompose_op(&o, &b2, &b3).unwrap();
        assert!(svo(&dec).is_err());
    }

    #[test]
    fn bloch_vector_norms() {
        let mut rng = StdRng::seed_from_u64(31);
        let b3 = weyl_basis(3).unwrap();
        for _ in 0..10 {
            let psi = random_unit(&mut rng, 3);
            let pure = DensityMatrix::from_pure(&psi, 3, 1).unwrap();
            let n = bloch_vector(pure.mat(), &b3).unwrap();
            let norm2: f64 = n.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-10);
            // roundtrip
            let back = state_from_bloch(&n, &b3).unwrap();
            assert!(back.max_abs_diff(pure.mat()) < 1e-12);
        }
        // mixed states lie strictly inside
        let mixed = CMat::identity(3).scale(c(1.0 / 3.0, 0.0));
        let n = bloch_vector(&mixed, &b3).unwrap();
        assert!(n.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1e-20);
    }

    #[test]
    fn s_value_zero_vectors() {
        let b3 = weyl_basis(3).unwrap();
        let o = bell_p00(3);
        let dec = decompose_op(&o, &b3, &b3).unwrap();
        let w = WitnessForm::from_decomp(&dec).unwrap();
        let zeros = vec![c(0.0, 0.0); 8];
        assert_abs_diff_eq!(s_value(&w, &zeros, &zeros).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn s_value_matches_matrix_trace() {
        let mut rng = StdRng::seed_from_u64(37);
        let b3 = weyl_basis(3).unwrap();
        for _ in 0..20 {
            let o = random_hermitian(&mut rng, 9);
            let dec = decompose_op(&o, &b3, &b3).unwrap();
            let w = match WitnessForm::from_decomp(&dec) {
                Ok(w) => w,
                Err(_) => continue, // traceless draw
            };
            let psi = random_unit(&mut rng, 3);
            let phi = random_unit(&mut rng, 3);
            let sigma = DensityMatrix::from_pure(&kron_vec(&psi, &phi), 3, 3).unwrap();
            let n = bloch_vector(
                DensityMatrix::from_pure(&psi, 3, 1).unwrap().mat(),
                &b3,
            )
            .unwrap();
            let m = bloch_vector(
                DensityMatrix::from_pure(&phi, 3, 1).unwrap().mat(),
                &b3,
            )
            .unwrap();
            let s = s_value(&w, &n, &m).unwrap();
            let direct = hs_inner(sigma.mat(), &o).unwrap().re;
            let sgn = if w.negated { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(sgn * w.delta * w.mu * (1.0 + s), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn s_value_diagonal_correlation_form() {
        // with ã = b̃ = 0 and c̃ = diag(1,...,1), S reduces to Σ n_i* m_i*
        let b3 = weyl_basis(3).unwrap();
        let w = WitnessForm {
            delta: 1.0,
            mu: 2.0,
            a_tilde: vec![c(0.0, 0.0); 8],
            b_tilde: vec![c(0.0, 0.0); 8],
            c_tilde: CMat::diag_real(&[1.0; 8]),
            negated: false,
            basis_a: b3.clone(),
            basis_b: b3.clone(),
        };
        let mut rng = StdRng::seed_from_u64(41);
        let psi = random_unit(&mut rng, 3);
        let phi = random_unit(&mut rng, 3);
        let n = bloch_vector(DensityMatrix::from_pure(&psi, 3, 1).unwrap().mat(), &b3).unwrap();
        let m = bloch_vector(DensityMatrix::from_pure(&phi, 3, 1).unwrap().mat(), &b3).unwrap();
        let s = s_value(&w, &n, &m).unwrap();
        let direct: C64 = n.iter().zip(&m).map(|(x, y)| x.conj() * y.conj()).sum();
        assert_abs_diff_eq!(s, direct.re, epsilon = 1e-12);
    }

    #[test]
    fn lemma1_trivial_cases() {
        let b3 = weyl_basis(3).unwrap();
        // operator proportional to the identity: s = 0, test passes trivially
        let dec = decompose_op(&CMat::identity(9).scale(c(0.7, 0.0)), &b3, &b3).unwrap();
        let form = svo(&dec).unwrap();
        assert!(lemma1_check(&form).unwrap());
        // nonzero local parts are rejected
        let one_local = kron(&weyl_op(3, 0, 1), &CMat::identity(3))
            .add(&kron(&weyl_op(3, 0, 1), &CMat::identity(3)).adjoint())
            .add(&CMat::identity(9));
        let dec = decompose_op(&one_local, &b3, &b3).unwrap();
        let form = svo(&dec).unwrap();
        assert!(lemma1_check(&form).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn decompose_reconstruct_identity(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let b3 = weyl_basis(3).unwrap();
            let o = random_hermitian(&mut rng, 9);
            let dec = decompose_op(&o, &b3, &b3).unwrap();
            prop_assert!(dec.reconstruct().max_abs_diff(&o) < 1e-10);
        }

        #[test]
        fn svo_preserves_product_expectations(seed in 0u64..10_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let b3 = weyl_basis(3).unwrap();
            let o = random_hermitian(&mut rng, 9);
            let dec = decompose_op(&o, &b3, &b3).unwrap();
            let form = svo(&dec).unwrap();
            let psi = random_unit(&mut rng, 3);
            let phi = random_unit(&mut rng, 3);
            let sigma = DensityMatrix::from_pure(&kron_vec(&psi, &phi), 3, 3).unwrap();
            let direct = hs_inner(sigma.mat(), &o).unwrap().re;
            let via_svo = hs_inner(sigma.mat(), &form.reconstruct()).unwrap().re;
            prop_assert!((direct - via_svo).abs() < 1e-10);
        }

        #[test]
        fn pure_bloch_vectors_are_unit(seed in 0u64..10_000, d in 2usize..5) {
            let mut rng = StdRng::seed_from_u64(seed);
            let basis = weyl_basis(d).unwrap();
            let psi = random_unit(&mut rng, d);
            let pure = DensityMatrix::from_pure(&psi, d, 1).unwrap();
            let n = bloch_vector(pure.mat(), &basis).unwrap();
            let norm2: f64 = n.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm2 - 1.0).abs() < 1e-10);
        }
    }
}
