use nalgebra::DVector;

use super::{decomposable, DoubleForm};
use crate::error::{Error, Result};
use crate::exterior::{leading_sign, AlgebraContext};
use crate::linalg::orthonormalize;

/// Largest violation of the first Bianchi identity over standard basis
/// tuples `(x_1..x_{p+1}; y_1..y_{q-1})`:
///
/// `|Σ_j (-1)^j ω(x_1 ∧ … x̂_j … ∧ x_{p+1}, x_j ∧ y_1 ∧ … ∧ y_{q-1})|`.
///
/// The sum is alternating in the `x` and in the `y`, so increasing tuples
/// suffice.
pub fn bianchi_residual(form: &DoubleForm) -> Result<f64> {
    if form.q == 0 {
        return Err(Error::InvalidDegree("Bianchi identity needs q >= 1".into()));
    }
    let ctx = form.ctx;
    if form.p + 1 > ctx.dim() {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for &x in ctx.basis(form.p + 1) {
        for &y in ctx.basis(form.q - 1) {
            let mut acc = 0.0;
            let mut rest = x;
            let mut position = 0;
            while rest != 0 {
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                position += 1;
                let xb = 1u32 << bit;
                if y & xb != 0 {
                    continue;
                }
                let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * leading_sign(y, bit) as f64 * form.get_mask(x & !xb, y | xb);
            }
            worst = worst.max(acc.abs());
        }
    }
    Ok(worst)
}

/// Sectional curvature `K_ω(P) = ω(e_1 ∧ … ∧ e_p, e_1 ∧ … ∧ e_p)` for an
/// orthonormal basis of the plane spanned by `span`.
pub fn sectional(form: &DoubleForm, span: &[DVector<f64>]) -> Result<f64> {
    if form.p != form.q || span.len() != form.p {
        return Err(Error::InvalidDegree(format!(
            "sectional curvature of a ({},{}) form needs {} spanning vectors, got {}",
            form.p,
            form.q,
            form.p,
            span.len()
        )));
    }
    if let Some(v) = span.iter().find(|v| v.len() != form.ctx.dim()) {
        return Err(Error::DimensionMismatch(format!("vector of length {} in R^{}", v.len(), form.ctx.dim())));
    }
    let frame = orthonormalize(span)?;
    let w = decomposable(form.ctx, &frame);
    Ok(w.dot(&(&form.coeffs * &w)))
}

/// Orthogonal projection of a `(2,2)` form onto the symmetric forms that
/// satisfy the first Bianchi identity.
///
/// The form is symmetrised, then its totally antisymmetric part (one value
/// per 4-subset, `(ω(12,34) − ω(13,24) + ω(14,23)) / 3`) is removed.
pub fn project_bianchi(form: &DoubleForm) -> Result<DoubleForm> {
    if form.degrees() != (2, 2) {
        return Err(Error::InvalidDegree(format!("Bianchi projection needs a (2,2) form, got ({},{})", form.p, form.q)));
    }
    let ctx = form.ctx;
    let mut out = form.symmetrized();
    let pair = |a: usize, b: usize| ctx.rank_of_mask((1 << a) | (1 << b));
    let n = ctx.dim();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let (ab, cd) = (pair(a, b), pair(c, d));
                    let (ac, bd) = (pair(a, c), pair(b, d));
                    let (ad, bc) = (pair(a, d), pair(b, c));
                    let m = &mut out.coeffs;
                    let t = (m[(ab, cd)] - m[(ac, bd)] + m[(ad, bc)]) / 3.0;
                    for (r, s, sign) in [(ab, cd, 1.0), (ac, bd, -1.0), (ad, bc, 1.0)] {
                        m[(r, s)] -= sign * t;
                        m[(s, r)] -= sign * t;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of `S²_1(Λ²V)`, the symmetric `(2,2)` forms satisfying
/// the first Bianchi identity. Its dimension is `n²(n²−1)/12`.
pub fn bianchi_basis(ctx: AlgebraContext) -> Vec<DoubleForm> {
    let basis = ctx.basis(2);
    let size = basis.len();
    let mut out: Vec<DoubleForm> = Vec::new();
    for r in 0..size {
        for c in r..size {
            let mut seed = DoubleForm::zeros(ctx, 2, 2);
            seed.coeffs[(r, c)] = 1.0;
            seed.coeffs[(c, r)] = 1.0;
            let mut v = project_bianchi(&seed).expect("(2,2) by construction");
            for _ in 0..2 {
                for u in &out {
                    let proj = u.coeffs.dot(&v.coeffs);
                    v.coeffs -= &u.coeffs * proj;
                }
            }
            let norm = v.norm();
            if norm > 1e-8 {
                out.push(v.scale(1.0 / norm));
            }
        }
    }
    out
}

/// A symmetric `(2,2)` double form satisfying the first Bianchi identity:
/// an algebraic curvature tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    form: DoubleForm,
}

impl CurvatureTensor {
    /// Default Bianchi tolerance, relative to the Frobenius norm.
    pub const BIANCHI_TOLERANCE: f64 = 1e-12;

    pub fn new(form: DoubleForm) -> Result<Self> {
        Self::with_tolerance(form, Self::BIANCHI_TOLERANCE)
    }

    /// Validates degree, symmetry and the Bianchi identity (both relative to
    /// `‖form‖`), then stores the exactly symmetrised form.
    pub fn with_tolerance(form: DoubleForm, rel_tol: f64) -> Result<Self> {
        if form.degrees() != (2, 2) {
            return Err(Error::InvalidDegree(format!(
                "curvature tensors are (2,2) forms, got ({},{})",
                form.p, form.q
            )));
        }
        let scale = form.norm();
        let asym = form.max_asymmetry();
        if asym > 1e-12 * scale {
            return Err(Error::Asymmetric(asym));
        }
        let form = form.symmetrized();
        let residual = bianchi_residual(&form)?;
        let tolerance = rel_tol * scale;
        if residual > tolerance {
            return Err(Error::BianchiViolation { residual, tolerance });
        }
        Ok(CurvatureTensor { form })
    }

    /// Symmetrises and projects onto the Bianchi subspace.
    pub fn projected(form: &DoubleForm) -> Result<Self> {
        Ok(CurvatureTensor { form: project_bianchi(form)? })
    }

    /// Symmetrises without checking the Bianchi identity.
    pub(crate) fn symmetrized_unchecked(form: &DoubleForm) -> Self {
        CurvatureTensor { form: form.symmetrized() }
    }

    pub fn form(&self) -> &DoubleForm {
        &self.form
    }

    pub fn into_form(self) -> DoubleForm {
        self.form
    }

    pub fn ctx(&self) -> AlgebraContext {
        self.form.ctx
    }

    pub fn dim(&self) -> usize {
        self.form.ctx.dim()
    }

    pub fn norm(&self) -> f64 {
        self.form.norm()
    }
}

impl AsRef<DoubleForm> for CurvatureTensor {
    fn as_ref(&self) -> &DoubleForm {
        &self.form
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_form::{kn_product, metric, metric_power, pullback};
    use crate::exterior::{factorial, MultiIndex};
    use crate::linalg::complete_frame;

    fn ctx(n: usize) -> AlgebraContext {
        AlgebraContext::new(n).unwrap()
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    fn sym11(ctx: AlgebraContext, seed: u64) -> DoubleForm {
        let mut r = lcg(seed);
        DoubleForm::from_fn(ctx, 1, 1, |_, _| r()).symmetrized()
    }

    fn random_vectors(n: usize, k: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut r = lcg(seed);
        (0..k).map(|_| DVector::from_fn(n, |_, _| r())).collect()
    }

    // ω(e_12, e_34) = ω(e_34, e_12) = 1, everything else 0
    fn witness(c: AlgebraContext) -> DoubleForm {
        let a = MultiIndex::new(&[1, 2]).unwrap().mask();
        let b = MultiIndex::new(&[3, 4]).unwrap().mask();
        DoubleForm::from_fn(c, 2, 2, |i, j| if (i == a && j == b) || (i == b && j == a) { 1.0 } else { 0.0 })
    }

    #[test]
    fn bianchi_examples() {
        for n in 2..=7 {
            let c = ctx(n);
            assert_eq!(bianchi_residual(&metric_power(2, c).unwrap()).unwrap(), 0.0);
            let h = sym11(c, n as u64);
            let k = sym11(c, 100 + n as u64);
            let hk = kn_product(&h, &k).unwrap();
            assert!(bianchi_residual(&hk).unwrap() <= 1e-14 * hk.norm());
        }
        assert_eq!(bianchi_residual(&witness(ctx(4))).unwrap(), 1.0);
        assert!(matches!(bianchi_residual(&DoubleForm::zeros(ctx(3), 2, 0)), Err(Error::InvalidDegree(_))));
    }

    #[test]
    fn bianchi_preserved_by_products() {
        for n in 4..=7 {
            let c = ctx(n);
            let a = kn_product(&sym11(c, 1), &sym11(c, 2)).unwrap();
            let b = kn_product(&sym11(c, 3), &sym11(c, 4)).unwrap();
            let ab = kn_product(&a, &b).unwrap();
            assert!(bianchi_residual(&a).unwrap() <= 1e-12);
            assert!(bianchi_residual(&ab).unwrap() <= 1e-10);
            let gab = kn_product(&metric(c), &a).unwrap();
            assert!(bianchi_residual(&gab).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn projection_properties() {
        for n in 3..=6 {
            let c = ctx(n);
            let mut r = lcg(n as u64);
            let raw = DoubleForm::from_fn(c, 2, 2, |_, _| r());
            let proj = project_bianchi(&raw).unwrap();
            assert!(bianchi_residual(&proj).unwrap() <= 1e-14 * raw.norm());
            assert_eq!(proj.max_asymmetry(), 0.0);
            let twice = project_bianchi(&proj).unwrap();
            assert!((&twice - &proj).norm() <= 1e-14 * proj.norm());
            // residual of the symmetric part is orthogonal to every Bianchi form
            let removed = &raw.symmetrized() - &proj;
            let other = kn_product(&sym11(c, 9), &sym11(c, 10)).unwrap();
            assert!(removed.coeffs.dot(&other.coeffs).abs() <= 1e-13 * removed.norm() * other.norm());
        }
        assert!(bianchi_residual(&project_bianchi(&witness(ctx(4))).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn bianchi_basis_dimension_and_orthonormality() {
        for n in 2..=6 {
            let b = bianchi_basis(ctx(n));
            assert_eq!(b.len(), n * n * (n * n - 1) / 12, "n={n}");
            for (i, u) in b.iter().enumerate() {
                assert!(bianchi_residual(u).unwrap() < 1e-13);
                for (j, v) in b.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((u.coeffs.dot(&v.coeffs) - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn curvature_tensor_validation() {
        let c = ctx(4);
        assert!(CurvatureTensor::new(metric_power(2, c).unwrap()).is_ok());
        assert!(matches!(CurvatureTensor::new(witness(c)), Err(Error::BianchiViolation { .. })));
        assert!(matches!(CurvatureTensor::new(metric(c)), Err(Error::InvalidDegree(_))));
        let mut asym = metric_power(2, c).unwrap();
        asym.coeffs[(0, 1)] = 0.5;
        assert!(matches!(CurvatureTensor::new(asym), Err(Error::Asymmetric(_))));
        let projected = CurvatureTensor::projected(&witness(c)).unwrap();
        assert!(bianchi_residual(projected.form()).unwrap() < 1e-15);
    }

    #[test]
    fn sectional_of_metric_powers_is_one() {
        for n in 2..=6 {
            let c = ctx(n);
            for p in 1..=n {
                let w = metric_power(p, c).unwrap().scale(1.0 / factorial(p));
                for seed in 0..5 {
                    let span = random_vectors(n, p, seed * 31 + p as u64);
                    let k = sectional(&w, &span).unwrap();
                    assert!((k - 1.0).abs() < 1e-12, "n={n} p={p}: {k}");
                }
            }
        }
    }

    #[test]
    fn sectional_is_basis_independent() {
        let c = ctx(5);
        let w = kn_product(&sym11(c, 1), &sym11(c, 2)).unwrap();
        let span = random_vectors(5, 2, 3);
        let mixed = vec![&span[0] * 2.0 + &span[1], &span[0] - &span[1] * 3.0];
        let a = sectional(&w, &span).unwrap();
        let b = sectional(&w, &mixed).unwrap();
        assert!((a - b).abs() < 1e-12 * w.norm());
    }

    #[test]
    fn sectional_of_metric_times_form() {
        // g·ω on orthonormal e_1, e_2, e_3 is the sum over pairs
        let n = 5;
        let c = ctx(n);
        let w = kn_product(&sym11(c, 5), &sym11(c, 6)).unwrap();
        let gw = kn_product(&metric(c), &w).unwrap();
        let frame = complete_frame(&orthonormalize(&random_vectors(n, 3, 7)).unwrap(), n);
        let cols: Vec<DVector<f64>> = (0..3).map(|i| frame.column(i).into_owned()).collect();
        let lhs = sectional(&gw, &cols).unwrap();
        let mut rhs = 0.0;
        for a in 0..3 {
            for b in (a + 1)..3 {
                rhs += sectional(&w, &[cols[a].clone(), cols[b].clone()]).unwrap();
            }
        }
        assert!((lhs - rhs).abs() < 1e-12 * w.norm());
        // with a higher metric power the prefactor is p!
        let g2w = kn_product(&metric_power(2, c).unwrap(), &w).unwrap();
        let all: Vec<DVector<f64>> = (0..4).map(|i| frame.column(i).into_owned()).collect();
        let lhs = sectional(&g2w, &all).unwrap();
        let mut rhs = 0.0;
        for a in 0..4 {
            for b in (a + 1)..4 {
                rhs += sectional(&w, &[all[a].clone(), all[b].clone()]).unwrap();
            }
        }
        assert!((lhs - 2.0 * rhs).abs() < 1e-12 * w.norm());
    }

    #[test]
    fn sectional_errors() {
        let c = ctx(4);
        let w = metric_power(2, c).unwrap();
        let v = random_vectors(4, 1, 1);
        assert!(matches!(sectional(&w, &[v[0].clone(), v[0].scale(3.0)]), Err(Error::DegeneratePlane { .. })));
        assert!(matches!(sectional(&w, &v), Err(Error::InvalidDegree(_))));
        let short = vec![DVector::zeros(3), DVector::zeros(3)];
        assert!(matches!(sectional(&w, &short), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn sectional_matches_frame_change() {
        let n = 5;
        let c = ctx(n);
        let w = kn_product(&sym11(c, 11), &sym11(c, 12)).unwrap();
        let frame = complete_frame(&orthonormalize(&random_vectors(n, n, 13)).unwrap(), n);
        let moved = pullback(&w, &frame).unwrap();
        let cols: Vec<DVector<f64>> = (0..2).map(|i| frame.column(i).into_owned()).collect();
        let k = sectional(&w, &cols).unwrap();
        let idx = c.rank_of_mask(0b11);
        assert!((moved.coeffs[(idx, idx)] - k).abs() < 1e-12 * w.norm());
    }
}
