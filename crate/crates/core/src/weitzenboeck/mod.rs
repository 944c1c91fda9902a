//! Weitzenböck curvature operators `N_p`.
//!
//! For a symmetric `(2,2)` form `ω`, `N_p(ω)` is the symmetric `(p,p)` form
//!
//! ```text
//! N_p(ω)(ψ₁, ψ₂) = ¼ Σ_{i<j, k<l} ω(e_i∧e_j, e_k∧e_l) ⟨ad_{e_i·e_j} ψ₁, ad_{e_k·e_l} ψ₂⟩.
//! ```
//!
//! [`np_definition`] evaluates this sum literally with Clifford products and
//! is the reference every other routine here is tested against. For
//! Bianchi tensors and `2 ≤ p ≤ n−2` it agrees with the closed formula
//! [`np_formula`], `N_p = {g·cω/(p−1) − 2ω}·g^{p−2}/(p−2)!`.

mod decomposition;
mod spectrum;

pub use decomposition::{decompose_22, np_split, DecompositionSummary, KulkarniComponents};
pub(crate) use spectrum::positivity_from;
pub use spectrum::{
    contraction_positivity, operator_matrix, spectrum, ContractedPositivityCase, ContractionPositivity,
    OperatorMatrix, SpectrumReport, SYMMETRY_TOLERANCE,
};

use rayon::prelude::*;

use crate::clifford::{ad, CliffordElement};
use crate::double_form::{
    contract, contract_iter, kn_product, metric, metric_power, star, CurvatureTensor, DoubleForm,
};
use crate::error::{Error, Result};
use crate::exterior::{factorial, AlgebraContext};

/// Coefficient of `ω` inside the braces of the closed formula.
pub const FORMULA_OMEGA_COEFFICIENT: f64 = -2.0;

fn check_formula_range(ctx: AlgebraContext, p: usize) -> Result<()> {
    let n = ctx.dim();
    if p < 2 || p + 2 > n {
        return Err(Error::FormulaRange { p, max: n as isize - 2 });
    }
    Ok(())
}

fn scalar(form: &DoubleForm) -> f64 {
    form.scalar_value().expect("(0,0) form")
}

/// `N_p(ω)` for a curvature tensor, by the Clifford definition.
pub fn np_definition(omega: &CurvatureTensor, p: usize) -> Result<DoubleForm> {
    np_definition_form(omega.form(), p)
}

/// The Clifford definition for any `(2,2)` form, Bianchi or not.
pub fn np_definition_form(omega: &DoubleForm, p: usize) -> Result<DoubleForm> {
    if omega.degrees() != (2, 2) {
        return Err(Error::InvalidDegree(format!("N_p acts on (2,2) forms, got {:?}", omega.degrees())));
    }
    let ctx = omega.ctx();
    if p > ctx.dim() {
        return Err(Error::InvalidDegree(format!("p = {p} exceeds n = {}", ctx.dim())));
    }
    let pairs = ctx.basis(2);
    let basis = ctx.basis(p);
    // ad_{e_i·e_j} e_I for every basis pair and basis p-vector, zeros dropped
    let ads: Vec<Vec<(usize, CliffordElement)>> = basis
        .par_iter()
        .map(|&mask| {
            let psi = CliffordElement::blade(ctx, mask, 1.0);
            pairs
                .iter()
                .enumerate()
                .filter_map(|(r, &pair)| {
                    let phi = CliffordElement::blade(ctx, pair, 1.0);
                    let out = ad(&phi, &psi).expect("same context");
                    (!out.is_zero()).then_some((r, out))
                })
                .collect()
        })
        .collect();
    let coeffs = omega.coeffs();
    let rows: Vec<Vec<f64>> = (0..basis.len())
        .into_par_iter()
        .map(|a| {
            (a..basis.len())
                .map(|b| {
                    let mut acc = 0.0;
                    for (r, ad_a) in &ads[a] {
                        for (s, ad_b) in &ads[b] {
                            let w = coeffs[(*r, *s)];
                            if w != 0.0 {
                                acc += w * ad_a.inner(ad_b);
                            }
                        }
                    }
                    0.25 * acc
                })
                .collect()
        })
        .collect();
    let m = nalgebra::DMatrix::from_fn(basis.len(), basis.len(), |r, c| {
        if r <= c {
            rows[r][c - r]
        } else {
            rows[c][r - c]
        }
    });
    DoubleForm::from_matrix(ctx, p, p, m)
}

/// `N_p(ω) = {g·cω/(p−1) − 2ω}·g^{p−2}/(p−2)!` for `2 ≤ p ≤ n−2`.
pub fn np_formula(omega: &CurvatureTensor, p: usize) -> Result<DoubleForm> {
    np_formula_with_coefficient(omega, p, FORMULA_OMEGA_COEFFICIENT)
}

/// The closed formula with the coefficient of `ω` replaced; only
/// [`FORMULA_OMEGA_COEFFICIENT`] is correct. Used for mutation checks.
pub fn np_formula_with_coefficient(omega: &CurvatureTensor, p: usize, omega_coefficient: f64) -> Result<DoubleForm> {
    let ctx = omega.ctx();
    check_formula_range(ctx, p)?;
    let w = omega.form();
    let gc = kn_product(&metric(ctx), &contract(w)?)?;
    let braces = &gc.scale(1.0 / (p as f64 - 1.0)) + &w.scale(omega_coefficient);
    Ok(kn_product(&braces, &metric_power(p - 2, ctx)?)?.scale(1.0 / factorial(p - 2)))
}

/// Adjoint of `N_p`: `(g·c^{p−1}/(p−1)! − 2c^{p−2}/(p−2)!) β` for a `(p,p)` form `β`.
pub fn np_adjoint(beta: &DoubleForm, p: usize) -> Result<DoubleForm> {
    if beta.degrees() != (p, p) {
        return Err(Error::InvalidDegree(format!("adjoint of N_{p} takes a ({p},{p}) form, got {:?}", beta.degrees())));
    }
    let ctx = beta.ctx();
    check_formula_range(ctx, p)?;
    let first = kn_product(&metric(ctx), &contract_iter(beta, p - 1)?)?.scale(1.0 / factorial(p - 1));
    let second = contract_iter(beta, p - 2)?.scale(2.0 / factorial(p - 2));
    Ok(&first - &second)
}

/// Einstein form `E = ½ c²ω g − cω`.
pub fn einstein_form(omega: &CurvatureTensor) -> Result<DoubleForm> {
    let ctx = omega.ctx();
    let c1 = contract(omega.form())?;
    let s = scalar(&contract(&c1)?);
    Ok(&metric(ctx).scale(0.5 * s) - &c1)
}

/// Closed forms for `c^k(N_p)`, `0 ≤ k ≤ p`, `2 ≤ p ≤ n−2`:
///
/// - `k = p`: `p(n−2)!/(n−p−1)! · c²ω`
/// - `k = p−1`: `(n−3)!/(n−p−1)! · {(n−2p)cω + (p−1)c²ω g}`
/// - `k ≤ p−2`: `(n−p+k−2)!/((n−p−2)!(p−k−2)!) · g^{p−k−2}{−2ω
///   + (n−k−p−1)/((n−p−1)(p−k−1)) g cω + k/((n−p−1)(p−k−1)(p−k)) g² c²ω}`
pub fn np_contraction_rhs(omega: &CurvatureTensor, p: usize, k: usize) -> Result<DoubleForm> {
    let ctx = omega.ctx();
    check_formula_range(ctx, p)?;
    if k > p {
        return Err(Error::InvalidDegree(format!("contraction order {k} exceeds p = {p}")));
    }
    let n = ctx.dim();
    let nf = n as f64;
    let pf = p as f64;
    let kf = k as f64;
    let w = omega.form();
    let c1 = contract(w)?;
    let s = scalar(&contract(&c1)?);
    let g = metric(ctx);
    if k == p {
        let coef = pf * factorial(n - 2) / factorial(n - p - 1);
        return Ok(DoubleForm::scalar(ctx, coef * s));
    }
    if k + 1 == p {
        let coef = factorial(n - 3) / factorial(n - p - 1);
        let inner = &c1.scale(nf - 2.0 * pf) + &g.scale((pf - 1.0) * s);
        return Ok(inner.scale(coef));
    }
    let lead = factorial(n - p + k - 2) / (factorial(n - p - 2) * factorial(p - k - 2));
    let a = (nf - kf - pf - 1.0) / ((nf - pf - 1.0) * (pf - kf - 1.0));
    let b = kf / ((nf - pf - 1.0) * (pf - kf - 1.0) * (pf - kf));
    let gc = kn_product(&g, &c1)?;
    let g2 = metric_power(2, ctx)?;
    let braces = &(&w.scale(-2.0) + &gc.scale(a)) + &g2.scale(b * s);
    Ok(kn_product(&metric_power(p - k - 2, ctx)?, &braces)?.scale(lead))
}

/// `c^{p−1}(N_p)` written with the Einstein form:
/// `(n−3)!/(n−p−1)! · {(n−2)/2 · c²ω g − (n−2p) E}`.
pub fn np_contraction_rhs_einstein(omega: &CurvatureTensor, p: usize) -> Result<DoubleForm> {
    let ctx = omega.ctx();
    check_formula_range(ctx, p)?;
    let n = ctx.dim();
    let nf = n as f64;
    let s = scalar(&contract_iter(omega.form(), 2)?);
    let e = einstein_form(omega)?;
    let inner = &metric(ctx).scale((nf - 2.0) / 2.0 * s) - &e.scale(nf - 2.0 * p as f64);
    Ok(inner.scale(factorial(n - 3) / factorial(n - p - 1)))
}

/// The `(p,p)` form `∗(g^{n−p−2} ω / (n−p−2)!)` whose sectional curvature is
/// the `p`-curvature; `0 ≤ p ≤ n−2`.
pub fn p_curvature_form(omega: &CurvatureTensor, p: usize) -> Result<DoubleForm> {
    let ctx = omega.ctx();
    let n = ctx.dim();
    if p + 2 > n {
        return Err(Error::InvalidDegree(format!("p-curvature needs p <= n - 2, got p = {p}, n = {n}")));
    }
    let m = n - p - 2;
    let gm = metric_power(m, ctx)?;
    Ok(star(&kn_product(&gm, omega.form())?).scale(1.0 / factorial(m)))
}

/// Both sides of the mid-degree identity, for `n + p` even and
/// `2 ≤ p ≤ n−2`:
///
/// `N_{(n+p)/2} = C · g^{(n−p)/2} {∗(p(p−1)/(n−p−2)! g^{n−p−2}ω) − (n−1)(n−2)/(p−2)! g^{p−2}W}`
///
/// with `C = 2(p−2)!/(((n+p−4)/2)! (n+p−2)(n−p−1))` and `W` the Weyl part.
/// The left side is evaluated with [`np_definition`].
pub fn np_midpoint_formula(omega: &CurvatureTensor, p: usize) -> Result<(DoubleForm, DoubleForm)> {
    let ctx = omega.ctx();
    let n = ctx.dim();
    if !(n + p).is_multiple_of(2) {
        return Err(Error::InvalidDegree(format!("n + p = {} must be even", n + p)));
    }
    check_formula_range(ctx, p)?;
    let m = (n + p) / 2;
    let lhs = np_definition(omega, m)?;
    let nf = n as f64;
    let pf = p as f64;
    let weyl = decompose_22(omega)?.omega2;
    let s_part = p_curvature_form(omega, p)?.scale(pf * (pf - 1.0));
    let w_part = kn_product(&metric_power(p - 2, ctx)?, &weyl)?.scale((nf - 1.0) * (nf - 2.0) / factorial(p - 2));
    let c = 2.0 * factorial(p - 2) / (factorial((n + p - 4) / 2) * (nf + pf - 2.0) * (nf - pf - 1.0));
    let rhs = kn_product(&metric_power((n - p) / 2, ctx)?, &(&s_part - &w_part))?.scale(c);
    Ok((lhs, rhs))
}
