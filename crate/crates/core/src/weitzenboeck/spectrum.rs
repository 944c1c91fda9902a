use nalgebra::DMatrix;
use serde::Serialize;

use crate::double_form::{contract_iter, decomposable, CurvatureTensor, DoubleForm};
use crate::error::{Error, Result};
use crate::exterior::AlgebraContext;
use crate::linalg::jacobi_eigenvalues;
use crate::toolkit::random::{random_plane, rng};

use super::{einstein_form, np_definition};

/// A symmetric `(p,p)` form as a self-adjoint operator on `Λ^p V`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub p: usize,
    pub ctx: AlgebraContext,
    pub matrix: DMatrix<f64>,
}

/// Relative asymmetry accepted by [`operator_matrix`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn operator_matrix(form: &DoubleForm) -> Result<OperatorMatrix> {
    let (p, q) = form.degrees();
    if p != q {
        return Err(Error::InvalidDegree(format!("operators need a (p,p) form, got ({p},{q})")));
    }
    let asym = form.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE * form.norm() {
        return Err(Error::Asymmetric(asym));
    }
    Ok(OperatorMatrix { p, ctx: form.ctx(), matrix: form.coeffs().clone() })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub p: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// `None` when no planes were sampled.
    pub min_sampled_sectional: Option<f64>,
    pub sample_count: usize,
    pub seed: u64,
    pub jacobi_sweeps: usize,
}

impl SpectrumReport {
    /// Every sectional value is a Rayleigh quotient, so it bounds the
    /// smallest eigenvalue from above.
    pub fn rayleigh_bound_holds(&self, tol: f64) -> bool {
        self.min_sampled_sectional.is_none_or(|k| self.min_eigenvalue <= k + tol)
    }
}

/// Eigenvalues by cyclic Jacobi and the minimum sectional value over
/// `samples` random `p`-planes.
pub fn spectrum(op: &OperatorMatrix, samples: usize, seed: u64) -> SpectrumReport {
    let jacobi = jacobi_eigenvalues(&op.matrix);
    let n = op.ctx.dim();
    let mut r = rng(seed);
    let mut min_sampled: Option<f64> = None;
    for _ in 0..samples {
        let plane = random_plane(&mut r, n, op.p);
        let w = decomposable(op.ctx, &plane);
        let k = w.dot(&(&op.matrix * &w));
        min_sampled = Some(min_sampled.map_or(k, |m: f64| m.min(k)));
    }
    let min_eigenvalue = jacobi.eigenvalues.first().copied().unwrap_or(0.0);
    SpectrumReport {
        n,
        p: op.p,
        eigenvalues: jacobi.eigenvalues,
        min_eigenvalue,
        min_sampled_sectional: min_sampled,
        sample_count: samples,
        seed,
        jacobi_sweeps: jacobi.sweeps,
    }
}

/// One hypothesis → conclusion pair about contracted Weitzenböck operators.
#[derive(Debug, Clone, Serialize)]
pub struct ContractedPositivityCase {
    pub name: &'static str,
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl ContractedPositivityCase {
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

/// Signs of `c^p N_p` and `c^{p−1} N_p` against the positivity of the
/// scalar, Ricci and Einstein forms of `ω`.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionPositivity {
    pub n: usize,
    pub p: usize,
    pub scalar_curvature: f64,
    pub ricci_min: f64,
    pub einstein_min: f64,
    /// `c^p N_p`.
    pub full_contraction: f64,
    /// Smallest eigenvalue of `c^{p−1} N_p`.
    pub partial_contraction_min: f64,
    pub cases: Vec<ContractedPositivityCase>,
}

impl ContractionPositivity {
    pub fn holds(&self) -> bool {
        self.cases.iter().all(ContractedPositivityCase::holds)
    }
}

fn min_eigenvalue(form: &DoubleForm) -> f64 {
    jacobi_eigenvalues(form.coeffs()).eigenvalues.first().copied().unwrap_or(0.0)
}

/// Evaluates, for `1 ≤ p ≤ n−1`, with the contractions taken from the
/// Clifford definition of `N_p`:
///
/// - `scalar`: `c²ω > 0 ⇒ c^p N_p > 0`
/// - `scalar_middle`: `n = 2p` and `c²ω > 0 ⇒ c^{p−1} N_p > 0`
/// - `einstein`: `n ≤ 2p+1` and `E > 0 ⇒ c^{p−1} N_p > 0`
/// - `ricci`: `n ≥ 2p` and `cω > 0 ⇒ c^{p−1} N_p > 0`
///
/// `margin` is the threshold, relative to `‖ω‖`, above which a quantity
/// counts as positive.
pub fn contraction_positivity(omega: &CurvatureTensor, p: usize, margin: f64) -> Result<ContractionPositivity> {
    let n = omega.dim();
    if p == 0 || p >= n {
        return Err(Error::InvalidDegree(format!("contracted positivity needs 1 <= p <= n - 1, got p = {p}")));
    }
    positivity_from(omega, &np_definition(omega, p)?, p, margin)
}

/// [`contraction_positivity`] with `N_p(ω)` already evaluated.
pub(crate) fn positivity_from(
    omega: &CurvatureTensor,
    np: &DoubleForm,
    p: usize,
    margin: f64,
) -> Result<ContractionPositivity> {
    let n = omega.dim();
    let eps = margin * omega.norm();
    let ricci = contract_iter(omega.form(), 1)?;
    let scalar_curvature = contract_iter(&ricci, 1)?.scalar_value().expect("(0,0) form");
    let ricci_min = min_eigenvalue(&ricci);
    let einstein_min = min_eigenvalue(&einstein_form(omega)?);
    let partial = contract_iter(np, p - 1)?;
    let full_contraction = contract_iter(&partial, 1)?.scalar_value().expect("(0,0) form");
    let partial_contraction_min = min_eigenvalue(&partial);
    let partial_positive = partial_contraction_min > eps;
    let cases = vec![
        ContractedPositivityCase {
            name: "scalar",
            hypothesis: scalar_curvature > eps,
            conclusion: full_contraction > eps,
        },
        ContractedPositivityCase {
            name: "scalar_middle",
            hypothesis: n == 2 * p && scalar_curvature > eps,
            conclusion: partial_positive,
        },
        ContractedPositivityCase {
            name: "einstein",
            hypothesis: n <= 2 * p + 1 && einstein_min > eps,
            conclusion: partial_positive,
        },
        ContractedPositivityCase {
            name: "ricci",
            hypothesis: n >= 2 * p && ricci_min > eps,
            conclusion: partial_positive,
        },
    ];
    Ok(ContractionPositivity {
        n,
        p,
        scalar_curvature,
        ricci_min,
        einstein_min,
        full_contraction,
        partial_contraction_min,
        cases,
    })
}
