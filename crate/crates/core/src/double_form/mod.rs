//! Double forms on a Euclidean space.
//!
//! A `(p, q)` double form is a bilinear form on `Λ^p V × Λ^q V`. It is stored
//! as the dense `C(n,p) × C(n,q)` matrix of its values on pairs of standard
//! basis elements, rows and columns in lexicographic basis order. Since the
//! standard basis is orthonormal for `g^p / p!`, the matrix of a symmetric
//! `(p, p)` form is also the matrix of the associated self-adjoint operator on
//! `Λ^p V`.

mod curvature;
mod ops;

pub use curvature::{bianchi_basis, bianchi_residual, project_bianchi, sectional, CurvatureTensor};
pub use ops::{
    contract, contract_iter, decomposable, exterior_power, inner, kn_product, metric, metric_power,
    pullback, star,
};

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::{AlgebraContext, MultiIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleForm {
    ctx: AlgebraContext,
    p: usize,
    q: usize,
    coeffs: DMatrix<f64>,
}

impl DoubleForm {
    pub fn zeros(ctx: AlgebraContext, p: usize, q: usize) -> Self {
        DoubleForm { ctx, p, q, coeffs: DMatrix::zeros(ctx.basis_len(p), ctx.basis_len(q)) }
    }

    /// The `(0, 0)` form with value `value`.
    pub fn scalar(ctx: AlgebraContext, value: f64) -> Self {
        DoubleForm { ctx, p: 0, q: 0, coeffs: DMatrix::from_element(1, 1, value) }
    }

    pub fn from_matrix(ctx: AlgebraContext, p: usize, q: usize, coeffs: DMatrix<f64>) -> Result<Self> {
        let expected = (ctx.basis_len(p), ctx.basis_len(q));
        if coeffs.shape() != expected {
            return Err(Error::DimensionMismatch(format!(
                "({p},{q}) form on n = {} needs a {}x{} matrix, got {}x{}",
                ctx.dim(),
                expected.0,
                expected.1,
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        Ok(DoubleForm { ctx, p, q, coeffs })
    }

    /// Builds a form from its values on pairs of basis masks.
    pub fn from_fn(ctx: AlgebraContext, p: usize, q: usize, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        let rows = ctx.basis(p);
        let cols = ctx.basis(q);
        let coeffs = DMatrix::from_fn(rows.len(), cols.len(), |r, c| f(rows[r], cols[c]));
        DoubleForm { ctx, p, q, coeffs }
    }

    pub fn ctx(&self) -> AlgebraContext {
        self.ctx
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DMatrix<f64> {
        self.coeffs
    }

    /// `ω(e_I, e_J)`; zero when the degrees do not match the form.
    pub fn get(&self, i: &MultiIndex, j: &MultiIndex) -> f64 {
        if i.degree() != self.p || j.degree() != self.q {
            return 0.0;
        }
        self.get_mask(i.mask(), j.mask())
    }

    pub(crate) fn get_mask(&self, i: u32, j: u32) -> f64 {
        self.coeffs[(self.ctx.rank_of_mask(i), self.ctx.rank_of_mask(j))]
    }

    /// Value of a `(0, 0)` form.
    pub fn scalar_value(&self) -> Option<f64> {
        (self.p == 0 && self.q == 0).then(|| self.coeffs[(0, 0)])
    }

    pub fn transpose(&self) -> Self {
        DoubleForm { ctx: self.ctx, p: self.q, q: self.p, coeffs: self.coeffs.transpose() }
    }

    pub fn max_asymmetry(&self) -> f64 {
        if self.p != self.q {
            return f64::INFINITY;
        }
        (&self.coeffs - self.coeffs.transpose()).amax()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.p == self.q && self.max_asymmetry() <= tol
    }

    /// `(ω + ωᵀ) / 2`; exactly symmetric afterwards.
    pub fn symmetrized(&self) -> Self {
        assert_eq!(self.p, self.q, "only (p,p) forms can be symmetrized");
        let mut m = self.coeffs.clone();
        let k = m.nrows();
        for r in 0..k {
            for c in (r + 1)..k {
                let v = 0.5 * (m[(r, c)] + m[(c, r)]);
                m[(r, c)] = v;
                m[(c, r)] = v;
            }
        }
        DoubleForm { coeffs: m, ..*self }
    }

    /// Frobenius norm in the standard basis.
    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        DoubleForm { coeffs: &self.coeffs * s, ..*self }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&v| v == 0.0)
    }

    fn assert_compatible(&self, other: &DoubleForm) {
        assert!(
            self.ctx == other.ctx && self.p == other.p && self.q == other.q,
            "incompatible double forms: ({},{}) on n={} vs ({},{}) on n={}",
            self.p,
            self.q,
            self.ctx.dim(),
            other.p,
            other.q,
            other.ctx.dim()
        );
    }
}

impl Add<&DoubleForm> for &DoubleForm {
    type Output = DoubleForm;
    fn add(self, rhs: &DoubleForm) -> DoubleForm {
        self.assert_compatible(rhs);
        DoubleForm { coeffs: &self.coeffs + &rhs.coeffs, ..*self }
    }
}

impl Sub<&DoubleForm> for &DoubleForm {
    type Output = DoubleForm;
    fn sub(self, rhs: &DoubleForm) -> DoubleForm {
        self.assert_compatible(rhs);
        DoubleForm { coeffs: &self.coeffs - &rhs.coeffs, ..*self }
    }
}

impl Add for DoubleForm {
    type Output = DoubleForm;
    fn add(self, rhs: DoubleForm) -> DoubleForm {
        &self + &rhs
    }
}

impl Sub for DoubleForm {
    type Output = DoubleForm;
    fn sub(self, rhs: DoubleForm) -> DoubleForm {
        &self - &rhs
    }
}

impl Mul<f64> for &DoubleForm {
    type Output = DoubleForm;
    fn mul(self, rhs: f64) -> DoubleForm {
        self.scale(rhs)
    }
}

impl Mul<f64> for DoubleForm {
    type Output = DoubleForm;
    fn mul(self, rhs: f64) -> DoubleForm {
        self.scale(rhs)
    }
}

impl Neg for &DoubleForm {
    type Output = DoubleForm;
    fn neg(self) -> DoubleForm {
        self.scale(-1.0)
    }
}

/// `‖a − b‖ / max(‖b‖, 1)`.
pub fn relative_residual(a: &DoubleForm, b: &DoubleForm) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Least-squares factor `λ` minimising `‖target − λ·candidate‖`.
pub fn fitted_factor(target: &DoubleForm, candidate: &DoubleForm) -> Option<f64> {
    let denom = candidate.coeffs.norm_squared();
    (denom > 0.0).then(|| target.coeffs.dot(&candidate.coeffs) / denom)
}
