use nalgebra::{DMatrix, DVector};

use super::DoubleForm;
use crate::error::{Error, Result};
use crate::exterior::{complement, factorial, leading_sign, shuffle_sign, AlgebraContext, MultiIndex};

fn same_context(a: &DoubleForm, b: &DoubleForm) -> Result<()> {
    if a.ctx != b.ctx {
        return Err(Error::DimensionMismatch(format!(
            "forms live on n = {} and n = {}",
            a.ctx.dim(),
            b.ctx.dim()
        )));
    }
    Ok(())
}

/// The metric `g` as a `(1,1)` form: the identity matrix.
pub fn metric(ctx: AlgebraContext) -> DoubleForm {
    let n = ctx.dim();
    DoubleForm { ctx, p: 1, q: 1, coeffs: DMatrix::identity(n, n) }
}

/// `g^k`, whose matrix is `k!` times the identity.
pub fn metric_power(k: usize, ctx: AlgebraContext) -> Result<DoubleForm> {
    if k > ctx.dim() {
        return Err(Error::InvalidDegree(format!("g^{k} does not exist for n = {}", ctx.dim())));
    }
    let size = ctx.basis_len(k);
    Ok(DoubleForm { ctx, p: k, q: k, coeffs: DMatrix::identity(size, size) * factorial(k) })
}

/// Ways of writing `e_K` as `± e_A ∧ e_B` with `|A| = head`: `(rank A, rank B, sign)`.
fn splits(ctx: &AlgebraContext, k: u32, head: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut sub = k;
    loop {
        if sub.count_ones() as usize == head {
            let rest = k & !sub;
            let s = shuffle_sign(sub, rest) as f64;
            out.push((ctx.rank_of_mask(sub), ctx.rank_of_mask(rest), s));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & k;
    }
    out
}

/// Kulkarni–Nomizu product of a `(p,q)` and an `(r,s)` form.
///
/// Summing over shuffles instead of all of `S_{p+r} × S_{q+s}` removes the
/// `1/(p! r! q! s!)` normalisation; each shuffle stands for `p! r!` (resp.
/// `q! s!`) permutations with the same sign. Degrees beyond `n` give the
/// (empty) zero form.
pub fn kn_product(a: &DoubleForm, b: &DoubleForm) -> Result<DoubleForm> {
    same_context(a, b)?;
    let ctx = a.ctx;
    let (p, q) = (a.p + b.p, a.q + b.q);
    if p > ctx.dim() || q > ctx.dim() {
        return Ok(DoubleForm::zeros(ctx, p, q));
    }
    let row_splits: Vec<_> = ctx.basis(p).iter().map(|&k| splits(&ctx, k, a.p)).collect();
    let col_splits: Vec<_> = ctx.basis(q).iter().map(|&l| splits(&ctx, l, a.q)).collect();
    let mut coeffs = DMatrix::zeros(row_splits.len(), col_splits.len());
    for (r, rs) in row_splits.iter().enumerate() {
        for (c, cs) in col_splits.iter().enumerate() {
            let mut acc = 0.0;
            for &(ra, rb, s) in rs {
                for &(ca, cb, t) in cs {
                    acc += s * t * a.coeffs[(ra, ca)] * b.coeffs[(rb, cb)];
                }
            }
            coeffs[(r, c)] = acc;
        }
    }
    Ok(DoubleForm { ctx, p, q, coeffs })
}

/// Contraction `cω(e_I, e_J) = Σ_m ω(e_m ∧ e_I, e_m ∧ e_J)`.
pub fn contract(form: &DoubleForm) -> Result<DoubleForm> {
    if form.p == 0 || form.q == 0 {
        return Err(Error::InvalidDegree(format!("cannot contract a ({},{}) form", form.p, form.q)));
    }
    let ctx = form.ctx;
    let n = ctx.dim() as u32;
    Ok(DoubleForm::from_fn(ctx, form.p - 1, form.q - 1, |i, j| {
        let mut acc = 0.0;
        for m in 0..n {
            let bit = 1u32 << m;
            if (i | j) & bit != 0 {
                continue;
            }
            let s = (leading_sign(i, m) * leading_sign(j, m)) as f64;
            acc += s * form.get_mask(i | bit, j | bit);
        }
        acc
    }))
}

/// `c^k ω`.
pub fn contract_iter(form: &DoubleForm, k: usize) -> Result<DoubleForm> {
    let mut out = form.clone();
    for _ in 0..k {
        out = contract(&out)?;
    }
    Ok(out)
}

/// Frobenius pairing in the standard basis; zero across different degrees.
pub fn inner(a: &DoubleForm, b: &DoubleForm) -> Result<f64> {
    same_context(a, b)?;
    if a.degrees() != b.degrees() {
        return Ok(0.0);
    }
    Ok(a.coeffs.dot(&b.coeffs))
}

/// Generalised Hodge star `∗ω(·,·) = ω(∗·, ∗·)`.
pub fn star(form: &DoubleForm) -> DoubleForm {
    let ctx = form.ctx;
    let n = ctx.dim();
    DoubleForm::from_fn(ctx, n - form.p, n - form.q, |i, j| {
        let (si, ic) = complement(&MultiIndex::from_mask(i), &ctx);
        let (sj, jc) = complement(&MultiIndex::from_mask(j), &ctx);
        (si * sj) as f64 * form.get_mask(ic.mask(), jc.mask())
    })
}

/// Coefficients of `v_1 ∧ … ∧ v_p` in the degree-`p` standard basis.
pub fn decomposable(ctx: AlgebraContext, vectors: &[DVector<f64>]) -> DVector<f64> {
    let n = ctx.dim();
    let mut acc = vec![0.0; ctx.clifford_len()];
    acc[0] = 1.0;
    for v in vectors {
        assert_eq!(v.len(), n, "vector length must match the dimension");
        let mut next = vec![0.0; acc.len()];
        for (s, &coef) in acc.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let s = s as u32;
            for b in 0..n {
                let bit = 1u32 << b;
                if s & bit == 0 && v[b] != 0.0 {
                    next[(s | bit) as usize] += coef * v[b] * shuffle_sign(s, bit) as f64;
                }
            }
        }
        acc = next;
    }
    let basis = ctx.basis(vectors.len());
    DVector::from_iterator(basis.len(), basis.iter().map(|&m| acc[m as usize]))
}

/// Matrix of `Λ^p A` on the standard basis: column `J` holds `A e_J`.
pub fn exterior_power(ctx: AlgebraContext, a: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let basis = ctx.basis(p);
    let mut out = DMatrix::zeros(basis.len(), basis.len());
    for (c, &mask) in basis.iter().enumerate() {
        let cols: Vec<DVector<f64>> = MultiIndex::from_mask(mask)
            .indices()
            .into_iter()
            .map(|i| a.column(i - 1).into_owned())
            .collect();
        out.set_column(c, &decomposable(ctx, &cols));
    }
    out
}

/// Components of `ω` in the frame given by the columns of `frame`:
/// `(ω(f_I, f_J))_{I,J}`.
pub fn pullback(form: &DoubleForm, frame: &DMatrix<f64>) -> Result<DoubleForm> {
    let n = form.ctx.dim();
    if frame.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("frame must be {n}x{n}")));
    }
    let left = exterior_power(form.ctx, frame, form.p);
    let right = exterior_power(form.ctx, frame, form.q);
    let coeffs = left.transpose() * &form.coeffs * right;
    DoubleForm::from_matrix(form.ctx, form.p, form.q, coeffs)
}
