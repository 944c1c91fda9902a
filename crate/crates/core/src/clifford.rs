//! The Clifford algebra of Euclidean `R^n` realised on `ΛV`.
//!
//! Elements are dense vectors over the `2^n` basis blades, indexed by subset
//! bitmask. The blade for `S = {s_1 < … < s_k}` is
//! `e_{s_1} · … · e_{s_k} = e_{s_1} ∧ … ∧ e_{s_k}`. Products follow
//! `e · ω = e ∧ ω − i_e ω`, so `e · e = −|e|²`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::exterior::{leading_sign, AlgebraContext};

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    ctx: AlgebraContext,
    coeffs: Vec<f64>,
}

/// Left multiplication of a single blade by the generator `e_{bit}`.
fn generator_times_blade(bit: u32, blade: u32) -> (f64, u32) {
    let b = 1u32 << bit;
    let s = leading_sign(blade, bit) as f64;
    if blade & b == 0 {
        (s, blade | b)
    } else {
        (-s, blade & !b)
    }
}

/// `e_A · e_B = sign · e_{A Δ B}`, by peeling generators off `A` from the
/// right.
pub fn blade_product(a: u32, b: u32) -> (f64, u32) {
    let mut sign = 1.0;
    let mut blade = b;
    let mut rest = a;
    while rest != 0 {
        let bit = 31 - rest.leading_zeros();
        rest &= !(1u32 << bit);
        let (s, next) = generator_times_blade(bit, blade);
        sign *= s;
        blade = next;
    }
    (sign, blade)
}

impl CliffordElement {
    pub fn zero(ctx: AlgebraContext) -> Self {
        CliffordElement { ctx, coeffs: vec![0.0; ctx.clifford_len()] }
    }

    pub fn scalar(ctx: AlgebraContext, value: f64) -> Self {
        Self::blade(ctx, 0, value)
    }

    /// `value · e_S` for the subset mask `S`.
    pub fn blade(ctx: AlgebraContext, mask: u32, value: f64) -> Self {
        let mut out = Self::zero(ctx);
        out.coeffs[mask as usize] = value;
        out
    }

    /// The basis vector `e_i`, 1-based.
    pub fn generator(ctx: AlgebraContext, i: usize) -> Self {
        assert!(i >= 1 && i <= ctx.dim(), "generator index {i} out of range");
        Self::blade(ctx, 1 << (i - 1), 1.0)
    }

    pub fn from_coeffs(ctx: AlgebraContext, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != ctx.clifford_len() {
            return Err(Error::DimensionMismatch(format!(
                "Clifford element on n = {} needs {} coefficients, got {}",
                ctx.dim(),
                ctx.clifford_len(),
                coeffs.len()
            )));
        }
        Ok(CliffordElement { ctx, coeffs })
    }

    pub fn ctx(&self) -> AlgebraContext {
        self.ctx
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    /// Keeps only the blades of size `k`.
    pub fn degree_component(&self, k: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &v)| if (m as u32).count_ones() as usize == k { v } else { 0.0 })
            .collect();
        CliffordElement { ctx: self.ctx, coeffs }
    }

    /// True when every nonzero coefficient sits on a blade of size `k`.
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.coeffs.iter().enumerate().all(|(m, &v)| v == 0.0 || (m as u32).count_ones() as usize == k)
    }

    /// Frobenius pairing on the blade basis.
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        CliffordElement { ctx: self.ctx, coeffs: self.coeffs.iter().map(|v| v * s).collect() }
    }

    /// `e_i ∧ self`, 1-based.
    pub fn wedge_generator(&self, i: usize) -> Self {
        let bit = (i - 1) as u32;
        let b = 1u32 << bit;
        let mut out = Self::zero(self.ctx);
        for (m, &v) in self.coeffs.iter().enumerate() {
            let m = m as u32;
            if v != 0.0 && m & b == 0 {
                out.coeffs[(m | b) as usize] += leading_sign(m, bit) as f64 * v;
            }
        }
        out
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::DimensionMismatch(format!(
                "Clifford elements on n = {} and n = {}",
                self.ctx.dim(),
                other.ctx.dim()
            )));
        }
        Ok(())
    }
}

/// Clifford product.
pub fn clifford_mul(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    a.check(b)?;
    let mut out = CliffordElement::zero(a.ctx);
    for (ma, &va) in a.coeffs.iter().enumerate() {
        if va == 0.0 {
            continue;
        }
        for (mb, &vb) in b.coeffs.iter().enumerate() {
            if vb == 0.0 {
                continue;
            }
            let (s, m) = blade_product(ma as u32, mb as u32);
            out.coeffs[m as usize] += s * va * vb;
        }
    }
    Ok(out)
}

/// Interior product `i_{e_i}`, 1-based: the adjoint of `e_i ∧ ·`.
pub fn interior(i: usize, a: &CliffordElement) -> CliffordElement {
    assert!(i >= 1 && i <= a.ctx.dim(), "generator index {i} out of range");
    let bit = (i - 1) as u32;
    let b = 1u32 << bit;
    let mut out = CliffordElement::zero(a.ctx);
    for (m, &v) in a.coeffs.iter().enumerate() {
        let m = m as u32;
        if v != 0.0 && m & b != 0 {
            out.coeffs[(m & !b) as usize] += leading_sign(m, bit) as f64 * v;
        }
    }
    out
}

/// `ad_φ(ψ) = φ·ψ − ψ·φ`.
pub fn ad(phi: &CliffordElement, psi: &CliffordElement) -> Result<CliffordElement> {
    let left = clifford_mul(phi, psi)?;
    let right = clifford_mul(psi, phi)?;
    Ok(&left - &right)
}

impl Add<&CliffordElement> for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        assert_eq!(self.ctx, rhs.ctx);
        CliffordElement { ctx: self.ctx, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&CliffordElement> for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        assert_eq!(self.ctx, rhs.ctx);
        CliffordElement { ctx: self.ctx, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&CliffordElement> for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        clifford_mul(self, rhs).expect("Clifford elements on different dimensions")
    }
}
