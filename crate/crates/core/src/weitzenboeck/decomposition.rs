use serde::Serialize;

use crate::double_form::{contract, kn_product, metric, metric_power, CurvatureTensor, DoubleForm};
use crate::error::{Error, Result};
use crate::exterior::{factorial, AlgebraContext};

use super::check_formula_range;

/// `ω = ω₂ + g·ω₁ + g²·ω₀` with `ω₂` the Weyl part, `ω₁` traceless.
#[derive(Debug, Clone)]
pub struct KulkarniComponents {
    pub omega2: DoubleForm,
    pub omega1: DoubleForm,
    pub omega0: f64,
}

impl KulkarniComponents {
    pub fn ctx(&self) -> AlgebraContext {
        self.omega2.ctx()
    }

    pub fn reassemble(&self) -> DoubleForm {
        let ctx = self.ctx();
        let g = metric(ctx);
        let g2 = metric_power(2, ctx).expect("n >= 4");
        let g1 = kn_product(&g, &self.omega1).expect("same context");
        &(&self.omega2 + &g1) + &g2.scale(self.omega0)
    }

    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            n: self.ctx().dim(),
            omega0: self.omega0,
            omega1_norm: self.omega1.norm(),
            omega2_norm: self.omega2.norm(),
            omega1: matrix_rows(self.omega1.coeffs()),
        }
    }
}

/// Serializable digest of a decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub omega0: f64,
    pub omega1_norm: f64,
    pub omega2_norm: f64,
    pub omega1: Vec<Vec<f64>>,
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().cloned().collect()).collect()
}

/// Splits a curvature tensor into Weyl, traceless Ricci and scalar parts:
/// `ω₀ = s/(2n(n−1))`, `ω₁ = (cω − (s/n)g)/(n−2)`, `ω₂ = ω − gω₁ − g²ω₀`
/// with `s = c²ω`.
pub fn decompose_22(omega: &CurvatureTensor) -> Result<KulkarniComponents> {
    let ctx = omega.ctx();
    let n = ctx.dim();
    if n < 4 {
        return Err(Error::UnsupportedDimension { n, reason: "the Weyl part degenerates below n = 4" });
    }
    let nf = n as f64;
    let w = omega.form();
    let c1 = contract(w)?;
    let s = contract(&c1)?.scalar_value().expect("(0,0) form");
    let g = metric(ctx);
    let omega0 = s / (2.0 * nf * (nf - 1.0));
    let omega1 = (&c1 - &g.scale(s / nf)).scale(1.0 / (nf - 2.0));
    let g1 = kn_product(&g, &omega1)?;
    let omega2 = &(w - &g1) - &metric_power(2, ctx)?.scale(omega0);
    Ok(KulkarniComponents { omega2, omega1, omega0 })
}

/// `N_p = g^{p−2}(−2ω₂)/(p−2)! + g^{p−1}(n−2p)ω₁/(p−1)! + g^p·2(n−p)ω₀/(p−1)!`.
pub fn np_split(components: &KulkarniComponents, p: usize) -> Result<DoubleForm> {
    let ctx = components.ctx();
    check_formula_range(ctx, p)?;
    let n = ctx.dim() as f64;
    let pf = p as f64;
    let weyl = kn_product(&metric_power(p - 2, ctx)?, &components.omega2)?.scale(-2.0 / factorial(p - 2));
    let ricci = kn_product(&metric_power(p - 1, ctx)?, &components.omega1)?.scale((n - 2.0 * pf) / factorial(p - 1));
    let scalar = metric_power(p, ctx)?.scale(2.0 * (n - pf) * components.omega0 / factorial(p - 1));
    Ok(&(&weyl + &ricci) + &scalar)
}
