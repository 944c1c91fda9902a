//! The verification suite behind `doubleforms verify`.
//!
//! Every check produces one [`Record`]. Independent cells run in parallel
//! and are collected in a fixed order, so the report depends only on the
//! configuration.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{ad, clifford_mul, CliffordElement};
use crate::double_form::{
    bianchi_basis, contract, contract_iter, fitted_factor, inner, kn_product, metric, metric_power, relative_residual,
    star, CurvatureTensor, DoubleForm,
};
use crate::error::{Error, Result};
use crate::exterior::{factorial, AlgebraContext};
use crate::linalg::{jacobi_eigenvalues, singular_value_ratio};
use crate::toolkit::random::{
    conformally_flat, constant_curvature, default_terms, derive_seed, perturbed_constant_curvature, pure_weyl,
    random_bianchi_22, random_form, rng,
};
use crate::weitzenboeck::{
    decompose_22, np_contraction_rhs, np_contraction_rhs_einstein, np_definition, np_definition_form,
    np_formula_with_coefficient, np_midpoint_formula, np_split, operator_matrix, positivity_from, spectrum,
    FORMULA_OMEGA_COEFFICIENT,
};

/// Tolerance for the adjointness and star–contraction checks.
pub const ALGEBRA_TOLERANCE: f64 = 1e-10;
/// Tolerance for the Weyl and Ricci trace checks.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Tolerance for constant-curvature closed forms and the Clifford layer.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Smallest accepted `σ_min/σ_max` for injectivity.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Largest `n` for the injectivity and Clifford checks.
pub const SMALL_N_MAX: usize = 6;
/// Largest `n` for the constant-curvature and mid-degree checks.
pub const LARGE_N_MAX: usize = 8;
/// Perturbed constant-curvature tensors per `n` in the positivity checks.
pub const POSITIVITY_INSTANCES: usize = 20;
/// Operator norm of the perturbation in those tensors.
pub const POSITIVITY_EPSILON: f64 = 0.5;
/// Random planes sampled per spectrum.
pub const SPECTRUM_SAMPLES: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Random curvature tensors per `(n, p)` cell.
    pub seeds: usize,
    /// Random form pairs per `(n, p)` for the algebra checks.
    pub trials: usize,
    /// Relative tolerance of the Weitzenböck identities.
    pub tol: f64,
    /// Raises `n_max` to 8.
    pub extended: bool,
    pub seed: u64,
    /// Coefficient of `ω` used by the closed formula in the main check.
    pub formula_omega_coefficient: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_min: 4,
            n_max: 6,
            seeds: 10,
            trials: 100,
            tol: 1e-9,
            extended: false,
            seed: 42,
            formula_omega_coefficient: FORMULA_OMEGA_COEFFICIENT,
        }
    }
}

impl SuiteConfig {
    pub fn effective_n_max(&self) -> usize {
        if self.extended {
            self.n_max.max(LARGE_N_MAX)
        } else {
            self.n_max
        }
    }

    pub fn dims(&self) -> std::ops::RangeInclusive<usize> {
        self.n_min..=self.effective_n_max()
    }

    pub fn validate(&self) -> Result<()> {
        let n_max = self.effective_n_max();
        if self.n_min > n_max {
            return Err(Error::Config(format!("empty dimension range {}..={}", self.n_min, n_max)));
        }
        if self.n_min < 4 || n_max > LARGE_N_MAX {
            return Err(Error::Config(format!(
                "dimension range {}..={} must lie within 4..={LARGE_N_MAX}",
                self.n_min, n_max
            )));
        }
        if self.seeds == 0 || self.trials == 0 {
            return Err(Error::Config("seeds and trials must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }
}

/// How a record's value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `residual <= tolerance`.
    AtMost,
    /// `residual > tolerance`.
    Exceeds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub criterion: u8,
    pub identity: &'static str,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub residual: f64,
    pub tolerance: f64,
    pub check: Check,
    pub pass: bool,
    /// Least-squares factor between the two sides, on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_factor: Option<f64>,
}

impl Record {
    fn new(criterion: u8, identity: &'static str, n: usize, residual: f64, tolerance: f64, check: Check) -> Self {
        let pass = match check {
            Check::AtMost => residual <= tolerance,
            Check::Exceeds => residual > tolerance,
        };
        Record { criterion, identity, n, p: None, k: None, seed: None, residual, tolerance, check, pass, fitted_factor: None }
    }

    fn at_most(criterion: u8, identity: &'static str, n: usize, residual: f64, tolerance: f64) -> Self {
        Self::new(criterion, identity, n, residual, tolerance, Check::AtMost)
    }

    fn exceeds(criterion: u8, identity: &'static str, n: usize, value: f64, bound: f64) -> Self {
        Self::new(criterion, identity, n, value, bound, Check::Exceeds)
    }

    fn p(mut self, p: usize) -> Self {
        self.p = Some(p);
        self
    }

    fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Attaches `λ` minimising `‖target − λ·candidate‖` if the check failed.
    fn fit(mut self, target: &DoubleForm, candidate: &DoubleForm) -> Self {
        if !self.pass {
            self.fitted_factor = fitted_factor(target, candidate);
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionSummary {
    pub criterion: u8,
    pub records: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub records: usize,
    pub failed: usize,
    pub pass: bool,
    pub criteria: Vec<CriterionSummary>,
}

#[derive(Debug, Clone)]
pub struct GroupTiming {
    pub group: &'static str,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
    /// Wall-clock times per group; not serialized so reports stay
    /// reproducible.
    #[serde(skip)]
    pub timings: Vec<GroupTiming>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    pub fn criterion(&self, criterion: u8) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.criterion == criterion)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }
}

fn summarize(records: &[Record]) -> Summary {
    let mut criteria: Vec<CriterionSummary> = Vec::new();
    for r in records {
        match criteria.iter_mut().find(|c| c.criterion == r.criterion) {
            Some(c) => {
                c.records += 1;
                c.failed += usize::from(!r.pass);
            }
            None => criteria.push(CriterionSummary { criterion: r.criterion, records: 1, failed: usize::from(!r.pass) }),
        }
    }
    criteria.sort_by_key(|c| c.criterion);
    let failed = records.iter().filter(|r| !r.pass).count();
    Summary { records: records.len(), failed, pass: failed == 0, criteria }
}

fn ctx(n: usize) -> AlgebraContext {
    AlgebraContext::new(n).expect("dimensions in the suite are valid")
}

fn scalar(form: &DoubleForm) -> f64 {
    form.scalar_value().expect("(0,0) form")
}

/// A random curvature tensor with `N_p` evaluated by definition for every
/// `0 ≤ p ≤ n`.
pub struct Cell {
    pub n: usize,
    pub seed: u64,
    pub omega: CurvatureTensor,
    pub np: Vec<DoubleForm>,
}

fn cell(n: usize, seed: u64) -> Cell {
    let omega = random_bianchi_22(seed, default_terms(n), ctx(n));
    let np = (0..=n).map(|p| np_definition(&omega, p).expect("0 <= p <= n")).collect();
    Cell { n, seed, omega, np }
}

/// The random tensors shared by criteria 1, 2, 5 and 6.
pub fn cells(config: &SuiteConfig) -> Vec<Cell> {
    let keys: Vec<(usize, u64)> = config
        .dims()
        .flat_map(|n| (0..config.seeds as u64).map(move |s| (n, s)))
        .collect();
    keys.par_iter()
        .map(|&(n, s)| cell(n, derive_seed(config.seed, &[1, n as u64, s])))
        .collect()
}

/// Criterion 1: closed formula against the Clifford definition.
pub fn main_theorem(config: &SuiteConfig, cells: &[Cell]) -> Vec<Record> {
    cells
        .par_iter()
        .flat_map_iter(|c| {
            (2..=c.n - 2).map(move |p| {
                let oracle = &c.np[p];
                let formula = np_formula_with_coefficient(&c.omega, p, config.formula_omega_coefficient)
                    .expect("2 <= p <= n-2");
                Record::at_most(1, "main_theorem", c.n, relative_residual(&formula, oracle), config.tol)
                    .p(p)
                    .seed(c.seed)
                    .fit(oracle, &formula)
            })
        })
        .collect()
}

/// Criterion 2: `∗N_p = N_{n−p}` for every `0 ≤ p ≤ n`.
pub fn duality(config: &SuiteConfig, cells: &[Cell]) -> Vec<Record> {
    cells
        .par_iter()
        .flat_map_iter(|c| {
            (0..=c.n).map(move |p| {
                let lhs = star(&c.np[p]);
                let rhs = &c.np[c.n - p];
                Record::at_most(2, "duality", c.n, relative_residual(&lhs, rhs), config.tol).p(p).seed(c.seed)
            })
        })
        .collect()
}

/// Criterion 3: `⟨gω₁, ω₂⟩ = ⟨ω₁, cω₂⟩`, its `k`-fold form, and
/// `gω = ∗c∗ω`, maximum over `trials` random forms per cell.
pub fn algebra(config: &SuiteConfig) -> Vec<Record> {
    let keys: Vec<(usize, usize)> = config.dims().flat_map(|n| (0..n).map(move |p| (n, p))).collect();
    keys.par_iter()
        .flat_map_iter(|&(n, p)| {
            let c = ctx(n);
            let base = derive_seed(config.seed, &[3, n as u64, p as u64]);
            let g = metric(c);
            let mut adj = 0.0f64;
            let mut kfold = 0.0f64;
            let mut starred = 0.0f64;
            for t in 0..config.trials as u64 {
                let s = derive_seed(base, &[t]);
                let a = random_form(s, c, p, p);
                let b = random_form(s ^ 1, c, p + 1, p + 1);
                let lhs = inner(&kn_product(&g, &a).unwrap(), &b).unwrap();
                let rhs = inner(&a, &contract(&b).unwrap()).unwrap();
                adj = adj.max((lhs - rhs).abs() / (a.norm() * b.norm()));

                if n - p >= 2 {
                    let k = 2 + (t as usize) % (n - p - 1);
                    let bk = random_form(s ^ 2, c, p + k, p + k);
                    let lhs = inner(&kn_product(&metric_power(k, c).unwrap(), &a).unwrap(), &bk).unwrap();
                    let rhs = inner(&a, &contract_iter(&bk, k).unwrap()).unwrap();
                    kfold = kfold.max((lhs - rhs).abs() / (a.norm() * bk.norm()));
                }

                let ga = kn_product(&g, &a).unwrap();
                let via_star = star(&contract(&star(&a)).unwrap());
                starred = starred.max((&ga - &via_star).norm() / a.norm());
            }
            let mut out = vec![
                Record::at_most(3, "adjointness", n, adj, ALGEBRA_TOLERANCE).p(p).seed(base),
                Record::at_most(3, "star_contraction", n, starred, ALGEBRA_TOLERANCE).p(p).seed(base),
            ];
            if n - p >= 2 {
                out.push(Record::at_most(3, "adjointness_kfold", n, kfold, ALGEBRA_TOLERANCE).p(p).seed(base));
            }
            out
        })
        .collect()
}

fn columns_matrix(columns: &[DoubleForm]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = columns.iter().map(|f| DVector::from_column_slice(f.coeffs().as_slice())).collect();
    DMatrix::from_columns(&cols)
}

/// Criterion 4: `ω ↦ g^k ω` on `(p,p)` forms has full rank for
/// `k ≤ n−2p`, and `N_p` on `S²_1(Λ²)` has full rank off the middle degree.
/// At `n = 2p` the kernel of `N_p` is `g·(traceless (1,1) forms)`; that
/// deficit is recorded as `np_middle_kernel`.
pub fn injectivity(_config: &SuiteConfig) -> Vec<Record> {
    let mut keys: Vec<(usize, usize, usize)> = Vec::new();
    for n in 2..=SMALL_N_MAX {
        for p in 0..=n / 2 {
            for k in 1..=n - 2 * p {
                keys.push((n, p, k));
            }
        }
    }
    let mut records: Vec<Record> = keys
        .par_iter()
        .map(|&(n, p, k)| {
            let c = ctx(n);
            let gk = metric_power(k, c).unwrap();
            let images: Vec<DoubleForm> = (0..c.basis_len(p) * c.basis_len(p))
                .map(|idx| {
                    let mut m = DMatrix::zeros(c.basis_len(p), c.basis_len(p));
                    m[idx] = 1.0;
                    kn_product(&gk, &DoubleForm::from_matrix(c, p, p, m).unwrap()).unwrap()
                })
                .collect();
            Record::exceeds(4, "metric_power_injectivity", n, singular_value_ratio(&columns_matrix(&images)), RANK_TOLERANCE)
                .p(p)
                .k(k)
        })
        .collect();
    let cells: Vec<(usize, usize)> = (4..=SMALL_N_MAX).flat_map(|n| (2..=n - 2).map(move |p| (n, p))).collect();
    let np_records: Vec<Record> = cells
        .par_iter()
        .map(|&(n, p)| {
            let basis = bianchi_basis(ctx(n));
            let images: Vec<DoubleForm> = basis.iter().map(|b| np_definition_form(b, p).unwrap()).collect();
            let m = columns_matrix(&images);
            if n == 2 * p {
                let rank = crate::linalg::numerical_rank(&m, RANK_TOLERANCE);
                let expected = n * (n + 1) / 2 - 1;
                Record::at_most(4, "np_middle_kernel", n, ((basis.len() - rank) as f64 - expected as f64).abs(), 0.0).p(p)
            } else {
                Record::exceeds(4, "np_injectivity", n, singular_value_ratio(&m), RANK_TOLERANCE).p(p)
            }
        })
        .collect();
    records.extend(np_records);
    records
}

/// Criterion 5: iterated contractions of the definition against the closed
/// forms, including the Einstein-form variant.
pub fn contractions(config: &SuiteConfig, cells: &[Cell]) -> Vec<Record> {
    cells
        .par_iter()
        .flat_map_iter(|c| {
            let mut out = Vec::new();
            for p in 2..=c.n - 2 {
                for k in 0..=p {
                    let lhs = contract_iter(&c.np[p], k).unwrap();
                    let rhs = np_contraction_rhs(&c.omega, p, k).unwrap();
                    let identity = match p - k {
                        0 => "contraction_full",
                        1 => "contraction_partial",
                        _ => "contraction_low",
                    };
                    out.push(
                        Record::at_most(5, identity, c.n, relative_residual(&rhs, &lhs), config.tol)
                            .p(p)
                            .k(k)
                            .seed(c.seed)
                            .fit(&lhs, &rhs),
                    );
                }
                let lhs = contract_iter(&c.np[p], p - 1).unwrap();
                let rhs = np_contraction_rhs_einstein(&c.omega, p).unwrap();
                out.push(
                    Record::at_most(5, "contraction_einstein", c.n, relative_residual(&rhs, &lhs), config.tol)
                        .p(p)
                        .k(p - 1)
                        .seed(c.seed)
                        .fit(&lhs, &rhs),
                );
            }
            out
        })
        .collect()
}

/// Criterion 6: reassembly and traces of the decomposition, and the
/// splitting of `N_p` against the definition.
pub fn splitting(config: &SuiteConfig, cells: &[Cell]) -> Vec<Record> {
    cells
        .par_iter()
        .flat_map_iter(|c| {
            let parts = decompose_22(&c.omega).expect("n >= 4");
            let norm = c.omega.norm().max(1.0);
            let mut out = vec![
                Record::at_most(6, "reassembly", c.n, relative_residual(&parts.reassemble(), c.omega.form()), config.tol)
                    .seed(c.seed),
                Record::at_most(6, "weyl_traceless", c.n, contract(&parts.omega2).unwrap().norm() / norm, TRACE_TOLERANCE)
                    .seed(c.seed),
                Record::at_most(6, "ricci_traceless", c.n, parts.omega1.coeffs().trace().abs() / norm, TRACE_TOLERANCE)
                    .seed(c.seed),
            ];
            for p in 2..=c.n - 2 {
                let split = np_split(&parts, p).unwrap();
                out.push(
                    Record::at_most(6, "splitting", c.n, relative_residual(&split, &c.np[p]), config.tol)
                        .p(p)
                        .seed(c.seed)
                        .fit(&c.np[p], &split),
                );
            }
            out
        })
        .collect()
}

/// Criterion 7: for `ω = g²/2`, `N_p = p(n−p) g^p/p!` by definition and by
/// formula, and `c^p N_p = p·n!/(n−p−1)!`, for `4 ≤ n ≤ 8`.
pub fn constant_curvature_checks(_config: &SuiteConfig) -> Vec<Record> {
    let keys: Vec<(usize, usize)> = (4..=LARGE_N_MAX).flat_map(|n| (0..=n).map(move |p| (n, p))).collect();
    keys.par_iter()
        .flat_map_iter(|&(n, p)| {
            let c = ctx(n);
            let w = constant_curvature(1.0, c);
            let expected = metric_power(p, c).unwrap().scale((p * (n - p)) as f64 / factorial(p));
            let oracle = np_definition(&w, p).unwrap();
            let mut out =
                vec![Record::at_most(7, "constant_curvature", n, relative_residual(&oracle, &expected), EXACT_TOLERANCE).p(p)];
            if (2..=n - 2).contains(&p) {
                let formula = np_formula_with_coefficient(&w, p, FORMULA_OMEGA_COEFFICIENT).unwrap();
                out.push(
                    Record::at_most(7, "constant_curvature_formula", n, relative_residual(&formula, &expected), EXACT_TOLERANCE)
                        .p(p),
                );
            }
            if p < n {
                let full = scalar(&contract_iter(&oracle, p).unwrap());
                let closed = p as f64 * factorial(n) / factorial(n - p - 1);
                out.push(
                    Record::at_most(7, "constant_curvature_contraction", n, (full - closed).abs() / closed.max(1.0), EXACT_TOLERANCE)
                        .p(p),
                );
            }
            out
        })
        .collect()
}

fn permutations(items: &[u32]) -> Vec<(Vec<u32>, f64)> {
    if items.len() <= 1 {
        return vec![(items.to_vec(), 1.0)];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (mut tail, s) in permutations(&rest) {
            tail.insert(0, head);
            out.push((tail, sign * s));
        }
    }
    out
}

fn random_clifford(r: &mut impl Rng, c: AlgebraContext) -> CliffordElement {
    let coeffs = (0..c.clifford_len()).map(|_| r.random_range(-1.0..1.0)).collect();
    CliffordElement::from_coeffs(c, coeffs).expect("length 2^n")
}

/// Criterion 8: the `ad` rule on all basis blades, recovery of the wedge
/// from antisymmetrised Clifford products (`p ≤ 4`), and associativity on
/// `trials` random triples, for `n ≤ 6`.
pub fn clifford_checks(config: &SuiteConfig) -> Vec<Record> {
    (1..=SMALL_N_MAX)
        .into_par_iter()
        .flat_map_iter(|n| {
            let c = ctx(n);
            let mut rule = 0.0f64;
            for &pair in c.basis(2) {
                let phi = CliffordElement::blade(c, pair, 1.0);
                for s in 0..c.clifford_len() as u32 {
                    let psi = CliffordElement::blade(c, s, 1.0);
                    let got = ad(&phi, &psi).unwrap();
                    let expected = if (pair & s).count_ones() == 1 {
                        clifford_mul(&phi, &psi).unwrap().scale(2.0)
                    } else {
                        CliffordElement::zero(c)
                    };
                    rule = rule.max((&got - &expected).norm());
                }
            }
            let mut out = vec![Record::at_most(8, "ad_rule", n, rule, EXACT_TOLERANCE)];
            for p in 1..=n.min(4) {
                let mut worst = 0.0f64;
                for &mask in c.basis(p) {
                    let bits: Vec<u32> = (0..n as u32).filter(|b| mask & (1 << b) != 0).collect();
                    let mut acc = CliffordElement::zero(c);
                    for (perm, sign) in permutations(&bits) {
                        let mut prod = CliffordElement::scalar(c, sign);
                        for b in perm {
                            prod = clifford_mul(&prod, &CliffordElement::blade(c, 1 << b, 1.0)).unwrap();
                        }
                        acc = &acc + &prod;
                    }
                    let wedge = CliffordElement::blade(c, mask, 1.0);
                    worst = worst.max((&acc.scale(1.0 / factorial(p)) - &wedge).norm());
                }
                out.push(Record::at_most(8, "exterior_recovery", n, worst, EXACT_TOLERANCE).p(p));
            }
            let seed = derive_seed(config.seed, &[8, n as u64]);
            let mut r = rng(seed);
            let mut assoc = 0.0f64;
            for _ in 0..config.trials {
                let a = random_clifford(&mut r, c);
                let b = random_clifford(&mut r, c);
                let d = random_clifford(&mut r, c);
                let left = clifford_mul(&clifford_mul(&a, &b).unwrap(), &d).unwrap();
                let right = clifford_mul(&a, &clifford_mul(&b, &d).unwrap()).unwrap();
                assoc = assoc.max((&left - &right).norm() / (a.norm() * b.norm() * d.norm()));
            }
            out.push(Record::at_most(8, "clifford_associativity", n, assoc, EXACT_TOLERANCE).seed(seed));
            out
        })
        .collect()
}

/// Criterion 9: the mid-degree formula for `n + p` even, `4 ≤ n ≤ 8`, on a
/// generic, a conformally flat and a pure Weyl tensor.
pub fn midpoint(config: &SuiteConfig) -> Vec<Record> {
    let keys: Vec<(usize, usize, usize)> = (4..=LARGE_N_MAX)
        .flat_map(|n| (2..=n - 2).filter(move |p| (n + p) % 2 == 0).map(move |p| (n, p)))
        .flat_map(|(n, p)| (0..3).map(move |kind| (n, p, kind)))
        .collect();
    keys.par_iter()
        .map(|&(n, p, kind)| {
            let c = ctx(n);
            let seed = derive_seed(config.seed, &[9, n as u64, p as u64, kind as u64]);
            let (identity, w) = match kind {
                0 => ("midpoint", random_bianchi_22(seed, default_terms(n), c)),
                1 => ("midpoint_conformally_flat", conformally_flat(seed, c)),
                _ => ("midpoint_weyl", pure_weyl(seed, c)),
            };
            let (lhs, rhs) = np_midpoint_formula(&w, p).unwrap();
            Record::at_most(9, identity, n, relative_residual(&rhs, &lhs), config.tol)
                .p(p)
                .seed(seed)
                .fit(&lhs, &rhs)
        })
        .collect()
}

/// Criterion 10: positive curvature operators give positive `N_p`;
/// positive `N_p` forces positive scalar curvature; the contracted
/// positivity cases hold whenever their hypotheses do; and sampled
/// sectional values bound the smallest eigenvalue from above.
pub fn positivity(config: &SuiteConfig, cells: &[Cell]) -> Vec<Record> {
    let keys: Vec<(usize, u64)> =
        config.dims().flat_map(|n| (0..POSITIVITY_INSTANCES as u64).map(move |i| (n, i))).collect();
    let perturbed: Vec<Cell> = keys
        .par_iter()
        .map(|&(n, i)| {
            let seed = derive_seed(config.seed, &[10, n as u64, i]);
            let omega = perturbed_constant_curvature(seed, POSITIVITY_EPSILON, ctx(n));
            let np = (0..=n).map(|p| np_definition(&omega, p).unwrap()).collect();
            Cell { n, seed, omega, np }
        })
        .collect();
    let perturbed_records: Vec<Record> = perturbed
        .par_iter()
        .flat_map_iter(|c| {
            let mut out = Vec::new();
            let curvature_min = jacobi_eigenvalues(c.omega.form().coeffs()).eigenvalues[0];
            out.push(Record::exceeds(10, "curvature_operator_positive", c.n, curvature_min, 0.0).seed(c.seed));
            for p in 2..=c.n - 2 {
                let min = jacobi_eigenvalues(c.np[p].coeffs()).eigenvalues[0];
                out.push(Record::exceeds(10, "meyer", c.n, min, 0.0).p(p).seed(c.seed));
            }
            out.extend(instance_records(c));
            out
        })
        .collect();
    let generic_records: Vec<Record> = cells.par_iter().flat_map_iter(instance_records).collect();
    perturbed_records.into_iter().chain(generic_records).collect()
}

fn instance_records(c: &Cell) -> Vec<Record> {
    let mut out = Vec::new();
    let norm = c.omega.norm().max(1.0);
    let s = scalar(&contract_iter(c.omega.form(), 2).unwrap());
    for p in 1..c.n {
        let report = spectrum(&operator_matrix(&c.np[p]).unwrap(), SPECTRUM_SAMPLES, derive_seed(c.seed, &[p as u64]));
        let bound = report.min_sampled_sectional.unwrap_or(f64::INFINITY);
        out.push(
            Record::at_most(10, "rayleigh_bound", c.n, (report.min_eigenvalue - bound).max(0.0) / norm, ALGEBRA_TOLERANCE)
                .p(p)
                .seed(c.seed),
        );
        if report.min_eigenvalue > 0.0 {
            out.push(Record::exceeds(10, "positive_scalar_curvature", c.n, s / norm, 0.0).p(p).seed(c.seed));
        }
        let cases = positivity_from(&c.omega, &c.np[p], p, EXACT_TOLERANCE).unwrap();
        for case in cases.cases.iter().filter(|case| case.hypothesis) {
            let (identity, value) = match case.name {
                "scalar" => ("contracted_scalar", cases.full_contraction),
                "scalar_middle" => ("contracted_scalar_middle", cases.partial_contraction_min),
                "einstein" => ("contracted_einstein", cases.partial_contraction_min),
                _ => ("contracted_ricci", cases.partial_contraction_min),
            };
            out.push(Record::exceeds(10, identity, c.n, value / norm, 0.0).p(p).seed(c.seed));
        }
    }
    out
}

fn timed<T>(timings: &mut Vec<GroupTiming>, group: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push(GroupTiming { group, elapsed: start.elapsed() });
    out
}

/// Runs every check. Records are ordered by criterion, then by cell.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let mut timings = Vec::new();
    let cells = timed(&mut timings, "cells", || cells(config));
    let mut records = Vec::new();
    records.extend(timed(&mut timings, "main_theorem", || main_theorem(config, &cells)));
    records.extend(timed(&mut timings, "duality", || duality(config, &cells)));
    records.extend(timed(&mut timings, "algebra", || algebra(config)));
    records.extend(timed(&mut timings, "injectivity", || injectivity(config)));
    records.extend(timed(&mut timings, "contractions", || contractions(config, &cells)));
    records.extend(timed(&mut timings, "splitting", || splitting(config, &cells)));
    records.extend(timed(&mut timings, "constant_curvature", || constant_curvature_checks(config)));
    records.extend(timed(&mut timings, "clifford", || clifford_checks(config)));
    records.extend(timed(&mut timings, "midpoint", || midpoint(config)));
    records.extend(timed(&mut timings, "positivity", || positivity(config, &cells)));
    let summary = summarize(&records);
    Ok(VerificationReport { config: config.clone(), records, summary, timings })
}
