//! JSON files for double forms.
//!
//! ```json
//! { "n": 4, "entries": [ { "ij": [1, 2], "kl": [3, 4], "value": 0.5 } ] }
//! ```
//!
//! Indices are 1-based and strictly increasing; unlisted entries are zero.
//! Optional `"p"` and `"q"` give the degrees (default 2). Curvature tensor
//! files list each unordered pair of index pairs at least once; the mirrored
//! entry is filled in on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::double_form::{bianchi_residual, CurvatureTensor, DoubleForm};
use crate::error::{Error, Result};
use crate::exterior::{AlgebraContext, MultiIndex};

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub n: usize,
    #[serde(default = "two")]
    pub p: usize,
    #[serde(default = "two")]
    pub q: usize,
    pub entries: Vec<FormEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormEntry {
    pub ij: Vec<usize>,
    pub kl: Vec<usize>,
    pub value: f64,
}

/// What to do with a tensor file that violates the first Bianchi identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BianchiPolicy {
    /// Keep the symmetric tensor and report the residual.
    #[default]
    Warn,
    /// Reject with [`Error::BianchiViolation`].
    Strict,
    /// Replace by the orthogonal projection onto Bianchi tensors.
    Project,
}

#[derive(Debug, Clone)]
pub struct LoadedTensor {
    pub tensor: CurvatureTensor,
    /// Bianchi residual of the file contents, before any projection.
    pub residual: f64,
    pub tolerance: f64,
    pub projected: bool,
}

impl LoadedTensor {
    pub fn violates_bianchi(&self) -> bool {
        self.residual > self.tolerance
    }
}

fn parse_error(path: &Path, message: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {message}", path.display()))
}

fn read_file(path: &Path) -> Result<FormFile> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

fn entry_index(path: &Path, ctx: AlgebraContext, pos: usize, field: &str, raw: &[usize], degree: usize) -> Result<u32> {
    let fail = |what: &str| parse_error(path, format!("entry {pos}, field `{field}` = {raw:?}: {what}"));
    if raw.len() != degree {
        return Err(fail(&format!("expected {degree} indices")));
    }
    let index = MultiIndex::new(raw).map_err(|e| fail(&e.to_string()))?;
    if raw.iter().any(|&i| i > ctx.dim()) {
        return Err(fail(&format!("index exceeds n = {}", ctx.dim())));
    }
    Ok(index.mask())
}

fn build(path: &Path, file: &FormFile, mirror: bool) -> Result<DoubleForm> {
    let ctx = AlgebraContext::new(file.n).map_err(|e| parse_error(path, format!("field `n`: {e}")))?;
    if file.p > file.n || file.q > file.n {
        return Err(parse_error(path, format!("degrees ({}, {}) exceed n = {}", file.p, file.q, file.n)));
    }
    let mut coeffs = nalgebra::DMatrix::<f64>::zeros(ctx.basis_len(file.p), ctx.basis_len(file.q));
    let mut seen = nalgebra::DMatrix::<bool>::from_element(coeffs.nrows(), coeffs.ncols(), false);
    for (pos, entry) in file.entries.iter().enumerate() {
        let i = entry_index(path, ctx, pos, "ij", &entry.ij, file.p)?;
        let j = entry_index(path, ctx, pos, "kl", &entry.kl, file.q)?;
        if !entry.value.is_finite() {
            return Err(parse_error(path, format!("entry {pos}, field `value`: not finite")));
        }
        let (r, c) = (ctx.rank_of_mask(i), ctx.rank_of_mask(j));
        let mut targets = vec![(r, c)];
        if mirror && r != c {
            targets.push((c, r));
        }
        for (r, c) in targets {
            if seen[(r, c)] && coeffs[(r, c)] != entry.value {
                return Err(parse_error(
                    path,
                    format!("entry {pos}: conflicts with an earlier value {} for the same pair", coeffs[(r, c)]),
                ));
            }
            seen[(r, c)] = true;
            coeffs[(r, c)] = entry.value;
        }
    }
    DoubleForm::from_matrix(ctx, file.p, file.q, coeffs)
}

/// Reads any double form.
pub fn load_form(path: impl AsRef<Path>) -> Result<DoubleForm> {
    let path = path.as_ref();
    build(path, &read_file(path)?, false)
}

/// Reads a curvature tensor file, mirroring entries and applying `policy`
/// to Bianchi violations beyond `1e−12·‖ω‖`.
pub fn load_tensor(path: impl AsRef<Path>, policy: BianchiPolicy) -> Result<LoadedTensor> {
    let path = path.as_ref();
    let file = read_file(path)?;
    if (file.p, file.q) != (2, 2) {
        return Err(parse_error(path, format!("curvature tensors have degrees (2, 2), got ({}, {})", file.p, file.q)));
    }
    let form = build(path, &file, true)?;
    let residual = bianchi_residual(&form)?;
    let tolerance = CurvatureTensor::BIANCHI_TOLERANCE * form.norm();
    if residual <= tolerance {
        let tensor = CurvatureTensor::new(form)?;
        return Ok(LoadedTensor { tensor, residual, tolerance, projected: false });
    }
    match policy {
        BianchiPolicy::Strict => Err(Error::BianchiViolation { residual, tolerance }),
        BianchiPolicy::Project => {
            Ok(LoadedTensor { tensor: CurvatureTensor::projected(&form)?, residual, tolerance, projected: true })
        }
        BianchiPolicy::Warn => Ok(LoadedTensor {
            tensor: CurvatureTensor::symmetrized_unchecked(&form),
            residual,
            tolerance,
            projected: false,
        }),
    }
}

/// File contents for `form`: every nonzero entry, in basis order.
pub fn form_file(form: &DoubleForm) -> FormFile {
    let ctx = form.ctx();
    let (p, q) = form.degrees();
    let mut entries = Vec::new();
    for (r, &i) in ctx.basis(p).iter().enumerate() {
        for (c, &j) in ctx.basis(q).iter().enumerate() {
            let value = form.coeffs()[(r, c)];
            if value != 0.0 {
                entries.push(FormEntry {
                    ij: MultiIndex::from_mask(i).indices(),
                    kl: MultiIndex::from_mask(j).indices(),
                    value,
                });
            }
        }
    }
    FormFile { n: ctx.dim(), p, q, entries }
}

pub fn save_form(form: &DoubleForm, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&form_file(form)).expect("plain data serializes");
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toolkit::random::{random_bianchi_22, random_form};

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = AlgebraContext::new(5).unwrap();
        let w = random_bianchi_22(3, 4, ctx);
        let path = dir.path().join("w.json");
        save_form(w.form(), &path).unwrap();
        let loaded = load_tensor(&path, BianchiPolicy::Strict).unwrap();
        assert_eq!(loaded.tensor, w);
        let f = random_form(4, ctx, 1, 3);
        save_form(&f, &path).unwrap();
        assert_eq!(load_form(&path).unwrap(), f);
    }

    #[test]
    fn single_entry_is_mirrored() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "a.json", r#"{"n": 4, "entries": [{"ij": [1, 2], "kl": [1, 2], "value": 1}]}"#);
        let loaded = load_tensor(&path, BianchiPolicy::Strict).unwrap();
        let m = loaded.tensor.form().coeffs();
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m.iter().filter(|&&x| x != 0.0).count(), 1);

        let path = write(&dir, "b.json", r#"{"n": 4, "entries": [{"ij": [1, 2], "kl": [1, 3], "value": 2}]}"#);
        let m = load_tensor(&path, BianchiPolicy::Strict).unwrap().tensor.into_form().into_coeffs();
        assert_eq!((m[(0, 1)], m[(1, 0)]), (2.0, 2.0));
    }

    #[test]
    fn bianchi_policies() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "w.json", r#"{"n": 4, "entries": [{"ij": [1, 2], "kl": [3, 4], "value": 1}]}"#);
        assert!(matches!(load_tensor(&path, BianchiPolicy::Strict), Err(Error::BianchiViolation { .. })));
        let warned = load_tensor(&path, BianchiPolicy::Warn).unwrap();
        assert!(warned.violates_bianchi() && !warned.projected);
        assert_eq!(warned.residual, 1.0);
        let projected = load_tensor(&path, BianchiPolicy::Project).unwrap();
        assert!(projected.projected);
        assert!(bianchi_residual(projected.tensor.form()).unwrap() < 1e-15);
    }

    #[test]
    fn malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            (r#"{"n": 4, "entries": [ {"ij": [1, 2], "kl": [1, 2], "value": }]}"#, "line 1"),
            ("{\"n\": 4,\n \"entries\": [\n {\"ij\": [1, 2], \"kl\": [1], \"value\": 1}]}", "entry 0, field `kl`"),
            (r#"{"n": 4, "entries": [{"ij": [2, 1], "kl": [1, 2], "value": 1}]}"#, "field `ij`"),
            (r#"{"n": 4, "entries": [{"ij": [1, 5], "kl": [1, 2], "value": 1}]}"#, "exceeds n = 4"),
            (r#"{"n": 4, "entries": [{"ij": [1, 2], "kl": [1, 3], "value": 1}, {"ij": [1, 3], "kl": [1, 2], "value": 2}]}"#, "entry 1: conflicts"),
            (r#"{"n": 40, "entries": []}"#, "field `n`"),
            (r#"{"n": 4, "entries": [], "extra": 1}"#, "unknown field"),
            ("{\"n\": 4,\n\"entries\": [{\"ij\": [1, 2], \"kl\": [1, 2], \"value\": \"x\"}]}", "line 2"),
        ];
        for (i, (text, needle)) in cases.iter().enumerate() {
            let path = write(&dir, &format!("{i}.json"), text);
            match load_tensor(&path, BianchiPolicy::Warn) {
                Err(Error::Parse(msg)) => assert!(msg.contains(needle), "case {i}: {msg}"),
                other => panic!("case {i}: {other:?}"),
            }
        }
        assert!(matches!(load_tensor(dir.path().join("missing.json"), BianchiPolicy::Warn), Err(Error::Io(_))));
    }
}
