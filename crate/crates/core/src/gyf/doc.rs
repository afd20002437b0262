//! Declarative function documents in JSON or TOML.

use std::path::Path;

use serde::Deserialize;

use super::Gyf;
use crate::error::{Error, Result};
use crate::field::{FieldDoc, SpatialField};

/// `{ family, n, params: {...}, fields: [...] }`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GyfDoc {
    pub family: String,
    pub n: usize,
    #[serde(default)]
    pub params: ParamsDoc,
    #[serde(default)]
    pub fields: Vec<FieldDoc>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub c: Option<f64>,
    pub expr: Option<String>,
    /// `"sum"` (default) or `"max"` for double-phase.
    pub combine: Option<String>,
    pub t: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocFormat {
    Json,
    Toml,
}

impl DocFormat {
    pub fn from_path(path: &Path) -> DocFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => DocFormat::Toml,
            _ => DocFormat::Json,
        }
    }
}

fn cfg(path: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        msg: msg.into(),
    }
}

/// Deserializes `T` from a JSON or TOML string, naming the offending key on failure.
pub(crate) fn from_str_with_path<T: for<'de> Deserialize<'de>>(s: &str, fmt: DocFormat) -> Result<T> {
    match fmt {
        DocFormat::Json => {
            let mut de = serde_json::Deserializer::from_str(s);
            serde_path_to_error::deserialize(&mut de).map_err(|e| cfg(&e.path().to_string(), e.inner().to_string()))
        }
        DocFormat::Toml => {
            let v: serde_json::Value = toml::from_str(s).map_err(|e| cfg(".", e.to_string()))?;
            serde_path_to_error::deserialize(v).map_err(|e| cfg(&e.path().to_string(), e.inner().to_string()))
        }
    }
}

pub fn parse_gyf_str(s: &str, fmt: DocFormat) -> Result<Gyf> {
    let doc: GyfDoc = from_str_with_path(s, fmt)?;
    doc.build()
}

pub fn load_gyf(path: &Path) -> Result<Gyf> {
    let s = std::fs::read_to_string(path)?;
    parse_gyf_str(&s, DocFormat::from_path(path))
}

const EXPONENTS: [&str; 2] = ["p", "q"];

impl GyfDoc {
    fn field(&self, name: &str) -> Result<SpatialField> {
        let (i, fd) = self
            .fields
            .iter()
            .enumerate()
            .find(|(_, f)| f.name == name)
            .ok_or_else(|| cfg("fields", format!("family `{}` needs a field named `{name}`", self.family)))?;
        let [lo, hi] = fd.range;
        if EXPONENTS.contains(&name) && lo < 1.0 {
            return Err(cfg(&format!("fields[{i}].range"), format!("exponent below 1: range [{lo}, {hi}]")));
        }
        if name == "a" && lo < 0.0 {
            return Err(cfg(&format!("fields[{i}].range"), format!("weight must be nonnegative: range [{lo}, {hi}]")));
        }
        fd.build(self.n)
    }

    fn param(&self, v: Option<f64>, name: &str) -> Result<f64> {
        let v = v.ok_or_else(|| cfg(&format!("params.{name}"), format!("family `{}` needs `{name}`", self.family)))?;
        if EXPONENTS.contains(&name) && v < 1.0 {
            return Err(cfg(&format!("params.{name}"), format!("exponent below 1: {v}")));
        }
        Ok(v)
    }

    pub fn build(&self) -> Result<Gyf> {
        if self.n == 0 {
            return Err(cfg("n", "dimension must be positive"));
        }
        let n = self.n;
        let p = &self.params;
        match self.family.as_str() {
            "power" => {
                let c = p.c.unwrap_or(1.0);
                if !(c > 0.0) {
                    return Err(cfg("params.c", "coefficient must be positive"));
                }
                Ok(Gyf::scaled_power(n, c, self.param(p.p, "p")?))
            }
            "orlicz" => {
                let e = p.expr.as_deref().ok_or_else(|| cfg("params.expr", "family `orlicz` needs `expr`"))?;
                Gyf::orlicz(n, e).map_err(|e| cfg("params.expr", e.to_string()))
            }
            "variable-exponent" => Ok(Gyf::variable_exponent(n, self.field("p")?)),
            "double-phase" => {
                let (pp, q) = (self.param(p.p, "p")?, self.param(p.q, "q")?);
                if q < pp {
                    return Err(cfg("params.q", "double-phase needs q >= p"));
                }
                let a = self.field("a")?;
                match p.combine.as_deref().unwrap_or("sum") {
                    "sum" => Ok(Gyf::double_phase(n, pp, q, a)),
                    "max" => Ok(Gyf::double_phase_max(n, pp, q, a)),
                    other => Err(cfg("params.combine", format!("expected `sum` or `max`, got `{other}`"))),
                }
            }
            "variable-double-phase" => Ok(Gyf::variable_double_phase(n, self.field("p")?, self.field("q")?, self.field("a")?)),
            "tabulated" => {
                let t = p.t.as_ref().ok_or_else(|| cfg("params.t", "family `tabulated` needs `t`"))?;
                let v = p.values.as_ref().ok_or_else(|| cfg("params.values", "family `tabulated` needs `values`"))?;
                Gyf::tabulated(n, t, v).map_err(|e| cfg("params.values", e.to_string()))
            }
            other => Err(cfg(
                "family",
                format!("unknown family `{other}`; expected power, orlicz, variable-exponent, double-phase, variable-double-phase or tabulated"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyf::YoungFn;

    #[test]
    fn minimal_power_doc() {
        let g = parse_gyf_str(r#"{"family": "power", "n": 2, "params": {"p": 2}}"#, DocFormat::Json).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0], 3.0).value(), 9.0);
    }

    #[test]
    fn toml_double_phase_with_grid_weight() {
        let s = r#"
family = "double-phase"
n = 1
params = { p = 2.0, q = 3.0 }

[[fields]]
name = "a"
kind = "grid"
range = [0.0, 1.0]
payload = { lower = [0.0], upper = [1.0], shape = [3], values = [0.0, 0.5, 1.0] }
"#;
        let g = parse_gyf_str(s, DocFormat::Toml).unwrap();
        assert!((g.eval(&[0.5], 2.0).value() - (4.0 + 0.5 * 8.0)).abs() < 1e-12);
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        let s = r#"{"family": "variable-exponent", "n": 1,
            "fields": [{"name": "p", "kind": "expression", "payload": "1.25 + 0.75*sin(x1)", "range": [0.5, 2]}]}"#;
        match parse_gyf_str(s, DocFormat::Json) {
            Err(Error::Config { path, msg }) => {
                assert!(path.contains("range"), "{path}");
                assert!(msg.contains("exponent below 1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_names_its_path() {
        let s = r#"{"family": "power", "n": 2, "params": {"p": 2, "exponent": 3}}"#;
        match parse_gyf_str(s, DocFormat::Json) {
            Err(Error::Config { path, msg }) => {
                assert!(path.starts_with("params"), "{path}");
                assert!(msg.contains("exponent"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let s = r#"{"family": "power", "n": "two", "params": {"p": 2}}"#;
        match parse_gyf_str(s, DocFormat::Json) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "n"),
            other => panic!("{other:?}"),
        }
    }
}
