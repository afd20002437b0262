//! Scalar fields over R^n used for exponents and weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Clone, Debug)]
pub enum FieldKind {
    Constant(f64),
    Expression(Expr),
    Grid(GridField),
}

/// Tabulated field: multilinear interpolation on a tensor grid, or linear
/// interpolation in `|x|` for radial tables.
#[derive(Clone, Debug)]
pub struct GridField {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    pub radial: bool,
}

impl GridField {
    fn contains(&self, x: &[f64]) -> bool {
        if self.radial {
            let r = norm(x);
            return r >= self.lower[0] && r <= self.upper[0];
        }
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        if self.radial {
            return interp1(self.lower[0], self.upper[0], &self.values, norm(x));
        }
        let d = self.shape.len();
        let mut base = 0usize;
        let mut stride = 1usize;
        let mut idx = vec![0usize; d];
        let mut frac = vec![0.0; d];
        let mut strides = vec![0usize; d];
        for k in (0..d).rev() {
            let m = self.shape[k];
            let h = (self.upper[k] - self.lower[k]) / (m - 1) as f64;
            let s = ((x[k] - self.lower[k]) / h).clamp(0.0, (m - 1) as f64);
            let i = (s.floor() as usize).min(m - 2);
            idx[k] = i;
            frac[k] = s - i as f64;
            strides[k] = stride;
            base += i * stride;
            stride *= m;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut off = base;
            for k in 0..d {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    off += strides[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w != 0.0 {
                acc += w * self.values[off];
            }
        }
        acc
    }
}

fn interp1(lo: f64, hi: f64, v: &[f64], r: f64) -> f64 {
    let m = v.len();
    let h = (hi - lo) / (m - 1) as f64;
    let s = ((r - lo) / h).clamp(0.0, (m - 1) as f64);
    let i = (s.floor() as usize).min(m - 2);
    let f = s - i as f64;
    v[i] * (1.0 - f) + v[i + 1] * f
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A named scalar field with declared range and optional limit at infinity.
#[derive(Clone, Debug)]
pub struct SpatialField {
    pub name: String,
    pub kind: FieldKind,
    pub lo: f64,
    pub hi: f64,
    /// Declared value of `lim_{|x|->inf}`, used to bypass the sphere-sup approximation.
    pub limit: Option<f64>,
}

impl SpatialField {
    pub fn constant(name: &str, v: f64) -> SpatialField {
        SpatialField {
            name: name.into(),
            kind: FieldKind::Constant(v),
            lo: v,
            hi: v,
            limit: Some(v),
        }
    }

    /// Parses an expression field in dimension `n`; range is validated on probe points.
    pub fn expression(name: &str, src: &str, n: usize, lo: f64, hi: f64, limit: Option<f64>) -> Result<SpatialField> {
        let e = Expr::parse(src, n, false)?;
        let f = SpatialField {
            name: name.into(),
            kind: FieldKind::Expression(e),
            lo,
            hi,
            limit,
        };
        f.validate(n)?;
        Ok(f)
    }

    pub fn grid(name: &str, g: GridField, lo: f64, hi: f64, limit: Option<f64>) -> Result<SpatialField> {
        let f = SpatialField {
            name: name.into(),
            kind: FieldKind::Grid(g),
            lo,
            hi,
            limit,
        };
        f.validate(f.grid_dim().unwrap_or(1))?;
        Ok(f)
    }

    fn grid_dim(&self) -> Option<usize> {
        match &self.kind {
            FieldKind::Grid(g) if !g.radial => Some(g.shape.len()),
            _ => None,
        }
    }

    /// Value at `x` without domain or range checks.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            FieldKind::Constant(v) => *v,
            FieldKind::Expression(e) => e.eval(x, 0.0),
            FieldKind::Grid(g) => g.eval(x),
        }
    }

    /// Checked evaluation: domain error outside a grid, range error outside `[lo, hi]`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if let FieldKind::Grid(g) = &self.kind {
            if !g.contains(x) {
                return Err(Error::Domain {
                    field: self.name.clone(),
                    point: x.to_vec(),
                });
            }
        }
        let v = self.value(x);
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        if !(v >= self.lo - slack && v <= self.hi + slack) {
            return Err(Error::Range {
                field: self.name.clone(),
                value: v,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(v)
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            FieldKind::Constant(_) => true,
            FieldKind::Expression(e) => e.is_constant_in_x(),
            FieldKind::Grid(_) => false,
        }
    }

    pub fn is_radial(&self) -> bool {
        match &self.kind {
            FieldKind::Constant(_) => true,
            FieldKind::Expression(e) => e.is_radial(),
            FieldKind::Grid(g) => g.radial,
        }
    }

    /// Bounded region where the field is defined, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.kind {
            FieldKind::Grid(g) if g.radial => Some(g.upper[0]),
            FieldKind::Grid(g) => Some(
                g.lower
                    .iter()
                    .zip(&g.upper)
                    .map(|(a, b)| a.abs().max(b.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.lo <= self.hi) {
            return Err(Error::Argument(format!("field `{}` has empty range [{}, {}]", self.name, self.lo, self.hi)));
        }
        match &self.kind {
            FieldKind::Constant(v) => self.eval(&vec![0.0; n]).map(|_| ()).map_err(|_| Error::Range {
                    field: self.name.clone(),
                    value: *v,
                    lo: self.lo,
                    hi: self.hi,
                }),
            FieldKind::Grid(g) => {
                let expect: usize = if g.radial { g.values.len() } else { g.shape.iter().product() };
                if g.values.len() != expect || g.values.len() < 2 || g.shape.iter().any(|&m| m < 2) {
                    return Err(Error::Argument(format!("grid field `{}` has inconsistent shape", self.name)));
                }
                if let Some(&v) = g.values.iter().find(|v| !(**v >= self.lo && **v <= self.hi)) {
                    return Err(Error::Range {
                        field: self.name.clone(),
                        value: v,
                        lo: self.lo,
                        hi: self.hi,
                    });
                }
                Ok(())
            }
            FieldKind::Expression(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                for k in 0..512 {
                    let scale = [1.0, 8.0, 1e3, 1e6][k % 4];
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
                    self.eval(&x)?;
                }
                Ok(())
            }
        }
    }
}

/// Declarative form of a field inside a function document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub name: String,
    pub kind: FieldKindTag,
    pub payload: Payload,
    pub range: [f64; 2],
    #[serde(default)]
    pub limit: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FieldKindTag {
    Constant,
    Expression,
    Grid,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Number(f64),
    Text(String),
    Grid(GridDoc),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub radial: bool,
}

impl FieldDoc {
    pub fn build(&self, n: usize) -> Result<SpatialField> {
        let [lo, hi] = self.range;
        let bad = |msg: &str| Error::Config {
            path: format!("fields.{}.payload", self.name),
            msg: msg.into(),
        };
        match (self.kind, &self.payload) {
            (FieldKindTag::Constant, Payload::Number(v)) => {
                let mut f = SpatialField::constant(&self.name, *v);
                f.lo = lo;
                f.hi = hi;
                f.validate(n)?;
                Ok(f)
            }
            (FieldKindTag::Expression, Payload::Text(s)) => SpatialField::expression(&self.name, s, n, lo, hi, self.limit),
            (FieldKindTag::Grid, Payload::Grid(g)) => {
                if g.radial {
                    if g.lower.len() != 1 || g.upper.len() != 1 {
                        return Err(bad("radial grid needs one-element lower/upper radius bounds"));
                    }
                } else if g.lower.len() != n || g.upper.len() != n || g.shape.len() != n {
                    return Err(bad("grid lower/upper/shape must have one entry per dimension"));
                }
                let gf = GridField {
                    lower: g.lower.clone(),
                    upper: g.upper.clone(),
                    shape: if g.radial { vec![g.values.len()] } else { g.shape.clone() },
                    values: g.values.clone(),
                    radial: g.radial,
                };
                SpatialField::grid(&self.name, gf, lo, hi, self.limit)
            }
            (FieldKindTag::Constant, _) => Err(bad("expected a number")),
            (FieldKindTag::Expression, _) => Err(bad("expected an expression string")),
            (FieldKindTag::Grid, _) => Err(bad("expected a grid object {lower, upper, shape, values}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_field_in_range() {
        let f = SpatialField::expression("p", "2 + abs(x)", 2, 2.0, 1e9, None).unwrap();
        assert_eq!(f.eval(&[3.0, 4.0]).unwrap(), 7.0);
        assert!(f.is_radial());
    }

    #[test]
    fn expression_field_out_of_declared_range_is_rejected() {
        let e = SpatialField::expression("p", "2 + x1", 2, 1.0, 3.0, None).unwrap_err();
        assert!(matches!(e, Error::Range { .. }));
    }

    #[test]
    fn grid_field_interpolates_and_reports_domain() {
        let g = GridField {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            shape: vec![2, 2],
            values: vec![0.0, 1.0, 2.0, 3.0],
            radial: false,
        };
        let f = SpatialField::grid("a", g, 0.0, 3.0, None).unwrap();
        assert!((f.eval(&[0.5, 0.5]).unwrap() - 1.5).abs() < 1e-15);
        assert!((f.eval(&[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(f.eval(&[2.0, 0.0]), Err(Error::Domain { .. })));
    }

    #[test]
    fn radial_grid_field() {
        let g = GridField {
            lower: vec![0.0],
            upper: vec![2.0],
            shape: vec![3],
            values: vec![1.0, 0.5, 0.0],
            radial: true,
        };
        let f = SpatialField::grid("a", g, 0.0, 1.0, Some(0.0)).unwrap();
        assert!((f.eval(&[0.3, 0.4]).unwrap() - 0.75).abs() < 1e-15);
    }
}
