//! Generalized Young functions `phi(x, t)`.

mod doc;
pub mod ops;

use std::sync::Arc;

pub(crate) use doc::from_str_with_path;
pub use doc::{load_gyf, parse_gyf_str, DocFormat, GyfDoc, ParamsDoc};
pub use ops::{
    check_delta2, estimate_equivalence, eval_phi, left_inverse, phi_infinity, young_conjugate, Delta2Report, EquivMode,
    Equivalence, InfinitySchedule,
};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ext::ExtReal;
use crate::field::SpatialField;
use crate::tab::MonotoneTab;

/// An evaluable generalized Young function.
///
/// Implementations are immutable after construction and safe to share
/// between threads.
pub trait YoungFn: Send + Sync {
    fn dim(&self) -> usize;

    /// `phi(x, t)` for `t >= 0`; `+inf` is a legal value.
    fn eval(&self, x: &[f64], t: f64) -> ExtReal;

    /// `ln phi(x, e^u)`. Families override this to stay accurate where `e^u`
    /// under- or overflows.
    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        self.eval(x, u.exp()).ln()
    }

    /// Left-continuous inverse `inf{tau >= 0 : phi(x, tau) >= t}`.
    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        ops::bisect_inverse(self, x, t)
    }

    /// Exact Young conjugate when the family has one.
    fn conjugate_closed_form(&self, _x: &[f64], _t: f64) -> Option<ExtReal> {
        None
    }

    fn is_x_independent(&self) -> bool {
        false
    }

    /// True when `phi(x, t)` depends on `x` only through `|x|`.
    fn is_radial(&self) -> bool {
        self.is_x_independent()
    }

    /// The limit function `phi_inf` when it is known in closed form.
    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        None
    }

    /// Domain and range validation of the spatial fields at `x`.
    fn check_point(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }

    fn label(&self) -> String;
}

impl<T: YoungFn + ?Sized> YoungFn for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        (**self).eval(x, t)
    }
    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        (**self).ln_eval_exp(x, u)
    }
    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        (**self).inverse(x, t)
    }
    fn conjugate_closed_form(&self, x: &[f64], t: f64) -> Option<ExtReal> {
        (**self).conjugate_closed_form(x, t)
    }
    fn is_x_independent(&self) -> bool {
        (**self).is_x_independent()
    }
    fn is_radial(&self) -> bool {
        (**self).is_radial()
    }
    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        (**self).limit()
    }
    fn check_point(&self, x: &[f64]) -> Result<()> {
        (**self).check_point(x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Sum,
    Max,
}

#[derive(Clone, Debug)]
pub enum Family {
    /// `c t^p`.
    Power { c: f64, p: f64 },
    /// x-independent closed form `A(t)` written in the expression grammar with variable `t`.
    Orlicz { expr: Expr, src: String },
    /// `t^{p(x)}`.
    VariableExponent { p: SpatialField },
    /// `t^p + a(x) t^q` or `max(t^p, a(x) t^q)`.
    DoublePhase {
        p: f64,
        q: f64,
        a: SpatialField,
        combine: Combine,
    },
    /// `t^{p(x)} + a(x) t^{q(x)}`.
    VariableDoublePhase {
        p: SpatialField,
        q: SpatialField,
        a: SpatialField,
    },
    /// x-independent tabulation.
    Tabulated(MonotoneTab),
}

/// A built-in generalized Young function.
#[derive(Clone, Debug)]
pub struct Gyf {
    pub n: usize,
    pub family: Family,
}

/// `ln(e^x + e^y)` without overflow.
#[inline]
pub(crate) fn ln_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// Conjugate of `c t^p` at `t`.
pub fn power_conjugate(c: f64, p: f64, t: f64) -> ExtReal {
    if t <= 0.0 {
        return ExtReal::ZERO;
    }
    if p == 1.0 {
        return if t <= c { ExtReal::ZERO } else { ExtReal::INFINITY };
    }
    ExtReal::new((p - 1.0) / p * t * (t / (c * p)).powf(1.0 / (p - 1.0)))
}

impl Gyf {
    pub fn power(n: usize, p: f64) -> Gyf {
        Gyf {
            n,
            family: Family::Power { c: 1.0, p },
        }
    }

    pub fn scaled_power(n: usize, c: f64, p: f64) -> Gyf {
        Gyf {
            n,
            family: Family::Power { c, p },
        }
    }

    pub fn double_phase(n: usize, p: f64, q: f64, a: SpatialField) -> Gyf {
        Gyf {
            n,
            family: Family::DoublePhase {
                p,
                q,
                a,
                combine: Combine::Sum,
            },
        }
    }

    pub fn double_phase_max(n: usize, p: f64, q: f64, a: SpatialField) -> Gyf {
        Gyf {
            n,
            family: Family::DoublePhase {
                p,
                q,
                a,
                combine: Combine::Max,
            },
        }
    }

    pub fn variable_exponent(n: usize, p: SpatialField) -> Gyf {
        Gyf {
            n,
            family: Family::VariableExponent { p },
        }
    }

    pub fn variable_double_phase(n: usize, p: SpatialField, q: SpatialField, a: SpatialField) -> Gyf {
        Gyf {
            n,
            family: Family::VariableDoublePhase { p, q, a },
        }
    }

    /// Closed-form x-independent Young function from an expression in `t`.
    pub fn orlicz(n: usize, src: &str) -> Result<Gyf> {
        let expr = Expr::parse(src, n, true)?;
        if !expr.is_constant_in_x() {
            return Err(Error::Argument("closed-form Young function must not depend on x".into()));
        }
        let g = Gyf {
            n,
            family: Family::Orlicz { expr, src: src.into() },
        };
        g.validate_young()?;
        Ok(g)
    }

    /// Tabulated x-independent Young function.
    ///
    /// The table interpolates as piecewise powers, which is convex exactly when
    /// the log-log slopes are at least 1 and nondecreasing; other data is refused.
    pub fn tabulated(n: usize, t: &[f64], v: &[f64]) -> Result<Gyf> {
        let tab = MonotoneTab::from_samples(t, v, crate::tab::TailTag::Diverges)?;
        let slopes: Vec<f64> = t.windows(2).zip(v.windows(2)).map(|(t, v)| (v[1] / v[0]).ln() / (t[1] / t[0]).ln()).collect();
        if slopes.iter().any(|s| *s < 1.0 - 1e-12) || slopes.windows(2).any(|w| w[1] < w[0] - 1e-9) {
            return Err(Error::Argument(
                "tabulated Young function needs nondecreasing log-log slopes of at least 1".into(),
            ));
        }
        Ok(Gyf {
            n,
            family: Family::Tabulated(tab),
        })
    }

    fn fields(&self) -> Vec<&SpatialField> {
        match &self.family {
            Family::VariableExponent { p } => vec![p],
            Family::DoublePhase { a, .. } => vec![a],
            Family::VariableDoublePhase { p, q, a } => vec![p, q, a],
            _ => vec![],
        }
    }

    fn validate_young(&self) -> Result<()> {
        let x = vec![0.0; self.n];
        let z = match &self.family {
            Family::Orlicz { expr, .. } => expr.eval(&x, 0.0),
            _ => 0.0,
        };
        if z != 0.0 {
            return Err(Error::Argument(format!("Young function must vanish at 0, got {z}")));
        }
        let ts: Vec<f64> = crate::sample::log_space(1e-6, 1e6, 121);
        let vs: Vec<f64> = ts.iter().map(|&t| self.eval(&x, t).value()).collect();
        if vs.iter().all(|v| *v == 0.0) {
            return Err(Error::Argument("Young function must not be constant".into()));
        }
        for i in 1..ts.len() {
            if vs[i] < vs[i - 1] {
                return Err(Error::Argument(format!("Young function decreases near t = {}", ts[i])));
            }
            if i + 1 < ts.len() && vs[i + 1].is_finite() {
                let (a, b, c) = (ts[i - 1], ts[i], ts[i + 1]);
                let lam = (c - b) / (c - a);
                let chord = lam * vs[i - 1] + (1.0 - lam) * vs[i + 1];
                if vs[i] > chord * (1.0 + 1e-9) + 1e-300 {
                    return Err(Error::Argument(format!("Young function is not convex near t = {b}")));
                }
            }
        }
        Ok(())
    }
}

impl YoungFn for Gyf {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        if t == 0.0 {
            return ExtReal::ZERO;
        }
        let v = match &self.family {
            Family::Power { c, p } => c * t.powf(*p),
            Family::Orlicz { expr, .. } => expr.eval(x, t),
            Family::VariableExponent { p } => t.powf(p.value(x)),
            Family::DoublePhase { p, q, a, combine } => {
                let a = a.value(x);
                let (u, v) = (t.powf(*p), if a == 0.0 { 0.0 } else { a * t.powf(*q) });
                match combine {
                    Combine::Sum => u + v,
                    Combine::Max => u.max(v),
                }
            }
            Family::VariableDoublePhase { p, q, a } => {
                let a = a.value(x);
                t.powf(p.value(x)) + if a == 0.0 { 0.0 } else { a * t.powf(q.value(x)) }
            }
            Family::Tabulated(tab) => return tab.eval(t),
        };
        ExtReal::new(v)
    }

    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        match &self.family {
            Family::Power { c, p } => c.ln() + p * u,
            Family::Orlicz { expr, .. } => expr.eval(x, u.exp()).ln(),
            Family::VariableExponent { p } => p.value(x) * u,
            Family::DoublePhase { p, q, a, combine } => {
                let la = a.value(x).ln();
                match combine {
                    Combine::Sum => ln_add_exp(p * u, la + q * u),
                    Combine::Max => (p * u).max(la + q * u),
                }
            }
            Family::VariableDoublePhase { p, q, a } => ln_add_exp(p.value(x) * u, a.value(x).ln() + q.value(x) * u),
            Family::Tabulated(tab) => tab.ln_eval_extrapolated(u),
        }
    }

    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        if t <= 0.0 {
            return ExtReal::ZERO;
        }
        match &self.family {
            Family::Power { c, p } => ExtReal::new((t / c).powf(1.0 / p)),
            Family::VariableExponent { p } => ExtReal::new(t.powf(1.0 / p.value(x))),
            Family::DoublePhase {
                p,
                q,
                a,
                combine: Combine::Max,
            } => {
                let a = a.value(x);
                let s = t.powf(1.0 / p);
                ExtReal::new(if a > 0.0 { s.min((t / a).powf(1.0 / q)) } else { s })
            }
            Family::Tabulated(tab) => tab.inverse(t),
            _ => ops::bisect_inverse(self, x, t),
        }
    }

    fn conjugate_closed_form(&self, x: &[f64], t: f64) -> Option<ExtReal> {
        match &self.family {
            Family::Power { c, p } => Some(power_conjugate(*c, *p, t)),
            Family::VariableExponent { p } => Some(power_conjugate(1.0, p.value(x), t)),
            _ => None,
        }
    }

    fn is_x_independent(&self) -> bool {
        self.fields().iter().all(|f| f.is_constant())
    }

    fn is_radial(&self) -> bool {
        self.fields().iter().all(|f| f.is_radial())
    }

    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        let n = self.n;
        let g = match &self.family {
            Family::Power { .. } | Family::Orlicz { .. } | Family::Tabulated(_) => self.clone(),
            Family::VariableExponent { p } => Gyf::power(n, p.limit?),
            Family::DoublePhase { p, q, a, combine } => {
                let a = a.limit?;
                if a == 0.0 {
                    Gyf::power(n, *p)
                } else {
                    Gyf {
                        n,
                        family: Family::DoublePhase {
                            p: *p,
                            q: *q,
                            a: SpatialField::constant("a", a),
                            combine: *combine,
                        },
                    }
                }
            }
            Family::VariableDoublePhase { p, q, a } => {
                let (p, q, a) = (p.limit?, q.limit?, a.limit?);
                if a == 0.0 {
                    Gyf::power(n, p)
                } else {
                    Gyf::variable_double_phase(
                        n,
                        SpatialField::constant("p", p),
                        SpatialField::constant("q", q),
                        SpatialField::constant("a", a),
                    )
                }
            }
        };
        Some(Arc::new(g))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Argument(format!("point has dimension {}, expected {}", x.len(), self.n)));
        }
        for f in self.fields() {
            f.eval(x)?;
        }
        Ok(())
    }

    fn label(&self) -> String {
        match &self.family {
            Family::Power { c, p } if *c == 1.0 => format!("power(p={p})"),
            Family::Power { c, p } => format!("power(c={c}, p={p})"),
            Family::Orlicz { src, .. } => format!("orlicz({src})"),
            Family::VariableExponent { .. } => "variable-exponent".into(),
            Family::DoublePhase {
                p,
                q,
                combine: Combine::Sum,
                ..
            } => format!("double-phase(p={p}, q={q})"),
            Family::DoublePhase { p, q, .. } => format!("double-phase-max(p={p}, q={q})"),
            Family::VariableDoublePhase { .. } => "variable-double-phase".into(),
            Family::Tabulated(_) => "tabulated".into(),
        }
    }
}

/// The Young conjugate as a function in its own right.
pub struct Conjugate {
    pub base: Arc<dyn YoungFn>,
}

impl YoungFn for Conjugate {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        young_conjugate(self.base.as_ref(), x, t)
    }
    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        ops::secant_inverse(self, x, t)
    }
    fn conjugate_closed_form(&self, x: &[f64], t: f64) -> Option<ExtReal> {
        // Young functions are convex and lower semicontinuous, so they are their own biconjugates.
        Some(self.base.eval(x, t))
    }
    fn is_x_independent(&self) -> bool {
        self.base.is_x_independent()
    }
    fn is_radial(&self) -> bool {
        self.base.is_radial()
    }
    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        Some(Arc::new(Conjugate { base: self.base.limit()? }))
    }
    fn check_point(&self, x: &[f64]) -> Result<()> {
        self.base.check_point(x)
    }
    fn label(&self) -> String {
        format!("conjugate[{}]", self.base.label())
    }
}

/// `phi_k(x, t) = phi(x, t / k)`.
pub struct Dilated {
    pub base: Arc<dyn YoungFn>,
    pub k: f64,
}

impl YoungFn for Dilated {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        self.base.eval(x, t / self.k)
    }
    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        self.base.ln_eval_exp(x, u - self.k.ln())
    }
    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        self.base.inverse(x, t).scale(self.k)
    }
    fn conjugate_closed_form(&self, x: &[f64], t: f64) -> Option<ExtReal> {
        Some(young_conjugate(self.base.as_ref(), x, self.k * t))
    }
    fn is_x_independent(&self) -> bool {
        self.base.is_x_independent()
    }
    fn is_radial(&self) -> bool {
        self.base.is_radial()
    }
    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        Some(Arc::new(Dilated {
            base: self.base.limit()?,
            k: self.k,
        }))
    }
    fn check_point(&self, x: &[f64]) -> Result<()> {
        self.base.check_point(x)
    }
    fn label(&self) -> String {
        format!("dilated[{}, k={}]", self.base.label(), self.k)
    }
}

/// The origin of R^n; limit functions ignore `x`, so they are evaluated here.
pub(crate) fn origin(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_one(_n: usize) -> SpatialField {
        SpatialField::constant("a", 1.0)
    }

    #[test]
    fn eval_examples() {
        let x = [0.3, 0.4];
        assert_eq!(Gyf::power(2, 2.0).eval(&x, 3.0).value(), 9.0);
        assert_eq!(Gyf::double_phase(2, 2.0, 3.0, a_one(2)).eval(&x, 2.0).value(), 12.0);
        let p = SpatialField::expression("p", "2 + abs(x)", 2, 2.0, 1e9, None).unwrap();
        let v = Gyf::variable_exponent(2, p).eval(&[0.6, 0.8], 2.0).value();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let x = [0.0, 0.0];
        assert_eq!(Gyf::power(2, 2.0).inverse(&x, 4.0).value(), 2.0);
        assert_eq!(Gyf::power(2, 2.0).inverse(&x, 0.0).value(), 0.0);
        let dp = Gyf::double_phase(2, 2.0, 3.0, a_one(2));
        assert!((dp.inverse(&x, 12.0).value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_evaluation_matches_direct() {
        let x = [0.1, -0.2];
        let fams = [
            Gyf::power(2, 2.5),
            Gyf::double_phase(2, 1.5, 2.5, SpatialField::constant("a", 0.3)),
            Gyf::double_phase_max(2, 1.5, 2.5, SpatialField::constant("a", 0.3)),
            Gyf::orlicz(2, "t^2 * log(1 + t)").unwrap(),
            Gyf::tabulated(2, &[0.5, 1.0, 2.0, 4.0], &[0.25, 1.0, 4.5, 22.0]).unwrap(),
        ];
        for g in &fams {
            for &u in &[-3.0, -0.1, 0.0, 0.7, 4.0] {
                let a = g.ln_eval_exp(&x, u);
                let b = g.eval(&x, u.exp()).ln();
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{} u={u}: {a} vs {b}", g.label());
            }
        }
    }

    #[test]
    fn orlicz_validation() {
        assert!(Gyf::orlicz(1, "exp(t) - 1").is_ok());
        assert!(Gyf::orlicz(1, "sqrt(t)").is_err());
        assert!(Gyf::orlicz(1, "t + 1").is_err());
        assert!(Gyf::orlicz(1, "t^2 + x1").is_err());
    }

    #[test]
    fn tabulated_rejects_concave_data() {
        assert!(Gyf::tabulated(1, &[1.0, 2.0, 4.0], &[1.0, 1.5, 2.0]).is_err());
    }

    #[test]
    fn limits() {
        let a = SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let g = Gyf::double_phase(2, 2.0, 3.0, a);
        assert_eq!(g.limit().unwrap().eval(&[0.0, 0.0], 2.0).value(), 4.0);
        let p = SpatialField::expression("p", "2 + 1/(1 + abs(x))", 2, 2.0, 3.0, None).unwrap();
        assert!(Gyf::variable_exponent(2, p).limit().is_none());
    }
}
