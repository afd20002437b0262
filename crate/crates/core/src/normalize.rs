//! The normalization ladder `phi_0`, `phi_bar`, `phi_hat`, `phi_circ`, `phi_bullet`.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gyf::ops::{check_delta2, sphere_sup_limit, InfinitySchedule};
use crate::gyf::{origin, YoungFn};
use crate::report::VerificationReport;
use crate::sample::{log_space, SampleSpec};
use crate::tab::{MonotoneTab, TailTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    Phi0,
    Bar,
    Hat,
    Circ,
    Bullet,
    /// The base function itself.
    None,
}

impl FromStr for Recipe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Recipe> {
        Ok(match s {
            "phi0" => Recipe::Phi0,
            "bar" => Recipe::Bar,
            "hat" => Recipe::Hat,
            "circ" => Recipe::Circ,
            "bullet" => Recipe::Bullet,
            "none" => Recipe::None,
            _ => return Err(Error::Argument(format!("unknown normalization `{s}`; expected bar, hat, circ, bullet or none"))),
        })
    }
}

impl Recipe {
    /// Circ and bullet may jump at `t = 1`; they are only equivalent to Young functions.
    pub fn equivalent_only(self) -> bool {
        matches!(self, Recipe::Circ | Recipe::Bullet)
    }
}

/// How the `t < 1` branch of `phi_bar` (and `phi_circ`) reaches `phi_inf`.
#[derive(Clone)]
enum Lower {
    /// Declared limit function with `c_inf = phi_inf^{-1}(1)`.
    Limit { f: Arc<dyn YoungFn>, c: f64 },
    /// Sphere-sup values tabulated on `(0, 1)`.
    Table(MonotoneTab),
    Unused,
}

/// Quantization of `x` for the per-point caches.
pub(crate) const SNAP: f64 = 1048576.0; // 2^20

pub(crate) fn key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * SNAP).round() as i64).collect()
}

/// A function derived from `base` by one of the normalization recipes.
pub struct Normalized {
    pub base: Arc<dyn YoungFn>,
    pub recipe: Recipe,
    lower: Lower,
    c_cache: RwLock<HashMap<Vec<i64>, f64>>,
}

impl Normalized {
    /// `phi^{-1}(x, 1)`, cached per quantized `x`.
    pub fn c(&self, x: &[f64]) -> f64 {
        let k = key(x);
        if let Some(v) = self.c_cache.read().unwrap().get(&k) {
            return *v;
        }
        let v = self.base.inverse(x, 1.0).value();
        self.c_cache.write().unwrap().insert(k, v);
        v
    }

    /// `phi_0(x, t) = max(phi(x, phi^{-1}(x,1) t), 2t - 1)`.
    pub fn phi0(&self, x: &[f64], t: f64) -> ExtReal {
        self.base.eval(x, self.c(x) * t).max(ExtReal::new(2.0 * t - 1.0))
    }

    fn ln_phi0(&self, x: &[f64], u: f64) -> f64 {
        let a = self.base.ln_eval_exp(x, u + self.c(x).ln());
        a.max(ln_two_t_minus_one(u))
    }

    /// `phi_inf`-side value of `phi_bar` for `t < 1`.
    fn lower_bar(&self, t: f64) -> ExtReal {
        match &self.lower {
            Lower::Limit { f, c } => f.eval(&origin(f.dim()), c * t).max(ExtReal::new(2.0 * t - 1.0)),
            Lower::Table(tab) => tab.eval(t),
            Lower::Unused => unreachable!("lower branch not prepared"),
        }
    }

    fn ln_lower_bar(&self, u: f64) -> f64 {
        match &self.lower {
            Lower::Limit { f, c } => f.ln_eval_exp(&origin(f.dim()), u + c.ln()).max(ln_two_t_minus_one(u)),
            Lower::Table(tab) => tab.ln_eval_extrapolated(u),
            Lower::Unused => unreachable!("lower branch not prepared"),
        }
    }

    fn phi_inf(&self) -> &Arc<dyn YoungFn> {
        match &self.lower {
            Lower::Limit { f, .. } => f,
            _ => unreachable!("circ requires a declared limit"),
        }
    }
}

/// `ln(2 e^u - 1)`, `-inf` when `e^u <= 1/2`.
fn ln_two_t_minus_one(u: f64) -> f64 {
    let t = u.exp();
    if t <= 0.5 {
        f64::NEG_INFINITY
    } else if u > 30.0 {
        std::f64::consts::LN_2 + u
    } else {
        (2.0 * t - 1.0).ln()
    }
}

/// `ln(2 e^l - 1)` for `l >= 0`.
fn ln_double_minus_one(l: f64) -> f64 {
    l + (2.0 - (-l).exp()).ln()
}

impl YoungFn for Normalized {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        if t <= 0.0 {
            return ExtReal::ZERO;
        }
        let above = t >= 1.0;
        match self.recipe {
            Recipe::None => self.base.eval(x, t),
            Recipe::Phi0 => self.phi0(x, t),
            Recipe::Bar if above => {
                let v = self.phi0(x, t).value();
                ExtReal::new(2.0 * v - 1.0)
            }
            Recipe::Bar => self.lower_bar(t),
            Recipe::Hat if above => {
                let v = self.phi0(x, t).value();
                ExtReal::new(2.0 * v - 1.0)
            }
            Recipe::Circ | Recipe::Bullet if above => self.base.eval(x, t),
            Recipe::Hat | Recipe::Bullet => ExtReal::new(t),
            Recipe::Circ => self.phi_inf().eval(&origin(self.dim()), t),
        }
    }

    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        let above = u >= 0.0;
        match self.recipe {
            Recipe::None => self.base.ln_eval_exp(x, u),
            Recipe::Phi0 => self.ln_phi0(x, u),
            Recipe::Bar | Recipe::Hat if above => ln_double_minus_one(self.ln_phi0(x, u)),
            Recipe::Bar => self.ln_lower_bar(u),
            Recipe::Circ | Recipe::Bullet if above => self.base.ln_eval_exp(x, u),
            Recipe::Hat | Recipe::Bullet => u,
            Recipe::Circ => self.phi_inf().ln_eval_exp(&origin(self.dim()), u),
        }
    }

    fn inverse(&self, x: &[f64], t: f64) -> ExtReal {
        match self.recipe {
            Recipe::None => self.base.inverse(x, t),
            Recipe::Hat | Recipe::Bullet if t < 1.0 => ExtReal::new(t.max(0.0)),
            _ => crate::gyf::ops::bisect_inverse(self, x, t),
        }
    }

    fn conjugate_closed_form(&self, x: &[f64], t: f64) -> Option<ExtReal> {
        match self.recipe {
            Recipe::None => self.base.conjugate_closed_form(x, t),
            _ => None,
        }
    }

    fn is_x_independent(&self) -> bool {
        self.base.is_x_independent()
    }

    fn is_radial(&self) -> bool {
        self.base.is_radial()
    }

    fn limit(&self) -> Option<Arc<dyn YoungFn>> {
        let l = self.base.limit()?;
        let c = l.inverse(&origin(l.dim()), 1.0).value();
        Some(Arc::new(Normalized {
            recipe: self.recipe,
            lower: Lower::Limit { f: l.clone(), c },
            base: l,
            c_cache: RwLock::new(HashMap::new()),
        }))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        self.base.check_point(x)
    }

    fn label(&self) -> String {
        format!("{:?}[{}]", self.recipe, self.base.label()).to_lowercase()
    }
}

/// Verifies `phi^{-1}(x, 1)` is finite and positive at every sample point.
fn check_c(n: &Normalized, xs: &[Vec<f64>]) -> Result<()> {
    for x in xs {
        let c = n.c(x);
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Normalization(format!("phi^-1(x, 1) = {c} at x = {x:?}")));
        }
    }
    Ok(())
}

fn lower_branch(base: &Arc<dyn YoungFn>, sched: &InfinitySchedule) -> Result<Lower> {
    let n = base.dim();
    if let Some(f) = base.limit() {
        let c = f.inverse(&origin(n), 1.0).value();
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Normalization(format!("phi_inf^-1(1) = {c}")));
        }
        return Ok(Lower::Limit { f, c });
    }
    // No declared limit: tabulate the sphere sups of phi_0 on (0, 1).
    let phi0 = Normalized {
        base: base.clone(),
        recipe: Recipe::Phi0,
        lower: Lower::Unused,
        c_cache: RwLock::new(HashMap::new()),
    };
    let ts = log_space(1e-6, 1.0 - 1e-9, 49);
    let mut vs = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = sphere_sup_limit(&phi0, t, sched).map_err(|e| Error::Normalization(e.to_string()))?;
        vs.push(v.value().max(f64::MIN_POSITIVE));
    }
    for i in 1..vs.len() {
        vs[i] = vs[i].max(vs[i - 1]);
    }
    Ok(Lower::Table(MonotoneTab::from_samples(&ts, &vs, TailTag::Diverges)?))
}

fn build(base: Arc<dyn YoungFn>, recipe: Recipe, lower: Lower, xs: &[Vec<f64>]) -> Result<Normalized> {
    let n = Normalized {
        base,
        recipe,
        lower,
        c_cache: RwLock::new(HashMap::new()),
    };
    check_c(&n, xs)?;
    Ok(n)
}

pub fn make_phi0(base: Arc<dyn YoungFn>, sample: &SampleSpec) -> Result<Normalized> {
    let xs = sample.points(base.dim());
    build(base, Recipe::Phi0, Lower::Unused, &xs)
}

pub fn make_bar(base: Arc<dyn YoungFn>, sample: &SampleSpec) -> Result<Normalized> {
    make_bar_with(base, sample, &InfinitySchedule::default())
}

pub fn make_bar_with(base: Arc<dyn YoungFn>, sample: &SampleSpec, sched: &InfinitySchedule) -> Result<Normalized> {
    let xs = sample.points(base.dim());
    let lower = lower_branch(&base, sched)?;
    build(base, Recipe::Bar, lower, &xs)
}

pub fn make_hat(base: Arc<dyn YoungFn>, sample: &SampleSpec) -> Result<Normalized> {
    let xs = sample.points(base.dim());
    build(base, Recipe::Hat, Lower::Unused, &xs)
}

fn require_delta2(base: &Arc<dyn YoungFn>, xs: &[Vec<f64>]) -> Result<()> {
    let d = check_delta2(base.as_ref(), xs);
    if !d.holds {
        return Err(Error::Precondition(format!(
            "Delta_2 fails on the sample (sup phi(2t)/phi(t) = {} near t = {})",
            d.c, d.worst_t
        )));
    }
    Ok(())
}

pub fn make_circ(base: Arc<dyn YoungFn>, sample: &SampleSpec) -> Result<Normalized> {
    let xs = sample.points(base.dim());
    require_delta2(&base, &xs)?;
    let f = base
        .limit()
        .ok_or_else(|| Error::Precondition("circ needs a declared limit phi_inf".into()))?;
    let c = f.inverse(&origin(base.dim()), 1.0).value();
    build(base, Recipe::Circ, Lower::Limit { f, c }, &xs)
}

pub fn make_bullet(base: Arc<dyn YoungFn>, sample: &SampleSpec) -> Result<Normalized> {
    let xs = sample.points(base.dim());
    require_delta2(&base, &xs)?;
    build(base, Recipe::Bullet, Lower::Unused, &xs)
}

/// Builds the recipe by name; `None` wraps the base unchanged.
pub fn make(base: Arc<dyn YoungFn>, recipe: Recipe, sample: &SampleSpec) -> Result<Normalized> {
    match recipe {
        Recipe::Phi0 => make_phi0(base, sample),
        Recipe::Bar => make_bar(base, sample),
        Recipe::Hat => make_hat(base, sample),
        Recipe::Circ => make_circ(base, sample),
        Recipe::Bullet => make_bullet(base, sample),
        Recipe::None => build(base, Recipe::None, Lower::Unused, &[]),
    }
}

/// Relative slack for the sandwich comparisons, which involve a numerical
/// inverse of `phi` at 1.
pub const SANDWICH_REL: f64 = 1e-9;

/// Checks the sandwich inequalities between `phi` and its bar or hat normalization.
///
/// For bar: `phi(x, beta t) <= bar(x, t) <= phi(x, 4t/beta)` when `t >= 1`
/// and `phi_inf(beta t) <= bar(x, t) <= phi_inf(2t/beta)` when `t < 1`.
/// For hat: `hat(x, t) <= phi(x, 4t/beta) + 1` and `phi(x, t) <= hat(x, t/beta) + 1`.
/// Defects are reported relative to the larger side.
pub fn check_sandwiches(derived: &Normalized, beta: f64, sample: &SampleSpec) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let phi = derived.base.as_ref();
    let n = phi.dim();
    let xs = sample.points(n);
    let ts = sample.t_ladder();
    let (name, statement) = match derived.recipe {
        Recipe::Bar => ("sandwich-bar", "phi(x,bt) <= bar(x,t) <= phi(x,4t/b) for t>=1; phi_inf(bt) <= bar(x,t) <= phi_inf(2t/b) for t<1"),
        Recipe::Hat => ("sandwich-hat", "hat(x,t) <= phi(x,4t/b)+1 and phi(x,t) <= hat(x,t/b)+1"),
        r => return Err(Error::Argument(format!("sandwich inequalities are stated for bar and hat, not {r:?}"))),
    };
    let phi_inf = match derived.recipe {
        Recipe::Bar => Some(
            phi.limit()
                .ok_or_else(|| Error::Precondition("phi_inf needed for the t < 1 sandwich".into()))?,
        ),
        _ => None,
    };
    let mut rep = VerificationReport::new(name, statement);
    rep.tolerance = SANDWICH_REL;
    rep.table = crate::report::Table::new(["x_norm", "t", "lower", "middle", "upper"]);
    let o = origin(n);
    let mut worst: f64 = 0.0;
    for x in &xs {
        for &t in &ts {
            let d = derived.eval(x, t).value();
            let pairs: Vec<(f64, f64)> = match derived.recipe {
                Recipe::Bar if t >= 1.0 => vec![
                    (phi.eval(x, beta * t).value(), d),
                    (d, phi.eval(x, 4.0 * t / beta).value()),
                ],
                Recipe::Bar => {
                    let l = phi_inf.as_ref().unwrap();
                    vec![(l.eval(&o, beta * t).value(), d), (d, l.eval(&o, 2.0 * t / beta).value())]
                }
                _ => vec![
                    (d, phi.eval(x, 4.0 * t / beta).value() + 1.0),
                    (phi.eval(x, t).value(), derived.eval(x, t / beta).value() + 1.0),
                ],
            };
            for (lhs, rhs) in pairs {
                rep.samples += 1;
                if rhs.is_infinite() {
                    continue;
                }
                let defect = (lhs - rhs) / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max(defect);
            }
            rep.table.push(vec![crate::field::norm(x), t, phi.eval(x, beta * t).value(), d, phi.eval(x, 4.0 * t / beta).value()]);
        }
    }
    rep.max_violation = worst.max(0.0);
    rep.pass = rep.max_violation <= rep.tolerance;
    rep.set("beta", beta);
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpatialField;
    use crate::gyf::Gyf;

    fn small() -> SampleSpec {
        SampleSpec {
            points: 16,
            ..SampleSpec::default()
        }
    }

    fn arc(g: Gyf) -> Arc<dyn YoungFn> {
        Arc::new(g)
    }

    #[test]
    fn phi0_examples() {
        let n = make_phi0(arc(Gyf::power(1, 2.0)), &small()).unwrap();
        assert_eq!(n.eval(&[0.0], 1.0).value(), 1.0);
        assert!((n.eval(&[0.0], 0.9).value() - 0.81).abs() < 1e-15);
        let dp = make_phi0(arc(Gyf::double_phase(1, 2.0, 3.0, SpatialField::constant("a", 1.0))), &small()).unwrap();
        assert!((dp.eval(&[0.0], 1.0).value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bar_and_hat_of_square() {
        let s = small();
        let bar = make_bar(arc(Gyf::power(2, 2.0)), &s).unwrap();
        let hat = make_hat(arc(Gyf::power(2, 2.0)), &s).unwrap();
        let x = [0.5, -1.0];
        assert_eq!(bar.eval(&x, 3.0).value(), 17.0);
        assert_eq!(bar.eval(&x, 0.5).value(), 0.25);
        assert_eq!(hat.eval(&x, 0.5).value(), 0.5);
        assert_eq!(hat.eval(&x, 2.0).value(), 7.0);
        for &t in &[1.0, 1.5, 40.0] {
            assert_eq!(hat.eval(&x, t).value(), bar.eval(&x, t).value());
        }
    }

    #[test]
    fn bar_of_cube_below_one_uses_the_affine_branch() {
        let bar = make_bar(arc(Gyf::power(1, 3.0)), &small()).unwrap();
        assert!((bar.eval(&[0.0], 0.9).value() - 0.8).abs() < 1e-15);
        assert!((bar.eval(&[0.0], 0.3).value() - 0.027).abs() < 1e-15);
    }

    #[test]
    fn log_evaluation_agrees() {
        let a = SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let base = arc(Gyf::double_phase(2, 1.5, 2.5, a));
        let s = small();
        for r in [Recipe::Phi0, Recipe::Bar, Recipe::Hat, Recipe::Circ, Recipe::Bullet] {
            let f = make(base.clone(), r, &s).unwrap();
            for &u in &[-4.0, -0.3, 0.0, 0.2, 5.0] {
                let x = [0.3, 0.1];
                let a = f.ln_eval_exp(&x, u);
                let b = f.eval(&x, u.exp()).ln();
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{r:?} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn circ_needs_delta2() {
        let e = make_circ(arc(Gyf::orlicz(1, "exp(t) - 1").unwrap()), &small());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn bar_without_declared_limit_uses_sphere_sups() {
        let a = SpatialField::expression("a", "1/(1 + abs(x)^2)", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let with = make_bar(arc(Gyf::double_phase(2, 2.0, 3.0, a.clone())), &small()).unwrap();
        let base = arc(Gyf::double_phase(2, 2.0, 3.0, SpatialField { limit: None, ..a }));
        let without = make_bar(base, &small()).unwrap();
        for &t in &[0.01, 0.3, 0.9] {
            let (p, q) = (with.eval(&[0.0, 0.0], t).value(), without.eval(&[0.0, 0.0], t).value());
            assert!(((p - q) / p).abs() < 1e-3, "t={t}: {p} vs {q}");
        }
    }
}
