//! Sobolev conjugates `phi_{n/alpha}(x, t) = phi(x, H^{-1}(x, t))` with
//! `H(x, t) = (int_0^t (tau / phi(x, tau))^{alpha/(n-alpha)} dtau)^{(n-alpha)/n}`.
//!
//! Everything runs in `u = ln t`. With `g(u) = e (u - ln phi(x, e^u)) + u`,
//! `e = alpha/(n-alpha)`, the inner integral is `F(u) = int_{-inf}^u e^{g}`, kept
//! as `ln F` so that conjugates of exponential size stay representable.

pub mod kernel;
pub mod oracle;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gyf::{ln_add_exp, Dilated, YoungFn};
use crate::normalize::{key, SNAP};
use crate::quad::{integrate, tail_integral, TailResult};
use crate::report::{Table, VerificationReport};
use crate::tab::{MonotoneTab, TailTag};

/// Tabulated range and resolution of `H(x, .)`.
pub const TAB_T_MIN: f64 = 1e-6;
pub const TAB_T_MAX: f64 = 1e6;
pub const TAB_POINTS: usize = 512;
/// Target relative accuracy of `H`.
pub const EPS_H: f64 = 1e-8;
/// Per-piece tolerance; tighter than `EPS_H` so cumulative sums stay inside it.
const QUAD_REL: f64 = 1e-12;

struct HTable {
    u: Vec<f64>,
    ln_f: Vec<f64>,
    /// `ln lim F` when the upper tail converges.
    ln_f_limit: Option<f64>,
    tab: MonotoneTab,
}

/// `H_{n/alpha}` and `phi_{n/alpha}` of a base function, tabulated lazily per point.
///
/// The base is used as given: pass a `Normalized` bar or hat function for the
/// conjugate proper, or circ/bullet/none for the equivalent variants.
pub struct SobolevConjugate {
    pub base: Arc<dyn YoungFn>,
    pub alpha: f64,
    n: f64,
    nodes: Vec<f64>,
    cache: RwLock<HashMap<Vec<i64>, Option<Arc<HTable>>>>,
}

impl SobolevConjugate {
    /// Validates `alpha` and the lower tail of `H` at the origin.
    pub fn new(base: Arc<dyn YoungFn>, alpha: f64) -> Result<SobolevConjugate> {
        let n = base.dim() as f64;
        if !(alpha > 0.0 && alpha < n) {
            return Err(Error::Argument(format!("alpha must lie in (0, {n}), got {alpha}")));
        }
        let (lo, hi) = (TAB_T_MIN.ln(), TAB_T_MAX.ln());
        let mut nodes: Vec<f64> = (0..TAB_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (TAB_POINTS - 1) as f64)
            .collect();
        // t = 1 is where the normalized functions switch branches.
        let i = nodes.partition_point(|&u| u < 0.0);
        if nodes[i] != 0.0 {
            nodes.insert(i, 0.0);
        }
        let sc = SobolevConjugate {
            base,
            alpha,
            n,
            nodes,
            cache: RwLock::new(HashMap::new()),
        };
        sc.table(&vec![0.0; sc.base.dim()])?;
        Ok(sc)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `alpha / (n - alpha)`.
    fn e(&self) -> f64 {
        self.alpha / (self.n - self.alpha)
    }

    /// `(n - alpha) / n`, the outer power of `H`.
    pub fn h_power(&self) -> f64 {
        (self.n - self.alpha) / self.n
    }

    fn g(&self, x: &[f64], u: f64) -> f64 {
        let l = self.base.ln_eval_exp(x, u);
        if l == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        self.e() * (u - l) + u
    }

    /// `ln int_a^b e^{g}`.
    fn ln_int(&self, x: &[f64], a: f64, b: f64) -> f64 {
        if !(b > a) {
            return f64::NEG_INFINITY;
        }
        let s = self.g(x, a).max(self.g(x, b)).max(self.g(x, 0.5 * (a + b)));
        if s == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if !s.is_finite() {
            return f64::INFINITY;
        }
        let r = integrate(|u| (self.g(x, u) - s).exp(), a, b, QUAD_REL, 0.0).value;
        s + r.ln()
    }

    /// `ln int_{-inf}^u e^{g}`; `+inf` when the lower tail diverges.
    fn ln_lower_tail(&self, x: &[f64], u: f64) -> f64 {
        let s = self.g(x, u);
        if s == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match tail_integral(|v| (self.g(x, v) - s).exp(), u, -1.0, QUAD_REL) {
            TailResult::Finite(v) => s + v.ln(),
            TailResult::Diverges => f64::INFINITY,
        }
    }

    fn build(&self, x: &[f64]) -> Option<HTable> {
        let u = self.nodes.clone();
        let first = self.ln_lower_tail(x, u[0]);
        if first == f64::INFINITY {
            return None;
        }
        let mut ln_f = Vec::with_capacity(u.len());
        ln_f.push(first);
        for w in u.windows(2) {
            let prev = *ln_f.last().unwrap();
            ln_f.push(ln_add_exp(prev, self.ln_int(x, w[0], w[1])));
        }
        let last = u.len() - 1;
        let s = self.g(x, u[last]);
        let ln_f_limit = if s == f64::NEG_INFINITY {
            Some(ln_f[last])
        } else {
            match tail_integral(|v| (self.g(x, v) - s).exp(), u[last], 1.0, QUAD_REL) {
                TailResult::Finite(v) => Some(ln_add_exp(ln_f[last], s + v.ln())),
                TailResult::Diverges => None,
            }
        };
        let hp = self.h_power();
        let eps = 1e-9;
        let slopes: Vec<[f64; 2]> = u
            .iter()
            .zip(&ln_f)
            .map(|(&ui, &lf)| {
                let d = |v: f64| hp * (self.g(x, v) - lf).exp();
                [d(ui - eps), d(ui + eps)]
            })
            .collect();
        let tail = match ln_f_limit {
            Some(l) => TailTag::FiniteLimit((hp * l).exp()),
            None => TailTag::Diverges,
        };
        let tab = MonotoneTab::from_log_parts(u.clone(), ln_f.iter().map(|l| hp * l).collect(), slopes, tail);
        Some(HTable { u, ln_f, ln_f_limit, tab })
    }

    /// The table at the snapped point; `Divergent` when `H` is infinite there.
    fn table(&self, x: &[f64]) -> Result<(Vec<f64>, Arc<HTable>)> {
        // One table serves every point with the same values of phi(x, .).
        let k = if self.base.is_x_independent() {
            key(&vec![0.0; x.len()])
        } else if self.base.is_radial() && x.len() > 1 {
            let mut r = vec![0.0; x.len()];
            r[0] = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            key(&r)
        } else {
            key(x)
        };
        let xs: Vec<f64> = k.iter().map(|&i| i as f64 / SNAP).collect();
        if let Some(t) = self.cache.read().unwrap().get(&k) {
            return t.clone().map(|t| (xs, t)).ok_or_else(|| divergent(x));
        }
        let built = self.build(&xs).map(Arc::new);
        self.cache.write().unwrap().insert(k, built.clone());
        built.map(|t| (xs, t)).ok_or_else(|| divergent(x))
    }

    /// `ln F(u)` from the table, integrating the remainder exactly.
    fn ln_f(&self, x: &[f64], tab: &HTable, u: f64) -> f64 {
        let (lo, hi) = (tab.u[0], *tab.u.last().unwrap());
        if u < lo {
            return self.ln_lower_tail(x, u);
        }
        let j = tab.u.partition_point(|&v| v <= u).saturating_sub(1);
        let j = if u > hi { tab.u.len() - 1 } else { j };
        let v = ln_add_exp(tab.ln_f[j], self.ln_int(x, tab.u[j], u));
        match tab.ln_f_limit {
            Some(l) => v.min(l),
            None => v,
        }
    }

    /// `ln H(x, e^u)`.
    pub fn ln_h_exp(&self, x: &[f64], u: f64) -> Result<f64> {
        let (xs, tab) = self.table(x)?;
        Ok(self.h_power() * self.ln_f(&xs, &tab, u))
    }

    /// `H_{n/alpha}(x, t)`.
    pub fn h(&self, x: &[f64], t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t.is_infinite() {
            return Ok(match self.tail(x)? {
                TailTag::FiniteLimit(l) => l,
                TailTag::Diverges => f64::INFINITY,
            });
        }
        Ok(self.ln_h_exp(x, t.ln())?.exp())
    }

    /// Behaviour of `H(x, t)` as `t -> inf`.
    pub fn tail(&self, x: &[f64]) -> Result<TailTag> {
        Ok(self.table(x)?.1.tab.tail)
    }

    /// The tabulation of `H(x, .)` on its nodes.
    pub fn h_table(&self, x: &[f64]) -> Result<MonotoneTab> {
        Ok(self.table(x)?.1.tab.clone())
    }

    /// `ln H^{-1}(x, e^y)`: `-inf` for `H^{-1} = 0`, `+inf` past a finite limit.
    pub fn ln_h_inverse(&self, x: &[f64], y: f64) -> Result<f64> {
        let (xs, tab) = self.table(x)?;
        let x = &xs[..];
        if y == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if y == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        let target = y / self.h_power();
        if let Some(l) = tab.ln_f_limit {
            if target >= l {
                return Ok(f64::INFINITY);
            }
        }
        let last = tab.u.len() - 1;
        // Bracket [a, b] with ln F(a) < target <= ln F(b), plus ln F(a).
        let (a, fa, b) = if target <= tab.ln_f[0] {
            let mut b = tab.u[0];
            let mut step = 1.0;
            loop {
                let a = b - step;
                let fa = self.ln_lower_tail(x, a);
                if fa < target {
                    break (a, fa, b);
                }
                if step > 1e300 {
                    return Ok(f64::NEG_INFINITY);
                }
                b = a;
                step *= 2.0;
            }
        } else if target > tab.ln_f[last] {
            let (mut a, mut fa) = (tab.u[last], tab.ln_f[last]);
            let mut step = 1.0;
            loop {
                let b = a + step;
                let fb = ln_add_exp(fa, self.ln_int(x, a, b));
                if fb >= target {
                    break (a, fa, b);
                }
                if step > 1e300 || fb <= fa {
                    return Ok(f64::INFINITY);
                }
                a = b;
                fa = fb;
                step *= 2.0;
            }
        } else {
            let i = tab.ln_f.partition_point(|&v| v < target);
            (tab.u[i - 1], tab.ln_f[i - 1], tab.u[i])
        };
        Ok(self.solve(x, a, fa, b, target, &tab))
    }

    /// Smallest `u` in `(a, b]` with `ln F(u) >= target`, by safeguarded Newton.
    fn solve(&self, x: &[f64], a0: f64, fa: f64, b0: f64, target: f64, tab: &HTable) -> f64 {
        let (mut a, mut b) = (a0, b0);
        let f = |u: f64| ln_add_exp(fa, self.ln_int(x, a0, u));
        let guess = tab.tab.ln_inverse(self.h_power() * target).map(|v| v.clamp(a, b));
        let mut u = guess.unwrap_or(0.5 * (a + b));
        for _ in 0..200 {
            if !(u > a && u < b) {
                u = 0.5 * (a + b);
            }
            let fu = f(u);
            if fu < target {
                a = u;
            } else {
                b = u;
            }
            let tol = 1e-15 * (1.0 + u.abs());
            if b - a <= tol {
                break;
            }
            let d = (self.g(x, u) - fu).exp();
            let next = u - (fu - target) / d;
            u = if d > 0.0 && next.is_finite() && next > a && next < b {
                next
            } else {
                0.5 * (a + b)
            };
            // A Newton step that lands within tolerance of the bracket end is
            // checked from the other side next round.
            if (u - a).abs() < tol {
                u = (a + 2.0 * tol).min(0.5 * (a + b));
            } else if (b - u).abs() < tol {
                u = (b - 2.0 * tol).max(0.5 * (a + b));
            }
        }
        b
    }

    /// `H^{-1}(x, t)`.
    pub fn h_inverse(&self, x: &[f64], t: f64) -> Result<ExtReal> {
        if t <= 0.0 {
            return Ok(ExtReal::ZERO);
        }
        Ok(ExtReal::new(self.ln_h_inverse(x, t.ln())?.exp()))
    }

    /// `ln phi_{n/alpha}(x, e^y)`.
    pub fn ln_conjugate(&self, x: &[f64], y: f64) -> Result<f64> {
        let v = self.ln_h_inverse(x, y)?;
        Ok(if v.is_infinite() { v } else { self.base.ln_eval_exp(x, v) })
    }

    /// `ln phi_{n/alpha}(x, e^y)` with `H^{-1}` read off the Hermite table
    /// inside its range. Meant for bulk sweeps; falls back to the exact path
    /// outside the tabulated range.
    pub fn ln_conjugate_fast(&self, x: &[f64], y: f64) -> Result<f64> {
        Ok(self.at(x)?.ln_conjugate(y))
    }

    /// The conjugate frozen at one point, for repeated evaluation.
    pub fn at(&self, x: &[f64]) -> Result<PointConjugate<'_>> {
        let (xs, tab) = self.table(x)?;
        Ok(PointConjugate { sc: self, x: xs, tab })
    }

    /// `phi_{n/alpha}(x, t) = phi(x, H^{-1}(x, t))`.
    pub fn conjugate(&self, x: &[f64], t: f64) -> Result<ExtReal> {
        if t <= 0.0 {
            return Ok(ExtReal::ZERO);
        }
        let v = self.h_inverse(x, t)?;
        Ok(if v.is_infinite() { ExtReal::INFINITY } else { self.base.eval(x, v.value()) })
    }
}

/// `phi_{n/alpha}(x, .)` at a fixed (snapped) point.
pub struct PointConjugate<'a> {
    sc: &'a SobolevConjugate,
    x: Vec<f64>,
    tab: Arc<HTable>,
}

impl PointConjugate<'_> {
    /// `ln phi_{n/alpha}(x, e^y)`, table-interpolated inside the tabulated range.
    pub fn ln_conjugate(&self, y: f64) -> f64 {
        let (lo, hi) = self.tab.tab.ln_range();
        if y > lo && y < hi {
            if let Some(v) = self.tab.tab.ln_inverse(y) {
                return self.sc.base.ln_eval_exp(&self.x, v);
            }
        }
        self.sc.ln_conjugate(&self.x, y).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }
}

fn divergent(x: &[f64]) -> Error {
    Error::Divergent(format!("(t / phi(x, t))^(alpha/(n-alpha)) is not integrable at 0 for x = {x:?}"))
}

/// Where `H = inf` identically, `H^{-1} = 0` and the conjugate vanishes; the
/// fallible methods report `Divergent` instead.
impl YoungFn for SobolevConjugate {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        self.conjugate(x, t).unwrap_or(ExtReal::ZERO)
    }

    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        self.ln_conjugate(x, u).unwrap_or(f64::NEG_INFINITY)
    }

    fn is_x_independent(&self) -> bool {
        self.base.is_x_independent()
    }

    fn is_radial(&self) -> bool {
        self.base.is_radial()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        self.base.check_point(x)
    }

    fn label(&self) -> String {
        format!("sobolev[{}, alpha={}]", self.base.label(), self.alpha)
    }
}

/// `phi_{n/alpha}` evaluated through the Hermite table of `H`, for sweeps
/// where the exact per-point inversion is too slow.
pub struct FastConjugate(pub Arc<SobolevConjugate>);

impl YoungFn for FastConjugate {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        if t <= 0.0 {
            return ExtReal::ZERO;
        }
        ExtReal::new(self.ln_eval_exp(x, t.ln()).exp())
    }

    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        self.0.ln_conjugate_fast(x, u).unwrap_or(f64::NEG_INFINITY)
    }

    fn is_x_independent(&self) -> bool {
        self.0.is_x_independent()
    }

    fn is_radial(&self) -> bool {
        self.0.is_radial()
    }

    fn label(&self) -> String {
        self.0.label()
    }
}

pub fn h_transform(sc: &SobolevConjugate, x: &[f64], t: f64) -> Result<f64> {
    sc.h(x, t)
}

pub fn h_inverse(sc: &SobolevConjugate, x: &[f64], t: f64) -> Result<ExtReal> {
    sc.h_inverse(x, t)
}

pub fn sobolev_conjugate(sc: &SobolevConjugate, x: &[f64], t: f64) -> Result<ExtReal> {
    sc.conjugate(x, t)
}

/// Sampled midpoint concavity of `H(x, .)` and monotonicity of `H(x, t)/t`.
///
/// The violation is the largest relative defect `((H(s) + H(t))/2 - H((s+t)/2)) / H((s+t)/2)`
/// over consecutive pairs of the ladder, and of `H(t_2)/t_2 - H(t_1)/t_1` for `t_1 < t_2`.
pub fn check_concavity(sc: &SobolevConjugate, xs: &[Vec<f64>], ts: &[f64], tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new("h-concavity", "t -> H(x, t) is concave, H(x, 0) = 0, H(x, t)/t nonincreasing");
    rep.table = Table::new(["x1", "t", "H", "midpoint_defect"]);
    let mut worst = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for x in xs {
        if sc.h(x, 0.0)? != 0.0 {
            worst = f64::INFINITY;
        }
        for w in ts.windows(2) {
            let (s, t) = (w[0], w[1]);
            let (hs, ht, hm) = (sc.h(x, s)?, sc.h(x, t)?, sc.h(x, 0.5 * (s + t))?);
            let d = (0.5 * (hs + ht) - hm) / hm;
            worst = worst.max(d);
            worst_ratio = worst_ratio.max((ht / t - hs / s) / (hs / s));
            rep.samples += 1;
            rep.table.push(vec![x.first().copied().unwrap_or(0.0), 0.5 * (s + t), hm, d]);
        }
    }
    rep.max_violation = worst.max(worst_ratio).max(0.0);
    rep.tolerance = tol;
    rep.set("midpoint_defect", worst.max(0.0));
    rep.set("ratio_increase", worst_ratio.max(0.0));
    rep.pass = rep.max_violation <= tol;
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// `H_k(x, t) = k H(x, t/k)` where `H_k` is the transform of `phi(x, t/k)`,
/// computed by two independent tabulations.
pub fn check_scaling(base: Arc<dyn YoungFn>, alpha: f64, k: f64, xs: &[Vec<f64>], ts: &[f64], tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let sc = SobolevConjugate::new(base.clone(), alpha)?;
    let sck = SobolevConjugate::new(Arc::new(Dilated { base, k }), alpha)?;
    let mut rep = VerificationReport::new("h-scaling", "H_k(x, t) = k H(x, t/k) for phi_k(x, t) = phi(x, t/k)");
    rep.table = Table::new(["x1", "t", "H_k", "k_H_t_over_k", "rel_err"]);
    let mut worst = 0.0f64;
    for x in xs {
        for &t in ts {
            let lhs = sck.h(x, t)?;
            let rhs = k * sc.h(x, t / k)?;
            let r = ((lhs - rhs) / rhs).abs();
            worst = worst.max(r);
            rep.samples += 1;
            rep.table.push(vec![x.first().copied().unwrap_or(0.0), t, lhs, rhs, r]);
        }
    }
    rep.set("k", k);
    rep.max_violation = worst;
    rep.tolerance = tol;
    rep.pass = worst <= tol;
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyf::Gyf;

    fn power(n: usize, p: f64) -> SobolevConjugate {
        SobolevConjugate::new(Arc::new(Gyf::power(n, p)), 1.0).unwrap()
    }

    #[test]
    fn power_h_matches_closed_form() {
        let (n, p) = (3.0, 2.0);
        let sc = power(3, p);
        let x = [0.0; 3];
        let np = n / (n - 1.0);
        let t0 = ((n - 1.0) / (n - p)).powf(1.0 / np);
        for &t in &[1e-9, 1e-3, 0.7, 1.0, 2.5, 1e4, 1e8] {
            let h = sc.h(&x, t).unwrap();
            let want = t0 * t.powf((n - p) / n);
            assert!((h / want - 1.0).abs() < EPS_H, "t={t}: {h} vs {want}");
            let back = sc.h_inverse(&x, h).unwrap().value();
            assert!((back / t - 1.0).abs() < 1e-9, "t={t}: {back}");
        }
        assert_eq!(sc.h(&x, 0.0).unwrap(), 0.0);
        assert_eq!(sc.h_inverse(&x, 0.0).unwrap().value(), 0.0);
    }

    #[test]
    fn supercritical_power_has_finite_limit() {
        // phi = t^2 below 1 and t^4 above, n = 3: H is bounded.
        let g = Gyf::orlicz(3, "max(t^2, t^4)").unwrap();
        let sc = SobolevConjugate::new(Arc::new(g), 1.0).unwrap();
        let x = [0.0; 3];
        // F(inf) = int_0^1 t^{-1/2} + int_1^inf t^{-3/2} = 2 + 2.
        let lim = 4f64.powf(2.0 / 3.0);
        match sc.tail(&x).unwrap() {
            TailTag::FiniteLimit(l) => assert!((l / lim - 1.0).abs() < 1e-8, "{l}"),
            other => panic!("{other:?}"),
        }
        assert!(sc.h_inverse(&x, lim).unwrap().is_infinite());
        assert!(sc.h_inverse(&x, 0.999 * lim).unwrap().is_finite());
        assert!(sc.conjugate(&x, 1.01 * lim).unwrap().is_infinite());
    }

    #[test]
    fn critical_lower_tail_is_divergent() {
        let g = Gyf::power(2, 2.0);
        match SobolevConjugate::new(Arc::new(g), 1.0) {
            Err(Error::Divergent(_)) => {}
            Err(e) => panic!("{e}"),
            Ok(_) => panic!("expected divergence"),
        }
    }

    #[test]
    fn alpha_one_is_the_first_order_transform() {
        // Same integrand, exponents 1/(n-1) and 1/n'.
        let sc = power(3, 1.5);
        let x = [0.0; 3];
        for &t in &[0.01, 1.0, 30.0] {
            let direct = integrate(|s: f64| (s / s.powf(1.5)).powf(0.5), 0.0, t, 1e-13, 0.0).value.powf(2.0 / 3.0);
            assert!((sc.h(&x, t).unwrap() / direct - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn concavity_and_scaling_on_double_phase() {
        let a = crate::field::SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let g: Arc<dyn YoungFn> = Arc::new(Gyf::double_phase(2, 1.5, 1.8, a));
        let sc = SobolevConjugate::new(g.clone(), 1.0).unwrap();
        let xs = vec![vec![0.0, 0.0], vec![0.3, -0.2]];
        let ts = crate::sample::log_space(1e-3, 1e3, 40);
        assert!(check_concavity(&sc, &xs, &ts, 1e-8).unwrap().pass);
        let r = check_scaling(g, 1.0, 2.5, &xs, &ts, 1e-6).unwrap();
        assert!(r.pass, "{}", r.max_violation);
    }
}
