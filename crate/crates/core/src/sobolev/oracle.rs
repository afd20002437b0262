//! Closed-form Sobolev conjugates for variable-exponent and double-phase functions.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::field::SpatialField;
use crate::gyf::{ln_add_exp, YoungFn};
use crate::quad::{tail_integral, TailResult};

fn conj_exp(n: f64) -> f64 {
    n / (n - 1.0)
}

/// `t_0 = ((n-1)/(n-p_inf))^{1/n'}`, the value of `H` at `t = 1`.
pub fn variable_exponent_t0(n: usize, p_inf: f64) -> f64 {
    let n = n as f64;
    ((n - 1.0) / (n - p_inf)).powf(1.0 / conj_exp(n))
}

/// `t_inf(x) = ((p - p_inf)(n-1) / ((n - p_inf)(p - n)))^{1/n'}` for `p(x) > n`.
pub fn variable_exponent_t_inf(n: usize, p_inf: f64, p: f64) -> f64 {
    let n = n as f64;
    ((p - p_inf) * (n - 1.0) / ((n - p_inf) * (p - n))).powf(1.0 / conj_exp(n))
}

fn check_ve(n: usize, p_inf: f64, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Argument("the variable-exponent conjugate needs n >= 2".into()));
    }
    if !(p_inf >= 1.0 && p_inf < n as f64) {
        return Err(Error::Precondition(format!("p_inf = {p_inf} must lie in [1, n) with n = {n}")));
    }
    if !(p >= 1.0) {
        return Err(Error::Argument(format!("exponent p(x) = {p} below 1")));
    }
    Ok(())
}

/// `ln phi_n(x, e^y)` for `phi(x, t) = t^{p(x)}` above 1 and `t^{p_inf}` below,
/// across the regimes `p(x) < n`, `= n`, `> n`.
///
/// For `p(x) < n` and `t >= t_0` this uses the inverse of
/// `H^{n'} = (n-1)/(n-p) ((p_inf - p)/(n - p_inf) + t^{(n-p)/(n-1)})`, namely
/// `H^{-1}(s) = ((n-p)/(n-1) s^{n'} - (p_inf - p)/(n - p_inf))^{(n-1)/(n-p)}`.
pub fn ln_oracle_variable_exponent(n: usize, p_inf: f64, p: f64, y: f64) -> Result<f64> {
    check_ve(n, p_inf, p)?;
    if y == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let nf = n as f64;
    let np = conj_exp(nf);
    let t0 = variable_exponent_t0(n, p_inf);
    let lt0 = t0.ln();
    if y < lt0 {
        let e = nf * p_inf / (nf - p_inf);
        return Ok(e * (y - lt0));
    }
    let s = (np * y).exp();
    if p < nf {
        let inner = (nf - p) / (nf - 1.0) * s - (p_inf - p) / (nf - p_inf);
        Ok((nf - 1.0) * p / (nf - p) * inner.ln())
    } else if p == nf {
        Ok(nf * (1.0 - nf) / (nf - p_inf) + nf * s)
    } else {
        if y >= variable_exponent_t_inf(n, p_inf, p).ln() {
            return Ok(f64::INFINITY);
        }
        let inner = (p - p_inf) / (nf - p_inf) - (p - nf) / (nf - 1.0) * s;
        if inner <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok((nf - 1.0) * p / (nf - p) * inner.ln())
    }
}

pub fn oracle_variable_exponent(n: usize, p_inf: f64, p: f64, t: f64) -> Result<ExtReal> {
    if t <= 0.0 {
        check_ve(n, p_inf, p)?;
        return Ok(ExtReal::ZERO);
    }
    Ok(ExtReal::new(ln_oracle_variable_exponent(n, p_inf, p, t.ln())?.exp()))
}

/// The `p(x) < n`, `t >= t_0` branch with the factor `((n-p)/(n-1))^{1/n'}` in
/// front of `t^{n'}`. It does not invert `H` and is discontinuous at `t_0`;
/// kept only to report that mismatch.
pub fn variable_exponent_unit_power_branch(n: usize, p_inf: f64, p: f64, t: f64) -> Result<f64> {
    check_ve(n, p_inf, p)?;
    let nf = n as f64;
    let np = conj_exp(nf);
    let inner = ((nf - p) / (nf - 1.0)).powf(1.0 / np) * t.powf(np) - (p_inf - p) / (nf - p_inf);
    Ok(inner.powf((nf - 1.0) * p / (nf - p)))
}

/// Large-`t` model `(n-p)^{1/(n-p)} t^{np/(n-p)}` for `p(x) < n`.
pub fn variable_exponent_asymptotic(n: usize, p: f64, t: f64) -> f64 {
    let nf = n as f64;
    (nf - p).powf(1.0 / (nf - p)) * t.powf(nf * p / (nf - p))
}

/// `t_inf = (int_0^inf ds / (s^{p-1} + s^{q-1})^{1/(n-1)})^{1/n'}`, finite for `p < n < q`.
pub fn double_phase_t_inf(n: usize, p: f64, q: f64) -> ExtReal {
    let nf = n as f64;
    let g = |v: f64| (v - ln_add_exp((p - 1.0) * v, (q - 1.0) * v) / (nf - 1.0)).exp();
    match (tail_integral(g, 0.0, -1.0, 1e-12), tail_integral(g, 0.0, 1.0, 1e-12)) {
        (TailResult::Finite(a), TailResult::Finite(b)) => ExtReal::new((a + b).powf(1.0 / conj_exp(nf))),
        _ => ExtReal::INFINITY,
    }
}

/// The displayed equivalent of `phi_n` for `t^p + a t^q`, `p < n`.
///
/// `q < n`: `t^{np/(n-p)} + a^{n/(n-q)} t^{nq/(n-q)}`.
/// `q = n`: `a^{p/(p-n)} e^{n a^{1/(n-1)} t^{n'}}` when `t a^{1/n} >= 1`, else `t^{np/(n-p)}`.
/// `q > n`: `+inf` for `t >= t_inf a^{(n-p)/(n(p-q))}`, else
/// `t^{np/(n-p)} / (t_inf - t a^{(n-p)/(n(q-p))})^{(n-1)q/(q-n)}`.
/// Only meaningful up to equivalence constants.
pub fn ln_oracle_double_phase(n: usize, p: f64, q: f64, a: f64, y: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0 && p < nf) {
        return Err(Error::Precondition(format!("double-phase conjugate needs 1 <= p < n, got p = {p}, n = {n}")));
    }
    if !(q >= p) || !(a >= 0.0) {
        return Err(Error::Argument(format!("need q >= p and a >= 0, got q = {q}, a = {a}")));
    }
    if y == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let low = nf * p / (nf - p) * y;
    if a == 0.0 {
        return Ok(low);
    }
    if q < nf {
        return Ok(ln_add_exp(low, nf / (nf - q) * a.ln() + nf * q / (nf - q) * y));
    }
    if q == nf {
        if y + a.ln() / nf >= 0.0 {
            let np = conj_exp(nf);
            return Ok(p / (p - nf) * a.ln() + nf * a.powf(1.0 / (nf - 1.0)) * (np * y).exp());
        }
        return Ok(low);
    }
    let tinf = double_phase_t_inf(n, p, q).value();
    let s = (y + (nf - p) / (nf * (q - p)) * a.ln()).exp();
    if s >= tinf {
        return Ok(f64::INFINITY);
    }
    Ok(low - (nf - 1.0) * q / (q - nf) * (tinf - s).ln())
}

pub fn oracle_double_phase(n: usize, p: f64, q: f64, a: f64, t: f64) -> Result<ExtReal> {
    if t <= 0.0 {
        ln_oracle_double_phase(n, p, q, a, f64::NEG_INFINITY)?;
        return Ok(ExtReal::ZERO);
    }
    Ok(ExtReal::new(ln_oracle_double_phase(n, p, q, a, t.ln())?.exp()))
}

/// The variable-exponent oracle as a function of `(x, t)`.
pub struct VariableExponentOracle {
    pub n: usize,
    pub p: SpatialField,
    pub p_inf: f64,
}

impl VariableExponentOracle {
    pub fn new(n: usize, p: SpatialField) -> Result<VariableExponentOracle> {
        let p_inf = p
            .limit
            .ok_or_else(|| Error::Precondition("exponent field needs a declared limit p_inf".into()))?;
        check_ve(n, p_inf, p_inf)?;
        Ok(VariableExponentOracle { n, p, p_inf })
    }
}

impl YoungFn for VariableExponentOracle {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        oracle_variable_exponent(self.n, self.p_inf, self.p.value(x), t).unwrap_or(ExtReal::INFINITY)
    }
    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        ln_oracle_variable_exponent(self.n, self.p_inf, self.p.value(x), u).unwrap_or(f64::INFINITY)
    }
    fn label(&self) -> String {
        format!("variable-exponent-oracle(p_inf={})", self.p_inf)
    }
}

/// The double-phase oracle as a function of `(x, t)`.
pub struct DoublePhaseOracle {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub a: SpatialField,
}

impl YoungFn for DoublePhaseOracle {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[f64], t: f64) -> ExtReal {
        oracle_double_phase(self.n, self.p, self.q, self.a.value(x), t).unwrap_or(ExtReal::INFINITY)
    }
    fn ln_eval_exp(&self, x: &[f64], u: f64) -> f64 {
        ln_oracle_double_phase(self.n, self.p, self.q, self.a.value(x), u).unwrap_or(f64::INFINITY)
    }
    fn label(&self) -> String {
        format!("double-phase-oracle(p={}, q={})", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_exponent_branches_join_at_t0() {
        let t0 = variable_exponent_t0(3, 2.0);
        assert!((t0 - 2f64.powf(2.0 / 3.0)).abs() < 1e-14);
        let below = oracle_variable_exponent(3, 2.0, 2.0, t0 * (1.0 - 1e-12)).unwrap().value();
        let above = oracle_variable_exponent(3, 2.0, 2.0, t0).unwrap().value();
        assert!((below - 1.0).abs() < 1e-9 && (above - 1.0).abs() < 1e-12);
        // With p = p_inf both branches are t^6 / 16.
        let t = 5.0;
        let v = oracle_variable_exponent(3, 2.0, 2.0, t).unwrap().value();
        assert!((v / (t.powi(6) / 16.0) - 1.0).abs() < 1e-12);
        // The unit-power factor breaks continuity at t_0.
        let printed = variable_exponent_unit_power_branch(3, 2.0, 2.0, t0).unwrap();
        assert!((printed - 1.0).abs() > 0.1);
    }

    #[test]
    fn regimes_at_and_above_n() {
        let (n, pinf) = (3, 2.0);
        let t0 = variable_exponent_t0(n, pinf);
        let v = ln_oracle_variable_exponent(n, pinf, 3.0, t0.ln()).unwrap();
        assert!(v.abs() < 1e-12);
        let tinf = variable_exponent_t_inf(n, pinf, 4.0);
        assert!(oracle_variable_exponent(n, pinf, 4.0, tinf).unwrap().is_infinite());
        assert!(oracle_variable_exponent(n, pinf, 4.0, 0.99 * tinf).unwrap().is_finite());
        assert!(matches!(oracle_variable_exponent(3, 3.0, 2.0, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn double_phase_examples() {
        let v = oracle_double_phase(3, 2.0, 2.5, 1.0, 10.0).unwrap().value();
        assert!((v / (1e6 + 1e15) - 1.0).abs() < 1e-12);
        let v = oracle_double_phase(3, 2.0, 2.5, 0.0, 10.0).unwrap().value();
        assert!((v / 1e6 - 1.0).abs() < 1e-12);
        let v = oracle_double_phase(3, 2.0, 3.0, 1e-6, 2.0).unwrap().value();
        assert!((v / 64.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_inf_closed_case() {
        // p = 1, q = 3, n = 2: int_0^inf ds / (1 + s^2) = pi / 2.
        let t = double_phase_t_inf(2, 1.0, 3.0).value();
        assert!((t - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-9, "{t}");
    }
}
