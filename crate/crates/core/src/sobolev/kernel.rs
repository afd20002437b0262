//! The kernels `psi`, `lambda` and `omega` built from the conjugate of a
//! normalized function, and the comparison `omega ~ k H`.
//!
//! `psi(x, t) = sigma t^m int_0^t phi~(x, k tau) tau^{-1-m} dtau` with `m = n/(n-alpha)`,
//! `lambda(x, delta) = 1 / (delta^{n-alpha} psi^{-1}(x, delta^{-n}))`,
//! `omega(x, t) = lambda(x, phi(x, t)^{-1/n})`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use super::SobolevConjugate;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geom::omega;
use crate::gyf::{ln_add_exp, young_conjugate, YoungFn};
use crate::normalize::{key, SNAP};
use crate::report::{Table, VerificationReport};

/// `ln tau` range of the `psi` tabulation.
const V_MIN: f64 = -18.420680743952367; // ln 1e-8
const V_MAX: f64 = 18.420680743952367;

struct PsiTable {
    v: Vec<f64>,
    /// `ln phi~(x, k e^v)`, `-inf` where the conjugate vanishes.
    ln_conj: Vec<f64>,
    /// `ln int_{-inf}^{v_i} phi~(x, k e^w) e^{-m w} dw`.
    ln_int: Vec<f64>,
    /// Slope of `ln_conj` in `v` beyond the last node.
    top_slope: f64,
}

/// `int_{v0}^{v1} exp(a + s (w - v0)) dw` in log form.
fn ln_exp_piece(a: f64, s: f64, h: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if (s * h).abs() < 1e-12 {
        return a + h.ln();
    }
    if s > 0.0 {
        a + s * h + (-(-s * h).exp_m1()).ln() - s.ln()
    } else {
        a + (-(s * h).exp_m1()).ln() - (-s).ln()
    }
}

/// `psi`, `lambda`, `omega` for a normalized base.
pub struct KernelFns {
    pub base: Arc<dyn YoungFn>,
    pub alpha: f64,
    pub k: f64,
    pub sigma: f64,
    /// Tabulation nodes per decade of `tau`.
    pub per_decade: usize,
    n: f64,
    cache: RwLock<HashMap<Vec<i64>, std::result::Result<Arc<PsiTable>, Error>>>,
}

impl KernelFns {
    /// Smallest admissible constants: `k = 4/beta`, `sigma = omega_n max(2^{-n}, n/(n-alpha))`.
    pub fn new(base: Arc<dyn YoungFn>, alpha: f64, beta: f64) -> Result<KernelFns> {
        let n = base.dim();
        let nf = n as f64;
        if !(alpha > 0.0 && alpha < nf) {
            return Err(Error::Argument(format!("alpha must lie in (0, {n}), got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Argument(format!("beta must lie in (0, 1], got {beta}")));
        }
        let sigma = omega(n) * 2f64.powi(-(n as i32)).max(nf / (nf - alpha));
        Self::with_constants(base, alpha, 4.0 / beta, sigma)
    }

    pub fn with_constants(base: Arc<dyn YoungFn>, alpha: f64, k: f64, sigma: f64) -> Result<KernelFns> {
        let nf = base.dim() as f64;
        if !(alpha > 0.0 && alpha < nf) {
            return Err(Error::Argument(format!("alpha must lie in (0, {nf}), got {alpha}")));
        }
        Ok(KernelFns {
            base,
            alpha,
            k,
            sigma,
            per_decade: 16,
            n: nf,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Same kernels on a tabulation with `per_decade` nodes per decade.
    pub fn with_resolution(self, per_decade: usize) -> KernelFns {
        KernelFns {
            per_decade: per_decade.max(2),
            cache: RwLock::new(HashMap::new()),
            ..self
        }
    }

    /// `m = n / (n - alpha)`.
    pub fn m(&self) -> f64 {
        self.n / (self.n - self.alpha)
    }

    fn build(&self, x: &[f64]) -> Result<PsiTable> {
        let decades = (V_MAX - V_MIN) / std::f64::consts::LN_10;
        let count = (decades * self.per_decade as f64).round() as usize + 1;
        let v: Vec<f64> = (0..count).map(|i| V_MIN + (V_MAX - V_MIN) * i as f64 / (count - 1) as f64).collect();
        let ln_conj: Vec<f64> = v
            .iter()
            .map(|&w| young_conjugate(self.base.as_ref(), x, self.k * w.exp()).ln())
            .collect();
        if ln_conj.contains(&f64::INFINITY) {
            return Err(Error::Divergent(format!("the conjugate of the base is infinite on the tabulated range at x = {x:?}")));
        }
        let m = self.m();
        let e: Vec<f64> = v.iter().zip(&ln_conj).map(|(w, l)| l - m * w).collect();
        // Lower tail from the first two nodes, closed as an exponential.
        let first = if e[0] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let s = (e[1] - e[0]) / (v[1] - v[0]);
            if !(s > 0.0) {
                return Err(Error::Divergent(format!(
                    "int_0 phi~(x, k tau) tau^(-1-m) dtau diverges at 0 for x = {x:?}: phi~ is too flat near 0"
                )));
            }
            e[0] - s.ln()
        };
        let mut ln_int = vec![first];
        for i in 1..v.len() {
            let h = v[i] - v[i - 1];
            let piece = if e[i - 1] == f64::NEG_INFINITY {
                // Conjugate vanishes at the left node; bound the piece by the right end.
                if e[i] == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    ln_exp_piece(e[i], 0.0, h)
                }
            } else {
                ln_exp_piece(e[i - 1], (e[i] - e[i - 1]) / h, h)
            };
            ln_int.push(ln_add_exp(ln_int[i - 1], piece));
        }
        let l = v.len() - 1;
        let top_slope = (ln_conj[l] - ln_conj[l - 1]) / (v[l] - v[l - 1]);
        Ok(PsiTable {
            v,
            ln_conj,
            ln_int,
            top_slope,
        })
    }

    fn table(&self, x: &[f64]) -> Result<Arc<PsiTable>> {
        let k = key(x);
        if let Some(t) = self.cache.read().unwrap().get(&k) {
            return t.clone();
        }
        let xs: Vec<f64> = k.iter().map(|&i| i as f64 / SNAP).collect();
        let built = self.build(&xs).map(Arc::new);
        self.cache.write().unwrap().insert(k, built.clone());
        built
    }

    /// `ln int_{-inf}^{w} phi~(x, k e^v) e^{-m v} dv`.
    fn ln_integral(&self, tab: &PsiTable, w: f64) -> f64 {
        let m = self.m();
        let last = tab.v.len() - 1;
        let e = |i: usize| tab.ln_conj[i] - m * tab.v[i];
        if w <= tab.v[0] {
            if e(0) == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            let s = (e(1) - e(0)) / (tab.v[1] - tab.v[0]);
            return e(0) + s * (w - tab.v[0]) - s.ln();
        }
        if w >= tab.v[last] {
            let s = tab.top_slope - m;
            return ln_add_exp(tab.ln_int[last], ln_exp_piece(e(last), s, w - tab.v[last]));
        }
        let i = tab.v.partition_point(|&v| v <= w) - 1;
        let h = tab.v[i + 1] - tab.v[i];
        if e(i) == f64::NEG_INFINITY {
            return tab.ln_int[i];
        }
        let s = (e(i + 1) - e(i)) / h;
        ln_add_exp(tab.ln_int[i], ln_exp_piece(e(i), s, w - tab.v[i]))
    }

    /// `ln psi(x, e^w)`.
    pub fn ln_psi_exp(&self, x: &[f64], w: f64) -> Result<f64> {
        let tab = self.table(x)?;
        Ok(self.sigma.ln() + self.m() * w + self.ln_integral(&tab, w))
    }

    pub fn psi(&self, x: &[f64], t: f64) -> Result<ExtReal> {
        if t <= 0.0 {
            return Ok(ExtReal::ZERO);
        }
        Ok(ExtReal::new(self.ln_psi_exp(x, t.ln())?.exp()))
    }

    /// `ln psi^{-1}(x, e^y)` by bisection on the monotone `ln psi`.
    pub fn ln_psi_inverse(&self, x: &[f64], y: f64) -> Result<f64> {
        let tab = self.table(x)?;
        let f = |w: f64| self.sigma.ln() + self.m() * w + self.ln_integral(&tab, w);
        let (mut a, mut b) = (V_MIN, V_MAX);
        let mut step = 1.0;
        while f(a) >= y {
            a -= step;
            step *= 2.0;
            if step > 1e6 {
                return Ok(f64::NEG_INFINITY);
            }
        }
        step = 1.0;
        while f(b) < y {
            b += step;
            step *= 2.0;
            if step > 1e6 {
                return Ok(f64::INFINITY);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if f(mid) < y {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(b)
    }

    /// `lambda(x, delta)`; `delta = 0` gives `(sigma int_0^inf phi~(x, k tau) tau^{-1-m} dtau)^{(n-alpha)/n}`.
    pub fn lambda(&self, x: &[f64], delta: f64) -> Result<ExtReal> {
        let p = (self.n - self.alpha) / self.n;
        if delta <= 0.0 {
            let tab = self.table(x)?;
            let s = tab.top_slope - self.m();
            if s >= 0.0 {
                return Ok(ExtReal::INFINITY);
            }
            let l = self.ln_integral(&tab, f64::MAX.ln());
            return Ok(ExtReal::new((p * (self.sigma.ln() + l)).exp()));
        }
        let ld = delta.ln();
        let inv = self.ln_psi_inverse(x, -self.n * ld)?;
        Ok(ExtReal::new((-(self.n - self.alpha) * ld - inv).exp()))
    }

    /// `omega(x, t) = phi(x, t)^{(n-alpha)/n} / psi^{-1}(x, phi(x, t))`, in log form.
    pub fn ln_omega_exp(&self, x: &[f64], u: f64) -> Result<f64> {
        let lphi = self.base.ln_eval_exp(x, u);
        let inv = self.ln_psi_inverse(x, lphi)?;
        Ok((self.n - self.alpha) / self.n * lphi - inv)
    }

    pub fn omega(&self, x: &[f64], t: f64) -> Result<ExtReal> {
        if t <= 0.0 {
            self.table(x)?;
            return Ok(ExtReal::ZERO);
        }
        Ok(ExtReal::new(self.ln_omega_exp(x, t.ln())?.exp()))
    }
}

pub fn kernel_psi(kf: &KernelFns, x: &[f64], t: f64) -> Result<ExtReal> {
    kf.psi(x, t)
}

pub fn kernel_lambda(kf: &KernelFns, x: &[f64], delta: f64) -> Result<ExtReal> {
    kf.lambda(x, delta)
}

pub fn kernel_omega(kf: &KernelFns, x: &[f64], t: f64) -> Result<ExtReal> {
    kf.omega(x, t)
}

/// Sampled `psi(x, t) >= sigma phi~(x, kt/2) (2^m - 1)/m`; returns the smallest ratio lhs/rhs.
pub fn psi_lower_bound_ratio(kf: &KernelFns, xs: &[Vec<f64>], ts: &[f64]) -> Result<f64> {
    let m = kf.m();
    let c = kf.sigma * (2f64.powf(m) - 1.0) / m;
    let mut worst = f64::INFINITY;
    for x in xs {
        for &t in ts {
            let rhs = c * young_conjugate(kf.base.as_ref(), x, 0.5 * kf.k * t).value();
            if rhs > 0.0 {
                worst = worst.min(kf.psi(x, t)?.value() / rhs);
            }
        }
    }
    Ok(worst)
}

/// Empirical `c_1 = inf`, `c_2 = sup` of `omega(x, t) / (k H(x, t))`.
pub fn check_kernel_equivalence(kf: &KernelFns, sc: &SobolevConjugate, xs: &[Vec<f64>], ts: &[f64]) -> Result<VerificationReport> {
    if (kf.alpha - sc.alpha).abs() > 0.0 {
        return Err(Error::Argument("kernel and conjugate use different alpha".into()));
    }
    let start = Instant::now();
    let mut rep = VerificationReport::new("kernel-equivalence", "c1 k H(x, t) <= omega(x, t) <= c2 k H(x, t)");
    rep.table = Table::new(["x1", "t", "omega", "k_H", "ratio"]);
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for x in xs {
        for &t in ts {
            let lw = kf.ln_omega_exp(x, t.ln())?;
            let lh = sc.ln_h_exp(x, t.ln())?;
            let r = (lw - lh - kf.k.ln()).exp();
            c1 = c1.min(r);
            c2 = c2.max(r);
            rep.samples += 1;
            rep.table.push(vec![x.first().copied().unwrap_or(0.0), t, lw.exp(), kf.k * lh.exp(), r]);
        }
    }
    rep.set("c1", c1);
    rep.set("c2", c2);
    rep.set("k", kf.k);
    rep.set("sigma", kf.sigma);
    rep.constant = Some(c2 / c1);
    rep.pass = c1 > 0.0 && c2.is_finite() && c1 <= c2;
    rep.max_violation = if rep.pass { 0.0 } else { f64::INFINITY };
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyf::Gyf;

    #[test]
    fn power_psi_closed_form() {
        // phi = t^p, phi~ = (p-1)/p p^{-1/(p-1)} t^{p'}; psi = sigma k^{p'} c t^{p'} / (p' - m).
        let (p, n, alpha) = (1.5, 2usize, 1.0);
        let kf = KernelFns::new(Arc::new(Gyf::power(n, p)), alpha, 1.0).unwrap();
        let pp = p / (p - 1.0);
        let m = kf.m();
        let c = (p - 1.0) / p * p.powf(-1.0 / (p - 1.0));
        let x = [0.0, 0.0];
        for &t in &[1e-3f64, 0.5, 2.0, 40.0] {
            let want = kf.sigma * c * kf.k.powf(pp) * t.powf(pp) / (pp - m);
            let got = kf.psi(&x, t).unwrap().value();
            assert!((got / want - 1.0).abs() < 1e-9, "t={t}: {got} vs {want}");
            let back = kf.ln_psi_inverse(&x, want.ln()).unwrap().exp();
            assert!((back / t - 1.0).abs() < 1e-9);
        }
        assert!(psi_lower_bound_ratio(&kf, &[x.to_vec()], &[0.1, 1.0, 10.0]).unwrap() >= 1.0);
    }

    #[test]
    fn flat_conjugate_is_divergent() {
        // p = 2, n = 2: phi~ ~ t^2 and m = 2, the integral diverges logarithmically.
        let kf = KernelFns::new(Arc::new(Gyf::power(2, 2.0)), 1.0, 1.0).unwrap();
        assert!(matches!(kf.psi(&[0.0, 0.0], 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn lambda_is_nonincreasing_for_powers() {
        let kf = KernelFns::new(Arc::new(Gyf::power(2, 1.5)), 1.0, 1.0).unwrap();
        let x = [0.0, 0.0];
        let mut prev = f64::INFINITY;
        for k in -8..8 {
            let l = kf.lambda(&x, 2f64.powi(k)).unwrap().value();
            assert!(l <= prev * (1.0 + 1e-12));
            prev = l;
        }
    }

    #[test]
    fn power_kernel_ratio_is_constant() {
        let g: Arc<dyn YoungFn> = Arc::new(Gyf::power(2, 1.5));
        let kf = KernelFns::new(g.clone(), 1.0, 1.0).unwrap();
        let sc = SobolevConjugate::new(g, 1.0).unwrap();
        let rep = check_kernel_equivalence(&kf, &sc, &[vec![0.0, 0.0]], &crate::sample::log_space(1e-3, 1e3, 13)).unwrap();
        let (c1, c2) = (rep.get("c1").unwrap(), rep.get("c2").unwrap());
        assert!(rep.pass && c2 / c1 < 1.0 + 1e-6, "{c1} {c2}");
    }
}
