//! Inverses, conjugates, limits at infinity and equivalence estimators.

use serde::Serialize;

use super::{origin, YoungFn};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::sample::sphere_directions;

/// Checked evaluation: validates `t` and the spatial fields at `x`.
pub fn eval_phi<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> Result<ExtReal> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::Argument(format!("t must be a finite nonnegative number, got {t}")));
    }
    phi.check_point(x)?;
    Ok(phi.eval(x, t))
}

/// Checked left-continuous inverse `inf{tau : phi(x, tau) >= t}`.
pub fn left_inverse<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> Result<ExtReal> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("t must be nonnegative, got {t}")));
    }
    phi.check_point(x)?;
    Ok(phi.inverse(x, t))
}

/// Relative width at which the log-space bisection stops.
const INV_REL: f64 = 1e-14;

/// Brackets `ln` of the left-continuous inverse by steps `e^{+-s}`, `s = 1, 2, 4, ...`.
///
/// `Err` carries the answer when no finite bracket exists.
fn bracket_ln_inverse<R: Fn(f64) -> bool>(reaches: R) -> std::result::Result<(f64, f64), ExtReal> {
    if reaches(1.0) {
        let mut hi = 0.0f64;
        let mut s = 1.0f64;
        loop {
            let u = -s;
            if u < -700.0 {
                // phi(x, tau) >= t for every tau > 0 we can represent.
                return Err(ExtReal::ZERO);
            }
            if reaches(u.exp()) {
                hi = u;
                s *= 2.0;
            } else {
                return Ok((u, hi));
            }
        }
    } else {
        let mut lo = 0.0f64;
        let mut s = 1.0f64;
        loop {
            let u = s;
            if u > 700.0 {
                return Err(ExtReal::INFINITY);
            }
            if reaches(u.exp()) {
                return Ok((lo, u));
            }
            lo = u;
            s *= 2.0;
        }
    }
}

/// Generic left-continuous inverse by bracketing and bisection in `ln tau`.
///
/// Returns the upper end of the final bracket, so `phi(x, result) >= t`
/// always holds. The result is `+inf` only when `phi(x, .)` never reaches `t`.
pub fn bisect_inverse<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> ExtReal {
    if t <= 0.0 {
        return ExtReal::ZERO;
    }
    if t.is_infinite() {
        return ExtReal::INFINITY;
    }
    let reaches = |tau: f64| phi.eval(x, tau).value() >= t;
    let (mut lo, mut hi) = match bracket_ln_inverse(reaches) {
        Ok(b) => b,
        Err(v) => return v,
    };
    while hi - lo > INV_REL {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if reaches(m.exp()) {
            hi = m;
        } else {
            lo = m;
        }
    }
    ExtReal::new(hi.exp())
}

/// As [`bisect_inverse`], for functions that are expensive to evaluate.
///
/// Regula falsi (Illinois variant) on `g(u) = ln phi(x, e^u) - ln t`, falling
/// back to bisection while either end of the bracket has `phi = 0` or `inf`.
/// A Young function has `d ln phi / d ln tau >= 1` where it is positive, so
/// `0 <= g(hi) <= INV_REL` already puts `hi` within `INV_REL` of the root.
pub fn secant_inverse<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> ExtReal {
    if t <= 0.0 {
        return ExtReal::ZERO;
    }
    if t.is_infinite() {
        return ExtReal::INFINITY;
    }
    let lt = t.ln();
    let g = |u: f64| phi.eval(x, u.exp()).value().ln() - lt;
    let (mut lo, mut hi) = match bracket_ln_inverse(|tau| phi.eval(x, tau).value() >= t) {
        Ok(b) => b,
        Err(v) => return v,
    };
    let (mut glo, mut ghi) = (g(lo), g(hi));
    let mut side = 0i8;
    for _ in 0..400 {
        if hi - lo <= INV_REL || (0.0..=INV_REL).contains(&ghi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let m = if glo.is_finite() && ghi.is_finite() && ghi > glo {
            let c = hi - ghi * (hi - lo) / (ghi - glo);
            if c > lo && c < hi {
                c
            } else {
                mid
            }
        } else {
            mid
        };
        if m <= lo || m >= hi {
            break;
        }
        let gm = g(m);
        if gm >= 0.0 {
            hi = m;
            ghi = gm;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        } else {
            lo = m;
            glo = gm;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        }
    }
    ExtReal::new(hi.exp())
}

/// Young conjugate `sup_{tau >= 0} (tau t - phi(x, tau))`, closed form when available.
pub fn young_conjugate<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> ExtReal {
    if t <= 0.0 {
        return ExtReal::ZERO;
    }
    if let Some(v) = phi.conjugate_closed_form(x, t) {
        return v;
    }
    young_conjugate_numeric(phi, x, t)
}

/// Grid points per decade of the coarse scan.
const SCAN_PER_DECADE: i32 = 4;
/// The scan starts on `[1e-8, 1e8]` and is extended a decade at a time up to `1e±300`.
const SCAN_START_DECADES: i32 = 8;
const SCAN_MAX_DECADES: i32 = 300;

/// Numerical Legendre transform.
///
/// The objective `g(tau) = tau t - phi(x, tau)` is concave, so the argmax of a
/// coarse log grid brackets the true maximizer between its two neighbours.
/// The grid starts on `[1e-8, 1e8]` and is extended by whole decades while the
/// argmax sits on an end point; the sup is declared `+inf` when `g` still
/// increases over the last decade at `1e300`. Golden-section search refines
/// the bracket.
pub fn young_conjugate_numeric<F: YoungFn + ?Sized>(phi: &F, x: &[f64], t: f64) -> ExtReal {
    if t <= 0.0 {
        return ExtReal::ZERO;
    }
    let g = |tau: f64| -> f64 {
        let v = phi.eval(x, tau).value();
        if v.is_infinite() {
            f64::NEG_INFINITY
        } else {
            tau * t - v
        }
    };
    let tau_at = |k: i32| 10f64.powf(k as f64 / SCAN_PER_DECADE as f64);
    let mut ks: std::collections::VecDeque<(i32, f64)> = (-SCAN_START_DECADES * SCAN_PER_DECADE..=SCAN_START_DECADES * SCAN_PER_DECADE)
        .map(|k| (k, g(tau_at(k))))
        .collect();
    let argmax = |ks: &std::collections::VecDeque<(i32, f64)>| {
        let mut best = 0;
        for i in 1..ks.len() {
            if ks[i].1 > ks[best].1 {
                best = i;
            }
        }
        best
    };
    let mut best = argmax(&ks);
    while best == ks.len() - 1 {
        let top = ks.back().unwrap().0;
        if top >= SCAN_MAX_DECADES * SCAN_PER_DECADE {
            let decade_ago = ks[ks.len() - 1 - SCAN_PER_DECADE as usize].1;
            if ks[best].1 > decade_ago {
                return ExtReal::INFINITY;
            }
            break;
        }
        for k in top + 1..=top + SCAN_PER_DECADE {
            ks.push_back((k, g(tau_at(k))));
        }
        best = argmax(&ks);
    }
    while best == 0 {
        let bot = ks.front().unwrap().0;
        if bot <= -SCAN_MAX_DECADES * SCAN_PER_DECADE {
            break;
        }
        for k in (bot - SCAN_PER_DECADE..bot).rev() {
            ks.push_front((k, g(tau_at(k))));
        }
        best = argmax(&ks);
    }
    let grid_best = ks[best].1;
    if grid_best == f64::INFINITY {
        return ExtReal::INFINITY;
    }
    let a = if best == 0 { 0.0 } else { tau_at(ks[best - 1].0) };
    let b = if best + 1 == ks.len() { tau_at(ks[best].0) } else { tau_at(ks[best + 1].0) };
    let refined = golden_max(&g, a, b);
    ExtReal::new(refined.max(grid_best).max(0.0))
}

/// Maximum of a concave function on `[a, b]` by golden-section search.
fn golden_max<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * b.abs() {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

/// Radius schedule for the sphere-sup approximation of `phi_inf`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InfinitySchedule {
    /// Radii are `2^k` for `k = 0..=k_max`.
    pub k_max: u32,
    pub directions: usize,
    /// Relative change between the last two sphere sups tolerated as converged.
    pub tol: f64,
}

impl Default for InfinitySchedule {
    fn default() -> Self {
        InfinitySchedule {
            k_max: 20,
            directions: 64,
            tol: 1e-4,
        }
    }
}

/// `limsup_{|x|->inf} phi(x, t)`.
///
/// Uses the declared limit when the family has one; otherwise the sup over
/// sampled spheres `|x| = 2^k`, with a non-convergence error when the last two
/// sphere sups differ by more than `sched.tol` relative.
pub fn phi_infinity<F: YoungFn + ?Sized>(phi: &F, t: f64, sched: &InfinitySchedule) -> Result<ExtReal> {
    let n = phi.dim();
    if let Some(l) = phi.limit() {
        return Ok(l.eval(&origin(n), t));
    }
    if phi.is_x_independent() {
        return Ok(phi.eval(&origin(n), t));
    }
    sphere_sup_limit(phi, t, sched)
}

/// The sphere-sup approximation, ignoring any declared limit.
pub fn sphere_sup_limit<F: YoungFn + ?Sized>(phi: &F, t: f64, sched: &InfinitySchedule) -> Result<ExtReal> {
    let n = phi.dim();
    let dirs = sphere_directions(n, sched.directions);
    let sup_at = |r: f64| {
        dirs.iter()
            .map(|d| {
                let x: Vec<f64> = d.iter().map(|c| c * r).collect();
                phi.eval(&x, t)
            })
            .fold(ExtReal::ZERO, ExtReal::max)
    };
    let mut prev = sup_at(1.0);
    let mut last = prev;
    for k in 1..=sched.k_max {
        prev = last;
        last = sup_at(2f64.powi(k as i32));
    }
    let (a, b) = (prev.value(), last.value());
    let converged = (a.is_infinite() && b.is_infinite()) || (b - a).abs() <= sched.tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    if !converged {
        return Err(Error::NonConvergence { prev: a, last: b });
    }
    Ok(last)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EquivMode {
    /// `c1 phi <= psi <= c2 phi`.
    Approx,
    /// `phi(x, c1 t) <= psi(x, t) <= phi(x, c2 t)`.
    Simeq,
}

#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
    pub argmin: (Vec<f64>, f64),
    pub argmax: (Vec<f64>, f64),
}

/// Ratio with `0/0 = 1`.
pub(crate) fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else if a.is_infinite() && b.is_infinite() {
        f64::NAN
    } else {
        a / b
    }
}

/// Sampled equivalence constants between `phi` and `psi` over `xs x ts`.
pub fn estimate_equivalence<F, G>(phi: &F, psi: &G, mode: EquivMode, xs: &[Vec<f64>], ts: &[f64]) -> Result<Equivalence>
where
    F: YoungFn + ?Sized,
    G: YoungFn + ?Sized,
{
    if xs.is_empty() || ts.is_empty() {
        return Err(Error::Argument("empty sample for equivalence estimate".into()));
    }
    let mut eq = Equivalence {
        c1: f64::INFINITY,
        c2: 0.0,
        samples: 0,
        argmin: (vec![], f64::NAN),
        argmax: (vec![], f64::NAN),
    };
    for x in xs {
        for &t in ts {
            let r = match mode {
                EquivMode::Approx => ratio(psi.eval(x, t).value(), phi.eval(x, t).value()),
                EquivMode::Simeq => {
                    if t == 0.0 {
                        continue;
                    }
                    let v = psi.eval(x, t).value();
                    if v.is_infinite() {
                        f64::INFINITY
                    } else {
                        phi.inverse(x, v).value() / t
                    }
                }
            };
            if r.is_nan() {
                continue;
            }
            eq.samples += 1;
            if r < eq.c1 {
                eq.c1 = r;
                eq.argmin = (x.clone(), t);
            }
            if r > eq.c2 {
                eq.c2 = r;
                eq.argmax = (x.clone(), t);
            }
        }
    }
    if eq.samples == 0 || !(eq.c1 > 0.0) || !eq.c2.is_finite() {
        return Err(Error::NoFiniteConstants(format!(
            "sampled ratios span [{}, {}] over {} samples",
            eq.c1, eq.c2, eq.samples
        )));
    }
    Ok(eq)
}

#[derive(Clone, Debug, Serialize)]
pub struct Delta2Report {
    pub holds: bool,
    /// Sup of `phi(x, 2t) / phi(x, t)` over the fine ladder.
    pub c: f64,
    pub c_coarse: f64,
    pub worst_x: Vec<f64>,
    pub worst_t: f64,
}

/// Half-widths (in powers of two) of the coarse and fine t-ladders.
pub const DELTA2_COARSE: i32 = 20;
pub const DELTA2_FINE: i32 = 40;
/// Relative growth of the sup between the ladders still counted as stable.
pub const DELTA2_STABLE: f64 = 0.01;

/// Sampled Delta_2 check on the ladders `t = 2^{j/4}`, `|j| <= 4 * half_width`.
pub fn check_delta2<F: YoungFn + ?Sized>(phi: &F, xs: &[Vec<f64>]) -> Delta2Report {
    let sup = |half: i32| {
        let mut best = (0.0f64, vec![], f64::NAN);
        for x in xs {
            for j in -4 * half..=4 * half {
                let t = 2f64.powf(j as f64 / 4.0);
                let r = ratio(phi.eval(x, 2.0 * t).value(), phi.eval(x, t).value());
                let r = if r.is_nan() { f64::INFINITY } else { r };
                if r > best.0 || best.1.is_empty() {
                    best = (r, x.clone(), t);
                }
            }
        }
        best
    };
    let (c_coarse, _, _) = sup(DELTA2_COARSE);
    let (c, worst_x, worst_t) = sup(DELTA2_FINE);
    Delta2Report {
        holds: c.is_finite() && c <= c_coarse * (1.0 + DELTA2_STABLE),
        c,
        c_coarse,
        worst_x,
        worst_t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpatialField;
    use crate::gyf::Gyf;

    #[test]
    fn secant_and_bisection_agree() {
        let dp = Gyf::double_phase(2, 1.5, 2.5, a(0.3));
        let conj = crate::gyf::Conjugate { base: std::sync::Arc::new(dp) };
        let x = [0.1, -0.2];
        for &t in &[1e-6, 0.01, 1.0, 37.0, 1e5] {
            let s = secant_inverse(&conj, &x, t).value();
            let b = bisect_inverse(&conj, &x, t).value();
            assert!((s / b - 1.0).abs() < 1e-12, "t={t}: {s} vs {b}");
            assert!(conj.eval(&x, s).value() >= t);
        }
        assert_eq!(secant_inverse(&conj, &x, 0.0).value(), 0.0);
    }

    fn a(v: f64) -> SpatialField {
        SpatialField::constant("a", v)
    }

    #[test]
    fn conjugate_examples() {
        let x = [0.0];
        let half_square = Gyf::scaled_power(1, 0.5, 2.0);
        assert!((young_conjugate(&half_square, &x, 3.0).value() - 4.5).abs() < 1e-14);
        assert!((young_conjugate_numeric(&half_square, &x, 3.0).value() - 4.5).abs() < 1e-12);
        let id = Gyf::power(1, 1.0);
        assert_eq!(young_conjugate(&id, &x, 0.5).value(), 0.0);
        assert!(young_conjugate(&id, &x, 2.0).is_infinite());
        assert_eq!(young_conjugate_numeric(&id, &x, 0.5).value(), 0.0);
        assert!(young_conjugate_numeric(&id, &x, 2.0).is_infinite());
    }

    #[test]
    fn conjugate_of_slow_power_has_far_maximizer() {
        // t^1.05 at t = 2: maximizer near (2/1.05)^20, far beyond 1e8.
        let g = Gyf::power(1, 1.05);
        let x = [0.0];
        let exact = power_conj(1.05, 2.0);
        let num = young_conjugate_numeric(&g, &x, 2.0).value();
        assert!((num / exact - 1.0).abs() < 1e-10, "{num} vs {exact}");
    }

    fn power_conj(p: f64, t: f64) -> f64 {
        // maximizer (t/p)^{1/(p-1)}
        (p - 1.0) * (t / p).powf(p / (p - 1.0))
    }

    #[test]
    fn equivalence_examples() {
        let xs = vec![vec![0.0]];
        let ts: Vec<f64> = crate::sample::log_space(1e-3, 1e3, 13);
        let phi = Gyf::power(1, 2.0);
        let e = estimate_equivalence(&phi, &Gyf::scaled_power(1, 3.0, 2.0), EquivMode::Approx, &xs, &ts).unwrap();
        assert!((e.c1 - 3.0).abs() < 1e-12 && (e.c2 - 3.0).abs() < 1e-12);
        let e = estimate_equivalence(&phi, &Gyf::scaled_power(1, 9.0, 2.0), EquivMode::Simeq, &xs, &ts).unwrap();
        assert!((e.c1 - 3.0).abs() < 1e-12 && (e.c2 - 3.0).abs() < 1e-12);
        assert!(estimate_equivalence(&phi, &Gyf::power(1, 3.0), EquivMode::Approx, &xs, &[]).is_err());
        assert!(estimate_equivalence(&phi, &Gyf::power(1, 3.0), EquivMode::Approx, &xs, &ts).is_ok());
    }

    #[test]
    fn delta2_examples() {
        let xs = vec![vec![0.0]];
        let r = check_delta2(&Gyf::power(1, 2.0), &xs);
        assert!(r.holds && (r.c - 4.0).abs() < 1e-12);
        let r = check_delta2(&Gyf::double_phase(1, 2.0, 3.0, a(1.0)), &xs);
        assert!(r.holds && (r.c - 8.0).abs() < 1e-9, "{}", r.c);
        let r = check_delta2(&Gyf::orlicz(1, "exp(t) - 1").unwrap(), &xs);
        assert!(!r.holds);
    }

    #[test]
    fn phi_infinity_examples() {
        let p = SpatialField::expression("p", "2 + 1/(1 + abs(x))", 2, 2.0, 3.0, Some(2.0)).unwrap();
        let g = Gyf::variable_exponent(2, p.clone());
        let s = InfinitySchedule::default();
        assert_eq!(phi_infinity(&g, 3.0, &s).unwrap().value(), 9.0);
        let dp = Gyf::double_phase(2, 2.0, 3.0, SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, None).unwrap());
        assert!((phi_infinity(&dp, 2.0, &s).unwrap().value() - 4.0).abs() < 1e-12);
        // An oscillating exponent has no limit along the dyadic radii.
        let q = SpatialField::expression("p", "2 + 0.5*sin(abs(x))", 2, 1.5, 2.5, None).unwrap();
        let vg = Gyf::variable_exponent(2, q);
        assert!(matches!(phi_infinity(&vg, 3.0, &s), Err(Error::NonConvergence { .. })));
    }
}
