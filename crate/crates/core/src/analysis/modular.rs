//! Modulars, Luxemburg norms, the Hölder inequality and norms of ball indicators.

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::gyf::{Conjugate, YoungFn};
use crate::report::{Table, VerificationReport};

use super::domain::{Domain, DomainKind};
use super::grid::{Grid, GridFunction};

/// Relative accuracy of [`luxemburg_norm`].
pub const EPS_NORM: f64 = 1e-12;

/// `int phi(x, |u(x)|) dx` with the grid weights.
pub fn modular<F: YoungFn + ?Sized>(phi: &F, u: &GridFunction) -> ExtReal {
    modular_scaled(phi, u, 1.0)
}

/// `int phi(x, |u(x)| / lambda) dx`.
pub fn modular_scaled<F: YoungFn + ?Sized>(phi: &F, u: &GridFunction, lambda: f64) -> ExtReal {
    let mut s = 0.0;
    for ((x, w), v) in u.grid.nodes.iter().zip(&u.grid.weights).zip(&u.values) {
        if *w == 0.0 || *v == 0.0 {
            continue;
        }
        let p = phi.eval(x, v.abs() / lambda);
        if p.is_infinite() {
            return ExtReal::INFINITY;
        }
        s += w * p.value();
    }
    ExtReal::new(s)
}

/// `inf { lambda > 0 : m(lambda) <= 1 }` for a nonincreasing `m`, by doubling
/// to a bracket and bisecting `ln lambda`. `start` seeds the search.
///
/// Returns the upper end of the final bracket, so `m(result) <= 1` always.
pub fn luxemburg_by<M: FnMut(f64) -> ExtReal>(mut m: M, start: f64) -> Result<f64> {
    let start = if start > 0.0 && start.is_finite() { start } else { 1.0 };
    let ok = |v: ExtReal| v.is_finite() && v.value() <= 1.0;
    let (mut lo, mut hi);
    if ok(m(start)) {
        hi = start;
        lo = start;
        let mut steps = 0;
        loop {
            lo *= 0.5;
            if !ok(m(lo)) {
                break;
            }
            hi = lo;
            steps += 1;
            if steps > 2000 || lo == 0.0 {
                return Ok(0.0);
            }
        }
    } else {
        lo = start;
        hi = start;
        let mut any_finite = m(start).is_finite();
        let mut steps = 0;
        loop {
            hi *= 2.0;
            let v = m(hi);
            any_finite |= v.is_finite();
            if ok(v) {
                break;
            }
            lo = hi;
            steps += 1;
            if steps > 2000 || hi.is_infinite() {
                return Err(if any_finite {
                    Error::NonConvergence { prev: lo, last: hi }
                } else {
                    Error::NoFiniteNorm
                });
            }
        }
    }
    while hi - lo > EPS_NORM * hi {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(m(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The Luxemburg norm `inf { lambda > 0 : int phi(x, |u|/lambda) <= 1 }`.
pub fn luxemburg_norm<F: YoungFn + ?Sized>(phi: &F, u: &GridFunction) -> Result<f64> {
    if u.is_zero() {
        return Ok(0.0);
    }
    luxemburg_by(|l| modular_scaled(phi, u, l), u.max_abs())
}

/// `int |u v| <= 2 ||u||_phi ||v||_{phi~}`, reporting `lhs / rhs` as the constant.
pub fn check_holder(phi: Arc<dyn YoungFn>, u: &GridFunction, v: &GridFunction) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new("holder", "int |u v| <= 2 ||u||_phi ||v||_conj(phi)");
    let lhs = u.mul(v)?.abs().integral();
    let nu = luxemburg_norm(phi.as_ref(), u)?;
    let conj = Conjugate { base: phi };
    let nv = luxemburg_norm(&conj, v)?;
    let rhs = 2.0 * nu * nv;
    rep.table = Table::new(["lhs_int_abs_uv", "rhs_2_norm_u_norm_v", "norm_u", "norm_v_conjugate"]);
    rep.table.push(vec![lhs, rhs, nu, nv]);
    rep.samples = u.values.len();
    rep.tolerance = 1e-9;
    rep.max_violation = if lhs > rhs { (lhs - rhs) / rhs.max(f64::MIN_POSITIVE) } else { 0.0 };
    rep.constant = Some(if rhs > 0.0 { lhs / rhs } else { 0.0 });
    rep.set("norm_u", nu);
    rep.set("norm_v_conjugate", nv);
    rep.pass = rep.max_violation <= rep.tolerance;
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Norms of `chi_B` in `L^phi` and `L^{phi~}` against `1/(beta phi^{-1}(x, 1/|B|))`
/// and `2/(beta phi~^{-1}(x, 1/|B|))`, for a ball `B` containing `x`.
///
/// x-dependent functions are integrated over a tensor grid with `m` cells per axis.
pub fn char_ball_norm_bounds(phi: Arc<dyn YoungFn>, ball: &Domain, x: &[f64], beta: f64, m: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    if !matches!(ball.kind, DomainKind::Ball { .. }) || !ball.contains(x) {
        return Err(Error::Precondition("char_ball_norm_bounds needs a ball containing x".into()));
    }
    let mut rep = VerificationReport::new(
        "ball-indicator-norms",
        "||chi_B||_phi <= 1/(beta phi^-1(x,1/|B|)), ||chi_B||_conj(phi) <= 2/(beta conj(phi)^-1(x,1/|B|))",
    );
    let vol = ball.measure();
    let grid = if phi.is_x_independent() { Grid::tensor(ball, 1)? } else { Grid::tensor(ball, m)? };
    let chi = GridFunction::from_fn(Arc::new(grid), |_| 1.0);
    let conj = Conjugate { base: phi.clone() };
    let norm = luxemburg_norm(phi.as_ref(), &chi)?;
    let norm_c = luxemburg_norm(&conj, &chi)?;
    let bound = 1.0 / (beta * phi.inverse(x, 1.0 / vol).value());
    let bound_c = 2.0 / (beta * conj.inverse(x, 1.0 / vol).value());
    rep.table = Table::new(["ball_measure", "norm_chi", "bound", "norm_chi_conjugate", "bound_conjugate"]);
    rep.table.push(vec![vol, norm, bound, norm_c, bound_c]);
    let viol = |a: f64, b: f64| if a > b { (a - b) / b } else { 0.0 };
    rep.tolerance = 1e-6;
    rep.max_violation = viol(norm, bound).max(viol(norm_c, bound_c));
    rep.constant = Some((norm / bound).max(norm_c / bound_c));
    rep.samples = chi.values.len();
    rep.pass = rep.max_violation <= rep.tolerance;
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}
