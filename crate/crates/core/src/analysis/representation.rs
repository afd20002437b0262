//! `u(x) = (1/(n omega_n)) int grad u(y) . (x - y) / |x - y|^n dy` in the plane.
//!
//! The integral over a square of `m x m` cells is a midpoint sum, with cells
//! cut by a gradient kink subsampled. The 5 x 5 cell block around `x` is done
//! in polar coordinates about `x`, where the integrand
//! `-grad u(x + rho w) . w` is bounded.

use std::sync::LazyLock;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::report::{Table, VerificationReport};

use super::testfn::RadialTest;

/// Relative tolerance of the representation check.
pub const EPS_REP: f64 = 1e-3;
/// Subsampling per axis of kink cells.
const SUB: usize = 8;
/// Cells on each side of the host cell integrated in polar form.
const BLOCK: i64 = 2;
/// Angular pieces per corner sector of the polar block.
const THETA_PIECES: usize = 16;

static GL: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| gauss_legendre(20));

fn gl_on<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let (xs, ws) = &*GL;
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    xs.iter().zip(ws).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// The right-hand side of the representation formula at `x`, with the
/// square `[-L, L]^2`, `L` the support radius of `u`, cut into `m x m` cells.
pub fn representation_value(u: &RadialTest, x: &[f64], m: usize) -> Result<f64> {
    if u.n != 2 || x.len() != 2 {
        return Err(Error::Argument("the representation check is implemented for n = 2".into()));
    }
    let l = u.support();
    if l == 0.0 {
        return Ok(0.0);
    }
    let h = 2.0 * l / m as f64;
    let kinks = u.kinks();
    let cell = |v: f64| ((v + l) / h).floor() as i64;
    let (hx, hy) = (cell(x[0]), cell(x[1]));
    let in_block = |i: i64, j: i64| (i - hx).abs() <= BLOCK && (j - hy).abs() <= BLOCK;
    let mut grad = [0.0; 2];
    let term = |y0: f64, y1: f64, grad: &mut [f64; 2]| -> f64 {
        u.gradient(&[y0, y1], grad);
        let (d0, d1) = (x[0] - y0, x[1] - y1);
        (grad[0] * d0 + grad[1] * d1) / (d0 * d0 + d1 * d1)
    };
    let mut far = 0.0;
    for i in 0..m as i64 {
        let y0 = -l + (i as f64 + 0.5) * h;
        for j in 0..m as i64 {
            if in_block(i, j) {
                continue;
            }
            let y1 = -l + (j as f64 + 0.5) * h;
            // Distance range of the cell from the origin.
            let lo0 = (y0.abs() - 0.5 * h).max(0.0);
            let lo1 = (y1.abs() - 0.5 * h).max(0.0);
            let rmin = (lo0 * lo0 + lo1 * lo1).sqrt();
            let rmax = ((y0.abs() + 0.5 * h).powi(2) + (y1.abs() + 0.5 * h).powi(2)).sqrt();
            if rmin >= l {
                continue;
            }
            if kinks.iter().any(|&k| k >= rmin && k <= rmax) {
                let s = h / SUB as f64;
                let mut acc = 0.0;
                for a in 0..SUB {
                    for b in 0..SUB {
                        let z0 = y0 - 0.5 * h + (a as f64 + 0.5) * s;
                        let z1 = y1 - 0.5 * h + (b as f64 + 0.5) * s;
                        acc += term(z0, z1, &mut grad);
                    }
                }
                far += acc * s * s;
            } else {
                far += term(y0, y1, &mut grad) * h * h;
            }
        }
    }
    let bx = (-l + (hx - BLOCK) as f64 * h, -l + (hx + BLOCK + 1) as f64 * h);
    let by = (-l + (hy - BLOCK) as f64 * h, -l + (hy + BLOCK + 1) as f64 * h);
    let near = polar_block(u, x, bx, by, &kinks);
    Ok((far + near) / (2.0 * std::f64::consts::PI))
}

/// `int_Q grad u(y) . (x - y)/|x - y|^2 dy` over the rectangle `Q` containing `x`.
fn polar_block(u: &RadialTest, x: &[f64], bx: (f64, f64), by: (f64, f64), kinks: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let corners = [(bx.1, by.1), (bx.0, by.1), (bx.0, by.0), (bx.1, by.0)];
    let mut angles: Vec<f64> = corners
        .iter()
        .map(|(c0, c1)| {
            let a = (c1 - x[1]).atan2(c0 - x[0]);
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        })
        .collect();
    angles.push(0.0);
    angles.push(2.0 * PI);
    angles.sort_by(f64::total_cmp);
    let rho_max = |c: f64, s: f64| {
        let mut r = f64::INFINITY;
        if c > 1e-300 {
            r = r.min((bx.1 - x[0]) / c);
        } else if c < -1e-300 {
            r = r.min((bx.0 - x[0]) / c);
        }
        if s > 1e-300 {
            r = r.min((by.1 - x[1]) / s);
        } else if s < -1e-300 {
            r = r.min((by.0 - x[1]) / s);
        }
        r.max(0.0)
    };
    let xx = x[0] * x[0] + x[1] * x[1];
    let radial_line = |th: f64| -> f64 {
        let (s, c) = th.sin_cos();
        let rm = rho_max(c, s);
        let xw = x[0] * c + x[1] * s;
        let mut cuts = vec![0.0, rm];
        // Closest approach to the origin and crossings of kink circles.
        if -xw > 0.0 && -xw < rm {
            cuts.push(-xw);
        }
        for &k in kinks {
            let disc = xw * xw - xx + k * k;
            if disc > 0.0 {
                for r in [-xw - disc.sqrt(), -xw + disc.sqrt()] {
                    if r > 0.0 && r < rm {
                        cuts.push(r);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut g = [0.0; 2];
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                acc += gl_on(
                    |rho| {
                        u.gradient(&[x[0] + rho * c, x[1] + rho * s], &mut g);
                        -(g[0] * c + g[1] * s)
                    },
                    w[0],
                    w[1],
                );
            }
        }
        acc
    };
    let mut total = 0.0;
    for w in angles.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let step = (w[1] - w[0]) / THETA_PIECES as f64;
        for k in 0..THETA_PIECES {
            let a = w[0] + k as f64 * step;
            total += gl_on(radial_line, a, a + step);
        }
    }
    total
}

/// Compares the representation integral with `u(x)` at each point.
///
/// Relative error is measured against `max(|u(x)|, 1e-3 sup|u|)` so that
/// points near the edge of the support are not judged on noise.
pub fn representation_formula_check(u: &RadialTest, points: &[Vec<f64>], m: usize, tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new(
        "representation-formula",
        "u(x) = (1/(n omega_n)) int grad u(y).(x-y)/|x-y|^n dy",
    );
    rep.table = Table::new(["x1", "x2", "u_exact", "u_represented", "relative_error"]);
    let scale = u.value(&[0.0, 0.0]).abs().max(1e-300);
    let vals: Vec<Result<f64>> = points.par_iter().map(|x| representation_value(u, x, m)).collect();
    let mut worst = 0.0f64;
    for (x, v) in points.iter().zip(vals) {
        let v = v?;
        let e = u.value(x);
        let err = if e == 0.0 && v.abs() < 1e-12 { 0.0 } else { (v - e).abs() / e.abs().max(1e-3 * scale) };
        worst = worst.max(err);
        rep.table.push(vec![x[0], x[1], e, v, err]);
    }
    rep.samples = points.len();
    rep.tolerance = tol;
    rep.max_violation = worst;
    rep.constant = Some(worst);
    rep.set("cells_per_axis", m as f64);
    rep.note(format!("test function {}", u.profile.label()));
    rep.pass = worst <= tol;
    rep.runtime_s = start.elapsed().as_secs_f64();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testfn::Profile;

    #[test]
    fn tent_at_origin() {
        let u = RadialTest::new(2, Profile::Tent { radius: 1.0, height: 1.0 }).unwrap();
        let v = representation_value(&u, &[0.0, 0.0], 128).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn bump_off_center() {
        let u = RadialTest::new(2, Profile::Bump { radius: 1.0 }).unwrap();
        let rep = representation_formula_check(&u, &[vec![0.3, 0.1], vec![-0.2, 0.45]], 128, 1e-3).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
    }

    #[test]
    fn zero_function() {
        let u = RadialTest::new(2, Profile::Zero).unwrap();
        assert_eq!(representation_value(&u, &[0.2, 0.2], 16).unwrap(), 0.0);
    }
}
