//! Riesz potentials `I_alpha f(x) = int f(y) |x - y|^{alpha - n} dy` of grid functions.
//!
//! `f` is read as piecewise constant: constant on each tensor cell, or on each
//! spherical shell of a radial grid.

use std::sync::LazyLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::omega;
use crate::quad::{gauss_legendre, integrate};

use super::domain::dist;
use super::grid::{Grid, GridFunction, Layout};

static GL8: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| gauss_legendre(8));
static GL32: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| gauss_legendre(32));

/// Cells closer than this many half-widths to `x` are subdivided.
const NEAR: f64 = 6.0;

fn check_alpha(n: usize, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::Argument(format!("alpha must lie in (0, {n}), got {alpha}")));
    }
    Ok(())
}

/// `I_alpha f` at arbitrary points.
pub fn riesz_at(f: &GridFunction, alpha: f64, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let g = &f.grid;
    check_alpha(g.n(), alpha)?;
    if points.iter().any(|p| p.len() != g.n()) {
        return Err(Error::Argument(format!("evaluation points must have {} coordinates", g.n())));
    }
    Ok(match &g.layout {
        Layout::Radial { edges } => {
            let c = g.domain.center();
            points
                .par_iter()
                .map(|x| radial_value(g.n(), edges, &f.values, alpha, dist(x, c)))
                .collect()
        }
        Layout::Tensor { half, .. } => points.par_iter().map(|x| cell_sum(g, Some(half), &f.values, alpha, x)).collect(),
        Layout::Scattered => points.par_iter().map(|x| cell_sum(g, None, &f.values, alpha, x)).collect(),
    })
}

/// `I_alpha f` on the nodes of `target`.
pub fn riesz_potential(f: &GridFunction, alpha: f64, target: std::sync::Arc<Grid>) -> Result<GridFunction> {
    let v = riesz_at(f, alpha, &target.nodes)?;
    GridFunction::new(target, v)
}

/// `I_alpha f` for a radial grid function at distances `radii` from its center.
pub fn riesz_radial(f: &GridFunction, alpha: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let edges = f
        .grid
        .shell_edges()
        .ok_or_else(|| Error::Argument("riesz_radial needs a radial grid function".into()))?;
    check_alpha(f.grid.n(), alpha)?;
    Ok(radii.par_iter().map(|&s| radial_value(f.grid.n(), edges, &f.values, alpha, s)).collect())
}

/// `2^{alpha-n} int_{|y| >= s} f(y) |y|^{alpha-n} dy` for a radial grid function,
/// a pointwise lower bound for `I_alpha f` at radius `s` when `f >= 0`.
pub fn riesz_radial_lower_bound(f: &GridFunction, alpha: f64, s: f64) -> Result<f64> {
    let edges = f
        .grid
        .shell_edges()
        .ok_or_else(|| Error::Argument("riesz_radial_lower_bound needs a radial grid function".into()))?;
    let n = f.grid.n();
    check_alpha(n, alpha)?;
    let c = n as f64 * omega(n) / alpha;
    let mut acc = 0.0;
    for (e, v) in edges.windows(2).zip(&f.values) {
        if e[1] <= s || *v == 0.0 {
            continue;
        }
        let a = e[0].max(s);
        acc += v * c * (e[1].powf(alpha) - a.powf(alpha));
    }
    Ok(2f64.powf(alpha - n as f64) * acc)
}

/// `int_{|y|<rho} |y|^{alpha-n} dy`.
fn ball_kernel(n: usize, alpha: f64, rho: f64) -> f64 {
    n as f64 * omega(n) * rho.powf(alpha) / alpha
}

fn cell_sum(g: &Grid, half: Option<&Vec<Vec<f64>>>, values: &[f64], alpha: f64, x: &[f64]) -> f64 {
    let n = g.n();
    let e = alpha - n as f64;
    let mut acc = 0.0;
    for (j, (y, w)) in g.nodes.iter().zip(&g.weights).enumerate() {
        let v = values[j];
        if v == 0.0 || *w == 0.0 {
            continue;
        }
        let d = dist(x, y);
        let h = match half {
            Some(h) => &h[j][..],
            None => &[][..],
        };
        let size = match half {
            Some(_) => h.iter().fold(0.0f64, |m, v| m.max(*v)),
            None => 0.5 * (*w).powf(1.0 / n as f64),
        };
        if d > NEAR * size {
            acc += v * w * d.powf(e);
            continue;
        }
        if half.is_none() {
            // No cell geometry: an equal-volume ball when x is the node, the
            // node value otherwise.
            if d <= 1e-12 * size {
                let rho = crate::geom::ball_radius(n, *w);
                acc += v * ball_kernel(n, alpha, rho);
            } else {
                acc += v * w * d.powf(e);
            }
            continue;
        }
        acc += v * (w / h.iter().map(|t| 2.0 * t).product::<f64>()) * near_cell(n, alpha, x, y, h);
    }
    acc
}

/// `int_cell |x - y|^{alpha-n} dy` by subdivision; the subcell holding `x`
/// is replaced by the ball of equal volume centered at `x`.
fn near_cell(n: usize, alpha: f64, x: &[f64], c: &[f64], h: &[f64]) -> f64 {
    let s: usize = if n <= 2 { 9 } else { 5 };
    let e = alpha - n as f64;
    let sub: Vec<f64> = h.iter().map(|v| 2.0 * v / s as f64).collect();
    let vol: f64 = sub.iter().product();
    let inside = (0..n).all(|k| (x[k] - c[k]).abs() <= h[k]);
    let host: Vec<usize> = (0..n)
        .map(|k| (((x[k] - (c[k] - h[k])) / sub[k]).floor().max(0.0) as usize).min(s - 1))
        .collect();
    let mut acc = 0.0;
    let mut idx = vec![0usize; n];
    let mut y = vec![0.0; n];
    for _ in 0..s.pow(n as u32) {
        if inside && idx == host {
            acc += ball_kernel(n, alpha, crate::geom::ball_radius(n, vol));
        } else {
            for k in 0..n {
                y[k] = c[k] - h[k] + (idx[k] as f64 + 0.5) * sub[k];
            }
            acc += vol * dist(x, &y).powf(e);
        }
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < s {
                break;
            }
            idx[k] = 0;
        }
    }
    acc
}

/// Arithmetic-geometric mean.
pub(crate) fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    0.5 * (a + b)
}

/// Spherical mean kernel `K(s, r) = int_{S^{n-1}} |s e_1 - r w|^{alpha-n} dsigma(w)`.
pub fn sphere_kernel(n: usize, alpha: f64, s: f64, r: f64) -> f64 {
    let nf = n as f64;
    if s == 0.0 || r == 0.0 {
        let d = s.max(r);
        return nf * omega(n) * d.powf(alpha - nf);
    }
    match n {
        1 => (s - r).abs().powf(alpha - 1.0) + (s + r).powf(alpha - 1.0),
        2 if alpha == 1.0 => {
            // int_0^{2 pi} dtheta / |s e_1 - r w| = 4 K(k)/(s + r) = 2 pi / agm(s + r, |s - r|).
            let m = agm(s + r, (s - r).abs());
            if m == 0.0 {
                f64::INFINITY
            } else {
                2.0 * std::f64::consts::PI / m
            }
        }
        3 => {
            let pi = std::f64::consts::PI;
            if alpha == 1.0 {
                2.0 * pi / (s * r) * ((s + r) / (s - r).abs()).ln()
            } else {
                2.0 * pi / (s * r * (alpha - 1.0)) * ((s + r).powf(alpha - 1.0) - (s - r).abs().powf(alpha - 1.0))
            }
        }
        _ => {
            let area = (nf - 1.0) * omega(n - 1);
            let e = 0.5 * (alpha - nf);
            let f = |th: f64| (s * s + r * r - 2.0 * s * r * th.cos()).max(0.0).powf(e) * th.sin().powi(n as i32 - 2);
            let rel = (s - r).abs() / (s + r);
            let v = if rel > 0.2 {
                let (xs, ws) = &*GL32;
                let h = 0.5 * std::f64::consts::PI;
                xs.iter().zip(ws).map(|(x, w)| w * h * f(h * (x + 1.0))).sum()
            } else {
                integrate(f, 0.0, std::f64::consts::PI, 1e-10, 0.0).value
            };
            area * v
        }
    }
}

/// `int_a^b r^{n-1} K(s, r) dr`.
fn shell_kernel(n: usize, alpha: f64, s: f64, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    if s == 0.0 {
        return nf * omega(n) * (b.powf(alpha) - a.powf(alpha)) / alpha;
    }
    let k = |r: f64| r.powi(n as i32 - 1) * sphere_kernel(n, alpha, s, r);
    let w = b - a;
    if s < a - w || s > b + w {
        let (xs, ws) = &*GL8;
        let (m, h) = (0.5 * (a + b), 0.5 * w);
        return xs.iter().zip(ws).map(|(x, wt)| wt * h * k(m + h * x)).sum();
    }
    let piece = |lo: f64, hi: f64| if hi > lo { integrate(k, lo, hi, 1e-9, 1e-300).value } else { 0.0 };
    if s > a && s < b {
        piece(a, s) + piece(s, b)
    } else {
        piece(a, b)
    }
}

fn radial_value(n: usize, edges: &[f64], values: &[f64], alpha: f64, s: f64) -> f64 {
    edges
        .windows(2)
        .zip(values)
        .filter(|(_, v)| **v != 0.0)
        .map(|(e, v)| v * shell_kernel(n, alpha, s, e[0], e[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::domain::Domain;
    use std::sync::Arc;

    #[test]
    fn ball_indicator_at_center() {
        // int_{|y|<1} |y|^{alpha-n} dy = n omega_n / alpha.
        let d = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let f = GridFunction::from_fn(Arc::new(Grid::radial(&d, 64).unwrap()), |_| 1.0);
        let v = riesz_at(&f, 1.0, &[vec![0.0, 0.0]]).unwrap()[0];
        assert!((v / (2.0 * std::f64::consts::PI) - 1.0).abs() < 1e-12);
        let t = GridFunction::from_fn(Arc::new(Grid::tensor(&d, 201).unwrap()), |_| 1.0);
        let v = riesz_at(&t, 1.0, &[vec![0.0, 0.0]]).unwrap()[0];
        assert!((v / (2.0 * std::f64::consts::PI) - 1.0).abs() < 2e-2, "{v}");
    }

    #[test]
    fn sphere_kernels_agree_with_quadrature() {
        for (n, alpha) in [(2usize, 1.0), (3, 1.0), (3, 1.7), (2, 0.6), (4, 1.3)] {
            for (s, r) in [(0.3, 1.1), (1.0, 0.4), (2.0, 1.9)] {
                let nf = n as f64;
                let area = if n == 2 { 2.0 } else { (nf - 1.0) * omega(n - 1) };
                let e = 0.5 * (alpha - nf);
                let f = |th: f64| (s * s + r * r - 2.0 * s * r * th.cos()).powf(e) * th.sin().powi(n as i32 - 2);
                let want = area * integrate(f, 0.0, std::f64::consts::PI, 1e-12, 0.0).value;
                let got = sphere_kernel(n, alpha, s, r);
                assert!((got / want - 1.0).abs() < 1e-8, "n={n} alpha={alpha} s={s} r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn radial_matches_tensor_off_center() {
        let d = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let prof = |r: f64| (1.0 - r * r).max(0.0);
        let fr = GridFunction::from_fn(Arc::new(Grid::radial(&d, 400).unwrap()), |x| prof(x[0]));
        let ft = GridFunction::from_fn(Arc::new(Grid::tensor(&d, 301).unwrap()), |x| prof((x[0] * x[0] + x[1] * x[1]).sqrt()));
        let p = vec![vec![0.5, 0.0], vec![0.0, 1.5]];
        let a = riesz_at(&fr, 1.0, &p).unwrap();
        let b = riesz_at(&ft, 1.0, &p).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x / y - 1.0).abs() < 5e-3, "{x} vs {y}");
        }
    }

    #[test]
    fn lower_bound_holds() {
        let d = Domain::ball(vec![0.0; 2], 2.0).unwrap();
        let f = GridFunction::from_fn(Arc::new(Grid::radial(&d, 100).unwrap()), |x| (-x[0]).exp());
        for s in [0.0, 0.3, 1.0, 1.7, 2.5] {
            let v = riesz_radial(&f, 1.0, &[s]).unwrap()[0];
            let lb = riesz_radial_lower_bound(&f, 1.0, s).unwrap();
            assert!(v >= lb, "s={s}: {v} < {lb}");
        }
    }

    #[test]
    fn zero_potential() {
        let d = Domain::cube(2, 0.0, 1.0).unwrap();
        let f = GridFunction::zeros(Arc::new(Grid::tensor(&d, 8).unwrap()));
        assert_eq!(riesz_at(&f, 1.0, &[vec![0.5, 0.5]]).unwrap()[0], 0.0);
    }
}
