//! Quadrature: adaptive Gauss-Kronrod, doubling-piece tails, Gauss-Legendre rules.

use std::collections::BinaryHeap;

// Kronrod 15-point abscissae (positive half, descending) with the embedded Gauss 7-point rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7/15 panel: `(kronrod estimate, |kronrod - gauss|)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    v: f64,
    e: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.e == o.e
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.e.total_cmp(&o.e)
    }
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Stops when the error estimate is below `max(abs_tol, rel_tol * |I|)`. An
/// infinite integrand value makes the result `+inf`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut evals = 15;
    if !v.is_finite() {
        return QuadResult {
            value: f64::INFINITY,
            error: 0.0,
            evals,
        };
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, v, e });
    let (mut total, mut err) = (v, e);
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < MAX_PANELS {
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        evals += 30;
        if !(v1 + v2).is_finite() {
            return QuadResult {
                value: f64::INFINITY,
                error: 0.0,
                evals,
            };
        }
        total += v1 + v2 - p.v;
        err += e1 + e2 - p.e;
        heap.push(Panel { a: p.a, b: m, v: v1, e: e1 });
        heap.push(Panel { a: m, b: p.b, v: v2, e: e2 });
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let total: f64 = heap.iter().map(|p| p.v).sum();
    let err: f64 = heap.iter().map(|p| p.e).sum();
    QuadResult {
        value: total,
        error: err,
        evals,
    }
}

/// Outcome of integrating to an infinite endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailResult {
    Finite(f64),
    Diverges,
}

impl TailResult {
    pub fn value(self) -> f64 {
        match self {
            TailResult::Finite(v) => v,
            TailResult::Diverges => f64::INFINITY,
        }
    }
}

const MAX_DOUBLINGS: usize = 62;

/// Integrates `f` from `start` to `+inf` (`dir > 0`) or `-inf` (`dir < 0`).
///
/// The half-line is cut into pieces of doubling length, each integrated
/// adaptively. Once successive piece ratios settle below 1 the remainder is
/// closed with the geometric model `piece * r / (1 - r)`. Divergence is
/// reported when the running sum overflows or the doubling budget runs out
/// without the pieces dying off.
pub fn tail_integral<F: FnMut(f64) -> f64>(mut f: F, start: f64, dir: f64, rel_tol: f64) -> TailResult {
    let s = dir.signum();
    let mut total = 0.0;
    let mut prev_piece = f64::NAN;
    let mut prev_ratio = f64::NAN;
    for k in 0..MAX_DOUBLINGS {
        let lo = (2f64.powi(k as i32) - 1.0) * s;
        let hi = (2f64.powi(k as i32 + 1) - 1.0) * s;
        let (a, b) = if s > 0.0 { (start + lo, start + hi) } else { (start + hi, start + lo) };
        let piece = integrate(&mut f, a, b, rel_tol, 1e-300_f64.max(1e-17 * total)).value;
        if !piece.is_finite() {
            return TailResult::Diverges;
        }
        total += piece;
        if !total.is_finite() {
            return TailResult::Diverges;
        }
        if k >= 2 {
            if piece <= 1e-17 * total || (piece == 0.0 && total == 0.0 && k >= 8) {
                return TailResult::Finite(total);
            }
            let r = piece / prev_piece;
            if r < 1.0 && (r - prev_ratio).abs() <= 0.05 * r {
                let rest = piece * r / (1.0 - r);
                if rest <= 1e-13 * total {
                    return TailResult::Finite(total + rest);
                }
            }
            prev_ratio = r;
        } else if k == 1 {
            prev_ratio = piece / prev_piece;
        }
        prev_piece = piece;
    }
    TailResult::Diverges
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 0.0);
        assert!((r.value - 0.0).abs() < 1e-13);
        let r = integrate(|x| x.powi(6), -1.0, 1.0, 1e-14, 0.0);
        assert!((r.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10, 0.0);
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn jump_in_integrand() {
        let r = integrate(|x| if x < 0.3 { 1.0 } else { 2.0 }, 0.0, 1.0, 1e-12, 0.0);
        assert!((r.value - 1.7).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn tails_converge_and_diverge() {
        // int_0^inf e^{-u} du = 1
        match tail_integral(|u: f64| (-u).exp(), 0.0, 1.0, 1e-12) {
            TailResult::Finite(v) => assert!((v - 1.0).abs() < 1e-10, "{v}"),
            TailResult::Diverges => panic!(),
        }
        // int_{-inf}^0 e^{u/2} du = 2
        match tail_integral(|u: f64| (0.5 * u).exp(), 0.0, -1.0, 1e-12) {
            TailResult::Finite(v) => assert!((v - 2.0).abs() < 1e-10, "{v}"),
            TailResult::Diverges => panic!(),
        }
        // int_1^inf u^{-2} du = 1, slow algebraic decay
        match tail_integral(|u: f64| u.powi(-2), 1.0, 1.0, 1e-12) {
            TailResult::Finite(v) => assert!((v - 1.0).abs() < 1e-8, "{v}"),
            TailResult::Diverges => panic!(),
        }
        assert_eq!(tail_integral(|_| 1.0, 0.0, 1.0, 1e-12), TailResult::Diverges);
        assert_eq!(tail_integral(|u: f64| 1.0 / u, 1.0, 1.0, 1e-12), TailResult::Diverges);
        assert_eq!(tail_integral(|u: f64| (-0.1 * u).exp(), 0.0, -1.0, 1e-12), TailResult::Diverges);
    }

    #[test]
    fn gauss_legendre_rules() {
        for m in 1..12 {
            let (x, w) = gauss_legendre(m);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * m - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-12, "m={m}");
        }
    }
}
