//! Sampled checks of the structural conditions on generalized Young functions.
//!
//! Every check here is a falsifier: `holds = true` means no violation was
//! found on the declared sample, and the report carries that sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpatialField;
use crate::geom::{ball_volume, omega, random_in_ball};
use crate::gyf::ops::{phi_infinity, ratio, InfinitySchedule};
use crate::gyf::{origin, YoungFn};
use crate::quad::{tail_integral, TailResult};
use crate::report::{ConditionReport, Counts, WorstSample};
use crate::sample::{log_space, SampleSpec};

/// Ball sample: radii `2^{-k}` for `k = 0..=k_max` (balls with `|B| > 1` are
/// skipped where the condition needs `|B| <= 1`), `centers` per radius drawn
/// from `[-center_radius, center_radius]^n`, `pairs` point pairs per ball and
/// `t_count` log-spaced values of `t`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub k_max: u32,
    pub centers: usize,
    pub pairs: usize,
    pub t_count: usize,
    pub center_radius: f64,
    pub seed: u64,
    /// Smallest witness accepted as "bounded away from zero".
    pub beta_floor: f64,
}

impl Default for BallSpec {
    fn default() -> Self {
        BallSpec {
            k_max: 12,
            centers: 32,
            pairs: 16,
            t_count: 24,
            center_radius: 4.0,
            seed: 11,
            beta_floor: 0.05,
        }
    }
}

impl BallSpec {
    /// A superset of the same sample: extra centers and pairs come later in
    /// the same random streams and the t-ladder is interleaved.
    pub fn refine(&self) -> BallSpec {
        BallSpec {
            centers: self.centers * 2,
            pairs: self.pairs * 2,
            t_count: self.t_count * 2 - 1,
            ..self.clone()
        }
    }

    fn centers_for(&self, n: usize, k: u32) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(k as u64));
        (0..self.centers)
            .map(|_| (0..n).map(|_| rng.gen_range(-self.center_radius..=self.center_radius)).collect())
            .collect()
    }

    fn pairs_in(&self, k: u32, i: usize, center: &[f64], r: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
        let s = self.seed ^ ((k as u64) << 40) ^ ((i as u64) << 8) ^ 0x5a5a;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        (0..self.pairs)
            .map(|_| (random_in_ball(&mut rng, center, r), random_in_ball(&mut rng, center, r)))
            .collect()
    }
}

struct BallScan {
    beta: f64,
    worst: WorstSample,
    counts: Counts,
}

/// Inf over sampled balls, pairs and `t in [t_lo(|B|), 1/|B|]` of
/// `min(phi^{-1}(x,t)/phi^{-1}(y,t), phi^{-1}(y,t)/phi^{-1}(x,t))`.
fn ball_inverse_scan<F, L>(phi: &F, spec: &BallSpec, small_only: bool, t_lo: L) -> BallScan
where
    F: YoungFn + ?Sized,
    L: Fn(f64) -> f64 + Sync,
{
    let n = phi.dim();
    let mut tasks = Vec::new();
    for k in 0..=spec.k_max {
        let r = 2f64.powi(-(k as i32));
        let vol = ball_volume(n, r);
        if small_only && vol > 1.0 {
            continue;
        }
        for (i, c) in spec.centers_for(n, k).into_iter().enumerate() {
            tasks.push((k, i, c, r, vol));
        }
    }
    let balls = tasks.len();
    let results: Vec<(f64, WorstSample, usize)> = tasks
        .par_iter()
        .map(|(k, i, c, r, vol)| {
            let ts = log_space(t_lo(*vol), 1.0 / vol, spec.t_count);
            let mut best = (f64::INFINITY, WorstSample::default(), 0usize);
            for (x, y) in spec.pairs_in(*k, *i, c, *r) {
                for &t in &ts {
                    let a = phi.inverse(&x, t).value();
                    let b = phi.inverse(&y, t).value();
                    best.2 += 2;
                    let q = ratio(a, b);
                    let q = if q.is_nan() { 1.0 } else { q.min(1.0 / q) };
                    if q < best.0 {
                        best.0 = q;
                        best.1 = WorstSample {
                            x: x.clone(),
                            y: Some(y.clone()),
                            t,
                            radius: Some(*r),
                            value: q,
                        };
                    }
                }
            }
            best
        })
        .collect();
    let mut scan = BallScan {
        beta: f64::INFINITY,
        worst: WorstSample::default(),
        counts: Counts {
            balls,
            pairs: balls * spec.pairs,
            t_values: spec.t_count,
            ..Counts::default()
        },
    };
    for (q, w, e) in results {
        scan.counts.evaluations += e;
        if q < scan.beta {
            scan.beta = q;
            scan.worst = w;
        }
    }
    scan.beta = scan.beta.min(1.0);
    scan
}

/// (A0): `beta <= phi^{-1}(x, 1) <= 1/beta` on the sample, with `beta = min(m, 1/M)`.
pub fn check_a0<F: YoungFn + ?Sized>(phi: &F, sample: &SampleSpec) -> ConditionReport {
    let run = |s: &SampleSpec| {
        let xs = s.points(phi.dim());
        let mut m = (f64::INFINITY, vec![]);
        let mut mm = (0.0f64, vec![]);
        for x in &xs {
            let c = phi.inverse(x, 1.0).value();
            if c < m.0 {
                m = (c, x.clone());
            }
            if c > mm.0 {
                mm = (c, x.clone());
            }
        }
        (m, mm, xs.len())
    };
    let (m, mm, _) = run(sample);
    let coarse = m.0.min(1.0 / mm.0).min(1.0);
    let (m, mm, count) = run(&sample.refine());
    let mut rep = ConditionReport::new("A0");
    rep.holds = m.0 > 0.0 && mm.0.is_finite();
    rep.beta = m.0.min(1.0 / mm.0).min(1.0);
    rep.coarse_beta = Some(coarse);
    let (value, x) = if m.0 < 1.0 / mm.0 { (m.0, m.1) } else { (mm.0, mm.1) };
    rep.worst_sample = WorstSample {
        x,
        t: 1.0,
        value,
        ..WorstSample::default()
    };
    rep.counts = Counts {
        points: count,
        t_values: 1,
        evaluations: count,
        ..Counts::default()
    };
    rep.notes.push(format!("phi^-1(x,1) ranges over [{}, {}] on the refined sample", m.0, mm.0));
    rep
}

/// (A1): `beta phi^{-1}(x,t) <= phi^{-1}(y,t)` for `x, y` in balls with
/// `|B| <= 1` and `t in [1, 1/|B|]`.
pub fn check_a1<F: YoungFn + ?Sized>(phi: &F, balls: &BallSpec) -> ConditionReport {
    let coarse = ball_inverse_scan(phi, balls, true, |_| 1.0);
    let fine = ball_inverse_scan(phi, &balls.refine(), true, |_| 1.0);
    let mut rep = ConditionReport::new("A1");
    rep.holds = fine.beta >= balls.beta_floor;
    rep.beta = fine.beta;
    rep.coarse_beta = Some(coarse.beta);
    rep.worst_sample = fine.worst;
    rep.counts = fine.counts;
    rep.notes.push(format!("witness floor {}", balls.beta_floor));
    rep
}

/// Relative tolerance for the identities in (A2'') and normalization, which
/// compare numerically inverted quantities.
pub const IDENTITY_REL: f64 = 1e-8;

/// Largest defect of (A2'') at `x`: the maximum over `ts` of
/// `phi(x, beta t) - phi_inf(t)` where `phi_inf(t) <= 1`, and of
/// `phi_inf(beta t) - phi(x, t)` where `phi(x, t) <= 1`.
pub fn a2_defect<F: YoungFn + ?Sized>(phi: &F, phi_inf: &dyn YoungFn, beta: f64, x: &[f64], ts: &[f64]) -> (f64, f64) {
    let o = origin(phi.dim());
    let mut worst = (0.0f64, f64::NAN);
    for &t in ts {
        let pi = phi_inf.eval(&o, t).value();
        if pi <= 1.0 {
            let d = phi.eval(x, beta * t).value() - pi;
            if d > worst.0 {
                worst = (d, t);
            }
        }
        let pv = phi.eval(x, t).value();
        if pv <= 1.0 {
            let d = phi_inf.eval(&o, beta * t).value() - pv;
            if d > worst.0 {
                worst = (d, t);
            }
        }
    }
    worst
}

/// (A2'') with a given `h` and `beta`.
pub fn check_a2pp<F: YoungFn + ?Sized>(phi: &F, h: &SpatialField, beta: f64, sample: &SampleSpec) -> Result<ConditionReport> {
    let phi_inf = phi
        .limit()
        .ok_or_else(|| Error::Precondition("(A2'') needs declared limit data for phi_inf".into()))?;
    let xs = sample.points(phi.dim());
    let ts = sample.t_ladder();
    let mut rep = ConditionReport::new("A2''");
    rep.beta = beta;
    let mut worst = f64::NEG_INFINITY;
    for x in &xs {
        let hx = h.eval(x)?;
        let (d, t) = a2_defect(phi, phi_inf.as_ref(), beta, x, &ts);
        let excess = d - hx;
        if excess > worst {
            worst = excess;
            rep.worst_sample = WorstSample {
                x: x.clone(),
                t,
                value: excess,
                ..WorstSample::default()
            };
        }
    }
    rep.holds = worst <= IDENTITY_REL;
    rep.counts = Counts {
        points: xs.len(),
        t_values: ts.len(),
        evaluations: 4 * xs.len() * ts.len(),
        ..Counts::default()
    };
    Ok(rep)
}

/// Radial profile of the smallest admissible `h` for (A2'') with the given
/// `beta`: for each radius, the sup of the defect over sampled directions.
/// Returns the profile and `n omega_n int r^{n-1} h(r) dr` by the trapezoid rule.
pub fn a2_required_h<F: YoungFn + ?Sized>(phi: &F, beta: f64, radii: &[f64], directions: usize, ts: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    let phi_inf = phi
        .limit()
        .ok_or_else(|| Error::Precondition("(A2'') needs declared limit data for phi_inf".into()))?;
    let n = phi.dim();
    let dirs = crate::sample::sphere_directions(n, directions);
    let prof: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let h = dirs
                .iter()
                .map(|d| {
                    let x: Vec<f64> = d.iter().map(|c| c * r).collect();
                    a2_defect(phi, phi_inf.as_ref(), beta, &x, ts).0
                })
                .fold(0.0f64, f64::max);
            (r, h)
        })
        .collect();
    let surf = n as f64 * omega(n);
    let mut integral = 0.0;
    for w in prof.windows(2) {
        let (r0, h0) = w[0];
        let (r1, h1) = w[1];
        integral += 0.5 * (r1 - r0) * surf * (h0 * r0.powi(n as i32 - 1) + h1 * r1.powi(n as i32 - 1));
    }
    Ok((prof, integral))
}

/// Normalization: `phi^{-1}(x,1) = 1`, the ball inequality for `t in [0, 1/|B|]`,
/// and `phi = phi_inf` on `[0, 1]`.
pub fn check_normalized<F: YoungFn + ?Sized>(phi: &F, sample: &SampleSpec, balls: &BallSpec) -> ConditionReport {
    let n = phi.dim();
    let xs = sample.points(n);
    let mut rep = ConditionReport::new("normalized");
    // (i)
    let mut worst_c = (0.0f64, vec![]);
    for x in &xs {
        let d = (phi.inverse(x, 1.0).value() - 1.0).abs();
        if d > worst_c.0 || worst_c.1.is_empty() {
            worst_c = (d, x.clone());
        }
    }
    let unit = worst_c.0 <= IDENTITY_REL;
    rep.notes.push(format!("max |phi^-1(x,1) - 1| = {:e}", worst_c.0));
    // (ii)
    let t_floor = sample.t_lo;
    let scan = ball_inverse_scan(phi, balls, false, |_| t_floor);
    let coarse = ball_inverse_scan(phi, &BallSpec { centers: balls.centers / 2, ..balls.clone() }, false, |_| t_floor);
    let ball_ok = scan.beta >= balls.beta_floor;
    rep.beta = scan.beta;
    rep.coarse_beta = Some(coarse.beta);
    rep.counts = scan.counts;
    rep.counts.points = xs.len();
    // (iii)
    let ts: Vec<f64> = sample.t_ladder().into_iter().filter(|t| *t <= 1.0).collect();
    let sched = InfinitySchedule::default();
    let mut limit_defect = (0.0f64, WorstSample::default());
    let mut limit_ok = true;
    for &t in &ts {
        let pi = match phi_infinity(phi, t, &sched) {
            Ok(v) => v.value(),
            Err(e) => {
                limit_ok = false;
                rep.notes.push(format!("phi_inf unavailable at t = {t}: {e}"));
                break;
            }
        };
        for x in &xs {
            let v = phi.eval(x, t).value();
            let d = (v - pi).abs() / pi.max(f64::MIN_POSITIVE);
            if d > limit_defect.0 {
                limit_defect = (
                    d,
                    WorstSample {
                        x: x.clone(),
                        t,
                        value: d,
                        ..WorstSample::default()
                    },
                );
            }
        }
    }
    let equal_below_one = limit_ok && limit_defect.0 <= IDENTITY_REL;
    rep.notes.push(format!("max relative |phi - phi_inf| on [0,1] = {:e}", limit_defect.0));
    rep.holds = unit && ball_ok && equal_below_one;
    rep.worst_sample = if !unit {
        WorstSample {
            x: worst_c.1,
            t: 1.0,
            value: worst_c.0,
            ..WorstSample::default()
        }
    } else if !ball_ok {
        scan.worst
    } else {
        limit_defect.1
    };
    for (ok, what) in [(unit, "phi^-1(x,1) = 1"), (ball_ok, "ball inverse comparability"), (equal_below_one, "phi = phi_inf on [0,1]")] {
        if !ok {
            rep.notes.push(format!("fails: {what}"));
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthReport {
    pub converges: bool,
    /// `int_0^1 (t/phi_inf(t))^{alpha/(n-alpha)} dt`, `inf` when divergent.
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub value: f64,
}

/// Integrability of `(t / phi_inf(t))^{alpha/(n-alpha)}` near 0.
///
/// With `t = e^u` the integral becomes `int_{-inf}^0 exp(e (u - ln phi_inf(e^u)) + u) du`,
/// `e = alpha/(n - alpha)`, integrated over doubling pieces; convergence means
/// the pieces die off geometrically.
pub fn check_growth_condition<F: YoungFn + ?Sized>(phi: &F, alpha: f64) -> Result<GrowthReport> {
    let n = phi.dim();
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::Argument(format!("alpha must lie in (0, {n}), got {alpha}")));
    }
    let lim = if phi.is_x_independent() { None } else { phi.limit() };
    let o = origin(n);
    let ln_phi = |u: f64| match &lim {
        Some(l) => l.ln_eval_exp(&o, u),
        None => phi.ln_eval_exp(&o, u),
    };
    if lim.is_none() && !phi.is_x_independent() {
        return Err(Error::Precondition("growth condition needs phi_inf".into()));
    }
    let e = alpha / (n as f64 - alpha);
    Ok(match tail_integral(|u| (e * (u - ln_phi(u)) + u).exp(), 0.0, -1.0, 1e-10) {
        TailResult::Finite(v) => GrowthReport { converges: true, value: v },
        TailResult::Diverges => GrowthReport {
            converges: false,
            value: f64::INFINITY,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SlowerReport {
    pub holds: bool,
    /// Per `c`: log-log slope of `sup_x theta(x, ct)/phi(x, t)` over the top half of the ladder.
    pub slopes: Vec<(f64, f64)>,
    /// Per `c`: the ratio ladder.
    pub ladders: Vec<(f64, Vec<f64>)>,
}

/// Largest top-half log-log slope still counted as decay.
pub const DECAY_SLOPE: f64 = -1e-3;

/// `theta` grows essentially more slowly than `phi`: for every `c`,
/// `sup_x theta(x, ct) / phi(x, t) -> 0` as `t -> inf`. Decay is read off the
/// log-log slope of the ratio ladder over its top half.
pub fn check_grows_more_slowly<F, G>(theta: &F, phi: &G, cs: &[f64], xs: &[Vec<f64>], ts: &[f64]) -> SlowerReport
where
    F: YoungFn + ?Sized,
    G: YoungFn + ?Sized,
{
    let mut rep = SlowerReport {
        holds: true,
        slopes: vec![],
        ladders: vec![],
    };
    for &c in cs {
        let ladder: Vec<f64> = ts
            .iter()
            .map(|&t| {
                xs.iter()
                    .map(|x| {
                        let a = theta.ln_eval_exp(x, (c * t).ln());
                        let b = phi.ln_eval_exp(x, t.ln());
                        if a == f64::NEG_INFINITY {
                            0.0
                        } else {
                            (a - b).exp()
                        }
                    })
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let h = ts.len() / 2;
        let last = ts.len() - 1;
        let slope = if ladder[last] == 0.0 {
            f64::NEG_INFINITY
        } else {
            (ladder[last].ln() - ladder[h].ln()) / (ts[last].ln() - ts[h].ln())
        };
        let decays = slope <= DECAY_SLOPE && ladder[h..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        rep.holds &= decays;
        rep.slopes.push((c, slope));
        rep.ladders.push((c, ladder));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gyf::Gyf;

    #[test]
    fn a0_examples() {
        let s = SampleSpec {
            points: 16,
            ..SampleSpec::default()
        };
        let r = check_a0(&Gyf::power(2, 2.0), &s);
        assert!(r.holds && r.beta == 1.0);
        let a = SpatialField::expression("a", "0.5 + 0.5*sin(x1)", 2, 0.0, 1.0, None).unwrap();
        let r = check_a0(&Gyf::double_phase(2, 2.0, 3.0, a), &s);
        assert!(r.holds);
        // phi^-1(x,1) is in [t: t^2 + t^3 = 1, 1]; that root is about 0.7549.
        assert!(r.beta >= 0.7548 && r.beta < 0.9, "{}", r.beta);
        assert!(r.beta <= r.coarse_beta.unwrap());
    }

    #[test]
    fn a1_x_independent() {
        let spec = BallSpec {
            centers: 4,
            pairs: 4,
            k_max: 6,
            ..BallSpec::default()
        };
        let r = check_a1(&Gyf::power(2, 3.0), &spec);
        assert!(r.holds && (r.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn growth_truth_table() {
        let cases = [(2, 1.0, 1.5, true), (2, 1.0, 2.0, false), (2, 1.0, 3.0, false), (3, 2.0, 1.4, true), (3, 2.0, 1.6, false), (3, 0.5, 5.5, true)];
        for (n, alpha, p, expect) in cases {
            let r = check_growth_condition(&Gyf::power(n, p), alpha).unwrap();
            assert_eq!(r.converges, expect, "n={n} alpha={alpha} p={p}");
        }
        let r = check_growth_condition(&Gyf::power(3, 2.0), 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn slower_growth() {
        let xs = vec![vec![0.0]];
        let ts: Vec<f64> = (0..40).map(|k| 2f64.powi(k)).collect();
        let r = check_grows_more_slowly(&Gyf::power(1, 2.0), &Gyf::power(1, 3.0), &[1.0, 10.0], &xs, &ts);
        assert!(r.holds);
        let g = Gyf::power(1, 2.0);
        assert!(!check_grows_more_slowly(&g, &g, &[1.0], &xs, &ts).holds);
    }

    #[test]
    fn normalized_examples() {
        let s = SampleSpec {
            points: 8,
            t_count: 9,
            ..SampleSpec::default()
        };
        let b = BallSpec {
            centers: 4,
            pairs: 2,
            k_max: 4,
            t_count: 6,
            ..BallSpec::default()
        };
        assert!(check_normalized(&Gyf::power(2, 2.0), &s, &b).holds);
        let a = SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let r = check_normalized(&Gyf::double_phase(2, 2.0, 3.0, a), &s, &b);
        assert!(!r.holds);
        assert!(r.notes.iter().any(|n| n.contains("phi = phi_inf")));
    }

    #[test]
    fn a2_double_phase_with_zero_h() {
        let a = SpatialField::expression("a", "exp(-abs(x))", 2, 0.0, 1.0, Some(0.0)).unwrap();
        let s = SampleSpec {
            points: 16,
            ..SampleSpec::default()
        };
        let g = Gyf::double_phase(2, 2.0, 3.0, a);
        // a <= 1, so phi(x, t/2) <= t^2/4 + t^3/8 <= t^2 = phi_inf(t) while phi_inf(t) <= 1.
        let r = check_a2pp(&g, &SpatialField::constant("h", 0.0), 0.5, &s).unwrap();
        assert!(r.holds, "{:?}", r.worst_sample);
    }
}
