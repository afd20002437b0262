//! Deterministic sample sets: points, t-ladders and sphere directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Sample specification shared by the sampled checks.
///
/// `refine` returns a superset of the same sample (more points drawn from the
/// same random stream, interleaved t-values), so sampled infima can only drop
/// under refinement.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub points: usize,
    pub radius: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_count: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            points: 64,
            radius: 4.0,
            t_lo: 1e-4,
            t_hi: 1e4,
            t_count: 33,
            seed: 7,
        }
    }
}

impl SampleSpec {
    /// Points in the cube `[-radius, radius]^n`; the origin comes first.
    pub fn points(&self, n: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = vec![vec![0.0; n]];
        while out.len() < self.points.max(1) {
            out.push((0..n).map(|_| rng.gen_range(-self.radius..=self.radius)).collect());
        }
        out
    }

    pub fn t_ladder(&self) -> Vec<f64> {
        log_space(self.t_lo, self.t_hi, self.t_count)
    }

    pub fn refine(&self) -> SampleSpec {
        SampleSpec {
            points: self.points * 2,
            t_count: self.t_count * 2 - 1,
            ..self.clone()
        }
    }
}

/// `m` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..m).map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp()).collect()
}

/// `m` evenly spaced values from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![lo];
    }
    (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
}

/// Unit directions used for sphere suprema: both signs in 1-D, equally spaced
/// angles in 2-D, a Fibonacci lattice in 3-D and seeded Gaussian directions beyond.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let g = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = g * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0xd1 + n as u64);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..n)
                        .map(|_| {
                            // Box-Muller
                            let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
                            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                        })
                        .collect();
                    let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    v.into_iter().map(|c| c / r).collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_is_a_superset() {
        let s = SampleSpec::default();
        let f = s.refine();
        let (a, b) = (s.points(2), f.points(2));
        assert_eq!(&b[..a.len()], &a[..]);
        let (ta, tb) = (s.t_ladder(), f.t_ladder());
        for t in ta {
            assert!(tb.iter().any(|u| (u / t - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn directions_are_unit() {
        for n in 1..=4 {
            for d in sphere_directions(n, 64) {
                let r: f64 = d.iter().map(|c| c * c).sum();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
    }
}
