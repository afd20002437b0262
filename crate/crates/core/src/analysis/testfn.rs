//! Radial test functions with closed-form gradients.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::omega;

use super::domain::norm;
use super::grid::{Grid, GridFunction};

/// Radial profiles `u(x) = P(|x|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Zero,
    /// `height (1 - r/radius)_+`.
    Tent { radius: f64, height: f64 },
    /// `e^{1 - 1/(1 - (r/radius)^2)}` inside the ball, 0 outside.
    Bump { radius: f64 },
    /// 1 on `[0, inner]`, a cubic smoothstep down to 0 on `[inner, outer]`.
    Plateau { inner: f64, outer: f64 },
    /// `1 - (r/radius)^gamma` inside the ball; gradient unbounded at 0 for `gamma < 1`.
    Spike { radius: f64, gamma: f64 },
    /// `int_{omega_n r^n}^inf g(s) s^{-1/n'} ds` with `g(s) = s^{-a}` on `[lo, hi]`.
    Trial { a: f64, lo: f64, hi: f64 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Zero => true,
            Profile::Tent { radius, height } => radius > 0.0 && height.is_finite(),
            Profile::Bump { radius } => radius > 0.0,
            Profile::Plateau { inner, outer } => inner >= 0.0 && outer > inner,
            Profile::Spike { radius, gamma } => radius > 0.0 && gamma > 0.0,
            Profile::Trial { a, lo, hi } => a.is_finite() && lo > 0.0 && hi > lo,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("invalid test profile {self:?}")))
        }
    }

    /// `P(r)` in dimension `n`.
    pub fn value(&self, n: usize, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Tent { radius, height } => height * (1.0 - r / radius).max(0.0),
            Profile::Bump { radius } => {
                let q = r / radius;
                if q >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - q * q)).exp()
                }
            }
            Profile::Plateau { inner, outer } => {
                if r <= inner {
                    1.0
                } else if r >= outer {
                    0.0
                } else {
                    let t = (r - inner) / (outer - inner);
                    1.0 - t * t * (3.0 - 2.0 * t)
                }
            }
            Profile::Spike { radius, gamma } => (1.0 - (r / radius).powf(gamma)).max(0.0),
            Profile::Trial { a, lo, hi } => {
                let s = omega(n) * (r.powi(n as i32)).max(0.0);
                let from = s.max(lo);
                if from >= hi {
                    return 0.0;
                }
                // int s^{-a - 1/n'} ds
                let e = 1.0 - a - (n as f64 - 1.0) / n as f64;
                if e.abs() < 1e-14 {
                    (hi / from).ln()
                } else {
                    (hi.powf(e) - from.powf(e)) / e
                }
            }
        }
    }

    /// `P'(r)`.
    pub fn deriv(&self, n: usize, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Tent { radius, height } => {
                if r < radius {
                    -height / radius
                } else {
                    0.0
                }
            }
            Profile::Bump { radius } => {
                let q = r / radius;
                if q >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - q * q;
                    -2.0 * q / (radius * d * d) * (1.0 - 1.0 / d).exp()
                }
            }
            Profile::Plateau { inner, outer } => {
                if r <= inner || r >= outer {
                    0.0
                } else {
                    let w = outer - inner;
                    let t = (r - inner) / w;
                    -6.0 * t * (1.0 - t) / w
                }
            }
            Profile::Spike { radius, gamma } => {
                if r >= radius {
                    0.0
                } else if r == 0.0 {
                    if gamma < 1.0 {
                        f64::NEG_INFINITY
                    } else if gamma == 1.0 {
                        -1.0 / radius
                    } else {
                        0.0
                    }
                } else {
                    -gamma / radius * (r / radius).powf(gamma - 1.0)
                }
            }
            Profile::Trial { a, lo, hi } => {
                let s = omega(n) * r.powi(n as i32);
                if s < lo || s > hi {
                    0.0
                } else {
                    // |grad u| = g(omega_n r^n) n omega_n^{1/n}.
                    -(s.powf(-a)) * n as f64 * omega(n).powf(1.0 / n as f64)
                }
            }
        }
    }

    /// Radius beyond which the profile vanishes.
    pub fn support(&self, n: usize) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Tent { radius, .. } | Profile::Bump { radius } | Profile::Spike { radius, .. } => radius,
            Profile::Plateau { outer, .. } => outer,
            Profile::Trial { hi, .. } => (hi / omega(n)).powf(1.0 / n as f64),
        }
    }

    /// Radii where the gradient is not smooth.
    pub fn kinks(&self, n: usize) -> Vec<f64> {
        match *self {
            Profile::Zero | Profile::Bump { .. } => vec![],
            Profile::Tent { radius, .. } | Profile::Spike { radius, .. } => vec![0.0, radius],
            Profile::Plateau { inner, outer } => vec![inner, outer],
            Profile::Trial { lo, hi, .. } => vec![(lo / omega(n)).powf(1.0 / n as f64), (hi / omega(n)).powf(1.0 / n as f64)],
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Profile::Zero => "zero".into(),
            Profile::Tent { radius, height } => format!("tent(r={radius},h={height})"),
            Profile::Bump { radius } => format!("bump(r={radius})"),
            Profile::Plateau { inner, outer } => format!("plateau({inner},{outer})"),
            Profile::Spike { radius, gamma } => format!("spike(r={radius},gamma={gamma})"),
            Profile::Trial { a, lo, hi } => format!("trial(a={a},[{lo},{hi}])"),
        }
    }
}

/// A radial test function on `R^n` centered at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTest {
    pub n: usize,
    pub profile: Profile,
}

impl RadialTest {
    pub fn new(n: usize, profile: Profile) -> Result<RadialTest> {
        profile.validate()?;
        if n == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        Ok(RadialTest { n, profile })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.profile.value(self.n, norm(x))
    }

    /// `grad u(x) = P'(|x|) x / |x|`; zero at the origin.
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let r = norm(x);
        if r == 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let d = self.profile.deriv(self.n, r) / r;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = d * xi;
        }
    }

    pub fn grad_norm(&self, x: &[f64]) -> f64 {
        self.profile.deriv(self.n, norm(x)).abs()
    }

    pub fn support(&self) -> f64 {
        self.profile.support(self.n)
    }

    pub fn kinks(&self) -> Vec<f64> {
        self.profile.kinks(self.n)
    }

    /// `(u, |grad u|)` sampled on a grid.
    pub fn sample(&self, grid: Arc<Grid>) -> (GridFunction, GridFunction) {
        let u = GridFunction::from_fn(grid.clone(), |x| self.value(x));
        let g = GridFunction::from_fn(grid, |x| self.grad_norm(x));
        (u, g)
    }
}
