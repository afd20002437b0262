//! Tabulated nondecreasing functions of one variable, stored in log-log form.

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Behaviour beyond the last tabulated abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailTag {
    /// The function increases to this finite limit.
    FiniteLimit(f64),
    Diverges,
}

/// A nondecreasing function sampled on log-spaced abscissae.
///
/// Values are held as `ln f` over `u = ln t`. Between nodes the table
/// interpolates linearly in log-log space, or with cubic Hermite segments when
/// one-sided log-log slopes are supplied.
#[derive(Clone, Debug)]
pub struct MonotoneTab {
    u: Vec<f64>,
    lnv: Vec<f64>,
    slopes: Option<Vec<[f64; 2]>>,
    pub tail: TailTag,
}

impl MonotoneTab {
    /// Builds a table from positive samples `(t_i, f_i)` with log-log linear interpolation.
    pub fn from_samples(t: &[f64], v: &[f64], tail: TailTag) -> Result<MonotoneTab> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::Argument("tabulation needs at least two (t, value) pairs of equal length".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t[0] <= 0.0 {
            return Err(Error::Argument("tabulation abscissae must be positive and strictly increasing".into()));
        }
        if v.windows(2).any(|w| w[1] < w[0]) || v[0] <= 0.0 {
            return Err(Error::Argument("tabulated values must be positive and nondecreasing".into()));
        }
        Ok(MonotoneTab {
            u: t.iter().map(|x| x.ln()).collect(),
            lnv: v.iter().map(|x| x.ln()).collect(),
            slopes: None,
            tail,
        })
    }

    /// Builds a table in log form with Hermite slopes `[left, right]` of `ln f` in `u`.
    pub fn from_log_parts(u: Vec<f64>, lnv: Vec<f64>, slopes: Vec<[f64; 2]>, tail: TailTag) -> MonotoneTab {
        debug_assert_eq!(u.len(), lnv.len());
        debug_assert_eq!(u.len(), slopes.len());
        MonotoneTab {
            u,
            lnv,
            slopes: Some(slopes),
            tail,
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u_range(&self) -> (f64, f64) {
        (self.u[0], *self.u.last().unwrap())
    }

    pub fn ln_range(&self) -> (f64, f64) {
        (self.lnv[0], *self.lnv.last().unwrap())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.lnv.iter().copied())
    }

    /// Log-log slope of the first and last interval.
    pub fn end_slopes(&self) -> (f64, f64) {
        let n = self.u.len();
        (
            (self.lnv[1] - self.lnv[0]) / (self.u[1] - self.u[0]),
            (self.lnv[n - 1] - self.lnv[n - 2]) / (self.u[n - 1] - self.u[n - 2]),
        )
    }

    fn segment(&self, j: usize, u: f64) -> f64 {
        let (u0, u1) = (self.u[j], self.u[j + 1]);
        let (y0, y1) = (self.lnv[j], self.lnv[j + 1]);
        let h = u1 - u0;
        let s = (u - u0) / h;
        match &self.slopes {
            None => y0 + s * (y1 - y0),
            Some(m) => {
                let (m0, m1) = (m[j][1], m[j + 1][0]);
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * m1
            }
        }
    }

    /// `ln f(e^u)` for `u` inside the tabulated range, `None` outside.
    pub fn ln_eval_u(&self, u: f64) -> Option<f64> {
        let (lo, hi) = self.u_range();
        if !(u >= lo && u <= hi) {
            return None;
        }
        let i = self.u.partition_point(|&x| x <= u);
        let j = i.saturating_sub(1).min(self.u.len() - 2);
        Some(self.segment(j, u))
    }

    /// Evaluates with power-law extrapolation from the end intervals.
    pub fn eval(&self, t: f64) -> ExtReal {
        if t <= 0.0 {
            return ExtReal::ZERO;
        }
        if t.is_infinite() {
            return match self.tail {
                TailTag::FiniteLimit(l) => ExtReal::new(l),
                TailTag::Diverges => ExtReal::INFINITY,
            };
        }
        let u = t.ln();
        ExtReal::new(self.ln_eval_extrapolated(u).exp())
    }

    /// `ln f(e^u)` everywhere, extending the end intervals as power laws.
    pub fn ln_eval_extrapolated(&self, u: f64) -> f64 {
        if let Some(v) = self.ln_eval_u(u) {
            return v;
        }
        let (s0, s1) = self.end_slopes();
        let (lo, hi) = self.u_range();
        if u < lo {
            self.lnv[0] + s0 * (u - lo)
        } else {
            let v = self.lnv[self.lnv.len() - 1] + s1 * (u - hi);
            match self.tail {
                TailTag::FiniteLimit(l) => v.min(l.ln()),
                TailTag::Diverges => v,
            }
        }
    }

    /// Smallest `u` in the tabulated range with `ln f(e^u) >= y`, `None` when `y`
    /// lies outside the tabulated value range.
    pub fn ln_inverse(&self, y: f64) -> Option<f64> {
        let (lo, hi) = self.ln_range();
        if y < lo || y > hi {
            return None;
        }
        let i = self.lnv.partition_point(|&v| v < y);
        if i == 0 {
            return Some(self.u[0]);
        }
        let j = i - 1;
        if self.slopes.is_none() {
            let (y0, y1) = (self.lnv[j], self.lnv[j + 1]);
            let s = (y - y0) / (y1 - y0);
            return Some(self.u[j] + s * (self.u[j + 1] - self.u[j]));
        }
        let (mut a, mut b) = (self.u[j], self.u[j + 1]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.segment(j, m) < y {
                a = m;
            } else {
                b = m;
            }
        }
        Some(b)
    }

    /// Left-continuous inverse with power-law extrapolation; `+inf` past a finite limit.
    pub fn inverse(&self, y: f64) -> ExtReal {
        if y <= 0.0 {
            return ExtReal::ZERO;
        }
        if let TailTag::FiniteLimit(l) = self.tail {
            if y >= l {
                return ExtReal::INFINITY;
            }
        }
        let ly = y.ln();
        if let Some(u) = self.ln_inverse(ly) {
            return ExtReal::new(u.exp());
        }
        let (s0, s1) = self.end_slopes();
        let (ulo, uhi) = self.u_range();
        let (vlo, vhi) = self.ln_range();
        let u = if ly < vlo { ulo + (ly - vlo) / s0 } else { uhi + (ly - vhi) / s1 };
        ExtReal::new(u.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_tab() -> MonotoneTab {
        let t: Vec<f64> = (0..=40).map(|k| 10f64.powf(-2.0 + 0.1 * k as f64)).collect();
        let v: Vec<f64> = t.iter().map(|t| t * t).collect();
        MonotoneTab::from_samples(&t, &v, TailTag::Diverges).unwrap()
    }

    #[test]
    fn power_law_is_reproduced_exactly() {
        let tab = square_tab();
        for &t in &[1e-5, 0.0137, 1.0, 3.3, 512.0] {
            let v = tab.eval(t).value();
            assert!((v / (t * t) - 1.0).abs() < 1e-12, "t={t}");
            let back = tab.inverse(t * t).value();
            assert!((back / t - 1.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn inverse_is_left_continuous_on_flat_pieces() {
        let t = [1.0, 2.0, 3.0, 4.0];
        let v = [1.0, 5.0, 5.0, 9.0];
        let tab = MonotoneTab::from_samples(&t, &v, TailTag::Diverges).unwrap();
        assert!((tab.inverse(5.0).value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finite_limit_gives_infinite_inverse() {
        let t = [1.0, 2.0];
        let v = [1.0, 2.0];
        let tab = MonotoneTab::from_samples(&t, &v, TailTag::FiniteLimit(3.0)).unwrap();
        assert!(tab.inverse(3.0).is_infinite());
        assert!(tab.inverse(2.5).is_finite());
    }

    #[test]
    fn rejects_decreasing_values() {
        assert!(MonotoneTab::from_samples(&[1.0, 2.0], &[2.0, 1.0], TailTag::Diverges).is_err());
    }
}
