//! Boxes and balls in `R^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::ball_volume;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainKind {
    Box { center: Vec<f64>, half: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub n: usize,
    pub kind: DomainKind,
}

impl Domain {
    pub fn rect(center: Vec<f64>, half: Vec<f64>) -> Result<Domain> {
        if center.len() != half.len() || center.is_empty() {
            return Err(Error::Argument("box center and half-widths must have the same positive length".into()));
        }
        if half.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Argument(format!("box half-widths must be positive and finite, got {half:?}")));
        }
        Ok(Domain {
            n: center.len(),
            kind: DomainKind::Box { center, half },
        })
    }

    /// The box `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Domain> {
        Domain::rect(vec![0.5 * (lo + hi); n], vec![0.5 * (hi - lo); n])
    }

    /// The box with the given corners.
    pub fn from_corners(lo: &[f64], hi: &[f64]) -> Result<Domain> {
        let c = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let h = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        Domain::rect(c, h)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Domain> {
        if center.is_empty() || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Argument(format!("ball needs a nonempty center and a positive radius, got {radius}")));
        }
        Ok(Domain {
            n: center.len(),
            kind: DomainKind::Ball { center, radius },
        })
    }

    pub fn measure(&self) -> f64 {
        match &self.kind {
            DomainKind::Box { half, .. } => half.iter().map(|h| 2.0 * h).product(),
            DomainKind::Ball { radius, .. } => ball_volume(self.n, *radius),
        }
    }

    pub fn center(&self) -> &[f64] {
        match &self.kind {
            DomainKind::Box { center, .. } | DomainKind::Ball { center, .. } => center,
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            DomainKind::Box { center, half } => x.iter().zip(center).zip(half).all(|((x, c), h)| (x - c).abs() <= *h),
            DomainKind::Ball { center, radius } => dist(x, center) <= *radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Box { half, .. } => 2.0 * half.iter().map(|h| h * h).sum::<f64>().sqrt(),
            DomainKind::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Lower and upper corners of the bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DomainKind::Box { center, half } => (
                center.iter().zip(half).map(|(c, h)| c - h).collect(),
                center.iter().zip(half).map(|(c, h)| c + h).collect(),
            ),
            DomainKind::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// One-line description used in CSV headers.
    pub fn describe(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";");
        match &self.kind {
            DomainKind::Box { center, half } => format!("box center={} half={}", list(center), list(half)),
            DomainKind::Ball { center, radius } => format!("ball center={} radius={radius}", list(center)),
        }
    }

    /// Inverse of [`Domain::describe`].
    pub fn parse(n: usize, s: &str) -> Result<Domain> {
        let bad = || Error::Argument(format!("cannot parse domain `{s}`"));
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(bad)?;
        let mut center = None;
        let mut half = None;
        let mut radius = None;
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(bad)?;
            let list = || -> Result<Vec<f64>> { v.split(';').map(|x| x.parse::<f64>().map_err(|_| bad())).collect() };
            match k {
                "center" => center = Some(list()?),
                "half" => half = Some(list()?),
                "radius" => radius = Some(v.parse::<f64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let center = center.ok_or_else(bad)?;
        if center.len() != n {
            return Err(Error::Argument(format!("domain center has {} coordinates, expected {n}", center.len())));
        }
        match kind {
            "box" => Domain::rect(center, half.ok_or_else(bad)?),
            "ball" => Domain::ball(center, radius.ok_or_else(bad)?),
            _ => Err(bad()),
        }
    }
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures() {
        let b = Domain::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(b.measure(), 1.0);
        let d = Domain::ball(vec![0.0; 3], 2.0).unwrap();
        assert!((d.measure() - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-12);
        assert!(d.contains(&[0.0, 2.0, 0.0]));
        assert!(!d.contains(&[0.0, 2.1, 0.0]));
    }

    #[test]
    fn describe_round_trip() {
        let b = Domain::rect(vec![0.5, -1.0], vec![0.25, 2.0]).unwrap();
        assert_eq!(Domain::parse(2, &b.describe()).unwrap(), b);
        let d = Domain::ball(vec![0.0, 1.0], 0.5).unwrap();
        assert_eq!(Domain::parse(2, &d.describe()).unwrap(), d);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Domain::ball(vec![0.0], 0.0).is_err());
        assert!(Domain::rect(vec![0.0], vec![-1.0]).is_err());
    }
}
