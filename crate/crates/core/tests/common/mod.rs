#![allow(dead_code)]

use std::sync::Arc;

use mosob::gyf::{young_conjugate, Conjugate};
use mosob::YoungFn;

/// Relative slack for the pointwise properties; every side is computed to
/// about 1e-10 relative, so this only absorbs rounding.
pub const REL_TOL: f64 = 1e-8;

/// Which property a sample violated, with the offending numbers.
#[derive(Debug)]
pub struct Violation {
    pub family: String,
    pub property: &'static str,
    pub x: Vec<f64>,
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

fn above(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + REL_TOL * rhs.abs().max(lhs.abs())
}

/// `phi(x, l s + (1-l) t) <= l phi(x, s) + (1-l) phi(x, t)`.
pub fn convexity(name: &str, phi: &dyn YoungFn, x: &[f64], s: f64, t: f64, l: f64) -> Option<Violation> {
    let lhs = phi.eval(x, l * s + (1.0 - l) * t).value();
    let rhs = l * phi.eval(x, s).value() + (1.0 - l) * phi.eval(x, t).value();
    above(lhs, rhs).then(|| Violation {
        family: name.into(),
        property: "convexity",
        x: x.to_vec(),
        s,
        t,
        lhs,
        rhs,
    })
}

/// `s t <= phi(x, s) + phi~(x, t)`.
pub fn fenchel_young(name: &str, phi: &dyn YoungFn, x: &[f64], s: f64, t: f64) -> Option<Violation> {
    let lhs = s * t;
    let rhs = phi.eval(x, s).value() + young_conjugate(phi, x, t).value();
    above(lhs, rhs).then(|| Violation {
        family: name.into(),
        property: "fenchel-young",
        x: x.to_vec(),
        s,
        t,
        lhs,
        rhs,
    })
}

/// `t <= phi^{-1}(x, t) phi~^{-1}(x, t) <= 2t`.
pub fn inverse_sandwich(name: &str, phi: Arc<dyn YoungFn>, x: &[f64], t: f64) -> Option<Violation> {
    let a = phi.inverse(x, t).value();
    let conj = Conjugate { base: phi };
    let b = conj.inverse(x, t).value();
    let prod = a * b;
    let v = |lhs, rhs| Violation {
        family: name.into(),
        property: "inverse-sandwich",
        x: x.to_vec(),
        s: t,
        t,
        lhs,
        rhs,
    };
    if above(t, prod) {
        Some(v(t, prod))
    } else if above(prod, 2.0 * t) {
        Some(v(prod, 2.0 * t))
    } else {
        None
    }
}
