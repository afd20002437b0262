//! Balls in R^n.

use rand::Rng;

/// Volume of the unit ball, `omega_0 = 1`, `omega_1 = 2`, `omega_n = omega_{n-2} 2 pi / n`.
pub fn omega(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => omega(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

pub fn ball_volume(n: usize, r: f64) -> f64 {
    omega(n) * r.powi(n as i32)
}

/// Radius of the ball with volume `v`.
pub fn ball_radius(n: usize, v: f64) -> f64 {
    (v / omega(n)).powf(1.0 / n as f64)
}

/// Uniform point in `B(center, r)` by rejection from the enclosing cube.
pub fn random_in_ball<R: Rng>(rng: &mut R, center: &[f64], r: f64) -> Vec<f64> {
    loop {
        let d: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if d.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return center.iter().zip(d).map(|(c, v)| c + r * v).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!((omega(2) - pi).abs() < 1e-15);
        assert!((omega(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((omega(4) - pi * pi / 2.0).abs() < 1e-14);
        assert!((ball_radius(3, ball_volume(3, 0.7)) - 0.7).abs() < 1e-15);
    }
}
