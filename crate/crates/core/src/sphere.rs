//! Deterministic quasi-uniform point sets on the unit 3-sphere.

use std::f64::consts::TAU;

use crate::quaternion::Quaternion;

/// Generalized Fibonacci ("super-Fibonacci") spiral on `S^3`.
///
/// Point `i` of `count` is
/// `(r sin a, r cos a, R sin b, R cos b)` with `s = i + 1/2`,
/// `r = sqrt(s/count)`, `R = sqrt(1 - s/count)`, `a = 2 pi s / sqrt 2` and
/// `b = 2 pi s / psi`, where `psi^4 = psi + 4`. The first two coordinates
/// form the complex part `w1` of `w = w1 + w2 j`, so `|w1|^2` sweeps `(0,1)`
/// evenly.
#[derive(Debug, Clone, Copy)]
pub struct SuperFibonacci {
    count: usize,
}

const PHI: f64 = std::f64::consts::SQRT_2;
const PSI: f64 = 1.533_751_168_755_204_3;

impl SuperFibonacci {
    pub fn new(count: usize) -> Self {
        Self { count }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn point(&self, i: usize) -> Quaternion {
        let s = i as f64 + 0.5;
        let t = s / self.count as f64;
        let (r, big_r) = (t.sqrt(), (1.0 - t).sqrt());
        let (sa, ca) = (TAU * s / PHI).sin_cos();
        let (sb, cb) = (TAU * s / PSI).sin_cos();
        Quaternion::new(r * sa, r * ca, big_r * sb, big_r * cb)
    }

    pub fn iter(&self) -> impl Iterator<Item = Quaternion> + '_ {
        (0..self.count).map(|i| self.point(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_solves_its_quartic() {
        assert!((PSI.powi(4) - PSI - 4.0).abs() < 1e-12);
    }

    #[test]
    fn points_are_unit_and_deterministic() {
        let l = SuperFibonacci::new(1000);
        for q in l.iter() {
            assert!((q.norm() - 1.0).abs() < 1e-14);
        }
        assert_eq!(l.point(17), SuperFibonacci::new(1000).point(17));
    }

    #[test]
    fn covers_the_sphere_roughly_uniformly() {
        // mean of each coordinate squared is 1/4 for the uniform measure
        let l = SuperFibonacci::new(20_000);
        let n = l.len() as f64;
        let sums = l.iter().fold([0.0; 4], |mut acc, q| {
            acc[0] += q.re * q.re;
            acc[1] += q.i * q.i;
            acc[2] += q.j * q.j;
            acc[3] += q.k * q.k;
            acc
        });
        for s in sums {
            assert!((s / n - 0.25).abs() < 5e-3);
        }
    }
}
