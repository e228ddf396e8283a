//! Real quaternions and the complex split `w = c1 + c2 j`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An element of the quaternions with real coefficients on `{1, i, j, k}`.
///
/// Serialized as the 4-array `[re, i, j, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

/// The decomposition `w = c1 + c2 j` with complex `c1`, `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexSplit {
    #[serde(with = "crate::serde_complex")]
    pub c1: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub c2: Complex64,
}

impl ComplexSplit {
    pub fn assemble(&self) -> Quaternion {
        Quaternion::from_split(self.c1, self.c2)
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.re, q.i, q.j, q.k]
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }
}

impl From<f64> for Quaternion {
    fn from(x: f64) -> Self {
        Quaternion::real(x)
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    #[inline]
    pub const fn real(x: f64) -> Self {
        Self::new(x, 0.0, 0.0, 0.0)
    }

    /// `e^{i theta}` as a quaternion.
    pub fn exp_i(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s, 0.0, 0.0)
    }

    /// Builds `c1 + c2 j`.
    #[inline]
    pub fn from_split(c1: Complex64, c2: Complex64) -> Self {
        // (x + y i) j = x j + y k
        Self::new(c1.re, c1.im, c2.re, c2.im)
    }

    #[inline]
    pub fn split(&self) -> ComplexSplit {
        ComplexSplit {
            c1: Complex64::new(self.re, self.i),
            c2: Complex64::new(self.j, self.k),
        }
    }

    /// The `1, i` component as a complex number.
    #[inline]
    pub fn complex_part(&self) -> Complex64 {
        Complex64::new(self.re, self.i)
    }

    #[inline]
    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    /// The modulus `|z|`.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Real part `(z + conj z) / 2`.
    #[inline]
    pub fn real_part(&self) -> f64 {
        self.re
    }

    /// Imaginary part `(z - conj z) / 2`, itself a quaternion.
    #[inline]
    pub fn imag_part(&self) -> Self {
        Self::new(0.0, self.i, self.j, self.k)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.i.is_finite() && self.j.is_finite() && self.k.is_finite()
    }

    /// `conj(z) / |z|^2`; fails when `|z| < tol`.
    pub fn try_inverse(&self, tol: f64) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2.sqrt() >= tol) || n2 == 0.0 {
            return Err(Error::ZeroInverse(n2.sqrt()));
        }
        Ok(self.conj() / n2)
    }

    /// `w z w^{-1}`, computed as a rotation of the imaginary part so that real
    /// quaternions are returned bit-for-bit.
    pub fn conjugate_by(&self, w: &Quaternion) -> Self {
        let n2 = w.norm_sqr();
        let v = self.imag_part();
        let rotated = (*w * v * w.conj()) / n2;
        Self::new(self.re, rotated.i, rotated.j, rotated.k)
    }

    /// Canonical complex representative `Re z + |Im z| i` of the similarity
    /// class of `z`.
    pub fn class_representative(&self) -> Complex64 {
        Complex64::new(self.re, self.imag_part().norm())
    }

    /// Angle in `[0, pi]` of the class representative.
    pub fn class_angle(&self) -> f64 {
        self.imag_part().norm().atan2(self.re)
    }

    pub fn max_abs(&self) -> f64 {
        self.re.abs().max(self.i.abs()).max(self.j.abs()).max(self.k.abs())
    }
}

/// `z` and `w` are similar iff they have equal real parts and moduli.
pub fn similar(z: &Quaternion, w: &Quaternion, tol: f64) -> bool {
    (z.re - w.re).abs() <= tol && (z.norm() - w.norm()).abs() <= tol
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.re)?;
        for (v, unit) in [(self.i, "i"), (self.j, "j"), (self.k, "k")] {
            if v.is_sign_negative() {
                write!(f, " - {}{unit}", -v)?;
            } else {
                write!(f, " + {v}{unit}")?;
            }
        }
        Ok(())
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    /// Hamilton product.
    #[inline]
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.re * b.re - a.i * b.i - a.j * b.j - a.k * b.k,
            a.re * b.i + a.i * b.re + a.j * b.k - a.k * b.j,
            a.re * b.j - a.i * b.k + a.j * b.re + a.k * b.i,
            a.re * b.k + a.i * b.j - a.j * b.i + a.k * b.re,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.re / s, self.i / s, self.j / s, self.k / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Quaternion::ZERO, |acc, q| acc + q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn units_multiply_like_hamilton() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        let m1 = -Quaternion::ONE;
        assert_eq!(Quaternion::I * Quaternion::I, m1);
        assert_eq!(Quaternion::J * Quaternion::J, m1);
        assert_eq!(Quaternion::K * Quaternion::K, m1);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, m1);
    }

    #[test]
    fn complex_slides_through_j_as_conjugate() {
        let z = Quaternion::new(0.3, -1.7, 0.0, 0.0);
        assert!(close(z * Quaternion::J, Quaternion::J * z.conj(), 0.0));
    }

    #[test]
    fn times_conjugate_is_modulus_squared() {
        let z = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(z * z.conj(), Quaternion::real(4.0));
    }

    #[test]
    fn similarity_examples() {
        let tol = 1e-9;
        assert!(similar(&Quaternion::I, &Quaternion::J, tol));
        assert!(similar(&Quaternion::I, &-Quaternion::I, tol));
        // -i really is a conjugate of i
        let rotated = Quaternion::I.conjugate_by(&Quaternion::J);
        assert!(close(rotated, -Quaternion::I, 1e-15));
        assert!(!similar(
            &Quaternion::new(1.0, 1.0, 0.0, 0.0),
            &Quaternion::new(2.0, 1.0, 0.0, 0.0),
            tol
        ));
    }

    #[test]
    fn class_representative_examples() {
        let r = Quaternion::J.class_representative();
        assert_eq!(r, Complex64::new(0.0, 1.0));
        assert!((Quaternion::J.class_angle() - PI / 2.0).abs() < 1e-15);
        let r = (-Quaternion::ONE).class_representative();
        assert_eq!(r, Complex64::new(-1.0, 0.0));
        assert!((Quaternion::real(-1.0).class_angle() - PI).abs() < 1e-15);
        for t in [0.0, 0.4, 1.3, PI / 2.0, 2.9, PI] {
            let z = Quaternion::exp_i(t);
            let r = z.class_representative();
            assert!((r - Complex64::from_polar(1.0, t)).norm() < 1e-15);
            assert!((z.class_angle() - t).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(matches!(
            Quaternion::ZERO.try_inverse(1e-9),
            Err(Error::ZeroInverse(_))
        ));
        assert!(Quaternion::real(1e-12).try_inverse(1e-9).is_err());
        let z = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        let zi = z.try_inverse(1e-9).unwrap();
        assert!(close(z * zi, Quaternion::ONE, 1e-15));
    }

    #[test]
    fn split_round_trips() {
        let z = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        let s = z.split();
        assert_eq!(s.assemble(), z);
        // c1 + c2 j through actual multiplication
        let rebuilt = Quaternion::from(s.c1) + Quaternion::from(s.c2) * Quaternion::J;
        assert!(close(rebuilt, z, 1e-16));
    }

    #[test]
    fn serializes_as_four_array() {
        let z = Quaternion::new(1.0, -2.0, 0.5, 0.0);
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, "[1.0,-2.0,0.5,0.0]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    fn scale(a: &Quaternion, b: &Quaternion, c: &Quaternion) -> f64 {
        1.0 + a.norm() * b.norm() * c.norm()
    }

    proptest! {
        #[test]
        fn product_is_associative_and_distributive(a in quat(), b in quat(), c in quat()) {
            let s = scale(&a, &b, &c);
            prop_assert!(((a * b) * c - a * (b * c)).norm() <= 1e-12 * s);
            prop_assert!((a * (b + c) - (a * b + a * c)).norm() <= 1e-12 * s);
            prop_assert!(((a + b) * c - (a * c + b * c)).norm() <= 1e-12 * s);
        }

        #[test]
        fn modulus_is_multiplicative(a in quat(), b in quat()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn conjugation_preserves_real_part_and_modulus(z in quat(), w in quat()) {
            prop_assume!(w.norm() > 1e-3);
            let u = w / w.norm();
            let c = u * z * u.try_inverse(1e-9).unwrap();
            prop_assert!((c.re - z.re).abs() <= 1e-12 * (1.0 + z.norm()));
            prop_assert!((c.norm() - z.norm()).abs() <= 1e-12 * (1.0 + z.norm()));
            prop_assert!(close(z.conjugate_by(&w), c, 1e-12 * (1.0 + z.norm())));
            prop_assert_eq!(z.conj().conj(), z);
        }

        #[test]
        fn representative_is_constant_on_orbits(z in quat(), seeds in proptest::collection::vec(quat(), 100)) {
            let r0 = z.class_representative();
            for w in seeds.iter().filter(|w| w.norm() > 1e-6) {
                let r = z.conjugate_by(w).class_representative();
                prop_assert!((r - r0).norm() < 1e-10);
            }
        }
    }
}
