//! Random and structured generators for quaternions, matrices and group
//! elements. Used by the property suites, the examples and the reproduction
//! battery; every generator takes an explicit RNG so runs are reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{check_membership, HermitianSpace, Isometry, ProjectivePoint};
use crate::qmatrix::{vec_euclid_inner, vec_norm, vec_right_scale, vec_sub, QMatrix};
use crate::quaternion::Quaternion;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Quaternion with independent standard normal coefficients.
pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

/// Uniformly distributed unit quaternion.
pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = random_quaternion(rng);
        let n = q.norm();
        if n > 1e-6 {
            return q / n;
        }
    }
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn random_qvector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Quaternion> {
    (0..len).map(|_| random_quaternion(rng)).collect()
}

pub fn random_qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::new(rows, cols, (0..rows * cols).map(|_| random_quaternion(rng)).collect())
        .expect("finite entries")
}

/// Haar-ish random element of the compact group `Sp(n)` (`U* U = I`), by
/// Euclidean Gram–Schmidt over right quaternionic scalars.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = random_qvector(rng, n);
        for u in &cols {
            let s = vec_euclid_inner(u, &v);
            v = vec_sub(&v, &vec_right_scale(u, s));
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            cols.push(v.iter().map(|q| *q / norm).collect());
        }
    }
    QMatrix::from_columns(&cols).expect("square")
}

fn wrap(n: usize, m: QMatrix) -> Isometry {
    let space = HermitianSpace::new(n).expect("n >= 1");
    check_membership(&m, &space, 1e-8).expect("generator produced a group element")
}

/// `diag(U, u)`: a random element fixing the origin.
pub fn random_stabilizer<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Isometry {
    let u = random_unitary(rng, n);
    let mut m = QMatrix::zeros(n + 1, n + 1);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = u[(r, c)];
        }
    }
    m[(n, n)] = random_unit_quaternion(rng);
    wrap(n, m)
}

/// Real hyperbolic translation of rapidity `s` in the plane of `e_axis` and
/// `e_{n+1}`; it moves the origin to distance `s` and has corner `cosh s`.
pub fn boost(n: usize, axis: usize, s: f64) -> Isometry {
    assert!(axis < n, "boost axis must be a positive direction");
    let mut m = QMatrix::identity(n + 1);
    let (ch, sh) = (s.cosh(), s.sinh());
    m[(axis, axis)] = Quaternion::real(ch);
    m[(axis, n)] = Quaternion::real(sh);
    m[(n, axis)] = Quaternion::real(sh);
    m[(n, n)] = Quaternion::real(ch);
    wrap(n, m)
}

/// `K1 B(s) K2` with random stabilizers and a boost of rapidity
/// `s ~ U[0, max_rapidity]`.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, max_rapidity: f64) -> Isometry {
    let s = rng.random::<f64>() * max_rapidity;
    random_isometry_at(rng, n, s)
}

/// Random isometry whose corner has modulus exactly `cosh s`.
pub fn random_isometry_at<R: Rng + ?Sized>(rng: &mut R, n: usize, s: f64) -> Isometry {
    let k1 = random_stabilizer(rng, n);
    let k2 = random_stabilizer(rng, n);
    let b = boost(n, 0, s);
    k1.compose(&b).and_then(|x| x.compose(&k2)).expect("same dimension")
}

/// `diag(e^{i theta_1}, ..., e^{i theta_{n+1}})`, elliptic with the last
/// angle of negative type.
pub fn diagonal_elliptic(angles: &[f64]) -> Isometry {
    let n = angles.len() - 1;
    wrap(n, QMatrix::diag(&angles.iter().map(|&t| Quaternion::exp_i(t)).collect::<Vec<_>>()))
}

/// Interior point with ball coordinates of Euclidean norm below `max_radius`.
pub fn random_interior_point<R: Rng + ?Sized>(rng: &mut R, n: usize, max_radius: f64) -> ProjectivePoint {
    let dir = random_qvector(rng, n);
    let norm = vec_norm(&dir);
    let r = max_radius * rng.random::<f64>().powf(1.0 / (4 * n) as f64);
    let coords: Vec<Quaternion> = dir.iter().map(|q| *q * (r / norm)).collect();
    ProjectivePoint::from_ball(&coords, 1e-12).expect("interior by construction")
}

/// Random `h = (a b; c d)` with determinant exactly 1 up to rounding, given
/// row-major; `|a|` is kept away from 0 so entries stay moderate.
pub fn random_sl2c<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    loop {
        let a = random_complex(rng);
        if a.norm() < 0.5 {
            continue;
        }
        let b = random_complex(rng);
        let c = random_complex(rng);
        let d = (Complex64::new(1.0, 0.0) + b * c) / a;
        return [a, b, c, d];
    }
}

/// Uniform point of the open disk `|t| < radius`.
pub fn random_disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, phi)
}
