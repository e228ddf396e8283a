//! Elliptic elements: eigenvalue similarity classes with their types, the
//! invariant `delta(g)`, fixed point sets and diagonalizing frames.
//!
//! An elliptic `g` in `Sp(n,1)` is conjugate to `diag(lambda_1, ..., lambda_{n+1})`
//! with unit complex `lambda`s. Each class has a type given by the sign of the
//! Hermitian norm of its eigenvectors; exactly one eigenvector direction is
//! negative and its eigenvalue is written `lambda_{n+1}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{hermitian_frame, hermitian_orthonormalize, inner_unchecked, Isometry, NormSign, ProjectivePoint};
use crate::qmatrix::{right_eigenpairs_with, vec_add, vec_from_complex, vec_max_abs_diff, vec_norm, vec_right_scale, EigenOptions, QMatrix};
use crate::quaternion::Quaternion;
use crate::sphere::SuperFibonacci;
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EllipticKind {
    /// The fixed point is unique.
    Regular,
    /// The negative eigenvalue is shared with a positive class, so the fixed
    /// set is a positive-dimensional totally geodesic submanifold.
    Boundary,
}

impl std::fmt::Display for EllipticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EllipticKind::Regular => "regular",
            EllipticKind::Boundary => "boundary",
        })
    }
}

/// A similarity class of right eigenvalues of one type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityClass {
    /// `theta` in `[0, pi]` with canonical value `e^{i theta}`.
    pub angle: f64,
    pub modulus: f64,
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    pub multiplicity: usize,
    pub type_tag: TypeTag,
    /// Eigenvectors `g v = v value` normalized to `<v,v> = +-1` and
    /// pairwise orthogonal for the Hermitian form.
    pub eigenvectors: Vec<Vec<Quaternion>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientField {
    /// Non-real eigenvalue: eigenvectors combine over `C` only.
    Complex,
    /// Real eigenvalue (`+-1`): any right quaternionic combination.
    Quaternion,
}

impl CoefficientField {
    /// Real parameters per coefficient.
    pub fn real_dim(&self) -> usize {
        match self {
            CoefficientField::Complex => 2,
            CoefficientField::Quaternion => 4,
        }
    }
}

/// The fixed set of an elliptic element, as projectivized negative vectors of
/// `basis[0] + basis[1] c_1 + ... + basis[m] c_m` with `sum |c_i|^2 < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSetDescription {
    /// The eigenvalue shared by the whole spanning set.
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    pub coefficient_field: CoefficientField,
    /// `basis[0]` has `<v,v> = -1`, the others `+1`; pairwise orthogonal.
    pub basis: Vec<Vec<Quaternion>>,
    /// Dimension of the fixed submanifold over the coefficient field.
    pub dimension: usize,
}

impl FixedSetDescription {
    /// Number of real parameters used by [`Self::point_from_params`].
    pub fn param_dim(&self) -> usize {
        self.dimension * self.coefficient_field.real_dim()
    }

    /// The fixed point `P(basis[0])`.
    pub fn base_point(&self) -> ProjectivePoint {
        ProjectivePoint::with_sign(self.basis[0].clone(), NormSign::Negative).expect("negative basis vector")
    }

    fn combination(&self, coeffs: &[Quaternion]) -> Vec<Quaternion> {
        coeffs
            .iter()
            .zip(&self.basis[1..])
            .fold(self.basis[0].clone(), |acc, (c, b)| vec_add(&acc, &vec_right_scale(b, *c)))
    }

    /// The fixed point with coefficients `c_1, ..., c_m`.
    pub fn point_at(&self, coeffs: &[Quaternion]) -> Result<ProjectivePoint> {
        if coeffs.len() != self.dimension {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a fixed set of dimension {}",
                coeffs.len(),
                self.dimension
            )));
        }
        if self.coefficient_field == CoefficientField::Complex && coeffs.iter().any(|c| c.j != 0.0 || c.k != 0.0) {
            return Err(Error::Invalid("fixed set coefficients must be complex for a non-real eigenvalue".into()));
        }
        let r2: f64 = coeffs.iter().map(Quaternion::norm_sqr).sum();
        if !(r2 < 1.0) {
            return Err(Error::NotInterior(format!("coefficient norm^2 {r2} >= 1")));
        }
        ProjectivePoint::with_sign(self.combination(coeffs), NormSign::Negative)
    }

    /// Maps unconstrained real parameters `x` onto the open coefficient
    /// ball by `c = x / sqrt(1 + |x|^2)`.
    pub fn coefficients_from_params(&self, x: &[f64]) -> Vec<Quaternion> {
        let scale = 1.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let per = self.coefficient_field.real_dim();
        (0..self.dimension)
            .map(|i| {
                let p = |k: usize| if k < per { x[i * per + k] * scale } else { 0.0 };
                Quaternion::new(p(0), p(1), p(2), p(3))
            })
            .collect()
    }

    pub fn point_from_params(&self, x: &[f64]) -> Result<ProjectivePoint> {
        if x.len() != self.param_dim() {
            return Err(Error::DimensionMismatch(format!("{} parameters, expected {}", x.len(), self.param_dim())));
        }
        self.point_at(&self.coefficients_from_params(x))
    }

    /// Coefficients of a fixed point `q`, with `q`'s lift rescaled so that the
    /// `basis[0]` coefficient is 1. Errors if `q` is not in the fixed set.
    pub fn coefficients_of(&self, q: &ProjectivePoint) -> Result<Vec<Quaternion>> {
        let lift = q.lift();
        if lift.len() != self.basis[0].len() {
            return Err(Error::DimensionMismatch("point and fixed set live in different spaces".into()));
        }
        let c0 = -inner_unchecked(lift, &self.basis[0]);
        let inv = c0
            .try_inverse(1e-300)
            .map_err(|_| Error::NormalizationFailed("point is orthogonal to the fixed set".into()))?;
        let coeffs: Vec<Quaternion> = self.basis[1..].iter().map(|b| inner_unchecked(lift, b) * inv).collect();
        let rebuilt = vec_right_scale(&self.combination(&coeffs), c0);
        let err = vec_max_abs_diff(&rebuilt, lift);
        if !(err <= 1e-8 * vec_norm(lift).max(1.0)) {
            return Err(Error::NormalizationFailed(format!("point is not in the fixed set (residual {err:e})")));
        }
        Ok(coeffs)
    }

    /// `count` fixed points with standard normal parameters.
    pub fn sample_points<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<ProjectivePoint> {
        (0..count)
            .map(|_| {
                let x: Vec<f64> = (0..self.param_dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                self.point_from_params(&x).expect("parameters map inside the ball")
            })
            .collect()
    }
}

/// Full analysis of an elliptic element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticProfile {
    pub element: Isometry,
    /// Positive classes sorted by angle, then the negative class last.
    pub classes: Vec<SimilarityClass>,
    pub negative_index: usize,
    pub delta: f64,
    pub kind: EllipticKind,
    pub fixed_set_dimension: usize,
    pub fixed_set: FixedSetDescription,
}

impl EllipticProfile {
    pub fn negative_class(&self) -> &SimilarityClass {
        &self.classes[self.negative_index]
    }

    pub fn negative_angle(&self) -> f64 {
        self.negative_class().angle
    }

    pub fn positive_classes(&self) -> impl Iterator<Item = &SimilarityClass> {
        self.classes.iter().filter(|c| c.type_tag == TypeTag::Positive)
    }
}

/// `max(4 sin^2((a+b)/2), 4 sin^2((a-b)/2))`, the squared distance between
/// the classes of `e^{ia}` and `e^{ib}` maximized over representatives.
pub fn delta_closed_form(theta_i: f64, theta_neg: f64) -> f64 {
    let sum = (0.5 * (theta_i + theta_neg)).sin();
    let diff = (0.5 * (theta_i - theta_neg).abs()).sin();
    4.0 * (sum * sum).max(diff * diff)
}

/// Max of `|e^{i a} - w e^{i b} w^{-1}|^2` over `samples` points of the
/// super-Fibonacci lattice on `S^3`. Deterministic and a lower bound for
/// [`delta_closed_form`]; meant for `samples >= 1000`.
pub fn delta_bruteforce_oracle(theta_i: f64, theta_neg: f64, samples: usize) -> f64 {
    let a = Quaternion::exp_i(theta_i);
    let b = Quaternion::exp_i(theta_neg);
    let lattice = SuperFibonacci::new(samples);
    (0..samples)
        .into_par_iter()
        .map(|s| (a - b.conjugate_by(&lattice.point(s))).norm_sqr())
        .reduce(|| 0.0, f64::max)
}

struct Cluster {
    value: Complex64,
    vectors: Vec<Vec<Quaternion>>,
}

impl Cluster {
    fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

/// Most negative Hermitian norm over unit combinations in the cluster, the
/// combination attaining it, and the number of negative directions.
fn negative_direction(cluster: &Cluster, tol: f64) -> (f64, Vec<Quaternion>, usize) {
    let vs = &cluster.vectors;
    let m = vs.len();
    let combine = |coeffs: &[Quaternion]| {
        coeffs
            .iter()
            .zip(vs)
            .fold(vec![Quaternion::ZERO; vs[0].len()], |acc, (c, v)| vec_add(&acc, &vec_right_scale(v, *c)))
    };
    if cluster.is_real() {
        let gram = QMatrix::new(m, m, (0..m * m).map(|idx| inner_unchecked(&vs[idx % m], &vs[idx / m])).collect())
            .expect("finite gram matrix");
        let chi = gram.complex_adjoint();
        let chi = (&chi + chi.adjoint()).scale(0.5);
        let eig = chi.symmetric_eigen();
        let (imin, mu) = argmin(eig.eigenvalues.as_slice());
        let col: DVector<Complex64> = eig.eigenvectors.column(imin).into_owned();
        let negatives = eig.eigenvalues.iter().filter(|&&x| x < -tol).count().div_ceil(2);
        (mu, combine(&vec_from_complex(&col)), negatives)
    } else {
        let gram = DMatrix::from_fn(m, m, |a, b| inner_unchecked(&vs[b], &vs[a]).complex_part());
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let eig = gram.symmetric_eigen();
        let (imin, mu) = argmin(eig.eigenvalues.as_slice());
        let coeffs: Vec<Quaternion> = eig.eigenvectors.column(imin).iter().map(|c| Quaternion::from(*c)).collect();
        let negatives = eig.eigenvalues.iter().filter(|&&x| x < -tol).count();
        (mu, combine(&coeffs), negatives)
    }
}

fn argmin(xs: &[f64]) -> (usize, f64) {
    xs.iter().copied().enumerate().fold((0, f64::INFINITY), |best, (i, x)| if x < best.1 { (i, x) } else { best })
}

fn class_of(value: Complex64, multiplicity: usize, type_tag: TypeTag, eigenvectors: Vec<Vec<Quaternion>>) -> SimilarityClass {
    SimilarityClass {
        angle: value.im.abs().atan2(value.re),
        modulus: value.norm(),
        value,
        multiplicity,
        type_tag,
        eigenvectors,
    }
}

/// Classifies the eigenvalues of an elliptic `g` and computes `delta(g)`.
pub fn analyze_elliptic(g: &Isometry, tol: &Tolerances) -> Result<EllipticProfile> {
    let opts = EigenOptions { pair_tol: tol.pair_matching, cluster_tol: tol.angle_cluster, residual_tol: tol.eigen_residual };
    let pairs = right_eigenpairs_with(g.matrix(), &opts).map_err(|e| match e {
        Error::EigenSolve(msg) => Error::NotElliptic(format!("no eigenbasis: {msg}")),
        other => other,
    })?;

    let mut clusters: Vec<Cluster> = Vec::new();
    for p in pairs {
        match clusters.last_mut() {
            Some(c) if c.value == p.value => c.vectors.push(p.vector),
            _ => clusters.push(Cluster { value: p.value, vectors: vec![p.vector] }),
        }
    }
    for c in &clusters {
        let dev = (c.value.norm() - 1.0).abs();
        if dev > tol.unit_modulus {
            return Err(Error::NotElliptic(format!("eigenvalue {} has modulus off 1 by {dev:e}", c.value)));
        }
    }

    let directions: Vec<(f64, Vec<Quaternion>, usize)> =
        clusters.iter().map(|c| negative_direction(c, tol.type_ambiguity)).collect();
    let (neg, mu) = argmin(&directions.iter().map(|d| d.0).collect::<Vec<_>>());
    if mu > tol.type_ambiguity {
        return Err(Error::NotElliptic("no eigenvector of negative Hermitian norm".into()));
    }
    if mu >= -tol.type_ambiguity {
        return Err(Error::AmbiguousTypes(mu));
    }
    let negative_count: usize = directions.iter().map(|d| d.2).sum();
    if negative_count != 1 {
        return Err(Error::AmbiguousTypes(mu));
    }

    let mut positives: Vec<SimilarityClass> = Vec::new();
    let mut negative_class = None;
    let mut fixed_set = None;
    for (idx, c) in clusters.iter().enumerate() {
        let m = c.vectors.len();
        let mut cands = Vec::with_capacity(m + 1);
        if idx == neg {
            cands.push(directions[idx].1.clone());
        }
        cands.extend(c.vectors.iter().cloned());
        let frame = hermitian_orthonormalize(&cands, m, tol.null_norm)?;
        if frame.len() != m {
            return Err(Error::NormalizationFailed(format!("eigenspace of {} lost rank under orthogonalization", c.value)));
        }
        let negative_vectors = frame.iter().filter(|(_, s)| *s < 0.0).count();
        if negative_vectors != usize::from(idx == neg) {
            return Err(Error::AmbiguousTypes(mu));
        }
        if idx == neg {
            let basis: Vec<Vec<Quaternion>> = frame.iter().map(|(v, _)| v.clone()).collect();
            negative_class = Some(class_of(c.value, 1, TypeTag::Negative, vec![basis[0].clone()]));
            if m > 1 {
                positives.push(class_of(c.value, m - 1, TypeTag::Positive, basis[1..].to_vec()));
            }
            fixed_set = Some(FixedSetDescription {
                value: c.value,
                coefficient_field: if c.is_real() { CoefficientField::Quaternion } else { CoefficientField::Complex },
                basis,
                dimension: m - 1,
            });
        } else {
            positives.push(class_of(c.value, m, TypeTag::Positive, frame.into_iter().map(|(v, _)| v).collect()));
        }
    }
    let negative_class = negative_class.expect("negative cluster visited");
    let fixed_set = fixed_set.expect("negative cluster visited");

    positives.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let delta = positives.iter().map(|p| delta_closed_form(p.angle, negative_class.angle)).fold(0.0, f64::max);
    let kind = if fixed_set.dimension > 0 { EllipticKind::Boundary } else { EllipticKind::Regular };
    let fixed_set_dimension = fixed_set.dimension;
    let mut classes = positives;
    classes.push(negative_class);
    Ok(EllipticProfile {
        element: g.clone(),
        negative_index: classes.len() - 1,
        classes,
        delta,
        kind,
        fixed_set_dimension,
        fixed_set,
    })
}

/// `delta(g)` alone.
pub fn delta(g: &Isometry, tol: &Tolerances) -> Result<f64> {
    analyze_elliptic(g, tol).map(|p| p.delta)
}

/// The fixed point set of the analyzed element.
pub fn fixed_points(profile: &EllipticProfile) -> FixedSetDescription {
    profile.fixed_set.clone()
}

/// `S` in `Sp(n,1)` whose last column spans the fixed point `q` and whose
/// other columns are eigenvectors, so `S^{-1} g S` is diagonal with the
/// negative eigenvalue in the corner and `S` sends the origin to `q`.
pub fn diagonalizing_frame(profile: &EllipticProfile, q: &ProjectivePoint, tol: &Tolerances) -> Result<Isometry> {
    if !q.is_interior() {
        return Err(Error::NormalizationFailed(format!("point is {}, not interior", q.norm_sign())));
    }
    let fs = &profile.fixed_set;
    let coeffs = fs.coefficients_of(q)?;
    let mut cands = vec![fs.combination(&coeffs)];
    cands.extend(fs.basis.iter().cloned());
    for c in &profile.classes {
        if c.value != fs.value {
            cands.extend(c.eigenvectors.iter().cloned());
        }
    }
    hermitian_frame(&profile.element.space(), &cands, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply, check_membership, HermitianSpace};
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn ghat(theta: f64) -> Isometry {
        sample::diagonal_elliptic(&[theta, -theta])
    }

    #[test]
    fn ghat_at_pi_over_three() {
        let p = analyze_elliptic(&ghat(PI / 3.0), &tol()).unwrap();
        assert!((p.delta - 3.0).abs() < 1e-12);
        assert_eq!(p.kind, EllipticKind::Boundary);
        assert_eq!(p.fixed_set_dimension, 1);
        assert_eq!(p.classes.len(), 2);
        for c in &p.classes {
            assert!((c.angle - PI / 3.0).abs() < 1e-12);
            assert_eq!(c.multiplicity, 1);
        }
        assert_eq!(p.negative_class().type_tag, TypeTag::Negative);
        assert_eq!(p.fixed_set.coefficient_field, CoefficientField::Complex);
    }

    #[test]
    fn identity_has_zero_delta_and_full_fixed_set() {
        for n in 1..=3 {
            let p = analyze_elliptic(&Isometry::identity(n), &tol()).unwrap();
            assert_eq!(p.delta, 0.0);
            assert_eq!(p.kind, EllipticKind::Boundary);
            assert_eq!(p.fixed_set_dimension, n);
            assert_eq!(p.fixed_set.coefficient_field, CoefficientField::Quaternion);
        }
    }

    #[test]
    fn regular_diagonal_fixes_only_the_origin() {
        let g = sample::diagonal_elliptic(&[PI / 3.0, PI / 5.0, PI / 7.0]);
        let p = analyze_elliptic(&g, &tol()).unwrap();
        assert_eq!(p.kind, EllipticKind::Regular);
        assert_eq!(p.fixed_set_dimension, 0);
        let q = p.fixed_set.base_point();
        assert!(q.max_abs_diff(&ProjectivePoint::origin(2)) < 1e-12);
        assert!((p.negative_angle() - PI / 7.0).abs() < 1e-12);
        let expected = delta_closed_form(PI / 3.0, PI / 7.0).max(delta_closed_form(PI / 5.0, PI / 7.0));
        assert!((p.delta - expected).abs() < 1e-12);
    }

    #[test]
    fn ghat_fixed_set_is_the_j_axis() {
        let p = analyze_elliptic(&ghat(0.9), &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in p.fixed_set.sample_points(&mut rng, 50) {
            let z = q.ball_coordinates().unwrap()[0];
            assert!(z.re.abs() < 1e-12 && z.i.abs() < 1e-12, "{z}");
            assert!(z.norm() < 1.0);
        }
    }

    #[test]
    fn negative_class_follows_the_last_coordinate() {
        let g = sample::diagonal_elliptic(&[0.4, 1.1]);
        let p = analyze_elliptic(&g, &tol()).unwrap();
        assert!((p.negative_angle() - 1.1).abs() < 1e-12);
        assert!((p.delta - delta_closed_form(0.4, 1.1)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        for t in [0.1, 0.7, 1.3, 2.9] {
            assert!((delta_closed_form(t, t) - 4.0 * t.sin().powi(2)).abs() < 1e-14);
        }
        assert_eq!(delta_closed_form(0.0, 0.0), 0.0);
        assert!((delta_closed_form(PI / 2.0, PI / 2.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(delta_bruteforce_oracle(0.0, 0.0, 1000), 0.0);
        let t = 1.0;
        let o = delta_bruteforce_oracle(t, t, 100_000);
        assert!((o - 4.0 * t.sin().powi(2)).abs() < 1e-3);
        let o = delta_bruteforce_oracle(PI / 3.0, PI / 4.0, 100_000);
        let want = (4.0 * (7.0 * PI / 24.0).sin().powi(2)).max(4.0 * (PI / 24.0).sin().powi(2));
        assert!(o <= want + 1e-9 && o > want - 1e-3);
    }

    #[test]
    fn oracle_is_deterministic() {
        assert_eq!(delta_bruteforce_oracle(0.3, 2.0, 5000), delta_bruteforce_oracle(0.3, 2.0, 5000));
    }

    #[test]
    fn rejects_loxodromic_and_parabolic_elements() {
        let lox = sample::boost(1, 0, 0.8);
        assert!(matches!(analyze_elliptic(&lox, &tol()), Err(Error::NotElliptic(_))));
        // T (1 1; 0 1) T^{-1}: unipotent, not diagonalizable
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = |re: f64, j: f64| Quaternion::new(re * s, 0.0, j * s, 0.0);
        let t = QMatrix::from_rows(&[vec![q(1.0, 0.0), q(0.0, -1.0)], vec![q(0.0, -1.0), q(1.0, 0.0)]]).unwrap();
        let ti = QMatrix::from_rows(&[vec![q(1.0, 0.0), q(0.0, 1.0)], vec![q(0.0, 1.0), q(1.0, 0.0)]]).unwrap();
        let u = QMatrix::from_rows(&[vec![Quaternion::ONE, Quaternion::ONE], vec![Quaternion::ZERO, Quaternion::ONE]]).unwrap();
        let para = check_membership(&(&(&t * &u) * &ti), &HermitianSpace::new(1).unwrap(), 1e-12).unwrap();
        assert!(matches!(analyze_elliptic(&para, &tol()), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn diagonalizing_frame_diagonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let base = sample::diagonal_elliptic(&[0.5, 0.5, 1.7, 0.5]);
        let s = sample::random_isometry(&mut rng, 3, 1.5);
        let g = base.conjugated_by(&s).unwrap();
        let p = analyze_elliptic(&g, &tol()).unwrap();
        assert_eq!(p.fixed_set_dimension, 2);
        for q in p.fixed_set.sample_points(&mut rng, 5) {
            let frame = diagonalizing_frame(&p, &q, &tol()).unwrap();
            let d = g.conjugated_by(&frame.group_inverse()).unwrap();
            let m = d.matrix();
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(m[(r, c)].norm() < 1e-9, "({r},{c}) = {}", m[(r, c)]);
                    }
                }
            }
            assert!((m[(3, 3)].class_angle() - 0.5).abs() < 1e-9);
            let origin = apply(&frame, &ProjectivePoint::origin(3)).unwrap();
            assert!(origin.max_abs_diff(&q) < 1e-9);
        }
    }

    #[test]
    fn profile_serializes_with_fixed_set() {
        let p = analyze_elliptic(&ghat(PI / 6.0), &tol()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["kind"], "boundary");
        assert!((v["delta"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v["fixed_set"]["basis"].as_array().unwrap().len(), 2);
        assert_eq!(v["classes"][1]["type_tag"], "negative");
    }

    fn angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..PI, n + 1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn closed_form_is_symmetric(a in 0.0..PI, b in 0.0..PI) {
            prop_assert_eq!(delta_closed_form(a, b), delta_closed_form(b, a));
        }

        #[test]
        fn oracle_never_exceeds_closed_form(a in 0.0..PI, b in 0.0..PI) {
            prop_assert!(delta_bruteforce_oracle(a, b, 2000) <= delta_closed_form(a, b) + 1e-9);
        }

        #[test]
        fn delta_is_conjugation_invariant(a in angles(2), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = sample::diagonal_elliptic(&a);
            let s = sample::random_isometry(&mut rng, 2, 2.0);
            let p0 = analyze_elliptic(&g, &tol()).unwrap();
            let p1 = analyze_elliptic(&g.conjugated_by(&s).unwrap(), &tol()).unwrap();
            prop_assert!((p0.delta - p1.delta).abs() < 1e-8);
            let total: usize = p1.classes.iter().map(|c| c.multiplicity).sum();
            prop_assert_eq!(total, 3);
        }

        #[test]
        fn sampled_fixed_points_are_fixed(theta in 0.05..3.1f64, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sample::random_isometry(&mut rng, 2, 1.5);
            let g = sample::diagonal_elliptic(&[theta, 1.0, theta]).conjugated_by(&s).unwrap();
            let p = analyze_elliptic(&g, &tol()).unwrap();
            for q in fixed_points(&p).sample_points(&mut rng, 10) {
                let gq = apply(&g, &q).unwrap();
                prop_assert!(gq.max_abs_diff(&q) < 1e-9);
            }
        }
    }
}
