//! Quaternionic hyperbolic space: the Hermitian form `<z,w> = w* J z` with
//! `J = diag(I_n, -1)`, projective points, the Bergman distance and the group
//! `Sp(n,1)` of form-preserving matrices.

use serde::{Deserialize, Serialize};

use crate::qmatrix::{vec_norm, vec_right_scale, vec_sub, QMatrix};
use crate::quaternion::Quaternion;
use crate::{Error, Result, Tolerances};

/// `H^{n,1}`: column vectors of length `n + 1` with the form of signature `(n,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermitianSpace {
    n: usize,
}

impl HermitianSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("quaternionic hyperbolic space needs n >= 1".into()));
        }
        Ok(Self { n })
    }

    /// Space whose vectors have length `dim` (so `n = dim - 1`).
    pub fn for_dimension(dim: usize) -> Result<Self> {
        Self::new(dim.saturating_sub(1))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of vectors, `n + 1`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// `J = diag(1, ..., 1, -1)`.
    pub fn form_matrix(&self) -> QMatrix {
        let mut d = vec![Quaternion::ONE; self.dim()];
        d[self.n] = -Quaternion::ONE;
        QMatrix::diag(&d)
    }

    fn check_len(&self, v: &[Quaternion]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in H^({},1)",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `<z,w> = conj(w_1) z_1 + ... + conj(w_n) z_n - conj(w_{n+1}) z_{n+1}`.
    pub fn inner(&self, z: &[Quaternion], w: &[Quaternion]) -> Result<Quaternion> {
        self.check_len(z)?;
        self.check_len(w)?;
        Ok(inner_unchecked(z, w))
    }

    /// `<z,z>`, a real number.
    pub fn norm_sq(&self, z: &[Quaternion]) -> Result<f64> {
        self.check_len(z)?;
        Ok(norm_sq_unchecked(z))
    }

    /// Sign of `<z,z>` after scaling `z` to unit Euclidean norm.
    pub fn classify(&self, z: &[Quaternion], null_tol: f64) -> Result<NormSign> {
        self.check_len(z)?;
        let e = vec_norm(z);
        if e == 0.0 {
            return Err(Error::Invalid("zero vector has no projective class".into()));
        }
        let s = norm_sq_unchecked(z) / (e * e);
        Ok(if s.abs() < null_tol {
            NormSign::Null
        } else if s < 0.0 {
            NormSign::Negative
        } else {
            NormSign::Positive
        })
    }
}

/// Compensated sum of products (Ogita, Rump and Oishi's Dot2): the result is
/// as accurate as if computed in twice the working precision.
#[derive(Default, Clone, Copy)]
struct Dot2 {
    sum: f64,
    err: f64,
}

impl Dot2 {
    fn add(&mut self, a: f64, b: f64) {
        let p = a * b;
        let ep = a.mul_add(b, -p);
        let s = self.sum + p;
        let bb = s - self.sum;
        let es = (self.sum - (s - bb)) + (p - bb);
        self.sum = s;
        self.err += ep + es;
    }

    fn value(self) -> f64 {
        self.sum + self.err
    }
}

pub(crate) fn inner_unchecked(z: &[Quaternion], w: &[Quaternion]) -> Quaternion {
    let last = z.len() - 1;
    let mut acc = [Dot2::default(); 4];
    for (k, (zk, wk)) in z.iter().zip(w).enumerate() {
        let s = if k == last { -1.0 } else { 1.0 };
        // conj(w) z, with conj(w) = (a, -b, -c, -d)
        let (a, b, c, d) = (s * wk.re, -s * wk.i, -s * wk.j, -s * wk.k);
        let (e, f, g, h) = (zk.re, zk.i, zk.j, zk.k);
        for (x, y) in [(a, e), (-b, f), (-c, g), (-d, h)] {
            acc[0].add(x, y);
        }
        for (x, y) in [(a, f), (b, e), (c, h), (-d, g)] {
            acc[1].add(x, y);
        }
        for (x, y) in [(a, g), (-b, h), (c, e), (d, f)] {
            acc[2].add(x, y);
        }
        for (x, y) in [(a, h), (b, g), (-c, f), (d, e)] {
            acc[3].add(x, y);
        }
    }
    Quaternion::new(acc[0].value(), acc[1].value(), acc[2].value(), acc[3].value())
}

pub(crate) fn norm_sq_unchecked(z: &[Quaternion]) -> f64 {
    let last = z.len() - 1;
    let mut acc = Dot2::default();
    for (k, q) in z.iter().enumerate() {
        let s = if k == last { -1.0 } else { 1.0 };
        for x in [q.re, q.i, q.j, q.k] {
            acc.add(s * x, x);
        }
    }
    acc.value()
}

/// Free-function form of [`HermitianSpace::inner`].
pub fn herm_inner(z: &[Quaternion], w: &[Quaternion], space: &HermitianSpace) -> Result<Quaternion> {
    space.inner(z, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormSign {
    Negative,
    Null,
    Positive,
}

impl std::fmt::Display for NormSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormSign::Negative => "negative",
            NormSign::Null => "null",
            NormSign::Positive => "positive",
        })
    }
}

/// A point of `P(H^{n,1})`, stored through a normalized lift.
///
/// Negative and null lifts have last coordinate exactly 1, so the first `n`
/// entries are ball coordinates. Positive lifts have unit Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct ProjectivePoint {
    lift: Vec<Quaternion>,
    norm_sign: NormSign,
}

#[derive(Deserialize)]
struct RawPoint {
    lift: Vec<Quaternion>,
}

impl TryFrom<RawPoint> for ProjectivePoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        ProjectivePoint::new(raw.lift, Tolerances::default().null_norm)
    }
}

impl ProjectivePoint {
    /// Classifies and normalizes an arbitrary nonzero lift.
    pub fn new(lift: Vec<Quaternion>, null_tol: f64) -> Result<Self> {
        if lift.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite("point lift".into()));
        }
        let space = HermitianSpace::for_dimension(lift.len())?;
        let sign = space.classify(&lift, null_tol)?;
        Self::with_sign(lift, sign)
    }

    /// Normalizes `lift` under a known sign class.
    pub fn with_sign(lift: Vec<Quaternion>, norm_sign: NormSign) -> Result<Self> {
        let last = *lift.last().ok_or_else(|| Error::Invalid("empty lift".into()))?;
        let lift = match norm_sign {
            NormSign::Negative | NormSign::Null => {
                let inv = last.try_inverse(1e-300)?;
                let mut l = vec_right_scale(&lift, inv);
                *l.last_mut().expect("non-empty") = Quaternion::ONE;
                l
            }
            NormSign::Positive => {
                let e = vec_norm(&lift);
                if e == 0.0 {
                    return Err(Error::Invalid("zero vector has no projective class".into()));
                }
                lift.iter().map(|q| *q / e).collect()
            }
        };
        Ok(Self { lift, norm_sign })
    }

    /// Interior or boundary point with the given ball coordinates.
    pub fn from_ball(coords: &[Quaternion], null_tol: f64) -> Result<Self> {
        let mut lift = coords.to_vec();
        lift.push(Quaternion::ONE);
        Self::new(lift, null_tol)
    }

    /// The origin of the ball model in `H^n`.
    pub fn origin(n: usize) -> Self {
        let mut lift = vec![Quaternion::ZERO; n + 1];
        lift[n] = Quaternion::ONE;
        Self { lift, norm_sign: NormSign::Negative }
    }

    pub fn lift(&self) -> &[Quaternion] {
        &self.lift
    }

    pub fn norm_sign(&self) -> NormSign {
        self.norm_sign
    }

    pub fn is_interior(&self) -> bool {
        self.norm_sign == NormSign::Negative
    }

    /// `z_i z_{n+1}^{-1}` for `i <= n`, or `None` for positive points.
    pub fn ball_coordinates(&self) -> Option<Vec<Quaternion>> {
        match self.norm_sign {
            NormSign::Positive => None,
            _ => Some(self.lift[..self.lift.len() - 1].to_vec()),
        }
    }

    /// Max coefficient difference between normalized lifts.
    pub fn max_abs_diff(&self, other: &ProjectivePoint) -> f64 {
        if self.lift.len() != other.lift.len() {
            return f64::INFINITY;
        }
        crate::qmatrix::vec_max_abs_diff(&self.lift, &other.lift)
    }
}

/// `cosh^2(rho(z,w)/2) = <z,w><w,z> / (<z,z><w,w>)` for interior points.
pub fn bergman_cosh2(z: &ProjectivePoint, w: &ProjectivePoint, space: &HermitianSpace) -> Result<f64> {
    for p in [z, w] {
        if !p.is_interior() {
            return Err(Error::NotInterior(p.norm_sign.to_string()));
        }
    }
    let zw = space.inner(z.lift(), w.lift())?;
    let zz = space.norm_sq(z.lift())?;
    let ww = space.norm_sq(w.lift())?;
    Ok(zw.norm_sqr() / (zz * ww))
}

/// The Bergman distance `rho = 2 arccosh(sqrt(cosh2))`.
pub fn bergman_distance(z: &ProjectivePoint, w: &ProjectivePoint, space: &HermitianSpace) -> Result<f64> {
    Ok(2.0 * bergman_cosh2(z, w, space)?.max(1.0).sqrt().acosh())
}

// ── Sp(n,1) ─────────────────────────────────────────────────────────────

/// Residuals of `g* J g = J` and of the six block identities for
/// `g = [[A, alpha], [beta, a]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// `g* J g - J`
    pub form: f64,
    /// `A A* - alpha alpha* - I`
    pub a_a_star: f64,
    /// `-A beta* + alpha conj(a)`
    pub a_beta_star: f64,
    /// `-|beta|^2 + |a|^2 - 1`
    pub beta_corner: f64,
    /// `A* A - beta* beta - I`
    pub a_star_a: f64,
    /// `A* alpha - beta* a`
    pub a_star_alpha: f64,
    /// `-|alpha|^2 + |a|^2 - 1`
    pub alpha_corner: f64,
    pub worst: f64,
}

impl MembershipReport {
    pub fn identities(&self) -> [(&'static str, f64); 7] {
        [
            ("g*Jg = J", self.form),
            ("AA* - alpha alpha* = I", self.a_a_star),
            ("-A beta* + alpha conj(a) = 0", self.a_beta_star),
            ("-|beta|^2 + |a|^2 = 1", self.beta_corner),
            ("A*A - beta* beta = I", self.a_star_a),
            ("A* alpha - beta* a = 0", self.a_star_alpha),
            ("-|alpha|^2 + |a|^2 = 1", self.alpha_corner),
        ]
    }
}

/// The four blocks of `[[A, alpha], [beta, a]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    /// `n x n`
    pub a_block: QMatrix,
    /// `n x 1` column
    pub alpha: QMatrix,
    /// `1 x n` row
    pub beta: QMatrix,
    pub corner: Quaternion,
}

pub fn blocks(m: &QMatrix) -> Result<Blocks> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::DimensionMismatch("block split needs a square matrix of size >= 2".into()));
    }
    let n = m.rows() - 1;
    Ok(Blocks {
        a_block: m.block(0, 0, n, n),
        alpha: m.block(0, n, n, 1),
        beta: m.block(n, 0, 1, n),
        corner: m[(n, n)],
    })
}

/// Computes every membership residual without deciding acceptance.
pub fn membership_report(m: &QMatrix, space: &HermitianSpace) -> Result<MembershipReport> {
    if m.rows() != space.dim() || m.cols() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for Sp({},1)",
            m.rows(),
            m.cols(),
            space.n()
        )));
    }
    let j = space.form_matrix();
    let form = (&(&m.conjugate_transpose() * &j) * m).max_abs_diff(&j);

    let b = blocks(m)?;
    let n = space.n();
    let id = QMatrix::identity(n);
    let a_star = b.a_block.conjugate_transpose();
    let alpha_star = b.alpha.conjugate_transpose();
    let beta_star = b.beta.conjugate_transpose();
    let corner = QMatrix::diag(&[b.corner]);
    let corner_bar = QMatrix::diag(&[b.corner.conj()]);

    let a_a_star = (&b.a_block * &a_star).sub(&(&b.alpha * &alpha_star))?.max_abs_diff(&id);
    let a_beta_star = (&b.alpha * &corner_bar).sub(&(&b.a_block * &beta_star))?.max_abs();
    let beta_sq = vec_norm(b.beta.entries()).powi(2);
    let alpha_sq = vec_norm(b.alpha.entries()).powi(2);
    let corner_sq = b.corner.norm_sqr();
    let beta_corner = (corner_sq - beta_sq - 1.0).abs();
    let a_star_a = (&a_star * &b.a_block).sub(&(&beta_star * &b.beta))?.max_abs_diff(&id);
    let a_star_alpha = (&a_star * &b.alpha).sub(&(&beta_star * &corner))?.max_abs();
    let alpha_corner = (corner_sq - alpha_sq - 1.0).abs();

    let worst = [form, a_a_star, a_beta_star, beta_corner, a_star_a, a_star_alpha, alpha_corner]
        .into_iter()
        .fold(0.0, |acc: f64, x| if x.is_nan() { f64::NAN } else { acc.max(x) });
    Ok(MembershipReport { form, a_a_star, a_beta_star, beta_corner, a_star_a, a_star_alpha, alpha_corner, worst })
}

/// A verified element of `Sp(n,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIsometry")]
pub struct Isometry {
    n: usize,
    matrix: QMatrix,
    /// Worst residual recorded at construction.
    membership_residual: f64,
}

#[derive(Deserialize)]
struct RawIsometry {
    n: usize,
    matrix: QMatrix,
}

impl TryFrom<RawIsometry> for Isometry {
    type Error = Error;
    fn try_from(raw: RawIsometry) -> Result<Self> {
        check_membership(&raw.matrix, &HermitianSpace::new(raw.n)?, Tolerances::default().membership)
    }
}

/// Accepts `m` iff `g* J g = J` and all block identities hold within `tol`.
pub fn check_membership(m: &QMatrix, space: &HermitianSpace, tol: f64) -> Result<Isometry> {
    let report = membership_report(m, space)?;
    if !(report.worst <= tol) {
        return Err(Error::NotInGroup { residual: report.worst, threshold: tol });
    }
    Ok(Isometry { n: space.n(), matrix: m.clone(), membership_residual: report.worst })
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        Self { n, matrix: QMatrix::identity(n + 1), membership_residual: 0.0 }
    }

    /// Wraps a product of verified elements, recording its residual.
    pub(crate) fn derived(n: usize, matrix: QMatrix) -> Self {
        let residual = HermitianSpace::new(n)
            .and_then(|s| membership_report(&matrix, &s))
            .map_or(f64::NAN, |r| r.worst);
        Self { n, matrix, membership_residual: residual }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> HermitianSpace {
        HermitianSpace { n: self.n }
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn membership_residual(&self) -> f64 {
        self.membership_residual
    }

    pub fn corner(&self) -> Quaternion {
        self.matrix[(self.n, self.n)]
    }

    /// Euclidean norm of the bottom row without the corner.
    pub fn beta_norm(&self) -> f64 {
        vec_norm(&self.matrix.row(self.n)[..self.n])
    }

    pub fn alpha_norm(&self) -> f64 {
        vec_norm(&self.matrix.column(self.n)[..self.n])
    }

    /// `[[A*, -beta*], [-alpha*, conj(a)]]`, equal to `J g* J`.
    pub fn group_inverse(&self) -> Isometry {
        let n = self.n;
        let mut inv = self.matrix.conjugate_transpose();
        for r in 0..n {
            inv[(r, n)] = -inv[(r, n)];
            inv[(n, r)] = -inv[(n, r)];
        }
        Isometry { n, matrix: inv, membership_residual: self.membership_residual }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("Sp({},1) vs Sp({},1)", self.n, other.n)));
        }
        Ok(Isometry::derived(self.n, &self.matrix * &other.matrix))
    }

    /// `s * self * s^{-1}`.
    pub fn conjugated_by(&self, s: &Isometry) -> Result<Isometry> {
        s.compose(self)?.compose(&s.group_inverse())
    }
}

/// Free-function form of [`Isometry::group_inverse`].
pub fn group_inverse(g: &Isometry) -> Isometry {
    g.group_inverse()
}

/// One Newton step back onto `Sp(n,1)`: `M (I - J E / 2)` with
/// `E = M* J M - J`. Off-group error `e` becomes `O(e^2)`.
pub fn retract(m: &QMatrix, space: &HermitianSpace) -> Result<QMatrix> {
    let j = space.form_matrix();
    let e = (&(&m.conjugate_transpose() * &j) * m).sub(&j)?;
    let mut x = &j * &e;
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            x[(r, c)] = x[(r, c)] * -0.5;
        }
    }
    m.add(&(m * &x))
}

/// Action on `P(H^{n,1})`; the sign class of the point is preserved.
pub fn apply(g: &Isometry, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    let image = g.matrix.mul_vec(p.lift())?;
    ProjectivePoint::with_sign(image, p.norm_sign())
}

/// Builds a matrix in `Sp(n,1)` from candidate vectors by Gram–Schmidt with
/// respect to the Hermitian form (right quaternionic scalars).
///
/// Candidates are processed in order; vectors dependent on earlier ones are
/// skipped. Exactly one negative vector must appear, and it becomes the last
/// column; positive vectors fill the first `n` columns in acceptance order.
pub fn hermitian_frame(space: &HermitianSpace, candidates: &[Vec<Quaternion>], tol: &Tolerances) -> Result<Isometry> {
    let dim = space.dim();
    for c in candidates {
        space.check_len(c)?;
    }
    let accepted = hermitian_orthonormalize(candidates, dim, tol.null_norm)?;
    let negatives = accepted.iter().filter(|(_, s)| *s < 0.0).count();
    if accepted.len() != dim || negatives != 1 {
        return Err(Error::NormalizationFailed(format!(
            "frame has {} vectors ({} negative); need {dim} with exactly one negative",
            accepted.len(),
            negatives
        )));
    }
    let mut cols: Vec<Vec<Quaternion>> = accepted.iter().filter(|(_, s)| *s > 0.0).map(|(v, _)| v.clone()).collect();
    cols.extend(accepted.iter().filter(|(_, s)| *s < 0.0).map(|(v, _)| v.clone()));
    let m = QMatrix::from_columns(&cols)?;
    check_membership(&m, space, tol.membership)
}

/// Gram–Schmidt for the Hermitian form: returns up to `limit` vectors with
/// `<v,v> = sign` (the `f64`, either 1 or -1), pairwise orthogonal.
/// Dependent candidates are skipped; a candidate that turns null is an error.
pub(crate) fn hermitian_orthonormalize(
    candidates: &[Vec<Quaternion>],
    limit: usize,
    null_tol: f64,
) -> Result<Vec<(Vec<Quaternion>, f64)>> {
    let mut accepted: Vec<(Vec<Quaternion>, f64)> = Vec::with_capacity(limit);
    for cand in candidates {
        if accepted.len() == limit {
            break;
        }
        let size = vec_norm(cand);
        if size == 0.0 {
            continue;
        }
        let mut w: Vec<Quaternion> = cand.iter().map(|q| *q / size).collect();
        // two passes keep the frame orthogonal to working precision
        for _ in 0..2 {
            for (u, sign) in &accepted {
                let s = inner_unchecked(&w, u) * *sign;
                w = vec_sub(&w, &vec_right_scale(u, s));
            }
        }
        let e = vec_norm(&w);
        if e < 1e-7 {
            continue;
        }
        let nsq = norm_sq_unchecked(&w);
        if nsq.abs() < null_tol * e * e {
            return Err(Error::NormalizationFailed("candidate became null during orthogonalization".into()));
        }
        let scale = nsq.abs().sqrt();
        accepted.push((w.iter().map(|q| *q / scale).collect(), nsq.signum()));
    }
    Ok(accepted)
}
