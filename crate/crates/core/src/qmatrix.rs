//! Dense matrices over the quaternions.
//!
//! Right eigenpairs `M v = v lambda` are computed through the complex adjoint
//! `[[M1, M2], [-conj(M2), conj(M1)]]` of `M = M1 + M2 j`. A quaternionic
//! vector `v = v1 + v2 j` corresponds to the complex vector `(v1; -conj(v2))`,
//! and under this correspondence `M v = v lambda` (complex `lambda`) is
//! exactly `adjoint(M) x = lambda x`.

use std::ops::{Index, IndexMut, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quaternion::Quaternion;
use crate::{Error, Result, Tolerances};

/// Row-major dense quaternionic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQMatrix")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

#[derive(Deserialize)]
struct RawQMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl TryFrom<RawQMatrix> for QMatrix {
    type Error = Error;
    fn try_from(raw: RawQMatrix) -> Result<Self> {
        QMatrix::new(raw.rows, raw.cols, raw.entries)
    }
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|q| !q.is_finite()) {
            return Err(Error::NonFinite(format!("matrix entry {pos}")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for d in 0..n {
            m[(d, d)] = Quaternion::ONE;
        }
        m
    }

    pub fn diag(values: &[Quaternion]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (d, v) in values.iter().enumerate() {
            m[(d, d)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Quaternion>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, q) in col.iter().enumerate() {
                m[(i, j)] = *q;
            }
        }
        Ok(m)
    }

    /// Lifts a complex matrix given row-major.
    pub fn from_complex(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&c| Quaternion::from(c)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn column(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row(&self, r: usize) -> Vec<Quaternion> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    /// Copies the `nr x nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> QMatrix {
        let mut out = QMatrix::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    /// Order-sensitive product `self * other`.
    pub fn try_mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out[(i, j)] = (0..self.cols).map(|l| self[(i, l)] * other[(l, j)]).sum();
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Quaternion]) -> Result<Vec<Quaternion>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|l| self[(i, l)] * v[l]).sum())
            .collect())
    }

    pub fn conjugate_transpose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &QMatrix, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(*a, *b)).collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Largest absolute real coefficient over all entries.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Quaternion::max_abs).fold(0.0, f64::max)
    }

    /// `max_abs(self - other)`; infinite on a shape mismatch.
    pub fn max_abs_diff(&self, other: &QMatrix) -> f64 {
        self.sub(other).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Complex adjoint `[[M1, M2], [-conj(M2), conj(M1)]]`, size `2r x 2c`.
    pub fn complex_adjoint(&self) -> DMatrix<Complex64> {
        let (r, c) = (self.rows, self.cols);
        let mut out = DMatrix::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let s = self[(i, j)].split();
                out[(i, j)] = s.c1;
                out[(i, j + c)] = s.c2;
                out[(i + r, j)] = -s.c2.conj();
                out[(i + r, j + c)] = s.c1.conj();
            }
        }
        out
    }

    /// Inverse of [`QMatrix::complex_adjoint`], reading the top block row.
    pub fn from_complex_adjoint(m: &DMatrix<Complex64>) -> Result<QMatrix> {
        if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
            return Err(Error::DimensionMismatch("adjoint must have even dimensions".into()));
        }
        let (r, c) = (m.nrows() / 2, m.ncols() / 2);
        let entries = (0..r)
            .flat_map(|i| (0..c).map(move |j| Quaternion::from_split(m[(i, j)], m[(i, j + c)])))
            .collect();
        QMatrix::new(r, c, entries)
    }

    /// General inverse through the complex adjoint.
    pub fn inverse_via_adjoint(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let inv = self
            .complex_adjoint()
            .try_inverse()
            .ok_or_else(|| Error::EigenSolve("matrix is singular".into()))?;
        QMatrix::from_complex_adjoint(&inv)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    /// Panics on a dimension mismatch; see [`QMatrix::try_mul`].
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

// ── vectors over H (plain slices, right scalar multiplication) ──────────

/// Euclidean norm `sqrt(sum |v_k|^2)`.
pub fn vec_norm(v: &[Quaternion]) -> f64 {
    v.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt()
}

/// `v * s` with the scalar acting on the right.
pub fn vec_right_scale(v: &[Quaternion], s: Quaternion) -> Vec<Quaternion> {
    v.iter().map(|x| *x * s).collect()
}

pub fn vec_sub(a: &[Quaternion], b: &[Quaternion]) -> Vec<Quaternion> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn vec_add(a: &[Quaternion], b: &[Quaternion]) -> Vec<Quaternion> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// Euclidean inner product `u* w`.
pub fn vec_euclid_inner(u: &[Quaternion], w: &[Quaternion]) -> Quaternion {
    u.iter().zip(w).map(|(a, b)| a.conj() * *b).sum()
}

pub fn vec_max_abs_diff(a: &[Quaternion], b: &[Quaternion]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max)
}

/// Complex image `(v1; -conj(v2))` of `v = v1 + v2 j`.
pub fn vec_to_complex(v: &[Quaternion]) -> DVector<Complex64> {
    let n = v.len();
    DVector::from_fn(2 * n, |r, _| {
        if r < n {
            v[r].split().c1
        } else {
            -v[r - n].split().c2.conj()
        }
    })
}

/// Quaternionic vector `x - conj(y) j` from the complex image `(x; y)`.
pub fn vec_from_complex(x: &DVector<Complex64>) -> Vec<Quaternion> {
    let n = x.len() / 2;
    (0..n).map(|k| Quaternion::from_split(x[k], -x[k + n].conj())).collect()
}

/// Right-multiplies by a unit complex number so the first significant entry
/// has a real, positive `1, i` component (or `j, k` component if that one
/// vanishes). Complex scalars commute with complex eigenvalues, so the
/// eigen-relation is preserved.
pub fn fix_phase(v: &mut [Quaternion]) {
    let Some(first) = v.iter().find(|q| q.norm() > 1e-8).copied() else {
        return;
    };
    let s = first.split();
    let c = if s.c1.norm() > 1e-8 {
        s.c1.conj() / s.c1.norm()
    } else {
        s.c2 / s.c2.norm()
    };
    let cq = Quaternion::from(c);
    for x in v.iter_mut() {
        *x *= cq;
    }
}

// ── right eigenpairs ────────────────────────────────────────────────────

/// A right eigenpair `M v = v lambda` with `lambda` the canonical complex
/// representative (nonnegative imaginary part).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RightEigenpair {
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    /// Unit Euclidean norm.
    pub vector: Vec<Quaternion>,
    /// `max_k |(M v - v lambda)_k|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Matching distance for conjugate pairs of adjoint eigenvalues.
    pub pair_tol: f64,
    /// Canonical values closer than this share one eigenspace.
    pub cluster_tol: f64,
    /// Accepted residual, scaled by `max(1, |M|_max)`.
    pub residual_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self::from(&Tolerances::default())
    }
}

impl From<&Tolerances> for EigenOptions {
    fn from(t: &Tolerances) -> Self {
        Self { pair_tol: t.pair_matching, cluster_tol: t.pair_matching, residual_tol: t.eigen_residual }
    }
}

/// All `2r` eigenvalues of the complex adjoint.
pub fn adjoint_eigenvalues(m: &QMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let eig = m
        .complex_adjoint()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::EigenSolve("Schur decomposition did not converge".into()))?;
    let eig: Vec<Complex64> = eig.iter().copied().collect();
    if eig.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::EigenSolve("non-finite eigenvalue".into()));
    }
    Ok(eig)
}

/// One canonical representative per conjugate pair of adjoint eigenvalues,
/// with a flag marking the real ones.
fn pair_representatives(eig: &[Complex64], tol: f64) -> Result<Vec<(Complex64, bool)>> {
    let scaled = |c: &Complex64| tol * c.norm().max(1.0);
    let mut upper: Vec<Complex64> = eig.iter().filter(|c| c.im > scaled(c)).copied().collect();
    let mut lower: Vec<Complex64> = eig.iter().filter(|c| c.im < -scaled(c)).copied().collect();
    let mut real: Vec<Complex64> = eig.iter().filter(|c| c.im.abs() <= scaled(c)).copied().collect();
    if upper.len() != lower.len() || !real.len().is_multiple_of(2) {
        return Err(Error::EigenSolve(format!(
            "adjoint spectrum is not closed under conjugation ({} upper, {} lower, {} real)",
            upper.len(),
            lower.len(),
            real.len()
        )));
    }
    let order = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    upper.sort_by(order);
    lower.sort_by(order);
    real.sort_by(order);

    let mut reps = Vec::with_capacity(eig.len() / 2);
    let mut used = vec![false; lower.len()];
    for u in &upper {
        let best = lower
            .iter()
            .enumerate()
            .filter(|(idx, _)| !used[*idx])
            .map(|(idx, l)| (idx, (u - l.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((idx, d)) if d <= scaled(u) => {
                used[idx] = true;
                reps.push(((u + lower[idx].conj()) / 2.0, false));
            }
            _ => {
                return Err(Error::EigenSolve(format!(
                    "eigenvalue {u} has no conjugate partner within {:e}",
                    scaled(u)
                )))
            }
        }
    }
    for pair in real.chunks(2) {
        if (pair[0] - pair[1]).norm() > scaled(&pair[0]) {
            return Err(Error::EigenSolve(format!(
                "real eigenvalues {} and {} do not form a pair",
                pair[0], pair[1]
            )));
        }
        reps.push((Complex64::new((pair[0].re + pair[1].re) / 2.0, 0.0), true));
    }
    Ok(reps)
}

/// Single-linkage clusters of representatives: `(mean value, is_real, multiplicity)`.
fn cluster_representatives(reps: &[(Complex64, bool)], tol: f64) -> Vec<(Complex64, bool, usize)> {
    let n = reps.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut x: usize) -> usize {
        while label[x] != x {
            label[x] = label[label[x]];
            x = label[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if (reps[a].0 - reps[b].0).norm() <= tol * reps[a].0.norm().max(1.0) {
                let (ra, rb) = (root(&mut label, a), root(&mut label, b));
                label[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
    for idx in 0..n {
        let r = root(&mut label, idx);
        match clusters.iter_mut().find(|(root_id, _)| *root_id == r) {
            Some((_, members)) => members.push(idx),
            None => clusters.push((r, vec![idx])),
        }
    }
    let mut out: Vec<(Complex64, bool, usize)> = clusters
        .into_iter()
        .map(|(_, members)| {
            let m = members.len();
            let mean = members.iter().map(|&i| reps[i].0).sum::<Complex64>() / m as f64;
            let all_real = members.iter().all(|&i| reps[i].1);
            let is_real = all_real || mean.im.abs() <= tol * mean.norm().max(1.0);
            let value = if is_real { Complex64::new(mean.re, 0.0) } else { mean };
            (value, is_real, m)
        })
        .collect();
    // by angle, then modulus; equal angles fall back to ascending imaginary part
    out.sort_by(|a, b| {
        a.0.arg()
            .total_cmp(&b.0.arg())
            .then(a.0.norm().total_cmp(&b.0.norm()))
            .then(a.0.im.total_cmp(&b.0.im))
    });
    out
}

/// Right-singular vectors of `A` for its `count` smallest singular values.
fn smallest_right_singular_vectors(a: DMatrix<Complex64>, count: usize) -> Result<Vec<DVector<Complex64>>> {
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::EigenSolve("SVD produced no right vectors".into()))?;
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    Ok(idx
        .into_iter()
        .take(count)
        .map(|i| v_t.row(i).transpose().map(|c| c.conj()))
        .collect())
}

/// Picks `count` right-H-independent unit vectors from `candidates` by
/// pivoted Gram–Schmidt with quaternionic (right) coefficients.
fn quaternionic_basis(mut candidates: Vec<Vec<Quaternion>>, count: usize) -> Vec<Vec<Quaternion>> {
    let mut basis: Vec<Vec<Quaternion>> = Vec::with_capacity(count);
    while basis.len() < count && !candidates.is_empty() {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, vec_norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        if norm < 1e-6 {
            break;
        }
        let u: Vec<Quaternion> = candidates.swap_remove(best).iter().map(|q| *q / norm).collect();
        for c in candidates.iter_mut() {
            let s = vec_euclid_inner(&u, c);
            *c = vec_sub(c, &vec_right_scale(&u, s));
        }
        basis.push(u);
    }
    basis
}

/// Right eigenpairs with default options.
pub fn right_eigenpairs(m: &QMatrix) -> Result<Vec<RightEigenpair>> {
    right_eigenpairs_with(m, &EigenOptions::default())
}

/// Exactly `m.rows()` right eigenpairs, counted with multiplicity; pairs in
/// one cluster share the cluster's mean value and have independent vectors.
pub fn right_eigenpairs_with(m: &QMatrix, opts: &EigenOptions) -> Result<Vec<RightEigenpair>> {
    let n = m.rows();
    if !m.is_square() || n == 0 {
        return Err(Error::DimensionMismatch("right eigenpairs need a non-empty square matrix".into()));
    }
    let eig = adjoint_eigenvalues(m)?;
    let reps = pair_representatives(&eig, opts.pair_tol)?;
    let clusters = cluster_representatives(&reps, opts.cluster_tol);
    let chi = m.complex_adjoint();
    let scale = m.max_abs().max(1.0);

    let mut out = Vec::with_capacity(n);
    for (value, is_real, mult) in clusters {
        let shifted = &chi - DMatrix::from_diagonal_element(2 * n, 2 * n, value);
        let vectors: Vec<Vec<Quaternion>> = if is_real {
            let cands = smallest_right_singular_vectors(shifted, 2 * mult)?;
            quaternionic_basis(cands.iter().map(vec_from_complex).collect(), mult)
        } else {
            smallest_right_singular_vectors(shifted, mult)?.iter().map(vec_from_complex).collect()
        };
        if vectors.len() != mult {
            return Err(Error::EigenSolve(format!(
                "eigenvalue {value} has multiplicity {mult} but only {} independent eigenvectors",
                vectors.len()
            )));
        }
        let lambda = Quaternion::from(value);
        for mut v in vectors {
            let nv = vec_norm(&v);
            v.iter_mut().for_each(|q| *q = *q / nv);
            fix_phase(&mut v);
            let mv = m.mul_vec(&v)?;
            let residual = vec_max_abs_diff(&mv, &vec_right_scale(&v, lambda));
            if !(residual <= opts.residual_tol * scale) {
                return Err(Error::EigenSolve(format!(
                    "residual {residual:e} for eigenvalue {value} (matrix not diagonalizable?)"
                )));
            }
            out.push(RightEigenpair { value, vector: v, residual });
        }
    }
    Ok(out)
}
