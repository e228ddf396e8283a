//! The embedding `SL(2,C) -> Sp(1,1)`, `f -> T f T^{-1}` with
//! `T = (1 -j; -j 1)/sqrt 2`, and the disk function
//!
//! ```text
//! f(t) = (|1-t^2|^2 (|a|^2+|d|^2) + |1+t|^4 |c|^2 + |1-t|^4 |b|^2 + 2 (conj t - t)^2)
//!        / (4 (1-|t|^2)^2) + 1/2
//! ```
//!
//! which equals `cosh^2(rho(tj, h(tj))/2)` for the embedded `h`. For elliptic
//! `g = diag(e^{i theta}, e^{-i theta})` the test value is `4 sin^2(theta) inf f`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_membership, HermitianSpace, Isometry};
use crate::optimize::{nelder_mead, NelderMead};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::{Error, Result, Tolerances};

/// Allowed `|det h - 1|`.
pub const DET_TOL: f64 = 1e-9;

/// Points with `|t| >= 1 - DISK_MARGIN` are rejected by [`f_of_t`].
pub const DISK_MARGIN: f64 = 1e-12;

/// A rotation angle and a determinant-one `h = (a b; c d)`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct MobiusPair {
    theta: f64,
    #[serde(with = "entries")]
    h: [Complex64; 4],
}

#[derive(Deserialize)]
struct RawPair {
    theta: f64,
    #[serde(with = "entries")]
    h: [Complex64; 4],
}

impl TryFrom<RawPair> for MobiusPair {
    type Error = Error;
    fn try_from(raw: RawPair) -> Result<Self> {
        MobiusPair::new(raw.theta, raw.h)
    }
}

mod entries {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(h: &[Complex64; 4], s: S) -> Result<S::Ok, S::Error> {
        h.map(|c| [c.re, c.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 4], D::Error> {
        let raw = <[[f64; 2]; 4]>::deserialize(d)?;
        Ok(raw.map(|[re, im]| Complex64::new(re, im)))
    }
}

impl MobiusPair {
    /// Requires `0 < theta < pi` and `|ad - bc - 1| <= DET_TOL`.
    pub fn new(theta: f64, h: [Complex64; 4]) -> Result<Self> {
        if !theta.is_finite() || h.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Mobius pair".into()));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::Invalid(format!("theta = {theta} must lie in (0, pi)")));
        }
        let det = determinant(&h);
        if (det - 1.0).norm() > DET_TOL {
            return Err(Error::Determinant { re: det.re, im: det.im });
        }
        Ok(Self { theta, h })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn h(&self) -> [Complex64; 4] {
        self.h
    }

    /// `g = diag(e^{i theta}, e^{-i theta})`, row-major.
    pub fn g(&self) -> [Complex64; 4] {
        let e = Complex64::from_polar(1.0, self.theta);
        [e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), e.conj()]
    }

    /// `|a|^2 + |b|^2 + |c|^2 + |d|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.h.iter().map(Complex64::norm_sqr).sum()
    }

    /// `|bc|`.
    pub fn bc_abs(&self) -> f64 {
        (self.h[1] * self.h[2]).norm()
    }
}

pub fn determinant(h: &[Complex64; 4]) -> Complex64 {
    h[0] * h[3] - h[1] * h[2]
}

fn t_matrix(sign: f64) -> QMatrix {
    let d = Quaternion::real(FRAC_1_SQRT_2);
    let o = Quaternion::new(0.0, 0.0, sign * FRAC_1_SQRT_2, 0.0);
    QMatrix::from_rows(&[vec![d, o], vec![o, d]]).expect("2x2")
}

/// `T f T^{-1}` as a verified element of `Sp(1,1)`.
pub fn embed_sl2(f: &[Complex64; 4], tol: &Tolerances) -> Result<Isometry> {
    let m = QMatrix::from_complex(2, 2, f)?;
    let image = &(&t_matrix(-1.0) * &m) * &t_matrix(1.0);
    let space = HermitianSpace::new(1).expect("n = 1");
    check_membership(&image, &space, tol.membership).map_err(|e| match e {
        Error::NotInGroup { residual, .. } => Error::EmbeddingFailed { residual },
        other => other,
    })
}

/// `(g_hat, h_hat)`.
pub fn embed(p: &MobiusPair, tol: &Tolerances) -> Result<(Isometry, Isometry)> {
    Ok((embed_sl2(&p.g(), tol)?, embed_sl2(&p.h, tol)?))
}

fn check_disk(t: Complex64) -> Result<()> {
    if !(t.norm() < 1.0 - DISK_MARGIN) {
        return Err(Error::OutsideDisk(t.to_string()));
    }
    Ok(())
}

/// `f(t)` for the matrix `h`, evaluated as `1 + E(t) / (4 (1-|t|^2)^2)` with
/// `E = |1-t^2|^2 (|a|^2+|d|^2-2) + |1+t|^4 |c|^2 + |1-t|^4 |b|^2`. This uses
/// `2|1-t^2|^2 - 8 Im(t)^2 = 2 (1-|t|^2)^2` and avoids the cancellation of
/// [`f_literal`] near the unit circle.
pub fn f_entries(h: &[Complex64; 4], t: Complex64) -> Result<f64> {
    check_disk(t)?;
    let one = Complex64::new(1.0, 0.0);
    let [a, b, c, d] = h.map(|x| x.norm_sqr());
    let excess = (one - t * t).norm_sqr() * (a + d - 2.0)
        + (one + t).norm_sqr().powi(2) * c
        + (one - t).norm_sqr().powi(2) * b;
    Ok(1.0 + excess / (4.0 * (1.0 - t.norm_sqr()).powi(2)))
}

/// The defining expression term by term, with `(conj t - t)^2 = -4 Im(t)^2`.
pub fn f_literal(h: &[Complex64; 4], t: Complex64) -> Result<f64> {
    check_disk(t)?;
    let one = Complex64::new(1.0, 0.0);
    let [a, b, c, d] = h.map(|x| x.norm_sqr());
    let num = (one - t * t).norm_sqr() * (a + d) + (one + t).norm_sqr().powi(2) * c + (one - t).norm_sqr().powi(2) * b
        - 8.0 * t.im * t.im;
    Ok(num / (4.0 * (1.0 - t.norm_sqr()).powi(2)) + 0.5)
}

pub fn f_of_t(p: &MobiusPair, t: Complex64) -> Result<f64> {
    f_entries(&p.h, t)
}

/// Resolution of the polar grid used by [`minimize_f`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    /// Radii `cap * i / radial_steps` for `i = 0..=radial_steps`.
    pub radial_steps: usize,
    pub angular_steps: usize,
    pub radius_cap: f64,
    /// Grid cells used as simplex starting points.
    pub refine_starts: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self { radial_steps: 200, angular_steps: 256, radius_cap: 0.995, refine_starts: 5 }
    }
}

impl DiskGrid {
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.radius_cap * i as f64 / self.radial_steps as f64, TAU * j as f64 / self.angular_steps as f64)
    }

    /// All `(radius, angle, f)` samples, radius-major.
    pub fn evaluate(&self, h: &[Complex64; 4]) -> Vec<(f64, f64, f64)> {
        let cells: Vec<(usize, usize)> =
            (0..=self.radial_steps).flat_map(|i| (0..self.angular_steps).map(move |j| (i, j))).collect();
        cells
            .par_iter()
            .map(|&(i, j)| {
                let (r, a) = self.point(i, j);
                let v = f_entries(h, Complex64::from_polar(r, a)).unwrap_or(f64::INFINITY);
                (r, a, v)
            })
            .collect()
    }

    /// The grid as CSV with header `radius,angle,f`.
    pub fn csv(&self, h: &[Complex64; 4]) -> String {
        let mut out = String::from("radius,angle,f\n");
        for (r, a, v) in self.evaluate(h) {
            out.push_str(&format!("{r},{a},{v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskMinimum {
    #[serde(with = "crate::serde_complex")]
    pub argmin: Complex64,
    pub value: f64,
    #[serde(with = "crate::serde_complex")]
    pub grid_argmin: Complex64,
    pub grid_value: f64,
}

fn upper_half(t: Complex64) -> Complex64 {
    if t.im < 0.0 {
        t.conj()
    } else {
        t
    }
}

/// Grid search followed by simplex refinement from the best cells, both
/// confined to `|t| <= radius_cap`. `value` never exceeds `grid_value`, the
/// exact minimum over the grid.
pub fn minimize_f_on(h: &[Complex64; 4], grid: &DiskGrid) -> DiskMinimum {
    let mut samples = grid.evaluate(h);
    samples.sort_by(|x, y| x.2.total_cmp(&y.2));
    let (gr, ga, gv) = samples[0];
    let grid_argmin = upper_half(Complex64::from_polar(gr, ga));

    let cap = grid.radius_cap;
    let objective = |x: &[f64]| {
        let t = Complex64::new(x[0], x[1]);
        if t.norm() > cap {
            f64::INFINITY
        } else {
            f_entries(h, t).unwrap_or(f64::INFINITY)
        }
    };
    let opts = NelderMead { initial_step: grid.radius_cap / grid.radial_steps as f64, max_evals: 400, f_tol: 1e-15 };
    let refined = samples
        .iter()
        .take(grid.refine_starts)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(r, a, _)| {
            let t = Complex64::from_polar(*r, *a);
            nelder_mead(objective, &[t.re, t.im], &opts)
        })
        .collect::<Vec<_>>();
    let best = refined.iter().filter(|m| m.value < gv).min_by(|x, y| x.value.total_cmp(&y.value));
    match best {
        Some(m) => DiskMinimum {
            argmin: upper_half(Complex64::new(m.x[0], m.x[1])),
            value: m.value,
            grid_argmin,
            grid_value: gv,
        },
        None => DiskMinimum { argmin: grid_argmin, value: gv, grid_argmin, grid_value: gv },
    }
}

pub fn minimize_f(p: &MobiusPair) -> (Complex64, f64) {
    let m = minimize_f_on(&p.h, &DiskGrid::default());
    (m.argmin, m.value)
}

/// The three sufficient conditions side by side; each value below 1 means
/// `<g,h>` is elementary or not discrete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaComparison {
    pub theta: f64,
    /// Best upper bound found for `inf f`.
    pub f_inf: f64,
    #[serde(with = "crate::serde_complex")]
    pub f_argmin: Complex64,
    pub f_grid_min: f64,
    pub f_at_zero: f64,
    /// `4 f_inf sin^2 theta`.
    pub disk_value: f64,
    /// `sin^2 theta (|h|^2 + 2)`.
    pub norm_value: f64,
    /// `4 sin^2 theta (1 + |bc|)`.
    pub classical_value: f64,
    pub norm_sq_plus_two: f64,
    pub one_plus_bc: f64,
    pub four_one_plus_bc: f64,
    pub grid: DiskGrid,
}

pub fn compare_criteria_on(p: &MobiusPair, grid: &DiskGrid) -> CriteriaComparison {
    let m = minimize_f_on(&p.h, grid);
    let s2 = p.theta.sin().powi(2);
    let norm_sq_plus_two = p.norm_sq() + 2.0;
    let one_plus_bc = 1.0 + p.bc_abs();
    CriteriaComparison {
        theta: p.theta,
        f_inf: m.value,
        f_argmin: m.argmin,
        f_grid_min: m.grid_value,
        f_at_zero: f_entries(&p.h, Complex64::new(0.0, 0.0)).expect("origin is inside the disk"),
        disk_value: 4.0 * m.value * s2,
        norm_value: s2 * norm_sq_plus_two,
        classical_value: 4.0 * s2 * one_plus_bc,
        norm_sq_plus_two,
        one_plus_bc,
        four_one_plus_bc: 4.0 * one_plus_bc,
        grid: *grid,
    }
}

pub fn compare_criteria(p: &MobiusPair) -> CriteriaComparison {
    compare_criteria_on(p, &DiskGrid::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply, bergman_cosh2, ProjectivePoint};
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn root_two_example() -> [Complex64; 4] {
        [c(1.0, 0.0), c(SQRT_2, 0.0), c(SQRT_2, 0.0), c(3.0, 0.0)]
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ghat_is_unchanged_by_the_embedding() {
        let p = MobiusPair::new(0.8, root_two_example()).unwrap();
        let (g, _) = embed(&p, &tol()).unwrap();
        let want = QMatrix::diag(&[Quaternion::exp_i(0.8), Quaternion::exp_i(-0.8)]);
        assert!(g.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn identity_embeds_to_identity() {
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let id = embed_sl2(&one, &tol()).unwrap();
        assert!(id.matrix().max_abs_diff(&QMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn bad_determinant_is_rejected() {
        let h = [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(MobiusPair::new(1.0, h), Err(Error::Determinant { .. })));
        assert!(matches!(embed_sl2(&h, &tol()), Err(Error::EmbeddingFailed { .. })));
    }

    #[test]
    fn f_examples() {
        let h = root_two_example();
        assert!((f_entries(&h, c(0.0, 0.0)).unwrap() - 4.0).abs() < 1e-15);
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for t in [-0.7, 0.0, 0.3, 0.9] {
            assert!((f_entries(&one, c(t, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(f_entries(&h, c(0.6, 0.8)), Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn f_matches_the_expanded_form() {
        let h = root_two_example();
        for i in -9..=9 {
            for j in -9..=9 {
                let (t1, t2) = (i as f64 / 10.0, j as f64 / 10.0);
                let r2 = t1 * t1 + t2 * t2;
                if r2 > 0.9 {
                    continue;
                }
                let want = (7.0 + 14.0 * t1 * t1 * t2 * t2 + 2.0 * t1 * t1 + 10.0 * t2 * t2 + 7.0 * (t1.powi(4) + t2.powi(4)))
                    / (2.0 * (1.0 - r2).powi(2))
                    + 0.5;
                assert!((f_entries(&h, c(t1, t2)).unwrap() - want).abs() < 1e-10);
                assert!((f_literal(&h, c(t1, t2)).unwrap() - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rearranged_form_agrees_with_the_literal_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let h = sample::random_sl2c(&mut rng);
            let t = sample::random_disk_point(&mut rng, 0.9);
            let (x, y) = (f_entries(&h, t).unwrap(), f_literal(&h, t).unwrap());
            assert!((x - y).abs() <= 1e-11 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn minimum_for_the_identity_is_one() {
        let one = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let m = minimize_f_on(&one, &DiskGrid::default());
        assert!((m.value - 1.0).abs() < 1e-12, "{m:?}");
    }

    #[test]
    fn minimum_for_the_root_two_example_is_four_at_zero() {
        let p = MobiusPair::new(PI / 3.0, root_two_example()).unwrap();
        let (t, v) = minimize_f(&p);
        assert!((4.0 - 5e-3..=4.0 + 1e-12).contains(&v));
        assert!(t.norm() < 1e-3);
    }

    #[test]
    fn argmin_is_reported_in_the_upper_half() {
        let (a, b, cc) = (c(1.0, 0.5), c(0.3, -0.2), c(0.7, 0.1));
        let h = [a, b, cc, (c(1.0, 0.0) + b * cc) / a];
        let m = minimize_f_on(&h, &DiskGrid::default());
        assert!(m.argmin.im >= 0.0);
        let mirrored = f_entries(&h, m.argmin.conj()).unwrap();
        assert!((mirrored - f_entries(&h, m.argmin).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn first_comparison_example() {
        let h = [c(-1.5, 0.0), c(0.0, 2.0), c(0.0, 2.0), c(2.0, 0.0)];
        let p = MobiusPair::new(PI / 4.0, h).unwrap();
        let cmp = compare_criteria(&p);
        assert!((cmp.norm_sq_plus_two - 16.25).abs() < 1e-12);
        assert!((cmp.four_one_plus_bc - 20.0).abs() < 1e-12);
        assert!(cmp.disk_value <= cmp.norm_value + 1e-12);
    }

    #[test]
    fn second_comparison_example() {
        let p = MobiusPair::new(PI / 4.0, root_two_example()).unwrap();
        let cmp = compare_criteria(&p);
        assert!((cmp.one_plus_bc - 3.0).abs() < 1e-12);
        assert!(cmp.f_inf > cmp.one_plus_bc);
    }

    #[test]
    fn small_angles_make_every_criterion_fire() {
        let p = MobiusPair::new(1e-4, root_two_example()).unwrap();
        let cmp = compare_criteria(&p);
        assert!(cmp.disk_value < 1.0 && cmp.norm_value < 1.0 && cmp.classical_value < 1.0);
    }

    #[test]
    fn json_shape() {
        let p = MobiusPair::new(0.5, root_two_example()).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with("{\"theta\":0.5,\"h\":[[1.0,0.0],"), "{s}");
        let back: MobiusPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"theta":0.5,"h":[[1,0],[1,0],[0,0],[2,0]]}"#;
        assert!(serde_json::from_str::<MobiusPair>(bad).is_err());
    }

    #[test]
    fn grid_csv_has_every_cell() {
        let grid = DiskGrid { radial_steps: 8, angular_steps: 8, ..Default::default() };
        let csv = grid.csv(&root_two_example());
        assert_eq!(csv.lines().count(), 1 + 9 * 8);
        assert!(csv.starts_with("radius,angle,f\n0,0,4\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn f_is_the_distance_from_tj_to_its_image(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = sample::random_sl2c(&mut rng);
            let t = sample::random_disk_point(&mut rng, 0.95);
            let hh = embed_sl2(&h, &tol()).unwrap();
            let q = ProjectivePoint::from_ball(&[Quaternion::from_split(c(0.0, 0.0), t)], 1e-12).unwrap();
            let d = bergman_cosh2(&q, &apply(&hh, &q).unwrap(), &hh.space()).unwrap();
            let f = f_entries(&h, t).unwrap();
            prop_assert!((d - f).abs() <= 1e-10 * f.max(1.0), "{d} vs {f}");
            prop_assert!(f >= 1.0 - 1e-12);
        }

        #[test]
        fn embedding_is_a_homomorphism(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = (sample::random_sl2c(&mut rng), sample::random_sl2c(&mut rng));
            let ab = [
                a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3],
            ];
            let lhs = embed_sl2(&ab, &tol()).unwrap();
            let rhs = embed_sl2(&a, &tol()).unwrap().compose(&embed_sl2(&b, &tol()).unwrap()).unwrap();
            let scale = lhs.matrix().max_abs().max(1.0);
            prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-10 * scale);
        }

        #[test]
        fn value_at_zero_matches_the_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = sample::random_sl2c(&mut rng);
            let n2: f64 = h.iter().map(Complex64::norm_sqr).sum();
            let f0 = f_entries(&h, c(0.0, 0.0)).unwrap();
            prop_assert!((4.0 * f0 - (n2 + 2.0)).abs() <= 1e-12 * n2.max(1.0));
        }
    }
}
