//! The reproduction battery: every published numeric value this crate can
//! recompute, each with its tolerance.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elliptic::analyze_elliptic;
use crate::geometry::{apply, bergman_cosh2, ProjectivePoint};
use crate::jorgensen::criterion_value;
use crate::mobius::{embed, embed_sl2, f_entries, minimize_f, MobiusPair};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::{sample, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `|computed - expected| <= tolerance`
    Close,
    /// `computed >= expected - tolerance`
    AtLeast,
}

pub struct Claim {
    pub id: &'static str,
    pub anchor: &'static str,
    pub statement: &'static str,
    pub expected: f64,
    pub tolerance: f64,
    pub mode: Mode,
    compute: fn() -> Result<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimResult {
    pub id: &'static str,
    pub anchor: &'static str,
    pub statement: &'static str,
    pub mode: Mode,
    pub expected: f64,
    pub tolerance: f64,
    pub computed: Option<f64>,
    pub error: Option<String>,
    pub pass: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn first_matrix() -> [Complex64; 4] {
    [c(-1.5, 0.0), c(0.0, 2.0), c(0.0, 2.0), c(2.0, 0.0)]
}

fn root_two_matrix() -> [Complex64; 4] {
    [c(1.0, 0.0), c(SQRT_2, 0.0), c(SQRT_2, 0.0), c(3.0, 0.0)]
}

const THETAS: [f64; 6] = [PI / 12.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 3.0 * PI / 4.0];

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ghat_delta(theta: f64) -> Result<f64> {
    analyze_elliptic(&sample::diagonal_elliptic(&[theta, -theta]), &tol()).map(|p| p.delta)
}

fn z_j_commutation() -> Result<f64> {
    let zs = [c(1.0, 2.0), c(-0.5, 3.25), c(0.0, -1.0), c(7.0, 0.125)];
    Ok(zs
        .iter()
        .map(|&z| {
            let q = Quaternion::from(z);
            (q * Quaternion::J - Quaternion::J * q.conj()).max_abs()
        })
        .fold(0.0, f64::max))
}

fn norm_plus_two() -> Result<f64> {
    Ok(first_matrix().iter().map(Complex64::norm_sqr).sum::<f64>() + 2.0)
}

fn classical_first() -> Result<f64> {
    let h = first_matrix();
    Ok(4.0 * (1.0 + (h[1] * h[2]).norm()))
}

fn one_plus_bc_root_two() -> Result<f64> {
    let h = root_two_matrix();
    Ok(1.0 + (h[1] * h[2]).norm())
}

fn expanded_form_gap() -> Result<f64> {
    let h = root_two_matrix();
    let mut worst: f64 = 0.0;
    for i in 0..101 {
        for j in 0..101 {
            let t1 = -1.0 + 2.0 * i as f64 / 100.0;
            let t2 = -1.0 + 2.0 * j as f64 / 100.0;
            let r2 = t1 * t1 + t2 * t2;
            if r2 > 0.9 {
                continue;
            }
            let expanded = (7.0 + 14.0 * t1 * t1 * t2 * t2 + 2.0 * t1 * t1 + 10.0 * t2 * t2 + 7.0 * (t1.powi(4) + t2.powi(4)))
                / (2.0 * (1.0 - r2).powi(2))
                + 0.5;
            worst = worst.max((f_entries(&h, c(t1, t2))? - expanded).abs());
        }
    }
    Ok(worst)
}

fn root_two_minimum() -> Result<f64> {
    let p = MobiusPair::new(PI / 4.0, root_two_matrix())?;
    Ok(minimize_f(&p).1)
}

fn ghat_delta_grid() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in THETAS {
        worst = worst.max((ghat_delta(t)? - 4.0 * t.sin().powi(2)).abs());
    }
    Ok(worst)
}

fn ghat_delta_third() -> Result<f64> {
    ghat_delta(PI / 3.0)
}

fn ghat_delta_sixth() -> Result<f64> {
    ghat_delta(PI / 6.0)
}

fn conjugation_invariance() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = sample::diagonal_elliptic(&[0.4, 1.3, 2.2]);
    let base = analyze_elliptic(&g, &tol())?.delta;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = sample::random_isometry(&mut rng, 2, 2.0);
        worst = worst.max((analyze_elliptic(&g.conjugated_by(&s)?, &tol())?.delta - base).abs());
    }
    Ok(worst)
}

fn ghat_embedding() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in THETAS {
        let e = Complex64::from_polar(1.0, t);
        let g = embed_sl2(&[e, c(0.0, 0.0), c(0.0, 0.0), e.conj()], &tol())?;
        let want = QMatrix::diag(&[Quaternion::exp_i(t), Quaternion::exp_i(-t)]);
        worst = worst.max(g.matrix().max_abs_diff(&want));
    }
    Ok(worst)
}

fn tj_axis_fixed() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for theta in THETAS {
        let g = sample::diagonal_elliptic(&[theta, -theta]);
        for _ in 0..20 {
            let t = sample::random_disk_point(&mut rng, 0.95);
            let q = ProjectivePoint::from_ball(&[Quaternion::from_split(c(0.0, 0.0), t)], 1e-12)?;
            worst = worst.max(apply(&g, &q)?.max_abs_diff(&q));
        }
        let fs = analyze_elliptic(&g, &tol())?.fixed_set;
        for q in fs.sample_points(&mut rng, 20) {
            let z = q.ball_coordinates().expect("interior")[0];
            worst = worst.max(z.re.abs()).max(z.i.abs());
        }
    }
    Ok(worst)
}

fn distance_identity() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let h = sample::random_sl2c(&mut rng);
        let t = sample::random_disk_point(&mut rng, 0.95);
        let hh = embed_sl2(&h, &tol())?;
        let q = ProjectivePoint::from_ball(&[Quaternion::from_split(c(0.0, 0.0), t)], 1e-12)?;
        let d = bergman_cosh2(&q, &apply(&hh, &q)?, &hh.space())?;
        let f = f_entries(&h, t)?;
        worst = worst.max((d - f).abs() / f);
    }
    Ok(worst)
}

fn disk_infimum_agreement() -> Result<f64> {
    let theta = PI / 7.0;
    let (a, b, cc) = (c(1.2, 0.3), c(0.4, -0.1), c(-0.2, 0.5));
    let p = MobiusPair::new(theta, [a, b, cc, (c(1.0, 0.0) + b * cc) / a])?;
    let (g, h) = embed(&p, &tol())?;
    let crit = criterion_value(&g, &h, &tol())?;
    let disk = 4.0 * minimize_f(&p).1 * theta.sin().powi(2);
    Ok((crit.product - disk).abs())
}

pub fn inventory() -> Vec<Claim> {
    vec![
        Claim {
            id: "quaternion.zj",
            anchor: "commutation of j past a complex number",
            statement: "z j = j conj(z) for complex z (max deviation)",
            expected: 0.0,
            tolerance: 1e-15,
            mode: Mode::Close,
            compute: z_j_commutation,
        },
        Claim {
            id: "mobius.first.norm",
            anchor: "comparison of sufficient conditions, h = (-3/2, 2i; 2i, 2)",
            statement: "|h|^2 + 2 = 16.25",
            expected: 16.25,
            tolerance: 1e-12,
            mode: Mode::Close,
            compute: norm_plus_two,
        },
        Claim {
            id: "mobius.first.classical",
            anchor: "comparison of sufficient conditions, h = (-3/2, 2i; 2i, 2)",
            statement: "4 (1 + |bc|) = 20",
            expected: 20.0,
            tolerance: 1e-12,
            mode: Mode::Close,
            compute: classical_first,
        },
        Claim {
            id: "mobius.root_two.bc",
            anchor: "comparison of sufficient conditions, h = (1, sqrt2; sqrt2, 3)",
            statement: "1 + |bc| = 3",
            expected: 3.0,
            tolerance: 1e-12,
            mode: Mode::Close,
            compute: one_plus_bc_root_two,
        },
        Claim {
            id: "mobius.root_two.expanded",
            anchor: "comparison of sufficient conditions, expanded rational form of f",
            statement: "f(t) equals the expanded form on a 101x101 grid with |t|^2 <= 0.9 (max deviation)",
            expected: 0.0,
            tolerance: 1e-10,
            mode: Mode::Close,
            compute: expanded_form_gap,
        },
        Claim {
            id: "mobius.root_two.lower",
            anchor: "comparison of sufficient conditions, lower bound on f",
            statement: "the disk minimum of f is at least 4",
            expected: 4.0,
            tolerance: 5e-3,
            mode: Mode::AtLeast,
            compute: root_two_minimum,
        },
        Claim {
            id: "elliptic.ghat.grid",
            anchor: "delta of the embedded rotation",
            statement: "delta(diag(e^{it}, e^{-it})) = 4 sin^2 t for t in {pi/12, pi/6, pi/4, pi/3, pi/2, 3pi/4} (max deviation)",
            expected: 0.0,
            tolerance: 1e-10,
            mode: Mode::Close,
            compute: ghat_delta_grid,
        },
        Claim {
            id: "elliptic.ghat.third",
            anchor: "delta of the embedded rotation",
            statement: "delta(diag(e^{i pi/3}, e^{-i pi/3})) = 3",
            expected: 3.0,
            tolerance: 1e-10,
            mode: Mode::Close,
            compute: ghat_delta_third,
        },
        Claim {
            id: "elliptic.ghat.sixth",
            anchor: "delta of the embedded rotation",
            statement: "delta(diag(e^{i pi/6}, e^{-i pi/6})) = 1",
            expected: 1.0,
            tolerance: 1e-10,
            mode: Mode::Close,
            compute: ghat_delta_sixth,
        },
        Claim {
            id: "elliptic.conjugation",
            anchor: "conjugation invariance of delta",
            statement: "delta(S g S^{-1}) = delta(g) over 20 random S (max deviation)",
            expected: 0.0,
            tolerance: 1e-8,
            mode: Mode::Close,
            compute: conjugation_invariance,
        },
        Claim {
            id: "mobius.embedding.rotation",
            anchor: "embedding of SL(2,C) into Sp(1,1)",
            statement: "T diag(e^{it}, e^{-it}) T^{-1} = diag(e^{it}, e^{-it}) (max deviation)",
            expected: 0.0,
            tolerance: 1e-12,
            mode: Mode::Close,
            compute: ghat_embedding,
        },
        Claim {
            id: "geometry.fixed_axis",
            anchor: "fixed point set of the embedded rotation",
            statement: "the rotation fixes every tj and its fixed set has no 1 or i component (max deviation)",
            expected: 0.0,
            tolerance: 1e-12,
            mode: Mode::Close,
            compute: tj_axis_fixed,
        },
        Claim {
            id: "geometry.distance_identity",
            anchor: "Bergman distance from tj to its image",
            statement: "cosh^2(rho(tj, h tj)/2) = f(t) over 200 random (h, t) (max relative deviation)",
            expected: 0.0,
            tolerance: 1e-10,
            mode: Mode::Close,
            compute: distance_identity,
        },
        Claim {
            id: "jorgensen.disk_infimum",
            anchor: "two-generator criterion for the embedded pair",
            statement: "the fixed-set infimum of cosh^2 delta equals 4 sin^2(theta) inf f (two independent searches)",
            expected: 0.0,
            tolerance: 1e-6,
            mode: Mode::Close,
            compute: disk_infimum_agreement,
        },
    ]
}

fn judge(mode: Mode, computed: f64, expected: f64, tolerance: f64) -> bool {
    match mode {
        Mode::Close => (computed - expected).abs() <= tolerance,
        Mode::AtLeast => computed >= expected - tolerance,
    }
}

/// Runs every claim; `tolerance` replaces each claim's own tolerance.
pub fn run_claims(tolerance: Option<f64>) -> Vec<ClaimResult> {
    inventory()
        .into_iter()
        .map(|claim| {
            let tol = tolerance.unwrap_or(claim.tolerance);
            let (computed, error) = match (claim.compute)() {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let pass = computed.is_some_and(|v| judge(claim.mode, v, claim.expected, tol));
            ClaimResult {
                id: claim.id,
                anchor: claim.anchor,
                statement: claim.statement,
                mode: claim.mode,
                expected: claim.expected,
                tolerance: tol,
                computed,
                error,
                pass,
            }
        })
        .collect()
}
