//! The two-generator test for an elliptic `g` and any `h` in `Sp(n,1)`:
//! if `inf_{q in F(g)} cosh^2(rho(q, h q)/2) * delta(g) < 1` then `<g,h>` is
//! elementary or not discrete.
//!
//! The proof is run as a procedure. After conjugating so that `g` is diagonal
//! and fixes the origin, the sequence `h_{k+1} = h_k g h_k^{-1}` has corner
//! entries with `|a_{k+1}|^2 - 1 <= (|a_k|^2 - 1) |a_k|^2 delta`, so either some
//! `h_k` fixes the origin or the `h_k` are distinct and converge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{analyze_elliptic, diagonalizing_frame, EllipticKind, EllipticProfile};
use crate::geometry::{apply, bergman_cosh2, hermitian_frame, retract, Isometry, ProjectivePoint};
use crate::optimize::{nelder_mead, NelderMead};
use crate::quaternion::Quaternion;
use crate::{Error, Result, Tolerances};

/// Seed for the multi-start search over boundary fixed sets.
const SEARCH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Settings for the infimum over a positive-dimensional fixed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Random starts in addition to the base fixed point.
    pub starts: usize,
    pub evals_per_start: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { starts: 20, evals_per_start: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attained {
    /// Unique fixed point: the infimum is a single evaluation.
    Exact,
    /// Best value found by local search; an upper bound for the infimum.
    NumericUpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionValue {
    /// `cosh^2(rho(q, h q)/2)` at the witness `q`.
    pub cosh2: f64,
    pub delta: f64,
    pub product: f64,
    pub witness_point: ProjectivePoint,
    pub attained: Attained,
    /// `|a_{n+1,n+1}|^2` of `h` after normalizing `q` to the origin; equal to
    /// `cosh2` up to rounding.
    pub normalized_corner_sq: f64,
}

fn objective(h: &Isometry, q: &ProjectivePoint) -> f64 {
    apply(h, q).and_then(|hq| bergman_cosh2(q, &hq, &h.space())).unwrap_or(f64::INFINITY)
}

/// Fixed point of `g` minimizing `cosh^2(rho(q, h q)/2)` and whether the
/// minimum is exact.
fn witness(profile: &EllipticProfile, h: &Isometry, search: &SearchOptions) -> (ProjectivePoint, f64, Attained) {
    let fs = &profile.fixed_set;
    if profile.kind == EllipticKind::Regular {
        let q = fs.base_point();
        let v = objective(h, &q);
        return (q, v, Attained::Exact);
    }
    let dim = fs.param_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let mut starts = vec![vec![0.0; dim]];
    starts.extend((0..search.starts).map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()));
    let f = |x: &[f64]| fs.point_from_params(x).map_or(f64::INFINITY, |q| objective(h, &q));
    let opts = NelderMead { initial_step: 0.25, max_evals: search.evals_per_start, f_tol: 1e-15 };
    let best = starts
        .par_iter()
        .enumerate()
        .map(|(idx, x0)| (idx, nelder_mead(f, x0, &opts)))
        .reduce_with(|a, b| if (b.1.value, b.0) < (a.1.value, a.0) { b } else { a })
        .expect("at least one start")
        .1;
    let q = fs.point_from_params(&best.x).expect("parameters map inside the ball");
    (q, best.value, Attained::NumericUpperBound)
}

/// `inf_{q in F(g)} cosh^2(rho(q, h q)/2) * delta(g)`, exact for regular `g`
/// and an upper bound otherwise.
pub fn criterion_value(g: &Isometry, h: &Isometry, tol: &Tolerances) -> Result<CriterionValue> {
    criterion_value_with(g, h, tol, &SearchOptions::default())
}

pub fn criterion_value_with(g: &Isometry, h: &Isometry, tol: &Tolerances, search: &SearchOptions) -> Result<CriterionValue> {
    let profile = analyze_elliptic(g, tol)?;
    criterion_for_profile(&profile, h, tol, search)
}

fn criterion_for_profile(
    profile: &EllipticProfile,
    h: &Isometry,
    tol: &Tolerances,
    search: &SearchOptions,
) -> Result<CriterionValue> {
    if h.n() != profile.element.n() {
        return Err(Error::DimensionMismatch(format!("g in Sp({},1), h in Sp({},1)", profile.element.n(), h.n())));
    }
    let (q, cosh2, attained) = witness(profile, h, search);
    let frame = diagonalizing_frame(profile, &q, tol)?;
    let normalized_corner_sq = h.conjugated_by(&frame.group_inverse())?.corner().norm_sqr();
    Ok(CriterionValue {
        cosh2,
        delta: profile.delta,
        product: cosh2 * profile.delta,
        witness_point: q,
        attained,
        normalized_corner_sq,
    })
}

fn fixes_origin(g: &Isometry) -> Result<()> {
    let o = ProjectivePoint::origin(g.n());
    let err = apply(g, &o)?.max_abs_diff(&o);
    if !(err <= 1e-8) {
        return Err(Error::NormalizationFailed(format!("point is not fixed (displacement {err:e})")));
    }
    Ok(())
}

/// `(S g S^{-1}, S h S^{-1})` for an `S` in `Sp(n,1)` sending `q` to the origin.
/// `S^{-1}` is the Hermitian Gram–Schmidt frame of `q` followed by the
/// standard basis, so `S` is the identity when `q` is the origin.
pub fn normalize_to_origin(g: &Isometry, h: &Isometry, q: &ProjectivePoint, tol: &Tolerances) -> Result<(Isometry, Isometry)> {
    if !q.is_interior() {
        return Err(Error::NormalizationFailed(format!("point is {}, not interior", q.norm_sign())));
    }
    let space = g.space();
    let dim = space.dim();
    if q.lift().len() != dim || h.n() != g.n() {
        return Err(Error::DimensionMismatch("g, h and q must share a dimension".into()));
    }
    let mut cands = vec![q.lift().to_vec()];
    for i in 0..dim {
        let mut e = vec![Quaternion::ZERO; dim];
        e[i] = Quaternion::ONE;
        cands.push(e);
    }
    let s_inv = hermitian_frame(&space, &cands, tol)?;
    let g1 = g.conjugated_by(&s_inv.group_inverse())?;
    fixes_origin(&g1)?;
    Ok((g1, h.conjugated_by(&s_inv.group_inverse())?))
}

/// Like [`normalize_to_origin`] but also diagonalizes `g`, with the negative
/// eigenvalue in the corner; `q` must be a fixed point of the analyzed `g`.
pub fn normalize_diagonal(
    profile: &EllipticProfile,
    h: &Isometry,
    q: &ProjectivePoint,
    tol: &Tolerances,
) -> Result<(Isometry, Isometry)> {
    let frame = diagonalizing_frame(profile, q, tol)?;
    let inv = frame.group_inverse();
    let g1 = profile.element.conjugated_by(&inv)?;
    fixes_origin(&g1)?;
    Ok((g1, h.conjugated_by(&inv)?))
}

/// The sequence `h_0 = h, h_{k+1} = h_k g h_k^{-1}`, with `h_k^{-1}` computed
/// numerically and each iterate retracted onto the group.
#[derive(Debug, Clone)]
pub struct ConjugationSequence {
    g: Isometry,
    current: Isometry,
}

impl ConjugationSequence {
    pub fn new(g: &Isometry, h: &Isometry) -> Self {
        Self { g: g.clone(), current: h.clone() }
    }
}

impl Iterator for ConjugationSequence {
    type Item = Isometry;

    fn next(&mut self) -> Option<Isometry> {
        let out = self.current.clone();
        // J h* J would double off-group rounding at every step when g^2 ~ I
        let inv = self.current.matrix().inverse_via_adjoint().ok()?;
        let next = &(self.current.matrix() * self.g.matrix()) * &inv;
        // off-group directions of h -> h g h^{-1} grow like 2 sin(phi/2) per step
        let next = retract(&next, &self.g.space()).ok()?;
        self.current = Isometry::derived(self.g.n(), next);
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    /// `|a^{(k)}_{n+1,n+1}|^2`.
    pub corner_modulus_sq: f64,
    /// `|beta^{(k)}|`, the bottom row without the corner.
    pub beta_norm: f64,
    /// Whether the step to `h_{k+1}` satisfied the contraction inequality
    /// (true for the final record, which has no successor).
    pub contraction_ok: bool,
    /// Worst group identity residual of `h_k`.
    pub membership_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Converged,
    ElementaryDetected,
    MaxSteps,
    Diverged,
}

impl std::fmt::Display for Terminal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Terminal::Converged => "converged",
            Terminal::ElementaryDetected => "elementary_detected",
            Terminal::MaxSteps => "max_steps",
            Terminal::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
    pub terminal: Terminal,
    /// Number of iterates, counting each one that differs from its
    /// predecessor by more than the distinctness threshold.
    pub distinct_elements: usize,
    pub delta: f64,
}

impl IterationTrace {
    pub fn all_contractions_ok(&self) -> bool {
        self.steps.iter().all(|s| s.contraction_ok)
    }

    /// Largest violation of `c_k - 1 <= (c_0 - 1) p^k` with `p = c_0 delta`,
    /// or a nonpositive number when the bound holds throughout.
    pub fn decay_bound_excess(&self) -> f64 {
        let Some(first) = self.steps.first() else { return f64::NEG_INFINITY };
        let c0 = first.corner_modulus_sq;
        let p = c0 * self.delta;
        self.steps
            .iter()
            .map(|s| (s.corner_modulus_sq - 1.0) - (c0 - 1.0) * p.powi(s.k as i32))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Corners above this count as divergence.
const DIVERGENCE_CORNER: f64 = 1e12;

/// Runs the sequence for a normalized pair: `g` diagonal fixing the origin.
pub fn iterate(g: &Isometry, h: &Isometry, max_steps: usize, tol: &Tolerances) -> Result<IterationTrace> {
    let delta = analyze_elliptic(g, tol)?.delta;
    Ok(iterate_with_delta(g, h, delta, max_steps, tol))
}

/// [`iterate`] with a known `delta(g)`.
pub fn iterate_with_delta(g: &Isometry, h: &Isometry, delta: f64, max_steps: usize, tol: &Tolerances) -> IterationTrace {
    let mut seq = ConjugationSequence::new(g, h);
    let mut hk = seq.next().expect("first element");
    let mut steps = Vec::new();
    let mut distinct = 1usize;
    let record = |k: usize, x: &Isometry, ok: bool| StepRecord {
        k,
        corner_modulus_sq: x.corner().norm_sqr(),
        beta_norm: x.beta_norm(),
        contraction_ok: ok,
        membership_residual: x.membership_residual(),
    };
    let terminal = loop {
        let k = steps.len();
        let c = hk.corner().norm_sqr();
        let stop = if !c.is_finite() || c > DIVERGENCE_CORNER {
            Some(Terminal::Diverged)
        } else if hk.beta_norm() < tol.beta_vanish {
            Some(Terminal::ElementaryDetected)
        } else if c - 1.0 < tol.convergence {
            Some(Terminal::Converged)
        } else if k >= max_steps {
            Some(Terminal::MaxSteps)
        } else {
            None
        };
        if let Some(t) = stop {
            steps.push(record(k, &hk, true));
            break t;
        }
        let Some(next) = seq.next() else {
            steps.push(record(k, &hk, true));
            break Terminal::Diverged;
        };
        let c_next = next.corner().norm_sqr();
        let ok = c_next - 1.0 <= (c - 1.0) * c * delta + 1e-9;
        steps.push(record(k, &hk, ok));
        if next.matrix().max_abs_diff(hk.matrix()) > tol.distinct {
            distinct += 1;
        }
        hk = next;
    };
    IterationTrace { steps, terminal, distinct_elements: distinct, delta }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Elementary,
    NotDiscrete,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Elementary => "elementary",
            Verdict::NotDiscrete => "not_discrete",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub verdict: Verdict,
    pub criterion: CriterionValue,
    pub trace: Option<IterationTrace>,
    pub notes: Vec<String>,
}

pub const DEFAULT_MAX_STEPS: usize = 200;

pub fn jorgensen_test(g: &Isometry, h: &Isometry, max_steps: usize, tol: &Tolerances) -> Result<TestReport> {
    jorgensen_test_with(g, h, max_steps, tol, &SearchOptions::default())
}

pub fn jorgensen_test_with(
    g: &Isometry,
    h: &Isometry,
    max_steps: usize,
    tol: &Tolerances,
    search: &SearchOptions,
) -> Result<TestReport> {
    let profile = analyze_elliptic(g, tol)?;
    let criterion = criterion_for_profile(&profile, h, tol, search)?;
    let (gn, hn) = normalize_diagonal(&profile, h, &criterion.witness_point, tol)?;
    let trace = iterate_with_delta(&gn, &hn, profile.delta, max_steps, tol);
    let mut notes = Vec::new();

    let verdict = if !(criterion.product < 1.0) {
        notes.push(format!("criterion product {} >= 1: no conclusion", criterion.product));
        Verdict::Inconclusive
    } else {
        if !trace.all_contractions_ok() {
            let bad: Vec<String> =
                trace.steps.iter().filter(|s| !s.contraction_ok).map(|s| s.k.to_string()).collect();
            notes.push(format!("contraction inequality violated at steps {}", bad.join(",")));
        }
        let last = trace.steps.last().map_or(0, |s| s.k);
        match trace.terminal {
            Terminal::ElementaryDetected if last == 0 => {
                notes.push("h fixes the witness fixed point of g".into());
                Verdict::Elementary
            }
            Terminal::ElementaryDetected => {
                if profile.kind == EllipticKind::Boundary {
                    notes.push(format!(
                        "h_{last} fixes the witness point; g has a positive-dimensional fixed set, so h itself \
                         is only known to map it into that set"
                    ));
                } else {
                    notes.push(format!("h_{last} fixes the unique fixed point of g, hence so does h"));
                }
                Verdict::Elementary
            }
            Terminal::Converged | Terminal::MaxSteps if trace.distinct_elements >= 2 => {
                notes.push(format!(
                    "{} distinct elements h_k with |beta_k| -> 0 ({})",
                    trace.distinct_elements, trace.terminal
                ));
                Verdict::NotDiscrete
            }
            Terminal::Converged | Terminal::MaxSteps => {
                notes.push("h moves the witness point by less than the convergence threshold".into());
                Verdict::Elementary
            }
            Terminal::Diverged => {
                notes.push("iteration diverged although the criterion holds: numerical breakdown".into());
                Verdict::Inconclusive
            }
        }
    };
    Ok(TestReport { verdict, criterion, trace: Some(trace), notes })
}
