use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// One record is threaded through all computations so that a caller (or the
/// CLI) can tighten or loosen a single knob consistently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Generic absolute equality.
    pub equality: f64,
    /// Allowed deviation of an elliptic eigenvalue modulus from 1.
    pub unit_modulus: f64,
    /// Max-entry residual accepted by the Sp(n,1) membership check.
    pub membership: f64,
    /// `|<z,z>|` below this classifies a vector as null.
    pub null_norm: f64,
    /// Matching distance for conjugate pairs of adjoint eigenvalues.
    pub pair_matching: f64,
    /// Angle (radians) below which two eigenvalue classes coincide.
    pub angle_cluster: f64,
    /// Residual of `M v - v lambda`, relative to `max(1, |M|_max)`.
    pub eigen_residual: f64,
    /// Most negative Hermitian norm must lie below `-type_ambiguity`.
    pub type_ambiguity: f64,
    /// Euclidean norm of the bottom row block under which it counts as zero.
    pub beta_vanish: f64,
    /// Convergence threshold on `|a_corner|^2 - 1`.
    pub convergence: f64,
    /// Consecutive iterates closer than this (max entry) are not distinct.
    pub distinct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-9,
            unit_modulus: 1e-9,
            membership: 1e-8,
            null_norm: 1e-9,
            pair_matching: 1e-7,
            angle_cluster: 1e-6,
            eigen_residual: 1e-9,
            type_ambiguity: 1e-9,
            beta_vanish: 1e-10,
            convergence: 1e-12,
            distinct: 1e-8,
        }
    }
}

impl Tolerances {
    /// Checks that every threshold is positive and finite.
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            ("equality", self.equality),
            ("unit_modulus", self.unit_modulus),
            ("membership", self.membership),
            ("null_norm", self.null_norm),
            ("pair_matching", self.pair_matching),
            ("angle_cluster", self.angle_cluster),
            ("eigen_residual", self.eigen_residual),
            ("type_ambiguity", self.type_ambiguity),
            ("beta_vanish", self.beta_vanish),
            ("convergence", self.convergence),
            ("distinct", self.distinct),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::Invalid(format!(
                    "tolerance `{name}` must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
