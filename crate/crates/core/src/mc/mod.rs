//! Monte Carlo estimation of ortho-homomorphism densities.

pub mod checks;
pub mod driver;
pub mod estimators;
pub mod finiteness;

use serde::{Deserialize, Serialize};

pub use checks::{
    det_moment_mc_check, markov_factorization_test, order_independence_test, MarkovReport, MomentReport, OrderReport,
};
pub use driver::{Execution, McConfig, McOutput, DEFAULT_SEED};
pub use estimators::{estimate_bipartite, estimate_c6_angle_space, estimate_sequential, variance_certified};
pub use finiteness::classify_finiteness;

/// Fraction of excluded draws above which an estimate is flagged invalid.
pub const EXCLUSION_LIMIT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SequentialImportance,
    BipartiteDirect,
    AngleSpace,
    ClosedForm,
    Spectral,
    Graphon,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::SequentialImportance => "sequential_importance",
            Method::BipartiteDirect => "bipartite_direct",
            Method::AngleSpace => "angle_space",
            Method::ClosedForm => "closed_form",
            Method::Spectral => "spectral",
            Method::Graphon => "graphon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinitenessStatus {
    FiniteProved,
    InfiniteProved,
    Unknown,
    NotSparse,
}

impl FinitenessStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FinitenessStatus::FiniteProved => "FiniteProved",
            FinitenessStatus::InfiniteProved => "InfiniteProved",
            FinitenessStatus::Unknown => "Unknown",
            FinitenessStatus::NotSparse => "NotSparse",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    pub status: FinitenessStatus,
    /// Name of the rule that decided the status; empty for `Unknown`.
    pub rule: String,
}

impl FinitenessVerdict {
    pub fn new(status: FinitenessStatus, rule: impl Into<String>) -> Self {
        FinitenessVerdict { status, rule: rule.into() }
    }

    pub fn unknown() -> Self {
        FinitenessVerdict::new(FinitenessStatus::Unknown, "")
    }

    pub fn is_finite(&self) -> bool {
        self.status == FinitenessStatus::FiniteProved
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_weight: f64,
    pub effective_sample_size: f64,
    pub retry_count: u64,
    /// Draws with a non-finite value, left out of every average.
    pub excluded: u64,
    /// Set when `excluded / samples` exceeds [`EXCLUSION_LIMIT`].
    pub invalid: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Median of 16 block means.
    pub mom_value: f64,
    pub samples: u64,
    pub method: Method,
    pub finiteness: FinitenessVerdict,
    pub diagnostics: Diagnostics,
}

impl DensityEstimate {
    pub(crate) fn from_output(out: &McOutput, method: Method, finiteness: FinitenessVerdict) -> Self {
        let c = &out.components[0];
        let mut warnings = Vec::new();
        let invalid = out.excluded_fraction() > EXCLUSION_LIMIT;
        if invalid {
            warnings.push(format!("{} of {} draws were numerically singular", out.excluded, out.samples));
        }
        DensityEstimate {
            value: c.mean,
            std_error: c.std_error,
            mom_value: c.median_of_means,
            samples: out.samples,
            method,
            finiteness,
            diagnostics: Diagnostics {
                max_weight: out.max_value,
                effective_sample_size: out.ess.min(out.samples as f64),
                retry_count: out.retries,
                excluded: out.excluded,
                invalid,
                warnings,
            },
        }
    }

    /// An exact value carried in the estimate shape.
    pub fn exact(value: f64, method: Method, finiteness: FinitenessVerdict) -> Self {
        DensityEstimate {
            value,
            std_error: 0.0,
            mom_value: value,
            samples: 0,
            method,
            finiteness,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Combined-error z-score against another estimate.
    pub fn z_against(&self, other: &DensityEstimate) -> f64 {
        crate::stats::z_score(self.value, self.std_error, other.value, other.std_error)
    }

    /// z-score against an exact reference.
    pub fn z_exact(&self, reference: f64) -> f64 {
        crate::stats::z_score(self.value, self.std_error, reference, 0.0)
    }
}
