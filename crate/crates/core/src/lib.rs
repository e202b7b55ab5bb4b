//! Unbiased, parallelizable MCMC estimates for distributions over set partitions.
//!
//! Two Gibbs chains over partitions are coupled one leave-out step at a time. At each
//! step the two leave-out conditionals are joined by an exact optimal-transport coupling
//! whose cost is the Mirkin/Rand distance between candidate partitions, mixed with a
//! small independent "nugget". Once the chains meet they stay together, and the pair
//! yields a bias-corrected lag-1 estimator. Many such estimates are then averaged
//! (or trimmed-averaged) across workers.
//!
//! The crate is organised bottom-up:
//!
//! * [`partition`] – canonical partitions, the mutable slot-based [`Clustering`] used by
//!   chains, the incremental [`IntersectionTracker`] and the partition metrics.
//! * [`targets`] – the [`PartitionModel`] trait with the conjugate Gaussian DPMM posterior
//!   and the graph-coloring induced distribution.
//! * [`coupling`] – network simplex transport, independent / maximal / common-RNG couplings.
//! * [`sampler`] – single and coupled Gibbs sweeps, split-merge moves, the lag-1 pair runner.
//! * [`estimation`] – summary functions and the unbiased estimator.
//! * [`aggregation`] – mean/SEM reports, trimmed means, batching, Kaplan–Meier.
//! * [`harness`] – configuration, file formats, parallel runners and ground truth.
//!
//! Numerical code is generic over the scalar type through [`Real`]; the transport solver is
//! additionally generic over exact mass types such as [`Rational`].

pub mod aggregation;
pub mod coupling;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod partition;
pub mod sampler;
pub mod targets;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use error::{Error, Result};
pub use partition::{Candidate, Clustering, IntersectionTracker, LabelVector, Partition};
pub use targets::{ColoringModel, DpmmModel, GibbsConditional, PartitionModel};

/// Floating point scalar used by models, samplers and aggregation.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from `f64`; every implementor can represent the result.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Real")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational used by transport oracles.
pub type Rational = num_rational::Ratio<i64>;

pub type DpmmModelF64 = DpmmModel<f64>;
pub type DpmmModelF32 = DpmmModel<f32>;
pub type GibbsConditionalF64 = GibbsConditional<f64>;
pub type CouplingMatrixF64 = coupling::CouplingMatrix<f64>;
pub type CouplingMatrixF32 = coupling::CouplingMatrix<f32>;
pub type RationalCoupling = coupling::CouplingMatrix<Rational>;
pub type ChainPairRecordF64 = sampler::ChainPairRecord<f64>;
pub type AggregateReportF64 = aggregation::AggregateReport<f64>;
