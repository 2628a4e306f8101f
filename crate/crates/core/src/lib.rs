//! Worm process for the zero-field Ising model: graphs, worm states, the
//! Metropolis chain, exact enumeration oracles, spectral analysis, canonical
//! paths and susceptibility/correlation estimators.

pub mod catalog;
pub mod chain;
pub mod check;
pub mod estimators;
pub mod exact;
pub mod graph;
pub mod paths;
pub mod spectral;
pub mod state;

pub use chain::{ChainParams, ParamError, Proposal, StepOutcome, WormChain};
pub use check::{Check, Relation, Report};
pub use estimators::{Estimate, EstimatorError, EstimatorPlan, MedianEstimate, Provenance, Target};
pub use exact::{Caps, ExactOracle, OracleError, PsMeasure, SubgraphClassTable};
pub use graph::{Graph, GraphError, GraphKind};
pub use paths::{CanonicalPath, CongestionReport, PathError, Transition};
pub use spectral::{ChainMatrix, MixingBoundReport, SpectralCaps, SpectralError, SpectralSummary};
pub use state::{Boundary, Class, EdgeSubset, StateError, WormState};
