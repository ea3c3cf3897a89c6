//! Rank-product scoring for combined sport climbing, with tools to study it:
//! a copula-based round simulator, Kendall rank-correlation inference,
//! leave-one-climber-out audits and a small PCA.

pub mod audit;
pub mod copula;
pub mod error;
pub mod io;
pub mod model;
pub mod montecarlo;
pub mod pca;
pub mod stats;

pub use error::{DataError, Error, Result};
pub use model::{
    advance_cut, aggregate_score, overall_standings, rank_discipline, AggregationMethod, Climber, Discipline, Entry,
    RankTriple, RoundKind, RoundResult,
};
