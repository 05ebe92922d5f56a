//! Rule mining and rule-based link prediction over knowledge graphs.
//!
//! Rules are closed Horn chains `r1(x, z1) ∧ … ∧ rn(zn-1, y) ⇒ r(x, y)`
//! mined by bidirectional path search from sampled facts and scored by
//! random-walk reachability. Queries are answered by propagating mass along
//! each rule body and summing (or maxing) the confidence-weighted arrivals.

pub mod config;
pub mod error;
pub mod eval;
pub mod index;
pub mod inference;
pub mod kg;
pub mod limit;
pub mod miner;
pub mod oracle;
pub mod rule;
pub mod seed;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use eval::{evaluate, Experiment, Metrics};
pub use index::GraphIndex;
pub use inference::{explain, propagate, Aggregation, Distribution, Explanation, Rank, Scorer};
pub use kg::{ColumnOrder, Dataset, EntityId, Fact, RelationId, Vocabulary};
pub use limit::Limit;
pub use miner::{mine, ConfAccumulator, MinerSettings, PathWeight};
pub use rule::{LabeledPath, Rule, RuleBook, ScoredRule};
