//! Filtered link-prediction metrics, parameter sweeps and path-weight
//! ablations.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::GraphIndex;
use crate::inference::{rank_with, Aggregation, DenseScores, Rank, Scorer};
use crate::kg::{Dataset, EntityId, Fact, RelationId};
use crate::limit::Limit;
use crate::miner::{mine, MinerSettings, PathWeight};
use crate::rule::{format_significant, RuleBook};

/// Cut-offs reported for Hits@k.
pub const HITS_AT: [usize; 3] = [1, 3, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
    pub queries: usize,
}

impl Metrics {
    pub fn hits_at(&self, k: usize) -> f64 {
        self.hits.get(&k).copied().unwrap_or(f64::NAN)
    }

    /// Aggregates per-query ranks. Ranks are sorted first so the result does
    /// not depend on query order.
    pub fn from_ranks(mut ranks: Vec<Rank>) -> Metrics {
        ranks.sort_unstable();
        let n = ranks.len() as f64;
        let mrr = ranks.iter().fold(0.0, |acc, r| acc + r.reciprocal()) / n;
        let hits = HITS_AT
            .iter()
            .map(|&k| (k, ranks.iter().fold(0.0, |acc, r| acc + r.hits_credit(k)) / n))
            .collect();
        Metrics {
            mrr,
            hits,
            queries: ranks.len(),
        }
    }
}

/// One completion query `(source, relation, ?)` with its gold answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub source: EntityId,
    pub relation: RelationId,
    pub gold: EntityId,
}

/// Tail query `(s, r, ?)` and head query rewritten as `(o, inv(r), ?)`.
pub fn queries_for(fact: &Fact, base_relations: u32) -> [Query; 2] {
    [
        Query {
            source: fact.subject,
            relation: fact.relation,
            gold: fact.object,
        },
        Query {
            source: fact.object,
            relation: fact.relation.inverse(base_relations),
            gold: fact.subject,
        },
    ]
}

/// Filtered rank of each query's gold answer, in query order.
pub fn query_ranks(
    train: &GraphIndex,
    rulebook: &RuleBook,
    queries: &[Query],
    known: &GraphIndex,
    k: usize,
    mode: Aggregation,
) -> Vec<Rank> {
    let scorer = Scorer::new(train, rulebook, k, mode);
    let universe = train.entity_count();
    queries
        .par_iter()
        .map_init(
            || DenseScores::new(universe),
            |buf, q| {
                scorer.score_dense(q.source, q.relation, buf);
                let answers = known.q_lookup(q.source, q.relation);
                let gold_known = answers.binary_search(&q.gold).is_ok();
                let filtered_count = answers.len() - usize::from(gold_known);
                rank_with(
                    buf.score(q.gold),
                    buf.iter(),
                    q.gold,
                    |e| e != q.gold && answers.binary_search(&e).is_ok(),
                    filtered_count,
                    universe,
                )
            },
        )
        .collect()
}

/// Filtered MRR and Hits@k over both directions of every test fact.
/// `known` must index train ∪ valid ∪ test.
pub fn evaluate(
    train: &GraphIndex,
    rulebook: &RuleBook,
    test: &[Fact],
    known: &GraphIndex,
    k: usize,
    mode: Aggregation,
) -> Result<Metrics> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let base = train.base_relation_count();
    let queries: Vec<Query> = test.iter().flat_map(|f| queries_for(f, base)).collect();
    Ok(Metrics::from_ranks(query_ranks(train, rulebook, &queries, known, k, mode)))
}

/// Loaded indexes for repeated mine/evaluate runs over one dataset.
pub struct Experiment {
    pub train: GraphIndex,
    pub known: GraphIndex,
    pub test: Vec<Fact>,
}

impl Experiment {
    pub fn new(dataset: &Dataset) -> Self {
        Experiment {
            train: dataset.train_index(),
            known: dataset.known_index(),
            test: dataset.test.clone(),
        }
    }

    pub fn mine(&self, settings: &MinerSettings) -> RuleBook {
        mine(&self.train, settings).normalize()
    }

    pub fn evaluate(&self, rulebook: &RuleBook, k: Limit, mode: Aggregation) -> Result<Metrics> {
        evaluate(
            &self.train,
            rulebook,
            &self.test,
            &self.known,
            k.get().unwrap_or(usize::MAX),
            mode,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Facts sampled per relation; rules are re-mined per value.
    Alpha,
    /// Rules applied per query; rules are mined once.
    K,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: Limit,
    pub metrics: Metrics,
}

pub fn sweep(
    exp: &Experiment,
    parameter: SweepParameter,
    values: &[Limit],
    settings: &MinerSettings,
    k: Limit,
    mode: Aggregation,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    match parameter {
        SweepParameter::Alpha => values
            .iter()
            .map(|&alpha| {
                let book = exp.mine(&MinerSettings {
                    alpha,
                    ..settings.clone()
                });
                Ok(SweepPoint {
                    value: alpha,
                    metrics: exp.evaluate(&book, k, mode)?,
                })
            })
            .collect(),
        SweepParameter::K => {
            let book = exp.mine(settings);
            values
                .iter()
                .map(|&k| {
                    Ok(SweepPoint {
                        value: k,
                        metrics: exp.evaluate(&book, k, mode)?,
                    })
                })
                .collect()
        }
    }
}

pub fn write_sweep_csv<W: Write>(mut out: W, points: &[SweepPoint]) -> std::io::Result<()> {
    writeln!(out, "value,mrr,hits1,hits10")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{}",
            p.value,
            format_significant(p.metrics.mrr, 12),
            format_significant(p.metrics.hits_at(1), 12),
            format_significant(p.metrics.hits_at(10), 12)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub variant: PathWeight,
    pub budget: Limit,
    pub metrics: Metrics,
}

/// Mines once per path-weight variant and evaluates each rule book at every
/// rule budget.
pub fn ablation(
    exp: &Experiment,
    settings: &MinerSettings,
    variants: &[PathWeight],
    budgets: &[Limit],
    mode: Aggregation,
) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::new();
    for &variant in variants {
        let book = crate::miner::ablate_path_weight(&exp.train, settings, variant);
        for &budget in budgets {
            rows.push(AblationRow {
                variant,
                budget,
                metrics: exp.evaluate(&book, budget, mode)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_ablation_csv<W: Write>(mut out: W, rows: &[AblationRow]) -> std::io::Result<()> {
    writeln!(out, "variant,k,mrr,hits1,hits10")?;
    for r in rows {
        let variant = match r.variant {
            PathWeight::Markov => "markov",
            PathWeight::Length => "length",
            PathWeight::Constant => "constant",
        };
        writeln!(
            out,
            "{variant},{},{},{},{}",
            r.budget,
            format_significant(r.metrics.mrr, 12),
            format_significant(r.metrics.hits_at(1), 12),
            format_significant(r.metrics.hits_at(10), 12)
        )?;
    }
    Ok(())
}
