//! Rule extraction and confidence accumulation.
//!
//! Each sampled training fact `(s, r, o)` is mined independently: length-1
//! rules come from relations that also connect `s` to `o`, longer rules from
//! the simple paths joining `s` to the answers `Q(s, r)`. A path adds its
//! Markov probability to the rule it instantiates, and the per-rule sums are
//! finally divided by the number of sampled facts of the head relation.

mod bibfs;
mod probability;
mod sample;
mod single_hop;

pub use bibfs::{bibfs_paths, BiBfs, PathRef};
pub use probability::{path_probability, transition_probability};
pub use sample::{sample_facts, SampledFacts};
pub use single_hop::single_hop_rules;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::index::GraphIndex;
use crate::kg::{EntityId, Fact, RelationId};
use crate::limit::Limit;
use crate::rule::{Body, Rule, RuleBook, ScoredRule};
use crate::seed;

/// Weight a discovered path adds to its rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PathWeight {
    /// Product of uniform transition probabilities.
    #[default]
    Markov,
    /// `1 / path length`.
    Length,
    /// Always 1, so sums count instantiations.
    Constant,
}

impl PathWeight {
    #[inline]
    fn of(self, path: &PathRef<'_>) -> f64 {
        match self {
            PathWeight::Markov => path.probability,
            PathWeight::Length => 1.0 / path.edges.len() as f64,
            PathWeight::Constant => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinerSettings {
    /// Longest rule body.
    pub max_len: usize,
    /// Sampled facts per relation.
    pub alpha: Limit,
    /// Children expanded per node in either search direction.
    pub beta: Limit,
    /// Answers of `Q(s, r)` used as search targets.
    pub answer_cap: Limit,
    pub seed: u64,
    pub weight: PathWeight,
}

impl Default for MinerSettings {
    fn default() -> Self {
        MinerSettings {
            max_len: 3,
            alpha: Limit::At(100),
            beta: Limit::At(100),
            answer_cap: Limit::At(5),
            seed: 0,
            weight: PathWeight::Markov,
        }
    }
}

/// Running per-rule sums of reachability mass plus the number of mined facts
/// per head relation.
#[derive(Debug, Clone, Default)]
pub struct ConfAccumulator {
    prm_sum: Vec<FxHashMap<Body, f64>>,
    query_count: Vec<u64>,
}

/// Contributions of a single mined fact.
#[derive(Debug, Clone)]
pub struct FactYield {
    pub fact: Fact,
    pub contributions: Vec<(Body, f64)>,
}

impl ConfAccumulator {
    pub fn new(relation_count: usize) -> Self {
        ConfAccumulator {
            prm_sum: vec![FxHashMap::default(); relation_count],
            query_count: vec![0; relation_count],
        }
    }

    fn ensure(&mut self, head: RelationId) {
        if head.index() >= self.prm_sum.len() {
            self.prm_sum.resize(head.index() + 1, FxHashMap::default());
            self.query_count.resize(head.index() + 1, 0);
        }
    }

    /// Counts the fact as one query of its relation and adds its rule masses.
    pub fn add_fact(&mut self, y: FactYield) {
        let head = y.fact.relation;
        self.ensure(head);
        self.query_count[head.index()] += 1;
        let map = &mut self.prm_sum[head.index()];
        for (body, value) in y.contributions {
            *map.entry(body).or_insert(0.0) += value;
        }
    }

    /// Adds another accumulator's sums and counts into this one.
    pub fn merge(&mut self, other: ConfAccumulator) {
        for (h, (map, count)) in other.prm_sum.into_iter().zip(other.query_count).enumerate() {
            self.ensure(RelationId(h as u32));
            self.query_count[h] += count;
            let mine = &mut self.prm_sum[h];
            for (body, v) in map {
                *mine.entry(body).or_insert(0.0) += v;
            }
        }
    }

    pub fn prm_sum(&self, rule: &Rule) -> f64 {
        self.prm_sum
            .get(rule.head.index())
            .and_then(|m| m.get(&rule.body))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn query_count(&self, relation: RelationId) -> u64 {
        self.query_count.get(relation.index()).copied().unwrap_or(0)
    }

    pub fn rule_count(&self) -> usize {
        self.prm_sum.iter().map(|m| m.values().filter(|&&v| v > 0.0).count()).sum()
    }

    pub fn facts_mined(&self) -> u64 {
        self.query_count.iter().sum()
    }

    pub fn rules(&self) -> impl Iterator<Item = (Rule, f64)> + '_ {
        self.prm_sum.iter().enumerate().flat_map(|(h, m)| {
            m.iter().map(move |(b, &v)| {
                (
                    Rule {
                        head: RelationId(h as u32),
                        body: b.clone(),
                    },
                    v,
                )
            })
        })
    }

    /// Divides each rule's mass by its head's fact count and ranks the
    /// result. Rules that never gained mass are left out.
    pub fn normalize(&self) -> RuleBook {
        normalize_confidence(self)
    }
}

pub fn normalize_confidence(acc: &ConfAccumulator) -> RuleBook {
    let rules = acc.rules().filter_map(|(rule, sum)| {
        let n = acc.query_count(rule.head);
        (sum > 0.0 && n > 0).then(|| ScoredRule {
            pconf: sum / n as f64,
            rule,
        })
    });
    RuleBook::from_rules(acc.prm_sum.len(), rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Stages {
    pub single: bool,
    pub multi: bool,
}

impl Stages {
    pub(crate) const ALL: Stages = Stages {
        single: true,
        multi: true,
    };
}

/// Per-fact miner over a shared read-only index.
pub struct FactMiner<'g> {
    index: &'g GraphIndex,
    settings: &'g MinerSettings,
    stages: Stages,
}

thread_local! {
    static SEARCH: std::cell::RefCell<BiBfs> = std::cell::RefCell::new(BiBfs::new());
}

impl<'g> FactMiner<'g> {
    pub fn new(index: &'g GraphIndex, settings: &'g MinerSettings) -> Self {
        FactMiner {
            index,
            settings,
            stages: Stages::ALL,
        }
    }

    pub(crate) fn with_stages(mut self, stages: Stages) -> Self {
        self.stages = stages;
        self
    }

    /// Search targets for `fact`: `Q(s, r)`, down-sampled to the answer cap.
    pub fn targets<R: rand::Rng>(&self, fact: &Fact, rng: &mut R) -> Vec<EntityId> {
        let answers = self.index.q_lookup(fact.subject, fact.relation);
        match self.settings.answer_cap {
            Limit::At(cap) if answers.len() > cap => {
                let mut keep = rand::seq::index::sample(rng, answers.len(), cap).into_vec();
                keep.sort_unstable();
                keep.into_iter().map(|i| answers[i]).collect()
            }
            _ => answers.to_vec(),
        }
    }

    pub fn mine_fact(&self, fact: &Fact) -> FactYield {
        let mut sums: FxHashMap<Body, f64> = FxHashMap::default();
        if self.stages.single {
            for (rel, v) in single_hop_rules(self.index, fact, self.settings.weight) {
                if v > 0.0 {
                    *sums.entry(Body::from_elem(rel, 1)).or_insert(0.0) += v;
                }
            }
        }
        if self.stages.multi && self.settings.max_len >= 2 {
            let mut rng = seed::fact_rng(self.settings.seed, fact);
            let targets = self.targets(fact, &mut rng);
            let excluded = [*fact, fact.inverse(self.index.base_relation_count())];
            let weight = self.settings.weight;
            SEARCH.with(|search| {
                search.borrow_mut().for_each_path(
                    self.index,
                    fact.subject,
                    &targets,
                    self.settings.max_len,
                    self.settings.beta,
                    &excluded,
                    &mut rng,
                    |path| {
                        *sums.entry(Body::from_slice(path.edges)).or_insert(0.0) += weight.of(&path);
                    },
                )
            });
        }
        let mut contributions: Vec<(Body, f64)> = sums.into_iter().collect();
        contributions.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        FactYield {
            fact: *fact,
            contributions,
        }
    }

    /// Mines `facts` in parallel and folds the yields in input order, so the
    /// floating-point sums do not depend on thread scheduling.
    pub fn mine_all<'a>(&self, facts: impl IntoIterator<Item = &'a Fact>) -> ConfAccumulator {
        const CHUNK: usize = 1024;
        let facts: Vec<Fact> = facts.into_iter().copied().collect();
        let mut acc = ConfAccumulator::new(self.index.relation_count());
        for chunk in facts.chunks(CHUNK) {
            let yields: Vec<FactYield> = chunk.par_iter().map(|f| self.mine_fact(f)).collect();
            for y in yields {
                acc.add_fact(y);
            }
        }
        acc
    }
}

/// Length-1 rules only, over pre-sampled facts.
pub fn mine_single_hop(index: &GraphIndex, sampled: &SampledFacts, weight: PathWeight) -> ConfAccumulator {
    let settings = MinerSettings {
        weight,
        ..MinerSettings::default()
    };
    FactMiner::new(index, &settings)
        .with_stages(Stages {
            single: true,
            multi: false,
        })
        .mine_all(sampled.iter())
}

/// Rules of length `2..=max_len` from bidirectional search, sampling facts
/// with `settings.alpha`.
pub fn mine_multi_hop(index: &GraphIndex, settings: &MinerSettings) -> ConfAccumulator {
    let sampled = sample_facts(index, settings.alpha, settings.seed);
    FactMiner::new(index, settings)
        .with_stages(Stages {
            single: false,
            multi: true,
        })
        .mine_all(sampled.iter())
}

/// Full extraction: sampling, single-hop and multi-hop rules in one pass.
pub fn mine(index: &GraphIndex, settings: &MinerSettings) -> ConfAccumulator {
    let sampled = sample_facts(index, settings.alpha, settings.seed);
    mine_sampled(index, &sampled, settings)
}

pub fn mine_sampled(index: &GraphIndex, sampled: &SampledFacts, settings: &MinerSettings) -> ConfAccumulator {
    FactMiner::new(index, settings).mine_all(sampled.iter())
}

/// Mines with the given path weighting and normalizes.
pub fn ablate_path_weight(index: &GraphIndex, settings: &MinerSettings, weight: PathWeight) -> RuleBook {
    let settings = MinerSettings {
        weight,
        ..settings.clone()
    };
    mine(index, &settings).normalize()
}
