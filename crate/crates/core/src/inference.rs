//! Rule application: Markov propagation along rule bodies, candidate scoring
//! and answer ranking.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::index::GraphIndex;
use crate::kg::{EntityId, RelationId};
use crate::rule::{LabeledPath, Rule, RuleBook, ScoredRule};

/// Entries with less mass than this are folded into the absorbed mass.
pub const PRUNE_BELOW: f64 = 1e-15;

/// Sparse state distribution of the rule chain: mass per entity plus the
/// mass sitting in the absorbing state.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: Vec<(EntityId, f64)>,
    absorbed: f64,
}

impl Distribution {
    pub fn point(entity: EntityId) -> Self {
        Distribution {
            mass: vec![(entity, 1.0)],
            absorbed: 0.0,
        }
    }

    /// Entity masses sorted by entity id; zero entries are never stored.
    pub fn mass(&self) -> &[(EntityId, f64)] {
        &self.mass
    }

    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    pub fn get(&self, entity: EntityId) -> f64 {
        self.mass
            .binary_search_by_key(&entity, |&(e, _)| e)
            .map_or(0.0, |i| self.mass[i].1)
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().map(|&(_, m)| m).sum::<f64>() + self.absorbed
    }

    pub fn step(&self, index: &GraphIndex, relation: RelationId) -> Distribution {
        Propagator::new(index.entity_count()).step(index, self, relation)
    }
}

/// Dense scratch space for stepping distributions.
#[derive(Debug, Clone)]
pub struct Propagator {
    acc: Vec<f64>,
    touched: Vec<EntityId>,
}

impl Propagator {
    pub fn new(entity_count: usize) -> Self {
        Propagator {
            acc: vec![0.0; entity_count],
            touched: Vec::new(),
        }
    }

    /// One chain step along `relation`: mass at `v` spreads evenly over
    /// `Q(v, relation)` or falls into the absorbing state.
    pub fn step(&mut self, index: &GraphIndex, dist: &Distribution, relation: RelationId) -> Distribution {
        if self.acc.len() < index.entity_count() {
            self.acc.resize(index.entity_count(), 0.0);
        }
        let mut absorbed = dist.absorbed;
        for &(v, m) in &dist.mass {
            let next = index.q_lookup(v, relation);
            if next.is_empty() {
                absorbed += m;
                continue;
            }
            let share = m / next.len() as f64;
            for &o in next {
                let slot = &mut self.acc[o.index()];
                if *slot == 0.0 {
                    self.touched.push(o);
                }
                *slot += share;
            }
        }
        self.touched.sort_unstable();
        let mut mass = Vec::with_capacity(self.touched.len());
        for &o in &self.touched {
            let m = std::mem::take(&mut self.acc[o.index()]);
            if m < PRUNE_BELOW {
                absorbed += m;
            } else {
                mass.push((o, m));
            }
        }
        self.touched.clear();
        Distribution { mass, absorbed }
    }
}

/// Distribution of the final chain state after following `body` from
/// `source`. Revisits are allowed.
pub fn propagate(index: &GraphIndex, body: &[RelationId], source: EntityId) -> Distribution {
    let mut prop = Propagator::new(index.entity_count());
    body.iter().fold(Distribution::point(source), |d, &r| prop.step(index, &d, r))
}

/// Same as [`propagate`] but keeps the distribution after every step,
/// starting with the point mass.
pub fn propagate_trace(index: &GraphIndex, body: &[RelationId], source: EntityId) -> Vec<Distribution> {
    let mut prop = Propagator::new(index.entity_count());
    let mut out = vec![Distribution::point(source)];
    for &r in body {
        let next = prop.step(index, out.last().expect("non-empty"), r);
        out.push(next);
    }
    out
}

/// How rule contributions to one candidate are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Sum of confidence-weighted arrival probabilities.
    #[default]
    Sum,
    /// Largest single confidence-weighted arrival probability.
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub entity: EntityId,
    pub score: f64,
    /// `(rank of the rule within its head, contribution)` in application order.
    pub provenance: Vec<(usize, f64)>,
}

/// Candidate answers of one query, sorted by entity id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoredCandidates {
    pub candidates: Vec<Candidate>,
}

impl ScoredCandidates {
    pub fn score(&self, entity: EntityId) -> f64 {
        self.get(entity).map_or(0.0, |c| c.score)
    }

    pub fn get(&self, entity: EntityId) -> Option<&Candidate> {
        self.candidates
            .binary_search_by_key(&entity, |c| c.entity)
            .ok()
            .map(|i| &self.candidates[i])
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Candidates by score descending, entity id ascending.
    pub fn ranked(&self) -> Vec<&Candidate> {
        let mut v: Vec<&Candidate> = self.candidates.iter().collect();
        v.sort_by(|a, b| rank_key(b.score).cmp(&rank_key(a.score)).then(a.entity.cmp(&b.entity)));
        v
    }
}

#[derive(Debug, Clone)]
struct TrieNode {
    relation: RelationId,
    children: Vec<u32>,
    rule: Option<usize>,
}

/// Top-K bodies of one head merged on shared prefixes, so each prefix is
/// propagated once per query.
#[derive(Debug, Clone)]
struct RuleTrie {
    nodes: Vec<TrieNode>,
}

impl RuleTrie {
    fn build(rules: &[ScoredRule]) -> Self {
        let mut nodes = vec![TrieNode {
            relation: RelationId(u32::MAX),
            children: Vec::new(),
            rule: None,
        }];
        for (rank, r) in rules.iter().enumerate() {
            let mut at = 0usize;
            for &rel in &r.rule.body {
                let found = nodes[at]
                    .children
                    .iter()
                    .copied()
                    .find(|&c| nodes[c as usize].relation == rel);
                at = match found {
                    Some(c) => c as usize,
                    None => {
                        let id = nodes.len();
                        nodes.push(TrieNode {
                            relation: rel,
                            children: Vec::new(),
                            rule: None,
                        });
                        nodes[at].children.push(id as u32);
                        id
                    }
                };
            }
            nodes[at].rule = Some(rank);
        }
        RuleTrie { nodes }
    }
}

/// Applies the top-K rules of each head relation to queries `(s, r, ?)`.
pub struct Scorer<'a> {
    index: &'a GraphIndex,
    rulebook: &'a RuleBook,
    k: usize,
    mode: Aggregation,
    tries: Vec<RuleTrie>,
}

impl<'a> Scorer<'a> {
    pub fn new(index: &'a GraphIndex, rulebook: &'a RuleBook, k: usize, mode: Aggregation) -> Self {
        let heads = rulebook.relation_slots().max(index.relation_count());
        let tries = (0..heads as u32)
            .map(|h| RuleTrie::build(rulebook.top_k(RelationId(h), k)))
            .collect();
        Scorer {
            index,
            rulebook,
            k,
            mode,
            tries,
        }
    }

    pub fn rules(&self, relation: RelationId) -> &'a [ScoredRule] {
        self.rulebook.top_k(relation, self.k)
    }

    pub fn mode(&self) -> Aggregation {
        self.mode
    }

    /// Reports every `(rule rank, entity, P(s_T = entity) · PConf)` triple
    /// with nonzero chain mass, prefix-depth-first.
    pub fn visit<F: FnMut(usize, EntityId, f64)>(
        &self,
        source: EntityId,
        relation: RelationId,
        prop: &mut Propagator,
        mut sink: F,
    ) {
        let Some(trie) = self.tries.get(relation.index()) else {
            return;
        };
        if trie.nodes.len() == 1 {
            return;
        }
        let rules = self.rules(relation);
        let start = Distribution::point(source);
        self.walk(trie, rules, 0, &start, prop, &mut sink);
    }

    fn walk<F: FnMut(usize, EntityId, f64)>(
        &self,
        trie: &RuleTrie,
        rules: &[ScoredRule],
        at: usize,
        dist: &Distribution,
        prop: &mut Propagator,
        sink: &mut F,
    ) {
        for &child in &trie.nodes[at].children {
            let node = &trie.nodes[child as usize];
            let next = prop.step(self.index, dist, node.relation);
            if let Some(rank) = node.rule {
                let pconf = rules[rank].pconf;
                for &(e, p) in next.mass() {
                    sink(rank, e, p * pconf);
                }
            }
            if !node.children.is_empty() && !next.mass().is_empty() {
                self.walk(trie, rules, child as usize, &next, prop, sink);
            }
        }
    }

    pub fn score(&self, source: EntityId, relation: RelationId) -> ScoredCandidates {
        let mut prop = Propagator::new(self.index.entity_count());
        let mut prov: FxHashMap<EntityId, Vec<(usize, f64)>> = FxHashMap::default();
        self.visit(source, relation, &mut prop, |rank, e, c| {
            prov.entry(e).or_default().push((rank, c));
        });
        let mut candidates: Vec<Candidate> = prov
            .into_iter()
            .map(|(entity, provenance)| Candidate {
                entity,
                score: combine(self.mode, &provenance),
                provenance,
            })
            .collect();
        candidates.sort_unstable_by_key(|c| c.entity);
        ScoredCandidates { candidates }
    }

    /// Scores into a reusable dense buffer. Produces exactly the scores of
    /// [`Scorer::score`].
    pub fn score_dense(&self, source: EntityId, relation: RelationId, buf: &mut DenseScores) {
        buf.clear();
        let mode = self.mode;
        let DenseScores {
            prop,
            scores,
            flagged,
            touched,
        } = buf;
        self.visit(source, relation, prop, |_, e, c| {
            let i = e.index();
            if !flagged[i] {
                flagged[i] = true;
                touched.push(e);
                scores[i] = match mode {
                    Aggregation::Sum => 0.0 + c,
                    Aggregation::Max => c,
                };
            } else {
                scores[i] = match mode {
                    Aggregation::Sum => scores[i] + c,
                    Aggregation::Max => scores[i].max(c),
                };
            }
        });
    }
}

fn combine(mode: Aggregation, provenance: &[(usize, f64)]) -> f64 {
    match mode {
        Aggregation::Sum => provenance.iter().fold(0.0, |acc, &(_, c)| acc + c),
        Aggregation::Max => provenance
            .iter()
            .map(|&(_, c)| c)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Dense per-thread score buffer for evaluation loops.
#[derive(Debug, Clone)]
pub struct DenseScores {
    prop: Propagator,
    scores: Vec<f64>,
    flagged: Vec<bool>,
    touched: Vec<EntityId>,
}

impl DenseScores {
    pub fn new(entity_count: usize) -> Self {
        DenseScores {
            prop: Propagator::new(entity_count),
            scores: vec![0.0; entity_count],
            flagged: vec![false; entity_count],
            touched: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for e in self.touched.drain(..) {
            self.scores[e.index()] = 0.0;
            self.flagged[e.index()] = false;
        }
    }

    pub fn score(&self, entity: EntityId) -> f64 {
        if self.flagged[entity.index()] {
            self.scores[entity.index()]
        } else {
            0.0
        }
    }

    /// Scored entities in first-touched order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, f64)> + '_ {
        self.touched.iter().map(|&e| (e, self.scores[e.index()]))
    }
}

pub fn score_candidates(
    index: &GraphIndex,
    rulebook: &RuleBook,
    source: EntityId,
    relation: RelationId,
    k: usize,
    mode: Aggregation,
) -> ScoredCandidates {
    Scorer::new(index, rulebook, k, mode).score(source, relation)
}

/// Bits of mantissa kept when scores are compared for ranking.
pub const RANK_MANTISSA_BITS: u32 = 40;

/// Ordering key of a non-negative score, rounded to `RANK_MANTISSA_BITS` of
/// mantissa. Scores that are equal up to floating-point summation noise map
/// to the same key and so rank as ties.
pub fn rank_key(score: f64) -> u64 {
    debug_assert!(score >= 0.0 && score.is_finite());
    let drop = 52 - RANK_MANTISSA_BITS;
    let bits = score.to_bits();
    (bits + (1 << (drop - 1))) >> drop
}

/// Position of a gold answer among filtered candidates: `better` candidates
/// score strictly higher and `ties` score the same.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank {
    pub better: usize,
    pub ties: usize,
}

impl Rank {
    /// Mean position under a uniformly random tie-break.
    pub fn expected(&self) -> f64 {
        self.better as f64 + 1.0 + self.ties as f64 / 2.0
    }

    pub fn reciprocal(&self) -> f64 {
        1.0 / self.expected()
    }

    /// Probability that a uniform tie-break puts the gold within the top `k`.
    pub fn hits_credit(&self, k: usize) -> f64 {
        let span = self.ties + 1;
        let inside = k.saturating_sub(self.better).min(span);
        inside as f64 / span as f64
    }
}

/// Ranks `gold` against every entity of the universe that is neither gold
/// nor filtered. Entities without a score count as score 0.
pub fn rank_with<I, F>(
    gold_score: f64,
    scored: I,
    gold: EntityId,
    is_filtered: F,
    filtered_count: usize,
    universe: usize,
) -> Rank
where
    I: IntoIterator<Item = (EntityId, f64)>,
    F: Fn(EntityId) -> bool,
{
    let gold_key = rank_key(gold_score);
    let mut better = 0;
    let mut ties = 0;
    let mut eligible_scored = 0;
    for (e, s) in scored {
        if e == gold || is_filtered(e) {
            continue;
        }
        eligible_scored += 1;
        let key = rank_key(s);
        if key > gold_key {
            better += 1;
        } else if key == gold_key {
            ties += 1;
        }
    }
    if gold_key == 0 {
        ties += universe
            .saturating_sub(1)
            .saturating_sub(eligible_scored)
            .saturating_sub(filtered_count);
    }
    Rank { better, ties }
}

pub fn rank_answer(
    scores: &ScoredCandidates,
    gold: EntityId,
    filtered_out: &[EntityId],
    universe: usize,
) -> Rank {
    let mut filtered: Vec<EntityId> = filtered_out.iter().copied().filter(|&e| e != gold).collect();
    filtered.sort_unstable();
    filtered.dedup();
    rank_with(
        scores.score(gold),
        scores.candidates.iter().map(|c| (c.entity, c.score)),
        gold,
        |e| filtered.binary_search(&e).is_ok(),
        filtered.len(),
        universe,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    /// Rank of the rule among the rules of its head.
    pub rank: usize,
    pub rule: Rule,
    pub pconf: f64,
    pub contribution: f64,
    /// One chain trajectory from the query subject to the candidate.
    pub grounding: LabeledPath,
}

/// Every top-K rule that gives `candidate` nonzero mass, largest
/// contribution first, each with one grounding path.
pub fn explain(
    index: &GraphIndex,
    rulebook: &RuleBook,
    source: EntityId,
    relation: RelationId,
    candidate: EntityId,
    k: usize,
) -> Vec<Explanation> {
    let mut out = Vec::new();
    for (rank, scored) in rulebook.top_k(relation, k).iter().enumerate() {
        let trace = propagate_trace(index, &scored.rule.body, source);
        let p = trace.last().expect("non-empty trace").get(candidate);
        if p == 0.0 {
            continue;
        }
        out.push(Explanation {
            rank,
            rule: scored.rule.clone(),
            pconf: scored.pconf,
            contribution: p * scored.pconf,
            grounding: ground(index, &scored.rule.body, &trace, candidate),
        });
    }
    out.sort_by(|a, b| b.contribution.total_cmp(&a.contribution).then(a.rank.cmp(&b.rank)));
    out
}

/// Walks back from `candidate` through the supports of `trace`, preferring
/// predecessors not already on the path.
fn ground(index: &GraphIndex, body: &[RelationId], trace: &[Distribution], candidate: EntityId) -> LabeledPath {
    let t_len = body.len();
    let mut nodes = vec![candidate; t_len + 1];
    for t in (0..t_len).rev() {
        let here = nodes[t + 1];
        let preds = index.q_lookup(here, index.inverse(body[t]));
        let mut supported = preds.iter().copied().filter(|&u| trace[t].get(u) > 0.0);
        let first = supported.next().expect("supported node has a supported predecessor");
        let fresh = std::iter::once(first)
            .chain(supported)
            .find(|u| !nodes[t + 1..].contains(u));
        nodes[t] = fresh.unwrap_or(first);
    }
    LabeledPath {
        nodes,
        edges: body.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::Fact;
    use crate::rule::RuleBook;

    fn book(head: u32, rules: &[(&[u32], f64)], relations: usize) -> RuleBook {
        RuleBook::from_rules(
            relations,
            rules.iter().map(|(body, pconf)| ScoredRule {
                rule: Rule::new(RelationId(head), body.iter().map(|&b| RelationId(b))),
                pconf: *pconf,
            }),
        )
    }

    #[test]
    fn immediate_absorption() {
        let index = GraphIndex::from_base_facts(&[Fact::new(1, 0, 2)], 3, 1);
        let d = propagate(&index, &[RelationId(0)], EntityId(0));
        assert!(d.mass().is_empty());
        assert_eq!(d.absorbed(), 1.0);
    }

    #[test]
    fn absorbed_mass_is_sticky() {
        let facts = [Fact::new(0, 0, 1), Fact::new(0, 0, 2), Fact::new(1, 1, 3)];
        let index = GraphIndex::from_base_facts(&facts, 4, 2);
        let d = propagate(&index, &[RelationId(0), RelationId(1)], EntityId(0));
        assert_eq!(d.get(EntityId(3)), 0.5);
        assert_eq!(d.absorbed(), 0.5);
        let d = d.step(&index, RelationId(0));
        assert_eq!(d.absorbed(), 1.0);
    }

    /// s=0, z1=1, z2=2, y=3, w=4. The chain r1,r2 concentrates on y.
    fn reasoning_graph() -> GraphIndex {
        let facts = [
            Fact::new(0, 1, 1),
            Fact::new(0, 1, 2),
            Fact::new(1, 2, 3),
            Fact::new(2, 2, 3),
            Fact::new(2, 2, 4),
            Fact::new(0, 0, 3),
        ];
        GraphIndex::from_base_facts(&facts, 5, 3)
    }

    #[test]
    fn answer_node_carries_most_mass() {
        let index = reasoning_graph();
        let d = propagate(&index, &[RelationId(1), RelationId(2)], EntityId(0));
        assert_eq!(d.get(EntityId(3)), 0.75);
        assert_eq!(d.get(EntityId(4)), 0.25);
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_rule_score_is_product() {
        let index = reasoning_graph();
        let rb = book(0, &[(&[1, 2], 0.5)], 6);
        for mode in [Aggregation::Sum, Aggregation::Max] {
            let sc = score_candidates(&index, &rb, EntityId(0), RelationId(0), 300, mode);
            assert_eq!(sc.score(EntityId(3)), 0.375);
            assert_eq!(sc.score(EntityId(4)), 0.125);
            assert_eq!(sc.score(EntityId(1)), 0.0);
        }
    }

    #[test]
    fn sum_and_max_aggregate_differently() {
        // Two one-step rules reaching y=1 with mass 1 each.
        let facts = [Fact::new(0, 1, 1), Fact::new(0, 2, 1)];
        let index = GraphIndex::from_base_facts(&facts, 2, 3);
        let rb = book(0, &[(&[1], 0.2), (&[2], 0.3)], 6);
        let sum = score_candidates(&index, &rb, EntityId(0), RelationId(0), 300, Aggregation::Sum);
        let max = score_candidates(&index, &rb, EntityId(0), RelationId(0), 300, Aggregation::Max);
        assert_eq!(sum.score(EntityId(1)), 0.5);
        assert_eq!(max.score(EntityId(1)), 0.3);
        assert_eq!(sum.get(EntityId(1)).unwrap().provenance.len(), 2);
        let top1 = score_candidates(&index, &rb, EntityId(0), RelationId(0), 1, Aggregation::Sum);
        assert_eq!(top1.score(EntityId(1)), 0.3);
    }

    #[test]
    fn no_rules_no_candidates() {
        let index = reasoning_graph();
        let rb = RuleBook::new(6);
        assert!(score_candidates(&index, &rb, EntityId(0), RelationId(0), 10, Aggregation::Sum).is_empty());
    }

    #[test]
    fn ranks() {
        let sc = ScoredCandidates {
            candidates: vec![
                Candidate {
                    entity: EntityId(1),
                    score: 0.9,
                    provenance: vec![(0, 0.9)],
                },
                Candidate {
                    entity: EntityId(2),
                    score: 0.4,
                    provenance: vec![(0, 0.4)],
                },
            ],
        };
        assert_eq!(rank_answer(&sc, EntityId(1), &[], 3).expected(), 1.0);
        // Gold unscored in an empty scoring over 11 entities.
        let empty = ScoredCandidates::default();
        assert_eq!(rank_answer(&empty, EntityId(0), &[], 11).expected(), 6.0);
        // Two-way tie at the top.
        let tie = ScoredCandidates {
            candidates: vec![
                Candidate {
                    entity: EntityId(0),
                    score: 0.5,
                    provenance: vec![(0, 0.5)],
                },
                Candidate {
                    entity: EntityId(1),
                    score: 0.5,
                    provenance: vec![(0, 0.5)],
                },
            ],
        };
        assert_eq!(rank_answer(&tie, EntityId(0), &[], 2).expected(), 1.5);
        // Filtering removes the better candidate.
        assert_eq!(rank_answer(&sc, EntityId(2), &[EntityId(1)], 3).expected(), 1.0);
        assert_eq!(rank_answer(&sc, EntityId(2), &[], 3).expected(), 2.0);
    }

    #[test]
    fn hits_credit_is_fractional_under_ties() {
        let r = Rank { better: 2, ties: 3 };
        assert_eq!(r.hits_credit(1), 0.0);
        assert_eq!(r.hits_credit(3), 0.25);
        assert_eq!(r.hits_credit(4), 0.5);
        assert_eq!(r.hits_credit(6), 1.0);
        assert_eq!(r.expected(), 4.5);
    }

    #[test]
    fn explanation_recovers_the_chain() {
        let index = reasoning_graph();
        let rb = book(0, &[(&[1, 2], 0.5), (&[1], 0.1)], 6);
        let ex = explain(&index, &rb, EntityId(0), RelationId(0), EntityId(3), 10);
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].rule.body.as_slice(), &[RelationId(1), RelationId(2)]);
        assert_eq!(ex[0].contribution, 0.375);
        assert_eq!(ex[0].grounding.nodes[0], EntityId(0));
        assert_eq!(ex[0].grounding.target(), EntityId(3));
        assert!(ex[0].grounding.is_grounded_in(&index));
        assert!(explain(&index, &rb, EntityId(0), RelationId(0), EntityId(0), 10).is_empty());
    }

    #[test]
    fn dense_and_sparse_scores_agree() {
        let index = reasoning_graph();
        let rb = book(0, &[(&[1, 2], 0.5), (&[1], 0.1), (&[1, 2, 5, 2], 0.05)], 6);
        for mode in [Aggregation::Sum, Aggregation::Max] {
            let scorer = Scorer::new(&index, &rb, 300, mode);
            let sparse = scorer.score(EntityId(0), RelationId(0));
            let mut dense = DenseScores::new(index.entity_count());
            scorer.score_dense(EntityId(0), RelationId(0), &mut dense);
            for c in &sparse.candidates {
                assert_eq!(dense.score(c.entity).to_bits(), c.score.to_bits());
            }
            assert_eq!(dense.iter().count(), sparse.len());
        }
    }

    #[test]
    fn summation_noise_ranks_as_tie() {
        let a = 0.1 + 0.2;
        let b = 0.3;
        assert_ne!(a, b);
        assert_eq!(rank_key(a), rank_key(b));
        assert_eq!(rank_key(1.1111111111111111e-3), rank_key(1.111111111111111e-3));
        assert!(rank_key(0.3) < rank_key(0.3 * (1.0 + 1e-9)));
        assert_eq!(rank_key(0.0), 0);
        assert!(rank_key(f64::MIN_POSITIVE) > 0);
    }

    #[test]
    fn rank_key_is_monotone() {
        let mut xs = vec![0.0, 1e-300, 1e-16, 0.25, 0.5 - 1e-17, 0.5, 0.75, 1.0, 7.3, 1e300];
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            assert!(rank_key(w[0]) <= rank_key(w[1]));
        }
    }
}
