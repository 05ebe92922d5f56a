#![allow(dead_code)]

use pathrule::{EntityId, Fact, GraphIndex, RelationId};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct RandomGraph {
    pub facts: Vec<Fact>,
    pub entities: usize,
    pub base_relations: u32,
    pub index: GraphIndex,
}

/// Random multi-relational graph with about `avg_degree` base edges per node.
/// Self-loops are never generated.
pub fn random_graph(rng: &mut impl Rng, entities: usize, base_relations: u32, avg_degree: f64) -> RandomGraph {
    let target = ((entities as f64) * avg_degree).round() as usize;
    let mut facts = Vec::with_capacity(target);
    for _ in 0..target {
        let s = rng.random_range(0..entities as u32);
        let mut o = rng.random_range(0..entities as u32);
        if entities > 1 {
            while o == s {
                o = rng.random_range(0..entities as u32);
            }
        } else {
            continue;
        }
        facts.push(Fact::new(s, rng.random_range(0..base_relations), o));
    }
    facts.sort_unstable();
    facts.dedup();
    let index = GraphIndex::from_base_facts(&facts, entities, base_relations);
    RandomGraph {
        facts,
        entities,
        base_relations,
        index,
    }
}

/// Graph with planted regularities so mined rules are informative: `r0` is
/// the composition `r1 ∘ r2` on most chains, `r3` mirrors `r1`, and `r4`
/// adds noise.
pub fn structured_graph(rng: &mut impl Rng, entities: usize) -> RandomGraph {
    let n = entities as u32;
    let mut facts = Vec::new();
    for _ in 0..entities {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        if a == b || b == c || a == c {
            continue;
        }
        facts.push(Fact::new(a, 1, b));
        facts.push(Fact::new(b, 2, c));
        if rng.random_bool(0.8) {
            facts.push(Fact::new(a, 0, c));
        }
        if rng.random_bool(0.7) {
            facts.push(Fact::new(a, 3, b));
        }
        let d = rng.random_range(0..n);
        if d != a {
            facts.push(Fact::new(a, 4, d));
        }
    }
    facts.sort_unstable();
    facts.dedup();
    let index = GraphIndex::from_base_facts(&facts, entities, 5);
    RandomGraph {
        facts,
        entities,
        base_relations: 5,
        index,
    }
}

/// Splits facts into (train, test) with roughly `test_share` in test.
pub fn split(rng: &mut impl Rng, facts: &[Fact], test_share: f64) -> (Vec<Fact>, Vec<Fact>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for &f in facts {
        if rng.random_bool(test_share) {
            test.push(f);
        } else {
            train.push(f);
        }
    }
    (train, test)
}

pub fn random_body(rng: &mut impl Rng, relation_count: u32, len: usize) -> Vec<RelationId> {
    (0..len).map(|_| RelationId(rng.random_range(0..relation_count))).collect()
}

pub fn random_entity(rng: &mut impl Rng, entities: usize) -> EntityId {
    EntityId(rng.random_range(0..entities as u32))
}

pub fn random_subset(rng: &mut impl Rng, entities: usize, size: usize) -> Vec<EntityId> {
    let all: Vec<EntityId> = (0..entities as u32).map(EntityId).collect();
    let mut pick: Vec<EntityId> = all.choose_multiple(rng, size.min(entities)).copied().collect();
    pick.sort_unstable();
    pick
}

pub fn write_facts(path: &std::path::Path, facts: &[Fact], prefix: &str) {
    use std::fmt::Write as _;
    let mut text = String::new();
    for f in facts {
        writeln!(text, "{prefix}{}\tr{}\t{prefix}{}", f.subject.0, f.relation.0, f.object.0).unwrap();
    }
    std::fs::write(path, text).unwrap();
}
