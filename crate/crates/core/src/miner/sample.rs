use crate::index::GraphIndex;
use crate::kg::{Fact, RelationId};
use crate::limit::Limit;
use crate::seed;

/// Training facts chosen for mining, grouped by relation id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledFacts {
    per_relation: Vec<Vec<Fact>>,
}

impl SampledFacts {
    pub fn for_relation(&self, relation: RelationId) -> &[Fact] {
        self.per_relation
            .get(relation.index())
            .map_or(&[], Vec::as_slice)
    }

    /// All sampled facts in canonical order (relation id, then subject, object).
    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.per_relation.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.per_relation.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn relation_slots(&self) -> usize {
        self.per_relation.len()
    }
}

/// Draws `min(alpha, |G_r|)` facts per relation (inverses included) without
/// replacement. Each relation has its own seeded stream.
pub fn sample_facts(index: &GraphIndex, alpha: Limit, seed: u64) -> SampledFacts {
    let per_relation = (0..index.relation_count() as u32)
        .map(|r| {
            let facts = index.facts_with(RelationId(r));
            let n = facts.len();
            match alpha {
                Limit::At(k) if n > k => {
                    let mut rng = seed::relation_rng(seed, r);
                    let mut picked = rand::seq::index::sample(&mut rng, n, k).into_vec();
                    picked.sort_unstable();
                    picked.into_iter().map(|i| facts[i]).collect()
                }
                _ => facts.to_vec(),
            }
        })
        .collect();
    SampledFacts { per_relation }
}
