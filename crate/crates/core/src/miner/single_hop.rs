use crate::index::GraphIndex;
use crate::kg::{EntityId, Fact, RelationId};
use crate::miner::PathWeight;

/// Number of shared elements of two sorted id lists.
pub(crate) fn intersection_size(a: &[EntityId], b: &[EntityId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Length-1 rules `r_j(x, y) ⇒ r(x, y)` instantiated by `fact`, each with
/// its reachability mass `|Q(s,r) ∩ Q(s,r_j)| / |Q(s,r_j)|`.
///
/// Under the non-Markov weights every one-edge path to an answer counts as
/// weight 1.
pub fn single_hop_rules(
    index: &GraphIndex,
    fact: &Fact,
    weight: PathWeight,
) -> Vec<(RelationId, f64)> {
    let answers = index.q_lookup(fact.subject, fact.relation);
    let mut out = Vec::new();
    for (rel, objs) in index.relation_groups(fact.subject) {
        if rel == fact.relation || objs.binary_search(&fact.object).is_err() {
            continue;
        }
        let shared = intersection_size(answers, objs);
        let value = match weight {
            PathWeight::Markov => shared as f64 / objs.len() as f64,
            PathWeight::Length | PathWeight::Constant => shared as f64,
        };
        out.push((rel, value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_overlap_is_one_half() {
        // Q(s,r) = {1,2}, Q(s,rj) = {1,3}
        let facts = [
            Fact::new(0, 0, 1),
            Fact::new(0, 0, 2),
            Fact::new(0, 1, 1),
            Fact::new(0, 1, 3),
        ];
        let index = GraphIndex::from_base_facts(&facts, 4, 2);
        let rules = single_hop_rules(&index, &Fact::new(0, 0, 1), PathWeight::Markov);
        assert_eq!(rules, vec![(RelationId(1), 0.5)]);
        // Fact (0,r,2) has no r_j edge to 2: nothing instantiated.
        assert!(single_hop_rules(&index, &Fact::new(0, 0, 2), PathWeight::Markov).is_empty());
        let counted = single_hop_rules(&index, &Fact::new(0, 0, 1), PathWeight::Constant);
        assert_eq!(counted, vec![(RelationId(1), 1.0)]);
    }

    #[test]
    fn containment_gives_one() {
        let facts = [
            Fact::new(0, 0, 1),
            Fact::new(0, 0, 2),
            Fact::new(0, 0, 3),
            Fact::new(0, 1, 1),
            Fact::new(0, 1, 2),
        ];
        let index = GraphIndex::from_base_facts(&facts, 4, 2);
        let rules = single_hop_rules(&index, &Fact::new(0, 0, 2), PathWeight::Markov);
        assert_eq!(rules, vec![(RelationId(1), 1.0)]);
    }

    #[test]
    fn head_relation_is_never_its_own_body() {
        let index = GraphIndex::from_base_facts(&[Fact::new(0, 0, 1)], 2, 1);
        assert!(single_hop_rules(&index, &Fact::new(0, 0, 1), PathWeight::Markov).is_empty());
    }

    #[test]
    fn intersections() {
        let a: Vec<EntityId> = [1, 3, 5, 7].into_iter().map(EntityId).collect();
        let b: Vec<EntityId> = [2, 3, 7, 8].into_iter().map(EntityId).collect();
        assert_eq!(intersection_size(&a, &b), 2);
        assert_eq!(intersection_size(&a, &[]), 0);
    }
}
