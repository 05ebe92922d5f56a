use crate::error::{Error, Result};
use crate::index::GraphIndex;
use crate::rule::LabeledPath;

/// Product of uniform transition probabilities `1 / |Q(s_t, r_t)|` along the
/// path.
pub fn path_probability(path: &LabeledPath, index: &GraphIndex) -> Result<f64> {
    let mut p = 1.0;
    for (t, &rel) in path.edges.iter().enumerate() {
        let node = path.nodes[t];
        let k = index.fanout(node, rel);
        if k == 0 {
            return Err(Error::Inconsistent {
                subject: node.0,
                relation: rel.0,
            });
        }
        p *= 1.0 / k as f64;
    }
    Ok(p)
}

/// Transition probability of one chain step. Stepping from a node without
/// `relation` successors leads to the absorbing state, represented as `None`.
pub fn transition_probability(
    index: &GraphIndex,
    from: crate::kg::EntityId,
    relation: crate::kg::RelationId,
    to: Option<crate::kg::EntityId>,
) -> f64 {
    let succ = index.q_lookup(from, relation);
    match to {
        None if succ.is_empty() => 1.0,
        None => 0.0,
        Some(o) if succ.binary_search(&o).is_ok() => 1.0 / succ.len() as f64,
        Some(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{EntityId, Fact, RelationId};

    fn path(nodes: &[u32], edges: &[u32]) -> LabeledPath {
        LabeledPath {
            nodes: nodes.iter().map(|&n| EntityId(n)).collect(),
            edges: edges.iter().map(|&r| RelationId(r)).collect(),
        }
    }

    #[test]
    fn deterministic_chain_has_probability_one() {
        let index = GraphIndex::from_base_facts(&[Fact::new(0, 0, 1), Fact::new(1, 1, 2)], 3, 2);
        assert_eq!(path_probability(&path(&[0, 1, 2], &[0, 1]), &index).unwrap(), 1.0);
    }

    #[test]
    fn fanouts_two_and_three_give_one_sixth() {
        let facts = [
            Fact::new(0, 0, 1),
            Fact::new(0, 0, 2),
            Fact::new(1, 1, 3),
            Fact::new(1, 1, 4),
            Fact::new(1, 1, 5),
        ];
        let index = GraphIndex::from_base_facts(&facts, 6, 2);
        let p = path_probability(&path(&[0, 1, 4], &[0, 1]), &index).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn missing_edge_is_inconsistent() {
        let index = GraphIndex::from_base_facts(&[Fact::new(0, 0, 1)], 3, 2);
        assert!(matches!(
            path_probability(&path(&[0, 1, 2], &[0, 1]), &index),
            Err(Error::Inconsistent { subject: 1, relation: 1 })
        ));
    }

    #[test]
    fn transitions_are_stochastic() {
        let facts = [Fact::new(0, 0, 1), Fact::new(0, 0, 2), Fact::new(2, 0, 0)];
        let index = GraphIndex::from_base_facts(&facts, 3, 1);
        for s in 0..3 {
            for r in 0..2 {
                let (s, r) = (EntityId(s), RelationId(r));
                let total: f64 = (0..3)
                    .map(|o| transition_probability(&index, s, r, Some(EntityId(o))))
                    .sum::<f64>()
                    + transition_probability(&index, s, r, None);
                assert!((total - 1.0).abs() < 1e-15);
            }
        }
    }
}
