//! Exhaustive reference computations for small graphs.
//!
//! These enumerate paths by plain depth-first search and share no code with
//! the bidirectional search or the accumulators they are used to check.

use crate::error::{Error, Result};
use crate::index::GraphIndex;
use crate::kg::{EntityId, Fact};
use crate::rule::{LabeledPath, Rule};

/// Largest graph the oracles accept.
pub const ORACLE_ENTITY_LIMIT: usize = 200;

fn guard(index: &GraphIndex) -> Result<()> {
    if index.entity_count() > ORACLE_ENTITY_LIMIT {
        return Err(Error::OracleGuard {
            entities: index.entity_count(),
            limit: ORACLE_ENTITY_LIMIT,
        });
    }
    Ok(())
}

/// Every simple path from `source` to a member of `targets` with
/// `min_len ..= max_len` edges, never crossing an edge in `excluded`.
pub fn dfs_simple_paths(
    index: &GraphIndex,
    source: EntityId,
    targets: &[EntityId],
    min_len: usize,
    max_len: usize,
    excluded: &[Fact],
) -> Result<Vec<LabeledPath>> {
    guard(index)?;
    let mut out = Vec::new();
    let mut path = LabeledPath {
        nodes: vec![source],
        edges: Vec::new(),
    };
    dfs(index, &mut path, targets, min_len, max_len, excluded, &mut out);
    Ok(out)
}

fn dfs(
    index: &GraphIndex,
    path: &mut LabeledPath,
    targets: &[EntityId],
    min_len: usize,
    max_len: usize,
    excluded: &[Fact],
    out: &mut Vec<LabeledPath>,
) {
    let here = path.target();
    if path.len() >= min_len && targets.contains(&here) {
        out.push(path.clone());
    }
    if path.len() == max_len {
        return;
    }
    let (rels, objs) = index.edges(here);
    for (&rel, &next) in rels.iter().zip(objs) {
        let edge = Fact {
            subject: here,
            relation: rel,
            object: next,
        };
        if path.nodes.contains(&next) || excluded.contains(&edge) {
            continue;
        }
        path.nodes.push(next);
        path.edges.push(rel);
        dfs(index, path, targets, min_len, max_len, excluded, out);
        path.nodes.pop();
        path.edges.pop();
    }
}

/// Reachability mass of `rule` from `source`: the summed probability of all
/// simple paths that follow the body exactly and end in
/// `Q(source, head)`. Path probabilities are recomputed here from raw
/// fanouts.
pub fn brute_force_prm(
    index: &GraphIndex,
    rule: &Rule,
    source: EntityId,
    excluded: &[Fact],
) -> Result<f64> {
    guard(index)?;
    let answers = index.q_lookup(source, rule.head);
    if answers.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut nodes = vec![source];
    body_dfs(index, rule, answers, excluded, &mut nodes, 1.0, &mut total);
    Ok(total)
}

fn body_dfs(
    index: &GraphIndex,
    rule: &Rule,
    answers: &[EntityId],
    excluded: &[Fact],
    nodes: &mut Vec<EntityId>,
    prob: f64,
    total: &mut f64,
) {
    let step = nodes.len() - 1;
    let here = nodes[step];
    if step == rule.body.len() {
        if answers.contains(&here) {
            *total += prob;
        }
        return;
    }
    let rel = rule.body[step];
    let next = index.q_lookup(here, rel);
    let p = prob / next.len() as f64;
    for &n in next {
        let edge = Fact {
            subject: here,
            relation: rel,
            object: n,
        };
        if nodes.contains(&n) || excluded.contains(&edge) {
            continue;
        }
        nodes.push(n);
        body_dfs(index, rule, answers, excluded, nodes, p, total);
        nodes.pop();
    }
}
