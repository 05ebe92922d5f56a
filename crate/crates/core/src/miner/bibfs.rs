//! Simple-path enumeration by meeting two breadth-first half-path trees.
//!
//! The forward tree holds every simple half-path of up to `⌈L/2⌉` edges
//! starting at the source. The backward tree holds every simple half-path of
//! up to `⌊L/2⌋` edges ending at a target, grown over inverse edges. A path
//! of length `l` is emitted exactly once, as the join of a forward half of
//! length `⌈l/2⌉` and a backward half of length `⌊l/2⌋` that share only their
//! meeting node.

use std::ops::Range;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::index::GraphIndex;
use crate::kg::{EntityId, Fact, RelationId};
use crate::limit::Limit;
use crate::rule::LabeledPath;

/// A discovered path, borrowed from the search scratch space.
#[derive(Debug, Clone, Copy)]
pub struct PathRef<'a> {
    pub nodes: &'a [EntityId],
    pub edges: &'a [RelationId],
    /// Product of `1 / fanout` over the path edges.
    pub probability: f64,
}

impl PathRef<'_> {
    pub fn to_owned_path(&self) -> LabeledPath {
        LabeledPath {
            nodes: self.nodes.to_vec(),
            edges: self.edges.to_vec(),
        }
    }
}

#[derive(Debug, Default)]
struct HalfTree {
    entity: Vec<EntityId>,
    /// Relation of the edge to the parent, oriented source-to-target.
    via: Vec<RelationId>,
    parent: Vec<u32>,
    prob: Vec<f64>,
    layers: Vec<Range<usize>>,
}

impl HalfTree {
    fn reset(&mut self) {
        self.entity.clear();
        self.via.clear();
        self.parent.clear();
        self.prob.clear();
        self.layers.clear();
    }

    fn push(&mut self, entity: EntityId, via: RelationId, parent: u32, prob: f64) {
        self.entity.push(entity);
        self.via.push(via);
        self.parent.push(parent);
        self.prob.push(prob);
    }

    fn on_path(&self, mut node: usize, entity: EntityId) -> bool {
        loop {
            if self.entity[node] == entity {
                return true;
            }
            let p = self.parent[node];
            if p == u32::MAX {
                return false;
            }
            node = p as usize;
        }
    }
}

/// Reusable search state. One per worker thread.
#[derive(Debug, Default)]
pub struct BiBfs {
    forward: HalfTree,
    backward: HalfTree,
    candidates: Vec<(RelationId, EntityId, f64)>,
    meet_index: Vec<(EntityId, u32)>,
    nodes: Vec<EntityId>,
    edges: Vec<RelationId>,
}

impl BiBfs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Calls `visit` for every simple path from `source` to a member of
    /// `targets` with `2 ..= max_len` edges that avoids `excluded` and
    /// survives the `beta` expansion cap.
    #[allow(clippy::too_many_arguments)]
    pub fn for_each_path<R: Rng, F: FnMut(PathRef<'_>)>(
        &mut self,
        index: &GraphIndex,
        source: EntityId,
        targets: &[EntityId],
        max_len: usize,
        beta: Limit,
        excluded: &[Fact],
        rng: &mut R,
        mut visit: F,
    ) {
        if max_len < 2 || source.index() >= index.entity_count() {
            return;
        }
        let fwd_depth = max_len.div_ceil(2);
        let bwd_depth = max_len / 2;

        self.forward.reset();
        self.forward
            .push(source, RelationId(u32::MAX), u32::MAX, 1.0);
        self.forward.layers.push(0..1);

        self.backward.reset();
        let mut roots: Vec<EntityId> = targets
            .iter()
            .copied()
            .filter(|&t| t != source && t.index() < index.entity_count())
            .collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.is_empty() {
            return;
        }
        for &t in &roots {
            self.backward.push(t, RelationId(u32::MAX), u32::MAX, 1.0);
        }
        self.backward.layers.push(0..roots.len());

        grow(
            &mut self.forward,
            &mut self.candidates,
            index,
            fwd_depth,
            Direction::Forward,
            source,
            beta,
            excluded,
            rng,
        );
        grow(
            &mut self.backward,
            &mut self.candidates,
            index,
            bwd_depth,
            Direction::Backward,
            source,
            beta,
            excluded,
            rng,
        );

        let mut meet_depth = usize::MAX;
        for len in 2..=max_len {
            let a = len.div_ceil(2);
            let b = len - a;
            if a >= self.forward.layers.len() || b >= self.backward.layers.len() {
                continue;
            }
            if meet_depth != a {
                self.meet_index.clear();
                let layer = self.forward.layers[a].clone();
                self.meet_index
                    .extend(layer.map(|n| (self.forward.entity[n], n as u32)));
                self.meet_index.sort_unstable();
                meet_depth = a;
            }
            for bnode in self.backward.layers[b].clone() {
                let meet = self.backward.entity[bnode];
                let lo = self.meet_index.partition_point(|&(e, _)| e < meet);
                let hi = self.meet_index.partition_point(|&(e, _)| e <= meet);
                if lo == hi {
                    continue;
                }
                let bprob = self.backward.prob[bnode];
                for k in lo..hi {
                    let fnode = self.meet_index[k].1 as usize;
                    if !self.assemble(fnode, a, bnode, b) {
                        continue;
                    }
                    visit(PathRef {
                        nodes: &self.nodes,
                        edges: &self.edges,
                        probability: self.forward.prob[fnode] * bprob,
                    });
                }
            }
        }
    }

    /// Writes the joined path into `self.nodes`/`self.edges`; false if the
    /// halves share any node besides the meeting point.
    fn assemble(&mut self, fnode: usize, a: usize, bnode: usize, b: usize) -> bool {
        self.nodes.clear();
        self.edges.clear();
        self.nodes.resize(a + 1, EntityId(0));
        self.edges.resize(a, RelationId(0));
        let mut n = fnode;
        for t in (0..=a).rev() {
            self.nodes[t] = self.forward.entity[n];
            if t > 0 {
                self.edges[t - 1] = self.forward.via[n];
                n = self.forward.parent[n] as usize;
            }
        }
        let mut n = bnode;
        for _ in 0..b {
            let rel = self.backward.via[n];
            n = self.backward.parent[n] as usize;
            let e = self.backward.entity[n];
            if self.nodes[..a].contains(&e) {
                return false;
            }
            self.edges.push(rel);
            self.nodes.push(e);
        }
        true
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Backward,
}

#[allow(clippy::too_many_arguments)]
fn grow<R: Rng>(
    tree: &mut HalfTree,
    candidates: &mut Vec<(RelationId, EntityId, f64)>,
    index: &GraphIndex,
    depth: usize,
    dir: Direction,
    source: EntityId,
    beta: Limit,
    excluded: &[Fact],
    rng: &mut R,
) {
    for d in 0..depth {
        let layer = tree.layers[d].clone();
        let next_start = tree.entity.len();
        for node in layer {
            let here = tree.entity[node];
            candidates.clear();
            for (rel, nbrs) in index.relation_groups(here) {
                let fwd_rel = match dir {
                    Direction::Forward => rel,
                    Direction::Backward => index.inverse(rel),
                };
                for &nbr in nbrs {
                    let edge = match dir {
                        Direction::Forward => Fact {
                            subject: here,
                            relation: fwd_rel,
                            object: nbr,
                        },
                        Direction::Backward => Fact {
                            subject: nbr,
                            relation: fwd_rel,
                            object: here,
                        },
                    };
                    if dir == Direction::Backward && nbr == source {
                        continue;
                    }
                    if excluded.contains(&edge) || tree.on_path(node, nbr) {
                        continue;
                    }
                    let fanout = match dir {
                        Direction::Forward => nbrs.len(),
                        Direction::Backward => index.fanout(nbr, fwd_rel),
                    };
                    candidates.push((fwd_rel, nbr, 1.0 / fanout as f64));
                }
            }
            let parent_prob = tree.prob[node];
            if let Limit::At(cap) = beta {
                if candidates.len() > cap {
                    let mut keep = rand::seq::index::sample(rng, candidates.len(), cap).into_vec();
                    keep.sort_unstable();
                    for i in keep {
                        let (rel, nbr, p) = candidates[i];
                        tree.push(nbr, rel, node as u32, parent_prob * p);
                    }
                    continue;
                }
            }
            for &(rel, nbr, p) in candidates.iter() {
                tree.push(nbr, rel, node as u32, parent_prob * p);
            }
        }
        let next_end = tree.entity.len();
        if next_start == next_end {
            break;
        }
        tree.layers.push(next_start..next_end);
    }
}

/// Collects every path found by [`BiBfs::for_each_path`] with a fresh
/// search state seeded from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn bibfs_paths(
    index: &GraphIndex,
    source: EntityId,
    targets: &[EntityId],
    max_len: usize,
    beta: Limit,
    excluded: &[Fact],
    seed: u64,
) -> Vec<LabeledPath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    BiBfs::new().for_each_path(index, source, targets, max_len, beta, excluded, &mut rng, |p| {
        out.push(p.to_owned_path())
    });
    out
}
