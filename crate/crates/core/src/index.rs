//! Immutable adjacency index over an inverse-augmented fact set.

use rustc_hash::FxHashMap;

use crate::kg::{augment_inverse, EntityId, Fact, RelationId};

/// Compressed adjacency: every entity owns a contiguous run of edges sorted
/// by `(relation, object)`, and a hash map jumps straight to the
/// `(subject, relation)` sub-run.
#[derive(Debug, Clone)]
pub struct GraphIndex {
    entity_count: usize,
    base_relations: u32,
    node_offsets: Vec<u32>,
    edge_relation: Vec<RelationId>,
    edge_object: Vec<EntityId>,
    runs: FxHashMap<(u32, u32), (u32, u32)>,
    by_relation: Vec<Vec<Fact>>,
}

impl GraphIndex {
    /// Augments `facts` with inverses and indexes the result.
    pub fn from_base_facts(facts: &[Fact], entity_count: usize, base_relations: u32) -> Self {
        Self::build(&augment_inverse(facts, base_relations), entity_count, base_relations)
    }

    /// Indexes facts that already include their inverses. Duplicates are
    /// dropped.
    pub fn build(facts: &[Fact], entity_count: usize, base_relations: u32) -> Self {
        let relation_count = 2 * base_relations as usize;
        let mut sorted: Vec<Fact> = facts.to_vec();
        sorted.sort_unstable();
        sorted.dedup();

        let mut node_offsets = vec![0u32; entity_count + 1];
        for f in &sorted {
            node_offsets[f.subject.index() + 1] += 1;
        }
        for i in 0..entity_count {
            node_offsets[i + 1] += node_offsets[i];
        }

        let edge_relation: Vec<RelationId> = sorted.iter().map(|f| f.relation).collect();
        let edge_object: Vec<EntityId> = sorted.iter().map(|f| f.object).collect();

        let mut runs = FxHashMap::default();
        let mut by_relation = vec![Vec::new(); relation_count];
        let mut start = 0usize;
        while start < sorted.len() {
            let key = (sorted[start].subject, sorted[start].relation);
            let mut end = start + 1;
            while end < sorted.len() && (sorted[end].subject, sorted[end].relation) == key {
                end += 1;
            }
            runs.insert((key.0 .0, key.1 .0), (start as u32, (end - start) as u32));
            start = end;
        }
        for f in &sorted {
            by_relation[f.relation.index()].push(*f);
        }

        GraphIndex {
            entity_count,
            base_relations,
            node_offsets,
            edge_relation,
            edge_object,
            runs,
            by_relation,
        }
    }

    /// Objects reachable from `subject` via `relation`, sorted by id.
    #[inline]
    pub fn q_lookup(&self, subject: EntityId, relation: RelationId) -> &[EntityId] {
        match self.runs.get(&(subject.0, relation.0)) {
            Some(&(start, len)) => &self.edge_object[start as usize..(start + len) as usize],
            None => &[],
        }
    }

    #[inline]
    pub fn fanout(&self, subject: EntityId, relation: RelationId) -> usize {
        self.runs
            .get(&(subject.0, relation.0))
            .map_or(0, |&(_, len)| len as usize)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.q_lookup(fact.subject, fact.relation)
            .binary_search(&fact.object)
            .is_ok()
    }

    /// All out-edges of `node` as parallel `(relations, objects)` slices,
    /// sorted by `(relation, object)`.
    #[inline]
    pub fn edges(&self, node: EntityId) -> (&[RelationId], &[EntityId]) {
        if node.index() >= self.entity_count {
            return (&[], &[]);
        }
        let lo = self.node_offsets[node.index()] as usize;
        let hi = self.node_offsets[node.index() + 1] as usize;
        (&self.edge_relation[lo..hi], &self.edge_object[lo..hi])
    }

    pub fn degree(&self, node: EntityId) -> usize {
        self.edges(node).0.len()
    }

    /// Out-edges of `node` grouped by relation.
    pub fn relation_groups(&self, node: EntityId) -> RelationGroups<'_> {
        let (rels, objs) = self.edges(node);
        RelationGroups { rels, objs, pos: 0 }
    }

    /// Facts with the given relation, sorted by `(subject, object)`.
    pub fn facts_with(&self, relation: RelationId) -> &[Fact] {
        &self.by_relation[relation.index()]
    }

    pub fn inverse(&self, relation: RelationId) -> RelationId {
        relation.inverse(self.base_relations)
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    /// Relation ids in use, inverses included.
    pub fn relation_count(&self) -> usize {
        2 * self.base_relations as usize
    }

    pub fn base_relation_count(&self) -> u32 {
        self.base_relations
    }

    /// Number of indexed facts, inverses included.
    pub fn fact_count(&self) -> usize {
        self.edge_object.len()
    }

    pub fn facts(&self) -> impl Iterator<Item = Fact> + '_ {
        self.by_relation.iter().flatten().copied()
    }
}

pub struct RelationGroups<'a> {
    rels: &'a [RelationId],
    objs: &'a [EntityId],
    pos: usize,
}

impl<'a> Iterator for RelationGroups<'a> {
    type Item = (RelationId, &'a [EntityId]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.rels.len() {
            return None;
        }
        let rel = self.rels[self.pos];
        let start = self.pos;
        while self.pos < self.rels.len() && self.rels[self.pos] == rel {
            self.pos += 1;
        }
        Some((rel, &self.objs[start..self.pos]))
    }
}
