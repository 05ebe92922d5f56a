//! Triple loading, string interning and inverse augmentation.
//!
//! Entities and relations are interned into dense `u32` ids in first-seen
//! order. Relation ids `0..base` are the relations found in the input files;
//! after augmentation the id `r + base` denotes the inverse of `r`.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prefix used when printing inverse relations.
pub const INVERSE_PREFIX: &str = "INV_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct RelationId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Inverse relation id given the number of non-inverse relations.
    #[inline]
    pub fn inverse(self, base: u32) -> RelationId {
        if self.0 < base {
            RelationId(self.0 + base)
        } else {
            RelationId(self.0 - base)
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub subject: EntityId,
    pub relation: RelationId,
    pub object: EntityId,
}

impl Fact {
    pub fn new(subject: u32, relation: u32, object: u32) -> Self {
        Fact {
            subject: EntityId(subject),
            relation: RelationId(relation),
            object: EntityId(object),
        }
    }

    pub fn inverse(&self, base: u32) -> Fact {
        Fact {
            subject: self.object,
            relation: self.relation.inverse(base),
            object: self.subject,
        }
    }
}

/// Column layout of a triple file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ColumnOrder {
    /// `subject relation object`
    #[default]
    Sro,
    /// `subject object relation`
    Sor,
    /// `object relation subject`
    Ors,
}

impl ColumnOrder {
    fn pick(self, cols: [&str; 3]) -> (&str, &str, &str) {
        match self {
            ColumnOrder::Sro => (cols[0], cols[1], cols[2]),
            ColumnOrder::Sor => (cols[0], cols[2], cols[1]),
            ColumnOrder::Ors => (cols[2], cols[1], cols[0]),
        }
    }
}

impl FromStr for ColumnOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sro" => Ok(ColumnOrder::Sro),
            "sor" => Ok(ColumnOrder::Sor),
            "ors" => Ok(ColumnOrder::Ors),
            other => Err(Error::Config(format!("unknown column order `{other}`"))),
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Table {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Table {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }
}

/// String tables for entities and (non-inverse) relations.
#[derive(Debug, Default, Clone)]
pub struct Vocabulary {
    entities: Table,
    relations: Table,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_entity(&mut self, name: &str) -> EntityId {
        EntityId(self.entities.intern(name))
    }

    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        RelationId(self.relations.intern(name))
    }

    pub fn entity_count(&self) -> usize {
        self.entities.names.len()
    }

    /// Number of relations read from input, not counting inverses.
    pub fn base_relation_count(&self) -> u32 {
        self.relations.names.len() as u32
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entities.ids.get(name).copied().map(EntityId)
    }

    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entities.names[id.index()]
    }

    /// Resolves a relation name, accepting `INV_<name>` for inverses.
    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        if let Some(&id) = self.relations.ids.get(name) {
            return Some(RelationId(id));
        }
        let base = name.strip_prefix(INVERSE_PREFIX)?;
        let &id = self.relations.ids.get(base)?;
        Some(RelationId(id).inverse(self.base_relation_count()))
    }

    pub fn relation_name(&self, id: RelationId) -> String {
        let base = self.base_relation_count();
        if id.0 < base {
            self.relations.names[id.index()].clone()
        } else {
            format!("{INVERSE_PREFIX}{}", self.relations.names[(id.0 - base) as usize])
        }
    }
}

/// Result of [`load_triples`]: deduplicated facts plus their string tables.
#[derive(Debug, Clone)]
pub struct LoadedTriples {
    pub facts: Vec<Fact>,
    pub vocab: Vocabulary,
}

pub fn load_triples(path: impl AsRef<Path>, order: ColumnOrder) -> Result<LoadedTriples> {
    let mut vocab = Vocabulary::new();
    let facts = load_triples_into(path, order, &mut vocab)?;
    Ok(LoadedTriples { facts, vocab })
}

/// Loads a triple file, interning into an existing vocabulary so that several
/// splits share one id space.
pub fn load_triples_into(
    path: impl AsRef<Path>,
    order: ColumnOrder,
    vocab: &mut Vocabulary,
) -> Result<Vec<Fact>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut seen = FxHashSet::default();
    let mut facts = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Malformed {
                path: path.to_owned(),
                line: lineno + 1,
                reason: "invalid UTF-8".into(),
            },
            _ => Error::io(path, e),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let cols: [&str; 3] = cols.try_into().map_err(|cols: Vec<&str>| Error::Malformed {
            path: path.to_owned(),
            line: lineno + 1,
            reason: format!("expected 3 tab-separated fields, found {}", cols.len()),
        })?;
        if cols.iter().any(|c| c.is_empty()) {
            return Err(Error::Malformed {
                path: path.to_owned(),
                line: lineno + 1,
                reason: "empty field".into(),
            });
        }
        let (s, r, o) = order.pick(cols);
        let fact = Fact {
            subject: vocab.intern_entity(s),
            relation: vocab.intern_relation(r),
            object: vocab.intern_entity(o),
        };
        if seen.insert(fact) {
            facts.push(fact);
        }
    }
    if facts.is_empty() {
        return Err(Error::EmptyFile(path.to_owned()));
    }
    Ok(facts)
}

/// Writes facts back out as `subject<TAB>relation<TAB>object` lines.
pub fn write_triples<W: Write>(mut out: W, facts: &[Fact], vocab: &Vocabulary) -> std::io::Result<()> {
    for f in facts {
        writeln!(
            out,
            "{}\t{}\t{}",
            vocab.entity_name(f.subject),
            vocab.relation_name(f.relation),
            vocab.entity_name(f.object)
        )?;
    }
    Ok(())
}

/// Appends `(o, inv(r), s)` for every input fact. `base` is the number of
/// non-inverse relations, so the relation id space doubles.
pub fn augment_inverse(facts: &[Fact], base: u32) -> Vec<Fact> {
    let mut out = Vec::with_capacity(facts.len() * 2);
    out.extend_from_slice(facts);
    out.extend(facts.iter().map(|f| f.inverse(base)));
    out
}

/// Train/valid/test splits interned into one vocabulary.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub vocab: Vocabulary,
    pub train: Vec<Fact>,
    pub valid: Vec<Fact>,
    pub test: Vec<Fact>,
}

impl Dataset {
    /// Loads train first so train ids are stable whether or not the
    /// evaluation splits are present.
    pub fn load(
        train: impl AsRef<Path>,
        valid: Option<&Path>,
        test: Option<&Path>,
        order: ColumnOrder,
    ) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        let train = load_triples_into(train, order, &mut vocab)?;
        let valid = match valid {
            Some(p) => load_triples_into(p, order, &mut vocab)?,
            None => Vec::new(),
        };
        let test = match test {
            Some(p) => load_triples_into(p, order, &mut vocab)?,
            None => Vec::new(),
        };
        Ok(Dataset {
            vocab,
            train,
            valid,
            test,
        })
    }

    pub fn base_relation_count(&self) -> u32 {
        self.vocab.base_relation_count()
    }

    pub fn train_index(&self) -> crate::index::GraphIndex {
        crate::index::GraphIndex::from_base_facts(
            &self.train,
            self.vocab.entity_count(),
            self.base_relation_count(),
        )
    }

    /// Index over every known fact of every split, used for filtering.
    pub fn known_index(&self) -> crate::index::GraphIndex {
        let mut all = Vec::with_capacity(self.train.len() + self.valid.len() + self.test.len());
        all.extend_from_slice(&self.train);
        all.extend_from_slice(&self.valid);
        all.extend_from_slice(&self.test);
        crate::index::GraphIndex::from_base_facts(
            &all,
            self.vocab.entity_count(),
            self.base_relation_count(),
        )
    }
}
