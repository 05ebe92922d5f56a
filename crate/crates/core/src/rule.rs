//! Rules, labeled paths and the rule book with its TSV format.

use std::fmt;
use std::io::{BufRead, Write};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::index::GraphIndex;
use crate::kg::{EntityId, RelationId, Vocabulary};

/// Ordered body relations. Inline up to the longest rule length in common use.
pub type Body = SmallVec<[RelationId; 6]>;

/// A closed, connected chain rule
/// `body[0](x, z1) ∧ … ∧ body[T-1](z_{T-1}, y) ⇒ head(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: RelationId,
    pub body: Body,
}

impl Rule {
    pub fn new(head: RelationId, body: impl IntoIterator<Item = RelationId>) -> Self {
        Rule {
            head,
            body: body.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, vocab }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    vocab: &'a Vocabulary,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.rule.body.len();
        for (i, rel) in self.rule.body.iter().enumerate() {
            let from = if i == 0 { "x".to_string() } else { format!("z{i}") };
            let to = if i + 1 == t { "y".to_string() } else { format!("z{}", i + 1) };
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{}({from}, {to})", self.vocab.relation_name(*rel))?;
        }
        write!(f, " ⇒ {}(x, y)", self.vocab.relation_name(self.rule.head))
    }
}

/// Entity sequence `nodes[0] -edges[0]-> nodes[1] -> … -> nodes[T]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledPath {
    pub nodes: Vec<EntityId>,
    pub edges: Vec<RelationId>,
}

impl LabeledPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> EntityId {
        self.nodes[0]
    }

    pub fn target(&self) -> EntityId {
        *self.nodes.last().expect("path has at least one node")
    }

    pub fn is_simple(&self) -> bool {
        let mut seen: Vec<EntityId> = self.nodes.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Every hop is an indexed fact.
    pub fn is_grounded_in(&self, index: &GraphIndex) -> bool {
        self.nodes.len() == self.edges.len() + 1
            && self.edges.iter().enumerate().all(|(t, &r)| {
                index
                    .q_lookup(self.nodes[t], r)
                    .binary_search(&self.nodes[t + 1])
                    .is_ok()
            })
    }

    pub fn to_rule(&self, head: RelationId) -> Rule {
        Rule::new(head, self.edges.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRule {
    pub rule: Rule,
    pub pconf: f64,
}

/// Canonical rule order: confidence descending, then shorter bodies, then
/// lexicographic body ids.
pub fn rule_order(a: &ScoredRule, b: &ScoredRule) -> std::cmp::Ordering {
    b.pconf
        .total_cmp(&a.pconf)
        .then_with(|| a.rule.body.len().cmp(&b.rule.body.len()))
        .then_with(|| a.rule.body.cmp(&b.rule.body))
}

/// Rules grouped by head relation, each group in ranked order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleBook {
    by_head: Vec<Vec<ScoredRule>>,
}

impl RuleBook {
    pub fn new(relation_count: usize) -> Self {
        RuleBook {
            by_head: vec![Vec::new(); relation_count],
        }
    }

    /// Builds a rule book from unsorted rules, applying the canonical order.
    pub fn from_rules(relation_count: usize, rules: impl IntoIterator<Item = ScoredRule>) -> Self {
        let mut book = RuleBook::new(relation_count);
        for r in rules {
            book.push_unsorted(r);
        }
        for group in &mut book.by_head {
            group.sort_by(rule_order);
        }
        book
    }

    fn push_unsorted(&mut self, rule: ScoredRule) {
        let h = rule.rule.head.index();
        if h >= self.by_head.len() {
            self.by_head.resize(h + 1, Vec::new());
        }
        self.by_head[h].push(rule);
    }

    pub fn rules_for(&self, head: RelationId) -> &[ScoredRule] {
        self.by_head.get(head.index()).map_or(&[], Vec::as_slice)
    }

    pub fn top_k(&self, head: RelationId, k: usize) -> &[ScoredRule] {
        let rules = self.rules_for(head);
        &rules[..k.min(rules.len())]
    }

    pub fn len(&self) -> usize {
        self.by_head.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn relation_slots(&self) -> usize {
        self.by_head.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScoredRule> {
        self.by_head.iter().flatten()
    }

    /// Multiplies every confidence by `factor`, keeping the order.
    pub fn scaled(&self, factor: f64) -> RuleBook {
        RuleBook {
            by_head: self
                .by_head
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|r| ScoredRule {
                            rule: r.rule.clone(),
                            pconf: r.pconf * factor,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// One rule per line: `pconf<TAB>head<TAB>body1,body2,…`.
    pub fn write_tsv<W: Write>(&self, mut out: W, vocab: &Vocabulary) -> std::io::Result<()> {
        for r in self.iter() {
            let body: Vec<String> = r.rule.body.iter().map(|&b| vocab.relation_name(b)).collect();
            writeln!(
                out,
                "{}\t{}\t{}",
                format_significant(r.pconf, 12),
                vocab.relation_name(r.rule.head),
                body.join(",")
            )?;
        }
        Ok(())
    }

    /// Parses the TSV produced by [`RuleBook::write_tsv`]. Rules keep their
    /// file order within each head so export after import is byte-identical.
    pub fn read_tsv<R: BufRead>(input: R, vocab: &Vocabulary) -> Result<RuleBook> {
        let mut book = RuleBook::new(2 * vocab.base_relation_count() as usize);
        let mut unknown: Vec<String> = Vec::new();
        let note_unknown = |name: &str, unknown: &mut Vec<String>| {
            if !unknown.iter().any(|u| u == name) {
                unknown.push(name.to_owned());
            }
        };
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<rules>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: &str| Error::Malformed {
                path: "<rules>".into(),
                line: lineno + 1,
                reason: reason.to_owned(),
            };
            let mut cols = line.split('\t');
            let (Some(conf), Some(head), Some(body), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(malformed("expected pconf, head and body columns"));
            };
            let pconf: f64 = conf
                .parse()
                .map_err(|_| malformed("confidence is not a number"))?;
            if !pconf.is_finite() || pconf < 0.0 {
                return Err(malformed("confidence must be finite and non-negative"));
            }
            if body.is_empty() {
                return Err(malformed("empty rule body"));
            }
            let head_id = vocab.relation_id(head);
            if head_id.is_none() {
                note_unknown(head, &mut unknown);
            }
            let mut body_ids = Body::new();
            for name in body.split(',') {
                match vocab.relation_id(name) {
                    Some(id) => body_ids.push(id),
                    None => note_unknown(name, &mut unknown),
                }
            }
            if let Some(head) = head_id {
                if unknown.is_empty() {
                    book.push_unsorted(ScoredRule {
                        rule: Rule { head, body: body_ids },
                        pconf,
                    });
                }
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownRelations(unknown));
        }
        Ok(book)
    }
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.intern_relation("r");
        v.intern_relation("r1");
        v.intern_relation("r2");
        v
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_significant(1.0e-7 / 3.0, 12), "3.33333333333e-08");
        assert_eq!(format_significant(0.0001234, 12), "0.0001234");
        assert_eq!(format_significant(123.25, 12), "123.25");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn tsv_round_trip() {
        let v = vocab();
        let book = RuleBook::from_rules(
            6,
            [
                ScoredRule {
                    rule: Rule::new(RelationId(0), [RelationId(1), RelationId(2)]),
                    pconf: 0.25,
                },
                ScoredRule {
                    rule: Rule::new(RelationId(0), [RelationId(4)]),
                    pconf: 2.0 / 3.0,
                },
                ScoredRule {
                    rule: Rule::new(RelationId(3), [RelationId(2), RelationId(5)]),
                    pconf: 0.1,
                },
            ],
        );
        let mut first = Vec::new();
        book.write_tsv(&mut first, &v).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert_eq!(
            text,
            "0.666666666667\tr\tINV_r1\n0.25\tr\tr1,r2\n0.1\tINV_r\tr2,INV_r2\n"
        );
        let back = RuleBook::read_tsv(first.as_slice(), &v).unwrap();
        let mut second = Vec::new();
        back.write_tsv(&mut second, &v).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn unknown_relations_are_listed() {
        let v = vocab();
        let err = RuleBook::read_tsv("0.5\tr\tfoo,r1\n0.2\tbar\tfoo\n".as_bytes(), &v).unwrap_err();
        match err {
            Error::UnknownRelations(names) => assert_eq!(names, vec!["foo", "bar"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rule_line() {
        let v = vocab();
        assert!(matches!(
            RuleBook::read_tsv("abc\tr\tr1\n".as_bytes(), &v),
            Err(Error::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            RuleBook::read_tsv("0.5\tr\n".as_bytes(), &v),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn ordering_breaks_ties_by_length_then_body() {
        let mk = |body: &[u32], pconf| ScoredRule {
            rule: Rule::new(RelationId(0), body.iter().map(|&b| RelationId(b))),
            pconf,
        };
        let book = RuleBook::from_rules(4, [mk(&[2, 1], 0.5), mk(&[3], 0.5), mk(&[1, 1], 0.5), mk(&[2], 0.9)]);
        let bodies: Vec<Vec<u32>> = book
            .rules_for(RelationId(0))
            .iter()
            .map(|r| r.rule.body.iter().map(|b| b.0).collect())
            .collect();
        assert_eq!(bodies, vec![vec![2], vec![3], vec![1, 1], vec![2, 1]]);
        assert_eq!(book.top_k(RelationId(0), 2).len(), 2);
        assert_eq!(book.top_k(RelationId(0), 300).len(), 4);
        assert!(book.top_k(RelationId(3), 5).is_empty());
    }

    #[test]
    fn display_uses_chain_variables() {
        let v = vocab();
        let rule = Rule::new(RelationId(0), [RelationId(1), RelationId(2)]);
        assert_eq!(rule.display(&v).to_string(), "r1(x, z1) ∧ r2(z1, y) ⇒ r(x, y)");
    }
}
