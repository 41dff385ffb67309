use super::seq::CanonicalSeq;
use super::table::{MappingEntry, MappingTable, TableError};
use std::collections::HashSet;

#[derive(Debug, Clone, Default)]
struct Node {
    /// Indexed by a digit's position in canonical order.
    children: [Option<u32>; 6],
    entries: Vec<u32>,
}

/// Prefix tree over canonical digit sequences. Digits of upper keypad rows
/// sit above those of lower rows, and every mapped sequence ends at a node
/// holding its entries.
#[derive(Debug, Clone)]
pub struct DecodeTrie {
    nodes: Vec<Node>,
    entries: Vec<MappingEntry>,
}

impl DecodeTrie {
    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn find_node(&self, seq: CanonicalSeq) -> Option<&Node> {
        let mut node = &self.nodes[0];
        for pos in seq.positions() {
            node = &self.nodes[node.children[pos]? as usize];
        }
        Some(node)
    }

    /// Every entry stored at `seq`; empty when the cell is unmapped.
    pub fn lookup(&self, seq: CanonicalSeq) -> Vec<&MappingEntry> {
        self.find_node(seq)
            .map(|n| n.entries.iter().map(|&i| &self.entries[i as usize]).collect())
            .unwrap_or_default()
    }

    /// True when some mapped sequence extends `seq`.
    pub fn is_prefix(&self, seq: CanonicalSeq) -> bool {
        self.find_node(seq).is_some()
    }
}

pub fn build_trie(table: &MappingTable) -> Result<DecodeTrie, TableError> {
    let mut trie = DecodeTrie {
        nodes: vec![Node::default()],
        entries: Vec::with_capacity(table.entries.len()),
    };
    let mut seen = HashSet::new();
    for entry in &table.entries {
        if !seen.insert((entry.seq, entry.class)) {
            return Err(TableError::Duplicate { seq: entry.seq, class: entry.class });
        }
        let mut cur = 0usize;
        for pos in entry.seq.positions() {
            cur = match trie.nodes[cur].children[pos] {
                Some(next) => next as usize,
                None => {
                    trie.nodes.push(Node::default());
                    let next = trie.nodes.len() - 1;
                    trie.nodes[cur].children[pos] = Some(next as u32);
                    next
                }
            };
        }
        trie.nodes[cur].entries.push(trie.entries.len() as u32);
        trie.entries.push(entry.clone());
    }
    Ok(trie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::table::{EntryClass, Language};

    fn s(t: &str) -> CanonicalSeq {
        t.parse().unwrap()
    }

    #[test]
    fn english_letters_reachable() {
        let t = MappingTable::shipped(Language::English, 1).unwrap();
        let trie = build_trie(&t).unwrap();
        let letters = CanonicalSeq::all()
            .filter(|&q| trie.lookup(q).iter().any(|e| e.class == EntryClass::Letter))
            .count();
        assert_eq!(letters, 26);
        assert_eq!(trie.lookup(s("7845"))[0].grapheme, "g");
        assert!(trie.lookup(s("784512")).is_empty());
    }

    #[test]
    fn shared_cell_holds_letter_and_contraction() {
        let t = MappingTable::shipped(Language::English, 2).unwrap();
        let trie = build_trie(&t).unwrap();
        let mut got: Vec<(EntryClass, &str)> = trie
            .lookup(s("74"))
            .iter()
            .map(|e| (e.class, e.grapheme.as_str()))
            .collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                (EntryClass::Letter, "b"),
                (EntryClass::Contraction, "but"),
                (EntryClass::Digit, "2"),
            ]
        );
    }

    #[test]
    fn empty_table_misses_everything() {
        let t = MappingTable { language: Language::English, grade: 1, entries: vec![] };
        let trie = build_trie(&t).unwrap();
        assert_eq!(trie.node_count(), 1);
        assert!(CanonicalSeq::all().all(|q| trie.lookup(q).is_empty()));
    }

    #[test]
    fn duplicate_entries_rejected() {
        let e = MappingEntry { seq: s("7"), class: EntryClass::Letter, grapheme: "a".into() };
        let t = MappingTable {
            language: Language::English,
            grade: 1,
            entries: vec![e.clone(), MappingEntry { grapheme: "z".into(), ..e }],
        };
        assert!(matches!(build_trie(&t), Err(TableError::Duplicate { .. })));
    }

    #[test]
    fn prefixes() {
        let t = MappingTable::shipped(Language::English, 1).unwrap();
        let trie = build_trie(&t).unwrap();
        assert!(trie.is_prefix(s("78")));
        assert!(trie.is_prefix(CanonicalSeq::default()));
        assert!(!trie.is_prefix(s("784512")));
    }
}
