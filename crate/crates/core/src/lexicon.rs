//! Category dictionaries in the percent-delimited word-count format.
//!
//! A dictionary file looks like this:
//!
//! ```text
//! %
//! 1	SE
//! 2	CO
//! %
//! alarm	1
//! achiev*	2
//! ```
//!
//! The header block declares `id<TAB>name` pairs. Every entry line carries a
//! pattern followed by one or more category ids. A pattern ending in a single
//! `*` matches any token that starts with the remaining prefix.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::text;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> LexiconError {
    LexiconError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub id: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Lowercased pattern, without the trailing asterisk for wildcard entries.
    pub pattern: String,
    pub wildcard: bool,
    /// Indices into [`Lexicon::categories`], in ascending order.
    pub categories: Vec<usize>,
}

impl Entry {
    pub fn matches(&self, token: &str) -> bool {
        if self.wildcard {
            token.starts_with(&self.pattern)
        } else {
            token == self.pattern
        }
    }

    /// Source form of the pattern (with the asterisk restored).
    pub fn source_pattern(&self) -> String {
        if self.wildcard {
            format!("{}*", self.pattern)
        } else {
            self.pattern.clone()
        }
    }
}

/// An immutable, parsed dictionary.
#[derive(Debug, Clone)]
pub struct Lexicon {
    categories: Vec<Category>,
    entries: Vec<Entry>,
    exact: HashMap<String, Vec<usize>>,
    prefixes: PrefixTrie,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.categories == other.categories && self.entries == other.entries
    }
}

impl Lexicon {
    pub fn new(categories: Vec<Category>, entries: Vec<Entry>) -> Self {
        let mut exact: HashMap<String, Vec<usize>> = HashMap::new();
        let mut prefixes = PrefixTrie::default();
        for (idx, entry) in entries.iter().enumerate() {
            if entry.wildcard {
                prefixes.insert(&entry.pattern, idx);
            } else {
                exact.entry(entry.pattern.clone()).or_default().push(idx);
            }
        }
        Lexicon {
            categories,
            entries,
            exact,
            prefixes,
        }
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_names(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.name == name)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Indices of every entry matching `token`: exact entries first, then
    /// wildcard entries from shortest to longest prefix.
    pub fn matching_entries(&self, token: &str) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(ids) = self.exact.get(token) {
            out.extend_from_slice(ids);
        }
        self.prefixes.collect_prefixes_of(token, &mut out);
        out
    }

    /// Scores a token list. Every matching entry adds one to each of its
    /// categories, so a token hitting both an exact and a wildcard entry
    /// counts twice.
    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> CategoryCounts {
        let mut raw = vec![0u64; self.categories.len()];
        for token in tokens {
            for entry in self.matching_entries(token.as_ref()) {
                for &cat in &self.entries[entry].categories {
                    raw[cat] += 1;
                }
            }
        }
        CategoryCounts {
            counts: self
                .categories
                .iter()
                .zip(raw)
                .map(|(c, n)| (c.name.clone(), n))
                .collect(),
            token_total: tokens.len() as u64,
        }
    }

    /// Tokenizes and scores a document.
    pub fn score_text(&self, text: &str) -> CategoryCounts {
        self.score_tokens(&text::tokenize(text))
    }
}

/// Raw per-category occurrence counts for one document. Never normalized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub counts: BTreeMap<String, u64>,
    pub token_total: u64,
}

impl CategoryCounts {
    pub fn get(&self, category: &str) -> u64 {
        self.counts.get(category).copied().unwrap_or(0)
    }

    pub fn total_hits(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn add(&mut self, other: &CategoryCounts) {
        for (name, n) in &other.counts {
            *self.counts.entry(name.clone()).or_insert(0) += n;
        }
        self.token_total += other.token_total;
    }
}

pub fn score_document<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> CategoryCounts {
    lexicon.score_tokens(tokens)
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    terminals: Vec<usize>,
}

/// Character trie over wildcard prefixes.
#[derive(Debug, Clone)]
struct PrefixTrie {
    nodes: Vec<TrieNode>,
}

impl Default for PrefixTrie {
    fn default() -> Self {
        PrefixTrie {
            nodes: vec![TrieNode::default()],
        }
    }
}

impl PrefixTrie {
    fn insert(&mut self, prefix: &str, entry: usize) {
        let mut node = 0;
        for ch in prefix.chars() {
            node = match self.nodes[node].children.get(&ch) {
                Some(&next) => next,
                None => {
                    self.nodes.push(TrieNode::default());
                    let next = self.nodes.len() - 1;
                    self.nodes[node].children.insert(ch, next);
                    next
                }
            };
        }
        self.nodes[node].terminals.push(entry);
    }

    fn collect_prefixes_of(&self, token: &str, out: &mut Vec<usize>) {
        // Wildcard patterns are non-empty, so the root never holds terminals.
        let mut node = 0;
        for ch in token.chars() {
            match self.nodes[node].children.get(&ch) {
                Some(&next) => {
                    node = next;
                    out.extend_from_slice(&self.nodes[node].terminals);
                }
                None => return,
            }
        }
    }
}

/// Parses a percent-delimited dictionary.
pub fn parse_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut first = None;
    for (no, line) in lines.by_ref() {
        if !line.trim().is_empty() {
            first = Some((no, line));
            break;
        }
    }
    match first {
        Some((_, line)) if line.trim() == "%" => {}
        Some((no, _)) => return Err(parse_err(no, "expected '%' opening the category header")),
        None => return Err(parse_err(1, "empty dictionary: missing '%' header")),
    }

    let mut categories: Vec<Category> = Vec::new();
    let mut by_id: HashMap<u32, usize> = HashMap::new();
    let mut names: HashSet<String> = HashSet::new();
    let mut header_closed = false;
    let mut last_line = 1;
    for (no, line) in lines.by_ref() {
        last_line = no;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "%" {
            header_closed = true;
            break;
        }
        let mut fields = trimmed.split('\t').map(str::trim).filter(|f| !f.is_empty());
        let (Some(id), Some(name), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(no, "category line must be 'id<TAB>name'"));
        };
        let id: u32 = id
            .parse()
            .map_err(|_| parse_err(no, format!("category id '{id}' is not an integer")))?;
        if by_id.contains_key(&id) {
            return Err(parse_err(no, format!("duplicate category id {id}")));
        }
        if !names.insert(name.to_string()) {
            return Err(parse_err(no, format!("duplicate category name '{name}'")));
        }
        by_id.insert(id, categories.len());
        categories.push(Category {
            id,
            name: name.to_string(),
        });
    }
    if !header_closed {
        return Err(parse_err(last_line, "category header is not closed by '%'"));
    }

    let mut entries = Vec::new();
    let mut seen: HashSet<(String, bool)> = HashSet::new();
    for (no, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split('\t').map(str::trim).filter(|f| !f.is_empty());
        let raw_pattern = fields.next().unwrap_or_default().to_lowercase();
        let (pattern, wildcard) = match raw_pattern.strip_suffix('*') {
            Some(stem) => (stem.to_string(), true),
            None => (raw_pattern.clone(), false),
        };
        if pattern.is_empty() {
            return Err(parse_err(no, "empty pattern"));
        }
        if pattern.contains('*') {
            return Err(parse_err(
                no,
                format!("pattern '{raw_pattern}' may only carry a single trailing '*'"),
            ));
        }
        let mut cats = BTreeSet::new();
        for field in fields {
            let id: u32 = field
                .parse()
                .map_err(|_| parse_err(no, format!("category id '{field}' is not an integer")))?;
            let idx = by_id
                .get(&id)
                .ok_or_else(|| parse_err(no, format!("unknown category id {id}")))?;
            cats.insert(*idx);
        }
        if cats.is_empty() {
            return Err(parse_err(no, format!("entry '{raw_pattern}' lists no category")));
        }
        if !seen.insert((pattern.clone(), wildcard)) {
            return Err(parse_err(no, format!("duplicate entry '{raw_pattern}'")));
        }
        entries.push(Entry {
            pattern,
            wildcard,
            categories: cats.into_iter().collect(),
        });
    }

    Ok(Lexicon::new(categories, entries))
}
