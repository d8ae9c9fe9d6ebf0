//! Dictionary analysis of the probe texts themselves: how many lexicon terms
//! the instrument items already contain, and which of them point to a value
//! other than the item's own.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::Lexicon;
use crate::matrix::{aggregate_matrix, build_count_matrix, CountMatrix, MatrixError};
use crate::metrics::{hits, HitReport};
use crate::probes::ValueSpec;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMatch {
    pub token: String,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemScore {
    pub fine_type_id: String,
    pub parent: String,
    pub item_index: usize,
    pub text: String,
    pub counts: BTreeMap<String, u64>,
    pub matches: Vec<TokenMatch>,
    /// Matched tokens none of whose categories is the item's parent.
    pub mismatches: Vec<TokenMatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstrumentBaseline {
    pub items: Vec<ItemScore>,
    #[serde(skip)]
    pub matrix: CountMatrix,
    #[serde(skip)]
    pub aggregated: CountMatrix,
    pub hits: HitReport,
    pub aggregated_hits: HitReport,
}

/// Scores every item text in the spec against the lexicon.
pub fn instrument_baseline(spec: &ValueSpec, lexicon: &Lexicon) -> Result<InstrumentBaseline, MatrixError> {
    let mut items = Vec::new();
    for ft in &spec.fine_types {
        for (k, text) in ft.items.iter().enumerate() {
            let tokens = tokenize(text);
            let counts = lexicon.score_tokens(&tokens).counts;
            let mut matches = Vec::new();
            for tok in &tokens {
                let mut cats: Vec<String> = lexicon
                    .matching_entries(tok)
                    .into_iter()
                    .flat_map(|e| lexicon.entries()[e].categories.iter().map(|&c| lexicon.categories()[c].name.clone()))
                    .collect();
                cats.sort();
                cats.dedup();
                if !cats.is_empty() {
                    matches.push(TokenMatch { token: tok.clone(), categories: cats });
                }
            }
            let mismatches = if ft.is_mapped() {
                matches.iter().filter(|m| !m.categories.contains(&ft.parent)).cloned().collect()
            } else {
                Vec::new()
            };
            items.push(ItemScore {
                fine_type_id: ft.id.clone(),
                parent: ft.parent.clone(),
                item_index: k,
                text: text.clone(),
                counts,
                matches,
                mismatches,
            });
        }
    }
    let docs = items.iter().map(|i| (i.fine_type_id.as_str(), i.text.as_str()));
    let matrix = build_count_matrix(docs, lexicon, spec)?;
    let aggregated = aggregate_matrix(&matrix);
    Ok(InstrumentBaseline {
        hits: hits(&matrix),
        aggregated_hits: hits(&aggregated),
        items,
        matrix,
        aggregated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;
    use crate::probes::FineType;

    fn ft(id: &str, parent: &str, items: &[&str]) -> FineType {
        FineType {
            id: id.into(),
            parent: parent.into(),
            items: items.iter().map(|s| s.to_string()).collect(),
            definition: "d".into(),
            name: id.into(),
        }
    }

    fn lexicon() -> Lexicon {
        parse_lexicon("%\n1\tSE\n2\tCO\n3\tUN\n%\nsafe*\t1\nsecur*\t1\navoid\t2\nprotect*\t3\nrules\t2\n").unwrap()
    }

    #[test]
    fn cross_category_terms_are_mismatches() {
        let spec = ValueSpec {
            fine_types: vec![
                ft("Security—Personal", "SE", &["It is important to him to avoid anything that might endanger his safety."]),
                ft("Security—Societal", "SE", &["It is important to him that his country protect itself from all threats."]),
                ft("Conformity—Rules", "CO", &["He obeys all rules."]),
            ],
            circle_order: vec!["SE".into(), "CO".into(), "UN".into()],
        };
        let b = instrument_baseline(&spec, &lexicon()).unwrap();
        let mis: Vec<(&str, &str)> = b
            .items
            .iter()
            .flat_map(|i| i.mismatches.iter().map(|m| (m.token.as_str(), m.categories[0].as_str())))
            .collect();
        assert_eq!(mis, vec![("avoid", "CO"), ("protect", "UN")]);
        let m = b.matrix;
        // hand-scored: safety→SE, avoid→CO | protect→UN | rules→CO
        assert_eq!(m.cells(), &[vec![1, 1, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        assert_eq!(b.hits.row_hits, 1);
    }

    #[test]
    fn items_without_dictionary_words_score_zero() {
        let spec = ValueSpec {
            fine_types: vec![ft("A", "SE", &["Nothing relevant here."])],
            circle_order: vec!["SE".into(), "CO".into(), "UN".into()],
        };
        let b = instrument_baseline(&spec, &lexicon()).unwrap();
        assert!(b.items[0].matches.is_empty());
        assert_eq!(b.hits.row_hits, 0);
        assert_eq!(b.matrix.grand_total(), 0);
    }
}
