//! English-language frequency of dictionary terms, per category.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::Lexicon;
use crate::stats;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct UnigramError {
    pub line: usize,
    pub message: String,
}

/// Parses a `word,count` table. A first row whose count is not numeric is
/// treated as a header.
pub fn parse_unigram_csv(source: &str) -> Result<BTreeMap<String, u64>, UnigramError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source.trim_start_matches('\u{feff}').as_bytes());
    let mut table = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| UnigramError {
            line: e.position().map_or(i + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() < 2 {
            return Err(UnigramError { line, message: "expected 'word,count'".into() });
        }
        let count = match rec[1].parse::<u64>() {
            Ok(c) => c,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(UnigramError { line, message: format!("count '{}' is not an integer", &rec[1]) })
            }
        };
        *table.entry(rec[0].to_lowercase()).or_insert(0) += count;
    }
    Ok(table)
}

/// Frequency statistics for one category's dictionary entries. Undefined
/// (`None`) when no entry was found in the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryFrequency {
    pub category: String,
    pub terms: usize,
    pub matched: usize,
    pub missing: Vec<String>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub range: Option<u64>,
}

/// One frequency per dictionary entry: the table count for exact entries,
/// the summed count of every table word carrying the prefix for wildcard
/// entries. Entries absent from the table are listed as missing.
pub fn category_frequency_stats(lexicon: &Lexicon, unigrams: &BTreeMap<String, u64>) -> Vec<CategoryFrequency> {
    let mut per_cat: Vec<(Vec<u64>, Vec<String>, usize)> = vec![(Vec::new(), Vec::new(), 0); lexicon.categories().len()];
    for entry in lexicon.entries() {
        let freq = if entry.wildcard {
            let matched: Vec<u64> = unigrams
                .range(entry.pattern.clone()..)
                .take_while(|(w, _)| w.starts_with(&entry.pattern))
                .map(|(_, &c)| c)
                .collect();
            (!matched.is_empty()).then(|| matched.iter().sum())
        } else {
            unigrams.get(&entry.pattern).copied()
        };
        for &cat in &entry.categories {
            let slot = &mut per_cat[cat];
            slot.2 += 1;
            match freq {
                Some(f) => slot.0.push(f),
                None => slot.1.push(entry.source_pattern()),
            }
        }
    }

    lexicon
        .categories()
        .iter()
        .zip(per_cat)
        .map(|(cat, (freqs, missing, terms))| {
            let xs: Vec<f64> = freqs.iter().map(|&f| f as f64).collect();
            let defined = !xs.is_empty();
            let min = freqs.iter().min().copied();
            let max = freqs.iter().max().copied();
            CategoryFrequency {
                category: cat.name.clone(),
                terms,
                matched: freqs.len(),
                missing,
                mean: defined.then(|| stats::mean(&xs)),
                sd: defined.then(|| stats::sample_sd(&xs)),
                median: stats::median(&xs),
                min,
                max,
                range: min.zip(max).map(|(a, b)| b - a),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon;

    fn table(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(w, c)| (w.to_string(), *c)).collect()
    }

    #[test]
    fn single_entry_category() {
        let lex = parse_lexicon("%\n1\tHE\n%\nfun\t1\n").unwrap();
        let stats = category_frequency_stats(&lex, &table(&[("fun", 4200)]));
        let he = &stats[0];
        assert_eq!(he.mean, Some(4200.0));
        assert_eq!(he.median, Some(4200.0));
        assert_eq!((he.min, he.max, he.range), (Some(4200), Some(4200), Some(0)));
        assert_eq!(he.sd, Some(0.0));
    }

    #[test]
    fn spreadsheet_style_oracle() {
        let lex = parse_lexicon("%\n1\tAC\n2\tPO\n%\nwin\t1\nsucce*\t1\nambition\t1\ngoal\t1\npower\t2\nrule\t2\n").unwrap();
        let t = table(&[
            ("win", 100),
            ("success", 40),
            ("succeed", 20),
            ("ambition", 10),
            ("goal", 70),
            ("power", 5),
            ("suck", 999),
        ]);
        let stats = category_frequency_stats(&lex, &t);
        // AC frequencies: 100, 60 (40 + 20), 10, 70
        // mean 60; deviations 40, 0, -50, 10 -> SS 4200 -> sd sqrt(1400); median (60+70)/2
        let ac = &stats[0];
        assert_eq!(ac.terms, 4);
        assert_eq!(ac.mean, Some(60.0));
        assert!((ac.sd.unwrap() - 1400f64.sqrt()).abs() < 1e-12);
        assert_eq!(ac.median, Some(65.0));
        assert_eq!((ac.min, ac.max, ac.range), (Some(10), Some(100), Some(90)));
        // PO: 'rule' absent
        let po = &stats[1];
        assert_eq!(po.terms, 2);
        assert_eq!(po.matched, 1);
        assert_eq!(po.missing, vec!["rule".to_string()]);
    }

    #[test]
    fn category_with_no_matches_is_undefined() {
        let lex = parse_lexicon("%\n1\tTR\n%\nritual\t1\n").unwrap();
        let stats = category_frequency_stats(&lex, &BTreeMap::new());
        assert_eq!(stats[0].median, None);
        assert_eq!(stats[0].mean, None);
        assert_eq!(stats[0].missing, vec!["ritual".to_string()]);
    }

    #[test]
    fn parses_with_and_without_header() {
        assert_eq!(parse_unigram_csv("word,count\nthe,23135851162\nof,13151942776\n").unwrap().len(), 2);
        assert_eq!(parse_unigram_csv("the,5\n").unwrap()["the"], 5);
        assert_eq!(parse_unigram_csv("word,count\nthe,x\n").unwrap_err().line, 2);
    }
}
