//! Bias metrics over a count matrix.
//!
//! Row-wise (concept) metrics ask how much of a prompt class's dictionary
//! hits land in its congruent category. Column-wise (discriminant) metrics ask
//! how much of a category's hits come from congruent prompts. Profile matching
//! compares observed counts with a circumplex-shaped expectation.
//!
//! Everything is computed at full precision; [`round2`] is for reporting.

pub mod regression;
pub mod wordfreq;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::{aggregate_matrix, CountMatrix};
use crate::stats;

pub use regression::{frequency_regression, fit_ols, Coefficient, RegressionError, RegressionResult};
pub use wordfreq::{category_frequency_stats, parse_unigram_csv, CategoryFrequency};

/// A metric cell: a finite value, or an explicit marker for a zero
/// denominator (`NA`) or a perfect validity's infinite ratio (`Inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    Undefined,
    Infinite,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn from_option(v: Option<f64>) -> Self {
        v.map_or(Metric::Undefined, Metric::Value)
    }

    /// Formats at full precision, or with `decimals` digits when given.
    pub fn format(self, decimals: Option<usize>) -> String {
        match (self, decimals) {
            (Metric::Value(v), Some(d)) => format!("{:.*}", d, round_to(v, d as i32)),
            (Metric::Value(v), None) => format!("{v}"),
            (Metric::Undefined, _) => "NA".into(),
            (Metric::Infinite, _) => "Inf".into(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(None))
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Value(v) => s.serialize_f64(*v),
            Metric::Undefined => s.serialize_str("NA"),
            Metric::Infinite => s.serialize_str("Inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Metric::Value(v)),
            Raw::Str(s) if s == "NA" => Ok(Metric::Undefined),
            Raw::Str(s) if s == "Inf" => Ok(Metric::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unexpected metric marker '{s}'"))),
        }
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (v * f).round() / f
}

/// Rounds half away from zero to two decimals, as the published tables do.
pub fn round2(v: f64) -> f64 {
    round_to(v, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum HitOutcome {
    /// The congruent cell is the strict maximum.
    Hit,
    /// Another cell is larger; `peak` lists the labels attaining the maximum.
    Miss { peak: Vec<String> },
    /// The congruent cell shares the maximum with `tied`.
    Tie { tied: Vec<String> },
    /// All cells are zero.
    Empty,
}

impl HitOutcome {
    pub fn is_hit(&self) -> bool {
        matches!(self, HitOutcome::Hit)
    }

    pub fn label(&self) -> String {
        match self {
            HitOutcome::Hit => "hit".into(),
            HitOutcome::Miss { peak } => format!("miss:{}", peak.join("|")),
            HitOutcome::Tie { tied } => format!("tie:{}", tied.join("|")),
            HitOutcome::Empty => "empty".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitReport {
    pub rows: Vec<HitOutcome>,
    pub columns: Vec<HitOutcome>,
    pub row_hits: usize,
    pub column_hits: usize,
    pub row_hit_rate: f64,
    pub column_hit_rate: f64,
}

/// Row hit: the congruent cell is the strict row maximum. Column hit: the
/// largest count among the column's congruent rows beats every other row.
pub fn hits(m: &CountMatrix) -> HitReport {
    let rows: Vec<HitOutcome> = (0..m.n_rows())
        .map(|r| {
            let row = &m.cells()[r];
            let cong = m.congruent_column(r);
            let max = *row.iter().max().unwrap_or(&0);
            if max == 0 {
                return HitOutcome::Empty;
            }
            let at_max: Vec<usize> = (0..row.len()).filter(|&c| row[c] == max).collect();
            let labels = |idx: &[usize]| idx.iter().map(|&c| m.col_labels()[c].clone()).collect();
            if row[cong] < max {
                HitOutcome::Miss { peak: labels(&at_max) }
            } else if at_max.len() > 1 {
                let others: Vec<usize> = at_max.into_iter().filter(|&c| c != cong).collect();
                HitOutcome::Tie { tied: labels(&others) }
            } else {
                HitOutcome::Hit
            }
        })
        .collect();

    let columns: Vec<HitOutcome> = (0..m.n_cols())
        .map(|c| {
            let congruent = m.congruent_rows(c);
            let col: Vec<u64> = m.cells().iter().map(|r| r[c]).collect();
            let max = *col.iter().max().unwrap_or(&0);
            if max == 0 {
                return HitOutcome::Empty;
            }
            let best_congruent = congruent.iter().map(|&r| col[r]).max();
            let best_other = (0..m.n_rows())
                .filter(|r| !congruent.contains(r))
                .map(|r| col[r])
                .max();
            let peak_rows: Vec<String> = (0..m.n_rows())
                .filter(|&r| col[r] == max)
                .map(|r| m.row_labels()[r].clone())
                .collect();
            match (best_congruent, best_other) {
                (Some(bc), Some(bo)) if bc > bo => HitOutcome::Hit,
                (Some(_), None) => HitOutcome::Hit,
                (Some(bc), Some(bo)) if bc == bo => HitOutcome::Tie {
                    tied: (0..m.n_rows())
                        .filter(|&r| col[r] == max && !congruent.contains(&r))
                        .map(|r| m.row_labels()[r].clone())
                        .collect(),
                },
                _ => HitOutcome::Miss { peak: peak_rows },
            }
        })
        .collect();

    let row_hits = rows.iter().filter(|h| h.is_hit()).count();
    let column_hits = columns.iter().filter(|h| h.is_hit()).count();
    HitReport {
        row_hit_rate: rate(row_hits, rows.len()),
        column_hit_rate: rate(column_hits, columns.len()),
        rows,
        columns,
        row_hits,
        column_hits,
    }
}

fn rate(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

fn ratio(num: u64, den: u64) -> Metric {
    if den == 0 {
        Metric::Undefined
    } else {
        Metric::Value(num as f64 / den as f64)
    }
}

/// Congruent cell over row total, per row.
pub fn concept_validity(m: &CountMatrix) -> Vec<Metric> {
    m.row_totals()
        .iter()
        .enumerate()
        .map(|(r, &total)| ratio(m.get(r, m.congruent_column(r)), total))
        .collect()
}

/// Column cells over congruent rows divided by the column total, per column.
pub fn discriminant_validity(m: &CountMatrix) -> Vec<Metric> {
    m.column_totals()
        .iter()
        .enumerate()
        .map(|(c, &total)| {
            let congruent: u64 = m.congruent_rows(c).iter().map(|&r| m.get(r, c)).sum();
            ratio(congruent, total)
        })
        .collect()
}

/// Hits over misses: `v / (1 − v)`.
pub fn signal_noise(validity: Metric) -> Metric {
    match validity {
        Metric::Value(v) if v >= 1.0 => Metric::Infinite,
        Metric::Value(v) => Metric::Value(v / (1.0 - v)),
        other => other,
    }
}

/// Steps between two positions on a circle of `n`.
pub fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Expected profile of `parent` over the circle, in circle order:
/// `n/2 − circular distance` (5 at the parent, 0 opposite for ten values).
pub fn expected_profile<S: AsRef<str>>(parent: &str, circle_order: &[S]) -> Option<Vec<f64>> {
    let n = circle_order.len();
    let p = circle_order.iter().position(|v| v.as_ref() == parent)?;
    Some((0..n).map(|w| (n / 2 - circular_distance(p, w, n)) as f64).collect())
}

fn circle_position<S: AsRef<str>>(label: &str, circle_order: &[S]) -> Option<usize> {
    circle_order.iter().position(|v| v.as_ref() == label)
}

/// Pearson correlations between observed counts and expected profiles.
///
/// The row side correlates each row with its congruent value's profile over
/// the columns. The column side correlates each column, read down the
/// aggregated rows, with that column's profile over the row values.
pub fn profile_match<S: AsRef<str>>(m: &CountMatrix, circle_order: &[S]) -> (Vec<Metric>, Vec<Metric>) {
    let col_pos: Vec<Option<usize>> =
        m.col_labels().iter().map(|c| circle_position(c, circle_order)).collect();
    let rows = (0..m.n_rows())
        .map(|r| {
            let parent = &m.row_parents()[r];
            let Some(expected) = expected_profile(parent, circle_order) else {
                return Metric::Undefined;
            };
            if col_pos.iter().any(Option::is_none) {
                return Metric::Undefined;
            }
            let exp: Vec<f64> = col_pos.iter().map(|p| expected[p.unwrap()]).collect();
            let obs: Vec<f64> = m.cells()[r].iter().map(|&v| v as f64).collect();
            Metric::from_option(stats::pearson(&obs, &exp))
        })
        .collect();

    let agg = if m.is_aggregated() { m.clone() } else { aggregate_matrix(m) };
    let row_pos: Vec<Option<usize>> =
        agg.row_labels().iter().map(|r| circle_position(r, circle_order)).collect();
    let cols = (0..agg.n_cols())
        .map(|c| {
            let Some(expected) = expected_profile(&agg.col_labels()[c], circle_order) else {
                return Metric::Undefined;
            };
            if row_pos.iter().any(Option::is_none) {
                return Metric::Undefined;
            }
            let exp: Vec<f64> = row_pos.iter().map(|p| expected[p.unwrap()]).collect();
            let obs: Vec<f64> = agg.cells().iter().map(|row| row[c] as f64).collect();
            Metric::from_option(stats::pearson(&obs, &exp))
        })
        .collect();
    (rows, cols)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMetrics {
    pub row: String,
    pub parent: String,
    pub total: u64,
    pub hit: HitOutcome,
    pub concept_validity: Metric,
    pub concept_snr: Metric,
    pub profile_match: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMetrics {
    pub column: String,
    pub total: u64,
    pub hit: HitOutcome,
    pub discriminant_validity: Metric,
    pub discriminant_snr: Metric,
    pub discriminant_profile_match: Metric,
}

/// Means over defined, finite values only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub concept_validity: Metric,
    pub concept_snr: Metric,
    pub profile_match: Metric,
    pub discriminant_validity: Metric,
    pub discriminant_snr: Metric,
    pub discriminant_profile_match: Metric,
    pub row_hits: usize,
    pub row_count: usize,
    pub row_hit_rate: f64,
    pub column_hits: usize,
    pub column_count: usize,
    pub column_hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub rows: Vec<RowMetrics>,
    pub columns: Vec<ColumnMetrics>,
    pub summary: MetricSummary,
}

fn mean_defined(values: impl IntoIterator<Item = Metric>) -> Metric {
    let v: Vec<f64> = values.into_iter().filter_map(Metric::value).collect();
    if v.is_empty() {
        Metric::Undefined
    } else {
        Metric::Value(stats::mean(&v))
    }
}

impl MetricTable {
    pub fn row(&self, label: &str) -> Option<&RowMetrics> {
        self.rows.iter().find(|r| r.row == label)
    }

    pub fn column(&self, label: &str) -> Option<&ColumnMetrics> {
        self.columns.iter().find(|c| c.column == label)
    }
}

/// Computes every row and column metric plus summary means.
pub fn compute_metrics<S: AsRef<str>>(m: &CountMatrix, circle_order: &[S]) -> MetricTable {
    let hit = hits(m);
    let cv = concept_validity(m);
    let dv = discriminant_validity(m);
    let (row_profile, col_profile) = profile_match(m, circle_order);
    let row_totals = m.row_totals();
    let col_totals = m.column_totals();

    let rows: Vec<RowMetrics> = (0..m.n_rows())
        .map(|r| RowMetrics {
            row: m.row_labels()[r].clone(),
            parent: m.row_parents()[r].clone(),
            total: row_totals[r],
            hit: hit.rows[r].clone(),
            concept_validity: cv[r],
            concept_snr: signal_noise(cv[r]),
            profile_match: row_profile[r],
        })
        .collect();
    let columns: Vec<ColumnMetrics> = (0..m.n_cols())
        .map(|c| ColumnMetrics {
            column: m.col_labels()[c].clone(),
            total: col_totals[c],
            hit: hit.columns[c].clone(),
            discriminant_validity: dv[c],
            discriminant_snr: signal_noise(dv[c]),
            discriminant_profile_match: col_profile[c],
        })
        .collect();

    let summary = MetricSummary {
        concept_validity: mean_defined(rows.iter().map(|r| r.concept_validity)),
        concept_snr: mean_defined(rows.iter().map(|r| r.concept_snr)),
        profile_match: mean_defined(rows.iter().map(|r| r.profile_match)),
        discriminant_validity: mean_defined(columns.iter().map(|c| c.discriminant_validity)),
        discriminant_snr: mean_defined(columns.iter().map(|c| c.discriminant_snr)),
        discriminant_profile_match: mean_defined(columns.iter().map(|c| c.discriminant_profile_match)),
        row_hits: hit.row_hits,
        row_count: rows.len(),
        row_hit_rate: hit.row_hit_rate,
        column_hits: hit.column_hits,
        column_count: columns.len(),
        column_hit_rate: hit.column_hit_rate,
    };
    MetricTable { rows, columns, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes::DEFAULT_CIRCLE_ORDER;
    use proptest::prelude::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn s2() -> CountMatrix {
        CountMatrix::from_csv(include_str!("../../fixtures/items.csv")).unwrap()
    }

    fn diagonal(n: usize, v: u64) -> CountMatrix {
        let labels: Vec<String> = DEFAULT_CIRCLE_ORDER[..n].iter().map(|x| x.to_string()).collect();
        let cells = (0..n).map(|i| (0..n).map(|j| if i == j { v } else { 0 }).collect()).collect();
        CountMatrix::new(labels.clone(), labels.clone(), labels, cells).unwrap()
    }

    #[test]
    fn diagonal_matrix_is_perfect() {
        let m = diagonal(10, 5);
        let t = compute_metrics(&m, &DEFAULT_CIRCLE_ORDER);
        assert_eq!(t.summary.row_hits, 10);
        assert_eq!(t.summary.column_hits, 10);
        for r in &t.rows {
            assert_eq!(r.concept_validity, Metric::Value(1.0));
            assert_eq!(r.concept_snr, Metric::Infinite);
        }
        for c in &t.columns {
            assert_eq!(c.discriminant_validity, Metric::Value(1.0));
        }
    }

    #[test]
    fn single_cell_row_has_unit_validity() {
        let m = CountMatrix::new(s(&["A"]), s(&["A"]), s(&["A", "B", "C"]), vec![vec![10, 0, 0]]).unwrap();
        assert_eq!(concept_validity(&m), vec![Metric::Value(1.0)]);
    }

    #[test]
    fn zero_totals_are_undefined() {
        let m = CountMatrix::zeros(s(&["A", "B"]), s(&["A", "B"]), s(&["A", "B"])).unwrap();
        assert_eq!(concept_validity(&m), vec![Metric::Undefined; 2]);
        assert_eq!(discriminant_validity(&m), vec![Metric::Undefined; 2]);
        assert_eq!(hits(&m).rows, vec![HitOutcome::Empty; 2]);
    }

    #[test]
    fn ties_are_reported_not_resolved() {
        let m = CountMatrix::new(s(&["A"]), s(&["A"]), s(&["A", "B", "C"]), vec![vec![4, 4, 1]]).unwrap();
        assert_eq!(hits(&m).rows[0], HitOutcome::Tie { tied: s(&["B"]) });
    }

    #[test]
    fn published_security_personal_row() {
        let m = s2();
        let r = m.row_index("Security—Personal").unwrap();
        assert_eq!(m.row_totals()[r], 624);
        let cv = concept_validity(&m)[r].value().unwrap();
        assert_eq!(cv, 205.0 / 624.0);
        assert_eq!(round2(cv), 0.33);
        assert_eq!(round2(signal_noise(Metric::Value(cv)).value().unwrap()), 0.49);
    }

    #[test]
    fn published_security_column() {
        let m = s2();
        let c = m.col_index("SE").unwrap();
        assert_eq!(m.column_totals()[c], 730);
        let dv = discriminant_validity(&m)[c].value().unwrap();
        assert_eq!(dv, 429.0 / 730.0);
        assert_eq!(round2(dv), 0.59);
        assert_eq!(round2(signal_noise(Metric::Value(dv)).value().unwrap()), 1.43);
    }

    #[test]
    fn snr_of_even_split_is_one() {
        assert_eq!(signal_noise(Metric::Value(0.5)), Metric::Value(1.0));
        assert_eq!(signal_noise(Metric::Value(1.0)), Metric::Infinite);
        assert_eq!(signal_noise(Metric::Undefined), Metric::Undefined);
    }

    #[test]
    fn expected_profile_shape() {
        let c = DEFAULT_CIRCLE_ORDER;
        let se = expected_profile("SE", &c).unwrap();
        assert_eq!(se[1], 4.0); // CO, adjacent
        assert_eq!(se[5], 0.0); // SD, opposite
        // hand-enumerated distances from UN (position 4)
        let un = expected_profile("UN", &c).unwrap();
        assert_eq!(un, vec![1.0, 2.0, 3.0, 4.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0]);
        for v in c {
            let e = expected_profile(v, &c).unwrap();
            let p = c.iter().position(|x| *x == v).unwrap();
            assert!(e.iter().enumerate().all(|(i, &x)| i == p || x < e[p]));
        }
        assert_eq!(expected_profile("XX", &c), None);
    }

    #[test]
    fn expected_profiles_are_symmetric() {
        let c = DEFAULT_CIRCLE_ORDER;
        for (i, v) in c.iter().enumerate() {
            for (j, w) in c.iter().enumerate() {
                assert_eq!(expected_profile(v, &c).unwrap()[j], expected_profile(w, &c).unwrap()[i]);
            }
        }
    }

    #[test]
    fn proportional_row_matches_perfectly() {
        let c = DEFAULT_CIRCLE_ORDER;
        let labels = s(&c);
        let cells: Vec<u64> = expected_profile("ST", &c).unwrap().iter().map(|&x| 3 * x as u64 + 2).collect();
        let m = CountMatrix::new(s(&["Stimulation"]), s(&["ST"]), labels, vec![cells]).unwrap();
        let (rows, _) = profile_match(&m, &c);
        assert!((rows[0].value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_row_profile_is_undefined() {
        let c = DEFAULT_CIRCLE_ORDER;
        let m = CountMatrix::new(s(&["Stimulation"]), s(&["ST"]), s(&c), vec![vec![7; 10]]).unwrap();
        assert_eq!(profile_match(&m, &c).0[0], Metric::Undefined);
    }

    #[test]
    fn stimulation_profile_matches_reference_correlation() {
        // item-prompt Stimulation row in circle order (SE CO TR BE UN SD ST HE AC PO)
        let obs = [14.0, 7.0, 1.0, 30.0, 24.0, 86.0, 223.0, 32.0, 85.0, 39.0];
        let exp = [1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 4.0, 3.0, 2.0];
        // textbook formula: (nΣxy − ΣxΣy) / sqrt((nΣx² − (Σx)²)(nΣy² − (Σy)²))
        let n = 10.0;
        let sx: f64 = obs.iter().sum();
        let sy: f64 = exp.iter().sum();
        let sxy: f64 = obs.iter().zip(&exp).map(|(a, b)| a * b).sum();
        let sxx: f64 = obs.iter().map(|a| a * a).sum();
        let syy: f64 = exp.iter().map(|a| a * a).sum();
        let reference = (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
        assert!((reference - 0.759_354_683_663_616_1).abs() < 1e-12, "{reference}");

        let m = s2().with_column_order(&DEFAULT_CIRCLE_ORDER).unwrap();
        let (rows, _) = profile_match(&m, &DEFAULT_CIRCLE_ORDER);
        let r = m.row_index("Stimulation").unwrap();
        assert!((rows[r].value().unwrap() - reference).abs() < 1e-12);
    }

    #[test]
    fn other_rows_do_not_affect_concept_validity() {
        let m = s2();
        let base = concept_validity(&m);
        let mut cells = m.cells().to_vec();
        cells.swap(3, 9);
        let mut labels = m.row_labels().to_vec();
        labels.swap(3, 9);
        let mut parents = m.row_parents().to_vec();
        parents.swap(3, 9);
        let p = CountMatrix::new(labels, parents, m.col_labels().to_vec(), cells).unwrap();
        let permuted = concept_validity(&p);
        assert_eq!(permuted[0], base[0]);
        assert_eq!(permuted[3], base[9]);
    }

    #[test]
    fn discriminant_validity_ignores_column_permutation() {
        let m = s2();
        let base = discriminant_validity(&m);
        let mut order = m.col_labels().to_vec();
        order.swap(2, 7);
        let p = m.with_column_order(&order).unwrap();
        let permuted = discriminant_validity(&p);
        assert_eq!(permuted[0], base[0]);
        assert_eq!(permuted[2], base[7]);
    }

    proptest! {
        #[test]
        fn snr_identity_holds(cells in proptest::collection::vec(proptest::collection::vec(0u64..300, 4), 4)) {
            let labels = s(&["A", "B", "C", "D"]);
            let m = CountMatrix::new(labels.clone(), labels.clone(), labels, cells).unwrap();
            let t = compute_metrics(&m, &["A", "B", "C", "D"]);
            for r in &t.rows {
                if let (Metric::Value(v), Metric::Value(snr)) = (r.concept_validity, r.concept_snr) {
                    prop_assert!((snr - v / (1.0 - v)).abs() <= 1e-12 * snr.max(1.0));
                    let cong = m.get(m.row_index(&r.row).unwrap(), m.col_index(&r.parent).unwrap());
                    let exact = cong as f64 / (r.total - cong) as f64;
                    prop_assert!((snr - exact).abs() <= 1e-12 * exact.max(1.0));
                }
            }
        }

        #[test]
        fn hits_survive_positive_scaling(
            cells in proptest::collection::vec(proptest::collection::vec(0u64..100, 5), 5),
            k in 1u64..50,
        ) {
            let labels = s(&["A", "B", "C", "D", "E"]);
            let m = CountMatrix::new(labels.clone(), labels.clone(), labels.clone(), cells.clone()).unwrap();
            let scaled_cells = cells.iter().map(|r| r.iter().map(|v| v * k).collect()).collect();
            let scaled = CountMatrix::new(labels.clone(), labels.clone(), labels, scaled_cells).unwrap();
            prop_assert_eq!(hits(&m), hits(&scaled));
        }
    }
}
