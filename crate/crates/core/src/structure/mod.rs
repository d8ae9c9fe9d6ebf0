//! Internal structure of the value space: column correlations, dissimilarities,
//! a two-dimensional ordinal MDS solution and its Procrustes fit to the
//! theoretical circle.

pub mod mds;
pub mod procrustes;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::matrix::CountMatrix;
use crate::stats;

pub use mds::{ordinal_mds, Configuration, MdsOptions};
pub use procrustes::{alienation, procrustes_fit, tucker_phi, ProcrustesFit};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StructureError {
    #[error("column '{0}' is constant; its correlation is undefined")]
    ConstantColumn(String),
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("all dissimilarities are zero")]
    DegenerateDissimilarity,
    #[error("cross-covariance of observed and target configurations is rank deficient")]
    RankDeficient,
    #[error("observed configuration is {observed:?} but target is {target:?}")]
    ShapeMismatch {
        observed: (usize, usize),
        target: (usize, usize),
    },
    #[error("column '{0}' is not in the circle order")]
    NotInCircle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    #[default]
    Spearman,
    Pearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DissimilarityKind {
    /// sqrt(2(1 − r)): Euclidean distance between standardized profiles.
    #[default]
    Sqrt2,
    /// 1 − r
    OneMinus,
}

macro_rules! name_enum {
    ($ty:ty, $($variant:ident => $name:literal),+) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok(Self::$variant),)+
                    other => Err(format!("unknown value '{other}'")),
                }
            }
        }
    };
}

name_enum!(CorrelationKind, Spearman => "spearman", Pearson => "pearson");
name_enum!(DissimilarityKind, Sqrt2 => "sqrt2", OneMinus => "oneminus");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub kind: CorrelationKind,
    pub r: Vec<Vec<f64>>,
}

/// Correlations between column profiles taken across rows.
pub fn correlation_matrix(m: &CountMatrix, kind: CorrelationKind) -> Result<CorrelationMatrix, StructureError> {
    let cols: Vec<Vec<f64>> = (0..m.n_cols())
        .map(|j| {
            let col: Vec<f64> = m.cells().iter().map(|row| row[j] as f64).collect();
            match kind {
                CorrelationKind::Spearman => stats::average_ranks(&col),
                CorrelationKind::Pearson => col,
            }
        })
        .collect();
    for (j, c) in cols.iter().enumerate() {
        if c.len() < 2 || c.iter().all(|&v| v == c[0]) {
            return Err(StructureError::ConstantColumn(m.col_labels()[j].clone()));
        }
    }
    let k = cols.len();
    let mut r = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = stats::pearson(&cols[i], &cols[j]).expect("non-constant columns");
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix { labels: m.col_labels().to_vec(), kind, r })
}

pub fn rank_correlation_matrix(m: &CountMatrix) -> Result<CorrelationMatrix, StructureError> {
    correlation_matrix(m, CorrelationKind::Spearman)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dissimilarity {
    pub labels: Vec<String>,
    pub d: DMatrix<f64>,
}

pub fn to_dissimilarity(corr: &CorrelationMatrix, kind: DissimilarityKind) -> Dissimilarity {
    let k = corr.labels.len();
    let d = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            return 0.0;
        }
        let gap = (1.0 - corr.r[i][j]).max(0.0);
        match kind {
            DissimilarityKind::Sqrt2 => (2.0 * gap).sqrt(),
            DissimilarityKind::OneMinus => gap,
        }
    });
    Dissimilarity { labels: corr.labels.clone(), d }
}

/// Unit-circle points at angles 2πk/n in circle order, the first at (1, 0).
pub fn theoretical_target(circle_order: &[String]) -> Vec<(String, [f64; 2])> {
    let n = circle_order.len() as f64;
    circle_order
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let a = TAU * k as f64 / n;
            (label.clone(), [a.cos(), a.sin()])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StructureOptions {
    pub correlation: CorrelationKind,
    pub dissimilarity: DissimilarityKind,
    pub mds: MdsOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub options: StructureOptions,
    pub correlation: CorrelationMatrix,
    pub dissimilarity: Vec<Vec<f64>>,
    pub configuration: Configuration,
    /// Target coordinates, in configuration label order.
    pub target: Vec<[f64; 2]>,
    pub fit: ProcrustesFit,
}

/// Correlation → dissimilarity → ordinal MDS → Procrustes fit to the circle.
pub fn structure_report(
    m: &CountMatrix,
    circle_order: &[String],
    opts: &StructureOptions,
) -> Result<StructureReport, StructureError> {
    let corr = correlation_matrix(m, opts.correlation)?;
    let diss = to_dissimilarity(&corr, opts.dissimilarity);
    let ring = theoretical_target(circle_order);
    let target: Vec<[f64; 2]> = corr
        .labels
        .iter()
        .map(|l| {
            ring.iter()
                .find(|(c, _)| c == l)
                .map(|(_, p)| *p)
                .ok_or_else(|| StructureError::NotInCircle(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    let mds_opts = MdsOptions { dims: 2, ..opts.mds };
    let configuration = ordinal_mds(&diss, &mds_opts)?;
    let tm = DMatrix::from_fn(target.len(), 2, |i, j| target[i][j]);
    let fit = procrustes_fit(&configuration.coords_matrix(), &tm)?;
    let k = diss.labels.len();
    Ok(StructureReport {
        options: StructureOptions { mds: mds_opts, ..*opts },
        dissimilarity: (0..k).map(|i| diss.d.row(i).iter().copied().collect()).collect(),
        correlation: corr,
        configuration,
        target,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CountMatrix;
    use crate::metrics::expected_profile;
    use crate::probes::DEFAULT_CIRCLE_ORDER;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle() -> Vec<String> {
        DEFAULT_CIRCLE_ORDER.iter().map(|s| s.to_string()).collect()
    }

    fn s2_aggregated() -> CountMatrix {
        CountMatrix::from_csv(include_str!("../../fixtures/items_aggregated.csv")).unwrap()
    }

    fn oracle_rank(xs: &[f64]) -> Vec<f64> {
        // rank = 1 + #smaller + (#equal - 1)/2
        xs.iter()
            .map(|&x| {
                let less = xs.iter().filter(|&&y| y < x).count() as f64;
                let eq = xs.iter().filter(|&&y| y == x).count() as f64;
                1.0 + less + (eq - 1.0) / 2.0
            })
            .collect()
    }

    fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
    }

    #[test]
    fn s2_rank_correlations_match_oracle() {
        let m = s2_aggregated();
        let c = rank_correlation_matrix(&m).unwrap();
        let cols: Vec<Vec<f64>> = (0..m.n_cols())
            .map(|j| oracle_rank(&m.cells().iter().map(|r| r[j] as f64).collect::<Vec<_>>()))
            .collect();
        for i in 0..10 {
            assert_eq!(c.r[i][i], 1.0);
            for j in 0..10 {
                if i != j {
                    assert!((c.r[i][j] - oracle_pearson(&cols[i], &cols[j])).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn monotone_transform_columns_correlate_perfectly() {
        let m = CountMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["X".into(), "Y".into(), "Y".into()],
            vec!["X".into(), "Y".into()],
            vec![vec![1, 1], vec![2, 8], vec![3, 27]],
        )
        .unwrap();
        let c = rank_correlation_matrix(&m).unwrap();
        assert!((c.r[0][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_column_is_named() {
        let m = CountMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["X".into(), "Y".into()],
            vec!["X".into(), "Y".into()],
            vec![vec![1, 4], vec![2, 4]],
        )
        .unwrap();
        assert_eq!(rank_correlation_matrix(&m), Err(StructureError::ConstantColumn("Y".into())));
    }

    #[test]
    fn dissimilarity_transforms() {
        let corr = CorrelationMatrix {
            labels: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            kind: CorrelationKind::Pearson,
            r: vec![
                vec![1.0, 1.0, -1.0, 0.5],
                vec![1.0, 1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 1.0, 0.0],
                vec![0.5, 0.0, 0.0, 1.0],
            ],
        };
        let d = to_dissimilarity(&corr, DissimilarityKind::Sqrt2).d;
        assert_eq!(d[(0, 1)], 0.0);
        assert!((d[(0, 2)] - 2.0).abs() < 1e-15);
        assert!((d[(0, 3)] - 1.0).abs() < 1e-15);
        let d1 = to_dissimilarity(&corr, DissimilarityKind::OneMinus).d;
        assert!((d1[(0, 2)] - 2.0).abs() < 1e-15);
        assert!((d1[(0, 3)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sqrt2_dissimilarity_is_distance_of_standardized_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let rows = 12;
            let cells: Vec<Vec<u64>> = (0..rows).map(|_| (0..5).map(|_| rng.random_range(0..100)).collect()).collect();
            let labels: Vec<String> = (0..5).map(|j| format!("c{j}")).collect();
            let m = CountMatrix::new(
                (0..rows).map(|i| format!("r{i}")).collect(),
                (0..rows).map(|i| labels[i % 5].clone()).collect(),
                labels.clone(),
                cells.clone(),
            )
            .unwrap();
            let d = to_dissimilarity(&correlation_matrix(&m, CorrelationKind::Pearson).unwrap(), DissimilarityKind::Sqrt2);
            // z-scores with the population SD have squared norm n, so distance/sqrt(n) = sqrt(2(1-r))
            let z: Vec<Vec<f64>> = (0..5)
                .map(|j| {
                    let col: Vec<f64> = cells.iter().map(|r| r[j] as f64).collect();
                    let mu = stats::mean(&col);
                    let sd = (col.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / rows as f64).sqrt();
                    col.iter().map(|v| (v - mu) / sd).collect()
                })
                .collect();
            for i in 0..5 {
                for j in 0..5 {
                    let e = z[i].iter().zip(&z[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / (rows as f64).sqrt();
                    assert!((d.d[(i, j)] - e).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn target_geometry() {
        let t = theoretical_target(&circle());
        assert_eq!(t[0].0, "SE");
        assert!((t[0].1[0] - 1.0).abs() < 1e-15 && t[0].1[1].abs() < 1e-15);
        for k in 0..10 {
            let (a, b) = (t[k].1, t[(k + 1) % 10].1);
            let cos = a[0] * b[0] + a[1] * b[1];
            assert!((cos - 36f64.to_radians().cos()).abs() < 1e-12);
            let o = t[(k + 5) % 10].1;
            assert!((a[0] + o[0]).abs() < 1e-12 && (a[1] + o[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_circumplex_counts_fit_the_circle() {
        let circle = circle();
        let rows: Vec<Vec<u64>> = (0..10)
            .map(|i| {
                (0..10)
                    .map(|j| expected_profile(&circle[j], &circle).unwrap()[i] as u64)
                    .collect()
            })
            .collect();
        let m = CountMatrix::new(circle.clone(), circle.clone(), circle.clone(), rows).unwrap();
        let rep = structure_report(&m, &circle, &StructureOptions::default()).unwrap();
        assert!(rep.fit.phi > 0.99, "phi {}", rep.fit.phi);
        assert!((rep.fit.alienation.powi(2) + rep.fit.phi.powi(2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn target_as_input_gives_identity() {
        let t = theoretical_target(&circle());
        let x = DMatrix::from_fn(10, 2, |i, j| t[i].1[j]);
        let fit = procrustes_fit(&x, &x).unwrap();
        assert!((fit.scale - 1.0).abs() < 1e-12);
        assert!((fit.rotation[0][0] - 1.0).abs() < 1e-12 && fit.rotation[0][1].abs() < 1e-12);
        assert!(fit.translation.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn s2_structure_runs() {
        let rep = structure_report(&s2_aggregated(), &circle(), &StructureOptions::default()).unwrap();
        assert!(rep.fit.phi.is_finite() && (0.0..=1.0).contains(&rep.configuration.stress));
    }
}
