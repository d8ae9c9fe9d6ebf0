//! Similarity Procrustes fit of a configuration onto a target, and Tucker's
//! congruence coefficient.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::StructureError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcrustesFit {
    /// Orthogonal map applied to the observed coordinates (rows are points).
    pub rotation: Vec<Vec<f64>>,
    pub scale: f64,
    pub translation: Vec<f64>,
    pub fitted: Vec<Vec<f64>>,
    pub phi: f64,
    pub phi_per_dim: Vec<f64>,
    pub alienation: f64,
}

/// Tucker's congruence coefficient Σxy / √(Σx² Σy²). Zero when either side is
/// all zeros.
pub fn tucker_phi(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "tucker_phi: length mismatch");
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let xx: f64 = x.iter().map(|a| a * a).sum();
    let yy: f64 = y.iter().map(|b| b * b).sum();
    if xx <= 0.0 || yy <= 0.0 {
        return 0.0;
    }
    (xy / (xx * yy).sqrt()).clamp(-1.0, 1.0)
}

pub fn alienation(phi: f64) -> f64 {
    (1.0 - phi * phi).max(0.0).sqrt()
}

fn centered(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let means: Vec<f64> = (0..m.ncols()).map(|j| m.column(j).mean()).collect();
    let c = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] - means[j]);
    (c, means)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Finds scale `s`, orthogonal `R` and translation `t` minimizing
/// ‖s·X·R + 1tᵀ − Y‖. Reflections are allowed.
pub fn procrustes_fit(observed: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<ProcrustesFit, StructureError> {
    if observed.shape() != target.shape() {
        return Err(StructureError::ShapeMismatch {
            observed: observed.shape(),
            target: target.shape(),
        });
    }
    let (xc, xm) = centered(observed);
    let (yc, ym) = centered(target);
    let cross = xc.transpose() * &yc;
    let svd = cross.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if !(smax > 0.0) || smin <= smax * 1e-10 {
        return Err(StructureError::RankDeficient);
    }
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let r = &u * &vt;
    let scale = sv.sum() / xc.norm_squared();
    let rotated = &xc * &r * scale;
    let k = observed.ncols();
    let translation: Vec<f64> = (0..k)
        .map(|j| ym[j] - scale * (0..k).map(|i| xm[i] * r[(i, j)]).sum::<f64>())
        .collect();
    let fitted = DMatrix::from_fn(observed.nrows(), k, |i, j| rotated[(i, j)] + ym[j]);
    let phi = tucker_phi(rotated.as_slice(), yc.as_slice());
    let phi_per_dim = (0..k)
        .map(|j| {
            let a: Vec<f64> = rotated.column(j).iter().copied().collect();
            let b: Vec<f64> = yc.column(j).iter().copied().collect();
            tucker_phi(&a, &b)
        })
        .collect();
    Ok(ProcrustesFit {
        rotation: rows(&r),
        scale,
        translation,
        fitted: rows(&fitted),
        phi,
        phi_per_dim,
        alienation: alienation(phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, 2, |_, _| rng.random_range(-3.0..3.0))
    }

    #[test]
    fn recovers_similarity_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = random_points(&mut rng, 8);
            let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            let rot = DMatrix::from_row_slice(2, 2, &[a.cos(), a.sin(), -a.sin() * flip, a.cos() * flip]);
            let s: f64 = rng.random_range(0.2..5.0);
            let t = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let mut y = &x * &rot * s;
            for i in 0..8 {
                y[(i, 0)] += t[0];
                y[(i, 1)] += t[1];
            }
            let fit = procrustes_fit(&x, &y).unwrap();
            assert!((fit.scale - s).abs() < 1e-9);
            assert!((fit.phi - 1.0).abs() < 1e-12);
            assert!(fit.alienation < 1e-5);
            for i in 0..2 {
                assert!((fit.translation[i] - t[i]).abs() < 1e-9);
                for j in 0..2 {
                    assert!((fit.rotation[i][j] - rot[(i, j)]).abs() < 1e-9);
                }
            }
            for i in 0..8 {
                for j in 0..2 {
                    assert!((fit.fitted[i][j] - y[(i, j)]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rotation_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_points(&mut rng, 10);
            let y = random_points(&mut rng, 10);
            let fit = procrustes_fit(&x, &y).unwrap();
            let r = DMatrix::from_fn(2, 2, |i, j| fit.rotation[i][j]);
            let rtr = r.transpose() * &r;
            assert!((rtr - DMatrix::identity(2, 2)).abs().max() < 1e-9);
            assert!(fit.phi >= 0.0 && fit.phi <= 1.0);
        }
    }

    #[test]
    fn collinear_configuration_is_rank_deficient() {
        let x = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
        let y = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        assert_eq!(procrustes_fit(&x, &y), Err(StructureError::RankDeficient));
    }

    #[test]
    fn orthogonal_vectors_have_zero_congruence() {
        assert_eq!(tucker_phi(&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]), 0.0);
        assert!((alienation(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alienation_of_reported_congruence() {
        assert!((alienation(0.918) - 0.397).abs() < 5e-4);
    }
}
