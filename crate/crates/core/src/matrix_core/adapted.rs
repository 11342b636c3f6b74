use super::{HyperbolicSplitting, MatrixError};
use nalgebra::DMatrix;
use serde::Serialize;

/// Inner-product norm in which the source matrix contracts `E^s` and its
/// inverse contracts `E^u`, both by at most `lambda` per step.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedNorm {
    pub gram: Vec<Vec<f64>>,
    /// Achieved one-step rate (operator norm of the restricted blocks).
    pub lambda: f64,
    /// `max(lambda_s, 1/lambda_u)·(1 + margin)`, the rate the construction targets.
    pub bound: f64,
    pub margin: f64,
    pub stable_dim: usize,
    #[serde(skip)]
    gram_m: DMatrix<f64>,
    #[serde(skip)]
    coord: DMatrix<f64>,
    #[serde(skip)]
    coord_inv: DMatrix<f64>,
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Gram matrix `G` with `‖S v‖_G ≤ rho ‖v‖_G`, assuming spectral radius of `S` below `rho`.
fn block_gram(s: &DMatrix<f64>, rho: f64) -> DMatrix<f64> {
    let k = s.nrows();
    if spectral_norm(s) <= rho {
        return DMatrix::identity(k, k);
    }
    let scaled = s / rho;
    let mut power = DMatrix::identity(k, k);
    let mut g = DMatrix::zeros(k, k);
    for _ in 0..100_000 {
        g += power.transpose() * &power;
        power = &scaled * power;
        if spectral_norm(&power) <= 1.0 {
            break;
        }
    }
    g
}

/// Upper-triangular `R` with `G = Rᵀ R`, so `‖v‖_G = ‖R v‖`.
fn gram_factor(g: &DMatrix<f64>) -> Result<DMatrix<f64>, MatrixError> {
    if g.is_empty() {
        return Ok(g.clone());
    }
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| MatrixError::Numerical("gram matrix not positive definite".into()))?;
    Ok(chol.l().transpose())
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows() + b.nrows();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

pub fn adapted_norm(split: &HyperbolicSplitting, margin: f64) -> Result<AdaptedNorm, MatrixError> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(MatrixError::ToleranceOutOfRange(margin));
    }
    let base = split.lambda_s.max(1.0 / split.lambda_u);
    let rho = base * (1.0 + margin);
    if rho >= 1.0 {
        return Err(MatrixError::MarginTooLarge { rate: rho });
    }
    let a_s = split.stable_restriction();
    let a_u = split.unstable_restriction();
    let a_u_inv = if a_u.is_empty() {
        a_u.clone()
    } else {
        a_u.clone()
            .try_inverse()
            .ok_or_else(|| MatrixError::Numerical("singular unstable block".into()))?
    };
    let r_s = gram_factor(&block_gram(&a_s, rho))?;
    let r_u = gram_factor(&block_gram(&a_u_inv, rho))?;

    let achieved = |r: &DMatrix<f64>, s: &DMatrix<f64>| -> Result<f64, MatrixError> {
        if r.is_empty() {
            return Ok(0.0);
        }
        let r_inv = r
            .clone()
            .try_inverse()
            .ok_or_else(|| MatrixError::Numerical("singular gram factor".into()))?;
        Ok(spectral_norm(&(r * s * r_inv)))
    };
    let lambda = achieved(&r_s, &a_s)?.max(achieved(&r_u, &a_u_inv)?);

    let p = split.basis();
    let p_inv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| MatrixError::Numerical("splitting basis is singular".into()))?;
    let r = block_diag(&r_s, &r_u);
    let coord = &r * &p_inv;
    let coord_inv = &p * r.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(r.nrows(), r.ncols()));
    let gram_m = coord.transpose() * &coord;
    let gram_m = (&gram_m + gram_m.transpose()) * 0.5;

    let norm = AdaptedNorm {
        gram: (0..gram_m.nrows())
            .map(|i| gram_m.row(i).iter().copied().collect())
            .collect(),
        lambda,
        bound: rho,
        margin,
        stable_dim: split.stable_dim(),
        gram_m,
        coord,
        coord_inv,
    };
    let worst = norm.basis_certificate(split)?;
    if worst > lambda * (1.0 + 1e-9) + 1e-12 || lambda >= 1.0 {
        return Err(MatrixError::Numerical(format!(
            "adapted norm certificate failed: ratio {worst} > {lambda}"
        )));
    }
    Ok(norm)
}

impl AdaptedNorm {
    pub fn gram_matrix(&self) -> &DMatrix<f64> {
        &self.gram_m
    }

    /// Map from ambient coordinates to adapted coordinates, stable block first.
    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coord
    }

    pub fn coordinates_inverse(&self) -> &DMatrix<f64> {
        &self.coord_inv
    }

    pub fn dim(&self) -> usize {
        self.coord.nrows()
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        let z = self.to_adapted(v);
        z.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_adapted(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.coord[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `(‖v_s‖, ‖v_u‖)` in the adapted coordinates.
    pub fn components(&self, v: &[f64]) -> (f64, f64) {
        let z = self.to_adapted(v);
        let k = self.stable_dim;
        let s = z[..k].iter().map(|x| x * x).sum::<f64>().sqrt();
        let u = z[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        (s, u)
    }

    /// `max(‖v_s‖, ‖v_u‖)`.
    pub fn box_norm(&self, v: &[f64]) -> f64 {
        let (s, u) = self.components(v);
        s.max(u)
    }

    /// `‖coord‖·‖coord⁻¹‖`, the distortion of the adapted norm against the Euclidean one.
    pub fn condition(&self) -> f64 {
        spectral_norm(&self.coord) * spectral_norm(&self.coord_inv)
    }

    /// Largest observed `‖Mv‖/‖v‖` on stable basis vectors and `‖M⁻¹v‖/‖v‖` on unstable ones.
    pub fn basis_certificate(&self, split: &HyperbolicSplitting) -> Result<f64, MatrixError> {
        let m = split.source();
        let m_inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| MatrixError::Numerical("singular matrix".into()))?;
        let mut worst: f64 = 0.0;
        for (vs, op) in [(&split.e_stable, m), (&split.e_unstable, &m_inv)] {
            for v in vs {
                let image: Vec<f64> = (0..v.len())
                    .map(|i| (0..v.len()).map(|j| op[(i, j)] * v[j]).sum())
                    .collect();
                worst = worst.max(self.norm(&image) / self.norm(v));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::{hyperbolic_splitting, IntMatrix};

    fn split(rows: &[Vec<i64>]) -> HyperbolicSplitting {
        hyperbolic_splitting(&IntMatrix::from_i64(rows).unwrap(), 1e-9).unwrap()
    }

    #[test]
    fn symmetric_is_already_adapted() {
        let s = split(&[vec![2, 1], vec![1, 1]]);
        let n = adapted_norm(&s, 0.01).unwrap();
        let lam = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((n.lambda - lam).abs() < 1e-12);
        assert!(n.bound <= lam * 1.01 + 1e-15);
        // gram is the identity because the eigenbasis is orthonormal
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((n.gram[i][j] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn squared_cat_map_rate() {
        let s = split(&[vec![5, 3], vec![3, 2]]);
        let n = adapted_norm(&s, 0.01).unwrap();
        let lam = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((n.lambda - lam * lam).abs() < 1e-12);
    }

    #[test]
    fn non_normal_block_gets_weighted_gram() {
        // [[A, I], [0, A]] for the cat map A: both restricted blocks are Jordan
        let s = split(&[
            vec![2, 1, 1, 0],
            vec![1, 1, 0, 1],
            vec![0, 0, 2, 1],
            vec![0, 0, 1, 1],
        ]);
        assert_eq!(s.stable_dim(), 2);
        let n = adapted_norm(&s, 0.05).unwrap();
        assert!(n.lambda < 1.0);
        assert!(n.lambda <= n.bound * (1.0 + 1e-9));
        assert!(n.basis_certificate(&s).unwrap() <= n.lambda * (1.0 + 1e-9));
    }

    #[test]
    fn margin_too_large() {
        let s = split(&[vec![1, 1], vec![1, 2]]);
        assert!(adapted_norm(&s, 0.99).is_ok());
        // companion of x^3 - x - 1: complex pair of modulus ≈ 0.869
        let weak = split(&[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]);
        assert!(adapted_norm(&weak, 0.1).is_ok());
        assert!(matches!(
            adapted_norm(&weak, 0.2),
            Err(MatrixError::MarginTooLarge { .. })
        ));
    }
}
