use super::{MatrixError, Spectrum, DEFAULT_TOL};
use crate::exact::QMatrix;
use nalgebra::DMatrix;
use num_traits::One;
use serde::Serialize;

/// Counts of Ad-eigenvalues equal to one and of modulus one for an element of SL(n).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RegularityProfile {
    pub n: usize,
    pub ad_unit_eigen_count: usize,
    pub ad_circle_eigen_count: usize,
    /// Minimum possible count in SL(n): the `n − 1` Cartan directions.
    pub ambient_minimum: usize,
    pub regular: bool,
    pub r_regular: bool,
}

/// Ad-eigenvalues of `M` are `λ_i/λ_j` for `i ≠ j` plus `n − 1` ones from the Cartan.
///
/// A ratio equals one exactly when `λ_i = λ_j`, so the unit count comes from
/// exact multiplicities; unit-modulus ratios are compared at `DEFAULT_TOL`.
pub fn regularity_profile(m: &QMatrix) -> Result<RegularityProfile, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    let det = m.det();
    if !det.is_one() {
        return Err(MatrixError::NotUnimodular {
            det: det.to_string(),
        });
    }
    let spec = Spectrum::of(m);
    let cartan = n - 1;
    let unit = cartan + spec.distinct.iter().map(|&(_, k)| k * (k - 1)).sum::<usize>();

    let moduli: Vec<f64> = spec.eigenvalues().iter().map(|z| z.norm()).collect();
    let mut circle = cartan;
    for i in 0..n {
        for j in 0..n {
            if i != j && ((moduli[i] / moduli[j]) - 1.0).abs() <= DEFAULT_TOL {
                circle += 1;
            }
        }
    }
    Ok(RegularityProfile {
        n,
        ad_unit_eigen_count: unit,
        ad_circle_eigen_count: circle,
        ambient_minimum: cartan,
        regular: unit == cartan,
        r_regular: circle == cartan,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub is_rank_one: bool,
}

/// Dimension of the real span of the vectors; rank ≤ 1 flags a rank-one factor.
pub fn rank_one_factor_test(vectors: &[Vec<f64>]) -> Result<RankReport, MatrixError> {
    let first = vectors.first().ok_or(MatrixError::Empty)?;
    let r = first.len();
    if let Some(v) = vectors.iter().find(|v| v.len() != r) {
        return Err(MatrixError::DimensionMismatch {
            expected: r,
            found: v.len(),
        });
    }
    if r == 0 {
        return Ok(RankReport {
            rank: 0,
            is_rank_one: true,
        });
    }
    let m = DMatrix::from_fn(vectors.len(), r, |i, j| vectors[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = top * 1e-10 * (vectors.len().max(r) as f64);
    let rank = if top == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > cutoff).count()
    };
    Ok(RankReport {
        rank,
        is_rank_one: rank <= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q_frac, Q};

    fn diag(entries: &[Q]) -> QMatrix {
        let n = entries.len();
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { entries[i].clone() } else { q(0) })
                    .collect()
            })
            .collect();
        QMatrix::from_rows(&rows)
    }

    #[test]
    fn cat_map_is_regular() {
        let m = QMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]);
        let p = regularity_profile(&m).unwrap();
        assert_eq!(p.ad_unit_eigen_count, 1);
        assert_eq!(p.ad_circle_eigen_count, 1);
        assert!(p.regular && p.r_regular);
    }

    #[test]
    fn identity_is_singular() {
        let p = regularity_profile(&QMatrix::identity(3)).unwrap();
        assert_eq!(p.ad_unit_eigen_count, 8);
        assert!(!p.regular && !p.r_regular);
    }

    #[test]
    fn sl3_split_element() {
        let m = diag(&[q(2), q(3), q_frac(1, 6)]);
        let p = regularity_profile(&m).unwrap();
        assert_eq!(p.ad_unit_eigen_count, 2);
        assert_eq!(p.ad_circle_eigen_count, 2);
        assert!(p.r_regular);
    }

    #[test]
    fn elliptic_is_regular_not_r_regular() {
        let m = QMatrix::from_i64_rows(&[vec![0, -1], vec![1, 0]]);
        let p = regularity_profile(&m).unwrap();
        assert!(p.regular);
        assert!(!p.r_regular);
        assert_eq!(p.ad_circle_eigen_count, 3);
    }

    #[test]
    fn det_must_be_one() {
        let m = QMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert!(matches!(
            regularity_profile(&m),
            Err(MatrixError::NotUnimodular { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        let r = rank_one_factor_test(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!((r.rank, r.is_rank_one), (1, true));
        let r = rank_one_factor_test(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!((r.rank, r.is_rank_one), (2, false));
        let r = rank_one_factor_test(&[vec![0.0, 0.0]]).unwrap();
        assert_eq!((r.rank, r.is_rank_one), (0, true));
        assert!(matches!(
            rank_one_factor_test(&[vec![1.0], vec![1.0, 2.0]]),
            Err(MatrixError::DimensionMismatch { .. })
        ));
        assert_eq!(rank_one_factor_test(&[]), Err(MatrixError::Empty));
    }
}
