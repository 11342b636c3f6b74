//! Rational nilpotent Lie algebras given by structure constants, their
//! upper central series, and the descent of automorphisms through it.

use crate::exact::{vec_is_zero, QMatrix, Q};
use crate::matrix_core::{IntMatrix, MatrixError, Spectrum, DEFAULT_TOL};
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bracket index ({i}, {j}) out of range")]
    IndexOutOfRange { i: usize, j: usize },
    #[error("brackets [e{i}, e{j}] and [e{j}, e{i}] are not antisymmetric")]
    AntisymmetryViolation { i: usize, j: usize },
    #[error("Jacobi identity fails on (e{i}, e{j}, e{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("algebra is not nilpotent (center vanishes in dimension {dim})")]
    NotNilpotent { dim: usize },
    #[error("map does not preserve the bracket [e{i}, e{j}]")]
    BracketNotPreserved { i: usize, j: usize },
    #[error("map does not preserve the lattice")]
    LatticeNotPreserved,
    #[error("map does not preserve the center at level {level}")]
    DescentFailed { level: usize },
    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `[eᵢ, eⱼ] = Σₖ c[i][j][k] eₖ` over ℚ, with the lattice `ℤ^d` spanned by
/// the coordinate basis (or by the columns of `lattice_basis`).
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentAlgebra {
    dim: usize,
    c: Vec<Vec<Vec<Q>>>,
    lattice_basis: QMatrix,
}

impl NilpotentAlgebra {
    /// Builds from the listed brackets `[eᵢ, eⱼ]`; unlisted pairs are zero and
    /// `[eⱼ, eᵢ]` is filled in by antisymmetry.
    pub fn new(dim: usize, brackets: &[(usize, usize, Vec<Q>)]) -> Result<Self, NilError> {
        let zero = vec![Q::zero(); dim];
        let mut c = vec![vec![zero.clone(); dim]; dim];
        let mut set = vec![vec![false; dim]; dim];
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(NilError::IndexOutOfRange { i, j });
            }
            if coeffs.len() != dim {
                return Err(NilError::DimensionMismatch {
                    expected: dim,
                    found: coeffs.len(),
                });
            }
            let neg: Vec<Q> = coeffs.iter().map(|x| -x).collect();
            if (i == j && !vec_is_zero(coeffs))
                || (set[i][j] && c[i][j] != *coeffs)
                || (set[j][i] && c[j][i] != neg)
            {
                return Err(NilError::AntisymmetryViolation { i, j });
            }
            c[i][j] = coeffs.clone();
            c[j][i] = neg;
            set[i][j] = true;
            set[j][i] = true;
        }
        let alg = NilpotentAlgebra {
            dim,
            c,
            lattice_basis: QMatrix::identity(dim),
        };
        alg.check_jacobi()?;
        Ok(alg)
    }

    /// Declares the lattice as the ℤ-span of the given columns.
    pub fn with_lattice(mut self, basis: QMatrix) -> Result<Self, NilError> {
        if basis.rows() != self.dim || basis.cols() != self.dim {
            return Err(NilError::DimensionMismatch {
                expected: self.dim,
                found: basis.rows().max(basis.cols()),
            });
        }
        if basis.det().is_zero() {
            return Err(NilError::LatticeNotPreserved);
        }
        self.lattice_basis = basis;
        Ok(self)
    }

    pub fn abelian(dim: usize) -> Self {
        NilpotentAlgebra::new(dim, &[]).expect("abelian algebra is valid")
    }

    /// `[e₀, e₁] = e₂`.
    pub fn heisenberg() -> Self {
        NilpotentAlgebra::new(3, &[(0, 1, unit(3, 2))]).expect("heisenberg algebra is valid")
    }

    /// `[e₀, eᵢ] = eᵢ₊₁` for `1 ≤ i < n − 1`.
    pub fn filiform(n: usize) -> Self {
        let br: Vec<_> = (1..n.saturating_sub(1)).map(|i| (0, i, unit(n, i + 1))).collect();
        NilpotentAlgebra::new(n, &br).expect("filiform algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Q>>] {
        &self.c
    }

    pub fn lattice_basis(&self) -> &QMatrix {
        &self.lattice_basis
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let w = xi * yj;
                for (o, ck) in out.iter_mut().zip(&self.c[i][j]) {
                    if !ck.is_zero() {
                        *o += &w * ck;
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<(), NilError> {
        let d = self.dim;
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (ei, ej, ek) = (unit(d, i), unit(d, j), unit(d, k));
                    let a = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let b = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let c = self.bracket(&ek, &self.bracket(&ei, &ej));
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(NilError::JacobiViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Basis of `{x : [x, eⱼ] = 0 ∀j}`, in reduced echelon form.
    pub fn center(&self) -> Vec<Vec<Q>> {
        let d = self.dim;
        let mut m = QMatrix::zeros(d * d, d);
        for j in 0..d {
            for k in 0..d {
                for i in 0..d {
                    m[(j * d + k, i)] = self.c[i][j][k].clone();
                }
            }
        }
        let null = m.nullspace();
        if null.is_empty() {
            return null;
        }
        let (r, pivots) = QMatrix::from_rows(&null).rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    /// Dimensions of `𝔫 ⊃ [𝔫,𝔫] ⊃ [𝔫,[𝔫,𝔫]] ⊃ …` until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let d = self.dim;
        let mut current: Vec<Vec<Q>> = (0..d).map(|i| unit(d, i)).collect();
        let mut dims = vec![d];
        loop {
            let mut gens = Vec::new();
            for x in &current {
                for i in 0..d {
                    gens.push(self.bracket(&unit(d, i), x));
                }
            }
            let next: Vec<Vec<Q>> = if gens.is_empty() {
                Vec::new()
            } else {
                let (r, p) = QMatrix::from_rows(&gens).rref();
                (0..p.len()).map(|i| r.row(i).to_vec()).collect()
            };
            if next.len() == current.len() {
                return dims;
            }
            dims.push(next.len());
            if next.is_empty() {
                return dims;
            }
            current = next;
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// One step `𝔫ᵢ → 𝔫ᵢ₊₁ = 𝔫ᵢ / Z(𝔫ᵢ)`.
#[derive(Clone, Debug)]
pub struct Layer {
    pub algebra: NilpotentAlgebra,
    pub center_dim: usize,
    /// Columns span the center, in this layer's coordinates.
    pub center_basis: QMatrix,
    /// Surjection onto the next layer with kernel the center.
    pub projection: QMatrix,
    /// Right inverse of `projection` onto the chosen complement of the center.
    pub section: QMatrix,
    /// Left inverse of `center_basis` vanishing on the complement.
    center_coords: QMatrix,
}

#[derive(Clone, Debug)]
pub struct CentralTower {
    pub layers: Vec<Layer>,
}

impl CentralTower {
    /// Nilpotency degree `r`: number of quotient steps to reach zero.
    pub fn degree(&self) -> usize {
        self.layers.len()
    }

    pub fn center_dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.center_dim).collect()
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.layers.iter().map(|l| l.algebra.dim).collect();
        v.push(0);
        v
    }
}

fn quotient(alg: &NilpotentAlgebra) -> Result<Layer, NilError> {
    let d = alg.dim;
    let z = alg.center();
    if z.is_empty() {
        return Err(NilError::NotNilpotent { dim: d });
    }
    let zq = QMatrix::from_rows(&z);
    let (_, pivots) = zq.rref();
    let complement: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let k = z.len();
    let mut cols = z.clone();
    cols.extend(complement.iter().map(|&c| unit(d, c)));
    let b = QMatrix::from_columns(d, &cols);
    let b_inv = b.inverse().expect("center plus complement is a basis");
    let q = complement.len();
    let mut projection = QMatrix::zeros(q, d);
    let mut center_coords = QMatrix::zeros(k, d);
    for c in 0..d {
        for r in 0..k {
            center_coords[(r, c)] = b_inv[(r, c)].clone();
        }
        for r in 0..q {
            projection[(r, c)] = b_inv[(k + r, c)].clone();
        }
    }
    let section = QMatrix::from_columns(d, &complement.iter().map(|&c| unit(d, c)).collect::<Vec<_>>());
    Ok(Layer {
        algebra: alg.clone(),
        center_dim: k,
        center_basis: QMatrix::from_columns(d, &z),
        projection,
        section,
        center_coords,
    })
}

/// Upper central series: quotient by the center until nothing is left.
pub fn central_series(alg: &NilpotentAlgebra) -> Result<CentralTower, NilError> {
    let mut layers = Vec::new();
    let mut current = alg.clone();
    while current.dim > 0 {
        let layer = quotient(&current)?;
        let q = layer.projection.rows();
        let mut brackets = Vec::new();
        for a in 0..q {
            for b in a + 1..q {
                let v = current.bracket(&layer.section.column(a), &layer.section.column(b));
                let pv = layer.projection.mul_vec(&v);
                if !vec_is_zero(&pv) {
                    brackets.push((a, b, pv));
                }
            }
        }
        let lattice = &(&layer.projection * &current.lattice_basis) * &layer.section;
        let next = NilpotentAlgebra::new(q, &brackets)?;
        let next = if q > 0 && !lattice.det().is_zero() {
            next.with_lattice(lattice)?
        } else {
            next
        };
        layers.push(layer);
        current = next;
    }
    Ok(CentralTower { layers })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraAutomorphism {
    pub matrix: QMatrix,
}

/// Validates `φ` as a bracket- and lattice-preserving automorphism.
pub fn check_automorphism(alg: &NilpotentAlgebra, phi: &QMatrix) -> Result<AlgebraAutomorphism, NilError> {
    let d = alg.dim;
    if phi.rows() != d || phi.cols() != d {
        return Err(NilError::DimensionMismatch {
            expected: d,
            found: if phi.rows() != d { phi.rows() } else { phi.cols() },
        });
    }
    let cols: Vec<Vec<Q>> = (0..d).map(|i| phi.column(i)).collect();
    for i in 0..d {
        for j in i + 1..d {
            let lhs = phi.mul_vec(&alg.c[i][j]);
            let rhs = alg.bracket(&cols[i], &cols[j]);
            if lhs != rhs {
                return Err(NilError::BracketNotPreserved { i, j });
            }
        }
    }
    let l = &alg.lattice_basis;
    let l_inv = l.inverse().ok_or(NilError::LatticeNotPreserved)?;
    let in_lattice = &(&l_inv * phi) * l;
    let det = in_lattice.det();
    if !in_lattice.is_integral() || !(det.is_one() || (-det).is_one()) {
        return Err(NilError::LatticeNotPreserved);
    }
    Ok(AlgebraAutomorphism { matrix: phi.clone() })
}

/// Induced maps `φ₀ = φ, φᵢ₊₁ = Pᵢ φᵢ Sᵢ` on every layer, each checked against `Pᵢ φᵢ = φᵢ₊₁ Pᵢ`.
fn descend_all(tower: &CentralTower, phi: &QMatrix) -> Result<Vec<QMatrix>, NilError> {
    let mut maps = vec![phi.clone()];
    for (i, layer) in tower.layers.iter().enumerate() {
        let cur = &maps[i];
        let next = &(&layer.projection * cur) * &layer.section;
        let lhs = &layer.projection * cur;
        let rhs = &next * &layer.projection;
        if lhs != rhs {
            return Err(NilError::DescentFailed { level: i });
        }
        maps.push(next);
    }
    Ok(maps)
}

pub fn descend_automorphism(
    alg: &NilpotentAlgebra,
    phi: &AlgebraAutomorphism,
    level: usize,
) -> Result<QMatrix, NilError> {
    let tower = central_series(alg)?;
    if level > tower.degree() {
        return Err(NilError::LevelOutOfRange {
            level,
            max: tower.degree(),
        });
    }
    let mut maps = descend_all(&tower, &phi.matrix)?;
    Ok(maps.swap_remove(level))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LayerReport {
    pub level: usize,
    pub layer_dim: usize,
    pub center_dim: usize,
    pub center_moduli: Vec<f64>,
    pub hyperbolic: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LayerHyperbolicity {
    pub layers: Vec<LayerReport>,
    /// Every layer's center map is hyperbolic.
    pub hyperbolic: bool,
}

/// Eigenvalue moduli of `φᵢ` restricted to each center `Zᵢ`.
pub fn layer_hyperbolicity(alg: &NilpotentAlgebra, phi: &AlgebraAutomorphism) -> Result<LayerHyperbolicity, NilError> {
    layer_hyperbolicity_tol(alg, phi, DEFAULT_TOL)
}

pub fn layer_hyperbolicity_tol(
    alg: &NilpotentAlgebra,
    phi: &AlgebraAutomorphism,
    tol: f64,
) -> Result<LayerHyperbolicity, NilError> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(MatrixError::ToleranceOutOfRange(tol).into());
    }
    let tower = central_series(alg)?;
    let maps = descend_all(&tower, &phi.matrix)?;
    let mut layers = Vec::new();
    for (i, layer) in tower.layers.iter().enumerate() {
        let restricted = &(&layer.center_coords * &maps[i]) * &layer.center_basis;
        let moduli = Spectrum::of(&restricted).moduli();
        layers.push(LayerReport {
            level: i,
            layer_dim: layer.algebra.dim,
            center_dim: layer.center_dim,
            hyperbolic: moduli.iter().all(|m| (m - 1.0).abs() > tol),
            center_moduli: moduli,
        });
    }
    Ok(LayerHyperbolicity {
        hyperbolic: layers.iter().all(|l| l.hyperbolic),
        layers,
    })
}

/// `e₀, e₁ ↦ B(e₀, e₁)`, `e₂ ↦ det(B) e₂` on the Heisenberg algebra.
pub fn heisenberg_automorphism(b: &IntMatrix) -> Result<QMatrix, NilError> {
    if b.dim() != 2 {
        return Err(NilError::DimensionMismatch {
            expected: 2,
            found: b.dim(),
        });
    }
    let bq = b.to_q();
    let mut m = QMatrix::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = bq[(i, j)].clone();
        }
    }
    m[(2, 2)] = bq.det();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q_frac};

    #[test]
    fn towers() {
        let ab = central_series(&NilpotentAlgebra::abelian(2)).unwrap();
        assert_eq!(ab.degree(), 1);
        assert_eq!(ab.center_dims(), vec![2]);

        let h = central_series(&NilpotentAlgebra::heisenberg()).unwrap();
        assert_eq!(h.degree(), 2);
        assert_eq!(h.center_dims(), vec![1, 2]);
        assert_eq!(h.layers[0].center_basis.column(0), vec![q(0), q(0), q(1)]);

        let f = central_series(&NilpotentAlgebra::filiform(4)).unwrap();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.center_dims().iter().sum::<usize>(), 4);
        assert_eq!(NilpotentAlgebra::filiform(4).lower_central_series(), vec![4, 2, 1, 0]);
    }

    #[test]
    fn rejects_bad_structure_constants() {
        // sl2-like: [e0,e1] = e2, [e2,e0] = 2e0, [e2,e1] = -2e1 is not nilpotent
        let sl2 = NilpotentAlgebra::new(
            3,
            &[
                (0, 1, vec![q(0), q(0), q(1)]),
                (2, 0, vec![q(2), q(0), q(0)]),
                (2, 1, vec![q(0), q(-2), q(0)]),
            ],
        )
        .unwrap();
        assert_eq!(central_series(&sl2).unwrap_err(), NilError::NotNilpotent { dim: 3 });

        let bad = NilpotentAlgebra::new(3, &[(0, 1, vec![q(0), q(0), q(1)]), (1, 0, vec![q(0), q(0), q(1)])]);
        assert_eq!(bad.unwrap_err(), NilError::AntisymmetryViolation { i: 1, j: 0 });

        // [e0,e1] = e1, [e1,e2] = e0: fails Jacobi
        let jac = NilpotentAlgebra::new(
            3,
            &[(0, 1, vec![q(0), q(1), q(0)]), (1, 2, vec![q(1), q(0), q(0)])],
        );
        assert!(matches!(jac, Err(NilError::JacobiViolation { .. })));
    }

    #[test]
    fn automorphism_checks() {
        let h = NilpotentAlgebra::heisenberg();
        let diag = QMatrix::from_rows(&[
            vec![q(2), q(0), q(0)],
            vec![q(0), q_frac(1, 2), q(0)],
            vec![q(0), q(0), q(1)],
        ]);
        assert_eq!(check_automorphism(&h, &diag), Err(NilError::LatticeNotPreserved));

        let cat = IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap();
        let phi = heisenberg_automorphism(&cat).unwrap();
        assert!(check_automorphism(&h, &phi).is_ok());
        assert!(check_automorphism(&h, &QMatrix::identity(3)).is_ok());

        let mut wrong = phi.clone();
        wrong[(2, 2)] = q(-1);
        assert_eq!(
            check_automorphism(&h, &wrong),
            Err(NilError::BracketNotPreserved { i: 0, j: 1 })
        );
    }

    #[test]
    fn descent_to_abelianization() {
        let h = NilpotentAlgebra::heisenberg();
        let cat = IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap();
        let phi = check_automorphism(&h, &heisenberg_automorphism(&cat).unwrap()).unwrap();
        assert_eq!(descend_automorphism(&h, &phi, 1).unwrap(), cat.to_q());
        assert_eq!(descend_automorphism(&h, &phi, 0).unwrap(), phi.matrix);
        let top = descend_automorphism(&h, &phi, 2).unwrap();
        assert_eq!((top.rows(), top.cols()), (0, 0));
        assert!(matches!(
            descend_automorphism(&h, &phi, 3),
            Err(NilError::LevelOutOfRange { level: 3, max: 2 })
        ));
    }

    #[test]
    fn heisenberg_center_is_never_hyperbolic() {
        let h = NilpotentAlgebra::heisenberg();
        let cat = IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap();
        let phi = check_automorphism(&h, &heisenberg_automorphism(&cat).unwrap()).unwrap();
        let r = layer_hyperbolicity(&h, &phi).unwrap();
        assert!(!r.layers[0].hyperbolic);
        assert_eq!(r.layers[0].center_moduli, vec![1.0]);
        assert!(r.layers[1].hyperbolic);
        assert!(!r.hyperbolic);
    }

    #[test]
    fn abelian_torus() {
        let t2 = NilpotentAlgebra::abelian(2);
        let cat = check_automorphism(&t2, &QMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]])).unwrap();
        assert!(layer_hyperbolicity(&t2, &cat).unwrap().hyperbolic);
        let id = check_automorphism(&t2, &QMatrix::identity(2)).unwrap();
        assert!(!layer_hyperbolicity(&t2, &id).unwrap().hyperbolic);
    }
}
