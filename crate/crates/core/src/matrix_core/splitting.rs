use super::{check_tol, IntMatrix, MatrixError, Spectrum};
use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HyperbolicityReport {
    pub hyperbolic: bool,
    /// Eigenvalue moduli with multiplicity, descending.
    pub moduli: Vec<f64>,
    pub tol: f64,
}

/// True iff every eigenvalue modulus differs from 1 by more than `tol`.
pub fn is_hyperbolic(m: &IntMatrix, tol: f64) -> Result<HyperbolicityReport, MatrixError> {
    check_tol(tol)?;
    let moduli = Spectrum::of(&m.to_q()).moduli();
    Ok(HyperbolicityReport {
        hyperbolic: moduli.iter().all(|r| (r - 1.0).abs() > tol),
        moduli,
        tol,
    })
}

/// Stable/unstable invariant subspaces of a hyperbolic matrix.
///
/// Bases are orthonormal within each subspace (not across them).
#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicSplitting {
    pub dim: usize,
    pub e_stable: Vec<Vec<f64>>,
    pub e_unstable: Vec<Vec<f64>>,
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub tol: f64,
    #[serde(skip)]
    pub(crate) source: DMatrix<f64>,
}

impl HyperbolicSplitting {
    pub fn stable_dim(&self) -> usize {
        self.e_stable.len()
    }

    pub fn unstable_dim(&self) -> usize {
        self.e_unstable.len()
    }

    pub fn source(&self) -> &DMatrix<f64> {
        &self.source
    }

    pub fn stable_basis(&self) -> DMatrix<f64> {
        columns(self.dim, &self.e_stable)
    }

    pub fn unstable_basis(&self) -> DMatrix<f64> {
        columns(self.dim, &self.e_unstable)
    }

    /// `[E_s | E_u]`: maps split coordinates to ambient coordinates.
    pub fn basis(&self) -> DMatrix<f64> {
        let mut cols = self.e_stable.clone();
        cols.extend(self.e_unstable.iter().cloned());
        columns(self.dim, &cols)
    }

    /// The source matrix restricted to `E_s`, in the stable basis.
    pub fn stable_restriction(&self) -> DMatrix<f64> {
        let e = self.stable_basis();
        e.transpose() * &self.source * e
    }

    pub fn unstable_restriction(&self) -> DMatrix<f64> {
        let e = self.unstable_basis();
        e.transpose() * &self.source * e
    }

    /// Largest `‖Mv − Π(Mv)‖/‖v‖` over basis vectors, `Π` the orthogonal
    /// projection onto the subspace containing `v`.
    pub fn invariance_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for basis in [self.stable_basis(), self.unstable_basis()] {
            if basis.ncols() == 0 {
                continue;
            }
            let proj = &basis * basis.transpose();
            for c in 0..basis.ncols() {
                let v = basis.column(c).into_owned();
                let mv = &self.source * &v;
                let off = &mv - &proj * &mv;
                worst = worst.max(off.norm() / v.norm());
            }
        }
        worst
    }
}

pub(crate) fn columns(dim: usize, cols: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, cols.len(), |r, c| cols[c][r])
}

pub fn hyperbolic_splitting(m: &IntMatrix, tol: f64) -> Result<HyperbolicSplitting, MatrixError> {
    check_tol(tol)?;
    let spec = Spectrum::of(&m.to_q());
    let moduli = spec.moduli();
    if moduli.iter().any(|r| (r - 1.0).abs() <= tol) {
        return Err(MatrixError::NotHyperbolic { moduli });
    }
    let d = m.dim();
    let a = m.to_f64();
    let eig = spec.eigenvalues();
    let stable: Vec<Complex<f64>> = eig.iter().copied().filter(|z| z.norm() < 1.0).collect();
    let unstable: Vec<Complex<f64>> = eig.iter().copied().filter(|z| z.norm() > 1.0).collect();

    let e_stable = invariant_subspace(&a, &stable)?;
    let e_unstable = invariant_subspace(&a, &unstable)?;
    let lambda_s = stable.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lambda_u = unstable.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    Ok(HyperbolicSplitting {
        dim: d,
        e_stable,
        e_unstable,
        lambda_s,
        lambda_u,
        tol,
        source: a,
    })
}

/// Kernel of `p(A)` where `p` has exactly the given roots; for a factor of
/// the characteristic polynomial coprime to its cofactor this is the sum of
/// the corresponding generalized eigenspaces.
fn invariant_subspace(a: &DMatrix<f64>, roots: &[Complex<f64>]) -> Result<Vec<Vec<f64>>, MatrixError> {
    let d = a.nrows();
    let k = roots.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == d {
        return Ok((0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect());
    }
    // real coefficients of prod (x - z), ascending.
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for &z in roots {
        let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * z;
        }
        coeffs = next;
    }
    let mut p = DMatrix::<f64>::zeros(d, d);
    for c in coeffs.iter().rev() {
        p = &p * a;
        for i in 0..d {
            p[(i, i)] += c.re;
        }
    }
    let scale = p.norm();
    if scale > 0.0 {
        p /= scale;
    }
    let svd = p.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| MatrixError::Numerical("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut basis: Vec<DVector<f64>> = order[..k]
        .iter()
        .map(|&i| v_t.row(i).transpose().into_owned())
        .collect();
    // deterministic orientation: first significant coordinate positive
    for v in basis.iter_mut() {
        if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
            if *x < 0.0 {
                *v = -&*v;
            }
        }
    }
    Ok(basis.into_iter().map(|v| v.iter().copied().collect()).collect())
}
