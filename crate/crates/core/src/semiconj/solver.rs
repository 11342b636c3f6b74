use super::field::{node_point, PeriodicDisplacement, PeriodicField};
use super::linalg::{from_dmatrix, mat_mul, mat_vec, mat_vec_n, torus_dist};
use super::map::{PreimageMethod, TorusMap};
use super::{int_to_mat, Mat, Pt, SemiconjError, MAX_DIM, MAX_GRID, MAX_NODES};
use crate::matrix_core::{adapted_norm, hyperbolic_splitting, HyperbolicSplitting, IntMatrix, MatrixError, DEFAULT_TOL};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

/// Margin used for the adapted norm that fixes the truncation rate.
pub const ADAPTED_MARGIN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_terms: usize,
    /// Nodes per axis of the output grid.
    pub grid: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_terms: 200,
            grid: 64,
        }
    }
}

/// Truncated two-sided correction series for `f = A + u`.
pub struct Corrector<'a> {
    map: TorusMap<'a>,
    terms: usize,
    /// `E_u A_u^{-(j+1)} L_u`, `j = 0..K`.
    unstable_ops: Vec<Mat>,
    /// `E_s A_s^{j-1} L_s`, `j = 1..=K`.
    stable_ops: Vec<Mat>,
    splitting: HyperbolicSplitting,
    rate: f64,
    kappa: f64,
}

fn check_dims(a: &IntMatrix, u: &dyn PeriodicField) -> Result<usize, SemiconjError> {
    let d = a.dim();
    if u.dim() != d {
        return Err(SemiconjError::DimensionMismatch {
            expected: d,
            found: u.dim(),
        });
    }
    if d == 0 || d > MAX_DIM {
        return Err(SemiconjError::DimensionTooLarge { dim: d });
    }
    if !a.is_unimodular() {
        return Err(SemiconjError::Matrix(MatrixError::NotUnimodular {
            det: a.det().to_string(),
        }));
    }
    Ok(d)
}

fn split_err(e: MatrixError) -> SemiconjError {
    match e {
        MatrixError::NotHyperbolic { moduli } => SemiconjError::NotHyperbolic { moduli },
        other => SemiconjError::Matrix(other),
    }
}

fn block(m: &DMatrix<f64>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> DMatrix<f64> {
    m.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned()
}

impl<'a> Corrector<'a> {
    pub fn new(a: &IntMatrix, u: &'a dyn PeriodicField, tol: f64, max_terms: usize) -> Result<Self, SemiconjError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(SemiconjError::InvalidTolerance(tol));
        }
        let d = check_dims(a, u)?;
        let splitting = hyperbolic_splitting(a, DEFAULT_TOL).map_err(split_err)?;
        let adapted = adapted_norm(&splitting, ADAPTED_MARGIN).map_err(split_err)?;
        let k = splitting.stable_dim();
        let coord = adapted.coordinates();
        let coord_inv = adapted.coordinates_inverse();
        let spec = |m: &DMatrix<f64>| if m.is_empty() { 0.0 } else { m.singular_values().max() };
        let kappa_s = spec(&block(coord_inv, 0..d, 0..k)) * spec(&block(coord, 0..k, 0..d));
        let kappa_u = spec(&block(coord_inv, 0..d, k..d)) * spec(&block(coord, k..d, 0..d));
        let kappa = kappa_s.max(kappa_u).max(f64::MIN_POSITIVE);
        let rate = adapted.lambda;

        let sup = u.sup_bound();
        let terms = if sup == 0.0 {
            0
        } else {
            // κ·sup·λ^K/(1−λ) ≤ tol/4 bounds each tail
            let target = tol / 4.0 * (1.0 - rate) / (kappa * sup);
            if target >= 1.0 {
                0
            } else {
                let est = (target.ln() / rate.ln()).ceil();
                if !est.is_finite() || est > max_terms as f64 {
                    return Err(SemiconjError::Budget {
                        needed: if est.is_finite() { est as usize } else { usize::MAX },
                        max_terms,
                    });
                }
                est as usize
            }
        };

        let mut map = TorusMap::new(int_to_mat(a), d, u).ok_or_else(|| {
            SemiconjError::Matrix(MatrixError::Numerical("matrix not invertible".into()))
        })?;
        if terms > 0 && d <= 3 {
            map = map.with_seed_table(if d == 3 { 32 } else { 256 });
        }

        let p = splitting.basis();
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| SemiconjError::Matrix(MatrixError::Numerical("singular splitting basis".into())))?;
        let e_s = block(&p, 0..d, 0..k);
        let e_u = block(&p, 0..d, k..d);
        let l_s = block(&p_inv, 0..k, 0..d);
        let l_u = block(&p_inv, k..d, 0..d);
        let a_s = splitting.stable_restriction();
        let a_u_inv = splitting
            .unstable_restriction()
            .try_inverse()
            .unwrap_or_else(|| DMatrix::zeros(d - k, d - k));

        let mut unstable_ops = Vec::with_capacity(terms);
        let mut power = a_u_inv.clone();
        for _ in 0..terms {
            unstable_ops.push(from_dmatrix(&(&e_u * &power * &l_u)));
            power = &a_u_inv * power;
        }
        let mut stable_ops = Vec::with_capacity(terms);
        let mut power = DMatrix::identity(k, k);
        for _ in 0..terms {
            stable_ops.push(from_dmatrix(&(&e_s * &power * &l_s)));
            power = &a_s * power;
        }

        Ok(Corrector {
            map,
            terms,
            unstable_ops,
            stable_ops,
            splitting,
            rate,
            kappa,
        })
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn map(&self) -> &TorusMap<'a> {
        &self.map
    }

    pub fn splitting(&self) -> &HyperbolicSplitting {
        &self.splitting
    }

    /// Adapted-norm contraction rate used for truncation.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `w(x)`; fails only if a preimage iteration does not converge.
    pub fn eval(&self, x: &Pt) -> Result<Pt, SemiconjError> {
        self.orbit_eval(x, false).map(|o| o.w)
    }

    /// `w(x)`, `f(x)` and `w(f(x))` from one two-sided orbit of `x`: the forward
    /// orbit of `f(x)` is the shifted orbit of `x`, and its backward orbit starts at `x`.
    pub fn eval_with_image(&self, x: &Pt) -> Result<OrbitValues, SemiconjError> {
        self.orbit_eval(x, true)
    }

    fn orbit_eval(&self, x: &Pt, shifted: bool) -> Result<OrbitValues, SemiconjError> {
        match self.map.dim() {
            1 => self.orbit_eval_n::<1>(x, shifted),
            2 => self.orbit_eval_n::<2>(x, shifted),
            3 => self.orbit_eval_n::<3>(x, shifted),
            _ => self.orbit_eval_n::<4>(x, shifted),
        }
    }

    fn orbit_eval_n<const D: usize>(&self, x: &Pt, shifted: bool) -> Result<OrbitValues, SemiconjError> {
        #[inline(always)]
        fn add<const D: usize>(acc: &mut Pt, op: &Mat, v: &Pt, sign: f64) {
            let t = mat_vec_n::<D>(op, v);
            for i in 0..D {
                acc[i] += sign * t[i];
            }
        }
        let k = self.terms;
        let mut w = [0.0; MAX_DIM];
        let mut wf = [0.0; MAX_DIM];

        let (fx, u_x) = self.map.step_n::<D>(x);
        let mut p = fx;
        let mut u = u_x;
        for j in 0..k {
            add::<D>(&mut w, &self.unstable_ops[j], &u, 1.0);
            if j + 1 < k || shifted {
                let (next, u_next) = self.map.step_n::<D>(&p);
                if shifted {
                    add::<D>(&mut wf, &self.unstable_ops[j], &u_next, 1.0);
                }
                p = next;
                u = u_next;
            }
        }
        if shifted && k > 0 {
            add::<D>(&mut wf, &self.stable_ops[0], &u_x, -1.0);
        }
        let mut p = *x;
        for j in 0..k {
            let (q, u) = self
                .map
                .preimage_n::<D>(&p)
                .ok_or_else(|| SemiconjError::NotInvertible { point: x[..D].to_vec() })?;
            p = q;
            add::<D>(&mut w, &self.stable_ops[j], &u, -1.0);
            if shifted && j + 1 < k {
                add::<D>(&mut wf, &self.stable_ops[j + 1], &u, -1.0);
            }
        }
        Ok(OrbitValues {
            w,
            image: fx,
            w_image: wf,
        })
    }

    /// Checks that `f` is a homeomorphism: globally when `‖A⁻¹‖·Lip(u) < 1`,
    /// otherwise by a consistent Jacobian sign and converging preimages at every node.
    pub fn check_invertible(&self, grid: usize) -> Result<(), SemiconjError> {
        if self.map.contraction_factor() < 1.0 {
            return Ok(());
        }
        let d = self.map.dim();
        let count = grid.pow(d as u32);
        let sign = super::linalg::det(&self.map.derivative(&[0.0; MAX_DIM]), d).signum();
        let bad = (0..count).into_par_iter().find_first(|&idx| {
            let x = node_point(d, grid, idx);
            let det = super::linalg::det(&self.map.derivative(&x), d);
            if det.signum() != sign || det == 0.0 {
                return true;
            }
            match self.map.preimage(&x, PreimageMethod::Newton) {
                Some(p) => torus_dist(&self.map.forward(&p), &x, d) > 1e-10,
                None => true,
            }
        });
        match bad {
            Some(idx) => Err(SemiconjError::NotInvertible {
                point: node_point(d, grid, idx)[..d].to_vec(),
            }),
            None => Ok(()),
        }
    }
}

/// Corrector values along one orbit step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitValues {
    pub w: Pt,
    /// `f(x)`, reduced to `[0,1)^d`.
    pub image: Pt,
    /// `w(f(x))`; only filled by [`Corrector::eval_with_image`].
    pub w_image: Pt,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemiconjugacySolution {
    /// Corrector `w`, so `h = id + w`.
    pub w: PeriodicDisplacement,
    pub residual_sup: f64,
    pub series_terms_used: usize,
    pub splitting: HyperbolicSplitting,
    pub tol: f64,
    pub verification_points: usize,
    /// Adapted-norm rate `λ` and constant `κ` in the truncation bound.
    pub rate: f64,
    pub kappa: f64,
    pub contraction_factor: f64,
}

pub fn solve_semiconjugacy(
    a: &IntMatrix,
    u: &dyn PeriodicField,
    opts: &SolveOptions,
) -> Result<SemiconjugacySolution, SemiconjError> {
    let d = check_dims(a, u)?;
    let n = opts.grid;
    if n == 0 || n > MAX_GRID {
        return Err(SemiconjError::GridTooLarge { n, max: MAX_GRID });
    }
    let nodes = n.checked_pow(d as u32).filter(|&c| c <= MAX_NODES);
    let Some(_) = nodes else {
        return Err(SemiconjError::GridTooLarge { n, max: MAX_GRID });
    };
    let corr = Corrector::new(a, u, opts.tol, opts.max_terms)?;
    corr.check_invertible(n)?;

    // the output grid is the even-index subgrid of the verification grid
    let fine = 2 * n;
    let fine_count = fine.pow(d as u32);
    let evals: Vec<(Pt, f64)> = (0..fine_count)
        .into_par_iter()
        .map(|idx| {
            let x = node_point(d, fine, idx);
            let o = corr.eval_with_image(&x)?;
            Ok((o.w, orbit_residual(&corr, &x, &o)))
        })
        .collect::<Result<_, SemiconjError>>()?;
    let residual_sup = evals.iter().map(|e| e.1).fold(0.0, f64::max);
    let values: Vec<Pt> = (0..n.pow(d as u32))
        .map(|idx| {
            let mut rest = idx;
            let mut flat = 0;
            let mut scale = 1;
            for _ in 0..d {
                flat += 2 * (rest % n) * scale;
                rest /= n;
                scale *= fine;
            }
            evals[flat].0
        })
        .collect();
    let w = PeriodicDisplacement::from_values(d, n, values).map_err(SemiconjError::Field)?;
    if residual_sup > opts.tol {
        return Err(SemiconjError::ResidualTooLarge {
            residual: residual_sup,
            tol: opts.tol,
        });
    }
    Ok(SemiconjugacySolution {
        w,
        residual_sup,
        series_terms_used: corr.terms,
        splitting: corr.splitting.clone(),
        tol: opts.tol,
        verification_points: fine_count,
        rate: corr.rate,
        kappa: corr.kappa,
        contraction_factor: corr.map.contraction_factor(),
    })
}

fn orbit_residual(corr: &Corrector<'_>, x: &Pt, o: &OrbitValues) -> f64 {
    let d = corr.map.dim();
    let mut h = *x;
    let mut rhs = o.image;
    for i in 0..d {
        h[i] += o.w[i];
        rhs[i] += o.w_image[i];
    }
    torus_dist(&mat_vec(corr.map.matrix(), &h, d), &rhs, d)
}

/// `sup_x dist(A(x + w(x)), f(x) + w(f(x)))` over `samples`, computed directly
/// from `A`, `u` and `w` without any solver state.
pub fn residual<W>(a: &IntMatrix, u: &dyn PeriodicField, w: W, samples: &[Pt]) -> Result<f64, SemiconjError>
where
    W: Fn(&Pt) -> Pt + Sync,
{
    let d = a.dim();
    if u.dim() != d {
        return Err(SemiconjError::DimensionMismatch {
            expected: d,
            found: u.dim(),
        });
    }
    if d == 0 || d > MAX_DIM {
        return Err(SemiconjError::DimensionTooLarge { dim: d });
    }
    let m = int_to_mat(a);
    Ok(samples
        .par_iter()
        .map(|x| {
            let ux = u.eval(x);
            let ax = mat_vec(&m, x, d);
            let mut fx = [0.0; MAX_DIM];
            for i in 0..d {
                fx[i] = ax[i] + ux[i];
            }
            let fx = super::linalg::frac(&fx, d);
            let wx = w(x);
            let wfx = w(&fx);
            let mut h = *x;
            let mut rhs = fx;
            for i in 0..d {
                h[i] += wx[i];
                rhs[i] += wfx[i];
            }
            torus_dist(&mat_vec(&m, &h, d), &rhs, d)
        })
        .reduce(|| 0.0, f64::max))
}

/// Pointwise Picard iteration `w ← A⁻¹u + A⁻¹(w∘f)` on the unstable part and
/// `w ← A(w∘f⁻¹) − u∘f⁻¹` on the stable part, each re-projected every step.
/// Preimages use the plain contraction, not Newton.
pub struct PicardPath<'a> {
    map: TorusMap<'a>,
    a: Mat,
    a_inv: Mat,
    proj_s: Mat,
    proj_u: Mat,
    tol: f64,
    max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardValue {
    pub w: Pt,
    pub iterations: usize,
}

impl<'a> PicardPath<'a> {
    pub fn new(a: &IntMatrix, u: &'a dyn PeriodicField, tol: f64, max_iter: usize) -> Result<Self, SemiconjError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(SemiconjError::InvalidTolerance(tol));
        }
        let d = check_dims(a, u)?;
        let split = hyperbolic_splitting(a, DEFAULT_TOL).map_err(split_err)?;
        let p = split.basis();
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| SemiconjError::Matrix(MatrixError::Numerical("singular splitting basis".into())))?;
        let k = split.stable_dim();
        let proj = |r: std::ops::Range<usize>| from_dmatrix(&(block(&p, 0..d, r.clone()) * block(&p_inv, r, 0..d)));
        let a_m = int_to_mat(a);
        let map = TorusMap::new(a_m, d, u)
            .ok_or_else(|| SemiconjError::Matrix(MatrixError::Numerical("matrix not invertible".into())))?;
        let a_inv = int_to_mat(&a.unimodular_inverse().expect("unimodular"));
        Ok(PicardPath {
            map,
            a: a_m,
            a_inv,
            proj_s: proj(0..k),
            proj_u: proj(k..d),
            tol,
            max_iter,
        })
    }

    fn converge<F>(&self, mut next_term: F, combine: &dyn Fn(&[Pt]) -> Pt) -> Result<(Pt, usize), SemiconjError>
    where
        F: FnMut(usize) -> Result<Pt, SemiconjError>,
    {
        let d = self.map.dim();
        let mut terms: Vec<Pt> = Vec::new();
        let mut prev = [0.0; MAX_DIM];
        let mut quiet = 0;
        for n in 1..=self.max_iter {
            terms.push(next_term(n - 1)?);
            let cur = combine(&terms);
            let change = (0..d).map(|i| (cur[i] - prev[i]).abs()).fold(0.0, f64::max);
            prev = cur;
            if change < self.tol / 10.0 {
                quiet += 1;
                if quiet >= 3 {
                    return Ok((cur, n));
                }
            } else {
                quiet = 0;
            }
        }
        Err(SemiconjError::Budget {
            needed: self.max_iter + 1,
            max_terms: self.max_iter,
        })
    }

    pub fn eval(&self, x: &Pt) -> Result<PicardValue, SemiconjError> {
        let d = self.map.dim();
        let field = self.map.field();
        let unstable = {
            let mut p = *x;
            let (proj, a_inv) = (&self.proj_u, &self.a_inv);
            let step = mat_mul(proj, a_inv, d);
            self.converge(
                |_| {
                    let v = mat_vec(proj, &field.eval(&p), d);
                    p = self.map.forward(&p);
                    Ok(v)
                },
                &|terms: &[Pt]| {
                    let mut acc = [0.0; MAX_DIM];
                    for t in terms.iter().rev() {
                        let mut s = *t;
                        for i in 0..d {
                            s[i] += acc[i];
                        }
                        acc = mat_vec(&step, &s, d);
                    }
                    acc
                },
            )?
        };
        let stable = {
            let mut p = *x;
            let (proj, a) = (&self.proj_s, &self.a);
            let step = mat_mul(proj, a, d);
            self.converge(
                |_| {
                    p = self
                        .map
                        .preimage(&p, PreimageMethod::Contraction)
                        .ok_or_else(|| SemiconjError::NotInvertible { point: x[..d].to_vec() })?;
                    Ok(mat_vec(proj, &field.eval(&p), d))
                },
                &|terms: &[Pt]| {
                    let mut acc = [0.0; MAX_DIM];
                    for t in terms.iter().rev() {
                        let carried = mat_vec(&step, &acc, d);
                        for i in 0..d {
                            acc[i] = t[i] + carried[i];
                        }
                    }
                    for v in acc.iter_mut().take(d) {
                        *v = -*v;
                    }
                    acc
                },
            )?
        };
        let mut w = [0.0; MAX_DIM];
        for i in 0..d {
            w[i] = unstable.0[i] + stable.0[i];
        }
        Ok(PicardValue {
            w,
            iterations: unstable.1.max(stable.1),
        })
    }
}
