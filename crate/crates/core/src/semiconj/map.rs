use super::field::PeriodicField;
use super::linalg::{fast_floor, frac, frac_n, inverse, mat_vec, mat_vec_n, op_norm, solve_n};
use super::{Mat, Pt, MAX_DIM};

/// Displacement below which a preimage iteration is considered converged.
pub const PREIMAGE_STEP_TOL: f64 = 1e-13;
const NEWTON_MAX_STEPS: usize = 50;
const NEWTON_QUADRATIC_STEP: f64 = 1e-9;
const NEWTON_FINAL_ERROR: f64 = 1e-15;
const CONTRACTION_MAX_STEPS: usize = 20_000;

/// The toral map `f(x) = Ax + u(x) mod ℤ^d`.
pub struct TorusMap<'a> {
    d: usize,
    a: Mat,
    a_inv: Mat,
    field: &'a dyn PeriodicField,
    contraction: f64,
    seeds: Option<SeedTable>,
}

/// Periodic part `x(y) − A⁻¹y` of the inverse lift, tabulated on an `m^d` grid.
struct SeedTable {
    m: usize,
    values: Vec<Pt>,
}

impl SeedTable {
    #[inline(always)]
    fn lookup<const D: usize>(&self, y: &Pt) -> Pt {
        let m = self.m;
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        let mut t = [0.0; MAX_DIM];
        for i in 0..D {
            let s = (y[i] - fast_floor(y[i])) * m as f64;
            let mut c = s as usize;
            if c >= m {
                c = m - 1;
            }
            t[i] = s - c as f64;
            lo[i] = c;
            hi[i] = if c + 1 == m { 0 } else { c + 1 };
        }
        let mut out = [0.0; MAX_DIM];
        for mask in 0..(1usize << D) {
            let mut w = 1.0;
            let mut flat = 0;
            for i in 0..D {
                let up = (mask >> i) & 1 == 1;
                w *= if up { t[i] } else { 1.0 - t[i] };
                flat = flat * m + if up { hi[i] } else { lo[i] };
            }
            let v = &self.values[flat];
            for k in 0..D {
                out[k] += w * v[k];
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreimageMethod {
    /// Newton on the lift, falling back to the contraction.
    Newton,
    /// Only the contraction `x ↦ A⁻¹(y − u(x))`.
    Contraction,
}

impl<'a> TorusMap<'a> {
    /// `a` must be invertible over ℤ; the inverse is computed in floating point.
    pub fn new(a: Mat, d: usize, field: &'a dyn PeriodicField) -> Option<Self> {
        let a_inv = inverse(&a, d)?;
        let contraction = op_norm(&a_inv, d) * field.lipschitz_bound();
        Some(TorusMap {
            d,
            a,
            a_inv,
            field,
            contraction,
            seeds: None,
        })
    }

    /// Tabulates preimages on an `m^d` grid so that later Newton solves
    /// start within interpolation error of the root.
    pub fn with_seed_table(mut self, m: usize) -> Self {
        let d = self.d;
        let Some(count) = m.checked_pow(d as u32) else {
            return self;
        };
        let mut values = Vec::with_capacity(count);
        for idx in 0..count {
            let y = super::field::node_point(d, m, idx);
            let Some((x, _)) = self.newton_from(&y, self.default_seed(&y)) else {
                return self;
            };
            let base = mat_vec(&self.a_inv, &y, d);
            let mut v = [0.0; MAX_DIM];
            for i in 0..d {
                v[i] = x[i] - base[i];
            }
            values.push(v);
        }
        self.seeds = Some(SeedTable { m, values });
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &Mat {
        &self.a_inv
    }

    pub fn field(&self) -> &dyn PeriodicField {
        self.field
    }

    /// `‖A⁻¹‖ · Lip(u)`; below 1 the preimage contraction is global.
    pub fn contraction_factor(&self) -> f64 {
        self.contraction
    }

    pub fn lift(&self, x: &Pt) -> Pt {
        self.lift_with_field(x).0
    }

    /// `(Ax + u(x), u(x))`.
    pub fn lift_with_field(&self, x: &Pt) -> (Pt, Pt) {
        let ax = mat_vec(&self.a, x, self.d);
        let u = self.field.eval(x);
        let mut out = [0.0; MAX_DIM];
        for i in 0..self.d {
            out[i] = ax[i] + u[i];
        }
        (out, u)
    }

    pub fn forward(&self, x: &Pt) -> Pt {
        frac(&self.lift(x), self.d)
    }

    /// Some `x ∈ [0,1)^d` with `f(x) = y`, or `None` if neither iteration converges.
    pub fn preimage(&self, y: &Pt, method: PreimageMethod) -> Option<Pt> {
        self.preimage_with_field(y, method).map(|(x, _)| x)
    }

    /// Preimage `x` together with `u(x)`.
    pub fn preimage_with_field(&self, y: &Pt, method: PreimageMethod) -> Option<(Pt, Pt)> {
        let x = match method {
            PreimageMethod::Newton => match self.newton(y) {
                Some(found) => return Some(found),
                None => self.contract(y)?,
            },
            PreimageMethod::Contraction => self.contract(y)?,
        };
        Some((x, self.field.eval(&x)))
    }

    /// `(f(x), u(x))` with `f(x)` reduced to `[0,1)^D`.
    #[inline(always)]
    pub(crate) fn step_n<const D: usize>(&self, x: &Pt) -> (Pt, Pt) {
        let ax = mat_vec_n::<D>(&self.a, x);
        let u = self.field.eval(x);
        let mut out = [0.0; MAX_DIM];
        for i in 0..D {
            out[i] = ax[i] + u[i];
        }
        (frac_n::<D>(&out), u)
    }

    /// Newton preimage with `u` at the root, as in [`Self::preimage_with_field`].
    #[inline(always)]
    pub(crate) fn preimage_n<const D: usize>(&self, y: &Pt) -> Option<(Pt, Pt)> {
        if let Some(tab) = &self.seeds {
            let mut x = mat_vec_n::<D>(&self.a_inv, y);
            let v = tab.lookup::<D>(y);
            for i in 0..D {
                x[i] += v[i];
            }
            if let Some((x, u)) = self.newton_n::<D>(y, x) {
                return Some((frac_n::<D>(&x), u));
            }
        }
        self.preimage_with_field(y, PreimageMethod::Newton)
    }

    /// One contraction step from `A⁻¹y`.
    fn default_seed(&self, y: &Pt) -> Pt {
        let d = self.d;
        let seed = mat_vec(&self.a_inv, y, d);
        let u0 = self.field.eval(&seed);
        let mut r = *y;
        for i in 0..d {
            r[i] -= u0[i];
        }
        mat_vec(&self.a_inv, &r, d)
    }

    fn newton(&self, y: &Pt) -> Option<(Pt, Pt)> {
        let d = self.d;
        if let Some(tab) = &self.seeds {
            let mut x = mat_vec(&self.a_inv, y, d);
            let v = match d {
                1 => tab.lookup::<1>(y),
                2 => tab.lookup::<2>(y),
                3 => tab.lookup::<3>(y),
                _ => tab.lookup::<4>(y),
            };
            for i in 0..d {
                x[i] += v[i];
            }
            if let Some((x, u)) = self.newton_from(y, x) {
                return Some((frac(&x, d), u));
            }
        }
        self.newton_from(y, self.default_seed(y)).map(|(x, u)| (frac(&x, d), u))
    }

    /// Newton on the lift `Ax + u(x) = y`. Stops once the quadratic model
    /// `e_next ≈ (s_n / s_{n-1}²) s_n²` predicts an error below `NEWTON_FINAL_ERROR`,
    /// or a step is below `NEWTON_QUADRATIC_STEP`.
    /// `u` at the root is read off the equation as `y − Ax`. Returns the unreduced root.
    fn newton_from(&self, y: &Pt, x: Pt) -> Option<(Pt, Pt)> {
        match self.d {
            1 => self.newton_n::<1>(y, x),
            2 => self.newton_n::<2>(y, x),
            3 => self.newton_n::<3>(y, x),
            _ => self.newton_n::<4>(y, x),
        }
    }

    fn newton_n<const D: usize>(&self, y: &Pt, mut x: Pt) -> Option<(Pt, Pt)> {
        let mut prev = f64::INFINITY;
        for _ in 0..NEWTON_MAX_STEPS {
            let (u, mut jac) = self.field.eval_with_jacobian(&x);
            let ax = mat_vec_n::<D>(&self.a, &x);
            let mut res = [0.0; MAX_DIM];
            for i in 0..D {
                res[i] = ax[i] + u[i] - y[i];
                for j in 0..D {
                    jac[i][j] += self.a[i][j];
                }
            }
            let step = solve_n::<D>(&jac, &res)?;
            let mut size: f64 = 0.0;
            for i in 0..D {
                x[i] -= step[i];
                size = size.max(step[i].abs());
            }
            if !size.is_finite() {
                return None;
            }
            let predicted = if prev.is_finite() && prev > 0.0 && size < 1e-6 {
                size * size * size / (prev * prev)
            } else {
                f64::INFINITY
            };
            prev = size;
            if size < NEWTON_QUADRATIC_STEP || predicted < NEWTON_FINAL_ERROR {
                let ax = mat_vec_n::<D>(&self.a, &x);
                let mut u_root = [0.0; MAX_DIM];
                for i in 0..D {
                    u_root[i] = y[i] - ax[i];
                }
                return Some((x, u_root));
            }
        }
        None
    }

    fn contract(&self, y: &Pt) -> Option<Pt> {
        let d = self.d;
        let mut x = mat_vec(&self.a_inv, y, d);
        let mut prev = f64::INFINITY;
        let mut growth = 0;
        for _ in 0..CONTRACTION_MAX_STEPS {
            let u = self.field.eval(&x);
            let mut r = *y;
            for i in 0..d {
                r[i] -= u[i];
            }
            let next = mat_vec(&self.a_inv, &r, d);
            let mut size: f64 = 0.0;
            for i in 0..d {
                size = size.max((next[i] - x[i]).abs());
            }
            x = next;
            if !size.is_finite() {
                return None;
            }
            if size < PREIMAGE_STEP_TOL {
                return Some(frac(&x, d));
            }
            if size >= prev {
                growth += 1;
                if growth > 50 {
                    return None;
                }
            } else {
                growth = 0;
            }
            prev = size;
        }
        None
    }

    /// Jacobian `A + Du(x)` of the lift.
    pub fn derivative(&self, x: &Pt) -> Mat {
        let mut m = self.field.jacobian(x);
        for i in 0..self.d {
            for j in 0..self.d {
                m[i][j] += self.a[i][j];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiconj::field::{TrigField, TrigMode};
    use crate::semiconj::linalg::torus_dist;

    fn cat() -> Mat {
        let mut a = [[0.0; MAX_DIM]; MAX_DIM];
        a[0] = [2.0, 1.0, 0.0, 0.0];
        a[1] = [1.0, 1.0, 0.0, 0.0];
        a
    }

    #[test]
    fn preimages_invert_forward_map() {
        let u = TrigField::new(
            2,
            vec![TrigMode {
                k: vec![0, 1],
                amp: vec![0.05, 0.0],
                phase: 0.0,
            }],
        )
        .unwrap();
        let f = TorusMap::new(cat(), 2, &u).unwrap();
        assert!(f.contraction_factor() < 1.0);
        for y in [[0.1, 0.7, 0.0, 0.0], [0.93, 0.02, 0.0, 0.0], [0.5, 0.5, 0.0, 0.0]] {
            for method in [PreimageMethod::Newton, PreimageMethod::Contraction] {
                let x = f.preimage(&y, method).unwrap();
                assert!(torus_dist(&f.forward(&x), &y, 2) < 1e-12);
            }
        }
    }
}
