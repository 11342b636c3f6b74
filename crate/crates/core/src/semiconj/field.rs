use super::{Mat, Pt, MAX_DIM};
use serde::Serialize;
use std::f64::consts::TAU;
use std::sync::Arc;

/// A ℤ^d-periodic map `u: ℝ^d → ℝ^d`.
pub trait PeriodicField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Pt) -> Pt;
    fn jacobian(&self, x: &Pt) -> Mat;
    /// Upper bound for the Lipschitz constant in the Euclidean norm; `INFINITY` if unknown.
    fn lipschitz_bound(&self) -> f64;
    /// Upper bound for `sup ‖u‖`.
    fn sup_bound(&self) -> f64;

    fn eval_with_jacobian(&self, x: &Pt) -> (Pt, Mat) {
        (self.eval(x), self.jacobian(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigMode {
    pub k: Vec<i64>,
    pub amp: Vec<f64>,
    pub phase: f64,
}

/// `u(x) = Σ amp · sin(2π k·x + phase)`.
#[derive(Clone, Debug)]
pub struct TrigField {
    d: usize,
    modes: Vec<TrigMode>,
    freq: Vec<Pt>,
    amps: Vec<Pt>,
}

impl TrigField {
    pub fn new(d: usize, modes: Vec<TrigMode>) -> Result<Self, String> {
        if d == 0 || d > MAX_DIM {
            return Err(format!("dimension {d} outside 1..={MAX_DIM}"));
        }
        let mut freq = Vec::new();
        let mut amps = Vec::new();
        for m in &modes {
            if m.k.len() != d || m.amp.len() != d {
                return Err(format!("mode has wrong length (expected {d})"));
            }
            if !m.amp.iter().chain([&m.phase]).all(|x| x.is_finite()) {
                return Err("non-finite mode coefficient".into());
            }
            let mut f = [0.0; MAX_DIM];
            let mut a = [0.0; MAX_DIM];
            for i in 0..d {
                f[i] = TAU * m.k[i] as f64;
                a[i] = m.amp[i];
            }
            freq.push(f);
            amps.push(a);
        }
        Ok(TrigField { d, modes, freq, amps })
    }

    pub fn zero(d: usize) -> Self {
        TrigField::new(d, Vec::new()).expect("valid dimension")
    }

    pub fn modes(&self) -> &[TrigMode] {
        &self.modes
    }

    #[inline(always)]
    fn eval_n<const D: usize>(&self, x: &Pt) -> Pt {
        let mut out = [0.0; MAX_DIM];
        for ((m, f), a) in self.modes.iter().zip(&self.freq).zip(&self.amps) {
            let mut theta = m.phase;
            for i in 0..D {
                theta += f[i] * x[i];
            }
            let s = theta.sin();
            for i in 0..D {
                out[i] += a[i] * s;
            }
        }
        out
    }

    #[inline(always)]
    fn eval_jac_n<const D: usize>(&self, x: &Pt) -> (Pt, Mat) {
        let mut out = [0.0; MAX_DIM];
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for ((m, f), a) in self.modes.iter().zip(&self.freq).zip(&self.amps) {
            let mut theta = m.phase;
            for i in 0..D {
                theta += f[i] * x[i];
            }
            let (s, c) = theta.sin_cos();
            for i in 0..D {
                out[i] += a[i] * s;
                let ac = a[i] * c;
                for j in 0..D {
                    jac[i][j] += ac * f[j];
                }
            }
        }
        (out, jac)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl PeriodicField for TrigField {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &Pt) -> Pt {
        match self.d {
            1 => self.eval_n::<1>(x),
            2 => self.eval_n::<2>(x),
            3 => self.eval_n::<3>(x),
            _ => self.eval_n::<4>(x),
        }
    }

    fn jacobian(&self, x: &Pt) -> Mat {
        self.eval_with_jacobian(x).1
    }

    fn eval_with_jacobian(&self, x: &Pt) -> (Pt, Mat) {
        match self.d {
            1 => self.eval_jac_n::<1>(x),
            2 => self.eval_jac_n::<2>(x),
            3 => self.eval_jac_n::<3>(x),
            _ => self.eval_jac_n::<4>(x),
        }
    }

    fn lipschitz_bound(&self) -> f64 {
        self.freq
            .iter()
            .zip(&self.amps)
            .map(|(f, a)| norm(&f[..self.d]) * norm(&a[..self.d]))
            .sum()
    }

    fn sup_bound(&self) -> f64 {
        self.amps.iter().map(|a| norm(&a[..self.d])).sum()
    }
}

/// Values of a periodic map on the uniform grid `{i/n}^d`, interpolated multilinearly.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicDisplacement {
    d: usize,
    n: usize,
    values: Vec<Pt>,
}

impl PeriodicDisplacement {
    pub fn from_values(d: usize, n: usize, values: Vec<Pt>) -> Result<Self, String> {
        if d == 0 || d > MAX_DIM {
            return Err(format!("dimension {d} outside 1..={MAX_DIM}"));
        }
        if n == 0 {
            return Err("grid needs at least one node per axis".into());
        }
        let count = n.checked_pow(d as u32).ok_or("grid too large")?;
        if values.len() != count {
            return Err(format!("expected {count} grid values, found {}", values.len()));
        }
        Ok(PeriodicDisplacement { d, n, values })
    }

    /// Samples `f` at every node; `f` is evaluated on nodes in index order
    /// so outputs are reproducible for any pool size.
    pub fn sample<F>(d: usize, n: usize, f: F) -> Self
    where
        F: Fn(&Pt) -> Pt + Sync,
    {
        use rayon::prelude::*;
        let count = n.pow(d as u32);
        let values: Vec<Pt> = (0..count)
            .into_par_iter()
            .map(|idx| f(&node_point(d, n, idx)))
            .collect();
        PeriodicDisplacement { d, n, values }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid_shape(&self) -> Vec<usize> {
        vec![self.n; self.d]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Pt] {
        &self.values
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn value_at(&self, idx: &[usize]) -> &Pt {
        let mut flat = 0;
        for &i in idx.iter().take(self.d) {
            flat = flat * self.n + i % self.n;
        }
        &self.values[flat]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| norm(&v[..self.d]))
            .fold(0.0, f64::max)
    }

    fn corner_weights(&self, x: &Pt) -> ([usize; MAX_DIM], [f64; MAX_DIM]) {
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for i in 0..self.d {
            let s = (x[i] - super::linalg::fast_floor(x[i])) * self.n as f64;
            let fl = super::linalg::fast_floor(s);
            base[i] = (fl as usize) % self.n;
            frac[i] = s - fl;
        }
        (base, frac)
    }

    fn corner_index(&self, base: &[usize; MAX_DIM], mask: usize) -> usize {
        let mut flat = 0;
        for i in 0..self.d {
            let off = (mask >> i) & 1;
            flat = flat * self.n + (base[i] + off) % self.n;
        }
        flat
    }

    pub fn interpolate(&self, x: &Pt) -> Pt {
        let (base, frac) = self.corner_weights(x);
        let mut out = [0.0; MAX_DIM];
        for mask in 0..(1usize << self.d) {
            let mut w = 1.0;
            for i in 0..self.d {
                w *= if (mask >> i) & 1 == 1 { frac[i] } else { 1.0 - frac[i] };
            }
            if w == 0.0 {
                continue;
            }
            let v = &self.values[self.corner_index(&base, mask)];
            for k in 0..self.d {
                out[k] += w * v[k];
            }
        }
        out
    }

    fn interpolate_jacobian(&self, x: &Pt) -> Mat {
        let (base, frac) = self.corner_weights(x);
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for mask in 0..(1usize << self.d) {
            let v = &self.values[self.corner_index(&base, mask)];
            for j in 0..self.d {
                let mut w = self.n as f64;
                for i in 0..self.d {
                    let bit = (mask >> i) & 1 == 1;
                    w *= if i == j {
                        if bit {
                            1.0
                        } else {
                            -1.0
                        }
                    } else if bit {
                        frac[i]
                    } else {
                        1.0 - frac[i]
                    };
                }
                for k in 0..self.d {
                    jac[k][j] += w * v[k];
                }
            }
        }
        jac
    }
}

/// Grid point for a flat node index, last axis fastest.
pub(crate) fn node_point(d: usize, n: usize, mut idx: usize) -> Pt {
    let mut x = [0.0; MAX_DIM];
    for i in (0..d).rev() {
        x[i] = (idx % n) as f64 / n as f64;
        idx /= n;
    }
    x
}

impl PeriodicField for PeriodicDisplacement {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &Pt) -> Pt {
        self.interpolate(x)
    }

    fn jacobian(&self, x: &Pt) -> Mat {
        self.interpolate_jacobian(x)
    }

    fn lipschitz_bound(&self) -> f64 {
        // Frobenius bound from the largest difference quotient along each axis
        let mut total = 0.0;
        for axis in 0..self.d {
            let stride = self.n.pow((self.d - 1 - axis) as u32);
            let mut worst = [0.0f64; MAX_DIM];
            for (flat, v) in self.values.iter().enumerate() {
                let coord = (flat / stride) % self.n;
                let next = if coord + 1 == self.n {
                    flat + stride - self.n * stride
                } else {
                    flat + stride
                };
                let w = &self.values[next];
                for k in 0..self.d {
                    worst[k] = worst[k].max((w[k] - v[k]).abs() * self.n as f64);
                }
            }
            total += worst[..self.d].iter().map(|x| x * x).sum::<f64>();
        }
        total.sqrt()
    }

    fn sup_bound(&self) -> f64 {
        self.sup_norm()
    }
}

type BoxedFn = Arc<dyn Fn(&Pt) -> Pt + Send + Sync>;

/// Field from a closure, with caller-supplied bounds and a finite-difference Jacobian.
#[derive(Clone)]
pub struct FnField {
    d: usize,
    f: BoxedFn,
    lipschitz: f64,
    sup: f64,
}

impl FnField {
    pub fn new(d: usize, f: impl Fn(&Pt) -> Pt + Send + Sync + 'static, lipschitz: f64, sup: f64) -> Self {
        FnField {
            d,
            f: Arc::new(f),
            lipschitz,
            sup,
        }
    }
}

impl PeriodicField for FnField {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &Pt) -> Pt {
        (self.f)(x)
    }

    fn jacobian(&self, x: &Pt) -> Mat {
        let h = 1e-6;
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for j in 0..self.d {
            let mut xp = *x;
            let mut xm = *x;
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = ((self.f)(&xp), (self.f)(&xm));
            for i in 0..self.d {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac
    }

    fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    fn sup_bound(&self) -> f64 {
        self.sup
    }
}

/// Perturbation `u` of `f = T ∘ A ∘ T⁻¹` with `T = id + t`:
/// `u(x) = A s(x) + t(A(x + s(x)))` where `T⁻¹(x) = x + s(x)`.
#[derive(Clone)]
pub struct ConjugatedField {
    d: usize,
    a: Mat,
    a_norm: f64,
    t: Arc<dyn PeriodicField>,
}

impl ConjugatedField {
    /// Requires `Lip(t) < 1` so that `T` is invertible.
    pub fn new(a: Mat, d: usize, t: Arc<dyn PeriodicField>) -> Result<Self, String> {
        if t.dim() != d {
            return Err("dimension mismatch between matrix and t".into());
        }
        if t.lipschitz_bound() >= 1.0 {
            return Err("t must have Lipschitz constant below 1".into());
        }
        let a_norm = super::linalg::op_norm(&a, d);
        Ok(ConjugatedField { d, a, a_norm, t })
    }

    /// `s(x)` with `T(x + s(x)) = x`, by Newton on `y + t(y) = x`.
    pub fn inverse_displacement(&self, x: &Pt) -> Pt {
        self.inverse_point(x).0
    }

    fn inverse_point(&self, x: &Pt) -> (Pt, Mat) {
        let d = self.d;
        let tx = self.t.eval(x);
        let mut y = *x;
        for i in 0..d {
            y[i] -= tx[i];
        }
        let mut dt = [[0.0; MAX_DIM]; MAX_DIM];
        for _ in 0..60 {
            let (ty, j) = self.t.eval_with_jacobian(&y);
            dt = j;
            let mut r = [0.0; MAX_DIM];
            let mut m = j;
            for i in 0..d {
                r[i] = y[i] + ty[i] - x[i];
                m[i][i] += 1.0;
            }
            let Some(step) = super::linalg::solve(&m, &r, d) else {
                break;
            };
            let mut size: f64 = 0.0;
            for i in 0..d {
                y[i] -= step[i];
                size = size.max(step[i].abs());
            }
            if size < 1e-15 {
                dt = self.t.jacobian(&y);
                break;
            }
        }
        let mut s = [0.0; MAX_DIM];
        for i in 0..d {
            s[i] = y[i] - x[i];
        }
        (s, dt)
    }
}

impl PeriodicField for ConjugatedField {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &Pt) -> Pt {
        self.eval_with_jacobian(x).0
    }

    fn jacobian(&self, x: &Pt) -> Mat {
        self.eval_with_jacobian(x).1
    }

    fn eval_with_jacobian(&self, x: &Pt) -> (Pt, Mat) {
        use super::linalg::{inverse, mat_mul, mat_vec};
        let d = self.d;
        let (s, dt_y) = self.inverse_point(x);
        let mut y = *x;
        for i in 0..d {
            y[i] += s[i];
        }
        let z = mat_vec(&self.a, &y, d);
        let (tz, dt_z) = self.t.eval_with_jacobian(&z);
        let a_s = mat_vec(&self.a, &s, d);
        let mut u = [0.0; MAX_DIM];
        for i in 0..d {
            u[i] = a_s[i] + tz[i];
        }
        // DT⁻¹ = (I + Dt(y))⁻¹, Du = A (DT⁻¹ − I) + Dt(z) A DT⁻¹
        let mut m = dt_y;
        for (i, row) in m.iter_mut().enumerate().take(d) {
            row[i] += 1.0;
        }
        let dtinv = inverse(&m, d).unwrap_or([[0.0; MAX_DIM]; MAX_DIM]);
        let mut ds = dtinv;
        for (i, row) in ds.iter_mut().enumerate().take(d) {
            row[i] -= 1.0;
        }
        let p1 = mat_mul(&self.a, &ds, d);
        let p2 = mat_mul(&mat_mul(&dt_z, &self.a, d), &dtinv, d);
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                jac[i][j] = p1[i][j] + p2[i][j];
            }
        }
        (u, jac)
    }

    fn lipschitz_bound(&self) -> f64 {
        let lt = self.t.lipschitz_bound();
        let ls = lt / (1.0 - lt);
        self.a_norm * ls + lt * self.a_norm * (1.0 + ls)
    }

    fn sup_bound(&self) -> f64 {
        (self.a_norm + 1.0) * self.t.sup_bound()
    }
}
