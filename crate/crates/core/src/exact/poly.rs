use super::{q_to_f64, Q};
use nalgebra::{Complex, DMatrix};
use num_traits::Zero;

/// Univariate polynomial over ℚ, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Q::zero());
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &Q {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::new(vec![Q::zero()]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer((i as i64).into()))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        let lead = self.leading().clone();
        Poly::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.degree() < dd || self.is_zero() {
            return (Poly::new(vec![Q::zero()]), self.clone());
        }
        let mut quot = vec![Q::zero(); self.degree() - dd + 1];
        let lead = divisor.leading();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    let v = &c * dc;
                    rem[k + j] -= v;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Complex roots of a squarefree polynomial, in f64.
    ///
    /// Companion-matrix eigenvalues polished by Newton steps on the exact
    /// coefficients converted to f64.
    pub fn roots_squarefree(&self) -> Vec<Complex<f64>> {
        let p = self.monic();
        let c: Vec<f64> = p.coeffs.iter().map(q_to_f64).collect();
        let n = p.degree();
        match n {
            0 => vec![],
            1 => vec![Complex::new(-c[0], 0.0)],
            2 => quadratic_roots(c[1], c[0]),
            _ => {
                let comp = DMatrix::from_fn(n, n, |r, col| {
                    if col == n - 1 {
                        -c[r]
                    } else if r == col + 1 {
                        1.0
                    } else {
                        0.0
                    }
                });
                let eig = comp.complex_eigenvalues();
                eig.iter().map(|&z| newton_polish(&c, z)).collect()
            }
        }
    }
}

fn quadratic_roots(b: f64, c: f64) -> Vec<Complex<f64>> {
    // x^2 + b x + c
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![Complex::new(0.0, 0.0), Complex::new(-b, 0.0)];
        }
        let mut r = [q, c / q];
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vec![Complex::new(r[0], 0.0), Complex::new(r[1], 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        vec![Complex::new(re, im), Complex::new(re, -im)]
    }
}

fn newton_polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let eval = |z: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        (p, dp)
    };
    let (mut p, _) = eval(z);
    for _ in 0..8 {
        let (pz, dpz) = eval(z);
        if dpz.norm() == 0.0 {
            break;
        }
        let cand = z - pz / dpz;
        let (pc, _) = eval(cand);
        if pc.norm() < p.norm() {
            z = cand;
            p = pc;
        } else {
            break;
        }
    }
    z
}

/// Yun's algorithm: returns `(factor, multiplicity)` with pairwise coprime
/// squarefree monic factors whose product (with multiplicities) is `p / lc(p)`.
pub fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.div_rem(&a).0;
    let mut c = df.div_rem(&a).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    loop {
        let g = b.gcd(&d);
        if g.degree() > 0 {
            out.push((g.clone(), i));
        }
        b = b.div_rem(&g).0;
        if b.degree() == 0 {
            break;
        }
        c = d.div_rem(&g).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

impl Poly {
    fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Q::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Q::zero);
                    a - b
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
