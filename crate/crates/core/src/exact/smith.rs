use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// `left · A · right = diag(invariants)` with unimodular `left`, `right`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
    /// Diagonal of the normal form, length `min(rows, cols)`; nonzero entries
    /// come first and each divides the next.
    pub invariants: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.iter().filter(|x| !x.is_zero()).count()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s) {
        *x -= f * y;
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let v = f * &row[src];
        row[dst] -= v;
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> SmithForm {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut s: Vec<Vec<BigInt>> = a.to_vec();
    let mut left = identity(rows);
    let mut right = identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(s, left, right);
            };
            s.swap(t, pi);
            left.swap(t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut right, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let f = s[i][t].div_floor(&s[t][t]);
                row_axpy(&mut s, i, t, &f);
                row_axpy(&mut left, i, t, &f);
                clean &= s[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = s[t][j].div_floor(&s[t][t]);
                col_axpy(&mut s, j, t, &f);
                col_axpy(&mut right, j, t, &f);
                clean &= s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !s[i][j].is_multiple_of(&s[t][t]))
            });
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    row_axpy(&mut s, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    finish(s, left, right)
}

fn finish(s: Vec<Vec<BigInt>>, left: Vec<Vec<BigInt>>, right: Vec<Vec<BigInt>>) -> SmithForm {
    let n = s.len().min(s.first().map_or(0, Vec::len));
    let invariants = (0..n).map(|i| s[i][i].clone()).collect();
    SmithForm {
        left,
        right,
        invariants,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reproduces_known_invariants() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let sf = smith_normal_form(&a);
        assert_eq!(
            sf.invariants,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        let prod = mul(&mul(&sf.left, &a), &sf.right);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let expect = if i == j { sf.invariants[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, expect);
            }
        }
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let a = big(&[&[1, 2], &[2, 4], &[3, 6]]);
        let sf = smith_normal_form(&a);
        assert_eq!(sf.rank(), 1);
        assert_eq!(sf.invariants[0], BigInt::from(1));
        let prod = mul(&mul(&sf.left, &a), &sf.right);
        assert_eq!(prod[0][0], BigInt::from(1));
        assert!(prod.iter().flatten().filter(|x| !x.is_zero()).count() == 1);
    }
}
