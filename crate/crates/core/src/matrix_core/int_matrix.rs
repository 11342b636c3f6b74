use super::MatrixError;
use crate::exact::{Q, QMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Square matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    d: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, MatrixError> {
        let d = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(MatrixError::NonSquare {
                rows: d,
                cols: r.len(),
            });
        }
        Ok(IntMatrix {
            d,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            entries[i * d + i] = BigInt::one();
        }
        IntMatrix { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.d + c]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.d.max(1)).map(<[BigInt]>::to_vec).take(self.d).collect()
    }

    pub fn to_q(&self) -> QMatrix {
        let rows: Vec<Vec<Q>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(Q::from_integer).collect())
            .collect();
        if self.d == 0 {
            return QMatrix::zeros(0, 0);
        }
        QMatrix::from_rows(&rows)
    }

    /// Integer matrix from an integral rational one.
    pub fn from_q(m: &QMatrix) -> Option<Self> {
        if !m.is_square() || !m.is_integral() {
            return None;
        }
        Self::new(
            m.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
                .collect(),
        )
        .ok()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.d, self.d, |r, c| {
            self.get(r, c).to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn det(&self) -> BigInt {
        self.to_q().det().to_integer()
    }

    /// Determinant ±1, i.e. an automorphism of the torus.
    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        IntMatrix { d, entries }
    }

    pub fn pow(&self, mut e: u32) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Exact inverse when `det = ±1`.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        IntMatrix::from_q(&self.to_q().inverse()?)
    }
}

/// Wire form `{"d": int, "entries": [[int]]}`.
impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IntMatrix", 2)?;
        st.serialize_field("d", &self.d)?;
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(crate::json::bigint_value).collect())
            .collect();
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged() {
        let err = IntMatrix::from_i64(&[vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, MatrixError::NonSquare { .. }));
    }

    #[test]
    fn powers_and_inverse() {
        let a = IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(a.pow(2), IntMatrix::from_i64(&[vec![5, 3], vec![3, 2]]).unwrap());
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert!(IntMatrix::from_i64(&[vec![2, 0], vec![0, 1]])
            .unwrap()
            .unimodular_inverse()
            .is_none());
    }
}
