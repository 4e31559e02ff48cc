use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square matrix of occurrence counts, row-major. Entry (a, b) counts a in σ(b).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl fmt::Debug for CountMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountMatrix{:?}", self.rows())
    }
}

impl CountMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "empty matrix");
        CountMatrix { n, entries: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.entries[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] += v;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &CountMatrix) -> Result<CountMatrix> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let p = a.checked_mul(other.get(k, j)).ok_or(Error::Overflow("matrix product"))?;
                    let e = &mut out.entries[i * n + j];
                    *e = e.checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<CountMatrix> {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Principal submatrix on the given (original) indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> CountMatrix {
        let mut m = Self::zeros(idx.len().max(1));
        for (i, &a) in idx.iter().enumerate() {
            for (j, &b) in idx.iter().enumerate() {
                m.set(i, j, self.get(a, b));
            }
        }
        m
    }

    /// Rows and columns reordered so that new index i is old index perm[i].
    pub fn permuted(&self, perm: &[usize]) -> CountMatrix {
        self.submatrix(perm)
    }

    pub fn mul_vec<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(T::zero(), |s, j| match self.get(i, j) {
                    0 => s,
                    m => s + T::from_count(m) * v[j],
                })
            })
            .collect()
    }

    pub fn vec_mul<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|j| {
                (0..self.n).fold(T::zero(), |s, i| match self.get(i, j) {
                    0 => s,
                    m => s + v[i] * T::from_count(m),
                })
            })
            .collect()
    }

    pub(crate) fn boolean(&self) -> Vec<bool> {
        self.entries.iter().map(|&x| x > 0).collect()
    }
}

pub(crate) fn bool_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

/// True iff Bᵏ > 0 entrywise for the Wielandt exponent k = n² − 2n + 2.
pub fn is_primitive(block: &CountMatrix) -> bool {
    let n = block.n();
    let mut k = n * n + 2 - 2 * n;
    let mut base = block.boolean();
    let mut acc: Option<Vec<bool>> = None;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => bool_mul(&a, &base, n),
            });
        }
        k >>= 1;
        if k > 0 {
            base = bool_mul(&base, &base, n);
        }
    }
    acc.is_some_and(|a| a.iter().all(|&x| x))
}
