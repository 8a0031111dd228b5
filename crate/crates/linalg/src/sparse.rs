//! Compressed sparse row storage for complex matrices.

use num_traits::Zero;

use crate::dense::DMat;
use crate::scalar::{czero, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T: Real> {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C<T>>,
}

impl<T: Real> Csr<T> {
    /// Builds from (row, col, value) triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut trips: Vec<(usize, usize, C<T>)>) -> Self {
        trips.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<C<T>> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trips {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            if last == Some((i, j)) {
                let l = values.len() - 1;
                values[l] = values[l] + v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        let mut m = Csr { rows, cols, indptr, indices, values };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            for p in self.indptr[i]..self.indptr[i + 1] {
                if !self.values[p].is_zero() {
                    indices.push(self.indices[p]);
                    values.push(self.values[p]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn from_dense(a: &DMat<T>, drop_below: T) -> Self {
        let mut trips = Vec::new();
        for j in 0..a.cols() {
            for i in 0..a.rows() {
                let v = a[(i, j)];
                if v.norm() > drop_below {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(a.rows(), a.cols(), trips)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C::new(T::one(), T::zero()))).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> f64 {
        self.nnz() as f64 / ((self.rows * self.cols).max(1) as f64)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C<T>)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |p| (self.indices[p], self.values[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        let r = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match r.binary_search(&j) {
            Ok(p) => self.values[self.indptr[i] + p],
            Err(_) => czero(),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C<T>)> {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            t.extend(self.row(i).map(|(j, v)| (i, j, v)));
        }
        t
    }

    pub fn matvec(&self, x: &[C<T>], y: &mut [C<T>]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = czero();
            for p in self.indptr[i]..self.indptr[i + 1] {
                s = s + self.values[p] * x[self.indices[p]];
            }
            *yi = s;
        }
    }

    pub fn to_dense(&self) -> DMat<T> {
        let mut d = DMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().into_iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.cols, self.rows, t)
    }

    /// Returns B with B[i, j] = A[perm[i], perm[j]].
    pub fn permute_sym(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut inv = vec![0usize; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let t = self.triplets().into_iter().map(|(i, j, v)| (inv[i], inv[j], v)).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn half_bandwidth(&self) -> usize {
        let mut b = 0;
        for i in 0..self.rows {
            for (j, _) in self.row(i) {
                b = b.max(i.abs_diff(j));
            }
        }
        b
    }

    /// max |A - A^H| over stored entries.
    pub fn hermiticity_defect(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i).conj()).norm());
            }
        }
        m
    }

    /// Adjacency lists of the symmetric pattern without the diagonal.
    pub fn pattern(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.rows];
        for i in 0..self.rows {
            for (j, _) in self.row(i) {
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    pub fn add_diag(&self, s: T) -> Self {
        let mut t = self.triplets();
        t.extend((0..self.rows.min(self.cols)).map(|i| (i, i, C::new(s, T::zero()))));
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }
}
