//! Compressed sparse row storage.

use std::io::{self, Write};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds from raw parts. Column indices within each row must be strictly
    /// increasing.
    pub fn from_raw(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Self {
        assert_eq!(row_ptr.len(), n_rows + 1);
        assert_eq!(col_idx.len(), values.len());
        assert_eq!(row_ptr[n_rows], col_idx.len());
        debug_assert!((0..n_rows).all(|r| col_idx[row_ptr[r]..row_ptr[r + 1]]
            .windows(2)
            .all(|w| w[0] < w[1])));
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Duplicates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; n_rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            assert!(r < n_rows && c < n_cols, "triplet ({r}, {c}) out of range");
            if last == Some((r, c)) {
                let tail = values.last_mut().expect("previous entry");
                *tail = *tail + v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self::from_raw(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw(n, n, (0..=n).collect(), (0..n).collect(), vec![T::one(); n])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    /// Position of `(r, c)` in the value array, if stored.
    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        let (cols, _) = self.row(r);
        cols.binary_search(&c).ok().map(|k| self.row_ptr[r] + k)
    }

    /// Stored value or zero.
    pub fn get(&self, r: usize, c: usize) -> T {
        self.position(r, c).map_or(T::zero(), |k| self.values[k])
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n_rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *out = cols
                .iter()
                .zip(vals)
                .fold(T::zero(), |acc, (&c, &v)| acc + v * x[c]);
        }
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n_cols]; self.n_rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// MatrixMarket coordinate dump (1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}
