use std::fmt;

use serde::{Deserialize, Serialize};

use super::NetError;

/// Dense row-major 0/1 matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested rows. Every row must have the same length
    /// and contain only 0 or 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, NetError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(NetError::RaggedMatrix {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(NetError::NonBinaryEntry {
                        row: i,
                        col: j,
                        value: v as i64,
                    });
                }
                data.push(v);
            }
        }
        Ok(BinaryMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j] != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i * self.cols + j] = value as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| v as usize).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.cols];
        for i in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(i)) {
                *s += v as usize;
            }
        }
        sums
    }

    pub fn ones(&self) -> usize {
        self.data.iter().map(|&v| v as usize).sum()
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                if self.get(i, j) {
                    m.set(i, k, true);
                }
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> BinaryMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        BinaryMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// `selfᵗ · self`, the column Gram matrix.
    pub fn gram(&self) -> Vec<Vec<u64>> {
        let mut g = vec![vec![0u64; self.cols]; self.cols];
        for i in 0..self.rows {
            let ones: Vec<usize> = (0..self.cols).filter(|&j| self.get(i, j)).collect();
            for &a in &ones {
                for &b in &ones {
                    g[a][b] += 1;
                }
            }
        }
        g
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(&a, _)| a != 0)
                    .map(|(_, &v)| v)
                    .sum()
            })
            .collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Square matrix of nonnegative integer counts with row/column labels.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerMatrix {
    dim: usize,
    data: Vec<u64>,
    labels: Vec<String>,
}

impl IntegerMatrix {
    pub fn zeros(dim: usize, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), dim, "one label per row");
        IntegerMatrix {
            dim,
            data: vec![0; dim * dim],
            labels,
        }
    }

    pub fn identity(dim: usize, labels: Vec<String>) -> Self {
        let mut m = Self::zeros(dim, labels);
        for i in 0..dim {
            m.data[i * dim + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self, NetError> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(NetError::NotSquare {
                    rows: dim,
                    cols: row.len(),
                    row: i,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(IntegerMatrix {
            dim,
            data,
            labels: (1..=dim).map(|i| format!("v{i}")).collect(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim, "one label per row");
        self.labels = labels;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero_one(&self) -> bool {
        self.data.iter().all(|&v| v <= 1)
    }

    /// Largest entry off the diagonal, 0 for matrices smaller than 2×2.
    pub fn max_off_diagonal(&self) -> u64 {
        let mut best = 0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    best = best.max(self.get(i, j));
                }
            }
        }
        best
    }

    pub fn checked_mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, NetError> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = IntegerMatrix::zeros(n, self.labels.clone());
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let cur = out.get(i, j);
                    let v = a
                        .checked_mul(b)
                        .and_then(|p| p.checked_add(cur))
                        .ok_or(NetError::Overflow)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.dim, self.dim)?;
        for row in self.to_rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        write!(f, "]")
    }
}
