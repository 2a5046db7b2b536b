use num_complex::Complex64;

use super::LinalgError;

/// Square complex matrix in compressed-row form. Column indices are sorted
/// and unique within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed by
/// [`TripletBuilder::build`].
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, capacity: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(capacity),
        }
    }

    /// # Panics
    /// If either index is out of range.
    pub fn add(&mut self, row: usize, col: usize, value: impl Into<Complex64>) {
        assert!(
            row < self.n && col < self.n,
            "entry ({row}, {col}) outside {0}x{0}",
            self.n
        );
        self.entries.push((row, col, value.into()));
    }

    pub fn extend(&mut self, other: TripletBuilder) {
        assert_eq!(self.n, other.n);
        self.entries.extend(other.entries);
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        TripletBuilder::new(n).build()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut b = TripletBuilder::with_capacity(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.add(i, i, d);
        }
        b.build()
    }

    /// Keeps the nonzero entries of a dense row-major matrix.
    pub fn from_dense(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut b = TripletBuilder::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != Complex64::new(0.0, 0.0) {
                    b.add(i, j, v);
                }
            }
        }
        Ok(b.build())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        self.mul_vec_acc(Complex64::new(1.0, 0.0), x, &mut y);
        y
    }

    /// `y += alpha * A x`
    pub fn mul_vec_acc(&self, alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi += alpha * acc;
        }
    }

    /// `Σ coeff_i · A_i` over matrices of equal dimension.
    pub fn linear_combination(terms: &[(Complex64, &SparseMatrix)]) -> Result<Self, LinalgError> {
        let n = terms.first().map_or(0, |(_, a)| a.n);
        let mut b = TripletBuilder::with_capacity(n, terms.iter().map(|(_, a)| a.nnz()).sum());
        for (coeff, a) in terms {
            if a.n != n {
                return Err(LinalgError::Dimension(format!(
                    "cannot combine {}x{0} with {n}x{n}",
                    a.n
                )));
            }
            for (i, j, v) in a.triplets() {
                b.add(i, j, *coeff * v);
            }
        }
        Ok(b.build())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Row indices with at least one nonzero entry in the row or column.
    pub fn support(&self) -> Vec<usize> {
        let mut hit = vec![false; self.n];
        for (i, j, v) in self.triplets() {
            if v != Complex64::new(0.0, 0.0) {
                hit[i] = true;
                hit[j] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(i, _)| i)
            .collect()
    }

    /// `P A Pᵀ` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut b = TripletBuilder::with_capacity(self.n, self.nnz());
        for (i, j, v) in self.triplets() {
            b.add(inv[i], inv[j], v);
        }
        b.build()
    }
}
