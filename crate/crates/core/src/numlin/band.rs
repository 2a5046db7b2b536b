use std::collections::VecDeque;

use num_complex::Complex64;

use super::{LinalgError, SparseMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(a: &SparseMatrix) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        // start each component from a pseudo-peripheral node
        let seed = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
        let start = pseudo_peripheral(seed, &adj, &degree, &placed);
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !placed[w]).collect();
            next.sort_unstable_by_key(|&w| (degree[w], w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize], blocked: &[bool]) -> usize {
    let mut current = seed;
    let mut depth = 0;
    for _ in 0..8 {
        let levels = bfs_levels(current, adj, blocked);
        let max = *levels.iter().flatten().max().unwrap_or(&0);
        if max <= depth && depth > 0 {
            break;
        }
        depth = max;
        current = (0..adj.len())
            .filter(|&i| levels[i] == Some(max))
            .min_by_key(|&i| (degree[i], i))
            .unwrap_or(current);
    }
    current
}

fn bfs_levels(start: usize, adj: &[Vec<usize>], blocked: &[bool]) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let d = level[v].unwrap();
        for &w in &adj[v] {
            if !blocked[w] && level[w].is_none() {
                level[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// LU factorization with partial pivoting of a band matrix, stored column by
/// column with `kl` extra rows above the band for pivoting fill-in.
///
/// The input is reordered by [`rcm_ordering`] first, so the factors belong to
/// `P A Pᵀ`; [`BandLu::solve`] takes and returns vectors in the original
/// ordering.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self, LinalgError> {
        let n = a.dim();
        let perm = rcm_ordering(a);
        let pa = a.permuted(&perm);
        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, j, _) in pa.triplets() {
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![ZERO; ldab * n];
        for (i, j, v) in pa.triplets() {
            ab[j * ldab + kv + i - j] = v;
        }
        let mut lu = Self {
            n,
            kl,
            ku,
            ldab,
            ab,
            pivots: vec![0; n],
            perm,
        };
        lu.factor_in_place()?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        // caller guarantees j - kv <= i <= j + kl
        j * self.ldab + self.kl + self.ku + i - j
    }

    fn factor_in_place(&mut self) -> Result<(), LinalgError> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = self.at(j, j);
            let mut jp = 0;
            let mut best = self.ab[col].norm();
            for t in 1..=km {
                let v = self.ab[col + t].norm();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            self.pivots[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(LinalgError::SingularPivot {
                    pivot: self.perm[j],
                });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let (x, y) = (self.at(j, c), self.at(j + jp, c));
                    self.ab.swap(x, y);
                }
            }
            let inv = self.ab[col].inv();
            for t in 1..=km {
                self.ab[col + t] *= inv;
            }
            for c in j + 1..=ju {
                let ajc = self.ab[self.at(j, c)];
                if ajc == ZERO {
                    continue;
                }
                let base = self.at(j, c);
                for t in 1..=km {
                    let l = self.ab[col + t];
                    self.ab[base + t] -= l * ajc;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth after reordering.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&old| b[old]).collect();
        self.solve_permuted(&mut x);
        let mut out = vec![ZERO; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }

    fn solve_permuted(&self, x: &mut [Complex64]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            let col = self.at(j, j);
            for t in 1..=self.kl.min(n - 1 - j) {
                x[j + t] -= self.ab[col + t] * xj;
            }
        }
        for j in (0..n).rev() {
            let col = self.at(j, j);
            x[j] /= self.ab[col];
            let xj = x[j];
            let lo = j.saturating_sub(kv);
            for i in lo..j {
                x[i] -= self.ab[col - (j - i)] * xj;
            }
        }
    }
}

/// Solves `A x = b`.
pub fn lu_solve(a: &SparseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if b.len() != a.dim() {
        return Err(LinalgError::Dimension(format!(
            "rhs has length {}, matrix is {}x{1}",
            b.len(),
            a.dim()
        )));
    }
    Ok(BandLu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::{norm2, TripletBuilder};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &SparseMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
        let ax = a.mul_vec(x);
        let r: Vec<_> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
        norm2(&r) / norm2(b)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        assert_eq!(lu_solve(&SparseMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_system() {
        let a = SparseMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let x = lu_solve(&a, &[c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn random_dense_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let rows: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { n as f64 } else { 0.0 };
                        c(d + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                    .collect()
            })
            .collect();
        let a = SparseMatrix::from_dense(&rows).unwrap();
        let b: Vec<_> = (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let x = lu_solve(&a, &b).unwrap();
        assert!(residual(&a, &x, &b) <= 1e-10);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0,1],[1,0]] needs a row swap
        let a = SparseMatrix::from_dense(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let x = lu_solve(&a, &[c(3.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(5.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let mut b = TripletBuilder::new(3);
        b.add(0, 0, 1.0);
        b.add(2, 2, 1.0);
        let err = lu_solve(&b.build(), &[c(1.0, 0.0); 3]).unwrap_err();
        assert_eq!(err, LinalgError::SingularPivot { pivot: 1 });
    }

    #[test]
    fn rcm_shrinks_bandwidth_of_shuffled_path() {
        // path graph with scrambled labels
        let n = 40;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut labels: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.random_range(0..=i));
        }
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            b.add(labels[i], labels[i], c(4.0, 1.0));
            if i + 1 < n {
                b.add(labels[i], labels[i + 1], -1.0);
                b.add(labels[i + 1], labels[i], -1.0);
            }
        }
        let a = b.build();
        let lu = BandLu::factor(&a).unwrap();
        assert_eq!(lu.bandwidth(), (1, 1));
        let rhs: Vec<_> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        assert!(residual(&a, &lu.solve(&rhs), &rhs) < 1e-13);
    }
}
