use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{norm2, BandLu, LinalgError, SparseMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalue and (unit 2-norm) eigenvector of `λ²M + λC + K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub vector: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QepOptions {
    /// Eigenvalues nearest this point are returned. Defaults to `i·2π·300`.
    pub shift: Complex64,
    /// Backward error every returned pair must meet.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra subspace vectors beyond twice the requested count.
    pub guard: usize,
    /// Seed of the starting subspace.
    pub seed: u64,
}

impl Default for QepOptions {
    fn default() -> Self {
        Self {
            shift: Complex64::new(0.0, 2.0 * PI * 300.0),
            tol: 1e-8,
            max_iter: 500,
            guard: 8,
            seed: 0x5eed,
        }
    }
}

/// Normwise backward error `‖Q(λ)x‖ / ((|λ|²‖M‖ + |λ|‖C‖ + ‖K‖)‖x‖)`.
pub fn qep_backward_error(
    m: &SparseMatrix,
    c: &SparseMatrix,
    k: &SparseMatrix,
    pair: &EigenPair,
) -> f64 {
    let l = pair.lambda;
    let x = &pair.vector;
    let mut r = k.mul_vec(x);
    c.mul_vec_acc(l, x, &mut r);
    m.mul_vec_acc(l * l, x, &mut r);
    let scale = l.norm_sqr() * m.norm_inf() + l.norm() * c.norm_inf() + k.norm_inf();
    norm2(&r) / (scale * norm2(x))
}

/// `(A − σB)⁻¹B` for the first companion pencil `A = [0 I; −K −C]`,
/// `B = [I 0; 0 M]`, applied through a factorization of `Q(σ)` only.
struct ShiftInvert<'a> {
    m: &'a SparseMatrix,
    c: &'a SparseMatrix,
    shift: Complex64,
    lu: BandLu,
    n: usize,
}

impl<'a> ShiftInvert<'a> {
    fn new(
        m: &'a SparseMatrix,
        c: &'a SparseMatrix,
        k: &'a SparseMatrix,
        shift: Complex64,
    ) -> Result<Self, LinalgError> {
        let q = SparseMatrix::linear_combination(&[
            (shift * shift, m),
            (shift, c),
            (Complex64::new(1.0, 0.0), k),
        ])?;
        Ok(Self {
            m,
            c,
            shift,
            lu: BandLu::factor(&q)?,
            n: m.dim(),
        })
    }

    fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let (x, y) = z.split_at(n);
        // Q(σ) p = −M y − (C + σM) x,  q = x + σ p
        let mut rhs = vec![ZERO; n];
        self.m.mul_vec_acc(-Complex64::new(1.0, 0.0), y, &mut rhs);
        self.c.mul_vec_acc(-Complex64::new(1.0, 0.0), x, &mut rhs);
        self.m.mul_vec_acc(-self.shift, x, &mut rhs);
        let p = self.lu.solve(&rhs);
        let mut out = p.clone();
        out.extend(x.iter().zip(&p).map(|(xi, pi)| xi + self.shift * pi));
        out
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Modified Gram–Schmidt, two passes. Vectors that collapse are replaced by
/// fresh random directions.
fn orthonormalize(vs: &mut [Vec<Complex64>], rng: &mut ChaCha8Rng) {
    for i in 0..vs.len() {
        for attempt in 0..4 {
            let before = norm2(&vs[i]);
            for _ in 0..2 {
                for j in 0..i {
                    let (done, rest) = vs.split_at_mut(i);
                    let h = dot(&done[j], &rest[0]);
                    for (v, q) in rest[0].iter_mut().zip(&done[j]) {
                        *v -= h * q;
                    }
                }
            }
            let after = norm2(&vs[i]);
            if after > 1e-10 * before && after > 0.0 {
                vs[i].iter_mut().for_each(|v| *v /= after);
                break;
            }
            assert!(attempt < 3, "cannot extend orthonormal basis");
            vs[i] = random_vector(vs[i].len(), rng);
        }
    }
}

fn random_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Eigenpairs of a small dense matrix via complex Schur form, sorted by
/// decreasing modulus.
fn dense_eigen(
    h: &DMatrix<Complex64>,
) -> Result<Vec<(Complex64, DVector<Complex64>)>, LinalgError> {
    let p = h.nrows();
    let schur = nalgebra::Schur::try_new(h.clone(), f64::EPSILON, 100_000).ok_or(
        LinalgError::NoConvergence {
            iterations: 100_000,
            residual: f64::NAN,
        },
    )?;
    let (q, t) = schur.unpack();
    let scale = t
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(p);
    for i in 0..p {
        let theta = t[(i, i)];
        let mut w = DVector::from_element(p, ZERO);
        w[i] = Complex64::new(1.0, 0.0);
        for r in (0..i).rev() {
            let s: Complex64 = (r + 1..=i).map(|c| t[(r, c)] * w[c]).sum();
            let mut d = t[(r, r)] - theta;
            if d.norm() < f64::EPSILON * scale {
                d = Complex64::new(f64::EPSILON * scale, 0.0);
            }
            w[r] = -s / d;
        }
        let mut y = &q * w;
        let nrm = y.norm();
        y /= Complex64::new(nrm, 0.0);
        out.push((theta, y));
    }
    out.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(a.0.re.total_cmp(&b.0.re))
            .then(a.0.im.total_cmp(&b.0.im))
    });
    Ok(out)
}

/// Scales to unit norm and rotates the largest entry onto the positive real
/// axis.
fn normalize_phase(v: &mut [Complex64]) {
    let nrm = norm2(v);
    let big = v
        .iter()
        .copied()
        .fold(ZERO, |acc, z| if z.norm() > acc.norm() { z } else { acc });
    if nrm == 0.0 || big == ZERO {
        return;
    }
    let rot = big.conj() / (big.norm() * nrm);
    v.iter_mut().for_each(|z| *z *= rot);
}

/// The `nev` eigenpairs of `λ²M + λC + K` nearest `opts.shift`, sorted by
/// distance to the shift.
///
/// The problem is linearized to the first companion pencil and solved by
/// block shift-invert inverse iteration: each sweep applies `(A − σB)⁻¹B` to a
/// Gram–Schmidt orthonormalized block and extracts Ritz pairs from the
/// projected matrix. Only `Q(σ)` (size `n`) is ever factored.
pub fn qep_solve(
    m: &SparseMatrix,
    c: &SparseMatrix,
    k: &SparseMatrix,
    nev: usize,
    opts: &QepOptions,
) -> Result<Vec<EigenPair>, LinalgError> {
    let n = m.dim();
    if c.dim() != n || k.dim() != n {
        return Err(LinalgError::Dimension(format!(
            "M is {n}x{n}, C is {0}x{0}, K is {1}x{1}",
            c.dim(),
            k.dim()
        )));
    }
    let dim = 2 * n;
    if nev == 0 || nev > dim {
        return Err(LinalgError::TooManyEigenpairs {
            requested: nev,
            dimension: dim,
        });
    }
    let op = ShiftInvert::new(m, c, k, opts.shift)?;
    let block = (2 * nev + opts.guard).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<Complex64>> = (0..block).map(|_| random_vector(dim, &mut rng)).collect();
    orthonormalize(&mut basis, &mut rng);

    let target = opts.tol * 1e-3;
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;
    for iter in 1..=opts.max_iter {
        let images: Vec<Vec<Complex64>> = basis.iter().map(|v| op.apply(v)).collect();
        let h = DMatrix::from_fn(block, block, |i, j| dot(&basis[i], &images[j]));
        let ritz = dense_eigen(&h)?;

        let combine = |vs: &[Vec<Complex64>], y: &DVector<Complex64>| {
            let mut out = vec![ZERO; dim];
            for (v, &coef) in vs.iter().zip(y.iter()) {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += coef * x;
                }
            }
            out
        };

        let mut pairs = Vec::with_capacity(nev);
        let mut worst = 0.0f64;
        for (theta, y) in ritz.iter().take(nev) {
            let lambda = if theta.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                opts.shift + theta.inv()
            };
            let mut vector = combine(&basis, y);
            vector.truncate(n);
            normalize_phase(&mut vector);
            let pair = EigenPair { lambda, vector };
            let eta = qep_backward_error(m, c, k, &pair);
            worst = worst.max(if eta.is_finite() { eta } else { f64::INFINITY });
            pairs.push(pair);
        }

        if worst < best * 0.5 {
            best = worst;
            since_best = 0;
        } else {
            since_best += 1;
        }
        let stalled = since_best >= 20 && worst <= opts.tol;
        if worst <= target || stalled || (iter == opts.max_iter && worst <= opts.tol) {
            pairs.sort_by(|a, b| {
                (a.lambda - opts.shift)
                    .norm()
                    .total_cmp(&(b.lambda - opts.shift).norm())
                    .then(a.lambda.im.total_cmp(&b.lambda.im))
                    .then(a.lambda.re.total_cmp(&b.lambda.re))
            });
            return Ok(pairs);
        }

        basis = ritz.iter().map(|(_, y)| combine(&images, y)).collect();
        orthonormalize(&mut basis, &mut rng);
    }
    Err(LinalgError::NoConvergence {
        iterations: opts.max_iter,
        residual: best,
    })
}
