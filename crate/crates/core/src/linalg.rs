//! Dense complex matrices: products, LU factorization with partial pivoting,
//! log-determinants and linear solves.

use std::ops::{Index, IndexMut};

use matrixmultiply::{zgemm, CGemmOption};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Largest entry modulus (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let r = self.row(i);
            for (k, a) in r.iter().enumerate() {
                acc += a * other[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        gemm_into(
            Complex64::new(1.0, 0.0),
            self.rows,
            self.cols,
            other.cols,
            &self.data,
            self.cols,
            &other.data,
            other.cols,
            Complex64::new(0.0, 0.0),
            &mut out.data,
            other.cols,
        );
        out
    }

    /// `I - self`.
    pub fn one_minus(&self) -> CMatrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for z in &mut m.data {
            *z = -*z;
        }
        for i in 0..self.rows {
            m[(i, i)] += 1.0;
        }
        m
    }

    pub fn scale_rows(&mut self, s: &[f64]) {
        assert_eq!(s.len(), self.rows);
        for (i, &f) in s.iter().enumerate() {
            for z in self.row_mut(i) {
                *z *= f;
            }
        }
    }

    pub fn scale_cols(&mut self, s: &[f64]) {
        assert_eq!(s.len(), self.cols);
        for i in 0..self.rows {
            for (z, &f) in self.row_mut(i).iter_mut().zip(s) {
                *z *= f;
            }
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `C <- alpha A B + beta C` on row-major slices with the given row strides.
#[allow(clippy::too_many_arguments)]
fn gemm_into(
    alpha: Complex64,
    m: usize,
    k: usize,
    n: usize,
    a: &[Complex64],
    lda: usize,
    b: &[Complex64],
    ldb: usize,
    beta: Complex64,
    c: &mut [Complex64],
    ldc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(m == 0 || a.len() >= (m - 1) * lda + k);
    assert!(k == 0 || b.len() >= (k - 1) * ldb + n);
    assert!(c.len() >= (m - 1) * ldc + n);
    // SAFETY: Complex64 is repr(C) with layout [re, im], matching matrixmultiply's
    // c64 = [f64; 2]; the bounds asserted above cover every strided access.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_ptr() as *const [f64; 2],
            lda as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            ldb as isize,
            1,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            ldc as isize,
            1,
        );
    }
}

const LU_BLOCK: usize = 48;

/// LU factorization `P A = L U` with partial pivoting; `L` unit lower.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    odd_swaps: bool,
}

impl Lu {
    pub fn factor(a: CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Config(format!(
                "LU of non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.data;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;

        let mut k0 = 0;
        while k0 < n {
            let kb = LU_BLOCK.min(n - k0);
            let k1 = k0 + kb;
            // unblocked factorization of the panel
            for j in k0..k1 {
                let (mut p, mut best) = (j, -1.0);
                for i in j..n {
                    let v = lu[i * n + j].norm();
                    if v > best {
                        best = v;
                        p = i;
                    }
                }
                if !(best > 0.0) || !best.is_finite() {
                    return Err(Error::Proximity(format!("singular pivot in column {j}")));
                }
                if p != j {
                    for c in 0..n {
                        lu.swap(p * n + c, j * n + c);
                    }
                    perm.swap(p, j);
                    odd_swaps = !odd_swaps;
                }
                let inv = 1.0 / lu[j * n + j];
                let (upper, lower) = lu.split_at_mut((j + 1) * n);
                let pivot_row = &upper[j * n + j + 1..j * n + k1];
                for i in 0..n - j - 1 {
                    let row = &mut lower[i * n..i * n + k1];
                    let l = row[j] * inv;
                    row[j] = l;
                    for (x, u) in row[j + 1..k1].iter_mut().zip(pivot_row) {
                        *x -= l * u;
                    }
                }
            }
            if k1 < n {
                // U12 = L11^{-1} A12
                for j in k0..k1 {
                    let (upper, lower) = lu.split_at_mut((j + 1) * n);
                    let src = &upper[j * n + k1..j * n + n];
                    for i in j + 1..k1 {
                        let off = (i - j - 1) * n;
                        let l = lower[off + j];
                        for (x, u) in lower[off + k1..off + n].iter_mut().zip(src) {
                            *x -= l * u;
                        }
                    }
                }
                // A22 -= L21 U12
                let m = n - k1;
                let (top, bottom) = lu.split_at_mut(k1 * n);
                let u12 = &top[k0 * n + k1..];
                let mut l21 = Vec::with_capacity(m * kb);
                for i in 0..m {
                    l21.extend_from_slice(&bottom[i * n + k0..i * n + k1]);
                }
                gemm_into(
                    Complex64::new(-1.0, 0.0),
                    m,
                    kb,
                    m,
                    &l21,
                    kb,
                    u12,
                    n,
                    Complex64::new(1.0, 0.0),
                    &mut bottom[k1..],
                    n,
                );
            }
            k0 = k1;
        }
        Ok(Self {
            n,
            lu,
            perm,
            odd_swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Complex logarithm of the determinant, imaginary part in `(-pi, pi]`.
    pub fn log_det(&self) -> Complex64 {
        let mut re = 0.0;
        let mut phase = Complex64::new(if self.odd_swaps { -1.0 } else { 1.0 }, 0.0);
        for i in 0..self.n {
            let u = self.lu[i * self.n + i];
            let r = u.norm();
            re += r.ln();
            phase *= u / r;
        }
        Complex64::new(re, phase.arg())
    }

    /// Solves `A X = B` in place for all columns of `b`.
    pub fn solve_in_place(&self, b: &mut CMatrix) {
        let n = self.n;
        assert_eq!(b.rows, n);
        let mut permuted = CMatrix::zeros(n, b.cols);
        for (i, &p) in self.perm.iter().enumerate() {
            permuted.row_mut(i).copy_from_slice(b.row(p));
        }
        let nc = b.cols;
        let x = &mut permuted.data;
        for i in 0..n {
            let (done, rest) = x.split_at_mut(i * nc);
            let row = &mut rest[..nc];
            for k in 0..i {
                let l = self.lu[i * n + k];
                if l != Complex64::new(0.0, 0.0) {
                    for (r, s) in row.iter_mut().zip(&done[k * nc..(k + 1) * nc]) {
                        *r -= l * s;
                    }
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut((i + 1) * nc);
            let row = &mut head[i * nc..];
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                if u != Complex64::new(0.0, 0.0) {
                    let s = &tail[(k - i - 1) * nc..(k - i) * nc];
                    for (r, v) in row.iter_mut().zip(s) {
                        *r -= u * v;
                    }
                }
            }
            let inv = 1.0 / self.lu[i * n + i];
            for r in row.iter_mut() {
                *r *= inv;
            }
        }
        *b = permuted;
    }
}

/// Complex log-determinant of a square matrix.
pub fn log_det(a: CMatrix) -> Result<Complex64> {
    Ok(Lu::factor(a)?.log_det())
}

/// Spectral radius estimate by power iteration on `a`; `iters` products.
pub fn spectral_radius_estimate(a: &CMatrix, iters: usize) -> f64 {
    let n = a.rows;
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64 * 0.618).sin() * 0.1, 0.0))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w: Vec<Complex64> = (0..n)
            .map(|i| a.row(i).iter().zip(&v).map(|(x, y)| x * y).sum())
            .collect();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / vnorm;
        v = w.into_iter().map(|z| z / norm).collect();
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, scale: f64, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
        })
    }

    fn naive_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
        })
    }

    #[test]
    fn matmul_matches_naive() {
        let a = random(37, 1.0, 1);
        let b = random(37, 1.0, 2);
        let c = a.matmul(&b);
        let d = naive_mul(&a, &b);
        for (x, y) in c.as_slice().iter().zip(d.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!((a.trace_of_product(&b) - c.trace()).norm() < 1e-12);
    }

    #[test]
    fn lu_reconstructs_and_solves() {
        for n in [1usize, 5, 47, 48, 49, 130] {
            let a = random(n, 1.0, n as u64);
            let lu = Lu::factor(a.clone()).unwrap();
            let x_true = random(n, 1.0, 99);
            let mut b = a.matmul(&x_true);
            lu.solve_in_place(&mut b);
            for (x, y) in b.as_slice().iter().zip(x_true.as_slice()) {
                assert!((x - y).norm() < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn log_det_small_cases() {
        let mut a = CMatrix::identity(3);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(1, 1)] = Complex64::new(-3.0, 0.0);
        a[(0, 2)] = Complex64::new(5.0, 1.0);
        let ld = log_det(a).unwrap();
        assert!((ld.re - 6f64.ln()).abs() < 1e-14);
        assert!((ld.im.abs() - std::f64::consts::PI).abs() < 1e-14);

        let mut p = CMatrix::zeros(2, 2);
        p[(0, 1)] = Complex64::new(1.0, 0.0);
        p[(1, 0)] = Complex64::new(1.0, 0.0);
        let ld = log_det(p).unwrap();
        assert!(ld.re.abs() < 1e-15);
        assert!((ld.im.abs() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CMatrix::zeros(4, 4);
        assert!(matches!(Lu::factor(a), Err(Error::Proximity(_))));
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = Complex64::new(0.2, 0.0);
        a[(1, 1)] = Complex64::new(-0.7, 0.0);
        a[(2, 2)] = Complex64::new(0.1, 0.0);
        assert!((spectral_radius_estimate(&a, 200) - 0.7).abs() < 1e-10);
    }

    #[test]
    fn log_det_matches_nalgebra() {
        let n = 60;
        let a = random(n, 0.02, 5).one_minus();
        let ours = log_det(a.clone()).unwrap();
        let na = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
        let det = na.determinant();
        assert!((ours.re - det.norm().ln()).abs() < 1e-12);
        assert!((ours.im - det.arg()).abs() < 1e-12);
    }
}
