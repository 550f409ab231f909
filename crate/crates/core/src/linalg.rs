//! Self-contained dense complex linear algebra at desk scale.
//!
//! Everything downstream (twirls, block decompositions, Haar sampling) runs
//! on these routines, so they are kept deliberately boring: row-major
//! `Complex64` storage, a cyclic Jacobi eigensolver for Hermitian inputs, and
//! a Householder-QR Haar sampler with explicit diagonal phase correction.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d += s;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d -= s;
        }
        out
    }

    pub fn scale(&self, c: C64) -> Matrix {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d *= c;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Hilbert–Schmidt inner product tr(A† B).
    pub fn hs_inner(&self, other: &Matrix) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// tr(A B†) without forming the product.
    pub fn trace_mul_dagger(&self, other: &Matrix) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum()
    }

    /// ‖U†U − I‖_max, zero for a unitary.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger().matmul(self).sub(&Matrix::identity(self.cols)).max_abs()
    }

    /// Conjugation U · self · U†.
    pub fn conjugated_by(&self, u: &Matrix) -> Matrix {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        assert_eq!(col.len(), self.rows);
        for (i, v) in col.iter().enumerate() {
            self.data[i * self.cols + j] = *v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let v = self[(i, j)];
                write!(f, "{:+.3}{:+.3}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix, by cyclic Jacobi rotations. Sweeps stop when the off-diagonal
/// Frobenius mass falls below `1e-12 · ‖M‖_F`.
pub fn hermitian_eig(m: &Matrix, tol: f64) -> (Vec<f64>, Matrix) {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let defect = m.sub(&m.dagger()).max_abs();
    assert!(
        defect <= tol * m.frobenius_norm().max(1.0),
        "hermitian_eig on a non-Hermitian matrix (defect {defect:.3e})"
    );
    let mut a = m.add(&m.dagger()).scale(C64::new(0.5, 0.0));
    let mut v = Matrix::identity(n);
    let target = 1e-12 * a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let abs = apq.norm();
                let phase = apq / abs;
                // Diagonalize the 2x2 block [[app, |apq|e^{iφ}], [·, aqq]].
                let tau = (aqq - app) / (2.0 * abs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation: [p q] -> [c·p - s·conj(phase)·q, s·phase·p + c·q]
                let cp = C64::new(c, 0.0);
                let sp = phase * s;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cp - aiq * sp.conj();
                    a[(i, q)] = aip * sp + aiq * cp;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cp - aqj * sp;
                    a[(q, j)] = apj * sp.conj() + aqj * cp;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cp - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * cp;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        let col = v.column(old);
        vecs.set_column(new, &col);
    }
    (vals, vecs)
}

fn gaussian_matrix(m: usize, rng: &mut impl Rng) -> Matrix {
    let mut g = Matrix::zeros(m, m);
    for v in g.data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    g
}

/// Householder QR of a square complex matrix. Returns (Q, diag(R)).
fn householder_qr(a: &Matrix) -> (Matrix, Vec<C64>) {
    let n = a.rows();
    let mut r = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n {
        // Reflect column k below the diagonal onto ±e_k.
        let mut norm = 0.0;
        for i in k..n {
            norm += r[(i, k)].norm_sqr();
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let akk = r[(k, k)];
        let alpha = if akk.norm() == 0.0 { C64::new(-norm, 0.0) } else { -(akk / akk.norm()) * norm };
        let mut v: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r := (I - 2 v v†/|v|²) r ; q := q (I - 2 v v†/|v|²)
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[(k + i, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for (i, vi) in v.iter().enumerate() {
                let val = r[(k + i, j)] - f * vi;
                r[(k + i, j)] = val;
            }
        }
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                dot += q[(i, k + j)] * vj;
            }
            let f = dot * (2.0 / vnorm2);
            for (j, vj) in v.iter().enumerate() {
                let val = q[(i, k + j)] - f * vj.conj();
                q[(i, k + j)] = val;
            }
        }
    }
    let diag = (0..n).map(|k| r[(k, k)]).collect();
    (q, diag)
}

/// Haar-distributed unitary on U(m): complex Gaussian matrix, Householder QR,
/// then each column of Q rescaled so the matching diagonal entry of R is
/// positive real. Without the rescaling the output is not Haar.
pub fn haar_unitary(m: usize, rng: &mut impl Rng) -> Matrix {
    assert!(m >= 1);
    let g = gaussian_matrix(m, rng);
    let (mut q, diag) = householder_qr(&g);
    for (k, d) in diag.iter().enumerate() {
        let ph = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..m {
            let val = q[(i, k)] * ph;
            q[(i, k)] = val;
        }
    }
    q
}

/// The uncorrected QR orthonormalization: unitary, but *not* Haar. Kept as a
/// negative control for the sampler's moment tests.
pub fn qr_unitary_uncorrected(m: usize, rng: &mut impl Rng) -> Matrix {
    let g = gaussian_matrix(m, rng);
    householder_qr(&g).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shard_rng;

    #[test]
    fn basic_ops() {
        let i8m = Matrix::identity(8);
        assert_eq!(i8m.trace(), C64::new(8.0, 0.0));
        let i2 = Matrix::identity(2);
        assert!(i2.kron(&i2).sub(&Matrix::identity(4)).max_abs() == 0.0);
        let mut rng = shard_rng(7, 0);
        let u = haar_unitary(5, &mut rng);
        assert!((u.trace_mul_dagger(&u).re - 5.0).abs() < 1e-10);
    }

    #[test]
    fn eig_diagonal_and_pauli_x() {
        let d = Matrix::from_rows(vec![
            vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(3.0, 0.0)],
        ]);
        let (vals, _) = hermitian_eig(&d, 1e-9);
        assert!(vals.iter().zip([1.0, 2.0, 3.0]).all(|(a, b)| (a - b).abs() < 1e-12));

        let x = Matrix::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ]);
        let (vals, vecs) = hermitian_eig(&x, 1e-9);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        assert!(vecs.unitarity_defect() < 1e-9);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = shard_rng(11, 0);
        for dim in [3usize, 8, 17] {
            let g = gaussian_matrix(dim, &mut rng);
            let h = g.add(&g.dagger()).scale(C64::new(0.5, 0.0));
            let (vals, vecs) = hermitian_eig(&h, 1e-9);
            let mut lam = Matrix::zeros(dim, dim);
            for (i, v) in vals.iter().enumerate() {
                lam[(i, i)] = C64::new(*v, 0.0);
            }
            let recon = vecs.matmul(&lam).matmul(&vecs.dagger());
            assert!(recon.sub(&h).frobenius_norm() < 1e-9 * h.frobenius_norm().max(1.0));
            assert!(vecs.unitarity_defect() < 1e-9);
            for (i, &l) in vals.iter().enumerate() {
                let col = vecs.column(i);
                let mut resid: f64 = 0.0;
                for r in 0..dim {
                    let mut hv = C64::new(0.0, 0.0);
                    for c in 0..dim {
                        hv += h[(r, c)] * col[c];
                    }
                    resid += (hv - col[r] * l).norm_sqr();
                }
                assert!(resid.sqrt() < 1e-9 * h.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = shard_rng(3, 0);
        for m in [1usize, 2, 5] {
            let u = haar_unitary(m, &mut rng);
            assert!(u.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn haar_trace_moments() {
        // E|tr U|^2 = 1 on U(m); E|tr U|^4 = 2 on U(2).
        let samples = 40_000;
        let mut rng = shard_rng(5, 1);
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        let mut s2sq = 0.0;
        let mut s4sq = 0.0;
        for _ in 0..samples {
            let u = haar_unitary(2, &mut rng);
            let t2 = u.trace().norm_sqr();
            let t4 = t2 * t2;
            s2 += t2;
            s4 += t4;
            s2sq += t2 * t2;
            s4sq += t4 * t4;
        }
        let m = samples as f64;
        let mean2 = s2 / m;
        let mean4 = s4 / m;
        let sd2 = ((s2sq / m - mean2 * mean2) / m).sqrt();
        let sd4 = ((s4sq / m - mean4 * mean4) / m).sqrt();
        assert!((mean2 - 1.0).abs() < 5.0 * sd2, "mean2={mean2} sd={sd2}");
        assert!((mean4 - 2.0).abs() < 5.0 * sd4, "mean4={mean4} sd={sd4}");

        // m=1: uniform phase, |tr U|^2 = 1 exactly.
        let u1 = haar_unitary(1, &mut rng);
        assert!((u1.trace().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncorrected_qr_is_biased() {
        // Negative control: skipping the diagonal phase correction biases the
        // |tr U|^2 moment on U(2) well past 5 sigma.
        let samples = 40_000;
        let mut rng = shard_rng(6, 2);
        let mut s = 0.0;
        let mut ssq = 0.0;
        for _ in 0..samples {
            let u = qr_unitary_uncorrected(2, &mut rng);
            let t = u.trace().norm_sqr();
            s += t;
            ssq += t * t;
        }
        let m = samples as f64;
        let mean = s / m;
        let sd = ((ssq / m - mean * mean) / m).sqrt();
        assert!(
            (mean - 1.0).abs() > 5.0 * sd,
            "uncorrected sampler unexpectedly matches the Haar moment: mean={mean} sd={sd}"
        );
    }
}
