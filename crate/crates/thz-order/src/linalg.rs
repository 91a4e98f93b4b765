//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Every matrix in this crate is an N×N or N×K block with N ≤ 16 (the antenna
//! count), so there is no need for a general linear-algebra dependency. The
//! eigensolver is a cyclic complex Jacobi iteration: for matrices this size it
//! converges in a handful of sweeps, produces orthonormal eigenvectors to
//! machine precision, and — unlike threaded LAPACK backends — gives the same
//! bit pattern on every platform, which the seeded-reproducibility tests rely
//! on.

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
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
        CMatrix { rows, cols, data }
    }

    /// Outer product `x · yᴴ`.
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        CMatrix::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn hermitian_transpose(&self) -> Self {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |A[i][j] − conj(A[j][i])| over all pairs — zero for an exactly
    /// Hermitian matrix.
    pub fn hermitian_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            worst = worst.max(self.get(i, i).im.abs());
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Quadratic form `xᴴ A x` (complex; real for Hermitian A up to rounding).
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, x.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                row += self.get(i, j) * x[j];
            }
            acc += x[i].conj() * row;
        }
        acc
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are sorted ascending; `vectors.column(k)` is the orthonormal
/// eigenvector for `values[k]`. Only the lower/upper symmetric content of the
/// input matters; the caller is expected to validate Hermitian-ness to its own
/// tolerance beforehand.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation annihilates one off-diagonal pair `(p, q)` with the unitary
/// two-plane rotation built from the phase of `A[p][q]` and the small-root
/// tangent choice, which keeps the rotation angle ≤ 45° for stability.
/// Sweeps repeat until the off-diagonal Frobenius mass falls below
/// `1e-14 · ‖A‖_F` (or 50 sweeps, which small matrices never approach).
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    assert_eq!(a.rows, a.cols, "eigendecomposition needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    // Symmetrize exactly so rounding asymmetry cannot bias the iteration.
    for i in 0..n {
        m.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            m.set(i, j, avg);
            m.set(j, i, avg.conj());
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag; // e^{iα}
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                // Annihilation condition: c·s·(aqq − app) + mag·(c² − s²) = 0,
                // i.e. t² − 2τt − 1 = 0 with t = s/c. Take the small-|t| root
                // (rotation angle ≤ 45°) in its cancellation-free form.
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns of the rotation touching (p, q):
                //   col p = ( c, s·e^{−iα} )ᵀ, col q = ( −s·e^{iα}, c )ᵀ.
                let se_neg = s * phase.conj();
                let se_pos = s * phase;

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let mrp = m.get(r, p);
                    let mrq = m.get(r, q);
                    let new_rp = mrp * c + mrq * se_neg;
                    let new_rq = -mrp * se_pos + mrq * c;
                    m.set(r, p, new_rp);
                    m.set(r, q, new_rq);
                    m.set(p, r, new_rp.conj());
                    m.set(q, r, new_rq.conj());
                }
                let new_pp = app * c * c + 2.0 * c * s * mag + aqq * s * s;
                let new_qq = app * s * s - 2.0 * c * s * mag + aqq * c * c;
                m.set(p, p, Complex64::new(new_pp, 0.0));
                m.set(q, q, Complex64::new(new_qq, 0.0));
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));

                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp * c + vrq * se_neg);
                    v.set(r, q, -vrp * se_pos + vrq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v.get(r, order[k]));
    HermitianEigen { values, vectors }
}
