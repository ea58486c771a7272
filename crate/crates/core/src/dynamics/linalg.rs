//! Small dense matrices (n ≤ 3) and closed-form eigenvalues.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math::{acos, cbrt, cos, sqrt};

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|a| a * a).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Top-left `k × k` block.
    pub fn leading_block(&self, k: usize) -> Matrix {
        let mut m = Matrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    pub fn determinant(&self) -> f64 {
        let a = |i, j| self[(i, j)];
        match self.n {
            0 => 1.0,
            1 => a(0, 0),
            2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
            3 => {
                a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                    - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
            }
            _ => self.lu_determinant(),
        }
    }

    fn lu_determinant(&self) -> f64 {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| m[x * n + c].abs().total_cmp(&m[y * n + c].abs()))
                .unwrap_or(c);
            if m[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for k in 0..n {
                    m.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            det *= m[c * n + c];
            for r in c + 1..n {
                let f = m[r * n + c] / m[c * n + c];
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
        det
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` for a (numerically) singular matrix.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut m = self.data.clone();
        let mut rhs = b.to_vec();
        let scale = self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| m[x * n + c].abs().total_cmp(&m[y * n + c].abs()))?;
            if m[p * n + c].abs() <= 1e-14 * scale {
                return None;
            }
            if p != c {
                for k in 0..n {
                    m.swap(p * n + k, c * n + k);
                }
                rhs.swap(p, c);
            }
            for r in c + 1..n {
                let f = m[r * n + c] / m[c * n + c];
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
                rhs[r] -= f * rhs[c];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|k| m[r * n + k] * x[k]).sum();
            x[r] = (rhs[r] - s) / m[r * n + r];
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// A complex eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

/// Tolerance on the characteristic polynomial residual, relative to `‖A‖^n`.
const CHARPOLY_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvalues of a 1×1, 2×2 or 3×3 matrix, sorted by decreasing real part.
///
/// 2×2 uses the quadratic formula in its cancellation-free form; 3×3 solves the
/// characteristic cubic (trigonometric form for three real roots, Cardano
/// otherwise) and checks every root against the characteristic polynomial.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<Eigenvalue>> {
    let mut eig = match m.dim() {
        1 => vec![Eigenvalue::real(m[(0, 0)])],
        2 => quadratic_roots(-m.trace(), m.determinant()).to_vec(),
        3 => {
            let a = -m.trace();
            let b = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
                + m[(0, 0)] * m[(2, 2)]
                - m[(0, 2)] * m[(2, 0)]
                + m[(1, 1)] * m[(2, 2)]
                - m[(1, 2)] * m[(2, 1)];
            let c = -m.determinant();
            let roots = cubic_roots(a, b, c);
            let scale = m.frobenius_norm().max(1.0);
            for r in &roots {
                let residual = charpoly_abs(a, b, c, *r);
                if residual > CHARPOLY_RESIDUAL_TOL * scale * scale * scale {
                    return Err(Error::EigenResidual { residual });
                }
            }
            roots.to_vec()
        }
        n => {
            return Err(Error::Unsupported(alloc::format!(
                "eigenvalues are implemented for n ≤ 3, got {n}"
            )))
        }
    };
    eig.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(eig)
}

/// Roots of `λ² + a λ + b`.
fn quadratic_roots(a: f64, b: f64) -> [Eigenvalue; 2] {
    let disc = a * a - 4.0 * b;
    if disc >= 0.0 {
        let s = sqrt(disc);
        let q = if a >= 0.0 { -(a + s) / 2.0 } else { (-a + s) / 2.0 };
        if q == 0.0 {
            return [Eigenvalue::real(0.0), Eigenvalue::real(-a)];
        }
        [Eigenvalue::real(q), Eigenvalue::real(b / q)]
    } else {
        let im = sqrt(-disc) / 2.0;
        [
            Eigenvalue { re: -a / 2.0, im },
            Eigenvalue { re: -a / 2.0, im: -im },
        ]
    }
}

/// Roots of `λ³ + a λ² + b λ + c`.
fn cubic_roots(a: f64, b: f64, c: f64) -> [Eigenvalue; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;

    let real_root = if p < 0.0 && disc <= 0.0 {
        // Three real roots: trigonometric form.
        let r = sqrt(-p / 3.0);
        let arg = (3.0 * q / (2.0 * p) * sqrt(-3.0 / p)).clamp(-1.0, 1.0);
        let phi = acos(arg) / 3.0;
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            *root = 2.0 * r * cos(phi - 2.0 * PI * k as f64 / 3.0) - shift;
        }
        return roots.map(|x| Eigenvalue::real(polish(a, b, c, x)));
    } else {
        let s = sqrt(disc.max(0.0));
        cbrt(-q / 2.0 + s) + cbrt(-q / 2.0 - s) - shift
    };
    let x = polish(a, b, c, real_root);
    // Deflate: λ³ + aλ² + bλ + c = (λ - x)(λ² + (a + x)λ + (b + x(a + x))).
    let [u, v] = quadratic_roots(a + x, b + x * (a + x));
    [Eigenvalue::real(x), u, v]
}

/// Two Newton steps on the cubic; harmless when the root is already exact.
fn polish(a: f64, b: f64, c: f64, mut x: f64) -> f64 {
    for _ in 0..2 {
        let f = ((x + a) * x + b) * x + c;
        let df = (3.0 * x + 2.0 * a) * x + b;
        if df == 0.0 {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() || charpoly_abs(a, b, c, Eigenvalue::real(next)) > f.abs() {
            break;
        }
        x = next;
    }
    x
}

fn charpoly_abs(a: f64, b: f64, c: f64, z: Eigenvalue) -> f64 {
    // Horner in complex arithmetic.
    let mul = |(x, y): (f64, f64), (u, v): (f64, f64)| (x * u - y * v, x * v + y * u);
    let zc = (z.re, z.im);
    let mut acc = (1.0, 0.0);
    for coef in [a, b, c] {
        acc = mul(acc, zc);
        acc.0 += coef;
    }
    sqrt(acc.0 * acc.0 + acc.1 * acc.1)
}
