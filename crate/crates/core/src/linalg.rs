//! Small dense linear algebra: exact rational matrices and float helpers.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Square matrix of exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix { n, data: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        RatMatrix { n, data }
    }

    /// `entries / denom`, entries row-major.
    pub fn from_scaled_integers(n: usize, entries: &[i64], denom: i64) -> Self {
        assert_eq!(entries.len(), n * n);
        let d = BigInt::from(denom);
        RatMatrix {
            n,
            data: entries.iter().map(|&v| BigRational::new(BigInt::from(v), d.clone())).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).fold(BigRational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| rat_to_f64(self.get(i, j)))
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        RatMatrix::from_fn(n, |i, j| {
            let mut acc = BigRational::zero();
            for k in 0..n {
                if !self.get(i, k).is_zero() && !other.get(k, j).is_zero() {
                    acc += self.get(i, k) * other.get(k, j);
                }
            }
            acc
        })
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> BigRational {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return BigRational::zero();
            };
            if r != c {
                for k in 0..n {
                    a.swap(r * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = a[c * n + c].clone();
            det *= &piv;
            for r in c + 1..n {
                if a[r * n + c].is_zero() {
                    continue;
                }
                let f = &a[r * n + c] / &piv;
                for k in c..n {
                    let t = &f * &a[c * n + k];
                    a[r * n + k] -= t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse. On singularity returns a nonzero null vector.
    pub fn inverse(&self) -> Result<RatMatrix, Vec<BigRational>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = RatMatrix::identity(n).data;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return Err(self.null_vector().unwrap_or_default());
            };
            if r != c {
                for k in 0..n {
                    a.swap(r * n + k, c * n + k);
                    inv.swap(r * n + k, c * n + k);
                }
            }
            let piv = a[c * n + c].clone();
            for k in 0..n {
                a[c * n + k] /= &piv;
                inv[c * n + k] /= &piv;
            }
            for r in 0..n {
                if r == c || a[r * n + c].is_zero() {
                    continue;
                }
                let f = a[r * n + c].clone();
                for k in 0..n {
                    if !a[c * n + k].is_zero() {
                        let t = &f * &a[c * n + k];
                        a[r * n + k] -= t;
                    }
                    if !inv[c * n + k].is_zero() {
                        let t = &f * &inv[c * n + k];
                        inv[r * n + k] -= t;
                    }
                }
            }
        }
        Ok(RatMatrix { n, data: inv })
    }

    /// A nonzero `v` with `A v = 0`, if one exists.
    pub fn null_vector(&self) -> Option<Vec<BigRational>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for c in 0..n {
            let Some(r) = (row..n).find(|&r| !a[r * n + c].is_zero()) else {
                continue;
            };
            for k in 0..n {
                a.swap(r * n + k, row * n + k);
            }
            let piv = a[row * n + c].clone();
            for k in 0..n {
                a[row * n + k] /= &piv;
            }
            for r in 0..n {
                if r != row && !a[r * n + c].is_zero() {
                    let f = a[r * n + c].clone();
                    for k in 0..n {
                        let t = &f * &a[row * n + k];
                        a[r * n + k] -= t;
                    }
                }
            }
            pivot_cols.push(c);
            row += 1;
        }
        let free = (0..n).find(|c| !pivot_cols.contains(c))?;
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[r * n + free].clone();
        }
        Some(v)
    }

    /// Characteristic polynomial `det(xI - A)` as coefficients `c_0..c_n`
    /// (`c_n = 1`), by the Faddeev-LeVerrier recursion.
    pub fn charpoly(&self) -> Vec<BigRational> {
        let n = self.n;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        let mut mk = RatMatrix::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&mk);
            for i in 0..n {
                next.data[i * n + i] += &coeffs[n - k + 1];
            }
            let am = self.mul(&next);
            coeffs[n - k] = -am.trace() / BigRational::from_integer(BigInt::from(k));
            mk = next;
        }
        coeffs
    }

    /// `x^T A x` for a ±1 / small-integer vector.
    pub fn quad_form_i8(&self, x: &[i8]) -> BigRational {
        let n = self.n;
        let mut acc = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                let s = x[i] as i64 * x[j] as i64;
                if s != 0 && !self.data[i * n + j].is_zero() {
                    acc += &self.data[i * n + j] * BigInt::from(s);
                }
            }
        }
        acc
    }

    /// Scales to a common denominator: returns `(Q, L)` with `A = Q / L`
    /// and `L > 0`, or `None` if an entry of `Q` overflows `i128`.
    pub fn to_scaled_i128(&self) -> Option<(Vec<i128>, i128)> {
        let mut l = BigInt::one();
        for v in &self.data {
            l = l.lcm(v.denom());
        }
        let mut q = Vec::with_capacity(self.data.len());
        for v in &self.data {
            let s = v.numer() * (&l / v.denom());
            q.push(s.to_i128()?);
        }
        Some((q, l.to_i128()?))
    }
}

/// Multiplies polynomials given as ascending coefficient vectors.
pub fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(x - root)^mult`.
pub fn poly_root_power(root: &BigRational, mult: usize) -> Vec<BigRational> {
    let lin = [-root.clone(), BigRational::one()];
    let mut out = vec![BigRational::one()];
    for _ in 0..mult {
        out = poly_mul(&out, &lin);
    }
    out
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Inverse and log-determinant of a symmetric positive definite matrix via
/// Cholesky; `None` when the factorization fails.
pub fn spd_inverse_logdet(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let chol = m.clone().cholesky()?;
    let l = chol.l_dirty();
    let mut logdet = 0.0;
    for i in 0..m.nrows() {
        let d = l[(i, i)];
        if !(d > 0.0) {
            return None;
        }
        logdet += 2.0 * libm::log(d);
    }
    Some((chol.inverse(), logdet))
}

/// Unit-norm direction of the smallest singular value.
pub fn weakest_direction(m: &DMatrix<f64>) -> Vec<f64> {
    let svd = m.clone().svd(false, true);
    let Some(vt) = svd.v_t else {
        return Vec::new();
    };
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
    vt.row(k).iter().copied().collect()
}
