//! Dense complex matrices and the matrix exponential.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    order: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![ZERO; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = ONE;
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::Shape("rows must form a square matrix".into()));
        }
        Ok(Self { order, data: rows.into_iter().flatten().collect() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.order + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { order: self.order, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.order, |i, j| self.get(j, i).conj())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.order).map(|i| self.get(i, j)).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.order)
            .map(|j| (0..self.order).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.order)
            .map(|i| {
                let row = &self.data[i * self.order..(i + 1) * self.order];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self * other)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::Shape(format!("orders {} and {} differ", self.order, other.order)));
        }
        Ok(())
    }

    fn axpy(&mut self, c: Complex64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let n = self.order;
        let mut lu = self.data.clone();
        let mut x = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[a * n + col].norm().total_cmp(&lu[b * n + col].norm()))
                .unwrap_or(col);
            if lu[pivot * n + col].norm() == 0.0 {
                return Err(Error::Capability("singular matrix in linear solve".into()));
            }
            if pivot != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot * n + j);
                    x.swap(col * n + j, pivot * n + j);
                }
            }
            let inv = ONE / lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] * inv;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = lu[col * n + j];
                    lu[row * n + j] -= factor * v;
                }
                for j in 0..n {
                    let v = x[col * n + j];
                    x[row * n + j] -= factor * v;
                }
            }
        }
        for col in (0..n).rev() {
            let inv = ONE / lu[col * n + col];
            for j in 0..n {
                x[col * n + j] *= inv;
            }
            for row in 0..col {
                let factor = lu[row * n + col];
                if factor == ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = x[col * n + j];
                    x[row * n + j] -= factor * v;
                }
            }
        }
        Ok(Self { order: n, data: x })
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.order, rhs.order, "matrix orders differ");
        let n = self.order;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        DenseMatrix { order: n, data: out }
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.order, rhs.order, "matrix orders differ");
        DenseMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.order, rhs.order, "matrix orders differ");
        DenseMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

// Padé(13) numerator coefficients and the matching 1-norm bound (Higham 2005).
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;
const MAX_SQUARINGS: i32 = 1000;

/// `exp(M)` by scaling and squaring with the degree-13 diagonal Padé
/// approximant.
pub fn matrix_exp(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_finite() {
        return Err(domain("matrix_exp requires finite entries"));
    }
    let n = m.order();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0));
    }
    let norm = m.norm_1();
    if !norm.is_finite() {
        return Err(Error::Capability("matrix norm overflows".into()));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    if squarings > MAX_SQUARINGS {
        return Err(Error::Capability(format!("matrix norm {norm:e} too large to exponentiate")));
    }
    let a = m.scale(Complex64::new(2f64.powi(-squarings), 0.0));
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let ident = DenseMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let mut inner_u = a6.scale(b(13));
    inner_u.axpy(b(11), &a4);
    inner_u.axpy(b(9), &a2);
    let mut u_poly = &a6 * &inner_u;
    u_poly.axpy(b(7), &a6);
    u_poly.axpy(b(5), &a4);
    u_poly.axpy(b(3), &a2);
    u_poly.axpy(b(1), &ident);
    let u = &a * &u_poly;

    let mut inner_v = a6.scale(b(12));
    inner_v.axpy(b(10), &a4);
    inner_v.axpy(b(8), &a2);
    let mut v = &a6 * &inner_v;
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &ident);

    let mut result = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !result.is_finite() {
        return Err(Error::Capability("matrix exponential overflowed".into()));
    }
    Ok(result)
}
