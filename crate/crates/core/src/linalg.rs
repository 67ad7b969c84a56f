//! Dense matrices over exact rationals and over arbitrary-precision complexes.

use std::fmt;

use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::scalars::{cabs, BigC, Coeff, Precision, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = RatMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    /// Applies the matrix to a coefficient vector over any coefficient ring.
    pub fn apply<S: Coeff>(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            for (j, x) in v.iter().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() && !x.is_zero() {
                    out[i] = out[i].plus(&x.scaled(a));
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == RatMatrix::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Rat::is_integer)
    }

    /// Gauss–Jordan reduction of [A | B]; returns A^{-1}B.
    pub fn solve(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        let n = self.rows;
        assert_eq!(n, self.cols, "solve needs a square matrix");
        assert_eq!(rhs.rows, n);
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or_else(|| Error::Singular(format!("{n}x{n} rational matrix")))?;
            a.swap_rows(col, piv);
            b.swap_rows(col, piv);
            let inv = a[(col, col)].recip();
            a.scale_row(col, &inv);
            b.scale_row(col, &inv);
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    a.axpy_row(r, col, &f);
                    b.axpy_row(r, col, &f);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        self.solve(&RatMatrix::identity(self.rows))
    }

    pub fn det(&self) -> Rat {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut a = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Rat::zero();
            };
            if piv != col {
                a.swap_rows(col, piv);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            let inv = p.recip();
            for r in col + 1..n {
                if !a[(r, col)].is_zero() {
                    let f = &a[(r, col)] * &inv;
                    a.axpy_row(r, col, &f);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: &Rat) {
        for j in 0..self.cols {
            self[(r, j)] *= f;
        }
    }

    /// row[r] -= f * row[src]
    fn axpy_row(&mut self, r: usize, src: usize, f: &Rat) {
        for j in 0..self.cols {
            let d = f * &self[(src, j)];
            self[(r, j)] -= &d;
        }
    }

    /// Row-major "p/q" strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_pq_string()).collect())
            .collect()
    }

    pub fn to_complex(&self, prec: Precision) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols, prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    m[(i, j)] = prec.rat(&self[(i, j)]);
                }
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense complex matrix at a fixed working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    prec: Precision,
    data: Vec<BigC>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: Precision) -> Self {
        CMatrix {
            rows,
            cols,
            prec,
            data: vec![prec.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, prec: Precision) -> Self {
        let mut m = CMatrix::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = prec.one();
        }
        m
    }

    pub fn from_columns(columns: &[Vec<BigC>], prec: Precision) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = CMatrix::zeros(rows, columns.len(), prec);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn column(&self, j: usize) -> Vec<BigC> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let bits = self.prec.bits();
        let mut out = CMatrix::zeros(self.rows, other.cols, self.prec);
        let mut t = Complex::new(bits);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        t.assign(a * b);
                        out[(i, j)] += &t;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigC]) -> Vec<BigC> {
        assert_eq!(self.cols, v.len());
        let bits = self.prec.bits();
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::new(bits);
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() {
                        acc += Complex::with_val(bits, a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| Complex::with_val(a.prec().0, a + b))
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.zip(other, |a, b| Complex::with_val(a.prec().0, a - b))
    }

    fn zip(&self, other: &CMatrix, f: impl Fn(&BigC, &BigC) -> BigC) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            prec: self.prec,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &BigC) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            prec: self.prec,
            data: self
                .data
                .iter()
                .map(|a| Complex::with_val(self.prec.bits(), a * c))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec.bits());
        for a in &self.data {
            let v = cabs(a);
            if v > m {
                m = v;
            }
        }
        m
    }

    pub fn frobenius(&self) -> Float {
        let bits = self.prec.bits();
        let mut s = Float::new(bits);
        for a in &self.data {
            s += Float::with_val(bits, a.norm_ref());
        }
        s.sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> Float {
        let bits = self.prec.bits();
        let mut best = Float::new(bits);
        for i in 0..self.rows {
            let mut s = Float::new(bits);
            for j in 0..self.cols {
                s += cabs(&self[(i, j)]);
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Gauss–Jordan with partial pivoting on [A | B]; returns A^{-1}B.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        assert_eq!(rhs.rows, n);
        let bits = self.prec.bits();
        let tiny = Float::with_val(bits, 2).pow_ref_i32(-(bits as i32)) * self.max_abs();
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| cabs(&a[(x, col)]).partial_cmp(&cabs(&a[(y, col)])).unwrap())
                .unwrap();
            if cabs(&a[(piv, col)]) <= tiny {
                return Err(Error::Singular(format!("{n}x{n} complex matrix")));
            }
            a.swap_rows(col, piv);
            b.swap_rows(col, piv);
            let inv = Complex::with_val(bits, a[(col, col)].recip_ref());
            a.scale_row(col, &inv);
            b.scale_row(col, &inv);
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    a.axpy_row(r, col, &f);
                    b.axpy_row(r, col, &f);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve(&CMatrix::identity(self.rows, self.prec))
    }

    /// self·B^{-1}
    pub fn right_divide(&self, b: &CMatrix) -> Result<CMatrix> {
        Ok(b.transpose().solve(&self.transpose())?.transpose())
    }

    pub fn transpose(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.cols, self.rows, self.prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn det(&self) -> BigC {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let bits = self.prec.bits();
        let mut a = self.clone();
        let mut det = self.prec.one();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| cabs(&a[(x, col)]).partial_cmp(&cabs(&a[(y, col)])).unwrap())
                .unwrap();
            if a[(piv, col)].is_zero() {
                return self.prec.zero();
            }
            if piv != col {
                a.swap_rows(col, piv);
                det = -det;
            }
            det *= &a[(col, col)];
            let inv = Complex::with_val(bits, a[(col, col)].recip_ref());
            for r in col + 1..n {
                if !a[(r, col)].is_zero() {
                    let f = Complex::with_val(bits, &a[(r, col)] * &inv);
                    a.axpy_row(r, col, &f);
                }
            }
        }
        det
    }

    /// ‖A‖∞·‖A^{-1}‖∞.
    pub fn condition_number(&self) -> Result<Float> {
        let inv = self.inverse()?;
        Ok(self.norm_inf() * inv.norm_inf())
    }

    /// exp(A) for nilpotent A, summed until the powers vanish.
    pub fn exp_nilpotent(&self) -> CMatrix {
        let n = self.rows;
        let mut out = CMatrix::identity(n, self.prec);
        let mut term = CMatrix::identity(n, self.prec);
        for k in 1..=n {
            term = term.mul(self);
            let kc = Complex::with_val(self.prec.bits(), k);
            term = term.scale(&Complex::with_val(self.prec.bits(), kc.recip_ref()));
            if term.data.iter().all(Complex::is_zero) {
                break;
            }
            out = out.add(&term);
        }
        out
    }

    /// Relative max-entry distance ‖A − B‖/‖B‖.
    pub fn rel_distance(&self, other: &CMatrix) -> Float {
        let d = self.sub(other).max_abs();
        let s = other.max_abs();
        if s.is_zero() {
            d
        } else {
            d / s
        }
    }

    pub fn with_precision(&self, prec: Precision) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            prec,
            data: self
                .data
                .iter()
                .map(|a| Complex::with_val(prec.bits(), a))
                .collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: &BigC) {
        for j in 0..self.cols {
            self[(r, j)] *= f;
        }
    }

    fn axpy_row(&mut self, r: usize, src: usize, f: &BigC) {
        let bits = self.prec.bits();
        for j in 0..self.cols {
            let d = Complex::with_val(bits, f * &self[(src, j)]);
            self[(r, j)] -= d;
        }
    }
}

trait PowI32 {
    fn pow_ref_i32(&self, e: i32) -> Float;
}

impl PowI32 for Float {
    fn pow_ref_i32(&self, e: i32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(e))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = BigC;
    fn index(&self, (i, j): (usize, usize)) -> &BigC {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigC {
        &mut self.data[i * self.cols + j]
    }
}

/// Relative Euclidean distance ‖a − b‖/‖b‖ of complex vectors.
pub fn rel_vec_distance(a: &[BigC], b: &[BigC]) -> Float {
    let bits = b.first().map_or(64, |x| x.prec().0);
    let mut num = Float::new(bits);
    let mut den = Float::new(bits);
    for (x, y) in a.iter().zip(b) {
        num += Float::with_val(bits, Complex::with_val(bits, x - y).norm_ref());
        den += Float::with_val(bits, y.norm_ref());
    }
    if den.is_zero() {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Rat::new(1, (i + j + 1) as i64);
            }
        }
        m
    }

    #[test]
    fn rational_inverse_and_det() {
        let h = hilbert(4);
        assert!(h.mul(&h.inverse().unwrap()).is_identity());
        assert_eq!(h.det(), Rat::new(1, 6048000));
        let mut s = RatMatrix::zeros(2, 2);
        s[(0, 0)] = Rat::one();
        s[(0, 1)] = Rat::from_int(2);
        s[(1, 0)] = Rat::from_int(2);
        s[(1, 1)] = Rat::from_int(4);
        assert!(matches!(s.inverse(), Err(Error::Singular(_))));
        assert!(s.det().is_zero());
    }

    #[test]
    fn complex_inverse_matches_rational() {
        let p = Precision::new(50);
        let h = hilbert(5);
        let hc = h.to_complex(p);
        let inv = hc.inverse().unwrap();
        let exact = h.inverse().unwrap().to_complex(p);
        let tol = Float::with_val(p.bits(), 1e-40);
        assert!(inv.rel_distance(&exact) < tol);
        let d = hc.det();
        let dx = p.rat(&h.det());
        assert!(cabs(&Complex::with_val(p.bits(), &d - &dx)) < Float::with_val(p.bits(), 1e-50));
    }

    #[test]
    fn nilpotent_exponential() {
        let p = Precision::new(40);
        let mut n = CMatrix::zeros(3, 3, p);
        n[(0, 1)] = p.one();
        n[(1, 2)] = p.one();
        let e = n.exp_nilpotent();
        assert_eq!(e[(0, 2)], p.real(0.5));
        let back = e.mul(&n.scale(&p.real(-1.0)).exp_nilpotent());
        assert_eq!(back, CMatrix::identity(3, p));
    }
}
