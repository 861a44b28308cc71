//! Dense matrices over an exact field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

/// Row-major dense matrix. All entries belong to `field`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Mat {
    pub fn from_entries(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        entries: Vec<Scalar>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| e.field() != field) {
            return Err(Error::FieldMismatch {
                left: field,
                right: bad.field(),
            });
        }
        Ok(Mat {
            rows,
            cols,
            field,
            entries,
        })
    }

    /// Builds a matrix from small integers, e.g. in tests and bundled data.
    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| field.from_i64(v)))
            .collect();
        Mat {
            rows: r,
            cols: c,
            field,
            entries,
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            field,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Mat {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        Self::scalar(n, field.one())
    }

    pub fn scalar(n: usize, lambda: Scalar) -> Self {
        let field = lambda.field();
        Mat::from_fn(n, n, field, |i, j| {
            if i == j {
                lambda.clone()
            } else {
                field.zero()
            }
        })
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize, field: FieldSpec) -> Self {
        let mut m = Mat::zeros(rows, cols, field);
        m.entries[i * cols + j] = field.one();
        m
    }

    /// `E_r`: the first `r` diagonal entries equal to one.
    pub fn leading_identity(rows: usize, cols: usize, r: usize, field: FieldSpec) -> Self {
        Mat::from_fn(rows, cols, field, |i, j| {
            if i == j && i < r {
                field.one()
            } else {
                field.zero()
            }
        })
    }

    pub fn diag(field: FieldSpec, d: &[Scalar]) -> Self {
        let n = d.len();
        Mat::from_fn(n, n, field, |i, j| {
            if i == j {
                d[i].clone()
            } else {
                field.zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field);
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// First nonzero entry in row-major order, with its position.
    pub fn first_nonzero(&self) -> Option<(usize, &Scalar)> {
        self.entries.iter().enumerate().find(|(_, e)| !e.is_zero())
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let y = other.get(k, j);
                    if y.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(x * y);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Mat> {
        self.check_field(other)?;
        if self.dims() != other.dims() {
            return Err(Error::dims(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Mat {
            entries,
            ..self.clone_shape()
        })
    }

    fn clone_shape(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries: Vec::new(),
        }
    }

    pub fn scale(&self, lambda: &Scalar) -> Mat {
        Mat {
            entries: self.entries.iter().map(|e| e * lambda).collect(),
            ..self.clone_shape()
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, self.field, |i, j| {
            self.get(j, i).clone()
        })
    }

    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| !work[r * cols + col].is_zero()) else {
                continue;
            };
            for c in 0..cols {
                work.swap(pivot * cols + c, rank * cols + c);
            }
            let inv = work[rank * cols + col].inv().expect("nonzero pivot");
            for r in rank + 1..rows {
                let factor = &work[r * cols + col] * &inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..cols {
                    let v = &work[r * cols + c] - &(&factor * &work[rank * cols + c]);
                    work[r * cols + c] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::dims(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n, self.field);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::NotInvertible)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).inv().expect("nonzero pivot");
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                a.axpy_row(r, col, &factor);
                inv.axpy_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for c in 0..self.cols {
            self.entries.swap(r1 * self.cols + c, r2 * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.entries[idx] = &self.entries[idx] * s;
        }
    }

    // row[target] -= factor * row[source]
    fn axpy_row(&mut self, target: usize, source: usize, factor: &Scalar) {
        for c in 0..self.cols {
            let s = &self.entries[source * self.cols + c] * factor;
            let idx = target * self.cols + c;
            self.entries[idx] = &self.entries[idx] - &s;
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// `x^∨ = (x^t)^{-1}`.
    pub fn contragredient(&self) -> Result<Mat> {
        Ok(self.inverse()?.transpose())
    }

    pub fn trace(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::dims("trace of a non-square matrix"));
        }
        Ok((0..self.rows).fold(self.field.zero(), |acc, i| &acc + self.get(i, i)))
    }

    /// `⟨x, y⟩ = Tr(xy)` for `x` in `M_{a,b}` and `y` in `M_{b,a}`.
    pub fn trace_pairing(&self, other: &Mat) -> Result<Scalar> {
        self.check_field(other)?;
        if self.rows != other.cols || self.cols != other.rows {
            return Err(Error::dims(format!(
                "trace pairing of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = self.field.zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc = &acc + &(self.get(i, j) * other.get(j, i));
            }
        }
        Ok(acc)
    }

    /// Returns `λ` when `self = λ·E`.
    pub fn scalar_value(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let lambda = if self.rows == 0 {
            self.field.one()
        } else {
            self.get(0, 0).clone()
        };
        (*self == Mat::scalar(self.rows, lambda.clone())).then_some(lambda)
    }

    /// Returns `λ` with `other = λ·self`; both must be nonzero.
    pub fn proportionality(&self, other: &Mat) -> Option<Scalar> {
        if self.dims() != other.dims() || self.field != other.field {
            return None;
        }
        let (idx, pivot) = self.first_nonzero()?;
        let lambda = other.entries[idx].div(pivot)?;
        if lambda.is_zero() {
            return None;
        }
        (self.scale(&lambda) == *other).then_some(lambda)
    }

    /// Scales so that the first nonzero entry (row-major) is one.
    /// Returns the normalized matrix and the factor it was divided by.
    pub fn normalized(&self) -> (Mat, Scalar) {
        match self.first_nonzero() {
            Some((_, lead)) => {
                let lead = lead.clone();
                let inv = lead.inv().expect("nonzero");
                (self.scale(&inv), lead)
            }
            None => (self.clone(), self.field.one()),
        }
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Ok(Mat::from_fn(r, c, self.field, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        }))
    }

    /// Applies the matrix to a column vector.
    pub fn apply_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Flattens row by row.
    pub fn vec_row_major(&self) -> Vec<Scalar> {
        self.entries.clone()
    }

    /// Flattens column by column: index `i + j*rows`.
    pub fn vec_col_major(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        out
    }

    pub fn from_col_major(rows: usize, cols: usize, field: FieldSpec, v: &[Scalar]) -> Mat {
        assert_eq!(v.len(), rows * cols);
        Mat::from_fn(rows, cols, field, |i, j| v[i + j * rows].clone())
    }

    pub fn from_row_major(rows: usize, cols: usize, field: FieldSpec, v: &[Scalar]) -> Mat {
        assert_eq!(v.len(), rows * cols);
        Mat {
            rows,
            cols,
            field,
            entries: v.to_vec(),
        }
    }

    /// Maps every entry into another field (used to reduce rational data mod q).
    pub fn reduce_mod(&self, field: FieldSpec) -> Option<Mat> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.reduce_mod(field))
            .collect::<Option<Vec<_>>>()?;
        Some(Mat {
            entries,
            field,
            ..self.clone_shape()
        })
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn identity_times_x() {
        let x = Mat::from_i64(q(), &[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(Mat::identity(2, q()).mul(&x).unwrap(), x);
    }

    #[test]
    fn unit_products() {
        let e12 = Mat::unit(2, 2, 0, 1, q());
        let e21 = Mat::unit(2, 2, 1, 0, q());
        assert_eq!(e12.mul(&e21).unwrap(), Mat::unit(2, 2, 0, 0, q()));
    }

    #[test]
    fn square_mod_two() {
        let f = FieldSpec::gf(2).unwrap();
        let x = Mat::from_i64(f, &[&[1, 1], &[0, 1]]);
        assert_eq!(x.mul(&x).unwrap(), Mat::identity(2, f));
    }

    #[test]
    fn mul_errors() {
        let x = Mat::zeros(2, 3, q());
        assert!(matches!(x.mul(&x), Err(Error::DimensionMismatch(_))));
        let y = Mat::zeros(3, 2, FieldSpec::gf(3).unwrap());
        assert!(matches!(x.mul(&y), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn ranks() {
        assert_eq!(Mat::zeros(3, 2, q()).rank(), 0);
        assert_eq!(Mat::unit(2, 3, 0, 0, q()).rank(), 1);
        assert_eq!(Mat::from_i64(q(), &[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Mat::from_i64(q(), &[&[0, 1], &[1, 0], &[1, 1]]).rank(), 2);
    }

    #[test]
    fn inverses() {
        assert_eq!(
            Mat::identity(3, q()).inverse().unwrap(),
            Mat::identity(3, q())
        );
        let d = Mat::diag(q(), &[q().from_i64(2), q().from_i64(3)]);
        let d_inv = Mat::diag(q(), &[q().ratio(1, 2).unwrap(), q().ratio(1, 3).unwrap()]);
        assert_eq!(d.inverse().unwrap(), d_inv);
        let x = Mat::from_i64(q(), &[&[1, 1], &[0, 1]]);
        assert_eq!(
            x.inverse().unwrap(),
            Mat::from_i64(q(), &[&[1, -1], &[0, 1]])
        );
        assert_eq!(
            Mat::from_i64(q(), &[&[1, 2], &[2, 4]]).inverse(),
            Err(Error::NotInvertible)
        );
        assert!(Mat::zeros(2, 3, q()).inverse().is_err());
    }

    #[test]
    fn contragredients() {
        assert_eq!(
            Mat::identity(2, q()).contragredient().unwrap(),
            Mat::identity(2, q())
        );
        let d = Mat::diag(q(), &[q().from_i64(2), q().from_i64(3)]);
        let d_inv = Mat::diag(q(), &[q().ratio(1, 2).unwrap(), q().ratio(1, 3).unwrap()]);
        assert_eq!(d.contragredient().unwrap(), d_inv);
        let x = Mat::from_i64(q(), &[&[1, 1], &[0, 1]]);
        assert_eq!(
            x.contragredient().unwrap(),
            Mat::from_i64(q(), &[&[1, 0], &[-1, 1]])
        );
        assert_eq!(x.contragredient().unwrap().contragredient().unwrap(), x);
    }

    #[test]
    fn trace_pairings() {
        for (i, j, u, v) in [
            (0, 1, 1, 0),
            (0, 1, 0, 1),
            (1, 2, 2, 1),
            (0, 0, 0, 0),
            (1, 0, 0, 2),
        ] {
            let x = Mat::unit(2, 3, i, j, q());
            let y = Mat::unit(3, 2, u, v, q());
            let expected = i64::from(i == v && j == u);
            assert_eq!(x.trace_pairing(&y).unwrap(), q().from_i64(expected));
        }
        let id = Mat::identity(4, q());
        assert_eq!(id.trace_pairing(&id).unwrap(), q().from_i64(4));
        let row = Mat::from_i64(q(), &[&[1, 2]]);
        let col = Mat::from_i64(q(), &[&[3], &[4]]);
        assert_eq!(row.trace_pairing(&col).unwrap(), q().from_i64(11));
        assert!(row.trace_pairing(&row).is_err());
    }

    #[test]
    fn proportionality_and_scalars() {
        let x = Mat::from_i64(q(), &[&[0, 2], &[1, 0]]);
        let y = x.scale(&q().from_i64(-3));
        assert_eq!(x.proportionality(&y), Some(q().from_i64(-3)));
        assert_eq!(x.proportionality(&Mat::identity(2, q())), None);
        assert_eq!(
            Mat::scalar(3, q().from_i64(5)).scalar_value(),
            Some(q().from_i64(5))
        );
        assert_eq!(x.scalar_value(), None);
        let (n, lead) = y.normalized();
        assert_eq!(lead, q().from_i64(-6));
        assert_eq!(n.first_nonzero().unwrap().1, &q().one());
    }

    #[test]
    fn flattening_conventions() {
        let x = Mat::from_i64(q(), &[&[1, 2, 3], &[4, 5, 6]]);
        let c = x.vec_col_major();
        assert_eq!(c[1], q().from_i64(4));
        assert_eq!(Mat::from_col_major(2, 3, q(), &c), x);
    }
}
