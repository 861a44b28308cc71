//! Seeded random scalars and matrices. Every generator takes the RNG explicitly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldSpec, Scalar};
use crate::mat::Mat;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform residue over GF(q); a small fraction `p/d` with `|p| <= 4`, `1 <= d <= 3`
/// over the rationals.
pub fn scalar<R: Rng + ?Sized>(field: FieldSpec, rng: &mut R) -> Scalar {
    match field.modulus() {
        Some(q) => field.residue(rng.gen_range(0..q)),
        None => {
            let num = rng.gen_range(-4..=4);
            let den = rng.gen_range(1..=3);
            field.ratio(num, den).expect("nonzero denominator")
        }
    }
}

pub fn nonzero_scalar<R: Rng + ?Sized>(field: FieldSpec, rng: &mut R) -> Scalar {
    loop {
        let s = scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn matrix<R: Rng + ?Sized>(rows: usize, cols: usize, field: FieldSpec, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, field, |_, _| scalar(field, rng))
}

pub fn nonzero_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    field: FieldSpec,
    rng: &mut R,
) -> Mat {
    loop {
        let m = matrix(rows, cols, field, rng);
        if !m.is_zero() {
            return m;
        }
    }
}

/// Rejection-samples until the matrix is invertible.
pub fn invertible<R: Rng + ?Sized>(n: usize, field: FieldSpec, rng: &mut R) -> Mat {
    loop {
        let m = matrix(n, n, field, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// A random matrix of prescribed rank `r`: `a · E_r · b` with `a`, `b` invertible.
pub fn matrix_of_rank<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    r: usize,
    field: FieldSpec,
    rng: &mut R,
) -> Mat {
    let a = invertible(rows, field, rng);
    let b = invertible(cols, field, rng);
    let e = Mat::leading_identity(rows, cols, r, field);
    a.mul(&e).and_then(|x| x.mul(&b)).expect("conformable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let f = FieldSpec::Rationals;
        let a = invertible(3, f, &mut rng(9));
        let b = invertible(3, f, &mut rng(9));
        assert_eq!(a, b);
    }

    #[test]
    fn prescribed_rank() {
        let f = FieldSpec::gf(3).unwrap();
        let mut r = rng(1);
        for k in 0..=3 {
            assert_eq!(matrix_of_rank(3, 4, k, f, &mut r).rank(), k);
        }
    }
}
