//! Decompositions shipped with the crate, parsed over the rationals.

use crate::error::Result;
use crate::field::FieldSpec;
use crate::format::parse_decomposition;
use crate::tensor::Decomposition;

pub const STRASSEN: &str = include_str!("../data/strassen.txt");
pub const STANDARD_222: &str = include_str!("../data/standard_222.txt");

/// Strassen's seven-term decomposition of `⟨2,2,2⟩`, reduced into `field`.
pub fn strassen(field: FieldSpec) -> Result<Decomposition> {
    parse_decomposition(STRASSEN)?.reduce_mod(field)
}

pub fn standard_222(field: FieldSpec) -> Result<Decomposition> {
    parse_decomposition(STANDARD_222)?.reduce_mod(field)
}
