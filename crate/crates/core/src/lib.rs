//! Exact computations in the isotropy group of the matrix multiplication
//! tensor `⟨m,n,p⟩`.

pub mod bundled;
pub mod error;
pub mod field;
pub mod format;
pub mod isotropy;
pub mod mat;
pub mod orbits;
pub mod perm;
pub mod random;
pub mod recovery;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use isotropy::IsotropyElement;
pub use mat::Mat;
pub use perm::Perm3;
pub use tensor::{Decomposition, RankOneTriple, Shape, Tensor2, Tensor3};
