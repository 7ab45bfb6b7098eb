//! Representation-theoretic invariants of the quantum automorphism group of a
//! finite-dimensional C*-algebra `B` with its canonical trace.
//!
//! * [`multimatrix`]: `B = ⊕ M_{m_γ}`, traces and orthonormal bases.
//! * [`tensor`]: the structure maps `μ, η` as dense maps between tensor powers.
//! * [`diagram`]: Temperley-Lieb diagrams and the representation on `B^{⊗k}`.
//! * [`homs`]: normal-form generators of `Hom(0, k)` and their Gram ranks.
//! * [`fusion`]: exact fusion rules of SO(3) and SU(2) type.

pub mod diagram;
pub mod error;
pub mod fusion;
pub mod homs;
pub mod linalg;
pub mod multimatrix;
pub mod tensor;

pub use error::{Error, Result};
pub use fusion::{FusionVector, Ring};
pub use multimatrix::{
    canonical_trace_weights, orthonormal_basis, regular_rep_trace, AlgebraElement, AlgebraShape,
    OrthonormalBasis, TraceWeights,
};
pub use tensor::{RelationReport, StructureMaps, TensorMap};
