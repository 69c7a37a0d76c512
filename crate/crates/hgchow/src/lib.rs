//! Exact equivariant intersection theory for the stacks of odd-genus
//! hyperelliptic curves: sparse integer polynomials, strong Groebner bases
//! over Z, presented Chow rings, characteristic-class calculus for the
//! bundles V_n, and the end-to-end certification pipeline.

pub mod bundles;
pub mod hgpipe;
pub mod ideal;
pub mod linalg;
pub mod parser;
pub mod poly;
pub mod rings;
