//! Holomorphic solutions of the supersymmetric CP^(N-1) sigma model, the
//! surfaces they induce through the rank-one projector, and mechanical
//! checks of the identities those surfaces satisfy.

pub mod expr;
pub mod grassmann;
pub mod check;
pub mod random;
pub mod superspace;
pub mod model;
pub mod surface;
pub mod weierstrass;
pub mod algebra;
pub mod cli;
