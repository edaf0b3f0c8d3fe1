// Negated comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod dynamics;
pub mod geometry;
pub mod gmres;
pub mod kernels;
pub mod linear;
pub mod solver;
pub mod special_functions;
