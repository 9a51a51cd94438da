//! Lower and certified upper bounds on the maximal density of plane packings
//! by discs of radii 1 and r.
//!
//! Lower bounds come from explicit periodic packings ([`flows`]); upper bounds
//! from analytic bounds and interval-arithmetic proof drivers ([`bounds`],
//! [`harness`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod flows;
pub mod geometry;
pub mod harness;
pub mod numerics;
pub mod ratios;
