//! Verification toolkit for quartic Diophantine equations of the form
//! `a·x⁴ + b·x²y² + c·y⁴ = d·z^e` and their quadratic resolvents.
//!
//! * [`arith`]: exact gcd, valuations, square roots, Pythagorean triples.
//! * [`equations`]: equation and resolvent types, the catalog.
//! * [`reduction`]: audited maps between quartic and resolvent solutions.
//! * [`descent`]: residue obstructions and the descent engine.
//! * [`search`]: bounded exhaustive search and table verification.

#![allow(clippy::result_large_err)]

pub mod arith;
pub mod descent;
pub mod equations;
pub mod json;
pub mod reduction;
pub mod search;
pub mod trace;

pub use arith::Int;
pub use equations::{QuarticEquation, QuarticSolution, ResolventSolution, ResolventSystem};
