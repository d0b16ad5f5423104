//! Exact Jacobi–Perron multidimensional continued fractions.
//!
//! The crate expands tuples of real algebraic numbers with the Jacobi–Perron
//! iteration, computes convergents both by recurrence and by matrix product,
//! and relates periodic partial quotients to constant-coefficient linear
//! recurrences on the convergents, in both directions.

pub mod exactnum;
pub mod matrix;
pub mod convergents;
pub mod cubic_rep;
pub mod jacobi_perron;
pub mod lrs;
pub mod periodicity;
