//! Exact computational toolkit for residual finiteness growth.
//!
//! * [`perm`] and [`shift_sparse`]: dense and shift-plus-sparse permutations.
//! * [`growth`] and [`sequences`]: growth functions and the integer sequences
//!   `p`, `q`, `d` that size the alternating factors.
//! * [`neumann`]: the two-generated group inside a finite product of
//!   alternating groups, its witness words and growth certificates.
//! * [`word`], [`fp_quotients`] and [`rf_growth`]: finitely presented groups,
//!   finite quotient search, Schreier kernels and the growth function itself.

pub mod fp_quotients;
pub mod growth;
pub mod neumann;
pub mod par;
pub mod perm;
pub mod rf_growth;
pub mod sequences;
pub mod shift_sparse;
pub mod word;
