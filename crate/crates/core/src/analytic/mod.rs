//! Analytic side: exponents, local factors, exact character-sum checks,
//! leading constants and empirical fits.

pub mod constant;
pub mod dirichlet;
pub mod euler;
pub mod exponents;
pub mod fit;
pub mod group_ring;
pub mod ramanujan;

pub use constant::{leading_constant, moebius_sieve_constant, ConstantReport};
pub use dirichlet::{dirichlet_partial, DirichletPolynomial, GroupRingPolynomial, Method};
pub use euler::{euler_factor, EulerFactor};
pub use exponents::{
    exponent_outer_degree, exponents_inner, exponents_outer, fmt_q, ExponentReport, OuterExponents,
};
pub use fit::{fit_count_table, fit_exponents, FitReport};
pub use group_ring::GroupRingElement;
pub use ramanujan::ramanujan_g;
