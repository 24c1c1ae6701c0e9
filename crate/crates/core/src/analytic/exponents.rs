//! Growth exponents of the counting functions.

use serde::Serialize;

use crate::arith::smallest_prime_factor;
use crate::error::{Error, Result};
use crate::perm::invariants_bundle;
use crate::setup::FieldSetup;
use crate::Q;

/// `N(X) ~ C X^{1/a} (log X)^{b-1}` for the discriminant, and
/// `X (log X)^{b*-1}` for the ramification product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    #[serde(serialize_with = "ser_q")]
    pub b_star: Q,
    pub u: u64,
    #[serde(rename = "U")]
    pub big_u: u64,
    #[serde(serialize_with = "ser_q")]
    pub beta: Q,
    #[serde(rename = "M")]
    pub modulus: u64,
}

pub(crate) fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(q))
}

/// `p/q`, or the integer alone.
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn exponents_inner(setup: &FieldSetup) -> Result<ExponentReport> {
    if setup.degree_n() < 2 {
        return Err(Error::TrivialExtension);
    }
    let bundle = invariants_bundle(setup.group(), setup.j())?;
    let big_m = setup.modulus() as i64;
    let u = bundle.u as i64;
    let a = Q::from_integer(big_m * big_m) * (Q::from_integer(1) - Q::new(1, u));
    let b = Q::from_integer(u - 1) * bundle.beta;
    let b_star = Q::from_integer(setup.j() as i64) * bundle.avg_cycgcd - Q::from_integer(1);
    debug_assert!(a > Q::from_integer(0) && b > Q::from_integer(0) && b_star > Q::from_integer(0));
    Ok(ExponentReport {
        a,
        b,
        b_star,
        u: bundle.u,
        big_u: bundle.big_u,
        beta: bundle.beta,
        modulus: setup.modulus(),
    })
}

/// Exponents for outer extensions with abelian Galois group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OuterExponents {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub u: u64,
    pub r: u64,
}

/// `G` given by the orders of its cyclic factors; `deg_zeta_u` is
/// `[F(ζ_u) : F]`.
pub fn exponents_outer(cyclic_orders: &[u64], m: u64, deg_zeta_u: u64) -> Result<OuterExponents> {
    if cyclic_orders.contains(&0) || m == 0 || deg_zeta_u == 0 {
        return Err(Error::InvalidInput(
            "orders and degrees must be positive".into(),
        ));
    }
    let order: u64 = cyclic_orders.iter().product();
    let u = smallest_prime_factor(order).ok_or(Error::TrivialExtension)?;
    if (u - 1) % deg_zeta_u != 0 {
        return Err(Error::InvalidInput(format!(
            "[F(ζ_{u}):F] = {deg_zeta_u} does not divide {}",
            u - 1
        )));
    }
    let s = cyclic_orders.iter().filter(|&&c| c % u == 0).count() as u32;
    let r = u.pow(s) - 1;
    let a = Q::from_integer((m * m * order) as i64) * (Q::from_integer(1) - Q::new(1, u as i64));
    let b = Q::new(r as i64, deg_zeta_u as i64);
    Ok(OuterExponents { a, b, u, r })
}

/// Exponent of `X` when counting outer extensions of degree `n ≤ 5`, with
/// no logarithmic factor.
pub fn exponent_outer_degree(n: u64, m: u64) -> Result<Q> {
    if !(2..=5).contains(&n) {
        return Err(Error::Unsupported(format!("degree {n} outside 2..=5")));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    Ok(Q::new(1, (m * m) as i64))
}
