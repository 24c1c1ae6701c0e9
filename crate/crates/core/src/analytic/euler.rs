//! Local Euler factors `f_{τ,χ,p}` and `f*_{τ,χ,p}`.

use num_bigint::BigUint;
use serde::Serialize;

use super::dirichlet::DirichletPolynomial;
use super::ramanujan::ramanujan_g;
use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::perm::Metric;
use crate::residue::Residue;
use crate::setup::{FieldSetup, PlaceId};

/// `1 + Σ c · ‖p‖^{-e s}` over the stored `(e, c)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerFactor {
    pub norm: u64,
    /// Pairs `(e, c)`, sorted by `e`, with `c ≠ 0`.
    pub terms: Vec<(u64, i64)>,
}

impl EulerFactor {
    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    /// Float evaluation at real `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let ln_p = (self.norm as f64).ln();
        1.0 + self
            .terms
            .iter()
            .map(|&(e, c)| c as f64 * (-(e as f64) * s * ln_p).exp())
            .sum::<f64>()
    }

    /// The nonconstant term of least exponent.
    pub fn dominant(&self) -> Option<(u64, i64)> {
        self.terms.first().copied()
    }

    /// As a Dirichlet polynomial in the metric value, keeping terms up to
    /// `bound`.
    pub fn to_polynomial(&self, bound: Option<&BigUint>) -> DirichletPolynomial {
        let mut out = DirichletPolynomial::one();
        for &(e, c) in &self.terms {
            let q = BigUint::from(self.norm).pow(e as u32);
            if bound.map_or(true, |x| &q <= x) {
                out.add_term(q, c as i128);
            }
        }
        out
    }
}

/// The factor at a non-exceptional prime.
pub fn euler_factor(
    setup: &FieldSetup,
    tau: u64,
    chi: Residue,
    place: &PlaceId,
    metric: Metric,
) -> Result<EulerFactor> {
    let big_m = setup.modulus();
    if chi.modulus() != big_m {
        return Err(Error::ModulusMismatch {
            left: chi.modulus(),
            right: big_m,
        });
    }
    let norm = place
        .norm()
        .ok_or_else(|| Error::InvalidInput(format!("`{place}` is archimedean")))?;
    let eta = setup.eta(tau, place)?;
    Ok(EulerFactor {
        norm,
        terms: factor_terms(big_m, eta, chi, metric)?,
    })
}

/// Terms of the factor for a prime with `η_{τ,p} = eta`.
pub(crate) fn factor_terms(
    big_m: u64,
    eta: u64,
    chi: Residue,
    metric: Metric,
) -> Result<Vec<(u64, i64)>> {
    let mut terms = Vec::new();
    match metric {
        Metric::Disc => {
            // values grouped by g = gcd(M, λ); larger g gives a smaller exponent
            for g in divisors(big_m).into_iter().rev() {
                if g < big_m && g % eta == 0 {
                    let c = ramanujan_g(chi, big_m / g)?;
                    if c != 0 {
                        terms.push((big_m * (big_m - g), c));
                    }
                }
            }
        }
        Metric::Ram => {
            let k = big_m / eta;
            let c = if chi.value() % k == 0 {
                k as i64 - 1
            } else {
                -1
            };
            if c != 0 && k > 1 {
                terms.push((1, c));
            }
        }
    }
    Ok(terms)
}
