//! Truncated Dirichlet series of the counting problem, computed either by
//! direct enumeration or through the character-sum Euler product.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::euler::factor_terms;
use super::group_ring::GroupRingElement;
use crate::arith::{gcd, lcm};
use crate::census::{completions, enumerate_metrics, CensusQuery, LocalConstraint};
use crate::error::{Error, Result};
use crate::perm::Metric;
use crate::residue::Residue;
use crate::setup::FieldSetup;

/// `Σ c_q q^{-s}` with finitely many nonzero integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirichletPolynomial {
    terms: BTreeMap<BigUint, i128>,
}

impl DirichletPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut out = Self::zero();
        out.add_term(BigUint::one(), 1);
        out
    }

    pub fn terms(&self) -> &BTreeMap<BigUint, i128> {
        &self.terms
    }

    pub fn coefficient(&self, q: &BigUint) -> i128 {
        self.terms.get(q).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, q: BigUint, c: i128) {
        if c == 0 {
            return;
        }
        match self.terms.entry(q) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Product, dropping every term whose metric value exceeds `bound`.
    pub fn mul_truncated(&self, other: &Self, bound: Option<&BigUint>) -> Self {
        let mut out = Self::zero();
        for (q1, &c1) in &self.terms {
            for (q2, &c2) in &other.terms {
                let q = q1 * q2;
                if bound.is_some_and(|x| &q > x) {
                    // terms are ascending in q2
                    break;
                }
                out.add_term(q, c1 * c2);
            }
        }
        out
    }

    /// Sum of all coefficients, i.e. the number of profiles counted.
    pub fn total(&self) -> i128 {
        self.terms.values().sum()
    }

    pub fn to_rows(&self) -> Vec<(String, i128)> {
        self.terms
            .iter()
            .map(|(q, &c)| (q.to_string(), c))
            .collect()
    }
}

/// Coefficients in `Z[Z/MZ]`, before averaging over characters.
#[derive(Debug, Clone)]
pub struct GroupRingPolynomial {
    modulus: u64,
    terms: BTreeMap<BigUint, GroupRingElement>,
}

impl GroupRingPolynomial {
    pub fn new(modulus: u64) -> Self {
        Self {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `c · e(k/M) · q^{-s}`.
    pub fn add_term(&mut self, q: BigUint, k: u64, c: i128) {
        let m = self.modulus;
        self.terms
            .entry(q)
            .or_insert_with(|| GroupRingElement::zero(m))
            .add_root(k, c);
    }

    pub fn terms(&self) -> &BTreeMap<BigUint, GroupRingElement> {
        &self.terms
    }

    /// Every coefficient must be a rational integer divisible by `divisor`;
    /// anything else means the character sum did not cancel.
    pub fn collapse(&self, divisor: i128) -> Result<DirichletPolynomial> {
        let mut out = DirichletPolynomial::zero();
        for (q, elt) in &self.terms {
            let n = elt.to_integer().ok_or_else(|| {
                Error::NonIntegralCharacterSum(format!("coefficient of {q}^-s is irrational"))
            })?;
            if n % divisor != 0 {
                return Err(Error::NonIntegralCharacterSum(format!(
                    "coefficient {n} of {q}^-s is not divisible by {divisor}"
                )));
            }
            out.add_term(q.clone(), n / divisor);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Charsum,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "charsum" => Ok(Self::Charsum),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

/// The series summed over profiles whose generic support lies in primes of
/// norm at most `prime_cutoff`, truncated at metric value `bound`. Free
/// exceptional places range over all admissible values.
pub fn dirichlet_partial(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    metric: Metric,
    prime_cutoff: u64,
    bound: &BigUint,
    method: Method,
) -> Result<DirichletPolynomial> {
    if setup.is_stochastic() {
        return Err(Error::StochasticRejected("a Dirichlet expansion"));
    }
    constraint.check(setup)?;
    match method {
        Method::Direct => direct(setup, constraint, metric, prime_cutoff, bound),
        Method::Charsum => charsum(setup, constraint, metric, prime_cutoff, bound)?
            .collapse(setup.modulus() as i128),
    }
}

fn direct(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    metric: Metric,
    prime_cutoff: u64,
    bound: &BigUint,
) -> Result<DirichletPolynomial> {
    let mut query = CensusQuery::new(metric, bound.clone()).with_cutoff(prime_cutoff);
    query.parallel = true;
    let mut out = DirichletPolynomial::zero();
    for (q, _) in enumerate_metrics(setup, constraint, &query)? {
        out.add_term(q, 1);
    }
    Ok(out)
}

/// `Σ_ξ' d(ξ')^{-s} Σ_χ e(χσ_ξ'/M) ∏_p f_{τ,χ,p}(s)`, not yet divided by `M`.
pub fn charsum(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    metric: Metric,
    prime_cutoff: u64,
    bound: &BigUint,
) -> Result<GroupRingPolynomial> {
    let big_m = setup.modulus();
    let tau = constraint.tau;
    let mut out = GroupRingPolynomial::new(big_m);
    let full = completions(setup, constraint)?;
    if full.is_empty() {
        return Ok(out);
    }
    let dm = setup.d() * setup.m();
    let mut primes = Vec::new();
    for (p, class) in setup.generic_places_up_to(prime_cutoff)? {
        if !constraint.contains(&p) {
            let eta = lcm(dm / setup.group().classes()[class].cycgcd, tau);
            primes.push((p.norm().expect("finite"), eta));
        }
    }
    // the product depends on χ only through gcd(χ, M)
    let mut products: HashMap<u64, DirichletPolynomial> = HashMap::new();
    for chi in 0..big_m {
        let k = gcd(chi, big_m);
        if products.contains_key(&k) {
            continue;
        }
        let mut prod = DirichletPolynomial::one();
        for &(norm, eta) in &primes {
            let terms = factor_terms(big_m, eta, Residue::new(chi, big_m), metric)?;
            let mut f = DirichletPolynomial::one();
            for (e, c) in terms {
                let q = BigUint::from(norm).pow(e as u32);
                if &q <= bound {
                    f.add_term(q, c as i128);
                }
            }
            prod = prod.mul_truncated(&f, Some(bound));
        }
        products.insert(k, prod);
    }
    for xi in &full {
        let shift = match metric {
            Metric::Disc => xi.disc(big_m).numerator(),
            Metric::Ram => xi.ram().numerator(),
        };
        if &shift > bound {
            continue;
        }
        let sigma = xi.sigma(big_m);
        for chi in 0..big_m {
            let prod = &products[&gcd(chi, big_m)];
            let phase = (chi * sigma) % big_m;
            for (q, &c) in prod.terms() {
                let q = q * &shift;
                if &q > bound {
                    break;
                }
                out.add_term(q, phase, c);
            }
        }
    }
    Ok(out)
}
