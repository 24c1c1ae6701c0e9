//! Central simple algebras over a number field `Z`, encoded by their local
//! invariants, and the discriminant-type invariants attached to them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};
use crate::residue::{divisor_divides, Residue};
use crate::setup::{FieldSetup, PlaceId};

/// A positive rational number as a map from rational primes to exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactoredRational {
    exponents: BTreeMap<u64, i64>,
}

impl FactoredRational {
    pub fn one() -> Self {
        Self::default()
    }

    /// `n^e` for a positive integer `n`.
    pub fn power_of(n: u64, e: i64) -> Self {
        assert!(n >= 1, "factored rationals are positive");
        let mut out = Self::one();
        for (p, k) in factorize(n) {
            out.add_exponent(p, k as i64 * e);
        }
        out
    }

    pub fn from_integer(n: u64) -> Self {
        Self::power_of(n, 1)
    }

    fn add_exponent(&mut self, p: u64, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.exponents.entry(p).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exponents.remove(&p);
        }
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, &e) in &other.exponents {
            out.add_exponent(p, e);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Self {
        Self {
            exponents: if k == 0 {
                BTreeMap::new()
            } else {
                self.exponents.iter().map(|(&p, &e)| (p, e * k)).collect()
            },
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn is_integer(&self) -> bool {
        self.exponents.values().all(|&e| e > 0)
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Whether every exponent is a multiple of `k`.
    pub fn is_perfect_power(&self, k: i64) -> bool {
        self.exponents.values().all(|&e| e % k == 0)
    }

    /// Whether `self` divides `other` in the integers (both integral).
    pub fn divides(&self, other: &Self) -> bool {
        self.is_integer()
            && other.is_integer()
            && self.exponents.iter().all(|(&p, &e)| other.exponent(p) >= e)
    }

    pub fn numerator(&self) -> BigUint {
        self.part(|e| e > 0)
    }

    pub fn denominator(&self) -> BigUint {
        self.part(|e| e < 0)
    }

    fn part(&self, keep: impl Fn(i64) -> bool) -> BigUint {
        let mut acc = BigUint::one();
        for (&p, &e) in &self.exponents {
            if keep(e) {
                acc *= BigUint::from(p).pow(e.unsigned_abs() as u32);
            }
        }
        acc
    }

    /// Exact comparison `self ≤ bound`.
    pub fn le(&self, bound: &BigUint) -> bool {
        self.numerator() <= bound * self.denominator()
    }

    /// Natural logarithm, for reporting only.
    pub fn ln(&self) -> f64 {
        self.exponents
            .iter()
            .map(|(&p, &e)| e as f64 * (p as f64).ln())
            .sum()
    }
}

impl fmt::Display for FactoredRational {
    /// `p/q`, or just `p` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.denominator();
        if den.is_one() {
            write!(f, "{}", self.numerator())
        } else {
            write!(f, "{}/{}", self.numerator(), den)
        }
    }
}

/// A finitely supported map from places of `Z` to `Z/MZ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantProfile {
    modulus: u64,
    values: BTreeMap<PlaceId, u64>,
}

impl InvariantProfile {
    pub fn zero(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Self {
            modulus,
            values: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (PlaceId, u64)>>(modulus: u64, pairs: I) -> Self {
        let mut out = Self::zero(modulus);
        for (p, v) in pairs {
            out.set(p, v);
        }
        out
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Sets `λ(place) = value mod M`; zero removes the place from the support.
    pub fn set(&mut self, place: PlaceId, value: u64) {
        let v = value % self.modulus;
        if v == 0 {
            self.values.remove(&place);
        } else {
            self.values.insert(place, v);
        }
    }

    pub fn get(&self, place: &PlaceId) -> Residue {
        Residue::new(self.values.get(place).copied().unwrap_or(0), self.modulus)
    }

    /// Nonzero values in place order.
    pub fn iter(&self) -> impl Iterator<Item = (&PlaceId, Residue)> {
        self.values
            .iter()
            .map(|(p, &v)| (p, Residue::new(v, self.modulus)))
    }

    pub fn support(&self) -> impl Iterator<Item = &PlaceId> {
        self.values.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Residue {
        Residue::new(
            self.values.values().fold(0, |a, &v| (a + v) % self.modulus),
            self.modulus,
        )
    }

    /// Gcd of `M` and all values, as a positive divisor of `M`.
    pub fn gcd_of_values(&self) -> u64 {
        self.values.values().fold(self.modulus, |g, &v| gcd(g, v))
    }

    /// Local index `M / gcd(M, λ_p)` at a place.
    pub fn local_index(&self, place: &PlaceId) -> u64 {
        self.get(place).element_order()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ProfileFile::from(self)).expect("serializable")
    }

    /// Compact JSON, one line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ProfileFile::from(self)).expect("serializable")
    }

    pub fn from_json(setup: &FieldSetup, text: &str) -> Result<Self> {
        let file: ProfileFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.resolve(setup)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    #[serde(rename = "M")]
    pub modulus: u64,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignment {
    pub place: String,
    pub value: u64,
}

impl From<&InvariantProfile> for ProfileFile {
    fn from(p: &InvariantProfile) -> Self {
        Self {
            modulus: p.modulus,
            assignments: p
                .values
                .iter()
                .map(|(id, &value)| Assignment {
                    place: id.label().to_string(),
                    value,
                })
                .collect(),
        }
    }
}

impl ProfileFile {
    pub fn resolve(&self, setup: &FieldSetup) -> Result<InvariantProfile> {
        if self.modulus != setup.modulus() {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: setup.modulus(),
            });
        }
        let mut out = InvariantProfile::zero(self.modulus);
        for a in &self.assignments {
            if a.value >= self.modulus {
                return Err(Error::InvalidProfile(format!(
                    "value {} at `{}` is not reduced modulo {}",
                    a.value, a.place, self.modulus
                )));
            }
            let id = setup.resolve(&a.place)?;
            if out.values.contains_key(&id) {
                return Err(Error::InvalidProfile(format!(
                    "`{}` assigned twice",
                    a.place
                )));
            }
            out.set(id, a.value);
        }
        Ok(out)
    }
}

/// Which global constraint a profile violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ComplexPlace(PlaceId),
    RealPlace(PlaceId),
    NonzeroSum(u64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ComplexPlace(p) => {
                write!(f, "complex place `{p}` carries a nonzero invariant")
            }
            Violation::RealPlace(p) => write!(
                f,
                "real place `{p}` carries an invariant other than 0 or 1/2"
            ),
            Violation::NonzeroSum(s) => write!(f, "invariants sum to {s}, not 0"),
        }
    }
}

/// Checks the reciprocity constraints on local invariants.
pub fn validate_profile(v: &InvariantProfile) -> Vec<Violation> {
    let big_m = v.modulus;
    let mut out = Vec::new();
    for (p, r) in v.iter() {
        match p {
            PlaceId::Complex(_) => out.push(Violation::ComplexPlace(p.clone())),
            PlaceId::Real(_) if !(big_m % 2 == 0 && r.value() == big_m / 2) => {
                out.push(Violation::RealPlace(p.clone()))
            }
            _ => {}
        }
    }
    let s = v.sum().value();
    if s != 0 {
        out.push(Violation::NonzeroSum(s));
    }
    out
}

pub fn is_valid(v: &InvariantProfile) -> bool {
    validate_profile(v).is_empty()
}

fn require_valid(v: &InvariantProfile) -> Result<()> {
    let bad = validate_profile(v);
    if let Some(first) = bad.first() {
        return Err(Error::InvalidProfile(first.to_string()));
    }
    Ok(())
}

/// Index of the algebra and whether it is a division algebra.
pub fn index_and_skew(v: &InvariantProfile) -> Result<(u64, bool)> {
    require_valid(v)?;
    let index = v.modulus / v.gcd_of_values();
    Ok((index, index == v.modulus))
}

/// Per-place discriminant factor `‖p‖^{M(M - gcd(M, λ))}` for a finite place.
pub fn local_disc(place: &PlaceId, value: Residue) -> FactoredRational {
    match place.norm() {
        Some(norm) if !value.is_zero() => {
            let big_m = value.modulus();
            FactoredRational::power_of(norm, (big_m * (big_m - value.gcd_with_modulus())) as i64)
        }
        _ => FactoredRational::one(),
    }
}

/// Norm of the discriminant of the algebra over its center.
pub fn disc_over_center(v: &InvariantProfile) -> Result<FactoredRational> {
    require_valid(v)?;
    Ok(disc_unchecked(v))
}

pub(crate) fn disc_unchecked(v: &InvariantProfile) -> FactoredRational {
    v.iter().fold(FactoredRational::one(), |acc, (p, r)| {
        acc.mul(&local_disc(p, r))
    })
}

/// Product of the norms of the finite places where the algebra ramifies.
pub fn ram_product(v: &InvariantProfile) -> FactoredRational {
    v.support()
        .filter_map(PlaceId::norm)
        .fold(FactoredRational::one(), |acc, n| {
            acc.mul(&FactoredRational::from_integer(n))
        })
}

/// A simple algebra with its center: the profile over the center, plus the
/// absolute discriminant and degree of the center (supplied externally).
#[derive(Debug, Clone)]
pub struct AlgebraData {
    pub profile: InvariantProfile,
    pub center_disc: FactoredRational,
    pub center_degree: u64,
}

impl AlgebraData {
    /// `dim_Q = M² [Z:Q]`.
    pub fn dimension(&self) -> u64 {
        self.profile.modulus() * self.profile.modulus() * self.center_degree
    }

    /// `d(A|Q) = d(A|Z(A)) · |D_{Z(A)}|^{[A:Z(A)]}`.
    pub fn disc_over_q(&self) -> Result<FactoredRational> {
        let big_m = self.profile.modulus() as i64;
        Ok(disc_over_center(&self.profile)?.mul(&self.center_disc.pow(big_m * big_m)))
    }
}

/// `d(L|K) = d(L|Q) / d(K|Q)^{[L:K]}`.
pub fn disc_relative(l: &AlgebraData, k: &AlgebraData) -> Result<FactoredRational> {
    let (dl, dk) = (l.dimension(), k.dimension());
    if dk == 0 || dl % dk != 0 {
        return Err(Error::InvalidInput(format!(
            "[L:K] = {dl}/{dk} is not an integer"
        )));
    }
    Ok(l.disc_over_q()?
        .div(&k.disc_over_q()?.pow((dl / dk) as i64)))
}

/// Whether `dm | d_w λ − dj κ_w` in `Z/MZ` at every place `w` above `place`.
pub fn condition_iii_at(setup: &FieldSetup, place: &PlaceId, value: Residue) -> Result<bool> {
    let big_m = setup.modulus();
    if value.modulus() != big_m {
        return Err(Error::ModulusMismatch {
            left: value.modulus(),
            right: big_m,
        });
    }
    let (d, m, j) = (setup.d(), setup.m(), setup.j());
    for w in setup.fibers_at(place)? {
        let lhs = value
            .scale(w.local_degree)
            .checked_sub(Residue::new(d * j * w.kappa.value(), big_m))?;
        if !divisor_divides(d * m, lhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Values allowed at `place` by the archimedean rules and the embedding
/// condition, restricted to multiples of `tau`. Ascending.
pub fn admissible_values(setup: &FieldSetup, place: &PlaceId, tau: u64) -> Result<Vec<u64>> {
    let big_m = setup.modulus();
    let mut out = Vec::new();
    for v in (0..big_m).step_by(tau as usize) {
        let ok_arch = match place {
            PlaceId::Complex(_) => v == 0,
            PlaceId::Real(_) => v == 0 || (big_m % 2 == 0 && v == big_m / 2),
            PlaceId::Finite { .. } => true,
        };
        if ok_arch && condition_iii_at(setup, place, Residue::new(v, big_m))? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Whether `K` embeds into the algebra with profile `v`.
pub fn embeds_into(setup: &FieldSetup, v: &InvariantProfile) -> Result<bool> {
    require_valid(v)?;
    if v.modulus() != setup.modulus() {
        return Err(Error::ModulusMismatch {
            left: v.modulus(),
            right: setup.modulus(),
        });
    }
    let mut places: Vec<PlaceId> = setup.explicit_places().map(|p| p.id.clone()).collect();
    places.extend(v.support().cloned());
    places.sort();
    places.dedup();
    for p in &places {
        if !condition_iii_at(setup, p, v.get(p))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setup::{FiberRecord, PlaceRecord};

    fn p(n: u64) -> PlaceId {
        PlaceId::prime(n)
    }

    fn inf() -> PlaceId {
        PlaceId::infinity()
    }

    fn quat() -> InvariantProfile {
        InvariantProfile::from_pairs(2, [(p(2), 1), (inf(), 1)])
    }

    fn hamilton_setup() -> FieldSetup {
        FieldSetup::rational(
            2,
            2,
            vec![
                PlaceRecord {
                    id: p(2),
                    ramified: false,
                    fibers: vec![FiberRecord::new(1, 1, 2)],
                },
                PlaceRecord {
                    id: inf(),
                    ramified: false,
                    fibers: vec![FiberRecord::new(1, 1, 2)],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(is_valid(&quat()));
        let only2 = InvariantProfile::from_pairs(2, [(p(2), 1)]);
        assert_eq!(validate_profile(&only2), vec![Violation::NonzeroSum(1)]);
        let cplx = InvariantProfile::from_pairs(2, [(PlaceId::Complex("c".into()), 1), (p(2), 1)]);
        assert!(matches!(
            validate_profile(&cplx)[0],
            Violation::ComplexPlace(_)
        ));
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_and_skew(&quat()).unwrap(), (2, true));
        assert_eq!(
            index_and_skew(&InvariantProfile::zero(4)).unwrap(),
            (1, false)
        );
        let v = InvariantProfile::from_pairs(4, [(p(2), 2), (p(3), 2)]);
        assert_eq!(index_and_skew(&v).unwrap(), (2, false));
        assert!(index_and_skew(&InvariantProfile::from_pairs(2, [(p(3), 1)])).is_err());
    }

    #[test]
    fn disc_examples() {
        assert_eq!(
            disc_over_center(&quat()).unwrap(),
            FactoredRational::from_integer(4)
        );
        assert!(disc_over_center(&InvariantProfile::zero(3))
            .unwrap()
            .is_one());
        let v = InvariantProfile::from_pairs(4, [(p(2), 1), (p(3), 3)]);
        assert_eq!(disc_over_center(&v).unwrap().exponent(2), 12);
        // prime-power norms factor through the rational prime
        let q = PlaceId::Finite {
            norm: 9,
            label: "q".into(),
        };
        assert_eq!(local_disc(&q, Residue::new(1, 2)).exponent(3), 4);
    }

    #[test]
    fn ram_examples() {
        assert_eq!(ram_product(&quat()), FactoredRational::from_integer(2));
        assert!(ram_product(&InvariantProfile::zero(2)).is_one());
        let v = InvariantProfile::from_pairs(2, [(p(3), 1), (p(5), 1)]);
        assert_eq!(ram_product(&v).to_string(), "15");
    }

    fn over_q(profile: InvariantProfile) -> AlgebraData {
        AlgebraData {
            profile,
            center_disc: FactoredRational::one(),
            center_degree: 1,
        }
    }

    #[test]
    fn relative_disc_examples() {
        let hamilton = over_q(quat());
        let m2_eisenstein = AlgebraData {
            profile: InvariantProfile::zero(2),
            center_disc: FactoredRational::from_integer(3),
            center_degree: 2,
        };
        let r = disc_relative(&m2_eisenstein, &hamilton).unwrap();
        assert_eq!(r.to_string(), "81/16");
        assert!(disc_relative(&hamilton, &hamilton).unwrap().is_one());
        let eisenstein = AlgebraData {
            profile: InvariantProfile::zero(1),
            center_disc: FactoredRational::from_integer(3),
            center_degree: 2,
        };
        let r = disc_relative(&hamilton, &eisenstein).unwrap();
        assert_eq!(r.to_string(), "4/9");
        assert_eq!(r.denominator() % 3u32, BigUint::from(0u32));
        assert!(disc_relative(&eisenstein, &hamilton).is_err());
    }

    #[test]
    fn embedding_examples() {
        let trivial_k = FieldSetup::rational(1, 2, vec![]).unwrap();
        assert!(embeds_into(&trivial_k, &quat()).unwrap());

        let s = hamilton_setup();
        let good = InvariantProfile::from_pairs(4, [(p(2), 2), (inf(), 2)]);
        assert!(embeds_into(&s, &good).unwrap());
        let bad = InvariantProfile::from_pairs(4, [(p(2), 1), (p(3), 3)]);
        assert!(!embeds_into(&s, &bad).unwrap());
    }

    #[test]
    fn factored_rational_ops() {
        let a = FactoredRational::power_of(12, 2);
        assert_eq!(a.to_string(), "144");
        assert!(a.is_perfect_power(2));
        assert!(FactoredRational::from_integer(6).divides(&a));
        assert!(a.le(&BigUint::from(144u32)));
        assert!(!a.le(&BigUint::from(143u32)));
        assert!(a.div(&a).is_one());
    }
}
