//! Enumeration of invariant profiles under a discriminant or ramification
//! budget, and the existence criterion with witness construction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, gcd, lcm};
use crate::brauer::{
    admissible_values, condition_iii_at, disc_unchecked, local_disc, ram_product, validate_profile,
    FactoredRational, InvariantProfile,
};
use crate::error::{Error, Result};
use crate::perm::Metric;
use crate::residue::Residue;
use crate::setup::{FieldSetup, PlaceId};

/// Largest prime norm the census will sieve up to.
pub const DEFAULT_NORM_CAP: u64 = 2_000_000_000;

/// Default cap on the number of exceptional-place assignments searched.
pub const DEFAULT_EXISTENCE_CAP: u128 = 10_000_000;

/// Prescribed values `ξ` on a finite set `S` of places, and a divisor `τ`
/// of `M` that every value must be divisible by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConstraint {
    pub xi: BTreeMap<PlaceId, u64>,
    pub tau: u64,
}

impl Default for LocalConstraint {
    fn default() -> Self {
        Self {
            xi: BTreeMap::new(),
            tau: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    #[serde(default)]
    pub xi: Vec<crate::brauer::Assignment>,
    #[serde(default = "one")]
    pub tau: u64,
}

fn one() -> u64 {
    1
}

impl LocalConstraint {
    pub fn new<I: IntoIterator<Item = (PlaceId, u64)>>(xi: I, tau: u64) -> Self {
        Self {
            xi: xi.into_iter().collect(),
            tau,
        }
    }

    pub fn with_tau(&self, tau: u64) -> Self {
        Self {
            xi: self.xi.clone(),
            tau,
        }
    }

    pub fn places(&self) -> impl Iterator<Item = &PlaceId> {
        self.xi.keys()
    }

    pub fn contains(&self, place: &PlaceId) -> bool {
        self.xi.contains_key(place)
    }

    /// `σ_ξ`, the sum of the prescribed values.
    pub fn sigma(&self, modulus: u64) -> u64 {
        self.xi.values().fold(0, |a, &v| (a + v) % modulus)
    }

    /// `d(ξ)`.
    pub fn disc(&self, modulus: u64) -> FactoredRational {
        self.xi
            .iter()
            .fold(FactoredRational::one(), |acc, (p, &v)| {
                acc.mul(&local_disc(p, Residue::new(v, modulus)))
            })
    }

    pub fn ram(&self) -> FactoredRational {
        self.xi
            .iter()
            .filter(|(_, &v)| v != 0)
            .filter_map(|(p, _)| p.norm())
            .fold(FactoredRational::one(), |acc, n| {
                acc.mul(&FactoredRational::from_integer(n))
            })
    }

    /// Structural checks: places exist, values reduced, `τ | M`.
    pub fn check(&self, setup: &FieldSetup) -> Result<()> {
        let big_m = setup.modulus();
        if self.tau == 0 || big_m % self.tau != 0 {
            return Err(Error::InvalidConstraint(format!(
                "tau = {} does not divide M = {big_m}",
                self.tau
            )));
        }
        for (p, &v) in &self.xi {
            setup.check_place(p)?;
            if v >= big_m {
                return Err(Error::InvalidConstraint(format!(
                    "value {v} at `{p}` is not reduced modulo {big_m}"
                )));
            }
        }
        Ok(())
    }

    /// Whether `ξ` satisfies the local conditions and `τ | ξ`, so that the
    /// constrained set can be nonempty.
    pub fn is_consistent(&self, setup: &FieldSetup) -> Result<bool> {
        self.check(setup)?;
        for (p, &v) in &self.xi {
            if v % self.tau != 0 || !admissible_values(setup, p, 1)?.contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn from_json(setup: &FieldSetup, text: &str) -> Result<Self> {
        let file: ConstraintFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut xi = BTreeMap::new();
        for a in &file.xi {
            let id = setup.resolve(&a.place)?;
            if xi.insert(id, a.value).is_some() {
                return Err(Error::InvalidConstraint(format!(
                    "`{}` listed twice",
                    a.place
                )));
            }
        }
        let c = Self { xi, tau: file.tau };
        c.check(setup)?;
        Ok(c)
    }

    pub fn to_file(&self) -> ConstraintFile {
        ConstraintFile {
            xi: self
                .xi
                .iter()
                .map(|(p, &value)| crate::brauer::Assignment {
                    place: p.label().to_string(),
                    value,
                })
                .collect(),
            tau: self.tau,
        }
    }
}

/// Every extension of `ξ` to `S ∪ 𝒫^ex` by admissible multiples of `τ`.
/// Empty when `ξ` itself is inconsistent.
pub fn completions(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
) -> Result<Vec<LocalConstraint>> {
    if !constraint.is_consistent(setup)? {
        return Ok(Vec::new());
    }
    let mut out = vec![constraint.clone()];
    for p in setup.exceptional_places() {
        if constraint.contains(&p) {
            continue;
        }
        let values = admissible_values(setup, &p, constraint.tau)?;
        let size = (out.len() as u128) * values.len() as u128;
        if size > DEFAULT_EXISTENCE_CAP {
            return Err(Error::SearchTooLarge {
                size,
                cap: DEFAULT_EXISTENCE_CAP,
            });
        }
        out = out
            .iter()
            .flat_map(|c| {
                values.iter().map(|&v| {
                    let mut c = c.clone();
                    c.xi.insert(p.clone(), v);
                    c
                })
            })
            .collect();
    }
    Ok(out)
}

/// Membership in `Λ_{S,ξ,τ}`, or in its skew part when `skew_only`.
pub fn satisfies_lambda(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    v: &InvariantProfile,
    skew_only: bool,
) -> Result<bool> {
    if v.modulus() != setup.modulus() {
        return Err(Error::ModulusMismatch {
            left: v.modulus(),
            right: setup.modulus(),
        });
    }
    if !validate_profile(v).is_empty() {
        return Ok(false);
    }
    let mut places: BTreeSet<PlaceId> = setup.explicit_places().map(|p| p.id.clone()).collect();
    places.extend(v.support().cloned());
    for p in &places {
        if !condition_iii_at(setup, p, v.get(p))? {
            return Ok(false);
        }
    }
    for (p, &x) in &constraint.xi {
        if v.get(p).value() != x {
            return Ok(false);
        }
    }
    if v.iter().any(|(_, r)| r.value() % constraint.tau != 0) {
        return Ok(false);
    }
    if skew_only && v.gcd_of_values() != 1 {
        return Ok(false);
    }
    Ok(true)
}

/// One enumerated profile with its cached invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub profile: InvariantProfile,
    pub disc: FactoredRational,
    pub ram: FactoredRational,
    pub index: u64,
    pub is_skew: bool,
}

impl CensusRow {
    pub fn from_profile(profile: InvariantProfile) -> Self {
        let index = profile.modulus() / profile.gcd_of_values();
        Self {
            disc: disc_unchecked(&profile),
            ram: ram_product(&profile),
            is_skew: index == profile.modulus(),
            index,
            profile,
        }
    }

    pub fn metric(&self, metric: Metric) -> &FactoredRational {
        match metric {
            Metric::Disc => &self.disc,
            Metric::Ram => &self.ram,
        }
    }
}

/// Parameters of an enumeration.
#[derive(Debug, Clone)]
pub struct CensusQuery {
    pub metric: Metric,
    /// Keep profiles with metric at most this bound.
    pub bound: Option<BigUint>,
    /// Only primes of norm at most this may carry nonzero generic values.
    pub prime_cutoff: Option<u64>,
    pub skew_only: bool,
    pub parallel: bool,
    pub norm_cap: u64,
}

impl CensusQuery {
    pub fn new(metric: Metric, bound: BigUint) -> Self {
        Self {
            metric,
            bound: Some(bound),
            prime_cutoff: None,
            skew_only: false,
            parallel: true,
            norm_cap: DEFAULT_NORM_CAP,
        }
    }

    pub fn skew_only(mut self, yes: bool) -> Self {
        self.skew_only = yes;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn with_cutoff(mut self, cutoff: u64) -> Self {
        self.prime_cutoff = Some(cutoff);
        self
    }
}

/// A place with the values it may take and their metric factors.
#[derive(Debug, Clone)]
struct Slot {
    place: PlaceId,
    /// Nonzero options `(value, factor)`, cheapest first.
    options: Vec<(u64, BigUint)>,
}

impl Slot {
    fn min_factor(&self) -> &BigUint {
        &self.options[0].1
    }
}

fn factor_for(metric: Metric, place: &PlaceId, value: u64, modulus: u64) -> BigUint {
    match metric {
        Metric::Disc => local_disc(place, Residue::new(value, modulus)).numerator(),
        Metric::Ram => BigUint::from(place.norm().unwrap_or(1)),
    }
}

/// The search space of a census, prepared once and then walked.
struct Plan {
    modulus: u64,
    bound: Option<BigUint>,
    skew_only: bool,
    base: InvariantProfile,
    base_metric: BigUint,
    /// Free exceptional finite places: all options including zero.
    exceptional: Vec<(PlaceId, Vec<(u64, BigUint)>)>,
    /// Free archimedean places with their admissible values.
    archimedean: Vec<(PlaceId, Vec<u64>)>,
    generic: Vec<Slot>,
}

impl Plan {
    fn build(
        setup: &FieldSetup,
        constraint: &LocalConstraint,
        query: &CensusQuery,
    ) -> Result<Option<Self>> {
        constraint.check(setup)?;
        if setup.is_stochastic() {
            return Err(Error::StochasticRejected("an exact census"));
        }
        if query.bound.is_none() && query.prime_cutoff.is_none() {
            return Err(Error::InvalidInput(
                "a census needs a bound or a prime cutoff".into(),
            ));
        }
        if !constraint.is_consistent(setup)? {
            return Ok(None);
        }
        let big_m = setup.modulus();
        let tau = constraint.tau;
        let metric = query.metric;

        let mut base = InvariantProfile::zero(big_m);
        for (p, &v) in &constraint.xi {
            base.set(p.clone(), v);
        }
        let base_metric = match metric {
            Metric::Disc => constraint.disc(big_m).numerator(),
            Metric::Ram => constraint.ram().numerator(),
        };
        if let Some(x) = &query.bound {
            if &base_metric > x {
                return Ok(None);
            }
        }

        let mut exceptional = Vec::new();
        let mut archimedean = Vec::new();
        for p in setup.exceptional_places() {
            if constraint.contains(&p) {
                continue;
            }
            let values = admissible_values(setup, &p, tau)?;
            if values.is_empty() {
                return Ok(None);
            }
            if p.is_finite() {
                let mut opts: Vec<(u64, BigUint)> = values
                    .into_iter()
                    .map(|v| {
                        let f = if v == 0 {
                            BigUint::one()
                        } else {
                            factor_for(metric, &p, v, big_m)
                        };
                        (v, f)
                    })
                    .collect();
                opts.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
                exceptional.push((p, opts));
            } else {
                archimedean.push((p, values));
            }
        }

        // smallest per-prime factor over all Frobenius classes bounds the norms
        let limit = {
            let mut limit = query.prime_cutoff.unwrap_or(u64::MAX);
            if let Some(x) = &query.bound {
                let budget = x / &base_metric;
                let from_bound = match metric {
                    Metric::Ram => budget,
                    Metric::Disc => {
                        let dm = setup.d() * setup.m();
                        let e_min = setup
                            .group()
                            .classes()
                            .iter()
                            .filter_map(|c| {
                                let eta = lcm(dm / c.cycgcd, tau);
                                min_disc_exponent(big_m, eta)
                            })
                            .min();
                        match e_min {
                            Some(e) => budget.nth_root(e as u32),
                            None => BigUint::zero(),
                        }
                    }
                };
                limit = limit.min(from_bound.to_u64().unwrap_or(u64::MAX));
            }
            limit
        };
        if limit > query.norm_cap {
            return Err(Error::SearchTooLarge {
                size: limit as u128,
                cap: query.norm_cap as u128,
            });
        }

        let mut generic = Vec::new();
        for (p, class) in setup.generic_places_up_to(limit)? {
            if constraint.contains(&p) {
                continue;
            }
            let cyc = setup.group().classes()[class].cycgcd;
            let eta = lcm(setup.d() * setup.m() / cyc, tau);
            let mut options: Vec<(u64, BigUint)> = (eta..big_m)
                .step_by(eta as usize)
                .map(|v| (v, factor_for(metric, &p, v, big_m)))
                .collect();
            if options.is_empty() {
                continue;
            }
            options.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
            if let Some(x) = &query.bound {
                if &(&base_metric * &options[0].1) > x {
                    continue;
                }
            }
            generic.push(Slot { place: p, options });
        }
        generic.sort_by(|a, b| {
            a.min_factor()
                .cmp(b.min_factor())
                .then(a.place.cmp(&b.place))
        });

        Ok(Some(Self {
            modulus: big_m,
            bound: query.bound.clone(),
            skew_only: query.skew_only,
            base,
            base_metric,
            exceptional,
            archimedean,
            generic,
        }))
    }

    fn within(&self, value: &BigUint) -> bool {
        self.bound.as_ref().map_or(true, |x| value <= x)
    }

    /// Assignments of the free exceptional finite places within budget.
    fn exceptional_assignments(&self) -> Vec<(Vec<(usize, u64)>, BigUint)> {
        let mut out = vec![(Vec::new(), self.base_metric.clone())];
        for (k, (_, opts)) in self.exceptional.iter().enumerate() {
            let mut next = Vec::new();
            for (assign, metric) in &out {
                for (v, f) in opts {
                    let m2 = metric * f;
                    if !self.within(&m2) {
                        break;
                    }
                    let mut a = assign.clone();
                    if *v != 0 {
                        a.push((k, *v));
                    }
                    next.push((a, m2));
                }
            }
            out = next;
        }
        out
    }

    fn run<T: Send>(
        &self,
        emit: &(dyn Fn(&InvariantProfile) -> Option<T> + Sync),
        parallel: bool,
    ) -> Vec<T> {
        let starts = self.exceptional_assignments();
        // task = (exceptional assignment, first generic slot or none)
        let mut tasks = Vec::new();
        for (i, (_, metric)) in starts.iter().enumerate() {
            tasks.push((i, None));
            for (k, slot) in self.generic.iter().enumerate() {
                if !self.within(&(metric * slot.min_factor())) {
                    break;
                }
                tasks.push((i, Some(k)));
            }
        }
        let work = |&(i, first): &(usize, Option<usize>)| -> Vec<T> {
            let (assign, metric) = &starts[i];
            let mut profile = self.base.clone();
            for &(k, v) in assign {
                profile.set(self.exceptional[k].0.clone(), v);
            }
            let mut out = Vec::new();
            match first {
                None => self.complete(&profile, emit, &mut out),
                Some(k) => {
                    let slot = &self.generic[k];
                    for (v, f) in &slot.options {
                        let m2 = metric * f;
                        if !self.within(&m2) {
                            break;
                        }
                        profile.set(slot.place.clone(), *v);
                        self.descend(&mut profile, &m2, k + 1, emit, &mut out);
                    }
                }
            }
            out
        };
        if parallel {
            tasks.par_iter().map(work).flatten().collect()
        } else {
            tasks.iter().flat_map(work).collect()
        }
    }

    fn descend<T>(
        &self,
        profile: &mut InvariantProfile,
        metric: &BigUint,
        from: usize,
        emit: &dyn Fn(&InvariantProfile) -> Option<T>,
        out: &mut Vec<T>,
    ) {
        self.complete(profile, emit, out);
        for k in from..self.generic.len() {
            let slot = &self.generic[k];
            if !self.within(&(metric * slot.min_factor())) {
                break;
            }
            for (v, f) in &slot.options {
                let m2 = metric * f;
                if !self.within(&m2) {
                    break;
                }
                profile.set(slot.place.clone(), *v);
                self.descend(profile, &m2, k + 1, emit, out);
            }
            profile.set(slot.place.clone(), 0);
        }
    }

    /// Chooses archimedean values so the total vanishes.
    fn complete<T>(
        &self,
        profile: &InvariantProfile,
        emit: &dyn Fn(&InvariantProfile) -> Option<T>,
        out: &mut Vec<T>,
    ) {
        let big_m = self.modulus;
        let mut partial = vec![(profile.clone(), profile.sum().value())];
        for (p, values) in &self.archimedean {
            let mut next = Vec::with_capacity(partial.len() * values.len());
            for (prof, s) in &partial {
                for &v in values {
                    let mut q = prof.clone();
                    q.set(p.clone(), v);
                    next.push((q, (s + v) % big_m));
                }
            }
            partial = next;
        }
        for (prof, s) in partial {
            if s != 0 {
                continue;
            }
            if self.skew_only && prof.gcd_of_values() != 1 {
                continue;
            }
            if let Some(t) = emit(&prof) {
                out.push(t);
            }
        }
    }
}

/// Smallest `M(M - g)` over proper divisors `g` of `M` divisible by `eta`.
fn min_disc_exponent(big_m: u64, eta: u64) -> Option<u64> {
    crate::arith::divisors(big_m)
        .into_iter()
        .filter(|&g| g < big_m && g % eta == 0)
        .max()
        .map(|g| big_m * (big_m - g))
}

fn metric_of(row: &CensusRow, metric: Metric) -> BigUint {
    row.metric(metric).numerator()
}

/// All profiles in the constrained set with metric within budget, sorted by
/// metric and then by profile.
pub fn enumerate_census(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    query: &CensusQuery,
) -> Result<Vec<CensusRow>> {
    let Some(plan) = Plan::build(setup, constraint, query)? else {
        return Ok(Vec::new());
    };
    let metric = query.metric;
    let mut rows: Vec<(BigUint, CensusRow)> = plan.run(
        &|p: &InvariantProfile| {
            let row = CensusRow::from_profile(p.clone());
            Some((metric_of(&row, metric), row))
        },
        query.parallel,
    );
    rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.profile.cmp(&b.1.profile)));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// Metric value and skew flag of every profile within budget, unsorted.
pub fn enumerate_metrics(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    query: &CensusQuery,
) -> Result<Vec<(BigUint, bool)>> {
    let Some(plan) = Plan::build(setup, constraint, query)? else {
        return Ok(Vec::new());
    };
    let metric = query.metric;
    Ok(plan.run(
        &|p: &InvariantProfile| {
            let value = match metric {
                Metric::Disc => disc_unchecked(p).numerator(),
                Metric::Ram => ram_product(p).numerator(),
            };
            Some((value, p.gcd_of_values() == 1))
        },
        query.parallel,
    ))
}

/// One line of a count table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub x: BigUint,
    pub total: u64,
    pub skew: u64,
}

/// Counts at every grid point from a single enumeration at the largest.
pub fn count_table(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    metric: Metric,
    grid: &[BigUint],
    parallel: bool,
) -> Result<Vec<CountRow>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("grid must be ascending".into()));
    }
    let Some(top) = grid.last() else {
        return Ok(Vec::new());
    };
    let mut query = CensusQuery::new(metric, top.clone());
    query.parallel = parallel;
    let mut values = enumerate_metrics(setup, constraint, &query)?;
    values.sort();
    let mut out = Vec::with_capacity(grid.len());
    for x in grid {
        let end = values.partition_point(|(v, _)| v <= x);
        out.push(CountRow {
            x: x.clone(),
            total: end as u64,
            skew: values[..end].iter().filter(|(_, s)| *s).count() as u64,
        });
    }
    Ok(out)
}

/// Outcome of the existence criterion.
#[derive(Debug, Clone)]
pub struct Existence {
    pub exists: bool,
    /// Values on the exceptional places (and `S`) meeting the criterion.
    pub certificate: Option<InvariantProfile>,
    /// Set when the answer came from the coprimality pre-filter.
    pub prefiltered: bool,
}

/// `dm / U`, which divides every generic prime's `dm / cycgcd(Frob p)`.
pub fn generic_gcd(setup: &FieldSetup) -> u64 {
    let big_u = setup
        .group()
        .classes()
        .iter()
        .fold(1, |acc, c| lcm(acc, c.cycgcd));
    setup.d() * setup.m() / big_u
}

/// Decides whether the constrained set (or its skew part) is nonempty, by
/// searching maps on the exceptional places only.
pub fn decide_existence(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    skew: bool,
) -> Result<Existence> {
    decide_existence_with_cap(setup, constraint, skew, DEFAULT_EXISTENCE_CAP)
}

pub fn decide_existence_with_cap(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    skew: bool,
    cap: u128,
) -> Result<Existence> {
    constraint.check(setup)?;
    if constraint.tau != 1 {
        return Err(Error::InvalidConstraint(
            "the existence criterion is stated for tau = 1".into(),
        ));
    }
    let no = |prefiltered| Existence {
        exists: false,
        certificate: None,
        prefiltered,
    };
    if skew && gcd(setup.m(), setup.j()) != 1 {
        return Ok(no(true));
    }
    if !constraint.is_consistent(setup)? {
        return Ok(no(false));
    }
    let big_m = setup.modulus();
    let ex = setup.exceptional_places();
    let size = (big_m as u128)
        .checked_pow(ex.len() as u32)
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchTooLarge { size, cap });
    }
    let g0 = generic_gcd(setup);

    let mut base = InvariantProfile::zero(big_m);
    for (p, &v) in &constraint.xi {
        base.set(p.clone(), v);
    }
    let mut free = Vec::new();
    for p in &ex {
        if !constraint.contains(p) {
            free.push((p.clone(), admissible_values(setup, p, 1)?));
        }
    }
    let ex_fixed_sum = ex
        .iter()
        .filter(|p| constraint.contains(p))
        .fold(0, |a, p| (a + base.get(p).value()) % big_m);
    let ex_fixed_gcd = ex
        .iter()
        .filter(|p| constraint.contains(p))
        .fold(big_m, |a, p| gcd(a, base.get(p).value()));

    // odometer over the free exceptional places
    let mut idx = vec![0usize; free.len()];
    if free.iter().any(|(_, v)| v.is_empty()) {
        return Ok(no(false));
    }
    loop {
        let mut s = ex_fixed_sum;
        let mut g = ex_fixed_gcd;
        for (k, (_, vals)) in free.iter().enumerate() {
            let v = vals[idx[k]];
            s = (s + v) % big_m;
            g = gcd(g, v);
        }
        let ok_sum = s % g0 == 0;
        let ok_skew = !skew || gcd(g0, g) == 1;
        if ok_sum && ok_skew {
            let mut cert = base.clone();
            for (k, (p, vals)) in free.iter().enumerate() {
                cert.set(p.clone(), vals[idx[k]]);
            }
            return Ok(Existence {
                exists: true,
                certificate: Some(cert),
                prefiltered: false,
            });
        }
        // advance
        let mut k = 0;
        loop {
            if k == free.len() {
                return Ok(no(false));
            }
            idx[k] += 1;
            if idx[k] < free[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Extends a certificate from [`decide_existence`] to a full profile by
/// adding auxiliary primes, following the Bézout argument.
pub fn construct_witness(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    partial: &InvariantProfile,
    skew: bool,
) -> Result<InvariantProfile> {
    if setup.is_stochastic() {
        return Err(Error::StochasticRejected("witness construction"));
    }
    let big_m = setup.modulus();
    if partial.modulus() != big_m {
        return Err(Error::ModulusMismatch {
            left: partial.modulus(),
            right: big_m,
        });
    }
    let mut domain: BTreeSet<PlaceId> = setup.exceptional_places().into_iter().collect();
    domain.extend(constraint.places().cloned());
    for p in partial.support() {
        if !domain.contains(p) {
            return Err(Error::InvalidInput(format!(
                "`{p}` is neither exceptional nor constrained"
            )));
        }
    }
    for p in &domain {
        let v = partial.get(p);
        if !admissible_values(setup, p, 1)?.contains(&v.value()) {
            return Err(Error::InvalidInput(format!(
                "value at `{p}` is not admissible"
            )));
        }
        if let Some(&x) = constraint.xi.get(p) {
            if x != v.value() {
                return Err(Error::InvalidInput(format!(
                    "value at `{p}` differs from xi"
                )));
            }
        }
    }
    let g0 = generic_gcd(setup);
    let mut sum = partial.sum().value();
    if sum % g0 != 0 {
        return Err(Error::InvalidInput(
            "the exceptional values fail the sum criterion".into(),
        ));
    }
    if skew && gcd(g0, partial.gcd_of_values()) != 1 {
        return Err(Error::InvalidInput(
            "the exceptional values fail the skew criterion".into(),
        ));
    }

    let mut out = partial.clone();
    let mut walker = PrimeWalker::new(setup, &domain);

    // primes whose divisors have gcd dm/U, used with λ = dm/cycgcd
    if skew {
        let mut g = 0;
        while gcd(g, big_m) != gcd(g0, big_m) {
            let (p, c) = walker.next()?;
            if gcd(gcd(g, c), big_m) < gcd(g, big_m) || g == 0 {
                g = gcd(g, c);
                out.set(p, c);
                sum = (sum + c) % big_m;
            }
        }
    }

    // Bézout: −sum as a combination of the divisors of fresh primes
    let target = (big_m - sum) % big_m;
    if target != 0 {
        let mut chosen: Vec<(PlaceId, u64)> = Vec::new();
        let mut g = big_m;
        while target % g != 0 {
            let (p, c) = walker.next()?;
            if gcd(g, c) < g {
                g = gcd(g, c);
                chosen.push((p, c));
            }
        }
        // coefficients k_i with Σ k_i c_i ≡ g (mod M)
        let mut acc_g = big_m as i128;
        let mut coeffs: Vec<i128> = Vec::new();
        for (_, c) in &chosen {
            let (ng, x, y) = ext_gcd(acc_g, *c as i128);
            for k in coeffs.iter_mut() {
                *k *= x;
            }
            coeffs.push(y);
            acc_g = ng;
        }
        let scale = (target / g) as i128;
        for ((p, c), k) in chosen.into_iter().zip(coeffs) {
            let v =
                (k.rem_euclid(big_m as i128) * scale % big_m as i128) * c as i128 % big_m as i128;
            out.set(p, v as u64);
        }
    }
    if !satisfies_lambda(setup, constraint, &out, skew)? {
        return Err(Error::InvalidInput(
            "witness construction failed to satisfy the conditions".into(),
        ));
    }
    Ok(out)
}

/// Walks generic primes in increasing norm outside a fixed set.
struct PrimeWalker<'a> {
    setup: &'a FieldSetup,
    skip: BTreeSet<PlaceId>,
    buffer: Vec<(PlaceId, u64)>,
    pos: usize,
    limit: u64,
}

impl<'a> PrimeWalker<'a> {
    fn new(setup: &'a FieldSetup, skip: &BTreeSet<PlaceId>) -> Self {
        Self {
            setup,
            skip: skip.clone(),
            buffer: Vec::new(),
            pos: 0,
            limit: 0,
        }
    }

    /// Next prime with its `dm / cycgcd(Frob p)`.
    fn next(&mut self) -> Result<(PlaceId, u64)> {
        loop {
            if self.pos < self.buffer.len() {
                let item = self.buffer[self.pos].clone();
                self.pos += 1;
                self.skip.insert(item.0.clone());
                return Ok(item);
            }
            let new_limit = if self.limit == 0 { 128 } else { self.limit * 4 };
            let new_limit = match self.setup.coverage_bound() {
                Some(b) if self.limit >= b => {
                    return Err(Error::BeyondCoverage {
                        needed: b + 1,
                        bound: b,
                    })
                }
                Some(b) => new_limit.min(b),
                None => new_limit,
            };
            let dm = self.setup.d() * self.setup.m();
            self.buffer = self
                .setup
                .generic_places_up_to(new_limit)?
                .into_iter()
                .filter(|(p, _)| !self.skip.contains(p) && p.norm().unwrap() > self.limit)
                .map(|(p, class)| (p, dm / self.setup.group().classes()[class].cycgcd))
                .collect();
            self.pos = 0;
            self.limit = new_limit;
        }
    }
}
