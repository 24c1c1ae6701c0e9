//! The arithmetic environment `Z ⊆ F`, the central simple `F`-algebra `K`
//! through its local invariants, and the Frobenius data of `F|Z`.
//!
//! Only finitely many places are stored explicitly: every archimedean place,
//! every place ramified in `F`, every place where `K` is ramified, and
//! optionally some ordinary primes. All other primes are answered by a tail
//! oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{is_fundamental_discriminant, is_prime, kronecker_prime, lcm, primes_up_to};
use crate::error::{Error, Result};
use crate::perm::{GroupTable, Permutation};
use crate::residue::Residue;

/// Label of the real place of `Q` in the builtin setups.
pub const RATIONAL_INFINITY: &str = "inf";

/// A place of `Z`. Finite places sort first by norm, then by label;
/// archimedean places come last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceId {
    Finite { norm: u64, label: String },
    Real(String),
    Complex(String),
}

impl PlaceId {
    /// A rational prime, labelled by its decimal expansion.
    pub fn prime(p: u64) -> Self {
        PlaceId::Finite {
            norm: p,
            label: p.to_string(),
        }
    }

    pub fn infinity() -> Self {
        PlaceId::Real(RATIONAL_INFINITY.to_string())
    }

    pub fn label(&self) -> &str {
        match self {
            PlaceId::Finite { label, .. } | PlaceId::Real(label) | PlaceId::Complex(label) => label,
        }
    }

    pub fn norm(&self) -> Option<u64> {
        match self {
            PlaceId::Finite { norm, .. } => Some(*norm),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PlaceId::Finite { .. })
    }

    pub fn kind(&self) -> PlaceKind {
        match self {
            PlaceId::Finite { .. } => PlaceKind::Finite,
            PlaceId::Real(_) => PlaceKind::Real,
            PlaceId::Complex(_) => PlaceKind::Complex,
        }
    }
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for PlaceId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Finite,
    Real,
    Complex,
}

/// A place `w` of `F` above a place of `Z`: local degree and `K`'s invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberRecord {
    pub local_degree: u64,
    pub kappa: Residue,
}

impl FiberRecord {
    pub fn new(local_degree: u64, kappa: u64, m: u64) -> Self {
        Self {
            local_degree,
            kappa: Residue::new(kappa, m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceRecord {
    pub id: PlaceId,
    pub ramified: bool,
    pub fibers: Vec<FiberRecord>,
}

impl PlaceRecord {
    pub fn is_exceptional(&self) -> bool {
        !self.id.is_finite() || self.ramified || self.fibers.iter().any(|f| !f.kappa.is_zero())
    }
}

/// How primes outside the explicit list are answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailOracle {
    /// `Z = F = Q`.
    Rational,
    /// `Z = Q`, `F = Q(√D)` for a fundamental discriminant `D`.
    Quadratic { disc: i64 },
    /// Every place of norm at most `bound` is listed explicitly.
    Listed { bound: u64 },
    /// `Z = Q`; Frobenius classes drawn from a seeded generator.
    Sampled { seed: u64 },
}

impl TailOracle {
    pub fn name(&self) -> &'static str {
        match self {
            TailOracle::Rational => "rational",
            TailOracle::Quadratic { .. } => "quadratic",
            TailOracle::Listed { .. } => "listed",
            TailOracle::Sampled { .. } => "sampled",
        }
    }

    /// Whether `Z = Q`, so that generic places are rational primes.
    pub fn over_rationals(&self) -> bool {
        !matches!(self, TailOracle::Listed { .. })
    }
}

/// Everything needed to build a [`FieldSetup`].
#[derive(Debug, Clone)]
pub struct SetupSpec {
    pub tail: TailOracle,
    pub m: u64,
    pub j: u64,
    /// Required for listed and sampled tails; derived for the builtins.
    pub group: Option<GroupTable>,
    pub places: Vec<PlaceRecord>,
    pub zeta_residue: Option<f64>,
}

#[derive(Debug, Clone)]
struct StoredPlace {
    record: PlaceRecord,
    /// Frobenius class, for unramified finite places.
    frob: Option<usize>,
    exceptional: bool,
}

#[derive(Debug, Clone)]
pub struct FieldSetup {
    d: u64,
    m: u64,
    j: u64,
    group: Arc<GroupTable>,
    tail: TailOracle,
    places: BTreeMap<PlaceId, StoredPlace>,
    labels: HashMap<String, PlaceId>,
    zeta_residue: Option<f64>,
}

impl FieldSetup {
    pub fn build(spec: SetupSpec) -> Result<Self> {
        let SetupSpec {
            tail,
            m,
            j,
            group,
            places,
            zeta_residue,
        } = spec;
        if m == 0 || j == 0 {
            return Err(Error::InvalidSetup("m and j must be positive".into()));
        }
        let builtin = match tail {
            TailOracle::Rational => Some(GroupTable::trivial()),
            TailOracle::Quadratic { disc } => {
                if !is_fundamental_discriminant(disc) {
                    return Err(Error::InvalidSetup(format!(
                        "{disc} is not a fundamental discriminant"
                    )));
                }
                Some(GroupTable::s2())
            }
            _ => None,
        };
        let group = match (builtin, group) {
            (Some(b), Some(g)) => {
                if g.degree() != b.degree() || g.order() != b.order() {
                    return Err(Error::InvalidSetup(format!(
                        "{} setups fix the group; the supplied generators disagree",
                        tail.name()
                    )));
                }
                b
            }
            (Some(b), None) => b,
            (None, Some(g)) => g,
            (None, None) => {
                return Err(Error::InvalidSetup(format!(
                    "{} setups need group_generators",
                    tail.name()
                )))
            }
        };
        if !group.is_transitive() {
            return Err(Error::InvalidSetup(
                "the group must act transitively".into(),
            ));
        }
        let d = group.degree() as u64;
        let zeta_residue = match tail {
            TailOracle::Listed { .. } => zeta_residue,
            _ => Some(zeta_residue.unwrap_or(1.0)),
        };
        if let Some(r) = zeta_residue {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidSetup("zeta_residue must be positive".into()));
            }
        }
        let mut setup = Self {
            d,
            m,
            j,
            group: Arc::new(group),
            tail,
            places: BTreeMap::new(),
            labels: HashMap::new(),
            zeta_residue,
        };
        for record in places {
            setup.insert_place(record)?;
        }
        setup.add_default_places()?;
        setup.validate_kappa_sum()?;
        Ok(setup)
    }

    pub fn rational(m: u64, j: u64, places: Vec<PlaceRecord>) -> Result<Self> {
        Self::build(SetupSpec {
            tail: TailOracle::Rational,
            m,
            j,
            group: None,
            places,
            zeta_residue: None,
        })
    }

    pub fn quadratic(disc: i64, m: u64, j: u64, places: Vec<PlaceRecord>) -> Result<Self> {
        Self::build(SetupSpec {
            tail: TailOracle::Quadratic { disc },
            m,
            j,
            group: None,
            places,
            zeta_residue: None,
        })
    }

    fn insert_place(&mut self, record: PlaceRecord) -> Result<()> {
        let (d, m) = (self.d, self.m);
        let id = record.id.clone();
        let bad = |msg: String| Error::InvalidSetup(format!("place `{id}`: {msg}"));
        if self.labels.contains_key(id.label()) {
            return Err(bad("listed twice".into()));
        }
        if record.fibers.is_empty() {
            return Err(bad("no fibers".into()));
        }
        for f in &record.fibers {
            if f.local_degree == 0 {
                return Err(bad("local degree must be positive".into()));
            }
            if f.kappa.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: f.kappa.modulus(),
                    right: m,
                });
            }
        }
        let total: u64 = record.fibers.iter().map(|f| f.local_degree).sum();
        if total != d {
            return Err(bad(format!(
                "local degrees sum to {total}, expected d = {d}"
            )));
        }
        let mut frob = None;
        match &record.id {
            PlaceId::Complex(_) => {
                if record.ramified {
                    return Err(bad("archimedean places are not flagged ramified".into()));
                }
                if record
                    .fibers
                    .iter()
                    .any(|f| f.local_degree != 1 || !f.kappa.is_zero())
                {
                    return Err(bad(
                        "fibers over a complex place have d_w = 1, κ_w = 0".into()
                    ));
                }
            }
            PlaceId::Real(_) => {
                if record.ramified {
                    return Err(bad("archimedean places are not flagged ramified".into()));
                }
                for f in &record.fibers {
                    let ok = match f.local_degree {
                        1 => f.kappa.is_zero() || (m % 2 == 0 && f.kappa.value() == m / 2),
                        2 => f.kappa.is_zero(),
                        _ => false,
                    };
                    if !ok {
                        return Err(bad(format!(
                            "invalid real fiber (d_w = {}, κ_w = {})",
                            f.local_degree,
                            f.kappa.value()
                        )));
                    }
                }
                if let TailOracle::Quadratic { disc } = self.tail {
                    let want: &[u64] = if disc > 0 { &[1, 1] } else { &[2] };
                    if degrees(&record) != want {
                        return Err(bad("fibers disagree with the sign of D".into()));
                    }
                }
            }
            PlaceId::Finite { norm, .. } => {
                let norm = *norm;
                if norm < 2 {
                    return Err(bad("norm must be at least 2".into()));
                }
                if self.tail.over_rationals() {
                    if !is_prime(norm) {
                        return Err(bad("places of Q have prime norm".into()));
                    }
                    if record.id.label() != norm.to_string() {
                        return Err(bad("primes of Q are labelled by their value".into()));
                    }
                }
                if let TailOracle::Listed { bound } = self.tail {
                    if norm > bound {
                        return Err(bad(format!("norm exceeds the listed bound {bound}")));
                    }
                }
                match self.tail {
                    TailOracle::Rational if record.ramified => {
                        return Err(bad("nothing ramifies in F = Q".into()));
                    }
                    TailOracle::Quadratic { disc } => {
                        let divides = disc.unsigned_abs() % norm == 0;
                        if divides != record.ramified {
                            return Err(bad(format!(
                                "ramified in Q(√{disc}) iff it divides {disc}"
                            )));
                        }
                        if divides && degrees(&record) != [2] {
                            return Err(bad(
                                "a ramified prime has a single fiber of degree 2".into()
                            ));
                        }
                    }
                    _ => {}
                }
                if !record.ramified {
                    let class = match self.tail {
                        TailOracle::Rational | TailOracle::Quadratic { .. } => {
                            self.tail_frobenius(norm)?
                        }
                        _ => {
                            let ct: Vec<usize> = record
                                .fibers
                                .iter()
                                .map(|f| f.local_degree as usize)
                                .collect();
                            self.group.class_with_cycle_type(&ct).ok_or_else(|| {
                                bad("no group element has this fiber cycle type".into())
                            })?
                        }
                    };
                    let want = &self.group.classes()[class].cycle_type;
                    let got: Vec<usize> = degrees(&record).iter().map(|&x| x as usize).collect();
                    if &got != want {
                        return Err(bad(format!(
                            "fiber degrees {got:?} differ from the Frobenius cycle type {want:?}"
                        )));
                    }
                    frob = Some(class);
                }
            }
        }
        let exceptional = record.is_exceptional();
        self.labels.insert(id.label().to_string(), id.clone());
        self.places.insert(
            id,
            StoredPlace {
                record,
                frob,
                exceptional,
            },
        );
        Ok(())
    }

    fn add_default_places(&mut self) -> Result<()> {
        let m = self.m;
        let has_archimedean = self.places.keys().any(|p| !p.is_finite());
        match self.tail {
            TailOracle::Rational => {
                if !has_archimedean {
                    self.insert_place(PlaceRecord {
                        id: PlaceId::infinity(),
                        ramified: false,
                        fibers: vec![FiberRecord::new(1, 0, m)],
                    })?;
                }
            }
            TailOracle::Quadratic { disc } => {
                if !has_archimedean {
                    let fibers = if disc > 0 {
                        vec![FiberRecord::new(1, 0, m), FiberRecord::new(1, 0, m)]
                    } else {
                        vec![FiberRecord::new(2, 0, m)]
                    };
                    self.insert_place(PlaceRecord {
                        id: PlaceId::infinity(),
                        ramified: false,
                        fibers,
                    })?;
                }
                for (p, _) in crate::arith::factorize(disc.unsigned_abs()) {
                    if !self.labels.contains_key(&p.to_string()) {
                        self.insert_place(PlaceRecord {
                            id: PlaceId::prime(p),
                            ramified: true,
                            fibers: vec![FiberRecord::new(2, 0, m)],
                        })?;
                    }
                }
            }
            _ => {
                if !has_archimedean {
                    return Err(Error::InvalidSetup(
                        "the archimedean places must be listed explicitly".into(),
                    ));
                }
            }
        }
        let real = self
            .places
            .keys()
            .filter(|p| matches!(p, PlaceId::Real(_)))
            .count();
        if self.tail.over_rationals()
            && (real != 1 || self.places.keys().any(|p| matches!(p, PlaceId::Complex(_))))
        {
            return Err(Error::InvalidSetup("Q has exactly one real place".into()));
        }
        Ok(())
    }

    fn validate_kappa_sum(&self) -> Result<()> {
        let sum = self
            .places
            .values()
            .flat_map(|p| &p.record.fibers)
            .fold(0u64, |acc, f| (acc + f.kappa.value()) % self.m);
        if sum != 0 {
            return Err(Error::InvalidSetup(format!(
                "the invariants of K sum to {sum}/{} ≠ 0 in Q/Z",
                self.m
            )));
        }
        Ok(())
    }

    fn tail_frobenius(&self, norm: u64) -> Result<usize> {
        match self.tail {
            TailOracle::Rational => Ok(self.group.identity_class()),
            TailOracle::Quadratic { disc } => match kronecker_prime(disc, norm) {
                1 => Ok(self.group.identity_class()),
                -1 => Ok(self.group.class_with_cycle_type(&[2]).expect("S2")),
                _ => Err(Error::RamifiedPlace(norm.to_string())),
            },
            TailOracle::Sampled { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(norm);
                let e = rng.random_range(0..self.group.order());
                Ok(self.group.class_of(e))
            }
            TailOracle::Listed { bound } => {
                if norm > bound {
                    Err(Error::BeyondCoverage {
                        needed: norm,
                        bound,
                    })
                } else {
                    Err(Error::UnknownPlace(norm.to_string()))
                }
            }
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    /// `M = dmj`.
    pub fn modulus(&self) -> u64 {
        self.d * self.m * self.j
    }

    /// `n = dj²`.
    pub fn degree_n(&self) -> u64 {
        self.d * self.j * self.j
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn tail(&self) -> TailOracle {
        self.tail
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self.tail, TailOracle::Sampled { .. })
    }

    pub fn zeta_residue(&self) -> Option<f64> {
        self.zeta_residue
    }

    /// Explicitly stored places, in place order.
    pub fn explicit_places(&self) -> impl Iterator<Item = &PlaceRecord> {
        self.places.values().map(|p| &p.record)
    }

    pub fn archimedean_places(&self) -> Vec<PlaceId> {
        self.places
            .keys()
            .filter(|p| !p.is_finite())
            .cloned()
            .collect()
    }

    /// The finite set of exceptional places.
    pub fn exceptional_places(&self) -> Vec<PlaceId> {
        self.places
            .iter()
            .filter(|(_, p)| p.exceptional)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn is_exceptional(&self, place: &PlaceId) -> bool {
        self.places.get(place).is_some_and(|p| p.exceptional)
    }

    /// Looks up a place by label. Over `Q`, any prime number is a valid label.
    pub fn resolve(&self, label: &str) -> Result<PlaceId> {
        if let Some(id) = self.labels.get(label) {
            return Ok(id.clone());
        }
        if self.tail.over_rationals() {
            if let Ok(p) = label.parse::<u64>() {
                if is_prime(p) {
                    return Ok(PlaceId::prime(p));
                }
            }
        }
        Err(Error::UnknownPlace(label.to_string()))
    }

    /// Checks that a place belongs to `Z` (resolving it through its label).
    pub fn check_place(&self, place: &PlaceId) -> Result<()> {
        if self.resolve(place.label())? == *place {
            Ok(())
        } else {
            Err(Error::UnknownPlace(place.label().to_string()))
        }
    }

    /// Conjugacy class of `Frob(p)` in the group.
    pub fn frobenius_at(&self, place: &PlaceId) -> Result<usize> {
        let norm = place
            .norm()
            .ok_or_else(|| Error::InvalidInput(format!("`{place}` is archimedean")))?;
        if let Some(p) = self.places.get(place) {
            return p
                .frob
                .ok_or_else(|| Error::RamifiedPlace(place.to_string()));
        }
        self.check_place(place)?;
        self.tail_frobenius(norm)
    }

    /// The places of `F` above `place`, with `K`'s invariants there.
    pub fn fibers_at(&self, place: &PlaceId) -> Result<Vec<FiberRecord>> {
        if let Some(p) = self.places.get(place) {
            return Ok(p.record.fibers.clone());
        }
        let class = self.frobenius_at(place)?;
        Ok(self.group.classes()[class]
            .cycle_type
            .iter()
            .map(|&c| FiberRecord::new(c as u64, 0, self.m))
            .collect())
    }

    /// `dm / cycgcd(Frob(p))` for a non-exceptional prime.
    pub fn frobenius_divisor(&self, place: &PlaceId) -> Result<u64> {
        if self.is_exceptional(place) {
            return Err(Error::ExceptionalPlace(place.to_string()));
        }
        let class = self.frobenius_at(place)?;
        Ok(self.d * self.m / self.group.classes()[class].cycgcd)
    }

    /// `η_{τ,p} = lcm(dm / cycgcd(Frob(p)), τ)`.
    pub fn eta(&self, tau: u64, place: &PlaceId) -> Result<u64> {
        let big_m = self.modulus();
        if tau == 0 || big_m % tau != 0 {
            return Err(Error::NotADivisor(tau, big_m));
        }
        Ok(lcm(self.frobenius_divisor(place)?, tau))
    }

    /// Non-exceptional finite places with norm at most `limit`, with their
    /// Frobenius classes, in place order.
    pub fn generic_places_up_to(&self, limit: u64) -> Result<Vec<(PlaceId, usize)>> {
        match self.tail {
            TailOracle::Listed { bound } => {
                if limit > bound {
                    return Err(Error::BeyondCoverage {
                        needed: limit,
                        bound,
                    });
                }
                Ok(self
                    .places
                    .iter()
                    .filter(|(id, p)| !p.exceptional && id.norm().is_some_and(|n| n <= limit))
                    .map(|(id, p)| (id.clone(), p.frob.expect("unramified")))
                    .collect())
            }
            _ => {
                let mut out = Vec::new();
                for p in primes_up_to(limit) {
                    let id = PlaceId::prime(p);
                    match self.places.get(&id) {
                        Some(s) if s.exceptional => {}
                        Some(s) => out.push((id, s.frob.expect("unramified"))),
                        None => {
                            let class = self.tail_frobenius(p)?;
                            out.push((id, class));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Largest norm the tail can answer without error, if bounded.
    pub fn coverage_bound(&self) -> Option<u64> {
        match self.tail {
            TailOracle::Listed { bound } => Some(bound),
            _ => None,
        }
    }
}

fn degrees(record: &PlaceRecord) -> Vec<u64> {
    let mut v: Vec<u64> = record.fibers.iter().map(|f| f.local_degree).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

// ---------------------------------------------------------------------------
// JSON setup files

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupFile {
    pub kind: String,
    #[serde(default)]
    pub d: Option<u64>,
    pub m: u64,
    pub j: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_generators: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub places: Vec<PlaceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_residue: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceFile {
    pub id: String,
    pub kind: PlaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<u64>,
    #[serde(default)]
    pub ramified: bool,
    pub fibers: Vec<FiberFile>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberFile {
    pub dw: u64,
    pub kappa: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailFile {
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SetupFile {
    pub fn into_spec(self) -> Result<SetupSpec> {
        let tail_file = self.tail.unwrap_or_default();
        let need = |v: Option<u64>, what: &str| {
            v.ok_or_else(|| Error::Parse(format!("{} setups need tail.{what}", self.kind)))
        };
        let tail = match self.kind.as_str() {
            "rational" => TailOracle::Rational,
            "quadratic" => TailOracle::Quadratic {
                disc: tail_file
                    .disc
                    .ok_or_else(|| Error::Parse("quadratic setups need tail.D".into()))?,
            },
            "listed" => TailOracle::Listed {
                bound: need(tail_file.bound, "bound")?,
            },
            "sampled" => TailOracle::Sampled {
                seed: need(tail_file.seed, "seed")?,
            },
            other => return Err(Error::InvalidSetup(format!("unknown kind `{other}`"))),
        };
        let group = match &self.group_generators {
            None => None,
            Some(gens) => {
                let perms = gens
                    .iter()
                    .map(|g| Permutation::from_images(g))
                    .collect::<Result<Vec<_>>>()?;
                let degree = match (self.d, perms.first()) {
                    (Some(d), _) => d as usize,
                    (None, Some(p)) => p.degree(),
                    (None, None) => {
                        return Err(Error::Parse(
                            "empty group_generators need an explicit d".into(),
                        ))
                    }
                };
                Some(GroupTable::closure(&perms, degree)?)
            }
        };
        if let (Some(d), Some(g)) = (self.d, &group) {
            if g.degree() as u64 != d {
                return Err(Error::DegreeMismatch {
                    expected: d as usize,
                    got: g.degree(),
                });
            }
        }
        let expected_d = match tail {
            TailOracle::Rational => Some(1),
            TailOracle::Quadratic { .. } => Some(2),
            _ => None,
        };
        if let (Some(want), Some(d)) = (expected_d, self.d) {
            if want != d {
                return Err(Error::InvalidSetup(format!(
                    "{} setups have d = {want}, file says {d}",
                    self.kind
                )));
            }
        }
        let m = self.m;
        let places = self
            .places
            .into_iter()
            .map(|p| {
                let id = match p.kind {
                    PlaceKind::Finite => PlaceId::Finite {
                        norm: p.norm.ok_or_else(|| {
                            Error::Parse(format!("finite place `{}` needs a norm", p.id))
                        })?,
                        label: p.id,
                    },
                    PlaceKind::Real => PlaceId::Real(p.id),
                    PlaceKind::Complex => PlaceId::Complex(p.id),
                };
                let fibers = p
                    .fibers
                    .iter()
                    .map(|f| {
                        if m == 0 || f.kappa >= m {
                            Err(Error::InvalidSetup(format!(
                                "place `{id}`: kappa {} is not reduced modulo m = {m}",
                                f.kappa
                            )))
                        } else {
                            Ok(FiberRecord::new(f.dw, f.kappa, m))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PlaceRecord {
                    id,
                    ramified: p.ramified,
                    fibers,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SetupSpec {
            tail,
            m: self.m,
            j: self.j,
            group,
            places,
            zeta_residue: self.zeta_residue,
        })
    }
}

impl FieldSetup {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SetupFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::build(file.into_spec()?)
    }
}
