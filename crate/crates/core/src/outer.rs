//! Base change `L = K ⊗_F F'` of a central simple algebra along a field
//! extension, described through local splitting types.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::brauer::{AlgebraData, FactoredRational, InvariantProfile};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::residue::Residue;
use crate::setup::{PlaceId, PlaceKind};

/// One field factor `E'` of the local algebra `F' ⊗ F_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplittingFactor {
    Finite { e: u64, f: u64 },
    RealOverReal,
    ComplexOverReal,
    ComplexOverComplex,
}

impl SplittingFactor {
    /// `[E' : F_v]`.
    pub fn degree(self) -> u64 {
        match self {
            Self::Finite { e, f } => e * f,
            Self::RealOverReal | Self::ComplexOverComplex => 1,
            Self::ComplexOverReal => 2,
        }
    }

    pub fn residue_degree(self) -> u64 {
        match self {
            Self::Finite { f, .. } => f,
            _ => 1,
        }
    }

    fn base_kind(self) -> Option<PlaceKind> {
        match self {
            Self::Finite { .. } => Some(PlaceKind::Finite),
            Self::RealOverReal | Self::ComplexOverReal => Some(PlaceKind::Real),
            Self::ComplexOverComplex => Some(PlaceKind::Complex),
        }
    }
}

/// Splitting types of `F'|F` at the places of `S`, with `d = [F':F]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleData {
    pub d: u64,
    pub places: BTreeMap<PlaceId, Vec<SplittingFactor>>,
}

impl EtaleData {
    pub fn new(d: u64, places: BTreeMap<PlaceId, Vec<SplittingFactor>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("[F':F] must be positive".into()));
        }
        for (v, factors) in &places {
            let total: u64 = factors.iter().map(|f| f.degree()).sum();
            if total != d {
                return Err(Error::DegreeMismatch {
                    expected: d as usize,
                    got: total as usize,
                });
            }
            for f in factors {
                if let SplittingFactor::Finite { e, f } = f {
                    if *e == 0 || *f == 0 {
                        return Err(Error::InvalidInput(format!("zero e or f at `{v}`")));
                    }
                }
                if f.base_kind() != Some(v.kind()) {
                    return Err(Error::InvalidInput(format!(
                        "factor {f:?} does not lie over `{v}`"
                    )));
                }
            }
        }
        Ok(Self { d, places })
    }

    /// Every place of `S` split completely.
    pub fn totally_split(d: u64, places: &[PlaceId]) -> Result<Self> {
        let map = places
            .iter()
            .map(|v| {
                let one = match v.kind() {
                    PlaceKind::Finite => SplittingFactor::Finite { e: 1, f: 1 },
                    PlaceKind::Real => SplittingFactor::RealOverReal,
                    PlaceKind::Complex => SplittingFactor::ComplexOverComplex,
                };
                (v.clone(), vec![one; d as usize])
            })
            .collect();
        Self::new(d, map)
    }
}

/// `K` over `F`: its degree `m` and invariants at the places of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KData {
    pub m: u64,
    pub kappa: BTreeMap<PlaceId, Residue>,
}

impl KData {
    pub fn new<I: IntoIterator<Item = (PlaceId, u64)>>(m: u64, kappa: I) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be positive".into()));
        }
        let kappa: BTreeMap<PlaceId, Residue> = kappa
            .into_iter()
            .map(|(p, k)| (p, Residue::new(k, m)))
            .collect();
        for (p, k) in &kappa {
            let ok = match p.kind() {
                PlaceKind::Finite => true,
                PlaceKind::Real => k.is_zero() || 2 * k.value() == m,
                PlaceKind::Complex => k.is_zero(),
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "invariant {k} impossible at `{p}`"
                )));
            }
        }
        let sum = kappa.values().fold(0, |a, k| (a + k.value()) % m);
        if sum != 0 {
            return Err(Error::InvalidInput(
                "invariants of K do not sum to zero".into(),
            ));
        }
        Ok(Self { m, kappa })
    }

    /// Hamilton's quaternions over `Q`.
    pub fn hamilton() -> Self {
        Self::new(2, [(PlaceId::prime(2), 1), (PlaceId::infinity(), 1)]).expect("valid")
    }

    pub fn is_skew(&self) -> bool {
        self.kappa.values().fold(self.m, |g, k| gcd(g, k.value())) == 1
    }

    /// `d(K|F) = ∏ ‖p‖^{m(m - gcd(m, κ_p))}`.
    pub fn disc(&self) -> FactoredRational {
        let m = self.m;
        self.kappa
            .iter()
            .fold(FactoredRational::one(), |acc, (p, k)| match p.norm() {
                Some(n) => acc.mul(&FactoredRational::power_of(
                    n,
                    (m * (m - k.gcd_with_modulus())) as i64,
                )),
                None => acc,
            })
    }
}

fn check_places(k: &KData, e: &EtaleData) -> Result<()> {
    for v in e.places.keys() {
        if !k.kappa.contains_key(v) {
            return Err(Error::UnknownPlace(v.to_string()));
        }
    }
    for v in k.kappa.keys() {
        if !e.places.contains_key(v) {
            return Err(Error::InvalidInput(format!(
                "no splitting type given at `{v}`"
            )));
        }
    }
    Ok(())
}

/// One place of `F'` above `S` and the invariant of `L` there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TensorInvariant {
    pub place: PlaceId,
    pub factor: usize,
    pub degree: u64,
    pub invariant: u64,
}

/// `[E' : F_v] · κ_v` for every factor `E'` of every `E(v)`.
pub fn tensor_invariants(k: &KData, e: &EtaleData) -> Result<Vec<TensorInvariant>> {
    check_places(k, e)?;
    let mut out = Vec::new();
    for (v, factors) in &e.places {
        let kappa = k.kappa[v];
        for (i, f) in factors.iter().enumerate() {
            out.push(TensorInvariant {
                place: v.clone(),
                factor: i,
                degree: f.degree(),
                invariant: kappa.scale(f.degree()).value(),
            });
        }
    }
    Ok(out)
}

/// `δ(E) = ∏ ‖p‖^{δ_p(E)}` over the finite places of `S`.
pub fn delta(k: &KData, e: &EtaleData) -> Result<FactoredRational> {
    check_places(k, e)?;
    let (m, d) = (k.m as i64, e.d as i64);
    let mut out = FactoredRational::one();
    for (v, factors) in &e.places {
        let Some(norm) = v.norm() else { continue };
        let kappa = k.kappa[v];
        let mut exp = m * d * (m - kappa.gcd_with_modulus() as i64);
        for f in factors {
            let g = kappa.scale(f.degree()).gcd_with_modulus() as i64;
            exp -= m * f.residue_degree() as i64 * (m - g);
        }
        if exp < 0 {
            return Err(Error::InvalidInput(format!(
                "negative exponent {exp} of δ at `{v}`"
            )));
        }
        out = out.mul(&FactoredRational::power_of(norm, exp));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterSummary {
    pub delta: FactoredRational,
    pub d_l_over_k: FactoredRational,
    pub is_skew: bool,
}

/// `d(L|K) = δ(E)^{-1} d(F'|F)^{m²}`, and whether `L` is a skew field, i.e.
/// whether the base-changed invariants generate `Z/mZ`.
pub fn outer_summary(k: &KData, e: &EtaleData, disc_fprime_f: &BigUint) -> Result<OuterSummary> {
    let disc_rel = factored_from_big(disc_fprime_f)?;
    let delta = delta(k, e)?;
    let m2 = (k.m * k.m) as i64;
    let g = tensor_invariants(k, e)?
        .iter()
        .fold(k.m, |g, t| gcd(g, t.invariant));
    Ok(OuterSummary {
        d_l_over_k: delta.inv().mul(&disc_rel.pow(m2)),
        delta,
        is_skew: g == 1,
    })
}

fn factored_from_big(n: &BigUint) -> Result<FactoredRational> {
    let small: u64 = n
        .try_into()
        .map_err(|_| Error::Unsupported("d(F'|F) must fit in 64 bits".into()))?;
    if small == 0 {
        return Err(Error::InvalidInput("d(F'|F) must be positive".into()));
    }
    Ok(FactoredRational::from_integer(small))
}

/// `K` and `L` as algebras over `Q`, for the independent route through
/// [`crate::brauer::disc_relative`]. `F` is given by its absolute
/// discriminant and degree; places of `F'` above `v` get labels `v#i`.
pub fn tensor_algebras(
    k: &KData,
    e: &EtaleData,
    disc_f: &FactoredRational,
    degree_f: u64,
    disc_fprime_f: &BigUint,
) -> Result<(AlgebraData, AlgebraData)> {
    let m = k.m;
    let mut kp = InvariantProfile::zero(m);
    for (v, kappa) in &k.kappa {
        kp.set(v.clone(), kappa.value());
    }
    let mut lp = InvariantProfile::zero(m);
    for t in tensor_invariants(k, e)? {
        let label = format!("{}#{}", t.place.label(), t.factor);
        let factor = e.places[&t.place][t.factor];
        let id = match t.place {
            PlaceId::Finite { norm, .. } => PlaceId::Finite {
                norm: norm.pow(factor.residue_degree() as u32),
                label,
            },
            PlaceId::Real(_) if factor == SplittingFactor::RealOverReal => PlaceId::Real(label),
            _ => PlaceId::Complex(label),
        };
        lp.set(id, t.invariant);
    }
    let disc_fprime = disc_f
        .pow(e.d as i64)
        .mul(&factored_from_big(disc_fprime_f)?);
    Ok((
        AlgebraData {
            profile: kp,
            center_disc: disc_f.clone(),
            center_degree: degree_f,
        },
        AlgebraData {
            profile: lp,
            center_disc: disc_fprime,
            center_degree: degree_f * e.d,
        },
    ))
}

/// All splitting types of total degree `d` over a place of the given kind.
pub fn splitting_types(d: u64, kind: PlaceKind) -> Vec<Vec<SplittingFactor>> {
    match kind {
        PlaceKind::Complex => vec![vec![SplittingFactor::ComplexOverComplex; d as usize]],
        PlaceKind::Real => (0..=d / 2)
            .map(|c| {
                let mut v = vec![SplittingFactor::RealOverReal; (d - 2 * c) as usize];
                v.extend(std::iter::repeat(SplittingFactor::ComplexOverReal).take(c as usize));
                v
            })
            .collect(),
        PlaceKind::Finite => {
            // multisets as non-increasing sequences of (e, f) pairs
            let mut pairs: Vec<(u64, u64)> = (1..=d)
                .flat_map(|e| (1..=d / e).map(move |f| (e, f)))
                .collect();
            pairs.sort_by(|a, b| b.cmp(a));
            let mut out = Vec::new();
            let mut cur = Vec::new();
            multisets(&pairs, 0, d, &mut cur, &mut out);
            out
        }
    }
}

fn multisets(
    pairs: &[(u64, u64)],
    from: usize,
    remaining: u64,
    cur: &mut Vec<SplittingFactor>,
    out: &mut Vec<Vec<SplittingFactor>>,
) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for (i, &(e, f)) in pairs.iter().enumerate().skip(from) {
        if e * f <= remaining {
            cur.push(SplittingFactor::Finite { e, f });
            multisets(pairs, i, remaining - e * f, cur, out);
            cur.pop();
        }
    }
}

/// The automorphisms preserving the invariant map of `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    /// Indices into the supplied automorphism list.
    pub members: Vec<usize>,
    /// `|Aut| = [F':F]` and every automorphism stabilizes.
    pub galois: bool,
}

/// `H = {σ : σ fixes the subfield and inv(L_v) = inv(L_{σ(v)}) for all v}`.
/// Automorphisms act on `labels` by position.
pub fn automorphism_stabilizer(
    labels: &[String],
    automorphisms: &[Permutation],
    fixes_subfield: &dyn Fn(usize) -> bool,
    invariants: &BTreeMap<String, Residue>,
    degree: u64,
) -> Result<Stabilizer> {
    let inv: Vec<Residue> = labels
        .iter()
        .map(|l| {
            invariants
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownPlace(l.clone()))
        })
        .collect::<Result<_>>()?;
    if invariants.len() != labels.len() {
        return Err(Error::InvalidInput(
            "invariants given at unlabeled places".into(),
        ));
    }
    let mut members = Vec::new();
    for (i, sigma) in automorphisms.iter().enumerate() {
        if sigma.degree() != labels.len() {
            return Err(Error::DegreeMismatch {
                expected: labels.len(),
                got: sigma.degree(),
            });
        }
        if fixes_subfield(i) && (0..labels.len()).all(|v| inv[sigma.apply(v)] == inv[v]) {
            members.push(i);
        }
    }
    Ok(Stabilizer {
        galois: automorphisms.len() as u64 == degree && members.len() == automorphisms.len(),
        members,
    })
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorFile {
    Finite { e: u64, f: u64 },
    Arch(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtalePlaceFile {
    pub id: String,
    pub factors: Vec<FactorFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaleFile {
    pub d: u64,
    pub places: Vec<EtalePlaceFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KPlaceFile {
    pub id: String,
    pub kind: PlaceKind,
    #[serde(default)]
    pub norm: Option<u64>,
    pub kappa: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KFile {
    pub m: u64,
    pub places: Vec<KPlaceFile>,
}

/// Input of the `outer` workflow: `K`, `E` and `d(F'|F)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterFile {
    #[serde(rename = "K")]
    pub k: KFile,
    #[serde(rename = "E")]
    pub e: EtaleFile,
    pub disc: u64,
}

impl KFile {
    pub fn resolve(&self) -> Result<KData> {
        let mut seen = BTreeMap::new();
        for p in &self.places {
            let id = match p.kind {
                PlaceKind::Finite => PlaceId::Finite {
                    norm: p
                        .norm
                        .filter(|&n| n >= 2)
                        .ok_or_else(|| Error::InvalidInput(format!("`{}` needs a norm", p.id)))?,
                    label: p.id.clone(),
                },
                PlaceKind::Real => PlaceId::Real(p.id.clone()),
                PlaceKind::Complex => PlaceId::Complex(p.id.clone()),
            };
            if seen.insert(p.id.clone(), (id, p.kappa)).is_some() {
                return Err(Error::InvalidInput(format!("`{}` listed twice", p.id)));
            }
        }
        KData::new(self.m, seen.into_values())
    }
}

impl EtaleFile {
    pub fn resolve(&self, k: &KData) -> Result<EtaleData> {
        let by_label: BTreeMap<&str, &PlaceId> = k.kappa.keys().map(|p| (p.label(), p)).collect();
        let mut places = BTreeMap::new();
        for p in &self.places {
            let id = *by_label
                .get(p.id.as_str())
                .ok_or_else(|| Error::UnknownPlace(p.id.clone()))?;
            let factors = p
                .factors
                .iter()
                .map(|f| match (f, id.kind()) {
                    (FactorFile::Finite { e, f }, PlaceKind::Finite) => {
                        Ok(SplittingFactor::Finite { e: *e, f: *f })
                    }
                    (FactorFile::Arch(s), PlaceKind::Real) if s == "R" => {
                        Ok(SplittingFactor::RealOverReal)
                    }
                    (FactorFile::Arch(s), PlaceKind::Real) if s == "C" => {
                        Ok(SplittingFactor::ComplexOverReal)
                    }
                    (FactorFile::Arch(s), PlaceKind::Complex) if s == "C" => {
                        Ok(SplittingFactor::ComplexOverComplex)
                    }
                    _ => Err(Error::InvalidInput(format!(
                        "bad factor {f:?} at `{}`",
                        p.id
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            if places.insert(id.clone(), factors).is_some() {
                return Err(Error::InvalidInput(format!("`{}` listed twice", p.id)));
            }
        }
        EtaleData::new(self.d, places)
    }
}

impl From<&EtaleData> for EtaleFile {
    fn from(e: &EtaleData) -> Self {
        Self {
            d: e.d,
            places: e
                .places
                .iter()
                .map(|(v, fs)| EtalePlaceFile {
                    id: v.label().to_string(),
                    factors: fs
                        .iter()
                        .map(|f| match *f {
                            SplittingFactor::Finite { e, f } => FactorFile::Finite { e, f },
                            SplittingFactor::RealOverReal => FactorFile::Arch("R".into()),
                            _ => FactorFile::Arch("C".into()),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl OuterFile {
    pub fn from_json(text: &str) -> Result<(KData, EtaleData, BigUint)> {
        let file: OuterFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let k = file.k.resolve()?;
        let e = file.e.resolve(&k)?;
        Ok((k, e, BigUint::from(file.disc)))
    }
}
