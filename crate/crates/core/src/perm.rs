//! Finite permutation groups given by generators, and the class functions
//! on them that drive the counting exponents.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::analytic::ramanujan::ramanujan_g;
use crate::arith::{gcd, lcm, smallest_prime_factor};
use crate::error::{Error, Result};
use crate::residue::{divisor_divides, Residue};
use crate::Q;

/// Default cap on the order of a group built by [`GroupTable::closure`].
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A bijection of `{0, …, d-1}`. Input and output use 1-based images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self {
            image: (0..d as u32).collect(),
        }
    }

    /// Builds a permutation from a 1-based image array.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        let mut image = Vec::with_capacity(d);
        for &x in images {
            if x == 0 || x > d || seen[x - 1] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x - 1] = true;
            image.push((x - 1) as u32);
        }
        Ok(Self { image })
    }

    /// Builds a permutation of degree `d` from disjoint 1-based cycles.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=d).collect();
        let mut touched = vec![false; d + 1];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d || touched[x] {
                    return Err(Error::NotAPermutation(format!("{cycles:?}")));
                }
                touched[x] = true;
                images[x - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        Self::from_images(&images)
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x] as usize
    }

    /// 1-based image array.
    pub fn images(&self) -> Vec<usize> {
        self.image.iter().map(|&x| x as usize + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            image: other
                .image
                .iter()
                .map(|&x| self.image[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            image[x as usize] = i as u32;
        }
        Self { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Orbit sizes, largest first (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Gcd of the orbit sizes.
    pub fn cycgcd(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(0, |g, len| gcd(g, len as u64))
            .max(1)
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1, |l, len| lcm(l, len as u64))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, 1-based; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut wrote = false;
        for start in 0..d {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut x = start;
            write!(f, "(")?;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    /// Index into [`GroupTable::elements`].
    pub representative: usize,
    pub members: Vec<usize>,
    pub cycle_type: Vec<usize>,
    pub cycgcd: u64,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// All elements of a permutation group, partitioned into conjugacy classes.
#[derive(Debug, Clone)]
pub struct GroupTable {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
    transitive: bool,
}

impl GroupTable {
    pub fn closure(generators: &[Permutation], degree: usize) -> Result<Self> {
        Self::closure_with_cap(generators, degree, DEFAULT_GROUP_CAP)
    }

    pub fn closure_with_cap(generators: &[Permutation], degree: usize, cap: usize) -> Result<Self> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        let gens: Vec<Permutation> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();

        let identity = Permutation::identity(degree);
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        let mut elements = vec![identity.clone()];
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let h = elements[i].compose(g);
                if !index.contains_key(&h) {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge { cap });
                    }
                    index.insert(h.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(h);
                }
            }
        }

        // conjugation orbits under the generators are the full classes
        let inverses: Vec<Permutation> = gens.iter().map(Permutation::inverse).collect();
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut classes = Vec::new();
        for start in 0..elements.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class_of[start] = c;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (g, gi) in gens.iter().zip(&inverses) {
                    let h = g.compose(&elements[i]).compose(gi);
                    let k = index[&h];
                    if class_of[k] == usize::MAX {
                        class_of[k] = c;
                        members.push(k);
                        queue.push_back(k);
                    }
                }
            }
            members.sort_unstable();
            let rep = &elements[start];
            classes.push(ConjugacyClass {
                representative: start,
                cycle_type: rep.cycle_type(),
                cycgcd: rep.cycgcd(),
                members,
            });
        }

        let transitive = degree <= 1 || {
            let mut seen = vec![false; degree];
            seen[0] = true;
            let mut stack = vec![0usize];
            while let Some(x) = stack.pop() {
                for g in &gens {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };

        Ok(Self {
            degree,
            generators: gens,
            elements,
            classes,
            class_of,
            transitive,
        })
    }

    /// The trivial group acting on a single point.
    pub fn trivial() -> Self {
        Self::closure(&[], 1).expect("trivial group")
    }

    /// The full symmetric group of degree 2.
    pub fn s2() -> Self {
        Self::closure(&[Permutation::from_images(&[2, 1]).unwrap()], 2).expect("S2")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    /// First class (in table order) whose cycle type matches.
    pub fn class_with_cycle_type(&self, cycle_type: &[usize]) -> Option<usize> {
        let mut want = cycle_type.to_vec();
        want.sort_unstable_by(|a, b| b.cmp(a));
        self.classes.iter().position(|c| c.cycle_type == want)
    }

    /// Class index of the identity.
    pub fn identity_class(&self) -> usize {
        self.class_of[0]
    }
}

/// The quantities `U`, `u`, `β` and the average cycgcd of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantsBundle {
    pub big_u: u64,
    pub u: u64,
    pub beta: Q,
    pub avg_cycgcd: Q,
}

pub fn invariants_bundle(group: &GroupTable, j: u64) -> Result<InvariantsBundle> {
    let big_u = group.classes.iter().fold(1, |acc, c| lcm(acc, c.cycgcd));
    if big_u * j == 1 {
        return Err(Error::TrivialExtension);
    }
    let u = smallest_prime_factor(big_u * j).expect("Uj >= 2");
    let order = group.order() as i64;
    let mut hits = 0i64;
    let mut total = 0i64;
    for c in &group.classes {
        if (j * c.cycgcd) % u == 0 {
            hits += c.size() as i64;
        }
        total += c.size() as i64 * c.cycgcd as i64;
    }
    Ok(InvariantsBundle {
        big_u,
        u,
        beta: Q::new(hits, order),
        avg_cycgcd: Q::new(total, order),
    })
}

/// Which Dirichlet series a class function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Disc,
    Ram,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" => Ok(Metric::Disc),
            "ram" => Ok(Metric::Ram),
            other => Err(Error::Parse(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Disc => "disc",
            Metric::Ram => "ram",
        })
    }
}

/// Degrees `d`, `m`, `j` of the setup together with `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsiParams {
    pub d: u64,
    pub m: u64,
    pub j: u64,
    pub u: u64,
}

impl PsiParams {
    pub fn modulus(&self) -> u64 {
        self.d * self.m * self.j
    }
}

/// An exact rational value on each conjugacy class of a group.
#[derive(Debug, Clone)]
pub struct ClassFunction {
    group: Arc<GroupTable>,
    values: Vec<Q>,
}

impl ClassFunction {
    pub fn new(group: Arc<GroupTable>, values: Vec<Q>) -> Result<Self> {
        if values.len() != group.classes().len() {
            return Err(Error::InvalidInput(format!(
                "class function needs {} values, got {}",
                group.classes().len(),
                values.len()
            )));
        }
        Ok(Self { group, values })
    }

    pub fn constant(group: Arc<GroupTable>, c: Q) -> Self {
        let values = vec![c; group.classes().len()];
        Self { group, values }
    }

    /// `ψ_{τ,χ}` (disc) or `ψ*_{τ,χ}` (ram).
    pub fn psi(
        group: Arc<GroupTable>,
        params: PsiParams,
        metric: Metric,
        tau: u64,
        chi: Residue,
    ) -> Result<Self> {
        let big_m = params.modulus();
        if tau == 0 || big_m % tau != 0 {
            return Err(Error::NotADivisor(tau, big_m));
        }
        if chi.modulus() != big_m {
            return Err(Error::ModulusMismatch {
                left: chi.modulus(),
                right: big_m,
            });
        }
        let dm = params.d * params.m;
        let values = group
            .classes()
            .iter()
            .map(|c| {
                let eta = lcm(dm / c.cycgcd, tau);
                match metric {
                    Metric::Disc => {
                        if (big_m / params.u) % eta == 0 {
                            Ok(Q::from_integer(ramanujan_g(chi, params.u)?))
                        } else {
                            Ok(Q::from_integer(0))
                        }
                    }
                    Metric::Ram => {
                        let k = gcd(params.j * c.cycgcd, big_m / tau);
                        if divisor_divides(k, chi)? {
                            Ok(Q::from_integer(k as i64 - 1))
                        } else {
                            Ok(Q::from_integer(-1))
                        }
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { group, values })
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn value_on_class(&self, class: usize) -> Q {
        self.values[class]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Inner product with the trivial character.
    pub fn avg(&self) -> Q {
        let total: Q = self
            .group
            .classes()
            .iter()
            .zip(&self.values)
            .map(|(c, v)| v * Q::from_integer(c.size() as i64))
            .sum();
        total / Q::from_integer(self.group.order() as i64)
    }
}

/// Draws up to four random permutations of degree `d`, closes them, and
/// retries until the result is transitive.
pub fn random_transitive_group<R: Rng>(d: usize, rng: &mut R) -> GroupTable {
    loop {
        let k = rng.random_range(1..=4);
        let gens: Vec<Permutation> = (0..k)
            .map(|_| {
                let mut image: Vec<usize> = (1..=d).collect();
                for i in (1..d).rev() {
                    let j = rng.random_range(0..=i);
                    image.swap(i, j);
                }
                Permutation::from_images(&image).unwrap()
            })
            .collect();
        let g = GroupTable::closure(&gens, d).expect("degree at most 7 stays under the cap");
        if g.is_transitive() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyc(d: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(d, cycles).unwrap()
    }

    fn a4_sextic() -> GroupTable {
        GroupTable::closure(
            &[
                cyc(6, &[&[1, 4], &[2, 5]]),
                cyc(6, &[&[1, 3, 5], &[2, 4, 6]]),
            ],
            6,
        )
        .unwrap()
    }

    #[test]
    fn cycgcd_examples() {
        assert_eq!(Permutation::identity(6).cycgcd(), 1);
        assert_eq!(cyc(6, &[&[1, 3, 5], &[2, 4, 6]]).cycgcd(), 3);
        assert_eq!(cyc(6, &[&[1, 4], &[2, 5]]).cycgcd(), 1);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(&[1, 1]).is_err());
        assert!(Permutation::from_images(&[0, 1]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 2], &[2, 3]]).is_err());
    }

    #[test]
    fn display_uses_cycles() {
        assert_eq!(
            cyc(6, &[&[1, 3, 5], &[2, 4, 6]]).to_string(),
            "(1 3 5)(2 4 6)"
        );
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }

    #[test]
    fn closure_examples() {
        let s2 = GroupTable::s2();
        assert_eq!(s2.order(), 2);
        assert_eq!(s2.classes().len(), 2);
        assert!(s2.is_transitive());

        let g = a4_sextic();
        assert_eq!(g.order(), 12);
        let mut sizes: Vec<usize> = g.classes().iter().map(|c| c.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 4, 4]);
        assert!(g.is_transitive());

        let h = GroupTable::closure(&[cyc(3, &[&[1, 2]])], 3).unwrap();
        assert!(!h.is_transitive());
    }

    #[test]
    fn closure_errors() {
        assert!(matches!(
            GroupTable::closure(&[Permutation::identity(3)], 4),
            Err(Error::DegreeMismatch { .. })
        ));
        let s4 = [cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])];
        assert!(matches!(
            GroupTable::closure_with_cap(&s4, 4, 10),
            Err(Error::GroupTooLarge { cap: 10 })
        ));
    }

    #[test]
    fn bundle_examples() {
        let b = invariants_bundle(&GroupTable::s2(), 1).unwrap();
        assert_eq!((b.big_u, b.u, b.beta), (2, 2, Q::new(1, 2)));

        let b = invariants_bundle(&a4_sextic(), 1).unwrap();
        assert_eq!((b.big_u, b.u, b.beta), (3, 3, Q::new(2, 3)));

        let b = invariants_bundle(&GroupTable::trivial(), 2).unwrap();
        assert_eq!((b.big_u, b.u, b.beta), (1, 2, Q::from_integer(1)));

        assert!(matches!(
            invariants_bundle(&GroupTable::trivial(), 1),
            Err(Error::TrivialExtension)
        ));
    }

    fn params(d: u64, m: u64, j: u64, u: u64) -> PsiParams {
        PsiParams { d, m, j, u }
    }

    #[test]
    fn psi_examples() {
        let g = Arc::new(GroupTable::trivial());
        let p = params(1, 1, 2, 2);
        let z = Residue::zero(2);
        let psi = ClassFunction::psi(g.clone(), p, Metric::Disc, 1, z).unwrap();
        assert!(psi.is_constant());
        assert_eq!(psi.avg(), Q::from_integer(1));
        let psi = ClassFunction::psi(g.clone(), p, Metric::Disc, 2, z).unwrap();
        assert_eq!(psi.avg(), Q::from_integer(0));
        let psi = ClassFunction::psi(g.clone(), p, Metric::Ram, 1, z).unwrap();
        assert_eq!(psi.avg(), Q::from_integer(1));
        assert!(ClassFunction::psi(g, p, Metric::Disc, 3, z).is_err());
    }

    #[test]
    fn avg_examples() {
        let g = Arc::new(GroupTable::s2());
        let c = ClassFunction::constant(g.clone(), Q::new(5, 3));
        assert_eq!(c.avg(), Q::new(5, 3));
        let p = params(2, 1, 1, 2);
        let psi0 = ClassFunction::psi(g.clone(), p, Metric::Disc, 1, Residue::new(0, 2)).unwrap();
        assert_eq!(psi0.avg(), Q::new(1, 2));
        let psi1 = ClassFunction::psi(g, p, Metric::Disc, 1, Residue::new(1, 2)).unwrap();
        assert_eq!(psi1.avg(), Q::new(-1, 2));
    }

    /// Brute-force `ψ*` from its defining character sum.
    fn psi_star_oracle(big_m: u64, eta: u64, chi: u64) -> i64 {
        let mut re = 0.0f64;
        for lam in (eta..big_m).step_by(eta as usize) {
            re += (2.0 * std::f64::consts::PI * (chi * lam) as f64 / big_m as f64).cos();
        }
        re.round() as i64
    }

    #[test]
    fn psi_star_matches_character_sum() {
        let g = Arc::new(a4_sextic());
        for (m, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let b = invariants_bundle(&g, j).unwrap();
            let p = params(6, m, j, b.u);
            let big_m = p.modulus();
            for tau in crate::arith::divisors(big_m) {
                for chi in 0..big_m {
                    let psi = ClassFunction::psi(
                        g.clone(),
                        p,
                        Metric::Ram,
                        tau,
                        Residue::new(chi, big_m),
                    )
                    .unwrap();
                    for (k, c) in g.classes().iter().enumerate() {
                        let eta = lcm(6 * m / c.cycgcd, tau);
                        assert_eq!(
                            psi.value_on_class(k),
                            Q::from_integer(psi_star_oracle(big_m, eta, chi))
                        );
                    }
                }
            }
        }
    }

    fn check_group(g: &GroupTable) -> std::result::Result<(), TestCaseError> {
        let d = g.degree() as u64;
        let sizes: usize = g.classes().iter().map(|c| c.size()).sum();
        prop_assert_eq!(sizes, g.order());
        for (i, e) in g.elements().iter().enumerate() {
            prop_assert_eq!(d % e.cycgcd(), 0);
            prop_assert_eq!(e.cycgcd(), g.classes()[g.class_of(i)].cycgcd);
        }
        let b = invariants_bundle(g, 1).unwrap();
        prop_assert!(b.big_u >= 2);
        if g.order() as u64 == d {
            let exponent = g.elements().iter().fold(1, |l, e| lcm(l, e.order()));
            prop_assert_eq!(b.big_u, exponent);
            for e in g.elements() {
                prop_assert_eq!(e.cycgcd(), e.order());
            }
        }
        let f = crate::arith::factorize(d);
        if f.len() == 1 {
            prop_assert_eq!(
                crate::arith::factorize(b.big_u),
                vec![(f[0].0, crate::arith::factorize(b.big_u)[0].1)]
            );
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_transitive_groups(d in 2usize..=7, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_transitive_group(d, &mut rng);
            check_group(&g)?;
        }

        #[test]
        fn psi_averages_never_exceed_target(d in 2usize..=5, m in 1u64..=2, j in 1u64..=3, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = Arc::new(random_transitive_group(d, &mut rng));
            let b = invariants_bundle(&g, j).unwrap();
            let p = params(d as u64, m, j, b.u);
            let big_m = p.modulus();
            let top = Q::from_integer(b.u as i64 - 1) * b.beta;
            for tau in crate::arith::divisors(big_m) {
                for chi in 0..big_m {
                    let psi = ClassFunction::psi(g.clone(), p, Metric::Disc, tau, Residue::new(chi, big_m)).unwrap();
                    let a = psi.avg();
                    prop_assert!(a <= top);
                    if tau == 1 {
                        if chi % b.u == 0 {
                            prop_assert_eq!(a, top);
                        } else {
                            prop_assert_eq!(a, -b.beta);
                        }
                    }
                }
            }
            let star = ClassFunction::psi(g.clone(), p, Metric::Ram, 1, Residue::zero(big_m)).unwrap();
            prop_assert_eq!(star.avg(), Q::from_integer(j as i64) * b.avg_cycgcd - Q::from_integer(1));
        }
    }
}
