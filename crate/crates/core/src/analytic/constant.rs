//! Leading constants of `N(X) ~ C X^{1/a} (log X)^{b-1}` when every
//! contributing class function is constant.

use serde::Serialize;
use statrs::function::gamma::gamma;

use super::euler::factor_terms;
use super::exponents::{exponents_inner, ser_q};
use crate::arith::{divisors, gcd, lcm, moebius};
use crate::census::{completions, LocalConstraint};
use crate::error::{Error, Result};
use crate::perm::{ClassFunction, Metric, PsiParams};
use crate::residue::Residue;
use crate::setup::FieldSetup;
use crate::Q;

#[derive(Debug, Clone, Serialize)]
pub struct ConstantReport {
    #[serde(rename = "C")]
    pub c: f64,
    pub error_bound: f64,
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub contributing_chi: Vec<u64>,
    pub tau: u64,
    pub p_max: u64,
}

/// `f̃_{S,τ,χ}(1)` for one χ, with a bound on the relative truncation error.
#[allow(clippy::too_many_arguments)]
fn f_tilde(
    setup: &FieldSetup,
    constraint_places: &[u64],
    generic: &[(u64, u64)],
    chi: Residue,
    psi: i64,
    a: f64,
    p_max: u64,
    residue: f64,
) -> Result<(f64, f64)> {
    let big_m = setup.modulus();
    let psi_f = psi as f64;
    let s_part: f64 = constraint_places
        .iter()
        .map(|&n| 1.0 - 1.0 / n as f64)
        .product();
    let mut value = (residue * s_part).powf(psi_f);
    let mut k = psi_f * psi_f + psi_f.abs();
    let mut eps = 1.0f64;
    let mut seen = std::collections::BTreeSet::new();
    // fixed ascending order keeps the float product reproducible
    for &(norm, eta) in generic {
        let terms = factor_terms(big_m, eta, chi, Metric::Disc)?;
        let n = norm as f64;
        let f: f64 = 1.0
            + terms
                .iter()
                .map(|&(e, c)| c as f64 * n.powf(-(e as f64) / a))
                .sum::<f64>();
        value *= f * (1.0 - 1.0 / n).powf(psi_f);
        if seen.insert(eta) {
            for &(e, c) in terms.iter().skip(1) {
                k += 2.0 * (c as f64).abs();
                eps = eps.min(e as f64 / a - 1.0);
            }
        }
    }
    let tail = k * (p_max as f64).powf(-eps) / eps;
    Ok((value, tail.exp_m1()))
}

/// `C_{S,ξ,τ}`, summed over every admissible extension of `ξ` to the
/// exceptional places, with the Euler product cut at `p_max`.
pub fn leading_constant(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    p_max: u64,
) -> Result<ConstantReport> {
    if setup.is_stochastic() {
        return Err(Error::StochasticRejected("a leading constant"));
    }
    constraint.check(setup)?;
    let exps = exponents_inner(setup)?;
    let residue = setup.zeta_residue().ok_or_else(|| {
        Error::InvalidSetup("the residue of the zeta function at 1 is required".into())
    })?;
    let big_m = setup.modulus();
    let tau = constraint.tau;
    let target = Q::from_integer(exps.u as i64 - 1) * exps.beta;
    let params = PsiParams {
        d: setup.d(),
        m: setup.m(),
        j: setup.j(),
        u: exps.u,
    };
    let mut contributing = Vec::new();
    for chi in 0..big_m {
        let psi = ClassFunction::psi(
            setup.group().clone(),
            params,
            Metric::Disc,
            tau,
            Residue::new(chi, big_m),
        )?;
        if psi.avg() == target {
            if !psi.is_constant() {
                return Err(Error::Unsupported(format!(
                    "psi for chi = {chi} is not constant on G; its constant needs Artin L-values"
                )));
            }
            contributing.push((chi, *psi.value_on_class(0).numer()));
        }
    }
    let mut report = ConstantReport {
        c: 0.0,
        error_bound: 0.0,
        a: exps.a,
        b: exps.b,
        contributing_chi: contributing.iter().map(|c| c.0).collect(),
        tau,
        p_max,
    };
    let full = completions(setup, constraint)?;
    if contributing.is_empty() || full.is_empty() {
        return Ok(report);
    }
    let a = *exps.a.numer() as f64 / *exps.a.denom() as f64;
    let b = *exps.b.numer() as f64 / *exps.b.denom() as f64;

    // every completion lives on the same set S ∪ 𝒫^ex
    let s_places: Vec<u64> = full[0].places().filter_map(|p| p.norm()).collect();
    let dm = setup.d() * setup.m();
    let generic: Vec<(u64, u64)> = setup
        .generic_places_up_to(p_max)?
        .into_iter()
        .filter(|(p, _)| !full[0].contains(p))
        .map(|(p, class)| {
            let eta = lcm(dm / setup.group().classes()[class].cycgcd, tau);
            (p.norm().expect("finite"), eta)
        })
        .collect();

    let mut tilde = std::collections::BTreeMap::new();
    for &(chi, psi) in &contributing {
        let k = gcd(chi, big_m);
        if let std::collections::btree_map::Entry::Vacant(slot) = tilde.entry(k) {
            let v = f_tilde(
                setup,
                &s_places,
                &generic,
                Residue::new(chi, big_m),
                psi,
                a,
                p_max,
                residue,
            )?;
            slot.insert(v);
        }
    }
    let prefactor = 1.0 / (a.powf(b - 1.0) * gamma(b)) / big_m as f64;
    for xi in &full {
        let weight = prefactor * (-xi.disc(big_m).ln() / a).exp();
        let sigma = xi.sigma(big_m);
        let mut re = 0.0;
        let mut err = 0.0;
        for &(chi, _) in &contributing {
            let (v, rel) = tilde[&gcd(chi, big_m)];
            let angle = 2.0 * std::f64::consts::PI * ((chi * sigma) % big_m) as f64 / big_m as f64;
            re += angle.cos() * v;
            err += v.abs() * rel;
        }
        report.c += weight * re;
        report.error_bound += weight * err;
    }
    Ok(report)
}

/// `C' = Σ_{τ | M} μ(τ) C_{S,ξ,τ}`, the constant for skew fields.
pub fn moebius_sieve_constant(
    setup: &FieldSetup,
    constraint: &LocalConstraint,
    p_max: u64,
) -> Result<ConstantReport> {
    let mut out: Option<ConstantReport> = None;
    for tau in divisors(setup.modulus()) {
        let mu = moebius(tau);
        if mu == 0 {
            continue;
        }
        let r = leading_constant(setup, &constraint.with_tau(tau), p_max)?;
        match out.as_mut() {
            None => {
                let mut r = r;
                r.c *= mu as f64;
                r.tau = 0;
                out = Some(r);
            }
            Some(acc) => {
                acc.c += mu as f64 * r.c;
                acc.error_bound += r.error_bound;
            }
        }
    }
    Ok(out.expect("1 divides M"))
}
