//! Ramanujan sums `g_χ(q)`: the sum of `e(χ (M/q) λ' / M)` over units `λ'`
//! modulo `q`, i.e. the classical sum `c_q(χ)`.

use crate::arith::{gcd, moebius, totient};
use crate::error::{Error, Result};
use crate::residue::Residue;

/// Closed form `μ(q/k) φ(q) / φ(q/k)` with `k = gcd(χ, q)`.
pub fn ramanujan_g(chi: Residue, q: u64) -> Result<i64> {
    if q == 0 || chi.modulus() % q != 0 {
        return Err(Error::NotADivisor(q, chi.modulus()));
    }
    let k = gcd(chi.value(), q);
    let r = q / k;
    Ok(moebius(r) * (totient(q) / totient(r)) as i64)
}
