//! Exact sums of `M`-th roots of unity as elements of `Z[Z/MZ]`.
//!
//! Basis vector `k` stands for `e(k/M)`. Two vectors name the same complex
//! number exactly when their difference vanishes modulo the cyclotomic
//! polynomial `Φ_M`, which is how rationality is decided.

use crate::arith::divisors;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    coeffs: Vec<i128>,
}

impl GroupRingElement {
    pub fn zero(modulus: u64) -> Self {
        assert!(modulus >= 1);
        Self {
            coeffs: vec![0; modulus as usize],
        }
    }

    /// `e(k/M)`.
    pub fn root(k: u64, modulus: u64) -> Self {
        let mut out = Self::zero(modulus);
        out.coeffs[(k % modulus) as usize] = 1;
        out
    }

    pub fn from_integer(n: i128, modulus: u64) -> Self {
        let mut out = Self::zero(modulus);
        out.coeffs[0] = n;
        out
    }

    pub fn modulus(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Adds `c · e(k/M)`.
    pub fn add_root(&mut self, k: u64, c: i128) {
        let m = self.coeffs.len();
        self.coeffs[(k as usize) % m] += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus());
        let m = self.coeffs.len();
        let mut out = vec![0i128; m];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[(i + j) % m] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The integer this element equals, if it is rational.
    pub fn to_integer(&self) -> Option<i128> {
        let rem = reduce_mod(&self.coeffs, &cyclotomic(self.modulus()));
        if rem.iter().skip(1).all(|&c| c == 0) {
            Some(rem.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    /// Complex value, for diagnostics.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.coeffs.len() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, &c)| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m;
                (re + c as f64 * t.cos(), im + c as f64 * t.sin())
            })
    }
}

/// Coefficients of `Φ_n`, constant term first.
pub fn cyclotomic(n: u64) -> Vec<i128> {
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            num = exact_div(&num, &cyclotomic(d));
        }
    }
    num
}

fn exact_div(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = *den.last().expect("nonempty");
    debug_assert_eq!(lead, 1);
    let mut quot = vec![0i128; rem.len() + 1 - dl];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1];
        quot[i] = c;
        for (k, &dk) in den.iter().enumerate() {
            rem[i + k] -= c * dk;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Remainder modulo a monic polynomial.
fn reduce_mod(poly: &[i128], modulus: &[i128]) -> Vec<i128> {
    let dl = modulus.len();
    let mut rem = poly.to_vec();
    if rem.len() < dl {
        return rem;
    }
    for i in (dl - 1..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        for (k, &mk) in modulus.iter().enumerate() {
            rem[i + 1 - dl + k] -= c * mk;
        }
    }
    rem.truncate(dl - 1);
    rem
}
