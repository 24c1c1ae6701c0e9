//! Small-integer number theory used throughout: divisors, Möbius, totient,
//! prime sieving and trial factorization.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0, "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= n {
        if n % k == 0 {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization as `(prime, exponent)` pairs, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn smallest_prime_factor(n: u64) -> Option<u64> {
    factorize(n).first().map(|&(p, _)| p)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All primes `<= limit` (sieve of Eratosthenes over odd numbers).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // index i stands for 2i + 1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut k = p * p / 2;
            while k < half {
                composite[k] = true;
                k += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2u64];
    out.extend(
        (1..half)
            .filter(|&i| !composite[i] && 2 * i < limit)
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1 % m;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Kronecker symbol `(D / p)` for a prime `p`.
pub fn kronecker_prime(d: i64, p: u64) -> i8 {
    if p == 2 {
        return match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => 0,
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |n: u64| factorize(n).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let k = d / 4;
            matches!(k.rem_euclid(4), 2 | 3) && squarefree(k.unsigned_abs())
        }
        _ => false,
    }
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}
