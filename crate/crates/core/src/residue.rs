//! Elements of `Z/MZ` with ideal-divisibility semantics.
//!
//! Local invariants, twisting parameters and character indices all live in a
//! cyclic group `Z/MZ`, which we view as the subgroup of `Q/Z` of elements of
//! order dividing `M`. Divisibility statements about residues are statements
//! about the principal ideals they generate: `a | b` means `(b) ⊆ (a)`, i.e.
//! `gcd(ã, M)` divides any representative `b̃`. Such gcds are always reported
//! as positive divisors of `M`, never as residues.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `value` into `[0, modulus)`.
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_signed(value: i128, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Self {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Self::new(0, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::new(
            ((self.value as u128 + other.value as u128) % self.modulus as u128) as u64,
            self.modulus,
        ))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::from_signed(
            self.value as i128 - other.value as i128,
            self.modulus,
        ))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self::from_signed(-(self.value as i128), self.modulus)
    }

    /// Integer multiple `k · self`.
    pub fn scale(self, k: u64) -> Self {
        Self::new(
            ((self.value as u128 * k as u128) % self.modulus as u128) as u64,
            self.modulus,
        )
    }

    /// The positive divisor of `M` generating the same ideal as `self`.
    /// Zero generates the zero ideal, so its gcd is `M` itself.
    pub fn gcd_with_modulus(self) -> u64 {
        gcd(self.value, self.modulus)
    }

    /// `self | other` in the ideal sense.
    pub fn divides(self, other: Self) -> Result<bool> {
        self.same_modulus(other)?;
        Ok(other.value % self.gcd_with_modulus() == 0)
    }

    /// Additive order, `M / gcd(M, a)`.
    pub fn element_order(self) -> u64 {
        self.modulus / self.gcd_with_modulus()
    }

    pub fn to_qz(self) -> QZFraction {
        let g = self.gcd_with_modulus();
        QZFraction {
            numerator: self.value / g,
            denominator: self.modulus / g,
        }
    }
}

/// Whether the positive divisor `t` of `M` divides the residue `b`.
pub fn divisor_divides(t: u64, b: Residue) -> Result<bool> {
    if t == 0 || b.modulus() % t != 0 {
        return Err(Error::NotADivisor(t, b.modulus()));
    }
    Ok(b.value() % t == 0)
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// A reduced fraction `a/q` in `[0, 1)`, standing for an element of `Q/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QZFraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl fmt::Display for QZFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(v: u64, m: u64) -> Residue {
        Residue::new(v, m)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(r(4, 6).gcd_with_modulus(), 2);
        assert_eq!(r(0, 6).gcd_with_modulus(), 6);
        assert_eq!(r(3, 12).gcd_with_modulus(), 3);
    }

    #[test]
    fn divides_examples() {
        assert!(r(4, 6).divides(r(2, 6)).unwrap());
        assert!(!r(4, 6).divides(r(1, 6)).unwrap());
        assert!(divisor_divides(2, r(4, 6)).unwrap());
        assert!(matches!(
            r(1, 6).divides(r(1, 4)),
            Err(Error::ModulusMismatch { .. })
        ));
        assert!(divisor_divides(4, r(1, 6)).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(r(2, 6).element_order(), 3);
        assert_eq!(r(0, 7).element_order(), 1);
        assert_eq!(r(3, 12).element_order(), 4);
    }

    #[test]
    fn qz_examples() {
        assert_eq!(
            r(2, 6).to_qz(),
            QZFraction {
                numerator: 1,
                denominator: 3
            }
        );
        assert_eq!(
            r(0, 6).to_qz(),
            QZFraction {
                numerator: 0,
                denominator: 1
            }
        );
        assert_eq!(
            r(3, 12).to_qz(),
            QZFraction {
                numerator: 1,
                denominator: 4
            }
        );
    }

    #[test]
    fn canonical_storage() {
        assert_eq!(r(8, 6), r(2, 6));
        assert_eq!(Residue::from_signed(-1, 6), r(5, 6));
        assert_eq!(r(5, 6).neg(), r(1, 6));
    }

    proptest! {
        #[test]
        fn order_times_gcd_is_modulus(m in 1u64..500, v in 0u64..10_000) {
            let a = r(v, m);
            prop_assert_eq!(a.element_order() * a.gcd_with_modulus(), m);
            prop_assert_eq!(a.to_qz().denominator, a.element_order());
        }

        #[test]
        fn qz_is_injective(m in 1u64..200, a in 0u64..200, b in 0u64..200) {
            let (x, y) = (r(a, m), r(b, m));
            prop_assert_eq!(x == y, x.to_qz() == y.to_qz());
        }

        #[test]
        fn divisibility_is_a_preorder(m in 1u64..120, a in 0u64..120, b in 0u64..120, c in 0u64..120) {
            let (x, y, z) = (r(a, m), r(b, m), r(c, m));
            prop_assert!(x.divides(x).unwrap());
            if x.divides(y).unwrap() && y.divides(z).unwrap() {
                prop_assert!(x.divides(z).unwrap());
            }
            // compatible with the divisor lattice of M
            prop_assert_eq!(
                x.divides(y).unwrap(),
                y.gcd_with_modulus() % x.gcd_with_modulus() == 0
            );
        }
    }
}
