//! Rational helpers shared by every module.

use num::{BigInt, BigRational, One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(k: u32) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    f
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
pub fn falling(a: u32, k: u32) -> BigInt {
    if k > a {
        return BigInt::zero();
    }
    let mut f = BigInt::one();
    for i in 0..k {
        f *= a - i;
    }
    f
}

pub fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Prints `p/q`, or the integer when the denominator is one.
pub fn fmt_q(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn add_into<K: Ord>(map: &mut std::collections::BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let c = Q::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(fmt_q(&c), "-3/2");
        assert_eq!(fmt_q(&q(5)), "5");
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(falling(5, 2), BigInt::from(20));
        assert_eq!(falling(1, 2), BigInt::from(0));
    }
}
