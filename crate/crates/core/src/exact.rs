//! Exact scalars and the binomial combinatorics used everywhere else.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator after every operation. Its text form is `p/q`, with a
//! leading minus for negatives and the denominator dropped when it is one.

use std::str::FromStr;

pub use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Canonical `p/q` text form.
pub fn format_rational(x: &Rational) -> String {
    // Ratio's Display already prints `p` for integers and `p/q` otherwise.
    x.to_string()
}

/// Parses `p`, `-p`, `p/q` or `-p/q`. Whitespace, a signed denominator and a
/// zero denominator are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let unsigned = num.strip_prefix('-').unwrap_or(num);
    if !digits(unsigned) {
        return Err(err());
    }
    let numer = BigInt::from_str(num).map_err(|_| err())?;
    let denom = match den {
        None => BigInt::one(),
        Some(d) if digits(d) => BigInt::from_str(d).map_err(|_| err())?,
        Some(_) => return Err(err()),
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

/// Binomial coefficient `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binom(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n, k)` with a possibly negative `n`, following the convention that the
/// coefficient vanishes whenever `n < 0`. Used for `C(r - 1, n - 1)` at `r = 0`.
fn binom_signed(n: i64, k: i64) -> BigInt {
    if n < 0 {
        BigInt::zero()
    } else {
        binom(n as u64, k)
    }
}

fn parity_sign(e: u64) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Tail of the alternating binomial sum, `sum_{j=n}^{r} (-1)^j C(r, j)`,
/// evaluated through the closed form `(-1)^n C(r - 1, n - 1)`.
///
/// At `r = n = 0` the sum is `1`, which the closed form cannot express; that
/// single point is returned directly.
pub fn alt_binom_tail(r: u64, n: i64) -> Result<BigInt> {
    if n < 0 || n as u64 > r {
        return Err(Error::IndexOutOfRange { i: n, lo: 0, hi: r as i64 });
    }
    if r == 0 {
        return Ok(BigInt::one());
    }
    Ok(parity_sign(n as u64) * binom_signed(r as i64 - 1, n - 1))
}

/// `(-1)^e` as a rational.
pub(crate) fn sign_pow(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub(crate) fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub(crate) fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && x <= &Rational::one()
}
