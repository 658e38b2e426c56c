//! Exact rational arithmetic helpers.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `p/q` from machine integers.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `1 / n!`
pub fn inv_factorial(n: u32) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::new(BigInt::one(), f)
}

/// `1 / 2^n`
pub fn inv_pow2(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2u8).pow(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a scaled division for huge components
        let num = r.numer().to_f64().unwrap_or(f64::MAX);
        let den = r.denom().to_f64().unwrap_or(f64::MAX);
        num / den
    })
}

/// Smallest dyadic rational with denominator `2^48` that is >= `x`.
/// Used to turn floating-point Lipschitz estimates into exact budgets.
pub fn dyadic_ceil(x: f64) -> Rational {
    assert!(x.is_finite() && x >= 0.0, "dyadic_ceil needs a finite nonnegative input");
    let scale = (1u64 << 48) as f64;
    let scaled = (x * scale).ceil();
    Rational::new(
        BigInt::from(scaled as u128),
        BigInt::from(1u128 << 48),
    )
}

/// Parses `p/q`, `p`, or a plain decimal like `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let whole: BigInt = whole.parse().ok()?;
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let den = BigInt::from(10u8).pow(frac.len() as u32);
        let num: BigInt = frac.parse().ok()?;
        let abs = Rational::new(whole.abs(), BigInt::one())
            + Rational::new(num, den);
        return Some(if sign < 0 { -abs } else { abs });
    }
    let p: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(p))
}

/// Renders as `p/q` (or `p` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
