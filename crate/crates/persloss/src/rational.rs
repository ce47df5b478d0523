//! Exact rational scalars used for flow breakpoints, distances and losses.
//!
//! Everything in this crate that measures "how far to flow" is a
//! non-negative rational; using exact arithmetic keeps every distance and
//! loss value reproducible bit-for-bit.

use num_rational::Rational64;

pub type Rat = Rational64;

/// Shorthand constructor for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Shorthand constructor for the integer rational `n/1`.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n)
}

pub fn is_zero(r: &Rat) -> bool {
    *r.numer() == 0
}

/// Integer floor of a non-negative rational.
pub fn floor_usize(r: &Rat) -> usize {
    let f = r.numer().div_euclid(*r.denom());
    usize::try_from(f).unwrap_or(0)
}

/// Canonical wire form, always `numer/denom` of the reduced fraction.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"3/2"` as well as the bare-integer shorthand `"3"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n
        .trim()
        .parse()
        .map_err(|_| format!("invalid rational numerator in `{s}`"))?;
    let d: i64 = d
        .trim()
        .parse()
        .map_err(|_| format!("invalid rational denominator in `{s}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(n, d))
}
