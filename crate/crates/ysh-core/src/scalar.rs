//! Exact rational scalars. Thin re-export of `BigRational` plus the small
//! constructors used everywhere else; `num-rational` already maintains the
//! reduced-form, positive-denominator invariant we need.

use num_bigint::BigInt;
pub use num_rational::BigRational as Rat;

/// `n/d` as an exact rational. Panics on `d == 0`, as upstream does.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Formats a rational the way the expression grammar reads it back:
/// plain integer when the denominator is 1, `n/d` otherwise.
pub fn fmt_rat(r: &Rat) -> alloc::string::String {
    use alloc::format;
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form_is_automatic() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert_eq!(fmt_rat(&rat(-4, 2)), "-2");
        assert_eq!(fmt_rat(&rat(7, 3)), "7/3");
    }
}
