//! Laurent expansion at infinity and exact residues.
//!
//! Conventions, fixed once: the residue at a finite point is the usual
//! derivative formula for a pole of multiplicity k, and the residue at
//! infinity is MINUS the coefficient of `x^{-1}` in the expansion at
//! infinity. With both choices the global residue identity holds on the nose:
//! the residues of a rational function over all finite poles plus infinity
//! sum to zero. Anything that wants the opposite sign (the pairing does)
//! applies it at its own call site.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::poly::{Poly, Var};
use crate::ratfun::RatFun;
use crate::scalar::{rat_i, Rat};
use crate::{Error, Result};

/// Truncated Laurent series in one variable around infinity. Coefficients
/// may involve the other variables (as rational functions). `floor = None`
/// means every coefficient is exact (a Laurent polynomial); otherwise
/// coefficients are exact for exponents >= floor and unknown below.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    pub var: Var,
    terms: BTreeMap<i64, RatFun>,
    pub floor: Option<i64>,
}

impl LaurentSeries {
    pub fn zero(var: Var) -> LaurentSeries {
        LaurentSeries { var, terms: BTreeMap::new(), floor: None }
    }

    fn insert(&mut self, e: i64, c: RatFun) {
        if !c.is_zero_exact() {
            self.terms.insert(e, c);
        }
    }

    fn add_to(&mut self, e: i64, c: &RatFun) {
        if c.is_zero_exact() {
            return;
        }
        let cur = self.terms.remove(&e).unwrap_or_else(RatFun::zero);
        let next = cur.add(c).normalized();
        if !next.is_zero_exact() {
            self.terms.insert(e, next);
        }
    }

    pub fn top(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Exact coefficient of `var^e`. Errors when `e` is below the floor.
    pub fn coeff(&self, e: i64) -> Result<RatFun> {
        if let Some(fl) = self.floor {
            if e < fl {
                return Err(Error::Internal(alloc::format!(
                    "coefficient at exponent {e} requested below truncation floor {fl}"
                )));
            }
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(RatFun::zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &RatFun)> {
        self.terms.iter()
    }

    fn truncate_to_floor(&mut self) {
        if let Some(fl) = self.floor {
            self.terms.retain(|e, _| *e >= fl);
        }
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        debug_assert_eq!(self.var, other.var);
        // Unknown tails contaminate products: a coefficient of the product is
        // exact only above floor_a + top_b, floor_b + top_a and
        // floor_a + floor_b.
        let bound = |fa: Option<i64>, tb: Option<i64>| -> Option<i64> {
            match (fa, tb) {
                (None, _) => None,
                (Some(_), None) => None, // other side is zero: nothing leaks
                (Some(f), Some(t)) => Some(f + t),
            }
        };
        let mut floor = None;
        for b in [
            bound(self.floor, other.top()),
            bound(other.floor, self.top()),
            match (self.floor, other.floor) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        ] {
            floor = match (floor, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(a), Some(b)) => Some(a.max(b)),
            };
        }
        let mut out = LaurentSeries { var: self.var, terms: BTreeMap::new(), floor };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                if let Some(fl) = floor {
                    if ea + eb < fl {
                        continue;
                    }
                }
                out.add_to(ea + eb, &ca.mul(cb));
            }
        }
        out.truncate_to_floor();
        out
    }
}

/// Expands `f` around `var = infinity`, exactly for all exponents >= floor.
///
/// Denominator forms not involving `var` are folded into the coefficients.
/// For an involving form `c*var + g` the expansion of its inverse is the
/// geometric series `(1/c) * sum_j (-g/c)^j var^{-1-j}`.
pub fn laurent_at_infinity(f: &RatFun, var: Var, floor: i64) -> Result<LaurentSeries> {
    let mut prefactor = RatFun::one();
    let mut involving: Vec<(crate::linear::LinearForm, u32)> = Vec::new();
    for (form, m) in f.den_factors() {
        if form.involves(var) {
            involving.push((form.clone(), *m));
        } else {
            prefactor = prefactor.div_linear(&form.as_poly(), *m)?;
        }
    }

    // numerator as a series (exact everywhere)
    let mut acc = LaurentSeries::zero(var);
    for (m, c) in f.num().terms() {
        let (rest, e) = m.split_var(var);
        acc.add_to(e as i64, &RatFun::from_poly(Poly::from_term(rest, c.clone())));
    }

    let num_top = acc.top().unwrap_or(0);
    // depth generous enough that every intermediate floor ends <= requested
    let inv_floor = floor - num_top.max(0) - 1;
    for (form, mult) in involving {
        let c = form.coeff_of(var);
        debug_assert!(!c.is_zero());
        let mut g = form.as_poly();
        g.add_term(crate::poly::Mono::var(var), -c.clone());
        let base = g.scale(&(-Rat::one() / c.clone())); // -g/c
        let mut inv = LaurentSeries::zero(var);
        inv.floor = Some(inv_floor);
        let inv_c = Rat::one() / c;
        let mut pow = Poly::one();
        let mut j: i64 = 0;
        while -1 - j >= inv_floor {
            inv.insert(-1 - j, RatFun::from_poly(pow.scale(&inv_c)));
            pow = &pow * &base;
            j += 1;
        }
        for _ in 0..mult {
            acc = acc.mul(&inv);
        }
    }

    if !prefactor.den_factors().is_empty() {
        let mut out = LaurentSeries { var, terms: BTreeMap::new(), floor: acc.floor };
        for (e, c) in &acc.terms {
            out.insert(*e, c.mul(&prefactor).normalized());
        }
        acc = out;
    }

    if let Some(fl) = acc.floor {
        if fl > floor {
            return Err(Error::Internal(alloc::format!(
                "expansion floor {fl} did not reach requested {floor}"
            )));
        }
    }
    Ok(acc)
}

/// Where to take a residue: a finite point (a polynomial of degree <= 1 in
/// the other variables) or infinity.
#[derive(Clone, Debug)]
pub enum Point {
    Finite(Poly),
    Infinity,
}

/// Exact residue of `f` in `var` at the given point. Finite points use the
/// multiplicity-k derivative formula; infinity uses minus the coefficient of
/// `var^{-1}` at the expansion around infinity, so that residues over all of
/// P^1 sum to zero.
pub fn residue_at(f: &RatFun, var: Var, point: &Point) -> Result<RatFun> {
    match point {
        Point::Infinity => {
            let series = laurent_at_infinity(f, var, -1)?;
            Ok(series.coeff(-1)?.neg())
        }
        Point::Finite(a) => {
            if a.degree_in(var).unwrap_or(0) > 0 {
                return Err(Error::Unsupported(alloc::string::String::from(
                    "residue point must not involve the residue variable",
                )));
            }
            // exactly one normalized form can vanish identically at var = a
            let mut vanish: Option<(crate::linear::LinearForm, u32)> = None;
            let mut rest = RatFun::from_poly(f.num().clone());
            for (form, m) in f.den_factors() {
                if form.involves(var) && form.substitute(var, a).is_zero() {
                    if vanish.is_some() {
                        return Err(Error::Internal(alloc::string::String::from(
                            "two distinct normalized forms share a root",
                        )));
                    }
                    vanish = Some((form.clone(), *m));
                } else {
                    rest = rest.div_linear(&form.as_poly(), *m)?;
                }
            }
            let Some((form, k)) = vanish else {
                return Ok(RatFun::zero());
            };
            // form = c*(var - a); (var - a)^k * f = rest / c^k
            let c = form.coeff_of(var);
            let mut g = rest.scale(&(Rat::one() / c).pow(k as i32));
            for _ in 1..k {
                g = g.derivative(var);
            }
            // (k-1)!
            let mut fact = Rat::one();
            for i in 2..k as i64 {
                fact *= rat_i(i);
            }
            Ok(g.substitute(var, a)?.scale(&(Rat::one() / fact)).normalized())
        }
    }
}

/// The distinct finite poles of `f` in `var`, with multiplicities, read off
/// the factored denominator: the form `c*var + g` has its root at `-g/c`.
pub fn finite_poles(f: &RatFun, var: Var) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (form, m) in f.den_factors() {
        let c = form.coeff_of(var);
        if c.is_zero() {
            continue;
        }
        let mut g = form.as_poly();
        g.add_term(crate::poly::Mono::var(var), -c.clone());
        let root = g.scale(&(-Rat::one() / c));
        match out.iter_mut().find(|(r, _)| *r == root) {
            Some((_, mult)) => *mult += m,
            None => out.push((root, *m)),
        }
    }
    out
}

/// Sum of residues over every finite pole and infinity; identically zero for
/// any rational function, which the tests lean on heavily.
pub fn residue_sum_over_p1(f: &RatFun, var: Var) -> Result<RatFun> {
    let mut acc = residue_at(f, var, &Point::Infinity)?;
    for (root, _) in finite_poles(f, var) {
        acc = acc.add(&residue_at(f, var, &Point::Finite(root))?).normalized();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn x() -> Var {
        Var::slot(0, 1)
    }

    fn xp() -> Poly {
        Poly::var(x())
    }

    fn c(n: i64) -> Poly {
        Poly::int(n)
    }

    #[test]
    fn simple_pole_residue_is_one() {
        // 1/(x - c) at x = c -> 1 for a few c
        for k in [-2i64, 0, 5] {
            let f = RatFun::new(Poly::one(), &[(&xp() - &c(k), 1)]).unwrap();
            let r = residue_at(&f, x(), &Point::Finite(c(k))).unwrap();
            assert_eq!(r.as_poly().unwrap(), Poly::one());
        }
    }

    #[test]
    fn residue_away_from_pole_is_zero() {
        let f = RatFun::new(Poly::one(), &[(&xp() - &c(1), 1)]).unwrap();
        let r = residue_at(&f, x(), &Point::Finite(c(2))).unwrap();
        assert!(r.is_zero_exact());
    }

    #[test]
    fn double_pole_uses_derivative() {
        // x/(x-1)^2 = 1/(x-1) + 1/(x-1)^2: residue at 1 is 1
        let f = RatFun::new(xp(), &[(&xp() - &c(1), 2)]).unwrap();
        let r = residue_at(&f, x(), &Point::Finite(c(1))).unwrap();
        assert_eq!(r.as_poly().unwrap(), Poly::one());
        // and at infinity it is -1
        let ri = residue_at(&f, x(), &Point::Infinity).unwrap();
        assert_eq!(ri.as_poly().unwrap(), Poly::int(-1));
    }

    #[test]
    fn p1_sum_example() {
        // 1/((x-1)(x-2)): residues -1 at 1, +1 at 2, 0 at infinity
        let f = RatFun::new(Poly::one(), &[(&xp() - &c(1), 1), (&xp() - &c(2), 1)]).unwrap();
        let r1 = residue_at(&f, x(), &Point::Finite(c(1))).unwrap();
        let r2 = residue_at(&f, x(), &Point::Finite(c(2))).unwrap();
        let ri = residue_at(&f, x(), &Point::Infinity).unwrap();
        assert_eq!(r1.as_poly().unwrap(), Poly::int(-1));
        assert_eq!(r2.as_poly().unwrap(), Poly::one());
        assert!(ri.is_zero_exact());
        assert!(residue_sum_over_p1(&f, x()).unwrap().is_zero_exact());
    }

    #[test]
    fn infinity_residue_of_inverse_x() {
        // classical sign: Res_inf(1/x) = -1, Res_inf(-1/x) = +1
        let f = RatFun::new(Poly::one(), &[(xp(), 1)]).unwrap();
        let r = residue_at(&f, x(), &Point::Infinity).unwrap();
        assert_eq!(r.as_poly().unwrap(), Poly::int(-1));
        let g = RatFun::new(Poly::int(-1), &[(xp(), 1)]).unwrap();
        let rg = residue_at(&g, x(), &Point::Infinity).unwrap();
        assert_eq!(rg.as_poly().unwrap(), Poly::one());
    }

    #[test]
    fn laurent_of_geometric() {
        // 1/(x-1) = x^-1 + x^-2 + ... ; floor -3
        let f = RatFun::new(Poly::one(), &[(&xp() - &c(1), 1)]).unwrap();
        let s = laurent_at_infinity(&f, x(), -3).unwrap();
        assert!(s.coeff(0).unwrap().is_zero_exact());
        for e in [-1i64, -2, -3] {
            assert_eq!(s.coeff(e).unwrap().as_poly().unwrap(), Poly::one());
        }
    }

    #[test]
    fn laurent_with_polynomial_part() {
        // x^2/(x - h) = x + h + h^2/x + ...
        let f = RatFun::new(xp().pow(2), &[(&xp() - &Poly::hbar(), 1)]).unwrap();
        let s = laurent_at_infinity(&f, x(), -2).unwrap();
        assert_eq!(s.coeff(1).unwrap().as_poly().unwrap(), Poly::one());
        assert_eq!(s.coeff(0).unwrap().as_poly().unwrap(), Poly::hbar());
        assert_eq!(s.coeff(-1).unwrap().as_poly().unwrap(), Poly::hbar().pow(2));
        assert_eq!(s.coeff(-2).unwrap().as_poly().unwrap(), Poly::hbar().pow(3));
    }

    #[test]
    fn residue_with_symbolic_second_variable() {
        // 1/((x - y)(x + y)): residues at y and -y cancel; infinity gives 0
        let y = Poly::var(Var::slot(0, 2));
        let f = RatFun::new(Poly::one(), &[(&xp() - &y, 1), (&xp() + &y, 1)]).unwrap();
        assert!(residue_sum_over_p1(&f, x()).unwrap().is_zero_exact());
        let r = residue_at(&f, x(), &Point::Finite(y.clone())).unwrap();
        // 1/(2y)
        let expect = RatFun::new(Poly::one(), &[(y.scale(&rat_i(2)), 1)]).unwrap();
        assert!(r.eq_rational(&expect));
    }

    #[test]
    fn triple_pole_residue() {
        // (x^2 + h) / (x - 1)^3: residue at 1 is coefficient of (x-1)^2 in
        // numerator's Taylor expansion = 1
        let f = RatFun::new(&xp().pow(2) + &Poly::hbar(), &[(&xp() - &c(1), 3)]).unwrap();
        let r = residue_at(&f, x(), &Point::Finite(c(1))).unwrap();
        assert_eq!(r.as_poly().unwrap(), Poly::one());
        assert!(residue_sum_over_p1(&f, x()).unwrap().is_zero_exact());
    }

    #[test]
    fn rational_coefficient_tails() {
        let half = Poly::constant(rat(1, 2));
        let f = RatFun::new(half, &[(&xp() - &c(3), 1)]).unwrap();
        let ri = residue_at(&f, x(), &Point::Infinity).unwrap();
        assert_eq!(ri.as_poly().unwrap(), Poly::constant(rat(-1, 2)));
    }
}
