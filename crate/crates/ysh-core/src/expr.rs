//! Term language for elements entered on the command line or in element files.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' int)?
//! atom   := rational | 'h' | 'l(' vertex ',' slot ')' | 'x(' vertex ',' mode ')'
//!         | '(' expr ')'
//! ```
//!
//! `l(k,s)` is the s-th variable at vertex k (slots are 1-based), `h` the
//! deformation parameter, `x(k,r)` the weight-e_k generator of mode r.
//! One grammar, three evaluators: polynomials (element files), rational
//! functions (pairing inputs, where negative exponents are allowed and
//! denominators must split into linear forms), and shuffle elements
//! (where `*` is the shuffle product).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::poly::{Poly, Var};
use crate::quiver::Quiver;
use crate::ratfun::RatFun;
use crate::scalar::{rat_i, Rat};
use crate::shuffle::{shuffle_mul, ShuffleElement};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rat),
    Hbar,
    Slot { vertex: u16, slot: u16 },
    Gen { vertex: u16, mode: i64 },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Rat),
    Letter(char),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Caret,
}

fn err(msg: impl Into<String>, at: usize) -> Error {
    Error::Parse { msg: msg.into(), at }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let at = i;
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => { out.push((Tok::LParen, at)); i += 1; }
            ')' => { out.push((Tok::RParen, at)); i += 1; }
            ',' => { out.push((Tok::Comma, at)); i += 1; }
            '+' => { out.push((Tok::Plus, at)); i += 1; }
            '-' => { out.push((Tok::Minus, at)); i += 1; }
            '*' => { out.push((Tok::Star, at)); i += 1; }
            '^' => { out.push((Tok::Caret, at)); i += 1; }
            'h' | 'l' | 'x' => { out.push((Tok::Letter(c), at)); i += 1; }
            '0'..='9' => {
                let num = take_digits(bytes, &mut i);
                // a slash continues a rational literal, never divides
                let den = if i < bytes.len() && bytes[i] == b'/' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(err("expected digits after '/'", i));
                    }
                    take_digits(bytes, &mut i)
                } else {
                    String::from("1")
                };
                let value = parse_rat(&num, &den, at)?;
                out.push((Tok::Num(value), at));
            }
            other => return Err(err(format!("unexpected character '{other}'"), at)),
        }
    }
    Ok(out)
}

fn take_digits(bytes: &[u8], i: &mut usize) -> String {
    let start = *i;
    while *i < bytes.len() && bytes[*i].is_ascii_digit() {
        *i += 1;
    }
    String::from_utf8(bytes[start..*i].to_vec()).expect("digits are utf8")
}

fn parse_rat(num: &str, den: &str, at: usize) -> Result<Rat> {
    let n: num_bigint::BigInt = num.parse().map_err(|_| err("bad integer literal", at))?;
    let d: num_bigint::BigInt = den.parse().map_err(|_| err("bad integer literal", at))?;
    if d == num_bigint::BigInt::from(0) {
        return Err(err("zero denominator in rational literal", at));
    }
    Ok(Rat::new(n, d))
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, at)| *at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(err(format!("expected {what}"), at)),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let e = self.signed_int("exponent")?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(Expr::Num(r)),
            Some(Tok::Letter('h')) => Ok(Expr::Hbar),
            Some(Tok::Letter('l')) => {
                let (vertex, second) = self.pair("l", at)?;
                if second < 1 {
                    return Err(err("slots are 1-based", at));
                }
                let slot = u16::try_from(second).map_err(|_| err("slot out of range", at))?;
                Ok(Expr::Slot { vertex, slot })
            }
            Some(Tok::Letter('x')) => {
                let (vertex, mode) = self.pair("x", at)?;
                Ok(Expr::Gen { vertex, mode })
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(err("expected a number, h, l(..), x(..) or '('", at)),
        }
    }

    fn pair(&mut self, name: &str, at: usize) -> Result<(u16, i64)> {
        self.expect(Tok::LParen, &format!("'(' after {name}"))?;
        let first = self.signed_int("vertex")?;
        let vertex = u16::try_from(first).map_err(|_| err("vertex out of range", at))?;
        self.expect(Tok::Comma, "','")?;
        let second = self.signed_int("index")?;
        self.expect(Tok::RParen, "')'")?;
        Ok((vertex, second))
    }

    fn signed_int(&mut self, what: &str) -> Result<i64> {
        let at = self.here();
        let neg = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(r)) if r.is_integer() => {
                let v = i64::try_from(r.to_integer())
                    .map_err(|_| err(format!("{what} out of range"), at))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(err(format!("expected integer {what}"), at)),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err("unexpected trailing input", p.here()));
    }
    Ok(e)
}

/// Evaluate in the polynomial context: `h`, `l(k,s)`, rationals; exponents
/// nonnegative; `x(..)` is rejected since it has no polynomial meaning.
pub fn eval_poly(e: &Expr) -> Result<Poly> {
    match e {
        Expr::Num(r) => Ok(Poly::constant(r.clone())),
        Expr::Hbar => Ok(Poly::hbar()),
        Expr::Slot { vertex, slot } => Ok(Poly::var(Var::slot(*vertex, *slot))),
        Expr::Gen { .. } => Err(Error::Unsupported(String::from(
            "x(..) is a shuffle generator, not a polynomial atom",
        ))),
        Expr::Neg(a) => Ok(-&eval_poly(a)?),
        Expr::Add(a, b) => Ok(&eval_poly(a)? + &eval_poly(b)?),
        Expr::Sub(a, b) => Ok(&eval_poly(a)? - &eval_poly(b)?),
        Expr::Mul(a, b) => Ok(&eval_poly(a)? * &eval_poly(b)?),
        Expr::Pow(a, k) => {
            let k = u32::try_from(*k).map_err(|_| {
                Error::Unsupported(String::from(
                    "negative exponents are only available in pairing inputs",
                ))
            })?;
            Ok(eval_poly(a)?.pow(k))
        }
    }
}

/// Evaluate in the pairing context: rational functions whose denominators
/// split into linear forms. Negative exponents invert, which requires the
/// base's numerator to be constant or linear.
pub fn eval_ratfun(e: &Expr) -> Result<RatFun> {
    match e {
        Expr::Num(_) | Expr::Hbar | Expr::Slot { .. } => Ok(RatFun::from_poly(eval_poly(e)?)),
        Expr::Gen { .. } => Err(Error::Unsupported(String::from(
            "x(..) is a shuffle generator; pairing inputs use l(k,1) and h",
        ))),
        Expr::Neg(a) => Ok(eval_ratfun(a)?.neg()),
        Expr::Add(a, b) => Ok(eval_ratfun(a)?.add(&eval_ratfun(b)?)),
        Expr::Sub(a, b) => Ok(eval_ratfun(a)?.sub(&eval_ratfun(b)?)),
        Expr::Mul(a, b) => Ok(eval_ratfun(a)?.mul(&eval_ratfun(b)?)),
        Expr::Pow(a, k) => {
            let base = eval_ratfun(a)?;
            let (base, k) = if *k < 0 {
                (invert(&base)?, k.unsigned_abs())
            } else {
                (base, *k as u64)
            };
            let mut acc = RatFun::one();
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            Ok(acc)
        }
    }
}

fn invert(f: &RatFun) -> Result<RatFun> {
    if f.is_zero_exact() {
        return Err(Error::Unsupported(String::from("cannot invert zero")));
    }
    let num = f.num().clone();
    let den = f.den_poly();
    if let Some(c) = num.as_constant() {
        return Ok(RatFun::from_poly(den).scale(&(Rat::new(1.into(), 1.into()) / c)));
    }
    // non-constant numerator becomes the denominator; must be a linear form
    RatFun::new(den, &[(num, 1)])
}

/// Evaluate in the shuffle context over `q`: `*` is the shuffle product,
/// rationals and `h` are weight-zero elements, sums must agree in weight.
pub fn eval_shuffle(e: &Expr, q: &Quiver) -> Result<ShuffleElement> {
    let n = q.vertex_count();
    match e {
        Expr::Num(r) => Ok(ShuffleElement::one(n).scale(r)),
        Expr::Hbar => ShuffleElement::one(n).mul_hbar_poly(&Poly::hbar()),
        Expr::Slot { .. } => Err(Error::Unsupported(String::from(
            "l(..) needs a weight context; use an element file entry",
        ))),
        Expr::Gen { vertex, mode } => {
            if usize::from(*vertex) >= n {
                return Err(Error::Shape(format!(
                    "vertex {vertex} out of range for a quiver on {n} vertices"
                )));
            }
            let r = u32::try_from(*mode)
                .map_err(|_| Error::Unsupported(String::from("generator modes are nonnegative")))?;
            Ok(ShuffleElement::generator(n, usize::from(*vertex), r))
        }
        Expr::Neg(a) => Ok(eval_shuffle(a, q)?.scale(&rat_i(-1))),
        Expr::Add(a, b) => eval_shuffle(a, q)?.add(&eval_shuffle(b, q)?),
        Expr::Sub(a, b) => eval_shuffle(a, q)?.sub(&eval_shuffle(b, q)?),
        Expr::Mul(a, b) => shuffle_mul(&eval_shuffle(a, q)?, &eval_shuffle(b, q)?, q),
        Expr::Pow(a, k) => {
            let k = u32::try_from(*k).map_err(|_| {
                Error::Unsupported(String::from("shuffle powers are nonnegative"))
            })?;
            let base = eval_shuffle(a, q)?;
            let mut acc = ShuffleElement::one(n);
            for _ in 0..k {
                acc = shuffle_mul(&acc, &base, q)?;
            }
            Ok(acc)
        }
    }
}

pub fn parse_poly(src: &str) -> Result<Poly> {
    eval_poly(&parse(src)?)
}

pub fn parse_ratfun(src: &str) -> Result<RatFun> {
    eval_ratfun(&parse(src)?)
}

pub fn parse_shuffle(src: &str, q: &Quiver) -> Result<ShuffleElement> {
    eval_shuffle(&parse(src)?, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn polynomial_round_trip() {
        let p = Poly::var(Var::slot(0, 1));
        let h = Poly::hbar();
        let cases = [
            Poly::zero(),
            Poly::one(),
            Poly::constant(rat(-7, 3)),
            &(&p * &p) - &h.scale(&rat(1, 2)),
            &(&p + &h).pow(3) + &Poly::var(Var::slot(2, 4)),
        ];
        for c in &cases {
            let printed = alloc::format!("{c}");
            assert_eq!(&parse_poly(&printed).unwrap(), c, "round trip of {printed}");
        }
    }

    #[test]
    fn poly_context_accepts_symmetric_entry_language() {
        let got = parse_poly("l(0,1)+l(0,2)").unwrap();
        let want = &Poly::var(Var::slot(0, 1)) + &Poly::var(Var::slot(0, 2));
        assert_eq!(got, want);
        let got = parse_poly("3/2*l(1,1)^2*h - 1").unwrap();
        let want = &(&Poly::var(Var::slot(1, 1)).pow(2) * &Poly::hbar()).scale(&rat(3, 2))
            - &Poly::one();
        assert_eq!(got, want);
    }

    #[test]
    fn poly_context_rejects_generators_and_negative_powers() {
        assert!(matches!(parse_poly("x(0,1)"), Err(Error::Unsupported(_))));
        assert!(matches!(parse_poly("l(0,1)^-1"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn shuffle_context_multiplies() {
        let one_vertex = Quiver::path(1);
        let sq = parse_shuffle("x(0,0)*x(0,0)", &one_vertex).unwrap();
        assert_eq!(sq.poly(), &Poly::constant(rat_i(2)));

        let a2 = Quiver::path(2);
        let got = parse_shuffle("x(0,1) * x(1,0)", &a2).unwrap();
        let want = shuffle_mul(
            &ShuffleElement::generator(2, 0, 1),
            &ShuffleElement::generator(2, 1, 0),
            &a2,
        )
        .unwrap();
        assert_eq!(got.poly(), want.poly());

        let combo = parse_shuffle("2*x(0,0) - x(0,0)", &a2).unwrap();
        assert_eq!(combo.poly(), ShuffleElement::generator(2, 0, 0).poly());
        let cube = parse_shuffle("x(0,0)^3", &Quiver::path(1)).unwrap();
        assert_eq!(cube.poly(), &Poly::constant(rat_i(6)));
    }

    #[test]
    fn shuffle_context_shape_errors() {
        let a2 = Quiver::path(2);
        assert!(matches!(parse_shuffle("x(0,0)+h", &a2), Err(Error::Shape(_))));
        assert!(matches!(parse_shuffle("x(9,0)", &a2), Err(Error::Shape(_))));
        assert!(matches!(parse_shuffle("x(0,-1)", &a2), Err(Error::Unsupported(_))));
        assert!(matches!(parse_shuffle("l(0,1)", &a2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn ratfun_context_inverts_linear_factors() {
        let f = parse_ratfun("l(0,1)^-1").unwrap();
        assert_eq!(f.den_factors().len(), 1);
        assert_eq!(f.den_factors()[0].1, 1);

        let g = parse_ratfun("(l(0,1)+h)^-2").unwrap();
        assert_eq!(g.den_factors()[0].1, 2);

        let half = parse_ratfun("2^-1").unwrap();
        assert_eq!(half.as_poly().unwrap(), Poly::constant(rat(1, 2)));

        assert!(parse_ratfun("(l(0,1)^2+h)^-1").is_err());
        // inverse of an inverse lands back on a polynomial
        let back = parse_ratfun("(l(0,1)^-1)^-1").unwrap();
        assert_eq!(back.as_poly().unwrap(), Poly::var(Var::slot(0, 1)));
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        match parse("x(0,0)+") {
            Err(Error::Parse { at, .. }) => assert_eq!(at, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("l(0)") {
            Err(Error::Parse { at, .. }) => assert_eq!(at, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("h h") {
            Err(Error::Parse { at, .. }) => assert_eq!(at, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("1/0") {
            Err(Error::Parse { at, .. }) => assert_eq!(at, 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse("l(0,0)").is_err());
    }
}
