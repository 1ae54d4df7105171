//! The polynomial grammar used on the command line.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' integer]
//! atom   := 'T' | integer | '[' x-expr ']' | '(' expr ')'
//! ```
//!
//! Integers are read modulo p. Inside brackets the same grammar is used with
//! the variable `x`, describing an element of F_p[x]/(f) for e > 1.
//! Examples: `T^3 + [x+1]*T + 1`, `T*(T-1)*(T-2)`, `(T^2+T+1)^2`.

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::poly::Poly;

trait Alg: Clone {
    fn int(&self, n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

#[derive(Clone)]
struct PolyVal<'a>(Poly, &'a Fq);
impl Alg for PolyVal<'_> {
    fn int(&self, n: i64) -> Self {
        PolyVal(Poly::constant(self.1.from_int(n)), self.1)
    }
    fn add(&self, o: &Self) -> Self {
        PolyVal(self.0.add(&o.0, self.1), self.1)
    }
    fn neg(&self) -> Self {
        PolyVal(self.0.neg(self.1), self.1)
    }
    fn mul(&self, o: &Self) -> Self {
        PolyVal(self.0.mul(&o.0, self.1), self.1)
    }
}

#[derive(Clone)]
struct FieldVal<'a>(Fe, &'a Fq);
impl Alg for FieldVal<'_> {
    fn int(&self, n: i64) -> Self {
        FieldVal(self.1.from_int(n), self.1)
    }
    fn add(&self, o: &Self) -> Self {
        FieldVal(self.1.add(self.0, o.0), self.1)
    }
    fn neg(&self) -> Self {
        FieldVal(self.1.neg(self.0), self.1)
    }
    fn mul(&self, o: &Self) -> Self {
        FieldVal(self.1.mul(self.0, o.0), self.1)
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

impl<'s> Parser<'s> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!(
            "{msg} at position {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        )))
    }
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("integer out of range"))
    }

    fn expr<V: Alg>(&mut self, var: u8, zero: &V, x: &V, sub: &mut dyn FnMut(&mut Self) -> Result<V>) -> Result<V> {
        let mut neg = false;
        if self.eat(b'-') {
            neg = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term(var, zero, x, sub)?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                let t = self.term(var, zero, x, sub)?;
                acc = acc.add(&t);
            } else if self.eat(b'-') {
                let t = self.term(var, zero, x, sub)?;
                acc = acc.add(&t.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<V: Alg>(&mut self, var: u8, zero: &V, x: &V, sub: &mut dyn FnMut(&mut Self) -> Result<V>) -> Result<V> {
        let mut acc = self.factor(var, zero, x, sub)?;
        loop {
            let explicit = self.eat(b'*');
            match self.peek() {
                Some(c) if c == var || c.is_ascii_digit() || c == b'(' || c == b'[' => {
                    let f = self.factor(var, zero, x, sub)?;
                    acc = acc.mul(&f);
                }
                _ if explicit => return self.err("expected a factor after '*'"),
                _ => return Ok(acc),
            }
        }
    }

    fn factor<V: Alg>(&mut self, var: u8, zero: &V, x: &V, sub: &mut dyn FnMut(&mut Self) -> Result<V>) -> Result<V> {
        let base = match self.peek() {
            Some(c) if c == var => {
                self.pos += 1;
                x.clone()
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                zero.int(n)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr(var, zero, x, sub)?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                v
            }
            Some(b'[') => {
                self.pos += 1;
                let v = sub(self)?;
                if !self.eat(b']') {
                    return self.err("expected ']'");
                }
                v
            }
            _ => return self.err("expected a factor"),
        };
        if self.eat(b'^') {
            let n = self.integer()?;
            if n > 64 {
                return self.err("exponent too large");
            }
            let mut r = zero.int(1);
            for _ in 0..n {
                r = r.mul(&base);
            }
            return Ok(r);
        }
        Ok(base)
    }
}

/// Parses an element of F_q written as a polynomial in `x`.
pub fn parse_field_elem(s: &str, fq: &Fq) -> Result<Fe> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let v = field_expr(&mut p, fq)?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

fn field_expr(p: &mut Parser, fq: &Fq) -> Result<Fe> {
    let zero = FieldVal(0, fq);
    let xv = if fq.e() > 1 { fq.p() as Fe } else { 0 };
    let var = if fq.e() > 1 { b'x' } else { b'\0' };
    let mut nested = |pp: &mut Parser| -> Result<FieldVal> { pp.err("nested brackets are not allowed") };
    Ok(p.expr(var, &zero, &FieldVal(xv, fq), &mut nested)?.0)
}

/// Parses a polynomial in `T` over F_q.
pub fn parse_poly(s: &str, fq: &Fq) -> Result<Poly> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let zero = PolyVal(Poly::zero(), fq);
    let t = PolyVal(Poly::t(), fq);
    let mut bracket = |pp: &mut Parser| -> Result<PolyVal> {
        Ok(PolyVal(Poly::constant(field_expr(pp, fq)?), fq))
    };
    let v = p.expr(b'T', &zero, &t, &mut bracket)?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v.0)
}

/// Parses a modulus given as a polynomial in `x` with integer coefficients,
/// returning ascending coefficients reduced mod p.
pub fn parse_modulus(s: &str, p: u32) -> Result<Vec<u32>> {
    let fp = Fq::new(p)?;
    let mut parser = Parser { src: s.as_bytes(), pos: 0 };
    let zero = PolyVal(Poly::zero(), &fp);
    let x = PolyVal(Poly::t(), &fp);
    let mut nested = |pp: &mut Parser| -> Result<PolyVal> { pp.err("brackets are not allowed in a modulus") };
    let v = parser.expr(b'x', &zero, &x, &mut nested)?;
    if parser.peek().is_some() {
        return parser.err("trailing input");
    }
    Ok(v.0.coeffs().iter().map(|&c| c as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let f4 = Fq::new(4).unwrap();
        let f = parse_poly("T^3 + [x+1]*T + 1", &f4).unwrap();
        assert_eq!(f.coeffs(), &[1, 3, 0, 1]);
        let f3 = Fq::new(3).unwrap();
        let g = parse_poly("T*(T-1)*(T-2)", &f3).unwrap();
        // T^3 - T over F_3
        assert_eq!(g.coeffs(), &[0, 2, 0, 1]);
        let f2 = Fq::new(2).unwrap();
        let h = parse_poly("(T^2+T+1)^2", &f2).unwrap();
        assert_eq!(h.coeffs(), &[1, 0, 1, 0, 1]);
        assert_eq!(parse_poly("2T^2 - T", &f3).unwrap().coeffs(), &[0, 2, 2]);
        assert_eq!(parse_poly("[x]T", &f4).unwrap().coeffs(), &[0, 2]);
    }

    #[test]
    fn rejects_garbage() {
        let f2 = Fq::new(2).unwrap();
        for s in ["", "T^", "T +", "(T", "t^2", "T^3 $", "[x]"] {
            assert!(parse_poly(s, &f2).is_err(), "{s}");
        }
    }

    #[test]
    fn modulus_parsing() {
        assert_eq!(parse_modulus("x^2+x+1", 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(parse_modulus("x^3 - x + 1", 3).unwrap(), vec![1, 2, 0, 1]);
    }
}
