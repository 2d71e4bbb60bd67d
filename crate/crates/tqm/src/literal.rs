//! Text literals shared by the CLI.
//!
//! ```text
//! element := term (('+' | '-') term)*
//! term    := rational? factor*
//! factor  := 'h^' int | 'u^' int | 'y' idx ('^' nat)? | 'dy' idx
//! matrix  := 'mat' r '[' row (',' row)* ']'      row := '[' element (',' element)* ']'
//! chain   := 'chain' '[' matrix (';' matrix)* ']'
//! args    := 'args' '[' (matrix (';' matrix)*)? ']'
//! ```

use num::{BigInt, One, Zero};

use crate::cyclic::Chain;
use crate::error::{Error, Result};
use crate::forms::{wedge_sign, FKey, Form};
use crate::rational::Q;
use crate::weyl::{Matrix, Weyl};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Element(Form),
    Matrix(Matrix),
    Chain(Chain),
    Args(Vec<Matrix>),
}

/// Parses any literal with `2n` variables.
pub fn parse_literal(text: &str, n: usize) -> Result<Literal> {
    let mut p = Parser::new(text, n);
    p.skip_ws();
    let lit = if p.keyword("mat") {
        Literal::Matrix(p.matrix_body()?)
    } else if p.keyword("chain") {
        let ms = p.matrix_list()?;
        if ms.is_empty() {
            return Err(p.error("a chain needs at least one matrix"));
        }
        let r = ms[0].r();
        if let Some(m) = ms.iter().find(|m| m.r() != r) {
            return Err(Error::Rank(r, m.r()));
        }
        Literal::Chain(Chain::from_matrices(&ms, 0)?)
    } else if p.keyword("args") {
        let ms = p.matrix_list()?;
        if let Some(first) = ms.first() {
            if let Some(m) = ms.iter().find(|m| m.r() != first.r()) {
                return Err(Error::Rank(first.r(), m.r()));
            }
        }
        Literal::Args(ms)
    } else {
        Literal::Element(p.element()?)
    };
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(lit)
}

pub fn parse_form(text: &str, n: usize) -> Result<Form> {
    match parse_literal(text, n)? {
        Literal::Element(f) => Ok(f),
        _ => Err(Error::Invalid("expected an element".into())),
    }
}

pub fn parse_weyl(text: &str, n: usize) -> Result<Weyl> {
    parse_form(text, n)?.to_weyl().ok_or_else(|| Error::Invalid("element has dy or u factors".into()))
}

pub fn parse_matrix(text: &str, n: usize) -> Result<Matrix> {
    match parse_literal(text, n)? {
        Literal::Matrix(m) => Ok(m),
        _ => Err(Error::Invalid("expected a matrix".into())),
    }
}

pub fn parse_chain(text: &str, n: usize) -> Result<Chain> {
    match parse_literal(text, n)? {
        Literal::Chain(c) => Ok(c),
        _ => Err(Error::Invalid("expected a chain".into())),
    }
}

pub fn parse_args(text: &str, n: usize) -> Result<Vec<Matrix>> {
    match parse_literal(text, n)? {
        Literal::Args(a) => Ok(a),
        _ => Err(Error::Invalid("expected an argument list".into())),
    }
}

/// Prints an argument list in the literal grammar.
pub fn fmt_args(args: &[Matrix]) -> String {
    let parts: Vec<String> = args.iter().map(|m| m.to_string()).collect();
    format!("args [{}]", parts.join(" ; "))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize) -> Self {
        Parser { src: text.as_bytes(), pos: 0, n }
    }

    fn error(&self, msg: &str) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let start = before.iter().rposition(|&b| b == b'\n').map(|i| i + 1).unwrap_or(0);
        let col = String::from_utf8_lossy(&before[start..]).chars().count() + 1;
        Error::Parse { line, col, msg: msg.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.len();
        if self.src.get(self.pos..end) == Some(kw.as_bytes())
            && !matches!(self.src.get(end), Some(b) if b.is_ascii_alphanumeric())
        {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small(&mut self, what: &str) -> Result<i64> {
        let neg = self.eat(b'-');
        let v: i64 = self.digits()?.try_into().map_err(|_| self.error(&format!("{what} too large")))?;
        Ok(if neg { -v } else { v })
    }

    fn index(&mut self) -> Result<usize> {
        let at = self.pos;
        let i = self.small("index")?;
        if i < 1 || i as usize > 2 * self.n {
            self.pos = at;
            return Err(self.error(&format!("variable index {i} outside 1..={}", 2 * self.n)));
        }
        Ok(i as usize - 1)
    }

    fn element(&mut self) -> Result<Form> {
        let mut out = Form::zero(self.n);
        let mut negate = self.eat(b'-');
        loop {
            let t = self.term()?;
            out = out + if negate { t.scale(&-Q::one()) } else { t };
            if self.eat(b'+') {
                negate = false;
            } else if self.eat(b'-') {
                negate = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&mut self) -> Result<Form> {
        self.skip_ws();
        let mut c = Q::one();
        let mut seen = false;
        if matches!(self.peek(), Some(b'-') | Some(b'0'..=b'9')) {
            let neg = self.eat(b'-');
            let num = self.digits()?;
            let den = if self.eat(b'/') { self.digits()? } else { BigInt::one() };
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            c = Q::new(if neg { -num } else { num }, den);
            seen = true;
        }
        let mut key = FKey { u: 0, h: 0, mask: 0, y: vec![0; 2 * self.n] };
        loop {
            self.skip_ws();
            if self.keyword_prefix("dy") {
                let i = self.index()?;
                match wedge_sign(key.mask, 1 << i) {
                    Some(odd) => {
                        if odd {
                            c = -c;
                        }
                        key.mask |= 1 << i;
                    }
                    None => c = Q::zero(),
                }
            } else if self.keyword_prefix("y") {
                let i = self.index()?;
                let e = if self.eat(b'^') { self.small("exponent")? } else { 1 };
                if e < 0 {
                    return Err(self.error("negative y exponent"));
                }
                key.y[i] += e as u32;
            } else if self.keyword_prefix("h") {
                self.expect(b'^')?;
                key.h += self.small("exponent")? as i32;
            } else if self.keyword_prefix("u") {
                self.expect(b'^')?;
                key.u += self.small("exponent")? as i32;
            } else {
                break;
            }
            seen = true;
        }
        if !seen {
            return Err(self.error("expected a term"));
        }
        let mut f = Form::zero(self.n);
        f.add_term(key, c);
        Ok(f)
    }

    /// Matches a factor head such as `y` only when a digit or `^` follows.
    fn keyword_prefix(&mut self, kw: &str) -> bool {
        let end = self.pos + kw.len();
        if self.src.get(self.pos..end) != Some(kw.as_bytes()) {
            return false;
        }
        match self.src.get(end) {
            Some(b) if b.is_ascii_digit() || *b == b'^' => {
                self.pos = end;
                true
            }
            _ => false,
        }
    }

    fn matrix_body(&mut self) -> Result<Matrix> {
        let r = self.small("rank")?;
        if r < 1 {
            return Err(self.error("rank must be positive"));
        }
        let r = r as usize;
        self.expect(b'[')?;
        let mut rows = Vec::new();
        loop {
            self.expect(b'[')?;
            let mut row = Vec::new();
            loop {
                let f = self.element()?;
                let w = f.to_weyl().ok_or_else(|| self.error("matrix entries cannot contain dy or u"))?;
                row.push(w);
                if !self.eat(b',') {
                    break;
                }
            }
            self.expect(b']')?;
            if row.len() != r {
                return Err(self.error(&format!("row has {} entries, rank is {r}", row.len())));
            }
            rows.push(row);
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b']')?;
        if rows.len() != r {
            return Err(self.error(&format!("{} rows, rank is {r}", rows.len())));
        }
        Matrix::from_rows(rows)
    }

    fn matrix_list(&mut self) -> Result<Vec<Matrix>> {
        self.expect(b'[')?;
        let mut ms = Vec::new();
        if self.eat(b']') {
            return Ok(ms);
        }
        loop {
            if !self.keyword("mat") {
                return Err(self.error("expected 'mat'"));
            }
            ms.push(self.matrix_body()?);
            if !self.eat(b';') {
                break;
            }
        }
        self.expect(b']')?;
        Ok(ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn grammar_examples() {
        let f = parse_form("3/2 h^-1 y1^2 dy2", 1).unwrap();
        assert_eq!(f, Form::term(1, frac(3, 2), FKey { u: 0, h: -1, mask: 2, y: vec![2, 0] }));
        let c = parse_chain("chain [ mat 1 [[y1]] ; mat 1 [[y2]] ]", 1).unwrap();
        let want = Chain::from_matrices(&[Matrix::scalar(1, Weyl::p(1, 0)), Matrix::scalar(1, Weyl::q(1, 0))], 0).unwrap();
        assert_eq!(c, want);
        let w = parse_weyl("1 + -1/2 h^1", 1).unwrap();
        assert_eq!(w, Weyl::one(1) - Weyl::hbar(1, 1).scale(&frac(1, 2)));
    }

    #[test]
    fn dy_order_and_repeats() {
        assert_eq!(parse_form("dy2 dy1", 1).unwrap(), parse_form("-dy1 dy2", 1).unwrap());
        assert!(parse_form("dy1 dy1", 1).unwrap().is_zero());
    }

    #[test]
    fn round_trips() {
        for text in ["y1 y2 - 1/2 h^1", "-3 h^-2 u^1 y1 dy1 dy2 + 7", "0"] {
            let f = parse_form(text, 1).unwrap();
            assert_eq!(parse_form(&f.to_string(), 1).unwrap(), f);
        }
        let m = parse_matrix("mat 2 [[y1, h^1], [0, y2^2 - 1]]", 1).unwrap();
        assert_eq!(parse_matrix(&m.to_string(), 1).unwrap(), m);
        let a = parse_args("args [ mat 1 [[y1]] ; mat 1 [[y2 + 2]] ]", 1).unwrap();
        assert_eq!(parse_args(&fmt_args(&a), 1).unwrap(), a);
        assert_eq!(parse_args("args []", 1).unwrap(), vec![]);
    }

    #[test]
    fn errors() {
        match parse_form("y1 +\n  y3", 1) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 4)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_form("2 y1 ]", 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_matrix("mat 2 [[y1]]", 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_chain("chain [ mat 1 [[y1]] ; mat 2 [[1, 0], [0, 1]] ]", 1), Err(Error::Rank(1, 2))));
        assert!(matches!(parse_form("1/0", 1), Err(Error::Parse { .. })));
        assert_eq!(parse_weyl("2 y1 y1", 1).unwrap(), Weyl::term(1, q(2), 0, vec![2, 0]));
    }
}
