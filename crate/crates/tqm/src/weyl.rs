//! Sparse Weyl algebra `W_2n` and its matrix algebra `gl_r(W_2n)`.
//!
//! Variables are `y1..y2n` with `y1..yn = p` and `y(n+1)..y2n = q`; the
//! symplectic tensor has `ω^{i,n+i} = +1`. Indices are zero based in code.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{add_into, falling, fmt_q, q, Q};

/// A monomial `ħ^h y^y`. Ordered by `ħ` exponent first, then y lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub h: i32,
    pub y: Vec<u32>,
}

impl Mono {
    pub fn degree(&self) -> u32 {
        self.y.iter().sum()
    }

    pub fn weight(&self) -> i64 {
        self.degree() as i64 + 2 * self.h as i64
    }
}

/// `ω̂^{ij}` for `2n` indices.
pub fn omega(n: usize, i: usize, j: usize) -> i32 {
    if j == i + n && i < n {
        1
    } else if i == j + n && j < n {
        -1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weyl {
    n: usize,
    terms: BTreeMap<Mono, Q>,
}

/// Moyal product of two y-monomials as `(ħ power, y exponents, coefficient)`.
pub fn moyal_monomials(n: usize, a: &[u32], b: &[u32]) -> Vec<(u32, Vec<u32>, Q)> {
    // f ⋆ g factorizes over the n conjugate pairs.
    let mut acc: Vec<(u32, Vec<u32>, Q)> = vec![(0, vec![0; 2 * n], Q::one())];
    for t in 0..n {
        let (al, be, ga, de) = (a[t], a[n + t], b[t], b[n + t]);
        let mut pair = Vec::new();
        for s in 0..=al.min(de) {
            for u in 0..=be.min(ga) {
                let num = falling(al, s) * falling(de, s) * falling(be, u) * falling(ga, u);
                let den = crate::rational::factorial(s)
                    * crate::rational::factorial(u)
                    * num::BigInt::from(2).pow(s + u);
                let mut c = Q::new(num, den);
                if u % 2 == 1 {
                    c = -c;
                }
                pair.push((s + u, al + ga - s - u, be + de - s - u, c));
            }
        }
        let mut next = Vec::with_capacity(acc.len() * pair.len());
        for (h, y, c) in &acc {
            for (dh, ep, eq, pc) in &pair {
                let mut y2 = y.clone();
                y2[t] = *ep;
                y2[n + t] = *eq;
                next.push((h + dh, y2, c * pc));
            }
        }
        acc = next;
    }
    acc
}

impl Weyl {
    pub fn zero(n: usize) -> Self {
        Weyl { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Q) -> Self {
        Self::term(n, c, 0, vec![0; 2 * n])
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Q::one())
    }

    /// `c ħ^h y^y`.
    pub fn term(n: usize, c: Q, h: i32, y: Vec<u32>) -> Self {
        assert_eq!(y.len(), 2 * n);
        let mut w = Self::zero(n);
        add_into(&mut w.terms, Mono { h, y }, c);
        w
    }

    /// The coordinate `y^i` (zero based).
    pub fn y(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[i] = 1;
        Self::term(n, Q::one(), 0, e)
    }

    pub fn p(n: usize, a: usize) -> Self {
        Self::y(n, a)
    }

    pub fn q(n: usize, a: usize) -> Self {
        Self::y(n, n + a)
    }

    pub fn hbar(n: usize, k: i32) -> Self {
        Self::term(n, Q::one(), k, vec![0; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Q> {
        &self.terms
    }

    pub fn from_terms(n: usize, it: impl IntoIterator<Item = (Mono, Q)>) -> Self {
        let mut w = Self::zero(n);
        for (m, c) in it {
            assert_eq!(m.y.len(), 2 * n);
            add_into(&mut w.terms, m, c);
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        add_into(&mut self.terms, m, c);
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Weyl { n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Multiplies by `ħ^k`.
    pub fn shift_hbar(&self, k: i32) -> Self {
        Weyl {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (Mono { h: m.h + k, y: m.y.clone() }, v.clone())).collect(),
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(self.n, o.n));
        }
        Ok(())
    }

    pub fn moyal(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let c = ca * cb;
                for (dh, y, k) in moyal_monomials(self.n, &ma.y, &mb.y) {
                    out.add_term(Mono { h: ma.h + mb.h + dh as i32, y }, &c * k);
                }
            }
        }
        Ok(out)
    }

    /// `(f⋆g - g⋆f)/ħ`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        Ok((self.moyal(o)? - o.moyal(self)?).shift_hbar(-1))
    }

    /// Keeps the y-degree zero terms.
    pub fn symbol(&self) -> Self {
        self.filter(|m| m.degree() == 0)
    }

    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        Weyl { n: self.n, terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn weight_components(&self) -> Vec<(i64, Weyl)> {
        let mut by: BTreeMap<i64, Weyl> = BTreeMap::new();
        for (m, c) in &self.terms {
            by.entry(m.weight()).or_insert_with(|| Weyl::zero(self.n)).add_term(m.clone(), c.clone());
        }
        by.into_iter().collect()
    }

    /// Drops every term of weight above `w`.
    pub fn truncate_weight(&self, w: i64) -> Self {
        self.filter(|m| m.weight() <= w)
    }

    /// Membership in `W⁺`: no negative `ħ` exponents.
    pub fn is_plus(&self) -> bool {
        self.terms.keys().all(|m| m.h >= 0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Partial derivative in `y^i`.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m.y[i] > 0 {
                let mut y = m.y.clone();
                y[i] -= 1;
                out.add_term(Mono { h: m.h, y }, c * q(m.y[i] as i64));
            }
        }
        out
    }

    /// Coefficient of the term with the given exponents.
    pub fn coeff(&self, h: i32, y: &[u32]) -> Q {
        self.terms.get(&Mono { h, y: y.to_vec() }).cloned().unwrap_or_else(Q::zero)
    }
}

impl std::ops::Add for Weyl {
    type Output = Weyl;
    fn add(mut self, o: Weyl) -> Weyl {
        assert_eq!(self.n, o.n);
        for (m, c) in o.terms {
            add_into(&mut self.terms, m, c);
        }
        self
    }
}

impl std::ops::Sub for Weyl {
    type Output = Weyl;
    fn sub(self, o: Weyl) -> Weyl {
        self + (-o)
    }
}

impl std::ops::Neg for Weyl {
    type Output = Weyl;
    fn neg(self) -> Weyl {
        Weyl { n: self.n, terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

/// Formats one term `c h^k u^k y1^e .. dy1 ..` in the literal grammar.
pub fn fmt_term(c: &Q, h: i32, u: i32, y: &[u32], dys: &[usize], first: bool) -> String {
    let mut factors = Vec::new();
    if h != 0 {
        factors.push(format!("h^{h}"));
    }
    if u != 0 {
        factors.push(format!("u^{u}"));
    }
    for (i, &e) in y.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(format!("y{}", i + 1)),
            _ => factors.push(format!("y{}^{}", i + 1, e)),
        }
    }
    for &i in dys {
        factors.push(format!("dy{}", i + 1));
    }
    let a = c.abs();
    let mut s = String::new();
    if first {
        if c.is_negative() {
            s.push('-');
        }
    } else {
        s.push_str(if c.is_negative() { " - " } else { " + " });
    }
    if !a.is_one() || factors.is_empty() {
        s.push_str(&fmt_q(&a));
        if !factors.is_empty() {
            s.push(' ');
        }
    }
    s.push_str(&factors.join(" "));
    s
}

impl fmt::Display for Weyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            write!(f, "{}", fmt_term(c, m.h, 0, &m.y, &[], i == 0))?;
        }
        Ok(())
    }
}

/// An `r×r` matrix over `W_2n`, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    r: usize,
    e: Vec<Weyl>,
}

impl Matrix {
    pub fn zero(n: usize, r: usize) -> Self {
        Matrix { n, r, e: vec![Weyl::zero(n); r * r] }
    }

    pub fn scalar(r: usize, f: Weyl) -> Self {
        let mut m = Self::zero(f.n, r);
        for i in 0..r {
            m.e[i * r + i] = f.clone();
        }
        m
    }

    pub fn identity(n: usize, r: usize) -> Self {
        Self::scalar(r, Weyl::one(n))
    }

    /// `f E_ij`.
    pub fn unit(r: usize, i: usize, j: usize, f: Weyl) -> Self {
        let mut m = Self::zero(f.n, r);
        m.e[i * r + j] = f;
        m
    }

    pub fn from_rows(rows: Vec<Vec<Weyl>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        let n = rows[0][0].n;
        let mut e = Vec::with_capacity(r * r);
        for row in rows {
            if row.len() != r {
                return Err(Error::Rank(r, row.len()));
            }
            for w in row {
                if w.n != n {
                    return Err(Error::Dimension(n, w.n));
                }
                e.push(w);
            }
        }
        Ok(Matrix { n, r, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> &Weyl {
        &self.e[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: Weyl) {
        assert_eq!(w.n, self.n);
        self.e[i * self.r + j] = w;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Weyl)> {
        let r = self.r;
        self.e.iter().enumerate().map(move |(k, w)| (k / r, k % r, w))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|w| w.is_zero())
    }

    pub fn map(&self, f: impl Fn(&Weyl) -> Weyl) -> Self {
        Matrix { n: self.n, r: self.r, e: self.e.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|w| w.scale(c))
    }

    pub fn shift_hbar(&self, k: i32) -> Self {
        self.map(|w| w.shift_hbar(k))
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(self.n, o.n));
        }
        if self.r != o.r {
            return Err(Error::Rank(self.r, o.r));
        }
        Ok(())
    }

    pub fn moyal(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let r = self.r;
        let mut out = Self::zero(self.n, r);
        for i in 0..r {
            for k in 0..r {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.moyal(b)?;
                    let cur = std::mem::replace(&mut out.e[i * r + j], Weyl::zero(self.n));
                    out.e[i * r + j] = cur + prod;
                }
            }
        }
        Ok(out)
    }

    pub fn bracket(&self, o: &Self) -> Result<Self> {
        Ok((self.moyal(o)? - o.moyal(self)?).shift_hbar(-1))
    }

    pub fn symbol(&self) -> Self {
        self.map(|w| w.symbol())
    }

    pub fn is_plus(&self) -> bool {
        self.e.iter().all(|w| w.is_plus())
    }

    pub fn trace(&self) -> Weyl {
        (0..self.r).fold(Weyl::zero(self.n), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn max_degree(&self) -> u32 {
        self.e.iter().map(|w| w.max_degree()).max().unwrap_or(0)
    }
}

impl std::ops::Add for Matrix {
    type Output = Matrix;
    fn add(self, o: Matrix) -> Matrix {
        assert!(self.n == o.n && self.r == o.r);
        Matrix { n: self.n, r: self.r, e: self.e.into_iter().zip(o.e).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for Matrix {
    type Output = Matrix;
    fn sub(self, o: Matrix) -> Matrix {
        self + (-o)
    }
}

impl std::ops::Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { n: self.n, r: self.r, e: self.e.into_iter().map(|w| -w).collect() }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mat {} [", self.r)?;
        for i in 0..self.r {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.r {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn p() -> Weyl {
        Weyl::p(1, 0)
    }
    fn qq() -> Weyl {
        Weyl::q(1, 0)
    }
    fn mono(c: Q, h: i32, a: u32, b: u32) -> Weyl {
        Weyl::term(1, c, h, vec![a, b])
    }

    #[test]
    fn moyal_linear() {
        let got = p().moyal(&qq()).unwrap();
        assert_eq!(got, mono(q(1), 0, 1, 1) + mono(frac(1, 2), 1, 0, 0));
    }

    #[test]
    fn moyal_quadratic() {
        let p2 = mono(q(1), 0, 2, 0);
        let q2 = mono(q(1), 0, 0, 2);
        let want = mono(q(1), 0, 2, 2) + mono(q(2), 1, 1, 1) + mono(frac(1, 2), 2, 0, 0);
        assert_eq!(p2.moyal(&q2).unwrap(), want);
    }

    #[test]
    fn unit_law() {
        let f = mono(q(3), -1, 2, 1) + p();
        assert_eq!(Weyl::one(1).moyal(&f).unwrap(), f);
        assert_eq!(f.moyal(&Weyl::one(1)).unwrap(), f);
    }

    #[test]
    fn brackets() {
        assert_eq!(p().bracket(&qq()).unwrap(), Weyl::one(1));
        assert!(p().bracket(&p()).unwrap().is_zero());
        assert_eq!(mono(q(1), 0, 2, 0).bracket(&qq()).unwrap(), mono(q(2), 0, 1, 0));
    }

    #[test]
    fn symbol_and_weights() {
        let f = mono(q(1), 0, 1, 1) + Weyl::hbar(1, 1);
        assert_eq!(f.symbol(), Weyl::hbar(1, 1));
        assert!(p().symbol().is_zero());
        let comps = f.weight_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].0, 2);
        assert_eq!(mono(q(1), -1, 1, 0).weight_components()[0].0, -1);
    }

    #[test]
    fn mismatch_is_error() {
        assert!(Weyl::p(1, 0).moyal(&Weyl::p(2, 0)).is_err());
        let a = Matrix::identity(1, 1);
        let b = Matrix::identity(1, 2);
        assert_eq!(a.moyal(&b), Err(Error::Rank(1, 2)));
    }

    #[test]
    fn matrix_units_multiply() {
        let a = Matrix::unit(2, 0, 1, p());
        let b = Matrix::unit(2, 1, 0, qq());
        let ab = a.moyal(&b).unwrap();
        assert_eq!(ab.get(0, 0), &p().moyal(&qq()).unwrap());
        assert!(b.moyal(&b).unwrap().is_zero());
    }

    #[test]
    fn display() {
        let f = mono(q(1), 0, 1, 1) + mono(frac(-1, 2), 1, 0, 0);
        assert_eq!(f.to_string(), "y1 y2 - 1/2 h^1");
    }
}
