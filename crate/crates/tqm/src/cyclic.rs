//! Cyclic chains `A ⊗ Ā^{⊗p}` of `A = gl_r(W_2n)`, with `u` for the periodic
//! complex.
//!
//! A chain is stored as a combination of elementary tensors: each slot is a
//! matrix unit times a y-monomial, and the `ħ` and `u` powers are global.
//! Slots `1..p` are reduced modulo `Q((ħ))·Id`: for `r = 1` constant slots
//! vanish, otherwise a constant `E_rr` is rewritten as `-Σ_{i<r} E_ii`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{add_into, sign, Q};
use crate::weyl::{fmt_term, moyal_monomials, Matrix, Weyl};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub row: u16,
    pub col: u16,
    pub y: Vec<u32>,
}

impl Slot {
    pub fn is_constant(&self) -> bool {
        self.y.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.y.iter().sum()
    }

    pub fn to_matrix(&self, n: usize, r: usize) -> Matrix {
        Matrix::unit(r, self.row as usize, self.col as usize, Weyl::term(n, Q::one(), 0, self.y.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainKey {
    pub u: i32,
    pub h: i32,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    n: usize,
    r: usize,
    terms: BTreeMap<ChainKey, Q>,
}

/// Expands a matrix into `(ħ power, slot, coefficient)` triples.
pub fn expand_matrix(m: &Matrix) -> Vec<(i32, Slot, Q)> {
    let mut v = Vec::new();
    for (i, j, w) in m.entries() {
        for (mono, c) in w.terms() {
            v.push((mono.h, Slot { row: i as u16, col: j as u16, y: mono.y.clone() }, c.clone()));
        }
    }
    v
}

/// Product of elementary slots, as `(ħ power, slot, coefficient)`.
fn slot_mul(n: usize, a: &Slot, b: &Slot) -> Vec<(i32, Slot, Q)> {
    if a.col != b.row {
        return vec![];
    }
    moyal_monomials(n, &a.y, &b.y)
        .into_iter()
        .filter(|(_, _, c)| !c.is_zero())
        .map(|(h, y, c)| (h as i32, Slot { row: a.row, col: b.col, y }, c))
        .collect()
}

impl Chain {
    pub fn zero(n: usize, r: usize) -> Self {
        Chain { n, r, terms: BTreeMap::new() }
    }

    /// `u^u · M_0 ⊗ M_1 ⊗ ... ⊗ M_p`, bar-normalized.
    pub fn from_matrices(ms: &[Matrix], u: i32) -> Result<Self> {
        let first = ms.first().ok_or_else(|| Error::Invalid("chain needs slot 0".into()))?;
        let (n, r) = (first.n(), first.r());
        let mut acc: Vec<(i32, Vec<Slot>, Q)> = vec![(0, vec![], Q::one())];
        for m in ms {
            if m.n() != n {
                return Err(Error::Dimension(n, m.n()));
            }
            if m.r() != r {
                return Err(Error::Rank(r, m.r()));
            }
            let ex = expand_matrix(m);
            let mut next = Vec::with_capacity(acc.len() * ex.len());
            for (h, s, c) in &acc {
                for (dh, sl, v) in &ex {
                    let mut s2 = s.clone();
                    s2.push(sl.clone());
                    next.push((h + dh, s2, c * v));
                }
            }
            acc = next;
        }
        let mut ch = Self::zero(n, r);
        for (h, slots, c) in acc {
            ch.add_normalized(ChainKey { u, h, slots }, c);
        }
        Ok(ch)
    }

    /// The unit chain `Id` in slot 0.
    pub fn unit(n: usize, r: usize) -> Self {
        Self::from_matrices(&[Matrix::identity(n, r)], 0).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn terms(&self) -> &BTreeMap<ChainKey, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a term without normalization.
    pub fn add_raw(&mut self, k: ChainKey, c: Q) {
        add_into(&mut self.terms, k, c);
    }

    /// Adds a term after reducing slots `1..` modulo scalar multiples of `Id`.
    pub fn add_normalized(&mut self, k: ChainKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let last = (self.r - 1) as u16;
        let mut pending = vec![(k, c)];
        while let Some((k, c)) = pending.pop() {
            let hit = k.slots.iter().enumerate().skip(1).find(|(_, s)| s.is_constant() && s.row == last && s.col == last);
            match hit {
                None => add_into(&mut self.terms, k, c),
                Some((i, _)) => {
                    for d in 0..last {
                        let mut k2 = k.clone();
                        k2.slots[i] = Slot { row: d, col: d, y: k.slots[i].y.clone() };
                        pending.push((k2, -c.clone()));
                    }
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.r);
        }
        Chain { n: self.n, r: self.r, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn shift(&self, dh: i32, du: i32) -> Self {
        Chain {
            n: self.n,
            r: self.r,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (ChainKey { u: k.u + du, h: k.h + dh, slots: k.slots.clone() }, v.clone()))
                .collect(),
        }
    }

    /// Hochschild differential.
    pub fn hochschild_b(&self) -> Self {
        let mut out = Self::zero(self.n, self.r);
        for (k, c) in &self.terms {
            let p = k.slots.len() - 1;
            if p == 0 {
                continue;
            }
            // (-1)^p a_p a_0 ⊗ a_1 .. a_{p-1}
            for (dh, s, v) in slot_mul(self.n, &k.slots[p], &k.slots[0]) {
                let mut slots = vec![s];
                slots.extend_from_slice(&k.slots[1..p]);
                out.add_normalized(ChainKey { u: k.u, h: k.h + dh, slots }, c * v * sign(p % 2 == 1));
            }
            // Σ_{i=0}^{p-1} (-1)^i a_0 .. a_i a_{i+1} .. a_p
            for i in 0..p {
                for (dh, s, v) in slot_mul(self.n, &k.slots[i], &k.slots[i + 1]) {
                    let mut slots = k.slots[..i].to_vec();
                    slots.push(s);
                    slots.extend_from_slice(&k.slots[i + 2..]);
                    out.add_normalized(ChainKey { u: k.u, h: k.h + dh, slots }, c * v * sign(i % 2 == 1));
                }
            }
        }
        out
    }

    /// Connes operator.
    pub fn connes_b(&self) -> Self {
        let mut out = Self::zero(self.n, self.r);
        for (k, c) in &self.terms {
            let p = k.slots.len() - 1;
            for i in 0..=p {
                let sg = sign((p * i) % 2 == 1);
                for d in 0..self.r {
                    let mut slots = vec![Slot { row: d as u16, col: d as u16, y: vec![0; 2 * self.n] }];
                    slots.extend_from_slice(&k.slots[i..]);
                    slots.extend_from_slice(&k.slots[..i]);
                    out.add_normalized(ChainKey { u: k.u, h: k.h, slots }, c * &sg);
                }
            }
        }
        out
    }

    /// Periodic differential `b + uB`.
    pub fn periodic_differential(&self) -> Self {
        self.hochschild_b() + self.connes_b().shift(0, 1)
    }

    /// Adjoint action of `a` entry-wise: `Σ_α (.. ⊗ [a, O_α] ⊗ ..)`.
    pub fn act(&self, a: &Matrix) -> Result<Self> {
        if a.n() != self.n {
            return Err(Error::Dimension(self.n, a.n()));
        }
        if a.r() != self.r {
            return Err(Error::Rank(self.r, a.r()));
        }
        let mut out = Self::zero(self.n, self.r);
        for (k, c) in &self.terms {
            for i in 0..k.slots.len() {
                let br = a.bracket(&k.slots[i].to_matrix(self.n, self.r))?;
                for (dh, s, v) in expand_matrix(&br) {
                    let mut slots = k.slots.clone();
                    slots[i] = s;
                    out.add_normalized(ChainKey { u: k.u, h: k.h + dh, slots }, c * v);
                }
            }
        }
        Ok(out)
    }

    /// `ħ∂_ħ + 𝔼` applied entry-wise.
    pub fn nabla(&self) -> Self {
        let mut out = Self::zero(self.n, self.r);
        for (k, c) in &self.terms {
            let deg: u32 = k.slots.iter().map(|s| s.degree()).sum();
            let w = Q::from_integer(k.h.into()) + crate::rational::frac(deg as i64, 2);
            out.add_raw(k.clone(), c * w);
        }
        out
    }

    /// Splits into components with a fixed number of slots.
    pub fn by_length(&self) -> BTreeMap<usize, Chain> {
        let mut out: BTreeMap<usize, Chain> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(k.slots.len()).or_insert_with(|| Self::zero(self.n, self.r)).add_raw(k.clone(), c.clone());
        }
        out
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|k| k.slots.len()).max().unwrap_or(0)
    }
}

impl std::ops::Add for Chain {
    type Output = Chain;
    fn add(mut self, o: Chain) -> Chain {
        assert!(self.n == o.n && self.r == o.r);
        for (k, c) in o.terms {
            add_into(&mut self.terms, k, c);
        }
        self
    }
}

impl std::ops::Sub for Chain {
    type Output = Chain;
    fn sub(self, o: Chain) -> Chain {
        let neg = o.scale(&-Q::one());
        self + neg
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let head = fmt_term(c, k.h, k.u, &[], &[], i == 0);
            let parts: Vec<String> = k
                .slots
                .iter()
                .map(|s| {
                    let w = Weyl::term(self.n, Q::one(), 0, s.y.clone());
                    if self.r == 1 {
                        format!("({w})")
                    } else {
                        format!("E{}{}({w})", s.row + 1, s.col + 1)
                    }
                })
                .collect();
            write!(f, "{} [{}]", head, parts.join(" ⊗ "))?;
        }
        Ok(())
    }
}

/// All `(p,q)`-shuffles of two sequences.
pub fn shuffle_seq<T: Clone>(a: &[T], b: &[T]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return vec![b.to_vec()];
    }
    if b.is_empty() {
        return vec![a.to_vec()];
    }
    let mut out = Vec::new();
    for mut rest in shuffle_seq(&a[1..], b) {
        rest.insert(0, a[0].clone());
        out.push(rest);
    }
    for mut rest in shuffle_seq(a, &b[1..]) {
        rest.insert(0, b[0].clone());
        out.push(rest);
    }
    out
}

/// Tensors without a distinguished slot 0, used as shuffle operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    n: usize,
    r: usize,
    terms: BTreeMap<(i32, Vec<Slot>), Q>,
}

impl Block {
    pub fn empty(n: usize, r: usize) -> Self {
        let mut b = Block { n, r, terms: BTreeMap::new() };
        b.terms.insert((0, vec![]), Q::one());
        b
    }

    pub fn from_matrices(n: usize, r: usize, ms: &[Matrix]) -> Result<Self> {
        let mut acc: Vec<(i32, Vec<Slot>, Q)> = vec![(0, vec![], Q::one())];
        for m in ms {
            if m.n() != n {
                return Err(Error::Dimension(n, m.n()));
            }
            if m.r() != r {
                return Err(Error::Rank(r, m.r()));
            }
            let ex = expand_matrix(m);
            let mut next = Vec::new();
            for (h, s, c) in &acc {
                for (dh, sl, v) in &ex {
                    let mut s2 = s.clone();
                    s2.push(sl.clone());
                    next.push((h + dh, s2, c * v));
                }
            }
            acc = next;
        }
        let mut b = Block { n, r, terms: BTreeMap::new() };
        for (h, s, c) in acc {
            add_into(&mut b.terms, (h, s), c);
        }
        Ok(b)
    }

    pub fn terms(&self) -> &BTreeMap<(i32, Vec<Slot>), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut b = self.clone();
        for (k, c) in &o.terms {
            add_into(&mut b.terms, k.clone(), c.clone());
        }
        b
    }
}

/// Shuffle product of two blocks.
pub fn shuffle(s: &Block, t: &Block) -> Result<Block> {
    if s.n != t.n {
        return Err(Error::Dimension(s.n, t.n));
    }
    if s.r != t.r {
        return Err(Error::Rank(s.r, t.r));
    }
    let mut out = Block { n: s.n, r: s.r, terms: BTreeMap::new() };
    for ((h1, a), c1) in &s.terms {
        for ((h2, b), c2) in &t.terms {
            for w in shuffle_seq(a, b) {
                add_into(&mut out.terms, (h1 + h2, w), c1 * c2);
            }
        }
    }
    Ok(out)
}
