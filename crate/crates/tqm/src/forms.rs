//! Formal de Rham algebra `Ω̂^{-•}_2n` with the cyclic parameter `u`.
//!
//! A term is `c u^u ħ^h y^y dy^{i1} ... dy^{ik}` with `i1 < ... < ik` stored as
//! a bitmask. A p-form sits in degree `-p` and `u` in degree `+2`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{add_into, factorial, q, sign, Q};
use crate::weyl::{fmt_term, Mono, Weyl};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FKey {
    pub u: i32,
    pub h: i32,
    pub mask: u32,
    pub y: Vec<u32>,
}

impl FKey {
    pub fn form_degree(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn odd(&self) -> bool {
        self.mask.count_ones() % 2 == 1
    }

    pub fn y_degree(&self) -> u32 {
        self.y.iter().sum()
    }
}

fn below(mask: u32, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

/// Sign of `dy^A ∧ dy^B` relative to the sorted product.
pub fn wedge_sign(a: u32, b: u32) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut odd = false;
    let mut bb = b;
    while bb != 0 {
        let i = bb.trailing_zeros();
        odd ^= (a >> (i + 1)).count_ones() % 2 == 1;
        bb &= bb - 1;
    }
    Some(odd)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    n: usize,
    terms: BTreeMap<FKey, Q>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Form { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::term(n, Q::one(), FKey { u: 0, h: 0, mask: 0, y: vec![0; 2 * n] })
    }

    pub fn term(n: usize, c: Q, k: FKey) -> Self {
        assert_eq!(k.y.len(), 2 * n);
        let mut f = Self::zero(n);
        add_into(&mut f.terms, k, c);
        f
    }

    /// `dy^i` (zero based).
    pub fn dy(n: usize, i: usize) -> Self {
        Self::term(n, Q::one(), FKey { u: 0, h: 0, mask: 1 << i, y: vec![0; 2 * n] })
    }

    pub fn from_weyl(w: &Weyl) -> Self {
        let mut f = Self::zero(w.n());
        for (m, c) in w.terms() {
            add_into(&mut f.terms, FKey { u: 0, h: m.h, mask: 0, y: m.y.clone() }, c.clone());
        }
        f
    }

    /// The `dy`- and `u`-free part as a Weyl element.
    pub fn to_weyl(&self) -> Option<Weyl> {
        if self.terms.keys().any(|k| k.mask != 0 || k.u != 0) {
            return None;
        }
        Some(Weyl::from_terms(self.n, self.terms.iter().map(|(k, c)| (Mono { h: k.h, y: k.y.clone() }, c.clone()))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<FKey, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: FKey, c: Q) {
        add_into(&mut self.terms, k, c);
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        self.map_terms(|k, v| vec![(k.clone(), v * c)])
    }

    pub fn shift(&self, dh: i32, du: i32) -> Self {
        self.map_terms(|k, v| vec![(FKey { u: k.u + du, h: k.h + dh, mask: k.mask, y: k.y.clone() }, v.clone())])
    }

    fn map_terms(&self, f: impl Fn(&FKey, &Q) -> Vec<(FKey, Q)>) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            for (k2, c2) in f(k, c) {
                out.add_term(k2, c2);
            }
        }
        out
    }

    /// Left multiplication by `dy^i` on a term.
    fn dy_left(k: &FKey, i: usize) -> Option<(u32, bool)> {
        if k.mask & (1 << i) != 0 {
            return None;
        }
        Some((k.mask | (1 << i), below(k.mask, i) % 2 == 1))
    }

    /// De Rham differential `Σ dy^k ∂_k`, inserted from the left.
    pub fn d(&self) -> Self {
        self.map_terms(|k, c| {
            let mut v = Vec::new();
            for i in 0..2 * self.n {
                if k.y[i] == 0 {
                    continue;
                }
                if let Some((mask, odd)) = Self::dy_left(k, i) {
                    let mut y = k.y.clone();
                    y[i] -= 1;
                    v.push((FKey { u: k.u, h: k.h, mask, y }, c * q(k.y[i] as i64) * sign(odd)));
                }
            }
            v
        })
    }

    /// Contraction `ι_{∂_i}`, an odd derivation acting from the left.
    pub fn iota(&self, i: usize) -> Self {
        self.map_terms(|k, c| {
            if k.mask & (1 << i) == 0 {
                return vec![];
            }
            let odd = below(k.mask, i) % 2 == 1;
            vec![(FKey { u: k.u, h: k.h, mask: k.mask & !(1 << i), y: k.y.clone() }, c * sign(odd))]
        })
    }

    /// Lie derivative `L_{∂_i}`, i.e. `∂_i` on coefficients.
    pub fn lie(&self, i: usize) -> Self {
        self.map_terms(|k, c| {
            if k.y[i] == 0 {
                return vec![];
            }
            let mut y = k.y.clone();
            y[i] -= 1;
            vec![(FKey { u: k.u, h: k.h, mask: k.mask, y }, c * q(k.y[i] as i64))]
        })
    }

    /// `ι_Π = ½ ω̂^{ij} ι_i ι_j = Σ_a ι_{p_a} ι_{q_a}`.
    pub fn iota_pi(&self) -> Self {
        let n = self.n;
        (0..n).fold(Self::zero(n), |acc, a| acc + self.iota(n + a).iota(a))
    }

    /// `Δ = ω̂^{ij} L_i ι_j`.
    pub fn delta(&self) -> Self {
        let n = self.n;
        (0..n).fold(Self::zero(n), |acc, a| acc + self.iota(n + a).lie(a) - self.iota(a).lie(n + a))
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Dimension(self.n, o.n));
        }
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let Some(odd) = wedge_sign(a.mask, b.mask) else { continue };
                let y = a.y.iter().zip(&b.y).map(|(x, z)| x + z).collect();
                out.add_term(FKey { u: a.u + b.u, h: a.h + b.h, mask: a.mask | b.mask, y }, ca * cb * sign(odd));
            }
        }
        Ok(out)
    }

    /// Berezin/BV integration `σ(uⁿ e^{ħ ι_Π / u} ω)`.
    pub fn bv_integrate(&self) -> Scalar {
        let mut out = Scalar::zero();
        let mut cur = self.clone();
        let mut j = 0u32;
        while !cur.is_zero() {
            let jf = Q::from_integer(factorial(j));
            for (k, c) in &cur.terms {
                if k.mask == 0 && k.y_degree() == 0 {
                    out.add_term(k.h + j as i32, k.u + self.n as i32 - j as i32, c / &jf);
                }
            }
            cur = cur.iota_pi();
            j += 1;
        }
        out
    }

    /// `ħ∂_ħ + 𝔼`: each term scales by `h + (deg_y + deg_dy)/2`.
    pub fn nabla(&self) -> Self {
        self.map_terms(|k, c| {
            let w = Q::from_integer(k.h.into()) + crate::rational::frac((k.y_degree() + k.form_degree()) as i64, 2);
            vec![(k.clone(), c * w)]
        })
    }

    /// Homogeneous part of the given form degree.
    pub fn form_part(&self, p: u32) -> Self {
        self.map_terms(|k, c| if k.form_degree() == p { vec![(k.clone(), c.clone())] } else { vec![] })
    }
}

impl std::ops::Add for Form {
    type Output = Form;
    fn add(mut self, o: Form) -> Form {
        assert_eq!(self.n, o.n);
        for (k, c) in o.terms {
            add_into(&mut self.terms, k, c);
        }
        self
    }
}

impl std::ops::Sub for Form {
    type Output = Form;
    fn sub(self, o: Form) -> Form {
        self + (-o)
    }
}

impl std::ops::Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form { n: self.n, terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            write!(f, "{}", fmt_term(c, k.h, k.u, &k.y, &mask_indices(k.mask), i == 0))?;
        }
        Ok(())
    }
}

/// An element of `K = Q((ħ))[u, u⁻¹]`, keyed by `(ħ exponent, u exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scalar {
    terms: BTreeMap<(i32, i32), Q>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::mono(c, 0, 0)
    }

    pub fn mono(c: Q, h: i32, u: i32) -> Self {
        let mut s = Self::zero();
        s.add_term(h, u, c);
        s
    }

    pub fn add_term(&mut self, h: i32, u: i32, c: Q) {
        add_into(&mut self.terms, (h, u), c);
    }

    pub fn terms(&self) -> &BTreeMap<(i32, i32), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, h: i32, u: i32) -> Q {
        self.terms.get(&(h, u)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut s = Self::zero();
        for (&(h, u), v) in &self.terms {
            s.add_term(h, u, v * c);
        }
        s
    }

    pub fn shift(&self, dh: i32, du: i32) -> Self {
        Scalar { terms: self.terms.iter().map(|(&(h, u), c)| ((h + dh, u + du), c.clone())).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero();
        for (&(h1, u1), c1) in &self.terms {
            for (&(h2, u2), c2) in &o.terms {
                s.add_term(h1 + h2, u1 + u2, c1 * c2);
            }
        }
        s
    }

    /// `ħ∂_ħ`.
    pub fn nabla(&self) -> Self {
        let mut s = Self::zero();
        for (&(h, u), c) in &self.terms {
            s.add_term(h, u, c * q(h as i64));
        }
        s
    }

    /// Terms with the lowest `ħ` exponent.
    pub fn leading_hbar(&self) -> Self {
        let Some(min) = self.terms.keys().map(|k| k.0).min() else { return Self::zero() };
        Scalar { terms: self.terms.iter().filter(|(k, _)| k.0 == min).map(|(k, c)| (*k, c.clone())).collect() }
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(mut self, o: Scalar) -> Scalar {
        for ((h, u), c) in o.terms {
            self.add_term(h, u, c);
        }
        self
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self + o.scale(&-Q::one())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(h, u), c)) in self.terms.iter().enumerate() {
            write!(f, "{}", fmt_term(c, h, u, &[], &[], i == 0))?;
        }
        Ok(())
    }
}

/// Elementary tensor slot: a single form monomial with unit coefficient.
pub type Slot = FKey;

/// Formal sums of ordered tensors `ω_1 ⊗ ... ⊗ ω_k` of form monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormTensor {
    n: usize,
    terms: BTreeMap<Vec<Slot>, Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorOp {
    D,
    IotaPi,
    Delta,
}

impl FormTensor {
    pub fn zero(n: usize) -> Self {
        FormTensor { n, terms: BTreeMap::new() }
    }

    /// The multilinear expansion of `f_1 ⊗ ... ⊗ f_k`.
    pub fn from_factors(factors: &[Form]) -> Result<Self> {
        let n = factors.first().map(|f| f.n).ok_or_else(|| Error::Invalid("empty tensor".into()))?;
        let mut acc: Vec<(Vec<Slot>, Q)> = vec![(vec![], Q::one())];
        for f in factors {
            if f.n != n {
                return Err(Error::Dimension(n, f.n));
            }
            let mut next = Vec::new();
            for (s, c) in &acc {
                for (k, v) in &f.terms {
                    let mut s2 = s.clone();
                    s2.push(k.clone());
                    next.push((s2, c * v));
                }
            }
            acc = next;
        }
        let mut t = Self::zero(n);
        for (s, c) in acc {
            add_into(&mut t.terms, s, c);
        }
        Ok(t)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Slot>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, s: Vec<Slot>, c: Q) {
        add_into(&mut self.terms, s, c);
    }

    /// Applies a single-slot form operator at slot `at` with Koszul sign
    /// `(-1)^{parity(op)·Σ_{β<at}|ω_β|}`.
    fn slot_op(&self, at: usize, odd_op: bool, op: impl Fn(&Form) -> Form) -> Self {
        let mut out = Self::zero(self.n);
        for (s, c) in &self.terms {
            let before: u32 = s[..at].iter().map(|k| k.form_degree()).sum();
            let sg = sign(odd_op && before % 2 == 1);
            let img = op(&Form::term(self.n, Q::one(), s[at].clone()));
            for (k, v) in img.terms {
                let mut s2 = s.clone();
                s2[at] = k;
                out.add_term(s2, c * &v * &sg);
            }
        }
        out
    }

    fn total_iota(&self, i: usize) -> Self {
        let len = self.len();
        (0..len).fold(Self::zero(self.n), |acc, a| acc + self.slot_op(a, true, |f| f.iota(i)))
    }

    fn total_lie(&self, i: usize) -> Self {
        let len = self.len();
        (0..len).fold(Self::zero(self.n), |acc, a| acc + self.slot_op(a, false, |f| f.lie(i)))
    }

    fn len(&self) -> usize {
        self.terms.keys().next().map(|s| s.len()).unwrap_or(0)
    }

    /// `d`, `ι_Π` or `Δ` on the tensor product, with cross-slot contractions.
    pub fn apply(&self, op: TensorOp) -> Self {
        let n = self.n;
        match op {
            TensorOp::D => (0..self.len()).fold(Self::zero(n), |acc, a| acc + self.slot_op(a, true, Form::d)),
            TensorOp::IotaPi => (0..n).fold(Self::zero(n), |acc, a| acc + self.total_iota(n + a).total_iota(a)),
            TensorOp::Delta => (0..n).fold(Self::zero(n), |acc, a| {
                acc + self.total_iota(n + a).total_lie(a) - self.total_iota(a).total_lie(n + a)
            }),
        }
    }

    /// Multiplies the slots left to right.
    pub fn multiply(&self) -> Form {
        let mut out = Form::zero(self.n);
        for (s, c) in &self.terms {
            let prod = s.iter().fold(Form::one(self.n), |acc, k| acc.wedge(&Form::term(self.n, Q::one(), k.clone())).unwrap());
            out = out + prod.scale(c);
        }
        out
    }
}

impl std::ops::Add for FormTensor {
    type Output = FormTensor;
    fn add(mut self, o: FormTensor) -> FormTensor {
        for (s, c) in o.terms {
            add_into(&mut self.terms, s, c);
        }
        self
    }
}

impl std::ops::Sub for FormTensor {
    type Output = FormTensor;
    fn sub(mut self, o: FormTensor) -> FormTensor {
        for (s, c) in o.terms {
            add_into(&mut self.terms, s, -c);
        }
        self
    }
}

/// `d`, `ι_Π` or `Δ` on a tensor of forms.
pub fn tensor_apply(op: TensorOp, t: &FormTensor) -> FormTensor {
    t.apply(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn key(y: [u32; 2], mask: u32) -> FKey {
        FKey { u: 0, h: 0, mask, y: y.to_vec() }
    }
    fn t(c: i64, y: [u32; 2], mask: u32) -> Form {
        Form::term(1, q(c), key(y, mask))
    }

    #[test]
    fn de_rham() {
        assert_eq!(t(1, [1, 1], 0).d(), t(1, [0, 1], 1) + t(1, [1, 0], 2));
        assert!(Form::one(1).d().is_zero());
        assert_eq!(t(1, [0, 1], 1).d(), t(-1, [0, 0], 3));
    }

    #[test]
    fn contraction() {
        assert_eq!(t(1, [0, 0], 3).iota_pi(), t(-1, [0, 0], 0));
        assert!(t(1, [1, 0], 0).iota_pi().is_zero());
        assert!(t(1, [0, 0], 1).iota_pi().is_zero());
    }

    #[test]
    fn bv_operator() {
        assert_eq!(t(1, [1, 0], 2).delta(), Form::one(1));
        assert!(t(1, [1, 1], 0).delta().is_zero());
        assert!(t(1, [0, 1], 2).delta().is_zero());
    }

    #[test]
    fn bv_integration() {
        assert_eq!(Form::one(1).bv_integrate(), Scalar::mono(q(1), 0, 1));
        assert_eq!(t(1, [0, 0], 3).bv_integrate(), Scalar::mono(q(-1), 1, 0));
        assert!(t(1, [1, 0], 1).bv_integrate().is_zero());
        assert_eq!(Form::one(2).bv_integrate(), Scalar::mono(q(1), 0, 2));
    }

    #[test]
    fn tensor_examples() {
        let p = t(1, [1, 0], 0);
        let qv = t(1, [0, 1], 0);
        let dy1 = t(1, [0, 0], 1);
        let dy2 = t(1, [0, 0], 2);
        let pq = FormTensor::from_factors(&[p.clone(), qv.clone()]).unwrap();
        let want = FormTensor::from_factors(&[dy1.clone(), qv.clone()]).unwrap()
            + FormTensor::from_factors(&[p.clone(), dy2.clone()]).unwrap();
        assert_eq!(pq.apply(TensorOp::D), want);
        let t2 = FormTensor::from_factors(&[dy1.clone(), qv]).unwrap();
        let want2 = FormTensor::from_factors(&[dy1, dy2]).unwrap();
        assert_eq!(t2.apply(TensorOp::D), FormTensor::zero(1) - want2);
        assert!(pq.apply(TensorOp::Delta).is_zero());
    }

    #[test]
    fn nabla_weights() {
        let p = t(1, [1, 0], 0);
        assert_eq!(p.nabla(), p.scale(&frac(1, 2)));
        let hb = Form::term(1, q(1), FKey { u: 0, h: 1, mask: 0, y: vec![0, 0] });
        assert_eq!(hb.nabla(), hb);
        let flat = Form::term(1, q(1), FKey { u: 0, h: -1, mask: 0, y: vec![2, 0] });
        assert!(flat.nabla().is_zero());
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b01, 0b01), None);
        let a = t(1, [0, 0], 2);
        let b = t(1, [0, 0], 1);
        assert_eq!(a.wedge(&b).unwrap(), t(-1, [0, 0], 3));
    }
}
