//! Exact integrals over cyclically ordered configurations of points on the
//! circle.
//!
//! With `m+1` points in cyclic order, `t_g` is the gap from point `g` to point
//! `g+1` (indices mod `m+1`) and the gaps sum to one. Polynomials are kept in
//! the `m` free gaps `t_0..t_{m-1}`; the last gap is eliminated.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::rational::{add_into, factorial, frac, q, Q};

/// `∫_{Δ_m} Π λ_i^{a_i} = Π a_i! / (m + Σ a_i)!`.
pub fn simplex_monomial_integral(m: usize, exps: &[i64]) -> Result<Q> {
    if exps.len() != m + 1 {
        return Err(Error::Invalid(format!("expected {} exponents, got {}", m + 1, exps.len())));
    }
    if let Some(e) = exps.iter().find(|&&e| e < 0) {
        return Err(Error::Invalid(format!("negative exponent {e}")));
    }
    let e: Vec<u32> = exps.iter().map(|&x| x as u32).collect();
    Ok(dirichlet(m, &e))
}

fn dirichlet(m: usize, e: &[u32]) -> Q {
    let num = e.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a));
    let s: u32 = e.iter().sum();
    Q::new(num, factorial(m as u32 + s))
}

/// Polynomial in the free gap coordinates of `Δ_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPoly {
    m: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl SimplexPoly {
    pub fn zero(m: usize) -> Self {
        SimplexPoly { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: Q) -> Self {
        let mut p = Self::zero(m);
        add_into(&mut p.terms, vec![0; m], c);
        p
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, Q::one())
    }

    pub fn gap(m: usize, g: usize) -> Self {
        let mut e = vec![0; m];
        e[g] = 1;
        let mut p = Self::zero(m);
        add_into(&mut p.terms, e, Q::one());
        p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (e, c) in &o.terms {
            add_into(&mut self.terms, e.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.m);
        }
        SimplexPoly { m: self.m, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.m);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                add_into(&mut out.terms, e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.m), |acc, _| acc.mul(self))
    }

    /// `∫_{Δ_m}` against the gap measure.
    pub fn integrate(&self) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut full = e.clone();
            full.push(0);
            s += c * dirichlet(self.m, &full);
        }
        s
    }
}

/// `P_{αβ}`: the anticlockwise distance from `α` to `β` minus one half.
pub fn propagator_polynomial(m: usize, alpha: usize, beta: usize) -> Result<SimplexPoly> {
    if alpha > m || beta > m {
        return Err(Error::Invalid(format!("point index out of range 0..={m}")));
    }
    if alpha == beta {
        return Err(Error::Invalid("propagator on the diagonal".into()));
    }
    let (lo, hi, s) = if alpha < beta { (alpha, beta, Q::one()) } else { (beta, alpha, -Q::one()) };
    let mut p = SimplexPoly::constant(m, frac(-1, 2));
    for g in lo..hi {
        p.add_assign(&SimplexPoly::gap(m, g));
    }
    Ok(p.scale(&s))
}

/// A multiset of directed propagator edges among `m+1` cyclically ordered points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatorPattern {
    pub m: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn pattern_integral(p: &PropagatorPattern) -> Result<Q> {
    let mut acc = SimplexPoly::one(p.m);
    for &(a, b) in &p.edges {
        acc = acc.mul(&propagator_polynomial(p.m, a, b)?);
    }
    Ok(acc.integrate())
}

/// Piecewise polynomial on `[0,1)` extended periodically, as coefficients in `x`.
fn convolve(f: &[Q], g: &[Q]) -> Vec<Q> {
    // (f*g)(x) = ∫_0^x f(y) g(x-y) dy + ∫_x^1 f(y) g(x-y+1) dy
    let deg = f.len() + g.len();
    let mut out = vec![Q::zero(); deg + 1];
    for (shift, lower) in [(0i64, true), (1i64, false)] {
        // g(x - y + shift) expanded as Σ c_{a,b} x^a y^b
        let mut bi: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (j, gj) in g.iter().enumerate() {
            if gj.is_zero() {
                continue;
            }
            // (x - y + s)^j
            for a in 0..=j {
                for b in 0..=(j - a) {
                    let c = j - a - b;
                    let coef = Q::from_integer(factorial(j as u32) / (factorial(a as u32) * factorial(b as u32) * factorial(c as u32)));
                    let sgn = if b % 2 == 1 { -Q::one() } else { Q::one() };
                    let sp = if c == 0 { Q::one() } else { q(shift.pow(c as u32)) };
                    let v = gj * coef * sgn * sp;
                    if !v.is_zero() {
                        add_into(&mut bi, (a, b), v);
                    }
                }
            }
        }
        for ((a, b), c) in &bi {
            for (i, fi) in f.iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                let e = b + i + 1;
                let w = c * fi / q(e as i64);
                if lower {
                    out[a + e] += &w;
                } else {
                    out[*a] += &w;
                    out[a + e] -= &w;
                }
            }
        }
    }
    out
}

/// `∫_{S¹[k]} P_12 P_23 ... P_k1`, computed as the k-fold circular
/// convolution of the propagator evaluated at zero.
pub fn wheel_coefficient(k: usize) -> Result<Q> {
    if k < 2 {
        return Err(Error::Invalid(format!("wheel needs k >= 2, got {k}")));
    }
    let p = vec![frac(-1, 2), Q::one()];
    let mut acc = p.clone();
    for _ in 1..k {
        acc = convolve(&acc, &p);
    }
    Ok(acc[0].clone())
}

/// The same wheel as a sum of pattern integrals over every cyclic order of
/// the points. Exponential in `k`; meant for cross-checks.
pub fn wheel_by_patterns(k: usize) -> Result<Q> {
    if k < 2 {
        return Err(Error::Invalid(format!("wheel needs k >= 2, got {k}")));
    }
    let mut total = Q::zero();
    let mut rest: Vec<usize> = (1..k).collect();
    permute(&mut rest, 0, &mut |perm| {
        let mut pos = vec![0; k];
        for (slot, &pt) in perm.iter().enumerate() {
            pos[pt] = slot + 1;
        }
        let edges = (0..k).map(|i| (pos[i], pos[(i + 1) % k])).collect();
        total += pattern_integral(&PropagatorPattern { m: k - 1, edges }).unwrap();
    });
    Ok(total)
}

fn permute(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_examples() {
        assert_eq!(simplex_monomial_integral(1, &[1, 0]).unwrap(), frac(1, 2));
        assert_eq!(simplex_monomial_integral(2, &[1, 1, 0]).unwrap(), frac(1, 24));
        assert_eq!(simplex_monomial_integral(0, &[0]).unwrap(), q(1));
        assert!(simplex_monomial_integral(1, &[-1, 0]).is_err());
    }

    #[test]
    fn propagators() {
        let p01 = propagator_polynomial(1, 0, 1).unwrap();
        assert_eq!(p01, SimplexPoly::gap(1, 0).clone_add(frac(-1, 2)));
        let p10 = propagator_polynomial(1, 1, 0).unwrap();
        assert_eq!(p10, p01.scale(&q(-1)));
        let p02 = propagator_polynomial(2, 0, 2).unwrap();
        let mut want = SimplexPoly::gap(2, 0);
        want.add_assign(&SimplexPoly::gap(2, 1));
        assert_eq!(p02, want.clone_add(frac(-1, 2)));
        assert!(propagator_polynomial(2, 1, 1).is_err());
    }

    impl SimplexPoly {
        fn clone_add(&self, c: Q) -> Self {
            let mut p = self.clone();
            p.add_assign(&SimplexPoly::constant(self.m, c));
            p
        }
    }

    #[test]
    fn patterns() {
        let pi = |m, e: &[(usize, usize)]| pattern_integral(&PropagatorPattern { m, edges: e.to_vec() }).unwrap();
        assert_eq!(pi(1, &[(0, 1)]), q(0));
        assert_eq!(pi(1, &[(0, 1), (1, 0)]), frac(-1, 12));
        assert_eq!(pi(2, &[]), frac(1, 2));
    }

    #[test]
    fn wheels() {
        assert_eq!(wheel_coefficient(2).unwrap(), frac(-1, 12));
        assert_eq!(wheel_coefficient(3).unwrap(), q(0));
        assert_eq!(wheel_coefficient(4).unwrap(), frac(1, 720));
        assert!(wheel_coefficient(1).is_err());
        for k in 2..=5 {
            assert_eq!(wheel_coefficient(k).unwrap(), wheel_by_patterns(k).unwrap(), "k = {k}");
        }
    }

    /// Bernoulli numbers from `Σ_{j<k} C(k+1, j) B_j = -(k+1) B_k`.
    fn bernoulli(max: usize) -> Vec<Q> {
        let mut b = vec![Q::one()];
        for k in 1..=max {
            let mut binom = Q::one();
            let mut acc = Q::zero();
            for (j, bj) in b.iter().enumerate() {
                acc += &binom * bj;
                binom = binom * q((k + 1 - j) as i64) / q((j + 1) as i64);
            }
            b.push(-acc / q((k + 1) as i64));
        }
        b
    }

    #[test]
    fn wheels_are_bernoulli_numbers() {
        let b = bernoulli(12);
        let mut fact = Q::one();
        for (k, bk) in b.iter().enumerate().skip(1) {
            fact *= q(k as i64);
            if k >= 2 {
                assert_eq!(wheel_coefficient(k).unwrap(), -bk / &fact, "k = {k}");
            }
        }
    }
}
