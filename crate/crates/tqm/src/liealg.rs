//! The pair `(g, h)` with `g = W⁺·Id + ħ gl_r(W⁺)` and
//! `h = sp_2n ⊕ ħ gl_r ⊕ C ⊕_{i>1} ħ^i C`, the projection `pr`, its curvature,
//! Chevalley–Eilenberg differentials evaluated pointwise, and the `Â` and
//! Chern character cochains.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::{Form, Scalar};
use crate::rational::{factorial, q, sign, Q};
use crate::weyl::{Matrix, Mono, Weyl};

/// A matrix certified to lie in `g`, with its decomposition `f·Id + ħA`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    mat: Matrix,
    f: Weyl,
}

impl LieElement {
    pub fn new(mat: Matrix) -> Result<Self> {
        if !mat.is_plus() {
            return Err(Error::NotInG(format!("negative ħ power in {mat}")));
        }
        let f = mat.get(0, 0).filter(|m| m.h == 0);
        for (i, j, w) in mat.entries() {
            let zero_order = w.filter(|m| m.h == 0);
            let want = if i == j { f.clone() } else { Weyl::zero(mat.n()) };
            if zero_order != want {
                return Err(Error::NotInG(format!("ħ⁰ part is not scalar in {mat}")));
            }
        }
        Ok(LieElement { mat, f })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    /// The scalar `f` in `f·Id + ħA`.
    pub fn scalar_part(&self) -> &Weyl {
        &self.f
    }

    /// `ħA`.
    pub fn hbar_part(&self) -> Matrix {
        self.mat.clone() - Matrix::scalar(self.mat.r(), self.f.clone())
    }
}

/// `pr(a) = (sp, gl, constant, higher)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HDecomposition {
    /// `½ ∂_i∂_j f(0) y^i y^j`.
    pub sp: Weyl,
    /// `ħ A_1(0)`.
    pub gl: Matrix,
    /// `f(0)`.
    pub constant: Q,
    /// `Σ_{i>1} (1/r) tr(ħ^i A_i(0))`.
    pub higher: Weyl,
}

impl HDecomposition {
    pub fn embed(&self) -> Matrix {
        let r = self.gl.r();
        let n = self.gl.n();
        let scalar = self.sp.clone() + Weyl::constant(n, self.constant.clone()) + self.higher.clone();
        Matrix::scalar(r, scalar) + self.gl.clone()
    }

    /// The central part `pr₃` as a pure-ħ scalar.
    pub fn central(&self) -> Weyl {
        Weyl::constant(self.sp.n(), self.constant.clone()) + self.higher.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.sp.is_zero() && self.gl.is_zero() && self.constant.is_zero() && self.higher.is_zero()
    }
}

pub fn pr(a: &Matrix) -> Result<HDecomposition> {
    let le = LieElement::new(a.clone())?;
    let n = a.n();
    let r = a.r();
    let sp = le.f.filter(|m| m.degree() == 2);
    let constant = le.f.coeff(0, &vec![0; 2 * n]);
    let gl = a.map(|w| w.filter(|m| m.h == 1 && m.degree() == 0));
    let mut higher = Weyl::zero(n);
    let rq = q(r as i64);
    for i in 0..r {
        for (m, c) in a.get(i, i).terms() {
            if m.h >= 2 && m.degree() == 0 {
                higher.add_term(m.clone(), c / &rq);
            }
        }
    }
    Ok(HDecomposition { sp, gl, constant, higher })
}

pub fn is_in_h(a: &Matrix) -> Result<bool> {
    Ok(pr(a)?.embed() == *a)
}

/// `γ̂(a) = a - pr(a)`.
pub fn gamma_hat(a: &Matrix) -> Result<Matrix> {
    Ok(a.clone() - pr(a)?.embed())
}

/// `R = pr[a,b] - [pr a, pr b]` split into its three components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    pub r1: Weyl,
    pub r2: Matrix,
    pub r3: Weyl,
}

pub fn curvature(a: &Matrix, b: &Matrix) -> Result<Curvature> {
    let ab = a.bracket(b)?;
    let pa = pr(a)?.embed();
    let pb = pr(b)?.embed();
    let x = pr(&ab)?.embed() - pa.bracket(&pb)?;
    let d = pr(&x)?;
    Ok(Curvature { r1: d.sp.clone(), r2: d.gl.clone(), r3: d.central() })
}

/// Square rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub dim: usize,
    pub e: Vec<Q>,
}

impl QMat {
    pub fn zero(dim: usize) -> Self {
        QMat { dim, e: vec![Q::zero(); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.e[i * self.dim + j]
    }

    pub fn trace(&self) -> Q {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.e[i * d + j] += a * o.get(k, j);
                }
            }
        }
        out
    }
}

/// The `2n×2n` matrix of `ad_Q` on the linear span of `y`: `[Q, y^j] = Σ_i M_ij y^i`.
pub fn sp_matrix(quad: &Weyl) -> Result<QMat> {
    let n = quad.n();
    let dim = 2 * n;
    let mut m = QMat::zero(dim);
    for j in 0..dim {
        let br = quad.bracket(&Weyl::y(n, j))?;
        for (mono, c) in br.terms() {
            if mono.h != 0 || mono.degree() != 1 {
                return Err(Error::Invalid(format!("{quad} is not quadratic")));
            }
            let i = mono.y.iter().position(|&e| e == 1).unwrap();
            m.e[i * dim + j] = c.clone();
        }
    }
    Ok(m)
}

/// The r×r constant matrix `C` with `M = ħ C`.
fn hbar_constant(m: &Matrix) -> QMat {
    let r = m.r();
    let zero = vec![0; 2 * m.n()];
    QMat { dim: r, e: m.entries().map(|(_, _, w)| w.coeff(1, &zero)).collect() }
}

/// Coefficients `b_2, b_4, ..., b_2k` of `log(sinh y / y) = Σ b_{2j} y^{2j}`.
pub fn log_sinh_series(k: usize) -> Vec<Q> {
    // s(z) = Σ z^j/(2j+1)!, L = log s, s L' = s' in z = y²
    let s: Vec<Q> = (0..=k).map(|j| Q::new(1.into(), factorial(2 * j as u32 + 1))).collect();
    let mut c = vec![Q::zero(); k + 1];
    for j in 1..=k {
        let mut v = q(j as i64) * &s[j];
        for i in 1..j {
            v -= q(i as i64) * &c[i] * &s[j - i];
        }
        c[j] = v / q(j as i64);
    }
    c[1..].to_vec()
}

/// Coefficient of `tr(R₁^{2k})` in `log Â = -½ Σ_k b_{2k} 2^{-2k} tr(R₁^{2k})`.
pub fn ahat_log_coefficient(k: usize) -> Q {
    assert!(k >= 1);
    let b = &log_sinh_series(k)[k - 1];
    -b * Q::new(1.into(), num::BigInt::from(2) * num::BigInt::from(4).pow(k as u32))
}

/// Values that cochains can take.
pub trait Value: Clone {
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
}

impl Value for Scalar {
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn scale(&self, c: &Q) -> Self {
        Scalar::scale(self, c)
    }
}

impl Value for Form {
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn scale(&self, c: &Q) -> Self {
        Form::scale(self, c)
    }
}

impl Value for Matrix {
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn scale(&self, c: &Q) -> Self {
        Matrix::scale(self, c)
    }
}

impl Value for Q {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    /// `g` acts trivially on values.
    Trivial,
    /// `g` acts on `gl_r(W)` values by the bracket.
    Adjoint,
}

fn without(args: &[Matrix], skip: &[usize]) -> Vec<Matrix> {
    args.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, a)| a.clone()).collect()
}

/// A module action `ρ(a)` applied to the cochain evaluated at the remaining args.
pub type Rho<'a, V> = dyn Fn(&Matrix, &[Matrix]) -> Result<V> + 'a;

/// `(∂α)(a_1..a_{k+1}) = Σ_i (-1)^{i-1} ρ(a_i) α(..â_i..)
///   + Σ_{i<j} (-1)^{i+j} α([a_i,a_j], ..â_i..â_j..)`,
/// with the action term supplied as `rho(a_i, remaining args)`.
pub fn ce_differential_with<V: Value>(
    alpha: &dyn Fn(&[Matrix]) -> Result<V>,
    args: &[Matrix],
    rho: Option<&Rho<V>>,
) -> Result<V> {
    if args.is_empty() {
        return Err(Error::Invalid("the differential needs at least one argument".into()));
    }
    let mut acc: Option<V> = None;
    let mut push = |v: V, c: Q| {
        let v = v.scale(&c);
        acc = Some(match acc.take() {
            None => v,
            Some(a) => a.add(&v),
        });
    };
    if let Some(rho) = rho {
        for i in 0..args.len() {
            push(rho(&args[i], &without(args, &[i]))?, sign(i % 2 == 1));
        }
    }
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            let mut rest = vec![args[i].bracket(&args[j])?];
            rest.extend(without(args, &[i, j]));
            // (-1)^{i+j} with one-based positions equals (-1)^{i+j} zero based
            push(alpha(&rest)?, sign((i + j) % 2 == 1));
        }
    }
    match acc {
        Some(v) => Ok(v),
        // a single argument with trivial action: only the zero cochain remains
        None => Ok(alpha(&[])?.scale(&Q::zero())),
    }
}

pub fn ce_differential_eval_matrix(
    alpha: &dyn Fn(&[Matrix]) -> Result<Matrix>,
    args: &[Matrix],
    action: Action,
) -> Result<Matrix> {
    match action {
        Action::Trivial => ce_differential_with(alpha, args, None),
        Action::Adjoint => {
            let rho = |a: &Matrix, rest: &[Matrix]| a.bracket(&alpha(rest)?);
            ce_differential_with(alpha, args, Some(&rho))
        }
    }
}

/// The differential for values with trivial `g`-action.
pub fn ce_differential_eval<V: Value>(alpha: &dyn Fn(&[Matrix]) -> Result<V>, args: &[Matrix]) -> Result<V> {
    ce_differential_with(alpha, args, None)
}

/// A cochain evaluated on every sub-list of a fixed argument list, keyed by
/// the bitmask of the sub-list (arguments kept in their original order).
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T> {
    pub len: usize,
    pub values: BTreeMap<u32, T>,
}

/// Ring operations needed for cochain products.
pub trait Ring: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;
    fn is_zero(&self) -> bool;
}

impl Ring for Scalar {
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn mul(&self, o: &Self) -> Self {
        Scalar::mul(self, o)
    }
    fn scale(&self, c: &Q) -> Self {
        Scalar::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Ring for QMat {
    fn add(&self, o: &Self) -> Self {
        QMat { dim: self.dim, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        QMat::mul(self, o)
    }
    fn scale(&self, c: &Q) -> Self {
        QMat { dim: self.dim, e: self.e.iter().map(|a| a * c).collect() }
    }
    fn is_zero(&self) -> bool {
        self.e.iter().all(|a| a.is_zero())
    }
}

impl<T: Ring> Cochain<T> {
    pub fn empty(len: usize) -> Self {
        Cochain { len, values: BTreeMap::new() }
    }

    pub fn degree0(len: usize, v: T) -> Self {
        let mut c = Self::empty(len);
        c.values.insert(0, v);
        c
    }

    pub fn insert(&mut self, mask: u32, v: T) {
        if v.is_zero() {
            return;
        }
        let cur = self.values.remove(&mask);
        let v = match cur {
            None => v,
            Some(c) => c.add(&v),
        };
        if !v.is_zero() {
            self.values.insert(mask, v);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.clone();
        for (m, v) in &o.values {
            c.insert(*m, v.clone());
        }
        c
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut c = Self::empty(self.len);
        for (m, v) in &self.values {
            c.insert(*m, v.scale(s));
        }
        c
    }

    /// Shuffle product `(α∧β)(a) = Σ_{σ∈Sh} sign(σ) α(a_σ..) β(a_σ..)`.
    pub fn wedge(&self, o: &Self) -> Self {
        let mut c = Self::empty(self.len);
        for (ma, va) in &self.values {
            for (mb, vb) in &o.values {
                if ma & mb != 0 {
                    continue;
                }
                let mut inv = 0u32;
                for i in 0..self.len {
                    if mb & (1 << i) != 0 {
                        inv += (ma >> (i + 1)).count_ones();
                    }
                }
                c.insert(ma | mb, va.mul(vb).scale(&sign(inv % 2 == 1)));
            }
        }
        c
    }

    /// `exp(x)` for `x` without degree-0 part.
    pub fn exp(&self, one: T) -> Self {
        let mut out = Self::degree0(self.len, one.clone());
        let mut power = Self::degree0(self.len, one);
        for k in 1..=self.len {
            power = power.wedge(self).scale(&Q::new(1.into(), (k as i64).into()));
            if power.values.is_empty() {
                break;
            }
            out = out.add(&power);
        }
        out
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Cochain<U> {
        let mut c = Cochain::empty(self.len);
        for (m, v) in &self.values {
            c.insert(*m, f(v));
        }
        c
    }

    pub fn top(&self) -> Option<&T> {
        self.values.get(&((1u32 << self.len) - 1))
    }
}

/// Scales the degree-`p` part by `u^{-p/2}`.
pub fn u_rescale(c: &Cochain<Scalar>) -> Cochain<Scalar> {
    let mut out = Cochain::empty(c.len);
    for (m, v) in &c.values {
        let p = m.count_ones() as i32;
        assert!(p % 2 == 0, "u-rescaling needs even degrees");
        out.insert(*m, v.shift(0, -p / 2));
    }
    out
}

/// A 2-cochain from its values on ordered pairs.
pub fn two_cochain<T: Ring>(args: &[Matrix], f: impl Fn(&Matrix, &Matrix) -> Result<T>) -> Result<Cochain<T>> {
    let mut c = Cochain::empty(args.len());
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            c.insert((1 << i) | (1 << j), f(&args[i], &args[j])?);
        }
    }
    Ok(c)
}

fn check_args(args: &[Matrix]) -> Result<(usize, usize)> {
    let first = args.first().ok_or_else(|| Error::Invalid("no arguments".into()))?;
    for a in args {
        LieElement::new(a.clone())?;
        if a.n() != first.n() {
            return Err(Error::Dimension(first.n(), a.n()));
        }
        if a.r() != first.r() {
            return Err(Error::Rank(first.r(), a.r()));
        }
    }
    Ok((first.n(), first.r()))
}

fn trace_powers(r: &Cochain<QMat>, max: usize, step: usize) -> Vec<(usize, Cochain<Scalar>)> {
    let dim = r.values.values().next().map(|m| m.dim).unwrap_or(0);
    let mut out = Vec::new();
    let mut power = Cochain::degree0(r.len, QMat { dim, e: (0..dim * dim).map(|k| if k % (dim + 1) == 0 { Q::one() } else { Q::zero() }).collect() });
    let mut k = 0;
    while 2 * (k + step) <= max {
        for _ in 0..step {
            power = power.wedge(r);
        }
        k += step;
        out.push((k, power.map(|m| Scalar::constant(m.trace()))));
    }
    out
}

/// `Â = exp(Σ_k c_k tr(R₁^{2k}))` as a cochain on the given arguments.
pub fn ahat_cochain(args: &[Matrix]) -> Result<Cochain<Scalar>> {
    let (n, _) = check_args(args)?;
    let r1 = two_cochain(args, |a, b| sp_matrix(&curvature(a, b)?.r1))?;
    if r1.values.is_empty() {
        return Ok(Cochain::degree0(args.len(), Scalar::constant(Q::one())));
    }
    let _ = n;
    let mut log = Cochain::empty(args.len());
    for (p, tr) in trace_powers(&r1, args.len(), 2) {
        log = log.add(&tr.scale(&ahat_log_coefficient(p / 2)));
    }
    Ok(log.exp(Scalar::constant(Q::one())))
}

/// `tr exp(F)` for the gl_r curvature `F = -R₂/ħ`.
pub fn chern_cochain(args: &[Matrix]) -> Result<Cochain<Scalar>> {
    let (_, r) = check_args(args)?;
    let f = two_cochain(args, |a, b| Ok(hbar_constant(&curvature(a, b)?.r2).scale(&-Q::one())))?;
    let mut out = Cochain::degree0(args.len(), Scalar::constant(q(r as i64)));
    if f.values.is_empty() {
        return Ok(out);
    }
    for (k, tr) in trace_powers(&f, args.len(), 1) {
        out = out.add(&tr.scale(&Q::new(1.into(), factorial(k as u32))));
    }
    Ok(out)
}

/// `R₃` as a K-valued 2-cochain.
pub fn r3_cochain(args: &[Matrix]) -> Result<Cochain<Scalar>> {
    two_cochain(args, |a, b| Ok(pure_hbar_scalar(&curvature(a, b)?.r3)))
}

pub fn pure_hbar_scalar(w: &Weyl) -> Scalar {
    let mut s = Scalar::zero();
    for (m, c) in w.terms() {
        assert_eq!(m.degree(), 0);
        s.add_term(m.h, 0, c.clone());
    }
    s
}

/// Top-degree value of `Â` on an even number of arguments.
pub fn ahat_eval(args: &[Matrix]) -> Result<Q> {
    if args.len() % 2 == 1 {
        return Err(Error::Invalid("odd number of arguments".into()));
    }
    if args.is_empty() {
        return Ok(Q::one());
    }
    Ok(ahat_cochain(args)?.top().map(|s| s.get(0, 0)).unwrap_or_else(Q::zero))
}

/// Top-degree value of `Σ_k tr(R₂^k)/k!` with `R₂ ∈ ħ gl_r` kept as is.
pub fn ch_eval(args: &[Matrix]) -> Result<Scalar> {
    if args.len() % 2 == 1 {
        return Err(Error::Invalid("odd number of arguments".into()));
    }
    if args.is_empty() {
        return Err(Error::Invalid("degree 0 needs the rank; use chern_cochain".into()));
    }
    let (n, r) = check_args(args)?;
    let _ = n;
    let r2 = two_cochain(args, |a, b| {
        let m = curvature(a, b)?.r2;
        Ok(MatK { r, e: m.entries().map(|(_, _, w)| pure_hbar_scalar(w)).collect() })
    })?;
    let k = args.len() / 2;
    let mut power = Cochain::degree0(args.len(), MatK::identity(r));
    for _ in 0..k {
        power = power.wedge(&r2);
    }
    Ok(power.top().map(|m| m.trace().scale(&Q::new(1.into(), factorial(k as u32)))).unwrap_or_default())
}

/// r×r matrix over K, used for curvature powers that keep their ħ.
#[derive(Clone, Debug, PartialEq)]
struct MatK {
    r: usize,
    e: Vec<Scalar>,
}

impl MatK {
    fn identity(r: usize) -> Self {
        MatK { r, e: (0..r * r).map(|k| if k % (r + 1) == 0 { Scalar::constant(Q::one()) } else { Scalar::zero() }).collect() }
    }
    fn trace(&self) -> Scalar {
        (0..self.r).fold(Scalar::zero(), |acc, i| acc + self.e[i * self.r + i].clone())
    }
}

impl Ring for MatK {
    fn add(&self, o: &Self) -> Self {
        MatK { r: self.r, e: self.e.iter().zip(&o.e).map(|(a, b)| a.clone() + b.clone()).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let r = self.r;
        let mut e = vec![Scalar::zero(); r * r];
        for i in 0..r {
            for k in 0..r {
                for j in 0..r {
                    let t = self.e[i * r + k].mul(&o.e[k * r + j]);
                    e[i * r + j] = e[i * r + j].clone() + t;
                }
            }
        }
        MatK { r, e }
    }
    fn scale(&self, c: &Q) -> Self {
        MatK { r: self.r, e: self.e.iter().map(|a| a.scale(c)).collect() }
    }
    fn is_zero(&self) -> bool {
        self.e.iter().all(|a| a.is_zero())
    }
}

/// Quadratic part helper used by samplers and tests.
pub fn quadratic(n: usize, coeffs: &[(usize, usize, Q)]) -> Weyl {
    let mut w = Weyl::zero(n);
    for (i, j, c) in coeffs {
        let mut y = vec![0; 2 * n];
        y[*i] += 1;
        y[*j] += 1;
        w.add_term(Mono { h: 0, y }, c.clone());
    }
    w
}
