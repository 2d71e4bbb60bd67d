//! Seeded random inputs and the identity suites run by `verify`.

use std::fmt;

use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclic::{shuffle, Block, Chain};
use crate::error::{Error, Result};
use crate::expectation::{free_expectation, interacting_expectation};
use crate::forms::{FKey, Form, FormTensor, TensorOp};
use crate::liealg::ce_differential_with;
use crate::rational::{q, Q};
use crate::trace::{cocycle_residual, gm_residual, universal_trace};
use crate::weyl::{Matrix, Mono, Weyl};

/// Random homogeneous inputs with small integer coefficients.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    pub n: usize,
    pub r: usize,
    pub max_weight: u32,
}

impl Sampler {
    pub fn new(seed: u64, n: usize, r: usize, max_weight: u32) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), n, r, max_weight }
    }

    pub fn coeff(&mut self) -> Q {
        let c = self.rng.gen_range(1..=3);
        q(if self.rng.gen_bool(0.5) { c } else { -c })
    }

    fn exponents(&mut self, degree: u32, vars: usize) -> Vec<u32> {
        let mut y = vec![0; vars];
        for _ in 0..degree {
            y[self.rng.gen_range(0..vars)] += 1;
        }
        y
    }

    /// A nonzero element with every term of the given weight.
    pub fn homogeneous(&mut self, weight: u32) -> Weyl {
        let n = self.n;
        loop {
            let mut w = Weyl::zero(n);
            for _ in 0..self.rng.gen_range(1..=3) {
                let h = self.rng.gen_range(0..=weight / 2);
                let y = self.exponents(weight - 2 * h, 2 * n);
                w.add_term(Mono { h: h as i32, y }, self.coeff());
            }
            if !w.is_zero() {
                return w;
            }
        }
    }

    pub fn weyl(&mut self) -> Weyl {
        let w = self.rng.gen_range(0..=self.max_weight);
        self.homogeneous(w)
    }

    /// A nonzero matrix whose entries share one weight.
    pub fn matrix(&mut self) -> Matrix {
        let w = self.rng.gen_range(0..=self.max_weight);
        self.matrix_of_weight(w)
    }

    pub fn matrix_of_weight(&mut self, w: u32) -> Matrix {
        let r = self.r;
        loop {
            let mut m = Matrix::zero(self.n, r);
            for i in 0..r {
                for j in 0..r {
                    if r == 1 || self.rng.gen_bool(0.5) {
                        m.set(i, j, self.homogeneous(w));
                    }
                }
            }
            if !m.is_zero() {
                return m;
            }
        }
    }

    /// `f·Id + ħA` with `f` a sum of up to two weights, each at least one.
    pub fn g_element(&mut self) -> Matrix {
        let n = self.n;
        let mut f = Weyl::zero(n);
        for _ in 0..self.rng.gen_range(1..=2) {
            let w = self.rng.gen_range(1..=self.max_weight.max(1));
            f = f + self.homogeneous(w);
        }
        if f.filter(|m| m.h == 0).is_zero() {
            f = f + Weyl::y(n, self.rng.gen_range(0..2 * n));
        }
        let mut m = Matrix::scalar(self.r, f);
        if self.r > 1 && self.rng.gen_bool(0.7) {
            let i = self.rng.gen_range(0..self.r);
            let j = self.rng.gen_range(0..self.r);
            let wa = self.rng.gen_range(0..self.max_weight.max(1));
            let a = self.homogeneous(wa).shift_hbar(1);
            let mut e = Matrix::zero(n, self.r);
            e.set(i, j, a);
            m = m + e;
        }
        m
    }

    /// A random element of `h`.
    pub fn h_element(&mut self) -> Matrix {
        let n = self.n;
        let mut sp = Weyl::zero(n);
        for _ in 0..self.rng.gen_range(1..=2) {
            let y = self.exponents(2, 2 * n);
            sp.add_term(Mono { h: 0, y }, self.coeff());
        }
        let mut m = Matrix::scalar(self.r, sp + Weyl::constant(n, self.coeff()) + Weyl::hbar(n, 2).scale(&self.coeff()));
        if self.r > 1 {
            let i = self.rng.gen_range(0..self.r);
            let j = self.rng.gen_range(0..self.r);
            let mut e = Matrix::zero(n, self.r);
            e.set(i, j, Weyl::hbar(n, 1).scale(&self.coeff()));
            m = m + e;
        }
        m
    }

    pub fn chain(&mut self, max_len: usize) -> Chain {
        let len = self.rng.gen_range(1..=max_len);
        self.chain_of_length(len)
    }

    pub fn chain_of_length(&mut self, len: usize) -> Chain {
        let ms: Vec<Matrix> = (0..len).map(|_| self.matrix()).collect();
        Chain::from_matrices(&ms, 0).expect("sampled matrices share n and r")
    }

    /// A chain with `m + 1 ≤ max_len` slots and `m ≡ parity` mod 2.
    pub fn chain_with_parity(&mut self, max_len: usize, parity: usize) -> Chain {
        let lens: Vec<usize> = (1..=max_len).filter(|l| (l - 1) % 2 == parity % 2).collect();
        let len = lens[self.rng.gen_range(0..lens.len())];
        self.chain_of_length(len)
    }

    pub fn form(&mut self) -> Form {
        let n = self.n;
        let mut f = Form::zero(n);
        for _ in 0..self.rng.gen_range(1..=3) {
            let deg = self.rng.gen_range(0..=self.max_weight);
            let y = self.exponents(deg, 2 * n);
            let mask = self.rng.gen_range(0..(1u32 << (2 * n)));
            let h = self.rng.gen_range(0..=1);
            f.add_term(FKey { u: 0, h, mask, y }, self.coeff());
        }
        f
    }

    /// A single-term form, so that it has a definite parity.
    pub fn form_term(&mut self) -> Form {
        loop {
            let f = self.form();
            if let Some((k, c)) = f.terms().iter().next() {
                return Form::term(self.n, c.clone(), k.clone());
            }
        }
    }

    pub fn index(&mut self, hi: usize) -> usize {
        self.rng.gen_range(0..hi)
    }
}

/// One identity checked on a number of sampled cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.failure {
                None => writeln!(f, "PASS\t{}\t{}\t{} cases", self.suite, c.name, c.cases)?,
                Some(m) => writeln!(f, "FAIL\t{}\t{}\t{}", self.suite, c.name, m)?,
            }
        }
        Ok(())
    }
}

struct Runner<'a> {
    s: &'a mut Sampler,
    cases: usize,
    checks: Vec<Check>,
}

impl Runner<'_> {
    /// Runs `case` until the first failing instance, which it describes.
    fn check(&mut self, name: &str, mut case: impl FnMut(&mut Sampler) -> Result<Option<String>>) -> Result<()> {
        let mut failure = None;
        for _ in 0..self.cases {
            if let Some(m) = case(self.s)? {
                failure = Some(m);
                break;
            }
        }
        self.checks.push(Check { name: name.into(), cases: self.cases, failure });
        Ok(())
    }
}

fn differ<T: PartialEq + fmt::Display>(lhs: &T, rhs: &T, input: impl FnOnce() -> String) -> Option<String> {
    if lhs == rhs {
        None
    } else {
        Some(format!("{} ; lhs = {lhs} ; rhs = {rhs}", input()))
    }
}

fn list(ms: &[Matrix]) -> String {
    ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ; ")
}

pub const SUITES: [&str; 7] = ["weyl", "forms", "cyclic", "free", "interacting", "trace", "gm"];

/// Runs one named suite on `cases` samples per identity.
pub fn run_suite(suite: &str, s: &mut Sampler, cases: usize) -> Result<Report> {
    let mut run = Runner { s, cases, checks: Vec::new() };
    match suite {
        "weyl" => weyl_suite(&mut run)?,
        "forms" => forms_suite(&mut run)?,
        "cyclic" => cyclic_suite(&mut run)?,
        "free" => free_suite(&mut run)?,
        "interacting" => interacting_suite(&mut run)?,
        "trace" => trace_suite(&mut run)?,
        "gm" => gm_suite(&mut run)?,
        other => return Err(Error::Invalid(format!("unknown suite {other}"))),
    }
    Ok(Report { suite: suite.into(), checks: run.checks })
}

fn weyl_suite(run: &mut Runner) -> Result<()> {
    run.check("associativity", |s| {
        let (a, b, c) = (s.matrix(), s.matrix(), s.matrix());
        let l = a.moyal(&b)?.moyal(&c)?;
        let r = a.moyal(&b.moyal(&c)?)?;
        Ok(differ(&l, &r, || list(&[a, b, c])))
    })?;
    run.check("jacobi", |s| {
        let (a, b, c) = (s.matrix(), s.matrix(), s.matrix());
        let j = a.bracket(&b.bracket(&c)?)? + b.bracket(&c.bracket(&a)?)? + c.bracket(&a.bracket(&b)?)?;
        Ok(differ(&j, &Matrix::zero(s.n, s.r), || list(&[a, b, c])))
    })?;
    run.check("weight additivity", |s| {
        let (wa, wb) = (s.index(s.max_weight as usize + 1) as i64, s.index(s.max_weight as usize + 1) as i64);
        let a = s.homogeneous(wa as u32);
        let b = s.homogeneous(wb as u32);
        let bad = a.moyal(&b)?.terms().keys().any(|m| m.weight() != wa + wb);
        Ok(bad.then(|| format!("{a} ; {b}")))
    })?;
    run.check("commutator is hbar times bracket", |s| {
        let (a, b) = (s.matrix(), s.matrix());
        let l = a.moyal(&b)? - b.moyal(&a)?;
        let r = a.bracket(&b)?.shift_hbar(1);
        Ok(differ(&l, &r, || list(&[a, b])))
    })?;
    run.check("centrality", |s| {
        let a = s.matrix();
        let c = Matrix::scalar(s.r, Weyl::hbar(s.n, s.index(4) as i32 - 1).scale(&s.coeff()));
        Ok(differ(&a.bracket(&c)?, &Matrix::zero(s.n, s.r), || list(&[a, c])))
    })?;
    Ok(())
}

fn forms_suite(run: &mut Runner) -> Result<()> {
    run.check("d squared", |s| {
        let f = s.form();
        Ok(differ(&f.d().d(), &Form::zero(s.n), || f.to_string()))
    })?;
    run.check("delta squared", |s| {
        let f = s.form();
        Ok(differ(&f.delta().delta(), &Form::zero(s.n), || f.to_string()))
    })?;
    run.check("delta is the commutator of d and iota_pi", |s| {
        let f = s.form();
        Ok(differ(&f.delta(), &(f.iota_pi().d() - f.d().iota_pi()), || f.to_string()))
    })?;
    run.check("d is a graded derivation", |s| {
        let (a, b) = (s.form_term(), s.form_term());
        let deg = a.terms().keys().next().unwrap().form_degree();
        let l = a.wedge(&b)?.d();
        let r = a.d().wedge(&b)? + a.wedge(&b.d())?.scale(&crate::rational::sign(deg % 2 == 1));
        Ok(differ(&l, &r, || format!("{a} ; {b}")))
    })?;
    run.check("bv integral kills hbar delta plus u d", |s| {
        let f = s.form();
        let x = f.delta().shift(1, 0) + f.d().shift(0, 1);
        Ok(differ(&x.bv_integrate(), &crate::forms::Scalar::zero(), || f.to_string()))
    })?;
    run.check("nabla commutes with the bv integral", |s| {
        let f = s.form();
        Ok(differ(&f.nabla().bv_integrate(), &f.bv_integrate().nabla(), || f.to_string()))
    })?;
    run.check("tensor operators commute with multiplication", |s| {
        let fs = [s.form(), s.form()];
        let t = FormTensor::from_factors(&fs)?;
        for (op, f) in [(TensorOp::D, Form::d as fn(&Form) -> Form), (TensorOp::IotaPi, Form::iota_pi), (TensorOp::Delta, Form::delta)] {
            let l = t.apply(op).multiply();
            let r = f(&t.multiply());
            if l != r {
                return Ok(Some(format!("{op:?} on {} ⊗ {}", fs[0], fs[1])));
            }
        }
        Ok(None)
    })?;
    Ok(())
}

fn cyclic_suite(run: &mut Runner) -> Result<()> {
    let zero = |s: &Sampler| Chain::zero(s.n, s.r);
    run.check("b squared", |s| {
        let c = s.chain(4);
        Ok(differ(&c.hochschild_b().hochschild_b(), &zero(s), || c.to_string()))
    })?;
    run.check("B squared", |s| {
        let c = s.chain(4);
        Ok(differ(&c.connes_b().connes_b(), &zero(s), || c.to_string()))
    })?;
    run.check("bB + Bb", |s| {
        let c = s.chain(4);
        let x = c.hochschild_b().connes_b() + c.connes_b().hochschild_b();
        Ok(differ(&x, &zero(s), || c.to_string()))
    })?;
    run.check("periodic differential squared", |s| {
        let c = s.chain(4);
        Ok(differ(&c.periodic_differential().periodic_differential(), &zero(s), || c.to_string()))
    })?;
    run.check("shuffle associativity", |s| {
        let (n, r) = (s.n, s.r);
        let blk = |s: &mut Sampler| {
            let k = s.index(3);
            let ms: Vec<Matrix> = (0..k).map(|_| s.matrix()).collect();
            Block::from_matrices(n, r, &ms)
        };
        let (a, b, c) = (blk(s)?, blk(s)?, blk(s)?);
        let l = shuffle(&shuffle(&a, &b)?, &c)?;
        let rr = shuffle(&a, &shuffle(&b, &c)?)?;
        Ok((l != rr).then(|| "shuffle associativity".to_string()))
    })?;
    Ok(())
}

fn free_suite(run: &mut Runner) -> Result<()> {
    run.check("<Bc> = d<c>", |s| {
        let c = s.chain(3);
        Ok(differ(&free_expectation(&c.connes_b())?, &free_expectation(&c)?.d(), || c.to_string()))
    })?;
    run.check("<bc> = hbar delta <c>", |s| {
        let c = s.chain(3);
        let r = free_expectation(&c)?.delta().shift(1, 0);
        Ok(differ(&free_expectation(&c.hochschild_b())?, &r, || c.to_string()))
    })?;
    run.check("nabla commutes with the free expectation", |s| {
        let c = s.chain(3);
        Ok(differ(&free_expectation(&c)?.nabla(), &free_expectation(&c.nabla())?, || c.to_string()))
    })?;
    run.check("dy count", |s| {
        let m = s.index(3);
        let c = s.chain_of_length(m + 1);
        let f = free_expectation(&c)?;
        let bad = f.terms().keys().any(|k| k.form_degree() as usize != m);
        Ok(bad.then(|| c.to_string()))
    })?;
    Ok(())
}

fn sample_args(s: &mut Sampler, k: usize) -> Vec<Matrix> {
    (0..k).map(|_| s.g_element()).collect()
}

/// `(-1)^m (∂_Lie⟨−⟩)(args)(c) + ⟨bc⟩(args) - ħΔ⟨c⟩(args)` summed over the
/// components of `c` with `m + 1` slots.
pub fn interacting_closedness(args: &[Matrix], c: &Chain) -> Result<Form> {
    let mut out = interacting_expectation(args, &c.hochschild_b())? - interacting_expectation(args, c)?.delta().shift(1, 0);
    if args.is_empty() {
        return Ok(out);
    }
    for (len, part) in c.by_length() {
        let alpha = |xs: &[Matrix]| interacting_expectation(xs, &part);
        let rho = |a: &Matrix, rest: &[Matrix]| Ok(interacting_expectation(rest, &part.act(a)?)?.scale(&-Q::one()));
        let lie = ce_differential_with(&alpha, args, Some(&rho))?;
        out = out + lie.scale(&crate::rational::sign(len % 2 == 0));
    }
    Ok(out)
}

fn interacting_suite(run: &mut Runner) -> Result<()> {
    run.check("closedness", |s| {
        let k = s.index(3);
        let args = sample_args(s, k);
        let c = s.chain(3);
        let x = interacting_closedness(&args, &c)?;
        Ok(differ(&x, &Form::zero(s.n), || format!("{} ; {c}", list(&args))))
    })?;
    run.check("<Bc> = d<c>", |s| {
        let k = s.index(3);
        let args = sample_args(s, k);
        let c = s.chain(2);
        let l = interacting_expectation(&args, &c.connes_b())?;
        let r = interacting_expectation(&args, &c)?.d();
        Ok(differ(&l, &r, || format!("{} ; {c}", list(&args))))
    })?;
    run.check("antisymmetry", |s| {
        let args = sample_args(s, 2);
        let c = s.chain(2);
        let l = interacting_expectation(&args, &c)?;
        let r = interacting_expectation(&[args[1].clone(), args[0].clone()], &c)?.scale(&-Q::one());
        Ok(differ(&l, &r, || format!("{} ; {c}", list(&args))))
    })?;
    Ok(())
}

fn trace_suite(run: &mut Runner) -> Result<()> {
    let zero = crate::forms::Scalar::zero();
    run.check("vanishes on h", |s| {
        let k = s.index(2);
        let mut args = sample_args(s, k);
        let at = s.index(k + 1);
        args.insert(at, s.h_element());
        let c = s.chain_with_parity(3, k + 1);
        Ok(differ(&universal_trace(&args, &c, false)?, &zero, || format!("{} ; {c}", list(&args))))
    })?;
    run.check("cocycle", |s| {
        let k = s.index(3);
        let args = sample_args(s, k);
        let c = s.chain_with_parity(3, k + 1);
        Ok(differ(&cocycle_residual(&args, &c)?, &zero, || format!("{} ; {c}", list(&args))))
    })?;
    run.check("gamma replacement", |s| {
        let k = s.index(3);
        let args = sample_args(s, k);
        let c = s.chain_with_parity(3, k);
        let l = universal_trace(&args, &c, false)?;
        let r = universal_trace(&args, &c, true)?;
        Ok(differ(&l, &r, || format!("{} ; {c}", list(&args))))
    })?;
    run.check("degree parity", |s| {
        let k = s.index(3);
        let args = sample_args(s, k);
        let c = s.chain(3);
        let odd: Vec<_> = c.terms().iter().filter(|(key, _)| (key.slots.len() - 1 + k) % 2 == 1).collect();
        let mut only_odd = Chain::zero(s.n, s.r);
        for (key, v) in odd {
            only_odd.add_raw(key.clone(), v.clone());
        }
        Ok(differ(&universal_trace(&args, &only_odd, false)?, &zero, || format!("{} ; {c}", list(&args))))
    })?;
    Ok(())
}

fn gm_suite(run: &mut Runner) -> Result<()> {
    run.check("gauss-manin", |s| {
        let args = sample_args(s, 2);
        let x = gm_residual(s.n, s.r, &args)?;
        Ok(differ(&x, &crate::forms::Scalar::zero(), || list(&args)))
    })?;
    Ok(())
}
