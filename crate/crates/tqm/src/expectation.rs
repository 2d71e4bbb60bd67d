//! Free and interacting expectation maps from cyclic chains to forms.
//!
//! `⟨O_0 ⊗ ... ⊗ O_m⟩ = tr ∫ e^{ħ∂_P}(O_0 ⊗ dO_1 ⊗ ... ⊗ dO_m)` where
//! `∂_P = Σ_{α<β} P_{βα} ω̂^{ij} ∂_i^{(α)} ∂_j^{(β)}`, i.e. the slots are
//! placed on the circle in clockwise order. The contractions are even
//! and commute with `d`, so they are applied to the y-monomials first and `d`
//! afterwards.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::{One, Zero};

use crate::configspace::{propagator_polynomial, SimplexPoly};
use crate::cyclic::{expand_matrix, Chain, Slot};
use crate::error::{Error, Result};
use crate::forms::{FKey, Form};
use crate::liealg::LieElement;
use crate::rational::{factorial, falling, Q};
use crate::weyl::Matrix;

type Monos = Vec<Vec<u32>>;

fn cache() -> &'static Mutex<HashMap<(usize, Monos), Form>> {
    static C: OnceLock<Mutex<HashMap<(usize, Monos), Form>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Contractions of `D_{αβ}^k / k!` between two monomials:
/// `(k, new α exponents, new β exponents, coefficient)`.
fn contractions(n: usize, a: &[u32], b: &[u32]) -> Vec<(u32, Vec<u32>, Vec<u32>, Q)> {
    let mut acc = vec![(0u32, a.to_vec(), b.to_vec(), Q::one())];
    for t in 0..n {
        let (ap, aq, bp, bq) = (a[t], a[n + t], b[t], b[n + t]);
        let mut next = Vec::new();
        for s in 0..=ap.min(bq) {
            for u in 0..=aq.min(bp) {
                let num = falling(ap, s) * falling(bq, s) * falling(aq, u) * falling(bp, u);
                let mut c = Q::new(num, factorial(s) * factorial(u));
                if u % 2 == 1 {
                    c = -c;
                }
                for (k, x, y, v) in &acc {
                    let mut x2 = x.clone();
                    let mut y2 = y.clone();
                    x2[t] -= s;
                    x2[n + t] -= u;
                    y2[n + t] -= s;
                    y2[t] -= u;
                    next.push((k + s + u, x2, y2, v * &c));
                }
            }
        }
        acc = next;
    }
    acc
}

fn deg(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// `∫ e^{ħ∂_P}(x^{A_0} ⊗ d x^{A_1} ⊗ ... ⊗ d x^{A_m})` multiplied in slot order.
pub fn scalar_expectation(n: usize, monos: &[Vec<u32>]) -> Form {
    if monos.iter().skip(1).any(|m| deg(m) == 0) {
        return Form::zero(n);
    }
    let key = (n, monos.to_vec());
    if let Some(f) = cache().lock().unwrap().get(&key) {
        return f.clone();
    }
    let f = compute_scalar(n, monos);
    cache().lock().unwrap().insert(key, f.clone());
    f
}

fn compute_scalar(n: usize, monos: &[Vec<u32>]) -> Form {
    let m = monos.len() - 1;
    let mut states: HashMap<Monos, SimplexPoly> = HashMap::new();
    states.insert(monos.to_vec(), SimplexPoly::one(m));
    for al in 0..=m {
        for be in al + 1..=m {
            // slots sit clockwise: slot α meets slot α+1 as its gap closes
            // with P = +1/2, which is where `O_α ⋆ O_{α+1}` appears
            let prop = propagator_polynomial(m, be, al).unwrap();
            let mut powers = vec![SimplexPoly::one(m)];
            let mut next: HashMap<Monos, SimplexPoly> = HashMap::new();
            for (st, poly) in &states {
                for (k, x, y, c) in contractions(n, &st[al], &st[be]) {
                    if (al >= 1 && deg(&x) == 0) || deg(&y) == 0 {
                        continue;
                    }
                    while powers.len() <= k as usize {
                        let last = powers.last().unwrap().mul(&prop);
                        powers.push(last);
                    }
                    let mut st2 = st.clone();
                    st2[al] = x;
                    st2[be] = y;
                    let term = poly.mul(&powers[k as usize]).scale(&c);
                    next.entry(st2).or_insert_with(|| SimplexPoly::zero(m)).add_assign(&term);
                }
            }
            next.retain(|_, p| !p.is_zero());
            states = next;
        }
    }
    let total: u32 = monos.iter().map(|x| deg(x)).sum();
    let mut out = Form::zero(n);
    let mut entries: Vec<_> = states.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for (st, poly) in entries {
        let integral = poly.integrate();
        if integral.is_zero() {
            continue;
        }
        let hk = ((total - st.iter().map(|x| deg(x)).sum::<u32>()) / 2) as i32;
        let mut f = Form::term(n, integral, FKey { u: 0, h: hk, mask: 0, y: st[0].clone() });
        for x in &st[1..] {
            let dx = Form::term(n, Q::one(), FKey { u: 0, h: 0, mask: 0, y: x.clone() }).d();
            f = f.wedge(&dx).unwrap();
            if f.is_zero() {
                break;
            }
        }
        out = out + f;
    }
    out
}

/// Whether the matrix units close into a cycle `E_{i0 i1} E_{i1 i2} ... E_{im i0}`.
fn traces_to_one(slots: &[Slot]) -> bool {
    let len = slots.len();
    (0..len).all(|i| slots[i].col == slots[(i + 1) % len].row)
}

fn elementary(n: usize, slots: &[Slot]) -> Form {
    if !traces_to_one(slots) {
        return Form::zero(n);
    }
    let monos: Monos = slots.iter().map(|s| s.y.clone()).collect();
    scalar_expectation(n, &monos)
}

/// The free expectation `⟨c⟩_free`; `u` passes through linearly.
pub fn free_expectation(c: &Chain) -> Result<Form> {
    let n = c.n();
    let mut out = Form::zero(n);
    for (k, v) in c.terms() {
        if k.slots.is_empty() {
            return Err(Error::Invalid("chain term without slot 0".into()));
        }
        let f = elementary(n, &k.slots);
        if !f.is_zero() {
            out = out + f.shift(k.h, k.u).scale(v);
        }
    }
    Ok(out)
}

/// `Σ_ε sign(ε) a_{ε(1)}/ħ ⊗ ... ⊗ a_{ε(k)}/ħ` expanded into elementary slots.
fn antisymmetrized(args: &[Matrix]) -> Vec<(i32, Vec<Slot>, Q)> {
    let k = args.len();
    let expanded: Vec<_> = args.iter().map(expand_matrix).collect();
    let mut map: std::collections::BTreeMap<(i32, Vec<Slot>), Q> = std::collections::BTreeMap::new();
    for (perm, odd) in permutations(k) {
        let mut acc: Vec<(i32, Vec<Slot>, Q)> = vec![(-(k as i32), vec![], if odd { -Q::one() } else { Q::one() })];
        for &i in &perm {
            let mut next = Vec::new();
            for (h, s, c) in &acc {
                for (dh, sl, v) in &expanded[i] {
                    let mut s2 = s.clone();
                    s2.push(sl.clone());
                    next.push((h + dh, s2, c * v));
                }
            }
            acc = next;
        }
        for (h, s, c) in acc {
            crate::rational::add_into(&mut map, (h, s), c);
        }
    }
    map.into_iter().map(|((h, s), c)| (h, s, c)).collect()
}

/// All permutations of `0..k` with their parity.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            // inserting the largest element at `pos` adds len-pos inversions
            out.push((q, odd ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

/// All increasing `k`-subsets of `lo..hi`.
pub fn subsets(lo: usize, hi: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in lo..hi {
        for mut rest in subsets(first + 1, hi, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The interacting expectation: every interleaving of the insertions
/// `a_{ε(j)}/ħ` among chain positions `1..m`, signed by `ε` and by the shuffle
/// of insertions past later chain entries, with no `1/k!`.
pub fn interacting_expectation(args: &[Matrix], c: &Chain) -> Result<Form> {
    for a in args {
        if a.n() != c.n() {
            return Err(Error::Dimension(c.n(), a.n()));
        }
        if a.r() != c.r() {
            return Err(Error::Rank(c.r(), a.r()));
        }
        LieElement::new(a.clone())?;
    }
    if args.is_empty() {
        return free_expectation(c);
    }
    let n = c.n();
    let k = args.len();
    let ins = antisymmetrized(args);
    let mut out = Form::zero(n);
    for (key, v) in c.terms() {
        if key.slots.is_empty() {
            return Err(Error::Invalid("chain term without slot 0".into()));
        }
        let m = key.slots.len() - 1;
        for pos in subsets(1, m + k + 1, k) {
            for (ih, islots, ic) in &ins {
                let mut slots = Vec::with_capacity(m + k + 1);
                slots.push(key.slots[0].clone());
                let (mut ci, mut ii) = (1, 0);
                // insertions and chain entries past slot 0 are both odd
                let mut odd = false;
                for p in 1..=m + k {
                    if ii < k && pos[ii] == p {
                        slots.push(islots[ii].clone());
                        odd ^= (m + 1 - ci) % 2 == 1;
                        ii += 1;
                    } else {
                        slots.push(key.slots[ci].clone());
                        ci += 1;
                    }
                }
                let f = elementary(n, &slots);
                if !f.is_zero() {
                    out = out + f.shift(key.h + ih, key.u).scale(&(v * ic * crate::rational::sign(odd)));
                }
            }
        }
    }
    Ok(out)
}
