//! Multi-homogeneous polynomials modelling (⊗_i Sym^{r_i}) ⊗ D^s with the
//! Frobenius-twisted substitution action of 2×2 matrices.

mod mat2;
mod mono;

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::padic::{Coeff, Fq, RingCtx, RingElem, Scalar};

pub use mat2::Mat2;
pub use mono::Mono;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightVec {
    pub r: Vec<u32>,
    /// Determinant twist exponent.
    pub s: u32,
}

impl WeightVec {
    pub fn new(r: &[u32], s: u32) -> WeightVec {
        WeightVec { r: r.to_vec(), s }
    }

    pub fn untwisted(r: &[u32]) -> WeightVec {
        WeightVec::new(r, 0)
    }

    pub fn f(&self) -> usize {
        self.r.len()
    }

    pub fn dim(&self) -> usize {
        self.r.iter().map(|&x| x as usize + 1).product()
    }

    /// Σ r_i p^i.
    pub fn total(&self, p: u32) -> u64 {
        Mono::pack(&self.r).total(p, self.f())
    }

    pub fn top(&self) -> Mono {
        Mono::pack(&self.r)
    }

    pub fn contains(&self, m: Mono) -> bool {
        (0..self.f()).all(|i| m.get(i) <= self.r[i])
    }

    /// Every multi-index in lexicographic order.
    pub fn monomials(&self) -> impl Iterator<Item = Mono> + '_ {
        self.r
            .iter()
            .map(|&ri| 0..=ri)
            .multi_cartesian_product()
            .map(|j| Mono::pack(&j))
    }
}

impl fmt::Display for WeightVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.r.iter().join(","))?;
        if self.s != 0 {
            write!(f, "⊗D^{}", self.s)?;
        }
        Ok(())
    }
}

/// Sparse polynomial: index j stands for ∏ X_i^{r_i−j_i} Y_i^{j_i}. Terms are
/// sorted by index and never zero.
#[derive(Clone, Debug)]
pub struct SymPoly<E> {
    weight: WeightVec,
    terms: Vec<(Mono, E)>,
}

/// Sort, merge equal indices and drop zeros.
fn normalize<E: RingElem>(mut terms: Vec<(Mono, E)>, ctx: &RingCtx) -> Vec<(Mono, E)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(Mono, E)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 = last.1.add(&c, ctx),
            _ => {
                if let Some(last) = out.last() {
                    if last.1.is_zero(ctx) {
                        out.pop();
                    }
                }
                out.push((m, c));
            }
        }
    }
    if let Some(last) = out.last() {
        if last.1.is_zero(ctx) {
            out.pop();
        }
    }
    out
}

impl<E: Coeff> SymPoly<E> {
    pub fn zero(weight: &WeightVec) -> Self {
        SymPoly { weight: weight.clone(), terms: Vec::new() }
    }

    pub fn monomial(weight: &WeightVec, j: &[u32], c: E, ctx: &RingCtx) -> Result<Self> {
        let m = Mono::pack(j);
        if j.len() != weight.f() || !weight.contains(m) {
            return Err(Error::WeightBound(format!("index {j:?} outside weight {weight}")));
        }
        Ok(SymPoly::from_terms(weight, vec![(m, c)], ctx))
    }

    /// ∏ X_i^{r_i−j_i} Y_i^{j_i} with coefficient 1; panics on out-of-range j.
    pub fn mono(weight: &WeightVec, j: &[u32], ctx: &RingCtx) -> Self {
        SymPoly::monomial(weight, j, E::one(ctx), ctx).expect("index within weight")
    }

    pub fn from_terms(weight: &WeightVec, terms: Vec<(Mono, E)>, ctx: &RingCtx) -> Self {
        debug_assert!(terms.iter().all(|(m, _)| weight.contains(*m)));
        SymPoly { weight: weight.clone(), terms: normalize(terms, ctx) }
    }

    pub fn weight(&self) -> &WeightVec {
        &self.weight
    }

    pub fn with_twist(mut self, s: u32) -> Self {
        self.weight.s = s;
        self
    }

    pub fn terms(&self) -> &[(Mono, E)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Mono, E)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> Option<&E> {
        self.terms.binary_search_by_key(&m, |t| t.0).ok().map(|i| &self.terms[i].1)
    }

    fn merge(&self, o: &Self, sign: bool, ctx: &RingCtx) -> Self {
        assert_eq!(self.weight.r, o.weight.r, "weight mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut k) = (0, 0);
        while i < self.terms.len() || k < o.terms.len() {
            let take_left = k >= o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[k].0);
            let take_right = i >= self.terms.len() || (k < o.terms.len() && o.terms[k].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                let c = &o.terms[k].1;
                out.push((o.terms[k].0, if sign { c.neg(ctx) } else { c.clone() }));
                k += 1;
            } else {
                let c = &o.terms[k].1;
                let s = if sign { self.terms[i].1.sub(c, ctx) } else { self.terms[i].1.add(c, ctx) };
                if !s.is_zero(ctx) {
                    out.push((self.terms[i].0, s));
                }
                i += 1;
                k += 1;
            }
        }
        SymPoly { weight: self.weight.clone(), terms: out }
    }

    pub fn add(&self, o: &Self, ctx: &RingCtx) -> Self {
        self.merge(o, false, ctx)
    }

    pub fn sub(&self, o: &Self, ctx: &RingCtx) -> Self {
        self.merge(o, true, ctx)
    }

    pub fn neg(&self, ctx: &RingCtx) -> Self {
        self.map_coeffs(|c| c.neg(ctx), ctx)
    }

    pub fn scale(&self, c: &E, ctx: &RingCtx) -> Self {
        self.map_coeffs(|x| x.mul(c, ctx), ctx)
    }

    pub fn scale_scalar(&self, s: &E::S, ctx: &RingCtx) -> Self {
        self.map_coeffs(|x| x.scale(s, ctx), ctx)
    }

    pub fn map_coeffs<F: Fn(&E) -> E>(&self, f: F, ctx: &RingCtx) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, f(c)))
            .filter(|(_, c)| !c.is_zero(ctx))
            .collect();
        SymPoly { weight: self.weight.clone(), terms }
    }

    /// Coefficient j multiplied by p^{w(j)}.
    pub fn map_indexed_p_pow<F: Fn(Mono) -> u32>(&self, w: F, ctx: &RingCtx) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.p_mul(w(*m), ctx)))
            .filter(|(_, c)| !c.is_zero(ctx))
            .collect();
        SymPoly { weight: self.weight.clone(), terms }
    }

    /// Coefficient-wise conversion into another ring, dropping zeros.
    pub fn try_convert<E2: Coeff, F>(&self, f: F, ctx: &RingCtx) -> Result<SymPoly<E2>>
    where
        F: Fn(Mono, &E) -> Result<E2>,
    {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let x = f(*m, c)?;
            if !x.is_zero(ctx) {
                terms.push((*m, x));
            }
        }
        Ok(SymPoly { weight: self.weight.clone(), terms })
    }

    /// Coefficient-wise residue in F_q.
    pub fn reduce(&self, ctx: &RingCtx) -> Result<SymPoly<Fq>> {
        self.try_convert(
            |m, c| {
                c.residue(ctx).map_err(|e| match e {
                    Error::NonIntegral { valuation, .. } => Error::NonIntegral { at: format!("index {m}"), valuation },
                    other => other,
                })
            },
            ctx,
        )
    }

    /// Product of polynomials; weights and twists add.
    pub fn mul(&self, o: &Self, ctx: &RingCtx) -> Self {
        assert_eq!(self.weight.f(), o.weight.f());
        let f = self.weight.f();
        let r: Vec<u32> = (0..f).map(|i| self.weight.r[i] + o.weight.r[i]).collect();
        let weight = WeightVec::new(&r, self.weight.s + o.weight.s);
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                terms.push((Mono(m1.0 + m2.0), c1.mul(c2, ctx)));
            }
        }
        SymPoly::from_terms(&weight, terms, ctx)
    }

    /// v(a^{Fr^i}X_i + c^{Fr^i}Y_i, b^{Fr^i}X_i + d^{Fr^i}Y_i), no twist.
    pub fn substitute(&self, g: &Mat2<E::S>, ctx: &RingCtx) -> Self {
        Substitution::new(g, &self.weight, ctx).apply(self, ctx)
    }

    /// The action of g on V_r ⊗ D^s.
    pub fn act(&self, g: &Mat2<E::S>, ctx: &RingCtx) -> Self {
        let v = self.substitute(g, ctx);
        if self.weight.s == 0 {
            v
        } else {
            v.scale_scalar(&g.det(ctx).pow(self.weight.s as u64, ctx), ctx)
        }
    }

    /// Canonical text rendering in index order.
    pub fn render(&self) -> String
    where
        E: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".into();
        }
        let f = self.weight.f();
        self.terms
            .iter()
            .map(|(m, c)| format!("{c}*[{}]", m.unpack(f).iter().join(",")))
            .join(" + ")
    }
}

impl<E: Coeff> SymPoly<E> {
    pub fn eq_at(&self, o: &Self, ctx: &RingCtx) -> bool {
        self.weight.r == o.weight.r && self.sub(o, ctx).is_zero()
    }
}

/// A matrix substitution precomputed per factor: rows[i][j] lists the
/// nonzero (l, coefficient) with X^{r−j}Y^j ↦ Σ_l coeff·X^{r−l}Y^l.
pub struct Substitution<S> {
    rows: Vec<Vec<Vec<(u32, S)>>>,
    identity: Vec<bool>,
}

impl<S: Scalar> Substitution<S> {
    pub fn new(g: &Mat2<S>, weight: &WeightVec, ctx: &RingCtx) -> Self {
        let f = weight.f();
        let mut rows = Vec::with_capacity(f);
        let mut identity = Vec::with_capacity(f);
        for i in 0..f {
            let gi = g.frob(i, ctx);
            let r = weight.r[i];
            let one = S::one(ctx);
            let zero = S::zero(ctx);
            identity.push(gi.a == one && gi.d == one && gi.b == zero && gi.c == zero);
            let powers = |x: &S| {
                let mut v = Vec::with_capacity(r as usize + 1);
                let mut acc = S::one(ctx);
                for _ in 0..=r {
                    v.push(acc);
                    acc = acc.mul(x, ctx);
                }
                v
            };
            let (pa, pb, pc, pd) = (powers(&gi.a), powers(&gi.b), powers(&gi.c), powers(&gi.d));
            let mut per_j = Vec::with_capacity(r as usize + 1);
            for j in 0..=r {
                // (aX + cY)^{r−j} (bX + dY)^j
                let mut acc = vec![S::zero(ctx); r as usize + 1];
                for u in 0..=(r - j) {
                    let left = pa[(r - j - u) as usize].mul(&pc[u as usize], ctx);
                    if left.is_zero(ctx) {
                        continue;
                    }
                    let left = left.mul(&S::from_int(ctx.binom(r - j, u) as i64, ctx), ctx);
                    for w in 0..=j {
                        let right = pb[(j - w) as usize].mul(&pd[w as usize], ctx);
                        if right.is_zero(ctx) {
                            continue;
                        }
                        let right = right.mul(&S::from_int(ctx.binom(j, w) as i64, ctx), ctx);
                        let l = (u + w) as usize;
                        acc[l] = acc[l].add(&left.mul(&right, ctx), ctx);
                    }
                }
                per_j.push(
                    acc.into_iter()
                        .enumerate()
                        .filter(|(_, s)| !s.is_zero(ctx))
                        .map(|(l, s)| (l as u32, s))
                        .collect(),
                );
            }
            rows.push(per_j);
        }
        Substitution { rows, identity }
    }

    pub fn apply<E: Coeff<S = S>>(&self, v: &SymPoly<E>, ctx: &RingCtx) -> SymPoly<E> {
        let mut cur: Vec<(Mono, E)> = v.terms.clone();
        for (i, rows) in self.rows.iter().enumerate() {
            if self.identity[i] {
                continue;
            }
            let mut out = Vec::with_capacity(cur.len() * 2);
            for (m, c) in &cur {
                for (l, s) in &rows[m.get(i) as usize] {
                    let x = c.scale(s, ctx);
                    if !x.is_zero(ctx) {
                        out.push((m.with(i, *l), x));
                    }
                }
            }
            cur = normalize(out, ctx);
        }
        SymPoly { weight: v.weight.clone(), terms: cur }
    }
}

/// θ_i = X_i Y_{i−1}^p − Y_i X_{i−1}^p in its own weight; r is the ambient
/// weight it will be multiplied into, used only for the bound check.
pub fn theta<E: Coeff>(ctx: &RingCtx, i: usize, r: &WeightVec) -> Result<SymPoly<E>> {
    let f = r.f();
    let p = ctx.p();
    let prev = (i + f - 1) % f;
    let mut small = vec![0u32; f];
    small[i] += 1;
    small[prev] += p;
    if (0..f).any(|k| small[k] > r.r[k]) {
        return Err(Error::WeightBound(format!("θ_{i} needs weight {small:?} inside {r}")));
    }
    let w = WeightVec::untwisted(&small);
    let mut first = vec![0u32; f];
    let mut second = vec![0u32; f];
    // X_i Y_{i−1}^p and Y_i X_{i−1}^p
    first[prev] += p;
    second[i] += 1;
    let a = SymPoly::mono(&w, &first, ctx);
    let b = SymPoly::mono(&w, &second, ctx);
    Ok(a.sub(&b, ctx))
}

#[cfg(test)]
mod tests;
