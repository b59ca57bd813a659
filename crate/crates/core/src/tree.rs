//! Vertices of the Bruhat–Tits tree as coset representatives of G/KZ, and
//! finitely supported functions [g, v] of the compact induction.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::padic::{Coeff, Fq, RingCtx, Witt};
use crate::sympoly::{Mat2, SymPoly, WeightVec};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Half {
    Plus,
    Minus,
}

/// g⁰_{m,μ} = (p^m, μ; 0, 1) on the plus half, g¹_{m,μ} = (1, 0; pμ, p^{m+1})
/// on the minus half, with μ = Σ_{i<m} p^i [μ_i].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CosetRep {
    pub half: Half,
    pub digits: Vec<Fq>,
}

/// Result of right-multiplying a representative: g·y = p^central · rep · k.
#[derive(Clone, Debug)]
pub struct Move {
    pub rep: CosetRep,
    /// `None` stands for the identity.
    pub k: Option<Mat2<Witt>>,
    pub central: u32,
}

impl CosetRep {
    pub fn identity() -> CosetRep {
        CosetRep { half: Half::Plus, digits: Vec::new() }
    }

    /// α = (1, 0; 0, p).
    pub fn alpha() -> CosetRep {
        CosetRep { half: Half::Minus, digits: Vec::new() }
    }

    pub fn plus(digits: Vec<Fq>) -> CosetRep {
        CosetRep { half: Half::Plus, digits }
    }

    pub fn minus(digits: Vec<Fq>) -> CosetRep {
        CosetRep { half: Half::Minus, digits }
    }

    pub fn level(&self) -> usize {
        self.digits.len()
    }

    /// Distance from the identity vertex.
    pub fn radius(&self) -> usize {
        match self.half {
            Half::Plus => self.level(),
            Half::Minus => self.level() + 1,
        }
    }

    /// ([μ]_{m−1}, μ_{m−1}).
    pub fn truncate(&self) -> Result<(CosetRep, Fq)> {
        let (last, rest) = self
            .digits
            .split_last()
            .ok_or_else(|| Error::InvalidInput("cannot truncate a level-0 representative".into()))?;
        Ok((CosetRep { half: self.half, digits: rest.to_vec() }, *last))
    }

    pub fn extend(&self, l: Fq) -> CosetRep {
        let mut digits = self.digits.clone();
        digits.push(l);
        CosetRep { half: self.half, digits }
    }

    /// μ = Σ p^i [μ_i] in W.
    pub fn mu(&self, ctx: &RingCtx) -> Witt {
        let mut acc = Witt::ZERO;
        for (i, d) in self.digits.iter().enumerate() {
            acc = acc.add(&ctx.teich(*d).mul_int(ctx.p_pow(i as u32), ctx), ctx);
        }
        acc
    }

    pub fn matrix(&self, ctx: &RingCtx) -> Mat2<Witt> {
        let m = self.level() as u32;
        let mu = self.mu(ctx);
        let pw = |k: u32| Witt::from_int(ctx.p_pow(k) as i64, ctx);
        match self.half {
            Half::Plus => Mat2::new(pw(m), mu, Witt::ZERO, Witt::one()),
            Half::Minus => Mat2::new(Witt::one(), Witt::ZERO, mu.mul_int(ctx.p() as u64, ctx), pw(m + 1)),
        }
    }

    /// Representative of g·(p, [λ]; 0, 1).
    pub fn move_beta(&self, l: Fq, ctx: &RingCtx) -> Move {
        match self.half {
            Half::Plus => Move { rep: self.extend(l), k: None, central: 0 },
            Half::Minus => {
                if let Some(inv) = l.inv(ctx) {
                    let t = ctx.teich(l);
                    let k = Mat2::new(
                        Witt::from_int(ctx.p() as i64, ctx),
                        t,
                        ctx.teich(inv).neg(ctx),
                        Witt::ZERO,
                    );
                    Move { rep: self.extend(inv), k: Some(k), central: 0 }
                } else if let Ok((rep, top)) = self.truncate() {
                    let k = Mat2::new(Witt::one(), Witt::ZERO, ctx.teich(top), Witt::one());
                    Move { rep, k: Some(k), central: 1 }
                } else {
                    Move { rep: CosetRep::identity(), k: None, central: 1 }
                }
            }
        }
    }

    /// Representative of g·α.
    pub fn move_alpha(&self, ctx: &RingCtx) -> Move {
        match self.half {
            Half::Plus => match self.truncate() {
                Ok((rep, top)) => {
                    let k = Mat2::new(Witt::one(), ctx.teich(top), Witt::ZERO, Witt::one());
                    Move { rep, k: Some(k), central: 1 }
                }
                Err(_) => Move { rep: CosetRep::alpha(), k: None, central: 0 },
            },
            Half::Minus => Move { rep: self.extend(Fq::ZERO), k: None, central: 0 },
        }
    }

    /// Every representative of radius ≤ n, in canonical order.
    pub fn ball(n: usize, ctx: &RingCtx) -> Vec<CosetRep> {
        let mut out = Vec::new();
        for m in 0..=n {
            let words: Vec<Vec<Fq>> = if m == 0 {
                vec![Vec::new()]
            } else {
                (0..m).map(|_| Fq::all(ctx)).multi_cartesian_product().collect()
            };
            for w in &words {
                out.push(CosetRep::plus(w.clone()));
                if m < n {
                    out.push(CosetRep::minus(w.clone()));
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for CosetRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = match self.half {
            Half::Plus => "plus",
            Half::Minus => "minus",
        };
        write!(f, "({h}, {}, [{}])", self.level(), self.digits.iter().join(","))
    }
}

/// If g1 ∈ p^t·g2·KZ for some integer t, returns the KZ element k with
/// g1 = p^t·g2·k. Entries must be exact in `ctx`; use a context with
/// precision above every exponent involved.
pub fn kz_equivalent(g1: &Mat2<Witt>, g2: &Mat2<Witt>, ctx: &RingCtx) -> Option<Mat2<Witt>> {
    let d1 = g1.det(ctx).vp(ctx)?;
    let d2 = g2.det(ctx).vp(ctx)?;
    let diff = d1 as i64 - d2 as i64;
    if diff % 2 != 0 {
        return None;
    }
    // g2^{-1} g1 = adj(g2) g1 / det(g2)
    let adj = Mat2::new(g2.d, g2.b.neg(ctx), g2.c.neg(ctx), g2.a);
    let m = adj.mul(g1, ctx);
    let shift = d2 as i64 + diff / 2;
    if shift < 0 {
        return None;
    }
    let shift = shift as u32;
    let ents = [m.a, m.b, m.c, m.d];
    let mut scaled = [Witt::ZERO; 4];
    for (slot, x) in scaled.iter_mut().zip(ents.iter()) {
        *slot = x.div_p_pow(shift, ctx)?;
    }
    let det2 = g2.det(ctx).div_p_pow(d2, ctx)?;
    let u = det2.inv(ctx)?;
    let k = Mat2::new(scaled[0].mul(&u, ctx), scaled[1].mul(&u, ctx), scaled[2].mul(&u, ctx), scaled[3].mul(&u, ctx));
    if k.det(ctx).is_unit(ctx) {
        Some(k)
    } else {
        None
    }
}

/// Finitely supported function Σ [g, v_g]: never stores a zero polynomial.
#[derive(Clone, Debug)]
pub struct IndElem<E> {
    weight: WeightVec,
    entries: BTreeMap<CosetRep, SymPoly<E>>,
}

impl<E: Coeff> IndElem<E> {
    pub fn zero(weight: &WeightVec) -> Self {
        IndElem { weight: weight.clone(), entries: BTreeMap::new() }
    }

    pub fn single(rep: CosetRep, v: SymPoly<E>) -> Self {
        let mut out = IndElem::zero(v.weight());
        if !v.is_zero() {
            out.entries.insert(rep, v);
        }
        out
    }

    pub fn weight(&self) -> &WeightVec {
        &self.weight
    }

    pub fn entries(&self) -> &BTreeMap<CosetRep, SymPoly<E>> {
        &self.entries
    }

    pub fn get(&self, rep: &CosetRep) -> Option<&SymPoly<E>> {
        self.entries.get(rep)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Adds [rep, v].
    pub fn insert(&mut self, rep: CosetRep, v: SymPoly<E>, ctx: &RingCtx) {
        if v.is_zero() {
            return;
        }
        assert_eq!(v.weight().r, self.weight.r, "weight mismatch");
        match self.entries.remove(&rep) {
            Some(old) => {
                let sum = old.add(&v, ctx);
                if !sum.is_zero() {
                    self.entries.insert(rep, sum);
                }
            }
            None => {
                self.entries.insert(rep, v);
            }
        }
    }

    /// Adds [rep·k, v] = [rep, k·v]; powers of p are central and act trivially.
    pub fn normalize_insert(&mut self, mv: &Move, v: SymPoly<E>, ctx: &RingCtx) {
        let v = match &mv.k {
            None => v,
            Some(k) => v.act(&k.to_scalar::<E::S>(ctx), ctx),
        };
        self.insert(mv.rep.clone(), v, ctx);
    }

    pub fn add(&self, o: &Self, ctx: &RingCtx) -> Self {
        let mut out = self.clone();
        for (rep, v) in &o.entries {
            out.insert(rep.clone(), v.clone(), ctx);
        }
        out
    }

    pub fn neg(&self, ctx: &RingCtx) -> Self {
        self.map(|v| v.neg(ctx))
    }

    pub fn sub(&self, o: &Self, ctx: &RingCtx) -> Self {
        self.add(&o.neg(ctx), ctx)
    }

    pub fn scale(&self, c: &E, ctx: &RingCtx) -> Self {
        self.map(|v| v.scale(c, ctx))
    }

    pub fn map<F: Fn(&SymPoly<E>) -> SymPoly<E>>(&self, f: F) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(r, v)| (r.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        IndElem { weight: self.weight.clone(), entries }
    }

    /// Coefficient-wise residue; reports the offending representative.
    pub fn reduce(&self, ctx: &RingCtx) -> Result<IndElem<Fq>> {
        let mut entries = BTreeMap::new();
        for (rep, v) in &self.entries {
            let red = v.reduce(ctx).map_err(|e| match e {
                Error::NonIntegral { at, valuation } => Error::NonIntegral { at: format!("{rep} {at}"), valuation },
                Error::PrecisionExhausted(msg) => Error::PrecisionExhausted(format!("{rep}: {msg}")),
                other => other,
            })?;
            if !red.is_zero() {
                entries.insert(rep.clone(), red);
            }
        }
        Ok(IndElem { weight: self.weight.clone(), entries })
    }

    pub fn max_radius(&self) -> usize {
        self.entries.keys().map(|r| r.radius()).max().unwrap_or(0)
    }

    pub fn eq_at(&self, o: &Self, ctx: &RingCtx) -> bool {
        self.sub(o, ctx).is_zero()
    }

    pub(crate) fn from_map(weight: &WeightVec, entries: BTreeMap<CosetRep, SymPoly<E>>) -> Self {
        IndElem { weight: weight.clone(), entries }
    }
}

impl<E: Coeff> IndElem<E> {
    /// Canonical rendering, one entry per line.
    pub fn render(&self) -> String
    where
        E: fmt::Display,
    {
        self.entries.iter().map(|(r, v)| format!("{r}: {}", v.render())).join("\n")
    }
}

/// p^central · rep · k as a matrix.
pub fn move_matrix(mv: &Move, ctx: &RingCtx) -> Mat2<Witt> {
    let g = mv.rep.matrix(ctx);
    let g = match &mv.k {
        None => g,
        Some(k) => g.mul(k, ctx),
    };
    let pc = Witt::from_int(ctx.p_pow(mv.central) as i64, ctx);
    Mat2::new(g.a.mul(&pc, ctx), g.b.mul(&pc, ctx), g.c.mul(&pc, ctx), g.d.mul(&pc, ctx))
}
