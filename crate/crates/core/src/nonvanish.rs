//! Integrality statements behind the nonvanishing of the reduction in small
//! weights: Vandermonde recovery of coefficients from values at Teichmüller
//! points, triviality of the kernel of the value-and-derivative system over
//! F_{p²}, and the level-m coefficients of T⁻f_{m+1} + T⁺f_{m−1} − a_p f_m
//! for f = 2.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hecke::hecke_t;
use crate::linalg::{invert_unit_pivot, FqEchelon};
use crate::padic::{Coeff, Eis, Fq, RingCtx, Valuation, Witt};
use crate::sympoly::{Mono, SymPoly, WeightVec};
use crate::tree::{CosetRep, Half, IndElem};

/// Coefficients c_e with Σ_e c_e [λ]^e = values[λ] for every λ ∈ F_q, values
/// listed in `Fq::all` order and 0^0 = 1. The q×q Vandermonde matrix on the
/// Teichmüller points has unit determinant, so integral values give
/// integral coefficients. Errors on repeated or out-of-range exponents, and
/// when the values need an exponent outside the given list.
pub fn vandermonde_recover(values: &[Eis], exponents: &[u32], ctx: &RingCtx) -> Result<Vec<Eis>> {
    let q = ctx.q();
    if values.len() != q as usize {
        return Err(Error::InvalidInput(format!("need {q} values, got {}", values.len())));
    }
    if !exponents.iter().all_unique() {
        return Err(Error::InvalidInput(format!("exponent collision in {exponents:?}")));
    }
    if let Some(e) = exponents.iter().find(|&&e| e >= q) {
        return Err(Error::InvalidInput(format!("exponent {e} exceeds q − 1 = {}", q - 1)));
    }
    let points: Vec<Witt> = Fq::all(ctx).map(|l| ctx.teich(l)).collect();
    let a: Vec<Vec<Witt>> = points
        .iter()
        .map(|t| (0..q as u64).map(|e| if e == 0 { Witt::one() } else { t.pow(e, ctx) }).collect())
        .collect();
    let inv = invert_unit_pivot(&a, ctx)?;
    let coeffs: Vec<Eis> = inv
        .iter()
        .map(|row| row.iter().zip(values).fold(Eis::ZERO, |acc, (w, v)| acc.add(&v.scale(w, ctx), ctx)))
        .collect();
    if let Some(e) = (0..q).find(|e| !exponents.contains(e) && !coeffs[*e as usize].is_zero()) {
        return Err(Error::Hypothesis(format!("values need exponent {e}, outside the given list")));
    }
    Ok(exponents.iter().map(|&e| coeffs[e as usize].clone()).collect())
}

/// The stacked system over F_{p²} in unknowns c_{i_0,i_1}: for every λ,
/// Σ c λ^{i_0+p i_1} = 0, Σ i_0 c λ^{i_0−1+p i_1} = 0 and
/// Σ i_1 c λ^{i_0+p(i_1−1)} = 0. Returns (rank, number of unknowns).
pub fn eqsol_rank(p: u32, r0: u32, r1: u32) -> Result<(usize, usize)> {
    if r0 > 2 * p - 2 || r1 > 2 * p - 2 {
        return Err(Error::InvalidInput(format!("weights ({r0},{r1}) exceed 2p − 2 = {}", 2 * p - 2)));
    }
    let ctx = RingCtx::new(p, 2, 1, 1)?;
    let idx: Vec<(u32, u32)> = (0..=r0).cartesian_product(0..=r1).collect();
    let n = idx.len();
    let mut ech = FqEchelon::new(n);
    let pu = p as u64;
    for l in Fq::all(&ctx) {
        let pw = |e: u64| l.pow(e, &ctx);
        let rows = [
            idx.iter().map(|&(i0, i1)| pw(i0 as u64 + pu * i1 as u64)).collect::<Vec<_>>(),
            idx.iter()
                .map(|&(i0, i1)| match i0 {
                    0 => Fq::ZERO,
                    _ => Fq::from_int(i0 as i64, &ctx).mul(pw(i0 as u64 - 1 + pu * i1 as u64), &ctx),
                })
                .collect(),
            idx.iter()
                .map(|&(i0, i1)| match i1 {
                    0 => Fq::ZERO,
                    _ => Fq::from_int(i1 as i64, &ctx).mul(pw(i0 as u64 + pu * (i1 as u64 - 1)), &ctx),
                })
                .collect(),
        ];
        for row in &rows {
            ech.insert(row, &ctx);
        }
    }
    Ok((ech.rank(), n))
}

/// Whether the value-and-derivative system has only the trivial solution.
pub fn kernel_check_eqsol(p: u32, r0: u32, r1: u32) -> Result<bool> {
    let (rank, n) = eqsol_rank(p, r0, r1)?;
    Ok(rank == n)
}

/// Three consecutive plus-half levels of a function on the tree for f = 2:
/// f_{m−1}, f_m, f_{m+1}, each a map from digit strings to polynomials.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub m: usize,
    pub weight: WeightVec,
    pub below: BTreeMap<Vec<Fq>, SymPoly<Eis>>,
    pub at: BTreeMap<Vec<Fq>, SymPoly<Eis>>,
    pub above: BTreeMap<Vec<Fq>, SymPoly<Eis>>,
}

fn digit_strings(len: usize, ctx: &RingCtx) -> Vec<Vec<Fq>> {
    (0..len).map(|_| Fq::all(ctx)).multi_cartesian_product().collect()
}

fn random_poly<R: Rng>(rng: &mut R, w: &WeightVec, density: f64, ctx: &RingCtx) -> SymPoly<Eis> {
    let mut terms = Vec::new();
    for m in w.monomials() {
        if rng.gen_bool(density) {
            terms.push((m, Eis::random_integral(rng, ctx)));
        }
    }
    SymPoly::from_terms(w, terms, ctx)
}

impl LevelData {
    pub fn zero(m: usize, r: &[u32]) -> LevelData {
        LevelData {
            m,
            weight: WeightVec::untwisted(r),
            below: BTreeMap::new(),
            at: BTreeMap::new(),
            above: BTreeMap::new(),
        }
    }

    /// Integral coefficients at every vertex of the three levels; each
    /// coefficient is present with probability `density`.
    pub fn random<R: Rng>(rng: &mut R, m: usize, r: &[u32], density: f64, ctx: &RingCtx) -> Result<LevelData> {
        if ctx.f() != 2 || m == 0 {
            return Err(Error::InvalidInput(format!("level data needs f = 2 and m ≥ 1, got f = {}, m = {m}", ctx.f())));
        }
        let mut d = LevelData::zero(m, r);
        let w = d.weight.clone();
        for (level, map) in [(m - 1, &mut d.below), (m, &mut d.at), (m + 1, &mut d.above)] {
            for mu in digit_strings(level, ctx) {
                map.insert(mu, random_poly(rng, &w, density, ctx));
            }
        }
        Ok(d)
    }

    fn ind(&self, map: &BTreeMap<Vec<Fq>, SymPoly<Eis>>, ctx: &RingCtx) -> IndElem<Eis> {
        let mut f = IndElem::zero(&self.weight);
        for (mu, v) in map {
            f.insert(CosetRep::plus(mu.clone()), v.clone(), ctx);
        }
        f
    }

    /// (f_{m−1}, f_m, f_{m+1}) as elements of the compact induction.
    pub fn to_ind(&self, ctx: &RingCtx) -> [IndElem<Eis>; 3] {
        [self.ind(&self.below, ctx), self.ind(&self.at, ctx), self.ind(&self.above, ctx)]
    }

    fn coeff<'a>(map: &'a BTreeMap<Vec<Fq>, SymPoly<Eis>>, mu: &[Fq], i: &[u32]) -> Option<&'a Eis> {
        map.get(mu).and_then(|v| v.coeff(Mono::pack(i)))
    }
}

/// C^m_{j,μ}: the coefficient of X^{r−j}Y^j at g⁰_{m,μ} in
/// T⁻f_{m+1} + T⁺f_{m−1} − a_p f_m, from the closed formula.
pub fn coefficient_c(data: &LevelData, j: &[u32], mu: &[Fq], a_p: &Eis, ctx: &RingCtx) -> Result<Eis> {
    if ctx.f() != 2 || j.len() != 2 || mu.len() != data.m {
        return Err(Error::InvalidInput("coefficient formula is for f = 2 with μ at level m".into()));
    }
    let r = &data.weight.r;
    let p = ctx.p() as u64;
    let binom = |n: u32, k: u32| ctx.binom(n, k);
    let mut acc = Eis::ZERO;
    let above_indices = (j[0]..=r[0]).cartesian_product(j[1]..=r[1]);
    // Children μ + p^m[λ] one level up.
    for (i0, i1) in above_indices.clone() {
        let e = (i0 - j[0]) as u64 + p * (i1 - j[1]) as u64;
        let mut inner = Eis::ZERO;
        for l in Fq::all(ctx) {
            let mut child = mu.to_vec();
            child.push(l);
            if let Some(c) = LevelData::coeff(&data.above, &child, &[i0, i1]) {
                let t = if e == 0 { Witt::one() } else { ctx.teich(l).pow(e, ctx) };
                inner = inner.add(&c.scale(&t, ctx), ctx);
            }
        }
        let k = binom(i0, j[0]) * binom(i1, j[1]);
        acc = acc.add(&inner.scale_int(k, ctx).p_mul(r[0] - i0 + r[1] - i1, ctx), ctx);
    }
    // The parent [μ]_{m−1}, with ([μ]_{m−1} − μ)/p^{m−1} = −[μ_{m−1}].
    let (parent, last) = mu.split_at(data.m - 1);
    let shift = ctx.teich(last[0]).neg(ctx);
    let mut below = Eis::ZERO;
    for (i0, i1) in above_indices {
        if let Some(c) = LevelData::coeff(&data.below, parent, &[i0, i1]) {
            let e = (i0 - j[0]) as u64 + p * (i1 - j[1]) as u64;
            let t = if e == 0 { Witt::one() } else { shift.pow(e, ctx) };
            let k = binom(i0, j[0]) * binom(i1, j[1]);
            below = below.add(&c.scale(&t, ctx).scale_int(k, ctx), ctx);
        }
    }
    acc = acc.add(&below.p_mul(j[0] + j[1], ctx), ctx);
    if let Some(c) = LevelData::coeff(&data.at, mu, j) {
        acc = acc.sub(&a_p.mul(c, ctx), ctx);
    }
    Ok(acc)
}

/// Every C^m_{j,μ}, as polynomials per μ (zeros dropped).
pub fn level_coefficients(data: &LevelData, a_p: &Eis, ctx: &RingCtx) -> Result<BTreeMap<Vec<Fq>, SymPoly<Eis>>> {
    let mut out = BTreeMap::new();
    for mu in digit_strings(data.m, ctx) {
        let mut terms = Vec::new();
        for m in data.weight.monomials() {
            let j = m.unpack(2);
            terms.push((m, coefficient_c(data, &j, &mu, a_p, ctx)?));
        }
        let v = SymPoly::from_terms(&data.weight, terms, ctx);
        if !v.is_zero() {
            out.insert(mu, v);
        }
    }
    Ok(out)
}

/// The same coefficients through the Hecke operator: the level-m plus-half
/// part of (T − a_p)(f_{m−1} + f_m + f_{m+1}).
pub fn oracle_level_coefficients(data: &LevelData, a_p: &Eis, ctx: &RingCtx) -> BTreeMap<Vec<Fq>, SymPoly<Eis>> {
    let [lo, mid, hi] = data.to_ind(ctx);
    let f = lo.add(&mid, ctx).add(&hi, ctx);
    let tf = hecke_t(&f, ctx).sub(&f.scale(a_p, ctx), ctx);
    tf.entries()
        .iter()
        .filter(|(rep, v)| rep.half == Half::Plus && rep.level() == data.m && !v.is_zero())
        .map(|(rep, v)| (rep.digits.clone(), v.clone()))
        .collect()
}

/// Whether the closed formula agrees with the Hecke-module oracle at every
/// vertex of level m.
pub fn coefficients_match(data: &LevelData, a_p: &Eis, ctx: &RingCtx) -> Result<bool> {
    let x = level_coefficients(data, a_p, ctx)?;
    let y = oracle_level_coefficients(data, a_p, ctx);
    let keys: std::collections::BTreeSet<_> = x.keys().chain(y.keys()).collect();
    let agree = keys.into_iter().all(|k| match (x.get(k), y.get(k)) {
        (Some(a), Some(b)) => a.eq_at(b, ctx),
        (Some(a), None) | (None, Some(a)) => a.is_zero(),
        (None, None) => true,
    });
    Ok(agree)
}

/// Outcome of one descent step of the lattice argument at level m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    /// The claims at levels m+1 and m, and C^m_{j,μ} ∈ p^n for j ∈ {(0,0), (1,0), (0,1)}.
    pub hypotheses: bool,
    /// The value sum at level m−1 lies in p^n/a_p and both derivative sums in p^{n−2}.
    pub conclusion: bool,
}

fn at_least(x: &Eis, bound: Ratio<i64>, ctx: &RingCtx) -> bool {
    match x.valuation(ctx) {
        Valuation::Exact(v) => v >= bound,
        Valuation::AtLeast(_) => true,
    }
}

/// Checks one step of the descent for f = 2: given the coefficient claims at
/// levels m+1 and m (with respect to p^n/a_p) and the integrality of the
/// three lowest C^m, the value and derivative sums of f_{m−1} at every
/// Teichmüller point satisfy the bounds that feed the kernel lemma.
pub fn descent_step(data: &LevelData, n: i64, a_p: &Eis, ctx: &RingCtx) -> Result<StepReport> {
    let r = data.weight.r.clone();
    let (p, q) = (ctx.p() as u64, ctx.q() as u64);
    let v_ap = a_p.valuation(ctx).floor();
    let base = Ratio::from_integer(n) - v_ap;
    let one = Ratio::from_integer(1);
    let claims = |map: &BTreeMap<Vec<Fq>, SymPoly<Eis>>| {
        map.values().all(|v| {
            let c = |i: &[u32]| v.coeff(Mono::pack(i)).cloned().unwrap_or(Eis::ZERO);
            let class_sum = |k: u64| {
                v.terms()
                    .iter()
                    .filter(|(m, _)| m.total(p as u32, 2) % (q - 1) == k % (q - 1))
                    .fold(Eis::ZERO, |acc, (_, x)| acc.add(x, ctx))
            };
            at_least(&c(&[0, 0]), base, ctx)
                && at_least(&c(&r), base, ctx)
                && at_least(&class_sum(1), base, ctx)
                && at_least(&class_sum(p), base, ctx)
                && v.terms().iter().all(|(_, x)| at_least(x, base - one, ctx))
        })
    };
    let mut hypotheses = claims(&data.above) && claims(&data.at);
    for mu in digit_strings(data.m, ctx) {
        for j in [[0, 0], [1, 0], [0, 1]] {
            let c = coefficient_c(data, &j, &mu, a_p, ctx)?;
            hypotheses &= at_least(&c, Ratio::from_integer(n), ctx);
        }
    }
    let two = Ratio::from_integer(2);
    let mut conclusion = true;
    for v in data.below.values() {
        for l in Fq::all(ctx) {
            let t = ctx.teich(l).neg(ctx);
            let pw = |e: u64| if e == 0 { Witt::one() } else { t.pow(e, ctx) };
            let (mut s0, mut s1, mut s2) = (Eis::ZERO, Eis::ZERO, Eis::ZERO);
            for (m, c) in v.terms() {
                let (i0, i1) = (m.get(0) as u64, m.get(1) as u64);
                s0 = s0.add(&c.scale(&pw(i0 + p * i1), ctx), ctx);
                if i0 > 0 {
                    s1 = s1.add(&c.scale(&pw(i0 - 1 + p * i1), ctx).scale_int(i0, ctx), ctx);
                }
                if i1 > 0 {
                    s2 = s2.add(&c.scale(&pw(i0 + p * (i1 - 1)), ctx).scale_int(i1, ctx), ctx);
                }
            }
            conclusion &= at_least(&s0, base, ctx)
                && at_least(&s1, Ratio::from_integer(n) - two, ctx)
                && at_least(&s2, Ratio::from_integer(n) - two, ctx);
        }
    }
    Ok(StepReport { hypotheses, conclusion })
}

#[cfg(test)]
mod tests;
