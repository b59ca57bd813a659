//! The Hecke operator T = T⁺ + T⁻ on compactly induced functions.

mod commutant;
mod oracle;

use rayon::prelude::*;

use crate::error::Result;
use crate::padic::{Coeff, Fq, RingCtx, Scalar};
use crate::sympoly::{Mat2, Substitution, SymPoly, WeightVec};
use crate::tree::{CosetRep, IndElem, Move};

pub use commutant::{phi_commutant, CommutantReport};
pub use oracle::{coset_decomposition_check, oracle_t};

/// v(pX_i, Y_i): coefficient j times p^{Σ(r_i − j_i)}.
pub fn phi_alpha_inv<E: Coeff>(v: &SymPoly<E>, ctx: &RingCtx) -> SymPoly<E> {
    let r = v.weight().r.clone();
    v.map_indexed_p_pow(|m| (0..r.len()).map(|i| r[i] - m.get(i)).sum(), ctx)
}

/// (1, −[λ]; 0, p), which sends v to v(X_i, (−[λ])^{p^i} X_i + p Y_i).
pub fn beta_inverse_numerator<S: Scalar>(l: Fq, ctx: &RingCtx) -> Mat2<S> {
    Mat2::new(
        S::one(ctx),
        S::teich(l, ctx).neg(ctx),
        S::zero(ctx),
        S::from_int(ctx.p() as i64, ctx),
    )
}

// [rep·k, v] = [rep, k·v]
fn settle<E: Coeff>(mv: Move, v: SymPoly<E>, ctx: &RingCtx) -> (CosetRep, SymPoly<E>) {
    match &mv.k {
        Some(k) => (mv.rep, v.act(&k.to_scalar::<E::S>(ctx), ctx)),
        None => (mv.rep, v),
    }
}

fn collect<E: Coeff>(weight: &WeightVec, parts: Vec<(CosetRep, SymPoly<E>)>, ctx: &RingCtx) -> IndElem<E> {
    let mut out = IndElem::zero(weight);
    for (rep, v) in parts {
        out.insert(rep, v, ctx);
    }
    out
}

pub fn hecke_t_plus<E: Coeff>(f: &IndElem<E>, ctx: &RingCtx) -> IndElem<E> {
    let subs: Vec<(Fq, Substitution<E::S>)> = Fq::all(ctx)
        .map(|l| (l, Substitution::new(&beta_inverse_numerator(l, ctx), f.weight(), ctx)))
        .collect();
    let entries: Vec<(&CosetRep, &SymPoly<E>)> = f.entries().iter().collect();
    let parts: Vec<(CosetRep, SymPoly<E>)> = entries
        .par_iter()
        .flat_map_iter(|(rep, v)| subs.iter().map(move |(l, s)| settle(rep.move_beta(*l, ctx), s.apply(v, ctx), ctx)))
        .collect();
    collect(f.weight(), parts, ctx)
}

/// One α-move per entry (no multiplicity).
pub fn hecke_t_minus<E: Coeff>(f: &IndElem<E>, ctx: &RingCtx) -> IndElem<E> {
    let entries: Vec<(&CosetRep, &SymPoly<E>)> = f.entries().iter().collect();
    let parts: Vec<(CosetRep, SymPoly<E>)> = entries
        .par_iter()
        .map(|(rep, v)| settle(rep.move_alpha(ctx), phi_alpha_inv(v, ctx), ctx))
        .collect();
    collect(f.weight(), parts, ctx)
}

pub fn hecke_t<E: Coeff>(f: &IndElem<E>, ctx: &RingCtx) -> IndElem<E> {
    hecke_t_plus(f, ctx).add(&hecke_t_minus(f, ctx), ctx)
}

/// (T − a_p) F.
pub fn apply_t_minus_ap<E: Coeff>(f: &IndElem<E>, a_p: &E, ctx: &RingCtx) -> IndElem<E> {
    hecke_t(f, ctx).sub(&f.scale(a_p, ctx), ctx)
}

pub fn reduce_mod_p<E: Coeff>(f: &IndElem<E>, ctx: &RingCtx) -> Result<IndElem<Fq>> {
    f.reduce(ctx)
}

/// The same operator over F_q.
pub fn t_modp(f: &IndElem<Fq>, ctx: &RingCtx) -> IndElem<Fq> {
    hecke_t(f, ctx)
}

#[cfg(test)]
mod tests;
