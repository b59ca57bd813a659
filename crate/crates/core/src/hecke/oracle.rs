//! Direct evaluation of T[g, v] = Σ_{y} [g·y, φ(y^{-1}) v] over the coset
//! decomposition of KZ·α·KZ, locating each g·y by the KZ-equivalence search
//! instead of the hand-derived tree moves.

use crate::error::{Error, Result};
use crate::padic::{Coeff, Fq, RingCtx, Witt};
use crate::sympoly::{Mat2, SymPoly};
use crate::tree::{kz_equivalent, CosetRep, IndElem};

use super::phi_alpha_inv;

fn beta(l: Fq, ctx: &RingCtx) -> Mat2<Witt> {
    Mat2::new(Witt::from_int(ctx.p() as i64, ctx), ctx.teich(l), Witt::ZERO, Witt::one())
}

fn alpha(ctx: &RingCtx) -> Mat2<Witt> {
    Mat2::from_ints(1, 0, 0, ctx.p() as i64, ctx)
}

fn truncate(m: &Mat2<Witt>, small: &RingCtx) -> Mat2<Witt> {
    let t = |w: &Witt| Witt::from_coeffs(&w.coeffs().map(|c| c as i64), small);
    Mat2::new(t(&m.a), t(&m.b), t(&m.c), t(&m.d))
}

/// The q+1 matrices β_λ, α are pairwise KZ-inequivalent, integral and of
/// determinant valuation 1, i.e. they exhaust KZ·α·KZ/KZ.
pub fn coset_decomposition_check(ctx: &RingCtx) -> Result<bool> {
    let big = ctx.with_precision(ctx.n() + 8)?;
    let mut ys: Vec<Mat2<Witt>> = Fq::all(&big).map(|l| beta(l, &big)).collect();
    ys.push(alpha(&big));
    for (i, a) in ys.iter().enumerate() {
        if a.det(&big).vp(&big) != Some(1) {
            return Ok(false);
        }
        for (j, b) in ys.iter().enumerate() {
            if (kz_equivalent(a, b, &big).is_some()) != (i == j) {
                return Ok(false);
            }
        }
    }
    Ok(ys.len() == ctx.q() as usize + 1)
}

/// φ(β_λ^{-1}) v with β_λ^{-1} = w·α^{-1}·w·(1, −[λ]; 0, 1) up to the centre.
fn phi_beta_inv<E: Coeff<S = Witt>>(v: &SymPoly<E>, l: Fq, ctx: &RingCtx) -> SymPoly<E> {
    let w = Mat2::<Witt>::w(ctx);
    let u = Mat2::new(Witt::one(), ctx.teich(l).neg(ctx), Witt::ZERO, Witt::one());
    let x = v.act(&u, ctx).act(&w, ctx);
    phi_alpha_inv(&x, ctx).act(&w, ctx)
}

pub fn oracle_t<E: Coeff<S = Witt>>(f: &IndElem<E>, ctx: &RingCtx) -> Result<IndElem<E>> {
    let big = ctx.with_precision(ctx.n() + 8)?;
    let radius = f.max_radius() + 1;
    let candidates: Vec<(CosetRep, Mat2<Witt>)> =
        CosetRep::ball(radius, &big).into_iter().map(|c| { let m = c.matrix(&big); (c, m) }).collect();
    let locate = |g: &Mat2<Witt>| -> Result<(CosetRep, Mat2<Witt>)> {
        for (c, m) in &candidates {
            if let Some(k) = kz_equivalent(g, m, &big) {
                return Ok((c.clone(), truncate(&k, ctx)));
            }
        }
        Err(Error::InvalidInput("translate outside the candidate ball".into()))
    };
    let mut out = IndElem::zero(f.weight());
    for (rep, v) in f.entries() {
        let g = rep.matrix(&big);
        for l in Fq::all(ctx) {
            let (c, k) = locate(&g.mul(&beta(l, &big), &big))?;
            out.insert(c, phi_beta_inv(v, l, ctx).act(&k, ctx), ctx);
        }
        let (c, k) = locate(&g.mul(&alpha(&big), &big))?;
        out.insert(c, phi_alpha_inv(v, ctx).act(&k, ctx), ctx);
    }
    Ok(out)
}
