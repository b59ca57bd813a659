use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::{Eis, RingElem, Witt};
use crate::sympoly::{Mono, WeightVec};

fn random_witt_poly(w: &WeightVec, rng: &mut ChaCha8Rng, ctx: &RingCtx) -> SymPoly<Witt> {
    let mut terms = Vec::new();
    for m in w.monomials() {
        if rng.gen_bool(0.6) {
            terms.push((m, Witt::random(rng, ctx)));
        }
    }
    SymPoly::from_terms(w, terms, ctx)
}

#[test]
fn phi_examples() {
    let ctx = RingCtx::new(3, 1, 6, 1).unwrap();
    let w = WeightVec::untwisted(&[2]);
    let y2: SymPoly<Witt> = SymPoly::mono(&w, &[2], &ctx);
    assert!(phi_alpha_inv(&y2, &ctx).eq_at(&y2, &ctx));
    let x2: SymPoly<Witt> = SymPoly::mono(&w, &[0], &ctx);
    assert!(phi_alpha_inv(&x2, &ctx).eq_at(&x2.scale(&Witt::from_int(9, &ctx), &ctx), &ctx));
    let c2 = RingCtx::new(3, 2, 6, 1).unwrap();
    let w2 = WeightVec::untwisted(&[1, 1]);
    // X₀Y₁ has index (0, 1)
    let v: SymPoly<Witt> = SymPoly::mono(&w2, &[0, 1], &c2);
    assert!(phi_alpha_inv(&v, &c2).eq_at(&v.scale(&Witt::from_int(3, &c2), &c2), &c2));
}

#[test]
fn t_plus_examples() {
    let ctx = RingCtx::new(3, 1, 6, 1).unwrap();
    let w = WeightVec::untwisted(&[1]);
    let y: SymPoly<Witt> = SymPoly::mono(&w, &[1], &ctx);
    let out = hecke_t_plus(&IndElem::single(CosetRep::identity(), y), &ctx);
    assert_eq!(out.len(), 3);
    for l in Fq::all(&ctx) {
        let v = out.get(&CosetRep::plus(vec![l])).unwrap();
        let mut expect = vec![(Mono::pack(&[1]), Witt::from_int(3, &ctx))];
        expect.push((Mono::pack(&[0]), ctx.teich(l).neg(&ctx)));
        assert!(v.eq_at(&SymPoly::from_terms(&w, expect, &ctx), &ctx));
    }
    let c2 = RingCtx::new(3, 2, 6, 1).unwrap();
    let w2 = WeightVec::untwisted(&[3, 2]);
    let x: SymPoly<Witt> = SymPoly::mono(&w2, &[0, 0], &c2);
    let out = hecke_t_plus(&IndElem::single(CosetRep::identity(), x.clone()), &c2);
    assert_eq!(out.len(), 9);
    assert!(out.entries().values().all(|v| v.eq_at(&x, &c2)));
}

#[test]
fn t_minus_examples() {
    let ctx = RingCtx::new(3, 2, 6, 1).unwrap();
    let w = WeightVec::untwisted(&[4, 5]);
    let y: SymPoly<Witt> = SymPoly::mono(&w, &[4, 5], &ctx);
    let out = hecke_t_minus(&IndElem::single(CosetRep::identity(), y.clone()), &ctx);
    assert!(out.eq_at(&IndElem::single(CosetRep::alpha(), y), &ctx));
    let x: SymPoly<Witt> = SymPoly::mono(&w, &[0, 0], &ctx);
    assert!(hecke_t_minus(&IndElem::single(CosetRep::identity(), x), &ctx).is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = random_witt_poly(&w, &mut rng, &ctx);
    let mu = Fq::from_index(7, &ctx);
    let out = hecke_t_minus(&IndElem::single(CosetRep::plus(vec![mu]), v.clone()), &ctx);
    let k = Mat2::new(Witt::one(), ctx.teich(mu), Witt::ZERO, Witt::one());
    let expect = IndElem::single(CosetRep::identity(), phi_alpha_inv(&v, &ctx).act(&k, &ctx));
    assert!(out.eq_at(&expect, &ctx));
}

#[test]
fn reduce_examples() {
    let ctx = RingCtx::new(3, 1, 6, 2).unwrap();
    let w = WeightVec::untwisted(&[3]);
    let pi = Eis::pi_pow(1, &ctx);
    let one_pi = Eis::one(&ctx).add(&pi, &ctx);
    let f = IndElem::single(CosetRep::identity(), SymPoly::monomial(&w, &[0], one_pi, &ctx).unwrap());
    let red = reduce_mod_p(&f, &ctx).unwrap();
    assert_eq!(red.render(), "(plus, 0, []): 1*[0]");
    let g = IndElem::single(CosetRep::identity(), SymPoly::monomial(&w, &[0], Eis::from_int(3, &ctx), &ctx).unwrap());
    assert!(reduce_mod_p(&g, &ctx).unwrap().is_zero());
    let bad = IndElem::single(CosetRep::identity(), SymPoly::monomial(&w, &[0], pi.inv(&ctx).unwrap(), &ctx).unwrap());
    assert!(matches!(reduce_mod_p(&bad, &ctx), Err(crate::Error::NonIntegral { .. })));
}

#[test]
fn coset_decomposition_is_complete() {
    for (p, f) in [(3, 1), (3, 2), (2, 2), (5, 1)] {
        assert!(coset_decomposition_check(&RingCtx::new(p, f, 4, 1).unwrap()).unwrap());
    }
}

#[test]
fn oracle_agrees_on_small_inputs() {
    let ctx = RingCtx::new(3, 2, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = WeightVec::untwisted(&[3, 2]);
    let mut f = IndElem::zero(&w);
    for rep in [CosetRep::identity(), CosetRep::alpha(), CosetRep::plus(vec![Fq::from_index(4, &ctx)])] {
        f.insert(rep, random_witt_poly(&w, &mut rng, &ctx), &ctx);
    }
    assert!(hecke_t(&f, &ctx).eq_at(&oracle_t(&f, &ctx).unwrap(), &ctx));
}

// [g, v] ↦ [h·g, v], each h·g located by the KZ-equivalence search
fn translate(h: &Mat2<Witt>, f: &IndElem<Witt>, ctx: &RingCtx) -> IndElem<Witt> {
    let big = ctx.with_precision(ctx.n() + 8).unwrap();
    let cands: Vec<CosetRep> = CosetRep::ball(f.max_radius() + 2, &big);
    let lift = |m: &Mat2<Witt>, c: &RingCtx| {
        let t = |w: &Witt| Witt::from_coeffs(&w.coeffs().map(|x| x as i64), c);
        Mat2::new(t(&m.a), t(&m.b), t(&m.c), t(&m.d))
    };
    let hb = lift(h, &big);
    let mut out = IndElem::zero(f.weight());
    for (rep, v) in f.entries() {
        let g = hb.mul(&rep.matrix(&big), &big);
        let (c, k) = cands
            .iter()
            .find_map(|c| crate::tree::kz_equivalent(&g, &c.matrix(&big), &big).map(|k| (c.clone(), k)))
            .unwrap();
        out.insert(c, v.act(&lift(&k, ctx), ctx), ctx);
    }
    out
}

#[test]
fn translation_equivariance() {
    let ctx = RingCtx::new(3, 2, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = WeightVec::untwisted(&[3, 2]);
    let mut f = IndElem::zero(&w);
    f.insert(CosetRep::identity(), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    f.insert(CosetRep::alpha(), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    f.insert(CosetRep::plus(vec![Fq::from_index(5, &ctx)]), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    for l in [Fq::ZERO, Fq::from_index(4, &ctx)] {
        let h = Mat2::new(Witt::from_int(3, &ctx), ctx.teich(l), Witt::ZERO, Witt::one());
        let lhs = hecke_t(&translate(&h, &f, &ctx), &ctx);
        let rhs = translate(&h, &hecke_t(&f, &ctx), &ctx);
        assert!(lhs.eq_at(&rhs, &ctx));
    }
}

#[test]
fn mod_p_compatibility() {
    let ctx = RingCtx::new(3, 2, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = WeightVec::untwisted(&[4, 3]);
    let mut f = IndElem::zero(&w);
    f.insert(CosetRep::identity(), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    f.insert(CosetRep::plus(vec![Fq::ONE]), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    f.insert(CosetRep::alpha(), random_witt_poly(&w, &mut rng, &ctx), &ctx);
    let lhs = reduce_mod_p(&hecke_t(&f, &ctx), &ctx).unwrap();
    let rhs = t_modp(&reduce_mod_p(&f, &ctx).unwrap(), &ctx);
    assert!(lhs.eq_at(&rhs, &ctx));
}

#[test]
fn phi_is_determined_by_commuting_relations() {
    for r in [[1, 1], [2, 1], [2, 2], [3, 2]] {
        let rep = phi_commutant(3, r, 3, 17).unwrap();
        assert_eq!(rep.dim, 1, "r = {r:?}");
        assert!(rep.diagonal_in_kernel);
    }
}
