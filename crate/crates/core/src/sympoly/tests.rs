use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::Witt;

fn ctx(p: u32, f: usize) -> RingCtx {
    RingCtx::new(p, f, 4, 1).unwrap()
}

fn random_fq_poly(w: &WeightVec, rng: &mut ChaCha8Rng, ctx: &RingCtx) -> SymPoly<Fq> {
    let terms = w.monomials().map(|m| (m, Fq::from_index(rng.gen_range(0..ctx.q()), ctx))).collect();
    SymPoly::from_terms(w, terms, ctx)
}

fn random_witt_poly(w: &WeightVec, rng: &mut ChaCha8Rng, ctx: &RingCtx) -> SymPoly<Witt> {
    let terms = w.monomials().map(|m| (m, Witt::random(rng, ctx))).collect();
    SymPoly::from_terms(w, terms, ctx)
}

fn random_mat<S: Scalar>(rng: &mut ChaCha8Rng, ctx: &RingCtx, gen: impl Fn(&mut ChaCha8Rng) -> S) -> Mat2<S> {
    let _ = ctx;
    Mat2::new(gen(rng), gen(rng), gen(rng), gen(rng))
}

#[test]
fn identity_acts_trivially() {
    let c = ctx(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = WeightVec::new(&[3, 4], 2);
    let v = random_fq_poly(&w, &mut rng, &c);
    assert!(v.act(&Mat2::identity(&c), &c).eq_at(&v, &c));
}

#[test]
fn swap_exchanges_variables() {
    let c = ctx(3, 1);
    let w = WeightVec::untwisted(&[3]);
    // X²Y has index 1
    let v: SymPoly<Fq> = SymPoly::mono(&w, &[1], &c);
    let out = v.act(&Mat2::w(&c), &c);
    assert!(out.eq_at(&SymPoly::mono(&w, &[2], &c), &c));
}

#[test]
fn singular_projection_kills_theta() {
    let c = ctx(3, 1);
    let w = WeightVec::untwisted(&[4]);
    let th: SymPoly<Fq> = theta(&c, 0, &w).unwrap();
    assert_eq!(th.render(), "2*[1] + 1*[3]");
    assert!(th.act(&Mat2::from_ints(1, 0, 0, 0, &c), &c).is_zero());
}

#[test]
fn theta_shapes() {
    let c = ctx(3, 2);
    let w = WeightVec::untwisted(&[9, 9]);
    let th: SymPoly<Fq> = theta(&c, 1, &w).unwrap();
    // X₁Y₀³ − Y₁X₀³ in weight (3, 1)
    assert_eq!(th.weight().r, vec![3, 1]);
    assert_eq!(th.coeff(Mono::pack(&[3, 0])), Some(&Fq::ONE));
    assert_eq!(th.coeff(Mono::pack(&[0, 1])), Some(&Fq::from_int(-1, &c)));
    assert!(theta::<Fq>(&c, 1, &WeightVec::untwisted(&[2, 9])).is_err());
}

#[test]
fn theta_equivariance_exhaustive_f9() {
    let c = ctx(3, 2);
    let w = WeightVec::untwisted(&[4, 4]);
    let thetas: Vec<SymPoly<Fq>> = (0..2).map(|i| theta(&c, i, &w).unwrap()).collect();
    let all: Vec<Fq> = Fq::all(&c).collect();
    for &a in &all {
        for &b in &all {
            for &cc in &all {
                for &d in &all {
                    let g = Mat2::new(a, b, cc, d);
                    let det = g.det(&c);
                    for (i, th) in thetas.iter().enumerate() {
                        let lhs = th.act(&g, &c);
                        let rhs = th.scale(&det.pow((3u64).pow(i as u32), &c), &c);
                        assert!(lhs.eq_at(&rhs, &c));
                    }
                }
            }
        }
    }
}

#[test]
fn theta_equivariance_over_witt() {
    let c = RingCtx::new(3, 2, 5, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = WeightVec::untwisted(&[4, 4]);
    for _ in 0..50 {
        let g = random_mat(&mut rng, &c, |r| Witt::random(r, &c));
        for i in 0..2 {
            let th: SymPoly<Witt> = theta(&c, i, &w).unwrap();
            let det = g.det(&c);
            // (bX + dY)^p is additive only mod p, so the identity holds mod p
            let lhs = th.act(&g, &c).reduce(&c).unwrap();
            let rhs = th.scale_scalar(&det.pow(3u64.pow(i as u32), &c), &c).reduce(&c).unwrap();
            assert!(lhs.eq_at(&rhs, &c));
        }
    }
}

#[test]
fn fp_matrices_act_without_twist() {
    let c = ctx(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = WeightVec::untwisted(&[2, 3]);
    let v = random_fq_poly(&w, &mut rng, &c);
    let g = Mat2::<Fq>::from_ints(1, 2, 0, 1, &c);
    assert!((0..2).all(|i| g.frob(i, &c) == g));
    // on a pure Y monomial the substitution is the same in every factor
    let y: SymPoly<Fq> = SymPoly::mono(&w, &[2, 3], &c);
    let out = y.act(&g, &c);
    assert_eq!(out.coeff(Mono::pack(&[0, 0])), Some(&Fq::from_int(2i64.pow(5), &c)));
    assert!(v.act(&g, &c).weight() == v.weight());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn action_axiom_fq(seed in any::<u64>(), r0 in 0u32..6, r1 in 0u32..6, s in 0u32..3) {
        let c = ctx(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightVec::new(&[r0, r1], s);
        let v = random_fq_poly(&w, &mut rng, &c);
        let g = random_mat(&mut rng, &c, |r| Fq::from_index(r.gen_range(0..9), &c));
        let h = random_mat(&mut rng, &c, |r| Fq::from_index(r.gen_range(0..9), &c));
        let lhs = v.act(&g.mul(&h, &c), &c);
        let rhs = v.act(&h, &c).act(&g, &c);
        prop_assert!(lhs.eq_at(&rhs, &c));
        prop_assert_eq!(lhs.weight(), &w);
    }

    #[test]
    fn action_axiom_witt(seed in any::<u64>(), r0 in 0u32..5, r1 in 0u32..5) {
        let c = RingCtx::new(3, 2, 5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightVec::new(&[r0, r1], 1);
        let v = random_witt_poly(&w, &mut rng, &c);
        let g = random_mat(&mut rng, &c, |r| Witt::random(r, &c));
        let h = random_mat(&mut rng, &c, |r| Witt::random(r, &c));
        let lhs = v.act(&g.mul(&h, &c), &c);
        let rhs = v.act(&h, &c).act(&g, &c);
        prop_assert!(lhs.eq_at(&rhs, &c));
    }
}
