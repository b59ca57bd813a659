use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::RingElem;

fn eval(coeffs: &[Eis], exps: &[u32], ctx: &RingCtx) -> Vec<Eis> {
    Fq::all(ctx)
        .map(|l| {
            let t = ctx.teich(l);
            coeffs.iter().zip(exps).fold(Eis::ZERO, |acc, (c, &e)| {
                let w = if e == 0 { Witt::one() } else { t.pow(e as u64, ctx) };
                acc.add(&c.scale(&w, ctx), ctx)
            })
        })
        .collect()
}

#[test]
fn constant_values_recover_constant() {
    let ctx = RingCtx::new(3, 2, 3, 1).unwrap();
    let v = Eis::from_witt(&Witt::from_int(7, &ctx));
    let c = vandermonde_recover(&vec![v.clone(); 9], &[0, 3, 5], &ctx).unwrap();
    assert!(c[0].eq_at(&v, &ctx));
    assert!(c[1].is_zero() && c[2].is_zero());
}

#[test]
fn recovery_of_small_example() {
    let ctx = RingCtx::new(3, 1, 2, 1).unwrap();
    let coeffs = [Eis::from_witt(&Witt::from_int(1, &ctx)), Eis::from_witt(&Witt::from_int(3, &ctx))];
    let values = eval(&coeffs, &[0, 1], &ctx);
    let back = vandermonde_recover(&values, &[0, 1], &ctx).unwrap();
    assert!(back[0].eq_at(&coeffs[0], &ctx) && back[1].eq_at(&coeffs[1], &ctx));
}

#[test]
fn recovery_rejects_bad_exponents() {
    let ctx = RingCtx::new(3, 1, 2, 1).unwrap();
    let values = vec![Eis::ZERO; 3];
    assert!(matches!(vandermonde_recover(&values, &[1, 1], &ctx), Err(Error::InvalidInput(_))));
    assert!(matches!(vandermonde_recover(&values, &[3], &ctx), Err(Error::InvalidInput(_))));
    let one = Eis::from_witt(&Witt::one());
    assert!(matches!(vandermonde_recover(&vec![one; 3], &[1], &ctx), Err(Error::Hypothesis(_))));
}

#[test]
fn integral_values_never_come_from_non_integral_coefficients() {
    let ctx = RingCtx::new(3, 2, 4, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let exps = [0u32, 1, 4, 8];
    for _ in 0..100 {
        let mut coeffs: Vec<Eis> = exps.iter().map(|_| Eis::random_integral(&mut rng, &ctx)).collect();
        let k = rng.gen_range(0..exps.len());
        coeffs[k] = coeffs[k].add(&Eis::from_witt(&Witt::one()).div_pi_pow(1), &ctx);
        let values = eval(&coeffs, &exps, &ctx);
        assert!(values.iter().any(|v| v.residue(&ctx).is_err()));
        let back = vandermonde_recover(&values, &exps, &ctx).unwrap();
        assert!(back.iter().zip(&coeffs).all(|(a, b)| a.eq_at(b, &ctx)));
    }
}

#[test]
fn eqsol_kernel_trivial_unless_both_weights_exceed_p() {
    for r0 in 0..=4 {
        for r1 in 0..=4 {
            assert_eq!(kernel_check_eqsol(3, r0, r1).unwrap(), (r0, r1) != (4, 4), "({r0},{r1})");
        }
    }
    assert!(kernel_check_eqsol(3, 5, 0).is_err());
}

#[test]
fn eqsol_kernel_at_p2_edge() {
    assert!(kernel_check_eqsol(2, 2, 2).unwrap());
}

fn ap(ctx: &RingCtx, c: u32, seed: u64) -> Eis {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let u = Witt::random(&mut rng, ctx);
        if u.is_unit(ctx) {
            return Eis::slope_element(c, &u, ctx);
        }
    }
}

#[test]
fn zero_data_gives_zero_coefficients() {
    let ctx = RingCtx::new(3, 2, 4, 1).unwrap();
    let d = LevelData::zero(1, &[2, 2]);
    assert!(level_coefficients(&d, &ap(&ctx, 1, 0), &ctx).unwrap().is_empty());
}

#[test]
fn single_entries_match_hecke_oracle() {
    let ctx = RingCtx::new(3, 2, 4, 1).unwrap();
    let a = ap(&ctx, 1, 3);
    let w = WeightVec::untwisted(&[2, 2]);
    let one = Eis::from_witt(&Witt::one());
    let z = Fq::ZERO;
    let g = Fq::from_index(4, &ctx);
    // Only f_{m+1}: the T⁻ sum alone.
    let mut d = LevelData::zero(1, &[2, 2]);
    d.above.insert(vec![g, z], SymPoly::monomial(&w, &[1, 2], one.clone(), &ctx).unwrap());
    assert!(maps_equal(&level_coefficients(&d, &a, &ctx).unwrap(), &oracle_level_coefficients(&d, &a, &ctx), &ctx));
    // Only f_{m−1}: the T⁺ sum alone.
    let mut d = LevelData::zero(1, &[2, 2]);
    d.below.insert(vec![], SymPoly::monomial(&w, &[2, 1], one, &ctx).unwrap());
    assert!(maps_equal(&level_coefficients(&d, &a, &ctx).unwrap(), &oracle_level_coefficients(&d, &a, &ctx), &ctx));
}

fn maps_equal(x: &BTreeMap<Vec<Fq>, SymPoly<Eis>>, y: &BTreeMap<Vec<Fq>, SymPoly<Eis>>, ctx: &RingCtx) -> bool {
    let keys: std::collections::BTreeSet<_> = x.keys().chain(y.keys()).collect();
    keys.into_iter().all(|k| match (x.get(k), y.get(k)) {
        (Some(a), Some(b)) => a.eq_at(b, ctx),
        (Some(a), None) | (None, Some(a)) => a.is_zero(),
        (None, None) => true,
    })
}

#[test]
fn random_level_data_matches_hecke_oracle() {
    let ctx = RingCtx::new(3, 2, 4, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..3 {
        let d = LevelData::random(&mut rng, 1, &[2, 2], 0.5, &ctx).unwrap();
        let a = ap(&ctx, 1 + k % 3, k as u64);
        assert!(maps_equal(&level_coefficients(&d, &a, &ctx).unwrap(), &oracle_level_coefficients(&d, &a, &ctx), &ctx));
    }
}

#[test]
fn level_two_matches_hecke_oracle() {
    let ctx = RingCtx::new(3, 2, 4, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let d = LevelData::random(&mut rng, 2, &[1, 2], 0.1, &ctx).unwrap();
    let a = ap(&ctx, 1, 9);
    assert!(maps_equal(&level_coefficients(&d, &a, &ctx).unwrap(), &oracle_level_coefficients(&d, &a, &ctx), &ctx));
}

#[test]
fn descent_step_on_divisible_data() {
    let ctx = RingCtx::new(3, 2, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = ap(&ctx, 1, 1);
    let mut d = LevelData::random(&mut rng, 1, &[4, 2], 0.5, &ctx).unwrap();
    // Everything divisible by p^3 meets every claim for n = 2.
    for map in [&mut d.below, &mut d.at, &mut d.above] {
        for v in map.values_mut() {
            *v = v.map_coeffs(|c| c.p_mul(3, &ctx), &ctx);
        }
    }
    let rep = descent_step(&d, 2, &a, &ctx).unwrap();
    assert_eq!(rep, StepReport { hypotheses: true, conclusion: true });
    // A unit coefficient at level m breaks the hypotheses.
    let w = d.weight.clone();
    d.at.insert(vec![Fq::ONE], SymPoly::mono(&w, &[0, 0], &ctx));
    assert!(!descent_step(&d, 2, &a, &ctx).unwrap().hypotheses);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn recovery_inverts_evaluation(seed in 0u64..10_000, mask in 1u32..512) {
        let ctx = RingCtx::new(3, 2, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exps: Vec<u32> = (0..9).filter(|e| mask >> e & 1 == 1).collect();
        let coeffs: Vec<Eis> = exps.iter().map(|_| Eis::random_integral(&mut rng, &ctx)).collect();
        let back = vandermonde_recover(&eval(&coeffs, &exps, &ctx), &exps, &ctx).unwrap();
        prop_assert!(back.iter().zip(&coeffs).all(|(a, b)| a.eq_at(b, &ctx)));
    }
}

#[test]
fn eqsol_kernel_is_nontrivial_when_both_weights_exceed_p() {
    // c_{4,0} = c_{0,4} = 1, c_{1,1} = c_{3,3} = −1 at p = 3: the value sum
    // vanishes identically, the i_0-sum is 3x³ and the i_1-sum is x⁹ − x.
    let ctx = RingCtx::new(3, 2, 1, 1).unwrap();
    let c = [((4u64, 0u64), 1i64), ((0, 4), 1), ((1, 1), -1), ((3, 3), -1)];
    for l in Fq::all(&ctx) {
        let sum = |w: &dyn Fn(u64, u64) -> Option<(i64, u64)>| {
            c.iter().fold(Fq::ZERO, |acc, &((i0, i1), k)| match w(i0, i1) {
                Some((m, e)) => acc.add(Fq::from_int(k * m, &ctx).mul(l.pow(e, &ctx), &ctx), &ctx),
                None => acc,
            })
        };
        assert!(sum(&|i0, i1| Some((1, i0 + 3 * i1))).is_zero());
        assert!(sum(&|i0, i1| (i0 > 0).then(|| (i0 as i64, i0 - 1 + 3 * i1))).is_zero());
        assert!(sum(&|i0, i1| (i1 > 0).then(|| (i1 as i64, i0 + 3 * (i1 - 1)))).is_zero());
    }
    assert_eq!(eqsol_rank(3, 4, 4).unwrap(), (24, 25));
    for p in [3u32, 5] {
        for r0 in 0..=2 * p - 2 {
            for r1 in 0..=2 * p - 2 {
                let trivial = kernel_check_eqsol(p, r0, r1).unwrap();
                assert_eq!(trivial, r0 <= p || r1 <= p, "p={p} ({r0},{r1})");
            }
        }
    }
}
