//! Exact arithmetic in the residue field F_q, the truncated unramified ring
//! W = Z_{p^f}/p^N and the Eisenstein extension O_E/π^M with π^e = p.

mod ctx;
mod eis;
mod fq;
mod ring;
mod witt;

pub use ctx::{RingCtx, MAX_E, MAX_F};
pub(crate) use ctx::exact_binom;
pub use eis::{Eis, Valuation};
pub use fq::Fq;
pub use ring::{Coeff, RingElem, Scalar};
pub use witt::Witt;

/// `teichmuller(λ)`: the unique root of x^q = x in W reducing to λ.
pub fn teichmuller(ctx: &RingCtx, l: Fq) -> Witt {
    ctx.teich(l)
}

pub fn frobenius(ctx: &RingCtx, w: &Witt) -> Witt {
    w.frob(1, ctx)
}

pub fn valuation(ctx: &RingCtx, x: &Eis) -> Valuation {
    x.valuation(ctx)
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;
    use proptest::prelude::*;

    use super::*;
    use crate::Error;

    #[test]
    fn teichmuller_examples() {
        let c3 = RingCtx::new(3, 1, 2, 1).unwrap();
        assert_eq!(teichmuller(&c3, Fq::ZERO), Witt::ZERO);
        assert_eq!(teichmuller(&c3, Fq::from_int(2, &c3)), Witt::from_int(8, &c3));
        let c5 = RingCtx::new(5, 1, 2, 1).unwrap();
        assert_eq!(teichmuller(&c5, Fq::from_int(2, &c5)), Witt::from_int(7, &c5));
    }

    #[test]
    fn frobenius_on_root_of_h_mod_p() {
        let ctx = RingCtx::new(3, 2, 1, 1).unwrap();
        let x = Witt::from_coeffs(&[0, 1], &ctx);
        assert_eq!(frobenius(&ctx, &x), x.pow(3, &ctx));
    }

    #[test]
    fn frobenius_trivial_for_f1() {
        let ctx = RingCtx::new(5, 1, 4, 1).unwrap();
        let w = Witt::from_int(123, &ctx);
        assert_eq!(frobenius(&ctx, &w), w);
    }

    #[test]
    fn valuation_examples() {
        let ctx = RingCtx::new(3, 2, 6, 2).unwrap();
        let p = Eis::from_int(3, &ctx);
        assert_eq!(valuation(&ctx, &p), Valuation::Exact(Ratio::from_integer(1)));
        let pi = Eis::pi_pow(1, &ctx);
        assert_eq!(valuation(&ctx, &pi), Valuation::Exact(Ratio::new(1, 2)));
        assert_eq!(valuation(&ctx, &Eis::ZERO), Valuation::AtLeast(Ratio::from_integer(6)));
        assert_eq!(valuation(&ctx, &Eis::ZERO).to_string(), "≥ 6");
    }

    #[test]
    fn teichmuller_exhaustive() {
        for (p, f) in [(2, 2), (3, 2), (5, 2), (3, 3)] {
            let ctx = RingCtx::new(p, f, 6, 1).unwrap();
            let q = ctx.q() as u64;
            for a in Fq::all(&ctx) {
                let ta = teichmuller(&ctx, a);
                assert_eq!(ta.pow(q, &ctx), ta);
                assert_eq!(ta.reduce(&ctx), a);
                assert_eq!(frobenius(&ctx, &ta), teichmuller(&ctx, a.frob(1, &ctx)));
                for b in Fq::all(&ctx) {
                    let tb = teichmuller(&ctx, b);
                    assert_eq!(ta.mul(&tb, &ctx), teichmuller(&ctx, a.mul(b, &ctx)));
                }
            }
        }
    }

    #[test]
    fn frobenius_has_order_f() {
        let ctx = RingCtx::new(3, 3, 5, 1).unwrap();
        let w = Witt::from_coeffs(&[4, 17, 200], &ctx);
        let mut x = w;
        for _ in 0..3 {
            x = frobenius(&ctx, &x);
        }
        assert_eq!(x, w);
        assert_ne!(frobenius(&ctx, &w), w);
    }

    #[test]
    fn residue_and_division() {
        let ctx = RingCtx::new(3, 1, 6, 2).unwrap();
        let pi = Eis::pi_pow(1, &ctx);
        let one_plus_pi = Eis::from_int(1, &ctx).add(&pi, &ctx);
        assert_eq!(one_plus_pi.residue(&ctx).unwrap(), Fq::ONE);
        let x = Eis::from_int(1, &ctx).div(&pi, &ctx);
        assert!(matches!(x, Err(Error::NonIntegral { .. })));
        let y = Eis::from_int(3, &ctx).div(&pi, &ctx).unwrap();
        assert!(y.eq_at(&pi, &ctx));
        let inv = Eis::from_int(1, &ctx).div_pi_pow(1);
        assert!(inv.residue(&ctx).is_err());
        assert!(inv.mul(&pi, &ctx).eq_at(&Eis::from_int(1, &ctx), &ctx));
        let exhausted = Eis::ZERO.div_pi_pow(ctx.m());
        assert!(matches!(exhausted.residue(&ctx), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn precision_tracks_denominator() {
        let ctx = RingCtx::new(3, 2, 6, 4).unwrap();
        let ap = Eis::slope_element(3, &Witt::one(), &ctx);
        let inv_ap2 = ap.mul(&ap, &ctx).inv(&ctx).unwrap();
        assert!(Eis::from_int(1, &ctx).div(&ap, &ctx).is_err());
        assert_eq!(inv_ap2.precision(&ctx), Ratio::new(18, 4));
        assert_eq!(inv_ap2.valuation(&ctx), Valuation::Exact(Ratio::new(-3, 2)));
    }

    fn ctxs() -> &'static [RingCtx] {
        static CTXS: std::sync::OnceLock<Vec<RingCtx>> = std::sync::OnceLock::new();
        CTXS.get_or_init(|| vec![
            RingCtx::new(3, 2, 6, 2).unwrap(),
            RingCtx::new(5, 2, 6, 3).unwrap(),
            RingCtx::new(2, 2, 6, 4).unwrap(),
            RingCtx::new(3, 3, 5, 1).unwrap(),
        ])
    }

    fn witt(ctx: &RingCtx, seed: &[i64]) -> Witt {
        Witt::from_coeffs(seed, ctx)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(250))]

        #[test]
        fn frobenius_is_ring_hom(k in 0usize..4, a in prop::collection::vec(any::<i32>(), 4),
                                 b in prop::collection::vec(any::<i32>(), 4)) {
            let ctx = &ctxs()[k];
            let a: Vec<i64> = a.into_iter().map(i64::from).collect();
            let b: Vec<i64> = b.into_iter().map(i64::from).collect();
            let (x, y) = (witt(ctx, &a), witt(ctx, &b));
            prop_assert_eq!(frobenius(ctx, &x.add(&y, ctx)), frobenius(ctx, &x).add(&frobenius(ctx, &y), ctx));
            prop_assert_eq!(frobenius(ctx, &x.mul(&y, ctx)), frobenius(ctx, &x).mul(&frobenius(ctx, &y), ctx));
            prop_assert_eq!(frobenius(ctx, &x).reduce(ctx), x.reduce(ctx).frob(1, ctx));
        }

        #[test]
        fn valuation_is_additive(k in 0usize..3, a in prop::collection::vec(any::<i32>(), 6),
                                 b in prop::collection::vec(any::<i32>(), 6), sa in 0u32..5, sb in 0u32..5) {
            let ctx = &ctxs()[k];
            let mk = |s: &[i32]| {
                let cs: Vec<Witt> = s.chunks(2).map(|c| witt(ctx, &[c[0] as i64, c[1] as i64])).collect();
                Eis::from_coeffs(&cs, ctx)
            };
            let x = mk(&a).mul_pi_pow(sa, ctx);
            let y = mk(&b).mul_pi_pow(sb, ctx);
            if let (Valuation::Exact(vx), Valuation::Exact(vy)) = (x.valuation(ctx), y.valuation(ctx)) {
                let bound = Ratio::new(ctx.m() as i64, ctx.e() as i64);
                if vx + vy < bound {
                    prop_assert_eq!(x.mul(&y, ctx).valuation(ctx), Valuation::Exact(vx + vy));
                }
            }
        }

        #[test]
        fn division_inverts_multiplication(k in 0usize..3, a in prop::collection::vec(any::<i32>(), 2),
                                           c in 1u32..4) {
            let ctx = &ctxs()[k];
            let x = Eis::from_witt(&witt(ctx, &[a[0] as i64, a[1] as i64]));
            let d = Eis::slope_element(c, &Witt::from_int(2 * ctx.p() as i64 + 1, ctx), ctx);
            let q = x.mul(&d, ctx).div(&d, ctx).unwrap();
            prop_assert!(q.eq_at(&x, ctx));
        }
    }
}
