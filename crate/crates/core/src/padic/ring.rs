use std::fmt::Debug;

use super::ctx::RingCtx;
use super::eis::Eis;
use super::fq::Fq;
use super::witt::Witt;

/// Ring operations with the context passed explicitly. Equality is
/// `a.sub(b).is_zero()`, i.e. agreement at working precision.
pub trait RingElem: Clone + Debug + Send + Sync {
    fn zero(ctx: &RingCtx) -> Self;
    fn one(ctx: &RingCtx) -> Self;
    fn from_int(n: i64, ctx: &RingCtx) -> Self;
    fn add(&self, o: &Self, ctx: &RingCtx) -> Self;
    fn neg(&self, ctx: &RingCtx) -> Self;
    fn mul(&self, o: &Self, ctx: &RingCtx) -> Self;
    fn is_zero(&self, ctx: &RingCtx) -> bool;

    fn sub(&self, o: &Self, ctx: &RingCtx) -> Self {
        self.add(&o.neg(ctx), ctx)
    }

    fn pow(&self, mut n: u64, ctx: &RingCtx) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(ctx);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            base = base.mul(&base, ctx);
            n >>= 1;
        }
        acc
    }

    fn eq_at(&self, o: &Self, ctx: &RingCtx) -> bool {
        self.sub(o, ctx).is_zero(ctx)
    }
}

/// Rings that matrix entries live in: F_q or W.
pub trait Scalar: RingElem + Copy + PartialEq {
    fn frob(&self, i: usize, ctx: &RingCtx) -> Self;
    fn from_witt(w: &Witt, ctx: &RingCtx) -> Self;
    fn teich(l: Fq, ctx: &RingCtx) -> Self {
        Self::from_witt(&ctx.teich(l), ctx)
    }
    /// Inverse if the element is a unit.
    fn unit_inv(&self, ctx: &RingCtx) -> Option<Self>;
}

/// Polynomial coefficient rings, a module over their scalar ring.
pub trait Coeff: RingElem {
    type S: Scalar;
    fn scale(&self, s: &Self::S, ctx: &RingCtx) -> Self;
    fn from_scalar(s: &Self::S, ctx: &RingCtx) -> Self;
    /// Multiplication by p^k.
    fn p_mul(&self, k: u32, ctx: &RingCtx) -> Self;
    /// Image in F_q; errors on non-integral or precision-exhausted input.
    fn residue(&self, ctx: &RingCtx) -> crate::Result<Fq>;
}

impl RingElem for Fq {
    fn zero(_: &RingCtx) -> Self {
        Fq::ZERO
    }
    fn one(_: &RingCtx) -> Self {
        Fq::ONE
    }
    fn from_int(n: i64, ctx: &RingCtx) -> Self {
        Fq::from_int(n, ctx)
    }
    fn add(&self, o: &Self, ctx: &RingCtx) -> Self {
        Fq::add(*self, *o, ctx)
    }
    fn neg(&self, ctx: &RingCtx) -> Self {
        Fq::neg(*self, ctx)
    }
    fn mul(&self, o: &Self, ctx: &RingCtx) -> Self {
        Fq::mul(*self, *o, ctx)
    }
    fn is_zero(&self, _: &RingCtx) -> bool {
        Fq::is_zero(*self)
    }
    fn pow(&self, n: u64, ctx: &RingCtx) -> Self {
        Fq::pow(*self, n, ctx)
    }
}

impl Scalar for Fq {
    fn frob(&self, i: usize, ctx: &RingCtx) -> Self {
        Fq::frob(*self, i, ctx)
    }
    fn from_witt(w: &Witt, ctx: &RingCtx) -> Self {
        w.reduce(ctx)
    }
    fn teich(l: Fq, _: &RingCtx) -> Self {
        l
    }
    fn unit_inv(&self, ctx: &RingCtx) -> Option<Self> {
        self.inv(ctx)
    }
}

impl Coeff for Fq {
    type S = Fq;
    fn scale(&self, s: &Fq, ctx: &RingCtx) -> Self {
        Fq::mul(*self, *s, ctx)
    }
    fn from_scalar(s: &Fq, _: &RingCtx) -> Self {
        *s
    }
    fn p_mul(&self, k: u32, _: &RingCtx) -> Self {
        if k == 0 {
            *self
        } else {
            Fq::ZERO
        }
    }
    fn residue(&self, _: &RingCtx) -> crate::Result<Fq> {
        Ok(*self)
    }
}

impl RingElem for Witt {
    fn zero(_: &RingCtx) -> Self {
        Witt::ZERO
    }
    fn one(_: &RingCtx) -> Self {
        Witt::one()
    }
    fn from_int(n: i64, ctx: &RingCtx) -> Self {
        Witt::from_int(n, ctx)
    }
    fn add(&self, o: &Self, ctx: &RingCtx) -> Self {
        Witt::add(self, o, ctx)
    }
    fn neg(&self, ctx: &RingCtx) -> Self {
        Witt::neg(self, ctx)
    }
    fn mul(&self, o: &Self, ctx: &RingCtx) -> Self {
        Witt::mul(self, o, ctx)
    }
    fn is_zero(&self, _: &RingCtx) -> bool {
        Witt::is_zero(self)
    }
    fn sub(&self, o: &Self, ctx: &RingCtx) -> Self {
        Witt::sub(self, o, ctx)
    }
}

impl Scalar for Witt {
    fn frob(&self, i: usize, ctx: &RingCtx) -> Self {
        Witt::frob(self, i, ctx)
    }
    fn from_witt(w: &Witt, _: &RingCtx) -> Self {
        *w
    }
    fn unit_inv(&self, ctx: &RingCtx) -> Option<Self> {
        self.inv(ctx)
    }
}

impl Coeff for Witt {
    type S = Witt;
    fn scale(&self, s: &Witt, ctx: &RingCtx) -> Self {
        Witt::mul(self, s, ctx)
    }
    fn from_scalar(s: &Witt, _: &RingCtx) -> Self {
        *s
    }
    fn p_mul(&self, k: u32, ctx: &RingCtx) -> Self {
        self.mul_int(ctx.p_pow(k), ctx)
    }
    fn residue(&self, ctx: &RingCtx) -> crate::Result<Fq> {
        Ok(self.reduce(ctx))
    }
}

impl RingElem for Eis {
    fn zero(_: &RingCtx) -> Self {
        Eis::ZERO
    }
    fn one(_: &RingCtx) -> Self {
        Eis::from_witt(&Witt::one())
    }
    fn from_int(n: i64, ctx: &RingCtx) -> Self {
        Eis::from_witt(&Witt::from_int(n, ctx))
    }
    fn add(&self, o: &Self, ctx: &RingCtx) -> Self {
        Eis::add(self, o, ctx)
    }
    fn neg(&self, ctx: &RingCtx) -> Self {
        Eis::neg(self, ctx)
    }
    fn mul(&self, o: &Self, ctx: &RingCtx) -> Self {
        Eis::mul(self, o, ctx)
    }
    fn is_zero(&self, _: &RingCtx) -> bool {
        Eis::is_zero(self)
    }
}

impl Coeff for Eis {
    type S = Witt;
    fn scale(&self, s: &Witt, ctx: &RingCtx) -> Self {
        Eis::scale(self, s, ctx)
    }
    fn from_scalar(s: &Witt, _: &RingCtx) -> Self {
        Eis::from_witt(s)
    }
    fn p_mul(&self, k: u32, ctx: &RingCtx) -> Self {
        Eis::scale_int(self, ctx.p_pow(k), ctx)
    }
    fn residue(&self, ctx: &RingCtx) -> crate::Result<Fq> {
        Eis::residue(self, ctx)
    }
}
