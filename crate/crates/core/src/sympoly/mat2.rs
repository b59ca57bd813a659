use std::fmt;

use crate::padic::{RingCtx, Scalar, Witt};

/// 2×2 matrix (a b; c d); singular matrices allowed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Mat2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(ctx: &RingCtx) -> Self {
        Mat2::new(S::one(ctx), S::zero(ctx), S::zero(ctx), S::one(ctx))
    }

    /// w = (0 1; 1 0).
    pub fn w(ctx: &RingCtx) -> Self {
        Mat2::new(S::zero(ctx), S::one(ctx), S::one(ctx), S::zero(ctx))
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, ctx: &RingCtx) -> Self {
        Mat2::new(S::from_int(a, ctx), S::from_int(b, ctx), S::from_int(c, ctx), S::from_int(d, ctx))
    }

    pub fn mul(&self, o: &Self, ctx: &RingCtx) -> Self {
        Mat2::new(
            self.a.mul(&o.a, ctx).add(&self.b.mul(&o.c, ctx), ctx),
            self.a.mul(&o.b, ctx).add(&self.b.mul(&o.d, ctx), ctx),
            self.c.mul(&o.a, ctx).add(&self.d.mul(&o.c, ctx), ctx),
            self.c.mul(&o.b, ctx).add(&self.d.mul(&o.d, ctx), ctx),
        )
    }

    pub fn det(&self, ctx: &RingCtx) -> S {
        self.a.mul(&self.d, ctx).sub(&self.b.mul(&self.c, ctx), ctx)
    }

    /// Entrywise Fr^i.
    pub fn frob(&self, i: usize, ctx: &RingCtx) -> Self {
        Mat2::new(self.a.frob(i, ctx), self.b.frob(i, ctx), self.c.frob(i, ctx), self.d.frob(i, ctx))
    }
}

impl Mat2<Witt> {
    pub fn to_scalar<S: Scalar>(&self, ctx: &RingCtx) -> Mat2<S> {
        Mat2::new(
            S::from_witt(&self.a, ctx),
            S::from_witt(&self.b, ctx),
            S::from_witt(&self.c, ctx),
            S::from_witt(&self.d, ctx),
        )
    }
}

impl<S: fmt::Display> fmt::Display for Mat2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}
