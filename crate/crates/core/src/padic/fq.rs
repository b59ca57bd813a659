use std::fmt;

use super::ctx::{RingCtx, MAX_F};

/// Element of F_q, stored as the integer Σ d_i p^i of its coordinates
/// d_i in the basis 1, x, …, x^{f−1} of F_p[x]/(h).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Fq(pub(crate) u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn from_index(i: u32, ctx: &RingCtx) -> Fq {
        assert!(i < ctx.q(), "residue index {i} out of range");
        Fq(i)
    }

    /// All q elements in index order.
    pub fn all(ctx: &RingCtx) -> impl Iterator<Item = Fq> + Clone {
        (0..ctx.q()).map(Fq)
    }

    pub fn digits(self, ctx: &RingCtx) -> [u32; MAX_F] {
        let p = ctx.p();
        let mut d = [0; MAX_F];
        let mut x = self.0;
        for slot in d.iter_mut().take(ctx.f()) {
            *slot = x % p;
            x /= p;
        }
        d
    }

    pub fn from_digits(d: &[u32], ctx: &RingCtx) -> Fq {
        let p = ctx.p();
        let mut x = 0;
        for &c in d[..ctx.f()].iter().rev() {
            x = x * p + c % p;
        }
        Fq(x)
    }

    pub fn from_int(n: i64, ctx: &RingCtx) -> Fq {
        Fq(n.rem_euclid(ctx.p() as i64) as u32)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn add(self, o: Fq, ctx: &RingCtx) -> Fq {
        let p = ctx.p();
        if p == 2 {
            return Fq(self.0 ^ o.0);
        }
        let (mut a, mut b) = (self.0, o.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..ctx.f() {
            let s = (a % p + b % p) % p;
            out += s * place;
            place *= p;
            a /= p;
            b /= p;
        }
        Fq(out)
    }

    pub fn neg(self, ctx: &RingCtx) -> Fq {
        let p = ctx.p();
        let mut a = self.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..ctx.f() {
            out += ((p - a % p) % p) * place;
            place *= p;
            a /= p;
        }
        Fq(out)
    }

    pub fn sub(self, o: Fq, ctx: &RingCtx) -> Fq {
        self.add(o.neg(ctx), ctx)
    }

    pub fn mul(self, o: Fq, ctx: &RingCtx) -> Fq {
        if self.0 == 0 || o.0 == 0 {
            return Fq::ZERO;
        }
        let m = ctx.q() - 1;
        Fq(ctx.fq_exp((ctx.fq_log(self) + ctx.fq_log(o)) % m))
    }

    pub fn inv(self, ctx: &RingCtx) -> Option<Fq> {
        if self.0 == 0 {
            return None;
        }
        let m = ctx.q() - 1;
        Some(Fq(ctx.fq_exp((m - ctx.fq_log(self)) % m)))
    }

    /// x^n with the convention 0^0 = 1.
    pub fn pow(self, n: u64, ctx: &RingCtx) -> Fq {
        if n == 0 {
            return Fq::ONE;
        }
        if self.0 == 0 {
            return Fq::ZERO;
        }
        let m = (ctx.q() - 1) as u64;
        Fq(ctx.fq_exp(((ctx.fq_log(self) as u64 * (n % m)) % m) as u32))
    }

    /// x ↦ x^{p^i}.
    pub fn frob(self, i: usize, ctx: &RingCtx) -> Fq {
        self.pow((ctx.p() as u64).pow((i % ctx.f()) as u32), ctx)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
