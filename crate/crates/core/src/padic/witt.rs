use std::fmt;

use rand::Rng;

use super::ctx::{RingCtx, MAX_F};
use super::fq::Fq;

/// Element of W = (Z/p^N)[x]/(h): f coefficients, each reduced mod p^N.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Witt(pub(crate) [u32; MAX_F]);

impl Witt {
    pub const ZERO: Witt = Witt([0; MAX_F]);

    pub fn coeffs(&self) -> [u32; MAX_F] {
        self.0
    }

    pub fn from_coeffs(c: &[i64], ctx: &RingCtx) -> Witt {
        let m = ctx.pn() as i64;
        let mut w = [0; MAX_F];
        for (slot, &x) in w.iter_mut().zip(c.iter()).take(ctx.f()) {
            *slot = x.rem_euclid(m) as u32;
        }
        Witt(w)
    }

    pub fn one() -> Witt {
        let mut w = [0; MAX_F];
        w[0] = 1;
        Witt(w)
    }

    pub fn from_int(n: i64, ctx: &RingCtx) -> Witt {
        let mut w = [0; MAX_F];
        w[0] = n.rem_euclid(ctx.pn() as i64) as u32;
        Witt(w)
    }

    /// The digit-wise lift of λ (not the Teichmüller lift).
    pub fn lift(l: Fq, ctx: &RingCtx) -> Witt {
        let d = l.digits(ctx);
        Witt(d)
    }

    pub fn reduce(&self, ctx: &RingCtx) -> Fq {
        let p = ctx.p();
        let mut d = [0; MAX_F];
        for (slot, &c) in d.iter_mut().zip(self.0.iter()) {
            *slot = c % p;
        }
        Fq::from_digits(&d, ctx)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self, ctx: &RingCtx) -> bool {
        !self.reduce(ctx).is_zero()
    }

    /// p-adic valuation, `None` for zero.
    pub fn vp(&self, ctx: &RingCtx) -> Option<u32> {
        let p = ctx.p();
        self.0
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| {
                let (mut c, mut v) = (c, 0);
                while c % p == 0 {
                    c /= p;
                    v += 1;
                }
                v
            })
            .min()
    }

    pub fn add(&self, o: &Witt, ctx: &RingCtx) -> Witt {
        let m = ctx.pn();
        let mut w = [0; MAX_F];
        for i in 0..ctx.f() {
            w[i] = ((self.0[i] as u64 + o.0[i] as u64) % m) as u32;
        }
        Witt(w)
    }

    pub fn neg(&self, ctx: &RingCtx) -> Witt {
        let m = ctx.pn();
        let mut w = [0; MAX_F];
        for i in 0..ctx.f() {
            w[i] = ((m - self.0[i] as u64) % m) as u32;
        }
        Witt(w)
    }

    pub fn sub(&self, o: &Witt, ctx: &RingCtx) -> Witt {
        self.add(&o.neg(ctx), ctx)
    }

    pub fn mul_int(&self, k: u64, ctx: &RingCtx) -> Witt {
        let m = ctx.pn();
        let k = k % m;
        let mut w = [0; MAX_F];
        for i in 0..ctx.f() {
            w[i] = ((self.0[i] as u64 * k) % m) as u32;
        }
        Witt(w)
    }

    pub fn mul(&self, o: &Witt, ctx: &RingCtx) -> Witt {
        let f = ctx.f();
        let m = ctx.pn();
        if f == 1 {
            return Witt([((self.0[0] as u64 * o.0[0] as u64) % m) as u32, 0, 0, 0]);
        }
        let mut t = [0u64; 2 * MAX_F - 1];
        for i in 0..f {
            let a = self.0[i] as u64;
            if a == 0 {
                continue;
            }
            for j in 0..f {
                t[i + j] = (t[i + j] + a * o.0[j] as u64) % m;
            }
        }
        // x^f = −Σ h_k x^k
        let h = ctx.h_low();
        for d in (f..2 * f - 1).rev() {
            let c = t[d];
            if c == 0 {
                continue;
            }
            t[d] = 0;
            for k in 0..f {
                t[d - f + k] = (t[d - f + k] + (m - h[k] as u64) * c) % m;
            }
        }
        let mut w = [0; MAX_F];
        for i in 0..f {
            w[i] = t[i] as u32;
        }
        Witt(w)
    }

    pub fn pow(&self, mut n: u64, ctx: &RingCtx) -> Witt {
        let mut base = *self;
        let mut acc = Witt::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            base = base.mul(&base, ctx);
            n >>= 1;
        }
        acc
    }

    /// Inverse of a unit by Newton iteration from the residue-field inverse.
    pub fn inv(&self, ctx: &RingCtx) -> Option<Witt> {
        let r = self.reduce(ctx).inv(ctx)?;
        let two = Witt::from_int(2, ctx);
        let mut y = Witt::lift(r, ctx);
        loop {
            let next = y.mul(&two.sub(&self.mul(&y, ctx), ctx), ctx);
            if next == y {
                return Some(y);
            }
            y = next;
        }
    }

    /// Exact division by p^k; `None` if p^k does not divide.
    pub fn div_p_pow(&self, k: u32, ctx: &RingCtx) -> Option<Witt> {
        if k == 0 {
            return Some(*self);
        }
        if self.is_zero() {
            return Some(*self);
        }
        if self.vp(ctx)? < k {
            return None;
        }
        let pk = (ctx.p() as u64).pow(k);
        let mut w = [0; MAX_F];
        for i in 0..ctx.f() {
            w[i] = (self.0[i] as u64 / pk) as u32;
        }
        Some(Witt(w))
    }

    /// Fr^i, the i-th power of the arithmetic Frobenius.
    pub fn frob(&self, i: usize, ctx: &RingCtx) -> Witt {
        let f = ctx.f();
        let i = i % f;
        if i == 0 {
            return *self;
        }
        let table = ctx.frob_table(i);
        let mut acc = Witt::ZERO;
        for k in 0..f {
            if self.0[k] != 0 {
                acc = acc.add(&table[k].mul_int(self.0[k] as u64, ctx), ctx);
            }
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, ctx: &RingCtx) -> Witt {
        let m = ctx.pn() as u32;
        let mut w = [0; MAX_F];
        for slot in w.iter_mut().take(ctx.f()) {
            *slot = rng.gen_range(0..m);
        }
        Witt(w)
    }
}

impl fmt::Display for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{k}"),
            })
            .collect();
        if nz.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", nz.join("+"))
        }
    }
}
