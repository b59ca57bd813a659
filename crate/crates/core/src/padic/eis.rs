use std::fmt;

use num_rational::Ratio;
use rand::Rng;

use super::ctx::{RingCtx, MAX_E};
use super::fq::Fq;
use super::witt::Witt;
use crate::error::{Error, Result};

/// Element y/π^l of E = Q_{p^f}(π), π^e = p, with y = Σ_{i<e} c_i π^i in
/// O_E known modulo π^M. The absolute precision is therefore π^{M−l}; the
/// denominator exponent l only ever grows, so no digit is ever invented.
#[derive(Clone, Copy, Debug)]
pub struct Eis {
    c: [Witt; MAX_E],
    l: u32,
}

/// Valuation normalized by v(p) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(Ratio<i64>),
    /// The element is zero at working precision; its valuation is at least this.
    AtLeast(Ratio<i64>),
}

impl Valuation {
    /// A lower bound valid in both cases.
    pub fn floor(&self) -> Ratio<i64> {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => *v,
        }
    }
}

fn render_ratio(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{}", render_ratio(v)),
            Valuation::AtLeast(v) => write!(f, "≥ {}", render_ratio(v)),
        }
    }
}

impl Eis {
    pub const ZERO: Eis = Eis { c: [Witt::ZERO; MAX_E], l: 0 };

    pub fn from_witt(w: &Witt) -> Eis {
        let mut c = [Witt::ZERO; MAX_E];
        c[0] = *w;
        Eis { c, l: 0 }
    }

    pub fn from_coeffs(cs: &[Witt], ctx: &RingCtx) -> Eis {
        let mut c = [Witt::ZERO; MAX_E];
        for (slot, w) in c.iter_mut().zip(cs.iter()).take(ctx.e() as usize) {
            *slot = *w;
        }
        Eis { c, l: 0 }
    }

    /// π^k (zero once k ≥ M).
    pub fn pi_pow(k: u32, ctx: &RingCtx) -> Eis {
        Eis::from_witt(&Witt::one()).mul_pi_pow(k, ctx)
    }

    /// π^c·u, the parametrization of a_p.
    pub fn slope_element(c: u32, u: &Witt, ctx: &RingCtx) -> Eis {
        Eis::from_witt(u).mul_pi_pow(c, ctx)
    }

    pub fn coeffs(&self) -> &[Witt; MAX_E] {
        &self.c
    }

    /// Denominator exponent l in y/π^l.
    pub fn denominator_exp(&self) -> u32 {
        self.l
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|w| w.is_zero())
    }

    // y·π^k, keeping l.
    fn shift_up(c: &[Witt; MAX_E], k: u32, ctx: &RingCtx) -> [Witt; MAX_E] {
        if k == 0 {
            return *c;
        }
        let e = ctx.e();
        let mut out = [Witt::ZERO; MAX_E];
        for i in 0..e {
            let w = &c[i as usize];
            if w.is_zero() {
                continue;
            }
            let t = i + k;
            let pk = ctx.p_pow(t / e);
            if pk == 0 {
                continue;
            }
            let slot = (t % e) as usize;
            out[slot] = out[slot].add(&w.mul_int(pk, ctx), ctx);
        }
        out
    }

    pub fn mul_pi_pow(&self, k: u32, ctx: &RingCtx) -> Eis {
        Eis { c: Eis::shift_up(&self.c, k, ctx), l: self.l }
    }

    /// Division by π^k: only the denominator exponent moves.
    pub fn div_pi_pow(&self, k: u32) -> Eis {
        Eis { c: self.c, l: self.l + k }
    }

    fn aligned(&self, o: &Eis, ctx: &RingCtx) -> ([Witt; MAX_E], [Witt; MAX_E], u32) {
        let l = self.l.max(o.l);
        (
            Eis::shift_up(&self.c, l - self.l, ctx),
            Eis::shift_up(&o.c, l - o.l, ctx),
            l,
        )
    }

    pub fn add(&self, o: &Eis, ctx: &RingCtx) -> Eis {
        let (a, b, l) = self.aligned(o, ctx);
        let mut c = [Witt::ZERO; MAX_E];
        for i in 0..ctx.e() as usize {
            c[i] = a[i].add(&b[i], ctx);
        }
        Eis { c, l }
    }

    pub fn neg(&self, ctx: &RingCtx) -> Eis {
        let mut c = self.c;
        for w in c.iter_mut().take(ctx.e() as usize) {
            *w = w.neg(ctx);
        }
        Eis { c, l: self.l }
    }

    pub fn sub(&self, o: &Eis, ctx: &RingCtx) -> Eis {
        self.add(&o.neg(ctx), ctx)
    }

    pub fn mul(&self, o: &Eis, ctx: &RingCtx) -> Eis {
        let e = ctx.e() as usize;
        let p = ctx.p() as u64;
        let mut c = [Witt::ZERO; MAX_E];
        for i in 0..e {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..e {
                if o.c[j].is_zero() {
                    continue;
                }
                let prod = self.c[i].mul(&o.c[j], ctx);
                if i + j < e {
                    c[i + j] = c[i + j].add(&prod, ctx);
                } else {
                    c[i + j - e] = c[i + j - e].add(&prod.mul_int(p, ctx), ctx);
                }
            }
        }
        Eis { c, l: self.l + o.l }
    }

    pub fn scale(&self, s: &Witt, ctx: &RingCtx) -> Eis {
        let mut c = self.c;
        for w in c.iter_mut().take(ctx.e() as usize) {
            if !w.is_zero() {
                *w = w.mul(s, ctx);
            }
        }
        Eis { c, l: self.l }
    }

    pub fn scale_int(&self, k: u64, ctx: &RingCtx) -> Eis {
        let mut c = self.c;
        for w in c.iter_mut().take(ctx.e() as usize) {
            *w = w.mul_int(k, ctx);
        }
        Eis { c, l: self.l }
    }

    /// π-adic valuation of the numerator y, `None` if y ≡ 0 mod π^M.
    fn numerator_val(&self, ctx: &RingCtx) -> Option<u32> {
        let e = ctx.e();
        (0..e)
            .filter_map(|i| self.c[i as usize].vp(ctx).map(|v| e * v + i))
            .min()
    }

    pub fn valuation(&self, ctx: &RingCtx) -> Valuation {
        let e = ctx.e() as i64;
        match self.numerator_val(ctx) {
            Some(v) => Valuation::Exact(Ratio::new(v as i64 - self.l as i64, e)),
            None => Valuation::AtLeast(Ratio::new(ctx.m() as i64 - self.l as i64, e)),
        }
    }

    /// Remaining absolute precision in units of v(p) = 1.
    pub fn precision(&self, ctx: &RingCtx) -> Ratio<i64> {
        Ratio::new(ctx.m() as i64 - self.l as i64, ctx.e() as i64)
    }

    /// Image in the residue field; errors on negative valuation or when no
    /// digit at π^0 survives.
    pub fn residue(&self, ctx: &RingCtx) -> Result<Fq> {
        let m = ctx.m();
        match self.numerator_val(ctx) {
            None if self.l >= m => Err(Error::PrecisionExhausted(format!(
                "value known only modulo π^{}",
                m as i64 - self.l as i64
            ))),
            None => Ok(Fq::ZERO),
            Some(v) if v < self.l => Err(Error::NonIntegral {
                at: "element".into(),
                valuation: self.valuation(ctx).to_string(),
            }),
            Some(_) => {
                let e = ctx.e();
                let (k, s) = (self.l / e, self.l % e);
                let w = self.c[s as usize]
                    .div_p_pow(k, ctx)
                    .expect("valuation bound guarantees divisibility");
                Ok(w.reduce(ctx))
            }
        }
    }

    /// Exact quotient self/o, treating o as an exact constant. Errors if
    /// v(self) < v(o) or o vanishes at working precision.
    pub fn div(&self, o: &Eis, ctx: &RingCtx) -> Result<Eis> {
        let inv = o.inv(ctx)?;
        if let (Valuation::Exact(va), Valuation::Exact(vo)) = (self.valuation(ctx), o.valuation(ctx)) {
            if va < vo {
                return Err(Error::NonIntegral {
                    at: "quotient".into(),
                    valuation: render_ratio(&(va - vo)),
                });
            }
        }
        Ok(self.mul(&inv, ctx))
    }

    /// 1/o for o not vanishing at working precision; the result may have
    /// negative valuation, recorded in the denominator exponent.
    pub fn inv(&self, ctx: &RingCtx) -> Result<Eis> {
        let vb = self
            .numerator_val(ctx)
            .ok_or_else(|| Error::Singular("division by an element indistinguishable from 0".into()))?;
        let u_inv = self.unit_part(vb, ctx).inv_unit(ctx);
        // 1/o = u^{-1}·π^{l_o − vb}
        Ok(if self.l >= vb {
            u_inv.mul_pi_pow(self.l - vb, ctx)
        } else {
            u_inv.div_pi_pow(vb - self.l)
        })
    }

    // y/π^v for v = v(y), a unit of O_E.
    fn unit_part(&self, v: u32, ctx: &RingCtx) -> Eis {
        let e = ctx.e();
        let mut c = [Witt::ZERO; MAX_E];
        for i in 0..e {
            let w = &self.c[i as usize];
            if w.is_zero() {
                continue;
            }
            // c_i π^i = c_i p^k π^s with (i − v) = k e + s after the shift
            let t = i as i64 - v as i64;
            let s = t.rem_euclid(e as i64) as u32;
            let k = (t - s as i64) / e as i64;
            let w = if k >= 0 {
                w.mul_int(ctx.p_pow(k as u32), ctx)
            } else {
                w.div_p_pow((-k) as u32, ctx).expect("v is the minimum")
            };
            c[s as usize] = c[s as usize].add(&w, ctx);
        }
        Eis { c, l: 0 }
    }

    // Inverse of an integral unit (l = 0) by Newton iteration.
    fn inv_unit(&self, ctx: &RingCtx) -> Eis {
        let u0 = self.c[0].inv(ctx).expect("unit part has unit constant term");
        let two = Eis::from_witt(&Witt::from_int(2, ctx));
        let mut y = Eis::from_witt(&u0);
        loop {
            let next = y.mul(&two.sub(&self.mul(&y, ctx), ctx), ctx);
            if next.c == y.c {
                return y;
            }
            y = next;
        }
    }

    pub fn random_integral<R: Rng + ?Sized>(rng: &mut R, ctx: &RingCtx) -> Eis {
        let mut c = [Witt::ZERO; MAX_E];
        for slot in c.iter_mut().take(ctx.e() as usize) {
            *slot = Witt::random(rng, ctx);
        }
        Eis { c, l: 0 }
    }
}

impl fmt::Display for Eis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| if i == 0 { format!("({w})") } else { format!("({w})π^{i}") })
            .collect();
        let num = if terms.is_empty() { "0".to_string() } else { terms.join("+") };
        if self.l == 0 {
            write!(f, "{num}")
        } else {
            write!(f, "[{num}]/π^{}", self.l)
        }
    }
}
