use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::fq::Fq;
use super::witt::Witt;
use crate::error::{Error, Result};

pub const MAX_F: usize = 4;
pub const MAX_E: usize = 6;

/// Binomials below this row are tabulated mod p^N.
const BINOM_ROWS: usize = 320;

/// The arithmetic universe (p, f, N, e). Immutable once built.
#[derive(Clone)]
pub struct RingCtx {
    p: u32,
    f: usize,
    n: u32,
    e: u32,
    q: u32,
    pn: u64,
    // low coefficients of the monic defining polynomial h
    h: [u32; MAX_F],
    exp: Vec<u32>,
    log: Vec<u32>,
    teich: Vec<Witt>,
    // frob[i][k] = Fr^i(x^k)
    frob: Vec<[Witt; MAX_F]>,
    ppow: Vec<u64>,
    binom: OnceLock<Vec<Vec<u32>>>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Remainder of a by monic b over F_p; coefficients low to high.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        for (k, &bk) in b.iter().enumerate() {
            r[shift + k] = (r[shift + k] + p * p - c * bk % p) % p;
        }
        r.pop();
    }
    r
}

/// True iff the monic polynomial with the given coefficients (low to high,
/// leading 1 included) has no monic factor of degree 1..=deg/2 over F_p.
fn is_irreducible(h: &[u32], p: u32) -> bool {
    let deg = h.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = code;
            for _ in 0..d {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if poly_rem(h, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible of degree f, enumerating the low coefficients
/// as the integer Σ c_i p^i with c_{f−1} most significant.
fn first_irreducible(p: u32, f: usize) -> [u32; MAX_F] {
    let count = (p as u64).pow(f as u32);
    for code in 0..count {
        let mut h = Vec::with_capacity(f + 1);
        let mut x = code;
        for _ in 0..f {
            h.push((x % p as u64) as u32);
            x /= p as u64;
        }
        h.push(1);
        if f == 1 || is_irreducible(&h, p) {
            let mut out = [0; MAX_F];
            out[..f].copy_from_slice(&h[..f]);
            return out;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl RingCtx {
    pub fn new(p: u32, f: usize, n: u32, e: u32) -> Result<RingCtx> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("p = {p} is not prime")));
        }
        if f == 0 || f > MAX_F {
            return Err(Error::InvalidInput(format!("f = {f} outside 1..={MAX_F}")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("precision N must be positive".into()));
        }
        if e == 0 || e as usize > MAX_E {
            return Err(Error::InvalidInput(format!("e = {e} outside 1..={MAX_E}")));
        }
        let pn = (p as u64)
            .checked_pow(n)
            .filter(|&m| m < (1 << 31))
            .ok_or_else(|| Error::InvalidInput(format!("p^N = {p}^{n} exceeds 2^31")))?;
        let q = (p as u64).pow(f as u32);
        if q > 1 << 16 {
            return Err(Error::InvalidInput(format!("q = {q} too large")));
        }
        let q = q as u32;
        let h = first_irreducible(p, f);
        let mut ppow = vec![1u64; n as usize + 1];
        for k in 1..=n as usize {
            ppow[k] = ppow[k - 1] * p as u64 % pn;
        }
        let mut ctx = RingCtx {
            p,
            f,
            n,
            e,
            q,
            pn,
            h,
            exp: Vec::new(),
            log: Vec::new(),
            teich: Vec::new(),
            frob: Vec::new(),
            ppow,
            binom: OnceLock::new(),
        };
        ctx.build_field_tables();
        ctx.build_frobenius();
        ctx.teich = Fq::all(&ctx).map(|l| ctx.compute_teich(l)).collect();
        Ok(ctx)
    }

    // Multiplication in F_p[x]/(h) on digit arrays, used only while the
    // log tables are being built.
    fn slow_mul(&self, a: &[u32; MAX_F], b: &[u32; MAX_F]) -> [u32; MAX_F] {
        let (f, p) = (self.f, self.p);
        let mut t = vec![0u32; 2 * f];
        for i in 0..f {
            for j in 0..f {
                t[i + j] = (t[i + j] + a[i] * b[j]) % p;
            }
        }
        let mut full = self.h[..f].to_vec();
        full.push(1);
        let r = poly_rem(&t[..2 * f - 1], &full, p);
        let mut out = [0; MAX_F];
        out[..r.len().min(f)].copy_from_slice(&r[..r.len().min(f)]);
        out
    }

    fn build_field_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let one = Fq::ONE.digits(self);
        for cand in 1..q {
            let g = Fq(cand).digits(self);
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = one;
            loop {
                exp.push(Fq::from_digits(&x, self).0);
                x = self.slow_mul(&x, &g);
                if x == one {
                    break;
                }
            }
            if exp.len() as u32 == order {
                let mut log = vec![0; q as usize];
                for (k, &v) in exp.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("F_q^× is cyclic");
    }

    fn build_frobenius(&mut self) {
        let f = self.f;
        let mut x_pows = [Witt::ZERO; MAX_F];
        for (k, slot) in x_pows.iter_mut().enumerate().take(f) {
            slot.0[k] = 1;
        }
        let mut frob = vec![x_pows];
        if f > 1 {
            // the root of h lifting x^p
            let x = x_pows[1];
            let mut rho = x.pow(self.p as u64, self);
            loop {
                let (hv, dv) = self.eval_h(&rho);
                let next = rho.sub(&hv.mul(&dv.inv(self).expect("h is separable"), self), self);
                if next == rho {
                    break;
                }
                rho = next;
            }
            for i in 1..f {
                let prev = frob[i - 1];
                let mut row = [Witt::ZERO; MAX_F];
                for k in 0..f {
                    // Fr(Σ c_j x^j) = Σ c_j rho^j
                    let mut acc = Witt::ZERO;
                    let mut rp = Witt::one();
                    for j in 0..f {
                        if prev[k].0[j] != 0 {
                            acc = acc.add(&rp.mul_int(prev[k].0[j] as u64, self), self);
                        }
                        rp = rp.mul(&rho, self);
                    }
                    row[k] = acc;
                }
                frob.push(row);
            }
        }
        self.frob = frob;
    }

    // (h(y), h'(y))
    fn eval_h(&self, y: &Witt) -> (Witt, Witt) {
        let f = self.f;
        let mut val = Witt::one();
        let mut der = Witt::from_int(f as i64, self);
        for k in (0..f).rev() {
            val = val.mul(y, self).add(&Witt::from_int(self.h[k] as i64, self), self);
        }
        for k in (1..f).rev() {
            der = der
                .mul(y, self)
                .add(&Witt::from_int((k as u64 * self.h[k] as u64) as i64, self), self);
        }
        (val, der)
    }

    fn compute_teich(&self, l: Fq) -> Witt {
        let mut x = Witt::lift(l, self);
        loop {
            let next = x.pow(self.q as u64, self);
            if next == x {
                return x;
            }
            x = next;
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    /// π-adic precision M = e·N.
    pub fn m(&self) -> u32 {
        self.e * self.n
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn pn(&self) -> u64 {
        self.pn
    }
    pub(crate) fn h_low(&self) -> &[u32; MAX_F] {
        &self.h
    }

    /// Coefficients of h, low to high, leading 1 included.
    pub fn h_coeffs(&self) -> Vec<u32> {
        let mut v = self.h[..self.f].to_vec();
        v.push(1);
        v
    }

    pub(crate) fn fq_exp(&self, k: u32) -> u32 {
        self.exp[k as usize]
    }
    pub(crate) fn fq_log(&self, x: Fq) -> u32 {
        self.log[x.0 as usize]
    }
    pub(crate) fn frob_table(&self, i: usize) -> &[Witt; MAX_F] {
        &self.frob[i]
    }

    /// A generator of F_q^×.
    pub fn primitive(&self) -> Fq {
        Fq(self.exp[1 % self.exp.len()])
    }

    pub fn teich(&self, l: Fq) -> Witt {
        self.teich[l.0 as usize]
    }

    /// p^k mod p^N (zero once k ≥ N).
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            0
        } else {
            self.ppow[k as usize]
        }
    }

    /// binom(n, k) mod p^N, computed over the integers then reduced.
    pub fn binom(&self, n: u32, k: u32) -> u64 {
        if k > n {
            return 0;
        }
        if (n as usize) < BINOM_ROWS {
            let table = self.binom.get_or_init(|| binomial_table(BINOM_ROWS, self.pn));
            return table[n as usize][k as usize] as u64;
        }
        (exact_binom(n, k) % BigUint::from(self.pn)).to_u64().unwrap()
    }

    /// Same (p, f, h) with a different precision; element encodings agree.
    pub fn with_precision(&self, n: u32) -> Result<RingCtx> {
        RingCtx::new(self.p, self.f, n, self.e)
    }

    /// Canonical descriptor `p,f,N,e,h-coeffs`.
    pub fn descriptor(&self) -> String {
        let h: Vec<String> = self.h_coeffs().iter().map(|c| c.to_string()).collect();
        format!("{},{},{},{},{}", self.p, self.f, self.n, self.e, h.join(":"))
    }
}

pub(crate) fn exact_binom(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn binomial_table(rows: usize, m: u64) -> Vec<Vec<u32>> {
    let modulus = BigUint::from(m);
    let mut out = Vec::with_capacity(rows);
    let mut row: Vec<BigUint> = vec![BigUint::from(1u32)];
    for n in 0..rows {
        out.push(row.iter().map(|b| (b % &modulus).to_u32().unwrap()).collect());
        let mut next = Vec::with_capacity(n + 2);
        next.push(BigUint::from(1u32));
        for k in 1..=n {
            next.push(&row[k - 1] + &row[k]);
        }
        next.push(BigUint::from(1u32));
        row = next;
    }
    out
}

impl fmt::Debug for RingCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingCtx({})", self.descriptor())
    }
}
