//! Binomial-coefficient congruences: the [n] reduction, Lucas' theorem, the
//! class sums S_r and S_{r,b,m}, and the solver that lifts a family of
//! coefficients with vanishing binomial moments mod p^t to one with vanishing
//! moments mod p^n.
//!
//! Multi-indices j = (j_0, …, j_{f−1}) have total Σ j_i p^i; "the class c"
//! means total ≡ c mod (q−1).

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{det_mod_p, mul_mod, solve_unit_pivot};
use crate::padic::exact_binom;

/// The representative of n mod (q−1) in [1, q−1].
pub fn bracket(n: i64, q: u32) -> u32 {
    let m = q as i64 - 1;
    let r = n.rem_euclid(m);
    if r == 0 {
        m as u32
    } else {
        r as u32
    }
}

/// The f lowest base-p digits of n.
pub fn digits(n: u64, p: u32, f: usize) -> Vec<u32> {
    let mut x = n;
    (0..f)
        .map(|_| {
            let d = (x % p as u64) as u32;
            x /= p as u64;
            d
        })
        .collect()
}

/// binom(n, k) mod p as the product of digitwise binomials.
pub fn lucas_binom(n: u64, k: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        acc = acc * (exact_binom(nd as u32, kd as u32).to_u64().unwrap() % p64) % p64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

/// Σ j_i p^i.
pub fn total(j: &[u32], p: u32) -> u64 {
    j.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
}

/// All multi-indices 0 ≤ j ≤ r in lexicographic order.
pub fn indices_below(r: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    r.iter().map(|&ri| 0..=ri).multi_cartesian_product()
}

/// Whether Σ p^i j_i lies in the class c ∈ [1, q−1] modulo q−1.
pub fn in_class(j: &[u32], c: u32, p: u32) -> bool {
    let q = (p as u64).pow(j.len() as u32);
    bracket((total(j, p) % (q - 1).max(1)) as i64, q as u32) == c
}

fn binom_rows(r: &[u32]) -> Vec<Vec<BigUint>> {
    r.iter().map(|&ri| (0..=ri).map(|k| exact_binom(ri, k)).collect()).collect()
}

fn to_mod(x: &BigUint, m: u32) -> u32 {
    (x % BigUint::from(m)).to_u32().unwrap()
}

/// S_r mod p: Σ ∏ binom(r_i, i_i) over i ≡ r mod (q−1), omitting the two
/// endpoint indices 0 and r. Computed exactly, reduced at the end.
pub fn sum_s_r(p: u32, r: &[u32]) -> u32 {
    let f = r.len();
    let q = p.pow(f as u32);
    let a = bracket(total(r, p) as i64, q);
    let rows = binom_rows(r);
    let mut acc = BigUint::zero();
    for i in indices_below(r) {
        if i.iter().all(|&x| x == 0) || i.as_slice() == r || !in_class(&i, a, p) {
            continue;
        }
        acc += i.iter().enumerate().map(|(k, &ik)| &rows[k][ik as usize]).product::<BigUint>();
    }
    to_mod(&acc, p)
}

/// Both routes for S_{r,b,m} mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RbmCheck {
    pub brute: u32,
    pub closed: u32,
}

impl RbmCheck {
    pub fn agrees(&self) -> bool {
        self.brute == self.closed
    }
}

/// S_{r,b,m} = Σ_{l ≤ r, l ≡ b} ∏ binom(r_i, l_i) binom(l_i, m_i), by direct
/// enumeration and by the closed form
/// ∏ binom(r_i, m_i) · (binom([a−m], [b−m]) + δ_{[b−m] = q−1}).
pub fn sum_s_rbm(p: u32, r: &[u32], b: u32, m: &[u32]) -> Result<RbmCheck> {
    let f = r.len();
    if m.len() != f {
        return Err(Error::InvalidInput("m and r have different lengths".into()));
    }
    let q = p.pow(f as u32);
    if !(1..q).contains(&b) {
        return Err(Error::InvalidInput(format!("class {b} outside [1, {}]", q - 1)));
    }
    if m.iter().zip(r).any(|(mi, ri)| mi > ri) || total(m, p) >= total(r, p) {
        return Err(Error::Hypothesis("need m_i ≤ r_i and m < r".into()));
    }
    let rows = binom_rows(r);
    let mut acc = BigUint::zero();
    for l in indices_below(r) {
        if !in_class(&l, b, p) || l.iter().zip(m).any(|(li, mi)| li < mi) {
            continue;
        }
        let term: BigUint = (0..f)
            .map(|k| &rows[k][l[k] as usize] * exact_binom(l[k], m[k]))
            .product();
        acc += term;
    }
    let brute = to_mod(&acc, p);

    let a = bracket(total(r, p) as i64, q) as i64;
    let mt = total(m, p) as i64;
    let a_m = bracket(a - mt, q) as u64;
    let b_m = bracket(b as i64 - mt, q) as u64;
    let lead = (0..f).fold(1u64, |acc, k| acc * lucas_binom(r[k] as u64, m[k] as u64, p) as u64 % p as u64);
    let delta = u64::from(b_m == (q - 1) as u64);
    let inner = (lucas_binom(a_m, b_m, p) as u64 + delta) % p as u64;
    Ok(RbmCheck { brute, closed: (lead * inner % p as u64) as u32 })
}

/// The set of moment orders l at which binomial sums must vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Moments {
    /// All l with l_i ≤ m_i, each m_i < p.
    Box(Vec<u32>),
    /// l = 0 and the unit vectors e_i.
    DegreeAtMostOne,
}

impl Moments {
    /// The orders l, which double as the offsets k of the special indices.
    pub fn orders(&self, f: usize) -> Vec<Vec<u32>> {
        match self {
            Moments::Box(m) => indices_below(m).collect(),
            Moments::DegreeAtMostOne => std::iter::once(vec![0; f])
                .chain((0..f).map(|i| (0..f).map(|k| u32::from(k == i)).collect()))
                .collect(),
        }
    }

    fn max_order(&self, f: usize) -> Vec<u32> {
        match self {
            Moments::Box(m) => m.clone(),
            Moments::DegreeAtMostOne => vec![1; f],
        }
    }
}

/// Integer coefficients β_j on the multi-indices j ≤ r, supported on the
/// class c, stored as nonnegative representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaFamily {
    pub p: u32,
    pub r: Vec<u32>,
    pub c: u32,
    pub moments: Moments,
    pub coeffs: BTreeMap<Vec<u32>, u64>,
}

impl BetaFamily {
    pub fn f(&self) -> usize {
        self.r.len()
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.f() as u32)
    }

    pub fn coeff(&self, j: &[u32]) -> u64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    /// Class sums Σ_j β_j ∏ binom(j_i, l_i) mod `modulus`, one per order l.
    pub fn moment_sums(&self, modulus: u64) -> Vec<(Vec<u32>, u64)> {
        moment_sums(&self.coeffs, &self.moments.orders(self.f()), modulus)
    }

    /// The special indices j_k = c_i + k_i(q−1), one per moment order k.
    pub fn special_indices(&self) -> Vec<Vec<u32>> {
        let c = digits(self.c as u64, self.p, self.f());
        let q1 = self.q() - 1;
        self.moments
            .orders(self.f())
            .into_iter()
            .map(|k| k.iter().zip(&c).map(|(ki, ci)| ci + ki * q1).collect())
            .collect()
    }

    fn check_shape(&self) -> Result<()> {
        let f = self.f();
        let q = self.q();
        if f == 0 || !(1..q).contains(&self.c) {
            return Err(Error::InvalidInput(format!("class {} outside [1, {}]", self.c, q - 1)));
        }
        let mx = self.moments.max_order(f);
        if mx.len() != f || mx.iter().any(|&mi| mi >= self.p) {
            return Err(Error::InvalidInput("moment bounds must satisfy m_i < p".into()));
        }
        let c = digits(self.c as u64, self.p, f);
        for i in 0..f {
            if self.r[i] <= c[i] + mx[i] * (q - 1) {
                return Err(Error::Hypothesis(format!(
                    "r_{i} = {} must exceed c_{i} + m_{i}(q−1) = {}",
                    self.r[i],
                    c[i] + mx[i] * (q - 1)
                )));
            }
        }
        for (j, &v) in &self.coeffs {
            if j.len() != f || j.iter().zip(&self.r).any(|(a, b)| a > b) {
                return Err(Error::InvalidInput(format!("index {j:?} outside the weight")));
            }
            if v != 0 && !in_class(j, self.c, self.p) {
                return Err(Error::Hypothesis(format!("β{j:?} = {v} is off the class {}", self.c)));
            }
        }
        Ok(())
    }
}

pub fn moment_sums(coeffs: &BTreeMap<Vec<u32>, u64>, orders: &[Vec<u32>], modulus: u64) -> Vec<(Vec<u32>, u64)> {
    orders
        .iter()
        .map(|l| {
            let s = coeffs.iter().fold(0u64, |acc, (j, &v)| {
                let b = j
                    .iter()
                    .zip(l)
                    .fold(1u64, |acc, (&ji, &li)| mul_mod(acc, binom_mod(ji, li, modulus), modulus));
                (acc + mul_mod(v % modulus, b, modulus)) % modulus
            });
            (l.clone(), s)
        })
        .collect()
}

pub fn binom_mod(n: u32, k: u32, modulus: u64) -> u64 {
    (exact_binom(n, k) % BigUint::from(modulus)).to_u64().unwrap()
}

/// Lifts β (moments ≡ 0 mod p^t) to α with α ≡ β mod p^t, α supported on
/// the class and all moments ≡ 0 mod p^n. Only the special indices move, so
/// the endpoint coefficients are untouched. Output values lie in [0, p^n).
pub fn vanishing_solve(family: &BetaFamily, t: u32, n: u32) -> Result<BTreeMap<Vec<u32>, u64>> {
    family.check_shape()?;
    let p = family.p as u64;
    let pt = p.pow(t);
    for (l, s) in family.moment_sums(p.pow(n.max(t))) {
        if s % pt != 0 {
            return Err(Error::Hypothesis(format!("moment {l:?} is {s}, not divisible by p^{t}")));
        }
    }
    if t >= n {
        return Ok(family.coeffs.iter().filter(|(_, &v)| v != 0).map(|(j, &v)| (j.clone(), v)).collect());
    }
    let pn = p.pow(n);
    let sub = p.pow(n - t);
    let orders = family.moments.orders(family.f());
    let special = family.special_indices();
    let a: Vec<Vec<u64>> = orders
        .iter()
        .map(|l| {
            special
                .iter()
                .map(|j| j.iter().zip(l).fold(1u64, |acc, (&ji, &li)| mul_mod(acc, binom_mod(ji, li, sub), sub)))
                .collect()
        })
        .collect();
    let b: Vec<u64> = family
        .moment_sums(pn)
        .into_iter()
        .map(|(_, s)| (sub - (s / pt) % sub) % sub)
        .collect();
    let gamma = solve_unit_pivot(&a, &b, p, sub)?;
    let mut alpha: BTreeMap<Vec<u32>, u64> = family.coeffs.iter().map(|(j, &v)| (j.clone(), v % pn)).collect();
    for (j, g) in special.into_iter().zip(gamma) {
        let entry = alpha.entry(j).or_insert(0);
        *entry = (*entry + mul_mod(pt, g, pn)) % pn;
    }
    alpha.retain(|_, v| *v != 0);
    Ok(alpha)
}

/// Whether the block (binom(c_i + k(q−1), l))_{0 ≤ k, l ≤ m_i} is invertible mod p.
pub fn special_block_is_unit(p: u32, f: usize, ci: u32, mi: u32) -> bool {
    let q1 = p.pow(f as u32) - 1;
    let block: Vec<Vec<u64>> = (0..=mi)
        .map(|k| (0..=mi).map(|l| binom_mod(ci + k * q1, l, p as u64)).collect())
        .collect();
    det_mod_p(&block, p as u64) != 0
}

/// A random family satisfying the solver's hypotheses at level t: random
/// class coefficients, then the special indices corrected so that every
/// moment vanishes mod p^t.
pub fn random_admissible<R: Rng + ?Sized>(
    rng: &mut R,
    p: u32,
    r: &[u32],
    c: u32,
    moments: Moments,
    t: u32,
    n: u32,
) -> Result<BetaFamily> {
    let pn = (p as u64).pow(n);
    let coeffs = indices_below(r)
        .filter(|j| in_class(j, c, p))
        .map(|j| (j, rng.gen_range(0..pn)))
        .collect();
    let raw = BetaFamily { p, r: r.to_vec(), c, moments, coeffs };
    let fixed = vanishing_solve(&raw, 0, t)?;
    // keep the random high digits off the special indices
    let pt = (p as u64).pow(t);
    let special = raw.special_indices();
    let coeffs = raw
        .coeffs
        .iter()
        .map(|(j, &v)| {
            let low = fixed.get(j).copied().unwrap_or(0) % pt;
            let high = if special.contains(j) { v - v % pt } else { 0 };
            let val = if special.contains(j) { (high + low) % pn } else { v };
            (j.clone(), val)
        })
        .collect();
    Ok(BetaFamily { coeffs, ..raw })
}

/// A random class, moment set and weight meeting the solver's hypotheses,
/// with a random admissible family at level t on them.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, p: u32, f: usize, t: u32, n: u32) -> Result<BetaFamily> {
    let q = p.pow(f as u32);
    let c = rng.gen_range(1..q);
    let moments = if rng.gen_bool(0.5) {
        Moments::DegreeAtMostOne
    } else {
        Moments::Box((0..f).map(|_| rng.gen_range(0..p.min(3))).collect())
    };
    let mx = moments.max_order(f);
    let cd = digits(c as u64, p, f);
    let r: Vec<u32> = (0..f).map(|i| cd[i] + mx[i] * (q - 1) + 1 + rng.gen_range(0..6)).collect();
    random_admissible(rng, p, &r, c, moments, t, n)
}

/// Every postcondition of the lift that α fails, as readable messages:
/// support on the class, α ≡ β mod p^t, vanishing moments mod p^n, the
/// endpoint equalities and idempotence at level n.
pub fn lift_violations(fam: &BetaFamily, alpha: &BTreeMap<Vec<u32>, u64>, t: u32, n: u32) -> Vec<String> {
    let p = fam.p as u64;
    let (pt, pn) = (p.pow(t), p.pow(n));
    let mut out = Vec::new();
    for (l, s) in moment_sums(alpha, &fam.moments.orders(fam.f()), pn) {
        if s != 0 {
            out.push(format!("moment {l:?} is {s} mod p^{n}"));
        }
    }
    for j in indices_below(&fam.r) {
        let a = alpha.get(&j).copied().unwrap_or(0);
        if a != 0 && !in_class(&j, fam.c, fam.p) {
            out.push(format!("α{j:?} = {a} off the class"));
        }
        if a % pt != fam.coeff(&j) % pt {
            out.push(format!("α{j:?} ≢ β mod p^{t}"));
        }
    }
    let zero = vec![0; fam.f()];
    for j in [&zero, &fam.r] {
        if alpha.get(j).copied().unwrap_or(0) != fam.coeff(j) % pn {
            out.push(format!("endpoint {j:?} moved"));
        }
    }
    let again = BetaFamily { coeffs: alpha.clone(), ..fam.clone() };
    if vanishing_solve(&again, n, n).ok().as_ref() != Some(alpha) {
        out.push("not idempotent at level n".into());
    }
    out
}
