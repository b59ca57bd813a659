//! Exact linear algebra: unit-pivot elimination over Z/p^k and incremental
//! row echelon forms over F_q.

use crate::error::{Error, Result};
use crate::padic::{Fq, RingCtx, Scalar};

/// Inverse of a unit modulo m (m a prime power, a coprime to m).
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Solves the square system A x = b over Z/p^k. Every pivot must be a unit;
/// a column with no unit entry below the diagonal means A is singular mod p.
pub fn solve_unit_pivot(a: &[Vec<u64>], b: &[u64], p: u64, modulus: u64) -> Result<Vec<u64>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(format!("system is not square of size {n}")));
    }
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| row.iter().chain(std::iter::once(&rhs)).map(|x| x % modulus).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&i| m[i][col] % p != 0)
            .ok_or_else(|| Error::Singular(format!("no unit pivot in column {col}")))?;
        m.swap(col, piv);
        let inv = inv_mod(m[col][col], modulus).expect("pivot is a unit");
        for x in m[col].iter_mut() {
            *x = mul_mod(*x, inv, modulus);
        }
        for i in 0..n {
            if i != col && m[i][col] != 0 {
                let c = m[i][col];
                for j in col..=n {
                    let sub = mul_mod(c, m[col][j], modulus);
                    m[i][j] = (m[i][j] + modulus - sub) % modulus;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n]).collect())
}

/// Determinant mod a prime p.
pub fn det_mod_p(a: &[Vec<u64>], p: u64) -> u64 {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| m[i][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(col, piv);
            det = (p - det) % p;
        }
        det = mul_mod(det, m[col][col], p);
        let inv = inv_mod(m[col][col], p).unwrap();
        for i in col + 1..n {
            let c = mul_mod(m[i][col], inv, p);
            if c != 0 {
                for j in col..n {
                    let sub = mul_mod(c, m[col][j], p);
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
    }
    det
}

/// Inverse of a square matrix over F_q or W whose pivots can all be chosen
/// as units, i.e. whose determinant is a unit.
pub fn invert_unit_pivot<S: Scalar>(a: &[Vec<S>], ctx: &RingCtx) -> Result<Vec<Vec<S>>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(format!("matrix is not square of size {n}")));
    }
    let mut m: Vec<Vec<S>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| if k == i { S::one(ctx) } else { S::zero(ctx) }));
            r
        })
        .collect();
    for col in 0..n {
        let (piv, inv) = (col..n)
            .find_map(|i| m[i][col].unit_inv(ctx).map(|inv| (i, inv)))
            .ok_or_else(|| Error::Singular(format!("no unit pivot in column {col}")))?;
        m.swap(col, piv);
        for x in m[col].iter_mut() {
            *x = x.mul(&inv, ctx);
        }
        for i in 0..n {
            let c = m[i][col];
            if i != col && !c.is_zero(ctx) {
                for j in col..2 * n {
                    let sub = c.mul(&m[col][j], ctx);
                    m[i][j] = m[i][j].sub(&sub, ctx);
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Reduced row echelon basis of a subspace of F_q^n, grown one vector at a
/// time. Rows are normalized with pivot 1 and are mutually reduced.
#[derive(Clone, Debug)]
pub struct FqEchelon {
    n: usize,
    rows: Vec<(usize, Vec<Fq>)>,
}

impl FqEchelon {
    pub fn new(n: usize) -> FqEchelon {
        FqEchelon { n, rows: Vec::new() }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Fq]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// v minus its projection onto the span along pivot coordinates.
    pub fn reduce(&self, v: &[Fq], ctx: &RingCtx) -> Vec<Fq> {
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = x.sub(c.mul(*y, ctx), ctx);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Fq], ctx: &RingCtx) -> bool {
        self.reduce(v, ctx).iter().all(|x| x.is_zero())
    }

    /// Adds v to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Fq], ctx: &RingCtx) -> bool {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        let mut v = self.reduce(v, ctx);
        let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[piv].inv(ctx).unwrap();
        for x in v.iter_mut() {
            *x = x.mul(inv, ctx);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if !c.is_zero() {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = x.sub(c.mul(*y, ctx), ctx);
                }
            }
        }
        self.rows.push((piv, v));
        true
    }

    /// Coordinates of v in terms of the stored rows, if v is in the span.
    pub fn coordinates(&self, v: &[Fq], ctx: &RingCtx) -> Option<Vec<Fq>> {
        let coords: Vec<Fq> = self.rows.iter().map(|(piv, _)| v[*piv]).collect();
        self.contains(v, ctx).then_some(coords)
    }

    /// Basis of {x : ⟨row, x⟩ = 0 for every row}.
    pub fn nullspace(&self, ctx: &RingCtx) -> Vec<Vec<Fq>> {
        let pivots = self.pivots();
        (0..self.n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut x = vec![Fq::ZERO; self.n];
                x[free] = Fq::ONE;
                for (piv, row) in &self.rows {
                    x[*piv] = row[free].neg(ctx);
                }
                x
            })
            .collect()
    }
}

/// Solves M x = b over F_q for square invertible M.
pub fn solve_fq(m: &[Vec<Fq>], b: &[Fq], ctx: &RingCtx) -> Result<Vec<Fq>> {
    let n = m.len();
    let mut a: Vec<Vec<Fq>> = m
        .iter()
        .zip(b)
        .map(|(row, &rhs)| row.iter().copied().chain(std::iter::once(rhs)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&i| !a[i][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("column {col} has no pivot over F_q")))?;
        a.swap(col, piv);
        let inv = a[col][col].inv(ctx).unwrap();
        for x in a[col].iter_mut() {
            *x = x.mul(inv, ctx);
        }
        for i in 0..n {
            let c = a[i][col];
            if i != col && !c.is_zero() {
                for j in col..=n {
                    let sub = c.mul(a[col][j], ctx);
                    a[i][j] = a[i][j].sub(sub, ctx);
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n]).collect())
}

/// Some solution of A x = b over F_q (A is m×n, free variables set to 0).
pub fn solve_any_fq(a: &[Vec<Fq>], b: &[Fq], n: usize, ctx: &RingCtx) -> Option<Vec<Fq>> {
    let mut ech = FqEchelon::new(n + 1);
    for (row, &rhs) in a.iter().zip(b) {
        let mut v = row.clone();
        v.push(rhs);
        ech.insert(&v, ctx);
    }
    let mut x = vec![Fq::ZERO; n];
    for (piv, row) in &ech.rows {
        if *piv == n {
            return None;
        }
        x[*piv] = row[n];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime_power() {
        assert_eq!(inv_mod(2, 9), Some(5));
        assert_eq!(inv_mod(3, 9), None);
        assert_eq!(inv_mod(7, 25), Some(18));
    }

    #[test]
    fn unit_pivot_solve_mod_27() {
        let a = vec![vec![3, 1], vec![1, 0]];
        let x = solve_unit_pivot(&a, &[5, 2], 3, 27).unwrap();
        assert_eq!((3 * x[0] + x[1]) % 27, 5);
        assert_eq!(x[0] % 27, 2);
        let sing = vec![vec![3, 6], vec![9, 3]];
        assert!(matches!(solve_unit_pivot(&sing, &[1, 1], 3, 27), Err(Error::Singular(_))));
    }

    #[test]
    fn solve_any_finds_a_solution() {
        let ctx = RingCtx::new(3, 1, 1, 1).unwrap();
        let f = |n| Fq::from_int(n, &ctx);
        let a = vec![vec![f(1), f(1), f(0)], vec![f(2), f(2), f(0)]];
        let x = solve_any_fq(&a, &[f(2), f(1)], 3, &ctx).unwrap();
        assert_eq!(x[0].add(x[1], &ctx), f(2));
        assert!(solve_any_fq(&a, &[f(2), f(2)], 3, &ctx).is_none());
    }

    #[test]
    fn unit_pivot_inverse_over_witt() {
        use crate::padic::{RingElem, Witt};
        let ctx = RingCtx::new(3, 2, 4, 1).unwrap();
        let w = |n| Witt::from_int(n, &ctx);
        let a = vec![vec![w(3), w(1)], vec![w(1), w(5)]];
        let inv = invert_unit_pivot(&a, &ctx).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = (0..2).fold(Witt::ZERO, |acc, k| acc.add(&a[i][k].mul(&inv[k][j], &ctx), &ctx));
                assert!(e.eq_at(&if i == j { w(1) } else { w(0) }, &ctx));
            }
        }
        assert!(invert_unit_pivot(&[vec![w(3), w(6)], vec![w(9), w(3)]], &ctx).is_err());
    }

    #[test]
    fn determinant_mod_p() {
        assert_eq!(det_mod_p(&[vec![1, 2], vec![3, 4]], 5), 3);
        assert_eq!(det_mod_p(&[vec![1, 2], vec![2, 4]], 7), 0);
    }

    #[test]
    fn echelon_span_and_nullspace() {
        let ctx = RingCtx::new(3, 2, 1, 1).unwrap();
        let one = Fq::ONE;
        let two = Fq::from_int(2, &ctx);
        let mut e = FqEchelon::new(3);
        assert!(e.insert(&[one, two, Fq::ZERO], &ctx));
        assert!(!e.insert(&[two, one, Fq::ZERO], &ctx));
        assert!(e.contains(&[two, one, Fq::ZERO], &ctx));
        assert!(!e.contains(&[Fq::ZERO, Fq::ZERO, one], &ctx));
        let ns = e.nullspace(&ctx);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            let dot = one.mul(x[0], &ctx).add(two.mul(x[1], &ctx), &ctx);
            assert!(dot.is_zero());
        }
    }
}
