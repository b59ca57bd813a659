//! Brute-force check that the commuting relations
//! (a, pb; c, d)∘A = A∘(a, b; pc, d) on V_{(r₀,r₁)} force A to be a multiple
//! of diag(p^{Σ(r_i−j_i)}), for f = 2.
//!
//! Z_{p²} is modelled by Z[√D] with D a non-residue mod p; the relations are
//! integral, so mapping to F_ℓ (ℓ split in Q(√D), √D ↦ s, Frobenius ↦ −s)
//! can only enlarge the solution space. Dimension 1 mod ℓ therefore proves
//! dimension 1 in characteristic 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutantReport {
    pub dim: usize,
    pub diagonal_in_kernel: bool,
    pub prime: u64,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

// (x + y√D) as images under the two embeddings
type Zd = (i64, i64);

fn embed(z: Zd, s: u64, l: u64, conj: bool) -> u64 {
    let x = z.0.rem_euclid(l as i64) as u64;
    let y = z.1.rem_euclid(l as i64) as u64;
    let ys = y * s % l;
    if conj {
        (x + l - ys) % l
    } else {
        (x + ys) % l
    }
}

fn binom_mod(n: u64, k: u64, l: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1;
    let mut den = 1;
    for i in 0..k {
        num = num * ((n - i) % l) % l;
        den = den * ((i + 1) % l) % l;
    }
    num * pow_mod(den, l - 2, l) % l
}

// Matrix R with c' = R c for the substitution X ↦ aX + cY, Y ↦ bX + dY on Sym^r.
fn sym_matrix(g: [u64; 4], r: u32, l: u64) -> Vec<Vec<u64>> {
    let [a, b, c, d] = g;
    let n = r as usize + 1;
    let mut m = vec![vec![0u64; n]; n];
    for j in 0..=r {
        for u in 0..=(r - j) {
            let left = binom_mod((r - j) as u64, u as u64, l) * pow_mod(a, (r - j - u) as u64, l) % l
                * pow_mod(c, u as u64, l)
                % l;
            for w in 0..=j {
                let right = binom_mod(j as u64, w as u64, l) * pow_mod(b, (j - w) as u64, l) % l
                    * pow_mod(d, w as u64, l)
                    % l;
                let row = (u + w) as usize;
                m[row][j as usize] = (m[row][j as usize] + left * right) % l;
            }
        }
    }
    m
}

fn kron(a: &[Vec<u64>], b: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![0u64; na * nb]; na * nb];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for m in 0..nb {
                    out[i * nb + k][j * nb + m] = a[i][j] * b[k][m] % l;
                }
            }
        }
    }
    out
}

struct Echelon {
    l: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn insert(&mut self, mut v: Vec<u64>) {
        let l = self.l;
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(row.iter()) {
                    *x = (*x + l - c * y % l) % l;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let inv = pow_mod(v[piv], l - 2, l);
            for x in v.iter_mut() {
                *x = *x * inv % l;
            }
            for (_, row) in self.rows.iter_mut() {
                let c = row[piv];
                if c != 0 {
                    for (x, y) in row.iter_mut().zip(v.iter()) {
                        *x = (*x + l - c * y % l) % l;
                    }
                }
            }
            self.rows.push((piv, v));
        }
    }
}

pub fn phi_commutant(p: u32, r: [u32; 2], samples: usize, seed: u64) -> Result<CommutantReport> {
    if p == 2 {
        return Err(Error::Unsupported("commutant check models Z_{p²} as Z[√D], needs odd p".into()));
    }
    let p64 = p as u64;
    let dn = (2..p64).find(|&d| pow_mod(d, (p64 - 1) / 2, p64) == p64 - 1).unwrap() as i64;
    let mut l = 1_000_003u64;
    let s = loop {
        if is_prime(l) && pow_mod(dn as u64, (l - 1) / 2, l) == 1 {
            break (1..l).find(|&x| x * x % l == dn as u64).unwrap();
        }
        l += 2;
    };
    let n = (r[0] as usize + 1) * (r[1] as usize + 1);
    let rho = |g: [Zd; 4]| {
        let e0 = g.map(|z| embed(z, s, l, false));
        let e1 = g.map(|z| embed(z, s, l, true));
        kron(&sym_matrix(e0, r[0], l), &sym_matrix(e1, r[1], l), l)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_zd = |rng: &mut ChaCha8Rng| -> Zd { (rng.gen_range(-40..=40), rng.gen_range(-40..=40)) };
    let mut ech = Echelon { l, rows: Vec::new() };
    let pz = |z: Zd| (z.0 * p as i64, z.1 * p as i64);
    for _ in 0..samples {
        let (a, b, c, d) = (rand_zd(&mut rng), rand_zd(&mut rng), rand_zd(&mut rng), rand_zd(&mut rng));
        let left = rho([a, pz(b), c, d]);
        let right = rho([a, b, pz(c), d]);
        // (left·A − A·right)[i][k] = 0, unknown A[x][y] at x·n + y
        for i in 0..n {
            for k in 0..n {
                let mut row = vec![0u64; n * n];
                for j in 0..n {
                    row[j * n + k] = (row[j * n + k] + left[i][j]) % l;
                    row[i * n + j] = (row[i * n + j] + l - right[j][k]) % l;
                }
                ech.insert(row);
            }
        }
    }
    let dim = n * n - ech.rows.len();
    // diag(p^{Σ(r_i − j_i)}) with j = (j₀, j₁) at index j₀·(r₁+1) + j₁
    let mut diag = vec![0u64; n * n];
    for j0 in 0..=r[0] {
        for j1 in 0..=r[1] {
            let idx = j0 as usize * (r[1] as usize + 1) + j1 as usize;
            diag[idx * n + idx] = pow_mod(p64, ((r[0] - j0) + (r[1] - j1)) as u64, l);
        }
    }
    let diagonal_in_kernel = ech
        .rows
        .iter()
        .all(|(_, row)| row.iter().zip(diag.iter()).fold(0, |acc, (x, y)| (acc + x * y) % l) == 0);
    Ok(CommutantReport { dim, diagonal_in_kernel, prime: l })
}
