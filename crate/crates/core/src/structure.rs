//! Submodules of V_r over F_q: the singular part V_r*, the image X_r of the
//! top vector, the principal series V_r/V_r* in coordinates, and projections
//! onto Jordan–Hölder factors of Q = V_r/(V_r* + X_r).
//!
//! Two independent routes are kept side by side. The full-space route works
//! with dense vectors over every monomial of V_r and echelon spans. The
//! coordinate route maps V_r/V_r* isomorphically to F_q^{q+1} through the
//! class-sum functional `psi`, which is valid once every r_i ≥ q.

use std::fmt;

use itertools::Itertools;
use rand::Rng;

use crate::congr::{bracket, digits};
use crate::error::{Error, Result};
use crate::linalg::{solve_any_fq, solve_fq, FqEchelon};
use crate::padic::{Fq, RingCtx};
use crate::sympoly::{Mat2, Mono, Substitution, SymPoly, WeightVec};

/// Position of a multi-index in `WeightVec::monomials` order.
pub fn dense_index(weight: &WeightVec, m: Mono) -> usize {
    let mut idx = 0usize;
    for (i, &ri) in weight.r.iter().enumerate() {
        idx = idx * (ri as usize + 1) + m.get(i) as usize;
    }
    idx
}

pub fn to_dense(v: &SymPoly<Fq>) -> Vec<Fq> {
    let w = v.weight();
    let mut out = vec![Fq::ZERO; w.dim()];
    for (m, c) in v.terms() {
        out[dense_index(w, *m)] = *c;
    }
    out
}

pub fn from_dense(weight: &WeightVec, v: &[Fq], ctx: &RingCtx) -> SymPoly<Fq> {
    let terms = weight.monomials().zip(v).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m, *c)).collect();
    SymPoly::from_terms(weight, terms, ctx)
}

/// Generators of GL_2(F_q): diag(ζ,1), diag(1,ζ), w and (1 1; 0 1). Conjugating
/// the unipotent by diag(ζ,1) reaches every (1 λ; 0 1) because ζ generates
/// F_q over F_p.
pub fn gamma_generators(ctx: &RingCtx) -> Vec<Mat2<Fq>> {
    let z = ctx.primitive();
    vec![
        Mat2::new(z, Fq::ZERO, Fq::ZERO, Fq::ONE),
        Mat2::new(Fq::ONE, Fq::ZERO, Fq::ZERO, z),
        Mat2::w(ctx),
        Mat2::new(Fq::ONE, Fq::ONE, Fq::ZERO, Fq::ONE),
    ]
}

fn random_fq<R: Rng>(rng: &mut R, ctx: &RingCtx) -> Fq {
    Fq::from_index(rng.gen_range(0..ctx.q()), ctx)
}

/// Uniform element of M_2(F_q).
pub fn random_m2<R: Rng>(rng: &mut R, ctx: &RingCtx) -> Mat2<Fq> {
    Mat2::new(random_fq(rng, ctx), random_fq(rng, ctx), random_fq(rng, ctx), random_fq(rng, ctx))
}

/// Uniform element of GL_2(F_q), by rejection.
pub fn random_gl2<R: Rng>(rng: &mut R, ctx: &RingCtx) -> Mat2<Fq> {
    loop {
        let g = random_m2(rng, ctx);
        if !g.det(ctx).is_zero() {
            return g;
        }
    }
}

/// Every singular matrix over F_q, zero included.
pub fn singular_matrices(ctx: &RingCtx) -> Vec<Mat2<Fq>> {
    let all: Vec<Fq> = Fq::all(ctx).collect();
    itertools::iproduct!(all.iter(), all.iter(), all.iter(), all.iter())
        .map(|(&a, &b, &c, &d)| Mat2::new(a, b, c, d))
        .filter(|g| g.det(ctx).is_zero())
        .collect()
}

/// A subspace of V_r held as a reduced echelon form over the dense monomial
/// coordinates. Built subspaces are closed under the generators they were
/// saturated with.
#[derive(Clone, Debug)]
pub struct SubmoduleBasis {
    weight: WeightVec,
    ech: FqEchelon,
}

impl SubmoduleBasis {
    pub fn span<I: IntoIterator<Item = SymPoly<Fq>>>(weight: &WeightVec, gens: I, ctx: &RingCtx) -> SubmoduleBasis {
        let mut ech = FqEchelon::new(weight.dim());
        for g in gens {
            assert_eq!(g.weight().r, weight.r, "generator outside the ambient weight");
            ech.insert(&to_dense(&g), ctx);
        }
        SubmoduleBasis { weight: weight.clone(), ech }
    }

    pub fn weight(&self) -> &WeightVec {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn codim(&self) -> usize {
        self.weight.dim() - self.dim()
    }

    pub fn echelon(&self) -> &FqEchelon {
        &self.ech
    }

    pub fn contains(&self, v: &SymPoly<Fq>, ctx: &RingCtx) -> bool {
        self.ech.contains(&to_dense(v), ctx)
    }

    pub fn basis(&self, ctx: &RingCtx) -> Vec<SymPoly<Fq>> {
        self.ech.rows().map(|row| from_dense(&self.weight, row, ctx)).collect()
    }

    /// Span of both subspaces.
    pub fn union(&self, o: &SubmoduleBasis, ctx: &RingCtx) -> SubmoduleBasis {
        let mut out = self.clone();
        for row in o.ech.rows() {
            out.ech.insert(row, ctx);
        }
        out
    }

    /// Whether g maps every basis vector back into the span.
    pub fn is_stable(&self, g: &Mat2<Fq>, ctx: &RingCtx) -> bool {
        let sub = Substitution::new(g, &self.weight, ctx);
        self.basis(ctx).iter().all(|b| self.contains(&sub.apply(b, ctx), ctx))
    }

    /// Closes the span under the given matrices; returns the number of passes.
    pub fn saturate(&mut self, gens: &[Mat2<Fq>], ctx: &RingCtx) -> usize {
        let subs: Vec<_> = gens.iter().map(|g| Substitution::new(g, &self.weight, ctx)).collect();
        let mut passes = 0;
        loop {
            passes += 1;
            let before = self.dim();
            for b in self.basis(ctx) {
                for s in &subs {
                    self.ech.insert(&to_dense(&s.apply(&b, ctx)), ctx);
                }
            }
            if self.dim() == before {
                return passes;
            }
        }
    }
}

/// V_r*: the span of θ_i times every complementary monomial, saturated under
/// Γ. Errors if no θ_i fits inside r.
pub fn vstar_basis(r: &[u32], ctx: &RingCtx) -> Result<SubmoduleBasis> {
    check_weight(r, ctx)?;
    let weight = WeightVec::untwisted(r);
    let mut gens = Vec::new();
    for i in 0..r.len() {
        let Ok(th) = crate::sympoly::theta::<Fq>(ctx, i, &weight) else {
            continue;
        };
        let rest: Vec<u32> = r.iter().zip(&th.weight().r).map(|(a, b)| a - b).collect();
        let rest = WeightVec::untwisted(&rest);
        for m in rest.monomials() {
            let mono = SymPoly::mono(&rest, &m.unpack(r.len()), ctx);
            gens.push(th.mul(&mono, ctx));
        }
    }
    if gens.is_empty() {
        return Err(Error::WeightBound(format!("no θ_i fits inside weight {weight}")));
    }
    let mut basis = SubmoduleBasis::span(&weight, gens, ctx);
    basis.saturate(&gamma_generators(ctx), ctx);
    Ok(basis)
}

fn check_weight(r: &[u32], ctx: &RingCtx) -> Result<()> {
    if r.len() != ctx.f() {
        return Err(Error::InvalidInput(format!("weight {r:?} needs {} entries", ctx.f())));
    }
    Ok(())
}

/// ∏_i (λ^{p^i} X_i + Y_i)^{r_i}, the image of Y^r under (1 λ; 0 1).
pub fn xr_generator(weight: &WeightVec, lambda: Fq, ctx: &RingCtx) -> SymPoly<Fq> {
    let top = SymPoly::mono(weight, &weight.r, ctx);
    top.substitute(&Mat2::new(Fq::ONE, lambda, Fq::ZERO, Fq::ONE), ctx)
}

/// The q+1 generators of X_r: the λ-translates of Y^r followed by X^r.
pub fn xr_generators(weight: &WeightVec, ctx: &RingCtx) -> Vec<SymPoly<Fq>> {
    let f = weight.f();
    let mut out: Vec<SymPoly<Fq>> = Fq::all(ctx).map(|l| xr_generator(weight, l, ctx)).collect();
    out.push(SymPoly::mono(weight, &vec![0; f], ctx));
    out
}

/// X_r, the submodule generated by X^r.
pub fn xr_basis(r: &[u32], ctx: &RingCtx) -> Result<SubmoduleBasis> {
    check_weight(r, ctx)?;
    let weight = WeightVec::untwisted(r);
    let mut basis = SubmoduleBasis::span(&weight, xr_generators(&weight, ctx), ctx);
    basis.saturate(&gamma_generators(ctx), ctx);
    Ok(basis)
}

/// Class of Σ j_i p^i in {1, …, q−1}.
fn class_of(m: Mono, f: usize, ctx: &RingCtx) -> usize {
    bracket(m.total(ctx.p(), f) as i64, ctx.q()) as usize
}

/// (a_0, a_r, s_1, …, s_{q−1}): the two end coefficients and the sums of
/// coefficients over each class of Σ j_i p^i mod (q−1). Its kernel is V_r*.
pub fn psi(v: &SymPoly<Fq>, ctx: &RingCtx) -> Vec<Fq> {
    let w = v.weight();
    let f = w.f();
    let q = ctx.q() as usize;
    let mut out = vec![Fq::ZERO; q + 1];
    let top = w.top();
    for (m, c) in v.terms() {
        if m.0 == 0 {
            out[0] = *c;
        }
        if *m == top {
            out[1] = *c;
        }
        let k = class_of(*m, f, ctx) + 1;
        out[k] = out[k].add(*c, ctx);
    }
    out
}

/// Basis of the common kernel of the ψ functionals on V_r.
pub fn psi_kernel_basis(weight: &WeightVec, ctx: &RingCtx) -> Vec<SymPoly<Fq>> {
    let q = ctx.q() as usize;
    let n = weight.dim();
    let mut rows = vec![vec![Fq::ZERO; n]; q + 1];
    for (idx, m) in weight.monomials().enumerate() {
        let e = SymPoly::mono(weight, &m.unpack(weight.f()), ctx);
        for (row, x) in rows.iter_mut().zip(psi(&e, ctx)) {
            row[idx] = x;
        }
    }
    let mut ech = FqEchelon::new(n);
    for row in &rows {
        ech.insert(row, ctx);
    }
    ech.nullspace(ctx).iter().map(|v| from_dense(weight, v, ctx)).collect()
}

fn unit(n: usize, i: usize) -> Vec<Fq> {
    let mut v = vec![Fq::ZERO; n];
    v[i] = Fq::ONE;
    v
}

/// Membership in V_r* by the end-coefficient and class-sum criterion.
pub fn in_vstar(v: &SymPoly<Fq>, ctx: &RingCtx) -> bool {
    psi(v, ctx).iter().all(|x| x.is_zero())
}

/// Whether v vanishes at (X_i, Y_i) = (c^{p^i}, d^{p^i}) for every nonzero
/// (c, d) in F_q².
pub fn evaluation_vanishes(v: &SymPoly<Fq>, ctx: &RingCtx) -> bool {
    let w = v.weight();
    let f = w.f();
    let p = ctx.p() as u64;
    let all: Vec<Fq> = Fq::all(ctx).collect();
    all.iter().cartesian_product(all.iter()).filter(|(c, d)| !(c.is_zero() && d.is_zero())).all(|(&c, &d)| {
        let mut acc = Fq::ZERO;
        for (m, coeff) in v.terms() {
            let mut t = *coeff;
            let mut pi = 1u64;
            for i in 0..f {
                let j = m.get(i) as u64;
                t = t.mul(c.pow(pi * (w.r[i] as u64 - j), ctx), ctx).mul(d.pow(pi * j, ctx), ctx);
                pi *= p;
            }
            acc = acc.add(t, ctx);
        }
        acc.is_zero()
    })
}

/// Irreducible (b_0, …, b_{f−1}) ⊗ D^twist of GL_2(F_q), twist mod (q−1).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct JhLabel {
    pub b: Vec<u32>,
    pub twist: u32,
}

impl JhLabel {
    pub fn new(b: Vec<u32>, twist: u64, q: u32) -> JhLabel {
        JhLabel { b, twist: (twist % (q as u64 - 1)) as u32 }
    }

    pub fn dim(&self) -> usize {
        self.b.iter().map(|&x| x as usize + 1).product()
    }

    pub fn weight(&self) -> WeightVec {
        WeightVec::new(&self.b, self.twist)
    }

    /// Frobenius twist: entry i moves to position i+h, the twist is
    /// multiplied by p^h.
    pub fn rotate(&self, h: usize, p: u32, q: u32) -> JhLabel {
        let f = self.b.len();
        let mut b = vec![0; f];
        for (i, &x) in self.b.iter().enumerate() {
            b[(i + h) % f] = x;
        }
        JhLabel::new(b, self.twist as u64 * (p as u64).pow(h as u32), q)
    }
}

impl fmt::Display for JhLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.b.iter().join(","))?;
        if self.twist != 0 {
            write!(f, "⊗D^{}", self.twist)?;
        }
        Ok(())
    }
}

/// Digits of a = [Σ r_i p^i] in {1, …, q−1}.
pub fn reduced_weight(r: &[u32], ctx: &RingCtx) -> (u32, Vec<u32>) {
    let total = crate::congr::total(r, ctx.p());
    let a = bracket(total as i64, ctx.q());
    (a, digits(a as u64, ctx.p(), ctx.f()))
}

/// The Jordan–Hölder factors the structure theory names.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FactorKind {
    /// V_a, the image of X_r.
    Socle,
    /// (a_0−1, p−2−a_1) ⊗ D^{(1+a_1)p} for f = 2.
    MiddleB,
    /// (p−2−a_0, a_1−1) ⊗ D^{1+a_0} for f = 2.
    MiddleC,
    /// (p−1−a_i)_i ⊗ D^a, the cosocle of Q.
    Cosocle,
    /// Second layer of Q when a = a_h p^h: the rotation by h of
    /// (a_h−1, p−2, p−1, …, p−1) ⊗ D^p.
    Chain,
}

/// A factor's label with the monomial correspondences for it: each entry
/// sends a source index of V_r to a target index of the small weight.
#[derive(Clone, Debug)]
pub struct FactorSpec {
    pub kind: FactorKind,
    pub label: JhLabel,
    pub generator: (Vec<u32>, Vec<u32>),
    pub entries: Vec<(Vec<u32>, Vec<u32>)>,
}

fn box_indices(b: &[u32]) -> Vec<Vec<u32>> {
    b.iter().map(|&x| 0..=x).multi_cartesian_product().collect()
}

/// The label and monomial table of a factor, or None when the factor does
/// not occur for this weight (a negative entry). Errors on patterns outside
/// the stated ones.
pub fn factor_spec(kind: FactorKind, r: &[u32], ctx: &RingCtx) -> Result<Option<FactorSpec>> {
    check_weight(r, ctx)?;
    let (p, q, f) = (ctx.p() as i64, ctx.q(), ctx.f());
    let (a, ad) = reduced_weight(r, ctx);
    let ai: Vec<i64> = ad.iter().map(|&x| x as i64).collect();
    let to_u = |v: &[i64]| v.iter().map(|&x| x as u32).collect::<Vec<u32>>();
    let spec = match kind {
        FactorKind::Socle => {
            let label = JhLabel::new(ad.clone(), 0, q);
            let entries = box_indices(&ad)
                .into_iter()
                .filter(|i| i.iter().any(|&x| x != 0) && *i != ad)
                .map(|i| (i.clone(), i))
                .chain([(vec![0; f], vec![0; f]), (r.to_vec(), ad.clone())])
                .collect();
            FactorSpec { kind, label, generator: (vec![0; f], vec![0; f]), entries }
        }
        FactorKind::Cosocle => {
            let b: Vec<u32> = ad.iter().map(|&x| ctx.p() - 1 - x).collect();
            let entries = box_indices(&b)
                .into_iter()
                .map(|i| (i.iter().zip(&ad).map(|(x, y)| x + y).collect(), i))
                .collect();
            FactorSpec { kind, label: JhLabel::new(b, a as u64, q), generator: (ad.clone(), vec![0; f]), entries }
        }
        FactorKind::MiddleB | FactorKind::MiddleC => {
            if f != 2 {
                return Err(Error::Unsupported(format!("middle factors are tabulated for f = 2 only, got f = {f}")));
            }
            // B shifts the Y_1 exponent by 1 + a_1, C shifts Y_0 by 1 + a_0.
            let (b, twist, shift) = if kind == FactorKind::MiddleB {
                (vec![ai[0] - 1, p - 2 - ai[1]], (1 + ai[1]) * p, vec![0, 1 + ad[1]])
            } else {
                (vec![p - 2 - ai[0], ai[1] - 1], 1 + ai[0], vec![1 + ad[0], 0])
            };
            if b.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let b = to_u(&b);
            let entries: Vec<_> = box_indices(&b)
                .into_iter()
                .map(|i| (i.iter().zip(&shift).map(|(x, s)| x + s).collect(), i))
                .collect();
            FactorSpec { kind, label: JhLabel::new(b, twist as u64, q), generator: entries[0].clone(), entries }
        }
        FactorKind::Chain => {
            let nonzero: Vec<usize> = (0..f).filter(|&i| ad[i] != 0).collect();
            if f < 2 || nonzero.len() != 1 {
                return Err(Error::Unsupported(format!(
                    "second-layer factor is stated only for a = a_h p^h with f ≥ 2, got digits {ad:?}"
                )));
            }
            let h = nonzero[0];
            let mut b = vec![ctx.p() - 1; f];
            b[0] = ad[h] - 1;
            b[1] = ctx.p() - 2;
            let label = JhLabel::new(b, p as u64, q).rotate(h, ctx.p(), q);
            let mut src = vec![0; f];
            src[(h + 1) % f] = 1;
            let generator = (src, vec![0; f]);
            FactorSpec { kind, label, generator: generator.clone(), entries: vec![generator] }
        }
    };
    Ok(Some(spec))
}

/// Predicted radical layers of Q from the top, for the patterns the theory
/// states. The bool says whether the prediction claims every factor of each
/// layer (true) or only a subset (general f, where just the second layer's
/// named factor is known).
pub fn predicted_layers(r: &[u32], ctx: &RingCtx) -> Result<(Vec<Vec<JhLabel>>, bool)> {
    let f = ctx.f();
    let cos = factor_spec(FactorKind::Cosocle, r, ctx)?.expect("cosocle always exists").label;
    let (_, ad) = reduced_weight(r, ctx);
    let mut layers = vec![vec![cos]];
    let complete = match f {
        1 => true,
        2 => {
            let mid: Vec<JhLabel> = [FactorKind::MiddleB, FactorKind::MiddleC]
                .into_iter()
                .filter_map(|k| factor_spec(k, r, ctx).transpose())
                .map(|s| s.map(|s| s.label))
                .collect::<Result<_>>()?;
            if !mid.is_empty() {
                layers.push(mid);
            }
            true
        }
        _ => {
            if ad.iter().filter(|&&x| x != 0).count() != 1 {
                return Err(Error::Unsupported(format!("no stated structure for f = {f}, digits {ad:?}")));
            }
            layers.push(vec![factor_spec(FactorKind::Chain, r, ctx)?.expect("chain exists").label]);
            false
        }
    };
    Ok((layers, complete))
}

/// V_r/V_r* in ψ-coordinates, with the Γ-action as (q+1)×(q+1) matrices.
/// Requires every r_i ≥ q.
pub struct PrincipalSeries {
    ctx: RingCtx,
    weight: WeightVec,
    basis: Vec<SymPoly<Fq>>,
    psi_basis: Vec<Vec<Fq>>,
    gens: Vec<Vec<Vec<Fq>>>,
    keys: Vec<(u32, u32)>,
}

impl PrincipalSeries {
    pub fn new(r: &[u32], ctx: &RingCtx) -> Result<PrincipalSeries> {
        check_weight(r, ctx)?;
        let q = ctx.q();
        if r.iter().any(|&x| x < q) {
            return Err(Error::Hypothesis(format!("coordinates on V_r/V_r* need every r_i ≥ q = {q}, got {r:?}")));
        }
        let weight = WeightVec::untwisted(r);
        let f = r.len();
        let mut basis: Vec<SymPoly<Fq>> =
            box_indices(&vec![ctx.p() - 1; f]).iter().map(|j| SymPoly::mono(&weight, j, ctx)).collect();
        basis.push(SymPoly::mono(&weight, r, ctx));
        let psi_basis: Vec<Vec<Fq>> = basis.iter().map(|b| psi(b, ctx)).collect();
        let modulus = q - 1;
        let rt = (crate::congr::total(r, ctx.p()) % modulus as u64) as u32;
        let mut keys = vec![(rt, 0), (0, rt)];
        keys.extend((1..q).map(|c| ((rt + modulus - c % modulus) % modulus, c % modulus)));
        let mut ps = PrincipalSeries { ctx: ctx.clone(), weight, basis, psi_basis, gens: Vec::new(), keys };
        ps.gens = gamma_generators(ctx).iter().map(|g| ps.matrix(g)).collect::<Result<_>>()?;
        Ok(ps)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn weight(&self) -> &WeightVec {
        &self.weight
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    /// Columns c with Σ c_k ψ(b_k) = x.
    fn coords(&self, x: &[Fq]) -> Result<Vec<Fq>> {
        let n = self.dim();
        let m: Vec<Vec<Fq>> = (0..n).map(|i| (0..n).map(|k| self.psi_basis[k][i]).collect()).collect();
        solve_fq(&m, x, &self.ctx)
    }

    /// The action matrix of g (row-major, acting on column vectors).
    pub fn matrix(&self, g: &Mat2<Fq>) -> Result<Vec<Vec<Fq>>> {
        let ctx = &self.ctx;
        let n = self.dim();
        let images: Vec<Vec<Fq>> = self.basis.iter().map(|b| psi(&b.act(g, ctx), ctx)).collect();
        let mut out = vec![vec![Fq::ZERO; n]; n];
        for l in 0..n {
            let c = self.coords(&unit(n, l))?;
            for (k, ck) in c.iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                for i in 0..n {
                    out[i][l] = out[i][l].add(ck.mul(images[k][i], ctx), ctx);
                }
            }
        }
        Ok(out)
    }

    fn apply(&self, m: &[Vec<Fq>], x: &[Fq]) -> Vec<Fq> {
        let ctx = &self.ctx;
        m.iter()
            .map(|row| row.iter().zip(x).fold(Fq::ZERO, |acc, (a, b)| acc.add(a.mul(*b, ctx), ctx)))
            .collect()
    }

    /// g·x for a coordinate vector x.
    pub fn act(&self, g: &Mat2<Fq>, x: &[Fq]) -> Result<Vec<Fq>> {
        let c = self.coords(x)?;
        let ctx = &self.ctx;
        let mut out = vec![Fq::ZERO; self.dim()];
        for (ck, b) in c.iter().zip(&self.basis) {
            if ck.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(psi(&b.act(g, ctx), ctx)) {
                *o = o.add(ck.mul(y, ctx), ctx);
            }
        }
        Ok(out)
    }

    /// The Γ-submodule generated by the given vectors.
    pub fn closure<'a, I: IntoIterator<Item = &'a [Fq]>>(&self, seeds: I) -> FqEchelon {
        let mut ech = FqEchelon::new(self.dim());
        let mut queue: Vec<Vec<Fq>> = seeds.into_iter().map(|s| s.to_vec()).collect();
        while let Some(x) = queue.pop() {
            if ech.insert(&x, &self.ctx) {
                for g in &self.gens {
                    queue.push(self.apply(g, &x));
                }
            }
        }
        ech
    }

    /// ψ(X_r), the submodule generated by ψ(X^r).
    pub fn xr_image(&self) -> FqEchelon {
        let x = psi(&SymPoly::mono(&self.weight, &vec![0; self.weight.f()], &self.ctx), &self.ctx);
        self.closure([x.as_slice()])
    }

    /// Indices of coordinates grouped by torus character; the coordinates
    /// are torus eigenvectors.
    fn character_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<((u32, u32), Vec<usize>)> = Vec::new();
        for (i, k) in self.keys.iter().enumerate() {
            match groups.iter_mut().find(|(key, _)| key == k) {
                Some((_, v)) => v.push(i),
                None => groups.push((*k, vec![i])),
            }
        }
        groups.into_iter().map(|(_, v)| v).collect()
    }

    /// Preimage of rad(M/S) for submodules S ⊆ M. Each torus eigenspace of
    /// M/S must be at most one-dimensional, which makes every proper
    /// submodule a sum of cyclic submodules on eigenvectors.
    pub fn radical(&self, m: &FqEchelon, s: &FqEchelon) -> Result<FqEchelon> {
        let ctx = &self.ctx;
        let mut weight_vecs: Vec<Vec<Fq>> = Vec::new();
        for group in self.character_groups() {
            let mask = |row: &[Fq]| -> Vec<Fq> {
                row.iter().enumerate().map(|(i, x)| if group.contains(&i) { *x } else { Fq::ZERO }).collect()
            };
            let mut quot = FqEchelon::new(self.dim());
            for row in s.rows() {
                quot.insert(&mask(row), ctx);
            }
            let mut fresh = Vec::new();
            for row in m.rows() {
                let v = mask(row);
                if quot.insert(&v, ctx) {
                    fresh.push(v);
                }
            }
            if fresh.len() > 1 {
                return Err(Error::Unsupported(format!(
                    "torus eigenspace of dimension {} in a subquotient of the principal series",
                    fresh.len()
                )));
            }
            weight_vecs.extend(fresh);
        }
        let cyclic: Vec<FqEchelon> = weight_vecs
            .iter()
            .map(|v| self.closure(s.rows().chain(std::iter::once(v.as_slice()))))
            .collect();
        let mut rad = s.clone();
        for c in &cyclic {
            for (d, v) in cyclic.iter().zip(&weight_vecs) {
                if d.rank() < c.rank() && c.contains(v, ctx) {
                    for row in d.rows() {
                        rad.insert(row, ctx);
                    }
                }
            }
        }
        Ok(rad)
    }

    /// Radical filtration of M/S as preimages, from M down to S.
    pub fn radical_filtration(&self, m: &FqEchelon, s: &FqEchelon) -> Result<Vec<FqEchelon>> {
        let mut out = vec![m.clone()];
        while out.last().unwrap().rank() > s.rank() {
            let next = self.radical(out.last().unwrap(), s)?;
            if next.rank() == out.last().unwrap().rank() {
                return Err(Error::Singular("radical did not shrink".into()));
            }
            out.push(next);
        }
        Ok(out)
    }

    pub fn full(&self) -> FqEchelon {
        let mut e = FqEchelon::new(self.dim());
        for i in 0..self.dim() {
            e.insert(&unit(self.dim(), i), &self.ctx);
        }
        e
    }
}

/// Dimension and radical layers of Q = V_r/(V_r* + X_r), against the
/// predicted labels.
#[derive(Clone, Debug)]
pub struct QuotientReport {
    pub r: Vec<u32>,
    pub a: u32,
    pub a_digits: Vec<u32>,
    pub dim: usize,
    pub layer_dims: Vec<usize>,
    pub predicted: Vec<Vec<JhLabel>>,
    pub predicted_dims: Vec<usize>,
    /// Whether the prediction names every factor of each layer.
    pub complete: bool,
    pub matches: bool,
}

pub fn q_quotient(r: &[u32], ctx: &RingCtx) -> Result<QuotientReport> {
    let ps = PrincipalSeries::new(r, ctx)?;
    let xr = ps.xr_image();
    let layers = ps.radical_filtration(&ps.full(), &xr)?;
    let layer_dims: Vec<usize> = layers.windows(2).map(|w| w[0].rank() - w[1].rank()).collect();
    let (predicted, complete) = predicted_layers(r, ctx)?;
    let predicted_dims: Vec<usize> = predicted.iter().map(|l| l.iter().map(JhLabel::dim).sum()).collect();
    let matches = if complete {
        layer_dims == predicted_dims
    } else {
        layer_dims.len() >= predicted_dims.len()
            && layer_dims[0] == predicted_dims[0]
            && layer_dims.iter().zip(&predicted_dims).all(|(x, y)| x >= y)
    };
    let (a, a_digits) = reduced_weight(r, ctx);
    Ok(QuotientReport { r: r.to_vec(), a, a_digits, dim: ps.dim() - xr.rank(), layer_dims, predicted, predicted_dims, complete, matches })
}

/// An equivariant map from one radical layer of the principal series onto a
/// small-weight irreducible, built from a single generator pair by closure.
pub struct LayerMap {
    spec: FactorSpec,
    n_left: usize,
    ech: FqEchelon,
    target: WeightVec,
}

/// The (upper, lower) preimages bounding the layer a factor lives in.
pub fn layer_bounds(ps: &PrincipalSeries, kind: FactorKind) -> Result<(FqEchelon, FqEchelon)> {
    let xr = ps.xr_image();
    if kind == FactorKind::Socle {
        return Ok((xr, FqEchelon::new(ps.dim())));
    }
    let layers = ps.radical_filtration(&ps.full(), &xr)?;
    let depth = if kind == FactorKind::Cosocle { 0 } else { 1 };
    if layers.len() < depth + 2 {
        return Err(Error::Hypothesis(format!("Q has no layer {depth}")));
    }
    Ok((layers[depth].clone(), layers[depth + 1].clone()))
}

impl LayerMap {
    pub fn build(ps: &PrincipalSeries, kind: FactorKind) -> Result<LayerMap> {
        let spec = factor_spec(kind, &ps.weight().r, ps.ctx())?
            .ok_or_else(|| Error::Hypothesis(format!("factor {kind:?} does not occur for weight {}", ps.weight())))?;
        LayerMap::from_spec(ps, spec)
    }

    /// Closure of the FactorSpec generator pair; errors if the pair does not
    /// extend to an equivariant map on its layer.
    pub fn from_spec(ps: &PrincipalSeries, spec: FactorSpec) -> Result<LayerMap> {
        let ctx = ps.ctx();
        let (upper, lower) = layer_bounds(ps, spec.kind)?;
        let target = spec.label.weight();
        let n_left = ps.dim();
        let n = n_left + target.dim();
        let mut ech = FqEchelon::new(n);
        for row in lower.rows() {
            let mut v = row.to_vec();
            v.resize(n, Fq::ZERO);
            ech.insert(&v, ctx);
        }
        let gens = gamma_generators(ctx);
        let src = psi(&SymPoly::mono(ps.weight(), &spec.generator.0, ctx), ctx);
        let dst = SymPoly::mono(&target, &spec.generator.1, ctx);
        let mut queue = vec![(src, dst)];
        while let Some((x, w)) = queue.pop() {
            let mut v = x.clone();
            v.extend(to_dense(&w));
            if ech.insert(&v, ctx) {
                for (g, m) in gens.iter().zip(&ps.gens) {
                    queue.push((ps.apply(m, &x), w.act(g, ctx)));
                }
            }
        }
        for row in ech.rows() {
            let (left, right) = row.split_at(n_left);
            if left.iter().all(|x| x.is_zero()) && right.iter().any(|x| !x.is_zero()) {
                return Err(Error::Hypothesis(format!(
                    "generator pair for {} does not extend to an equivariant map",
                    spec.label
                )));
            }
            if !upper.contains(left, ctx) {
                return Err(Error::Hypothesis(format!("generator for {} lies outside its layer", spec.label)));
            }
        }
        Ok(LayerMap { spec, n_left, ech, target })
    }

    pub fn spec(&self) -> &FactorSpec {
        &self.spec
    }

    pub fn label(&self) -> &JhLabel {
        &self.spec.label
    }

    /// Image of P (taken modulo V_r* and the lower layers). Errors if P is
    /// outside the part of the layer generated by this factor.
    pub fn project(&self, v: &SymPoly<Fq>, ctx: &RingCtx) -> Result<SymPoly<Fq>> {
        let mut x = psi(v, ctx);
        x.resize(self.ech.ambient(), Fq::ZERO);
        let red = self.ech.reduce(&x, ctx);
        let (left, right) = red.split_at(self.n_left);
        if left.iter().any(|c| !c.is_zero()) {
            return Err(Error::Hypothesis(format!("polynomial is not in the span of factor {}", self.spec.label)));
        }
        let image: Vec<Fq> = right.iter().map(|c| c.neg(ctx)).collect();
        Ok(from_dense(&self.target, &image, ctx))
    }

    /// Checks every tabulated entry: returns (entries whose image is a
    /// nonzero multiple of the target, entries whose image equals it).
    pub fn check_entries(&self, ps: &PrincipalSeries) -> Result<(usize, usize)> {
        let ctx = ps.ctx();
        let (mut scalar, mut exact) = (0, 0);
        for (src, dst) in &self.spec.entries {
            let img = self.project(&SymPoly::mono(ps.weight(), src, ctx), ctx)?;
            let want = SymPoly::mono(&self.target, dst, ctx);
            if img.len() == 1 && img.terms()[0].0 == Mono::pack(dst) {
                scalar += 1;
                if img.eq_at(&want, ctx) {
                    exact += 1;
                }
            }
        }
        Ok((scalar, exact))
    }
}

/// Projection of P onto the factor `kind` of the structure at weight r.
pub fn jh_project(v: &SymPoly<Fq>, kind: FactorKind, ctx: &RingCtx) -> Result<(JhLabel, SymPoly<Fq>)> {
    let ps = PrincipalSeries::new(&v.weight().r, ctx)?;
    let map = LayerMap::build(&ps, kind)?;
    let img = map.project(v, ctx)?;
    Ok((map.label().clone(), img))
}

/// Outcome of checking X_r/(X_r ∩ V_r*) ≅ V_a through the (q+1)-dimensional
/// space spanned by formal symbols f_λ (λ ∈ F_q) and f_∞.
#[derive(Clone, Debug)]
pub struct XrIsoReport {
    pub r: Vec<u32>,
    pub a: u32,
    pub dim_va: usize,
    pub rank_rho_a: usize,
    pub dim_xr_mod_vstar: usize,
    /// ρ_r of every kernel vector of ρ_a lies in V_r*.
    pub kernel_in_vstar: bool,
    pub trials: usize,
    pub equivariance_failures: usize,
    pub pass: bool,
}

/// Membership in V_r*: the class-sum criterion when every r_i ≥ q, the
/// explicit span otherwise.
enum Vstar {
    Criterion,
    Span(SubmoduleBasis),
}

impl Vstar {
    fn for_weight(r: &[u32], ctx: &RingCtx) -> Result<Vstar> {
        if r.iter().all(|&x| x >= ctx.q()) {
            Ok(Vstar::Criterion)
        } else {
            Ok(Vstar::Span(vstar_basis(r, ctx)?))
        }
    }

    fn contains(&self, v: &SymPoly<Fq>, ctx: &RingCtx) -> bool {
        match self {
            Vstar::Criterion => in_vstar(v, ctx),
            Vstar::Span(b) => b.contains(v, ctx),
        }
    }

    /// dim of span(gens) modulo V_r*.
    fn rank_modulo(&self, gens: &[SymPoly<Fq>], ctx: &RingCtx) -> usize {
        match self {
            Vstar::Criterion => {
                let mut e = FqEchelon::new(ctx.q() as usize + 1);
                for g in gens {
                    e.insert(&psi(g, ctx), ctx);
                }
                e.rank()
            }
            Vstar::Span(b) => {
                let w = b.weight().clone();
                b.union(&SubmoduleBasis::span(&w, gens.iter().cloned(), ctx), ctx).dim() - b.dim()
            }
        }
    }
}

/// Builds ρ_r and ρ_a on the formal space, checks ρ_r(ker ρ_a) ⊆ V_r*, the
/// dimension match, and that the induced map commutes with random elements
/// of M_2(F_q).
pub fn xr_iso_check<R: Rng>(r: &[u32], trials: usize, rng: &mut R, ctx: &RingCtx) -> Result<XrIsoReport> {
    check_weight(r, ctx)?;
    let vstar = Vstar::for_weight(r, ctx)?;
    let (a, ad) = reduced_weight(r, ctx);
    let wr = WeightVec::untwisted(r);
    let wa = WeightVec::untwisted(&ad);
    let rho_r = xr_generators(&wr, ctx);
    let rho_a = xr_generators(&wa, ctx);
    let n = rho_a.len();
    let a_cols: Vec<Vec<Fq>> = rho_a.iter().map(to_dense).collect();
    let a_rows: Vec<Vec<Fq>> = (0..wa.dim()).map(|i| (0..n).map(|k| a_cols[k][i]).collect()).collect();
    let mut row_ech = FqEchelon::new(n);
    for row in &a_rows {
        row_ech.insert(row, ctx);
    }
    let combine = |gens: &[SymPoly<Fq>], x: &[Fq], w: &WeightVec| {
        gens.iter().zip(x).fold(SymPoly::zero(w), |acc, (g, c)| acc.add(&g.scale(c, ctx), ctx))
    };
    let kernel_in_vstar = row_ech.nullspace(ctx).iter().all(|k| vstar.contains(&combine(&rho_r, k, &wr), ctx));
    let dim_xr_mod_vstar = vstar.rank_modulo(&rho_r, ctx);
    let mut failures = 0;
    for _ in 0..trials {
        let g = random_m2(rng, ctx);
        let x: Vec<Fq> = (0..n).map(|_| random_fq(rng, ctx)).collect();
        let moved = to_dense(&combine(&rho_a, &x, &wa).act(&g, ctx));
        let ok = match solve_any_fq(&a_rows, &moved, n, ctx) {
            Some(y) => {
                let lhs = combine(&rho_r, &y, &wr);
                let rhs = combine(&rho_r, &x, &wr).act(&g, ctx);
                vstar.contains(&lhs.sub(&rhs, ctx), ctx)
            }
            None => false,
        };
        if !ok {
            failures += 1;
        }
    }
    let rank_rho_a = row_ech.rank();
    let dim_va = wa.dim();
    let pass = kernel_in_vstar && failures == 0 && rank_rho_a == dim_va && dim_xr_mod_vstar == dim_va;
    Ok(XrIsoReport {
        r: r.to_vec(),
        a,
        dim_va,
        rank_rho_a,
        dim_xr_mod_vstar,
        kernel_in_vstar,
        trials,
        equivariance_failures: failures,
        pass,
    })
}

/// Dimension of the space of combinations of the complement basis
/// {X^{r−j}Y^j : 0 ≤ j_i ≤ p−1} ∪ {Y^r} killed by every singular matrix.
/// Zero means V_r* is the largest singular submodule.
pub fn singular_complement_kernel(r: &[u32], ctx: &RingCtx) -> Result<usize> {
    check_weight(r, ctx)?;
    let weight = WeightVec::untwisted(r);
    let f = r.len();
    let mut basis: Vec<SymPoly<Fq>> =
        box_indices(&vec![ctx.p() - 1; f]).iter().map(|j| SymPoly::mono(&weight, j, ctx)).collect();
    basis.push(SymPoly::mono(&weight, r, ctx));
    let n = basis.len();
    let mut ech = FqEchelon::new(n);
    for t in singular_matrices(ctx) {
        let images: Vec<Vec<Fq>> = basis.iter().map(|b| to_dense(&b.act(&t, ctx))).collect();
        for i in 0..weight.dim() {
            let row: Vec<Fq> = images.iter().map(|im| im[i]).collect();
            ech.insert(&row, ctx);
        }
        if ech.rank() == n {
            break;
        }
    }
    Ok(n - ech.rank())
}
