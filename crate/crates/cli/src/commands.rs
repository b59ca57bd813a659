//! One function per subcommand; each returns a report whose `pass` flag
//! drives the exit code.

use hecke_core::congr::{indices_below, lift_violations, random_family, sum_s_r, sum_s_rbm, total, vanishing_solve};
use hecke_core::harness::{
    find_cases, theta_kernel_witness, verify_all, xr_kernel_witness, HeckeParams, Slope, Status, TheoremCase,
    VerificationReport, VerifyOptions,
};
use hecke_core::hecke::{apply_t_minus_ap, hecke_t, oracle_t};
use hecke_core::nonvanish::{coefficients_match, eqsol_rank, LevelData};
use hecke_core::padic::{Eis, Fq, RingCtx, Witt};
use hecke_core::structure::{q_quotient, vstar_basis, xr_iso_check};
use hecke_core::sympoly::{SymPoly, WeightVec};
use hecke_core::tree::{CosetRep, IndElem};
use hecke_core::{Error, Result};
use clap::ValueEnum;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::Report;
use crate::{Case, Common, Lemma, Regime};

fn config(c: &Common) -> Value {
    json!({
        "p": c.p,
        "f": c.f,
        "N": c.n,
        "e": c.e,
        "r": c.r,
        "rmin": c.rmin,
        "rmax": c.rmax,
        "slope": c.slope.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "unit": c.unit,
        "seed": c.seed,
    })
}

fn q_of(c: &Common) -> Result<u32> {
    RingCtx::new(c.p, c.f, 1, 1).map(|ctx| ctx.q())
}

/// The explicit weight, or every weight in [rmin, rmax]^f.
fn weights(c: &Common, lo: u32, hi: u32) -> Result<Vec<Vec<u32>>> {
    if let Some(r) = &c.r {
        if r.len() != c.f {
            return Err(Error::InvalidInput(format!("--r has {} entries but f = {}", r.len(), c.f)));
        }
        return Ok(vec![r.clone()]);
    }
    let (lo, hi) = (c.rmin.unwrap_or(lo), c.rmax.unwrap_or(hi));
    Ok((0..c.f).map(|_| lo..=hi).multi_cartesian_product().collect())
}

fn slopes_or(c: &Common, default: &str) -> Vec<Slope> {
    if c.slope.is_empty() {
        vec![default.parse().expect("valid default slope")]
    } else {
        c.slope.clone()
    }
}

fn a_p(c: &Common, slope: Slope, ctx: &RingCtx) -> Result<Eis> {
    let u = Witt::from_int(c.unit as i64, ctx);
    if !u.is_unit(ctx) {
        return Err(Error::InvalidInput(format!("unit part {} is divisible by p", c.unit)));
    }
    Ok(Eis::slope_element(slope.num, &u, ctx))
}

pub fn verify_lemma(lemma: Lemma, c: &Common, trials: Option<usize>) -> Result<Report> {
    let name = format!("verify-lemma {}", lemma.to_possible_value().expect("no skipped variants").get_name());
    let mut rep = Report::new(name, config(c));
    let q = q_of(c)?;
    match lemma {
        Lemma::Binomialsum => {
            let ws = weights(c, q, 2 * q)?;
            let sums: Vec<u32> = ws.par_iter().map(|r| sum_s_r(c.p, r)).collect();
            for (r, s) in ws.into_iter().zip(sums) {
                rep.push(json!({"r": r, "s_r_mod_p": s}), s == 0);
            }
        }
        Lemma::Gbinomialsum => {
            let rows: Vec<Result<(Vec<u32>, usize, Vec<String>)>> = weights(c, 0, 14)?
                .into_par_iter()
                .map(|r| {
                    let (mut checked, mut bad) = (0, Vec::new());
                    for m in indices_below(&r).filter(|m| total(m, c.p) < total(&r, c.p)) {
                        for b in 1..q {
                            checked += 1;
                            let res = sum_s_rbm(c.p, &r, b, &m)?;
                            if !res.agrees() {
                                bad.push(format!("b={b} m={m:?}: {} vs {}", res.brute, res.closed));
                            }
                        }
                    }
                    Ok((r, checked, bad))
                })
                .collect();
            for row in rows {
                let (r, checked, bad) = row?;
                let ok = bad.is_empty();
                rep.push(json!({"r": r, "checked": checked, "failures": bad.len(), "first_failure": bad.first()}), ok);
            }
        }
        Lemma::Vanishing => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            for trial in 0..trials.unwrap_or(100) {
                let fam = random_family(&mut rng, c.p, c.f, 1, c.n)?;
                let alpha = vanishing_solve(&fam, 1, c.n)?;
                let bad = lift_violations(&fam, &alpha, 1, c.n);
                let row = json!({
                    "trial": trial,
                    "r": fam.r,
                    "class": fam.c,
                    "moments": format!("{:?}", fam.moments),
                    "violations": bad,
                });
                rep.push(row, bad.is_empty());
            }
        }
        Lemma::XrIso => {
            let ctx = RingCtx::new(c.p, c.f, 1, 1)?;
            let ws = weights(c, q, q + 7)?;
            let rows: Vec<Result<_>> = ws
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ total(&r, c.p));
                    xr_iso_check(&r, trials.unwrap_or(10), &mut rng, &ctx)
                })
                .collect();
            let mut residues = std::collections::BTreeSet::new();
            for row in rows {
                let x = row?;
                residues.insert(x.a);
                let row = json!({
                    "r": x.r, "a": x.a, "dim_va": x.dim_va, "rank_rho_a": x.rank_rho_a,
                    "dim_xr_mod_vstar": x.dim_xr_mod_vstar, "kernel_in_vstar": x.kernel_in_vstar,
                    "equivariance_failures": x.equivariance_failures, "pass": x.pass,
                });
                rep.push(row, x.pass);
            }
            rep.note("residues_covered", residues.len());
            rep.note("residues_total", q - 1);
        }
        Lemma::EqsolKernel => {
            if c.f != 2 {
                return Err(Error::InvalidInput("the kernel lemma is stated for f = 2".into()));
            }
            let hi = c.rmax.unwrap_or(2 * c.p - 2);
            for (r0, r1) in (0..=hi).cartesian_product(0..=hi) {
                let (rank, n) = eqsol_rank(c.p, r0, r1)?;
                let in_scope = r0 > c.p - 1 || r1 > c.p - 1;
                let trivial = rank == n;
                rep.push(
                    json!({"r": [r0, r1], "rank": rank, "unknowns": n, "kernel_trivial": trivial, "in_scope": in_scope}),
                    !in_scope || trivial,
                );
            }
        }
        Lemma::Xrinkernel | Lemma::Thetainkernel => {
            let slope = slopes_or(c, "1/2")[0];
            let ctx = RingCtx::new(c.p, c.f, c.n, slope.den)?;
            let ap = a_p(c, slope, &ctx)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let ws: Vec<Vec<u32>> = match &c.r {
                Some(_) => weights(c, q, q)?,
                None => {
                    let (lo, hi) = (c.rmin.unwrap_or(q), c.rmax.unwrap_or(q + 2 * c.p));
                    (0..trials.unwrap_or(10)).map(|_| (0..c.f).map(|_| rng.gen_range(lo..=hi)).collect()).collect()
                }
            };
            for r in ws {
                let reports = if matches!(lemma, Lemma::Xrinkernel) {
                    vec![xr_kernel_witness(&r, &ap, &ctx)?]
                } else {
                    (0..c.f).map(|i| theta_kernel_witness(&r, i, &ap, &mut rng, &ctx)).collect::<Result<Vec<_>>>()?
                };
                for x in reports {
                    let ok = x.pass;
                    rep.push(json!({"lemma": x.lemma, "r": x.r, "index": x.index, "pass": ok, "detail": x.detail}), ok);
                }
            }
        }
        Lemma::CoeffFormula => {
            if c.f != 2 {
                return Err(Error::InvalidInput("the coefficient formula is implemented for f = 2".into()));
            }
            let r = c.r.clone().unwrap_or_else(|| vec![2, 2]);
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            for trial in 0..trials.unwrap_or(50) {
                let slope = Slope::new(rng.gen_range(1..4), 4)?;
                let ctx = RingCtx::new(c.p, 2, c.n, 4)?;
                let ap = a_p(c, slope, &ctx)?;
                let m = rng.gen_range(1..=2);
                let density = if m == 1 { 0.5 } else { 0.1 };
                let data = LevelData::random(&mut rng, m, &r, density, &ctx)?;
                let ok = coefficients_match(&data, &ap, &ctx)?;
                rep.push(json!({"trial": trial, "level": m, "slope": slope.to_string(), "r": r, "agree": ok}), ok);
            }
        }
    }
    rep.note("checks", rep.rows.len());
    Ok(rep)
}

fn theorem_row(x: &VerificationReport) -> Value {
    let p = &x.case.params;
    json!({
        "case": x.case.name.as_str(),
        "params": {"p": p.p, "f": p.f, "N": p.n, "r": p.r, "slope": p.slope.to_string(), "unit": p.unit},
        "hypotheses": x.case.hypotheses,
        "regime": x.case.regime.map(|r| r.as_str()),
        "h": x.case.h,
        "a": x.case.a,
        "integrality": {"integral": x.integral, "detail": x.integrality_detail},
        "residual_nonzero_entries": x.residual_nonzero_entries,
        "residual_outside_xr": x.residual_outside_xr,
        "dense_route_agrees": x.dense_route_agrees,
        "untwisted_route": x.untwisted_route,
        "factor": x.factor.as_ref().map(|l| l.to_string()),
        "constant": x.constant.index(),
        "projection_scalar": x.projection_scalar.map(Fq::index),
        "expected_scalar": x.expected_scalar.map(Fq::index),
        "projection_match": x.projection_match,
        "first_failure": x.first_failure,
        "spot_checked": [x.spot_checked.0, x.spot_checked.1],
        "min_precision_slack": x.min_precision_slack.to_string(),
        "min_witness_valuation": x.min_witness_valuation.to_string(),
        "status": x.status.as_str(),
        "pass": x.pass,
    })
}

fn cases_for(case: Case, c: &Common, default_slope: &str) -> Result<Vec<TheoremCase>> {
    let q = q_of(c)?;
    let slopes = slopes_or(c, default_slope);
    if let Some(r) = &c.r {
        if r.len() != c.f {
            return Err(Error::InvalidInput(format!("--r has {} entries but f = {}", r.len(), c.f)));
        }
        return slopes
            .iter()
            .map(|&slope| {
                let params = HeckeParams { p: c.p, f: c.f, n: c.n, r: r.clone(), slope, unit: c.unit };
                TheoremCase::new(case.name(), params)
            })
            .collect();
    }
    let (lo, hi) = (c.rmin.unwrap_or(q), c.rmax.unwrap_or(q + 8));
    Ok(find_cases(case.name(), c.p, c.f, c.n, lo, hi, &slopes, c.unit))
}

pub fn verify_theorem(
    case: Case,
    c: &Common,
    regime: Option<Regime>,
    limit: Option<usize>,
    spot_checks: usize,
) -> Result<Report> {
    let mut cases = cases_for(case, c, "1/2")?;
    if let Some(reg) = regime {
        cases = if c.r.is_some() {
            cases.into_iter().map(|k| k.with_regime(reg.get())).collect::<Result<_>>()?
        } else {
            cases.into_iter().filter_map(|k| k.with_regime(reg.get()).ok()).collect()
        };
    }
    if let Some(n) = limit {
        cases.truncate(n);
    }
    if cases.is_empty() {
        return Err(Error::InvalidInput("no admissible cases for these parameters".into()));
    }
    let opts = VerifyOptions { seed: c.seed, spot_checks };
    let mut rep = Report::new(format!("verify-theorem {}", case.name()), config(c));
    let (mut passed, mut outside) = (0, 0);
    for x in verify_all(&cases, &opts) {
        let x = x?;
        match x.status {
            Status::Pass => passed += 1,
            Status::OutsideHypotheses => outside += 1,
            Status::Fail => {}
        }
        rep.push(theorem_row(&x), x.status != Status::Fail);
    }
    rep.note("cases", cases.len());
    rep.note("passed", passed);
    rep.note("outside_theorem_hypotheses", outside);
    Ok(rep)
}

pub fn find(case: Case, c: &Common) -> Result<Report> {
    let cases = cases_for(case, c, "1/2")?;
    let mut rep = Report::new(format!("find-cases {}", case.name()), config(c));
    for k in &cases {
        let row = json!({
            "case": k.name.as_str(),
            "r": k.params.r,
            "slope": k.params.slope.to_string(),
            "a": k.a,
            "a_digits": k.a_digits,
            "h": k.h,
            "regime": k.regime.map(|r| r.as_str()),
            "hypotheses": k.hypotheses,
        });
        rep.push(row, true);
    }
    rep.note("cases", cases.len());
    Ok(rep)
}

pub fn structure(c: &Common) -> Result<Report> {
    let ctx = RingCtx::new(c.p, c.f, 1, 1)?;
    let q = ctx.q();
    let mut rep = Report::new("structure", config(c));
    let rows: Vec<Result<Value>> = weights(c, q, q + 3)?
        .into_par_iter()
        .map(|r| {
            let codim = vstar_basis(&r, &ctx)?.codim();
            let x = q_quotient(&r, &ctx)?;
            let predicted: Vec<Vec<String>> =
                x.predicted.iter().map(|l| l.iter().map(|f| f.to_string()).collect()).collect();
            Ok(json!({
                "r": r,
                "a": x.a,
                "a_digits": x.a_digits,
                "dim_vr_mod_vstar": codim,
                "dim_q": x.dim,
                "layer_dims": x.layer_dims,
                "predicted": predicted,
                "predicted_dims": x.predicted_dims,
                "complete": x.complete,
                "matches": x.matches,
            }))
        })
        .collect();
    for row in rows {
        let row = row?;
        let ok = row["matches"] == json!(true) && row["dim_vr_mod_vstar"] == json!(q + 1);
        rep.push(row, ok);
    }
    Ok(rep)
}

fn parse_rep(s: &str, ctx: &RingCtx) -> Result<CosetRep> {
    let bad = || Error::InvalidInput(format!("vertex '{s}' must be id, alpha, plus:d,… or minus:d,…"));
    match s {
        "id" => return Ok(CosetRep::identity()),
        "alpha" => return Ok(CosetRep::alpha()),
        _ => {}
    }
    let (half, ds) = s.split_once(':').ok_or_else(bad)?;
    let digits = ds
        .split(',')
        .map(|d| match d.trim().parse::<u32>() {
            Ok(i) if i < ctx.q() => Ok(Fq::from_index(i, ctx)),
            _ => Err(bad()),
        })
        .collect::<Result<Vec<_>>>()?;
    match half {
        "plus" => Ok(CosetRep::plus(digits)),
        "minus" => Ok(CosetRep::minus(digits)),
        _ => Err(bad()),
    }
}

pub fn hecke_apply(c: &Common, j: &[u32], rep_s: &str) -> Result<Report> {
    let r = c.r.clone().ok_or_else(|| Error::InvalidInput("hecke-apply needs --r".into()))?;
    let e = c.slope.first().map_or(c.e, |s| s.den);
    let ctx = RingCtx::new(c.p, c.f, c.n, e)?;
    let weight = WeightVec::untwisted(&r);
    let j = if j.is_empty() { vec![0; c.f] } else { j.to_vec() };
    let mono = SymPoly::monomial(&weight, &j, Eis::from_witt(&Witt::one()), &ctx)?;
    let input = IndElem::single(parse_rep(rep_s, &ctx)?, mono);
    let t = hecke_t(&input, &ctx);
    let agrees = oracle_t(&input, &ctx)?.eq_at(&t, &ctx);
    let out = match c.slope.first() {
        Some(&s) => apply_t_minus_ap(&input, &a_p(c, s, &ctx)?, &ctx),
        None => t,
    };
    let mut rep = Report::new("hecke-apply", config(c));
    for (g, v) in out.entries() {
        rep.push(json!({"vertex": g.to_string(), "value": v.render()}), true);
    }
    rep.note("operator", if c.slope.is_empty() { "T" } else { "T - a_p" });
    rep.note("input", format!("[{rep_s}, j={j:?}]"));
    rep.note("oracle_agrees", agrees);
    rep.note("entries", out.len());
    rep.pass = agrees;
    Ok(rep)
}
