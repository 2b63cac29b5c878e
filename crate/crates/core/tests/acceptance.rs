//! Acceptance checks, one line per criterion.
//!
//! Each check has a pinned tolerance and a wall-clock budget. The process
//! prints `PASS`/`FAIL` per criterion and exits nonzero if anything failed.
//!
//! Run: `cargo test -p tdiam --test acceptance`

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;

use tdiam::extremal::{
    markov_factor, multinomial_step_holds, verify_lemma1, verify_lemma3, verify_theorem, HarnessOptions,
    MarkovParams, TheoremFlavor,
};
use tdiam::multiindex::{binomial, check_lemma2, dims, graded_lex_compare, Enumeration, MultiIndex};
use tdiam::polyspace::Basis;
use tdiam::setmodel::SetModel;
use tdiam::vandermonde::{diameter_curve, fekete_bruteforce, vdm_logdet, LejaState, DEFAULT_FEKETE_BUDGET};

type Check = Result<String, String>;

fn origin() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn circle(radius: f64, count: usize) -> SetModel {
    SetModel::circle(origin(), radius, count).expect("circle")
}

fn torus(count: usize) -> SetModel {
    SetModel::product(vec![circle(1.0, count), circle(1.0, count)]).expect("torus")
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ─── 1. Fekete oracle ─────────────────────────────────────────────────────

fn fekete_oracle() -> Check {
    let s = circle(1.0, 12);
    let mut worst = 0.0f64;
    for (k, expect) in [(3usize, 27f64.sqrt()), (4, 16.0)] {
        let f = fekete_bruteforce(&s, k, DEFAULT_FEKETE_BUDGET).map_err(|e| e.to_string())?;
        let err = rel_err(f.value.magnitude(), expect);
        ensure(err <= 1e-10, || format!("k={k}: |VDM| = {} vs {expect}", f.value.magnitude()))?;
        worst = worst.max(err);
    }
    Ok(format!("max rel err {worst:.1e}"))
}

// ─── 2. Leja running value vs recompute ───────────────────────────────────

fn leja_consistency() -> Check {
    let s = torus(32);
    let h5 = dims(2, 5).unwrap().h_usize().unwrap();
    let mut st = LejaState::new(&s).map_err(|e| e.to_string())?;
    st.extend_to(h5).map_err(|e| e.to_string())?;
    let running = st.log_vdm();
    let pts = st.points();
    let fresh = vdm_logdet(&pts, &Basis::prefix(2, h5).unwrap()).map_err(|e| e.to_string())?;
    let err = (running - fresh.log_mag).abs() / fresh.log_mag.abs().max(1.0);
    ensure(h5 == 21, || format!("h_5 = {h5}"))?;
    ensure(err <= 1e-8, || format!("running {running} vs fresh {}", fresh.log_mag))?;
    Ok(format!("log|VDM| = {running:.12}, rel err {err:.1e}"))
}

// ─── 3. disc optimality at every degree ───────────────────────────────────

fn disc_every_degree() -> Check {
    // Fekete magnitudes V_k = k^{k/2} on clouds that contain k-th roots of
    // unity; k ≤ 5 covers the brackets at d ≤ 4
    for (k, cloud) in [(2usize, 12usize), (3, 12), (4, 12), (5, 20)] {
        let f = fekete_bruteforce(&circle(1.0, cloud), k, DEFAULT_FEKETE_BUDGET).map_err(|e| e.to_string())?;
        let expect = (k as f64).powf(k as f64 / 2.0);
        ensure(rel_err(f.value.magnitude(), expect) <= 1e-10, || {
            format!("Fekete k={k}: {} vs {expect}", f.value.magnitude())
        })?;
    }
    let s = circle(1.0, 512);
    let curve = diameter_curve(&s, 20).map_err(|e| e.to_string())?;
    let mut lowest = f64::INFINITY;
    for row in curve.rows.iter().filter(|r| r.d >= 1) {
        let delta = row.delta_d.expect("δ_d for d ≥ 1");
        let upper = ((row.d + 1) as f64).powf(1.0 / row.d as f64);
        ensure(delta >= 1.0 - 1e-6, || format!("d={}: δ = {delta}", row.d))?;
        ensure(delta <= upper + 1e-3, || format!("d={}: δ = {delta} > {upper}", row.d))?;
        lowest = lowest.min(delta);
    }
    let report = verify_theorem(&s, MarkovParams::bernstein(1.0).unwrap(), TheoremFlavor::General, &curve)
        .map_err(|e| e.to_string())?;
    ensure(report.violations == 0, || format!("{} theorem violations", report.violations))?;
    Ok(format!("min δ_d = {lowest:.9}, δ_20 = {:.6}", curve.last_delta().unwrap()))
}

// ─── 4. bidisc ─────────────────────────────────────────────────────────────

fn bidisc_every_degree() -> Check {
    let s = torus(32);
    let curve = diameter_curve(&s, 5).map_err(|e| e.to_string())?;
    let params = MarkovParams::bernstein(1.0).unwrap();
    let product = verify_theorem(&s, params, TheoremFlavor::Product, &curve).map_err(|e| e.to_string())?;
    let general = verify_theorem(&s, params, TheoremFlavor::General, &curve).map_err(|e| e.to_string())?;
    ensure(product.violations == 0, || format!("product flavor: {} violations", product.violations))?;
    ensure(general.violations == 0, || format!("general flavor: {} violations", general.violations))?;
    let mut lowest = f64::INFINITY;
    for chk in &general.degrees {
        if let Some(delta) = chk.delta_d {
            ensure(delta >= 1.0 - 1e-6, || format!("d={}: δ = {delta}", chk.d))?;
            ensure(delta >= 0.5, || format!("d={}: δ = {delta} below 1/2", chk.d))?;
            ensure((chk.delta_bound - 0.5).abs() < 1e-15, || "general threshold is not 1/2".into())?;
            lowest = lowest.min(delta);
        }
    }
    Ok(format!("min δ_d = {lowest:.9}"))
}

// ─── 5. Markov factors ─────────────────────────────────────────────────────

fn markov_factors() -> Check {
    let disc = circle(1.0, 512);
    let mut summary = Vec::new();
    for d in 1..=6 {
        let f = markov_factor(&disc, d, 0, 64).map_err(|e| e.to_string())?;
        let (lo, hi) = (f.lower / d as f64, f.upper / d as f64);
        ensure(lo >= 0.99 && hi <= 1.05, || format!("circle d={d}: ρ/d ∈ [{lo}, {hi}]"))?;
        summary.push(hi);
    }
    let seg = SetModel::segment(-1.0, 1.0, 1000).unwrap();
    for d in 1..=6 {
        let f = markov_factor(&seg, d, 0, 64).map_err(|e| e.to_string())?;
        let d2 = (d * d) as f64;
        let (lo, hi) = (f.lower / d2, f.upper / d2);
        ensure(lo >= 0.95 && hi <= 1.05, || format!("segment d={d}: ρ/d² ∈ [{lo}, {hi}]"))?;
    }
    let worst = summary.iter().cloned().fold(0.0, f64::max);
    Ok(format!("circle max ρ/d = {worst:.5}"))
}

// ─── 6. lemma harnesses ────────────────────────────────────────────────────

fn lemma_harnesses() -> Check {
    let params = MarkovParams::bernstein(1.0).unwrap();
    let r1 = verify_lemma1(
        &circle(1.0, 512),
        params,
        HarnessOptions {
            trials: 1000,
            degree_cap: 6,
            seed: 20240601,
        },
    )
    .map_err(|e| e.to_string())?;
    let r3 = verify_lemma3(
        &torus(32),
        params,
        HarnessOptions {
            trials: 1000,
            degree_cap: 4,
            seed: 20240602,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(r1.trials == 1000 && r3.trials == 1000, || "trial count".into())?;
    ensure(r1.samples.iter().all(|t| t.index < 7), || "n=1 index out of range".into())?;
    ensure(r3.samples.iter().all(|t| t.index < 15), || "n=2 index out of range".into())?;
    ensure(r1.violations == 0, || format!("disc: {} violations", r1.violations))?;
    ensure(r3.violations == 0, || format!("bidisc: {} violations", r3.violations))?;
    Ok(format!(
        "worst log margins {:.3e} / {:.3e}",
        r1.worst_margin.unwrap(),
        r3.worst_margin.unwrap()
    ))
}

// ─── 7. exact combinatorics ────────────────────────────────────────────────

fn all_indices(n: usize, max_len: u32) -> Vec<MultiIndex> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=max_len - used).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|v| MultiIndex::new(v).unwrap()).collect()
}

fn exact_combinatorics() -> Check {
    let mut checked = 0usize;
    for n in 1..=4usize {
        let mut e = Enumeration::new(n).unwrap();
        let h10 = dims(n, 10).unwrap().h_usize().unwrap();
        let prefix = e.prefix(h10).to_vec();
        let mut running_len = BigUint::from(0u32);
        for d in 0..=10usize {
            let sd = dims(n, d).unwrap();
            let h = sd.h_usize().unwrap();
            // block sizes: number of indices of length ≤ d
            let count = prefix.iter().filter(|a| a.length() <= d as u64).count();
            ensure(count == h, || format!("n={n} d={d}: {count} indices vs h = {h}"))?;
            ensure(sd.h == binomial((n + d) as u64, n as u64), || format!("h mismatch n={n} d={d}"))?;
            let start = if d == 0 { 0 } else { dims(n, d - 1).unwrap().h_usize().unwrap() };
            for a in &prefix[start..h] {
                running_len += BigUint::from(a.length());
            }
            ensure(running_len == sd.l, || format!("l_d mismatch at n={n} d={d}"))?;
            ensure(
                sd.l == BigUint::from(n) * binomial((n + d) as u64, (n + 1) as u64),
                || format!("l_d closed form n={n} d={d}"),
            )?;
        }
        for (i, a) in prefix.iter().enumerate() {
            ensure(e.index_of(a).unwrap() == i, || format!("index_of({a}) ≠ {i}"))?;
            if i > 0 {
                ensure(
                    graded_lex_compare(&prefix[i - 1], a).unwrap() == std::cmp::Ordering::Less,
                    || format!("order broken at {i}"),
                )?;
            }
        }
        let distinct: std::collections::HashSet<&[u32]> = prefix.iter().map(|a| a.exponents()).collect();
        ensure(distinct.len() == prefix.len(), || format!("duplicate indices for n={n}"))?;
        ensure(all_indices(n, 10).len() == h10, || format!("n={n}: enumeration is not onto"))?;
        checked += h10;
    }
    for n in 1..=3usize {
        let all = all_indices(n, 6);
        for b in &all {
            for g in &all {
                if graded_lex_compare(b, g).unwrap() != std::cmp::Ordering::Less {
                    continue;
                }
                for i in 0..n {
                    if g.exponents()[i] == 0 {
                        continue;
                    }
                    ensure(check_lemma2(b, g, i).unwrap(), || format!("lowering order fails: {b} {g} i={i}"))?;
                    checked += 1;
                }
            }
        }
        for a in all_indices(n, 8) {
            ensure(multinomial_step_holds(&a), || format!("multinomial step fails at {a}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} exact checks"))
}

// ─── 8. scaling covariance ─────────────────────────────────────────────────

fn scaling_covariance() -> Check {
    let r = 2.5;
    let unit = diameter_curve(&circle(1.0, 512), 20).map_err(|e| e.to_string())?;
    let big_set = circle(r, 512);
    let big = diameter_curve(&big_set, 20).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (u, b) in unit.rows.iter().zip(&big.rows) {
        if let (Some(du), Some(db)) = (u.delta_d, b.delta_d) {
            let err = rel_err(db, r * du);
            ensure(err <= 1e-9, || format!("d={}: {db} vs {}", u.d, r * du))?;
            worst = worst.max(err);
        }
    }
    let report = verify_theorem(&big_set, MarkovParams::bernstein(1.0 / r).unwrap(), TheoremFlavor::General, &big)
        .map_err(|e| e.to_string())?;
    ensure(report.violations == 0, || format!("{} violations at M = 1/R", report.violations))?;
    Ok(format!("max rel err {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("fekete oracle exactness", fekete_oracle, Duration::from_secs(1)),
        ("leja/vdm consistency", leja_consistency, Duration::from_secs(10)),
        ("disc bound at every degree", disc_every_degree, Duration::from_secs(30)),
        ("bidisc bound at every degree", bidisc_every_degree, Duration::from_secs(30)),
        ("markov factors", markov_factors, Duration::from_secs(60)),
        ("lemma harnesses", lemma_harnesses, Duration::from_secs(30)),
        ("exact combinatorics", exact_combinatorics, Duration::from_secs(5)),
        ("scaling covariance", scaling_covariance, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; took {elapsed:.2?} > {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name} ({elapsed:.2?}) {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({elapsed:.2?}) {msg}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
