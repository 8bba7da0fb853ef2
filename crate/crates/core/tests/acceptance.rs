//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p kirkman --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kirkman::design::min_sum;
use kirkman::oracle::{cross_check, oracle_search_kts, SearchOutcome};
use kirkman::placement::{plan_from_design, ChunkCatalog};
use kirkman::verify::{verify_coverage, verify_resolution};
use kirkman::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<Duration, String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:.2?}, limit {limit:?}"))?;
    Ok(spent)
}

fn c1_kts9() -> Outcome {
    let t = Instant::now();
    let built = build_kts(2).map_err(|e| e.to_string())?;
    let spent = within(t, Duration::from_secs(1))?;
    ensure(built.class_set() == common::design("kts9_worked").class_set(), || {
        "class sets differ".into()
    })?;
    Ok(format!("4 classes equal, {spent:.2?}"))
}

fn c2_kts27() -> Outcome {
    let t = Instant::now();
    let built = build_kts(3).map_err(|e| e.to_string())?;
    let spent = within(t, Duration::from_secs(1))?;
    ensure(built.class_set() == common::design("kts27_worked").class_set(), || {
        "class sets differ".into()
    })?;
    let m = min_sum(&built).map_err(|e| e.to_string())?;
    ensure(m == 27, || format!("min_sum {m}"))?;
    Ok(format!("13 classes equal, min_sum 27, {spent:.2?}"))
}

fn c3_kts_scaling() -> Outcome {
    let mut last = Duration::ZERO;
    for k in 1..=7 {
        let d = build_kts(k).map_err(|e| e.to_string())?;
        let n = 3u64.pow(k as u32);
        let t = Instant::now();
        let cover = verify_coverage(&d);
        if k == 7 {
            last = within(t, Duration::from_secs(60))?;
        }
        ensure(cover.passed, || format!("KTS({n}) coverage:\n{cover}"))?;
        let res = verify_resolution(&d);
        ensure(res.passed, || format!("KTS({n}) resolution:\n{res}"))?;
        let m = min_sum(&d).map_err(|e| e.to_string())?;
        ensure(m == n, || format!("KTS({n}) min_sum {m}"))?;
    }
    Ok(format!("k = 1..7 verified, pair coverage at 2187 in {last:.2?}"))
}

fn c4_factorizations() -> Outcome {
    for (m, name) in [(6, "factorization6_worked"), (12, "factorization12_worked")] {
        let built = factorize_even(m).map_err(|e| e.to_string())?;
        let worked = common::factorization(name);
        ensure(built.factors() == worked.factors(), || format!("order {m} differs"))?;
    }
    Ok("orders 6 and 12 equal factor by factor".into())
}

fn c5_sweep() -> Outcome {
    let t = Instant::now();
    for m in (2..=2000).step_by(2) {
        let f = factorize_even(m).map_err(|e| e.to_string())?;
        ensure(f.factors().len() as u32 == m - 1, || format!("order {m}: {} factors", f.factors().len()))?;
        // Independent of verify_factorization: recount every pair here.
        let mut seen = vec![false; (m * m) as usize];
        for factor in f.factors() {
            let mut hit = vec![false; m as usize];
            ensure(factor.len() as u32 == m / 2, || format!("order {m}: short factor"))?;
            for p in factor {
                for x in [p.lo, p.hi] {
                    ensure(!std::mem::replace(&mut hit[x as usize], true), || {
                        format!("order {m}: point {x} repeated in a factor")
                    })?;
                }
                let slot = &mut seen[(p.lo * m + p.hi) as usize];
                ensure(!std::mem::replace(slot, true), || format!("order {m}: pair {p:?} twice"))?;
            }
        }
        let covered = seen.iter().filter(|&&b| b).count() as u32;
        ensure(covered == m * (m - 1) / 2, || format!("order {m}: {covered} pairs"))?;
    }
    let spent = within(t, Duration::from_secs(60))?;
    Ok(format!("1000 orders in {spent:.2?}"))
}

fn c6_kqs() -> Outcome {
    for (k, name, expect) in [(1, "kqs8_worked", 10), (2, "kqs16_worked", 18)] {
        let built = build_kqs(k).map_err(|e| e.to_string())?;
        ensure(built.class_set() == common::design(name).class_set(), || {
            format!("KQS({}) class sets differ", built.order())
        })?;
        let m = min_sum(&built).map_err(|e| e.to_string())?;
        ensure(m == expect, || format!("KQS({}) min_sum {m}", built.order()))?;
    }
    Ok("7 and 35 classes equal, min_sum 10 and 18".into())
}

fn c7_kqs_scaling() -> Outcome {
    let t = Instant::now();
    for k in 0..=5 {
        let d = build_kqs(k).map_err(|e| e.to_string())?;
        let n = u64::from(d.order());
        let cover = verify_coverage(&d);
        ensure(cover.passed, || format!("KQS({n}) coverage:\n{cover}"))?;
        let res = verify_resolution(&d);
        ensure(res.passed, || format!("KQS({n}) resolution:\n{res}"))?;
        let m = min_sum(&d).map_err(|e| e.to_string())?;
        ensure(m == n + 2, || format!("KQS({n}) min_sum {m}"))?;
    }
    let spent = within(t, Duration::from_secs(60))?;
    Ok(format!("k = 0..5 verified in {spent:.2?}"))
}

fn c8_bound() -> Outcome {
    let mut outputs = Vec::new();
    for k in 1..=7 {
        outputs.push(build_kts(k).map_err(|e| e.to_string())?);
    }
    for k in 0..=5 {
        outputs.push(build_kqs(k).map_err(|e| e.to_string())?);
    }
    for d in &outputs {
        let m = min_sum(d).map_err(|e| e.to_string())?;
        let b = min_sum_upper_bound(d.strength(), d.block_size(), d.order()).map_err(|e| e.to_string())?;
        ensure(m == b, || format!("order {}: min_sum {m}, bound {b}", d.order()))?;
    }
    Ok(format!("{} outputs meet the bound", outputs.len()))
}

fn c9_oracle() -> Outcome {
    let mut fixtures: Vec<(String, ResolvableDesign)> = common::DESIGN_FIXTURES
        .iter()
        .map(|n| (n.to_string(), common::design(n)))
        .collect();
    fixtures.push(("built KTS(81)".into(), build_kts(4).map_err(|e| e.to_string())?));
    fixtures.push(("built KQS(32)".into(), build_kqs(3).map_err(|e| e.to_string())?));
    for (i, (name, d)) in fixtures.iter().enumerate() {
        let check = cross_check(d, 1000, i as u64);
        ensure(check.agreed(), || format!("{name}: {:?}", check.disagreements))?;
    }
    let budget = Some(Duration::from_secs(600));
    let t = Instant::now();
    match oracle_search_kts(9, 9, budget).map_err(|e| e.to_string())? {
        SearchOutcome::Found(d) => {
            ensure(kirkman::verify_design(&d).passed, || "search result does not verify".into())?
        }
        other => return Err(format!("search (9, 9): {other:?}")),
    }
    let found = t.elapsed();
    let t = Instant::now();
    let none = oracle_search_kts(9, 10, budget).map_err(|e| e.to_string())?;
    ensure(none == SearchOutcome::NotFound, || format!("search (9, 10): {none:?}"))?;
    Ok(format!(
        "{} fixtures x 1000 subsets agree; (9,9) found in {found:.2?}, (9,10) exhausted in {:.2?}",
        fixtures.len(),
        t.elapsed()
    ))
}

fn c10_placement() -> Outcome {
    let plan = plan_from_design(&build_kts(2).map_err(|e| e.to_string())?, &ChunkCatalog::identity(9))
        .map_err(|e| e.to_string())?;
    let rows: [(&str, [u32; 3], u64); 12] = [
        ("A", [0, 1, 8], 9),
        ("B", [0, 2, 7], 9),
        ("C", [0, 3, 6], 9),
        ("D", [0, 4, 5], 9),
        ("E", [1, 2, 6], 9),
        ("F", [1, 3, 5], 9),
        ("G", [1, 4, 7], 12),
        ("H", [2, 3, 4], 9),
        ("I", [2, 5, 8], 15),
        ("J", [3, 7, 8], 18),
        ("K", [4, 6, 8], 18),
        ("L", [5, 6, 7], 18),
    ];
    ensure(plan.servers.len() == 12, || format!("{} servers", plan.servers.len()))?;
    for (s, (name, labels, sum)) in plan.servers.iter().zip(rows) {
        ensure(s.name == name && s.labels == labels && s.sum == sum, || {
            format!("server {} = {:?} sum {}", s.name, s.labels, s.sum)
        })?;
    }
    ensure(plan.locations.len() == 4, || format!("{} locations", plan.locations.len()))?;
    for loc in &plan.locations {
        let mut chunks: Vec<u32> = loc
            .servers
            .iter()
            .flat_map(|n| plan.server(n).unwrap().labels.clone())
            .collect();
        chunks.sort_unstable();
        ensure(chunks == (0..9).collect::<Vec<_>>(), || format!("location {} holds {chunks:?}", loc.name))?;
    }
    ensure(plan.min_server_sum() == Some(9), || format!("min {:?}", plan.min_server_sum()))?;
    Ok("12 servers and 4 locations reproduced, min sum 9".into())
}

fn c11_mutations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0;
    for name in common::DESIGN_FIXTURES {
        let d = common::design(name);
        let base = common::lists(&d);
        for trial in 0..100 {
            let mut lists = base.clone();
            let c = rng.gen_range(0..lists.len());
            let b = rng.gen_range(0..lists[c].len());
            let s = rng.gen_range(0..lists[c][b].len());
            let old = lists[c][b][s];
            let new = loop {
                let v = rng.gen_range(0..d.order());
                if !lists[c][b].contains(&v) {
                    break v;
                }
            };
            lists[c][b][s] = new;
            let mutated = ResolvableDesign::from_lists(d.order(), d.kind(), &lists).map_err(|e| e.to_string())?;
            let report = kirkman::verify_design(&mutated);
            let caught = report.checks.iter().any(|ch| !ch.passed && !ch.witnesses.is_empty());
            ensure(caught, || format!("{name} trial {trial}: {old} -> {new} not caught"))?;
            total += 1;
        }
    }
    for name in common::FACTORIZATION_FIXTURES {
        let f = common::factorization(name);
        let m = f.order();
        for trial in 0..100 {
            let mut factors: Vec<Vec<(u32, u32)>> =
                f.factors().iter().map(|fa| fa.iter().map(|p| (p.lo, p.hi)).collect()).collect();
            let i = rng.gen_range(0..factors.len());
            let j = rng.gen_range(0..factors[i].len());
            let (lo, hi) = factors[i][j];
            let new = loop {
                let v = rng.gen_range(0..m);
                if v != lo && v != hi {
                    break v;
                }
            };
            factors[i][j] = if rng.gen_bool(0.5) { (new, hi) } else { (lo, new) };
            let pairs = factors
                .iter()
                .map(|fa| fa.iter().map(|&(a, b)| Pair::new(a, b)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            let mutated = OneFactorization::new(m, pairs).map_err(|e| e.to_string())?;
            let report = verify_factorization(&mutated);
            let caught = report.checks.iter().any(|ch| !ch.passed && !ch.witnesses.is_empty());
            ensure(caught, || format!("{name} trial {trial} not caught"))?;
            total += 1;
        }
    }
    Ok(format!("{total} mutations caught with witnesses"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("golden KTS(9)", c1_kts9),
        ("golden KTS(27)", c2_kts27),
        ("KTS scaling to 2187", c3_kts_scaling),
        ("golden factorizations", c4_factorizations),
        ("factorization sweep to 2000", c5_sweep),
        ("golden KQS(8) and KQS(16)", c6_kqs),
        ("KQS scaling to 128", c7_kqs_scaling),
        ("bound attainment", c8_bound),
        ("oracle agreement", c9_oracle),
        ("placement reproduction", c10_placement),
        ("mutation sensitivity", c11_mutations),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
