//! Acceptance criteria. Prints one line per criterion and exits nonzero if
//! any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mtt_core::checks::{bridge_verdict, build_and_verify_les};
use mtt_core::cxcore::Degree;
use mtt_core::homcx::{poincare, LaurentPoly};
use mtt_core::models::{
    demo, gen_random, random_chain_map, random_complex, random_triangle, trial_seed, DemoParams,
};
use mtt_core::suite::{
    oracle_check, random_spec, visibility_check, Suite, TRIANGLE_HI, TRIANGLE_LO, TRIANGLE_MAX_DIM,
};
use mtt_core::transport::{certify_exactness, TransportKernel};

const SEED: u64 = 20_261_016;

type Outcome = Result<(), String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single(name: &str, params: &DemoParams) -> mtt_core::mtt::MTTDatum {
    let mut data = demo(name, params).expect("demo builds");
    assert_eq!(data.len(), 1);
    data.pop().unwrap()
}

fn closed_forms() -> Outcome {
    for (d, m0) in [(1usize, 0), (3, 2), (2, -1)] {
        let datum = single("single-degree", &DemoParams { d, m0, ..Default::default() });
        let p = datum.interaction_polynomial(0, 1).map_err(|e| e.to_string())?;
        let want = LaurentPoly::monomial(d as i64, m0);
        ensure(p == want, || format!("single-degree ({d}, {m0}): P = {p}, want {want}"))?;
        ensure(p.w_tot() == d as i64, || format!("single-degree ({d}, {m0}): w_tot = {}", p.w_tot()))?;
        let chi = if m0.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) };
        ensure(p.w_chi() == chi, || format!("single-degree ({d}, {m0}): w_chi = {}", p.w_chi()))?;
    }
    for (a, b, m) in [(1usize, 1usize, 0), (1, 2, -1)] {
        let datum = single("two-degree", &DemoParams { a, b, m, ..Default::default() });
        let p = datum.interaction_polynomial(0, 1).map_err(|e| e.to_string())?;
        let want = LaurentPoly::from_coeffs([(m, a as i64), (m + 1, b as i64)]);
        ensure(p == want, || format!("two-degree ({a}, {b}, {m}): P = {p}, want {want}"))?;
        ensure(p.w_tot() == (a + b) as i64, || format!("two-degree: w_tot = {}", p.w_tot()))?;
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        ensure(p.w_chi() == sign * (a as i64 - b as i64), || {
            format!("two-degree: w_chi = {}", p.w_chi())
        })?;
    }
    Ok(())
}

fn les_suite() -> Outcome {
    let spec = random_spec(Suite::Les);
    ensure(spec.nodes == 2, || "suite data must have two nodes".into())?;
    ensure(TRIANGLE_MAX_DIM == 5 && TRIANGLE_LO == -3 && TRIANGLE_HI == 3, || {
        "triangle caps changed".into()
    })?;
    for t in 0..200u64 {
        let s = trial_seed(SEED, t);
        let d = gen_random(&spec.with_seed(s)).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let tri = random_triangle(&mut rng, TRIANGLE_MAX_DIM, TRIANGLE_LO, TRIANGLE_HI);
        let (i, j) = ((t % 2) as usize, ((t / 2) % 2) as usize);
        let rec = build_and_verify_les(&d, i, j, &tri, &d.probes[j]).map_err(|e| format!("trial {t}: {e}"))?;
        if let Some(s) = rec.first_inexact() {
            return Err(format!("trial {t}: not exact at degree {} ({:?})", s.degree, s.slot));
        }
    }
    Ok(())
}

fn transport_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for t in 0..200 {
        let k = TransportKernel::new(random_complex(&mut rng, 2, -1, 1), "K", "a", "b");
        let x = random_complex(&mut rng, 3, -2, 2);
        let y = random_complex(&mut rng, 3, -2, 2);
        let f = random_chain_map(&mut rng, &x, &y);
        let cert = certify_exactness(&k, &f);
        ensure(cert.chain_map_ok, || format!("pair {t}: not a chain map at {:?}", cert.first_failure))?;
        ensure(cert.invertible, || format!("pair {t}: not an isomorphism"))?;
    }
    Ok(())
}

fn random_data(suite: Suite, n: u64) -> impl Iterator<Item = (u64, mtt_core::mtt::MTTDatum)> {
    let spec = random_spec(suite);
    (0..n).map(move |t| {
        let d = gen_random(&spec.with_seed(trial_seed(SEED, t))).expect("generator");
        (t, d)
    })
}

fn oracle_equivalence() -> Outcome {
    for (t, d) in random_data(Suite::Oracle, 100) {
        oracle_check(&d).map_err(|e| format!("datum {t}: {e}"))?;
    }
    Ok(())
}

fn visibility() -> Outcome {
    for (t, d) in random_data(Suite::Visibility, 100) {
        visibility_check(&d).map_err(|e| format!("datum {t}: {e}"))?;
    }
    Ok(())
}

fn bridge() -> Outcome {
    let d = single("bridge", &DemoParams::default());
    let reports = bridge_verdict(&d);
    ensure(reports.iter().any(|r| r.supported), || "bridge demo has no supported channel".into())?;
    for r in reports.iter().filter(|r| r.supported) {
        let tag = format!("bridge demo channel ({}, {})", r.i, r.j);
        ensure(r.content_holds(), || format!("{tag}: content check fails"))?;
        ensure(r.detector_holds_at_probe, || format!("{tag}: detector check fails"))?;
        ensure(!r.p.is_zero(), || format!("{tag}: P = 0"))?;
    }
    for (t, d) in random_data(Suite::Bridge, 100) {
        for r in bridge_verdict(&d) {
            ensure(r.bridge_consistent, || format!("datum {t} channel ({}, {}): inconsistent", r.i, r.j))?;
        }
    }
    Ok(())
}

fn directedness() -> Outcome {
    let d = single("directedness", &DemoParams::default());
    let p12 = d.interaction_polynomial(0, 1).map_err(|e| e.to_string())?;
    let p21 = d.interaction_polynomial(1, 0).map_err(|e| e.to_string())?;
    ensure(!p12.is_zero() && !p21.is_zero(), || format!("P_12 = {p12}, P_21 = {p21}"))?;
    ensure(p12 != p21, || format!("P_12 = P_21 = {p12}"))
}

fn obstruction() -> Outcome {
    let data = demo("obstruction", &DemoParams::default()).map_err(|e| e.to_string())?;
    ensure(data.len() == 2, || "expected two data".into())?;
    let (a, b) = (&data[0], &data[1]);
    ensure(a.probes == b.probes, || "probes differ".into())?;
    ensure(a.shadow_objects == b.shadow_objects, || "shadow objects differ".into())?;
    ensure(a.shadow_kernels == b.shadow_kernels, || "shadow kernels differ".into())?;
    ensure(a.support == b.support, || "support differs".into())?;
    ensure(a.inherited_package().state == b.inherited_package().state, || "states differ".into())?;
    let (pa, pb) = (
        a.interaction_polynomial(0, 1).map_err(|e| e.to_string())?,
        b.interaction_polynomial(0, 1).map_err(|e| e.to_string())?,
    );
    ensure(pa != pb, || format!("P_12 agrees: {pa}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("obstruction.json");
    let out = Command::new(env!("CARGO_BIN_EXE_mtt-lab"))
        .args(["demo", "obstruction", "-o"])
        .arg(&first)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let out = Command::new(env!("CARGO_BIN_EXE_mtt-lab"))
        .arg("report")
        .arg(&first)
        .arg("--against")
        .arg(dir.path().join("obstruction.alt.json"))
        .args(["--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let diff = report["comparison"].as_array().cloned().unwrap_or_default();
    ensure(diff.len() == 1, || format!("expected one discrepancy, got {diff:?}"))?;
    let row = &diff[0];
    ensure(row["item"] == "channel (1, 2) P", || format!("unexpected item {row}"))?;
    ensure(row["left"] == pa.to_string() && row["right"] == pb.to_string(), || {
        format!("diff shows {row}, expected {pa} vs {pb}")
    })
}

fn shift_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    for t in 0..50 {
        let x = random_complex(&mut rng, 3, -2, 2);
        let y = random_complex(&mut rng, 3, -2, 2);
        let base = poincare(&x, &y);
        for k in -2..=2 as Degree {
            let p = poincare(&x.shift(k), &y);
            ensure(p == base.shift(k), || format!("pair {t}, k = {k}: {p} vs {}", base.shift(k)))?;
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mtt-lab"))
            .args(["verify", "--random", "--suite", "all", "--seed", "7", "--trials", "100"])
            .output()
    };
    let a = run().map_err(|e| e.to_string())?;
    let b = run().map_err(|e| e.to_string())?;
    ensure(a.status.code() == Some(0), || format!("first run exited with {:?}", a.status.code()))?;
    ensure(!a.stdout.is_empty(), || "empty report".into())?;
    ensure(a.stdout == b.stdout, || "reports differ".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed forms", 1, closed_forms),
        ("long exact sequences", 30, les_suite),
        ("transport exactness", 30, transport_exactness),
        ("oracle equivalence", 30, oracle_equivalence),
        ("visibility", 20, visibility),
        ("bridge", 20, bridge),
        ("directedness", 1, directedness),
        ("obstruction demo", 5, obstruction),
        ("shift identity", 10, shift_identity),
        ("determinism", u64::MAX, determinism),
    ];
    let mut failed = 0;
    for (n, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|()| {
                let took = start.elapsed();
                ensure(took < Duration::from_secs(*budget), || {
                    format!("took {:.2}s, budget {budget}s", took.as_secs_f64())
                })
            });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2} {name}: pass ({secs:.2}s)", n + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.2}s): {e}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
