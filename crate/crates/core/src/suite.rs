//! Seeded verification suites over a given datum or over random data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{
    bridge_verdict, build_and_verify_les, euler_additivity_check, find_left_visibility,
    find_right_visibility,
};
use crate::cxcore::Degree;
use crate::models::{gen_random, random_triangle, semisimple_oracle, trial_seed, GeneratorSpec};
use crate::mtt::MTTDatum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Les,
    Visibility,
    Bridge,
    Euler,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Les,
        Suite::Visibility,
        Suite::Bridge,
        Suite::Euler,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Les => "les",
            Suite::Visibility => "visibility",
            Suite::Bridge => "bridge",
            Suite::Euler => "euler",
            Suite::Oracle => "oracle",
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse_selector(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().find(|x| x.name() == s).map(|&x| vec![x])
    }
}

/// Caps for the random triangles fed to the sequence and Euler suites.
pub const TRIANGLE_MAX_DIM: usize = 5;
pub const TRIANGLE_LO: Degree = -3;
pub const TRIANGLE_HI: Degree = 3;

/// Random data used by the suites. The sequence suites use thinner kernels
/// because they transport whole triangles.
pub fn random_spec(suite: Suite) -> GeneratorSpec {
    let base = GeneratorSpec::default();
    match suite {
        Suite::Les | Suite::Euler => GeneratorSpec {
            kernel_max_dim: 1,
            ..base
        },
        _ => base,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub source: String,
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteOutcome>,
    pub all_passed: bool,
}

fn outcome(suite: Suite, results: Vec<Result<(), String>>) -> SuiteOutcome {
    let failures: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    SuiteOutcome {
        suite,
        trials: results.len(),
        passed: results.len() - failures.len(),
        failed: failures.len(),
        failures,
    }
}

/// Transports a random triangle through a random channel and checks the long
/// exact sequence against the target probe.
pub fn les_trial(d: &MTTDatum, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let r = d.node_count();
    let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
    let t = random_triangle(rng, TRIANGLE_MAX_DIM, TRIANGLE_LO, TRIANGLE_HI);
    let rec = build_and_verify_les(d, i, j, &t, &d.probes[j]).map_err(|e| e.to_string())?;
    match rec.first_inexact() {
        None => Ok(()),
        Some(s) => Err(format!(
            "channel ({}, {}): sequence not exact at degree {} ({:?})",
            i + 1,
            j + 1,
            s.degree,
            s.slot
        )),
    }
}

pub fn euler_trial(d: &MTTDatum, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let r = d.node_count();
    let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
    let t = random_triangle(rng, TRIANGLE_MAX_DIM, TRIANGLE_LO, TRIANGLE_HI);
    match euler_additivity_check(d, i, j, &t, &d.probes[j]) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("channel ({}, {}): Euler characteristics do not add", i + 1, j + 1)),
        Err(e) => Err(e.to_string()),
    }
}

/// Pipeline against the semisimple oracle on every channel.
pub fn oracle_check(d: &MTTDatum) -> Result<(), String> {
    let r = d.node_count();
    for i in 0..r {
        for j in 0..r {
            let p = d.interaction_polynomial(i, j).map_err(|e| e.to_string())?;
            let o = semisimple_oracle(d, i, j).map_err(|e| e.to_string())?;
            if p != o {
                return Err(format!("channel ({}, {}): pipeline {p}, oracle {o}", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

/// Right witnesses are sound and complete in degree 0 on every channel;
/// left witnesses, when found, are valid.
pub fn visibility_check(d: &MTTDatum) -> Result<(), String> {
    let r = d.node_count();
    for i in 0..r {
        for j in 0..r {
            let x = d.transported_probe(i, j).map_err(|e| e.to_string())?;
            let l = &d.probes[j];
            let p = d.interaction_polynomial(i, j).map_err(|e| e.to_string())?;
            let right = find_right_visibility(&x, l);
            let tag = format!("channel ({}, {})", i + 1, j + 1);
            if let Some(w) = &right {
                if !w.verify() {
                    return Err(format!("{tag}: invalid right witness"));
                }
                if p.is_zero() {
                    return Err(format!("{tag}: right witness but P = 0"));
                }
            }
            if p.coeff(0) != 0 && right.is_none() {
                return Err(format!("{tag}: q^0 coefficient {} but no right witness", p.coeff(0)));
            }
            if let Some(w) = find_left_visibility(l, &x) {
                if !w.verify() {
                    return Err(format!("{tag}: invalid left witness"));
                }
            }
        }
    }
    Ok(())
}

pub fn bridge_check(d: &MTTDatum) -> Result<(), String> {
    for rep in bridge_verdict(d) {
        let tag = format!("channel ({}, {})", rep.i, rep.j);
        if rep.h_nonzero == rep.p.is_zero() {
            return Err(format!("{tag}: H_nonzero disagrees with P"));
        }
        if !rep.bridge_consistent {
            return Err(format!("{tag}: supported, hypotheses hold, but P = 0"));
        }
    }
    Ok(())
}

fn datum_trial(suite: Suite, d: &MTTDatum, rng: &mut ChaCha8Rng) -> Result<(), String> {
    match suite {
        Suite::Les => les_trial(d, rng),
        Suite::Euler => euler_trial(d, rng),
        Suite::Oracle => oracle_check(d),
        Suite::Visibility => visibility_check(d),
        Suite::Bridge => bridge_check(d),
    }
}

/// Every trial draws a fresh random datum.
pub fn verify_random(suites: &[Suite], seed: u64, trials: usize) -> VerifyReport {
    let outcomes = suites
        .iter()
        .map(|&suite| {
            let spec = random_spec(suite);
            let results = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let s = trial_seed(seed, t);
                    let d = gen_random(&spec.with_seed(s))
                        .map_err(|e| format!("trial {t}: generator: {e}"))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5EED);
                    datum_trial(suite, &d, &mut rng).map_err(|e| format!("trial {t}: {e}"))
                })
                .collect();
            outcome(suite, results)
        })
        .collect();
    finish("random".into(), seed, trials, outcomes)
}

/// Checks one datum. Triangle suites draw `trials` random triangles; the
/// datum-level suites run once over all channels.
pub fn verify_datum(d: &MTTDatum, source: &str, suites: &[Suite], seed: u64, trials: usize) -> VerifyReport {
    let outcomes = suites
        .iter()
        .map(|&suite| {
            let results = match suite {
                Suite::Les | Suite::Euler => (0..trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, t));
                        datum_trial(suite, d, &mut rng).map_err(|e| format!("trial {t}: {e}"))
                    })
                    .collect(),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    vec![datum_trial(suite, d, &mut rng)]
                }
            };
            outcome(suite, results)
        })
        .collect();
    finish(source.to_string(), seed, trials, outcomes)
}

fn finish(source: String, seed: u64, trials: usize, suites: Vec<SuiteOutcome>) -> VerifyReport {
    let all_passed = suites.iter().all(|s| s.failed == 0);
    VerifyReport {
        source,
        seed,
        trials,
        suites,
        all_passed,
    }
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "# verify: {} (seed {}, trials {})\n\n| suite | trials | passed | failed |\n|---|---|---|---|\n",
            self.source, self.seed, self.trials
        );
        for s in &self.suites {
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                s.suite.name(),
                s.trials,
                s.passed,
                s.failed
            ));
        }
        for s in &self.suites {
            for f in &s.failures {
                out.push_str(&format!("\n- {}: {f}", s.suite.name()));
            }
        }
        out.push_str(if self.all_passed { "\nall passed\n" } else { "\nFAILED\n" });
        out
    }
}
