//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The entropy, bound, and absorption criteria are checked against
//! independent oracles implemented here, not against the library's own
//! code paths.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use varietylab_core::harness::rng::SplitMix64;
use varietylab_core::harness::{
    simulate_adaptive_regulator, RegulatorSimConfig, REGULATOR_SYSTEM_ID,
};
use varietylab_core::analysis::{blocking_deduction, classify_pair, dominance, SymmetryRegion};
use varietylab_core::partition::{absorption_events, partition};
use varietylab_core::regulator::{
    lrv_lower_bound, min_outcome_variety_bruteforce, outcome_distribution, table_class,
    OutcomeTable, RegulatorPolicy, TableClass,
};
use varietylab_core::system::{ClosedSystemPair, SystemSnapshot, Trace};
use varietylab_core::variety::{variety, Distribution, VarietyMode};
use varietylab::formats::{serialize_outcome_log, serialize_trace};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)+)),
        }
    };
}

fn criterion(
    number: u32,
    name: &str,
    time_limit: Option<Duration>,
    body: impl FnOnce() -> Result<(), String>,
) {
    let start = Instant::now();
    let mut result = body();
    let elapsed = start.elapsed();
    if let (Ok(()), Some(limit)) = (&result, time_limit) {
        if elapsed > limit {
            result = Err(format!("runtime {elapsed:?} exceeds the {limit:?} limit"));
        }
    }
    match &result {
        Ok(()) => println!("acceptance {number} ({name}): PASS [{elapsed:?}]"),
        Err(reason) => println!("acceptance {number} ({name}): FAIL [{elapsed:?}] {reason}"),
    }
    if let Err(reason) = result {
        panic!("acceptance {number} ({name}) failed: {reason}");
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// T(d, r) = (d - r) mod m with n disturbances, k responses, uniform D.
fn modular_table(n: usize, k: usize, m: usize) -> OutcomeTable {
    let outcomes = (0..n)
        .map(|d| (0..k).map(|r| format!("z{}", (d + m - r % m) % m)).collect())
        .collect();
    OutcomeTable::with_uniform_disturbances(labels("d", n), labels("r", k), outcomes).unwrap()
}

#[test]
fn criterion_01_entropy_oracle() {
    criterion(1, "entropy oracle", Some(Duration::from_secs(1)), || {
        let mut rng = SplitMix64::new(0xACCE5501);
        for case in 0..500 {
            let support = 1 + rng.next_below(16) as usize;
            let weights: Vec<f64> =
                (0..support).map(|_| rng.next_f64() + 1e-6).collect();
            let total: f64 = weights.iter().sum();
            let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            // independent direct-summation oracle on std's log2
            let expected: f64 =
                probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
            let dist = Distribution::new(labels("e", support), probs)
                .map_err(|e| format!("case {case}: {e}"))?;
            let got = variety(&dist);
            ensure!(
                (got - expected).abs() <= 1e-12,
                "case {case}: variety {got} vs oracle {expected}"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_02_bound_on_injective_tables() {
    criterion(2, "requisite-variety bound, gated classes", Some(Duration::from_secs(60)), || {
        let mut rng = SplitMix64::new(0xACCE5502);
        for case in 0..200 {
            let n_d = 2 + rng.next_below(5) as usize; // 2..=6
            let n_r = 1 + rng.next_below(4) as usize; // 1..=4
            // injective columns drawn from an alphabet with slack
            let alphabet = labels("z", n_d + 3);
            let mut outcomes = vec![vec![String::new(); n_r]; n_d];
            for r in 0..n_r {
                let mut pool: Vec<usize> = (0..alphabet.len()).collect();
                for (d, row) in outcomes.iter_mut().enumerate() {
                    let pick = d + rng.next_below((pool.len() - d) as u64) as usize;
                    pool.swap(d, pick);
                    row[r] = alphabet[pool[d]].clone();
                }
            }
            // random rational disturbance distribution
            let weights: Vec<u64> = (0..n_d).map(|_| 1 + rng.next_below(9)).collect();
            let total: u64 = weights.iter().sum();
            let probs: Vec<f64> = weights.iter().map(|&w| w as f64 / total as f64).collect();
            let dist = Distribution::new(labels("d", n_d), probs).unwrap();
            let table = OutcomeTable::new(labels("d", n_d), labels("r", n_r), outcomes, dist)
                .map_err(|e| format!("case {case}: {e}"))?;
            let class = table_class(&table);
            ensure!(
                matches!(class, TableClass::InjectivePerResponse | TableClass::LatinSquare),
                "case {case}: constructed table classed {class:?}"
            );
            let bound = lrv_lower_bound(&table);
            let (_, achieved) = min_outcome_variety_bruteforce(&table)
                .map_err(|e| format!("case {case}: {e}"))?;
            ensure!(
                achieved >= bound - 1e-9,
                "case {case}: achieved {achieved} below bound {bound}"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_03_modular_witness() {
    criterion(3, "modular table witness", Some(Duration::from_secs(1)), || {
        let table = modular_table(8, 4, 8);
        ensure!(table.policy_count() == 65_536, "policy space is {}", table.policy_count());
        let (optimal, bits) = min_outcome_variety_bruteforce(&table).map_err(|e| e.to_string())?;
        ensure!((bits - 1.0).abs() <= 1e-9, "achieved {bits}, expected 1.0");
        let bound = lrv_lower_bound(&table);
        ensure!((bits - bound).abs() <= 1e-9, "bound {bound} not attained with equality");
        // rho(d) = d mod 4 is among the minimizers
        let rho =
            RegulatorPolicy::from_assignments(&table, (0..8).map(|d| d % 4).collect()).unwrap();
        let rho_bits = variety(&outcome_distribution(&table, &rho).unwrap());
        ensure!((rho_bits - bits).abs() <= 1e-9, "rho(d)=d mod 4 achieves {rho_bits}");
        ensure!(
            optimal.assignments() == rho.assignments(),
            "lexicographic tie-break returned {:?}",
            optimal.assignments()
        );
        Ok(())
    });
}

#[test]
fn criterion_04_latin_squares() {
    criterion(4, "Latin squares attain the clamped bound", None, || {
        for n in 2..=5 {
            let table = modular_table(n, n, n);
            ensure!(
                table_class(&table) == TableClass::LatinSquare,
                "n={n} not classed latin_square"
            );
            let bound = lrv_lower_bound(&table);
            ensure!(bound == 0.0, "n={n}: clamped bound is {bound}");
            let (_, achieved) =
                min_outcome_variety_bruteforce(&table).map_err(|e| e.to_string())?;
            ensure!(achieved.abs() <= 1e-9, "n={n}: achieved {achieved}, expected 0.0");
        }
        Ok(())
    });
}

#[test]
fn criterion_05_partition_algebra() {
    criterion(5, "partition algebra", None, || {
        let mut rng = SplitMix64::new(0xACCE5505);
        let universe = labels("e", 10);
        let random_set = |rng: &mut SplitMix64| -> BTreeSet<String> {
            let mask = rng.next_below(1 << 10);
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, l)| l.clone())
                .collect()
        };
        for case in 0..1000 {
            let old_in = random_set(&mut rng);
            let old_out = random_set(&mut rng);
            let new_in = random_set(&mut rng);
            let new_out = random_set(&mut rng);
            let a = SystemSnapshot::new("S", 0, old_in.clone(), old_out.clone()).unwrap();
            let b = SystemSnapshot::new("S", 1, new_in.clone(), new_out.clone()).unwrap();
            let p = partition(&a, &b).map_err(|e| format!("case {case}: {e}"))?;
            for (old, new, core, peri, shed) in [
                (&old_in, &new_in, &p.core.input, &p.periphery.input, &p.shed.input),
                (&old_out, &new_out, &p.core.output, &p.periphery.output, &p.shed.output),
            ] {
                let union: BTreeSet<String> = core.union(peri).cloned().collect();
                ensure!(&union == new, "case {case}: core ∪ periphery != t' set");
                ensure!(core.is_disjoint(peri), "case {case}: core ∩ periphery nonempty");
                ensure!(
                    new.len() == core.len() + peri.len(),
                    "case {case}: |t' set| != |core| + |periphery|"
                );
                ensure!(
                    old.len() == core.len() + shed.len(),
                    "case {case}: |t set| != |core| + |shed|"
                );
            }
            let reflexive = partition(&b, &b).unwrap();
            ensure!(
                reflexive.periphery.is_empty() && reflexive.shed.is_empty(),
                "case {case}: partition(s, s) not reflexive"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_06_absorption_oracle() {
    criterion(6, "absorption oracle, exhaustive", Some(Duration::from_secs(10)), || {
        let universe = ["x", "y", "z"];
        let subsets: Vec<BTreeSet<String>> = (0u32..8)
            .map(|mask| {
                universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| l.to_string())
                    .collect()
            })
            .collect();
        // all 8^3 subset triples per component, crossed
        let mut checked = 0u64;
        for in0 in 0..8 {
            for in1 in 0..8 {
                for in2 in 0..8 {
                    for out0 in 0..8 {
                        for out1 in 0..8 {
                            for out2 in 0..8 {
                                let snaps = vec![
                                    SystemSnapshot::new(
                                        "S",
                                        0,
                                        subsets[in0].clone(),
                                        subsets[out0].clone(),
                                    )
                                    .unwrap(),
                                    SystemSnapshot::new(
                                        "S",
                                        1,
                                        subsets[in1].clone(),
                                        subsets[out1].clone(),
                                    )
                                    .unwrap(),
                                    SystemSnapshot::new(
                                        "S",
                                        2,
                                        subsets[in2].clone(),
                                        subsets[out2].clone(),
                                    )
                                    .unwrap(),
                                ];
                                // brute-force oracle: C^{t1,t2} ∩ P^{t0,t1},
                                // straight from the set definitions
                                let oracle = |s0: &BTreeSet<String>,
                                              s1: &BTreeSet<String>,
                                              s2: &BTreeSet<String>|
                                 -> BTreeSet<String> {
                                    let core12: BTreeSet<&String> = s1.intersection(s2).collect();
                                    s1.difference(s0)
                                        .filter(|e| core12.contains(e))
                                        .cloned()
                                        .collect()
                                };
                                let expected_in =
                                    oracle(&subsets[in0], &subsets[in1], &subsets[in2]);
                                let expected_out =
                                    oracle(&subsets[out0], &subsets[out1], &subsets[out2]);
                                let trace =
                                    Trace::from_snapshots(snaps, vec![], BTreeMap::new()).unwrap();
                                let events = absorption_events(&trace, "S").unwrap();
                                let (got_in, got_out) = match events.as_slice() {
                                    [] => (BTreeSet::new(), BTreeSet::new()),
                                    [event] => {
                                        (event.absorbed.input.clone(), event.absorbed.output.clone())
                                    }
                                    more => {
                                        return Err(format!(
                                            "{} events from a single interval pair",
                                            more.len()
                                        ))
                                    }
                                };
                                ensure!(
                                    got_in == expected_in && got_out == expected_out,
                                    "combo ({in0},{in1},{in2})x({out0},{out1},{out2}): \
                                     got {got_in:?}/{got_out:?}, oracle {expected_in:?}/{expected_out:?}"
                                );
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        ensure!(checked == 8u64.pow(6), "checked {checked} combinations");
        Ok(())
    });
}

#[test]
fn criterion_07_symmetry_exhaustive() {
    criterion(7, "symmetry classification, all nine cells", None, || {
        // core/periphery sizes realizing each dominance kind in uniform mode
        let shapes = [(4usize, 1usize), (2, 2), (1, 4)]; // core-, balanced, periphery-dominant
        let partition_with = |id: &str, core: usize, periphery: usize| {
            let old: BTreeSet<String> = (0..core).map(|i| format!("c{i}")).collect();
            let mut new = old.clone();
            new.extend((0..periphery).map(|i| format!("p{i}")));
            let a = SystemSnapshot::new(id, 0, old, BTreeSet::new()).unwrap();
            let b = SystemSnapshot::new(id, 1, new, BTreeSet::new()).unwrap();
            partition(&a, &b).unwrap()
        };
        for (si, &(sys_core, sys_peri)) in shapes.iter().enumerate() {
            for (ei, &(env_core, env_peri)) in shapes.iter().enumerate() {
                let sys = dominance(
                    &partition_with("S", sys_core, sys_peri),
                    VarietyMode::Uniform,
                    None,
                )
                .unwrap();
                let env = dominance(
                    &partition_with("E", env_core, env_peri),
                    VarietyMode::Uniform,
                    None,
                )
                .unwrap();
                let cell = classify_pair(&sys, &env).map_err(|e| e.to_string())?;
                // shapes are ordered core-dominant, balanced,
                // periphery-dominant: larger index = more peripheral
                let expected = match si.cmp(&ei) {
                    std::cmp::Ordering::Greater => SymmetryRegion::SystemMorePeripheral,
                    std::cmp::Ordering::Equal => SymmetryRegion::Symmetric,
                    std::cmp::Ordering::Less => SymmetryRegion::SystemMoreCoreDominant,
                };
                ensure!(
                    cell.region == expected,
                    "cell ({si},{ei}): got {:?}, expected {expected:?}",
                    cell.region
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_08_blocking_rule() {
    criterion(8, "blocking rule and premise flips", None, || {
        let fixture = |core_outputs: usize, env_core_inputs: usize| {
            let sys_out: BTreeSet<String> =
                (0..core_outputs).map(|i| format!("y{i}")).collect();
            let sys = partition(
                &SystemSnapshot::new("S", 0, BTreeSet::new(), sys_out.clone()).unwrap(),
                &SystemSnapshot::new("S", 1, BTreeSet::new(), sys_out).unwrap(),
            )
            .unwrap();
            let env_in: BTreeSet<String> =
                (0..env_core_inputs).map(|i| format!("x{i}")).collect();
            let env = partition(
                &SystemSnapshot::new("E", 0, env_in.clone(), BTreeSet::new()).unwrap(),
                &SystemSnapshot::new("E", 1, env_in, BTreeSet::new()).unwrap(),
            )
            .unwrap();
            (sys, env, ClosedSystemPair::new("S", "E"))
        };
        // positive case: stable, 3.0 bits of exogenous core input vs 2.0
        // bits of core output
        let (sys, env, pair) = fixture(4, 8);
        let report = blocking_deduction(&sys, &env, &pair, true).map_err(|e| e.to_string())?;
        ensure!(
            report.conclusion.as_str() == "periphery_participates",
            "positive case concluded {:?}",
            report.conclusion
        );
        // flip stability
        let report = blocking_deduction(&sys, &env, &pair, false).unwrap();
        ensure!(
            report.conclusion.as_str() == "inconclusive",
            "unstable case concluded {:?}",
            report.conclusion
        );
        // flip the inequality
        let (sys, env, pair) = fixture(8, 4);
        let report = blocking_deduction(&sys, &env, &pair, true).unwrap();
        ensure!(
            report.conclusion.as_str() == "inconclusive",
            "reversed case concluded {:?}",
            report.conclusion
        );
        Ok(())
    });
}

#[test]
fn criterion_09_end_to_end_simulation() {
    criterion(9, "adaptive-regulator simulation end to end", None, || {
        let game = modular_table(4, 4, 4);
        ensure!(table_class(&game) == TableClass::LatinSquare, "game is not a Latin square");
        let config = RegulatorSimConfig::new(42, 200, 50, game).unwrap();
        let (trace, log) = simulate_adaptive_regulator(&config);

        // final interval: no churn on the policy labels
        let snaps = trace.snapshots(REGULATOR_SYSTEM_ID).unwrap();
        let last = partition(&snaps[snaps.len() - 2], &snaps[snaps.len() - 1]).unwrap();
        let churning: Vec<&String> =
            last.periphery.output.iter().filter(|l| l.starts_with("policy:")).collect();
        ensure!(churning.is_empty(), "policy labels still peripheral: {churning:?}");
        let shed: Vec<&String> =
            last.shed.output.iter().filter(|l| l.starts_with("policy:")).collect();
        ensure!(shed.is_empty(), "policy labels shed on the final interval: {shed:?}");

        // every converged policy label was absorbed periphery -> core
        let final_policy: Vec<&String> = snaps
            .last()
            .unwrap()
            .outputs
            .iter()
            .filter(|l| l.starts_with("policy:"))
            .collect();
        ensure!(final_policy.len() == 4, "expected 4 learned entries, saw {final_policy:?}");
        let events = absorption_events(&trace, REGULATOR_SYSTEM_ID).unwrap();
        for label in &final_policy {
            ensure!(
                events.iter().any(|e| e.absorbed.output.contains(*label)),
                "{label} was never absorbed into the core"
            );
        }

        // post-convergence empirical outcome variety is zero
        let final_interval_start = snaps[snaps.len() - 2].t;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for record in log.iter().filter(|r| r.step > final_interval_start) {
            *counts.entry(record.outcome.clone()).or_insert(0) += 1;
        }
        ensure!(!counts.is_empty(), "no post-convergence observations");
        let bits =
            variety(&varietylab_core::variety::empirical_distribution(&counts).unwrap());
        ensure!(bits.abs() <= 1e-9, "post-convergence outcome variety {bits}");

        // byte-identical re-run
        let (trace2, log2) = simulate_adaptive_regulator(&config);
        ensure!(
            serialize_trace(&trace) == serialize_trace(&trace2),
            "serialized traces differ between runs"
        );
        ensure!(
            serialize_outcome_log(&log) == serialize_outcome_log(&log2),
            "serialized outcome logs differ between runs"
        );
        Ok(())
    });
}

#[test]
fn criterion_10_cli_determinism_and_exit_codes() {
    criterion(10, "CLI determinism and exit codes", None, || {
        use std::process::Command;

        let bin = env!("CARGO_BIN_EXE_varietylab");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let fixture = |name: &str| {
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
        };
        let trace = fixture("trace_basic.jsonl");
        let modular = fixture("modular8x4.json");
        let latin = fixture("latin4.json");
        let sim_trace = dir.path().join("sim.jsonl");
        let sim_log = dir.path().join("sim_log.jsonl");

        let str_of = |p: &std::path::Path| p.to_str().unwrap().to_string();
        let commands: Vec<Vec<String>> = vec![
            vec!["variety".into(), "--counts".into(), "a=2,b=1,c=1".into()],
            vec![
                "variety".into(),
                "--counts".into(),
                "a=2,b=1,c=1".into(),
                "--mode".into(),
                "empirical".into(),
            ],
            vec![
                "partition".into(),
                "--trace".into(),
                str_of(&trace),
                "--system".into(),
                "S".into(),
                "--from".into(),
                "0".into(),
                "--to".into(),
                "1".into(),
            ],
            vec![
                "dynamics".into(),
                "--trace".into(),
                str_of(&trace),
                "--system".into(),
                "S".into(),
            ],
            vec!["lrv".into(), "verify".into(), "--table".into(), str_of(&modular)],
            vec![
                "regulator".into(),
                "synth".into(),
                "--table".into(),
                str_of(&modular),
                "--method".into(),
                "brute".into(),
            ],
            vec![
                "regulator".into(),
                "synth".into(),
                "--table".into(),
                str_of(&modular),
                "--method".into(),
                "greedy".into(),
            ],
            vec![
                "simulate".into(),
                "regulator".into(),
                "--table".into(),
                str_of(&latin),
                "--seed".into(),
                "42".into(),
                "--steps".into(),
                "200".into(),
                "--cadence".into(),
                "50".into(),
                "--out".into(),
                str_of(&sim_trace),
                "--outcome-log".into(),
                str_of(&sim_log),
            ],
            vec![
                "simulate".into(),
                "drift".into(),
                "--seed".into(),
                "7".into(),
                "--steps".into(),
                "40".into(),
                "--cadence".into(),
                "10".into(),
                "--drift-rate".into(),
                "0.25".into(),
                "--alphabet".into(),
                "8".into(),
                "--out".into(),
                str_of(&dir.path().join("drift.jsonl")),
            ],
            // classify and deduce consume the simulated artifacts
            vec![
                "classify".into(),
                "--trace".into(),
                str_of(&sim_trace),
                "--system".into(),
                "regulator".into(),
                "--environment".into(),
                "environment".into(),
                "--from".into(),
                "150".into(),
                "--to".into(),
                "200".into(),
            ],
            vec![
                "deduce".into(),
                "--trace".into(),
                str_of(&sim_trace),
                "--system".into(),
                "regulator".into(),
                "--environment".into(),
                "environment".into(),
                "--from".into(),
                "150".into(),
                "--to".into(),
                "200".into(),
                "--table".into(),
                str_of(&latin),
                "--outcomes".into(),
                str_of(&sim_log),
            ],
        ];

        for args in &commands {
            let run = || {
                Command::new(bin)
                    .args(args)
                    .output()
                    .map_err(|e| format!("spawning {args:?}: {e}"))
            };
            let first = run()?;
            ensure!(
                first.status.code() == Some(0),
                "{args:?} exited {:?}: {}",
                first.status.code(),
                String::from_utf8_lossy(&first.stderr)
            );
            let second = run()?;
            ensure!(
                first.stdout == second.stdout,
                "{args:?} produced different bytes across runs"
            );
            let report: serde_json::Value = serde_json::from_slice(&first.stdout)
                .map_err(|e| format!("{args:?} stdout is not JSON: {e}"))?;
            let manifest = report
                .get("manifest")
                .ok_or_else(|| format!("{args:?} report lacks a manifest"))?;
            ensure!(
                manifest.get("command").is_some() && manifest.get("version").is_some(),
                "{args:?} manifest is incomplete"
            );
        }

        // exit 1: validation failure, printed as the module error code
        let bad = Command::new(bin)
            .args(["partition", "--trace"])
            .arg(&trace)
            .args(["--system", "missing", "--from", "0", "--to", "1"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(bad.status.code() == Some(1), "unknown system exited {:?}", bad.status.code());
        ensure!(
            String::from_utf8_lossy(&bad.stderr).contains("unknown-system"),
            "stderr does not name the error: {}",
            String::from_utf8_lossy(&bad.stderr)
        );

        // exit 1: the search budget contract, via the environment override
        let over = Command::new(bin)
            .env("VARIETYLAB_BUDGET", "10")
            .args(["regulator", "synth", "--method", "brute", "--table"])
            .arg(&modular)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(over.status.code() == Some(1), "budget overrun exited {:?}", over.status.code());
        ensure!(
            String::from_utf8_lossy(&over.stderr).contains("search-budget"),
            "stderr does not name search-budget: {}",
            String::from_utf8_lossy(&over.stderr)
        );

        // exit 2: usage errors on stderr
        let usage = Command::new(bin).arg("frobnicate").output().map_err(|e| e.to_string())?;
        ensure!(usage.status.code() == Some(2), "usage error exited {:?}", usage.status.code());
        ensure!(!usage.stderr.is_empty(), "usage text missing from stderr");
        let missing_flag =
            Command::new(bin).args(["partition"]).output().map_err(|e| e.to_string())?;
        ensure!(
            missing_flag.status.code() == Some(2),
            "missing flags exited {:?}",
            missing_flag.status.code()
        );
        Ok(())
    });
}
