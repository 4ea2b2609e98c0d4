//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `LATNC_ACCEPTANCE_ONLY=1,3,9` runs a subset. A failed criterion is
//! reported but only turns into a non-zero exit code when
//! `LATNC_ACCEPTANCE_STRICT` is set; errors inside the harness always do.

use std::time::{Duration, Instant};

use anyhow::{anyhow, ensure, Result};
use latnc::{parse_config, read_csv, render, run_experiment, Format, ResultRow};
use latnc_core::bicm::{
    apply_side_info, distance_gain_db, make_interleaver, ra_encode, BitMetricPair, RaCode,
};
use latnc_core::ldlc::{
    build_mapping, build_parity, check_latin_square, degree_seven_sequence, m_algorithm,
    network_combine, network_encode_shape, recover_message, unshaped_power, BpConfig, BpDecoder,
};
use latnc_core::nested::shaping_gain_1d;
use latnc_core::{Constellation, ErrorStats, Lattice, LdlcCode, RateDiverseMapping, User};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Result<Verdict>,
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "side-information identity",
            limit: secs(10),
            check: identity,
        },
        Criterion {
            id: 2,
            name: "1-D shaping closed forms",
            limit: secs(1),
            check: closed_forms,
        },
        Criterion {
            id: 3,
            name: "Latin-square construction",
            limit: secs(1),
            check: latin_square,
        },
        Criterion {
            id: 4,
            name: "M-algorithm vs exhaustive search",
            limit: secs(30),
            check: m_algorithm_oracle,
        },
        Criterion {
            id: 5,
            name: "LDLC RD-WNC vs single-user SER",
            limit: secs(30 * 60),
            check: ldlc_equivalence,
        },
        Criterion {
            id: 6,
            name: "LDLC shaped power reduction",
            limit: secs(10 * 60),
            check: shaped_power,
        },
        Criterion {
            id: 7,
            name: "BICM RD-WCN vs single-user BER",
            limit: secs(15 * 60),
            check: bicm_equivalence,
        },
        Criterion {
            id: 8,
            name: "RA rate-1/4 vs rate-1/2 gap",
            limit: secs(20 * 60),
            check: ra_gap,
        },
        Criterion {
            id: 9,
            name: "modulation gain constant",
            limit: secs(1),
            check: modulation_gain,
        },
        Criterion {
            id: 10,
            name: "property suites",
            limit: secs(5 * 60),
            check: properties,
        },
    ];
    let only: Option<Vec<u32>> = std::env::var("LATNC_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let strict = std::env::var_os("LATNC_ACCEPTANCE_STRICT").is_some();

    let (mut passed, mut failed, mut broken) = (0, 0, 0);
    for c in criteria
        .iter()
        .filter(|c| only.as_ref().map_or(true, |o| o.contains(&c.id)))
    {
        eprintln!("running criterion {}: {}", c.id, c.name);
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let timing = format!(
            "{:.1} s, limit {} s",
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        match outcome {
            Ok(v) => {
                let pass = v.pass && elapsed <= c.limit;
                let tag = if pass { "PASS" } else { "FAIL" };
                println!("[{tag}] {:>2} {}: {} ({timing})", c.id, c.name, v.detail);
                if pass {
                    passed += 1;
                } else {
                    failed += 1;
                }
            }
            Err(e) => {
                println!(
                    "[FAIL] {:>2} {}: harness error: {e:#} ({timing})",
                    c.id, c.name
                );
                broken += 1;
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed, {broken} errored");
    if broken > 0 || (strict && failed > 0) {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn run(text: &str) -> Result<Vec<ResultRow>> {
    Ok(run_experiment(&parse_config(text)?)?)
}

fn overlaps(a: &ResultRow, b: &ResultRow) -> bool {
    a.ci95_low <= b.ci95_high && b.ci95_low <= a.ci95_high
}

/// Pairs every `scheme` row with the baseline row at the same user and SNR.
fn paired<'a>(
    rows: &'a [ResultRow],
    scheme: &str,
    baseline: &str,
) -> Result<Vec<(&'a ResultRow, &'a ResultRow)>> {
    rows.iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| {
            rows.iter()
                .find(|b| b.scheme == baseline && b.user == r.user && b.snr_db == r.snr_db)
                .map(|b| (r, b))
                .ok_or_else(|| anyhow!("no {baseline} row for user {} at {} dB", r.user, r.snr_db))
        })
        .collect()
}

fn describe_pairs(pairs: &[(&ResultRow, &ResultRow)]) -> String {
    pairs
        .iter()
        .map(|(r, b)| {
            format!(
                "{} {:.2} dB {:.2e} [{:.1e}, {:.1e}] vs {:.2e} [{:.1e}, {:.1e}]",
                r.user,
                r.snr_db,
                r.error_rate,
                r.ci95_low,
                r.ci95_high,
                b.error_rate,
                b.ci95_low,
                b.ci95_high
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn identity() -> Result<Verdict> {
    let mut draws = 0;
    let mut mismatches = 0;
    for lattice in ["1d", "hexagonal"] {
        let rows = run(&format!(
            r#"{{"scheme":"lattice-identity","lattice":"{lattice}","snr_sweep_db":[0,10],
                "trials":5000,"min_errors":0,"seed":41}}"#
        ))?;
        ensure!(rows.len() == 4, "expected 4 rows, got {}", rows.len());
        draws += rows.iter().map(|r| r.trials).sum::<u64>();
        mismatches += rows.iter().map(|r| r.errors).sum::<u64>();
    }
    verdict(
        mismatches == 0 && draws >= 20_000,
        format!("{mismatches} mismatches in {draws} draws, 1-D and hexagonal"),
    )
}

fn closed_forms() -> Result<Verdict> {
    let mut bad = Vec::new();
    for l in (2..=64i64).step_by(2) {
        // exact rational comparison: 3 * sum(x^2) == closed form * count
        let c_a: Vec<i64> = (-l..=l).collect();
        let c_b: Vec<i64> = (-l..=l).step_by(2).collect();
        let sum_sq = |v: &[i64]| v.iter().map(|x| x * x).sum::<i64>();
        let mut nc = Vec::new();
        for a in &c_a {
            for b in &c_b {
                nc.push((a + b + l).rem_euclid(2 * l + 1) - l);
            }
        }
        let exact = 3 * sum_sq(&c_a) == l * (l + 1) * c_a.len() as i64
            && 3 * sum_sq(&c_b) == l * (l + 2) * c_b.len() as i64
            && 3 * sum_sq(&nc) == l * (l + 1) * nc.len() as i64;
        let g = shaping_gain_1d(l)?;
        let lf = l as f64;
        let library = g.power_a == lf * (lf + 1.0) / 3.0
            && g.power_b == lf * (lf + 2.0) / 3.0
            && g.power_nc == g.power_a
            && (g.power_nc_enumerated - sum_sq(&nc) as f64 / nc.len() as f64).abs() < 1e-12
            && (g.gain_db - 10.0 * ((lf + 2.0) / (lf + 1.0)).log10()).abs() < 1e-12;
        if !(exact && library) {
            bad.push(l);
        }
    }
    let gain4 = shaping_gain_1d(4)?.gain_db;
    let pass = bad.is_empty()
        && (gain4 - 10.0 * 1.2f64.log10()).abs() < 1e-12
        && (gain4 - 0.792).abs() < 5e-4;
    verdict(
        pass,
        format!("L = 2..64 even, mismatching L: {bad:?}; gain(L = 4) = {gain4:.5} dB"),
    )
}

const PRINTED: [[f64; 6]; 6] = [
    [0.0, -0.8, 0.0, -0.5, 1.0, 0.0],
    [0.8, 0.0, 0.0, 1.0, 0.0, -0.5],
    [0.0, 0.5, 1.0, 0.0, 0.8, 0.0],
    [0.0, 0.0, -0.5, -0.8, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0, 0.5, 0.8],
    [0.5, -1.0, -0.8, 0.0, 0.0, 0.0],
];

/// Every row and column holds the sequence magnitudes, up to one common scale.
fn latin_oracle(rows: &[Vec<f64>], sequence: &[f64]) -> bool {
    let n = rows.len();
    let peak = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let top = sequence.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || rows.iter().any(|r| r.len() != n) {
        return false;
    }
    let mut want: Vec<f64> = sequence.iter().map(|v| v.abs() / top).collect();
    want.sort_by(f64::total_cmp);
    let matches = |line: Vec<f64>| {
        let mut got: Vec<f64> = line
            .into_iter()
            .filter(|v| *v != 0.0)
            .map(|v| v.abs() / peak)
            .collect();
        got.sort_by(f64::total_cmp);
        got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9)
    };
    (0..n).all(|i| matches(rows[i].clone()) && matches(rows.iter().map(|r| r[i]).collect()))
}

fn determinant(rows: &[Vec<f64>]) -> f64 {
    let mut a = rows.to_vec();
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

fn latin_square() -> Result<Verdict> {
    let sequence = [1.0, 0.8, 0.5];
    let printed: Vec<Vec<f64>> = PRINTED.iter().map(|r| r.to_vec()).collect();
    let printed_ok = latin_oracle(&printed, &sequence) && check_latin_square(&printed, &sequence);
    let mut bad_seeds = Vec::new();
    let mut worst_det = 0.0f64;
    for seed in 0..20 {
        let rows = build_parity(&sequence, 6, seed)?.parity_rows_dense();
        let det = determinant(&rows).abs();
        worst_det = worst_det.max((det - 1.0).abs());
        if !latin_oracle(&rows, &sequence)
            || !check_latin_square(&rows, &sequence)
            || (det - 1.0).abs() > 1e-9
        {
            bad_seeds.push(seed);
        }
    }
    verdict(
        printed_ok && bad_seeds.is_empty(),
        format!(
            "printed matrix valid: {printed_ok}; constructed N = 6 over 20 seeds, failing seeds {bad_seeds:?}, \
             max ||det H| - 1| = {worst_det:.1e}"
        ),
    )
}

/// Minimizes `|G(b - M k)|^2` over every `k_i` in `[-ceil(M_i/2), floor(M_i/2))`.
/// Metrics within a relative 1e-9 of the minimum tie, and the
/// lexicographically smallest `k` among them wins.
fn brute_force_k(code: &LdlcCode, m: &[i64], b: &[i64]) -> (Vec<i64>, f64) {
    let g = code.generator();
    let n = b.len();
    let lo: Vec<i64> = m.iter().map(|m| -((m + 1) / 2)).collect();
    let hi: Vec<i64> = m.iter().map(|m| m / 2).collect();
    let mut k = lo.clone();
    let mut all: Vec<(Vec<i64>, f64)> = Vec::new();
    'outer: loop {
        let metric: f64 = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| g[(r, c)] * (b[c] - m[c] * k[c]) as f64)
                    .sum::<f64>()
                    .powi(2)
            })
            .sum();
        all.push((k.clone(), metric));
        for pos in (0..n).rev() {
            k[pos] += 1;
            if k[pos] < hi[pos] {
                continue 'outer;
            }
            k[pos] = lo[pos];
        }
        break;
    }
    let min = all.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    // enumeration order is lexicographic, so the first near-minimum wins
    all.into_iter()
        .find(|c| c.1 <= min + 1e-9 * min.max(1.0))
        .expect("non-empty range")
}

fn m_algorithm_oracle() -> Result<Verdict> {
    let setups = [(4usize, 4i64, 2i64), (6, 2, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut cases, mut mismatches, mut off_minimum) = (0, 0, 0);
    for (index, &(n, l_a, l_b)) in setups.iter().enumerate() {
        for pair in 0..100u64 {
            let code = build_parity(&[1.0, 0.8, 0.5], n, index as u64 * 1000 + pair / 10)?;
            let mapping = RateDiverseMapping::uniform(n, l_a, l_b, 2)?;
            let b_a: Vec<i64> = (0..n).map(|_| rng.gen_range(-l_a..l_a)).collect();
            let b_b: Vec<i64> = (0..n).map(|_| rng.gen_range(-l_b..l_b)).collect();
            let b_nc = network_combine(&mapping, &b_a, &b_b)?;
            let found = m_algorithm(&code, &mapping, &b_nc, usize::MAX)?;
            let (k, metric) = brute_force_k(&code, mapping.m(), &b_nc);
            cases += 1;
            if found.k != k {
                mismatches += 1;
                if (found.power * n as f64 - metric).abs() > 1e-9 * metric.max(1.0) {
                    off_minimum += 1;
                }
            }
        }
    }
    verdict(
        mismatches == 0 && cases == 200,
        format!("{mismatches} mismatches ({off_minimum} above the minimum) over {cases} pairs, N = 4 (M = 8) and N = 6 (M = 4)"),
    )
}

fn snr_of_variance(variance: f64) -> f64 {
    -10.0 * variance.log10()
}

fn ldlc_equivalence() -> Result<Verdict> {
    let mut rows = Vec::new();
    for (user, variances) in [("A", [0.04, 0.035, 0.03]), ("B", [0.16, 0.14, 0.12])] {
        let sweep: Vec<String> = variances
            .iter()
            .map(|v| snr_of_variance(*v).to_string())
            .collect();
        rows.extend(run(&format!(
            r#"{{"scheme":"ldlc-rdwnc","users":["{user}"],"snr_sweep_db":[{}],
                "trials":100,"min_errors":0,"baseline":true,"seed":2013}}"#,
            sweep.join(",")
        ))?);
    }
    let pairs = paired(&rows, "ldlc-rdwnc", "ldlc-p2p")?;
    let pass = pairs.len() == 6 && pairs.iter().all(|(r, b)| overlaps(r, b));
    verdict(
        pass,
        format!("N = 100, 100 codewords: {}", describe_pairs(&pairs)),
    )
}

fn shaped_power() -> Result<Verdict> {
    let n = 100;
    let code = build_parity(&degree_seven_sequence(), n, 1)?;
    let mapping = RateDiverseMapping::uniform(n, 4, 2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut shaped, mut unshaped) = (0.0, 0.0);
    let mut residue_errors = 0;
    let pairs = 200;
    for _ in 0..pairs {
        let b_a: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..4)).collect();
        let b_b: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..2)).collect();
        let b_nc = network_combine(&mapping, &b_a, &b_b)?;
        let s = network_encode_shape(&code, &mapping, &b_a, &b_b, 64)?;
        let x_power = s.x.iter().map(|v| v * v).sum::<f64>() / n as f64;
        ensure!(
            (x_power - s.power).abs() <= 1e-9 * s.power.max(1.0),
            "reported power disagrees with x"
        );
        if (0..n).any(|i| (s.b_prime[i] - b_nc[i]).rem_euclid(mapping.m()[i]) != 0) {
            residue_errors += 1;
        }
        shaped += x_power;
        unshaped += unshaped_power(&code, &b_nc)?;
    }
    let gain = 10.0 * (unshaped / shaped).log10();
    verdict(
        gain >= 3.0 && residue_errors == 0,
        format!(
            "mean power {:.3} unshaped vs {:.3} shaped over {pairs} pairs: {gain:.2} dB; {residue_errors} pairs off the coset",
            unshaped / pairs as f64,
            shaped / pairs as f64
        ),
    )
}

fn bicm_equivalence() -> Result<Verdict> {
    let mut rows = Vec::new();
    for (user, sweep) in [("A", "2.0,2.5,3.0"), ("B", "0.5,1.0,1.5")] {
        rows.extend(run(&format!(
            r#"{{"scheme":"bicm-rdwnc","users":["{user}"],"snr_sweep_db":[{sweep}],"snr_axis":"eb-n0",
                "constellation":"qpsk","q_A":2,"q_B":4,"info_bits":1000,
                "trials":500,"min_errors":0,"baseline":true,"seed":77}}"#
        ))?);
    }
    let pairs = paired(&rows, "bicm-rdwnc", "bicm-p2p")?;
    let enough = rows.iter().all(|r| r.trials >= 500);
    let gain = rows
        .iter()
        .find_map(|r| if r.user == User::B { r.gain_db } else { None });
    let pass = pairs.len() == 6 && enough && pairs.iter().all(|(r, b)| overlaps(r, b));
    verdict(
        pass,
        format!(
            "QPSK, 500 packets, Eb/N0: {}; user B modulation gain column {}",
            describe_pairs(&pairs),
            gain.map_or("missing".into(), |g| format!("{g:.5} dB"))
        ),
    )
}

/// Eb/N0 where the BER curve first falls through `target`, by linear
/// interpolation of log10 BER between grid points.
fn crossing(rows: &[&ResultRow], target: f64, bits: u64) -> Option<f64> {
    let floor = |r: &ResultRow| r.error_rate.max(0.5 / (r.trials * bits) as f64).log10();
    rows.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.error_rate > target && b.error_rate <= target {
            let (la, lb, lt) = (floor(a), floor(b), target.log10());
            Some(a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

fn ra_gap() -> Result<Verdict> {
    let grid: Vec<String> = (0..=22)
        .map(|i| format!("{:.2}", i as f64 * 0.25))
        .collect();
    let rows = run(&format!(
        r#"{{"scheme":"bicm-p2p","snr_sweep_db":[{}],"snr_axis":"eb-n0","constellation":"qpsk",
            "q_A":2,"q_B":4,"info_bits":1000,"trials":400,"min_errors":0,"seed":7}}"#,
        grid.join(",")
    ))?;
    let curve =
        |user: User| -> Vec<&ResultRow> { rows.iter().filter(|r| r.user == user).collect() };
    let at = |target: f64| -> Result<(f64, f64)> {
        let a = crossing(&curve(User::A), target, 1000)
            .ok_or_else(|| anyhow!("rate 1/2 curve misses {target}"))?;
        let b = crossing(&curve(User::B), target, 500)
            .ok_or_else(|| anyhow!("rate 1/4 curve misses {target}"))?;
        Ok((a, b))
    };
    let (a3, b3) = at(1e-3)?;
    let gap = a3 - b3;
    let note = match at(1e-4) {
        Ok((a4, b4)) => format!("; at BER 1e-4: {:.2} dB", a4 - b4),
        Err(_) => String::new(),
    };
    verdict(
        (gap - 2.8).abs() <= 0.7,
        format!(
            "BER 1e-3 at Eb/N0 {a3:.2} dB (rate 1/2) and {b3:.2} dB (rate 1/4): gap {gap:.2} dB, \
             target 2.8 +/- 0.7{note}"
        ),
    )
}

fn modulation_gain() -> Result<Verdict> {
    let computed = distance_gain_db(2.0, 1.85);
    let oracle = 10.0 * (4.0f64 / 3.4225).log10();
    verdict(
        (computed - oracle).abs() < 1e-12,
        format!("10 log10(4 / 1.85^2) = {computed:.5} dB, independent value {oracle:.5} dB (stated as 0.676)"),
    )
}

fn runner() -> TestRunner {
    TestRunner::new(RunnerConfig {
        cases: 1000,
        failure_persistence: None,
        ..RunnerConfig::default()
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn properties() -> Result<Verdict> {
    let suites: [(&str, fn() -> std::result::Result<(), String>); 8] = [
        ("quantizer idempotence", prop_idempotent),
        ("quantizer shift invariance", prop_shift_invariant),
        ("modulo recovery", prop_mod_recovery),
        ("RA linearity", prop_ra_linear),
        ("metric completeness", prop_metrics_complete),
        ("side-information involution", prop_involution),
        ("BP normalization", prop_bp_normalized),
        ("CSV determinism", prop_csv_deterministic),
    ];
    let mut failures = Vec::new();
    for (name, suite) in suites {
        if let Err(e) = suite() {
            failures.push(format!("{name}: {e}"));
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        format!("{} suites x 1000 cases", suites.len())
    } else {
        failures.join("; ")
    };
    verdict(pass, detail)
}

fn outcome<T: std::fmt::Debug>(
    r: std::result::Result<(), proptest::test_runner::TestError<T>>,
) -> std::result::Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn test_lattices() -> Vec<Lattice> {
    vec![
        Lattice::integer(2).scaled(1.7).expect("scale"),
        Lattice::hexagonal(),
        Lattice::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![0.5, 1.0, 2.0],
        ])
        .expect("basis"),
    ]
}

fn prop_idempotent() -> std::result::Result<(), String> {
    let lattices = test_lattices();
    outcome(runner().run(
        &(0usize..3, prop::collection::vec(-20.0f64..20.0, 3)),
        |(w, x)| {
            let l = &lattices[w];
            let x = &x[..l.dimension()];
            let once = l.lattice_mod(x, 2).unwrap();
            prop_assert!(close(&once, &l.lattice_mod(&once, 2).unwrap(), 1e-12));
            let q = l.quantize_nearest(x, 2).unwrap();
            prop_assert_eq!(
                &q.coefficients,
                &l.quantize_nearest(&q.coordinates, 2).unwrap().coefficients
            );
            Ok(())
        },
    ))
}

fn prop_shift_invariant() -> std::result::Result<(), String> {
    let lattices = test_lattices();
    let strategy = (
        0usize..3,
        prop::collection::vec(-6.0f64..6.0, 3),
        prop::collection::vec(-5i64..=5, 3),
    );
    outcome(runner().run(&strategy, |(w, x, shift)| {
        let l = &lattices[w];
        let n = l.dimension();
        let lambda = l.point(&shift[..n]).unwrap();
        let moved: Vec<f64> = x[..n]
            .iter()
            .zip(&lambda.coordinates)
            .map(|(a, b)| a + b)
            .collect();
        prop_assert!(close(
            &l.lattice_mod(&x[..n], 2).unwrap(),
            &l.lattice_mod(&moved, 2).unwrap(),
            1e-9
        ));
        Ok(())
    }))
}

fn prop_mod_recovery() -> std::result::Result<(), String> {
    let strategy = (
        any::<u64>(),
        1usize..12,
        prop::collection::vec(-3i64..=3, 12),
    );
    outcome(runner().run(&strategy, |(seed, n, k)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l_a: Vec<i64> = (0..n)
            .map(|_| [1, 2, 3, 4, 6][rng.gen_range(0..5)])
            .collect();
        let l_b: Vec<i64> = (0..n).map(|_| [1, 2, 4][rng.gen_range(0..3)]).collect();
        let mapping = build_mapping(&l_a, &l_b, 2).unwrap();
        let b_a: Vec<i64> = l_a.iter().map(|l| rng.gen_range(-l..*l)).collect();
        let b_b: Vec<i64> = l_b.iter().map(|l| rng.gen_range(-l..*l)).collect();
        let combined = network_combine(&mapping, &b_a, &b_b).unwrap();
        let shaped: Vec<i64> = (0..n)
            .map(|i| combined[i] - mapping.m()[i] * k[i])
            .collect();
        let own_a: Vec<i64> = (0..n)
            .map(|i| shaped[i] - mapping.m_user(User::B)[i] * b_b[i])
            .collect();
        let own_b: Vec<i64> = (0..n)
            .map(|i| shaped[i] - mapping.m_user(User::A)[i] * b_a[i])
            .collect();
        prop_assert_eq!(recover_message(&own_a, &mapping, User::A).unwrap(), b_a);
        prop_assert_eq!(recover_message(&own_b, &mapping, User::B).unwrap(), b_b);
        Ok(())
    }))
}

fn prop_ra_linear() -> std::result::Result<(), String> {
    let words = (1usize..80).prop_flat_map(|k| {
        (
            prop::collection::vec(0u8..2, k),
            prop::collection::vec(0u8..2, k),
        )
    });
    outcome(
        runner().run(&(any::<u64>(), 2usize..5, words), |(seed, q, (a, b))| {
            let code = RaCode::new(a.len(), q, seed).unwrap();
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let ca = ra_encode(&code, &a).unwrap();
            let cb = ra_encode(&code, &b).unwrap();
            let rhs: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(ra_encode(&code, &sum).unwrap(), rhs);
            Ok(())
        }),
    )
}

fn prop_metrics_complete() -> std::result::Result<(), String> {
    let strategy = (
        any::<bool>(),
        -2.0f64..2.0,
        -2.0f64..2.0,
        0.2f64..2.0,
        0.05f64..3.0,
    );
    outcome(runner().run(&strategy, |(qam, re, im, beta, var)| {
        let c = if qam {
            Constellation::qam16()
        } else {
            Constellation::qpsk()
        };
        let y = Complex64::new(re, im);
        let density =
            |x: &Complex64| (-(y - x * beta).norm_sqr() / var).exp() / (std::f64::consts::PI * var);
        let total: f64 =
            c.points().iter().map(density).sum::<f64>() / (c.points().len() / 2) as f64;
        for m in c.bit_metrics(y, beta, var) {
            prop_assert!((m.metric0() + m.metric1() - total).abs() <= 1e-12 * total.max(1e-300));
        }
        Ok(())
    }))
}

fn prop_involution() -> std::result::Result<(), String> {
    let strategy = (1usize..64).prop_flat_map(|n| {
        (
            prop::collection::vec((-50.0f64..0.0, -50.0f64..0.0), n),
            prop::collection::vec(0u8..2, n),
            any::<u64>(),
        )
    });
    outcome(runner().run(&strategy, |(metrics, side, seed)| {
        let metrics: Vec<BitMetricPair> = metrics
            .into_iter()
            .map(|(a, b)| BitMetricPair {
                log_metric0: a,
                log_metric1: b,
            })
            .collect();
        let once = apply_side_info(&metrics, &side).unwrap();
        prop_assert_eq!(&apply_side_info(&once, &side).unwrap(), &metrics);
        let pi = make_interleaver(metrics.len(), seed).unwrap();
        let swapped = apply_side_info(
            &pi.interleave(&metrics).unwrap(),
            &pi.interleave(&side).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(pi.deinterleave(&swapped).unwrap(), once);
        Ok(())
    }))
}

fn prop_bp_normalized() -> std::result::Result<(), String> {
    let code = build_parity(&[1.0, 0.8, 0.5], 6, 11).map_err(|e| e.to_string())?;
    let mapping = RateDiverseMapping::uniform(6, 2, 2, 2).map_err(|e| e.to_string())?;
    let strategy = (
        prop::collection::vec(-2i64..2, 6),
        prop::collection::vec(-0.4f64..0.4, 6),
        0.01f64..0.1,
    );
    outcome(runner().run(&strategy, |(b, noise, var)| {
        let x = code.encode(&b).unwrap();
        let y: Vec<f64> = x.iter().zip(&noise).map(|(x, z)| x + z).collect();
        let config = BpConfig {
            iterations: 4,
            ..Default::default()
        };
        let mut decoder = BpDecoder::new(&code, mapping.decoder_ranges(User::A), config).unwrap();
        let out = decoder.decode(&y, var).unwrap();
        prop_assert!(out.max_normalization_error <= 1e-9);
        for belief in decoder.beliefs() {
            prop_assert!((belief.mass() - 1.0).abs() <= 1e-9);
        }
        Ok(())
    }))
}

fn prop_csv_deterministic() -> std::result::Result<(), String> {
    let row = (
        prop::sample::select(vec![
            "ldlc-rdwnc",
            "ldlc-p2p",
            "bicm-rdwnc",
            "bicm-p2p",
            "lattice-identity",
        ]),
        any::<bool>(),
        -30.0f64..30.0,
        0.0f64..4.0,
        (0u64..10_000, 1u64..10_000),
        0.0f64..100.0,
        prop::option::of(-5.0f64..5.0),
    )
        .prop_map(
            |(scheme, b, snr_db, rate, (errors, extra), wall, gain_db)| {
                let trials = errors + extra;
                let stats = ErrorStats::from_counts(trials, errors, trials, 0);
                ResultRow {
                    scheme: scheme.into(),
                    user: if b { User::B } else { User::A },
                    snr_db,
                    rate_bits_per_use: rate,
                    error_rate: stats.rate_estimate,
                    ci95_low: stats.ci95_low,
                    ci95_high: stats.ci95_high,
                    trials,
                    errors,
                    wall_seconds: wall,
                    gain_db,
                }
            },
        );
    outcome(runner().run(&prop::collection::vec(row, 0..8), |rows| {
        let first = render(&rows, Format::Csv).unwrap();
        prop_assert_eq!(&first, &render(&rows, Format::Csv).unwrap());
        prop_assert_eq!(read_csv(first.as_slice()).unwrap(), rows);
        Ok(())
    }))?;
    // same config, same bytes once wall time is blanked
    let text = r#"{"scheme":"bicm-rdwnc","snr_sweep_db":[1.0,3.0],"trials":6,"info_bits":200,"baseline":true,"seed":5}"#;
    let bytes = || -> std::result::Result<Vec<u8>, String> {
        let rows: Vec<ResultRow> = run(text)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| ResultRow {
                wall_seconds: 0.0,
                ..r
            })
            .collect();
        render(&rows, Format::Csv).map_err(|e| e.to_string())
    };
    if bytes()? != bytes()? {
        return Err("two runs of one config differ".into());
    }
    Ok(())
}
