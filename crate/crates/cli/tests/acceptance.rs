//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use dimer_cli::output::{write_grid, RunManifest};
use dimer_core::analysis::{assistance_gain, max_over_time, sweep, SweepGrid, SweepOptions, TimeWindow};
use dimer_core::combinatorics::{
    binomial, log_partition_closed_form, log_partition_direct, magnetization_count, magnetizations, HalfInt,
    MultiplicityTable, ThermalWeights,
};
use dimer_core::config::{beta_from_kelvin, ConfigFile};
use dimer_core::dynamics::{
    correlated_ground_state, delta0_for_branch, p12, p12_correlated_zero_temp, p12_zero_temp, q_threshold,
    GroundStateBranch,
};
use dimer_core::oracle::{brute_force_bath_ground, DenseHamiltonian, OracleEvolver, ThermalEnsembleState};
use dimer_core::{BathParams, CorrelationParams, DimerParams, SystemConfig, ThermalSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(
    (e1, e2, j): (f64, f64, f64),
    (n1, a1, g1): (u32, f64, f64),
    (n2, a2, g2): (u32, f64, f64),
    q: f64,
    thermal: ThermalSpec,
) -> SystemConfig {
    SystemConfig {
        dimer: DimerParams {
            epsilon1: e1,
            epsilon2: e2,
            hopping: j,
        },
        bath1: BathParams {
            size: n1,
            splitting: a1,
            coupling: g1,
        },
        bath2: BathParams {
            size: n2,
            splitting: a2,
            coupling: g2,
        },
        correlation: CorrelationParams { ising: q },
        thermal,
    }
}

fn info(line: impl AsRef<str>) {
    println!("      info: {}", line.as_ref());
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd1_ce5e);
    let thermals = [ThermalSpec::Kelvin(77.0), ThermalSpec::Kelvin(300.0), ThermalSpec::Beta(1e-9)];
    let mut worst: f64 = 0.0;
    for k in 0..25 {
        let q = if k % 2 == 0 { 0.0 } else { rng.gen_range(-40.0..40.0) };
        let c = config(
            (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(1.0..15.0)),
            (3, rng.gen_range(1.0..300.0), rng.gen_range(0.0..5.0)),
            (3, rng.gen_range(1.0..300.0), rng.gen_range(0.0..5.0)),
            q,
            thermals[k % 3],
        );
        let evolver = OracleEvolver::new(&c).unwrap();
        for i in 0..50 {
            let t = 2.0 * f64::from(i) / 49.0;
            worst = worst.max((p12(&c, t).unwrap() - evolver.probability(t)).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max |dP| = {worst:.3e} over 25 configs x 50 times"))
}

fn dimension_identity() -> Outcome {
    for n in 1..=24u32 {
        let table = MultiplicityTable::new(n).unwrap();
        let total: u128 = table
            .multiplicities()
            .iter()
            .map(|&(j, nu)| nu * (j.twice() as u128 + 1))
            .sum();
        if total != 1u128 << n {
            return outcome(false, format!("N = {n}: sum = {total}"));
        }
        for m in magnetizations(n) {
            let k = (i64::from(n) - m.twice()) / 2;
            let expected = binomial(n, k as u32).unwrap();
            if magnetization_count(n, m).unwrap() != expected || table.count_from_nu(m) != expected {
                return outcome(false, format!("N = {n}, m = {m}: count mismatch"));
            }
        }
    }
    outcome(true, "exact for N = 1..24")
}

fn partition_function() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut check = |n: u32, alpha: f64, beta: f64| {
        let a = log_partition_closed_form(n, alpha, beta).unwrap();
        let b = log_partition_direct(n, alpha, beta).unwrap();
        // |Δ log Z| is the relative error of Z
        worst = worst.max((a - b).abs());
    };
    for n in 1..=24 {
        for i in 0..=200 {
            let beta_alpha = 1e-6 * (50.0f64 / 1e-6).powf(f64::from(i) / 200.0);
            check(n, 250.0, beta_alpha / 250.0);
        }
    }
    let beta77 = beta_from_kelvin(77.0).unwrap();
    info(format!("77 K: beta*alpha = {:.4}", beta77 * 250.0));
    for n in [20, 22] {
        check(n, 250.0, beta77);
    }
    outcome(worst <= 1e-10, format!("max relative difference = {worst:.3e}"))
}

fn zero_temperature_compensation() -> Outcome {
    let c = config(
        (0.0, 20.0, 10.0),
        (1, 250.0, 0.0),
        (20, 250.0, 2.0),
        0.0,
        ThermalSpec::ZeroTemperature,
    );
    let p = p12_zero_temp(&c, PI / 20.0).unwrap();
    let m = max_over_time(&c, &TimeWindow::default()).unwrap();
    let pass = (p - 1.0).abs() <= 1e-12 && (m.p - 1.0).abs() <= 1e-12 && (m.t - PI / 20.0).abs() <= 1e-12;
    outcome(pass, format!("P(pi/20) = {p:.15}, max = {:.15} at t = {:.15} ps", m.p, m.t))
}

fn fig2_config(gamma: f64, kelvin: f64) -> SystemConfig {
    config((0.0, 20.0, 10.0), (1, 250.0, 0.0), (20, 250.0, gamma), 0.0, ThermalSpec::Kelvin(kelvin))
}

fn fig2_reproduction() -> Outcome {
    let window = TimeWindow::default();
    let baseline = max_over_time(&fig2_config(0.0, 77.0), &window).unwrap();
    let grid = sweep(
        &fig2_config(0.0, 77.0),
        "gamma2=0:4:161".parse().unwrap(),
        Some("t=0:0.8:801".parse().unwrap()),
        &SweepOptions::default(),
    )
    .unwrap();
    let gamma_star = grid.argmax.value1;
    let column_max = (0..grid.rows()).map(|i| grid.value(0, i)).fold(0.0, f64::max);
    info(format!("gamma = 0 column of the surface: max = {column_max:.12}"));
    let pass = (baseline.p - 0.5).abs() <= 1e-9 && grid.argmax.p >= 0.95 && (gamma_star - 2.0).abs() <= 0.25;
    outcome(
        pass,
        format!(
            "gamma=0 max = {:.12}; surface max = {:.6} at gamma = {gamma_star}, t = {} ps",
            baseline.p, grid.argmax.p, grid.argmax.t
        ),
    )
}

fn fig3_config(n1: u32, n2: u32, kelvin: f64) -> SystemConfig {
    config((0.0, 20.0, 10.0), (n1, 250.0, 0.0), (n2, 250.0, 0.0), 0.0, ThermalSpec::Kelvin(kelvin))
}

fn fig3_sweep(c: &SystemConfig) -> (SweepGrid, Duration) {
    let start = Instant::now();
    let grid = sweep(
        c,
        "gamma_both=0:4:161".parse().unwrap(),
        Some("q=0:40:161".parse().unwrap()),
        &SweepOptions::default(),
    )
    .unwrap();
    (grid, start.elapsed())
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(option_env!("CARGO_TARGET_TMPDIR").unwrap_or("target/tmp"))
}

fn record_fig3(label: &str, c: &SystemConfig, grid: &SweepGrid, elapsed: Duration) -> PathBuf {
    let dir = manifest_dir();
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join(format!("fig3_{label}.csv"));
    write_grid(&out, grid).unwrap();
    let mut manifest = RunManifest::new("sweep", ConfigFile::from(c));
    manifest.outputs.push(out.clone());
    manifest.axes = vec![grid.axis1.to_string(), grid.axis2.as_ref().unwrap().to_string()];
    manifest.summary = json!({
        "p_max": grid.argmax.p,
        "gamma_star": grid.argmax.value1,
        "q_star": grid.argmax.value2,
        "t_star_ps": grid.argmax.t,
        "window": TimeWindow::default(),
    });
    manifest.write_beside(&out, elapsed).unwrap()
}

struct Fig3Result {
    kelvin: f64,
    target: f64,
    grid: SweepGrid,
}

fn fig3_maxima(results: &mut Vec<Fig3Result>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for (kelvin, target) in [(77.0, 0.99), (300.0, 0.88)] {
        let c = fig3_config(22, 20, kelvin);
        let (grid, elapsed) = fig3_sweep(&c);
        total += elapsed;
        let path = record_fig3(&format!("{kelvin}K"), &c, &grid, elapsed);
        let a = grid.argmax;
        info(format!(
            "{kelvin} K: max = {:.6} at gamma = {}, q = {}, t* = {:.6} ps ({:.1} s), manifest {}",
            a.p,
            a.value1,
            a.value2.unwrap(),
            a.t,
            elapsed.as_secs_f64(),
            path.display()
        ));
        pass &= (a.p - target).abs() <= 0.05;
        parts.push(format!("{kelvin} K: {:.4} (target {target} +/- 0.05)", a.p));
        results.push(Fig3Result { kelvin, target, grid });
    }
    pass &= total < Duration::from_secs(600);
    // the same scan with the bath sizes exchanged
    for kelvin in [77.0, 300.0] {
        let (grid, _) = fig3_sweep(&fig3_config(20, 22, kelvin));
        let a = grid.argmax;
        info(format!(
            "N1 = 20, N2 = 22 at {kelvin} K: max = {:.6} at gamma = {}, q = {}, t* = {:.6} ps",
            a.p,
            a.value1,
            a.value2.unwrap(),
            a.t
        ));
    }
    let gain = assistance_gain(
        &config((0.0, 20.0, 10.0), (20, 250.0, 0.95), (22, 250.0, 0.95), 40.0, ThermalSpec::Kelvin(77.0)),
        &TimeWindow::default(),
    )
    .unwrap();
    info(format!("N1 = 20, N2 = 22, gamma = 0.95, q = 40, 77 K: assistance gain {:.6}", gain.gain));
    outcome(pass, parts.join("; "))
}

fn timescale(results: &[Fig3Result]) -> Outcome {
    let window = TimeWindow::default();
    let mut pass = !results.is_empty();
    let mut parts = Vec::new();
    for r in results {
        let t = r.grid.argmax.t;
        pass &= (0.05..=1.0).contains(&t);
        let edge = window.near_edge(t, 0.01);
        if edge {
            info(format!("{} K: t* within 1% of the window edge", r.kelvin));
        }
        parts.push(format!("{} K (target {}): t* = {t:.6} ps", r.kelvin, r.target));
    }
    outcome(pass, parts.join("; "))
}

fn corner_of(branch: &GroundStateBranch, n1: u32, n2: u32) -> Vec<(HalfInt, HalfInt)> {
    branch.corners().into_iter().map(|c| c.magnetizations(n1, n2)).collect()
}

fn ground_state_branching() -> Outcome {
    let (n1, n2) = (3u32, 2u32);
    let (mut off_band, mut on_band, mut failures) = (0, 0, Vec::new());
    let mut q0_err: f64 = 0.0;
    for i1 in 1..=50 {
        for i2 in 1..=50 {
            let (a1, a2) = (3.0 * f64::from(i1), 3.0 * f64::from(i2));
            let q0 = q_threshold(a1, a2, n1, n2);
            let reference = 2.0 * f64::min(a1 / f64::from(n2), a2 / f64::from(n1));
            q0_err = q0_err.max((q0 - reference).abs() / reference);
            for iq in 0..50 {
                let q = 2.0 * f64::from(iq);
                let branch = correlated_ground_state(a1, a2, q, n1, n2);
                let brute = brute_force_bath_ground(a1, a2, q, n1, n2);
                let corners = corner_of(&branch, n1, n2);
                let ok = if branch.is_degenerate() {
                    on_band += 1;
                    brute.len() >= 2 && corners.iter().all(|c| brute.contains(c))
                } else {
                    off_band += 1;
                    brute == corners
                };
                if !ok && failures.len() < 3 {
                    failures.push(format!("(a1={a1}, a2={a2}, q={q}): {branch:?} vs {brute:?}"));
                }
            }
        }
    }
    let pass = failures.is_empty() && q0_err <= 1e-12 && on_band > 0;
    outcome(
        pass,
        format!(
            "{off_band} off-band and {on_band} on-band points; q0 relative error {q0_err:.1e}{}",
            if failures.is_empty() { String::new() } else { format!("; mismatches: {}", failures.join(", ")) }
        ),
    )
}

fn correlated_assist_conditions() -> Outcome {
    let (n1, n2) = (10u32, 10u32);
    let (g1, g2) = (1.5, 2.5);
    let sum = (g1 * f64::from(n1) + g2 * f64::from(n2)) / 4.0;
    let diff = (g1 * f64::from(n1) - g2 * f64::from(n2)) / 4.0;
    let cases = [
        // q < q0: both baths down, compensation (e1 - e2)/2 = (g1 N1 - g2 N2)/4
        ("q < q0", (2.0 * diff, 0.0), (250.0, 250.0), 10.0),
        // q > q0, a1 > a2, e2 < e1: (e2 - e1)/2 = -(g1 N1 + g2 N2)/4
        ("q > q0, a1 > a2", (2.0 * sum, 0.0), (300.0, 250.0), 80.0),
        // q > q0, a1 < a2, e2 > e1: (e2 - e1)/2 = (g1 N1 + g2 N2)/4
        ("q > q0, a1 < a2", (0.0, 2.0 * sum), (250.0, 300.0), 80.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, (e1, e2), (a1, a2), q) in cases {
        let c = config((e1, e2, 10.0), (n1, a1, g1), (n2, a2, g2), q, ThermalSpec::ZeroTemperature);
        let (branch, delta) = delta0_for_branch(&c).unwrap();
        let peak = p12_correlated_zero_temp(&c, PI / 20.0).unwrap();
        let ok = delta.value.abs() <= 1e-12 && (peak - 1.0).abs() <= 1e-12;
        pass &= ok;
        parts.push(format!("{name}: {branch:?}, delta0 = {:.1e}, max P = {peak:.15}", delta.value));
    }
    let literal = config((0.0, 2.0 * diff, 10.0), (n1, 250.0, g1), (n2, 250.0, g2), 10.0, ThermalSpec::ZeroTemperature);
    info(format!(
        "first case with (e2 - e1)/2 = (g1 N1 - g2 N2)/4 instead gives delta0 = {}",
        delta0_for_branch(&literal).unwrap().1.value
    ));
    outcome(pass, parts.join("; "))
}

fn random_config(rng: &mut ChaCha8Rng) -> SystemConfig {
    let thermal = match rng.gen_range(0..4) {
        0 => ThermalSpec::ZeroTemperature,
        1 => ThermalSpec::Beta(rng.gen_range(1e-6..1.0)),
        _ => ThermalSpec::Kelvin(rng.gen_range(1.0..2000.0)),
    };
    let hopping = rng.gen_range(0.1..30.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let q = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-50.0..50.0) };
    config(
        (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), hopping),
        (rng.gen_range(1..=40), rng.gen_range(0.5..400.0), rng.gen_range(0.0..8.0)),
        (rng.gen_range(1..=40), rng.gen_range(0.5..400.0), rng.gen_range(0.0..8.0)),
        q,
        thermal,
    )
}

fn scaled(c: &SystemConfig, lambda: f64) -> SystemConfig {
    let mut s = *c;
    s.dimer.epsilon1 *= lambda;
    s.dimer.epsilon2 *= lambda;
    s.dimer.hopping *= lambda;
    for bath in [&mut s.bath1, &mut s.bath2] {
        bath.splitting *= lambda;
        bath.coupling *= lambda;
    }
    s.correlation.ising *= lambda;
    s.thermal = match c.beta() {
        Some(beta) => ThermalSpec::Beta(beta / lambda),
        None => ThermalSpec::ZeroTemperature,
    };
    s
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let (mut range_bad, mut origin_bad) = (0, 0);
    let mut scaling: f64 = 0.0;
    for _ in 0..10_000 {
        let c = random_config(&mut rng);
        let t = rng.gen_range(0.0..5.0);
        let p = p12(&c, t).unwrap();
        if !(0.0..=1.0).contains(&p) {
            range_bad += 1;
        }
        if p12(&c, 0.0).unwrap() != 0.0 {
            origin_bad += 1;
        }
    }
    for _ in 0..200 {
        let c = random_config(&mut rng);
        let lambda = rng.gen_range(0.1..10.0);
        let s = scaled(&c, lambda);
        let t = rng.gen_range(0.0..2.0);
        scaling = scaling.max((p12(&c, t).unwrap() - p12(&s, t / lambda).unwrap()).abs());
    }

    let mut factor: f64 = 0.0;
    for _ in 0..100 {
        let beta = rng.gen_range(1e-4..0.2);
        let b1 = BathParams {
            size: rng.gen_range(1..=24),
            splitting: rng.gen_range(1.0..300.0),
            coupling: 0.0,
        };
        let b2 = BathParams {
            size: rng.gen_range(1..=24),
            splitting: rng.gen_range(1.0..300.0),
            coupling: 0.0,
        };
        let w = ThermalWeights::for_baths(beta, &b1, &b2, 0.0).unwrap();
        let (r, s) = w.shape();
        let row: Vec<f64> = (0..r).map(|i| (0..s).map(|j| w.probability(i, j)).sum()).collect();
        let col: Vec<f64> = (0..s).map(|j| (0..r).map(|i| w.probability(i, j)).sum()).collect();
        for i in 0..r {
            for j in 0..s {
                factor = factor.max((w.probability(i, j) - row[i] * col[j]).abs());
            }
        }
    }

    let mut phase: f64 = 0.0;
    for _ in 0..10 {
        let mut c = random_config(&mut rng);
        c.bath1.size = rng.gen_range(1..=3);
        c.bath2.size = rng.gen_range(1..=3);
        let shift = rng.gen_range(-500.0..500.0);
        let ham = DenseHamiltonian::build(&c).unwrap();
        let ensemble = ThermalEnsembleState::new(&c).unwrap();
        let plain = OracleEvolver::from_parts(ham.clone(), ensemble.clone());
        let moved = OracleEvolver::from_parts(ham.shifted(shift), ensemble);
        for i in 0..20 {
            let t = 0.1 * f64::from(i);
            phase = phase.max((plain.probability(t) - moved.probability(t)).abs());
        }
    }

    let pass = range_bad == 0 && origin_bad == 0 && scaling <= 1e-12 && factor <= 1e-12 && phase <= 1e-10;
    outcome(
        pass,
        format!(
            "out of range {range_bad}/10000, P(0) != 0 {origin_bad}/10000, scaling {scaling:.1e}, \
             factorization {factor:.1e}, phase shift {phase:.1e}"
        ),
    )
}

fn main() {
    let mut fig3 = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Vec<Fig3Result>) -> Outcome>)> = vec![
        ("oracle equivalence", Box::new(|_| oracle_equivalence())),
        ("dimension identity", Box::new(|_| dimension_identity())),
        ("partition function forms", Box::new(|_| partition_function())),
        ("zero-temperature compensation", Box::new(|_| zero_temperature_compensation())),
        ("time x coupling surface", Box::new(|_| fig2_reproduction())),
        ("correlation x coupling maxima", Box::new(fig3_maxima)),
        ("transfer timescale", Box::new(|r: &mut Vec<Fig3Result>| timescale(r))),
        ("ground-state branching", Box::new(|_| ground_state_branching())),
        ("correlated compensation cases", Box::new(|_| correlated_assist_conditions())),
        ("property suite", Box::new(|_| property_suite())),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = check(&mut fig3);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name} ({:.1} s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
