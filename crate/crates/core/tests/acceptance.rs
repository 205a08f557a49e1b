//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use dce_core::bogoliubov::{canonical_residuals, diagonalize, evolve};
use dce_core::harness::{
    prepare_state, run_point, sweep_cutoff, sweep_speed, default_speeds, FitOptions,
    SpeedRow,
};
use dce_core::model::{build_quadratic_form, coupling_element, coupling_quadrature, ModelConfig};
use dce_core::oracle::{
    build_fock_operators, oracle_char_values, oracle_moments, oracle_pair_amplitudes,
};
use dce_core::stats::{
    analytic_moments, char_values, moments_fd, number_distribution, perturbative_pair_amplitude,
    work_distribution, BranchOptions, FdOptions, Observable, FD_FLAG_TOL,
};

const U_GRID: [f64; 7] = [-2.3, -0.7, -0.1, 0.0, 0.1, 0.7, 2.3];
const SWEEP_L: [usize; 6] = [16, 32, 64, 128, 256, 512];

fn report(name: &str, started: Instant, failures: &[String]) {
    let secs = started.elapsed().as_secs_f64();
    if failures.is_empty() {
        println!("PASS  {name} ({secs:.1} s)");
    } else {
        println!("FAIL  {name} ({secs:.1} s)");
        for f in failures {
            println!("      {f}");
        }
    }
    assert!(failures.is_empty(), "{name}: {} failing checks", failures.len());
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn oracle_equivalence() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut worst_chi = 0.0f64;
    let mut worst_mom = 0.0f64;
    let mut worst_fd = 0.0f64;
    for cutoff in [1, 2, 3] {
        for speed in [0.1, 0.5, 2.0] {
            for sign in [1.0, -1.0] {
                let cfg = ModelConfig::new(sign * speed, sign * LN_2, cutoff);
                let ops = build_fock_operators(&cfg, false).unwrap();
                let (t, state) = prepare_state(&cfg).unwrap();
                for obs in [Observable::Work, Observable::Number] {
                    let g = char_values(&state, obs, &U_GRID, BranchOptions::default()).unwrap();
                    let o = oracle_char_values(&ops, cfg.delta_l, &U_GRID, obs).unwrap();
                    for ((u, a), b) in U_GRID.iter().zip(&g).zip(&o) {
                        let d = (a - b).norm();
                        worst_chi = worst_chi.max(d);
                        if d > 1e-8 {
                            failures.push(format!("{cfg}, {obs:?}, u = {u}: |chi - oracle| = {d:.3e}"));
                        }
                    }
                    let exact = oracle_moments(&ops, cfg.delta_l, obs, 2).unwrap();
                    let (m1, m2) = analytic_moments(&t, &state, obs);
                    let fd = moments_fd(&state, obs, 2, FdOptions::default()).unwrap();
                    for (k, (a, b)) in [m1, m2].iter().zip(&exact).enumerate() {
                        let r = rel_diff(*a, *b);
                        worst_mom = worst_mom.max(r);
                        if r > 1e-6 {
                            failures.push(format!("{cfg}, {obs:?}, order {}: relative error {r:.3e}", k + 1));
                        }
                    }
                    // Finite differences are held to their own mean tolerance.
                    let r = rel_diff(fd.moments[0], exact[0]);
                    worst_fd = worst_fd.max(r);
                    if r > FD_FLAG_TOL || fd.flagged {
                        failures.push(format!("{cfg}, {obs:?}, finite-difference mean: relative error {r:.3e}"));
                    }
                }
            }
        }
    }
    println!(
        "      max |chi - oracle| = {worst_chi:.2e}, max moment relative error = {worst_mom:.2e}, finite-difference mean {worst_fd:.2e}"
    );
    report("oracle equivalence: 18 configs, 7-point u grid, chi 1e-8, moments 1e-6", started, &failures);
}

#[test]
fn perturbative_pair_creation() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let dl = 1e-3;
    // A fast wall keeps the diagonal second-order terms below the tolerance.
    let speed = 20.0;
    let mut worst = 0.0f64;
    for cutoff in 1..=4 {
        let cfg = ModelConfig::new(speed, dl, cutoff);
        let ops = build_fock_operators(&cfg, false).unwrap();
        let amp = oracle_pair_amplitudes(&ops, dl).unwrap();
        for (m, row) in amp.iter().enumerate() {
            for (n, a) in row.iter().enumerate() {
                let d = (a - perturbative_pair_amplitude(m, n, dl)).norm();
                worst = worst.max(d);
                if d > 1e-6 {
                    failures.push(format!("L = {cutoff}, (m, n) = ({m}, {n}): deviation {d:.3e}"));
                }
            }
        }
    }
    println!("      alpha/v = {speed}, max deviation = {worst:.2e}");
    report("perturbative pair amplitudes at delta_l = 1e-3, L <= 4, within 1e-6", started, &failures);
}

#[test]
fn asymptotic_constants() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for speed in [0.05, 0.1, 0.2] {
        for cutoff in [128, 256, 512] {
            let r = run_point(&ModelConfig::new(speed, LN_2, cutoff)).unwrap();
            let l = cutoff as f64;
            let cn = r.mean_n.value / (speed * speed * l.ln());
            let cw = r.mean_w.value / (speed * speed * l);
            println!("      alpha/v = {speed:<4} L = {cutoff:<3}  <N>/(a^2 ln L) = {cn:.4}  <w>/(a^2 L) = {cw:.4}");
            if !(0.015..=0.06).contains(&cn) {
                failures.push(format!("alpha/v = {speed}, L = {cutoff}: number ratio {cn:.4}"));
            }
            if !(0.01..=0.04).contains(&cw) {
                failures.push(format!("alpha/v = {speed}, L = {cutoff}: work ratio {cw:.4}"));
            }
        }
    }
    report("<N> ~ 0.03 a^2 ln L and <w> ~ 0.02 a^2 L within a factor 2", started, &failures);
}

fn row_at(rows: &[SpeedRow], speed: f64) -> &SpeedRow {
    rows.iter()
        .find(|r| (r.alpha_over_v - speed).abs() < 1e-12)
        .unwrap_or_else(|| panic!("no fit row for alpha/v = {speed}"))
}

#[test]
fn scaling_regimes() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let base = ModelConfig::new(1.0, LN_2, 1);
    let sweep = sweep_speed(&base, &default_speeds(), &SWEEP_L, FitOptions::default(), |_, _| {}).unwrap();
    for f in &sweep.failures {
        failures.push(format!("alpha/v = {} failed: {}", f.alpha_over_v, f.message));
    }
    let lmax = *SWEEP_L.last().unwrap() as f64;

    let slow = row_at(&sweep.rows, 0.1);
    let [_, b1, b2] = slow.work.coefficients;
    let [_, g1, gl] = slow.number.coefficients;
    println!("      alpha/v = 0.1: beta1 = {b1:.4e}, beta2 = {b2:.4e}, gamma1 = {g1:.4e}, gamma_l = {gl:.4e}");
    if !(b2.abs() * lmax * lmax < 0.1 * b1.abs() * lmax) {
        failures.push(format!("alpha/v = 0.1: beta2 term not negligible ({b2:.3e} vs {b1:.3e})"));
    }
    if !(g1.abs() * lmax < 0.1 * gl.abs() * lmax.ln()) {
        failures.push(format!("alpha/v = 0.1: gamma1 term not negligible ({g1:.3e} vs {gl:.3e})"));
    }

    let fast = row_at(&sweep.rows, 2.0);
    let [_, b1, b2] = fast.work.coefficients;
    let [_, g1, gl] = fast.number.coefficients;
    println!("      alpha/v = 2.0: beta1 = {b1:.4e}, beta2 = {b2:.4e}, gamma1 = {g1:.4e}, gamma_l = {gl:.4e}");
    if !(b2 * lmax * lmax > b1 * lmax) {
        failures.push(format!("alpha/v = 2: quadratic work term does not dominate ({b2:.3e} vs {b1:.3e})"));
    }
    if !(g1 * lmax > gl * lmax.ln()) {
        failures.push(format!("alpha/v = 2: linear number term does not dominate ({g1:.3e} vs {gl:.3e})"));
    }

    // Rise across alpha/v ~ 1: every speed up to 0.9 stays below 5% of the
    // alpha/v = 1.5 coefficients, and both coefficients increase over 1.5, 2, 3.
    let reference = row_at(&sweep.rows, 1.5);
    for r in sweep.rows.iter().filter(|r| r.alpha_over_v <= 0.9 + 1e-12) {
        if !(r.beta2().abs() < 0.05 * reference.beta2() && r.gamma1().abs() < 0.05 * reference.gamma1()) {
            failures.push(format!(
                "alpha/v = {}: beta2 = {:.3e}, gamma1 = {:.3e} not small against alpha/v = 1.5",
                r.alpha_over_v,
                r.beta2(),
                r.gamma1()
            ));
        }
    }
    let trend: Vec<&SpeedRow> = [1.5, 2.0, 3.0].iter().map(|&s| row_at(&sweep.rows, s)).collect();
    for w in trend.windows(2) {
        if !(w[1].beta2() > w[0].beta2() && w[1].gamma1() > w[0].gamma1()) {
            failures.push(format!(
                "coefficients do not increase from alpha/v = {} to {}",
                w[0].alpha_over_v, w[1].alpha_over_v
            ));
        }
    }
    for r in &sweep.rows {
        println!("      alpha/v = {:<4} beta2 = {:>12.4e}  gamma1 = {:>12.4e}", r.alpha_over_v, r.beta2(), r.gamma1());
    }
    report("two scaling regimes over L = 16..512 and the rise of beta2, gamma1 across alpha/v ~ 1", started, &failures);
}

#[test]
fn number_moments_flip_invariance() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut max_work_rel = 0.0f64;
    for cutoff in [8, 16] {
        for speed in [0.5, 2.0] {
            let fwd = run_point(&ModelConfig::new(speed, LN_2, cutoff)).unwrap();
            let bwd = run_point(&ModelConfig::new(-speed, -LN_2, cutoff)).unwrap();
            for (name, a, b) in [
                ("<N>", fwd.mean_n.value, bwd.mean_n.value),
                ("<N^2>", fwd.m2_n.value, bwd.m2_n.value),
            ] {
                let r = rel_diff(a, b);
                if r > 1e-8 {
                    failures.push(format!("L = {cutoff}, alpha/v = {speed}: {name} differs by {r:.3e}"));
                }
            }
            max_work_rel = max_work_rel.max(rel_diff(fwd.mean_w.value, bwd.mean_w.value));
        }
    }
    println!("      largest relative change of <w> under the flip: {max_work_rel:.3e}");
    if !(max_work_rel > 1e-3) {
        failures.push(format!("work mean never changes by more than 1e-3 ({max_work_rel:.3e})"));
    }
    report("number moments invariant under (alpha/v, delta_l) -> -(alpha/v, delta_l)", started, &failures);
}

#[test]
fn structural_invariants() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut check = |ok: bool, msg: String| {
        if !ok {
            failures.push(msg);
        }
    };
    let configs = [
        ModelConfig::new(0.1, LN_2, 2),
        ModelConfig::new(2.0, LN_2, 3),
        ModelConfig::new(-0.7, -1.1, 5),
        ModelConfig::new(3.0, 0.4, 16),
        ModelConfig::new(1.0, LN_2, 32),
        ModelConfig::new(2.0, LN_2, 128),
    ];
    let u_box: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.25).collect();
    for cfg in configs {
        let sol = diagonalize(&build_quadratic_form(&cfg).unwrap()).unwrap();
        let t = evolve(&sol, cfg.delta_l);
        let rs = canonical_residuals(&sol).max();
        let rt = canonical_residuals(&t).max();
        check(rs <= 1e-9 && rt <= 1e-9, format!("{cfg}: canonical residuals {rs:.2e}, {rt:.2e}"));

        let (_, state) = prepare_state(&cfg).unwrap();
        check(state.skew_defect <= 1e-8, format!("{cfg}: G skew defect {:.2e}", state.skew_defect));

        let small = cfg.cutoff <= 32;
        let us: Vec<f64> = if small { u_box.clone() } else { vec![-10.0, -0.5, 0.0, 0.5, 10.0] };
        for obs in [Observable::Work, Observable::Number] {
            let vals = char_values(&state, obs, &us, BranchOptions::default()).unwrap();
            for (u, v) in us.iter().zip(&vals) {
                if *u == 0.0 {
                    check((v.re, v.im) == (1.0, 0.0), format!("{cfg}: chi(0) = {v}"));
                }
                check(v.norm() <= 1.0 + 1e-10, format!("{cfg}, {obs:?}, u = {u}: |chi| = {}", v.norm()));
            }
        }
        let period = char_values(&state, Observable::Number, &[PI], BranchOptions::default()).unwrap()[0];
        check((period - 1.0).norm() <= 1e-10, format!("{cfg}: chi_N(pi) = {period}"));

        let pn = number_distribution(&state).unwrap();
        let odd: f64 = pn.iter().skip(1).step_by(2).map(|p| p.abs()).sum();
        let total: f64 = pn.iter().sum();
        check(odd == 0.0 && (total - 1.0).abs() <= 1e-10, format!("{cfg}: number distribution odd {odd:.2e}, sum {total}"));
        check(pn.iter().all(|&p| p >= -1e-12), format!("{cfg}: negative number probability"));

        if cfg.cutoff <= 32 {
            let pw = work_distribution(&state, false).unwrap();
            let total: f64 = pw.iter().sum();
            check((total - 1.0).abs() <= 1e-8, format!("{cfg}: work distribution sums to {total}"));
            check(pw.iter().all(|&p| p >= -1e-9), format!("{cfg}: negative work probability"));
        }
    }
    let mut worst = 0.0f64;
    for m in -6..=6 {
        for n in -6..=6 {
            let q = coupling_quadrature(m, n, 1.7, 0.3, 0.4, 64).unwrap();
            let d = (q - coupling_element(m, n)).abs();
            worst = worst.max(d);
            check(d <= 1e-8, format!("M({m},{n}): quadrature differs by {d:.2e}"));
        }
    }
    println!("      max |closed form - quadrature| on [-6, 6]^2 = {worst:.2e}");
    report("structural invariants (canonical, skew, chi bounds, distributions, coupling)", started, &failures);
}

#[test]
fn zero_expansion_sweep_is_silent() {
    let started = Instant::now();
    let t = sweep_cutoff(&ModelConfig::new(0.0, 0.0, 1), &[2, 4, 8]).unwrap();
    let failures: Vec<String> = t
        .rows()
        .iter()
        .filter(|r| r.mean_w != 0.0 || r.m2_w != 0.0 || r.mean_n != 0.0 || r.m2_n != 0.0)
        .map(|r| format!("L = {}: nonzero moments", r.cutoff))
        .collect();
    report("static wall produces no work or particles", started, &failures);
}
