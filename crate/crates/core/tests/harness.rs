use std::f64::consts::LN_2;

use dce_core::harness::{
    fit_scaling, run_point, sweep_cutoff, sweep_speed, FitOptions, SweepTable,
};
use dce_core::stats::Observable;
use dce_core::{Error, ModelConfig};

#[test]
fn slow_wall_at_moderate_cutoff() {
    let r = run_point(&ModelConfig::new(0.1, LN_2, 64)).unwrap();
    let n_ref = 0.03 * 0.01 * 64f64.ln();
    let w_ref = 0.02 * 0.01 * 64.0;
    assert!(r.mean_n.value > 0.5 * n_ref && r.mean_n.value < 2.0 * n_ref, "{}", r.mean_n.value);
    assert!(r.mean_w.value > 0.5 * w_ref && r.mean_w.value < 2.0 * w_ref, "{}", r.mean_w.value);
    assert_eq!(r.work_unit, "pi*v/l_final");
}

#[test]
fn sweeps_are_deterministic() {
    let base = ModelConfig::new(1.3, 0.4, 1);
    let a = sweep_cutoff(&base, &[4, 8, 16, 32]).unwrap().to_csv_string().unwrap();
    let b = sweep_cutoff(&base, &[4, 8, 16, 32]).unwrap().to_csv_string().unwrap();
    assert_eq!(a, b);
    let back = SweepTable::read_csv(a.as_bytes()).unwrap();
    assert_eq!(back.to_csv_string().unwrap(), a);
}

#[test]
fn failing_point_aborts_with_partial_rows() {
    let base = ModelConfig::new(0.0, 0.3, 1);
    match sweep_cutoff(&base, &[2, 4]) {
        Err(Error::SweepAborted { cutoff, completed, source }) => {
            assert_eq!(cutoff, 2);
            assert!(completed.is_empty());
            assert!(source.is_validation());
        }
        other => panic!("expected an aborted sweep, got {other:?}"),
    }
}

#[test]
fn fits_separate_the_regimes() {
    let ls = [16, 32, 64, 128];
    let slow = sweep_cutoff(&ModelConfig::new(0.1, LN_2, 1), &ls).unwrap();
    let fast = sweep_cutoff(&ModelConfig::new(2.0, LN_2, 1), &ls).unwrap();
    let lmax = 128.0;
    let ws = fit_scaling(&slow, Observable::Work).unwrap();
    assert!(ws.fast().abs() * lmax * lmax < 0.1 * ws.slow().abs() * lmax);
    let wf = fit_scaling(&fast, Observable::Work).unwrap();
    assert!(wf.fast() * lmax * lmax > wf.slow() * lmax);
    let nf = fit_scaling(&fast, Observable::Number).unwrap();
    assert!(nf.fast() * lmax > nf.slow() * lmax.ln());
}

#[test]
fn number_fits_ignore_direction() {
    let base = ModelConfig::new(1.0, LN_2, 1);
    let ls = [16, 24, 32, 48, 64];
    let sweep = sweep_speed(&base, &[-1.5, 1.5, -0.7, 0.7], &ls, FitOptions::default(), |_, _| {}).unwrap();
    assert!(sweep.failures.is_empty());
    for pair in sweep.rows.chunks(4) {
        let by = |s: f64| pair.iter().find(|r| r.alpha_over_v == s).unwrap();
        for s in [0.7, 1.5] {
            let (a, b) = (by(s).gamma1(), by(-s).gamma1());
            assert!((a - b).abs() <= 1e-6, "{s}: {a} vs {b}");
        }
    }
    // Rows are keyed by speed, not by completion order.
    let speeds: Vec<f64> = sweep.rows.iter().map(|r| r.alpha_over_v).collect();
    assert_eq!(speeds, vec![-1.5, -0.7, 0.7, 1.5]);
}
