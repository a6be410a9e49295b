//! Calibration pilot: throughput measurements and reduced-size dry runs of
//! the statistical experiments, printing the quantities the acceptance
//! campaigns depend on. Not part of the test suite.

use std::time::Instant;

use lpplab_core::lab::report::{analyze, auto_tail};
use lpplab_core::lab::stats::{fit_power_law, fit_tail_exponent, ks_distance, median, quantile};
use lpplab_core::lab::{collect_stat, run_campaign, Experiment, ExperimentConfig};
use lpplab_core::lab::tw::tw_reference_sample;

fn args_flag(name: &str) -> bool {
    std::env::args().any(|a| a == name)
}

fn small_cfg(experiment: Experiment, n: f64, replicas: usize, k: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.n_values = vec![n];
    cfg.replicas = replicas;
    cfg.k_trunc = k;
    cfg.base_seed = 20250810;
    cfg
}

fn throughput() {
    for (reach, k) in [(2000.0f64, 3.0), (4000.0, 3.0)] {
        let w = k * reach.powf(2.0 / 3.0);
        let region = lpplab_core::Region::diagonal_strip(reach, w).unwrap();
        let t0 = Instant::now();
        let field = lpplab_core::sample_field(region, 1.0, 1).unwrap();
        let t1 = Instant::now();
        let u = lpplab_core::PlanePoint::new(0.0, 0.0);
        let v = lpplab_core::PlanePoint::new(reach, reach);
        let x = lpplab_core::field::dp::energy(&field, u, v).unwrap();
        let t2 = Instant::now();
        let (up, _lo) = lpplab_core::field::dp::geodesic_pair(&field, u, v).unwrap();
        let t3 = Instant::now();
        let off = lpplab_core::field::dp::min_exit_offset(&field, u, v).unwrap();
        let t4 = Instant::now();
        println!(
            "reach={reach} pts={} X={x} |geo|={} off={off:.1} gen={:?} energy={:?} pair={:?} minexit={:?} (ns/pt gen {:.0} energy {:.0})",
            field.len(),
            up.energy(),
            t1 - t0,
            t2 - t1,
            t3 - t2,
            t4 - t3,
            (t1 - t0).as_nanos() as f64 / field.len() as f64,
            (t2 - t1).as_nanos() as f64 / field.len() as f64,
        );
    }
}

fn tf_tail(n: f64, replicas: usize) {
    let mut cfg = small_cfg(Experiment::TfTail, n, replicas, 4.0);
    cfg.t_values = vec![1.0];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let tfs = collect_stat(&results, 0, "tf");
    println!(
        "tf_tail n={n} reps={replicas} took {:?}: median={:.4} q90={:.4} q99={:.4} q999={:.4} max={:.4}",
        t0.elapsed(),
        median(&tfs),
        quantile(&tfs, 0.9),
        quantile(&tfs, 0.99),
        quantile(&tfs, 0.999),
        quantile(&tfs, 1.0),
    );
    for k in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let p = tfs.iter().filter(|&&x| x >= k).count() as f64 / tfs.len() as f64;
        println!("  P(TF>={k}) = {p:.5}");
    }
    let te = auto_tail(&tfs).unwrap();
    println!("  auto thresholds: {:?}", te.thresholds);
    match fit_tail_exponent(&te) {
        Ok(fit) => println!("  tail exponent fit = {:.3} (stderr {:.3})", fit.slope, fit.stderr),
        Err(e) => println!("  tail fit failed: {e}"),
    }
}

fn weight_tail(n: f64, replicas: usize) {
    let mut cfg = small_cfg(Experiment::WeightTail, n, replicas, 3.0);
    cfg.t_values = vec![1.0];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let ws = collect_stat(&results, 0, "w");
    let mean = ws.iter().sum::<f64>() / ws.len() as f64;
    println!(
        "weight_tail n={n} reps={replicas} took {:?}: mean={mean:.4} q01={:.3} q50={:.3} q99={:.3}",
        t0.elapsed(),
        quantile(&ws, 0.01),
        median(&ws),
        quantile(&ws, 0.99),
    );
    let lower: Vec<f64> = ws.iter().map(|w| -w).collect();
    let te = auto_tail(&lower).unwrap();
    println!("  lower-tail thresholds: {:?}", te.thresholds);
    match fit_tail_exponent(&te) {
        Ok(fit) => println!("  lower tail exponent = {:.3} (stderr {:.3})", fit.slope, fit.stderr),
        Err(e) => println!("  lower tail fit failed: {e}"),
    }
    let te_up = auto_tail(&ws).unwrap();
    match fit_tail_exponent(&te_up) {
        Ok(fit) => println!("  upper tail exponent = {:.3} (stderr {:.3})", fit.slope, fit.stderr),
        Err(e) => println!("  upper tail fit failed: {e}"),
    }
}

fn min_tf(n: f64, replicas: usize) {
    let mut cfg = small_cfg(Experiment::MinTfLower, n, replicas, 3.0);
    cfg.t_values = vec![1.0];
    cfg.s_or_k_values = vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let crits = collect_stat(&results, 0, "s_crit");
    println!("min_tf n={n} reps={replicas} took {:?}:", t0.elapsed());
    for &s in &cfg.s_or_k_values {
        let p = crits.iter().filter(|&&c| c > s).count() as f64 / crits.len() as f64;
        println!("  P(every geodesic exits {s}) = {p:.5}");
    }
}

fn slopes(n: f64, replicas: usize) {
    let mut cfg = small_cfg(Experiment::TfTail, n, replicas, 4.0);
    cfg.t_values = vec![0.5, 0.25, 0.125, 0.0625, 0.03125];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let pts: Vec<(f64, f64)> = cfg
        .t_values
        .iter()
        .enumerate()
        .map(|(pi, &t)| (t, median(&collect_stat(&results, pi, "tf"))))
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    println!(
        "tf median scaling n={n} reps={replicas} took {:?}: slope={:.4} pts={:?}",
        t0.elapsed(),
        fit.slope,
        pts
    );

    let mut cfg = small_cfg(Experiment::Modulus, n, replicas, 4.0);
    cfg.t_values = vec![0.25, 0.125, 0.0625, 0.03125, 0.015625];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let pts: Vec<(f64, f64)> = cfg
        .t_values
        .iter()
        .map(|&t| {
            (
                t,
                median(&collect_stat(&results, 0, &format!("modulus@{t}"))),
            )
        })
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    println!(
        "modulus scaling n={n} reps={replicas} took {:?}: slope={:.4} pts={:?}",
        t0.elapsed(),
        fit.slope,
        pts
    );

    let mut cfg = small_cfg(Experiment::WeightIncrement, n, replicas, 3.0);
    cfg.t_values = vec![0.25, 0.125, 0.0625, 0.03125, 0.015625];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let pts: Vec<(f64, f64)> = cfg
        .t_values
        .iter()
        .map(|&t| {
            (
                t,
                median(&collect_stat(&results, 0, &format!("wginc@{t}"))),
            )
        })
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    println!(
        "wginc scaling n={n} reps={replicas} took {:?}: slope={:.4} pts={:?}",
        t0.elapsed(),
        fit.slope,
        pts
    );
}

fn curvature(n: f64, replicas: usize) {
    let xs = [0.0, 0.5, 1.0, 1.5];
    let t0 = Instant::now();
    let rows = lpplab_core::lab::curvature_profile(n, &xs, replicas, 3, 4.5, 1.0).unwrap();
    println!("curvature n={n} reps={replicas} took {:?}:", t0.elapsed());
    let w0 = rows[0].1;
    for (x, w) in rows {
        println!("  x={x}: mean={w:.4} drop={:.4} x^2={:.4}", w0 - w, x * x);
    }
}

fn tw_and_scaling(replicas: usize) {
    let t0 = Instant::now();
    let mut cfg = small_cfg(Experiment::TwConvergence, 1000.0, replicas, 3.0);
    cfg.n_values = vec![500.0, 1000.0];
    let results = run_campaign(&cfg).unwrap();
    let w0 = collect_stat(&results, 0, "w");
    let w1 = collect_stat(&results, 1, "w");
    let reference = tw_reference_sample(replicas, 400, 99).unwrap();
    println!(
        "tw n=500/1000 reps={replicas} took {:?}: KS(500,1000)={:.4} KS(1000,TW)={:.4} mean1000={:.4}",
        t0.elapsed(),
        ks_distance(&w0, &w1).unwrap(),
        ks_distance(&w1, &reference).unwrap(),
        w1.iter().sum::<f64>() / w1.len() as f64,
    );

    let mut cfg = small_cfg(Experiment::ScalingPrinciple, 2000.0, replicas, 3.0);
    cfg.t_values = vec![0.25];
    let t0 = Instant::now();
    let results = run_campaign(&cfg).unwrap();
    let a = collect_stat(&results, 0, "w_rescaled");
    let b = collect_stat(&results, 1, "w_rescaled");
    println!(
        "scaling principle n=2000 t=0.25 reps={replicas} took {:?}: KS={:.4}",
        t0.elapsed(),
        ks_distance(&a, &b).unwrap(),
    );
}

fn tf_tail_trunc_check(n: f64, replicas: usize) {
    for k in [1.5, 3.0] {
        let mut cfg = small_cfg(Experiment::TfTail, n, replicas, k);
        cfg.t_values = vec![1.0];
        let t0 = Instant::now();
        let results = run_campaign(&cfg).unwrap();
        let tfs = collect_stat(&results, 0, "tf");
        let te = auto_tail(&tfs).unwrap();
        let fit = fit_tail_exponent(&te).unwrap();
        println!(
            "tf_tail n={n} k_trunc={k} reps={replicas} took {:?}: median={:.4} q999={:.4} fit={:.3}",
            t0.elapsed(),
            median(&tfs),
            quantile(&tfs, 0.999),
            fit.slope,
        );
    }
}

fn main() {
    println!("== throughput ==");
    throughput();
    if args_flag("--final") {
        println!("== slopes (n=2000, 200 reps) ==");
        slopes(2000.0, 200);
        println!("== tf tail truncation check (n=2000) ==");
        tf_tail_trunc_check(2000.0, 2500);
        println!("== weight tail (n=2000) ==");
        weight_tail(2000.0, 2500);
        println!("== min tf (n=2000) ==");
        min_tf(2000.0, 2000);
        println!("== curvature (n=2000) ==");
        curvature(2000.0, 300);
        println!("== tw 1000/4000 ==");
        {
            let t0 = Instant::now();
            let mut cfg = small_cfg(Experiment::TwConvergence, 1000.0, 800, 2.0);
            cfg.n_values = vec![1000.0, 4000.0];
            let results = run_campaign(&cfg).unwrap();
            let w0 = collect_stat(&results, 0, "w");
            let w1 = collect_stat(&results, 1, "w");
            let reference = tw_reference_sample(800, 400, 99).unwrap();
            println!(
                "tw n=1000/4000 reps=800 took {:?}: KS(1000,4000)={:.4} KS(4000,TW)={:.4} mean4000={:.4}",
                t0.elapsed(),
                ks_distance(&w0, &w1).unwrap(),
                ks_distance(&w1, &reference).unwrap(),
                w1.iter().sum::<f64>() / w1.len() as f64,
            );
        }
        return;
    }
    if args_flag("--full") {
        println!("== tf tail (n=2000) ==");
        tf_tail(2000.0, 4000);
        println!("== weight tail (n=1000) ==");
        weight_tail(1000.0, 6000);
        println!("== min tf (n=1000) ==");
        min_tf(1000.0, 6000);
        println!("== slopes (n=2000) ==");
        slopes(2000.0, 100);
        println!("== curvature (n=2000) ==");
        curvature(2000.0, 150);
        println!("== tw + scaling ==");
        tw_and_scaling(1000);
    } else {
        println!("== tf tail (n=500) ==");
        tf_tail(500.0, 2000);
        println!("== weight tail (n=500) ==");
        weight_tail(500.0, 4000);
        println!("== min tf (n=500) ==");
        min_tf(500.0, 4000);
        println!("== slopes (n=1000) ==");
        slopes(1000.0, 60);
        println!("== curvature (n=1000) ==");
        curvature(1000.0, 100);
        println!("== tw + scaling ==");
        tw_and_scaling(600);
    }
    let _ = analyze; // quiet unused when sections are trimmed
}
