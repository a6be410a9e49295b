use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{analyze, results_csv};
use super::seed::{derive_seed, hash_params, splitmix64};
use super::stats::{
    fit_power_law, fit_tail_exponent, ks_distance, median, quantile, TailEstimate,
};
use super::tw::tw_reference_sample;
use super::*;
use crate::error::Error;
use crate::field::{sample_field, Region};

fn small_config(experiment: Experiment) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.n_values = vec![40.0];
    cfg.t_values = vec![0.25, 0.5];
    cfg.s_or_k_values = vec![0.5, 1.0];
    cfg.replicas = 4;
    cfg.base_seed = 7;
    cfg.k_trunc = 5.0;
    cfg
}

#[test]
fn splitmix_is_stable() {
    // Frozen values of the documented mix; the seeding scheme is part of
    // the output contract.
    assert_eq!(splitmix64(0), 0xE220A8397B1DCDAF);
    assert_eq!(splitmix64(1), 0x910A2DEC89025CC1);
    let h = derive_seed(42, 4, hash_params(&[2000.0, 1.0, 0.0]), 3);
    assert_eq!(h, derive_seed(42, 4, hash_params(&[2000.0, 1.0, 0.0]), 3));
    assert_ne!(h, derive_seed(42, 4, hash_params(&[2000.0, 1.0, 0.0]), 4));
    assert_ne!(h, derive_seed(42, 5, hash_params(&[2000.0, 1.0, 0.0]), 3));
}

#[test]
fn ks_distance_examples() {
    let a = [1.0, 2.0, 3.0];
    assert_eq!(ks_distance(&a, &[3.0, 1.0, 2.0]).unwrap(), 0.0);
    assert_eq!(ks_distance(&[1.0, 2.0], &[10.0, 11.0]).unwrap(), 1.0);
    let d = ks_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
    assert!((d - 1.0 / 3.0).abs() < 1e-12);
    assert!(ks_distance(&[], &a).is_err());
}

#[test]
fn power_law_fit_recovers_exact_exponent() {
    let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0]
        .iter()
        .map(|&x| (x, 2.0 * x.sqrt()))
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    assert!((fit.slope - 0.5).abs() < 1e-12);
    assert!((fit.intercept - 2.0f64.ln()).abs() < 1e-12);
    assert!(fit.stderr < 1e-12);
}

#[test]
fn power_law_fit_of_constant_is_flat() {
    let pts = vec![(1.0, 3.0), (2.0, 3.0), (4.0, 3.0)];
    let fit = fit_power_law(&pts).unwrap();
    assert!(fit.slope.abs() < 1e-12);
}

#[test]
fn power_law_fit_with_log_correction_lands_below_two_thirds() {
    let pts: Vec<(f64, f64)> = (4..=10)
        .map(|k| {
            let x = 2.0f64.powi(-k);
            (x, x.powf(2.0 / 3.0) * (1.0 / x).ln().powf(1.0 / 3.0))
        })
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    assert!(
        (0.55..=0.67).contains(&fit.slope),
        "slope {} outside the expected band",
        fit.slope
    );
}

#[test]
fn power_law_fit_rejects_bad_input() {
    assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]).is_err());
}

#[test]
fn tail_exponent_recovers_synthetic_cubic() {
    let thresholds = [1.0, 1.2, 1.5, 2.0];
    let te = TailEstimate {
        thresholds: thresholds.to_vec(),
        survival_probs: thresholds.iter().map(|&s| (-s.powi(3)).exp()).collect(),
    };
    let fit = fit_tail_exponent(&te).unwrap();
    assert!((fit.slope - 3.0).abs() < 1e-9);

    let te = TailEstimate {
        thresholds: thresholds.to_vec(),
        survival_probs: thresholds
            .iter()
            .map(|&s| (-2.0 * s.powf(1.5)).exp())
            .collect(),
    };
    let fit = fit_tail_exponent(&te).unwrap();
    assert!((fit.slope - 1.5).abs() < 1e-9);
}

#[test]
fn tail_exponent_under_binomial_noise() {
    // Survival curve exp(-s^3) observed through 10^4 Bernoulli replicas.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let thresholds: Vec<f64> = (0..8).map(|i| 1.0 + 0.1 * i as f64).collect();
    let replicas = 10_000;
    let mut survival = vec![0usize; thresholds.len()];
    for _ in 0..replicas {
        let u: f64 = rng.gen();
        for (i, &s) in thresholds.iter().enumerate() {
            if u < (-s.powi(3)).exp() {
                survival[i] += 1;
            }
        }
    }
    let te = TailEstimate {
        thresholds,
        survival_probs: survival
            .iter()
            .map(|&c| c as f64 / replicas as f64)
            .collect(),
    }
    .select(0.001, 0.9);
    let fit = fit_tail_exponent(&te).unwrap();
    assert!(
        (2.5..=3.5).contains(&fit.slope),
        "noisy cubic fit {}",
        fit.slope
    );
}

#[test]
fn tail_exponent_drops_degenerate_thresholds() {
    let te = TailEstimate {
        thresholds: vec![0.5, 1.0, 1.5, 2.0, 2.5],
        survival_probs: vec![1.0, 0.4, 0.2, 0.05, 0.0],
    };
    let fit = fit_tail_exponent(&te).unwrap();
    assert_eq!(fit.points.len(), 3);

    let te = TailEstimate {
        thresholds: vec![0.5, 1.0, 1.5],
        survival_probs: vec![1.0, 0.4, 0.0],
    };
    assert!(fit_tail_exponent(&te).is_err());
}

#[test]
fn quantiles_interpolate() {
    let xs = [4.0, 1.0, 3.0, 2.0];
    assert_eq!(median(&xs), 2.5);
    assert_eq!(quantile(&xs, 0.0), 1.0);
    assert_eq!(quantile(&xs, 1.0), 4.0);
}

fn straight_polymer(n: f64, x0: f64, x1: f64) -> Polymer {
    let w = 6.0 * n.powf(2.0 / 3.0);
    let f = sample_field(Region::diagonal_strip(n, w).unwrap(), 1e-12, 0).unwrap();
    polymer(
        &f,
        n,
        ScaledPoint::new(x0, 0.0),
        ScaledPoint::new(x1, 1.0),
        Side::Leftmost,
    )
    .unwrap()
}

#[test]
fn modulus_statistic_of_straight_line() {
    let p = straight_polymer(50.0, -0.4, 0.8);
    let slope = 1.2;
    for t in [0.1, 0.25, 0.5] {
        let m = modulus_statistic(&p, t, 64).unwrap();
        assert!((m - slope * t).abs() < 1e-12, "t {t}: {m}");
    }
}

#[test]
fn modulus_statistic_dominates_single_window() {
    let n = 60.0f64;
    let w = 5.0 * n.powf(2.0 / 3.0);
    for seed in 0..30 {
        let f = sample_field(Region::diagonal_strip(n, w).unwrap(), 1.0, seed).unwrap();
        let p = polymer(
            &f,
            n,
            ScaledPoint::new(0.0, 0.0),
            ScaledPoint::new(0.0, 1.0),
            Side::Leftmost,
        )
        .unwrap();
        let t = 0.3;
        let m = modulus_statistic(&p, t, 128).unwrap();
        let single = (p.eval(t).unwrap() - p.eval(0.0).unwrap()).abs();
        assert!(m >= single - 1e-12, "seed {seed}");
    }
}

#[test]
fn modulus_statistic_matches_dense_grid() {
    let n = 60.0f64;
    let w = 5.0 * n.powf(2.0 / 3.0);
    for seed in 0..100 {
        let f = sample_field(Region::diagonal_strip(n, w).unwrap(), 1.0, seed).unwrap();
        let p = polymer(
            &f,
            n,
            ScaledPoint::new(0.0, 0.0),
            ScaledPoint::new(0.0, 1.0),
            Side::Leftmost,
        )
        .unwrap();
        let t = 0.21;
        let exact = modulus_statistic(&p, t, 16).unwrap();
        let mut dense = 0.0f64;
        let span = 1.0 - t;
        let step = span / 100_000.0;
        for k in 0..=100_000 {
            let z = span * k as f64 / 100_000.0;
            let d = (p.eval((z + t).min(1.0)).unwrap() - p.eval(z).unwrap()).abs();
            dense = dense.max(d);
        }
        // The vertex-augmented sup dominates any grid, and the grid can lag
        // at most one step at the steepest admissible slope.
        assert!(exact >= dense - 1e-9, "seed {seed}: {exact} < {dense}");
        let slope_cap = 2.0 * n.powf(1.0 / 3.0);
        assert!(
            exact - dense <= slope_cap * step + 1e-9,
            "seed {seed}: gap {} above resolution bound",
            exact - dense
        );
    }
}

#[test]
fn weight_increment_statistic_of_empty_profile() {
    let n = 40.0f64;
    let w = 5.0 * (2.0 * n).powf(2.0 / 3.0);
    let f = sample_field(Region::diagonal_strip(2.0 * n, w).unwrap(), 1e-12, 0).unwrap();
    let prof = weight_profile(&f, n).unwrap();
    for t in [0.1, 0.3, 0.6] {
        let got = weight_increment_statistic(&prof, t).unwrap();
        let want = 2.0 * n.powf(2.0 / 3.0) * t;
        assert!((got - want).abs() < 1e-9, "t {t}: {got} vs {want}");
    }
}

#[test]
fn weight_increment_statistic_matches_dense_grid() {
    let n = 50.0f64;
    let w = 5.0 * (2.0 * n).powf(2.0 / 3.0);
    for seed in 0..40 {
        let f = sample_field(Region::diagonal_strip(2.0 * n, w).unwrap(), 1.0, seed).unwrap();
        let prof = weight_profile(&f, n).unwrap();
        let t = 0.37;
        let exact = weight_increment_statistic(&prof, t).unwrap();
        let mut dense = 0.0f64;
        let step = (1.0 - t) / 100_000.0;
        for k in 0..=100_000 {
            let z = 1.0 + (1.0 - t) * k as f64 / 100_000.0;
            let d = (prof.eval_wgt((z + t).min(2.0)).unwrap() - prof.eval_wgt(z).unwrap()).abs();
            dense = dense.max(d);
        }
        assert!(exact >= dense - 1e-9, "seed {seed}: {exact} < {dense}");
        // Steepest profile segment bounds how far a grid can lag the sup.
        let mut nodes = vec![(1.0, prof.eval_wgt(1.0).unwrap())];
        for &d in prof.jump_times() {
            nodes.push((d, prof.eval_wgt(d).unwrap()));
        }
        nodes.push((2.0, prof.eval_wgt(2.0).unwrap()));
        let slope_cap = nodes
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0f64, f64::max);
        assert!(
            exact - dense <= 2.0 * slope_cap * step + 1e-9,
            "seed {seed}: gap {} above resolution bound",
            exact - dense
        );
        let single =
            (prof.eval_wgt(1.0 + t).unwrap() - prof.eval_wgt(1.0).unwrap()).abs();
        assert!(exact >= single - 1e-12);
    }
}

#[test]
fn campaign_runs_are_deterministic() {
    let cfg = small_config(Experiment::TfTail);
    let r1 = run_campaign(&cfg).unwrap();
    let r2 = run_campaign(&cfg).unwrap();
    assert_eq!(results_csv(&cfg, &r1), results_csv(&cfg, &r2));
}

#[test]
fn permuting_parameter_lists_permutes_results() {
    let mut cfg = small_config(Experiment::TfTail);
    cfg.n_values = vec![30.0, 50.0];
    let fwd = run_campaign(&cfg).unwrap();
    let mut rev_cfg = cfg.clone();
    rev_cfg.n_values.reverse();
    let rev = run_campaign(&rev_cfg).unwrap();

    let combos_fwd = cfg.combos();
    let combos_rev = rev_cfg.combos();
    for (pi_f, combo) in combos_fwd.iter().enumerate() {
        let pi_r = combos_rev.iter().position(|c| c == combo).unwrap();
        let a = collect_stat(&fwd, pi_f, "tf");
        let b = collect_stat(&rev, pi_r, "tf");
        assert_eq!(a, b, "combo {combo:?}");
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let cfg = small_config(Experiment::WeightTail);
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool2 = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let r1 = pool1.install(|| run_campaign(&cfg)).unwrap();
    let r2 = pool2.install(|| run_campaign(&cfg)).unwrap();
    assert_eq!(results_csv(&cfg, &r1), results_csv(&cfg, &r2));
}

#[test]
fn memory_guard_refuses_oversized_campaigns() {
    let mut cfg = small_config(Experiment::TwConvergence);
    cfg.n_values = vec![1e6];
    assert!(matches!(
        run_campaign(&cfg),
        Err(Error::MemoryGuard { .. })
    ));
}

#[test]
fn config_validation_catches_bad_lists() {
    let mut cfg = small_config(Experiment::Modulus);
    cfg.t_values = vec![1.5];
    assert!(cfg.validate().is_err());
    let mut cfg = small_config(Experiment::MtfScaling);
    cfg.n_values = vec![10.0];
    cfg.psi = 4.0;
    assert!(cfg.validate().is_err());
    let mut cfg = small_config(Experiment::Curvature);
    cfg.s_or_k_values = vec![10.0];
    assert!(cfg.validate().is_err());
    let mut cfg = small_config(Experiment::TfTail);
    cfg.replicas = 0;
    assert!(cfg.validate().is_err());
}

#[test]
fn min_tf_campaign_statistic_matches_direct_evaluation() {
    let mut cfg = small_config(Experiment::MinTfLower);
    cfg.n_values = vec![40.0];
    cfg.t_values = vec![1.0];
    cfg.replicas = 8;
    let results = run_campaign(&cfg).unwrap();
    let combos = cfg.combos();
    for r in &results {
        let combo = combos[r.param_index];
        let reach = combo.n * combo.t;
        let field = sample_field(
            Region::diagonal_strip(reach, cfg.k_trunc * reach.powf(2.0 / 3.0)).unwrap(),
            1.0,
            r.derived_seed,
        )
        .unwrap();
        let s_crit = r.statistics["s_crit"];
        for s in [0.2, 0.5, 1.1] {
            let want = crate::scaled::min_tf_exceeds(&field, combo.n, 0.0, combo.t, s).unwrap();
            assert_eq!(s_crit > s, want, "seed {}", r.derived_seed);
        }
    }
}

#[test]
fn curvature_profile_smoke() {
    let xs = [-0.5, 0.0, 0.5];
    let rows = curvature_profile(60.0, &xs, 40, 3, 5.0, 1.0).unwrap();
    assert_eq!(rows.len(), 3);
    // Reflection symmetry of the ensemble: the two off-center means agree
    // within a loose Monte Carlo band.
    let diff = (rows[0].1 - rows[2].1).abs();
    assert!(diff < 1.5, "symmetric means differ by {diff}");
    // At x = 0 the mean weight is the largest of the three.
    assert!(rows[1].1 >= rows[0].1 - 0.5 && rows[1].1 >= rows[2].1 - 0.5);
}

#[test]
fn curvature_profile_empty_field_limit() {
    let n = 30.0f64;
    let xs = [0.0, 0.5];
    let rows = curvature_profile(n, &xs, 1, 0, 5.0, 1e-12).unwrap();
    for (_, w) in rows {
        assert!((w + 2.0 * n.powf(2.0 / 3.0)).abs() < 1e-9);
    }
}

#[test]
fn tw_reference_sample_is_deterministic() {
    let a = tw_reference_sample(50, 80, 5).unwrap();
    let b = tw_reference_sample(50, 80, 5).unwrap();
    assert_eq!(a, b);
    let c = tw_reference_sample(50, 80, 6).unwrap();
    assert_ne!(a, c);
}

#[test]
fn tw_reference_mean_is_in_the_pilot_bracket() {
    let samples = tw_reference_sample(100_000, 400, 12).unwrap();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    assert!(
        (-1.85..=-1.70).contains(&mean),
        "reference sample mean {mean}"
    );
}

#[test]
fn tw_reference_converges_across_dimensions() {
    let a = tw_reference_sample(10_000, 100, 21).unwrap();
    let b = tw_reference_sample(10_000, 400, 22).unwrap();
    let d = ks_distance(&a, &b).unwrap();
    assert!(d < 0.05, "KS between dimensions {d}");
}

#[test]
fn survival_probabilities_are_monotone_in_threshold() {
    let samples: Vec<f64> = (0..500).map(|i| (i as f64 * 0.618).sin().abs()).collect();
    let thresholds: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    let te = TailEstimate::from_samples(&samples, &thresholds).unwrap();
    for w in te.survival_probs.windows(2) {
        assert!(w[0] >= w[1]);
    }
}

#[test]
fn results_csv_round_trips_statistics_bit_exactly() {
    let cfg = small_config(Experiment::TfTail);
    let results = run_campaign(&cfg).unwrap();
    let csv = results_csv(&cfg, &results);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (line, r) in lines.zip(&results) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), header.len());
        assert_eq!(cols[0].parse::<usize>().unwrap(), r.param_index);
        assert_eq!(cols[4].parse::<usize>().unwrap(), r.replica_index);
        assert_eq!(cols[5].parse::<u64>().unwrap(), r.derived_seed);
        for (name, value) in header.iter().zip(&cols).skip(6) {
            let parsed: f64 = value.parse().unwrap();
            assert_eq!(parsed, r.statistics[*name], "column {name}");
        }
    }
}

/// The documented summary-JSON schema, spot-checked across experiments.
#[test]
fn summary_json_schema_is_stable() {
    let mut checked = 0;
    for experiment in [
        Experiment::Modulus,
        Experiment::WeightIncrement,
        Experiment::MtfScaling,
        Experiment::TfTail,
        Experiment::WeightTail,
        Experiment::Curvature,
        Experiment::TwConvergence,
        Experiment::ScalingPrinciple,
        Experiment::MinTfLower,
    ] {
        for seed in [1u64, 2] {
            let mut cfg = small_config(experiment);
            cfg.base_seed = seed;
            if experiment == Experiment::MtfScaling {
                cfg.n_values = vec![80.0];
                cfg.t_values = vec![0.5];
                cfg.replicas = 2;
                cfg.refine = 2;
            }
            if experiment == Experiment::Curvature {
                cfg.s_or_k_values = vec![-0.5, 0.0, 0.5];
            }
            let results = run_campaign(&cfg).unwrap();
            let analysis = analyze(&cfg, &results).unwrap();
            let summary = super::report::summary_json(&cfg, &results, &analysis);
            assert_eq!(summary["experiment"], experiment.name());
            assert!(summary["version"].is_string());
            assert_eq!(summary["result_count"], results.len());
            assert_eq!(summary["config"]["base_seed"], seed);
            assert_eq!(
                summary["config"]["replicas"].as_u64().unwrap() as usize,
                cfg.replicas
            );
            assert!(summary["analysis"].is_object());
            assert!(summary["acceptance"].is_array());
            checked += 1;
        }
    }
    assert_eq!(checked, 18);
}

#[test]
fn analysis_json_has_expected_shape() {
    let cfg = small_config(Experiment::MinTfLower);
    let results = run_campaign(&cfg).unwrap();
    let analysis = analyze(&cfg, &results).unwrap();
    let rows = analysis["per_combo"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), cfg.s_or_k_values.len());
    let csv = results_csv(&cfg, &results);
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("param_index,n,t,variant,replica_index,derived_seed"));
    assert!(header.contains("s_crit"));
}
