//! Built-in correctness suites: exhaustive-oracle agreement, extremal
//! geodesic checks and polymer ordering, on freshly sampled small fields.

use serde_json::json;

use lpplab_core::field::brute::{
    brute_force_constrained, brute_force_energy, enumerate_geodesics, EXHAUSTIVE_GUARD,
};
use lpplab_core::field::dp::{constrained_energy_by, energy, geodesic_pair};
use lpplab_core::lab::seed::splitmix64;
use lpplab_core::{polymer, sample_field, PlanePoint, Region, ScaledPoint, Side};

use crate::AppResult;

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Oracle equivalence on random small fields.
fn oracle_suite(cases: usize) -> Result<usize, String> {
    let region = Region::rectangle(0.0, 4.0, 0.0, 4.0).map_err(|e| e.to_string())?;
    let u = PlanePoint::new(0.0, 0.0);
    let v = PlanePoint::new(4.0, 4.0);
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < cases {
        seed += 1;
        if seed > 20 * cases as u64 {
            return Err("not enough usable random instances".into());
        }
        let field = sample_field(region, 0.5, seed).map_err(|e| e.to_string())?;
        if field.len() > EXHAUSTIVE_GUARD {
            continue;
        }
        let fast = energy(&field, u, v).map_err(|e| e.to_string())?;
        let slow = brute_force_energy(&field, u, v).map_err(|e| e.to_string())?;
        if fast != slow {
            return Err(format!("energy mismatch on seed {seed}: {fast} vs {slow}"));
        }
        let band = |p: &PlanePoint| (p.a - p.b).abs() <= 1.5;
        let fast_c = constrained_energy_by(&field, u, v, band).map_err(|e| e.to_string())?;
        let slow_c = brute_force_constrained(&field, u, v, band).map_err(|e| e.to_string())?;
        if fast_c != slow_c {
            return Err(format!(
                "constrained mismatch on seed {seed}: {fast_c} vs {slow_c}"
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Extremal geodesics against the enumerated set.
fn extremality_suite(cases: usize) -> Result<usize, String> {
    let region = Region::rectangle(0.0, 4.0, 0.0, 4.0).map_err(|e| e.to_string())?;
    let u = PlanePoint::new(0.0, 0.0);
    let v = PlanePoint::new(4.0, 4.0);
    let mut checked = 0;
    let mut seed = 1_000_000u64;
    while checked < cases {
        seed += 1;
        if seed > 1_000_000 + 20 * cases as u64 {
            return Err("not enough usable random instances".into());
        }
        let field = sample_field(region, 0.5, seed).map_err(|e| e.to_string())?;
        if field.len() > EXHAUSTIVE_GUARD {
            continue;
        }
        let geos = enumerate_geodesics(&field, u, v).map_err(|e| e.to_string())?;
        let (upper, lower) = geodesic_pair(&field, u, v).map_err(|e| e.to_string())?;
        if !geos.contains(&upper) || !geos.contains(&lower) {
            return Err(format!("extremal chain not a geodesic on seed {seed}"));
        }
        for g in &geos {
            let mut grid: Vec<f64> = g.vertices().iter().map(|p| p.a).collect();
            grid.extend(upper.vertices().iter().map(|p| p.a));
            for &a in &grid {
                let hi = upper.eval_at_a(a).map_err(|e| e.to_string())?;
                let lo = lower.eval_at_a(a).map_err(|e| e.to_string())?;
                let mid = g.eval_at_a(a).map_err(|e| e.to_string())?;
                if mid > hi + 1e-9 || mid < lo - 1e-9 {
                    return Err(format!("extremality violated on seed {seed}"));
                }
            }
        }
        checked += 1;
    }
    Ok(checked)
}

/// Leftmost polymers of nested endpoints stay ordered at shared times.
fn ordering_suite(cases: usize) -> Result<usize, String> {
    let n = 40.0f64;
    let region = Region::diagonal_strip(n, 5.0 * n.powf(2.0 / 3.0)).map_err(|e| e.to_string())?;
    for case in 0..cases {
        let seed = 2_000_000 + case as u64;
        let field = sample_field(region, 1.0, seed).map_err(|e| e.to_string())?;
        let x1 = -0.4 + 0.3 * unit(splitmix64(seed ^ 1));
        let x2 = x1 + 0.5 * unit(splitmix64(seed ^ 2));
        let y1 = -0.4 + 0.3 * unit(splitmix64(seed ^ 3));
        let y2 = y1 + 0.5 * unit(splitmix64(seed ^ 4));
        let p1 = polymer(
            &field,
            n,
            ScaledPoint::new(x1, 0.0),
            ScaledPoint::new(y1, 1.0),
            Side::Leftmost,
        )
        .map_err(|e| e.to_string())?;
        let p2 = polymer(
            &field,
            n,
            ScaledPoint::new(x2, 0.0),
            ScaledPoint::new(y2, 1.0),
            Side::Leftmost,
        )
        .map_err(|e| e.to_string())?;
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let a = p1.eval(t).map_err(|e| e.to_string())?;
            let b = p2.eval(t).map_err(|e| e.to_string())?;
            if a > b + 1e-9 {
                return Err(format!("ordering violated on seed {seed} at t={t}"));
            }
        }
    }
    Ok(cases)
}

pub fn run() -> AppResult<()> {
    let oracle = oracle_suite(200).map_err(crate::AppError::Usage)?;
    let extremality = extremality_suite(100).map_err(crate::AppError::Usage)?;
    let ordering = ordering_suite(100).map_err(crate::AppError::Usage)?;
    crate::emit(json!({
        "command": "selftest",
        "version": env!("CARGO_PKG_VERSION"),
        "checks": {
            "oracle_equivalence": oracle,
            "geodesic_extremality": extremality,
            "polymer_ordering": ordering,
        },
        "passed": true,
    }));
    Ok(())
}
