//! Reproducible Monte Carlo campaigns over the scaled model.
//!
//! A campaign is described by an [`ExperimentConfig`]; running it produces
//! one [`ReplicaResult`] per (parameter combination, replica), each fully
//! determined by the derived seed of that cell. Replicas are independent
//! tasks with no shared state, so any worker count yields byte-identical
//! results.

pub mod report;
pub mod seed;
pub mod stats;
pub mod tw;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dp, sample_field, PointField, Region};
use crate::scaled::profile::{weight_profile, WeightProfile};
use crate::scaled::{
    mtf_estimate, polymer, polymer_pair, to_unscaled, weight, Polymer, ScaledPoint, Side,
};

/// The statistical experiments the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Modulus of continuity of a unit-lifetime polymer path.
    Modulus,
    /// Modulus of continuity of the weight profile on `[1, 2]`.
    WeightIncrement,
    /// Mesh lower bound for the maximum fluctuation over short polymers.
    MtfScaling,
    /// Transversal fluctuation of the polymer between `(0,0)` and `(0,t)`.
    TfTail,
    /// Point-to-point weight samples for tail fits.
    WeightTail,
    /// Mean weight as a function of the starting abscissa.
    Curvature,
    /// Weight samples across scale parameters for distributional checks.
    TwConvergence,
    /// Equality in law of rescaled short-lifetime and unit-lifetime weights.
    ScalingPrinciple,
    /// Minimal strip width containing some geodesic, for the all-geodesic
    /// escape probability.
    MinTfLower,
}

impl Experiment {
    pub fn id(self) -> u64 {
        match self {
            Experiment::Modulus => 1,
            Experiment::WeightIncrement => 2,
            Experiment::MtfScaling => 3,
            Experiment::TfTail => 4,
            Experiment::WeightTail => 5,
            Experiment::Curvature => 6,
            Experiment::TwConvergence => 7,
            Experiment::ScalingPrinciple => 8,
            Experiment::MinTfLower => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Modulus => "modulus",
            Experiment::WeightIncrement => "weight_increment",
            Experiment::MtfScaling => "mtf_scaling",
            Experiment::TfTail => "tf_tail",
            Experiment::WeightTail => "weight_tail",
            Experiment::Curvature => "curvature",
            Experiment::TwConvergence => "tw_convergence",
            Experiment::ScalingPrinciple => "scaling_principle",
            Experiment::MinTfLower => "min_tf_lower",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "modulus" => Experiment::Modulus,
            "weight_increment" => Experiment::WeightIncrement,
            "mtf_scaling" => Experiment::MtfScaling,
            "tf_tail" => Experiment::TfTail,
            "weight_tail" => Experiment::WeightTail,
            "curvature" => Experiment::Curvature,
            "tw_convergence" => Experiment::TwConvergence,
            "scaling_principle" => Experiment::ScalingPrinciple,
            "min_tf_lower" => Experiment::MinTfLower,
            _ => return None,
        })
    }
}

pub const DEFAULT_K_TRUNC: f64 = 12.0;
pub const DEFAULT_PSI: f64 = 4.0;
pub const DEFAULT_POINT_CAP: f64 = 5e7;
pub const DEFAULT_REFINE: u32 = 4;

fn default_k_trunc() -> f64 {
    DEFAULT_K_TRUNC
}
fn default_psi() -> f64 {
    DEFAULT_PSI
}
fn default_point_cap() -> f64 {
    DEFAULT_POINT_CAP
}
fn default_refine() -> u32 {
    DEFAULT_REFINE
}

/// Full description of a Monte Carlo campaign.
///
/// The meaning of the value lists depends on the experiment: `t_values`
/// are lifetimes or increment sizes, `s_or_k_values` are strip widths,
/// tail thresholds or starting abscissas. `k_trunc` controls the sampled
/// strip: fields live within `|a - b| <= 2 k_trunc R^(2/3)` of the
/// diagonal, an exactness tradeoff justified by the cubic-exponential
/// decay of transversal excursions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub s_or_k_values: Vec<f64>,
    pub replicas: usize,
    pub base_seed: u64,
    #[serde(default = "default_k_trunc")]
    pub k_trunc: f64,
    #[serde(default = "default_psi")]
    pub psi: f64,
    #[serde(default = "default_point_cap")]
    pub point_cap: f64,
    #[serde(default = "default_refine")]
    pub refine: u32,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            n_values: Vec::new(),
            t_values: vec![1.0],
            s_or_k_values: vec![1.0],
            replicas: 1,
            base_seed: 0,
            k_trunc: DEFAULT_K_TRUNC,
            psi: DEFAULT_PSI,
            point_cap: DEFAULT_POINT_CAP,
            refine: DEFAULT_REFINE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.t_values.is_empty() || self.s_or_k_values.is_empty() {
            return Err(Error::InvalidParameter(
                "n_values, t_values and s_or_k_values must be non-empty".into(),
            ));
        }
        if !(self.k_trunc > 0.0 && self.psi > 0.0 && self.point_cap > 0.0) {
            return Err(Error::InvalidParameter(
                "k_trunc, psi and point_cap must be positive".into(),
            ));
        }
        if self.n_values.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::InvalidParameter("scale parameters must be > 0".into()));
        }
        match self.experiment {
            Experiment::Modulus | Experiment::WeightIncrement => {
                if self.t_values.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
                    return Err(Error::InvalidParameter(
                        "increment sizes must lie in (0, 1)".into(),
                    ));
                }
            }
            Experiment::MtfScaling => {
                if self.t_values.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
                    return Err(Error::InvalidParameter("lifetimes must lie in (0, 1]".into()));
                }
                if self.n_values.iter().any(|&n| !(n > self.psi.powi(3))) {
                    return Err(Error::InvalidParameter("need n > psi^3".into()));
                }
            }
            Experiment::TfTail
            | Experiment::WeightTail
            | Experiment::ScalingPrinciple
            | Experiment::MinTfLower => {
                if self.t_values.iter().any(|&t| !(t > 0.0)) {
                    return Err(Error::InvalidParameter("lifetimes must be positive".into()));
                }
            }
            Experiment::Curvature => {
                if self
                    .s_or_k_values
                    .iter()
                    .any(|&x| x.abs() + 2.0 > self.k_trunc)
                {
                    return Err(Error::InvalidParameter(
                        "starting abscissas must satisfy |x| + 2 <= k_trunc".into(),
                    ));
                }
            }
            Experiment::TwConvergence => {}
        }
        Ok(())
    }

    /// Expand the configuration into its parameter combinations.
    pub fn combos(&self) -> Vec<ParamCombo> {
        let mut out = Vec::new();
        match self.experiment {
            Experiment::Modulus
            | Experiment::WeightIncrement
            | Experiment::MtfScaling
            | Experiment::Curvature
            | Experiment::TwConvergence => {
                for &n in &self.n_values {
                    out.push(ParamCombo { n, t: 1.0, variant: 0 });
                }
            }
            Experiment::TfTail | Experiment::WeightTail | Experiment::MinTfLower => {
                for &n in &self.n_values {
                    for &t in &self.t_values {
                        out.push(ParamCombo { n, t, variant: 0 });
                    }
                }
            }
            Experiment::ScalingPrinciple => {
                for &n in &self.n_values {
                    for &t in &self.t_values {
                        out.push(ParamCombo { n, t, variant: 0 });
                        out.push(ParamCombo { n, t, variant: 1 });
                    }
                }
            }
        }
        out
    }

    /// Diagonal reach of the field a combination samples.
    fn field_reach(&self, combo: &ParamCombo) -> f64 {
        match self.experiment {
            Experiment::Modulus
            | Experiment::MtfScaling
            | Experiment::Curvature
            | Experiment::TwConvergence => combo.n,
            Experiment::WeightIncrement => 2.0 * combo.n,
            Experiment::TfTail
            | Experiment::WeightTail
            | Experiment::ScalingPrinciple
            | Experiment::MinTfLower => combo.n * combo.t,
        }
    }

    /// Expected points per replica field of a combination.
    pub fn estimated_points(&self, combo: &ParamCombo) -> f64 {
        let reach = self.field_reach(combo);
        4.0 * self.k_trunc * reach.powf(5.0 / 3.0)
    }
}

/// One parameter combination of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamCombo {
    pub n: f64,
    pub t: f64,
    /// Distinguishes paired laws inside one experiment (0 unless used).
    pub variant: u8,
}

impl ParamCombo {
    fn hash(&self) -> u64 {
        seed::hash_params(&[self.n, self.t, self.variant as f64])
    }
}

/// Statistics of a single replica, keyed by statistic name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicaResult {
    pub param_index: usize,
    pub replica_index: usize,
    pub derived_seed: u64,
    pub statistics: BTreeMap<String, f64>,
}

fn strip_field(reach: f64, k_trunc: f64, rate: f64, seed: u64) -> Result<PointField> {
    let half_width = k_trunc * reach.powf(2.0 / 3.0);
    sample_field(Region::diagonal_strip(reach, half_width)?, rate, seed)
}

/// Render a parameter into a stable statistic-key suffix.
fn param_key(prefix: &str, value: f64) -> String {
    format!("{prefix}@{value}")
}

/// Run every replica of the campaign. Output is a pure function of the
/// configuration; scheduling and worker count cannot affect it.
pub fn run_campaign(config: &ExperimentConfig) -> Result<Vec<ReplicaResult>> {
    config.validate()?;
    let combos = config.combos();
    for combo in &combos {
        let estimate = config.estimated_points(combo);
        if estimate > config.point_cap {
            return Err(Error::MemoryGuard {
                estimate,
                cap: config.point_cap,
            });
        }
    }
    let tasks: Vec<(usize, usize)> = (0..combos.len())
        .flat_map(|pi| (0..config.replicas).map(move |ri| (pi, ri)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(pi, ri)| run_replica(config, &combos[pi], pi, ri))
        .collect()
}

fn run_replica(
    config: &ExperimentConfig,
    combo: &ParamCombo,
    param_index: usize,
    replica_index: usize,
) -> Result<ReplicaResult> {
    let derived_seed = seed::derive_seed(
        config.base_seed,
        config.experiment.id(),
        combo.hash(),
        replica_index as u64,
    );
    let mut statistics = BTreeMap::new();
    let k = config.k_trunc;
    match config.experiment {
        Experiment::Modulus => {
            let field = strip_field(combo.n, k, 1.0, derived_seed)?;
            let p = polymer(
                &field,
                combo.n,
                ScaledPoint::new(0.0, 0.0),
                ScaledPoint::new(0.0, 1.0),
                Side::Leftmost,
            )?;
            for &t in &config.t_values {
                statistics.insert(param_key("modulus", t), modulus_statistic(&p, t, 256)?);
            }
        }
        Experiment::WeightIncrement => {
            let field = strip_field(2.0 * combo.n, k, 1.0, derived_seed)?;
            let profile = weight_profile(&field, combo.n)?;
            for &t in &config.t_values {
                statistics.insert(
                    param_key("wginc", t),
                    weight_increment_statistic(&profile, t)?,
                );
            }
        }
        Experiment::MtfScaling => {
            let field = strip_field(combo.n, k, 1.0, derived_seed)?;
            for &t in &config.t_values {
                statistics.insert(
                    param_key("mtf", t),
                    mtf_estimate(&field, combo.n, t, config.psi, config.refine)?,
                );
            }
        }
        Experiment::TfTail => {
            let field = strip_field(combo.n * combo.t, k, 1.0, derived_seed)?;
            let (left, right) = polymer_pair(
                &field,
                combo.n,
                ScaledPoint::new(0.0, 0.0),
                ScaledPoint::new(0.0, combo.t),
            )?;
            let tf = left
                .transversal_fluctuation()
                .max(right.transversal_fluctuation());
            statistics.insert("tf".into(), tf);
            statistics.insert("tf_norm".into(), tf / combo.t.powf(2.0 / 3.0));
        }
        Experiment::WeightTail => {
            let field = strip_field(combo.n * combo.t, k, 1.0, derived_seed)?;
            let w = weight(
                &field,
                combo.n,
                ScaledPoint::new(0.0, 0.0),
                ScaledPoint::new(0.0, combo.t),
            )?;
            statistics.insert("w".into(), w);
            statistics.insert("w_norm".into(), w / combo.t.powf(1.0 / 3.0));
        }
        Experiment::Curvature => {
            let ws = curvature_replica(combo.n, &config.s_or_k_values, k, 1.0, derived_seed)?;
            for (&x, w) in config.s_or_k_values.iter().zip(ws) {
                statistics.insert(param_key("w", x), w);
            }
        }
        Experiment::TwConvergence => {
            let field = strip_field(combo.n, k, 1.0, derived_seed)?;
            let w = weight(
                &field,
                combo.n,
                ScaledPoint::new(0.0, 0.0),
                ScaledPoint::new(0.0, 1.0),
            )?;
            statistics.insert("w".into(), w);
        }
        Experiment::ScalingPrinciple => {
            let reach = combo.n * combo.t;
            let field = strip_field(reach, k, 1.0, derived_seed)?;
            let w = if combo.variant == 0 {
                weight(
                    &field,
                    combo.n,
                    ScaledPoint::new(0.0, 0.0),
                    ScaledPoint::new(0.0, combo.t),
                )? / combo.t.powf(1.0 / 3.0)
            } else {
                weight(
                    &field,
                    reach,
                    ScaledPoint::new(0.0, 0.0),
                    ScaledPoint::new(0.0, 1.0),
                )?
            };
            statistics.insert("w_rescaled".into(), w);
        }
        Experiment::MinTfLower => {
            let field = strip_field(combo.n * combo.t, k, 1.0, derived_seed)?;
            let u = to_unscaled(combo.n, ScaledPoint::new(0.0, 0.0));
            let v = to_unscaled(combo.n, ScaledPoint::new(0.0, combo.t));
            let offset = dp::min_exit_offset(&field, u, v)?;
            statistics.insert(
                "s_crit".into(),
                offset / (2.0 * combo.n.powf(2.0 / 3.0)),
            );
        }
    }
    Ok(ReplicaResult {
        param_index,
        replica_index,
        derived_seed,
        statistics,
    })
}

/// Gather one statistic across the replicas of a parameter combination,
/// ordered by replica index.
pub fn collect_stat(results: &[ReplicaResult], param_index: usize, key: &str) -> Vec<f64> {
    let mut rows: Vec<(usize, f64)> = results
        .iter()
        .filter(|r| r.param_index == param_index)
        .filter_map(|r| r.statistics.get(key).map(|&v| (r.replica_index, v)))
        .collect();
    rows.sort_by_key(|&(ri, _)| ri);
    rows.into_iter().map(|(_, v)| v).collect()
}

/// Largest horizontal displacement over windows of width `t`:
/// `sup_z |p(z + t) - p(z)|` for a unit-lifetime polymer.
///
/// The window difference is piecewise linear in `z` with breakpoints only
/// at vertex times and vertex times shifted by `t`, so augmenting the grid
/// with those makes the evaluation exact.
pub fn modulus_statistic(p: &Polymer, t: f64, grid: usize) -> Result<f64> {
    if p.start().t.abs() > 1e-9 || (p.end().t - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(
            "modulus statistic needs a polymer with lifetime [0, 1]".into(),
        ));
    }
    if !(t > 0.0 && t < 1.0) || grid == 0 {
        return Err(Error::InvalidParameter(format!(
            "window {t} outside (0, 1) or empty grid"
        )));
    }
    let span = 1.0 - t;
    let mut zs: Vec<f64> = (0..=grid).map(|k| k as f64 * span / grid as f64).collect();
    for v in p.vertices() {
        for cand in [v.t, v.t - t] {
            if (0.0..=span).contains(&cand) {
                zs.push(cand);
            }
        }
    }
    let mut best = 0.0f64;
    for z in zs {
        let hi = p.eval((z + t).min(1.0))?;
        let lo = p.eval(z)?;
        best = best.max((hi - lo).abs());
    }
    Ok(best)
}

/// `sup_z |Wgt(z + t) - Wgt(z)|` over `z in [1, 2 - t]`, exact through the
/// piecewise-linear structure of the continuous profile.
pub fn weight_increment_statistic(profile: &WeightProfile, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window {t} outside (0, 1)"
        )));
    }
    let hi_z = 2.0 - t;
    let mut zs = vec![1.0, hi_z];
    for &d in profile.jump_times() {
        for cand in [d, d - t] {
            if (1.0..=hi_z).contains(&cand) {
                zs.push(cand);
            }
        }
    }
    let mut best = 0.0f64;
    for z in zs {
        let hi = profile.eval_wgt((z + t).min(2.0))?;
        let lo = profile.eval_wgt(z)?;
        best = best.max((hi - lo).abs());
    }
    Ok(best)
}

fn curvature_replica(
    n: f64,
    x_values: &[f64],
    k_trunc: f64,
    rate: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let field = strip_field(n, k_trunc, rate, seed)?;
    x_values
        .iter()
        .map(|&x| {
            weight(
                &field,
                n,
                ScaledPoint::new(x, 0.0),
                ScaledPoint::new(0.0, 1.0),
            )
        })
        .collect()
}

/// Monte Carlo mean weight from `(x, 0)` to `(0, 1)` per starting abscissa,
/// with a fresh field per replica shared across the abscissas (common
/// random numbers tighten the mean differences).
pub fn curvature_profile(
    n: f64,
    x_values: &[f64],
    replicas: usize,
    base_seed: u64,
    k_trunc: f64,
    rate: f64,
) -> Result<Vec<(f64, f64)>> {
    if replicas == 0 || x_values.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one replica and one abscissa".into(),
        ));
    }
    let param_hash = seed::hash_params(&[n, rate]);
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = seed::derive_seed(
                base_seed,
                Experiment::Curvature.id(),
                param_hash,
                r as u64,
            );
            curvature_replica(n, x_values, k_trunc, rate, s)
        })
        .collect::<Result<_>>()?;
    Ok(x_values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mean = per_replica.iter().map(|ws| ws[i]).sum::<f64>() / replicas as f64;
            (x, mean)
        })
        .collect())
}

#[cfg(test)]
mod tests;
