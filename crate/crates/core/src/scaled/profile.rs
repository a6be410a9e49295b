//! The weight profile of point-to-point energies along the diagonal.
//!
//! For a fixed field, `t -> X(t)` records the maximal chain count from the
//! origin to `(nt, nt)`. It is integer-valued, non-decreasing and right
//! continuous, jumping by exactly one at a.s. distinct times: a new record
//! chain always extends an existing one by a single point, because every
//! strict predecessor of a point enters the growing square earlier. The
//! profile stores the jump structure on the window `t in [1, 2]`, the
//! linear interpolation between jumps, and the recentred scaled form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dp, PlanePoint, PointField, Region};

/// Jump times and values of the diagonal energy profile on `[1, 2]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightProfile {
    n: f64,
    /// Energy at `t = 1` (value of the profile at the window's left edge).
    base: u64,
    /// Strictly increasing jump times in `(1, 2]`.
    jump_times: Vec<f64>,
    /// Profile value at and after each jump; consecutive values differ by 1.
    values: Vec<u64>,
    /// Seed of the field the profile was computed from.
    field_seed: u64,
}

/// Exact jump structure of `t -> X(t)` on `[1, 2]`, computed without a
/// time grid: per-point forward chain lengths are folded into a running
/// maximum along the order in which points enter the growing square.
pub fn weight_profile(field: &PointField, n: f64) -> Result<WeightProfile> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("n {n} must be > 0")));
    }
    let origin = PlanePoint::new(0.0, 0.0);
    let corner = PlanePoint::new(2.0 * n, 2.0 * n);
    if !field.region().covers_span(&origin, &corner) {
        return Err(Error::RegionTooSmall(0.0, 0.0, corner.a, corner.b));
    }

    // (entry time bits, forward length) per eligible point; entry time of a
    // point is max(a, b) / n, when the square first contains it.
    let lengths = dp::forward_lengths(field, origin, corner)?;
    let mut keyed: Vec<(u64, u64)> = lengths
        .iter()
        .map(|(p, f)| ((p.a.max(p.b) / n).to_bits(), *f))
        .collect();
    keyed.sort_unstable();

    let mut base = 0u64;
    let mut jump_times = Vec::new();
    let mut values = Vec::new();
    let mut running = 0u64;
    for (tbits, f) in keyed {
        if f <= running {
            continue;
        }
        debug_assert_eq!(f, running + 1, "records grow by unit steps");
        running = f;
        let t = f64::from_bits(tbits);
        if t <= 1.0 {
            base = running;
        } else if t <= 2.0 {
            jump_times.push(t);
            values.push(running);
        } else {
            break;
        }
    }

    Ok(WeightProfile {
        n,
        base,
        jump_times,
        values,
        field_seed: field.seed(),
    })
}

impl WeightProfile {
    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn field_seed(&self) -> u64 {
        self.field_seed
    }

    /// Profile value at the left edge `t = 1`.
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    fn check_window(&self, t: f64) -> Result<()> {
        if !(1.0..=2.0).contains(&t) {
            return Err(Error::TimeOutOfRange { t, lo: 1.0, hi: 2.0 });
        }
        Ok(())
    }

    /// Raw right-continuous profile value at `t in [1, 2]`.
    pub fn value_at(&self, t: f64) -> Result<u64> {
        self.check_window(t)?;
        let i = self.jump_times.partition_point(|&d| d <= t);
        Ok(if i == 0 { self.base } else { self.values[i - 1] })
    }

    /// Continuous modification: linear between consecutive jump times, with
    /// the window edges `1` and `2` as additional interpolation nodes. Lies
    /// within `[X(t), X(t) + 1]` everywhere.
    pub fn continuous_value_at(&self, t: f64) -> Result<f64> {
        self.check_window(t)?;
        let nodes = self.jump_times.len();
        if nodes == 0 {
            return Ok(self.base as f64);
        }
        let i = self.jump_times.partition_point(|&d| d <= t);
        let (t_lo, v_lo) = if i == 0 {
            (1.0, self.base as f64)
        } else {
            (self.jump_times[i - 1], self.values[i - 1] as f64)
        };
        let (t_hi, v_hi) = if i == nodes {
            (2.0, *self.values.last().expect("nodes > 0") as f64)
        } else {
            (self.jump_times[i], self.values[i] as f64)
        };
        if t_hi == t_lo {
            return Ok(v_hi);
        }
        Ok(v_lo + (t - t_lo) * (v_hi - v_lo) / (t_hi - t_lo))
    }

    /// Recentred and scaled continuous profile:
    /// `n^(-1/3) (Xmod(t) - 2 n t)`. Differs from the point-to-point weight
    /// at `(0, t)` by at most `n^(-1/3)`.
    pub fn eval_wgt(&self, t: f64) -> Result<f64> {
        let xmod = self.continuous_value_at(t)?;
        Ok((xmod - 2.0 * self.n * t) / self.n.powf(1.0 / 3.0))
    }

    /// Jump list as CSV (`d,x` rows) plus a JSON header sidecar carrying
    /// `n`, the field seed and the strip geometry when known.
    pub fn write_csv<P: AsRef<std::path::Path>>(
        &self,
        path: P,
        region: Option<&Region>,
    ) -> Result<()> {
        use std::fmt::Write as _;
        let path = path.as_ref();
        let mut out = String::from("d,x\n");
        for (d, x) in self.jump_times.iter().zip(&self.values) {
            writeln!(out, "{},{x}", crate::field::fmt_f64(*d)).expect("string write");
        }
        std::fs::write(path, out)?;
        let k_trunc = region.and_then(|r| match *r {
            Region::DiagonalStrip {
                diag_reach,
                half_width,
            } => Some(half_width / diag_reach.powf(2.0 / 3.0)),
            Region::Rectangle { .. } => None,
        });
        let header = serde_json::json!({
            "n": self.n,
            "seed": self.field_seed,
            "base": self.base,
            "k_trunc": k_trunc,
        });
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".json");
        std::fs::write(
            std::path::PathBuf::from(sidecar),
            serde_json::to_string_pretty(&header)?,
        )?;
        Ok(())
    }
}
