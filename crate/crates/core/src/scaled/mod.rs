//! The KPZ-scaled picture: the coordinate maps between the unscaled plane
//! and `(x, t)` coordinates, polymers (scaled geodesics) as functions of
//! time, weights, transversal fluctuation functionals and the mesh
//! estimator for the maximum fluctuation over short polymers.
//!
//! At scale parameter `n`, the anti-diagonal through `(nt, nt)` becomes the
//! horizontal line at height `t`, transversal displacements shrink by
//! `n^(2/3)`, and path energies recenter around `2n * dt` at scale
//! `n^(1/3)`. Polymers between compatible endpoints then cross unit-order
//! distances with unit-order weights.

pub mod profile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::chain::Chain;
use crate::field::{dp, PlanePoint, PointField};

/// A point in scaled coordinates: horizontal position `x`, time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub x: f64,
    pub t: f64,
}

impl ScaledPoint {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }
}

/// Inverse scaling map: `(x, t) -> (nt + x n^(2/3), nt - x n^(2/3))`.
pub fn to_unscaled(n: f64, p: ScaledPoint) -> PlanePoint {
    let w = p.x * n.powf(2.0 / 3.0);
    PlanePoint::new(n * p.t + w, n * p.t - w)
}

/// Scaling map: `(a, b) -> ((a - b) / (2 n^(2/3)), (a + b) / (2n))`.
pub fn to_scaled(n: f64, p: PlanePoint) -> ScaledPoint {
    ScaledPoint::new(0.5 * (p.a - p.b) / n.powf(2.0 / 3.0), 0.5 * (p.a + p.b) / n)
}

/// Whether polymers exist between `u` and `v` at scale `n`: the unscaled
/// images are ordered exactly when `|u.x - v.x| < n^(1/3) (v.t - u.t)`.
pub fn compatible(n: f64, u: ScaledPoint, v: ScaledPoint) -> Result<bool> {
    if !(u.t < v.t) {
        return Err(Error::InvalidParameter(format!(
            "start time {} must precede end time {}",
            u.t, v.t
        )));
    }
    Ok((u.x - v.x).abs() < n.powf(1.0 / 3.0) * (v.t - u.t))
}

fn require_compatible(n: f64, u: ScaledPoint, v: ScaledPoint) -> Result<(PlanePoint, PlanePoint)> {
    if !compatible(n, u, v)? {
        return Err(Error::IncompatibleEndpoints {
            dx: (u.x - v.x).abs(),
            bound: n.powf(1.0 / 3.0) * (v.t - u.t),
        });
    }
    Ok((to_unscaled(n, u), to_unscaled(n, v)))
}

/// Which extremal geodesic a polymer is the image of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Image of the uppermost geodesic.
    Leftmost,
    /// Image of the lowermost geodesic.
    Rightmost,
}

/// A scaled geodesic, evaluable at any time of its lifetime.
///
/// Vertices are stored eagerly in scaled coordinates, strictly increasing
/// in `t`; the underlying unscaled chain is retained for audits.
#[derive(Debug, Clone)]
pub struct Polymer {
    n: f64,
    start: ScaledPoint,
    end: ScaledPoint,
    side: Side,
    vertices: Vec<ScaledPoint>,
    chain: Chain,
}

impl Polymer {
    fn from_chain(n: f64, start: ScaledPoint, end: ScaledPoint, side: Side, chain: Chain) -> Self {
        let mut vertices = Vec::with_capacity(chain.points().len() + 2);
        vertices.push(start);
        for p in chain.points() {
            let s = to_scaled(n, *p);
            if s.t > start.t && s.t < end.t {
                vertices.push(s);
            }
        }
        vertices.push(end);
        Self {
            n,
            start,
            end,
            side,
            vertices,
            chain,
        }
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn start(&self) -> ScaledPoint {
        self.start
    }

    pub fn end(&self) -> ScaledPoint {
        self.end
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn vertices(&self) -> &[ScaledPoint] {
        &self.vertices
    }

    /// The unscaled geodesic this polymer is the image of.
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    /// Horizontal position at time `t`, by interpolation between vertices.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < self.start.t || t > self.end.t {
            return Err(Error::TimeOutOfRange {
                t,
                lo: self.start.t,
                hi: self.end.t,
            });
        }
        let i = self.vertices.partition_point(|p| p.t <= t);
        if i == self.vertices.len() {
            return Ok(self.end.x);
        }
        let hi = self.vertices[i];
        let lo = self.vertices[i - 1];
        Ok(lo.x + (t - lo.t) * (hi.x - lo.x) / (hi.t - lo.t))
    }

    /// Position of the straight chord between the endpoints at time `t`.
    pub fn chord(&self, t: f64) -> f64 {
        if t == self.start.t {
            return self.start.x;
        }
        if t == self.end.t {
            return self.end.x;
        }
        self.start.x + (t - self.start.t) * (self.end.x - self.start.x) / (self.end.t - self.start.t)
    }

    /// Largest horizontal distance between the polymer and its chord.
    ///
    /// Both are piecewise linear with all breakpoints among the polymer's
    /// vertices, so the supremum is attained at a vertex.
    pub fn transversal_fluctuation(&self) -> f64 {
        self.vertices
            .iter()
            .fold(0.0f64, |m, p| m.max((p.x - self.chord(p.t)).abs()))
    }

    /// Vertices as CSV (`t,x` rows with a header).
    pub fn write_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        use std::fmt::Write as _;
        let mut out = String::from("t,x\n");
        for p in &self.vertices {
            writeln!(
                out,
                "{},{}",
                crate::field::fmt_f64(p.t),
                crate::field::fmt_f64(p.x)
            )
            .expect("string write");
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// The polymer of the given side between compatible scaled endpoints.
pub fn polymer(
    field: &PointField,
    n: f64,
    u: ScaledPoint,
    v: ScaledPoint,
    side: Side,
) -> Result<Polymer> {
    let (gu, gv) = require_compatible(n, u, v)?;
    let chain = match side {
        Side::Leftmost => dp::uppermost_geodesic(field, gu, gv)?,
        Side::Rightmost => dp::lowermost_geodesic(field, gu, gv)?,
    };
    Ok(Polymer::from_chain(n, u, v, side, chain))
}

/// Both extremal polymers from one scan: `(leftmost, rightmost)`.
pub fn polymer_pair(
    field: &PointField,
    n: f64,
    u: ScaledPoint,
    v: ScaledPoint,
) -> Result<(Polymer, Polymer)> {
    let (gu, gv) = require_compatible(n, u, v)?;
    let (upper, lower) = dp::geodesic_pair(field, gu, gv)?;
    Ok((
        Polymer::from_chain(n, u, v, Side::Leftmost, upper),
        Polymer::from_chain(n, u, v, Side::Rightmost, lower),
    ))
}

/// Scaled energy between compatible endpoints:
/// `n^(-1/3) (X - 2 n (v.t - u.t))`.
pub fn weight(field: &PointField, n: f64, u: ScaledPoint, v: ScaledPoint) -> Result<f64> {
    let (gu, gv) = require_compatible(n, u, v)?;
    let x = dp::energy(field, gu, gv)? as f64;
    Ok((x - 2.0 * n * (v.t - u.t)) / n.powf(1.0 / 3.0))
}

/// Transversal fluctuation between two points: the larger of the two
/// extremal polymers' fluctuations, which bounds every polymer in between.
pub fn tf_between(field: &PointField, n: f64, u: ScaledPoint, v: ScaledPoint) -> Result<f64> {
    let (left, right) = polymer_pair(field, n, u, v)?;
    Ok(left
        .transversal_fluctuation()
        .max(right.transversal_fluctuation()))
}

/// Whether every geodesic between `(0, t1)` and `(0, t2)` exits the strip
/// `[-s, s] x [t1, t2]`: equivalent to the strip-constrained energy falling
/// below the unconstrained one.
pub fn min_tf_exceeds(field: &PointField, n: f64, t1: f64, t2: f64, s: f64) -> Result<bool> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("strip width {s} must be > 0")));
    }
    let u = ScaledPoint::new(0.0, t1);
    let v = ScaledPoint::new(0.0, t2);
    let (gu, gv) = require_compatible(n, u, v)?;
    let offset = dp::min_exit_offset(field, gu, gv)?;
    Ok(offset > 2.0 * s * n.powf(2.0 / 3.0))
}

/// An endpoint pair admissible for the maximum-fluctuation functional:
/// lifetime at most `t`, bounded chord inverse slope, both points in the
/// unit box.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub u: ScaledPoint,
    pub v: ScaledPoint,
    pub psi: f64,
    pub inv_slope: f64,
}

impl AdmissiblePair {
    pub fn new(u: ScaledPoint, v: ScaledPoint, psi: f64, t: f64) -> Result<Self> {
        let dt = v.t - u.t;
        if !(dt > 0.0 && dt <= t) {
            return Err(Error::InvalidParameter(format!(
                "lifetime {dt} outside (0, {t}]"
            )));
        }
        let inv_slope = (v.x - u.x) / dt;
        let in_box = |p: &ScaledPoint| p.x >= -1.0 && p.x <= 1.0 && p.t >= 0.0 && p.t <= 1.0;
        if inv_slope.abs() > psi || !in_box(&u) || !in_box(&v) {
            return Err(Error::InvalidParameter(
                "endpoint pair violates the admissibility constraints".into(),
            ));
        }
        Ok(Self {
            u,
            v,
            psi,
            inv_slope,
        })
    }
}

/// Lower-bound estimator of the maximum transversal fluctuation over
/// admissible endpoint pairs with lifetimes at most `t`.
///
/// The supremum is approximated from below by maximizing [`tf_between`]
/// over a finite mesh: time step `t / refine`, horizontal step
/// `t^(2/3) / refine`, clipped to the admissibility box. Doubling `refine`
/// refines the mesh in place, so the estimate is monotone under doubling.
pub fn mtf_estimate(
    field: &PointField,
    n: f64,
    t: f64,
    psi: f64,
    refine: u32,
) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t {t} outside (0, 1]")));
    }
    if !(psi > 0.0) || refine == 0 {
        return Err(Error::InvalidParameter("psi and refine must be positive".into()));
    }
    if !(n > psi.powi(3)) {
        return Err(Error::InvalidParameter(format!(
            "n {n} must exceed psi^3 = {}",
            psi.powi(3)
        )));
    }

    let dt = t / refine as f64;
    let dx = t.powf(2.0 / 3.0) / refine as f64;
    let mut times = Vec::new();
    let mut k = 0u64;
    loop {
        let tau = k as f64 * dt;
        if tau > 1.0 {
            break;
        }
        times.push(tau);
        k += 1;
    }
    let mut xs = Vec::new();
    let mut j = 0u64;
    loop {
        let x = -1.0 + j as f64 * dx;
        if x > 1.0 {
            break;
        }
        xs.push(x);
        j += 1;
    }

    let lifetime_cap = t * (1.0 + 1e-12);
    let mut best = 0.0f64;
    for (i1, &t1) in times.iter().enumerate() {
        for &t2 in &times[i1 + 1..] {
            let dt12 = t2 - t1;
            if dt12 > lifetime_cap {
                break;
            }
            for &x1 in &xs {
                for &x2 in &xs {
                    if (x2 - x1).abs() > psi * dt12 {
                        continue;
                    }
                    let tf = tf_between(
                        field,
                        n,
                        ScaledPoint::new(x1, t1),
                        ScaledPoint::new(x2, t2),
                    )?;
                    best = best.max(tf);
                }
            }
        }
    }
    Ok(best)
}
