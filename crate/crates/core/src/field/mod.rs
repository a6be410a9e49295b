//! Poisson point fields on planar regions and the exact combinatorial
//! last-passage core built on them.
//!
//! A [`PointField`] is a realized rate-`r` Poisson cloud on a [`Region`],
//! reproducible from a 64-bit seed. Points are kept sorted strictly by the
//! first coordinate and are guaranteed to be in generic position: no two
//! points share an `a`- or `b`-coordinate. Path optimization (energies,
//! geodesics) lives in [`dp`]; the exhaustive oracle in [`brute`].

pub mod brute;
pub mod chain;
pub mod dp;

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the unscaled plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub a: f64,
    pub b: f64,
}

impl PlanePoint {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Coordinatewise partial order: `self` precedes `other` when both
    /// coordinates are no larger.
    pub fn precedes(&self, other: &PlanePoint) -> bool {
        self.a <= other.a && self.b <= other.b
    }

    /// Strict dominance in both coordinates.
    pub fn strictly_precedes(&self, other: &PlanePoint) -> bool {
        self.a < other.a && self.b < other.b
    }
}

/// Sampling domain for a point field.
///
/// The diagonal strip is the parallelogram
/// `{(a, b) : 0 <= a + b <= 2 * diag_reach, |a - b| <= 2 * half_width}`,
/// i.e. a band around the main diagonal reaching up to the anti-diagonal
/// through `(diag_reach, diag_reach)`. Strip-shaped fields are how large
/// diagonal spans are sampled without paying for the full square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Rectangle {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },
    DiagonalStrip {
        diag_reach: f64,
        half_width: f64,
    },
}

impl Region {
    pub fn rectangle(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> Result<Self> {
        if !(a_lo < a_hi && b_lo < b_hi) || !(a_lo.is_finite() && a_hi.is_finite()) {
            return Err(Error::InvalidRegion(format!(
                "rectangle [{a_lo}, {a_hi}] x [{b_lo}, {b_hi}] has non-positive area"
            )));
        }
        Ok(Region::Rectangle {
            a_lo,
            a_hi,
            b_lo,
            b_hi,
        })
    }

    pub fn diagonal_strip(diag_reach: f64, half_width: f64) -> Result<Self> {
        if !(diag_reach > 0.0 && half_width > 0.0) {
            return Err(Error::InvalidRegion(format!(
                "diagonal strip with reach {diag_reach}, half-width {half_width}"
            )));
        }
        Ok(Region::DiagonalStrip {
            diag_reach,
            half_width,
        })
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rectangle {
                a_lo,
                a_hi,
                b_lo,
                b_hi,
            } => (a_hi - a_lo) * (b_hi - b_lo),
            // Parallelogram: length 2R along the diagonal, 4w across, Jacobian 1/2.
            Region::DiagonalStrip {
                diag_reach,
                half_width,
            } => 4.0 * diag_reach * half_width,
        }
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        match *self {
            Region::Rectangle {
                a_lo,
                a_hi,
                b_lo,
                b_hi,
            } => p.a >= a_lo && p.a <= a_hi && p.b >= b_lo && p.b <= b_hi,
            Region::DiagonalStrip {
                diag_reach,
                half_width,
            } => {
                let s = p.a + p.b;
                let q = p.a - p.b;
                s >= 0.0 && s <= 2.0 * diag_reach && q.abs() <= 2.0 * half_width
            }
        }
    }

    /// Whether the field sampled on this region is adequate for paths
    /// between `u` and `v`.
    ///
    /// For a rectangle this requires the whole span `[u, v]` to be inside.
    /// For a diagonal strip only the endpoints must be inside: truncating
    /// the far transversal range is the point of strip sampling, and the
    /// strip must simply be declared wide enough by its creator.
    pub fn covers_span(&self, u: &PlanePoint, v: &PlanePoint) -> bool {
        match *self {
            Region::Rectangle { .. } => {
                self.contains(u) && self.contains(v) && self.contains(&PlanePoint::new(u.a, v.b))
            }
            Region::DiagonalStrip { .. } => self.contains(u) && self.contains(v),
        }
    }

    /// b-section `{b : (a, b) in region}` at fixed `a`, as `(lo, hi)`;
    /// empty sections return `None`.
    fn section(&self, a: f64) -> Option<(f64, f64)> {
        match *self {
            Region::Rectangle {
                a_lo,
                a_hi,
                b_lo,
                b_hi,
            } => {
                if a < a_lo || a > a_hi {
                    None
                } else {
                    Some((b_lo, b_hi))
                }
            }
            Region::DiagonalStrip {
                diag_reach,
                half_width,
            } => {
                let lo = (-a).max(a - 2.0 * half_width);
                let hi = (2.0 * diag_reach - a).min(a + 2.0 * half_width);
                if lo < hi {
                    Some((lo, hi))
                } else {
                    None
                }
            }
        }
    }

    /// Horizontal extent of the region and the maximal section height,
    /// used by the sorted sampler as its dominating intensity.
    fn sampling_envelope(&self) -> (f64, f64, f64) {
        match *self {
            Region::Rectangle {
                a_lo,
                a_hi,
                b_lo,
                b_hi,
            } => (a_lo, a_hi, b_hi - b_lo),
            Region::DiagonalStrip {
                diag_reach,
                half_width,
            } => (
                -half_width,
                diag_reach + half_width,
                4.0 * half_width.min(diag_reach),
            ),
        }
    }
}

/// A realized Poisson point field with seed provenance.
///
/// Invariants: points sorted strictly increasing in `a`; all `b` values
/// pairwise distinct; all points inside `region`.
#[derive(Debug, Clone)]
pub struct PointField {
    points: Vec<PlanePoint>,
    region: Region,
    rate: f64,
    seed: u64,
}

/// Sidecar metadata stored next to the CSV point list.
#[derive(Debug, Serialize, Deserialize)]
struct FieldMeta {
    region: Region,
    rate: f64,
    seed: u64,
    count: usize,
}

fn exp_gap<R: Rng>(rng: &mut R, intensity: f64) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / intensity
}

/// Sample a Poisson field of the given rate on `region`, reproducibly.
///
/// Points are produced already sorted in `a` by running a unit-dimensional
/// Poisson stream along the horizontal axis at the region's envelope
/// intensity and thinning by the local section height; `b` is then drawn
/// uniformly on the section. Generic position is enforced: a monotonicity
/// stall in `a` (possible only through floating-point rounding) is nudged
/// up one ulp, and any duplicated `b` value is redrawn from its section.
pub fn sample_field(region: Region, rate: f64, seed: u64) -> Result<PointField> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("rate {rate} must be > 0")));
    }
    if !(region.area() > 0.0) {
        return Err(Error::InvalidRegion("region has non-positive area".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a_start, a_end, max_section) = region.sampling_envelope();
    let envelope = rate * max_section;

    let expected = rate * region.area();
    let mut points: Vec<PlanePoint> =
        Vec::with_capacity((expected + 6.0 * expected.sqrt()) as usize + 16);
    let mut a = a_start;
    loop {
        a += exp_gap(&mut rng, envelope);
        if a > a_end {
            break;
        }
        let accept: f64 = rng.gen();
        let Some((lo, hi)) = region.section(a) else {
            continue;
        };
        if accept * max_section >= hi - lo {
            continue;
        }
        let mut a_eff = a;
        if let Some(last) = points.last() {
            if a_eff <= last.a {
                a_eff = last.a.next_up();
            }
        }
        let b = lo + rng.gen::<f64>() * (hi - lo);
        points.push(PlanePoint::new(a_eff, b));
    }

    dedupe_b(&mut points, &region, &mut rng);

    Ok(PointField {
        points,
        region,
        rate,
        seed,
    })
}

/// Redraw the `b` coordinate of any point that duplicates an earlier one.
fn dedupe_b<R: Rng>(points: &mut [PlanePoint], region: &Region, rng: &mut R) {
    loop {
        let mut bits: Vec<u64> = points.iter().map(|p| (p.b + 0.0).to_bits()).collect();
        radix_sort_u64(&mut bits);
        let mut dupes: Vec<u64> = bits
            .windows(2)
            .filter(|w| w[0] == w[1])
            .map(|w| w[0])
            .collect();
        if dupes.is_empty() {
            return;
        }
        dupes.dedup();
        for p in points.iter_mut() {
            let key = (p.b + 0.0).to_bits();
            if dupes.binary_search(&key).is_ok() {
                // Keep one occurrence per value; redraw the rest.
                if let Some((lo, hi)) = region.section(p.a) {
                    p.b = lo + rng.gen::<f64>() * (hi - lo);
                }
            }
        }
    }
}

/// LSD radix sort for u64 keys, four 16-bit passes.
pub(crate) fn radix_sort_u64(keys: &mut Vec<u64>) {
    let n = keys.len();
    if n < 2 {
        return;
    }
    let mut scratch = vec![0u64; n];
    let mut counts = vec![0u32; 1 << 16];
    for pass in 0..4 {
        let shift = pass * 16;
        counts.iter_mut().for_each(|c| *c = 0);
        for &k in keys.iter() {
            counts[((k >> shift) & 0xFFFF) as usize] += 1;
        }
        let mut total = 0u32;
        for c in counts.iter_mut() {
            let t = *c;
            *c = total;
            total += t;
        }
        for &k in keys.iter() {
            let bucket = ((k >> shift) & 0xFFFF) as usize;
            scratch[counts[bucket] as usize] = k;
            counts[bucket] += 1;
        }
        std::mem::swap(keys, &mut scratch);
    }
}

impl PointField {
    /// Build a field from an explicit point list, validating every invariant.
    pub fn from_points(
        mut points: Vec<PlanePoint>,
        region: Region,
        rate: f64,
        seed: u64,
    ) -> Result<Self> {
        points.sort_by(|p, q| p.a.total_cmp(&q.a));
        for w in points.windows(2) {
            if w[0].a >= w[1].a {
                return Err(Error::DegenerateField(format!(
                    "shared a-coordinate {}",
                    w[0].a
                )));
            }
        }
        let mut bs: Vec<u64> = points.iter().map(|p| (p.b + 0.0).to_bits()).collect();
        radix_sort_u64(&mut bs);
        if bs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateField("shared b-coordinate".into()));
        }
        if let Some(p) = points.iter().find(|p| !region.contains(p)) {
            return Err(Error::DegenerateField(format!(
                "point ({}, {}) outside region",
                p.a, p.b
            )));
        }
        Ok(Self {
            points,
            region,
            rate,
            seed,
        })
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether `p` is one of the field's points (exact match).
    pub fn contains_point(&self, p: &PlanePoint) -> bool {
        let i = self.points.partition_point(|q| q.a < p.a);
        self.points.get(i).is_some_and(|q| q == p)
    }

    /// Index range of points with `a` in `[a_lo, a_hi]`.
    pub(crate) fn a_range(&self, a_lo: f64, a_hi: f64) -> (usize, usize) {
        let lo = self.points.partition_point(|p| p.a < a_lo);
        let hi = self.points.partition_point(|p| p.a <= a_hi);
        (lo, hi)
    }

    /// Write the point list as CSV (`a,b` rows, header included) together
    /// with a JSON sidecar `<path>.json` holding region, rate, seed and
    /// count. Floats are printed with 17 significant digits, so the round
    /// trip through [`PointField::read_csv`] is bit-exact.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.points.len() * 48 + 16);
        out.push_str("a,b\n");
        for p in &self.points {
            writeln!(out, "{},{}", fmt_f64(p.a), fmt_f64(p.b)).expect("string write");
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        let meta = FieldMeta {
            region: self.region,
            rate: self.rate,
            seed: self.seed,
            count: self.points.len(),
        };
        let sidecar = sidecar_path(path);
        std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    /// Load a field written by [`PointField::write_csv`], re-validating all
    /// invariants; degenerate files are rejected rather than repaired.
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let meta: FieldMeta =
            serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let mut points = Vec::with_capacity(meta.count);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line.trim() != "a,b" {
                    return Err(Error::MalformedField(format!(
                        "expected header 'a,b', found '{line}'"
                    )));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                return Err(Error::MalformedField(format!("bad row {i}: '{line}'")));
            };
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::MalformedField(format!("bad float in row {i}")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::MalformedField(format!("bad float in row {i}")))?;
            points.push(PlanePoint::new(a, b));
        }
        if points.len() != meta.count {
            return Err(Error::MalformedField(format!(
                "sidecar count {} != {} rows",
                meta.count,
                points.len()
            )));
        }
        Self::from_points(points, meta.region, meta.rate, meta.seed)
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    std::path::PathBuf::from(s)
}

/// 17-significant-digit decimal rendering; round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests;
