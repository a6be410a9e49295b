use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PlanePoint;

/// An increasing path between two ordered plane points, recorded through
/// the field points it collects.
///
/// `points` holds the field points lying on the path, excluding the final
/// endpoint; when the start is itself a field point it is included here.
/// This bookkeeping makes energies exactly additive under concatenation:
/// the shared junction of two chains belongs to the earlier chain's
/// excluded end and is counted once, by the later chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    start: PlanePoint,
    end: PlanePoint,
    points: Vec<PlanePoint>,
}

impl Chain {
    /// Assemble a chain, checking the dominance ordering
    /// `start ≼ p_1 ≺ … ≺ p_k ≼ end`.
    pub fn new(start: PlanePoint, end: PlanePoint, points: Vec<PlanePoint>) -> Result<Self> {
        if !start.precedes(&end) {
            return Err(Error::IncomparableEndpoints(start.a, start.b, end.a, end.b));
        }
        let mut prev = start;
        for (i, p) in points.iter().enumerate() {
            let ok = if i == 0 {
                prev.precedes(p)
            } else {
                prev.strictly_precedes(p)
            };
            if !ok || !p.precedes(&end) {
                return Err(Error::IncomparableEndpoints(prev.a, prev.b, p.a, p.b));
            }
            prev = *p;
        }
        Ok(Self { start, end, points })
    }

    /// The empty path from `start` to `end`.
    pub fn empty(start: PlanePoint, end: PlanePoint) -> Result<Self> {
        Self::new(start, end, Vec::new())
    }

    pub fn start(&self) -> PlanePoint {
        self.start
    }

    pub fn end(&self) -> PlanePoint {
        self.end
    }

    /// Field points collected by the path (final endpoint excluded).
    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    /// Number of field points collected: the path energy.
    pub fn energy(&self) -> u64 {
        self.points.len() as u64
    }

    /// Geometric vertices of the piecewise-linear path: start, the distinct
    /// collected points strictly between the endpoints, then end.
    pub fn vertices(&self) -> Vec<PlanePoint> {
        let mut v = Vec::with_capacity(self.points.len() + 2);
        v.push(self.start);
        for p in &self.points {
            if *p != self.start && *p != self.end {
                v.push(*p);
            }
        }
        v.push(self.end);
        v
    }

    /// Height of the path at abscissa `a`, by linear interpolation between
    /// vertices. `a` must lie within `[start.a, end.a]`.
    pub fn eval_at_a(&self, a: f64) -> Result<f64> {
        if a < self.start.a || a > self.end.a {
            return Err(Error::TimeOutOfRange {
                t: a,
                lo: self.start.a,
                hi: self.end.a,
            });
        }
        let verts = self.vertices();
        let i = verts.partition_point(|p| p.a <= a);
        if i == verts.len() {
            return Ok(self.end.b);
        }
        let hi = verts[i];
        let lo = verts[i - 1];
        if hi.a == lo.a {
            return Ok(lo.b);
        }
        Ok(lo.b + (a - lo.a) * (hi.b - lo.b) / (hi.a - lo.a))
    }

    /// Join two chains sharing a junction point. The energy of the result
    /// is exactly the sum of the two energies.
    pub fn concatenate(&self, other: &Chain) -> Result<Chain> {
        if self.end != other.start {
            return Err(Error::ConcatMismatch(
                self.end.a,
                self.end.b,
                other.start.a,
                other.start.b,
            ));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Chain::new(self.start, other.end, points)
    }
}
