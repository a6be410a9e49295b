//! Exhaustive-search oracle for small spans: enumerates every increasing
//! subsequence. Independent of the patience machinery in [`super::dp`] so
//! the two can check each other.

use crate::error::{Error, Result};
use crate::field::chain::Chain;
use crate::field::{PlanePoint, PointField};

/// Point-count guard for exhaustive enumeration.
pub const EXHAUSTIVE_GUARD: usize = 16;

fn eligible_points<F: FnMut(&PlanePoint) -> bool>(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
    mut keep: F,
) -> Result<Vec<PlanePoint>> {
    if !u.precedes(&v) {
        return Err(Error::IncomparableEndpoints(u.a, u.b, v.a, v.b));
    }
    let (lo, hi) = field.a_range(u.a, v.a);
    let pts: Vec<PlanePoint> = field.points()[lo..hi]
        .iter()
        .filter(|p| p.b >= u.b && p.b <= v.b && !(p.a == v.a && p.b == v.b))
        .filter(|p| keep(p))
        .copied()
        .collect();
    if pts.len() > EXHAUSTIVE_GUARD {
        return Err(Error::TooManyPoints {
            count: pts.len(),
            max: EXHAUSTIVE_GUARD,
        });
    }
    Ok(pts)
}

fn search(pts: &[PlanePoint]) -> (usize, Vec<Vec<usize>>) {
    let mut best = 0usize;
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();

    fn dfs(
        pts: &[PlanePoint],
        from: usize,
        cur: &mut Vec<usize>,
        best: &mut usize,
        maximal: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() > *best {
            *best = cur.len();
            maximal.clear();
        }
        if cur.len() == *best {
            maximal.push(cur.clone());
        }
        for i in from..pts.len() {
            let extends = match cur.last() {
                None => true,
                Some(&j) => pts[j].strictly_precedes(&pts[i]),
            };
            if extends {
                cur.push(i);
                dfs(pts, i + 1, cur, best, maximal);
                cur.pop();
            }
        }
    }

    dfs(pts, 0, &mut cur, &mut best, &mut maximal);
    (best, maximal)
}

/// Exhaustive maximal chain count between `u` and `v`.
pub fn brute_force_energy(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<u64> {
    let pts = eligible_points(field, u, v, |_| true)?;
    Ok(search(&pts).0 as u64)
}

/// Exhaustive maximal chain count restricted to points satisfying `allowed`.
pub fn brute_force_constrained<F: FnMut(&PlanePoint) -> bool>(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
    allowed: F,
) -> Result<u64> {
    let pts = eligible_points(field, u, v, allowed)?;
    Ok(search(&pts).0 as u64)
}

/// Every energy-maximizing chain between `u` and `v`. An empty span yields
/// the single empty chain.
pub fn enumerate_geodesics(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
) -> Result<Vec<Chain>> {
    let pts = eligible_points(field, u, v, |_| true)?;
    let (_, maximal) = search(&pts);
    maximal
        .into_iter()
        .map(|idxs| Chain::new(u, v, idxs.into_iter().map(|i| pts[i]).collect()))
        .collect()
}
