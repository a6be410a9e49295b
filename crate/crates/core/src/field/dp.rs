//! Maximal-chain dynamic programming over a point field.
//!
//! All operations work on the points of the closed span `[u, v]` with the
//! ending point excluded when it is itself a field point; the starting
//! point, when it is a field point, is counted. Chains are processed in
//! `a`-order with a patience scan, which yields in one pass both the
//! maximal chain length and, per point, the length `F(p)` of the longest
//! chain ending at `p`. Points of equal `F` form an antichain that the
//! scan emits with `a` ascending and `b` descending; extremal geodesics
//! are reconstructed by walking these level lists down from the top.

use crate::error::{Error, Result};
use crate::field::chain::Chain;
use crate::field::{PlanePoint, PointField, Region};

#[derive(Debug, Clone, Copy)]
pub(crate) struct LevelEntry {
    pub a: f64,
    pub b: f64,
}

fn check_endpoints(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<()> {
    if !u.precedes(&v) {
        return Err(Error::IncomparableEndpoints(u.a, u.b, v.a, v.b));
    }
    if !field.region().covers_span(&u, &v) {
        return Err(Error::RegionTooSmall(u.a, u.b, v.a, v.b));
    }
    Ok(())
}

/// Patience scan returning only the maximal chain length.
fn energy_scan<F: FnMut(&PlanePoint) -> bool>(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
    mut keep: F,
) -> u64 {
    let (lo, hi) = field.a_range(u.a, v.a);
    let mut tails: Vec<f64> = Vec::new();
    for p in &field.points()[lo..hi] {
        if p.b < u.b || p.b > v.b || (p.a == v.a && p.b == v.b) || !keep(p) {
            continue;
        }
        let lvl = tails.partition_point(|&t| t < p.b);
        if lvl == tails.len() {
            tails.push(p.b);
        } else {
            tails[lvl] = p.b;
        }
    }
    tails.len() as u64
}

/// Patience scan keeping the per-level point lists.
pub(crate) fn scan_levels(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
) -> Vec<Vec<LevelEntry>> {
    let (lo, hi) = field.a_range(u.a, v.a);
    let mut tails: Vec<f64> = Vec::new();
    let mut levels: Vec<Vec<LevelEntry>> = Vec::new();
    for p in &field.points()[lo..hi] {
        if p.b < u.b || p.b > v.b || (p.a == v.a && p.b == v.b) {
            continue;
        }
        let lvl = tails.partition_point(|&t| t < p.b);
        if lvl == tails.len() {
            tails.push(p.b);
            levels.push(Vec::new());
        } else {
            tails[lvl] = p.b;
        }
        levels[lvl].push(LevelEntry { a: p.a, b: p.b });
    }
    levels
}

/// Maximal number of field points collected by an increasing path from `u`
/// to `v`, the ending point excluded.
pub fn energy(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<u64> {
    check_endpoints(field, u, v)?;
    Ok(energy_scan(field, u, v, |_| true))
}

/// Maximal chain restricted to an arbitrary set of usable points.
///
/// The predicate must hold at both endpoints (closure membership); the
/// result never exceeds the unconstrained energy.
pub fn constrained_energy_by<F: FnMut(&PlanePoint) -> bool>(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
    mut allowed: F,
) -> Result<u64> {
    check_endpoints(field, u, v)?;
    if !allowed(&u) {
        return Err(Error::EndpointOutsideAllowed(u.a, u.b));
    }
    if !allowed(&v) {
        return Err(Error::EndpointOutsideAllowed(v.a, v.b));
    }
    Ok(energy_scan(field, u, v, allowed))
}

/// Maximal chain using only field points inside `allowed`.
pub fn constrained_energy(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
    allowed: &Region,
) -> Result<u64> {
    constrained_energy_by(field, u, v, |p| allowed.contains(p))
}

/// `F(p)`: the number of points collected by the longest chain from `u`
/// ending at `p` inclusive, for every eligible field point. Sorted by `a`.
pub fn forward_lengths(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
) -> Result<Vec<(PlanePoint, u64)>> {
    check_endpoints(field, u, v)?;
    let (lo, hi) = field.a_range(u.a, v.a);
    let mut tails: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for p in &field.points()[lo..hi] {
        if p.b < u.b || p.b > v.b || (p.a == v.a && p.b == v.b) {
            continue;
        }
        let lvl = tails.partition_point(|&t| t < p.b);
        if lvl == tails.len() {
            tails.push(p.b);
        } else {
            tails[lvl] = p.b;
        }
        out.push((*p, lvl as u64 + 1));
    }
    Ok(out)
}

/// `B(p)`: longest chain from `p` inclusive up to `v`; mirror of
/// [`forward_lengths`]. Sorted by `a`.
pub fn backward_lengths(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
) -> Result<Vec<(PlanePoint, u64)>> {
    check_endpoints(field, u, v)?;
    let (lo, hi) = field.a_range(u.a, v.a);
    let mut tails: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for p in field.points()[lo..hi].iter().rev() {
        if p.b < u.b || p.b > v.b || (p.a == v.a && p.b == v.b) {
            continue;
        }
        let neg = -p.b;
        let lvl = tails.partition_point(|&t| t < neg);
        if lvl == tails.len() {
            tails.push(neg);
        } else {
            tails[lvl] = neg;
        }
        out.push((*p, lvl as u64 + 1));
    }
    out.reverse();
    Ok(out)
}

fn chain_from_entries(
    u: PlanePoint,
    v: PlanePoint,
    mut rev_entries: Vec<LevelEntry>,
) -> Result<Chain> {
    rev_entries.reverse();
    let points = rev_entries
        .into_iter()
        .map(|e| PlanePoint::new(e.a, e.b))
        .collect();
    Chain::new(u, v, points)
}

/// Walk the level lists from the top picking the highest eligible point of
/// each level: reconstructs the geodesic that, viewed as a function of the
/// `a`-coordinate, pointwise dominates every other maximizing chain.
fn uppermost_from_levels(
    levels: &[Vec<LevelEntry>],
    u: PlanePoint,
    v: PlanePoint,
) -> Result<Chain> {
    if levels.is_empty() {
        return Chain::empty(u, v);
    }
    let mut cur = levels[levels.len() - 1][0];
    let mut rev = vec![cur];
    for list in levels[..levels.len() - 1].iter().rev() {
        // Within a level, `b` is descending; the first entry below cur.b is
        // the highest predecessor, and it must also lie to the left.
        let i = list.partition_point(|e| e.b >= cur.b);
        debug_assert!(i < list.len() && list[i].a < cur.a);
        cur = list[i];
        rev.push(cur);
    }
    chain_from_entries(u, v, rev)
}

/// Mirror of [`uppermost_from_levels`]: rightmost entry of the top level,
/// then the rightmost eligible predecessor per level.
fn lowermost_from_levels(
    levels: &[Vec<LevelEntry>],
    u: PlanePoint,
    v: PlanePoint,
) -> Result<Chain> {
    if levels.is_empty() {
        return Chain::empty(u, v);
    }
    let mut cur = *levels[levels.len() - 1].last().expect("non-empty level");
    let mut rev = vec![cur];
    for list in levels[..levels.len() - 1].iter().rev() {
        let i = list.partition_point(|e| e.a < cur.a);
        debug_assert!(i >= 1 && list[i - 1].b < cur.b);
        cur = list[i - 1];
        rev.push(cur);
    }
    chain_from_entries(u, v, rev)
}

/// The geodesic that pointwise dominates all others as a function of `a`.
pub fn uppermost_geodesic(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<Chain> {
    check_endpoints(field, u, v)?;
    let levels = scan_levels(field, u, v);
    uppermost_from_levels(&levels, u, v)
}

/// The geodesic that is pointwise dominated by all others as a function of `a`.
pub fn lowermost_geodesic(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<Chain> {
    check_endpoints(field, u, v)?;
    let levels = scan_levels(field, u, v);
    lowermost_from_levels(&levels, u, v)
}

/// Both extremal geodesics from a single scan: `(uppermost, lowermost)`.
pub fn geodesic_pair(
    field: &PointField,
    u: PlanePoint,
    v: PlanePoint,
) -> Result<(Chain, Chain)> {
    check_endpoints(field, u, v)?;
    let levels = scan_levels(field, u, v);
    Ok((
        uppermost_from_levels(&levels, u, v)?,
        lowermost_from_levels(&levels, u, v)?,
    ))
}

/// Minimum over all energy-maximizing chains of the maximal anti-diagonal
/// offset `|a - b|` along the chain (0 for the empty chain).
///
/// A diagonal strip admits some geodesic exactly when its `|a - b|` bound
/// is at least this value, so "every geodesic exits the strip of half-width
/// `w`" is equivalent to `min_exit_offset > 2 w`. Computed by a min-max
/// recursion over the level lists; the eligible predecessor window of each
/// point slides monotonically along the previous level, so a monotone-deque
/// window minimum keeps the pass linear.
pub fn min_exit_offset(field: &PointField, u: PlanePoint, v: PlanePoint) -> Result<f64> {
    check_endpoints(field, u, v)?;
    let levels = scan_levels(field, u, v);
    if levels.is_empty() {
        return Ok(0.0);
    }
    let offset = |e: &LevelEntry| (e.a - e.b).abs();
    let mut g_prev: Vec<f64> = levels[0].iter().map(&offset).collect();
    for lvl in 1..levels.len() {
        let prev = &levels[lvl - 1];
        let cur = &levels[lvl];
        let mut g_cur = Vec::with_capacity(cur.len());
        let mut deque: std::collections::VecDeque<(usize, f64)> = std::collections::VecDeque::new();
        let (mut j0, mut j1) = (0usize, 0usize);
        for p in cur {
            while j1 < prev.len() && prev[j1].a < p.a {
                let g = g_prev[j1];
                while deque.back().is_some_and(|&(_, gb)| gb >= g) {
                    deque.pop_back();
                }
                deque.push_back((j1, g));
                j1 += 1;
            }
            while j0 < prev.len() && prev[j0].b >= p.b {
                j0 += 1;
            }
            while deque.front().is_some_and(|&(i, _)| i < j0) {
                deque.pop_front();
            }
            let best_prev = deque
                .front()
                .map(|&(_, g)| g)
                .expect("every point above level one has a predecessor");
            g_cur.push(best_prev.max(offset(p)));
        }
        g_prev = g_cur;
    }
    Ok(g_prev.iter().fold(f64::INFINITY, |m, &g| m.min(g)))
}
