use proptest::prelude::*;

use super::brute::{brute_force_constrained, brute_force_energy, enumerate_geodesics};
use super::chain::Chain;
use super::dp::{
    backward_lengths, constrained_energy, constrained_energy_by, energy, forward_lengths,
    geodesic_pair, lowermost_geodesic, min_exit_offset, uppermost_geodesic,
};
use super::*;
use crate::error::Error;

fn rect(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> Region {
    Region::rectangle(a_lo, a_hi, b_lo, b_hi).unwrap()
}

fn field_of(pts: &[(f64, f64)]) -> PointField {
    let points = pts.iter().map(|&(a, b)| PlanePoint::new(a, b)).collect();
    PointField::from_points(points, rect(-10.0, 50.0, -10.0, 50.0), 1.0, 0).unwrap()
}

fn p(a: f64, b: f64) -> PlanePoint {
    PlanePoint::new(a, b)
}

/// Random small field; `None` when the draw exceeds the exhaustive guard.
fn small_field(seed: u64, mean_points: f64) -> Option<PointField> {
    let region = rect(0.0, 4.0, 0.0, 4.0);
    let field = sample_field(region, mean_points / region.area(), seed).unwrap();
    (field.len() <= super::brute::EXHAUSTIVE_GUARD).then_some(field)
}

#[test]
fn sampling_is_deterministic() {
    let region = rect(0.0, 10.0, 0.0, 10.0);
    let f1 = sample_field(region, 1.0, 42).unwrap();
    let f2 = sample_field(region, 1.0, 42).unwrap();
    assert_eq!(f1.points(), f2.points());
    assert!(!f1.is_empty());
}

#[test]
fn vanishing_intensity_gives_empty_fields() {
    let region = rect(0.0, 1.0, 0.0, 1.0);
    for seed in 0..100 {
        assert!(sample_field(region, 1e-9, seed).unwrap().is_empty());
    }
}

#[test]
fn poisson_mean_count_matches_area() {
    let region = rect(0.0, 10.0, 0.0, 10.0);
    let total: usize = (0..10_000)
        .map(|seed| sample_field(region, 1.0, seed).unwrap().len())
        .sum();
    let mean = total as f64 / 10_000.0;
    assert!((97.0..=103.0).contains(&mean), "mean count {mean}");
}

#[test]
fn sampled_fields_are_sorted_distinct_and_inside() {
    for seed in 0..20 {
        let region = Region::diagonal_strip(30.0, 8.0).unwrap();
        let f = sample_field(region, 1.0, seed).unwrap();
        for w in f.points().windows(2) {
            assert!(w[0].a < w[1].a);
        }
        let mut bs: Vec<f64> = f.points().iter().map(|q| q.b).collect();
        bs.sort_by(f64::total_cmp);
        for w in bs.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(f.points().iter().all(|q| region.contains(q)));
    }
}

#[test]
fn invalid_regions_are_rejected() {
    assert!(Region::rectangle(0.0, 0.0, 0.0, 1.0).is_err());
    assert!(Region::rectangle(1.0, 0.0, 0.0, 1.0).is_err());
    assert!(Region::diagonal_strip(10.0, 0.0).is_err());
    assert!(sample_field(rect(0.0, 1.0, 0.0, 1.0), 0.0, 1).is_err());
}

#[test]
fn degenerate_point_lists_are_rejected() {
    let region = rect(0.0, 10.0, 0.0, 10.0);
    let shared_a = vec![p(1.0, 2.0), p(1.0, 3.0)];
    assert!(matches!(
        PointField::from_points(shared_a, region, 1.0, 0),
        Err(Error::DegenerateField(_))
    ));
    let shared_b = vec![p(1.0, 2.0), p(3.0, 2.0)];
    assert!(matches!(
        PointField::from_points(shared_b, region, 1.0, 0),
        Err(Error::DegenerateField(_))
    ));
    let outside = vec![p(11.0, 2.0)];
    assert!(PointField::from_points(outside, region, 1.0, 0).is_err());
}

#[test]
fn energy_on_empty_field() {
    let f = field_of(&[]);
    assert_eq!(energy(&f, p(0.0, 0.0), p(5.0, 5.0)).unwrap(), 0);
}

#[test]
fn energy_examples() {
    let f = field_of(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
    assert_eq!(energy(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap(), 2);

    let antichain = field_of(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]);
    assert_eq!(energy(&antichain, p(0.0, 0.0), p(4.0, 4.0)).unwrap(), 1);
}

#[test]
fn ending_point_is_excluded_from_energy() {
    let f = field_of(&[(1.0, 1.0), (2.0, 2.0)]);
    assert_eq!(energy(&f, p(0.0, 0.0), p(2.0, 2.0)).unwrap(), 1);
}

#[test]
fn incomparable_endpoints_error() {
    let f = field_of(&[]);
    assert!(matches!(
        energy(&f, p(0.0, 5.0), p(5.0, 0.0)),
        Err(Error::IncomparableEndpoints(..))
    ));
}

#[test]
fn region_too_small_error() {
    let f = sample_field(rect(0.0, 5.0, 0.0, 5.0), 0.5, 3).unwrap();
    assert!(matches!(
        energy(&f, p(0.0, 0.0), p(20.0, 20.0)),
        Err(Error::RegionTooSmall(..))
    ));
}

#[test]
fn constrained_energy_inactive_constraint() {
    let f = field_of(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let allowed = rect(-1.0, 5.0, -1.0, 5.0);
    assert_eq!(
        constrained_energy(&f, u, v, &allowed).unwrap(),
        energy(&f, u, v).unwrap()
    );
}

#[test]
fn constrained_energy_excluding_all_points() {
    let f = field_of(&[(1.0, 2.0), (2.0, 1.0)]);
    // Thin sliver along the diagonal holds both endpoints, neither point.
    let got = constrained_energy_by(&f, p(0.0, 0.0), p(3.0, 3.0), |q| (q.a - q.b).abs() < 0.5)
        .unwrap();
    assert_eq!(got, 0);
}

#[test]
fn constrained_energy_halfplane_example() {
    let f = field_of(&[(1.0, 2.0), (2.0, 1.0)]);
    // {b <= a}: contains (2,1) and both endpoints, excludes (1,2).
    let got = constrained_energy_by(&f, p(0.0, 0.0), p(3.0, 3.0), |q| q.b <= q.a).unwrap();
    assert_eq!(got, 1);
}

#[test]
fn constrained_endpoints_must_be_allowed() {
    let f = field_of(&[(1.0, 1.0)]);
    let allowed = rect(0.5, 3.0, 0.5, 3.0);
    assert!(matches!(
        constrained_energy(&f, p(0.0, 0.0), p(3.0, 3.0), &allowed),
        Err(Error::EndpointOutsideAllowed(..))
    ));
}

#[test]
fn forward_length_examples() {
    let single = field_of(&[(1.0, 1.0)]);
    let fl = forward_lengths(&single, p(0.0, 0.0), p(2.0, 2.0)).unwrap();
    assert_eq!(fl, vec![(p(1.0, 1.0), 1)]);

    let pair = field_of(&[(1.0, 1.0), (2.0, 2.0)]);
    let fl = forward_lengths(&pair, p(0.0, 0.0), p(3.0, 3.0)).unwrap();
    assert_eq!(fl[1], (p(2.0, 2.0), 2));

    let f = field_of(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
    let fl = forward_lengths(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap();
    let f33 = fl.iter().find(|(q, _)| *q == p(3.0, 3.0)).unwrap().1;
    assert_eq!(f33, 2);
}

#[test]
fn extremal_geodesic_example() {
    let f = field_of(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]);
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let upper = uppermost_geodesic(&f, u, v).unwrap();
    let lower = lowermost_geodesic(&f, u, v).unwrap();
    assert_eq!(upper.points(), &[p(1.0, 2.0), p(3.0, 3.0)]);
    assert_eq!(lower.points(), &[p(2.0, 1.0), p(3.0, 3.0)]);
    assert_eq!(upper.energy(), 2);
}

#[test]
fn unique_geodesic_has_equal_extremals() {
    let f = field_of(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
    let (upper, lower) = geodesic_pair(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap();
    assert_eq!(upper, lower);
    assert_eq!(upper.energy(), 3);
}

#[test]
fn empty_span_geodesic() {
    let f = field_of(&[]);
    let g = uppermost_geodesic(&f, p(0.0, 0.0), p(1.0, 1.0)).unwrap();
    assert!(g.points().is_empty());
    assert_eq!(g.energy(), 0);
}

#[test]
fn brute_force_enumerates_antichain_geodesics() {
    let f = field_of(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]);
    let gs = enumerate_geodesics(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap();
    assert_eq!(gs.len(), 3);
    assert!(gs.iter().all(|g| g.energy() == 1));
}

#[test]
fn brute_force_empty_field() {
    let f = field_of(&[]);
    let gs = enumerate_geodesics(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap();
    assert_eq!(gs.len(), 1);
    assert_eq!(gs[0].energy(), 0);
    assert_eq!(brute_force_energy(&f, p(0.0, 0.0), p(4.0, 4.0)).unwrap(), 0);
}

#[test]
fn brute_force_guard_trips() {
    let pts: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.1, i as f64 * 0.11)).collect();
    let f = field_of(&pts);
    assert!(matches!(
        brute_force_energy(&f, p(0.0, 0.0), p(5.0, 5.0)),
        Err(Error::TooManyPoints { .. })
    ));
}

#[test]
fn oracle_agreement_on_random_fields() {
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let mut checked = 0;
    for seed in 0..400 {
        let Some(f) = small_field(seed, 7.0) else {
            continue;
        };
        assert_eq!(
            energy(&f, u, v).unwrap(),
            brute_force_energy(&f, u, v).unwrap(),
            "seed {seed}"
        );
        let strip =
            constrained_energy_by(&f, u, v, |q| (q.a - q.b).abs() <= 1.0).unwrap();
        let strip_brute =
            brute_force_constrained(&f, u, v, |q| (q.a - q.b).abs() <= 1.0).unwrap();
        assert_eq!(strip, strip_brute, "seed {seed}");
        checked += 1;
    }
    assert!(checked > 300);
}

/// Level membership test used by the extremal walks: a point lies on some
/// geodesic exactly when its forward and backward lengths overlap the
/// maximal chain count, `F(p) + B(p) - 1 == X`.
#[test]
fn geodesic_membership_threshold() {
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let mut checked = 0;
    for seed in 0..700 {
        let Some(f) = small_field(seed, 6.0) else {
            continue;
        };
        let x = energy(&f, u, v).unwrap();
        let fl = forward_lengths(&f, u, v).unwrap();
        let bl = backward_lengths(&f, u, v).unwrap();
        let geos = enumerate_geodesics(&f, u, v).unwrap();
        for ((q, fwd), (q2, bwd)) in fl.iter().zip(bl.iter()) {
            assert_eq!(q, q2);
            let on_some = geos.iter().any(|g| g.points().contains(q));
            assert_eq!(fwd + bwd - 1 == x, on_some, "seed {seed}, point {q:?}");
        }
        checked += 1;
    }
    assert!(checked >= 500);
}

fn pointwise_dominates(hi: &Chain, lo: &Chain) -> bool {
    let mut grid: Vec<f64> = hi.vertices().iter().map(|q| q.a).collect();
    grid.extend(lo.vertices().iter().map(|q| q.a));
    grid.iter()
        .all(|&a| hi.eval_at_a(a).unwrap() >= lo.eval_at_a(a).unwrap() - 1e-12)
}

#[test]
fn extremal_walks_match_brute_force_extremes() {
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let mut checked = 0;
    for seed in 0..700 {
        let Some(f) = small_field(seed, 6.0) else {
            continue;
        };
        let geos = enumerate_geodesics(&f, u, v).unwrap();
        let (upper, lower) = geodesic_pair(&f, u, v).unwrap();
        for g in &geos {
            assert!(pointwise_dominates(&upper, g), "seed {seed}");
            assert!(pointwise_dominates(g, &lower), "seed {seed}");
        }
        assert!(geos.contains(&upper), "seed {seed}");
        assert!(geos.contains(&lower), "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 500);
}

#[test]
fn min_exit_offset_matches_enumeration() {
    let u = p(0.0, 0.0);
    let v = p(4.0, 4.0);
    let mut checked = 0;
    for seed in 0..500 {
        let Some(f) = small_field(seed, 6.0) else {
            continue;
        };
        let geos = enumerate_geodesics(&f, u, v).unwrap();
        let expected = geos
            .iter()
            .map(|g| {
                g.points()
                    .iter()
                    .fold(0.0f64, |m, q| m.max((q.a - q.b).abs()))
            })
            .fold(f64::INFINITY, f64::min);
        let got = min_exit_offset(&f, u, v).unwrap();
        assert!((got - expected).abs() < 1e-12, "seed {seed}: {got} vs {expected}");
        checked += 1;
    }
    assert!(checked >= 300);
}

#[test]
fn concatenation_counts_shared_point_once() {
    // u -> w through (1,1), then w -> v through (3,3), with w = (2,2) a
    // field point: the junction is excluded from the first chain's count
    // and collected by the second.
    let f = field_of(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
    let u = p(0.0, 0.0);
    let w = p(2.0, 2.0);
    let v = p(4.0, 4.0);
    let c1 = uppermost_geodesic(&f, u, w).unwrap();
    let c2 = uppermost_geodesic(&f, w, v).unwrap();
    assert_eq!(c1.energy(), 1);
    assert_eq!(c2.energy(), 2);
    let joined = c1.concatenate(&c2).unwrap();
    assert_eq!(joined.energy(), 3);
    assert_eq!(joined.energy(), brute_force_energy(&f, u, v).unwrap());
}

#[test]
fn concatenation_with_empty_tail() {
    let f = field_of(&[(1.0, 1.0)]);
    let c1 = uppermost_geodesic(&f, p(0.0, 0.0), p(2.0, 2.0)).unwrap();
    let c2 = Chain::empty(p(2.0, 2.0), p(3.0, 3.0)).unwrap();
    let joined = c1.concatenate(&c2).unwrap();
    assert_eq!(joined.energy(), c1.energy());
    assert_eq!(joined.end(), p(3.0, 3.0));
}

#[test]
fn concatenation_is_associative_as_point_sets() {
    let f = field_of(&[(1.0, 1.0), (3.0, 2.0), (5.0, 4.0), (6.0, 6.0)]);
    let (u, w1, w2, v) = (p(0.0, 0.0), p(2.0, 1.5), p(4.0, 3.0), p(7.0, 7.0));
    let c1 = uppermost_geodesic(&f, u, w1).unwrap();
    let c2 = uppermost_geodesic(&f, w1, w2).unwrap();
    let c3 = uppermost_geodesic(&f, w2, v).unwrap();
    let left = c1.concatenate(&c2).unwrap().concatenate(&c3).unwrap();
    let right = c1.concatenate(&c2.concatenate(&c3).unwrap()).unwrap();
    assert_eq!(left, right);
}

#[test]
fn concatenation_endpoint_mismatch_errors() {
    let c1 = Chain::empty(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
    let c2 = Chain::empty(p(2.0, 2.0), p(3.0, 3.0)).unwrap();
    assert!(matches!(
        c1.concatenate(&c2),
        Err(Error::ConcatMismatch(..))
    ));
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = std::env::temp_dir().join("lpplab_field_roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("field.csv");
    let f = sample_field(Region::diagonal_strip(25.0, 6.0).unwrap(), 1.0, 99).unwrap();
    f.write_csv(&path).unwrap();
    let g = PointField::read_csv(&path).unwrap();
    assert_eq!(f.points(), g.points());
    assert_eq!(f.region(), g.region());
    assert_eq!(f.rate(), g.rate());
    assert_eq!(f.seed(), g.seed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dominance_is_a_partial_order(
        ax in -5.0f64..5.0, ay in -5.0f64..5.0,
        bx in -5.0f64..5.0, by in -5.0f64..5.0,
        cx in -5.0f64..5.0, cy in -5.0f64..5.0,
    ) {
        let (a, b, c) = (p(ax, ay), p(bx, by), p(cx, cy));
        prop_assert!(a.precedes(&a));
        if a.precedes(&b) && b.precedes(&a) {
            prop_assert_eq!(a, b);
        }
        if a.precedes(&b) && b.precedes(&c) {
            prop_assert!(a.precedes(&c));
        }
    }

    #[test]
    fn adding_a_point_never_decreases_energy(seed in 0u64..10_000, extra_a in 0.3f64..3.7, extra_b in 0.3f64..3.7) {
        let Some(f) = small_field(seed, 6.0) else { return Ok(()) };
        let u = p(0.0, 0.0);
        let v = p(4.0, 4.0);
        let before = energy(&f, u, v).unwrap();
        let mut pts = f.points().to_vec();
        pts.push(p(extra_a, extra_b));
        let Ok(g) = PointField::from_points(pts, *f.region(), f.rate(), f.seed()) else {
            return Ok(());
        };
        prop_assert!(energy(&g, u, v).unwrap() >= before);
    }

    #[test]
    fn constrained_energy_is_monotone_in_region(seed in 0u64..10_000, w1 in 0.2f64..1.0, w2 in 1.0f64..3.0) {
        let Some(f) = small_field(seed, 8.0) else { return Ok(()) };
        let u = p(0.0, 0.0);
        let v = p(4.0, 4.0);
        let narrow = constrained_energy_by(&f, u, v, |q| (q.a - q.b).abs() <= 2.0 * w1).unwrap();
        let wide = constrained_energy_by(&f, u, v, |q| (q.a - q.b).abs() <= 2.0 * w2).unwrap();
        prop_assert!(narrow <= wide);
        prop_assert!(wide <= energy(&f, u, v).unwrap());
    }

    #[test]
    fn energy_is_superadditive(seed in 0u64..10_000, mid_a in 1.0f64..3.0, mid_b in 1.0f64..3.0) {
        let Some(f) = small_field(seed, 10.0) else { return Ok(()) };
        let u = p(0.0, 0.0);
        let v = p(4.0, 4.0);
        let m = p(mid_a, mid_b);
        let whole = energy(&f, u, v).unwrap();
        let first = energy(&f, u, m).unwrap();
        let second = energy(&f, m, v).unwrap();
        prop_assert!(whole >= first + second);
    }

    #[test]
    fn radix_sort_matches_std_sort(mut keys in proptest::collection::vec(any::<u64>(), 0..200)) {
        let mut expected = keys.clone();
        expected.sort_unstable();
        radix_sort_u64(&mut keys);
        prop_assert_eq!(keys, expected);
    }

    #[test]
    fn chain_eval_interpolates_between_vertices(seed in 0u64..5_000) {
        let Some(f) = small_field(seed, 6.0) else { return Ok(()) };
        let u = p(0.0, 0.0);
        let v = p(4.0, 4.0);
        let g = uppermost_geodesic(&f, u, v).unwrap();
        let verts = g.vertices();
        for w in verts.windows(2) {
            let mid = 0.5 * (w[0].a + w[1].a);
            let want = 0.5 * (w[0].b + w[1].b);
            prop_assert!((g.eval_at_a(mid).unwrap() - want).abs() < 1e-9);
        }
    }
}
