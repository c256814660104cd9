//! Randomized invariants across the measure, transport, rate, Cantor,
//! porosity and field layers.

use porous_ot::porosity::{self, porosity_index, porosity_sup};
use porous_ot::rates::{p_ordering_check, rate_quotient, shift_superpose};
use porous_ot::transport::{
    c_transform, c_transform_reference, dual_lower_bound_w1, transport_cost, w1_cdf, w1_quantile, wasserstein,
    GridPotential,
};
use porous_ot::{Atom, CantorSpec, IntervalSet, Measure1D, MeasureField, PiecewiseLinear, Segment};
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = Measure1D> {
    let atoms = prop::collection::vec((-2.0..2.0f64, 0.05..1.0f64), 0..5);
    let segs = prop::collection::vec((-2.0..2.0f64, 0.01..1.0f64, 0.05..1.0f64), 0..4);
    (atoms, segs)
        .prop_filter("nonempty", |(a, s)| !a.is_empty() || !s.is_empty())
        .prop_map(|(a, s)| {
            Measure1D::from_parts(
                a.into_iter().map(|(position, mass)| Atom { position, mass }).collect(),
                s.into_iter().map(|(left, len, mass)| Segment { left, right: left + len, mass }).collect(),
            )
            .unwrap()
        })
}

fn probability() -> impl Strategy<Value = Measure1D> {
    measure().prop_map(|m| m.normalized())
}

fn atomic_base() -> impl Strategy<Value = Measure1D> {
    prop::collection::vec((-3.0..3.0f64, 0.1..1.0f64), 1..6).prop_map(|pts| {
        let total: f64 = pts.iter().map(|p| p.1).sum();
        Measure1D::atomic(&pts.iter().map(|&(x, w)| (x, w / total)).collect::<Vec<_>>()).unwrap()
    })
}

/// Fiber draws large enough for any base produced by `atomic_base`.
fn fiber_draws() -> impl Strategy<Value = Vec<Vec<(f64, f64)>>> {
    prop::collection::vec(prop::collection::vec((-1.5..1.5f64, 0.1..1.0f64), 1..4), 6)
}

fn field(base: &Measure1D, draws: &[Vec<(f64, f64)>]) -> MeasureField {
    let mut k = 0;
    MeasureField::from_base(base, |_| {
        let d = &draws[k];
        k += 1;
        let s: f64 = d.iter().map(|v| v.1).sum();
        d.iter().map(|&(v, w)| (v, w / s)).collect()
    })
    .unwrap()
}

fn lipschitz_fn() -> impl Strategy<Value = PiecewiseLinear> {
    (prop::collection::vec((0.01..0.8f64, -1.0..=1.0f64), 1..8), -1.0..=1.0f64, -1.0..=1.0f64, -3.0..0.0f64).prop_map(
        |(steps, l, r, x0)| {
            let mut knots = vec![(x0, 0.0)];
            for (dx, slope) in steps {
                let &(x, y) = knots.last().unwrap();
                knots.push((x + dx, y + slope * dx));
            }
            PiecewiseLinear::new(knots, l, r).unwrap()
        },
    )
}

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0.0..0.5f64, 0.001..0.5f64), 1..6).prop_map(|parts| {
        let mut x = 0.0;
        let mut iv = Vec::new();
        for (len, gap) in parts {
            iv.push((x, x + len));
            x += len + gap;
        }
        IntervalSet::new(iv).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_and_quantile_form_a_galois_pair(m in measure(), x in -3.0..4.0f64, t in 0.0001..1.0f64) {
        let r = t * m.total_mass();
        let (f, q) = (m.cdf(), m.quantile());
        prop_assert_eq!(f.eval(x) >= r, x >= q.eval(r).unwrap());
    }

    #[test]
    fn affine_maps_compose(m in measure(), a in 0.2..3.0f64, b in -1.0..1.0f64, a2 in -3.0..-0.2f64, b2 in -1.0..1.0f64) {
        let once = m.pushforward_affine(a2 * a, a2 * b + b2);
        let twice = m.pushforward_affine(a, b).pushforward_affine(a2, b2);
        prop_assert_eq!(twice.total_mass(), m.total_mass());
        prop_assert!(once.approx_eq(&twice, 1e-12));
    }

    #[test]
    fn mixture_is_commutative_and_associative(a in measure(), b in measure(), c in measure(), w in 0.1..2.0f64) {
        let ab = Measure1D::mixture(&[(&a, w), (&b, 1.0)]).unwrap();
        let ba = Measure1D::mixture(&[(&b, 1.0), (&a, w)]).unwrap();
        prop_assert!(ab.approx_eq(&ba, 1e-12));
        let left = Measure1D::mixture(&[(&ab, 1.0), (&c, 1.0)]).unwrap();
        let bc = Measure1D::mixture(&[(&b, 1.0), (&c, 1.0)]).unwrap();
        let right = Measure1D::mixture(&[(&a, w), (&bc, 1.0)]).unwrap();
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn restriction_to_a_split_keeps_mass(m in measure(), cut in -2.0..3.0f64) {
        let (lo, hi) = m.support_hull();
        let left = IntervalSet::interval(lo.min(cut) - 1.0, cut).unwrap();
        let right = IntervalSet::interval(cut, hi.max(cut) + 1.0).unwrap();
        let mass = |s: &IntervalSet| m.restrict(s).map(|r| r.total_mass()).unwrap_or(0.0);
        let total = mass(&left) + mass(&right);
        prop_assert!((total - m.total_mass()).abs() <= 1e-12 * m.total_mass());
    }

    #[test]
    fn dual_never_exceeds_primal(m in probability(), n in probability(), psi in lipschitz_fn()) {
        let dual = dual_lower_bound_w1(&m, &n, &psi).unwrap();
        prop_assert!(dual <= wasserstein(&m, &n, 1.0).unwrap() + 1e-9);
    }

    #[test]
    fn w1_routes_agree(m in probability(), n in probability(), w in 0.1..0.9f64) {
        let mix = Measure1D::mixture(&[(&m, w), (&n, 1.0 - w)]).unwrap();
        let (a, b) = (w1_quantile(&m, &mix).unwrap(), w1_cdf(&m, &mix).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn wasserstein_is_a_metric(a in probability(), b in probability(), c in probability()) {
        for p in [1.0, 2.0] {
            let ab = wasserstein(&a, &b, p).unwrap();
            prop_assert_eq!(ab, wasserstein(&b, &a, p).unwrap());
            prop_assert!(wasserstein(&a, &a, p).unwrap() <= 1e-12);
            let via = wasserstein(&a, &c, p).unwrap() + wasserstein(&c, &b, p).unwrap();
            prop_assert!(ab <= via + 1e-9);
        }
    }

    #[test]
    fn fast_c_transform_matches_enumeration(values in prop::collection::vec(-2.0..2.0f64, 2..80), p2 in any::<bool>(), step in 0.01..0.5f64) {
        let p = if p2 { 2.0 } else { 1.0 };
        let phi = GridPotential::new(-1.0, step, values, p).unwrap();
        let (fast, slow) = (c_transform(&phi), c_transform_reference(&phi));
        prop_assert_eq!(fast.values(), slow.values());
    }

    #[test]
    fn double_c_transform_is_one_lipschitz_and_fixed(values in prop::collection::vec(-2.0..2.0f64, 2..80), step in 0.01..0.5f64) {
        let phi = GridPotential::new(0.0, step, values, 1.0).unwrap();
        let once = c_transform(&phi);
        let twice = c_transform(&once);
        for w in twice.values().windows(2) {
            prop_assert!((w[1] - w[0]).abs() <= step * (1.0 + 1e-9) + 1e-12);
        }
        for (x, y) in twice.values().iter().zip(c_transform(&twice).values()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn rate_quotient_is_at_most_one(m in probability(), h in 1e-4..1.0f64, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let s = rate_quotient(&m, h, p).unwrap();
        prop_assert!(s.quotient >= 0.0 && s.quotient <= 1.0 + 1e-9);
    }

    #[test]
    fn shift_superposition_commutes_with_translation(m in measure(), h in 1e-3..0.5f64, t in -1.0..1.0f64) {
        let a = shift_superpose(&m.pushforward_affine(1.0, t), h);
        let b = shift_superpose(&m, h).pushforward_affine(1.0, t);
        prop_assert!((shift_superpose(&m, h).total_mass() - m.total_mass()).abs() <= 1e-15 * m.total_mass());
        prop_assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn p_ordering_sandwich(m in measure(), h in prop::sample::select(vec![1e-1, 1e-3])) {
        let report = p_ordering_check(&m, h, &[1.0, 1.5, 2.0, 3.0]).unwrap();
        prop_assert!(report.worst_margin() >= -1e-9);
    }

    #[test]
    fn cantor_structure(c in 0.05..0.9f64, n in 1usize..8) {
        let spec = CantorSpec::constant(c, 10).unwrap();
        let d = spec.deltas(n + 1);
        for k in 0..n {
            prop_assert!((d[k + 1] - d[k] * (1.0 - spec.alpha(k)) / 2.0).abs() <= 1e-15 * d[k]);
        }
        let (g, g1) = (spec.generation(n).unwrap(), spec.generation(n + 1).unwrap());
        // endpoints carry O(n·ε) recursion error
        for &(a, b) in g1.intervals() {
            prop_assert!(g.intervals().iter().any(|&(c, d)| c - 1e-15 <= a && b <= d + 1e-15));
        }
        for &(a, b) in g.intervals() {
            prop_assert!(((b - a) - spec.delta(n)).abs() <= 1e-14);
        }
        // every generation-m interval carries mass 2^-m under μ^n
        let mu = spec.measure(n).unwrap();
        for m in 0..=n {
            for &(a, b) in spec.generation(m).unwrap().intervals() {
                // pad past the rounding of recursively computed endpoints
                let part = mu.restrict(&IntervalSet::interval(a - 1e-14, b + 1e-14).unwrap()).unwrap().total_mass();
                prop_assert!((part - 0.5f64.powi(m as i32)).abs() <= 1e-13);
            }
        }
        let next = spec.measure(n + 1).unwrap();
        prop_assert!(wasserstein(&mu, &next, 1.0).unwrap() <= spec.delta(n) + 1e-12);
    }

    #[test]
    fn finite_sets_have_no_holes_below_their_separation(xs in prop::collection::btree_set(-1000i32..1000, 1..12), frac in 0.01..1.0f64) {
        let pts: Vec<f64> = xs.iter().map(|&k| f64::from(k) / 100.0).collect();
        let d = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let s = if d.is_finite() { d * frac } else { frac };
        prop_assert_eq!(porosity_sup(&IntervalSet::points(&pts).unwrap(), s).unwrap(), 0.0);
    }

    #[test]
    fn porosity_index_is_the_farthest_point_in_the_ball(a in interval_set(), t in 0.0..1.0f64, which in any::<prop::sample::Index>(), s in 0.01..1.0f64) {
        let iv = a.intervals();
        let (lo, hi) = iv[which.index(iv.len())];
        let x = lo + t * (hi - lo);
        // brute force: clip every endpoint to the closed ball, keep intervals meeting the open ball
        let far = iv
            .iter()
            .filter(|&&(c, d)| d > x - s && c < x + s)
            .flat_map(|&(c, d)| [c, d])
            .map(|e| (e.clamp(x - s, x + s) - x).abs())
            .fold(0.0f64, f64::max);
        let index = porosity_index(&a, x, s).unwrap();
        prop_assert!((index * s - far).abs() <= 1e-12);
        prop_assert!(index <= porosity_sup(&a, s).unwrap() + 1e-12);
    }

    #[test]
    fn distance_potential_is_a_one_lipschitz_zero_on_the_set(a in interval_set(), t in 0.0..1.0f64) {
        let psi = porosity::distance_potential(&a).unwrap();
        for slope in psi.slopes() {
            prop_assert!(slope == 0.0 || (slope.abs() - 1.0).abs() <= 1e-12, "slope {}", slope);
        }
        for &(lo, hi) in a.intervals() {
            prop_assert_eq!(psi.eval(lo + t * (hi - lo)), 0.0);
        }
    }

    #[test]
    fn tangent_field_geometry(base in atomic_base(), d1 in fiber_draws(), d2 in fiber_draws(), d3 in fiber_draws(), h in 1e-3..1.0f64) {
        let (x, y, z) = (field(&base, &d1), field(&base, &d2), field(&base, &d3));
        prop_assert!(x.inner(&y).unwrap().abs() <= x.norm() * y.norm() + 1e-9);
        prop_assert!(x.w_mu(&y).unwrap() <= x.w_mu(&z).unwrap() + z.w_mu(&y).unwrap() + 1e-9);
        prop_assert!(x.w_mu(&x).unwrap() <= 1e-12);
        let moved = x.exp_map(h);
        prop_assert!(transport_cost(&base, &moved, 2.0).unwrap().sqrt() <= h * x.norm() + 1e-12);
    }
}
