use proptest::prelude::*;

use probmetrize::approach::{delta_via_lambda, neighborhood};
use probmetrize::oracle::random_space;
use probmetrize::transforms::idempotent_projection;
use probmetrize::*;

fn corpus() -> Vec<OrdinalSum> {
    use Archetype::*;
    let sum = |iv: &[(f64, f64, Archetype)]| {
        OrdinalSum::new(iv.iter().map(|&(a, b, k)| OrdinalInterval::new(a, b, k).unwrap()).collect()).unwrap()
    };
    vec![
        OrdinalSum::minimum(),
        OrdinalSum::product(),
        OrdinalSum::lukasiewicz(),
        sum(&[(0.2, 0.8, Lukasiewicz)]),
        sum(&[(0.3, 1.0, Product)]),
        sum(&[(0.3, 1.0, Lukasiewicz)]),
        sum(&[(0.1, 0.3, Product), (0.5, 0.7, Lukasiewicz)]),
    ]
}

fn tnorm() -> impl Strategy<Value = OrdinalSum> {
    let c = corpus();
    (0..c.len()).prop_map(move |i| c[i].clone())
}

/// Quarter-grid jumps and tenth-grid values.
fn step() -> impl Strategy<Value = StepDistribution> {
    (prop::collection::btree_set(1u32..=24, 1..=4), prop::collection::btree_set(1u32..=10, 4), any::<bool>())
        .prop_map(|(jumps, values, finish)| {
            let mut values: Vec<u32> = values.into_iter().collect();
            values.truncate(jumps.len());
            if finish {
                *values.last_mut().unwrap() = 10;
            }
            let plateaus = jumps
                .into_iter()
                .zip(values)
                .map(|(j, v)| (j as f64 * 0.25, v as f64 / 10.0))
                .collect();
            StepDistribution::new(plateaus).unwrap()
        })
}

fn space() -> impl Strategy<Value = ProbMetricSpace> {
    (tnorm(), 2usize..=5, any::<u64>()).prop_map(|(t, n, seed)| random_space(&t, n, seed).unwrap())
}

fn probes(ds: &[&StepDistribution]) -> Vec<f64> {
    let mut ts = vec![0.0, 0.1];
    for d in ds {
        for j in d.jumps() {
            ts.extend([j, j + 0.1, (j - 0.1).max(0.0)]);
        }
    }
    ts
}

proptest! {
    #[test]
    fn tnorm_is_commutative_monotone_and_below_min(t in tnorm(), p in 0.0..=1.0f64, q in 0.0..=1.0f64, r in 0.0..=1.0f64) {
        let pq = t.eval(p, q);
        prop_assert_eq!(pq, t.eval(q, p));
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!(pq <= p.min(q));
        if q <= r {
            prop_assert!(pq <= t.eval(p, r));
        }
        prop_assert_eq!(t.eval(p, 1.0), p);
    }

    #[test]
    fn idempotent_floor_is_idempotent_and_below(t in tnorm(), q in 0.0..=1.0f64) {
        let f = t.idempotent_floor(q);
        prop_assert!(f <= q);
        prop_assert!(t.is_idempotent(f));
        prop_assert_eq!(t.eval(f, f), f);
        prop_assert_eq!(t.idempotent_floor(f), f);
    }

    #[test]
    fn convolution_commutes(t in tnorm(), a in step(), b in step()) {
        prop_assert_eq!(a.convolve(&b, &t).unwrap(), b.convolve(&a, &t).unwrap());
    }

    #[test]
    fn kappa_is_neutral(t in tnorm(), a in step()) {
        let k = StepDistribution::kappa();
        prop_assert_eq!(&a.convolve(&k, &t).unwrap(), &a);
        prop_assert_eq!(&k.convolve(&a, &t).unwrap(), &a);
    }

    #[test]
    fn convolution_is_associative(t in tnorm(), a in step(), b in step(), c in step()) {
        let left = a.convolve(&b, &t).unwrap().convolve(&c, &t).unwrap();
        let right = a.convolve(&b.convolve(&c, &t).unwrap(), &t).unwrap();
        if t.is_minimum() {
            prop_assert_eq!(left, right);
        } else {
            for s in probes(&[&left, &right]) {
                let (l, r) = (left.evaluate(ExtReal::finite(s)), right.evaluate(ExtReal::finite(s)));
                prop_assert!((l - r).abs() <= 1e-12, "at {}: {} vs {}", s, l, r);
            }
        }
    }

    #[test]
    fn convolution_is_monotone_and_below_minimum(t in tnorm(), a in step(), b in step(), c in step()) {
        let bigger = StepDistribution::sup([&a, &c]);
        prop_assert!(a.leq(&bigger));
        prop_assert!(a.convolve(&b, &t).unwrap().leq(&bigger.convolve(&b, &t).unwrap()));
        let under_min = a.convolve(&b, &OrdinalSum::minimum()).unwrap();
        prop_assert!(a.convolve(&b, &t).unwrap().leq(&under_min));
    }

    #[test]
    fn sup_is_least_upper_bound(a in step(), b in step(), c in step()) {
        let ab = StepDistribution::sup([&a, &b]);
        prop_assert!(a.leq(&ab) && b.leq(&ab));
        let top = StepDistribution::sup([&a, &b, &c]);
        prop_assert!(ab.leq(&top));
        prop_assert_eq!(a.leq(&b), a.first_violation(&b).is_none());
        prop_assert!(a.leq(&a));
    }

    #[test]
    fn steps_are_left_continuous(a in step()) {
        for (j, _) in a.plateaus() {
            let at = a.evaluate(ExtReal::finite(*j));
            let before = a.evaluate(ExtReal::finite(j - 1e-9));
            prop_assert_eq!(at, before);
            prop_assert!(a.value_after(*j) >= at);
        }
        prop_assert_eq!(a.evaluate(ExtReal::ZERO), 0.0);
        prop_assert_eq!(a.evaluate(ExtReal::INFINITY), 1.0);
    }

    #[test]
    fn random_spaces_satisfy_axioms(m in space()) {
        let report = m.check_axioms();
        prop_assert!(report.all_passed(), "{}", report.render());
        let delta = FiniteApproachSpace::derive(&m).unwrap();
        let a = delta.check_axioms();
        prop_assert!(a.all_passed(), "{}", a.render());
    }

    #[test]
    fn closure_is_a_kuratowski_operator(m in space(), s in any::<u32>(), u in any::<u32>()) {
        let delta = FiniteApproachSpace::derive(&m).unwrap();
        let full = Subset::full(m.len()).bits();
        let (s, u) = (Subset::from_bits(s & full), Subset::from_bits(u & full));
        prop_assert_eq!(delta.closure(Subset::EMPTY), Subset::EMPTY);
        prop_assert!(s.is_subset_of(delta.closure(s)));
        prop_assert_eq!(delta.closure(delta.closure(s)), delta.closure(s));
        prop_assert_eq!(delta.closure(s.union(u)), delta.closure(s).union(delta.closure(u)));
    }

    #[test]
    fn lambda_route_matches_derivation(m in space()) {
        let delta = FiniteApproachSpace::derive(&m).unwrap();
        for x in 0..m.len() {
            for a in Subset::all(m.len()).filter(|a| !a.is_empty()) {
                prop_assert_eq!(delta_via_lambda(&m, x, a).unwrap(), delta.delta(x, a));
            }
        }
    }

    #[test]
    fn neighborhoods_grow_with_radius(m in space(), s in 0.01..1.0f64, t in 0.01..1.0f64) {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        for x in 0..m.len() {
            let small = neighborhood(&m, x, lo).unwrap();
            prop_assert!(small.contains(x));
            prop_assert!(small.is_subset_of(neighborhood(&m, x, hi).unwrap()));
        }
    }

    #[test]
    fn projection_is_idempotent(m in space()) {
        let once = idempotent_projection(&m).unwrap();
        let twice = idempotent_projection(&once.output).unwrap();
        prop_assert_eq!(once.output.matrix(), twice.output.matrix());
        prop_assert!(once.passed() && twice.passed());
    }

    #[test]
    fn triangle_closure_is_idempotent(m in space()) {
        let raw: Vec<Vec<StepDistribution>> = m
            .matrix()
            .iter()
            .map(|row| row.iter().map(|d| d.as_step().unwrap().clone()).collect())
            .collect();
        let again = ProbMetricSpace::triangle_closure(m.carrier().clone(), raw, m.tnorm().clone()).unwrap();
        prop_assert_eq!(again, m);
    }

    #[test]
    fn spaces_round_trip_through_json(m in space()) {
        let text = serde_json::to_string(&m.to_json_value()).unwrap();
        let back: ProbMetricSpace = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, m);
    }
}
