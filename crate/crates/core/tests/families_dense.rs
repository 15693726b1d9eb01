//! Family-level invariants checked against dense truncations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use weightlat::families::{
    product_one_plus_excluding, OrderSeq, SequenceSpec, WeightSpec,
};
use weightlat::lattice::{table_len, Dim};
use weightlat::table::check_completely_monotone;
use weightlat::transforms::{t_down, t_up, t_up_spec, TransformParams};
use weightlat::{Subset, WeightTable};

#[test]
fn monotone_products_pass_on_every_truncation() {
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    for _ in 0..30 {
        let mut factors: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..=1.0)).collect();
        factors.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spec = WeightSpec::Product {
            seq: SequenceSpec::Explicit(factors),
            d: Dim::Infinite,
        };
        for d in 1..=8u32 {
            let table = spec.with_dim(Dim::Finite(d)).truncate_to_table(d).unwrap();
            assert!(check_completely_monotone(&table).is_member, "d={d}");
        }
    }
    // A factor above one breaks membership on any truncation containing it.
    let bad = WeightSpec::Product {
        seq: SequenceSpec::Explicit(vec![1.5]),
        d: Dim::Finite(2),
    };
    let table = bad.truncate_to_table(2).unwrap();
    assert!(!check_completely_monotone(&table).is_member);
}

#[test]
fn transforms_preserve_finite_order() {
    let mut entries = BTreeMap::new();
    entries.insert(vec![1u32], 3.0);
    entries.insert(vec![2u32, 4], 2.0);
    entries.insert(vec![3u32, 5], 1.0);
    let omega = 2u32;
    let spec = WeightSpec::FiniteOrder {
        order: omega,
        entries,
        d: Dim::Finite(5),
    };
    spec.validate().unwrap();
    let table = spec.truncate_to_table(5).unwrap();
    let params = TransformParams::finite(1.3, 5).unwrap();
    let up = t_up(&table, &params).unwrap();
    let down = t_down(&table, &params).unwrap();
    for (u, v) in up.iter() {
        if u.cardinality() > omega {
            assert_eq!(*v, 0.0, "forward at {u}");
        }
    }
    for (u, v) in down.iter() {
        if u.cardinality() > omega {
            assert_eq!(*v, 0.0, "inverse at {u}");
        }
    }
    // The symbolic route keeps the declared order too.
    let up_spec = t_up_spec(&spec, 1.3).unwrap();
    match up_spec.as_spec().unwrap() {
        WeightSpec::FiniteOrder { order, .. } => assert_eq!(*order, omega),
        other => panic!("expected finite-order output, got {}", other.family_name()),
    }
}

#[test]
fn infinite_product_transform_matches_entry_closed_form() {
    // For summable product factors the transformed entry has the closed
    // form C^{2|u|} γ_u · Π_{j∉u} (1 + C²γ_j); compare the symbolic output
    // against an independently computed certified product.
    let seq = SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 };
    let spec = WeightSpec::Product {
        seq: seq.clone(),
        d: Dim::Infinite,
    };
    for &c in &[1.0f64, 1.5] {
        let up = t_up_spec(&spec, c).unwrap();
        let c2 = c * c;
        for coords in [vec![], vec![1u32], vec![2, 3], vec![1, 4, 7]] {
            let got = up.eval(&coords).unwrap();
            let gamma_u: f64 = coords.iter().map(|&j| seq.get(j)).product();
            let rest = product_one_plus_excluding(&seq, c2, &coords);
            let expect = c2.powi(coords.len() as i32) * gamma_u * rest.mid();
            assert!(
                (got.mid() - expect).abs() <= 1e-9 * expect.max(1e-12),
                "C={c} {coords:?}: {got:?} vs {expect}"
            );
        }
    }
}

#[test]
fn decay_survives_through_the_transformed_family() {
    // The decay of the transformed weights, computed on the transformed
    // family itself (not via the invariance shortcut), matches the input
    // decay.
    use weightlat::families::{decay, DecayResult};
    let spec = WeightSpec::Product {
        seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
        d: Dim::Infinite,
    };
    let up = t_up_spec(&spec, 1.0).unwrap();
    let pod = up.as_spec().unwrap();
    assert_eq!(decay(pod).unwrap(), DecayResult::Value(2.0));
    // And the transformed family is itself summable at any constant.
    let report = weightlat::transforms::summability(pod, 1.0).unwrap();
    assert_eq!(report.verdict, weightlat::transforms::Verdict::Holds);
}

#[test]
fn squashed_output_is_constant_order_family() {
    let spec = WeightSpec::Product {
        seq: SequenceSpec::Geometric { c: 0.8, q: 0.5 },
        d: Dim::Infinite,
    };
    let up = t_up_spec(&spec, 1.0).unwrap();
    match up.as_spec().unwrap() {
        WeightSpec::Pod { order, seq, .. } => {
            let g0 = match order {
                OrderSeq::Constant(v) => *v,
                other => panic!("expected constant order sequence, got {other:?}"),
            };
            // Γ_∅ = Π (1 + γ_j) and factors γ_j/(1 + γ_j).
            let direct: f64 = (1..200).map(|j| 1.0 + 0.8 * 0.5f64.powi(j)).product();
            assert!((g0 - direct).abs() < 1e-9 * direct);
            let g1 = 0.8 * 0.5;
            assert!((seq.get(1) - g1 / (1.0 + g1)).abs() < 1e-12);
        }
        other => panic!("expected POD output, got {}", other.family_name()),
    }
}

#[test]
fn sandwich_enclosures_hold_on_many_random_specs() {
    use weightlat::families::{sandwich_down, sandwich_up, Truncation};
    let mut rng = ChaCha12Rng::seed_from_u64(63);
    let d = 8u32;
    let policy = Truncation::default();
    for trial in 0..100 {
        let mut factors: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..0.99)).collect();
        factors.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spec = WeightSpec::Product {
            seq: SequenceSpec::Explicit(factors),
            d: Dim::Finite(d),
        };
        let c = rng.gen_range(0.5..2.0);
        let table = spec.truncate_to_table(d).unwrap();
        let params = TransformParams::finite(c, d).unwrap();
        let up = t_up(&table, &params).unwrap();
        let down = t_down(&table, &params).unwrap();

        let b = sandwich_up(&spec, c, &policy).unwrap();
        let eta = b.lower.truncate_to_table(d).unwrap();
        for bits in 0..table_len(d) {
            let v = up.values()[bits];
            let e = eta.values()[bits];
            assert!(e <= v * (1.0 + 1e-9) + 1e-12, "trial {trial}");
            assert!(v <= b.upper_constant.hi * e * (1.0 + 1e-9) + 1e-12, "trial {trial}");
        }
        let b = sandwich_down(&spec, c).unwrap();
        let zeta = b.upper.truncate_to_table(d).unwrap();
        for bits in 0..table_len(d) {
            let v = down.values()[bits];
            let z = zeta.values()[bits];
            assert!(b.lower_constant.lo * z <= v * (1.0 + 1e-9) + 1e-12, "trial {trial}");
            assert!(v <= z * (1.0 + 1e-9) + 1e-12, "trial {trial}");
        }
    }
}

#[test]
fn truncations_satisfy_family_identities() {
    let mut rng = ChaCha12Rng::seed_from_u64(67);
    let d = 6u32;
    let mut factors: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0)).collect();
    factors.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let gammas: Vec<f64> = (0..=d).map(|_| rng.gen_range(0.0..3.0)).collect();
    let spec = WeightSpec::Pod {
        seq: SequenceSpec::Explicit(factors.clone()),
        order: OrderSeq::Explicit(gammas.clone()),
        a: 2.0,
        c_a: gammas.iter().cloned().fold(0.0, f64::max).max(1.0),
        d: Dim::Finite(d),
    };
    spec.validate().unwrap();
    let table = spec.truncate_to_table(d).unwrap();
    for bits in 0..table_len(d) {
        let u = Subset(bits as u32);
        let prod: f64 = u.members().map(|j| factors[j as usize - 1]).product();
        let expect = gammas[u.cardinality() as usize] * prod;
        assert!((table.values()[bits] - expect).abs() <= 1e-12 * expect.max(1.0));
    }
}
