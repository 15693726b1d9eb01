//! Acceptance suite: reproduces the reference values and property suites
//! end to end, one test per criterion, each printing a pass/fail line with
//! its runtime (run with `cargo test --test acceptance -- --nocapture` to
//! see them).

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::time::Instant;
use weightlat::families::{
    decay, decay_after_up, extremal_lower_bound, is_pod_table, sandwich_down, sandwich_up,
    DecayResult, OrderSeq, SequenceSpec, Truncation, WeightSpec,
};
use weightlat::geometry::{
    delta_prime_equivalence, hypercube_extension_check, maximal_monotone_minorant, verify_maximal,
};
use weightlat::kernels::{
    converged_embedding_lower_bound, find_embedding_violation, verify_embedding, SuperpositionKernel,
    UnivariateKernel, WeightsRepr,
};
use weightlat::lattice::{table_len, Dim};
use weightlat::points::PointSet;
use weightlat::scalar::Scalar;
use weightlat::table::{check_completely_monotone, check_monotone_bruteforce};
use weightlat::transforms::{t_down, t_down_spec, t_up, t_up_spec, zeta_scaled_signed};
use weightlat::wce::{full_transfer, wce_integration};
use weightlat::{Rational, Subset, TransformParams, WeightTable};

struct Criterion {
    name: &'static str,
    limit_ms: u128,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, limit_ms: u128) -> Self {
        Criterion {
            name,
            limit_ms,
            start: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_millis();
        let ok = elapsed < self.limit_ms;
        println!(
            "criterion {}: {} ({elapsed} ms, limit {} ms)",
            self.name,
            if ok { "PASS" } else { "FAIL (runtime)" },
            self.limit_ms
        );
        assert!(
            ok,
            "criterion {} exceeded its runtime limit: {elapsed} ms >= {} ms",
            self.name, self.limit_ms
        );
    }
}

fn reference_pod_spec() -> WeightSpec {
    WeightSpec::Pod {
        seq: SequenceSpec::Explicit(vec![3.0, 2.0, 1.0]),
        order: OrderSeq::Explicit(vec![1.0, 3.0, 4.0, 5.0]),
        a: 1.0,
        c_a: 5.0,
        d: Dim::Finite(3),
    }
}

#[test]
fn criterion_01_pod_transform_table() {
    let c = Criterion::new("1 (pod transform table)", 1);
    // Exact integer arithmetic end to end.
    let table = reference_pod_spec().truncate_to_table_exact(3).unwrap();
    let params = TransformParams::finite(<Rational as Scalar>::from_u32(1), 3).unwrap();
    let up = t_up(&table, &params).unwrap();
    let expect = |members: &[u32], v: u32| {
        assert_eq!(
            *up.get(Subset::from_members(members)),
            <Rational as Scalar>::from_u32(v),
            "{members:?}"
        );
    };
    expect(&[2], 68);
    expect(&[3], 53);
    expect(&[1, 2], 54);
    expect(&[1, 3], 42);
    // The transformed table is no longer of POD shape: the cross ratios
    // 54/68 and 42/53 disagree.
    let up_f = reference_pod_spec().truncate_to_table(3).unwrap();
    let up_f = t_up(&up_f, &TransformParams::finite(1.0, 3).unwrap()).unwrap();
    assert!(!is_pod_table(&up_f, 1e-9));
    assert!(is_pod_table(
        &reference_pod_spec().truncate_to_table(3).unwrap(),
        1e-9
    ));
    c.finish();
}

#[test]
fn criterion_02_counterexample_suite() {
    let c = Criterion::new("2 (maximal minorant suite)", 100);
    let gamma = WeightTable::new(2, vec![5.0, 5.0, 3.0, 1.0]).unwrap();
    let params = TransformParams::finite(1.0, 2).unwrap();
    let down = t_down(&gamma, &params).unwrap();
    assert_eq!(down.values(), &[-2.0, 4.0, 2.0, 1.0]);

    let cert = check_completely_monotone(&gamma);
    assert!(!cert.is_member);
    assert!(cert.witness_holds(&gamma, 1e-9));

    let minorant = maximal_monotone_minorant(&gamma).unwrap();
    assert!((minorant.objective - 12.0).abs() < 1e-9);
    assert!(minorant.maximal);

    let eta = WeightTable::new(2, vec![5.0, 5.0, 1.0, 1.0]).unwrap();
    let zeta = WeightTable::new(2, vec![5.0, 3.0, 3.0, 1.0]).unwrap();
    let (eta_max, _) = verify_maximal(&eta, &gamma).unwrap();
    let (zeta_max, _) = verify_maximal(&zeta, &gamma).unwrap();
    assert!(eta_max && zeta_max);
    assert!(!eta.le(&zeta) && !zeta.le(&eta));
    c.finish();
}

#[test]
fn criterion_03_bijection_suite() {
    let c = Criterion::new("3 (bijection round trips)", 5_000);
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let d = 8u32;
    for trial in 0..100 {
        let cval = [0.5, 1.0, 2.0][trial % 3];
        let params = TransformParams::finite(cval, d).unwrap();
        let values: Vec<f64> = (0..table_len(d)).map(|_| rng.gen_range(0.0..4.0)).collect();
        let gamma = WeightTable::new(d, values).unwrap();
        let scale = gamma.sup_norm().max(1e-300);

        let up = t_up(&gamma, &params).unwrap();
        let back = t_down(&up, &params).unwrap();
        assert!(back.sup_distance(&gamma.as_signed()) <= 1e-9 * scale);

        // Monotone inputs: forward of inverse returns the table.
        let member = t_up(&gamma, &TransformParams::finite(1.0, d).unwrap()).unwrap();
        let member_scale = member.sup_norm().max(1e-300);
        let down = t_down(&member, &params).unwrap();
        let again = zeta_scaled_signed(&down, &params).unwrap();
        assert!(again.sup_distance(&member.as_signed()) <= 1e-9 * member_scale);
    }
    // Exact mode at d = 6: both deviations are exactly zero.
    let d = 6u32;
    let values: Vec<Rational> = (0..table_len(d))
        .map(|i| Rational::new((i as i64 % 17).into(), ((i as i64 % 5) + 1).into()))
        .collect();
    let gamma = WeightTable::new(d, values).unwrap();
    let params = TransformParams::finite(Rational::new(1.into(), 2.into()), d).unwrap();
    let up = t_up(&gamma, &params).unwrap();
    let back = t_down(&up, &params).unwrap();
    for (a, b) in back.values().iter().zip(gamma.values()) {
        assert_eq!(a, b);
    }
    let down = t_down(&gamma, &params).unwrap();
    let again = zeta_scaled_signed(&down, &params).unwrap();
    for (a, b) in again.values().iter().zip(gamma.values()) {
        assert_eq!(a, b);
    }
    c.finish();
}

#[test]
fn criterion_04_monotone_range_suite() {
    let c = Criterion::new("4 (forward range in the cone)", 10_000);
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    for trial in 0..200u32 {
        let d = 1 + (trial % 6);
        let cval = [0.5, 1.0, 2.0][(trial % 3) as usize];
        let values: Vec<f64> = (0..table_len(d)).map(|_| rng.gen_range(0.0..2.0)).collect();
        let gamma = WeightTable::new(d, values).unwrap();
        let up = t_up(&gamma, &TransformParams::finite(cval, d).unwrap()).unwrap();
        assert!(check_completely_monotone(&up).is_member, "trial {trial}");
        assert!(
            check_monotone_bruteforce(&up).unwrap().is_member,
            "trial {trial}"
        );
    }
    c.finish();
}

#[test]
fn criterion_05_closed_form_agreement() {
    let c = Criterion::new("5 (structured vs dense transforms)", 5_000);
    let mut rng = ChaCha12Rng::seed_from_u64(505);
    let d = 10u32;
    let policy = Truncation::default();
    for trial in 0..20 {
        // Random non-increasing factors in [0, 1) keep the family monotone,
        // so both transform directions apply. Dyadic values keep the exact
        // reference arithmetic small.
        let mut factors: Vec<f64> = (0..d).map(|_| rng.gen_range(0..61) as f64 / 64.0).collect();
        factors.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let seq = SequenceSpec::Explicit(factors.clone());
        let spec = WeightSpec::Product {
            seq: seq.clone(),
            d: Dim::Finite(d),
        };
        let cval = [0.5, 1.0, 2.0][trial % 3];
        let table = spec.truncate_to_table(d).unwrap();
        let params = TransformParams::finite(cval, d).unwrap();

        // The dense reference runs in exact arithmetic: the float sweep
        // cancels near small inverse entries, the closed forms do not.
        let exact_table = spec.truncate_to_table_exact(d).unwrap();
        let exact_params =
            TransformParams::finite(<Rational as Scalar>::from_f64(cval), d).unwrap();
        let dense_up = t_up(&exact_table, &exact_params).unwrap();
        let dense_down = t_down(&exact_table, &exact_params).unwrap();
        let spec_up = t_up_spec(&spec, cval).unwrap();
        let spec_down = t_down_spec(&spec, cval).unwrap();
        for bits in 0..table_len(d) {
            let coords = Subset(bits as u32).to_coords();
            let su = spec_up.eval(&coords).unwrap();
            let du = dense_up.values()[bits].to_f64();
            assert!(
                (su.mid() - du).abs() <= 1e-12 * du.abs().max(1e-12),
                "up trial {trial} {coords:?}: {su:?} vs {du}"
            );
            let sd = spec_down.eval(&coords).unwrap();
            let dd = dense_down.values()[bits].to_f64();
            assert!(
                (sd.mid() - dd).abs() <= 1e-12 * dd.abs().max(1e-12),
                "down trial {trial} {coords:?}: {sd:?} vs {dd}"
            );
        }
        let dense_up = t_up(&table, &params).unwrap();
        let dense_down = t_down(&table, &params).unwrap();

        // Sandwich enclosures hold entrywise on the same truncation.
        let up_bounds = sandwich_up(&spec, cval, &policy).unwrap();
        let lo = up_bounds.lower.truncate_to_table(d).unwrap();
        let hi = up_bounds.upper.truncate_to_table(d).unwrap();
        for bits in 0..table_len(d) {
            let v = dense_up.values()[bits];
            assert!(up_bounds.lower_constant.lo * lo.values()[bits] <= v * (1.0 + 1e-9) + 1e-12);
            assert!(v <= up_bounds.upper_constant.hi * hi.values()[bits] * (1.0 + 1e-9) + 1e-12);
        }
        let down_bounds = sandwich_down(&spec, cval).unwrap();
        let zeta = down_bounds.upper.truncate_to_table(d).unwrap();
        for bits in 0..table_len(d) {
            let v = dense_down.values()[bits];
            assert!(
                down_bounds.lower_constant.lo * zeta.values()[bits]
                    <= v * (1.0 + 1e-9) + 1e-12
            );
            assert!(v <= zeta.values()[bits] * (1.0 + 1e-9) + 1e-12);
        }

        // POD sandwich on a smaller truncation.
        let pod = WeightSpec::Pod {
            seq: SequenceSpec::Explicit(factors[..8].to_vec()),
            order: OrderSeq::Constant(1.0),
            a: 1.0,
            c_a: 1.0,
            d: Dim::Finite(8),
        };
        let pod_table = pod.truncate_to_table(8).unwrap();
        let pod_up = t_up(&pod_table, &TransformParams::finite(cval, 8).unwrap()).unwrap();
        let b = sandwich_up(&pod, cval, &policy).unwrap();
        let lo = b.lower.truncate_to_table(8).unwrap();
        let hi = b.upper.truncate_to_table(8).unwrap();
        for bits in 0..table_len(8) {
            let v = pod_up.values()[bits];
            assert!(b.lower_constant.lo * lo.values()[bits] <= v * (1.0 + 1e-9) + 1e-12);
            assert!(v <= b.upper_constant.hi * hi.values()[bits] * (1.0 + 1e-9) + 1e-12);
        }
        let b = sandwich_down(&pod, cval).unwrap();
        let zeta = b.upper.truncate_to_table(8).unwrap();
        let pod_down = t_down(&pod_table, &TransformParams::finite(cval, 8).unwrap()).unwrap();
        for bits in 0..table_len(8) {
            let v = pod_down.values()[bits];
            assert!(v >= -1e-12);
            assert!(v <= zeta.values()[bits] * (1.0 + 1e-9) + 1e-12);
        }
    }
    // The zero lower bound of the inverse sandwich is attained: the
    // reference two-variable family has a vanishing inverse entry at {1}.
    let sharp = WeightSpec::Pod {
        seq: SequenceSpec::Explicit(vec![1.0, 0.5]),
        order: OrderSeq::Explicit(vec![1.0, 0.5, 1.0]),
        a: 1.0,
        c_a: 1.0,
        d: Dim::Finite(2),
    };
    let sharp_table = sharp.truncate_to_table(2).unwrap();
    for cval in [1.0f64, 2.0] {
        let down = t_down(&sharp_table, &TransformParams::finite(cval, 2).unwrap()).unwrap();
        assert!((down.get(Subset::from_members(&[1]))).abs() < 1e-15);
    }
    c.finish();
}

#[test]
fn criterion_06_auxiliary_identity() {
    let c = Criterion::new("6 (nested alternating sum identity)", 10_000);
    let mut rng = ChaCha12Rng::seed_from_u64(606);
    let d = 5u32;
    let n = table_len(d);
    for _ in 0..20 {
        let rho: Vec<Rational> = (0..n)
            .map(|_| Rational::new(rng.gen_range(-40i64..40).into(), rng.gen_range(1i64..12).into()))
            .collect();
        for q in 1..=d {
            for p in q..=d {
                let mask_q = (1u32 << q) - 1;
                let mask_p = (1u32 << p) - 1;
                for u_bits in 0..(1u32 << q) {
                    let mut left = Rational::zero();
                    for v_bits in 0..=mask_q {
                        if v_bits & u_bits != u_bits {
                            continue;
                        }
                        for w_bits in 0..=mask_p {
                            if w_bits & v_bits != v_bits {
                                continue;
                            }
                            let term = rho[w_bits as usize].clone();
                            if v_bits.count_ones() % 2 == 0 {
                                left += term;
                            } else {
                                left -= term;
                            }
                        }
                    }
                    let mut right = Rational::zero();
                    for v in Subset(mask_p & !mask_q).subsets() {
                        right += rho[(u_bits | v.bits()) as usize].clone();
                    }
                    if u_bits.count_ones() % 2 == 1 {
                        right = -right;
                    }
                    assert_eq!(left, right, "q={q} p={p} u={u_bits:#b}");
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_07_hypercube_equivalence() {
    let c = Criterion::new("7 (hypercube view and difference identity)", 20_000);
    let mut rng = ChaCha12Rng::seed_from_u64(707);
    // Hypercube inequalities against the direct scan, with a bias toward
    // members so both verdicts appear.
    for (count, d) in [(500u32, 3u32), (100, 4)] {
        for trial in 0..count {
            let values: Vec<f64> = (0..table_len(d)).map(|_| rng.gen_range(0.0..1.0)).collect();
            let gamma = if trial % 4 == 0 {
                let raw = WeightTable::new(d, values).unwrap();
                t_up(&raw, &TransformParams::finite(1.0, d).unwrap()).unwrap()
            } else {
                WeightTable::new(d, values).unwrap()
            };
            let via_cube = hypercube_extension_check(&gamma).unwrap();
            let via_scan = check_monotone_bruteforce(&gamma).unwrap().is_member;
            assert_eq!(via_cube, via_scan, "d={d} trial={trial}");
        }
    }
    let bad = WeightTable::new(2, vec![5.0, 5.0, 3.0, 1.0]).unwrap();
    assert!(!hypercube_extension_check(&bad).unwrap());

    // Two-route difference identity, exact at d = 5.
    let d = 5u32;
    let values: Vec<Rational> = (0..table_len(d))
        .map(|_| Rational::new(rng.gen_range(0i64..30).into(), rng.gen_range(1i64..9).into()))
        .collect();
    let gamma = WeightTable::new(d, values).unwrap();
    for v_bits in 0..(1u32 << d) {
        let coords: Vec<u32> = Subset(v_bits).to_coords();
        for u_bits in [0u32, 1, 0b10110] {
            let (direct, composed) =
                delta_prime_equivalence(&gamma, &coords, Subset(u_bits)).unwrap();
            assert_eq!(direct, composed, "v={v_bits:#b} u={u_bits:#b}");
        }
        // Order independence across a reversed composition.
        let mut reversed = coords.clone();
        reversed.reverse();
        let (a, b) = delta_prime_equivalence(&gamma, &reversed, Subset::EMPTY).unwrap();
        assert_eq!(a, b);
    }
    c.finish();
}

#[test]
fn criterion_08_decay_suite() {
    let c = Criterion::new("8 (decay invariance and collapse)", 1_000);
    let product = WeightSpec::Product {
        seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
        d: Dim::Infinite,
    };
    assert_eq!(decay(&product).unwrap(), DecayResult::Value(2.0));
    assert_eq!(
        decay_after_up(&product, 1.0).unwrap(),
        DecayResult::Value(2.0)
    );

    let pod = WeightSpec::Pod {
        seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 3.0 },
        order: OrderSeq::Factorial { a: 1.0, scale: 1.0 },
        a: 1.0,
        c_a: 1.0,
        d: Dim::Infinite,
    };
    assert_eq!(decay(&pod).unwrap(), DecayResult::Value(3.0));
    assert_eq!(decay_after_up(&pod, 1.0).unwrap(), DecayResult::Value(3.0));

    // The layered construction: partial sums of the transformed powered
    // weights grow past any bound; level five already exceeds a million.
    let b5 = extremal_lower_bound(5, 1.0).unwrap();
    assert!(b5 > 1e6, "{b5}");
    let mut prev = 0.0;
    for level in 1..=5 {
        let b = extremal_lower_bound(level, 1.0).unwrap();
        assert!(b > prev);
        prev = b;
    }
    // Hypotheses of the invariance results fail for non-summable factors:
    // the operation refuses rather than guessing.
    let harmonic = WeightSpec::Product {
        seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 1.0 },
        d: Dim::Infinite,
    };
    assert!(decay_after_up(&harmonic, 1.0).is_err());
    c.finish();
}

#[test]
fn criterion_09_embedding_suite() {
    let c = Criterion::new("9 (embedding spectrum probes)", 30_000);
    for d in [2u32, 3] {
        let spec = WeightSpec::Product {
            seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
            d: Dim::Finite(d),
        };
        let weights = WeightsRepr::Spec(spec);
        let points = PointSet::lattice(d, 200).unwrap();
        let report = verify_embedding(
            UnivariateKernel::Min,
            UnivariateKernel::Min,
            1.0,
            &weights,
            &points.nodes,
            d,
        )
        .unwrap();
        assert!(
            report.min_eigenvalue >= -1e-8 * report.max_eigenvalue,
            "d={d}: {report:?}"
        );
        assert!(report.pass);

        // Negative control: half the converged lower bound must break
        // positive semidefiniteness on some point set.
        let c_lb =
            converged_embedding_lower_bound(UnivariateKernel::Min, UnivariateKernel::Min).unwrap();
        let violation = find_embedding_violation(
            UnivariateKernel::Min,
            UnivariateKernel::Min,
            c_lb / 2.0,
            &weights,
            d,
            909 + d as u64,
            64,
        )
        .unwrap();
        assert!(violation.is_some(), "d={d}");
    }
    c.finish();
}

#[test]
fn criterion_10_transfer_sandwich() {
    let c = Criterion::new("10 (two-sided error transfer)", 60_000);
    let d = 3u32;
    let spec = WeightSpec::Product {
        seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
        d: Dim::Finite(d),
    };
    let weights = WeightsRepr::Spec(spec);
    // Both inclusion directions between the anchored and the mean-zero
    // kernel have the same norm; pad the converged lower bound.
    let c_lb =
        converged_embedding_lower_bound(UnivariateKernel::Min, UnivariateKernel::Anova).unwrap();
    let c_used = 1.05 * c_lb;
    for n in [16usize, 64, 256] {
        let points = PointSet::lattice(d, n).unwrap();
        let report = full_transfer(
            &points,
            &weights,
            UnivariateKernel::Min,
            UnivariateKernel::Anova,
            c_used,
            c_used,
        )
        .unwrap();
        assert!(
            report.wce_lower <= report.wce_base + 1e-10,
            "n={n}: {report:?}"
        );
        assert!(
            report.wce_base <= report.wce_upper + 1e-10,
            "n={n}: {report:?}"
        );
        assert!(report.ordering_ok);
    }
    // Single-node reference value at the midpoint.
    let single = WeightTable::new(1, vec![0.0, 1.0]).unwrap();
    let kern =
        SuperpositionKernel::new(WeightsRepr::Table(single), UnivariateKernel::Min, 1).unwrap();
    let points = PointSet::explicit(1, vec![vec![0.5]]).unwrap();
    let e = wce_integration(&points, &kern).unwrap();
    assert!((e - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
    c.finish();
}
