use dualtape::{
    run_benchmark, BenchConfig, Driver, Engine, FunctionId, GreetingPayload, HessianResult, Int8Wrap,
};
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_diagonal_routes_agree_on_cubes(x in prop::collection::vec(-2.0f64..2.0, 1..12)) {
        let n = x.len();
        for engine in [Engine::Generic, Engine::Hand] {
            let diag = Driver::HessianDiagT1T2.run(engine, FunctionId::Cubes, &x).unwrap().0.vector();
            let compressed = Driver::HessianCompressedA1T2.run(engine, FunctionId::Cubes, &x).unwrap().0.vector();
            let dense = dualtape::hessian_dense_t1t2(engine, FunctionId::Cubes, &x).unwrap().0;
            let cols = dualtape::hessian_columns_a1t2(engine, FunctionId::Cubes, &x).unwrap().0;
            for h in [&dense, &cols] {
                let HessianResult::Dense(m) = h else { unreachable!() };
                for i in 0..n {
                    prop_assert!(close(m.get(i, i), diag[i]));
                    for j in 0..n {
                        prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                        if i != j {
                            prop_assert_eq!(m.get(i, j), 0.0);
                        }
                    }
                }
            }
            for i in 0..n {
                prop_assert!(close(diag[i], compressed[i]));
            }
        }
    }

    #[test]
    fn gradient_routes_agree(x in prop::collection::vec(-2.0f64..2.0, 1..8), cubes in any::<bool>()) {
        let (fid, x) = if cubes { (FunctionId::Cubes, x) } else { (FunctionId::Pairs, [x.clone(), x].concat()) };
        for engine in [Engine::Generic, Engine::Hand] {
            let (t, ts) = dualtape::gradient_tangent(engine, fid, &x).unwrap();
            let (a, as_) = dualtape::gradient_adjoint(engine, fid, &x).unwrap();
            prop_assert_eq!((ts.evaluations, as_.evaluations), (x.len() as u64, 1));
            for (p, q) in t.iter().zip(&a) {
                prop_assert!(close(*p, *q));
            }
        }
    }

    #[test]
    fn int8_sparse_drivers_agree_exactly(codes in prop::collection::vec(0i64..=127, 1..16)) {
        let x: Vec<Int8Wrap> = dualtape::lift_all(&codes);
        let diag = Driver::HessianDiagT1T2.run(Engine::Hand, FunctionId::Cubes, &x).unwrap().0.vector();
        let compressed = Driver::HessianCompressedA1T2.run(Engine::Hand, FunctionId::Cubes, &x).unwrap().0.vector();
        prop_assert_eq!(&diag, &x);
        prop_assert_eq!(&compressed, &x);
    }

    #[test]
    fn padding_does_not_change_the_greeting(half in 5usize..400) {
        let n = 2 * half;
        for driver in [Driver::GradientTangent, Driver::GradientAdjoint] {
            let row = run_benchmark(&BenchConfig::new(FunctionId::Pairs, driver).with_n(n)).unwrap();
            prop_assert_eq!(row.greeting.as_str(), "Merry Xmas");
        }
        for driver in [Driver::HessianDiagT1T2, Driver::HessianCompressedA1T2] {
            let row = run_benchmark(&BenchConfig::new(FunctionId::Cubes, driver).with_n(n + 1)).unwrap();
            prop_assert_eq!(row.greeting.as_str(), "Happy 2026");
        }
    }
}

#[test]
fn zero_payload_decodes_to_nothing() {
    for engine in [Engine::Generic, Engine::Hand] {
        let cfg = BenchConfig::new(FunctionId::Pairs, Driver::GradientAdjoint)
            .with_engine(engine)
            .with_payload(GreetingPayload::ZERO)
            .with_n(50);
        assert_eq!(run_benchmark(&cfg).unwrap().greeting, "");
    }
}
