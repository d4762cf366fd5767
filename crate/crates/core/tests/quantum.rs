use proptest::prelude::*;
use qhilb::chow::{CODIM, NUM_BASIS};
use qhilb::gw_engine::{Engine, EngineConfig, InvariantValue};
use qhilb::quantum::{gamma, SmallQuantum, QCohVector};
use qhilb::relation::standard_relations;
use qhilb::coeffring::int;
use qhilb::{chow, CohVector, CurveClass, QMonomial, QSeries};
use std::sync::OnceLock;

fn engine(c_max: u32) -> Engine {
    Engine::new(EngineConfig { c_max, ..Default::default() })
}

fn engine3() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| engine(3))
}

fn residual_lines(c_max: u32) -> Vec<String> {
    let e = engine(c_max);
    let qh = SmallQuantum::new(&e);
    standard_relations()
        .iter()
        .map(|r| format!("f{}: {}", r.id, qh.verify_relation(r).unwrap()))
        .collect()
}

fn golden(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn t4_squared() {
    for c_max in [2, 4] {
        let e = engine(c_max);
        let qh = SmallQuantum::new(&e);
        let p = qh.basis_product(4, 4).unwrap();
        let mut want = QCohVector::basis(13, c_max);
        want.coords[0] = QSeries::monomial(QMonomial::new(1, 1, 2), int(2), c_max);
        assert_eq!(p, want);
    }
}

#[test]
fn residuals_match_frozen_values() {
    assert_eq!(residual_lines(2), golden(include_str!("golden/residuals_c2.golden")));
    assert_eq!(residual_lines(4), golden(include_str!("golden/residuals_c4.golden")));
}

#[test]
fn classical_relations_hold() {
    let e = engine(0);
    let qh = SmallQuantum::new(&e);
    for r in standard_relations() {
        assert!(qh.verify_relation(&r).unwrap().at_q_zero().is_zero(), "f{}", r.id);
    }
}

#[test]
fn commutative_associative_on_basis() {
    let qh = SmallQuantum::new(engine3());
    let b = |i| QCohVector::basis(i, 3);
    for i in 0..NUM_BASIS {
        for j in 0..NUM_BASIS {
            let ij = qh.basis_product(i, j).unwrap();
            assert_eq!(ij, qh.basis_product(j, i).unwrap());
            assert_eq!(&ij.at_q_zero(), chow().cup_basis(i, j));
            assert_eq!(ij.homogeneous_degree().unwrap_or((CODIM[i] + CODIM[j]) as u32), (CODIM[i] + CODIM[j]) as u32);
            for k in 0..NUM_BASIS {
                let left = qh.product(&ij, &b(k)).unwrap();
                let right = qh.product(&b(i), &qh.basis_product(j, k).unwrap()).unwrap();
                assert_eq!(left, right, "T{i} T{j} T{k}");
            }
        }
    }
}

#[test]
fn product_commutes_with_involution() {
    let qh = SmallQuantum::new(engine3());
    for i in 0..NUM_BASIS {
        for j in 0..NUM_BASIS {
            let lhs = qh.basis_product(i, j).unwrap().iota();
            let rhs = qh.product(&QCohVector::basis(i, 3).iota(), &QCohVector::basis(j, 3).iota()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn gamma_vanishes_on_unit() {
    let e = engine(2);
    assert!(gamma(&e, 0, 4, 4, 2, 2).unwrap().terms.is_empty());
}

#[test]
fn gamma_fiber_part_of_t3_t3() {
    let e = engine(3);
    let r = chow();
    for c in 1..=3 {
        let beta = CurveClass::new(0, 0, c);
        let mut v = CohVector::zero();
        for ex in 0..NUM_BASIS {
            let g = gamma(&e, 3, 3, ex, 0, 3).unwrap();
            if let InvariantValue::Known(x) = g.coeff(beta, &[0; 10]) {
                for f in 0..NUM_BASIS {
                    v.0[f] += &x * r.g_inv(ex, f);
                }
            }
        }
        let mut want = CohVector::zero();
        for (idx, k) in [(5, 4), (6, 2), (7, 2), (8, -2), (9, -2)] {
            want.0[idx] = int(k);
        }
        assert_eq!(v, want, "c = {c}");
    }
}

#[test]
fn gamma_first_order_matches_four_points() {
    let e = engine(2);
    let mut nu = [0u8; 10];
    nu[13 - 4] = 1;
    for ex in 4..NUM_BASIS {
        let g = gamma(&e, 4, 4, ex, 1, 2).unwrap();
        for (&(beta, d), v) in &g.terms {
            if d == nu {
                assert_eq!(v, &e.invariant(beta, &[4, 4, ex, 13]).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_is_bilinear(i in 0..NUM_BASIS, j in 0..NUM_BASIS, k in 0..NUM_BASIS, lam in -5i64..5) {
        let qh = SmallQuantum::new(engine3());
        let s = QSeries::constant(int(lam), 3);
        let mut y = QCohVector::basis(j, 3);
        y.add_scaled(&QCohVector::basis(k, 3), &s);
        let lhs = qh.product(&QCohVector::basis(i, 3), &y).unwrap();
        let mut rhs = qh.basis_product(i, j).unwrap();
        rhs.add_scaled(&qh.basis_product(i, k).unwrap(), &s);
        prop_assert_eq!(lhs, rhs);
    }
}
