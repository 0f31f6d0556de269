mod common;

use common::enumerate_projection;
use proptest::prelude::*;
use visolve_core::linalg::{dist, dot, norm_inf, sub, Matrix};
use visolve_core::operators::NetworkProblem;
use visolve_core::projections::{project_polyhedron, DEFAULT_MAX_INNER};
use visolve_core::{BoxSet, HalfSpace, PolyhedralSet, ProjectionOracle};

const TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
struct Instance {
    t: Vec<Vec<f64>>,
    r: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    z: Vec<f64>,
}

impl Instance {
    fn set(&self) -> PolyhedralSet {
        PolyhedralSet::new(Matrix::from_rows(&self.t), self.r.clone(), self.lower.clone(), self.upper.clone()).unwrap()
    }
}

/// Random polyhedron with a known interior point, so it is never empty.
fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=6)
        .prop_flat_map(|n| (Just(n), 1usize..n))
        .prop_flat_map(|(n, q)| {
            (
                prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), q),
                prop::collection::vec(-2.0f64..-0.2, n),
                prop::collection::vec(0.2f64..2.0, n),
                prop::collection::vec(0.0f64..1.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )
        })
        .prop_map(|(t, lower, upper, mix, z)| {
            let inner: Vec<f64> = (0..z.len()).map(|i| lower[i] + mix[i] * (upper[i] - lower[i])).collect();
            let r = t.iter().map(|row| dot(row, &inner)).collect();
            Instance { t, r, lower, upper, z }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polyhedral_projection_matches_enumeration(inst in instance()) {
        let got = project_polyhedron(&inst.set(), &inst.z, TOL, DEFAULT_MAX_INNER).unwrap();
        let want = enumerate_projection(&inst.t, &inst.r, &inst.lower, &inst.upper, &inst.z);
        prop_assert!(norm_inf(&sub(&got, &want)) <= 1e-6, "got {:?} want {:?}", got, want);
    }

    #[test]
    fn polyhedral_projection_is_idempotent(inst in instance()) {
        let set = inst.set();
        let p = set.project(&inst.z).unwrap();
        let pp = set.project(&p).unwrap();
        prop_assert!(dist(&p, &pp) <= 10.0 * TOL);
    }

    #[test]
    fn variational_inequality_characterizes_projection(inst in instance(), other in prop::collection::vec(-5.0f64..5.0, 6)) {
        let set = inst.set();
        let p = set.project(&inst.z).unwrap();
        // any feasible point works as the comparison point
        let y = set.project(&other[..inst.z.len()]).unwrap();
        let lhs = dot(&sub(&inst.z, &p), &sub(&y, &p));
        prop_assert!(lhs <= 1e-7, "{}", lhs);
    }
}

fn network_set() -> PolyhedralSet {
    NetworkProblem::six_node_example().feasible_set().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn network_projection_is_nonexpansive(
        x in prop::collection::vec(-3.0f64..3.0, 8),
        y in prop::collection::vec(-3.0f64..3.0, 8),
    ) {
        let set = network_set();
        let (px, py) = (set.project(&x).unwrap(), set.project(&y).unwrap());
        prop_assert!(dist(&px, &py) <= dist(&x, &y) + 10.0 * TOL);
    }

    #[test]
    fn simple_oracles_are_nonexpansive_and_idempotent(
        x in prop::collection::vec(-10.0f64..10.0, 4),
        y in prop::collection::vec(-10.0f64..10.0, 4),
        a in prop::collection::vec(-1.0f64..1.0, 4),
        b in -2.0f64..2.0,
    ) {
        prop_assume!(norm_inf(&a) > 1e-3);
        let oracles = [
            ProjectionOracle::Box(BoxSet::new(vec![-1.0, 0.0, -2.0, f64::NEG_INFINITY], vec![1.0, f64::INFINITY, 0.5, 0.0]).unwrap()),
            ProjectionOracle::HalfSpace(HalfSpace::new(a.clone(), b).unwrap()),
            ProjectionOracle::WholeSpace,
        ];
        for o in &oracles {
            let (px, py) = (o.project(&x).unwrap(), o.project(&y).unwrap());
            prop_assert!(dist(&px, &py) <= dist(&x, &y) + 1e-12);
            prop_assert!(dist(&o.project(&px).unwrap(), &px) <= 1e-12);
            prop_assert!(o.contains(&px, 1e-12));
            let lhs = dot(&sub(&x, &px), &sub(&py, &px));
            prop_assert!(lhs <= 1e-9);
        }
    }
}

#[test]
fn network_minimum_norm_flow_matches_enumeration() {
    let p = NetworkProblem::six_node_example();
    let t: Vec<Vec<f64>> = (0..p.incidence().rows()).map(|i| p.incidence().row(i).to_vec()).collect();
    let lower = vec![0.0; 8];
    let got = p.feasible_set().unwrap().project(&[0.0; 8]).unwrap();
    let want = enumerate_projection(&t, p.balances(), &lower, p.capacities(), &[0.0; 8]);
    assert!(norm_inf(&sub(&got, &want)) <= 1e-6, "got {got:?} want {want:?}");
}

#[test]
fn two_dimensional_examples() {
    let set = PolyhedralSet::new(Matrix::from_rows(&[vec![1.0, 1.0]]), vec![2.0], vec![0.0; 2], vec![2.0; 2]).unwrap();
    let p = set.project(&[3.0, 3.0]).unwrap();
    assert!(norm_inf(&sub(&p, &[1.0, 1.0])) <= 1e-9);
    let want = enumerate_projection(&[vec![1.0, 1.0]], &[2.0], &[0.0; 2], &[2.0; 2], &[5.0, -1.0]);
    let p = set.project(&[5.0, -1.0]).unwrap();
    assert!(norm_inf(&sub(&p, &want)) <= 1e-9);
    assert!(norm_inf(&sub(&want, &[2.0, 0.0])) <= 1e-9);
}
