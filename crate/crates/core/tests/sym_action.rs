use opmc::graded::{BasisElement, GradedModule, Lin};
use opmc::scalars::Ring;
use opmc::sym_action::{act, coinv_normalize, norm, norm_inverse, to_classes, OpBasis, OrbitModule, Permutation, Tensor};
use proptest::prelude::*;

fn ring(i: usize) -> Ring {
    match i {
        0 => Ring::integers(),
        1 => Ring::modular(2).unwrap(),
        2 => Ring::modular(8).unwrap(),
        _ => Ring::rationals(),
    }
}

fn setup(ring: &Ring, r: usize) -> (OrbitModule, GradedModule) {
    let reps = vec![OpBasis { name: "c".into(), degree: 0 }, OpBasis { name: "e".into(), degree: -1 }];
    let op = OrbitModule::free(r, reps).unwrap();
    let basis = [("x", 0), ("y", 1), ("z", -1)]
        .iter()
        .map(|&(n, d)| BasisElement { name: n.into(), degree: d, weight: 1 })
        .collect();
    (op, GradedModule::new(ring.clone(), basis).unwrap())
}

/// Up to three random terms `c ⊗ v_1 … v_r`.
fn element() -> impl Strategy<Value = (usize, usize, Vec<(usize, Vec<usize>, i64)>)> {
    (0usize..4, 1usize..=4).prop_flat_map(|(ri, r)| {
        let term = (0usize..2 * (1..=r).product::<usize>(), proptest::collection::vec(0usize..3, r), -3i64..=3);
        (Just(ri), Just(r), proptest::collection::vec(term, 1..=3))
    })
}

fn build(ring: &Ring, terms: &[(usize, Vec<usize>, i64)]) -> Lin<Tensor> {
    let mut x = Lin::zero();
    for (c, vs, k) in terms {
        x.add_term(ring, Tensor::new(*c, vs.clone()), ring.int(*k));
    }
    x
}

proptest! {
    #[test]
    fn act_is_a_group_action((ri, r, terms) in element(), a in proptest::collection::vec(0usize..100, 4), b in proptest::collection::vec(0usize..100, 4)) {
        let ring = ring(ri);
        let (op, v) = setup(&ring, r);
        let x = build(&ring, &terms);
        let sigma = Permutation::from_lehmer_seed(&a[..r]);
        let tau = Permutation::from_lehmer_seed(&b[..r]);
        let lhs = act(&ring, &op, &v, &sigma.compose(&tau), &x).unwrap();
        let rhs = act(&ring, &op, &v, &sigma, &act(&ring, &op, &v, &tau, &x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(act(&ring, &op, &v, &Permutation::identity(r), &x).unwrap(), x);
    }

    #[test]
    fn normal_forms_are_orbit_invariant((ri, r, terms) in element(), a in proptest::collection::vec(0usize..100, 4)) {
        let ring = ring(ri);
        let (op, v) = setup(&ring, r);
        let x = build(&ring, &terms);
        let sigma = Permutation::from_lehmer_seed(&a[..r]);
        let moved = act(&ring, &op, &v, &sigma, &x).unwrap();
        prop_assert_eq!(to_classes(&ring, &op, &v, &moved), to_classes(&ring, &op, &v, &x));
        for (t, _) in x.iter() {
            let (u, ut) = coinv_normalize(&op, &v, t.c, &t.vs).unwrap();
            // a single tensor moves to ± a single tensor
            let image = act(&ring, &op, &v, &sigma, &Lin::basis(&ring, t.clone())).unwrap();
            let (s, coef) = image.iter().next().unwrap();
            let (w, wt) = coinv_normalize(&op, &v, s.c, &s.vs).unwrap();
            prop_assert_eq!(&u, &w);
            let sign = ring.sign(ut ^ wt);
            prop_assert!(ring.mul(&sign, coef).is_one() || ring.neg(&ring.one()).is_one());
        }
    }

    #[test]
    fn norm_round_trips((ri, r, terms) in element()) {
        let ring = ring(ri);
        let (op, v) = setup(&ring, r);
        let class = to_classes(&ring, &op, &v, &build(&ring, &terms));
        let y = norm(&ring, &op, &v, &class).unwrap();
        prop_assert_eq!(norm_inverse(&ring, &op, &v, &y).unwrap(), class);
    }
}
