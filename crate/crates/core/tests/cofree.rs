use std::sync::{Arc, Mutex};

use opmc::builders::{ass_cochains, barratt_eccles, com_cochains};
use opmc::cofree::{
    check_coderivation_data, check_morphism_data, invert_morphism, random_square_zero, completeness_check, corestriction, curvature, nilpotence_bound,
    random_class_map, ClassMap, CofreeCoalgebra, CofreeElement, Split,
};
use opmc::cooperad::{Cooperad, COUNIT};
use opmc::graded::{BasisElement, GradedModule, Lin};
use opmc::scalars::Ring;
use opmc::sym_action::Tensor;
use opmc::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn module(ring: &Ring, spec: &[(&str, i64, u32)]) -> GradedModule {
    let basis = spec
        .iter()
        .map(|&(n, d, w)| BasisElement { name: n.into(), degree: d, weight: w })
        .collect();
    GradedModule::new(ring.clone(), basis).unwrap()
}

/// Validation of the arity-four truncation is the slow part, so share it per ring.
fn ass_cofree(ring: &Ring, v: &GradedModule, w: u32) -> CofreeCoalgebra {
    static CACHE: Mutex<Vec<(Ring, Arc<Cooperad>)>> = Mutex::new(Vec::new());
    let co = {
        let mut cache = CACHE.lock().unwrap();
        match cache.iter().find(|(r, _)| r == ring) {
            Some((_, co)) => co.clone(),
            None => {
                let co = Arc::new(ass_cochains(ring, 4).unwrap().0);
                cache.push((ring.clone(), co.clone()));
                co
            }
        }
    };
    CofreeCoalgebra::new(co, v.clone(), w).unwrap()
}

fn word(cf: &CofreeCoalgebra, vs: &[usize]) -> Option<Tensor> {
    let (t, odd) = cf.normalize(0, vs)?;
    assert!(!odd, "identity word is an orbit representative");
    Some(t)
}

/// Classical curved A∞ bar differential on words:
/// `Q(v_1…v_n) = Σ (−1)^{|v_1|+…+|v_i|} v_1…v_i Q̃(v_{i+1}…v_{i+r}) v_{i+r+1}…v_n`.
fn bar_differential(cf: &CofreeCoalgebra, q: &ClassMap, vs: &[usize]) -> CofreeElement {
    let ring = cf.ring();
    let v = cf.module();
    let mut out = Lin::zero();
    for i in 0..=vs.len() {
        let sign: i64 = vs[..i].iter().map(|&a| v.degree(a)).sum();
        for r in 0..=vs.len() - i {
            let Some(block) = word(cf, &vs[i..i + r]) else { continue };
            for (&y, c) in q.apply(ring, &block).iter() {
                let mut ws = vs[..i].to_vec();
                ws.push(y);
                ws.extend_from_slice(&vs[i + r..]);
                if let Some(t) = word(cf, &ws) {
                    out.add_term(ring, t, if sign & 1 == 1 { ring.neg(c) } else { c.clone() });
                }
            }
        }
    }
    out
}

/// Tensor coalgebra map `Φ(v_1…v_n) = Σ g(w_1)…g(w_k)` over splittings into nonempty words.
fn tensor_coalgebra_map(src: &CofreeCoalgebra, tgt: &CofreeCoalgebra, g: &ClassMap, vs: &[usize]) -> CofreeElement {
    let ring = src.ring();
    let mut out = Lin::zero();
    if vs.is_empty() {
        out.add_term(ring, word(tgt, &[]).unwrap(), ring.one());
        return out;
    }
    let n = vs.len();
    for cuts in 0..1u32 << (n - 1) {
        let mut partial = vec![(Vec::new(), ring.one())];
        let mut start = 0;
        for end in 1..=n {
            if end < n && cuts >> (end - 1) & 1 == 0 {
                continue;
            }
            let img = g.apply(ring, &word(src, &vs[start..end]).unwrap());
            let mut next = Vec::new();
            for (ws, c) in &partial {
                for (&y, d) in img.iter() {
                    let mut ws: Vec<usize> = ws.clone();
                    ws.push(y);
                    next.push((ws, ring.mul(c, d)));
                }
            }
            partial = next;
            start = end;
        }
        for (ws, c) in partial {
            if let Some(t) = word(tgt, &ws) {
                out.add_term(ring, t, c);
            }
        }
    }
    out
}

fn graded_v(ring: &Ring) -> GradedModule {
    module(ring, &[("x", 1, 1), ("y", 0, 1), ("z", 1, 2), ("u", 0, 2), ("t", 2, 2)])
}

#[test]
fn ass_coderivation_matches_bar_construction() {
    let ring = Ring::integers();
    let v = graded_v(&ring);
    let cf = ass_cofree(&ring, &v, 4);
    for seed in 0..6 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_class_map(&cf, &v, -1, 3, 0.6, &mut rng);
        check_coderivation_data(&cf, &q).unwrap();
        let big_q = cf.coderivation_extend(&q);
        for t in cf.basis() {
            let expected = bar_differential(&cf, &q, &t.vs);
            assert_eq!(big_q.apply_class(t), expected, "seed {seed}, class {}", cf.class_name(t));
        }
    }
}

#[test]
fn ass_decomposition_is_deconcatenation() {
    let ring = Ring::integers();
    let v = graded_v(&ring);
    let cf = ass_cofree(&ring, &v, 4);
    let t = word(&cf, &[0, 1, 0, 1]).unwrap();
    let x = Lin::basis(&ring, t.clone());
    let d1 = cf.decompose(&x, 1);
    assert_eq!(d1.coef(&ring, &Split { outer: COUNIT, blocks: vec![t.clone()] }), ring.one());
    let d2 = cf.decompose(&x, 2);
    // three proper splittings plus the two with an empty side
    assert_eq!(d2.len(), 5);
    for s in d2.keys() {
        let joined: Vec<usize> = s.blocks.iter().flat_map(|b| b.vs.clone()).collect();
        assert_eq!(joined, t.vs);
    }
}

#[test]
fn extension_round_trip_and_co_leibniz() {
    for ring in [Ring::integers(), Ring::modular(3).unwrap()] {
        let v = graded_v(&ring);
        let cf = ass_cofree(&ring, &v, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_class_map(&cf, &v, -1, 4, 0.5, &mut rng);
        let big_q = cf.coderivation_extend(&q);
        assert_eq!(big_q.projection(), q);
        for t in cf.basis() {
            for k in 0..=4 {
                assert!(big_q.co_leibniz_defect(t, k).is_zero(), "{} k={k}", cf.class_name(t));
            }
        }
    }
}

#[test]
fn co_leibniz_over_barratt_eccles_and_com() {
    let ring = Ring::integers();
    let be = barratt_eccles(&ring, Some(2), 3, 1).unwrap();
    let v = module(&ring, &[("a", 0, 1), ("b", 1, 1), ("c", -1, 1), ("e", 0, 2)]);
    let cf = CofreeCoalgebra::new(Arc::new(be.cooperad), v.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = random_class_map(&cf, &v, -1, 3, 0.5, &mut rng);
    let big_q = cf.coderivation_extend(&q);
    assert_eq!(big_q.projection(), q);
    for t in cf.basis() {
        for k in 0..=3 {
            assert!(big_q.co_leibniz_defect(t, k).is_zero(), "{} k={k}", cf.class_name(t));
        }
    }

    let rat = Ring::rationals();
    let (com, _) = com_cochains(&rat, 3).unwrap();
    let v = module(&rat, &[("a", 0, 1), ("b", 1, 1), ("e", 0, 2)]);
    let cf = CofreeCoalgebra::new(Arc::new(com), v.clone(), 3).unwrap();
    let q = random_class_map(&cf, &v, -1, 3, 0.7, &mut rng);
    let big_q = cf.coderivation_extend(&q);
    for t in cf.basis() {
        for k in 0..=3 {
            assert!(big_q.co_leibniz_defect(t, k).is_zero(), "{} k={k}", cf.class_name(t));
        }
    }
}

#[test]
fn differential_graded_module_squares_to_zero() {
    // Q̃_1 = d with d(x) = y, a chain complex: the extension squares to zero
    let ring = Ring::integers();
    let v = module(&ring, &[("x", 1, 1), ("y", 0, 1)]);
    let cf = ass_cofree(&ring, &v, 3);
    let mut q = ClassMap::new(-1);
    q.set(cf.cogenerator(0), Lin::basis(&ring, 1));
    let big_q = cf.coderivation_extend(&q);
    assert!(big_q.squares_to_zero());
    assert_eq!(nilpotence_bound(&q), 1);
    assert!(curvature(&q).is_zero());
    // Q̃_2(x, x) = y is not a square-zero extension of the above
    let mut q2 = q.clone();
    q2.set(word(&cf, &[0, 0]).unwrap(), Lin::basis(&ring, 0));
    let witness = cf.coderivation_extend(&q2).square_witness();
    assert!(witness.is_some());
}

#[test]
fn curvature_term_acts_on_the_unit() {
    let ring = Ring::integers();
    let v = module(&ring, &[("x", -1, 1)]);
    let cf = ass_cofree(&ring, &v, 2);
    let mut q = ClassMap::new(-1);
    q.set(CofreeCoalgebra::unit(), Lin::basis(&ring, 0));
    let big_q = cf.coderivation_extend(&q);
    let q1 = big_q.apply(&cf.unit_element());
    assert_eq!(q1, cf.embed(&Lin::basis(&ring, 0)));
    assert_eq!(nilpotence_bound(&q), 0);
    // Q(x) = ρ x − x ρ ... x is odd, so the two insertions cancel
    let qx = big_q.apply_class(&cf.cogenerator(0));
    assert!(qx.is_zero());
}

#[test]
fn weight_lowering_data_is_rejected() {
    let ring = Ring::integers();
    let v = module(&ring, &[("x", 1, 2), ("y", 0, 1)]);
    let cf = ass_cofree(&ring, &v, 2);
    let mut q = ClassMap::new(-1);
    q.set(cf.cogenerator(0), Lin::basis(&ring, 1));
    assert!(completeness_check(&cf, &q).failed("weight additivity"));
    assert!(matches!(check_coderivation_data(&cf, &q), Err(Error::Completeness(_))));
}

#[test]
fn insufficient_cooperad_truncation_is_a_precondition_error() {
    let ring = Ring::integers();
    let (co, _) = ass_cochains(&ring, 2).unwrap();
    let v = module(&ring, &[("x", 0, 1)]);
    assert!(matches!(
        CofreeCoalgebra::new(Arc::new(co), v, 3),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn morphism_extension_matches_tensor_coalgebra() {
    let ring = Ring::integers();
    let a = module(&ring, &[("x", 1, 1), ("y", 0, 1), ("z", 0, 2)]);
    let b = module(&ring, &[("p", 1, 1), ("q", 0, 1), ("s", 1, 2), ("r", 0, 2)]);
    let ca = ass_cofree(&ring, &a, 3);
    let cb = ass_cofree(&ring, &b, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = random_class_map(&ca, &b, 0, 3, 0.7, &mut rng);
    g.set(CofreeCoalgebra::unit(), Lin::zero());
    check_morphism_data(&ca, &b, &g).unwrap();
    for t in ca.basis() {
        let x = Lin::basis(&ring, t.clone());
        assert_eq!(ca.morphism_apply(&cb, &g, &x).unwrap(), tensor_coalgebra_map(&ca, &cb, &g, &t.vs));
    }
    assert_eq!(corestriction(&ca, &cb, &g).unwrap(), g);
}

#[test]
fn morphism_extension_respects_composition_and_identity() {
    let ring = Ring::integers();
    let be = Arc::new(barratt_eccles(&ring, None, 3, 1).unwrap().cooperad);
    let a = module(&ring, &[("x", 0, 1), ("y", -1, 1)]);
    let b = module(&ring, &[("p", 0, 1), ("q", -1, 1), ("s", -1, 2)]);
    let c = module(&ring, &[("m", 0, 1), ("n", -1, 1), ("o", -2, 2), ("k", -1, 3)]);
    let ca = CofreeCoalgebra::new(be.clone(), a.clone(), 3).unwrap();
    let cb = CofreeCoalgebra::new(be.clone(), b.clone(), 3).unwrap();
    let cc = CofreeCoalgebra::new(be, c.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut g1 = random_class_map(&ca, &b, 0, 3, 0.6, &mut rng);
    let mut g2 = random_class_map(&cb, &c, 0, 3, 0.6, &mut rng);
    g1.set(CofreeCoalgebra::unit(), Lin::zero());
    g2.set(CofreeCoalgebra::unit(), Lin::zero());

    let mut composite = ClassMap::new(0);
    for t in ca.basis() {
        let phi1 = ca.morphism_apply(&cb, &g1, &Lin::basis(&ring, t.clone())).unwrap();
        composite.set(t.clone(), g2.apply_element(&ring, &phi1));
    }
    for t in ca.basis() {
        let x = Lin::basis(&ring, t.clone());
        let two_step = cb.morphism_apply(&cc, &g2, &ca.morphism_apply(&cb, &g1, &x).unwrap()).unwrap();
        assert_eq!(two_step, ca.morphism_apply(&cc, &composite, &x).unwrap(), "{}", ca.class_name(t));
    }

    let mut id = ClassMap::new(0);
    for i in 0..a.dim() {
        id.set(ca.cogenerator(i), Lin::basis(&ring, i));
    }
    for t in ca.basis() {
        let x = Lin::basis(&ring, t.clone());
        assert_eq!(ca.morphism_apply(&ca, &id, &x).unwrap(), x);
    }
    let mut bad = id.clone();
    bad.set(CofreeCoalgebra::unit(), Lin::basis(&ring, 0));
    assert!(check_morphism_data(&ca, &a, &bad).is_err());
}

#[test]
fn inverse_automorphism_and_conjugated_square_zero_data() {
    let ring = Ring::modular(8).unwrap();
    let v = module(&ring, &[("x", 0, 1), ("a", -1, 1), ("b", 1, 2), ("c", 0, 2), ("e", -1, 3)]);
    let cf = ass_cofree(&ring, &v, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut g = random_class_map(&cf, &v, 0, 4, 0.6, &mut rng);
    g.set(CofreeCoalgebra::unit(), Lin::zero());
    for i in 0..v.dim() {
        g.set(cf.cogenerator(i), Lin::basis(&ring, i));
    }
    let h = invert_morphism(&cf, &g).unwrap();
    for t in cf.basis() {
        let x = Lin::basis(&ring, t.clone());
        let there = cf.morphism_apply(&cf, &g, &x).unwrap();
        assert_eq!(cf.morphism_apply(&cf, &h, &there).unwrap(), x);
    }
    for curved in [false, true] {
        let q = random_square_zero(&cf, 3, curved, &mut rng).unwrap();
        assert!(cf.coderivation_extend(&q).squares_to_zero());
        check_coderivation_data(&cf, &q).unwrap();
        // flat data preserves the reduced coalgebra
        if !curved {
            let big_q = cf.coderivation_extend(&q);
            for t in cf.reduced_basis() {
                assert!(big_q.apply_class(t).keys().all(|s| !s.vs.is_empty()));
            }
        }
    }
}

#[test]
fn decompose_is_counital() {
    // Δ_1 picks out x, and the counit applied in either slot of Δ_2 returns Δ_2
    let ring = Ring::integers();
    let be = barratt_eccles(&ring, Some(2), 3, 1).unwrap();
    let v = module(&ring, &[("a", 0, 1), ("b", 1, 1), ("c", -1, 1)]);
    let cf = CofreeCoalgebra::new(Arc::new(be.cooperad), v, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let mut x = Lin::zero();
        for _ in 0..3 {
            let t = cf.basis()[rng.gen_range(0..cf.basis().len())].clone();
            x.add_term(&ring, t, ring.int(rng.gen_range(-3..=3)));
        }
        let d1 = cf.decompose(&x, 1);
        let back: CofreeElement = d1
            .iter()
            .filter(|(s, _)| s.outer == COUNIT)
            .map(|(s, c)| (s.blocks[0].clone(), c.clone()))
            .collect();
        assert_eq!(back, x);
        let d2 = cf.decompose(&x, 2);
        let again = cf.apply_in_slot(&d2, 0, |b| {
            cf.decompose(&Lin::basis(&ring, b.clone()), 1)
                .iter()
                .filter(|(s, _)| s.outer == COUNIT)
                .map(|(s, c)| (s.blocks[0].clone(), c.clone()))
                .collect()
        });
        let twice = d2.scale(&ring, &ring.int(2));
        assert_eq!(again, twice);
    }
}
