use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use opmc::builders::{barratt_eccles, CochainCooperad};
use opmc::cofree::{random_square_zero, ClassMap, CofreeCoalgebra};
use opmc::cooperad::{Cooperad, HopfStructure};
use opmc::graded::{BasisElement, GradedModule, Lin};
use opmc::mc_space::{horn_faces, kan_spot_check, Convolution, McSpace};
use opmc::scalars::Ring;
use opmc::simplicial::face_of;
use opmc::sym_action::Tensor;
use opmc::twisting::HopfCofree;
use opmc::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn module(ring: &Ring, spec: &[(&str, i64, u32)]) -> GradedModule {
    let basis = spec
        .iter()
        .map(|&(n, d, w)| BasisElement { name: n.into(), degree: d, weight: w })
        .collect();
    GradedModule::new(ring.clone(), basis).unwrap()
}

type Shared = (Arc<CochainCooperad>, Arc<Cooperad>, Arc<HopfStructure>);

/// `E_1` cochains of arity ≤ 4, shared per ring so validation runs once.
fn shared(ring: &Ring) -> Shared {
    static CACHE: Mutex<Vec<(Ring, Shared)>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().unwrap();
    if let Some((_, s)) = cache.iter().find(|(r, _)| r == ring) {
        return s.clone();
    }
    let c = barratt_eccles(ring, Some(1), 4, 0).unwrap();
    let s = (Arc::new(c.clone()), Arc::new(c.cooperad), Arc::new(c.hopf));
    cache.push((ring.clone(), s.clone()));
    s
}

fn e1(ring: &Ring) -> Arc<CochainCooperad> {
    shared(ring).0
}

fn cofree(ring: &Ring, v: &GradedModule, w: u32) -> CofreeCoalgebra {
    CofreeCoalgebra::new(shared(ring).1, v.clone(), w).unwrap()
}

fn space(ring: &Ring, v: &GradedModule, w: u32, q: ClassMap) -> McSpace {
    McSpace::new(e1(ring), cofree(ring, v, w), q).unwrap()
}

fn random_space(ring: &Ring, v: &GradedModule, w: u32, seed: u64) -> McSpace {
    let cf = cofree(ring, v, w);
    let q = random_square_zero(&cf, 3, false, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    McSpace::new(e1(ring), cf, q).unwrap()
}

fn hopf(ring: &Ring, v: &GradedModule, w: u32) -> HopfCofree {
    HopfCofree::new(cofree(ring, v, w), shared(ring).2).unwrap()
}

/// A graded module reaching degrees −1..=3 with weights 1 and 2.
fn wide(ring: &Ring) -> GradedModule {
    module(
        ring,
        &[("x", 0, 1), ("y", 0, 2), ("a", 1, 1), ("b", 1, 2), ("m", -1, 2), ("s", 2, 1), ("t", 3, 2)],
    )
}

#[test]
fn convolution_differential() {
    let z = Ring::integers();
    let v = wide(&z);
    let flat = space(&z, &v, 4, ClassMap::new(-1));
    let mut psi = Convolution::zero(1, 0);
    psi.set(1, Lin::basis(&z, 0));
    psi.set(2, Lin::single(&z, 0, z.int(3)));
    let d = flat.differential(&psi);
    assert_eq!(d.get(face_of(&[0, 1])), Lin::single(&z, 0, z.int(-2)));
    assert_eq!(d.degree, -1);
    let sp = random_space(&z, &v, 4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..=3 {
        for deg in -1..=1 {
            let psi = sp.random_element(n, deg, &mut rng);
            assert!(sp.differential(&sp.differential(&psi)).is_zero());
        }
    }
}

#[test]
fn lifted_contraction() {
    let z = Ring::integers();
    let v = wide(&z);
    let sp = random_space(&z, &v, 4, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut count = 0;
    while count < 100 {
        for n in 0..=4 {
            for k in 0..=n {
                let psi = sp.random_element(n, count as i64 % 3 - 1, &mut rng);
                let lhs = sp.differential(&sp.h_op(k, &psi)).add(&z, &sp.h_op(k, &sp.differential(&psi)));
                assert_eq!(lhs, psi.sub(&z, &sp.p_op(k, &psi)), "n={n} k={k}");
                let p = sp.p_op(k, &psi);
                assert!(p.values.keys().all(|f| f.count_ones() == 1));
                assert_eq!(sp.r_op(k, &psi), sp.differential(&sp.h_op(k, &psi)));
                count += 1;
            }
        }
    }
}

#[test]
fn vertex_equation_is_the_mc_equation() {
    for ring in [Ring::modular(2).unwrap(), Ring::integers()] {
        let v = module(&ring, &[("x", 0, 1), ("y", 0, 1), ("m", -1, 2), ("n", -1, 3)]);
        for seed in 0..6 {
            let sp = random_space(&ring, &v, 4, seed);
            let hc = hopf(&ring, &v, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            for _ in 0..4 {
                let psi = sp.random_element(0, 0, &mut rng);
                let x = psi.get(1);
                assert_eq!(sp.mc_residual(&psi).unwrap().get(1), hc.mc_residual(sp.q(), &x).unwrap());
            }
        }
    }
}

#[test]
fn star_expands_into_mu() {
    let z = Ring::integers();
    let v = wide(&z);
    let sp = random_space(&z, &v, 4, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 0..=2 {
        let psi = sp.random_element(n, 0, &mut rng);
        let mut sum = Convolution::zero(n, -1);
        for r in 2..=3 {
            sum = sum.add(&z, &sp.mu(&vec![&psi; r]).unwrap());
        }
        assert_eq!(sp.star(&psi).unwrap(), sum);
        let zero = Convolution::zero(n, 0);
        assert!(sp.mu(&[&psi, &zero]).unwrap().is_zero());
        // multilinearity
        let chi = sp.random_element(n, 0, &mut rng);
        let lhs = sp.mu(&[&psi.scale(&z, &z.int(3)).add(&z, &chi), &psi]).unwrap();
        let rhs = sp.mu(&[&psi, &psi]).unwrap().scale(&z, &z.int(3)).add(&z, &sp.mu(&[&chi, &psi]).unwrap());
        assert_eq!(lhs, rhs);
    }
    let abelian = space(&z, &v, 4, ClassMap::new(-1));
    assert!(abelian.star(&sp.random_element(2, 0, &mut rng)).unwrap().is_zero());
}

#[test]
fn mu_two_is_a_cocycle() {
    // ∂μ₂(ψ₁, ψ₂) + μ₂(∂ψ₁, ψ₂) + (−1)^{|ψ₁|} μ₂(ψ₁, ∂ψ₂) = 0
    for ring in [Ring::integers(), Ring::modular(8).unwrap()] {
        let v = wide(&ring);
        for seed in 0..4 {
            let sp = random_space(&ring, &v, 4, 40 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for n in 0..=3 {
                for (d1, d2) in [(0, 0), (1, 0), (0, 1), (-1, 1)] {
                    let a = sp.random_element(n, d1, &mut rng);
                    let b = sp.random_element(n, d2, &mut rng);
                    let lhs = sp
                        .differential(&sp.mu(&[&a, &b]).unwrap())
                        .add(&ring, &sp.mu(&[&sp.differential(&a), &b]).unwrap())
                        .add(
                            &ring,
                            &sp.mu(&[&a, &sp.differential(&b)]).unwrap().scale(&ring, &ring.sign(d1 % 2 != 0)),
                        );
                    assert!(lhs.is_zero(), "n={n} degrees {d1},{d2}: {lhs:?}");
                }
            }
        }
    }
}

#[test]
fn mc_zero_simplices_are_mc_elements() {
    let f2 = Ring::modular(2).unwrap();
    let v = module(&f2, &[("x", 0, 1), ("y", 0, 1), ("m", -1, 2)]);
    for seed in 0..5 {
        let sp = random_space(&f2, &v, 3, 60 + seed);
        let hc = hopf(&f2, &v, 3);
        let zero_simplices: HashSet<Vec<(usize, String)>> =
            sp.mc_simplices(0).unwrap().iter().map(|p| key(&p.get(1))).collect();
        let enumerated: HashSet<Vec<(usize, String)>> =
            hc.mc_enumerate(sp.q()).unwrap().iter().map(key).collect();
        assert_eq!(zero_simplices, enumerated);
        assert!(sp.mc_check(&Convolution::zero(2, 0)).unwrap().0);
    }
}

fn key(y: &Lin<usize>) -> Vec<(usize, String)> {
    y.iter().map(|(&i, c)| (i, c.to_string())).collect()
}

/// A small ℤ/2 module whose MC simplices can be listed up to `Δ³`.
fn tiny(f2: &Ring) -> GradedModule {
    module(f2, &[("x", 0, 1), ("a", 1, 1), ("m", -1, 2), ("s", 2, 2)])
}

#[test]
fn simplicial_identities_on_mc_simplices() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    for seed in 0..3 {
        let sp = random_space(&f2, &v, 3, 80 + seed);
        for n in 1..=3 {
            let simplices = sp.mc_simplices(n).unwrap();
            assert!(!simplices.is_empty());
            for psi in &simplices {
                for i in 0..=n {
                    let di = sp.face(i, psi).unwrap();
                    assert!(sp.mc_check(&di).unwrap().0);
                    for j in i + 1..=n {
                        if n >= 2 {
                            assert_eq!(
                                sp.face(i, &sp.face(j, psi).unwrap()).unwrap(),
                                sp.face(j - 1, &di).unwrap()
                            );
                        }
                    }
                    let si = sp.degeneracy(i, psi).unwrap();
                    assert!(sp.mc_check(&si).unwrap().0);
                    assert_eq!(&sp.face(i, &si).unwrap(), psi);
                    assert_eq!(&sp.face(i + 1, &si).unwrap(), psi);
                }
            }
        }
    }
}

#[test]
fn abelian_mc_simplices_are_cycles() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    let cf = cofree(&f2, &v, 3);
    // Q̃₁ = d with d(a) = x
    let q = ClassMap::from_tensor_values(&cf, -1, &[(0, vec![1], Lin::basis(&f2, 0))]).unwrap();
    let sp = McSpace::new(e1(&f2), cf, q).unwrap();
    for n in 0..=2 {
        let listed: HashSet<String> = sp.mc_simplices(n).unwrap().iter().map(|p| format!("{p:?}")).collect();
        let mut cycles = HashSet::new();
        for_all_elements(&sp, n, &mut |psi| {
            if sp.differential(psi).is_zero() {
                cycles.insert(format!("{psi:?}"));
            }
        });
        assert_eq!(listed, cycles, "n={n}");
    }
}

/// Every degree-0 element on `Δⁿ` over ℤ/2.
fn for_all_elements(sp: &McSpace, n: usize, f: &mut dyn FnMut(&Convolution)) {
    let ring = sp.ring();
    let mut slots = Vec::new();
    for face in 1u32..1 << (n + 1) {
        for i in sp.module().degree_part(face.count_ones() as i64 - 1) {
            slots.push((face, i));
        }
    }
    for mask in 0u64..1 << slots.len() {
        let mut psi = Convolution::zero(n, 0);
        for (j, &(face, i)) in slots.iter().enumerate() {
            if mask >> j & 1 == 1 {
                let mut y = psi.get(face);
                y.add_term(ring, i, ring.one());
                psi.set(face, y);
            }
        }
        f(&psi);
    }
}

#[test]
fn abelian_horn_needs_one_correction() {
    let z = Ring::integers();
    let v = wide(&z);
    let cf = cofree(&z, &v, 4);
    // only a differential: a ↦ x, s ↦ b
    let q = ClassMap::from_tensor_values(
        &cf,
        -1,
        &[(0, vec![2], Lin::basis(&z, 0)), (0, vec![5], Lin::basis(&z, 3))],
    )
    .unwrap();
    let sp = McSpace::new(e1(&z), cf, q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=3 {
        for k in 0..=n {
            let Some(simplex) = sp.random_mc_simplex(n, 0, &Lin::zero(), &mut rng).unwrap() else {
                panic!("no random simplex");
            };
            let faces: HashSet<u32> = horn_faces(n, k).into_iter().collect();
            let horn = simplex.restrict(|f| faces.contains(&f));
            let (psi, steps) = sp.horn_fill(&horn, k, None).unwrap();
            assert!(steps <= 1);
            assert!(sp.mc_check(&psi).unwrap().0);
            assert_eq!(psi.restrict(|f| faces.contains(&f)), horn);
        }
    }
}

#[test]
fn horn_fillers_over_f2() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    let mut filled = 0;
    for seed in 0..8 {
        let sp = random_space(&f2, &v, 3, 200 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=3 {
            let k = (seed as usize) % (n + 1);
            let x = sp.mc_simplices(0).unwrap().pop().unwrap().get(1);
            let Some(simplex) = sp.random_mc_simplex(n, k, &x, &mut rng).unwrap() else {
                continue;
            };
            let faces: HashSet<u32> = horn_faces(n, k).into_iter().collect();
            let horn = simplex.restrict(|f| faces.contains(&f));
            let (psi, steps) = sp.horn_fill(&horn, k, None).unwrap();
            assert!(steps <= 4);
            assert!(sp.mc_check(&psi).unwrap().0);
            assert_eq!(psi.restrict(|f| faces.contains(&f)), horn);
            // exhaustive search finds the filler among all fillers
            let all = sp.mc_simplices_where(n, &|f| faces.contains(&f), &horn).unwrap();
            assert!(all.contains(&psi));
            filled += 1;
        }
    }
    assert!(filled >= 16);
}

#[test]
fn horn_fill_lambda_one_zero() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    let sp = random_space(&f2, &v, 3, 7);
    for x in sp.mc_simplices(0).unwrap() {
        let mut horn = Convolution::zero(1, 0);
        horn.set(1, x.get(1));
        let (psi, _) = sp.horn_fill(&horn, 0, None).unwrap();
        let all = sp.mc_simplices_where(1, &|f| f == 1, &horn).unwrap();
        assert!(all.contains(&psi));
    }
}

#[test]
fn rejects_bad_input() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    let cf = cofree(&f2, &v, 3);
    // x ↦ m is not closed under Q̃₂(x, x) = m when m... use a nonzero vertex residual instead
    let q = ClassMap::from_tensor_values(&cf, -1, &[(0, vec![0], Lin::basis(&f2, 2))]).unwrap();
    let sp = McSpace::new(e1(&f2), cf.clone(), q).unwrap();
    let mut horn = Convolution::zero(2, 0);
    horn.set(1, Lin::basis(&f2, 0));
    assert!(matches!(sp.horn_fill(&horn, 0, None), Err(Error::Precondition(_))));
    let mut curved = ClassMap::new(-1);
    curved.set(Tensor::new(0, vec![]), Lin::basis(&f2, 2));
    assert!(matches!(McSpace::new(e1(&f2), cf, curved), Err(Error::Convention(_))));
}

#[test]
fn kan_spot_check_fills_every_horn() {
    let f2 = Ring::modular(2).unwrap();
    let v = tiny(&f2);
    let mut total = 0;
    for seed in 0..20 {
        let sp = random_space(&f2, &v, 3, 300 + seed);
        let report = kan_spot_check(&sp, 3, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
        assert!(report.max_corrections <= 4);
        total += report.filled;
    }
    assert!(total >= 20);
}

#[test]
fn e2_cochains_are_outside_the_model() {
    let f2 = Ring::modular(2).unwrap();
    let be = Arc::new(barratt_eccles(&f2, Some(2), 2, 1).unwrap());
    let v = module(&f2, &[("x", 0, 1), ("m", -1, 2)]);
    let cf = CofreeCoalgebra::new(Arc::new(be.cooperad.clone()), v, 2).unwrap();
    // a binary product on the class of a vertex cochain
    let mut q = ClassMap::new(-1);
    q.set(Tensor::new(0, vec![0, 0]), Lin::basis(&f2, 1));
    let sp = McSpace::new(be, cf, q).unwrap();
    assert!(matches!(sp.ensure_chain_map(1), Err(Error::Unsupported(_))));
}
