//! The bialgebra `uC(V)` of a unital Hopf cooperad: tensor-product coalgebra, generalized
//! shuffle product, exponentials, twisting and the Maurer-Cartan equation.
//!
//! Classes are identified with invariants through the undivided norm, so pairing two outer
//! classes sums the first over its `S_k`-orbit.

use std::sync::Arc;

use crate::cofree::{act_on_outer, outer_normal_form, ClassMap, CofreeCoalgebra, CofreeElement, Split};
use crate::cooperad::{HopfStructure, COUNIT, UNITARY};
use crate::error::{Error, Result};
use crate::graded::{reorder_sign, Lin};
use crate::scalars::Scalar;
use crate::sym_action::{Permutation, Tensor};

/// A class of `uC(k) ⊗ (uC(V) ⊗ uC(V))^{⊗k}` modulo `S_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSplit {
    pub outer: usize,
    pub blocks: Vec<(Tensor, Tensor)>,
}

/// `uC(V)` together with the Hopf structure of its cooperad.
#[derive(Clone, Debug)]
pub struct HopfCofree {
    cofree: CofreeCoalgebra,
    hopf: Arc<HopfStructure>,
}

impl HopfCofree {
    pub fn new(cofree: CofreeCoalgebra, hopf: Arc<HopfStructure>) -> Result<Self> {
        hopf.ensure_valid(cofree.cooperad())?;
        Ok(HopfCofree { cofree, hopf })
    }

    pub fn cofree(&self) -> &CofreeCoalgebra {
        &self.cofree
    }

    pub fn hopf(&self) -> &HopfStructure {
        &self.hopf
    }

    pub fn hopf_arc(&self) -> &Arc<HopfStructure> {
        &self.hopf
    }

    /// Pair the splits of `x` and `y` slotwise, calling `emit` with each outer product term,
    /// the paired blocks in slot order and the coefficient.
    fn pair_splits(
        &self,
        xs: &[(Split, Scalar)],
        ys: &[(Split, Scalar)],
        k: usize,
        mut emit: impl FnMut(usize, &[(Tensor, Tensor)], Scalar),
    ) {
        let cf = &self.cofree;
        let ring = cf.ring();
        let comp = cf.cooperad().component(k);
        let perms = Permutation::all(k);
        for (a, ca) in xs {
            let adeg: Vec<i64> = a.blocks.iter().map(|b| cf.degree(b)).collect();
            for sigma in &perms {
                let (p, xblocks, s1) = act_on_outer(comp, sigma, a.outer, &a.blocks, &adeg);
                let xdeg: Vec<i64> = xblocks.iter().map(|b| cf.degree(b)).collect();
                for (b, cb) in ys {
                    let Some(mu) = self.hopf.mul_basis(k, p, b.outer) else { continue };
                    // (p, X_1..X_k, p', Y_1..Y_k) → (p, p', X_1, Y_1, …, X_k, Y_k)
                    let mut degs = vec![cf.cooperad().degree(k, p)];
                    degs.extend(&xdeg);
                    degs.push(cf.cooperad().degree(k, b.outer));
                    degs.extend(b.blocks.iter().map(|t| cf.degree(t)));
                    let mut order = vec![0, k + 1];
                    for i in 0..k {
                        order.push(1 + i);
                        order.push(k + 2 + i);
                    }
                    let odd = s1 ^ reorder_sign(&degs, &order);
                    let pairs: Vec<(Tensor, Tensor)> =
                        xblocks.iter().cloned().zip(b.blocks.iter().cloned()).collect();
                    let base = ring.mul(ca, cb);
                    let base = if odd { ring.neg(&base) } else { base };
                    for (&q, cq) in mu.iter() {
                        emit(q, &pairs, ring.mul(&base, cq));
                    }
                }
            }
        }
    }

    /// The component of the tensor-product coproduct of `x ⊗ y` with outer arity `k`.
    pub fn pair_decompose(&self, x: &CofreeElement, y: &CofreeElement, k: usize) -> Lin<PairSplit> {
        let cf = &self.cofree;
        let ring = cf.ring();
        let comp = cf.cooperad().component(k);
        let xs = cf.decompose_raw(x, k, |_| true);
        let ys = cf.decompose_raw(y, k, |_| true);
        let mut out = Lin::zero();
        self.pair_splits(&xs, &ys, k, |q, pairs, c| {
            let weight: u32 = pairs.iter().map(|(a, b)| cf.weight(a) + cf.weight(b)).sum();
            if weight > cf.w_max() {
                return;
            }
            let degs: Vec<i64> = pairs.iter().map(|(a, b)| cf.degree(a) + cf.degree(b)).collect();
            if let Some((outer, blocks, s)) = outer_normal_form(comp, q, pairs.to_vec(), &degs) {
                out.add_term(ring, PairSplit { outer, blocks }, if s { ring.neg(&c) } else { c });
            }
        });
        out
    }

    /// Generalized shuffle product on basis classes: the coalgebra map extending
    /// `𝟙 ⊗ v ↦ v`, `v ⊗ 𝟙 ↦ v` and zero on every other class.
    pub fn shuffle_basis(&self, s: &Tensor, t: &Tensor) -> CofreeElement {
        let cf = &self.cofree;
        let ring = cf.ring();
        let mut out = Lin::zero();
        if cf.weight(s) + cf.weight(t) > cf.w_max() {
            return out;
        }
        let k = s.vs.len() + t.vs.len();
        if k > cf.cooperad().max_arity() {
            return out;
        }
        // slots carrying a single cogenerator or 𝟙
        let simple = |tree: &crate::cooperad::TreeKey| {
            let ar = tree.slot_arities();
            (0..tree.k()).all(|i| ar[i] == 0 || (ar[i] == 1 && tree.inner[i] == COUNIT))
        };
        let xs = cf.decompose_raw(&Lin::basis(ring, s.clone()), k, simple);
        let ys = cf.decompose_raw(&Lin::basis(ring, t.clone()), k, simple);
        self.pair_splits(&xs, &ys, k, |q, pairs, c| {
            let mut ws = Vec::with_capacity(k);
            for (a, b) in pairs {
                match (a.vs.len(), b.vs.len()) {
                    (1, 0) => ws.push(a.vs[0]),
                    (0, 1) => ws.push(b.vs[0]),
                    _ => return,
                }
            }
            if let Some((class, sign)) = cf.normalize(q, &ws) {
                out.add_term(ring, class, if sign { ring.neg(&c) } else { c });
            }
        });
        out
    }

    /// `x ⋆ y`.
    pub fn shuffle(&self, x: &CofreeElement, y: &CofreeElement) -> CofreeElement {
        let ring = self.cofree.ring();
        let mut out = Lin::zero();
        for (s, a) in x.iter() {
            for (t, b) in y.iter() {
                out.add_scaled(ring, &self.shuffle_basis(s, t), &ring.mul(a, b));
            }
        }
        out
    }

    fn check_degree_zero(&self, v: &Lin<usize>) -> Result<()> {
        let m = self.cofree.module();
        if let Some(&i) = v.keys().find(|&&i| i >= m.dim() || m.degree(i) != 0) {
            return Err(Error::Precondition(format!("element has a component {i} outside degree 0")));
        }
        Ok(())
    }

    /// The invariant tensors `η_r ⊗ v^{⊗r}` for `r ≤` the truncation, up to the weight bound.
    pub fn eta_powers(&self, v: &Lin<usize>) -> Result<Lin<Tensor>> {
        self.check_degree_zero(v)?;
        let cf = &self.cofree;
        let ring = cf.ring();
        let mut out = Lin::zero();
        let mut powers: Vec<(Vec<usize>, Scalar, u32)> = vec![(Vec::new(), ring.one(), 0)];
        for r in 0..=cf.cooperad().max_arity() {
            if powers.is_empty() {
                break;
            }
            for (&c, e) in self.hopf.units[r].iter() {
                for (vs, coef, _) in &powers {
                    out.add_term(ring, Tensor { c, vs: vs.clone() }, ring.mul(e, coef));
                }
            }
            let mut next = Vec::new();
            for (vs, coef, w) in &powers {
                for (&i, a) in v.iter() {
                    let w = w + cf.module().weight(i);
                    if w <= cf.w_max() {
                        let mut vs = vs.clone();
                        vs.push(i);
                        next.push((vs, ring.mul(coef, a), w));
                    }
                }
            }
            powers = next;
        }
        Ok(out)
    }

    /// `γ_v(g_λ)`: the grouplike element with tangent `λ·v`.
    pub fn one_param(&self, v: &Lin<usize>, lambda: &Scalar) -> Result<CofreeElement> {
        let ring = self.cofree.ring();
        self.exp(&v.scale(ring, lambda))
    }

    /// `exp(v) = Σ_r Tr⁻¹(η_r ⊗ v^{⊗r})`, read off directly from the representative terms.
    pub fn exp(&self, v: &Lin<usize>) -> Result<CofreeElement> {
        let cf = &self.cofree;
        let ring = cf.ring();
        let y = self.eta_powers(v)?;
        let mut out = Lin::zero();
        for (t, c) in y.iter() {
            let comp = cf.cooperad().component(t.vs.len());
            if comp.is_free() {
                if comp.is_rep(t.c) {
                    out.add_term(ring, t.clone(), c.clone());
                }
            } else if let Some((class, s)) = cf.normalize(t.c, &t.vs) {
                let c = ring.mul(c, &ring.inv_factorial(t.vs.len())?);
                out.add_term(ring, class, if s { ring.neg(&c) } else { c });
            }
        }
        Ok(out)
    }

    /// Grouplike identity `Δ_k x = [η_k ⊗ x^{⊗k}]` for every `k`; returns the first
    /// failing arity with the defect.
    pub fn grouplike_defect(&self, x: &CofreeElement) -> Option<(usize, Lin<Split>)> {
        let cf = &self.cofree;
        let ring = cf.ring();
        for k in 0..=cf.cooperad().max_arity() {
            let lhs = cf.decompose(x, k);
            let mut rhs = Lin::zero();
            let comp = cf.cooperad().component(k);
            // x^{⊗k} as an expansion over block tuples
            let mut partial: Vec<(Vec<Tensor>, Scalar)> = vec![(Vec::new(), ring.one())];
            for _ in 0..k {
                let mut next = Vec::new();
                for (bs, c) in &partial {
                    for (t, a) in x.iter() {
                        let mut bs = bs.clone();
                        bs.push(t.clone());
                        if bs.iter().map(|b| cf.weight(b)).sum::<u32>() <= cf.w_max() {
                            next.push((bs, ring.mul(c, a)));
                        }
                    }
                }
                partial = next;
            }
            // the invariant η_k ⊗ x^{⊗k} back to classes: representative outer terms, or
            // all terms divided by k! for a trivial action
            let scale = if comp.is_free() { ring.one() } else { ring.inv_factorial(k).ok()? };
            for (&e, ce) in self.hopf.units[k].iter() {
                if comp.is_free() && !comp.is_rep(e) {
                    continue;
                }
                for (bs, c) in &partial {
                    if let Some((split, s)) = cf.normalize_split(e, bs.clone()) {
                        let val = ring.mul(&ring.mul(ce, c), &scale);
                        rhs.add_term(ring, split, if s { ring.neg(&val) } else { val });
                    }
                }
            }
            let defect = lhs.sub(ring, &rhs);
            if !defect.is_zero() {
                return Some((k, defect));
            }
        }
        None
    }

    /// The twisted differential `Q^v(x) = exp(−v) ⋆ Q(exp(v) ⋆ x)` on one class.
    pub fn twisted_apply(&self, q: &ClassMap, exp_v: &CofreeElement, exp_neg: &CofreeElement, t: &Tensor) -> CofreeElement {
        let cf = &self.cofree;
        let big_q = cf.coderivation_extend(q);
        let inner = self.shuffle(exp_v, &Lin::basis(cf.ring(), t.clone()));
        self.shuffle(exp_neg, &big_q.apply(&inner))
    }

    /// Components of `Q^v`, recovered by projecting the twisted operator onto cogenerators.
    pub fn twist(&self, q: &ClassMap, v: &Lin<usize>) -> Result<ClassMap> {
        crate::cofree::check_coderivation_data(&self.cofree, q)?;
        let cf = &self.cofree;
        let ring = cf.ring();
        let exp_v = self.exp(v)?;
        let exp_neg = self.exp(&v.neg(ring))?;
        let big_q = cf.coderivation_extend(q);
        let mut out = ClassMap::new(q.degree);
        for t in cf.basis() {
            let inner = self.shuffle(&exp_v, &Lin::basis(ring, t.clone()));
            let img = self.shuffle(&exp_neg, &big_q.apply(&inner));
            out.set(t.clone(), cf.tangent(&img));
        }
        let report = crate::cofree::completeness_check(cf, &out);
        if let Some(c) = report.first_failure() {
            return Err(Error::Completeness(format!("twist: {}", c.witness.clone().unwrap_or_default())));
        }
        Ok(out)
    }

    /// `Q̃(exp v)`, compared against `Σ_r Q̃_r(η_r ⊗ v^{⊗r})` evaluated through the checked
    /// inverse norm.
    pub fn mc_residual(&self, q: &ClassMap, v: &Lin<usize>) -> Result<Lin<usize>> {
        let cf = &self.cofree;
        let ring = cf.ring();
        let direct = q.apply_element(ring, &self.exp(v)?);
        let through_norm = q.apply_element(ring, &cf.norm_inverse(&self.eta_powers(v)?)?);
        if direct != through_norm {
            return Err(Error::Internal(format!(
                "Maurer-Cartan residual disagrees between exp and the η sum: {direct:?} vs {through_norm:?}"
            )));
        }
        Ok(direct)
    }

    pub fn is_mc(&self, q: &ClassMap, v: &Lin<usize>) -> Result<bool> {
        Ok(self.mc_residual(q, v)?.is_zero())
    }

    /// Every degree-0 element over a finite ring.
    pub fn degree_zero_elements(&self) -> Result<Vec<Lin<usize>>> {
        let cf = &self.cofree;
        let ring = cf.ring();
        let elems = ring
            .elements()
            .ok_or_else(|| Error::Unsupported(format!("enumeration over the infinite ring {}", ring.spec())))?;
        let v0 = cf.module().degree_part(0);
        let total = (elems.len() as f64).powi(v0.len() as i32);
        let cap = crate::builders::resource_cap();
        if total > cap as f64 {
            return Err(Error::ResourceLimit(format!("{total} candidates exceed the cap {cap}")));
        }
        let mut out = vec![Lin::zero()];
        for &i in &v0 {
            out = out
                .into_iter()
                .flat_map(|x: Lin<usize>| {
                    elems.iter().map(move |e| {
                        let mut x = x.clone();
                        x.add_term(ring, i, e.clone());
                        x
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Brute-force Maurer-Cartan set; each candidate is also checked against the flatness of
    /// the twist.
    pub fn mc_enumerate(&self, q: &ClassMap) -> Result<Vec<Lin<usize>>> {
        let mut out = Vec::new();
        for v in self.degree_zero_elements()? {
            let mc = self.is_mc(q, &v)?;
            let twisted = self.twist(q, &v)?;
            if mc != crate::cofree::curvature(&twisted).is_zero() {
                return Err(Error::Internal(format!("flatness of the twist by {v:?} disagrees with the MC equation")));
            }
            if mc {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `𝟙` as an element.
    pub fn unit(&self) -> CofreeElement {
        Lin::basis(self.cofree.ring(), Tensor { c: UNITARY, vs: Vec::new() })
    }
}
