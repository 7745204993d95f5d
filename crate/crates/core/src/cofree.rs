//! Weight-truncated cofree conilpotent coalgebras `uC(V)`, and the extension of
//! cogenerator-level data to coderivations and coalgebra morphisms.
//!
//! Elements are sparse sums of coinvariant classes `[c ⊗ v_1 … v_r]` in normal form, with
//! `c` a basis element of `uC(r)`. All identities hold modulo classes of weight `> W_max`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::cooperad::{Cooperad, TreeKey, COUNIT, UNITARY};
use crate::error::{Error, Result};
use crate::graded::{reorder_sign, GradedModule, Lin};
use crate::report::Report;
use crate::scalars::{Ring, Scalar};
use crate::sym_action::{coinv_normalize, OrbitModule, Permutation, Tensor};

pub type CofreeElement = Lin<Tensor>;

/// Default maximal number of basis classes, overridable with `OPMC_RESOURCE_CAP`.
fn class_cap() -> usize {
    crate::builders::resource_cap() * 4
}

/// A class of `uC(k) ⊗ uC(V)^{⊗k}` modulo `S_k`: outer element and one class per slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    pub outer: usize,
    pub blocks: Vec<Tensor>,
}

/// `uC(V)` for a validated cooperad, truncated at weight `W_max`.
#[derive(Clone, Debug)]
pub struct CofreeCoalgebra {
    co: Arc<Cooperad>,
    v: GradedModule,
    w_max: u32,
    basis: Vec<Tensor>,
    index: HashMap<Tensor, usize>,
    /// Representative-outer cocomposition terms with at most one non-counit slot.
    coder_trees: Vec<Vec<Vec<(TreeKey, Scalar)>>>,
}

impl CofreeCoalgebra {
    pub fn new(co: Arc<Cooperad>, v: GradedModule, w_max: u32) -> Result<Self> {
        co.ensure_valid()?;
        if v.ring() != co.ring() {
            return Err(Error::Shape("module and cooperad live over different rings".into()));
        }
        let min_w = v.basis().iter().map(|b| b.weight).min().unwrap_or(u32::MAX);
        let max_arity = if v.dim() == 0 { 0 } else { (w_max / min_w) as usize };
        if max_arity > co.max_arity() {
            return Err(Error::Precondition(format!(
                "weight bound {w_max} allows classes of arity {max_arity}, beyond the cooperad truncation {}",
                co.max_arity()
            )));
        }
        let cap = class_cap();
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for r in 0..=max_arity {
            let comp = co.component(r);
            for tuple in tuples(v.dim(), r) {
                let weight: u32 = tuple.iter().map(|&i| v.weight(i)).sum();
                if weight > w_max {
                    continue;
                }
                for &c in comp.reps() {
                    if let Some((t, _)) = coinv_normalize(comp, &v, c, &tuple) {
                        if !index.contains_key(&t) {
                            index.insert(t.clone(), basis.len());
                            basis.push(t);
                        }
                    }
                }
                if basis.len() > cap {
                    return Err(Error::ResourceLimit(format!("more than {cap} cofree basis classes")));
                }
            }
        }
        let coder_trees = (0..=co.max_arity())
            .map(|r| {
                (0..co.component(r).dim())
                    .map(|c| {
                        co.rep_trees(r, c)
                            .iter()
                            .filter(|(t, _)| {
                                let ar = t.slot_arities();
                                (0..t.k()).filter(|&i| !(ar[i] == 1 && t.inner[i] == COUNIT)).count() <= 1
                            })
                            .cloned()
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(CofreeCoalgebra { co, v, w_max, basis, index, coder_trees })
    }

    pub fn cooperad(&self) -> &Cooperad {
        &self.co
    }

    pub fn cooperad_arc(&self) -> &Arc<Cooperad> {
        &self.co
    }

    pub fn module(&self) -> &GradedModule {
        &self.v
    }

    pub fn ring(&self) -> &Ring {
        self.co.ring()
    }

    pub fn w_max(&self) -> u32 {
        self.w_max
    }

    /// Basis classes of the unitary coalgebra `uC(V)`.
    pub fn basis(&self) -> &[Tensor] {
        &self.basis
    }

    /// Basis classes of the reduced coalgebra `C(V)` (no `𝟙`).
    pub fn reduced_basis(&self) -> impl Iterator<Item = &Tensor> {
        self.basis.iter().filter(|t| !t.vs.is_empty())
    }

    pub fn index_of(&self, t: &Tensor) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn unit() -> Tensor {
        Tensor { c: UNITARY, vs: Vec::new() }
    }

    pub fn unit_element(&self) -> CofreeElement {
        Lin::basis(self.ring(), Self::unit())
    }

    /// `[counit ⊗ v]`.
    pub fn cogenerator(&self, i: usize) -> Tensor {
        Tensor { c: COUNIT, vs: vec![i] }
    }

    /// The element `[counit ⊗ x]` for `x ∈ V`.
    pub fn embed(&self, x: &Lin<usize>) -> CofreeElement {
        x.map_keys(self.ring(), |&i| Some((self.cogenerator(i), false)))
    }

    pub fn weight(&self, t: &Tensor) -> u32 {
        t.vs.iter().map(|&i| self.v.weight(i)).sum()
    }

    pub fn degree(&self, t: &Tensor) -> i64 {
        self.co.degree(t.vs.len(), t.c) + t.vs.iter().map(|&i| self.v.degree(i)).sum::<i64>()
    }

    pub fn class_name(&self, t: &Tensor) -> String {
        let comp = self.co.component(t.vs.len());
        if t.vs.is_empty() {
            return comp.name(t.c).to_string();
        }
        let vs: Vec<&str> = t.vs.iter().map(|&i| self.v.name(i)).collect();
        format!("[{} ⊗ {}]", comp.name(t.c), vs.join(" ⊗ "))
    }

    pub fn element_to_string(&self, x: &CofreeElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = x.iter().map(|(t, c)| format!("{c}·{}", self.class_name(t))).collect();
        terms.join(" + ")
    }

    /// Normal form of the class of `c ⊗ vs` with its sign; `None` if it vanishes or its
    /// weight exceeds the bound.
    pub fn normalize(&self, c: usize, vs: &[usize]) -> Option<(Tensor, bool)> {
        let w: u32 = vs.iter().map(|&i| self.v.weight(i)).sum();
        if w > self.w_max || vs.len() > self.co.max_arity() {
            return None;
        }
        coinv_normalize(self.co.component(vs.len()), &self.v, c, vs)
    }

    /// Drop classes above the weight bound and bring the rest into normal form.
    pub fn truncate(&self, x: &CofreeElement) -> CofreeElement {
        x.map_keys(self.ring(), |t| self.normalize(t.c, &t.vs))
    }

    pub fn min_weight(&self, x: &CofreeElement) -> Option<u32> {
        x.keys().map(|t| self.weight(t)).min()
    }

    /// Normal form of an outer class `[p ⊗ X_1 … X_k]`.
    pub fn normalize_split(&self, outer: usize, blocks: Vec<Tensor>) -> Option<(Split, bool)> {
        let degs: Vec<i64> = blocks.iter().map(|b| self.degree(b)).collect();
        let (outer, blocks, odd) = outer_normal_form(self.co.component(blocks.len()), outer, blocks, &degs)?;
        Some((Split { outer, blocks }, odd))
    }

    /// Blocks of a representative-outer cocomposition term applied to `vs`: the sign of
    /// moving every `v` next to its inner element, and the normalized block classes.
    fn split_blocks(&self, t: &TreeKey, vs: &[usize]) -> Option<(Vec<Tensor>, bool)> {
        let k = t.k();
        let ar = t.slot_arities();
        let inputs = t.slot_inputs();
        let mut degs: Vec<i64> = (0..k).map(|i| self.co.degree(ar[i], t.inner[i])).collect();
        degs.extend(vs.iter().map(|&i| self.v.degree(i)));
        let mut order = Vec::with_capacity(k + vs.len());
        for i in 0..k {
            order.push(i);
            order.extend(inputs[i].iter().map(|&j| k + j));
        }
        let mut odd = reorder_sign(&degs, &order);
        let mut blocks = Vec::with_capacity(k);
        for i in 0..k {
            let bvs: Vec<usize> = inputs[i].iter().map(|&j| vs[j]).collect();
            let (b, s) = coinv_normalize(self.co.component(ar[i]), &self.v, t.inner[i], &bvs)?;
            odd ^= s;
            blocks.push(b);
        }
        Some((blocks, odd))
    }

    /// The component `Δ_k: uC(V) → (uC(k) ⊗ uC(V)^{⊗k})_{S_k}` of the coproduct.
    pub fn decompose(&self, x: &CofreeElement, k: usize) -> Lin<Split> {
        self.decompose_where(x, k, |_| true)
    }

    /// [`Self::decompose`] restricted to cocomposition terms accepted by `keep`; the
    /// splits are left with their representative outer element, unnormalized.
    pub fn decompose_raw(&self, x: &CofreeElement, k: usize, keep: impl Fn(&TreeKey) -> bool) -> Vec<(Split, Scalar)> {
        let ring = self.ring();
        let mut out = Vec::new();
        for (t, coef) in x.iter() {
            for (tree, tc) in self.co.rep_trees(t.vs.len(), t.c) {
                if tree.k() != k || !keep(tree) {
                    continue;
                }
                let Some((blocks, odd)) = self.split_blocks(tree, &t.vs) else { continue };
                let val = ring.mul(coef, tc);
                out.push((Split { outer: tree.outer, blocks }, if odd { ring.neg(&val) } else { val }));
            }
        }
        out
    }

    fn decompose_where(&self, x: &CofreeElement, k: usize, keep: impl Fn(&TreeKey) -> bool) -> Lin<Split> {
        let ring = self.ring();
        let mut out = Lin::zero();
        for (t, coef) in x.iter() {
            let r = t.vs.len();
            for (tree, tc) in self.co.rep_trees(r, t.c) {
                if tree.k() != k || !keep(tree) {
                    continue;
                }
                let Some((blocks, odd)) = self.split_blocks(tree, &t.vs) else { continue };
                let Some((split, s)) = self.normalize_split(tree.outer, blocks) else { continue };
                let val = ring.mul(coef, tc);
                out.add_term(ring, split, if odd ^ s { ring.neg(&val) } else { val });
            }
        }
        out
    }

    /// Apply a linear operator of the given degree to one slot of each split, with the
    /// Koszul sign of passing the outer element and the earlier blocks.
    pub fn apply_in_slot(
        &self,
        x: &Lin<Split>,
        degree: i64,
        mut f: impl FnMut(&Tensor) -> CofreeElement,
    ) -> Lin<Split> {
        let ring = self.ring();
        let mut out = Lin::zero();
        for (s, coef) in x.iter() {
            let k = s.blocks.len();
            let mut passed = self.co.degree(k, s.outer);
            for j in 0..k {
                let img = f(&s.blocks[j]);
                let odd = degree & 1 != 0 && passed & 1 != 0;
                for (b, c) in img.iter() {
                    let mut blocks = s.blocks.clone();
                    blocks[j] = b.clone();
                    if blocks.iter().map(|b| self.weight(b)).sum::<u32>() > self.w_max {
                        continue;
                    }
                    if let Some((split, s2)) = self.normalize_split(s.outer, blocks) {
                        let val = ring.mul(coef, c);
                        out.add_term(ring, split, if odd ^ s2 { ring.neg(&val) } else { val });
                    }
                }
                passed += self.degree(&s.blocks[j]);
            }
        }
        out
    }

    /// Counit-induced projection `T: uC(V) → V` onto the arity-one classes.
    pub fn tangent(&self, x: &CofreeElement) -> Lin<usize> {
        x.iter()
            .filter(|(t, _)| t.vs.len() == 1 && t.c == COUNIT)
            .map(|(t, c)| (t.vs[0], c.clone()))
            .collect()
    }

    /// Extend cogenerator components to the coderivation `Q` of `uC(V)`.
    pub fn coderivation_extend<'a>(&'a self, q: &'a ClassMap) -> Coderivation<'a> {
        Coderivation { cofree: self, q }
    }

    /// Apply the coalgebra map `uC(A) → uC(B)` extending `g`, where `self` is `uC(A)`.
    pub fn morphism_apply(&self, target: &CofreeCoalgebra, g: &ClassMap, x: &CofreeElement) -> Result<CofreeElement> {
        let ring = self.ring();
        let mut out = Lin::zero();
        for (t, coef) in x.iter() {
            let r = t.vs.len();
            for (tree, tc) in self.co.rep_trees(r, t.c) {
                let Some((blocks, odd)) = self.split_blocks(tree, &t.vs) else { continue };
                // g(block) for every slot, expanded multilinearly
                let mut partial: Vec<(Vec<usize>, Scalar)> =
                    vec![(Vec::new(), if odd { ring.neg(&ring.mul(coef, tc)) } else { ring.mul(coef, tc) })];
                for b in &blocks {
                    let img = g.apply(ring, b);
                    let mut next = Vec::new();
                    for (acc, val) in &partial {
                        for (&y, c) in img.iter() {
                            let mut acc = acc.clone();
                            acc.push(y);
                            next.push((acc, ring.mul(val, c)));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (ws, val) in partial {
                    if let Some((class, s)) = target.normalize(tree.outer, &ws) {
                        out.add_term(ring, class, if s { ring.neg(&val) } else { val });
                    }
                }
            }
        }
        Ok(out)
    }

    /// The norm `Σ_σ σ·x` taking classes to invariant tensors of `⊕ uC(r) ⊗ V^{⊗r}`.
    /// This undivided norm identifies classes with invariants for every component.
    pub fn norm(&self, x: &CofreeElement) -> Lin<Tensor> {
        let ring = self.ring();
        let mut out = Lin::zero();
        for (t, coef) in x.iter() {
            let comp = self.co.component(t.vs.len());
            for p in comp.perms() {
                let (vs, odd) = crate::sym_action::permute_slots(p, &t.vs, &self.v);
                let c = comp.act_basis(p.rank(), t.c);
                out.add_term(ring, Tensor { c, vs }, if odd { ring.neg(coef) } else { coef.clone() });
            }
        }
        out
    }

    /// Inverse of [`Self::norm`] on invariant tensors, with the invariance and round trip
    /// checked; classes above the weight bound are dropped.
    pub fn norm_inverse(&self, y: &Lin<Tensor>) -> Result<CofreeElement> {
        let ring = self.ring();
        let mut by_arity: BTreeMap<usize, Lin<Tensor>> = BTreeMap::new();
        for (t, c) in y.iter() {
            by_arity.entry(t.vs.len()).or_default().add_term(ring, t.clone(), c.clone());
        }
        let mut out = Lin::zero();
        for (r, part) in by_arity {
            if r > self.co.max_arity() {
                return Err(Error::Shape(format!("tensor of arity {r} beyond the truncation")));
            }
            let comp = self.co.component(r);
            let class = crate::sym_action::norm_inverse(ring, comp, &self.v, &part)?;
            // the divided norm of a trivial component differs from ours by r!
            let class = if comp.is_free() { class } else { class.scale(ring, &ring.inv_factorial(r)?) };
            out.add_scaled(ring, &self.truncate(&class), &ring.one());
        }
        Ok(out)
    }

    pub fn all_classes_element(&self) -> impl Iterator<Item = CofreeElement> + '_ {
        self.basis.iter().map(|t| Lin::basis(self.ring(), t.clone()))
    }
}

/// Normal form of an outer class `[p ⊗ B_1 … B_k]` with blocks of the given degrees:
/// representative outer element for a free component, sorted blocks for a trivial one.
pub fn outer_normal_form<B: Ord + Clone>(
    comp: &OrbitModule,
    outer: usize,
    blocks: Vec<B>,
    degs: &[i64],
) -> Option<(usize, Vec<B>, bool)> {
    if comp.is_free() {
        let (rep, sigma) = comp.orbit_of(outer);
        if sigma.is_identity() {
            return Some((rep, blocks, false));
        }
        // [σ·rep ⊗ B] = [rep ⊗ σ⁻¹·B]
        let order = sigma.images();
        let moved = order.iter().map(|&i| blocks[i].clone()).collect();
        return Some((rep, moved, reorder_sign(degs, order)));
    }
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| blocks[a].cmp(&blocks[b]));
    if order.windows(2).any(|w| blocks[w[0]] == blocks[w[1]] && degs[w[0]] & 1 != 0) {
        return None;
    }
    let sorted = order.iter().map(|&i| blocks[i].clone()).collect();
    Some((comp.reps()[0], sorted, reorder_sign(degs, &order)))
}

/// `σ·(p ⊗ B_1 … B_k) = σp ⊗ ±B_{σ⁻¹(1)} … B_{σ⁻¹(k)}`.
pub fn act_on_outer<B: Clone>(
    comp: &OrbitModule,
    sigma: &Permutation,
    outer: usize,
    blocks: &[B],
    degs: &[i64],
) -> (usize, Vec<B>, bool) {
    let inv = sigma.inverse();
    let moved = inv.images().iter().map(|&i| blocks[i].clone()).collect();
    (comp.act_basis(sigma.rank(), outer), moved, reorder_sign(degs, inv.images()))
}

/// All tuples in `{0..n}^r`.
pub fn tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Linear data on normalized classes with values in a module: the components `Q̃_r`
/// of a coderivation (degree −1) or the corestriction `g_r` of a coalgebra map (degree 0).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassMap {
    pub degree: i64,
    pub entries: BTreeMap<Tensor, Lin<usize>>,
}

impl ClassMap {
    pub fn new(degree: i64) -> Self {
        ClassMap { degree, entries: BTreeMap::new() }
    }

    pub fn apply(&self, ring: &Ring, t: &Tensor) -> Lin<usize> {
        let _ = ring;
        self.entries.get(t).cloned().unwrap_or_default()
    }

    pub fn apply_element(&self, ring: &Ring, x: &CofreeElement) -> Lin<usize> {
        let mut out = Lin::zero();
        for (t, c) in x.iter() {
            if let Some(y) = self.entries.get(t) {
                out.add_scaled(ring, y, c);
            }
        }
        out
    }

    /// Class data of an equivariant tensor-level map given on some tensors `(c, vs)`:
    /// the map restricted to invariants, `[t] ↦ Q̃(Σ_σ σ·t) = r!·Q̃(t)`. Values on tensors
    /// of the same orbit must agree up to the Koszul sign.
    pub fn from_tensor_values(
        cofree: &CofreeCoalgebra,
        degree: i64,
        values: &[(usize, Vec<usize>, Lin<usize>)],
    ) -> Result<ClassMap> {
        let ring = cofree.ring();
        let mut tensor_level: BTreeMap<Tensor, Lin<usize>> = BTreeMap::new();
        for (c, vs, y) in values {
            let r = vs.len();
            if r > cofree.cooperad().max_arity() || *c >= cofree.cooperad().component(r).dim() {
                return Err(Error::Shape(format!("no cooperad element {c} in arity {r}")));
            }
            let Some((t, odd)) = coinv_normalize(cofree.cooperad().component(r), cofree.module(), *c, vs) else {
                if !y.is_zero() {
                    return Err(Error::NotInvariant(format!("nonzero value on a vanishing class in arity {r}")));
                }
                continue;
            };
            let y = if odd { y.neg(ring) } else { y.clone() };
            match tensor_level.get(&t) {
                Some(prev) if *prev != y => {
                    return Err(Error::NotInvariant(format!(
                        "values on {} are not equivariant",
                        cofree.class_name(&t)
                    )))
                }
                _ => {
                    tensor_level.insert(t, y);
                }
            }
        }
        let mut out = ClassMap::new(degree);
        for (t, y) in tensor_level {
            if cofree.index_of(&t).is_none() {
                continue;
            }
            let fact = ring.from_bigint((1..=t.vs.len() as u64).product::<u64>().into());
            out.set(t, y.scale(ring, &fact));
        }
        Ok(out)
    }

    pub fn set(&mut self, t: Tensor, y: Lin<usize>) {
        if y.is_zero() {
            self.entries.remove(&t);
        } else {
            self.entries.insert(t, y);
        }
    }

    /// Largest arity of a nonzero entry.
    pub fn max_arity(&self) -> Option<usize> {
        self.entries.keys().map(|t| t.vs.len()).max()
    }

    pub fn add(&self, ring: &Ring, other: &ClassMap) -> ClassMap {
        let mut out = self.clone();
        for (t, y) in &other.entries {
            let sum = out.entries.get(t).map(|x| x.add(ring, y)).unwrap_or_else(|| y.clone());
            out.set(t.clone(), sum);
        }
        out
    }

    /// Check degrees and that every entry is given on a normalized class of the coalgebra.
    pub fn check(&self, cofree: &CofreeCoalgebra, target: &GradedModule) -> Result<()> {
        for (t, y) in &self.entries {
            if cofree.index_of(t).is_none() {
                return Err(Error::Shape(format!("{} is not a normalized basis class", cofree.class_name(t))));
            }
            for &i in y.keys() {
                if i >= target.dim() || target.degree(i) != cofree.degree(t) + self.degree {
                    return Err(Error::Shape(format!(
                        "entry on {} has the wrong degree",
                        cofree.class_name(t)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The coderivation `Q = Σ_k (id ⊗ Σ_j T…Q̃…T) Δ_k` determined by its components.
#[derive(Clone, Copy)]
pub struct Coderivation<'a> {
    cofree: &'a CofreeCoalgebra,
    q: &'a ClassMap,
}

impl fmt::Debug for Coderivation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coderivation({} entries)", self.q.entries.len())
    }
}

impl<'a> Coderivation<'a> {
    pub fn components(&self) -> &ClassMap {
        self.q
    }

    pub fn apply_class(&self, t: &Tensor) -> CofreeElement {
        let cf = self.cofree;
        let ring = cf.ring();
        let co = cf.cooperad();
        let r = t.vs.len();
        let mut out = Lin::zero();
        for (tree, tc) in &cf.coder_trees[r][t.c] {
            let k = tree.k();
            let ar = tree.slot_arities();
            let Some((blocks, odd)) = cf.split_blocks(tree, &t.vs) else { continue };
            let counit_slots: Vec<bool> = (0..k).map(|i| ar[i] == 1 && tree.inner[i] == COUNIT).collect();
            let nontrivial = counit_slots.iter().filter(|&&b| !b).count();
            let mut passed = co.degree(k, tree.outer);
            for j in 0..k {
                if nontrivial == 1 && counit_slots[j] {
                    passed += cf.degree(&blocks[j]);
                    continue;
                }
                let img = self.q.apply(ring, &blocks[j]);
                let sign = odd ^ (self.q.degree & 1 != 0 && passed & 1 != 0);
                for (&y, c) in img.iter() {
                    let ws: Vec<usize> =
                        (0..k).map(|i| if i == j { y } else { blocks[i].vs[0] }).collect();
                    if let Some((class, s)) = cf.normalize(tree.outer, &ws) {
                        let val = ring.mul(tc, c);
                        out.add_term(ring, class, if sign ^ s { ring.neg(&val) } else { val });
                    }
                }
                passed += cf.degree(&blocks[j]);
            }
        }
        out
    }

    pub fn apply(&self, x: &CofreeElement) -> CofreeElement {
        let ring = self.cofree.ring();
        let mut out = Lin::zero();
        for (t, c) in x.iter() {
            out.add_scaled(ring, &self.apply_class(t), c);
        }
        out
    }

    /// `Q ∘ Q` on every basis class; the first class with a nonzero image is the witness.
    pub fn square_witness(&self) -> Option<String> {
        for t in self.cofree.basis() {
            let qq = self.apply(&self.apply_class(t));
            if !qq.is_zero() {
                return Some(format!(
                    "Q²{} = {}",
                    self.cofree.class_name(t),
                    self.cofree.element_to_string(&qq)
                ));
            }
        }
        None
    }

    pub fn squares_to_zero(&self) -> bool {
        self.square_witness().is_none()
    }

    /// Projection of `Q` onto the cogenerators, as class data.
    pub fn projection(&self) -> ClassMap {
        let mut out = ClassMap::new(self.q.degree);
        for t in self.cofree.basis() {
            out.set(t.clone(), self.cofree.tangent(&self.apply_class(t)));
        }
        out
    }

    /// Co-Leibniz rule `Δ_k Q = (id ⊗ Σ_j Q_j) Δ_k` on one class; returns the defect.
    pub fn co_leibniz_defect(&self, t: &Tensor, k: usize) -> Lin<Split> {
        let cf = self.cofree;
        let ring = cf.ring();
        let x = Lin::basis(ring, t.clone());
        let lhs = cf.decompose(&self.apply(&x), k);
        let rhs = cf.apply_in_slot(&cf.decompose(&x, k), self.q.degree, |b| self.apply_class(b));
        lhs.sub(ring, &rhs)
    }
}

/// `Q̃_0(𝟙)`.
pub fn curvature(q: &ClassMap) -> Lin<usize> {
    q.entries.get(&CofreeCoalgebra::unit()).cloned().unwrap_or_default()
}

/// Weight additivity of every entry, and the nilpotence bound when one exists.
pub fn completeness_check(cofree: &CofreeCoalgebra, q: &ClassMap) -> Report {
    let mut rep = Report::new("completeness");
    let v = cofree.module();
    let violation = q.entries.iter().find_map(|(t, y)| {
        let w = cofree.weight(t);
        y.keys()
            .find(|&&i| v.weight(i) < w)
            .map(|&i| format!("{} ↦ {} lowers weight", cofree.class_name(t), v.name(i)))
    });
    rep.record("weight additivity", violation);
    match q.max_arity() {
        Some(n) => rep.pass(format!("nilpotent with N = {n}")),
        None => rep.pass("nilpotent with N = 0 (zero map)"),
    }
    rep
}

/// Nilpotence bound: largest arity of a nonzero component.
pub fn nilpotence_bound(q: &ClassMap) -> usize {
    q.max_arity().unwrap_or(0)
}

/// Corestriction `π_V ∘ Φ`.
pub fn corestriction(source: &CofreeCoalgebra, target: &CofreeCoalgebra, g: &ClassMap) -> Result<ClassMap> {
    let mut out = ClassMap::new(0);
    for t in source.basis() {
        let img = source.morphism_apply(target, g, &Lin::basis(source.ring(), t.clone()))?;
        out.set(t.clone(), target.tangent(&img));
    }
    Ok(out)
}

/// Reject morphism data that is nonzero on `𝟙` or lowers weight.
pub fn check_morphism_data(source: &CofreeCoalgebra, target: &GradedModule, g: &ClassMap) -> Result<()> {
    if g.degree != 0 {
        return Err(Error::Shape("coalgebra map components have degree 0".into()));
    }
    g.check(source, target)?;
    if !curvature(g).is_zero() {
        return Err(Error::Precondition("morphism data must vanish on 𝟙".into()));
    }
    for (t, y) in &g.entries {
        let w = source.weight(t);
        if let Some(&i) = y.keys().find(|&&i| target.weight(i) < w) {
            return Err(Error::Completeness(format!(
                "{} ↦ {} lowers weight",
                source.class_name(t),
                target.name(i)
            )));
        }
    }
    Ok(())
}

/// Reject coderivation data that lowers weight or has the wrong degree.
pub fn check_coderivation_data(cofree: &CofreeCoalgebra, q: &ClassMap) -> Result<()> {
    if q.degree != -1 {
        return Err(Error::Shape("coderivation components have degree -1".into()));
    }
    q.check(cofree, cofree.module())?;
    let rep = completeness_check(cofree, q);
    if let Some(c) = rep.first_failure() {
        return Err(Error::Completeness(c.witness.clone().unwrap_or_default()));
    }
    Ok(())
}

/// Random components on classes of arity `≤ max_arity` into `target`, respecting degree and
/// weight, with coefficients in `-2..=2`.
pub fn random_class_map<R: rand::Rng>(
    cofree: &CofreeCoalgebra,
    target: &GradedModule,
    degree: i64,
    max_arity: usize,
    density: f64,
    rng: &mut R,
) -> ClassMap {
    let ring = cofree.ring();
    let mut out = ClassMap::new(degree);
    for t in cofree.basis() {
        if t.vs.len() > max_arity {
            continue;
        }
        let (d, w) = (cofree.degree(t) + degree, cofree.weight(t));
        let mut y = Lin::zero();
        for i in 0..target.dim() {
            if target.degree(i) == d && target.weight(i) >= w && rng.gen_bool(density) {
                y.add_term(ring, i, ring.int(rng.gen_range(-2..=2)));
            }
        }
        out.set(t.clone(), y);
    }
    out
}

/// Corestriction of the inverse of the coalgebra automorphism extending `g`, whose arity-one
/// part must be the identity. Solved by recursion on weight: `h = T − g_{≥2} ∘ Ψ`.
pub fn invert_morphism(cofree: &CofreeCoalgebra, g: &ClassMap) -> Result<ClassMap> {
    let ring = cofree.ring();
    let v = cofree.module();
    for i in 0..v.dim() {
        let t = cofree.cogenerator(i);
        if g.apply(ring, &t) != Lin::basis(ring, i) {
            return Err(Error::Precondition("inversion needs the identity on cogenerators".into()));
        }
    }
    if !curvature(g).is_zero() {
        return Err(Error::Precondition("morphism data must vanish on 𝟙".into()));
    }
    let mut higher = g.clone();
    for i in 0..v.dim() {
        higher.set(cofree.cogenerator(i), Lin::zero());
    }
    let mut order: Vec<&Tensor> = cofree.basis().iter().collect();
    order.sort_by_key(|t| (cofree.weight(t), t.vs.len()));
    let mut h = ClassMap::new(0);
    for t in order {
        if t.vs.is_empty() {
            continue;
        }
        // Ψ(t) needs h only on lighter classes and on t itself in the arity-one slot
        let mut partial = h.clone();
        partial.set(t.clone(), Lin::zero());
        let psi = cofree.morphism_apply(cofree, &partial, &Lin::basis(ring, t.clone()))?;
        let value = cofree.tangent(&Lin::basis(ring, t.clone())).sub(ring, &higher.apply_element(ring, &psi));
        h.set(t.clone(), value);
    }
    Ok(h)
}

/// A random square-zero coderivation: a curvature `ρ` and a differential with `d² = 0`,
/// conjugated by a random coalgebra automorphism with identity linear part.
pub fn random_square_zero<R: rand::Rng>(cofree: &CofreeCoalgebra, max_arity: usize, curved: bool, rng: &mut R) -> Result<ClassMap> {
    let ring = cofree.ring();
    let v = cofree.module();
    let mut q = ClassMap::new(-1);
    // differential: random pairing of basis vectors with d² = 0
    let mut used = vec![false; v.dim()];
    for i in 0..v.dim() {
        if used[i] || !rng.gen_bool(0.5) {
            continue;
        }
        let targets: Vec<usize> = (0..v.dim())
            .filter(|&j| !used[j] && j != i && v.degree(j) == v.degree(i) - 1 && v.weight(j) >= v.weight(i))
            .collect();
        if targets.is_empty() {
            continue;
        }
        let j = targets[rng.gen_range(0..targets.len())];
        used[i] = true;
        used[j] = true;
        q.set(cofree.cogenerator(i), Lin::single(ring, j, ring.int(rng.gen_range(1..=3))));
    }
    if curved {
        // a curvature that d kills: a combination of degree −1 vectors outside the image pairing
        let mut rho = Lin::zero();
        for j in v.degree_part(-1) {
            if q.apply(ring, &cofree.cogenerator(j)).is_zero() && rng.gen_bool(0.7) {
                rho.add_term(ring, j, ring.int(rng.gen_range(-2..=2)));
            }
        }
        q.set(CofreeCoalgebra::unit(), rho);
    }
    let mut g = random_class_map(cofree, v, 0, max_arity, 0.5, rng);
    g.set(CofreeCoalgebra::unit(), Lin::zero());
    for i in 0..v.dim() {
        g.set(cofree.cogenerator(i), Lin::basis(ring, i));
    }
    let h = invert_morphism(cofree, &g)?;
    let big_q = cofree.coderivation_extend(&q);
    let mut out = ClassMap::new(-1);
    for t in cofree.basis() {
        let phi = cofree.morphism_apply(cofree, &g, &Lin::basis(ring, t.clone()))?;
        let img = cofree.morphism_apply(cofree, &h, &big_q.apply(&phi))?;
        out.set(t.clone(), cofree.tangent(&img));
    }
    Ok(out)
}
