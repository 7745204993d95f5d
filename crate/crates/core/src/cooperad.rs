//! Truncated unitary reduced cooperads stored as explicit cocomposition tables, their
//! unital Hopf structures, cooperad morphisms, and validators for every law used later.
//!
//! A cocomposition term is a two-level tree: an outer element of `uC(k)`, one inner element
//! per outer slot, and an assignment of the composite's inputs to outer slots. Inputs feeding
//! the same slot are taken in increasing order. The term stands for
//! `coef · outer ⊗ inner_1 ⊗ … ⊗ inner_k` in that tensor order. Tables hold the full
//! cocomposition (every labelling of the outer vertex), i.e. the dual of the composition
//! maps of a finite-type operad.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graded::{reorder_sign, Lin};
use crate::report::Report;
use crate::scalars::{Ring, Scalar};
use crate::sym_action::{OrbitModule, Permutation};

/// One two-level tree in a cocomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeKey {
    pub outer: usize,
    pub inner: Vec<usize>,
    /// Outer slot receiving each input of the composite.
    pub blocks: Vec<usize>,
}

impl TreeKey {
    pub fn k(&self) -> usize {
        self.inner.len()
    }

    pub fn slot_arities(&self) -> Vec<usize> {
        let mut a = vec![0; self.inner.len()];
        for &b in &self.blocks {
            a[b] += 1;
        }
        a
    }

    /// Inputs of each slot, in increasing order.
    pub fn slot_inputs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.inner.len()];
        for (j, &b) in self.blocks.iter().enumerate() {
            out[b].push(j);
        }
        out
    }
}

/// Builder-level position of the arity-1 counit element and the arity-0 unit `𝟙`.
pub const COUNIT: usize = 0;
pub const UNITARY: usize = 0;

/// A cooperad truncated at arity `max_arity` and at degrees `>= -max_depth`.
#[derive(Clone, Debug)]
pub struct Cooperad {
    pub name: String,
    ring: Ring,
    max_arity: usize,
    degree_window: (i64, i64),
    components: Vec<OrbitModule>,
    cocomp: Vec<Vec<Lin<TreeKey>>>,
    /// Cocomposition terms whose outer element is an orbit representative.
    rep_trees: Vec<Vec<Vec<(TreeKey, Scalar)>>>,
    validation: OnceLock<Option<String>>,
}

impl Cooperad {
    /// Assemble a truncation; `components[r]` is `uC(r)` and `cocomp[r][c]` the full
    /// cocomposition of basis element `c` of `uC(r)`.
    pub fn new(
        name: impl Into<String>,
        ring: Ring,
        degree_window: (i64, i64),
        components: Vec<OrbitModule>,
        cocomp: Vec<Vec<Lin<TreeKey>>>,
    ) -> Result<Self> {
        let max_arity = components.len().checked_sub(1).ok_or_else(|| Error::Shape("no components".into()))?;
        if components.len() < 2 || components[0].dim() != 1 || components[1].dim() != 1 {
            return Err(Error::Shape("unitary reduced cooperad needs uC(0) = uC(1) = R".into()));
        }
        if components[0].degree(UNITARY) != 0 || components[1].degree(COUNIT) != 0 {
            return Err(Error::Shape("unit and counit elements must have degree 0".into()));
        }
        if cocomp.len() != components.len() {
            return Err(Error::Shape("cocomposition table arity mismatch".into()));
        }
        for (r, (comp, table)) in components.iter().zip(&cocomp).enumerate() {
            if comp.arity() != r || table.len() != comp.dim() {
                return Err(Error::Shape(format!("component/table mismatch in arity {r}")));
            }
            for (c, trees) in table.iter().enumerate() {
                for t in trees.keys() {
                    let k = t.k();
                    if k > max_arity || t.blocks.len() != r || t.blocks.iter().any(|&b| b >= k) {
                        return Err(Error::Shape(format!("malformed tree in arity {r}: {t:?}")));
                    }
                    if t.outer >= components[k].dim() {
                        return Err(Error::Shape(format!("outer index out of range in arity {r}")));
                    }
                    let ar = t.slot_arities();
                    let mut deg = components[k].degree(t.outer);
                    for (i, &q) in t.inner.iter().enumerate() {
                        if q >= components[ar[i]].dim() {
                            return Err(Error::Shape(format!("inner index out of range in arity {r}")));
                        }
                        deg += components[ar[i]].degree(q);
                    }
                    if deg != comp.degree(c) {
                        return Err(Error::Shape(format!(
                            "cocomposition of {} does not preserve degree",
                            comp.name(c)
                        )));
                    }
                }
            }
        }
        let rep_trees = cocomp
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|trees| {
                        trees
                            .iter()
                            .filter(|(t, _)| components[t.k()].is_rep(t.outer))
                            .map(|(t, c)| {
                                // trivial outer action: every relabelling of the slots gives
                                // the same class, so each labelled tree counts 1/k!
                                let k = t.k();
                                let c = match components[k].is_free() {
                                    true => c.clone(),
                                    false => ring.inv_factorial(k).map(|f| ring.mul(c, &f)).unwrap_or_else(|_| c.clone()),
                                };
                                (t.clone(), c)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Cooperad {
            name: name.into(),
            ring,
            max_arity,
            degree_window,
            components,
            cocomp,
            rep_trees,
            validation: OnceLock::new(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Run [`validate_cooperad`] once and fail on any violated law.
    pub fn ensure_valid(&self) -> Result<()> {
        let failure = self.validation.get_or_init(|| validate_cooperad(self).into_result().err().map(|e| e.to_string()));
        match failure {
            None => Ok(()),
            Some(msg) => Err(Error::Validation(msg.clone())),
        }
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn degree_window(&self) -> (i64, i64) {
        self.degree_window
    }

    pub fn component(&self, r: usize) -> &OrbitModule {
        &self.components[r]
    }

    pub fn components(&self) -> &[OrbitModule] {
        &self.components
    }

    pub fn degree(&self, r: usize, c: usize) -> i64 {
        self.components[r].degree(c)
    }

    pub fn cocomposition(&self, r: usize, c: usize) -> &Lin<TreeKey> {
        &self.cocomp[r][c]
    }

    /// Terms of the cocomposition whose outer element is an orbit representative; these
    /// give the coproduct on coinvariant classes. Terms with a trivially acted outer
    /// component are scaled by `1/k!`.
    pub fn rep_trees(&self, r: usize, c: usize) -> &[(TreeKey, Scalar)] {
        &self.rep_trees[r][c]
    }

    pub fn is_free(&self) -> bool {
        self.components.iter().all(|c| c.is_free())
    }

    fn tree_degrees(&self, t: &TreeKey) -> Vec<i64> {
        let ar = t.slot_arities();
        t.inner.iter().zip(&ar).map(|(&q, &a)| self.degree(a, q)).collect()
    }

    pub fn tree_to_string(&self, r: usize, t: &TreeKey) -> String {
        let ar = t.slot_arities();
        let inner: Vec<&str> = t.inner.iter().zip(&ar).map(|(&q, &a)| self.components[a].name(q)).collect();
        let _ = r;
        format!("{}({}) blocks {:?}", self.components[t.k()].name(t.outer), inner.join(", "), t.blocks)
    }

    /// Terms where every inner element is the counit except at most one, which may have any
    /// arity including zero; the all-counit terms are excluded.
    pub fn infinitesimal_cocomposition(&self, r: usize, c: usize) -> Vec<InfinitesimalTerm> {
        let mut out = Vec::new();
        for (t, coef) in self.cocomp[r][c].iter() {
            let ar = t.slot_arities();
            let nontrivial: Vec<usize> =
                (0..t.k()).filter(|&i| !(ar[i] == 1 && t.inner[i] == COUNIT)).collect();
            if nontrivial.len() == 1 {
                let slot = nontrivial[0];
                out.push(InfinitesimalTerm {
                    outer: t.outer,
                    slot,
                    inner_arity: ar[slot],
                    inner: t.inner[slot],
                    blocks: t.blocks.clone(),
                    coef: coef.clone(),
                });
            }
        }
        out
    }

    /// Relabel the inputs of a tree by `σ` (input `j` becomes `σ(j)`).
    pub fn act_on_tree(&self, sigma: &Permutation, t: &TreeKey) -> TreeKey {
        let k = t.k();
        let ar = t.slot_arities();
        let mut blocks = vec![0; t.blocks.len()];
        for (j, &b) in t.blocks.iter().enumerate() {
            blocks[sigma.apply(j)] = b;
        }
        let old = t.slot_inputs();
        let mut inner = t.inner.clone();
        for i in 0..k {
            if ar[i] < 2 {
                continue;
            }
            let mut new_inputs: Vec<usize> = old[i].iter().map(|&j| sigma.apply(j)).collect();
            new_inputs.sort_unstable();
            // position a of the old block goes to the position of σ(old[a]) in the new block
            let images: Vec<usize> =
                old[i].iter().map(|&j| new_inputs.binary_search(&sigma.apply(j)).unwrap()).collect();
            let pi = Permutation::new(images).expect("block relabelling is a bijection");
            inner[i] = self.components[ar[i]].act_basis(pi.rank(), t.inner[i]);
        }
        TreeKey { outer: t.outer, inner, blocks }
    }
}

/// A term of the infinitesimal cocomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalTerm {
    pub outer: usize,
    pub slot: usize,
    pub inner_arity: usize,
    pub inner: usize,
    pub blocks: Vec<usize>,
    pub coef: Scalar,
}

pub fn validate_cooperad(co: &Cooperad) -> Report {
    let mut rep = Report::new(format!("cooperad {}", co.name));
    let ring = &co.ring;

    let mut freeness = None;
    for comp in &co.components {
        if !comp.is_free() && !ring.contains_rationals() {
            freeness = Some(format!("arity {} has a non-free action over {}", comp.arity(), ring.spec()));
            break;
        }
    }
    rep.record("freeness", freeness);

    let (lo, hi) = co.degree_window;
    let window = co.components.iter().find_map(|comp| {
        (0..comp.dim()).find(|&b| comp.degree(b) < lo || comp.degree(b) > hi).map(|b| comp.name(b).to_string())
    });
    rep.record("degree window", window);

    rep.record("counit laws", counit_witness(co));
    rep.record("equivariance", equivariance_witness(co));
    rep.record("coassociativity", coassociativity_witness(co));
    rep
}

fn counit_witness(co: &Cooperad) -> Option<String> {
    for (r, table) in co.cocomp.iter().enumerate() {
        let comp = &co.components[r];
        for (c, trees) in table.iter().enumerate() {
            // outer counit: exactly (id; c)
            let outer_unit: Vec<_> = trees.iter().filter(|(t, _)| t.k() == 1).collect();
            let ok = outer_unit.len() == 1 && {
                let (t, coef) = outer_unit[0];
                t.outer == COUNIT && t.inner == [c] && coef.is_one()
            };
            if !ok {
                return Some(format!("outer counit term of {} in arity {r}", comp.name(c)));
            }
            // inner counits: one term (β⁻¹·c; id, …, id; β) per bijection β
            let all_id: Vec<_> = trees
                .iter()
                .filter(|(t, _)| t.k() == r && t.inner.iter().all(|&q| q == COUNIT) && t.slot_arities().iter().all(|&a| a == 1))
                .collect();
            let mut seen = 0;
            for (t, coef) in &all_id {
                let blocks = Permutation::new(t.blocks.clone()).expect("all slots unary");
                let expected = comp.act_basis(blocks.rank(), c);
                if t.outer != expected || !coef.is_one() {
                    return Some(format!("inner counit term {} of {}", co.tree_to_string(r, t), comp.name(c)));
                }
                seen += 1;
            }
            let factorial: usize = (1..=r).product();
            if seen != factorial {
                return Some(format!("{} of {factorial} inner counit terms for {}", seen, comp.name(c)));
            }
        }
    }
    None
}

fn equivariance_witness(co: &Cooperad) -> Option<String> {
    let ring = &co.ring;
    for (r, table) in co.cocomp.iter().enumerate() {
        let comp = &co.components[r];
        for sigma in comp.perms() {
            if sigma.is_identity() {
                continue;
            }
            let rank = sigma.rank();
            for c in 0..comp.dim() {
                let moved = table[c].map_keys(ring, |t| Some((co.act_on_tree(sigma, t), false)));
                if moved != table[comp.act_basis(rank, c)] {
                    return Some(format!("{sigma} acting on {}", comp.name(c)));
                }
            }
        }
    }
    None
}

/// Coefficient arithmetic for the coassociativity check; tables with integer entries use
/// machine integers.
trait Coef: Clone + PartialEq {
    fn lift(s: &Scalar) -> Option<Self>;
    fn times(&self, ring: &Ring, o: &Self) -> Self;
    fn accumulate(&mut self, ring: &Ring, o: &Self, negate: bool);
    /// Canonical representative in the ring, `None` when zero.
    fn reduce(&self, ring: &Ring) -> Option<Self>;
}

impl Coef for i128 {
    fn lift(s: &Scalar) -> Option<Self> {
        s.to_i64().map(i128::from)
    }
    fn times(&self, _: &Ring, o: &Self) -> Self {
        self * o
    }
    fn accumulate(&mut self, _: &Ring, o: &Self, negate: bool) {
        if negate {
            *self -= o
        } else {
            *self += o
        }
    }
    fn reduce(&self, ring: &Ring) -> Option<Self> {
        let v = match ring.cardinality() {
            Some(m) => self.rem_euclid(i128::from(m)),
            None => *self,
        };
        (v != 0).then_some(v)
    }
}

impl Coef for Scalar {
    fn lift(s: &Scalar) -> Option<Self> {
        Some(s.clone())
    }
    fn times(&self, ring: &Ring, o: &Self) -> Self {
        ring.mul(self, o)
    }
    fn accumulate(&mut self, ring: &Ring, o: &Self, negate: bool) {
        *self = if negate { ring.sub(self, o) } else { ring.add(self, o) };
    }
    fn reduce(&self, _: &Ring) -> Option<Self> {
        (!self.is_zero()).then(|| self.clone())
    }
}

/// Three-level tree flattened as `[top, j, mids.., mid arities.., leaves.., inputs..]`, where
/// leaves are grouped by middle vertex and each input names its flat leaf index.
type FlatKey = Vec<u32>;

fn describe_key(key: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let j = key[1] as usize;
    let mid_arities = key[2 + j..2 + 2 * j].to_vec();
    let leaves: usize = mid_arities.iter().map(|&a| a as usize).sum();
    let mut leaf_arities = vec![0u32; leaves];
    for &l in &key[2 + 2 * j + leaves..] {
        leaf_arities[l as usize] += 1;
    }
    (mid_arities, leaf_arities)
}

fn add_flat<C: Coef>(ring: &Ring, map: &mut HashMap<FlatKey, C>, key: FlatKey, val: &C, negate: bool) {
    match map.get_mut(&key) {
        Some(v) => v.accumulate(ring, val, negate),
        None => {
            let mut v = C::lift(&ring.zero()).expect("zero lifts");
            v.accumulate(ring, val, negate);
            map.insert(key, v);
        }
    }
}

fn reduce_map<C: Coef>(ring: &Ring, map: HashMap<FlatKey, C>) -> HashMap<FlatKey, C> {
    map.into_iter().filter_map(|(k, v)| v.reduce(ring).map(|v| (k, v))).collect()
}

fn coassociativity_witness(co: &Cooperad) -> Option<String> {
    let integral = co.cocomp.iter().flatten().all(|t| t.iter().all(|(_, c)| c.to_i64().is_some()));
    if integral {
        coassociativity_with::<i128>(co)
    } else {
        coassociativity_with::<Scalar>(co)
    }
}

fn coassociativity_with<C: Coef>(co: &Cooperad) -> Option<String> {
    let ring = &co.ring;
    let rmax = co.max_arity;
    let tables: Vec<Vec<Vec<(&TreeKey, C)>>> = co
        .cocomp
        .iter()
        .map(|table| {
            table.iter().map(|trees| trees.iter().map(|(t, c)| (t, C::lift(c).expect("liftable"))).collect()).collect()
        })
        .collect();
    // cocomposition terms of each element with monotone blocks, for the outer-first side
    let monotone: Vec<Vec<Vec<(&TreeKey, C)>>> = tables
        .iter()
        .map(|table| {
            table
                .iter()
                .map(|trees| trees.iter().filter(|(t, _)| t.blocks.windows(2).all(|w| w[0] <= w[1])).cloned().collect())
                .collect()
        })
        .collect();
    for (r, table) in tables.iter().enumerate() {
        for (c, trees) in table.iter().enumerate() {
            // both sides are equivariant, so orbit representatives suffice
            if !co.components[r].is_rep(c) {
                continue;
            }
            let mut left: HashMap<FlatKey, C> = HashMap::new();
            let mut right: HashMap<FlatKey, C> = HashMap::new();
            // (Δ ∘ id) ∘ Δ: split the outer vertex again, one labelling of the middle level
            for (t, coef) in trees {
                let k = t.k();
                let q_ar = t.slot_arities();
                for (t2, coef2) in &monotone[k][t.outer] {
                    let j = t2.k();
                    let mid_ar = t2.slot_arities();
                    // monotone blocks: the middle groups are consecutive runs of outer slots
                    let mut start = 0;
                    let mut within = true;
                    for &a in &mid_ar {
                        if q_ar[start..start + a].iter().sum::<usize>() > rmax {
                            within = false;
                            break;
                        }
                        start += a;
                    }
                    if !within {
                        continue;
                    }
                    let mut key = Vec::with_capacity(2 + 2 * j + k + r);
                    key.push(t2.outer as u32);
                    key.push(j as u32);
                    key.extend(t2.inner.iter().map(|&m| m as u32));
                    key.extend(mid_ar.iter().map(|&a| a as u32));
                    key.extend(t.inner.iter().map(|&q| q as u32));
                    key.extend(t.blocks.iter().map(|&i| i as u32));
                    add_flat(ring, &mut left, key, &coef.times(ring, coef2), false);
                }
            }
            // (id ∘ Δ) ∘ Δ: split every inner vertex
            for (t, coef) in trees {
                let k = t.k();
                let ar = t.slot_arities();
                let inputs = t.slot_inputs();
                let mut partial: Vec<(Vec<&TreeKey>, usize, C)> = vec![(Vec::new(), 0, coef.clone())];
                for i in 0..k {
                    let mut next = Vec::new();
                    for (acc, used, val) in &partial {
                        for (ti, ci) in &tables[ar[i]][t.inner[i]] {
                            if used + ti.k() > rmax {
                                continue;
                            }
                            let mut acc = acc.clone();
                            acc.push(*ti);
                            next.push((acc, used + ti.k(), val.times(ring, ci)));
                        }
                    }
                    partial = next;
                }
                for (subs, _, val) in partial {
                    // degrees in the order P, (m_1, q_1*), (m_2, q_2*), … ; the m's move left
                    let mut odd = false;
                    let mut leaves_deg_parity = 0i64;
                    for s in &subs {
                        let dm = co.degree(s.k(), s.outer);
                        if dm % 2 != 0 && leaves_deg_parity % 2 != 0 {
                            odd = !odd;
                        }
                        leaves_deg_parity += co.tree_degrees(s).iter().sum::<i64>();
                    }
                    let j = subs.len();
                    let mut key = Vec::with_capacity(2 + 2 * j + r * 2);
                    key.push(t.outer as u32);
                    key.push(j as u32);
                    key.extend(subs.iter().map(|s| s.outer as u32));
                    key.extend(subs.iter().map(|s| s.k() as u32));
                    for s in &subs {
                        key.extend(s.inner.iter().map(|&q| q as u32));
                    }
                    let mut composite_inputs = vec![0u32; r];
                    let mut off = 0;
                    for (i, s) in subs.iter().enumerate() {
                        for (a, &x) in inputs[i].iter().enumerate() {
                            composite_inputs[x] = (off + s.blocks[a]) as u32;
                        }
                        off += s.k();
                    }
                    key.extend(composite_inputs);
                    add_flat(ring, &mut right, key, &val, odd);
                }
            }
            let (left, right) = (reduce_map(ring, left), reduce_map(ring, right));
            if left != right {
                let key = left
                    .iter()
                    .find(|(k, v)| right.get(*k) != Some(*v))
                    .map(|(k, _)| k)
                    .or_else(|| right.keys().find(|k| !left.contains_key(*k)))
                    .expect("maps differ");
                let (mids, leaves) = describe_key(key);
                return Some(format!(
                    "arity {r}, element {}: shape with mid arities {mids:?}, leaf arities {leaves:?}",
                    co.components[r].name(c)
                ));
            }
        }
    }
    None
}

/// Per-arity associative products `μ_r` with units `η_r`.
#[derive(Clone, Debug)]
pub struct HopfStructure {
    /// `products[r][(a, b)] = μ_r(a, b)`; missing pairs multiply to zero.
    pub products: Vec<HashMap<(usize, usize), Lin<usize>>>,
    pub units: Vec<Lin<usize>>,
    validation: OnceLock<Option<String>>,
}

impl HopfStructure {
    pub fn new(products: Vec<HashMap<(usize, usize), Lin<usize>>>, units: Vec<Lin<usize>>) -> Self {
        HopfStructure { products, units, validation: OnceLock::new() }
    }

    /// Run [`validate_hopf`] once against `co` and fail on any violated law.
    pub fn ensure_valid(&self, co: &Cooperad) -> Result<()> {
        co.ensure_valid()?;
        let failure = self.validation.get_or_init(|| validate_hopf(co, self).into_result().err().map(|e| e.to_string()));
        match failure {
            None => Ok(()),
            Some(msg) => Err(Error::Validation(msg.clone())),
        }
    }

    pub fn mul_basis(&self, r: usize, a: usize, b: usize) -> Option<&Lin<usize>> {
        self.products[r].get(&(a, b))
    }

    pub fn mul(&self, ring: &Ring, r: usize, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (&a, ca) in x.iter() {
            for (&b, cb) in y.iter() {
                if let Some(p) = self.products[r].get(&(a, b)) {
                    out.add_scaled(ring, p, &ring.mul(ca, cb));
                }
            }
        }
        out
    }

    /// Nonzero products grouped by left factor.
    fn right_lists(&self, r: usize, dim: usize) -> Vec<Vec<(usize, &Lin<usize>)>> {
        let mut out = vec![Vec::new(); dim];
        let mut keys: Vec<_> = self.products[r].keys().copied().collect();
        keys.sort_unstable();
        for (a, b) in keys {
            out[a].push((b, &self.products[r][&(a, b)]));
        }
        out
    }
}

pub fn validate_hopf(co: &Cooperad, h: &HopfStructure) -> Report {
    let mut rep = Report::new(format!("Hopf structure on {}", co.name));
    let ring = &co.ring;
    if h.products.len() != co.components.len() || h.units.len() != co.components.len() {
        rep.fail("shape", "products/units do not cover every arity");
        return rep;
    }
    rep.record("unit degree", unit_degree_witness(co, h));
    rep.record("associativity", associativity_witness(co, h));
    rep.record("unit laws", unit_law_witness(co, h));
    rep.record("equivariance", hopf_equivariance_witness(co, h));
    rep.record("compatibility with cocomposition", compatibility_witness(co, h));
    let _ = ring;
    rep
}

fn unit_degree_witness(co: &Cooperad, h: &HopfStructure) -> Option<String> {
    for (r, u) in h.units.iter().enumerate() {
        if u.is_zero() && co.components[r].dim() > 0 {
            return Some(format!("η_{r} is missing"));
        }
        if let Some(&b) = u.keys().find(|&&b| co.degree(r, b) != 0) {
            return Some(format!("η_{r} has a term {} of nonzero degree", co.components[r].name(b)));
        }
    }
    None
}

fn associativity_witness(co: &Cooperad, h: &HopfStructure) -> Option<String> {
    let ring = &co.ring;
    for r in 0..co.components.len() {
        let dim = co.components[r].dim();
        let right = h.right_lists(r, dim);
        let mut left_of: Vec<Vec<(usize, &Lin<usize>)>> = vec![Vec::new(); dim];
        for (a, list) in right.iter().enumerate() {
            for &(b, p) in list {
                left_of[b].push((a, p));
            }
        }
        let mut lhs: Lin<(usize, usize, usize, usize)> = Lin::zero();
        for a in 0..dim {
            for &(b, ab) in &right[a] {
                for (&x, cx) in ab.iter() {
                    for &(c, xc) in &right[x] {
                        for (&o, co_) in xc.iter() {
                            lhs.add_term(ring, (a, b, c, o), ring.mul(cx, co_));
                        }
                    }
                }
            }
        }
        let mut rhs: Lin<(usize, usize, usize, usize)> = Lin::zero();
        for b in 0..dim {
            for &(c, bc) in &right[b] {
                for (&y, cy) in bc.iter() {
                    for &(a, ay) in &left_of[y] {
                        for (&o, co_) in ay.iter() {
                            rhs.add_term(ring, (a, b, c, o), ring.mul(cy, co_));
                        }
                    }
                }
            }
        }
        if lhs != rhs {
            let diff = lhs.sub(ring, &rhs);
            let (&(a, b, c, _), _) = diff.iter().next().unwrap();
            let comp = &co.components[r];
            return Some(format!("({}·{})·{} in arity {r}", comp.name(a), comp.name(b), comp.name(c)));
        }
    }
    None
}

fn unit_law_witness(co: &Cooperad, h: &HopfStructure) -> Option<String> {
    let ring = &co.ring;
    for r in 0..co.components.len() {
        let comp = &co.components[r];
        for b in 0..comp.dim() {
            let x = Lin::basis(ring, b);
            if h.mul(ring, r, &h.units[r], &x) != x || h.mul(ring, r, &x, &h.units[r]) != x {
                return Some(format!("η_{r} is not a unit for {}", comp.name(b)));
            }
        }
    }
    None
}

fn hopf_equivariance_witness(co: &Cooperad, h: &HopfStructure) -> Option<String> {
    let ring = &co.ring;
    for r in 0..co.components.len() {
        let comp = &co.components[r];
        for sigma in comp.perms().iter().filter(|s| !s.is_identity()) {
            let rank = sigma.rank();
            let act = |x: &Lin<usize>| x.map_keys(ring, |&b| Some((comp.act_basis(rank, b), false)));
            if act(&h.units[r]) != h.units[r] {
                return Some(format!("η_{r} is not invariant under {sigma}"));
            }
            for (&(a, b), p) in &h.products[r] {
                let moved = h.mul(ring, r, &Lin::basis(ring, comp.act_basis(rank, a)), &Lin::basis(ring, comp.act_basis(rank, b)));
                if moved != act(p) {
                    return Some(format!("μ_{r}({}, {}) under {sigma}", comp.name(a), comp.name(b)));
                }
            }
        }
    }
    None
}

/// Product of two cocomposition terms of the same shape, componentwise.
fn tree_product(
    co: &Cooperad,
    h: &HopfStructure,
    t: &TreeKey,
    s: &TreeKey,
    coef: &Scalar,
    out: &mut Lin<TreeKey>,
) {
    let ring = &co.ring;
    let k = t.k();
    let ar = t.slot_arities();
    // (p ⊗ q_1…q_k) ⊗ (p' ⊗ q'_1…q'_k) → (p⊗p') ⊗ (q_1⊗q'_1) ⊗ …
    let mut degs = vec![co.degree(k, t.outer)];
    degs.extend(co.tree_degrees(t));
    degs.push(co.degree(k, s.outer));
    degs.extend(co.tree_degrees(s));
    let mut order = vec![0, k + 1];
    for i in 0..k {
        order.push(1 + i);
        order.push(k + 2 + i);
    }
    let odd = reorder_sign(&degs, &order);
    let outer = h.mul(ring, k, &Lin::basis(ring, t.outer), &Lin::basis(ring, s.outer));
    let mut partial: Vec<(Vec<usize>, Scalar)> =
        outer.iter().map(|(&o, c)| (vec![o], ring.mul(c, coef))).collect();
    for i in 0..k {
        let prod = h.mul(ring, ar[i], &Lin::basis(ring, t.inner[i]), &Lin::basis(ring, s.inner[i]));
        let mut next = Vec::new();
        for (acc, val) in &partial {
            for (&q, c) in prod.iter() {
                let mut acc = acc.clone();
                acc.push(q);
                next.push((acc, ring.mul(val, c)));
            }
        }
        partial = next;
    }
    for (elems, val) in partial {
        let key = TreeKey { outer: elems[0], inner: elems[1..].to_vec(), blocks: t.blocks.clone() };
        out.add_term(ring, key, if odd { ring.neg(&val) } else { val });
    }
}

/// Cocomposition terms of one basis element grouped by tree shape.
type TermsByShape<'a> = BTreeMap<(usize, Vec<usize>), Vec<(&'a TreeKey, &'a Scalar)>>;

fn compatibility_witness(co: &Cooperad, h: &HopfStructure) -> Option<String> {
    let ring = &co.ring;
    for r in 0..co.components.len() {
        let comp = &co.components[r];
        let dim = comp.dim();
        let by_shape: Vec<TermsByShape> = (0..dim)
            .map(|c| {
                let mut m: BTreeMap<_, Vec<_>> = BTreeMap::new();
                for (t, coef) in co.cocomp[r][c].iter() {
                    m.entry((t.k(), t.blocks.clone())).or_default().push((t, coef));
                }
                m
            })
            .collect();
        // products and cocompositions are equivariant: left factors in orbit representatives suffice
        for ((a, b), prod) in &h.products[r] {
            if !comp.is_rep(*a) {
                continue;
            }
            let mut lhs = Lin::zero();
            for (&x, cx) in prod.iter() {
                lhs.add_scaled(ring, &co.cocomp[r][x], cx);
            }
            let mut rhs = Lin::zero();
            for (shape, ts) in &by_shape[*a] {
                if let Some(ss) = by_shape[*b].get(shape) {
                    for (t, ct) in ts {
                        for (s, cs) in ss {
                            tree_product(co, h, t, s, &ring.mul(ct, cs), &mut rhs);
                        }
                    }
                }
            }
            if lhs != rhs {
                return Some(format!("Δ(μ_{r}({}, {}))", comp.name(*a), comp.name(*b)));
            }
        }
        // pairs with zero product must also have vanishing product of coproducts
        for a in (0..dim).filter(|&a| comp.is_rep(a)) {
            for b in 0..dim {
                // products leaving the degree window vanish by truncation
                if h.products[r].contains_key(&(a, b)) || comp.degree(a) + comp.degree(b) < co.degree_window.0 {
                    continue;
                }
                let mut rhs = Lin::zero();
                for (shape, ts) in &by_shape[a] {
                    if let Some(ss) = by_shape[b].get(shape) {
                        for (t, ct) in ts {
                            for (s, cs) in ss {
                                tree_product(co, h, t, s, &ring.mul(ct, cs), &mut rhs);
                            }
                        }
                    }
                }
                if !rhs.is_zero() {
                    return Some(format!("Δ(μ_{r}({}, {})) should vanish", comp.name(a), comp.name(b)));
                }
            }
        }
    }
    None
}

/// A degree-0 morphism of truncated cooperads, given on basis elements per arity.
#[derive(Clone, Debug)]
pub struct CooperadMorphism {
    pub maps: Vec<Vec<Lin<usize>>>,
}

impl CooperadMorphism {
    pub fn identity(co: &Cooperad) -> Self {
        CooperadMorphism {
            maps: co.components.iter().map(|c| (0..c.dim()).map(|b| Lin::basis(&co.ring, b)).collect()).collect(),
        }
    }

    pub fn apply(&self, ring: &Ring, r: usize, x: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (&b, c) in x.iter() {
            out.add_scaled(ring, &self.maps[r][b], c);
        }
        out
    }

    /// Apply the morphism to every vertex of a cocomposition term.
    fn apply_tree(&self, ring: &Ring, src: &Cooperad, t: &TreeKey, coef: &Scalar, out: &mut Lin<TreeKey>) {
        let k = t.k();
        let ar = t.slot_arities();
        let mut partial: Vec<(Vec<usize>, Scalar)> =
            self.maps[k][t.outer].iter().map(|(&o, c)| (vec![o], ring.mul(c, coef))).collect();
        for i in 0..k {
            let mut next = Vec::new();
            for (acc, val) in &partial {
                for (&q, c) in self.maps[ar[i]][t.inner[i]].iter() {
                    let mut acc = acc.clone();
                    acc.push(q);
                    next.push((acc, ring.mul(val, c)));
                }
            }
            partial = next;
        }
        let _ = src;
        for (e, val) in partial {
            out.add_term(ring, TreeKey { outer: e[0], inner: e[1..].to_vec(), blocks: t.blocks.clone() }, val);
        }
    }
}

pub fn validate_morphism(phi: &CooperadMorphism, src: &Cooperad, tgt: &Cooperad) -> Report {
    let mut rep = Report::new(format!("morphism {} -> {}", src.name, tgt.name));
    let ring = &tgt.ring;
    let arities = src.components.len().min(tgt.components.len());
    if phi.maps.len() < arities || (0..arities).any(|r| phi.maps[r].len() != src.components[r].dim()) {
        rep.fail("shape", "map does not cover the source basis");
        return rep;
    }
    let degree = (0..arities).find_map(|r| {
        phi.maps[r].iter().enumerate().find_map(|(b, img)| {
            img.keys()
                .find(|&&y| tgt.degree(r, y) != src.degree(r, b))
                .map(|&y| format!("{} -> {} changes degree", src.components[r].name(b), tgt.components[r].name(y)))
        })
    });
    rep.record("degree 0", degree);
    let counit = if phi.maps[0][UNITARY] != Lin::basis(ring, UNITARY) || phi.maps[1][COUNIT] != Lin::basis(ring, COUNIT) {
        Some("unit or counit not preserved".to_string())
    } else {
        None
    };
    rep.record("counit", counit);
    let mut equi = None;
    'outer: for r in 0..arities {
        let (s, t) = (&src.components[r], &tgt.components[r]);
        for sigma in s.perms().iter().filter(|p| !p.is_identity()) {
            let rank = sigma.rank();
            for b in 0..s.dim() {
                let lhs = &phi.maps[r][s.act_basis(rank, b)];
                let rhs = phi.maps[r][b].map_keys(ring, |&y| Some((t.act_basis(rank, y), false)));
                if *lhs != rhs {
                    equi = Some(format!("{sigma} on {}", s.name(b)));
                    break 'outer;
                }
            }
        }
    }
    rep.record("equivariance", equi);
    let mut comm = None;
    'cc: for r in 0..arities {
        for b in 0..src.components[r].dim() {
            let mut lhs = Lin::zero();
            for (&y, c) in phi.maps[r][b].iter() {
                lhs.add_scaled(ring, &tgt.cocomp[r][y], c);
            }
            let mut rhs = Lin::zero();
            for (t, c) in src.cocomp[r][b].iter() {
                phi.apply_tree(ring, src, t, c, &mut rhs);
            }
            let common = tgt.max_arity.min(src.max_arity);
            let lhs = lhs.filter(|t| t.k() <= common);
            let rhs = rhs.filter(|t| t.k() <= common);
            if lhs != rhs {
                comm = Some(format!("cocomposition of {} in arity {r}", src.components[r].name(b)));
                break 'cc;
            }
        }
    }
    rep.record("commutes with cocomposition", comm);
    rep
}

/// The map from the unitary cocommutative cooperad sending its arity-`r` generator to `η_r`,
/// with the morphism law checked on every truncation shape.
pub fn cocom_unit_morphism(co: &Cooperad, h: &HopfStructure) -> Result<CooperadMorphism> {
    let ring = &co.ring;
    if h.units.len() != co.components.len() {
        return Err(Error::Shape("units missing".into()));
    }
    for r in 0..co.components.len() {
        let mut lhs = Lin::zero();
        for (&b, c) in h.units[r].iter() {
            lhs.add_scaled(ring, &co.cocomp[r][b], c);
        }
        // Δ of the cocommutative generator: every shape once, with coefficient one
        let mut rhs = Lin::zero();
        for k in 0..=co.max_arity {
            for blocks in all_functions(r, k) {
                let t = TreeKey { outer: 0, inner: vec![0; k], blocks };
                let ar = t.slot_arities();
                let mut partial: Vec<(Vec<usize>, Scalar)> =
                    h.units[k].iter().map(|(&o, c)| (vec![o], c.clone())).collect();
                for &a in &ar {
                    let mut next = Vec::new();
                    for (acc, val) in &partial {
                        for (&q, c) in h.units[a].iter() {
                            let mut acc = acc.clone();
                            acc.push(q);
                            next.push((acc, ring.mul(val, c)));
                        }
                    }
                    partial = next;
                }
                for (e, val) in partial {
                    rhs.add_term(ring, TreeKey { outer: e[0], inner: e[1..].to_vec(), blocks: t.blocks.clone() }, val);
                }
            }
        }
        if lhs != rhs {
            return Err(Error::Validation(format!("incompatible units: Δ(η_{r}) is not the η-pattern")));
        }
    }
    Ok(CooperadMorphism { maps: h.units.iter().map(|u| vec![u.clone()]).collect() })
}

/// All maps `{0..n} -> {0..k}` as value lists.
pub fn all_functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for f in &out {
            for v in 0..k {
                let mut f = f.clone();
                f.push(v);
                next.push(f);
            }
        }
        out = next;
    }
    out
}
