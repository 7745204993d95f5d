//! Free graded modules with weighted bases, sparse elements, Koszul signs and linear maps.
//!
//! Grading is homological (differentials lower degree by one). Each basis element carries
//! a filtration weight `w >= 1`; `F^i V` is the span of basis elements of weight `>= i`.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{Ring, Scalar};
use crate::sym_action::Permutation;

/// A sparse linear combination keyed by `K`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(ring: &Ring, key: K, coef: Scalar) -> Self {
        let mut l = Self::zero();
        l.add_term(ring, key, coef);
        l
    }

    pub fn basis(ring: &Ring, key: K) -> Self {
        Self::single(ring, key, ring.one())
    }

    pub fn add_term(&mut self, ring: &Ring, key: K, coef: Scalar) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            btree_map::Entry::Occupied(mut e) => {
                let s = ring.add(e.get(), &coef);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, ring: &Ring, other: &Lin<K>, scale: &Scalar) {
        if scale.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            self.add_term(ring, k.clone(), ring.mul(c, scale));
        }
    }

    pub fn add(&self, ring: &Ring, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.add_scaled(ring, other, &ring.one());
        out
    }

    pub fn sub(&self, ring: &Ring, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.add_scaled(ring, other, &ring.int(-1));
        out
    }

    pub fn scale(&self, ring: &Ring, s: &Scalar) -> Lin<K> {
        let mut out = Lin::zero();
        out.add_scaled(ring, self, s);
        out
    }

    pub fn neg(&self, ring: &Ring) -> Lin<K> {
        self.scale(ring, &ring.int(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&Scalar> {
        self.terms.get(key)
    }

    pub fn coef(&self, ring: &Ring, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Re-key every term, summing collisions. The closure may also return a sign.
    pub fn map_keys<J: Ord + Clone>(
        &self,
        ring: &Ring,
        mut f: impl FnMut(&K) -> Option<(J, bool)>,
    ) -> Lin<J> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            if let Some((j, odd)) = f(k) {
                let c = if odd { ring.neg(c) } else { c.clone() };
                out.add_term(ring, j, c);
            }
        }
        out
    }

    /// Keep the terms satisfying `pred`.
    pub fn filter(&self, mut pred: impl FnMut(&K) -> bool) -> Lin<K> {
        Lin {
            terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Lin<K> {
    /// Collects without a ring: callers must not pass repeated keys or zeros.
    fn from_iter<T: IntoIterator<Item = (K, Scalar)>>(iter: T) -> Self {
        Lin { terms: iter.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

/// Parity of the Koszul sign picked up when the sequence `degrees` is rearranged into
/// `(degrees[order[0]], degrees[order[1]], ...)`.
pub fn reorder_sign(degrees: &[i64], order: &[usize]) -> bool {
    let mut odd = false;
    for a in 0..order.len() {
        if degrees[order[a]] & 1 == 0 {
            continue;
        }
        for b in a + 1..order.len() {
            if order[a] > order[b] && degrees[order[b]] & 1 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Koszul sign of moving the entry at position `i` to position `perm(i)`.
pub fn koszul_sign(ring: &Ring, perm: &Permutation, degrees: &[i64]) -> Result<Scalar> {
    if perm.arity() != degrees.len() {
        return Err(Error::Shape(format!(
            "permutation of arity {} against {} degrees",
            perm.arity(),
            degrees.len()
        )));
    }
    let order = perm.inverse().images().to_vec();
    Ok(ring.sign(reorder_sign(degrees, &order)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
    pub weight: u32,
}

/// A finitely generated free graded module with a weighted basis.
#[derive(Clone, Debug)]
pub struct GradedModule {
    ring: Ring,
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}

/// An element of a [`GradedModule`], keyed by basis index.
pub type Element = Lin<usize>;

impl GradedModule {
    pub fn new(ring: Ring, basis: Vec<BasisElement>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if b.weight == 0 {
                return Err(Error::Shape(format!("basis element {} has weight 0", b.name)));
            }
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::Shape(format!("duplicate basis name {}", b.name)));
            }
        }
        Ok(GradedModule { ring, basis, index })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    /// Basis indices of the given degree.
    pub fn degree_part(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].degree == d).collect()
    }

    /// Smallest weight among the terms, `None` for zero.
    pub fn min_weight(&self, x: &Element) -> Option<u32> {
        x.keys().map(|&i| self.weight(i)).min()
    }

    pub fn is_homogeneous(&self, x: &Element, degree: i64) -> bool {
        x.keys().all(|&i| self.degree(i) == degree)
    }
}

/// A degree-`d` linear map between free graded modules, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub degree: i64,
    pub source_dim: usize,
    pub target_dim: usize,
    pub columns: Vec<Element>,
}

impl LinearMap {
    pub fn zero(source: &GradedModule, target: &GradedModule, degree: i64) -> Self {
        LinearMap {
            degree,
            source_dim: source.dim(),
            target_dim: target.dim(),
            columns: vec![Element::zero(); source.dim()],
        }
    }

    pub fn identity(m: &GradedModule) -> Self {
        LinearMap {
            degree: 0,
            source_dim: m.dim(),
            target_dim: m.dim(),
            columns: (0..m.dim()).map(|i| Element::basis(m.ring(), i)).collect(),
        }
    }

    /// Check that every nonzero entry respects the map's degree.
    pub fn check_degrees(&self, source: &GradedModule, target: &GradedModule) -> Result<()> {
        for (x, col) in self.columns.iter().enumerate() {
            for &y in col.keys() {
                if target.degree(y) != source.degree(x) + self.degree {
                    return Err(Error::Shape(format!(
                        "entry {} -> {} violates degree {}",
                        source.name(x),
                        target.name(y),
                        self.degree
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, ring: &Ring, x: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (&i, c) in x.iter() {
            let col = self
                .columns
                .get(i)
                .ok_or_else(|| Error::Shape(format!("index {i} outside source of dim {}", self.source_dim)))?;
            out.add_scaled(ring, col, c);
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, ring: &Ring, other: &LinearMap) -> Result<LinearMap> {
        if other.target_dim != self.source_dim {
            return Err(Error::Shape("composition of incompatible maps".into()));
        }
        let columns = other.columns.iter().map(|c| self.apply(ring, c)).collect::<Result<_>>()?;
        Ok(LinearMap {
            degree: self.degree + other.degree,
            source_dim: other.source_dim,
            target_dim: self.target_dim,
            columns,
        })
    }

    pub fn add(&self, ring: &Ring, other: &LinearMap) -> Result<LinearMap> {
        if (self.source_dim, self.target_dim, self.degree)
            != (other.source_dim, other.target_dim, other.degree)
        {
            return Err(Error::Shape("sum of incompatible maps".into()));
        }
        Ok(LinearMap {
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.add(ring, b)).collect(),
            ..self.clone()
        })
    }

    pub fn scale(&self, ring: &Ring, s: &Scalar) -> LinearMap {
        LinearMap { columns: self.columns.iter().map(|c| c.scale(ring, s)).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }
}

/// A tensor product module together with the factor tuple behind each basis element.
#[derive(Clone, Debug)]
pub struct TensorModule {
    pub module: GradedModule,
    pub tuples: Vec<Vec<usize>>,
}

/// Tensor product of free modules; tuples of total weight above `weight_bound` are dropped.
pub fn tensor_module(factors: &[&GradedModule], weight_bound: Option<u32>) -> Result<TensorModule> {
    let ring = match factors.first() {
        Some(f) => f.ring().clone(),
        None => return Err(Error::Shape("empty tensor product".into())),
    };
    if factors.iter().any(|f| *f.ring() != ring) {
        return Err(Error::Shape("tensor factors over different rings".into()));
    }
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for f in factors {
        let mut next = Vec::new();
        for t in &tuples {
            for i in 0..f.dim() {
                let mut t = t.clone();
                t.push(i);
                next.push(t);
            }
        }
        tuples = next;
    }
    let mut basis = Vec::new();
    let mut kept = Vec::new();
    for t in tuples {
        let weight: u32 = t.iter().zip(factors).map(|(&i, f)| f.weight(i)).sum();
        if weight_bound.is_some_and(|w| weight > w) {
            continue;
        }
        let degree = t.iter().zip(factors).map(|(&i, f)| f.degree(i)).sum();
        let name = t.iter().zip(factors).map(|(&i, f)| f.name(i)).collect::<Vec<_>>().join("⊗");
        basis.push(BasisElement { name, degree, weight });
        kept.push(t);
    }
    Ok(TensorModule { module: GradedModule::new(ring, basis)?, tuples: kept })
}
