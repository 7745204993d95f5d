//! Example cooperads: cochains on the associative, commutative and Barratt-Eccles operads
//! (with the complexity filtration `BE_1 ⊂ BE_2 ⊂ … ⊂ BE_∞`), the restriction morphisms
//! `E_∞ → E_n`, and table reduction from Barratt-Eccles simplices to surjections.
//!
//! Operations of `Ass(r) = Σ_r` are words: the permutation `w` is the word
//! `w(0) w(1) … w(r-1)` and `σ·w = σ ∘ w`. Simplices of `BE(r)` are tuples of such words.

use std::collections::HashMap;
use std::fmt;

use crate::cooperad::{all_functions, Cooperad, CooperadMorphism, HopfStructure, TreeKey};
use crate::error::{Error, Result};
use crate::graded::Lin;
use crate::scalars::Ring;
use crate::sym_action::{OpBasis, OrbitModule, Permutation};

const DEFAULT_CAP: usize = 60_000;

/// Default maximal number of simplices per arity, overridable with `OPMC_RESOURCE_CAP`.
pub fn resource_cap() -> usize {
    std::env::var("OPMC_RESOURCE_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// Which tuples of permutations are simplices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtration {
    /// Vertices only: the discrete operad `Σ_*`.
    Discrete,
    /// `BE_n`: complexity at most `n - 1`.
    Complexity(usize),
    /// `BE_∞`.
    Full,
}

/// A finite piece of a unitary simplicial operad whose simplices are tuples of permutations
/// (a suboperad of `BE`), truncated at arity and dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialOperadTruncation {
    pub max_arity: usize,
    pub max_dim: usize,
    pub arity0_points: usize,
    pub filtration: Filtration,
    /// Maximal number of simplices per arity.
    pub cap: usize,
}

impl SimplicialOperadTruncation {
    pub fn discrete(max_arity: usize) -> Self {
        SimplicialOperadTruncation {
            max_arity,
            max_dim: 0,
            arity0_points: 1,
            filtration: Filtration::Discrete,
            cap: resource_cap(),
        }
    }

    /// `BE_n`, with `n = None` for `BE_∞`.
    pub fn barratt_eccles(n: Option<usize>, max_arity: usize, max_dim: usize) -> Self {
        let filtration = match n {
            None => Filtration::Full,
            Some(n) => Filtration::Complexity(n),
        };
        SimplicialOperadTruncation { max_arity, max_dim, arity0_points: 1, filtration, cap: resource_cap() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arity0_points != 1 {
            return Err(Error::Precondition(format!(
                "unitary operad needs a single point in arity 0, got {}",
                self.arity0_points
            )));
        }
        if self.max_arity < 1 {
            return Err(Error::Shape("maximal arity must be at least 1".into()));
        }
        if let Filtration::Complexity(0) = self.filtration {
            return Err(Error::Shape("E_n needs n >= 1".into()));
        }
        Ok(())
    }

    /// Whether a nondegenerate tuple (given by permutation ranks in arity `r`) is a simplex.
    pub fn contains(&self, table: &PermTable, tuple: &[usize]) -> bool {
        if tuple.len() > self.max_dim + 1 {
            return false;
        }
        match self.filtration {
            Filtration::Discrete => tuple.len() == 1,
            Filtration::Full => true,
            Filtration::Complexity(n) => table.complexity(tuple) < n,
        }
    }
}

/// Permutations of one arity with their order data.
#[derive(Clone, Debug)]
pub struct PermTable {
    pub arity: usize,
    pub perms: Vec<Permutation>,
    /// Bit `p` set when the first letter of pair `p` comes before the second.
    order_bits: Vec<u64>,
    pairs: usize,
}

impl PermTable {
    pub fn new(arity: usize) -> Self {
        let perms = Permutation::all(arity);
        let mut pairs = Vec::new();
        for i in 0..arity {
            for j in i + 1..arity {
                pairs.push((i, j));
            }
        }
        let order_bits = perms
            .iter()
            .map(|w| {
                let pos = w.inverse();
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, j))| pos.apply(i) < pos.apply(j))
                    .fold(0u64, |acc, (p, _)| acc | (1 << p))
            })
            .collect();
        PermTable { arity, perms, order_bits, pairs: pairs.len() }
    }

    /// Largest number of order changes of a pair of letters along the tuple.
    pub fn complexity(&self, tuple: &[usize]) -> usize {
        let mut changes = vec![0usize; self.pairs];
        for w in tuple.windows(2) {
            let diff = self.order_bits[w[0]] ^ self.order_bits[w[1]];
            for (p, c) in changes.iter_mut().enumerate() {
                if diff >> p & 1 == 1 {
                    *c += 1;
                }
            }
        }
        changes.into_iter().max().unwrap_or(0)
    }

    pub fn word(&self, rank: usize) -> &[usize] {
        self.perms[rank].images()
    }
}

/// Compose words along a tree: the outer word lists slots; each slot's word lists its
/// local inputs, which are the slot's composite inputs in increasing order.
pub fn compose_words(outer: &[usize], inner: &[&[usize]], slot_inputs: &[Vec<usize>]) -> Vec<usize> {
    let mut out = Vec::new();
    for &slot in outer {
        for &a in inner[slot] {
            out.push(slot_inputs[slot][a]);
        }
    }
    out
}

fn word_name(w: &[usize]) -> String {
    let sep = if w.len() > 9 { "," } else { "" };
    w.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(sep)
}

/// One arity of a simplicial cochain cooperad: simplices indexed like the cochain basis.
#[derive(Clone, Debug)]
pub struct ArityData {
    pub table: PermTable,
    /// Simplex of each basis element, as permutation ranks.
    pub simplices: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

impl ArityData {
    pub fn dim_of(&self, b: usize) -> usize {
        self.simplices[b].len() - 1
    }

    pub fn simplex_name(&self, s: &[usize]) -> String {
        if self.table.arity == 0 {
            return "𝟙".into();
        }
        let words: Vec<String> = s.iter().map(|&w| word_name(self.table.word(w))).collect();
        format!("({})", words.join("|"))
    }
}

fn enumerate_arity(trunc: &SimplicialOperadTruncation, r: usize) -> Result<ArityData> {
    let table = PermTable::new(r);
    let n = table.perms.len();
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![vec![0usize]];
    let cap = trunc.cap;
    while let Some(t) = stack.pop() {
        reps.push(t.clone());
        if reps.len() * n > cap {
            return Err(Error::ResourceLimit(format!(
                "more than {cap} simplices in arity {r}; raise OPMC_RESOURCE_CAP or lower the truncation"
            )));
        }
        if t.len() <= trunc.max_dim {
            for w in (0..n).rev() {
                if w != *t.last().unwrap() {
                    let mut next = t.clone();
                    next.push(w);
                    if trunc.contains(&table, &next) {
                        stack.push(next);
                    }
                }
            }
        }
    }
    reps.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let mut simplices = Vec::with_capacity(reps.len() * n);
    for rep in &reps {
        for s in &table.perms {
            simplices.push(rep.iter().map(|&w| s.compose(&table.perms[w]).rank()).collect::<Vec<_>>());
        }
    }
    let index = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok(ArityData { table, simplices, index })
}

/// Normalized cochains of a simplicial operad truncation, with the Alexander-Whitney cup
/// product and the simplices behind each basis element.
#[derive(Clone, Debug)]
pub struct CochainCooperad {
    pub truncation: SimplicialOperadTruncation,
    pub cooperad: Cooperad,
    pub hopf: HopfStructure,
    pub arities: Vec<ArityData>,
}

impl CochainCooperad {
    pub fn basis_of(&self, r: usize, simplex: &[usize]) -> Option<usize> {
        self.arities.get(r)?.index.get(simplex).copied()
    }
}

/// Label sequences of length `Σ dims` with factor `i` appearing `dims[i]` times.
fn shuffles(dims: &[usize]) -> Vec<(Vec<usize>, bool)> {
    let total: usize = dims.iter().sum();
    let mut out = Vec::new();
    let mut left = dims.to_vec();
    let mut cur = Vec::with_capacity(total);
    fn rec(left: &mut [usize], cur: &mut Vec<usize>, total: usize, out: &mut Vec<(Vec<usize>, bool)>) {
        if cur.len() == total {
            let mut odd = false;
            for a in 0..cur.len() {
                for b in a + 1..cur.len() {
                    if cur[a] > cur[b] {
                        odd = !odd;
                    }
                }
            }
            out.push((cur.clone(), odd));
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i);
                rec(left, cur, total, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, total, &mut out);
    out
}

/// Eilenberg-Zilber composite of simplices along a tree shape: `(simplex ranks, odd sign)`.
fn ez_compose(
    arities: &[ArityData],
    r: usize,
    factors: &[&[usize]],
    factor_arities: &[usize],
    slot_inputs: &[Vec<usize>],
) -> Vec<(Vec<usize>, bool)> {
    let dims: Vec<usize> = factors.iter().map(|f| f.len() - 1).collect();
    let mut out = Vec::new();
    let target = &arities[r].table;
    for (labels, odd) in shuffles(&dims) {
        let mut pos = vec![0usize; factors.len()];
        let mut tuple = Vec::with_capacity(labels.len() + 1);
        let vertex = |pos: &[usize]| {
            let outer = arities[factor_arities[0]].table.word(factors[0][pos[0]]);
            let inner: Vec<&[usize]> = (1..factors.len())
                .map(|i| arities[factor_arities[i]].table.word(factors[i][pos[i]]))
                .collect();
            let w = compose_words(outer, &inner, slot_inputs);
            Permutation::new(w).expect("composite of words is a word").rank()
        };
        tuple.push(vertex(&pos));
        let mut degenerate = false;
        for &l in &labels {
            pos[l] += 1;
            let v = vertex(&pos);
            if v == *tuple.last().unwrap() {
                degenerate = true;
                break;
            }
            tuple.push(v);
        }
        if !degenerate {
            debug_assert!(target.arity == r);
            out.push((tuple, odd));
        }
    }
    out
}

/// Cochains on a simplicial operad truncation: cocomposition dual to the Eilenberg-Zilber
/// composition, Hopf product dual to Alexander-Whitney.
pub fn simplicial_cochain_cooperad(ring: &Ring, trunc: &SimplicialOperadTruncation) -> Result<CochainCooperad> {
    trunc.validate()?;
    let rmax = trunc.max_arity;
    let arities: Vec<ArityData> = (0..=rmax).map(|r| enumerate_arity(trunc, r)).collect::<Result<_>>()?;

    let mut components = Vec::new();
    for (r, data) in arities.iter().enumerate() {
        let basis: Vec<OpBasis> = data
            .simplices
            .iter()
            .map(|s| OpBasis { name: format!("{}^", data.simplex_name(s)), degree: -((s.len() - 1) as i64) })
            .collect();
        let n = data.table.perms.len();
        let action = data
            .table
            .perms
            .iter()
            .map(|sigma| {
                (0..basis.len())
                    .map(|b| {
                        let (i, t) = (b / n, b % n);
                        i * n + sigma.compose(&data.table.perms[t]).rank()
                    })
                    .collect()
            })
            .collect();
        let comp = OrbitModule::new(r, basis, action)?;
        if !comp.is_free() {
            return Err(Error::Freeness(format!("simplices of arity {r}")));
        }
        components.push(comp);
    }

    let mut cocomp: Vec<Vec<Lin<TreeKey>>> = arities.iter().map(|d| vec![Lin::zero(); d.simplices.len()]).collect();
    let by_dim: Vec<Vec<Vec<usize>>> = arities
        .iter()
        .map(|d| {
            let mut v = vec![Vec::new(); trunc.max_dim + 1];
            for (b, s) in d.simplices.iter().enumerate() {
                v[s.len() - 1].push(b);
            }
            v
        })
        .collect();

    for r in 0..=rmax {
        for k in 0..=rmax {
            if k == 0 && r > 0 {
                continue;
            }
            for blocks in all_functions(r, k) {
                let probe = TreeKey { outer: 0, inner: vec![0; k], blocks: blocks.clone() };
                let ar = probe.slot_arities();
                let slot_inputs = probe.slot_inputs();
                let mut factor_arities = vec![k];
                factor_arities.extend(&ar);
                // choose a basis element for every factor within the dimension budget
                let mut choices: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
                for &fa in &factor_arities {
                    let mut next = Vec::new();
                    for (chosen, used) in &choices {
                        for d in 0..=trunc.max_dim - used {
                            for &b in &by_dim[fa][d] {
                                let mut c = chosen.clone();
                                c.push(b);
                                next.push((c, used + d));
                            }
                        }
                    }
                    choices = next;
                }
                for (chosen, _) in choices {
                    let factors: Vec<&[usize]> = chosen
                        .iter()
                        .zip(&factor_arities)
                        .map(|(&b, &fa)| arities[fa].simplices[b].as_slice())
                        .collect();
                    let dims: Vec<usize> = factors.iter().map(|f| f.len() - 1).collect();
                    let mut dual_odd = false;
                    for i in 0..dims.len() {
                        for j in 0..i {
                            if dims[i] * dims[j] % 2 == 1 {
                                dual_odd = !dual_odd;
                            }
                        }
                    }
                    for (tuple, odd) in ez_compose(&arities, r, &factors, &factor_arities, &slot_inputs) {
                        let c = *arities[r].index.get(&tuple).ok_or_else(|| {
                            Error::Internal(format!(
                                "composite {} in arity {r} is outside the truncation",
                                arities[r].simplex_name(&tuple)
                            ))
                        })?;
                        let key = TreeKey { outer: chosen[0], inner: chosen[1..].to_vec(), blocks: blocks.clone() };
                        cocomp[r][c].add_term(ring, key, ring.sign(odd != dual_odd));
                    }
                }
            }
        }
    }

    let mut products = Vec::new();
    let mut units = Vec::new();
    for data in &arities {
        let mut prod = HashMap::new();
        let mut by_first: HashMap<usize, Vec<usize>> = HashMap::new();
        for (b, s) in data.simplices.iter().enumerate() {
            by_first.entry(s[0]).or_default().push(b);
        }
        for (a, s1) in data.simplices.iter().enumerate() {
            for &b in by_first.get(s1.last().unwrap()).into_iter().flatten() {
                let s2 = &data.simplices[b];
                let mut cat = s1.clone();
                cat.extend(&s2[1..]);
                if let Some(&c) = data.index.get(&cat) {
                    let odd = (s1.len() - 1) * (s2.len() - 1) % 2 == 1;
                    prod.insert((a, b), Lin::single(ring, c, ring.sign(odd)));
                }
            }
        }
        products.push(prod);
        units.push(
            data.simplices.iter().enumerate().filter(|(_, s)| s.len() == 1).map(|(b, _)| (b, ring.one())).collect(),
        );
    }

    let (lo, hi) = (-(trunc.max_dim as i64), 0);
    let name = match trunc.filtration {
        Filtration::Discrete => "N*(Σ)".to_string(),
        Filtration::Complexity(n) => format!("E_{n}"),
        Filtration::Full => "E_∞".to_string(),
    };
    let cooperad = Cooperad::new(name, ring.clone(), (lo, hi), components, cocomp)?;
    Ok(CochainCooperad { truncation: trunc.clone(), cooperad, hopf: HopfStructure::new(products, units), arities })
}

/// `E_n = N*(BE_n)`, with `n = None` for `E_∞`.
pub fn barratt_eccles(ring: &Ring, n: Option<usize>, max_arity: usize, max_dim: usize) -> Result<CochainCooperad> {
    simplicial_cochain_cooperad(ring, &SimplicialOperadTruncation::barratt_eccles(n, max_arity, max_dim))
}

/// Cochains on the associative operad: functions on `Σ_r` under pointwise product.
pub fn ass_cochains(ring: &Ring, max_arity: usize) -> Result<(Cooperad, HopfStructure)> {
    if max_arity < 2 {
        return Err(Error::Precondition("Ass cochains need R_max >= 2".into()));
    }
    let tables: Vec<PermTable> = (0..=max_arity).map(PermTable::new).collect();
    let mut components = Vec::new();
    for r in 0..=max_arity {
        let name = match r {
            0 => "𝟙".to_string(),
            1 => "id".to_string(),
            _ => format!("δ[{}]", word_name(tables[r].word(0))),
        };
        let mut comp = OrbitModule::free(r, vec![OpBasis { name, degree: 0 }])?;
        if r >= 2 {
            let basis = tables[r].perms.iter().map(|w| OpBasis { name: format!("δ[{}]", word_name(w.images())), degree: 0 }).collect();
            let action = tables[r].perms.iter().map(|s| tables[r].perms.iter().map(|w| s.compose(w).rank()).collect()).collect();
            comp = OrbitModule::new(r, basis, action)?;
        }
        components.push(comp);
    }
    let mut cocomp: Vec<Vec<Lin<TreeKey>>> = tables.iter().map(|t| vec![Lin::zero(); t.perms.len()]).collect();
    for r in 0..=max_arity {
        for k in 0..=max_arity {
            if k == 0 && r > 0 {
                continue;
            }
            for blocks in all_functions(r, k) {
                let probe = TreeKey { outer: 0, inner: vec![0; k], blocks: blocks.clone() };
                let ar = probe.slot_arities();
                let slot_inputs = probe.slot_inputs();
                let mut choices: Vec<Vec<usize>> = (0..tables[k].perms.len()).map(|p| vec![p]).collect();
                for &a in &ar {
                    choices = choices
                        .into_iter()
                        .flat_map(|c| {
                            (0..tables[a].perms.len()).map(move |q| {
                                let mut c = c.clone();
                                c.push(q);
                                c
                            })
                        })
                        .collect();
                }
                for c in choices {
                    let inner: Vec<&[usize]> = c[1..].iter().zip(&ar).map(|(&q, &a)| tables[a].word(q)).collect();
                    let w = compose_words(tables[k].word(c[0]), &inner, &slot_inputs);
                    let target = Permutation::new(w)?.rank();
                    let key = TreeKey { outer: c[0], inner: c[1..].to_vec(), blocks: blocks.clone() };
                    cocomp[r][target].add_term(ring, key, ring.one());
                }
            }
        }
    }
    let products = tables
        .iter()
        .map(|t| (0..t.perms.len()).map(|b| ((b, b), Lin::basis(ring, b))).collect())
        .collect();
    let units = tables.iter().map(|t| (0..t.perms.len()).map(|b| (b, ring.one())).collect()).collect();
    let cooperad = Cooperad::new("Ass*", ring.clone(), (0, 0), components, cocomp)?;
    Ok((cooperad, HopfStructure::new(products, units)))
}

/// Cochains on the commutative operad; the action is trivial, so this needs `ℚ ⊂ R`.
pub fn com_cochains(ring: &Ring, max_arity: usize) -> Result<(Cooperad, HopfStructure)> {
    if !ring.contains_rationals() {
        return Err(Error::RingRequirement(format!(
            "the commutative cooperad has a non-free action; {} does not contain ℚ",
            ring.spec()
        )));
    }
    let components = (0..=max_arity)
        .map(|r| {
            let name = match r {
                0 => "𝟙".to_string(),
                1 => "id".to_string(),
                _ => format!("c{r}"),
            };
            let rows: usize = (1..=r).product();
            OrbitModule::new(r, vec![OpBasis { name, degree: 0 }], vec![vec![0]; rows])
        })
        .collect::<Result<Vec<_>>>()?;
    let cocomp = (0..=max_arity)
        .map(|r| {
            let mut trees = Lin::zero();
            for k in 0..=max_arity {
                if k == 0 && r > 0 {
                    continue;
                }
                for blocks in all_functions(r, k) {
                    trees.add_term(ring, TreeKey { outer: 0, inner: vec![0; k], blocks }, ring.one());
                }
            }
            vec![trees]
        })
        .collect();
    let products = (0..=max_arity).map(|_| HashMap::from([((0, 0), Lin::basis(ring, 0))])).collect();
    let units = (0..=max_arity).map(|_| Lin::basis(ring, 0)).collect();
    let cooperad = Cooperad::new("Com*", ring.clone(), (0, 0), components, cocomp)?;
    Ok((cooperad, HopfStructure::new(products, units)))
}

/// Restriction of cochains along `BE_n ⊂ BE_m` (the dual of the suboperad inclusion).
pub fn restriction_morphism(source: &CochainCooperad, target: &CochainCooperad) -> Result<CooperadMorphism> {
    let (s, t) = (&source.truncation, &target.truncation);
    if s.max_arity != t.max_arity || s.max_dim != t.max_dim {
        return Err(Error::Shape("restriction needs matching arity and dimension truncations".into()));
    }
    let ring = source.cooperad.ring();
    let mut maps = Vec::new();
    for (r, data) in source.arities.iter().enumerate() {
        maps.push(
            data.simplices
                .iter()
                .map(|sx| match target.basis_of(r, sx) {
                    Some(b) => Lin::basis(ring, b),
                    None => Lin::zero(),
                })
                .collect(),
        );
    }
    // every target simplex must come from the source
    for (r, data) in target.arities.iter().enumerate() {
        if let Some(sx) = data.simplices.iter().find(|sx| source.basis_of(r, sx).is_none()) {
            return Err(Error::Shape(format!("{} is not a simplex of the source", data.simplex_name(sx))));
        }
    }
    Ok(CooperadMorphism { maps })
}

/// The map `E_∞ → E_n` on truncations with the given arity and dimension bounds.
pub fn einfty_to_en_morphism(
    ring: &Ring,
    n: Option<usize>,
    max_arity: usize,
    max_dim: usize,
) -> Result<(CochainCooperad, CochainCooperad, CooperadMorphism)> {
    let source = barratt_eccles(ring, None, max_arity, max_dim)?;
    let target = barratt_eccles(ring, n, max_arity, max_dim)?;
    let phi = restriction_morphism(&source, &target)?;
    Ok((source, target, phi))
}

/// A surjection `{1..len} → {1..r}` written as its sequence of values (zero-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surjection {
    pub arity: usize,
    pub values: Vec<usize>,
}

impl Surjection {
    pub fn new(arity: usize, values: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; arity];
        for &v in &values {
            if v >= arity {
                return Err(Error::Shape(format!("value {} exceeds arity {arity}", v + 1)));
            }
            seen[v] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Shape("sequence is not surjective".into()));
        }
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Shape("adjacent repeated value".into()));
        }
        Ok(Surjection { arity, values })
    }

    pub fn degree(&self) -> usize {
        self.values.len() - self.arity
    }

    /// Whether position `j` is not the last occurrence of its value.
    pub fn is_caesura(&self, j: usize) -> bool {
        self.values[j + 1..].contains(&self.values[j])
    }

    /// Boundary: delete one entry at a time, keeping surjective nondegenerate results.
    pub fn differential(&self, ring: &Ring) -> Lin<Surjection> {
        let mut out = Lin::zero();
        let caesura_rank: Vec<usize> = (0..self.values.len())
            .scan(0, |acc, j| {
                let before = *acc;
                if self.is_caesura(j) {
                    *acc += 1;
                }
                Some(before)
            })
            .collect();
        for j in 0..self.values.len() {
            let v = self.values[j];
            if self.values.iter().filter(|&&x| x == v).count() == 1 {
                continue;
            }
            let mut values = self.values.clone();
            values.remove(j);
            if values.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let exponent = if self.is_caesura(j) {
                caesura_rank[j]
            } else {
                let prev = (0..j).rev().find(|&i| self.values[i] == v).expect("earlier occurrence");
                caesura_rank[prev] + 1
            };
            out.add_term(ring, Surjection { arity: self.arity, values }, ring.sign(exponent % 2 == 1));
        }
        out
    }
}

impl fmt::Display for Surjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", word_name(&self.values))
    }
}

/// A simplex of `BE(r)`: a tuple of permutations read as words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BESimplex {
    pub arity: usize,
    pub words: Vec<Permutation>,
}

impl BESimplex {
    pub fn new(words: Vec<Permutation>) -> Result<Self> {
        let arity = words.first().map(|w| w.arity()).ok_or_else(|| Error::Shape("empty simplex".into()))?;
        if words.iter().any(|w| w.arity() != arity) {
            return Err(Error::Shape("mixed arities in simplex".into()));
        }
        Ok(BESimplex { arity, words })
    }

    pub fn dim(&self) -> usize {
        self.words.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.words.windows(2).any(|w| w[0] == w[1])
    }

    pub fn face(&self, i: usize) -> BESimplex {
        let mut words = self.words.clone();
        words.remove(i);
        BESimplex { arity: self.arity, words }
    }

    /// Normalized boundary.
    pub fn differential(&self, ring: &Ring) -> Lin<BESimplex> {
        let mut out = Lin::zero();
        if self.dim() == 0 {
            return out;
        }
        for i in 0..=self.dim() {
            let f = self.face(i);
            if !f.is_degenerate() {
                out.add_term(ring, f, ring.sign(i % 2 == 1));
            }
        }
        out
    }
}

impl fmt::Display for BESimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.words.iter().map(|w| word_name(w.images())).collect();
        write!(f, "({})", words.join("|"))
    }
}

/// Compositions `r_0 + … + r_d = total` with every part at least one.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Table reduction: the Barratt-Eccles simplex as a sum of surjections.
pub fn table_reduction(ring: &Ring, s: &BESimplex) -> Result<Lin<Surjection>> {
    if s.is_degenerate() {
        return Err(Error::Precondition(format!("{s} is degenerate")));
    }
    let (r, d) = (s.arity, s.dim());
    let mut out = Lin::zero();
    'parts: for parts in compositions(r + d, d + 1) {
        let mut finished = vec![false; r];
        let mut values = Vec::with_capacity(r + d);
        for (i, &ri) in parts.iter().enumerate() {
            let remaining: Vec<usize> = s.words[i].images().iter().copied().filter(|&v| !finished[v]).collect();
            if remaining.len() < ri || (i == d && remaining.len() != ri) {
                continue 'parts;
            }
            for (a, &v) in remaining[..ri].iter().enumerate() {
                // the last entry taken from a row other than the final one is a caesura
                if a + 1 < ri || i == d {
                    finished[v] = true;
                }
                values.push(v);
            }
        }
        if values.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let surj = Surjection::new(r, values)?;
        out.add_term(ring, surj, ring.one());
    }
    Ok(out)
}
