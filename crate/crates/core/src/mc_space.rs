//! The convolution complex `hom(N_*(Δⁿ), V)`, its Maurer-Cartan equation, the MC
//! simplicial set, and the horn filler built from the contraction onto a vertex.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;

use crate::builders::{resource_cap, CochainCooperad};
use crate::cofree::{check_coderivation_data, curvature, ClassMap, CofreeCoalgebra};
use crate::error::{Error, Result};
use crate::graded::{GradedModule, Lin};
use crate::scalars::{Ring, Scalar};
use crate::simplicial::{
    boundary, codegeneracy, coface, cochain_decompose, face_degree, face_name, homotopy_face, induced_face,
    tensor_d, vertices, DecompositionKey, Face, MAX_DIM,
};

/// A homogeneous map `N_*(Δⁿ) → V`: `e_I ↦ ψ(e_I)` of degree `|I| − 1 + degree`.
#[derive(Clone, PartialEq, Eq)]
pub struct Convolution {
    pub n: usize,
    pub degree: i64,
    pub values: BTreeMap<Face, Lin<usize>>,
}

impl fmt::Debug for Convolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Convolution(n={}, deg={}, ", self.n, self.degree)?;
        f.debug_map().entries(self.values.iter().map(|(k, v)| (face_name(*k), v))).finish()?;
        write!(f, ")")
    }
}

impl Convolution {
    pub fn zero(n: usize, degree: i64) -> Self {
        Convolution { n, degree, values: BTreeMap::new() }
    }

    pub fn full(&self) -> Face {
        (1 << (self.n + 1)) - 1
    }

    pub fn get(&self, f: Face) -> Lin<usize> {
        self.values.get(&f).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, f: Face, y: Lin<usize>) {
        if y.is_zero() {
            self.values.remove(&f);
        } else {
            self.values.insert(f, y);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn combine(&self, ring: &Ring, other: &Convolution, scale: &Scalar) -> Convolution {
        let mut out = self.clone();
        for (&f, y) in &other.values {
            let mut v = out.get(f);
            v.add_scaled(ring, y, scale);
            out.set(f, v);
        }
        out
    }

    pub fn add(&self, ring: &Ring, other: &Convolution) -> Convolution {
        self.combine(ring, other, &ring.one())
    }

    pub fn sub(&self, ring: &Ring, other: &Convolution) -> Convolution {
        self.combine(ring, other, &ring.int(-1))
    }

    pub fn scale(&self, ring: &Ring, s: &Scalar) -> Convolution {
        Convolution::zero(self.n, self.degree).combine(ring, self, s)
    }

    /// Keep the values on faces accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(Face) -> bool) -> Convolution {
        let values = self.values.iter().filter(|(f, _)| keep(**f)).map(|(f, y)| (*f, y.clone())).collect();
        Convolution { n: self.n, degree: self.degree, values }
    }

    /// Smallest weight of a basis vector in any value.
    pub fn min_weight(&self, v: &GradedModule) -> Option<u32> {
        self.values.values().flat_map(|y| y.keys().map(|&i| v.weight(i))).min()
    }

    /// Values of the wrong degree or on faces outside `Δⁿ`.
    pub fn check(&self, v: &GradedModule) -> Result<()> {
        for (&f, y) in &self.values {
            if f == 0 || f > self.full() {
                return Err(Error::Shape(format!("{:#b} is not a face of Δ^{}", f, self.n)));
            }
            if let Some(&i) = y.keys().find(|&&i| v.degree(i) != face_degree(f) + self.degree) {
                return Err(Error::Shape(format!("value {} on {} has the wrong degree", v.name(i), face_name(f))));
            }
        }
        Ok(())
    }

    pub fn to_string(&self, v: &GradedModule) -> String {
        if self.values.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.values.iter().map(|(&f, y)| format!("{} ↦ {}", face_name(f), lin_to_string(v, y))).collect();
        parts.join(", ")
    }
}

pub fn lin_to_string(v: &GradedModule, y: &Lin<usize>) -> String {
    if y.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = y
        .iter()
        .map(|(&i, c)| if c.is_one() { v.name(i).to_string() } else { format!("{c}·{}", v.name(i)) })
        .collect();
    parts.join(" + ")
}

/// Chains of a horn `Λⁿ_k`: every face except the top one and the one opposite `k`.
pub fn horn_faces(n: usize, k: usize) -> Vec<Face> {
    let full: Face = (1 << (n + 1)) - 1;
    let missing = full & !(1 << k);
    (1..=full).filter(|&f| f != full && f != missing).collect()
}

type DecompositionCache = HashMap<(Face, usize), Arc<Lin<DecompositionKey>>>;

/// A flat algebra over a cochain cooperad `C` together with the `C`-coalgebra structure of
/// simplex chains pushed forward from `E_∞`.
///
/// For a restriction `φ: E_∞ → C` of Barratt-Eccles cochains, `(φ ⊗ id) ∘ Δ` is the sum over
/// the simplices of `C` itself, so the `E_∞` side is never built.
pub struct McSpace {
    cc: Arc<CochainCooperad>,
    cofree: CofreeCoalgebra,
    q: ClassMap,
    max_arity: usize,
    cache: Mutex<DecompositionCache>,
    chain_checked: Mutex<HashSet<usize>>,
}

impl McSpace {
    pub fn new(cc: Arc<CochainCooperad>, cofree: CofreeCoalgebra, q: ClassMap) -> Result<Self> {
        let co = cofree.cooperad();
        if co.max_arity() != cc.cooperad.max_arity()
            || (0..=co.max_arity()).any(|r| co.component(r).dim() != cc.cooperad.component(r).dim())
        {
            return Err(Error::Shape("the coalgebra is not cogenerated over the given cochain cooperad".into()));
        }
        if (2..=co.max_arity()).any(|r| !co.component(r).is_free()) {
            return Err(Error::Unsupported("convolution operations need free components in arities ≥ 2".into()));
        }
        check_coderivation_data(&cofree, &q)?;
        if !curvature(&q).is_zero() {
            return Err(Error::Convention("the MC simplicial set is defined for flat algebras".into()));
        }
        let max_arity = q.max_arity().unwrap_or(0).min(co.max_arity());
        Ok(McSpace {
            cc,
            cofree,
            q,
            max_arity,
            cache: Mutex::new(HashMap::new()),
            chain_checked: Mutex::new(HashSet::new()),
        })
    }

    pub fn cofree(&self) -> &CofreeCoalgebra {
        &self.cofree
    }

    pub fn module(&self) -> &GradedModule {
        self.cofree.module()
    }

    pub fn ring(&self) -> &Ring {
        self.cofree.ring()
    }

    pub fn q(&self) -> &ClassMap {
        &self.q
    }

    pub fn cochains(&self) -> &CochainCooperad {
        &self.cc
    }

    /// `Δ^r_C(e_I)` on the basis of `C(r)`, cached.
    pub fn decompose(&self, face: Face, r: usize) -> Result<Arc<Lin<DecompositionKey>>> {
        if let Some(x) = self.cache.lock().expect("cache lock").get(&(face, r)) {
            return Ok(x.clone());
        }
        let x = Arc::new(cochain_decompose(self.ring(), &self.cc, face, r)?);
        self.cache.lock().expect("cache lock").insert((face, r), x.clone());
        Ok(x)
    }

    /// Check on `Δⁿ` that the decompositions used here commute with the differentials.
    /// The cooperad's own differential is not part of the model, so this fails for
    /// cooperads whose positive-dimensional cochains see the simplex boundary.
    pub fn ensure_chain_map(&self, n: usize) -> Result<()> {
        if n > MAX_DIM {
            return Err(Error::ResourceLimit(format!("Δ^{n} exceeds the supported dimension {MAX_DIM}")));
        }
        if self.chain_checked.lock().expect("lock").contains(&n) {
            return Ok(());
        }
        let ring = self.ring();
        let full: Face = (1 << (n + 1)) - 1;
        for face in 1..=full {
            for r in 2..=self.max_arity {
                let dec = self.decompose(face, r)?;
                let mut lhs: Lin<DecompositionKey> = Lin::zero();
                for (&f, c) in boundary(ring, face).iter() {
                    lhs.add_scaled(ring, &*self.decompose(f, r)?, c);
                }
                let mut rhs = Lin::zero();
                for ((b, faces), c) in dec.iter() {
                    let sign = ring.sign(self.cc.cooperad.component(r).degree(*b) % 2 != 0);
                    for (t, e) in tensor_d(ring, &Lin::basis(ring, faces.clone())).iter() {
                        rhs.add_term(ring, (*b, t.clone()), ring.mul(&ring.mul(c, e), &sign));
                    }
                }
                if lhs != rhs {
                    return Err(Error::Unsupported(format!(
                        "the arity-{r} decomposition of {} does not commute with the differentials; \
                         the cooperad differential is not modelled",
                        face_name(face)
                    )));
                }
            }
        }
        self.chain_checked.lock().expect("lock").insert(n);
        Ok(())
    }

    fn q1(&self, y: &Lin<usize>) -> Lin<usize> {
        let ring = self.ring();
        let mut out = Lin::zero();
        for (&i, c) in y.iter() {
            out.add_scaled(ring, &self.q.apply(ring, &self.cofree.cogenerator(i)), c);
        }
        out
    }

    /// `∂ψ = Q̃₁ ∘ ψ − (−1)^{|ψ|} ψ ∘ d`.
    pub fn differential(&self, psi: &Convolution) -> Convolution {
        let ring = self.ring();
        let mut out = Convolution::zero(psi.n, psi.degree - 1);
        let sign = ring.sign(psi.degree % 2 == 0);
        for face in 1..=psi.full() {
            let mut y = self.q1(&psi.get(face));
            for (&f, c) in boundary(ring, face).iter() {
                if let Some(v) = psi.values.get(&f) {
                    y.add_scaled(ring, v, &ring.mul(c, &sign));
                }
            }
            out.set(face, y);
        }
        out
    }

    /// `Q̃_r` on a tensor `b ⊗ v_1 … v_r` with `b` a basis element of `C(r)`: the class
    /// value when `b` represents its orbit, zero otherwise. On invariant tensors this is
    /// `Q̃_r` applied to the corresponding class.
    fn gamma(&self, b: usize, vs: &[usize]) -> Lin<usize> {
        let ring = self.ring();
        let comp = self.cofree.cooperad().component(vs.len());
        if !comp.is_rep(b) {
            return Lin::zero();
        }
        match self.cofree.normalize(b, vs) {
            Some((t, odd)) => {
                let y = self.q.apply(ring, &t);
                if odd {
                    y.neg(ring)
                } else {
                    y
                }
            }
            None => Lin::zero(),
        }
    }

    /// `μ_r(ψ_1, …, ψ_r) = Q̃_r ∘ (ψ_1 ⊗ … ⊗ ψ_r) ∘ Δ^r_C`.
    pub fn mu(&self, psis: &[&Convolution]) -> Result<Convolution> {
        let ring = self.ring();
        let r = psis.len();
        let n = psis.first().map(|p| p.n).ok_or_else(|| Error::Shape("μ needs arguments".into()))?;
        if psis.iter().any(|p| p.n != n) {
            return Err(Error::Shape("arguments on different simplices".into()));
        }
        let degree = psis.iter().map(|p| p.degree).sum::<i64>() + self.q.degree;
        let mut out = Convolution::zero(n, degree);
        if r < 2 || r > self.cofree.cooperad().max_arity() || psis.iter().any(|p| p.is_zero()) {
            return Ok(out);
        }
        self.ensure_chain_map(n)?;
        let comp = self.cofree.cooperad().component(r);
        for face in 1..=out.full() {
            let mut y = Lin::zero();
            for ((b, faces), c) in self.decompose(face, r)?.iter() {
                if !comp.is_rep(*b) {
                    continue;
                }
                // Koszul sign of ψ_j passing b and the earlier faces
                let mut passed = comp.degree(*b);
                let mut odd = false;
                let mut factors = Vec::with_capacity(r);
                for (j, &f) in faces.iter().enumerate() {
                    odd ^= (psis[j].degree * passed) % 2 != 0;
                    passed += face_degree(f);
                    factors.push(psis[j].get(f));
                }
                if factors.iter().any(|x| x.is_zero()) {
                    continue;
                }
                let coef = if odd { ring.neg(c) } else { c.clone() };
                for_each_product(ring, &factors, &mut |vs, e| {
                    y.add_scaled(ring, &self.gamma(*b, vs), &ring.mul(&coef, e));
                });
            }
            out.set(face, y);
        }
        Ok(out)
    }

    /// `⋆_ι(ψ) = Σ_{r ≥ 2} μ_r(ψ, …, ψ)`.
    pub fn star(&self, psi: &Convolution) -> Result<Convolution> {
        if psi.degree != 0 {
            return Err(Error::Precondition("⋆_ι is taken on degree-0 elements".into()));
        }
        let mut out = Convolution::zero(psi.n, self.q.degree);
        for r in 2..=self.max_arity {
            let args = vec![psi; r];
            out = out.add(self.ring(), &self.mu(&args)?);
        }
        Ok(out)
    }

    /// `∂ψ + ⋆_ι(ψ)`.
    pub fn mc_residual(&self, psi: &Convolution) -> Result<Convolution> {
        Ok(self.differential(psi).add(self.ring(), &self.star(psi)?))
    }

    pub fn mc_check(&self, psi: &Convolution) -> Result<(bool, Convolution)> {
        psi.check(self.module())?;
        let res = self.mc_residual(psi)?;
        Ok((res.is_zero(), res))
    }

    /// `d_i ψ = ψ ∘ δ^i_*`.
    pub fn face(&self, i: usize, psi: &Convolution) -> Result<Convolution> {
        if psi.n == 0 || i > psi.n {
            return Err(Error::Shape(format!("no face {i} of Δ^{}", psi.n)));
        }
        let f = coface(psi.n, i);
        let mut out = Convolution::zero(psi.n - 1, psi.degree);
        for g in 1..=out.full() {
            let image = induced_face(&f, g).expect("cofaces are injective");
            out.set(g, psi.get(image));
        }
        Ok(out)
    }

    /// `s_j ψ = ψ ∘ σ^j_*`.
    pub fn degeneracy(&self, j: usize, psi: &Convolution) -> Result<Convolution> {
        if j > psi.n {
            return Err(Error::Shape(format!("no degeneracy {j} of Δ^{}", psi.n)));
        }
        let f = codegeneracy(psi.n, j);
        let mut out = Convolution::zero(psi.n + 1, psi.degree);
        for g in 1..=out.full() {
            if let Some(image) = induced_face(&f, g) {
                out.set(g, psi.get(image));
            }
        }
        Ok(out)
    }

    /// `P^k_n(ψ) = ψ(e_k) ∘ ε`.
    pub fn p_op(&self, k: usize, psi: &Convolution) -> Convolution {
        let mut out = Convolution::zero(psi.n, psi.degree);
        let v = psi.get(1 << k);
        for i in 0..=psi.n {
            out.set(1 << i, v.clone());
        }
        out
    }

    /// `H^k_n(ψ) = (−1)^{|ψ|} ψ ∘ h^k_n`; the sign is what makes
    /// `∂H + H∂ = id − P` hold in every degree.
    pub fn h_op(&self, k: usize, psi: &Convolution) -> Convolution {
        let ring = self.ring();
        let mut out = Convolution::zero(psi.n, psi.degree + 1);
        for face in 1..=psi.full() {
            if let Some((g, odd)) = homotopy_face(k, face) {
                if let Some(v) = psi.values.get(&g) {
                    out.set(face, v.scale(ring, &ring.sign(odd ^ (psi.degree % 2 != 0))));
                }
            }
        }
        out
    }

    /// `R^k_n = ∂ ∘ H^k_n`.
    pub fn r_op(&self, k: usize, psi: &Convolution) -> Convolution {
        self.differential(&self.h_op(k, psi))
    }

    /// Fill a horn `Λⁿ_k` given by its values on [`horn_faces`], starting from `top` on
    /// the top face (zero when `None`). Returns the filler and the number of corrections.
    pub fn horn_fill(&self, horn: &Convolution, k: usize, top: Option<&Lin<usize>>) -> Result<(Convolution, usize)> {
        let (n, ring) = (horn.n, self.ring());
        if n == 0 || k > n || horn.degree != 0 {
            return Err(Error::Shape(format!("Λ^{n}_{k} is not a horn of degree-0 elements")));
        }
        horn.check(self.module())?;
        let full = horn.full();
        let missing = full & !(1 << k);
        if horn.values.contains_key(&full) || horn.values.contains_key(&missing) {
            return Err(Error::Shape("horn data on the top face or the face opposite k".into()));
        }
        let res = self.mc_residual(horn)?;
        if let Some(f) = horn_faces(n, k).into_iter().find(|&f| !res.get(f).is_zero()) {
            return Err(Error::Precondition(format!("the horn is not Maurer-Cartan on {}", face_name(f))));
        }
        // ψ_1: the horn, the top value, and the face opposite k solving the linear part
        // of the equation on the top face
        let mut psi = horn.clone();
        if let Some(t) = top {
            psi.set(full, t.clone());
        }
        let mut value = self.q1(&psi.get(full));
        for (&f, c) in boundary(ring, full).iter() {
            if f != missing {
                value.add_scaled(ring, &psi.get(f), &ring.neg(c));
            }
        }
        // the face opposite k enters the boundary with the sign (−1)^k
        psi.set(missing, value.scale(ring, &ring.sign(k % 2 == 1)));
        let bound = self.cofree.w_max() as usize + 1;
        for step in 0..=bound {
            let gamma = self.h_op(k, &self.mc_residual(&psi)?);
            if gamma.is_zero() {
                let (ok, res) = self.mc_check(&psi)?;
                if !ok {
                    return Err(Error::Internal(format!(
                        "horn filler stabilised with residual {}",
                        res.to_string(self.module())
                    )));
                }
                return Ok((psi, step));
            }
            psi = psi.sub(ring, &gamma);
        }
        Err(Error::Internal(format!("horn filling did not stabilise within {bound} corrections")))
    }

    /// Degree-0 elements on `Δⁿ` satisfying the MC equation, by depth-first search over
    /// faces with the equation checked as soon as a face and its subfaces are assigned.
    pub fn mc_simplices(&self, n: usize) -> Result<Vec<Convolution>> {
        self.mc_simplices_where(n, &|_| false, &Convolution::zero(n, 0))
    }

    /// MC elements on `Δⁿ` agreeing with `fixed` on the faces accepted by `pinned`.
    pub fn mc_simplices_where(
        &self,
        n: usize,
        pinned: &dyn Fn(Face) -> bool,
        fixed: &Convolution,
    ) -> Result<Vec<Convolution>> {
        let ring = self.ring();
        let elements = ring
            .elements()
            .ok_or_else(|| Error::Unsupported("enumeration needs a finite ring".into()))?;
        if n > MAX_DIM {
            return Err(Error::ResourceLimit(format!("Δ^{n} exceeds the supported dimension {MAX_DIM}")));
        }
        self.ensure_chain_map(n)?;
        let mut faces: Vec<Face> = (1..(1 << (n + 1))).collect();
        faces.sort_by_key(|&f| (f.count_ones(), f));
        // candidate values per face
        let mut choices: Vec<Vec<Lin<usize>>> = Vec::new();
        for &f in &faces {
            if pinned(f) {
                choices.push(vec![fixed.get(f)]);
                continue;
            }
            let basis = self.module().degree_part(face_degree(f));
            let count = (elements.len() as f64).powi(basis.len() as i32);
            if count > resource_cap() as f64 {
                return Err(Error::ResourceLimit(format!("{count} candidate values on {}", face_name(f))));
            }
            let mut vals = vec![Lin::zero()];
            for &i in &basis {
                vals = vals
                    .into_iter()
                    .flat_map(|y: Lin<usize>| {
                        elements.iter().map(move |c| {
                            let mut y = y.clone();
                            y.add_term(ring, i, c.clone());
                            y
                        })
                    })
                    .collect();
            }
            choices.push(vals);
        }
        let mut out = Vec::new();
        let mut psi = Convolution::zero(n, 0);
        let mut visited = 0usize;
        self.search(&faces, &choices, 0, &mut psi, &mut out, &mut visited)?;
        Ok(out)
    }

    fn search(
        &self,
        faces: &[Face],
        choices: &[Vec<Lin<usize>>],
        at: usize,
        psi: &mut Convolution,
        out: &mut Vec<Convolution>,
        visited: &mut usize,
    ) -> Result<()> {
        if at == faces.len() {
            out.push(psi.clone());
            return Ok(());
        }
        let f = faces[at];
        for y in &choices[at] {
            *visited += 1;
            if *visited > resource_cap() * 16 {
                return Err(Error::ResourceLimit("MC enumeration search space".into()));
            }
            psi.set(f, y.clone());
            if self.residual_at(psi, f)?.is_zero() {
                self.search(faces, choices, at + 1, psi, out, visited)?;
            }
        }
        psi.set(f, Lin::zero());
        Ok(())
    }

    /// `(∂ψ + ⋆_ι ψ)(e_I)` for a single face, which only involves the faces of `I`.
    pub fn residual_at(&self, psi: &Convolution, face: Face) -> Result<Lin<usize>> {
        let verts = vertices(face);
        let m = verts.len() - 1;
        let mut local = Convolution::zero(m, psi.degree);
        for g in 1u32..1 << (m + 1) {
            let image = crate::simplicial::face_of(&vertices(g).iter().map(|&v| verts[v]).collect::<Vec<_>>());
            local.set(g, psi.get(image));
        }
        Ok(self.mc_residual(&local)?.get(local.full()))
    }

    /// A random MC element on `Δⁿ` with vertex `k` at the MC point `at_vertex`: the fixed
    /// point of `ψ = P^k ψ + ∂H^k χ − H^k ⋆_ι ψ` for a random degree-0 `χ`, verified.
    pub fn random_mc_simplex<R: Rng>(
        &self,
        n: usize,
        k: usize,
        at_vertex: &Lin<usize>,
        rng: &mut R,
    ) -> Result<Option<Convolution>> {
        let ring = self.ring();
        let chi = self.random_element(n, 0, rng);
        let mut base = Convolution::zero(n, 0);
        for i in 0..=n {
            base.set(1 << i, at_vertex.clone());
        }
        let base = base.add(ring, &self.r_op(k, &chi));
        let mut psi = base.clone();
        for _ in 0..=self.cofree.w_max() as usize + 1 {
            let next = base.sub(ring, &self.h_op(k, &self.star(&psi)?));
            if next == psi {
                return Ok(self.mc_check(&psi)?.0.then_some(psi));
            }
            psi = next;
        }
        Ok(None)
    }

    /// Random degree-`d` element with coefficients in `-2..=2`.
    pub fn random_element<R: Rng>(&self, n: usize, d: i64, rng: &mut R) -> Convolution {
        let ring = self.ring();
        let mut out = Convolution::zero(n, d);
        for face in 1..=out.full() {
            let mut y = Lin::zero();
            for i in self.module().degree_part(face_degree(face) + d) {
                y.add_term(ring, i, ring.int(rng.gen_range(-2..=2)));
            }
            out.set(face, y);
        }
        out
    }
}

/// Expand `x_1 ⊗ … ⊗ x_r` into basis tuples with their coefficients.
fn for_each_product(ring: &Ring, factors: &[Lin<usize>], f: &mut dyn FnMut(&[usize], &Scalar)) {
    fn go(ring: &Ring, factors: &[Lin<usize>], vs: &mut Vec<usize>, c: Scalar, f: &mut dyn FnMut(&[usize], &Scalar)) {
        let Some((first, rest)) = factors.split_first() else {
            f(vs, &c);
            return;
        };
        for (&i, e) in first.iter() {
            vs.push(i);
            go(ring, rest, vs, ring.mul(&c, e), f);
            vs.pop();
        }
    }
    go(ring, factors, &mut Vec::new(), ring.one(), f);
}

/// Outcome of [`kan_spot_check`].
#[derive(Clone, Debug, Default)]
pub struct KanReport {
    pub attempted: usize,
    pub filled: usize,
    pub skipped: usize,
    pub max_corrections: usize,
    pub failures: Vec<String>,
}

/// Fill random horns `Λⁿ_k` (`1 ≤ n ≤ max_n`, every `k`) cut out of random MC simplices.
pub fn kan_spot_check<R: Rng>(space: &McSpace, max_n: usize, trials: usize, rng: &mut R) -> Result<KanReport> {
    let mut report = KanReport::default();
    let zero = Lin::zero();
    for t in 0..trials {
        let n = 1 + t % max_n;
        let k = rng.gen_range(0..=n);
        let Some(simplex) = space.random_mc_simplex(n, rng.gen_range(0..=n), &zero, rng)? else {
            report.skipped += 1;
            continue;
        };
        let faces: HashSet<Face> = horn_faces(n, k).into_iter().collect();
        let horn = simplex.restrict(|f| faces.contains(&f));
        report.attempted += 1;
        match space.horn_fill(&horn, k, None) {
            Ok((psi, steps)) => {
                if psi.restrict(|f| faces.contains(&f)) != horn {
                    report.failures.push(format!("Λ^{n}_{k}: filler changes the horn"));
                } else {
                    report.filled += 1;
                    report.max_corrections = report.max_corrections.max(steps);
                }
            }
            Err(e) => report.failures.push(format!("Λ^{n}_{k}: {e}")),
        }
    }
    Ok(report)
}
