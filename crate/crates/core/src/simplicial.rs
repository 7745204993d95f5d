//! Normalized chains on standard simplices: the contraction onto a vertex, cosimplicial
//! maps, the interval-cut action of surjections, and the resulting coalgebra structures.
//!
//! A face of `Δⁿ` is a bitmask of its vertices.

use std::collections::HashMap;

use crate::builders::{table_reduction, BESimplex, CochainCooperad, Surjection};
use crate::cooperad::CooperadMorphism;
use crate::error::{Error, Result};
use crate::graded::{reorder_sign, BasisElement, GradedModule, Lin};
use crate::scalars::{Ring, Scalar};

pub type Face = u32;

/// Largest supported simplex dimension.
pub const MAX_DIM: usize = 24;

pub fn face_degree(f: Face) -> i64 {
    f.count_ones() as i64 - 1
}

pub fn vertices(f: Face) -> Vec<usize> {
    (0..32).filter(|i| f >> i & 1 == 1).collect()
}

pub fn face_of(vs: &[usize]) -> Face {
    vs.iter().fold(0, |acc, &v| acc | 1 << v)
}

pub fn face_name(f: Face) -> String {
    let vs = vertices(f);
    let sep = if vs.iter().any(|&v| v > 9) { "," } else { "" };
    let digits: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
    format!("e{}", digits.join(sep))
}

/// `N_*(Δⁿ)` with basis `e_I`, `I ≠ ∅`, in degree `|I| − 1` and weight 1.
#[derive(Clone, Debug)]
pub struct SimplexChains {
    n: usize,
    module: GradedModule,
    faces: Vec<Face>,
    index: HashMap<Face, usize>,
}

impl SimplexChains {
    pub fn new(ring: &Ring, n: usize) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::ResourceLimit(format!("Δ^{n} exceeds the supported dimension {MAX_DIM}")));
        }
        let mut faces: Vec<Face> = (1..1u32 << (n + 1)).collect();
        faces.sort_by_key(|&f| (f.count_ones(), vertices(f)));
        let index = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let basis = faces
            .iter()
            .map(|&f| BasisElement { name: face_name(f), degree: face_degree(f), weight: 1 })
            .collect();
        let module = GradedModule::new(ring.clone(), basis)?;
        Ok(SimplexChains { n, module, faces, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> Face {
        self.faces[i]
    }

    pub fn index_of(&self, f: Face) -> Option<usize> {
        self.index.get(&f).copied()
    }

    pub fn full(&self) -> Face {
        (1 << (self.n + 1)) - 1
    }

    pub fn vertex(&self, k: usize) -> Face {
        1 << k
    }

    pub fn to_indices(&self, x: &Lin<Face>) -> Lin<usize> {
        x.iter().map(|(f, c)| (self.index[f], c.clone())).collect()
    }

    pub fn to_faces(&self, x: &Lin<usize>) -> Lin<Face> {
        x.iter().map(|(&i, c)| (self.faces[i], c.clone())).collect()
    }
}

/// `d e_{i_0…i_k} = Σ_j (−1)^j e_{i_0…î_j…i_k}`.
pub fn boundary(ring: &Ring, f: Face) -> Lin<Face> {
    let mut out = Lin::zero();
    if f.count_ones() < 2 {
        return out;
    }
    for (j, v) in vertices(f).into_iter().enumerate() {
        out.add_term(ring, f & !(1 << v), ring.sign(j % 2 == 1));
    }
    out
}

pub fn d(ring: &Ring, x: &Lin<Face>) -> Lin<Face> {
    let mut out = Lin::zero();
    for (&f, c) in x.iter() {
        out.add_scaled(ring, &boundary(ring, f), c);
    }
    out
}

/// Differential of `N_*(Δⁿ)^{⊗r}` with Koszul signs.
pub fn tensor_d(ring: &Ring, x: &Lin<Vec<Face>>) -> Lin<Vec<Face>> {
    let mut out = Lin::zero();
    for (t, c) in x.iter() {
        let mut passed = 0;
        for i in 0..t.len() {
            for (&f, e) in boundary(ring, t[i]).iter() {
                let mut u = t.clone();
                u[i] = f;
                let v = ring.mul(c, e);
                out.add_term(ring, u, if passed % 2 != 0 { ring.neg(&v) } else { v });
            }
            passed += face_degree(t[i]);
        }
    }
    out
}

fn check_monotone(f: &[usize], n: usize) -> Result<()> {
    if f.windows(2).any(|w| w[0] > w[1]) || f.iter().any(|&x| x > n) {
        return Err(Error::Shape(format!("{f:?} is not a monotone map into [{n}]")));
    }
    Ok(())
}

/// Image of a face under the monotone map `f: [m] → [n]`, or `None` when it collapses.
pub fn induced_face(f: &[usize], face: Face) -> Option<Face> {
    let vs = vertices(face);
    let image: Vec<usize> = vs.iter().map(|&v| f[v]).collect();
    if image.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(face_of(&image))
}

/// The chain map `N_*(Δ^m) → N_*(Δⁿ)` induced by a monotone map.
pub fn induced_map(ring: &Ring, f: &[usize], n: usize, x: &Lin<Face>) -> Result<Lin<Face>> {
    check_monotone(f, n)?;
    let mut out = Lin::zero();
    for (&face, c) in x.iter() {
        if vertices(face).last().is_some_and(|&v| v >= f.len()) {
            return Err(Error::Shape(format!("{} is not a face of Δ^{}", face_name(face), f.len() - 1)));
        }
        if let Some(g) = induced_face(f, face) {
            out.add_term(ring, g, c.clone());
        }
    }
    Ok(out)
}

/// Coface `δ^i: [n−1] → [n]` skipping `i`.
pub fn coface(n: usize, i: usize) -> Vec<usize> {
    (0..n).map(|j| if j < i { j } else { j + 1 }).collect()
}

/// Codegeneracy `σ^i: [n+1] → [n]` hitting `i` twice.
pub fn codegeneracy(n: usize, i: usize) -> Vec<usize> {
    (0..n + 2).map(|j| if j <= i { j } else { j - 1 }).collect()
}

/// `ε(e_k) = 1` on vertices and zero in positive degrees.
pub fn epsilon(ring: &Ring, x: &Lin<Face>) -> Scalar {
    let mut out = ring.zero();
    for (&f, c) in x.iter() {
        if f.count_ones() == 1 {
            out = ring.add(&out, c);
        }
    }
    out
}

/// `p^k_n ∘ ε`: the projection onto the vertex `k`.
pub fn vertex_projection(ring: &Ring, k: usize, x: &Lin<Face>) -> Lin<Face> {
    Lin::single(ring, 1 << k, epsilon(ring, x))
}

/// `h^k_n(e_I) = (−1)^s e_{I∪k}` with `s = #{i ∈ I : i < k}`, zero when `k ∈ I`.
pub fn homotopy_face(k: usize, f: Face) -> Option<(Face, bool)> {
    if f >> k & 1 == 1 {
        return None;
    }
    let s = (f & ((1 << k) - 1)).count_ones();
    Some((f | 1 << k, s % 2 == 1))
}

pub fn homotopy(ring: &Ring, k: usize, x: &Lin<Face>) -> Lin<Face> {
    let mut out = Lin::zero();
    for (&f, c) in x.iter() {
        if let Some((g, odd)) = homotopy_face(k, f) {
            out.add_term(ring, g, if odd { ring.neg(c) } else { c.clone() });
        }
    }
    out
}

/// Cut sequences `0 = n_0 ≤ n_1 ≤ … ≤ n_l = m`.
fn cuts(m: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..l {
        out = out
            .into_iter()
            .flat_map(|c| {
                let last = *c.last().expect("nonempty");
                (last..=m).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    for c in &mut out {
        c.push(m);
    }
    out
}

/// Interval-cut action of a surjection on a face.
///
/// Output `k` collects the intervals `[n_{j−1}, n_j]` at the positions `j` where the
/// surjection takes the value `k`; overlapping intervals give a degenerate face and vanish.
/// Sign: regrouping the intervals by output, an inner interval (not the last occurrence of
/// its value) counting its length plus one and a final one its length, times `(−1)^{n_j}`
/// for the right end of every inner interval. With this convention
/// `d(u·σ) = (du)·σ + (−1)^{|u|} u·(dσ)`.
pub fn surjection_action(ring: &Ring, s: &Surjection, face: Face) -> Lin<Vec<Face>> {
    let verts = vertices(face);
    let mut out = Lin::zero();
    if verts.is_empty() {
        return out;
    }
    let m = verts.len() - 1;
    let l = s.values.len();
    let inner: Vec<bool> = (0..l).map(|j| s.is_caesura(j)).collect();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by_key(|&j| (s.values[j], j));
    'cut: for c in cuts(m, l) {
        let mut faces = vec![0 as Face; s.arity];
        for j in 0..l {
            let k = s.values[j];
            for &v in &verts[c[j]..=c[j + 1]] {
                if faces[k] >> v & 1 == 1 {
                    continue 'cut;
                }
                faces[k] |= 1 << v;
            }
        }
        let degs: Vec<i64> = (0..l).map(|j| (c[j + 1] - c[j]) as i64 + inner[j] as i64).collect();
        let mut odd = reorder_sign(&degs, &order);
        for j in 0..l {
            if inner[j] {
                odd ^= c[j + 1] % 2 == 1;
            }
        }
        out.add_term(ring, faces, ring.sign(odd));
    }
    out
}

/// The Alexander-Whitney diagonal `Σ_j e_{i_0…i_j} ⊗ e_{i_j…i_m}`.
pub fn alexander_whitney(ring: &Ring, face: Face) -> Lin<Vec<Face>> {
    let vs = vertices(face);
    let mut out = Lin::zero();
    for j in 0..vs.len() {
        out.add_term(ring, vec![face_of(&vs[..=j]), face_of(&vs[j..])], ring.one());
    }
    out
}

/// A decomposition term: a basis element of `C(r)` and one face per output.
pub type DecompositionKey = (usize, Vec<Face>);

/// `Σ_s s^∨ ⊗ TR(s)·e_I` over the simplices `s` of arity `r` in the basis of the cochain
/// cooperad. Simplices of dimension above `(r − 1)·|I|` act by zero and are skipped; the
/// cooperad's own dimension bound is the truncation of the coalgebra structure.
pub fn cochain_decompose(ring: &Ring, cc: &CochainCooperad, face: Face, r: usize) -> Result<Lin<DecompositionKey>> {
    let ad = cc
        .arities
        .get(r)
        .ok_or_else(|| Error::Shape(format!("arity {r} beyond the cooperad truncation")))?;
    let mut out = Lin::zero();
    if r == 0 {
        // the arity-zero part sees only ε
        let e = epsilon(ring, &Lin::basis(ring, face));
        out.add_term(ring, (0, Vec::new()), e);
        return Ok(out);
    }
    let cap = (r as i64 - 1) * face_degree(face);
    for (b, simplex) in ad.simplices.iter().enumerate() {
        if ad.dim_of(b) as i64 > cap {
            continue;
        }
        let s = BESimplex::new(simplex.iter().map(|&w| ad.table.perms[w].clone()).collect())?;
        for (surj, c) in table_reduction(ring, &s)?.iter() {
            for (faces, e) in surjection_action(ring, surj, face).iter() {
                out.add_term(ring, (b, faces.clone()), ring.mul(c, e));
            }
        }
    }
    Ok(out)
}

/// E_∞-coalgebra structure on `N_*(Δⁿ)` from a Barratt-Eccles cochain cooperad.
pub fn einfty_decompose(ring: &Ring, einfty: &CochainCooperad, face: Face, r: usize) -> Result<Lin<DecompositionKey>> {
    cochain_decompose(ring, einfty, face, r)
}

/// `C`-coalgebra structure `(φ ⊗ id) ∘ Δ_{E_∞}` through a cooperad morphism out of `source`.
pub fn c_coalgebra_decompose(
    ring: &Ring,
    phi: &CooperadMorphism,
    source: &CochainCooperad,
    face: Face,
    r: usize,
) -> Result<Lin<DecompositionKey>> {
    if phi.maps.len() != source.arities.len() {
        return Err(Error::Shape("morphism and source truncations differ".into()));
    }
    let mut out = Lin::zero();
    for ((b, faces), c) in cochain_decompose(ring, source, face, r)?.iter() {
        for (&t, e) in phi.maps[r][*b].iter() {
            out.add_term(ring, (t, faces.clone()), ring.mul(c, e));
        }
    }
    Ok(out)
}
