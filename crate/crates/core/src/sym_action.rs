//! Permutations, free `S_r`-modules presented by orbit representatives, the norm map and
//! normal forms for coinvariant classes of `C(r) ⊗ V^{⊗r}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::graded::{reorder_sign, GradedModule, Lin};
use crate::scalars::{Ring, Scalar};

/// A bijection of `{0, .., r-1}`; displayed one-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Shape(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(r: usize) -> Self {
        Permutation((0..r).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_odd(&self) -> bool {
        let mut odd = false;
        for a in 0..self.0.len() {
            for b in a + 1..self.0.len() {
                if self.0[a] > self.0[b] {
                    odd = !odd;
                }
            }
        }
        odd
    }

    /// All of `S_r` in lexicographic order of image lists.
    pub fn all(r: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(r);
        let mut used = vec![false; r];
        fn rec(r: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == r {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..r {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(r, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(r, &mut cur, &mut used, &mut out);
        out
    }

    /// Lexicographic rank among [`Permutation::all`].
    pub fn rank(&self) -> usize {
        let r = self.0.len();
        let mut rank = 0;
        for a in 0..r {
            let smaller = self.0[a + 1..].iter().filter(|&&x| x < self.0[a]).count();
            rank = rank * (r - a) + smaller;
        }
        rank
    }

    /// A permutation of length `seed.len()` decoded from arbitrary integers (Lehmer code).
    pub fn from_lehmer_seed(seed: &[usize]) -> Self {
        let mut pool: Vec<usize> = (0..seed.len()).collect();
        let images = seed.iter().map(|&s| pool.remove(s % pool.len())).collect();
        Permutation(images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Degree and name of a cooperad basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpBasis {
    pub name: String,
    pub degree: i64,
}

/// How coinvariants are identified with invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `Tr(x) = Σ σx`, an isomorphism on free modules over any ring.
    Integral,
    /// `Tr(x) = Σ σx / r!`, only over rings containing `Q`.
    Divided,
}

/// A finitely generated `S_r`-module with a permutation basis.
///
/// Either the action is free (the generic case) or it is trivial, which is only
/// admissible over `Q` with the divided norm.
#[derive(Clone, Debug)]
pub struct OrbitModule {
    arity: usize,
    basis: Vec<OpBasis>,
    perms: Vec<Permutation>,
    action: Vec<Vec<usize>>,
    /// For each basis element: its orbit representative and the rank of a `σ` with `σ·rep = b`.
    orbit: Vec<(usize, usize)>,
    reps: Vec<usize>,
    norm: NormKind,
}

impl OrbitModule {
    /// Build from an action table `action[rank(σ)][b] = σ·b`, validating that it is a group
    /// action and that it is free (or trivial, which selects the divided norm).
    pub fn new(arity: usize, basis: Vec<OpBasis>, action: Vec<Vec<usize>>) -> Result<Self> {
        let perms = Permutation::all(arity);
        if action.len() != perms.len() || action.iter().any(|row| row.len() != basis.len()) {
            return Err(Error::Shape(format!("action table shape for arity {arity}")));
        }
        for row in &action {
            for (b, &img) in row.iter().enumerate() {
                if img >= basis.len() || basis[img].degree != basis[b].degree {
                    return Err(Error::Shape(format!("action does not preserve basis/degree at {b}")));
                }
            }
        }
        if action[0].iter().enumerate().any(|(b, &img)| b != img) {
            return Err(Error::Validation(format!("identity acts nontrivially in arity {arity}")));
        }
        for (i, s) in perms.iter().enumerate() {
            for (j, t) in perms.iter().enumerate() {
                let st = s.compose(t).rank();
                for b in 0..basis.len() {
                    if action[i][action[j][b]] != action[st][b] {
                        return Err(Error::Validation(format!(
                            "action table is not a group action in arity {arity}: {s}·({t}·{})",
                            basis[b].name
                        )));
                    }
                }
            }
        }
        let trivial = action.iter().all(|row| row.iter().enumerate().all(|(b, &img)| b == img));
        let mut orbit = vec![(usize::MAX, 0); basis.len()];
        let mut reps = Vec::new();
        let mut free = true;
        for b in 0..basis.len() {
            if orbit[b].0 != usize::MAX {
                continue;
            }
            reps.push(b);
            for (i, row) in action.iter().enumerate() {
                let img = row[b];
                if orbit[img].0 == usize::MAX {
                    orbit[img] = (b, i);
                } else if img == b && i != 0 {
                    free = false;
                }
            }
        }
        let norm = if free || arity <= 1 {
            NormKind::Integral
        } else if trivial {
            NormKind::Divided
        } else {
            return Err(Error::Freeness(format!(
                "arity {arity}: action is neither free nor trivial"
            )));
        };
        Ok(OrbitModule { arity, basis, perms, action, orbit, reps, norm })
    }

    /// A free module generated by the given orbit representatives, with basis `σ·rep`.
    pub fn free(arity: usize, reps: Vec<OpBasis>) -> Result<Self> {
        let perms = Permutation::all(arity);
        let n = perms.len();
        let mut basis = Vec::new();
        for rep in &reps {
            for p in &perms {
                let name = if p.is_identity() { rep.name.clone() } else { format!("{p}·{}", rep.name) };
                basis.push(OpBasis { name, degree: rep.degree });
            }
        }
        // basis index of σ·rep_i is i*n + rank(σ)
        let action = perms
            .iter()
            .map(|s| {
                (0..basis.len())
                    .map(|b| {
                        let (i, t) = (b / n, b % n);
                        i * n + s.compose(&perms[t]).rank()
                    })
                    .collect()
            })
            .collect();
        OrbitModule::new(arity, basis, action)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn basis(&self) -> &[OpBasis] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, b: usize) -> i64 {
        self.basis[b].degree
    }

    pub fn name(&self, b: usize) -> &str {
        &self.basis[b].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn is_rep(&self, b: usize) -> bool {
        self.orbit[b].0 == b
    }

    pub fn is_free(&self) -> bool {
        self.norm == NormKind::Integral
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// `σ·b` by rank of `σ`.
    pub fn act_basis(&self, sigma_rank: usize, b: usize) -> usize {
        self.action[sigma_rank][b]
    }

    /// Orbit representative of `b` and a permutation carrying the representative to `b`.
    pub fn orbit_of(&self, b: usize) -> (usize, &Permutation) {
        let (rep, s) = self.orbit[b];
        (rep, &self.perms[s])
    }

    /// Serialized action table: permutation (one-based) to image names per basis element.
    pub fn action_table(&self) -> Vec<(String, Vec<String>)> {
        self.perms
            .iter()
            .zip(&self.action)
            .map(|(p, row)| (p.to_string(), row.iter().map(|&b| self.basis[b].name.clone()).collect()))
            .collect()
    }
}

/// A basis tensor `c ⊗ v_1 ⊗ … ⊗ v_r` with `c` a basis element of the arity-`r` component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tensor {
    pub c: usize,
    pub vs: Vec<usize>,
}

impl Tensor {
    pub fn new(c: usize, vs: Vec<usize>) -> Self {
        Tensor { c, vs }
    }

    pub fn degree(&self, op: &OrbitModule, v: &GradedModule) -> i64 {
        op.degree(self.c) + self.vs.iter().map(|&i| v.degree(i)).sum::<i64>()
    }
}

/// Permute tensor slots: slot `i` moves to slot `σ(i)`. Returns the Koszul parity.
pub fn permute_slots(sigma: &Permutation, vs: &[usize], v: &GradedModule) -> (Vec<usize>, bool) {
    let inv = sigma.inverse();
    let out: Vec<usize> = inv.images().iter().map(|&i| vs[i]).collect();
    let degrees: Vec<i64> = vs.iter().map(|&i| v.degree(i)).collect();
    (out, reorder_sign(&degrees, inv.images()))
}

/// Diagonal action `σ·(c ⊗ v_1…v_r) = σc ⊗ ±v_{σ⁻¹(1)}…v_{σ⁻¹(r)}` on an element.
pub fn act(ring: &Ring, op: &OrbitModule, v: &GradedModule, sigma: &Permutation, x: &Lin<Tensor>) -> Result<Lin<Tensor>> {
    if sigma.arity() != op.arity() {
        return Err(Error::Shape(format!("σ of arity {} on arity {}", sigma.arity(), op.arity())));
    }
    let rank = sigma.rank();
    let mut out = Lin::zero();
    for (t, coef) in x.iter() {
        if t.vs.len() != op.arity() {
            return Err(Error::Shape("tensor length differs from arity".into()));
        }
        let (vs, odd) = permute_slots(sigma, &t.vs, v);
        let c = op.act_basis(rank, t.c);
        out.add_term(ring, Tensor { c, vs }, if odd { ring.neg(coef) } else { coef.clone() });
    }
    Ok(out)
}

/// Canonical representative of the coinvariant class of `c ⊗ vs`, with Koszul parity.
/// Returns `None` when the class vanishes (only possible for the trivial rational action).
pub fn coinv_normalize(op: &OrbitModule, v: &GradedModule, c: usize, vs: &[usize]) -> Option<(Tensor, bool)> {
    if op.is_free() {
        let (rep, sigma) = op.orbit_of(c);
        if sigma.is_identity() {
            return Some((Tensor { c: rep, vs: vs.to_vec() }, false));
        }
        let (vs, odd) = permute_slots(&sigma.inverse(), vs, v);
        Some((Tensor { c: rep, vs }, odd))
    } else {
        // trivial action: symmetric tensors, sorted by basis index
        let mut order: Vec<usize> = (0..vs.len()).collect();
        order.sort_by_key(|&i| vs[i]);
        let sorted: Vec<usize> = order.iter().map(|&i| vs[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1] && v.degree(w[0]) & 1 != 0) {
            return None;
        }
        let degrees: Vec<i64> = vs.iter().map(|&i| v.degree(i)).collect();
        Some((Tensor { c: op.reps()[0], vs: sorted }, reorder_sign(&degrees, &order)))
    }
}

/// Normalize every term of an element of `C(r) ⊗ V^{⊗r}` into class normal form.
pub fn to_classes(ring: &Ring, op: &OrbitModule, v: &GradedModule, x: &Lin<Tensor>) -> Lin<Tensor> {
    x.map_keys(ring, |t| coinv_normalize(op, v, t.c, &t.vs))
}

/// The norm map from coinvariant classes to invariants.
pub fn norm(ring: &Ring, op: &OrbitModule, v: &GradedModule, class: &Lin<Tensor>) -> Result<Lin<Tensor>> {
    let mut out = Lin::zero();
    for p in op.perms() {
        out.add_scaled(ring, &act(ring, op, v, p, class)?, &ring.one());
    }
    if op.norm_kind() == NormKind::Divided {
        out = out.scale(ring, &ring.inv_factorial(op.arity())?);
    }
    Ok(out)
}

pub fn is_invariant(ring: &Ring, op: &OrbitModule, v: &GradedModule, y: &Lin<Tensor>) -> Result<bool> {
    for p in op.perms() {
        if act(ring, op, v, p, y)? != *y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inverse of [`norm`], reading off orbit-representative coefficients.
pub fn norm_inverse(ring: &Ring, op: &OrbitModule, v: &GradedModule, y: &Lin<Tensor>) -> Result<Lin<Tensor>> {
    if !is_invariant(ring, op, v, y)? {
        return Err(Error::NotInvariant(format!("element of arity {}", op.arity())));
    }
    let class = norm_inverse_unchecked(ring, op, v, y);
    if norm(ring, op, v, &class)? != *y {
        return Err(Error::Freeness(format!("norm is not invertible on this element (arity {})", op.arity())));
    }
    Ok(class)
}

/// [`norm_inverse`] without the invariance and round-trip checks; the input must be invariant.
pub fn norm_inverse_unchecked(ring: &Ring, op: &OrbitModule, v: &GradedModule, y: &Lin<Tensor>) -> Lin<Tensor> {
    match op.norm_kind() {
        NormKind::Integral => y.filter(|t| op.is_rep(t.c)),
        NormKind::Divided => to_classes(ring, op, v, y),
    }
}

/// Coefficient of the norm correction used when pairing two coinvariant classes:
/// `1` for the integral norm, `1/r!` for the divided one.
pub fn norm_factor(ring: &Ring, op: &OrbitModule) -> Result<Scalar> {
    match op.norm_kind() {
        NormKind::Integral => Ok(ring.one()),
        NormKind::Divided => ring.inv_factorial(op.arity()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::BasisElement;

    fn v_module(ring: &Ring, degs: &[i64]) -> GradedModule {
        let basis = degs
            .iter()
            .enumerate()
            .map(|(i, &degree)| BasisElement { name: format!("v{i}"), degree, weight: 1 })
            .collect();
        GradedModule::new(ring.clone(), basis).unwrap()
    }

    fn op2() -> OrbitModule {
        OrbitModule::free(2, vec![OpBasis { name: "c".into(), degree: 0 }]).unwrap()
    }

    #[test]
    fn permutation_basics() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.rank(), i);
            assert!(p.compose(&p.inverse()).is_identity());
        }
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn act_examples() {
        let r = Ring::integers();
        let op = op2();
        let tau = Permutation::new(vec![1, 0]).unwrap();
        let tau_c = op.act_basis(tau.rank(), 0);
        let even = v_module(&r, &[0, 0]);
        let x = Lin::basis(&r, Tensor::new(0, vec![0, 1]));
        assert_eq!(act(&r, &op, &even, &Permutation::identity(2), &x).unwrap(), x);
        assert_eq!(act(&r, &op, &even, &tau, &x).unwrap(), Lin::basis(&r, Tensor::new(tau_c, vec![1, 0])));
        let odd = v_module(&r, &[1]);
        let y = Lin::basis(&r, Tensor::new(0, vec![0, 0]));
        assert_eq!(act(&r, &op, &odd, &tau, &y).unwrap(), Lin::single(&r, Tensor::new(tau_c, vec![0, 0]), r.int(-1)));
        assert!(act(&r, &op, &odd, &Permutation::identity(3), &y).is_err());
    }

    #[test]
    fn norm_examples() {
        let r = Ring::integers();
        let op = op2();
        let tau_c = op.act_basis(1, 0);
        let v = v_module(&r, &[0, 0]);
        let class = Lin::basis(&r, Tensor::new(0, vec![0, 1]));
        let n = norm(&r, &op, &v, &class).unwrap();
        let expected = Lin::basis(&r, Tensor::new(0, vec![0, 1])).add(&r, &Lin::basis(&r, Tensor::new(tau_c, vec![1, 0])));
        assert_eq!(n, expected);
        assert_eq!(norm_inverse(&r, &op, &v, &n).unwrap(), class);
        // representative replaced by σ·x gives the same norm
        let moved = Lin::basis(&r, Tensor::new(tau_c, vec![1, 0]));
        assert_eq!(norm(&r, &op, &v, &moved).unwrap(), n);
        let non_inv = Lin::basis(&r, Tensor::new(0, vec![0, 1]));
        assert!(matches!(norm_inverse(&r, &op, &v, &non_inv), Err(Error::NotInvariant(_))));
        // arity one: identity
        let op1 = OrbitModule::free(1, vec![OpBasis { name: "id".into(), degree: 0 }]).unwrap();
        let x = Lin::basis(&r, Tensor::new(0, vec![1]));
        assert_eq!(norm(&r, &op1, &v, &x).unwrap(), x);
    }

    #[test]
    fn normalize_examples() {
        let r = Ring::integers();
        let op = op2();
        let tau_c = op.act_basis(1, 0);
        let even = v_module(&r, &[0, 0]);
        assert_eq!(coinv_normalize(&op, &even, 0, &[1, 0]), Some((Tensor::new(0, vec![1, 0]), false)));
        assert_eq!(coinv_normalize(&op, &even, tau_c, &[1, 0]), Some((Tensor::new(0, vec![0, 1]), false)));
        let odd = v_module(&r, &[1]);
        assert_eq!(coinv_normalize(&op, &odd, tau_c, &[0, 0]), Some((Tensor::new(0, vec![0, 0]), true)));
    }

    #[test]
    fn non_free_nontrivial_rejected() {
        // S_2 acting on two points, one orbit of size one and one fixed: not free, not trivial
        let basis = vec![OpBasis { name: "a".into(), degree: 0 }, OpBasis { name: "b".into(), degree: 0 }, OpBasis { name: "c".into(), degree: 0 }];
        let action = vec![vec![0, 1, 2], vec![1, 0, 2]];
        assert!(matches!(OrbitModule::new(2, basis, action), Err(Error::Freeness(_))));
    }
}
