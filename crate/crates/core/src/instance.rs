//! Instance files: a versioned JSON description of a ring, a cooperad builder, a weighted
//! graded module and sparse coderivation components, plus simplex files for convolution
//! elements. Writing is canonical so that identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builders::{ass_cochains, barratt_eccles, com_cochains, CochainCooperad};
use crate::cofree::{check_coderivation_data, ClassMap, CofreeCoalgebra};
use crate::error::{Error, Result};
use crate::graded::{BasisElement, GradedModule, Lin};
use crate::mc_space::{Convolution, McSpace};
use crate::scalars::{Ring, RingSpec};
use crate::simplicial::{face_name, face_of, Face};
use crate::sym_action::Tensor;
use crate::twisting::HopfCofree;

pub const INSTANCE_SCHEMA: &str = "opmc-instance/1";
pub const SIMPLEX_SCHEMA: &str = "opmc-simplex/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CooperadSpec {
    Ass {
        max_arity: usize,
    },
    Com {
        max_arity: usize,
    },
    BarrattEccles {
        /// Filtration level `E_n`; absent for `E_∞`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        max_arity: usize,
        max_dim: usize,
    },
}

/// Whether coderivation entries are class values or values of an equivariant tensor map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    #[default]
    Class,
    Tensor,
}

/// `Q̃_r(outer ⊗ inputs) = value`, with the arity given by the number of inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub outer: String,
    pub inputs: Vec<String>,
    pub value: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoderivationSpec {
    #[serde(default)]
    pub level: Level,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: String,
    pub ring: RingSpec,
    pub cooperad: CooperadSpec,
    pub module: Vec<BasisElement>,
    pub w_max: u32,
    pub coderivation: CoderivationSpec,
}

/// A validated instance.
pub struct Instance {
    pub cooperad_spec: CooperadSpec,
    pub cochains: Option<Arc<CochainCooperad>>,
    pub hopf: HopfCofree,
    pub q: ClassMap,
}

impl Instance {
    pub fn ring(&self) -> &Ring {
        self.hopf.cofree().ring()
    }

    pub fn cofree(&self) -> &CofreeCoalgebra {
        self.hopf.cofree()
    }

    pub fn module(&self) -> &GradedModule {
        self.hopf.cofree().module()
    }

    /// The same instance with other coderivation components.
    pub fn with_q(&self, q: ClassMap) -> Instance {
        Instance {
            cooperad_spec: self.cooperad_spec.clone(),
            cochains: self.cochains.clone(),
            hopf: HopfCofree::new(self.cofree().clone(), self.hopf.hopf_arc().clone()).expect("already validated"),
            q,
        }
    }

    /// The convolution layer; needs Barratt-Eccles cochains.
    pub fn mc_space(&self) -> Result<McSpace> {
        let cc = self.cochains.clone().ok_or_else(|| {
            Error::Unsupported("the MC simplicial set needs a barratt-eccles cooperad (use n = 1 for Ass)".into())
        })?;
        McSpace::new(cc, self.cofree().clone(), self.q.clone())
    }

    /// Canonical file form with class-level entries in class order.
    pub fn to_file(&self) -> InstanceFile {
        let cf = self.cofree();
        let v = cf.module();
        let co = cf.cooperad();
        let entries = self
            .q
            .entries
            .iter()
            .map(|(t, y)| Entry {
                outer: co.component(t.vs.len()).name(t.c).to_string(),
                inputs: t.vs.iter().map(|&i| v.name(i).to_string()).collect(),
                value: y.iter().map(|(&i, c)| (v.name(i).to_string(), c.to_string())).collect(),
            })
            .collect();
        InstanceFile {
            schema: INSTANCE_SCHEMA.into(),
            ring: self.ring().spec().clone(),
            cooperad: self.cooperad_spec.clone(),
            module: v.basis().to_vec(),
            w_max: cf.w_max(),
            coderivation: CoderivationSpec { level: Level::Class, entries },
        }
    }
}

/// Read a file, naming it in the error.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_file(path)?)
}

pub fn load_simplex(path: &Path) -> Result<SimplexFile> {
    Ok(serde_json::from_str(&read_file(path)?)?)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    build_instance(&file)
}

pub fn build_instance(file: &InstanceFile) -> Result<Instance> {
    if file.schema != INSTANCE_SCHEMA {
        return Err(Error::Parse(format!("schema {:?}, expected {INSTANCE_SCHEMA:?}", file.schema)));
    }
    let ring = Ring::new(file.ring.clone())?;
    let (co, hopf, cochains) = match file.cooperad {
        CooperadSpec::Ass { max_arity } => {
            let (co, h) = ass_cochains(&ring, max_arity)?;
            (co, h, None)
        }
        CooperadSpec::Com { max_arity } => {
            let (co, h) = com_cochains(&ring, max_arity)?;
            (co, h, None)
        }
        CooperadSpec::BarrattEccles { n, max_arity, max_dim } => {
            let cc = barratt_eccles(&ring, n, max_arity, max_dim)?;
            (cc.cooperad.clone(), cc.hopf.clone(), Some(Arc::new(cc)))
        }
    };
    let v = GradedModule::new(ring.clone(), file.module.clone())?;
    let cf = CofreeCoalgebra::new(Arc::new(co), v, file.w_max)?;
    let q = coderivation_from_entries(&cf, &file.coderivation)?;
    check_coderivation_data(&cf, &q)?;
    let hopf = HopfCofree::new(cf, Arc::new(hopf))?;
    Ok(Instance { cooperad_spec: file.cooperad.clone(), cochains, hopf, q })
}

fn coderivation_from_entries(cf: &CofreeCoalgebra, spec: &CoderivationSpec) -> Result<ClassMap> {
    let ring = cf.ring();
    let v = cf.module();
    let mut raw = Vec::new();
    for (n, e) in spec.entries.iter().enumerate() {
        let at = |msg: String| Error::Parse(format!("coderivation entry {n}: {msg}"));
        let r = e.inputs.len();
        if r > cf.cooperad().max_arity() {
            return Err(at(format!("arity {r} beyond the cooperad truncation")));
        }
        let comp = cf.cooperad().component(r);
        let c = comp.index_of(&e.outer).ok_or_else(|| at(format!("no element {:?} in arity {r}", e.outer)))?;
        let vs = e
            .inputs
            .iter()
            .map(|s| v.index_of(s).ok_or_else(|| at(format!("unknown basis element {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let y = parse_value(v, ring, &e.value).map_err(|err| at(err.to_string()))?;
        raw.push((n, c, vs, y));
    }
    match spec.level {
        Level::Tensor => {
            let values: Vec<_> = raw.into_iter().map(|(_, c, vs, y)| (c, vs, y)).collect();
            ClassMap::from_tensor_values(cf, -1, &values)
        }
        Level::Class => {
            let mut q = ClassMap::new(-1);
            let mut seen: BTreeMap<Tensor, usize> = BTreeMap::new();
            for (n, c, vs, y) in raw {
                let Some((t, odd)) = cf.normalize(c, &vs) else {
                    if y.is_zero() {
                        continue;
                    }
                    return Err(Error::Completeness(format!(
                        "coderivation entry {n}: the class vanishes or lies above the weight bound"
                    )));
                };
                if let Some(prev) = seen.insert(t.clone(), n) {
                    return Err(Error::Parse(format!("coderivation entries {prev} and {n} name the same class")));
                }
                let y = if odd { y.neg(ring) } else { y };
                let mut single = ClassMap::new(-1);
                single.set(t.clone(), y.clone());
                check_coderivation_data(cf, &single).map_err(|e| match e {
                    Error::Completeness(m) => Error::Completeness(format!("coderivation entry {n}: {m}")),
                    other => other,
                })?;
                q.set(t, y);
            }
            Ok(q)
        }
    }
}

fn parse_value(v: &GradedModule, ring: &Ring, value: &BTreeMap<String, String>) -> Result<Lin<usize>> {
    let mut y = Lin::zero();
    for (name, coef) in value {
        let i = v.index_of(name).ok_or_else(|| Error::Parse(format!("unknown basis element {name:?}")))?;
        y.add_term(ring, i, ring.parse(coef)?);
    }
    Ok(y)
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(x)? + "\n")
}

/// An element of `V` written as `0`, `x`, `2*x + y` or `x, -1*y`.
pub fn parse_element(v: &GradedModule, ring: &Ring, s: &str) -> Result<Lin<usize>> {
    let mut y = Lin::zero();
    let s = s.trim();
    if s == "0" || s.is_empty() {
        return Ok(y);
    }
    for term in s.split([',', '+']) {
        let term = term.trim();
        let (coef, name) = match term.split_once('*') {
            Some((c, n)) => (ring.parse(c.trim())?, n.trim()),
            None => (ring.one(), term),
        };
        let i = v.index_of(name).ok_or_else(|| Error::Parse(format!("unknown basis element {name:?}")))?;
        y.add_term(ring, i, coef);
    }
    Ok(y)
}

/// Values of a convolution element on named faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexFile {
    pub schema: String,
    pub n: usize,
    /// The horn `Λⁿ_k` the values describe, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub values: BTreeMap<String, BTreeMap<String, String>>,
}

/// `e0`, `e012`, or `e0,10,11` for vertices above 9.
pub fn parse_face(s: &str) -> Result<Face> {
    let body = s.strip_prefix('e').ok_or_else(|| Error::Parse(format!("face {s:?} must start with e")))?;
    let parsed: Option<Vec<usize>> = if body.contains(',') {
        body.split(',').map(|p| p.trim().parse().ok()).collect()
    } else {
        body.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
    };
    let vs = parsed.ok_or_else(|| Error::Parse(format!("face {s:?} is not a list of vertices")))?;
    if vs.is_empty() || vs.windows(2).any(|w| w[0] >= w[1]) || vs.iter().any(|&x| x >= 32) {
        return Err(Error::Parse(format!("face {s:?} needs increasing vertices")));
    }
    Ok(face_of(&vs))
}

pub fn convolution_from_file(v: &GradedModule, ring: &Ring, file: &SimplexFile) -> Result<Convolution> {
    if file.schema != SIMPLEX_SCHEMA {
        return Err(Error::Parse(format!("schema {:?}, expected {SIMPLEX_SCHEMA:?}", file.schema)));
    }
    let mut psi = Convolution::zero(file.n, 0);
    for (name, value) in &file.values {
        let f = parse_face(name)?;
        if f > psi.full() {
            return Err(Error::Shape(format!("{name} is not a face of Δ^{}", file.n)));
        }
        psi.set(f, parse_value(v, ring, value)?);
    }
    psi.check(v)?;
    Ok(psi)
}

pub fn convolution_to_file(v: &GradedModule, psi: &Convolution, k: Option<usize>) -> SimplexFile {
    let values = psi
        .values
        .iter()
        .map(|(&f, y)| (face_name(f), y.iter().map(|(&i, c)| (v.name(i).to_string(), c.to_string())).collect()))
        .collect();
    SimplexFile { schema: SIMPLEX_SCHEMA.into(), n: psi.n, k, values }
}

/// `Z`, `Z/8` or `Q`.
pub fn parse_ring(s: &str) -> Result<Ring> {
    match s.trim() {
        "Z" | "z" => Ok(Ring::integers()),
        "Q" | "q" => Ok(Ring::rationals()),
        other => {
            let m = other
                .strip_prefix("Z/")
                .or_else(|| other.strip_prefix("z/"))
                .and_then(|m| m.parse::<u64>().ok())
                .ok_or_else(|| Error::Parse(format!("ring {other:?}: expected Z, Z/m or Q")))?;
            Ring::modular(m)
        }
    }
}
