//! Instance files, run reports and DOT side files.
//!
//! An instance file is `{formatVersion, kind, seed?, payload}`; the payload
//! schema depends on the kind.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construct::{primitive_root_instance, AdjoinRoot, ConstructError, GofgJson, GraphOfFreeGroups};
use crate::gen::{random_gos, GenParams};
use crate::gos::{Gos, GosError, GosJson};
use crate::reports::Claim;
use crate::uot::{random_union, UnionOfTrees, UotParams};
use crate::words::{format_letters, Letter, Word, WordError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AdjoinRoot,
    HnnConjugacy,
    RawGos,
    UnionOfTrees,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::AdjoinRoot => "adjoin-root",
            Kind::HnnConjugacy => "hnn-conjugacy",
            Kind::RawGos => "raw-gos",
            Kind::UnionOfTrees => "union-of-trees",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        [Kind::AdjoinRoot, Kind::HnnConjugacy, Kind::RawGos, Kind::UnionOfTrees]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceFile {
    pub format_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub payload: serde_json::Value,
}

/// Adjoin-root payload: `{rank, roots: [{gamma, k}], hom?: {base, roots}}`.
/// Without `hom` a homomorphism is searched for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjoinRootJson {
    pub rank: usize,
    pub roots: Vec<RootJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<RootHomJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootJson {
    pub gamma: String,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootHomJson {
    pub base: Vec<String>,
    pub roots: Vec<String>,
}

pub type RootHom = (Vec<Vec<Letter>>, Vec<Vec<Letter>>);

#[derive(Clone, Debug)]
pub enum Instance {
    AdjoinRoot {
        data: AdjoinRoot,
        hom: Option<RootHom>,
    },
    HnnConjugacy(GraphOfFreeGroups),
    /// Not validated: `validate` reports on malformed spaces.
    RawGos {
        gos: Gos,
        rank: Option<usize>,
    },
    UnionOfTrees(UnionOfTrees),
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("not an instance file: {0}")]
    Syntax(String),
    #[error("unsupported formatVersion {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("bad {0} payload: {1}")]
    Payload(&'static str, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl LoadError {
    /// Parse-level failures as opposed to well-formed input that breaks a
    /// precondition.
    pub fn is_parse(&self) -> bool {
        !matches!(self, LoadError::Precondition(_))
    }
}

fn words_of(list: &[String], rank: usize) -> Result<Vec<Vec<Letter>>, WordError> {
    list.iter().map(|s| Word::parse(s, rank).map(|w| w.0)).collect()
}

fn text(w: &[Letter]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        format_letters(w)
    }
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::AdjoinRoot { .. } => Kind::AdjoinRoot,
            Instance::HnnConjugacy(_) => Kind::HnnConjugacy,
            Instance::RawGos { .. } => Kind::RawGos,
            Instance::UnionOfTrees(_) => Kind::UnionOfTrees,
        }
    }

    pub fn load(text: &str) -> Result<(Instance, Option<u64>), LoadError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| LoadError::Syntax(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(LoadError::Version(file.format_version));
        }
        Ok((Instance::from_payload(file.kind, file.payload)?, file.seed))
    }

    pub fn from_payload(kind: Kind, payload: serde_json::Value) -> Result<Instance, LoadError> {
        let bad = |e: String| LoadError::Payload(kind.name(), e);
        match kind {
            Kind::AdjoinRoot => {
                let j: AdjoinRootJson = serde_json::from_value(payload).map_err(|e| bad(e.to_string()))?;
                let mut roots = Vec::new();
                for r in &j.roots {
                    roots.push((Word::parse(&r.gamma, j.rank).map_err(|e| bad(e.to_string()))?.0, r.k));
                }
                let data = AdjoinRoot { rank: j.rank, roots };
                data.check().map_err(|e| LoadError::Precondition(e.to_string()))?;
                let hom = match &j.hom {
                    Some(h) => {
                        if h.base.len() != j.rank || h.roots.len() != j.roots.len() {
                            return Err(bad("hom needs one image per base generator and per root".into()));
                        }
                        let base = words_of(&h.base, j.rank).map_err(|e| bad(e.to_string()))?;
                        let roots = words_of(&h.roots, j.rank).map_err(|e| bad(e.to_string()))?;
                        Some((base, roots))
                    }
                    None => None,
                };
                Ok(Instance::AdjoinRoot { data, hom })
            }
            Kind::HnnConjugacy => {
                let j: GofgJson = serde_json::from_value(payload).map_err(|e| bad(e.to_string()))?;
                let d = j.to_data().map_err(|e| match e {
                    ConstructError::Word(w) => bad(w.to_string()),
                    e => LoadError::Precondition(e.to_string()),
                })?;
                Ok(Instance::HnnConjugacy(d))
            }
            Kind::RawGos => {
                let j: GosJson = serde_json::from_value(payload).map_err(|e| bad(e.to_string()))?;
                let gos = j.to_gos_unchecked().map_err(|e| match e {
                    GosError::Word(_) => bad(e.to_string()),
                    e => LoadError::Precondition(e.to_string()),
                })?;
                Ok(Instance::RawGos { gos, rank: j.rank })
            }
            Kind::UnionOfTrees => {
                let z: UnionOfTrees = serde_json::from_value(payload).map_err(|e| bad(e.to_string()))?;
                Ok(Instance::UnionOfTrees(z))
            }
        }
    }

    /// The normalized instance file.
    pub fn to_file(&self, seed: Option<u64>) -> InstanceFile {
        let payload = match self {
            Instance::AdjoinRoot { data, hom } => serde_json::to_value(AdjoinRootJson {
                rank: data.rank,
                roots: data.roots.iter().map(|(g, k)| RootJson { gamma: text(g), k: *k }).collect(),
                hom: hom.as_ref().map(|(b, r)| RootHomJson {
                    base: b.iter().map(|w| text(w)).collect(),
                    roots: r.iter().map(|w| text(w)).collect(),
                }),
            }),
            Instance::HnnConjugacy(d) => serde_json::to_value(GofgJson::from_data(d)),
            Instance::RawGos { gos, rank } => serde_json::to_value(GosJson::from_gos(gos, *rank)),
            Instance::UnionOfTrees(z) => serde_json::to_value(z),
        }
        .expect("instance payloads serialize");
        InstanceFile {
            format_version: FORMAT_VERSION,
            kind: self.kind(),
            seed,
            payload,
        }
    }
}

/// Generated instance of the given kind; identical seeds give identical
/// files.
pub fn generate(kind: Kind, seed: u64) -> Option<InstanceFile> {
    let inst = match kind {
        Kind::RawGos => {
            let g = random_gos(seed, &GenParams::default());
            Instance::RawGos {
                gos: g.built.gos,
                rank: Some(g.complex.rank),
            }
        }
        Kind::UnionOfTrees => Instance::UnionOfTrees(random_union(seed, &UotParams::default())),
        Kind::AdjoinRoot => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = 2 + (seed % 2) as usize;
            let p = primitive_root_instance(2, k, &mut rng);
            let hom = (p.gofg.images[0].clone(), p.gofg.images[1..].iter().map(|i| i[0].clone()).collect());
            Instance::AdjoinRoot { data: p.data, hom: Some(hom) }
        }
        Kind::HnnConjugacy => return None,
    };
    Some(inst.to_file(Some(seed)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub format_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    pub verdict: bool,
    pub summary: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<Claim>,
    pub details: serde_json::Value,
    /// The normalized instance; rerunning the command on it reproduces the
    /// verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<String, u64>,
}

impl RunReport {
    pub fn new(command: &str, kind: Option<Kind>) -> RunReport {
        RunReport {
            format_version: FORMAT_VERSION,
            command: command.into(),
            kind,
            verdict: true,
            summary: Vec::new(),
            claims: Vec::new(),
            details: serde_json::Value::Null,
            instance: None,
            timings_ms: BTreeMap::new(),
        }
    }
}

/// Trees as clusters of their vertices, rectangles as dashed edges joining
/// the first and last vertices of their two sides.
pub fn union_to_dot(z: &UnionOfTrees) -> String {
    let mut s = String::from("graph union {\n");
    for (t, tree) in z.trees.iter().enumerate() {
        let _ = writeln!(s, "  subgraph cluster_t{t} {{\n    label=\"S{t}\";");
        for v in 0..tree.n() {
            let shape = if tree.is_y(v) {
                "box"
            } else if tree.boundary[v] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(s, "    t{t}_{v} [label=\"{v}\", shape={shape}];");
        }
        for (v, p) in tree.parent.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(s, "    t{t}_{p} -- t{t}_{v};");
            }
        }
        s.push_str("  }\n");
    }
    for (r, rect) in z.rectangles.iter().enumerate() {
        for (a, b) in [(rect.minus.first(), rect.plus.first()), (rect.minus.last(), rect.plus.last())] {
            let _ = writeln!(s, "  t{}_{} -- t{}_{} [style=dashed, label=\"R{r}\"];", a.0, a.1, b.0, b.1);
        }
    }
    s.push_str("}\n");
    s
}
