//! JSON and DOT formats, and atomic file output.
//!
//! Subspaces are stored as `{"p": 2, "ambient": 6, "rows": [[...]]}` with the
//! rows in reduced row echelon form, so equal subspaces serialize to equal
//! text.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::apartments::{Apartment, Certificate, EmbeddingMap, Theorem};
use crate::error::{Error, Result};
use crate::graphs::{pj_vertices, Graph, SignedSet};
use crate::linalg::{rref_canonical, Prime, RowSpace};
use crate::polar::{FormKind, PolarSpace, SingularSubspace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub p: u32,
    pub ambient: usize,
    pub rows: Vec<Vec<u8>>,
}

impl From<&RowSpace> for SubspaceJson {
    fn from(s: &RowSpace) -> Self {
        SubspaceJson {
            p: s.modulus().get(),
            ambient: s.ambient_dim(),
            rows: s.rows().to_vec(),
        }
    }
}

impl SubspaceJson {
    pub fn to_space(&self) -> Result<RowSpace> {
        rref_canonical(Prime::new(self.p)?, self.ambient, &self.rows)
    }

    pub fn to_singular(&self, space: &PolarSpace) -> Result<SingularSubspace> {
        if self.p != space.modulus().get() {
            return Err(Error::ModulusMismatch(self.p, space.modulus().get()));
        }
        if self.ambient != space.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.ambient_dim(),
                found: self.ambient,
            });
        }
        space.singular(self.to_space()?)
    }
}

/// Written at the top of every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub command: String,
}

impl Header {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Header {
            tool: "polaris".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            command: command.into(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub kind: FormKind,
    pub n: usize,
    pub p: u32,
}

impl SpaceJson {
    pub fn of(space: &PolarSpace) -> Self {
        SpaceJson {
            kind: space.kind(),
            n: space.rank(),
            p: space.modulus().get(),
        }
    }

    pub fn build(&self) -> Result<PolarSpace> {
        PolarSpace::build(self.kind, self.n, self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<SignedSet>,
    pub subspace: SubspaceJson,
}

/// A set of singular subspaces of one level, optionally labelled by the
/// vertices of `PJ(l,m)`. Both `polaris apartment` output and `polaris
/// verify --input` use this shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceSetFile {
    pub header: Header,
    pub space: SpaceJson,
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<SubspaceJson>,
    pub members: Vec<MemberJson>,
}

impl SubspaceSetFile {
    pub fn from_apartment(header: Header, space: &PolarSpace, apt: &Apartment) -> Self {
        SubspaceSetFile {
            header,
            space: SpaceJson::of(space),
            level: apt.level,
            l: Some(apt.l),
            m: Some(apt.m),
            base: Some(apt.base.space().into()),
            members: apt
                .labels
                .iter()
                .zip(&apt.members)
                .map(|(v, x)| MemberJson {
                    label: Some(*v),
                    subspace: x.space().into(),
                })
                .collect(),
        }
    }

    pub fn from_members(header: Header, space: &PolarSpace, level: usize, members: &[SingularSubspace]) -> Self {
        SubspaceSetFile {
            header,
            space: SpaceJson::of(space),
            level,
            l: None,
            m: None,
            base: None,
            members: members
                .iter()
                .map(|x| MemberJson {
                    label: None,
                    subspace: x.space().into(),
                })
                .collect(),
        }
    }

    pub fn parse_members(&self, space: &PolarSpace) -> Result<Vec<SingularSubspace>> {
        let xs = self
            .members
            .iter()
            .map(|m| m.subspace.to_singular(space))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = xs.iter().find(|x| x.rank() != self.level + 1) {
            return Err(Error::param(format!(
                "member of projective dimension {} in a level-{} file",
                bad.proj_dim(),
                self.level
            )));
        }
        Ok(xs)
    }

    /// The labelling as a map, when every member carries a label.
    pub fn labelled_map(&self, space: &PolarSpace) -> Result<Option<EmbeddingMap>> {
        let (Some(l), Some(m)) = (self.l, self.m) else {
            return Ok(None);
        };
        if self.members.iter().any(|x| x.label.is_none()) {
            return Ok(None);
        }
        let verts = pj_vertices(l, m)?;
        let xs = self.parse_members(space)?;
        let mut images = vec![None; verts.len()];
        for (mj, x) in self.members.iter().zip(xs) {
            let v = mj.label.expect("checked above");
            let i = verts
                .binary_search(&v)
                .map_err(|_| Error::param(format!("label {v} is not a vertex of PJ({l},{m})")))?;
            if images[i].replace(x).is_some() {
                return Err(Error::param(format!("label {v} occurs twice")));
            }
        }
        let images = images
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::param("labels do not cover PJ(l,m)"))?;
        EmbeddingMap::new(l, m, self.level, images).map(Some)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub label: i32,
    pub subspace: SubspaceJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanJson {
    pub vertex: SignedSet,
    pub generators: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalJson {
    pub vertex: SignedSet,
    pub base: SubspaceJson,
    pub basis_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub header: Header,
    pub theorem: Theorem,
    pub space: SpaceJson,
    pub level: usize,
    pub l: usize,
    pub m: usize,
    pub base_dim: i32,
    pub base: SubspaceJson,
    pub quotient_rank: usize,
    pub generators: Vec<GeneratorJson>,
    pub spanning: Vec<SpanJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub local: Vec<LocalJson>,
}

impl CertificateFile {
    pub fn new(header: Header, theorem: Theorem, space: &PolarSpace, cert: &Certificate) -> Self {
        CertificateFile {
            header,
            theorem,
            space: SpaceJson::of(space),
            level: cert.level,
            l: cert.l,
            m: cert.m,
            base_dim: cert.base.proj_dim(),
            base: cert.base.space().into(),
            quotient_rank: cert.quotient_rank,
            generators: cert
                .generators
                .iter()
                .enumerate()
                .map(|(i, q)| GeneratorJson {
                    label: crate::apartments::frame_label(i),
                    subspace: q.space().into(),
                })
                .collect(),
            spanning: cert
                .spanning
                .iter()
                .map(|e| SpanJson {
                    vertex: e.vertex,
                    generators: e.generators.iter().map(|&i| crate::apartments::frame_label(i)).collect(),
                })
                .collect(),
            local: cert
                .local
                .iter()
                .map(|c| LocalJson {
                    vertex: c.vertex,
                    base: c.base.space().into(),
                    basis_size: c.basis.len(),
                })
                .collect(),
        }
    }
}

/// Compact row notation, e.g. `100100/010010`.
pub fn rows_label(s: &RowSpace) -> String {
    if s.is_zero() {
        return "0".into();
    }
    s.rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(if s.modulus().get() > 9 { "," } else { "" }))
        .collect::<Vec<_>>()
        .join("/")
}

/// Undirected DOT with vertex ids `0..order` in registry order.
pub fn graph_dot(name: &str, labels: &[String], g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{name}\" {{");
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(out, "  {i} [label=\"{label}\"];");
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub header: Header,
    pub description: String,
    pub order: usize,
    pub vertices: Vec<serde_json::Value>,
    pub adjacency: Vec<Vec<usize>>,
}

impl GraphFile {
    pub fn new(header: Header, description: String, vertices: Vec<serde_json::Value>, g: &Graph) -> Self {
        GraphFile {
            header,
            description,
            order: g.order(),
            vertices,
            adjacency: (0..g.order()).map(|v| g.neighbors(v).collect()).collect(),
        }
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.order);
        for (a, nb) in self.adjacency.iter().enumerate() {
            for &b in nb {
                if a < b {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Inconsistent(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartments::apartment;

    #[test]
    fn subspace_json_round_trip() {
        let s = PolarSpace::build(FormKind::Symplectic, 3, 2).unwrap();
        let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
        let file = SubspaceSetFile::from_apartment(Header::new("test", 0), &s, &apt);
        let text = to_json(&file).unwrap();
        let back: SubspaceSetFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.parse_members(&s).unwrap(), apt.members);
        assert_eq!(back.labelled_map(&s).unwrap().unwrap(), apt.embedding());
    }

    #[test]
    fn non_canonical_rows_are_reduced() {
        let s = PolarSpace::build(FormKind::Symplectic, 2, 2).unwrap();
        let j = SubspaceJson {
            p: 2,
            ambient: 4,
            rows: vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0]],
        };
        let x = j.to_singular(&s).unwrap();
        assert_eq!(SubspaceJson::from(x.space()).rows, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    }

    #[test]
    fn dot_is_plain() {
        let g = Graph::from_fn(3, |a, b| a.abs_diff(b) == 1);
        let dot = graph_dot("path", &["a".into(), "b".into(), "c".into()], &g);
        assert_eq!(dot, "graph \"path\" {\n  0 [label=\"a\"];\n  1 [label=\"b\"];\n  2 [label=\"c\"];\n  0 -- 1;\n  1 -- 2;\n}\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
    }
}
