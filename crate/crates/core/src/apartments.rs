//! Apartments, embeddings of polar Johnson graphs into Grassmann graphs, and
//! the verifiers that recognize apartments from the induced graph structure.
//!
//! Frames are indexed by the signed set `J = {±1..±l}`: the frame point at
//! position `2(t−1)` carries the label `+t` and its σ-partner carries `−t`.
//! An [`EmbeddingMap`] lists one image per vertex of `PJ(l,m)`, in the order
//! of [`pj_vertices`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{
    big_star_members, halfcube_split_and_g, isomorphism, pj_adjacent, pj_cliques, pj_graph, pj_vertices,
    top_members, HalfCubeSplit, SignedSet, ISO_BUDGET,
};
use crate::grassmann::{adjacent_unchecked, independent, line_through, locally_independent, GrassmannGraph};
use crate::linalg::RowSpace;
use crate::polar::{Frame, PolarSpace, PointId, Quotient, SingularSubspace};

/// Position in the frame of the point labelled `e`.
pub fn frame_index(e: i32) -> usize {
    let t = e.unsigned_abs() as usize - 1;
    2 * t + usize::from(e < 0)
}

/// Label of the frame point at `index`.
pub fn frame_label(index: usize) -> i32 {
    let t = (index / 2 + 1) as i32;
    if index.is_multiple_of(2) {
        t
    } else {
        -t
    }
}

fn meet_all<'a>(xs: impl IntoIterator<Item = &'a SingularSubspace>) -> Option<RowSpace> {
    let mut it = xs.into_iter();
    let first = it.next()?.space().clone();
    Some(it.fold(first, |acc, x| acc.meet(x)))
}

fn join_all<'a>(xs: impl IntoIterator<Item = &'a SingularSubspace>) -> Option<RowSpace> {
    let mut it = xs.into_iter();
    let first = it.next()?.space().clone();
    Some(it.fold(first, |acc, x| acc.join(x)))
}

fn sorted_set(xs: &[SingularSubspace]) -> Vec<SingularSubspace> {
    let mut v = xs.to_vec();
    v.sort();
    v.dedup();
    v
}

/// A map from the vertices of `PJ(l,m)` to `𝒢_level`.
///
/// Maps produced by descent share this shape but need not be embeddings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingMap {
    pub l: usize,
    pub m: usize,
    pub level: usize,
    pub images: Vec<SingularSubspace>,
}

impl EmbeddingMap {
    pub fn new(l: usize, m: usize, level: usize, images: Vec<SingularSubspace>) -> Result<Self> {
        let count = pj_vertices(l, m)?.len();
        if images.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                found: images.len(),
            });
        }
        if let Some(bad) = images.iter().find(|x| x.rank() != level + 1) {
            return Err(Error::param(format!(
                "image of projective dimension {} in a map to level {level}",
                bad.proj_dim()
            )));
        }
        Ok(EmbeddingMap { l, m, level, images })
    }

    pub fn vertices(&self) -> Vec<SignedSet> {
        pj_vertices(self.l, self.m).expect("parameters were validated")
    }

    /// `v ↦ f(perm[v])`, i.e. the composition `f ∘ g` for a vertex permutation `g`.
    pub fn compose(&self, perm: &[usize]) -> EmbeddingMap {
        EmbeddingMap {
            images: perm.iter().map(|&j| self.images[j].clone()).collect(),
            ..self.clone()
        }
    }

    pub fn image_set(&self) -> Vec<SingularSubspace> {
        sorted_set(&self.images)
    }
}

/// Injective, and adjacent exactly when the source vertices are.
pub fn is_embedding(space: &PolarSpace, f: &EmbeddingMap) -> bool {
    let verts = f.vertices();
    if f.image_set().len() != f.images.len() {
        return false;
    }
    (0..verts.len()).into_par_iter().all(|i| {
        (0..i).all(|j| {
            pj_adjacent(f.l, f.m, verts[i], verts[j]) == adjacent_unchecked(space, &f.images[i], &f.images[j])
        })
    })
}

/// The set spanned by subsets of an `l`-frame inside a parabolic subspace
/// `[N⟩_level`; with `N = 0` and `l = n` this is an ordinary apartment.
#[derive(Clone, Debug)]
pub struct Apartment {
    pub base: SingularSubspace,
    /// `N + p_j` for the frame points, in frame order.
    pub generators: Vec<SingularSubspace>,
    pub level: usize,
    pub l: usize,
    pub m: usize,
    pub labels: Vec<SignedSet>,
    pub members: Vec<SingularSubspace>,
}

impl Apartment {
    pub fn from_generators(
        space: &PolarSpace,
        base: SingularSubspace,
        generators: Vec<SingularSubspace>,
        level: usize,
    ) -> Result<Self> {
        if generators.is_empty() || !generators.len().is_multiple_of(2) {
            return Err(Error::param("an l-frame needs a positive even number of generators"));
        }
        let l = generators.len() / 2;
        if level < base.rank() || level - base.rank() >= l {
            return Err(Error::param(format!(
                "level {level} is incompatible with a base of dimension {} and {l} frame pairs",
                base.proj_dim()
            )));
        }
        let m = level - base.rank();
        let labels = pj_vertices(l, m)?;
        let members = labels
            .iter()
            .map(|v| {
                let mut rows = base.rows().to_vec();
                for e in v.elements() {
                    rows.extend(generators[frame_index(e)].rows().iter().cloned());
                }
                let x = space.singular_from_rows(&rows)?;
                if x.rank() != level + 1 {
                    return Err(Error::Inconsistent(format!("generators of {v} are dependent")));
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Apartment {
            base,
            generators,
            level,
            l,
            m,
            labels,
            members,
        })
    }

    pub fn embedding(&self) -> EmbeddingMap {
        EmbeddingMap {
            l: self.l,
            m: self.m,
            level: self.level,
            images: self.members.clone(),
        }
    }

    pub fn member_set(&self) -> Vec<SingularSubspace> {
        sorted_set(&self.members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The apartment (or `l`-frame-generated set) of level `k` defined by a frame.
pub fn apartment(space: &PolarSpace, frame: &Frame, k: usize) -> Result<Apartment> {
    frame.validate(space)?;
    let base = SingularSubspace::new_unchecked(RowSpace::zero(space.modulus(), space.ambient_dim()));
    let generators = frame.points.iter().map(|&q| space.point_space(q)).collect();
    Apartment::from_generators(space, base, generators, k)
}

/// The apartment of `[N⟩_k` defined by a frame of the quotient `N^⊥/N`.
pub fn parabolic_apartment(space: &PolarSpace, quotient: &Quotient, frame: &Frame, k: usize) -> Result<Apartment> {
    frame.validate(quotient.space())?;
    let generators = frame.points.iter().map(|&q| quotient.lift_point(q)).collect();
    Apartment::from_generators(space, quotient.base().clone(), generators, k)
}

/// Standard construction: `N = ⟨e_1..e_{k−m}⟩` and the first `l` pairs of the
/// quotient's standard frame.
pub fn standard_parabolic(space: &PolarSpace, k: usize, m: usize, l: usize) -> Result<Apartment> {
    if m > k {
        return Err(Error::param(format!("m = {m} exceeds k = {k}")));
    }
    let std = space.standard_frame();
    let base_points: Vec<PointId> = (0..k - m).map(|i| std.points[2 * i]).collect();
    if base_points.len() >= space.rank() {
        return Err(Error::param("base subspace would be maximal"));
    }
    let base = space.span_singular(&base_points)?;
    let quotient = space.quotient(&base)?;
    let qframe = quotient.space().standard_frame();
    if l == 0 || l > qframe.l() {
        return Err(Error::param(format!(
            "l = {l} exceeds the rank {} of the quotient",
            qframe.l()
        )));
    }
    let sub = Frame::from_pairs(qframe.points[..2 * l].to_vec());
    parabolic_apartment(space, &quotient, &sub, k)
}

/// The two shapes of a `PJ(l,0)` image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PjZeroCase {
    /// An `l`-frame of the big star `[S⟩_k`.
    BigStarFrame { s: SingularSubspace, l: usize },
    /// A frame of `[N,M]_k` with `dim N = k−2`, `dim M = k+2`.
    RankThreeFrame { n: SingularSubspace, m: SingularSubspace },
}

pub fn classify_pj_l0_image(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<PjZeroCase> {
    if xs.len() < 6 || !xs.len().is_multiple_of(2) {
        return Err(Error::param(format!("{} elements cannot form PJ(l,0) with l >= 3", xs.len())));
    }
    let l = xs.len() / 2;
    let g = GrassmannGraph::induced(space, xs.to_vec())?;
    let (_, pattern) = pj_graph(l, 0)?;
    if isomorphism(&pattern, &g.graph, ISO_BUDGET)?.is_none() {
        return Err(Error::param(format!("the set does not induce PJ({l},0)")));
    }
    let k = xs[0].rank() - 1;
    let n = space.rank();
    let x = &xs[0];
    let partner = |i: usize| (0..xs.len()).find(|&j| j != i && !g.graph.has_edge(i, j)).expect("PJ(l,0) pairs vertices");
    let y = &xs[partner(0)];
    let meet = x.meet(y);
    let join = x.join(y);
    if meet.rank() == k && !space.is_totally_singular(&join) {
        let s = SingularSubspace::new_unchecked(meet);
        if l + k > n {
            return Err(Error::Inconsistent(format!("PJ({l},0) image in a big star of rank {}", n - k)));
        }
        if let Some(bad) = xs.iter().find(|z| !z.includes(&s)) {
            return Err(Error::Inconsistent(format!("{bad:?} leaves the big star")));
        }
        let q = space.quotient(&s)?;
        let mut points = vec![PointId(0); xs.len()];
        let mut next = 0;
        let mut seen = vec![false; xs.len()];
        for i in 0..xs.len() {
            if seen[i] {
                continue;
            }
            let j = partner(i);
            seen[i] = true;
            seen[j] = true;
            points[next] = q.project_point(&xs[i])?;
            points[next + 1] = q.project_point(&xs[j])?;
            next += 2;
        }
        Frame::from_pairs(points).validate(q.space())?;
        return Ok(PjZeroCase::BigStarFrame { s, l });
    }
    if k >= 1 && meet.rank() + 1 == k {
        if l != 3 || join.rank() != k + 3 || !space.is_totally_singular(&join) {
            return Err(Error::Inconsistent("second case needs l = 3 inside a singular (k+2)-space".into()));
        }
        if let Some(bad) = xs.iter().find(|z| !z.includes(&meet) || !join.includes(z)) {
            return Err(Error::Inconsistent(format!("{bad:?} leaves the interval")));
        }
        return Ok(PjZeroCase::RankThreeFrame {
            n: SingularSubspace::new_unchecked(meet),
            m: SingularSubspace::new_unchecked(join),
        });
    }
    Err(Error::Inconsistent("PJ(l,0) image matches neither case".into()))
}

/// Containment data for the image of one clique.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CliqueVerdict {
    pub injective: bool,
    pub independent: bool,
    pub in_top: bool,
    pub in_star: bool,
}

/// What a map does to the cliques and big stars of `PJ(l,m)`.
#[derive(Clone, Debug)]
pub struct CliqueReport {
    /// Aligned with the tops of [`pj_cliques`].
    pub tops: Vec<CliqueVerdict>,
    /// Aligned with the stars of [`pj_cliques`].
    pub stars: Vec<CliqueVerdict>,
    /// Tops go injectively to independent subsets of tops.
    pub t1: bool,
    /// Images of adjacent tops lie in distinct tops.
    pub t2: bool,
    /// For each big star, the base of the unique big star of `𝒢_k` containing its image.
    pub big_stars: Vec<Option<SingularSubspace>>,
    /// Base of a big star containing the whole image.
    pub image_big_star: Option<SingularSubspace>,
}

impl CliqueReport {
    pub fn cliques_independent(&self) -> bool {
        self.tops.iter().chain(&self.stars).all(|c| c.injective && c.independent)
    }

    pub fn stars_in_stars(&self) -> bool {
        self.stars.iter().all(|c| c.in_star)
    }

    pub fn big_stars_in_big_stars(&self) -> bool {
        self.big_stars.iter().all(Option::is_some)
    }
}

fn clique_verdict(space: &PolarSpace, images: &[SingularSubspace]) -> Result<CliqueVerdict> {
    let n = space.rank();
    let r = images[0].rank();
    let injective = sorted_set(images).len() == images.len();
    let join = join_all(images).expect("cliques are nonempty");
    let meet = meet_all(images).expect("cliques are nonempty");
    let singular = space.is_totally_singular(&join);
    Ok(CliqueVerdict {
        injective,
        independent: injective && independent(space, images)?,
        in_top: singular && join.rank() == r + 1,
        in_star: singular && meet.rank() + 1 == r && r + 2 <= n,
    })
}

pub fn check_clique_images(space: &PolarSpace, f: &EmbeddingMap) -> Result<CliqueReport> {
    let verts = f.vertices();
    let image = |v: &SignedSet| &f.images[verts.binary_search(v).expect("vertex of PJ(l,m)")];
    let fam = pj_cliques(f.l, f.m)?;
    let tops = fam
        .tops
        .par_iter()
        .map(|(_, members)| {
            let imgs: Vec<SingularSubspace> = members.iter().map(|v| image(v).clone()).collect();
            clique_verdict(space, &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    let stars = fam
        .stars
        .par_iter()
        .map(|(_, members)| {
            let imgs: Vec<SingularSubspace> = members.iter().map(|v| image(v).clone()).collect();
            clique_verdict(space, &imgs)
        })
        .collect::<Result<Vec<_>>>()?;
    let t1 = tops.iter().all(|c| c.injective && c.independent && c.in_top);
    let top_spaces: Vec<RowSpace> = fam
        .tops
        .iter()
        .map(|(_, members)| join_all(members.iter().map(image)).expect("nonempty"))
        .collect();
    let t2 = t1
        && (0..fam.tops.len()).all(|i| {
            (0..i).all(|j| !pj_adjacent(f.l, f.m + 1, fam.tops[i].0, fam.tops[j].0) || top_spaces[i] != top_spaces[j])
        });
    let k = f.level;
    let big_stars = fam
        .big_stars
        .iter()
        .map(|(_, members)| {
            let meet = meet_all(members.iter().map(image)).expect("nonempty");
            (meet.rank() == k).then(|| SingularSubspace::new_unchecked(meet))
        })
        .collect();
    let all = meet_all(&f.images).expect("nonempty");
    let image_big_star = (all.rank() == k).then(|| SingularSubspace::new_unchecked(all));
    Ok(CliqueReport {
        tops,
        stars,
        t1,
        t2,
        big_stars,
        image_big_star,
    })
}

/// One level of the descent: `S ↦ ⋂ f(ℬ(S))` over the big stars of `PJ(l,m)`.
pub fn descend(f: &EmbeddingMap) -> Result<EmbeddingMap> {
    if f.m == 0 || f.level == 0 {
        return Err(Error::param("descent needs m >= 1 and level >= 1"));
    }
    let verts = f.vertices();
    let lower = pj_vertices(f.l, f.m - 1)?;
    let images = lower
        .iter()
        .map(|&s| {
            let star = big_star_members(f.l, s);
            let imgs = star.iter().map(|v| &f.images[verts.binary_search(v).expect("vertex")]);
            let meet = meet_all(imgs).expect("big stars are nonempty");
            if meet.rank() != f.level {
                return Err(Error::SpecialMap {
                    vertex: s.to_string(),
                    detail: format!(
                        "big star images meet in projective dimension {}, expected {}",
                        meet.proj_dim(),
                        f.level as i32 - 1
                    ),
                });
            }
            Ok(SingularSubspace::new_unchecked(meet))
        })
        .collect::<Result<Vec<_>>>()?;
    let down = EmbeddingMap {
        l: f.l,
        m: f.m - 1,
        level: f.level - 1,
        images,
    };
    for (i, v) in verts.iter().enumerate() {
        for e in v.elements() {
            let s = v.remove(e);
            let low = &down.images[lower.binary_search(&s).expect("vertex")];
            if !f.images[i].includes(low) {
                return Err(Error::SpecialMap {
                    vertex: s.to_string(),
                    detail: format!("image is not incident with the image of {v}"),
                });
            }
        }
    }
    Ok(down)
}

/// The verifier clause that failed.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Hypothesis,
    GraphIsomorphism,
    CliqueIndependence,
    LocalIndependence,
    TopsInTops,
    DistinctTops,
    Descent,
    BaseDimension,
    BaseContainment,
    QuotientFrame,
    SpanningTable,
    FullApartment,
    LocalCertificate,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Hypothesis => "hypothesis",
            Clause::GraphIsomorphism => "graph-isomorphism",
            Clause::CliqueIndependence => "clique-independence",
            Clause::LocalIndependence => "local-independence",
            Clause::TopsInTops => "tops-in-tops",
            Clause::DistinctTops => "distinct-tops",
            Clause::Descent => "descent",
            Clause::BaseDimension => "base-dimension",
            Clause::BaseContainment => "base-containment",
            Clause::QuotientFrame => "quotient-frame",
            Clause::SpanningTable => "spanning-table",
            Clause::FullApartment => "full-apartment",
            Clause::LocalCertificate => "local-certificate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub clause: Clause,
    pub detail: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.detail)
    }
}

/// A verifier outcome: the value, or the clause that failed.
pub type Checked<T> = std::result::Result<T, Rejection>;

fn reject<T>(clause: Clause, detail: impl Into<String>) -> Result<Checked<T>> {
    Ok(Err(Rejection {
        clause,
        detail: detail.into(),
    }))
}

macro_rules! check {
    ($e:expr) => {
        match $e? {
            Ok(v) => v,
            Err(r) => return Ok(Err(r)),
        }
    };
}

/// One row of the spanning table: a vertex and the generators whose span is its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanEntry {
    pub vertex: SignedSet,
    pub generators: Vec<usize>,
    pub image: SingularSubspace,
}

/// The data `(N, Q_1..Q_2l)` recovered from a map, with its spanning table.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub l: usize,
    pub m: usize,
    pub level: usize,
    pub base: SingularSubspace,
    /// `Q_j`, in frame order.
    pub generators: Vec<SingularSubspace>,
    /// Rank of the polar space `N^⊥/N`.
    pub quotient_rank: usize,
    pub spanning: Vec<SpanEntry>,
    pub local: Vec<LocalCertificate>,
}

impl Certificate {
    /// The spans of the generators over all vertices of `PJ(l,m)`, sorted.
    pub fn regenerate(&self, space: &PolarSpace) -> Result<Vec<SingularSubspace>> {
        let apt = Apartment::from_generators(space, self.base.clone(), self.generators.clone(), self.level)?;
        Ok(apt.member_set())
    }

    /// The `l`-frame is a frame of the whole quotient.
    pub fn is_full(&self) -> bool {
        self.l == self.quotient_rank
    }
}

fn special_check(space: &PolarSpace, f: &EmbeddingMap) -> Result<Checked<()>> {
    let report = check_clique_images(space, f)?;
    if !report.t1 {
        let bad = report.tops.iter().position(|c| !(c.injective && c.independent && c.in_top)).unwrap();
        let tops = pj_cliques(f.l, f.m)?.tops;
        return reject(
            Clause::TopsInTops,
            format!("the top at {} of PJ({},{}) does not go to an independent subset of a top", tops[bad].0, f.l, f.m),
        );
    }
    if !report.t2 {
        return reject(Clause::DistinctTops, "two adjacent tops go into the same top");
    }
    Ok(Ok(()))
}

fn extract(space: &PolarSpace, f: &EmbeddingMap, special: bool) -> Result<Checked<Certificate>> {
    if f.m == 0 {
        return Err(Error::param("certificate extraction needs m >= 1"));
    }
    if special {
        check!(special_check(space, f));
    }
    let mut cur = f.clone();
    while cur.m > 0 {
        cur = match descend(&cur) {
            Ok(d) => d,
            Err(Error::SpecialMap { vertex, detail }) => {
                return reject(Clause::Descent, format!("at {vertex}: {detail}"));
            }
            Err(e) => return Err(e),
        };
        if special && cur.m >= 1 {
            if let Err(r) = special_check(space, &cur)? {
                return reject(Clause::Descent, format!("descended map at level {} is not special: {r}", cur.m));
            }
        }
    }
    let l = f.l;
    let points = cur.vertices();
    let mut generators = vec![None; 2 * l];
    for (v, img) in points.iter().zip(&cur.images) {
        generators[frame_index(v.elements()[0])] = Some(img.clone());
    }
    let generators: Vec<SingularSubspace> = generators.into_iter().map(|g| g.expect("every label occurs")).collect();
    let transversal: Vec<&SingularSubspace> = if l >= 2 {
        generators.iter().step_by(2).collect()
    } else {
        generators.iter().collect()
    };
    let base = SingularSubspace::new_unchecked(meet_all(transversal).expect("nonempty"));
    let expected = f.level - f.m;
    if base.rank() != expected {
        return reject(
            Clause::BaseDimension,
            format!("N has projective dimension {}, expected {}", base.proj_dim(), expected as i32 - 1),
        );
    }
    if let Some(j) = generators.iter().position(|q| !q.includes(&base) || q.rank() != expected + 1) {
        return reject(Clause::BaseContainment, format!("Q_{} does not contain N as a hyperplane", frame_label(j)));
    }
    let quotient = space.quotient(&base)?;
    let qpoints = generators
        .iter()
        .map(|q| quotient.project_point(q))
        .collect::<Result<Vec<_>>>()?;
    if let Err(e) = Frame::from_pairs(qpoints).validate(quotient.space()) {
        return reject(Clause::QuotientFrame, e.to_string());
    }
    let verts = f.vertices();
    let mut spanning = Vec::with_capacity(verts.len());
    for (v, img) in verts.iter().zip(&f.images) {
        let idx: Vec<usize> = v.elements().iter().map(|&e| frame_index(e)).collect();
        let span = join_all(idx.iter().map(|&i| &generators[i])).expect("nonempty");
        if span != *img.space() {
            return reject(Clause::SpanningTable, format!("the generators of {v} do not span its image"));
        }
        spanning.push(SpanEntry {
            vertex: *v,
            generators: idx,
            image: img.clone(),
        });
    }
    Ok(Ok(Certificate {
        l,
        m: f.m,
        level: f.level,
        base,
        generators,
        quotient_rank: quotient.space().rank(),
        spanning,
        local: Vec::new(),
    }))
}

/// Runs the descent to level 0 and recovers `N` and the `l`-frame, checking
/// the special-map conditions on the way.
pub fn extract_certificate(space: &PolarSpace, f: &EmbeddingMap) -> Result<Checked<Certificate>> {
    extract(space, f, true)
}

/// Evidence that the neighbourhood of one member looks like an apartment.
#[derive(Clone, Debug)]
pub struct LocalCertificate {
    pub vertex: SignedSet,
    pub member: SingularSubspace,
    pub base: SingularSubspace,
    /// Elements of `ℬ_S` inside the member, then the outside ones.
    pub basis: Vec<SingularSubspace>,
    /// Generators of the apartment `𝒜_S`.
    pub frame: Vec<SingularSubspace>,
}

pub fn local_apartment_certificate(space: &PolarSpace, f: &EmbeddingMap, vertex: usize) -> Result<Checked<LocalCertificate>> {
    let verts = f.vertices();
    let v = *verts
        .get(vertex)
        .ok_or_else(|| Error::param(format!("vertex index {vertex} out of range")))?;
    let (l, m, k) = (f.l, f.m, f.level);
    if m + 2 > l {
        return Err(Error::param("local certificates need tops"));
    }
    let s = &f.images[vertex];
    let image = |u: &SignedSet| &f.images[verts.binary_search(u).expect("vertex")];
    let fail = |detail: String| reject(Clause::LocalCertificate, format!("at {v}: {detail}"));

    let free: Vec<i32> = (1..=l as i32).filter(|&j| !v.contains(j) && !v.contains(-j)).collect();
    let signs: Vec<i32> = free.iter().flat_map(|&j| [j, -j]).collect();
    if signs.len() != 2 * (l - m - 1) {
        return fail(format!("{} tops through the member, expected {}", signs.len(), 2 * (l - m - 1)));
    }
    let mut base: Option<RowSpace> = None;
    let mut inside: Option<Vec<RowSpace>> = None;
    let mut outside: Vec<RowSpace> = Vec::with_capacity(signs.len());
    let mut top_spaces = BTreeSet::new();
    for &e in &signs {
        let imgs: Vec<&SingularSubspace> = top_members(v.insert(e)).iter().map(image).collect::<Vec<_>>();
        top_spaces.insert(join_all(imgs.iter().copied()).expect("nonempty"));
        let nt = meet_all(imgs.iter().copied()).expect("nonempty");
        if nt.rank() != k - m {
            return fail(format!("top meet has projective dimension {}", nt.proj_dim()));
        }
        match &base {
            None => base = Some(nt.clone()),
            Some(b) if *b != nt => return fail("tops through the member have different meets".into()),
            _ => {}
        }
        let xs: Vec<RowSpace> = (0..imgs.len())
            .map(|i| {
                meet_all(imgs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| *x)).expect("nonempty")
            })
            .collect();
        let (mut ins, outs): (Vec<RowSpace>, Vec<RowSpace>) = xs.into_iter().partition(|x| s.includes(x));
        if outs.len() != 1 {
            return fail(format!("top has {} base elements outside the member", outs.len()));
        }
        ins.sort();
        match &inside {
            None => inside = Some(ins),
            Some(prev) if *prev != ins => return fail("tops disagree inside the member".into()),
            _ => {}
        }
        outside.push(outs.into_iter().next().unwrap());
    }
    if top_spaces.len() != signs.len() {
        return fail("two tops through the member coincide".into());
    }
    let base = SingularSubspace::new_unchecked(base.expect("at least one top"));
    let inside = inside.expect("at least one top");
    let distinct: BTreeSet<&RowSpace> = inside.iter().chain(&outside).collect();
    if distinct.len() != (m + 1) + 2 * (l - m - 1) {
        return fail(format!("basis has {} distinct elements", distinct.len()));
    }
    let q = space.quotient(&base)?;
    let qin = inside.iter().map(|x| q.project_point(x)).collect::<Result<Vec<_>>>()?;
    let qout = outside.iter().map(|x| q.project_point(x)).collect::<Result<Vec<_>>>()?;
    let qs = q.space();
    for &a in &qin {
        if qin.iter().chain(&qout).any(|&b| !qs.perpendicular(a, b)) {
            return fail("an inside basis element is not collinear with the rest".into());
        }
    }
    for (i, &a) in qout.iter().enumerate() {
        let opposite: Vec<usize> = (0..qout.len()).filter(|&j| !qs.perpendicular(a, qout[j])).collect();
        if opposite != [i ^ 1] {
            return fail(format!("outside basis element {i} has non-collinear partners {opposite:?}"));
        }
    }
    let xs: Vec<PointId> = qin.iter().copied().chain(qout.iter().step_by(2).copied()).collect();
    let ys: Vec<PointId> = qout.iter().skip(1).step_by(2).copied().collect();
    let frame = match qs.extend_to_frame(&xs, &ys) {
        Ok(fr) => fr,
        Err(e) => return fail(format!("frame extension failed: {e}")),
    };
    let apt = parabolic_apartment(space, &q, &frame, k)?;
    if !apt.members.contains(s) {
        return fail("the member is not in the local apartment".into());
    }
    let mut near: Vec<&SingularSubspace> = f.images.iter().filter(|x| *x == s || adjacent_unchecked(space, s, x)).collect();
    let mut local: Vec<&SingularSubspace> =
        apt.members.iter().filter(|x| *x == s || adjacent_unchecked(space, s, x)).collect();
    near.sort();
    local.sort();
    if near != local {
        return fail("the neighbourhood differs from that of the local apartment".into());
    }
    for (i, a) in near.iter().enumerate() {
        for b in &near[..i] {
            if let Some(line) = line_through(space, a, b)? {
                let on = line.members.iter().filter(|x| near.binary_search(x).is_ok()).count();
                if on > 2 {
                    return fail("three neighbourhood elements lie on one line".into());
                }
            }
        }
    }
    let mut basis: Vec<SingularSubspace> = inside.into_iter().map(SingularSubspace::new_unchecked).collect();
    basis.extend(outside.into_iter().map(SingularSubspace::new_unchecked));
    Ok(Ok(LocalCertificate {
        vertex: v,
        member: s.clone(),
        base,
        basis,
        frame: apt.generators,
    }))
}

/// The characterizations a set can be checked against. The names are the
/// identifiers the command line accepts.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// A hypercube of maximal singular subspaces.
    #[serde(rename = "thm4.1")]
    Thm41,
    /// A set isomorphic to `PJ(l,m)` with independent clique images, at
    /// `l − m = n − k`.
    #[serde(rename = "thm4.2")]
    Thm42,
    /// A copy of `PJ(l,m)` at `l − m = n − k ≥ 3`, certified locally at every
    /// member.
    #[serde(rename = "thm4.3")]
    Thm43,
    /// A special copy of `PJ(l,m)` with `3 ≤ l − m ≤ n − k`.
    #[serde(rename = "thm4.4")]
    Thm44,
    /// As `thm4.4`, from independence of clique images instead of
    /// specialness.
    #[serde(rename = "thm4.5")]
    Thm45,
    /// `m = 1`, `l = n − k + 1` and `n ≥ k + 3`, outside big stars.
    #[serde(rename = "cor4.1")]
    Cor41,
    /// `m = 1`, `4 ≤ l ≤ n − k + 1`, outside big stars.
    #[serde(rename = "cor4.3")]
    Cor43,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Thm41,
        Theorem::Thm42,
        Theorem::Thm43,
        Theorem::Thm44,
        Theorem::Thm45,
        Theorem::Cor41,
        Theorem::Cor43,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Thm41 => "thm4.1",
            Theorem::Thm42 => "thm4.2",
            Theorem::Thm43 => "thm4.3",
            Theorem::Thm44 => "thm4.4",
            Theorem::Thm45 => "thm4.5",
            Theorem::Cor41 => "cor4.1",
            Theorem::Cor43 => "cor4.3",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['_', '-', ' '], "");
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == key || t.name().replace('.', "") == key)
            .ok_or_else(|| Error::param(format!("unknown theorem '{s}'")))
    }
}

/// Input to [`verify_theorem`]. For the hypercube theorem `m` is the cube
/// dimension and `l` is ignored.
#[derive(Clone, Debug)]
pub struct VerifyRequest {
    pub theorem: Theorem,
    pub l: usize,
    pub m: usize,
    pub members: Vec<SingularSubspace>,
    /// A labelling to use instead of searching for an isomorphism.
    pub map: Option<EmbeddingMap>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Accept(Box<Certificate>),
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verdict::Reject(r) => Some(r),
            Verdict::Accept(_) => None,
        }
    }
}

fn half_cube() -> Result<&'static HalfCubeSplit> {
    static SPLIT: OnceLock<HalfCubeSplit> = OnceLock::new();
    if let Some(s) = SPLIT.get() {
        return Ok(s);
    }
    let s = halfcube_split_and_g()?;
    Ok(SPLIT.get_or_init(|| s))
}

/// The members as the image of `PJ(l,m)`: the supplied labelling if any,
/// otherwise an isomorphism found by search.
fn find_embedding(
    space: &PolarSpace,
    members: &[SingularSubspace],
    l: usize,
    m: usize,
    map: Option<&EmbeddingMap>,
) -> Result<Checked<EmbeddingMap>> {
    let level = members[0].rank() - 1;
    if let Some(f) = map {
        if (f.l, f.m, f.level) != (l, m, level) {
            return reject(Clause::Hypothesis, "the labelling does not match the requested parameters");
        }
        if f.image_set() != sorted_set(members) {
            return reject(Clause::GraphIsomorphism, "the labelling does not cover the member set");
        }
        if !is_embedding(space, f) {
            return reject(Clause::GraphIsomorphism, format!("the labelling is not an embedding of PJ({l},{m})"));
        }
        return Ok(Ok(f.clone()));
    }
    let (verts, pattern) = pj_graph(l, m)?;
    if verts.len() != members.len() {
        return reject(
            Clause::GraphIsomorphism,
            format!("{} members, PJ({l},{m}) has {} vertices", members.len(), verts.len()),
        );
    }
    let g = GrassmannGraph::induced(space, members.to_vec())?;
    match isomorphism(&pattern, &g.graph, ISO_BUDGET)? {
        None => reject(Clause::GraphIsomorphism, format!("the induced graph is not isomorphic to PJ({l},{m})")),
        Some(iso) => Ok(Ok(EmbeddingMap {
            l,
            m,
            level,
            images: iso.into_iter().map(|j| members[j].clone()).collect(),
        })),
    }
}

/// `f`, or `f ∘ g` for one of the half-cube automorphisms when `PJ(4,1)`
/// allows it, whichever sends tops into tops.
fn special_embedding(space: &PolarSpace, f: EmbeddingMap) -> Result<Checked<EmbeddingMap>> {
    let first = special_check(space, &f)?;
    if first.is_ok() {
        return Ok(Ok(f));
    }
    if (f.l, f.m) == (4, 1) {
        let split = half_cube()?;
        for g in &split.g {
            let h = f.compose(g);
            if special_check(space, &h)?.is_ok() {
                return Ok(Ok(h));
            }
        }
    }
    Ok(Err(first.unwrap_err()))
}

/// `l − m = n − k > 1`: the image should be a full apartment of a
/// parabolic subspace.
fn full_range(n: usize, k: usize, l: usize, m: usize) -> bool {
    0 < m && m <= k && l <= n && l >= m && n >= k && l - m == n - k && l - m > 1
}

/// `3 ≤ l − m ≤ n − k`: the image should be generated by an `l`-frame of a
/// parabolic subspace.
fn parabolic_range(n: usize, k: usize, l: usize, m: usize) -> bool {
    0 < m && m <= k && l <= n && l >= m + 3 && n >= k && l - m <= n - k
}

fn require_full(cert: Certificate) -> Result<Checked<Certificate>> {
    if !cert.is_full() {
        return reject(
            Clause::FullApartment,
            format!("the {}-frame does not fill the rank {} quotient", cert.l, cert.quotient_rank),
        );
    }
    Ok(Ok(cert))
}

fn verify_hypercube(space: &PolarSpace, members: &[SingularSubspace], cube: usize, map: Option<&EmbeddingMap>) -> Result<Checked<Certificate>> {
    let n = space.rank();
    if members[0].rank() != n {
        return reject(Clause::Hypothesis, "members must be maximal singular subspaces");
    }
    if cube == 0 || cube > n {
        return reject(Clause::Hypothesis, format!("hypercube dimension {cube} outside 1..={n}"));
    }
    if !locally_independent(space, members)? {
        return reject(Clause::LocalIndependence, "some member sees a dependent set of hyperplanes");
    }
    let f = check!(find_embedding(space, members, cube, cube - 1, map));
    let cert = check!(extract(space, &f, false));
    require_full(cert)
}

fn verify_pj(space: &PolarSpace, req: &VerifyRequest, k: usize) -> Result<Checked<Certificate>> {
    let n = space.rank();
    let (l, m) = (req.l, req.m);
    let members = &req.members;
    let thm = req.theorem;
    let hyp_ok = match thm {
        Theorem::Thm42 => full_range(n, k, l, m),
        Theorem::Thm43 => full_range(n, k, l, m) && m + 3 <= l,
        Theorem::Thm44 | Theorem::Thm45 => parabolic_range(n, k, l, m),
        Theorem::Cor41 => n >= k + 3 && k >= 1 && m == 1 && l == n - k + 1,
        Theorem::Cor43 => k >= 1 && m == 1 && l >= 4 && l <= n && l <= n - k + 1,
        Theorem::Thm41 => unreachable!("handled separately"),
    };
    if !hyp_ok {
        return reject(Clause::Hypothesis, format!("(n, k, l, m) = ({n}, {k}, {l}, {m}) is outside the range of {thm}"));
    }
    let f = check!(find_embedding(space, members, l, m, req.map.as_ref()));
    let report = check_clique_images(space, &f)?;
    let set_theorem = !matches!(thm, Theorem::Thm43 | Theorem::Thm44);
    if set_theorem && !report.cliques_independent() {
        return reject(Clause::CliqueIndependence, "some maximal clique image is dependent");
    }
    let in_big_star = report.image_big_star.is_some();
    let side = match thm {
        Theorem::Thm42 => 2 * m + 2 > l || !in_big_star,
        Theorem::Thm45 => m + 2 > n - k || (l - m >= 4 && !in_big_star),
        Theorem::Cor41 | Theorem::Cor43 => !in_big_star,
        _ => true,
    };
    if !side {
        return reject(Clause::Hypothesis, "no side condition holds: the set lies in a big star");
    }

    if thm == Theorem::Thm42 && l - m == 2 {
        // Through the dual polar space: tops correspond to maximal subspaces.
        let fam = pj_cliques(l, m)?;
        if !report.t1 {
            return reject(Clause::TopsInTops, "a top does not go into a top");
        }
        let verts = f.vertices();
        let dual: Vec<SingularSubspace> = fam
            .tops
            .iter()
            .map(|(_, ms)| {
                SingularSubspace::new_unchecked(
                    join_all(ms.iter().map(|v| &f.images[verts.binary_search(v).unwrap()])).unwrap(),
                )
            })
            .collect();
        let g = EmbeddingMap::new(l, l - 1, n - 1, dual.clone())?;
        if !is_embedding(space, &g) {
            return reject(Clause::LocalIndependence, "the induced map on maximal subspaces is not a hypercube embedding");
        }
        check!(verify_hypercube(space, &dual, l, Some(&g)));
        let cert = check!(extract(space, &f, false));
        return require_full(cert);
    }

    let use_labels = req.map.is_some() && matches!(thm, Theorem::Thm43 | Theorem::Thm44);
    let f = if use_labels {
        check!(special_check(space, &f).map(|r| r.map_err(|e| Rejection {
            clause: Clause::Hypothesis,
            detail: e.to_string(),
        })));
        f
    } else {
        check!(special_embedding(space, f))
    };
    let mut cert = check!(extract(space, &f, true));
    if matches!(thm, Theorem::Thm42 | Theorem::Thm43 | Theorem::Cor41) {
        cert = check!(require_full(cert));
    }
    if thm == Theorem::Thm43 {
        let locals = (0..f.images.len())
            .into_par_iter()
            .map(|i| local_apartment_certificate(space, &f, i))
            .collect::<Result<Vec<_>>>()?;
        for local in locals {
            cert.local.push(check!(Ok(local)));
        }
    }
    Ok(Ok(cert))
}

/// Checks the hypotheses of a theorem on the given input and, when they
/// hold, produces the certificate its conclusion promises.
pub fn verify_theorem(space: &PolarSpace, req: &VerifyRequest) -> Result<Verdict> {
    if req.members.is_empty() {
        return Err(Error::param("no members to verify"));
    }
    let r = req.members[0].rank();
    if r == 0 || req.members.iter().any(|x| x.rank() != r) {
        return Err(Error::param("members must be nonzero subspaces of one dimension"));
    }
    for x in &req.members {
        if x.ambient_dim() != space.ambient_dim() || !space.is_totally_singular(x) {
            return Err(Error::NotSingular);
        }
    }
    if sorted_set(&req.members).len() != req.members.len() {
        return Err(Error::param("members must be distinct"));
    }
    let k = r - 1;
    let out = if req.theorem == Theorem::Thm41 {
        verify_hypercube(space, &req.members, req.m, req.map.as_ref())?
    } else {
        verify_pj(space, req, k)?
    };
    Ok(match out {
        Ok(c) => Verdict::Accept(Box::new(c)),
        Err(r) => Verdict::Reject(r),
    })
}
