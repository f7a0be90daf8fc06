//! Grassmann graphs `Γ_k` of a polar space and the partial linear spaces
//! behind them.
//!
//! For `k ≤ n−2` two `k`-dimensional singular subspaces are adjacent when
//! they meet in a `(k−1)`-space and span a singular subspace; for `k = n−1`
//! (the dual polar graph) the span condition is dropped.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::linalg::RowSpace;
use crate::polar::{PolarSpace, Quotient, SingularSubspace};

/// Projective dimension shared by all members, or an error.
fn common_level(xs: &[SingularSubspace]) -> Result<Option<i32>> {
    let Some(first) = xs.first() else {
        return Ok(None);
    };
    let k = first.proj_dim();
    if let Some(bad) = xs.iter().find(|x| x.proj_dim() != k) {
        return Err(Error::param(format!(
            "subspaces of projective dimensions {k} and {} mixed",
            bad.proj_dim()
        )));
    }
    Ok(Some(k))
}

/// Adjacency in `Γ_k`; equal subspaces are not adjacent.
pub fn adjacent(space: &PolarSpace, a: &SingularSubspace, b: &SingularSubspace) -> Result<bool> {
    if a.rank() != b.rank() {
        return Err(Error::param(format!(
            "adjacency between projective dimensions {} and {}",
            a.proj_dim(),
            b.proj_dim()
        )));
    }
    Ok(adjacent_unchecked(space, a, b))
}

pub(crate) fn adjacent_unchecked(space: &PolarSpace, a: &RowSpace, b: &RowSpace) -> bool {
    if a == b || a.is_zero() {
        return false;
    }
    let r = a.rank();
    if a.join_rank(b) != r + 1 {
        return false;
    }
    r == space.rank() || space.is_totally_singular(&a.join(b))
}

/// A line `[S,U]_k` of the Grassmann space, or a line `[S⟩_{n−1}` of the dual
/// polar space (where `top` is `None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilLine {
    pub bottom: SingularSubspace,
    pub top: Option<SingularSubspace>,
    pub members: Vec<SingularSubspace>,
}

pub fn line_through(space: &PolarSpace, a: &SingularSubspace, b: &SingularSubspace) -> Result<Option<PencilLine>> {
    if !adjacent(space, a, b)? {
        return Ok(None);
    }
    let bottom = SingularSubspace::new_unchecked(a.meet(b));
    if a.rank() == space.rank() {
        let q = space.quotient(&bottom)?;
        let mut members: Vec<SingularSubspace> = q.space().point_ids().map(|i| q.lift_point(i)).collect();
        members.sort();
        return Ok(Some(PencilLine {
            bottom,
            top: None,
            members,
        }));
    }
    let top = SingularSubspace::new_unchecked(a.join(b));
    let members = bottom
        .subspaces_between(&top, a.rank())
        .into_iter()
        .map(SingularSubspace::new_unchecked)
        .collect();
    Ok(Some(PencilLine {
        bottom,
        top: Some(top),
        members,
    }))
}

/// All neighbours of `x` in `Γ_k`, sorted.
pub fn neighbors(space: &PolarSpace, x: &SingularSubspace) -> Vec<SingularSubspace> {
    let r = x.rank();
    if r == 0 {
        return Vec::new();
    }
    let p = space.modulus();
    let hyperplanes = RowSpace::zero(p, space.ambient_dim()).subspaces_between(x, r - 1);
    let mut out = BTreeSet::new();
    if r < space.rank() {
        let xp = space.perp(x);
        for q in space.point_ids() {
            let v = space.point(q);
            if xp.contains_vector(v) && !x.contains_vector(v) {
                for h in &hyperplanes {
                    out.insert(SingularSubspace::new_unchecked(h.join_vector(v)));
                }
            }
        }
    } else {
        for h in &hyperplanes {
            let hp = space.perp(h);
            for q in space.point_ids() {
                let v = space.point(q);
                if hp.contains_vector(v) && !x.contains_vector(v) {
                    out.insert(SingularSubspace::new_unchecked(h.join_vector(v)));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// A maximal clique type of `Γ_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxClique {
    /// `⟨U]_k`: all `k`-subspaces of a `(k+1)`-dimensional `U`.
    Top(SingularSubspace),
    /// `[S,M]_k` with `S` of dimension `k−1` and `M` maximal.
    Star(SingularSubspace, SingularSubspace),
    /// `[S⟩_{n−1}` with `S` of dimension `n−2`.
    DualLine(SingularSubspace),
}

impl MaxClique {
    pub fn members(&self, space: &PolarSpace) -> Result<Vec<SingularSubspace>> {
        match self {
            MaxClique::Top(u) => {
                let zero = RowSpace::zero(space.modulus(), space.ambient_dim());
                Ok(zero
                    .subspaces_between(u, u.rank() - 1)
                    .into_iter()
                    .map(SingularSubspace::new_unchecked)
                    .collect())
            }
            MaxClique::Star(s, m) => Ok(s
                .subspaces_between(m, s.rank() + 1)
                .into_iter()
                .map(SingularSubspace::new_unchecked)
                .collect()),
            MaxClique::DualLine(s) => collect_region(space, &Region::BigStar(s.clone()), space.rank() - 1),
        }
    }

    pub fn contains(&self, x: &RowSpace) -> bool {
        match self {
            MaxClique::Top(u) => u.includes(x),
            MaxClique::Star(s, m) => x.includes(s) && m.includes(x),
            MaxClique::DualLine(s) => x.includes(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CliqueClass {
    pub primary: MaxClique,
    /// Every top or star found to contain the clique.
    pub candidates: Vec<MaxClique>,
    /// The clique equals the member set of `primary`.
    pub maximal: bool,
}

/// Smallest maximal singular subspace containing `s`, grown greedily by
/// registry order.
pub fn extend_to_maximal(space: &PolarSpace, s: &RowSpace) -> SingularSubspace {
    let mut cur = s.clone();
    while cur.rank() < space.rank() {
        let perp = space.perp(&cur);
        let q = space
            .point_ids()
            .find(|&q| {
                let v = space.point(q);
                perp.contains_vector(v) && !cur.contains_vector(v)
            })
            .expect("non-maximal singular subspaces extend");
        cur = cur.join_vector(space.point(q));
    }
    SingularSubspace::new_unchecked(cur)
}

pub fn classify_maximal_clique(space: &PolarSpace, c: &[SingularSubspace]) -> Result<CliqueClass> {
    if c.len() < 2 {
        return Err(Error::param("clique classification needs at least two members"));
    }
    common_level(c)?;
    for (i, a) in c.iter().enumerate() {
        for b in &c[..i] {
            if !adjacent_unchecked(space, a, b) {
                return Err(Error::NotAClique(format!("{a:?} and {b:?} are not adjacent")));
            }
        }
    }
    let n = space.rank();
    let r = c[0].rank();
    let k = r - 1;
    let meet = c.iter().skip(1).fold(c[0].space().clone(), |acc, x| acc.meet(x));
    let join = c.iter().skip(1).fold(c[0].space().clone(), |acc, x| acc.join(x));
    let mut candidates = Vec::new();
    if r == n {
        if meet.rank() + 1 != n {
            return Err(Error::Inconsistent("pairwise adjacent maximals without a common hyperplane".into()));
        }
        candidates.push(MaxClique::DualLine(SingularSubspace::new_unchecked(meet)));
    } else {
        if join.rank() == r + 1 {
            candidates.push(MaxClique::Top(SingularSubspace::new_unchecked(join.clone())));
        }
        if meet.rank() == k && k + 3 <= n {
            let m = extend_to_maximal(space, &join);
            candidates.push(MaxClique::Star(SingularSubspace::new_unchecked(meet), m));
        }
    }
    let primary = candidates
        .first()
        .cloned()
        .ok_or_else(|| Error::Inconsistent("clique lies in no top or star".into()))?;
    let members = primary.members(space)?;
    let set: BTreeSet<&SingularSubspace> = c.iter().collect();
    let maximal = set.len() == members.len() && members.iter().all(|m| set.contains(m));
    Ok(CliqueClass {
        primary,
        candidates,
        maximal,
    })
}

#[derive(Clone, Debug)]
pub enum Region {
    BigStar(SingularSubspace),
    Parabolic(SingularSubspace),
    Interval(SingularSubspace, SingularSubspace),
}

/// Members of a region at level `k`, sorted.
pub fn collect_region(space: &PolarSpace, region: &Region, k: usize) -> Result<Vec<SingularSubspace>> {
    if k >= space.rank() {
        return Err(Error::param(format!("level {k} exceeds rank {}", space.rank())));
    }
    let mut out = match region {
        Region::BigStar(s) => {
            if s.rank() != k {
                return Err(Error::param(format!(
                    "big star at level {k} needs a base of dimension {}",
                    k as i32 - 1
                )));
            }
            let q = space.quotient(s)?;
            q.space().point_ids().map(|i| q.lift_point(i)).collect()
        }
        Region::Parabolic(nb) => {
            if nb.rank() > k {
                return Err(Error::param(format!(
                    "parabolic base of dimension {} exceeds level {k}",
                    nb.proj_dim()
                )));
            }
            if nb.is_zero() {
                space.enumerate_singular(k)?
            } else {
                let q = space.quotient(nb)?;
                q.space()
                    .enumerate_singular(k - nb.rank())?
                    .iter()
                    .map(|x| q.lift(x))
                    .collect()
            }
        }
        Region::Interval(s, u) => {
            if !u.includes(s) || s.rank() > k + 1 || u.rank() < k + 1 {
                return Err(Error::param("interval bounds are incompatible with the level"));
            }
            s.subspaces_between(u, k + 1)
                .into_iter()
                .map(SingularSubspace::new_unchecked)
                .collect()
        }
    };
    out.sort();
    Ok(out)
}

/// The bijection `[N⟩_k → 𝒢_m(N^⊥/N)` with `m = k − dim N − 1`.
#[derive(Clone, Debug)]
pub struct Collineation {
    pub quotient: Quotient,
    pub level: usize,
    pub members: Vec<SingularSubspace>,
    pub images: Vec<SingularSubspace>,
}

pub fn parabolic_collineation(space: &PolarSpace, nb: &SingularSubspace, k: usize) -> Result<Collineation> {
    if nb.rank() > k {
        return Err(Error::param(format!(
            "base of dimension {} is not below level {k}",
            nb.proj_dim()
        )));
    }
    let members = collect_region(space, &Region::Parabolic(nb.clone()), k)?;
    let quotient = space.quotient(nb)?;
    let images = members
        .iter()
        .map(|x| quotient.project(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Collineation {
        quotient,
        level: k - nb.rank(),
        members,
        images,
    })
}

/// Least subspace of the Grassmann space containing `xs`, sorted.
pub fn span_closure(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<Vec<SingularSubspace>> {
    common_level(xs)?;
    let mut set: BTreeSet<SingularSubspace> = xs.iter().cloned().collect();
    let mut done: Vec<SingularSubspace> = Vec::new();
    let mut queue: Vec<SingularSubspace> = set.iter().cloned().collect();
    while let Some(x) = queue.pop() {
        for y in &done {
            if let Some(line) = line_through(space, &x, y)? {
                for m in line.members {
                    if set.insert(m.clone()) {
                        queue.push(m);
                    }
                }
            }
        }
        done.push(x);
    }
    Ok(set.into_iter().collect())
}

/// Independence by definition: no member lies in the span of the others.
pub fn independent_by_closure(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<bool> {
    let set: BTreeSet<&SingularSubspace> = xs.iter().collect();
    if set.len() != xs.len() {
        return Ok(false);
    }
    for (i, x) in xs.iter().enumerate() {
        let rest: Vec<SingularSubspace> = xs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, y)| y.clone())
            .collect();
        if span_closure(space, &rest)?.binary_search(x).is_ok() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independence, using projective dimension counts when the set lies in a
/// single top or star and the span closure otherwise.
pub fn independent(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<bool> {
    let Some(k) = common_level(xs)? else {
        return Ok(true);
    };
    let r = (k + 1) as usize;
    if xs.len() <= 1 {
        return Ok(true);
    }
    if r < space.rank() {
        let join = xs.iter().skip(1).fold(xs[0].space().clone(), |acc, x| acc.join(x));
        if space.is_totally_singular(&join) {
            let meet = xs.iter().skip(1).fold(xs[0].space().clone(), |acc, x| acc.meet(x));
            if join.rank() == r + 1 {
                // Hyperplanes of the top: independent iff their meet has the
                // expected codimension.
                return Ok(meet.rank() + xs.len() == r + 1);
            }
            if meet.rank() + 1 == r {
                return Ok(join.rank() == meet.rank() + xs.len());
            }
        }
    }
    independent_by_closure(space, xs)
}

/// Local independence of a set of maximal singular subspaces.
pub fn locally_independent(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<bool> {
    let n = space.rank();
    if let Some(bad) = xs.iter().find(|x| x.rank() != n) {
        return Err(Error::param(format!(
            "local independence needs maximal subspaces, got projective dimension {}",
            bad.proj_dim()
        )));
    }
    Ok(xs.par_iter().all(|s| {
        let hyperplanes: BTreeSet<RowSpace> = xs
            .iter()
            .filter(|u| adjacent_unchecked(space, s, u))
            .map(|u| s.meet(u))
            .collect();
        let meet = hyperplanes.iter().fold(s.space().clone(), |acc, h| acc.meet(h));
        meet.rank() + hyperplanes.len() == n
    }))
}

/// The subspace `N` with `xs = [N⟩_k`, if there is one.
pub fn recognize_parabolic(space: &PolarSpace, xs: &[SingularSubspace]) -> Result<Option<SingularSubspace>> {
    let Some(k) = common_level(xs)? else {
        return Ok(None);
    };
    let meet = xs.iter().skip(1).fold(xs[0].space().clone(), |acc, x| acc.meet(x));
    let nb = SingularSubspace::new_unchecked(meet);
    if nb.rank() == xs[0].rank() {
        return Ok(None);
    }
    let region = collect_region(space, &Region::Parabolic(nb.clone()), k as usize)?;
    let mut sorted = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    Ok((sorted == region).then_some(nb))
}

/// `Γ_k` restricted to a vertex set, with an index for lookups.
#[derive(Clone, Debug)]
pub struct GrassmannGraph {
    pub level: usize,
    pub vertices: Vec<SingularSubspace>,
    pub graph: Graph,
    index: HashMap<SingularSubspace, usize>,
}

impl GrassmannGraph {
    /// The whole of `Γ_k`.
    pub fn full(space: &PolarSpace, k: usize) -> Result<Self> {
        let vertices = space.enumerate_singular(k)?;
        let index: HashMap<SingularSubspace, usize> =
            vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let adjacency: Vec<Vec<usize>> = vertices
            .par_iter()
            .map(|x| neighbors(space, x).iter().map(|y| index[y]).collect())
            .collect();
        let mut graph = Graph::new(vertices.len());
        for (i, nb) in adjacency.iter().enumerate() {
            for &j in nb.iter().filter(|&&j| j < i) {
                graph.add_edge(i, j);
            }
        }
        Ok(GrassmannGraph {
            level: k,
            vertices,
            graph,
            index,
        })
    }

    /// `Γ_k` induced on the given subspaces (kept in the given order).
    pub fn induced(space: &PolarSpace, vertices: Vec<SingularSubspace>) -> Result<Self> {
        let level = common_level(&vertices)?.unwrap_or(0).max(0) as usize;
        let index: HashMap<SingularSubspace, usize> =
            vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        if index.len() != vertices.len() {
            return Err(Error::param("vertex list contains duplicates"));
        }
        let rows: Vec<Vec<usize>> = (0..vertices.len())
            .into_par_iter()
            .map(|i| {
                (0..i)
                    .filter(|&j| adjacent_unchecked(space, &vertices[i], &vertices[j]))
                    .collect()
            })
            .collect();
        let mut graph = Graph::new(vertices.len());
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                graph.add_edge(i, j);
            }
        }
        Ok(GrassmannGraph {
            level,
            vertices,
            graph,
            index,
        })
    }

    pub fn index_of(&self, x: &SingularSubspace) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn distance(&self, a: &SingularSubspace, b: &SingularSubspace) -> Option<usize> {
        self.graph.distance(self.index_of(a)?, self.index_of(b)?)
    }

    pub fn indices(&self, xs: &[SingularSubspace]) -> Result<Vec<usize>> {
        xs.iter()
            .map(|x| {
                self.index_of(x)
                    .ok_or_else(|| Error::param(format!("{x:?} is not a vertex")))
            })
            .collect()
    }

    pub fn is_convex(&self, xs: &[SingularSubspace]) -> Result<bool> {
        Ok(self.graph.is_convex(&self.indices(xs)?))
    }
}
