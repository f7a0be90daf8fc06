//! Small simple graphs, the polar Johnson graphs `PJ(n,k)`, hypercubes and
//! half-cubes, plus the exact search routines used on them: isomorphism by
//! refinement and backtracking, maximal cliques, and graph metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected simple graph on `0..order` with bitset rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(order {}, {} edges)", self.order(), self.edge_count())
    }
}

impl Graph {
    pub fn new(order: usize) -> Self {
        Graph {
            adj: vec![FixedBitSet::with_capacity(order); order],
        }
    }

    pub fn from_fn(order: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::new(order);
        for i in 0..order {
            for j in 0..i {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "loops are not allowed");
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn neighbor_set(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 0..self.order() {
            out.extend(self.adj[a].ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    /// The subgraph induced on `vertices`, relabelled `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        Graph::from_fn(vertices.len(), |i, j| self.has_edge(vertices[i], vertices[j]))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[..i].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Breadth-first distances from `src`; `None` marks unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.order()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_from(a)[b]
    }

    pub fn is_connected(&self) -> bool {
        self.order() == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// `{x : d(a,x) + d(x,b) = d(a,b)}`, sorted; empty when `b` is unreachable.
    pub fn interval(&self, a: usize, b: usize) -> Vec<usize> {
        let da = self.distances_from(a);
        let db = self.distances_from(b);
        let Some(total) = da[b] else {
            return Vec::new();
        };
        (0..self.order())
            .filter(|&x| matches!((da[x], db[x]), (Some(p), Some(q)) if p + q == total))
            .collect()
    }

    /// Whether every geodesic between two members stays inside `set`.
    pub fn is_convex(&self, set: &[usize]) -> bool {
        let mut member = FixedBitSet::with_capacity(self.order());
        set.iter().for_each(|&v| member.insert(v));
        let dists: Vec<Vec<Option<usize>>> = set.iter().map(|&v| self.distances_from(v)).collect();
        for i in 0..set.len() {
            for j in 0..i {
                let Some(total) = dists[i][set[j]] else {
                    continue;
                };
                for (x, (&dx, &dy)) in dists[i].iter().zip(&dists[j]).enumerate() {
                    if !member.contains(x) {
                        if let (Some(p), Some(q)) = (dx, dy) {
                            if p + q == total {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Smallest convex superset of `set`, by repeated interval saturation.
    pub fn convex_closure(&self, set: &[usize], max_rounds: usize) -> Result<Vec<usize>> {
        let mut member = FixedBitSet::with_capacity(self.order());
        set.iter().for_each(|&v| member.insert(v));
        let all: Vec<Vec<Option<usize>>> = (0..self.order()).map(|v| self.distances_from(v)).collect();
        for _ in 0..max_rounds {
            let current: Vec<usize> = member.ones().collect();
            let mut grown = false;
            for (i, &a) in current.iter().enumerate() {
                for &b in &current[..i] {
                    let Some(total) = all[a][b] else { continue };
                    for (x, (&dx, &dy)) in all[a].iter().zip(&all[b]).enumerate() {
                        if !member.contains(x) {
                            if let (Some(p), Some(q)) = (dx, dy) {
                                if p + q == total {
                                    member.insert(x);
                                    grown = true;
                                }
                            }
                        }
                    }
                }
            }
            if !grown {
                return Ok(member.ones().collect());
            }
        }
        Err(Error::BudgetExceeded(max_rounds as u64))
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting), each sorted, in
    /// lexicographic order.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut out = Vec::new();
        let mut p = FixedBitSet::with_capacity(n);
        p.insert_range(..);
        let x = FixedBitSet::with_capacity(n);
        let mut r = Vec::new();
        self.bron_kerbosch(&mut r, p, x, &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
        if p.is_clear() {
            if x.is_clear() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| self.adj[u].intersection(&p).count())
            .expect("p is nonempty");
        let mut candidates = p.clone();
        candidates.difference_with(&self.adj[pivot]);
        for v in candidates.ones() {
            let mut np = p.clone();
            np.intersect_with(&self.adj[v]);
            let mut nx = x.clone();
            nx.intersect_with(&self.adj[v]);
            r.push(v);
            self.bron_kerbosch(r, np, nx, out);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }
}

/// A subset of `J = {1..n} ∪ {−1..−n}` with `n ≤ 16`.
///
/// Bit `j−1` holds `+j` and bit `16+j−1` holds `−j`. Sets compare
/// lexicographically on their sorted elements, where `1 < … < n < −1 < … < −n`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignedSet(u32);

pub const MAX_SIGNED: usize = 16;

impl SignedSet {
    pub fn empty() -> Self {
        SignedSet(0)
    }

    pub fn from_elements(elems: &[i32]) -> Result<Self> {
        let mut s = SignedSet(0);
        for &e in elems {
            if e == 0 || e.unsigned_abs() as usize > MAX_SIGNED {
                return Err(Error::param(format!("{e} is not an element of J")));
            }
            s.0 |= 1 << Self::bit(e);
        }
        Ok(s)
    }

    #[inline]
    fn bit(e: i32) -> u32 {
        if e > 0 {
            e as u32 - 1
        } else {
            16 + e.unsigned_abs() - 1
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: i32) -> bool {
        self.0 & (1 << Self::bit(e)) != 0
    }

    /// No `j` together with `−j`.
    pub fn is_singular(self) -> bool {
        (self.0 & 0xffff) & (self.0 >> 16) == 0
    }

    pub fn union(self, o: SignedSet) -> SignedSet {
        SignedSet(self.0 | o.0)
    }

    pub fn intersection(self, o: SignedSet) -> SignedSet {
        SignedSet(self.0 & o.0)
    }

    pub fn is_subset(self, o: SignedSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn insert(self, e: i32) -> SignedSet {
        SignedSet(self.0 | 1 << Self::bit(e))
    }

    pub fn remove(self, e: i32) -> SignedSet {
        SignedSet(self.0 & !(1 << Self::bit(e)))
    }

    /// Elements in the canonical order.
    pub fn elements(self) -> Vec<i32> {
        (0..32)
            .filter(|b| self.0 & (1 << b) != 0)
            .map(|b| if b < 16 { b + 1 } else { -(b - 15) })
            .collect()
    }

    /// Number of negative elements.
    pub fn negatives(self) -> usize {
        (self.0 >> 16).count_ones() as usize
    }
}

impl Ord for SignedSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            match (a, b) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {
                    let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
                    if x != y {
                        return x.cmp(&y);
                    }
                    a &= a - 1;
                    b &= b - 1;
                }
            }
        }
    }
}

impl PartialOrd for SignedSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SignedSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i32>::deserialize(d)?;
        SignedSet::from_elements(&v).map_err(serde::de::Error::custom)
    }
}

fn check_pj(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > MAX_SIGNED {
        return Err(Error::param(format!("PJ rank must be in 1..={MAX_SIGNED}, got {n}")));
    }
    if k >= n {
        return Err(Error::param(format!("PJ({n},{k}) needs k <= n-1")));
    }
    Ok(())
}

/// Singular subsets of size `size` drawn from `±1..±n`, sorted.
pub fn singular_sets(n: usize, size: usize) -> Vec<SignedSet> {
    let mut out = Vec::new();
    for support in crate::linalg::combinations(n, size) {
        for signs in 0u32..(1 << size) {
            let mut s = SignedSet::empty();
            for (t, &i) in support.iter().enumerate() {
                let j = i as i32 + 1;
                s = s.insert(if signs >> t & 1 == 0 { j } else { -j });
            }
            out.push(s);
        }
    }
    out.sort();
    out
}

/// Vertices of `PJ(n,k)`: singular `(k+1)`-subsets of `J`, sorted.
pub fn pj_vertices(n: usize, k: usize) -> Result<Vec<SignedSet>> {
    check_pj(n, k)?;
    Ok(singular_sets(n, k + 1))
}

/// Adjacency in `PJ(n,k)`.
pub fn pj_adjacent(n: usize, k: usize, a: SignedSet, b: SignedSet) -> bool {
    a != b && a.intersection(b).len() == k && (k + 1 == n || a.union(b).is_singular())
}

pub fn pj_graph(n: usize, k: usize) -> Result<(Vec<SignedSet>, Graph)> {
    let v = pj_vertices(n, k)?;
    let g = Graph::from_fn(v.len(), |i, j| pj_adjacent(n, k, v[i], v[j]));
    Ok((v, g))
}

pub fn hypercube(n: usize) -> Graph {
    let m = 1usize << n;
    Graph::from_fn(m, |i, j| (i ^ j).count_ones() == 1)
}

/// Even-weight vectors of `{0,1}^n`, adjacent at Hamming distance 2.
pub fn halfcube(n: usize) -> (Vec<u32>, Graph) {
    let v: Vec<u32> = (0u32..1 << n).filter(|x| x.count_ones() % 2 == 0).collect();
    let g = Graph::from_fn(v.len(), |i, j| (v[i] ^ v[j]).count_ones() == 2);
    (v, g)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NamedGraph {
    PolarJohnson { n: usize, k: usize },
    Hypercube(usize),
    HalfCube(usize),
}

#[derive(Clone, Debug)]
pub struct AbstractGraph {
    pub labels: Vec<String>,
    pub graph: Graph,
}

pub fn build_named_graph(kind: NamedGraph) -> Result<AbstractGraph> {
    match kind {
        NamedGraph::PolarJohnson { n, k } => {
            let (v, graph) = pj_graph(n, k)?;
            Ok(AbstractGraph {
                labels: v.iter().map(|s| s.to_string()).collect(),
                graph,
            })
        }
        NamedGraph::Hypercube(n) | NamedGraph::HalfCube(n) => {
            if n == 0 || n > 16 {
                return Err(Error::param(format!("cube dimension must be in 1..=16, got {n}")));
            }
            let (v, graph) = if let NamedGraph::Hypercube(_) = kind {
                ((0u32..1 << n).collect::<Vec<_>>(), hypercube(n))
            } else {
                halfcube(n)
            };
            let labels = v
                .iter()
                .map(|x| (0..n).map(|b| if x >> b & 1 == 1 { '1' } else { '0' }).collect())
                .collect();
            Ok(AbstractGraph { labels, graph })
        }
    }
}

/// The top of `PJ(n,k)` at a `(k+2)`-set `u`: its `(k+1)`-subsets.
pub fn top_members(u: SignedSet) -> Vec<SignedSet> {
    let mut out: Vec<SignedSet> = u.elements().iter().map(|&e| u.remove(e)).collect();
    out.sort();
    out
}

/// The star at `s ⊂ m` with `|m| = n`: the `(|s|+1)`-sets between them.
pub fn star_members(s: SignedSet, m: SignedSet) -> Vec<SignedSet> {
    let mut out: Vec<SignedSet> = m
        .elements()
        .iter()
        .filter(|&&e| !s.contains(e))
        .map(|&e| s.insert(e))
        .collect();
    out.sort();
    out
}

/// The big star at `s`: singular `(|s|+1)`-sets containing it.
pub fn big_star_members(n: usize, s: SignedSet) -> Vec<SignedSet> {
    let mut out = Vec::new();
    for i in 1..=n as i32 {
        if !s.contains(i) && !s.contains(-i) {
            out.push(s.insert(i));
            out.push(s.insert(-i));
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct PjCliques {
    /// Indexed by vertices of `PJ(n,k+1)`.
    pub tops: Vec<(SignedSet, Vec<SignedSet>)>,
    /// Indexed by pairs from `PJ(n,k−1) × PJ(n,n−1)`; empty unless `k ≤ n−3`.
    pub stars: Vec<((SignedSet, SignedSet), Vec<SignedSet>)>,
    /// Indexed by vertices of `PJ(n,k−1)`.
    pub big_stars: Vec<(SignedSet, Vec<SignedSet>)>,
}

pub fn pj_cliques(n: usize, k: usize) -> Result<PjCliques> {
    check_pj(n, k)?;
    if k == 0 || k + 2 > n {
        return Err(Error::param(format!("clique families of PJ({n},{k}) need 1 <= k <= n-2")));
    }
    let tops = singular_sets(n, k + 2)
        .into_iter()
        .map(|u| (u, top_members(u)))
        .collect();
    let lower = singular_sets(n, k);
    let mut stars = Vec::new();
    if k + 3 <= n {
        let maximal = singular_sets(n, n);
        for &s in &lower {
            for &m in maximal.iter().filter(|m| s.is_subset(**m)) {
                stars.push(((s, m), star_members(s, m)));
            }
        }
    }
    let big_stars = lower.into_iter().map(|s| (s, big_star_members(n, s))).collect();
    Ok(PjCliques { tops, stars, big_stars })
}

/// Outcome of an isomorphism search that finished within its budget.
pub type IsoResult = Result<Option<Vec<usize>>>;

/// Joint colour refinement of `g` and `h`; returns the stable colour of every
/// vertex of each graph.
fn refine(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut cg: Vec<usize> = (0..g.order()).map(|v| g.degree(v)).collect();
    let mut ch: Vec<usize> = (0..h.order()).map(|v| h.degree(v)).collect();
    let mut classes = usize::MAX;
    loop {
        let sig = |graph: &Graph, col: &[usize], v: usize| {
            let mut nb: Vec<usize> = graph.neighbors(v).map(|w| col[w]).collect();
            nb.sort_unstable();
            (col[v], nb)
        };
        let sg: Vec<_> = (0..g.order()).map(|v| sig(g, &cg, v)).collect();
        let sh: Vec<_> = (0..h.order()).map(|v| sig(h, &ch, v)).collect();
        let mut ids = BTreeMap::new();
        for s in sg.iter().chain(&sh) {
            let next = ids.len();
            ids.entry(s.clone()).or_insert(next);
        }
        cg = sg.iter().map(|s| ids[s]).collect();
        ch = sh.iter().map(|s| ids[s]).collect();
        if ids.len() == classes {
            return (cg, ch);
        }
        classes = ids.len();
    }
}

/// Searches for an isomorphism `g → h`, returned as the image of each vertex
/// of `g`. `Ok(None)` means the search was exhaustive; running past
/// `budget` search nodes is an error.
pub fn isomorphism(g: &Graph, h: &Graph, budget: u64) -> IsoResult {
    let n = g.order();
    if n != h.order() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let mut dg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let (cg, ch) = refine(g, h);
    let mut count_g = BTreeMap::new();
    let mut count_h = BTreeMap::new();
    cg.iter().for_each(|&c| *count_g.entry(c).or_insert(0usize) += 1);
    ch.iter().for_each(|&c| *count_h.entry(c).or_insert(0usize) += 1);
    if count_g != count_h {
        return Ok(None);
    }

    // Order: smallest colour class first, then greedily the vertex with the
    // most already-ordered neighbours.
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    while order.len() < n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                links[a]
                    .cmp(&links[b])
                    .then(count_g[&cg[b]].cmp(&count_g[&cg[a]]))
                    .then(b.cmp(&a))
            })
            .unwrap();
        placed[v] = true;
        order.push(v);
        for w in g.neighbors(v) {
            links[w] += 1;
        }
    }
    let mut by_colour: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in ch.iter().enumerate() {
        by_colour.entry(c).or_default().push(v);
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut nodes = 0u64;
    let found = extend_iso(g, h, &order, 0, &cg, &by_colour, &mut map, &mut used, &mut nodes, budget)?;
    if !found {
        return Ok(None);
    }
    for a in 0..n {
        for b in 0..a {
            if g.has_edge(a, b) != h.has_edge(map[a], map[b]) {
                return Err(Error::Inconsistent("isomorphism witness failed verification".into()));
            }
        }
    }
    Ok(Some(map))
}

#[allow(clippy::too_many_arguments)]
fn extend_iso(
    g: &Graph,
    h: &Graph,
    order: &[usize],
    depth: usize,
    cg: &[usize],
    by_colour: &BTreeMap<usize, Vec<usize>>,
    map: &mut [usize],
    used: &mut [bool],
    nodes: &mut u64,
    budget: u64,
) -> Result<bool> {
    if depth == order.len() {
        return Ok(true);
    }
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    let v = order[depth];
    for &w in &by_colour[&cg[v]] {
        if used[w] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| g.has_edge(u, v) == h.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend_iso(g, h, order, depth + 1, cg, by_colour, map, used, nodes, budget)? {
            return Ok(true);
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    Ok(false)
}

/// Default node budget for isomorphism searches.
pub const ISO_BUDGET: u64 = 5_000_000;

/// The split of `PJ(4,3)` into two half-cube classes and the automorphisms of
/// `PJ(4,1)` built from it.
#[derive(Clone, Debug)]
pub struct HalfCubeSplit {
    /// Even number of negative elements.
    pub plus: Vec<SignedSet>,
    pub minus: Vec<SignedSet>,
    /// `g[δ]` maps every top of `PJ(4,1)` to a star whose maximal set lies in
    /// class `δ` (0 = plus, 1 = minus). Entries are vertex-index permutations
    /// of [`pj_vertices`]`(4, 1)`.
    pub g: [Vec<usize>; 2],
}

impl HalfCubeSplit {
    pub fn class(&self, delta: usize) -> &[SignedSet] {
        if delta == 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

pub fn halfcube_split_and_g() -> Result<HalfCubeSplit> {
    let maximal = pj_vertices(4, 3)?;
    let (plus, minus): (Vec<SignedSet>, Vec<SignedSet>) =
        maximal.iter().partition(|s| s.negatives() % 2 == 0);
    let broken = || Error::Inconsistent("half-cube split is malformed".into());
    for (a, b, same) in maximal
        .iter()
        .flat_map(|&a| maximal.iter().map(move |&b| (a, b)))
        .map(|(a, b)| (a, b, (a.negatives() + b.negatives()) % 2 == 0))
    {
        let size = a.intersection(b).len();
        let ok = if same { size % 2 == 0 } else { size % 2 == 1 };
        if !ok {
            return Err(broken());
        }
    }
    let lines = pj_vertices(4, 1)?;
    let (points, pj40) = pj_graph(4, 0)?;
    let mut g = [Vec::new(), Vec::new()];
    for (delta, slot) in g.iter_mut().enumerate() {
        let target = if delta == 0 { &minus } else { &plus };
        let gamma = Graph::from_fn(target.len(), |i, j| target[i].intersection(target[j]).len() == 2);
        let h = isomorphism(&pj40, &gamma, ISO_BUDGET)?.ok_or_else(broken)?;
        let mut perm = Vec::with_capacity(lines.len());
        for line in &lines {
            let [a, b] = line.elements()[..] else {
                return Err(broken());
            };
            let ia = points.binary_search(&SignedSet::from_elements(&[a])?).map_err(|_| broken())?;
            let ib = points.binary_search(&SignedSet::from_elements(&[b])?).map_err(|_| broken())?;
            let image = target[h[ia]].intersection(target[h[ib]]);
            perm.push(lines.binary_search(&image).map_err(|_| broken())?);
        }
        *slot = perm;
    }
    Ok(HalfCubeSplit { plus, minus, g })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn signed_set_order_and_display() {
        let a = SignedSet::from_elements(&[1, -2]).unwrap();
        let b = SignedSet::from_elements(&[1, 2]).unwrap();
        let c = SignedSet::from_elements(&[-1, 2]).unwrap();
        assert!(b < a && a > b);
        assert!(a < SignedSet::from_elements(&[-1]).unwrap());
        assert!(b < c);
        assert_eq!(a.to_string(), "{1,-2}");
        assert!(!SignedSet::from_elements(&[3, -3]).unwrap().is_singular());
        assert_eq!(c.elements(), vec![2, -1]);
    }

    #[test]
    fn pj_vertex_counts() {
        for n in 1..=6 {
            for k in 0..n {
                let v = pj_vertices(n, k).unwrap();
                assert_eq!(v.len(), (1 << (k + 1)) * binom(n, k + 1), "PJ({n},{k})");
                assert!(v.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(pj_vertices(3, 0).unwrap().len(), 6);
        assert!(pj_vertices(3, 3).is_err());
    }

    #[test]
    fn dual_pj_is_hypercube() {
        for n in [3, 4] {
            let (_, g) = pj_graph(n, n - 1).unwrap();
            assert!(isomorphism(&g, &hypercube(n), ISO_BUDGET).unwrap().is_some());
        }
    }

    #[test]
    fn isomorphism_edge_cases() {
        let (_, g) = pj_graph(4, 1).unwrap();
        let id = isomorphism(&g, &g, ISO_BUDGET).unwrap().unwrap();
        for (a, b) in g.edges() {
            assert!(g.has_edge(id[a], id[b]));
        }
        let (_, pj30) = pj_graph(3, 0).unwrap();
        assert_eq!(isomorphism(&pj30, &hypercube(3), ISO_BUDGET).unwrap(), None);
        let c5 = Graph::from_fn(5, |i, j| (i + 5 - j) % 5 == 1 || (j + 5 - i) % 5 == 1);
        let p5 = Graph::from_fn(5, |i, j| i.abs_diff(j) == 1);
        assert_eq!(isomorphism(&c5, &p5, ISO_BUDGET).unwrap(), None);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let (_, g) = pj_graph(4, 1).unwrap();
        assert_eq!(isomorphism(&g, &g, 3), Err(Error::BudgetExceeded(3)));
    }

    #[test]
    fn clique_families() {
        let c = pj_cliques(4, 1).unwrap();
        assert_eq!(c.tops.len(), 32);
        assert!(c.tops.iter().all(|(_, m)| m.len() == 3));
        assert!(c.stars.iter().all(|(_, m)| m.len() == 3));
        assert_eq!(c.big_stars.len(), 8);
        assert!(pj_cliques(4, 3).is_err());
        assert!(pj_cliques(4, 2).unwrap().stars.is_empty());
    }

    #[test]
    fn maximal_cliques_are_tops_or_stars() {
        for n in 3..=5 {
            for k in 1..=n - 2 {
                let (v, g) = pj_graph(n, k).unwrap();
                let fam = pj_cliques(n, k).unwrap();
                let mut expected: Vec<Vec<usize>> = fam
                    .tops
                    .iter()
                    .map(|(_, m)| m.clone())
                    .chain(fam.stars.iter().map(|(_, m)| m.clone()))
                    .map(|m| m.iter().map(|s| v.binary_search(s).unwrap()).collect::<Vec<_>>())
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
                    .collect();
                expected.sort();
                assert_eq!(g.maximal_cliques(), expected, "PJ({n},{k})");
            }
        }
    }

    #[test]
    fn big_stars_look_like_pj_n_minus_k_0() {
        for n in 3..=5 {
            for k in 1..=n - 2 {
                let (v, g) = pj_graph(n, k).unwrap();
                let (_, small) = pj_graph(n - k, 0).unwrap();
                for (_, members) in pj_cliques(n, k).unwrap().big_stars {
                    let idx: Vec<usize> = members.iter().map(|s| v.binary_search(s).unwrap()).collect();
                    assert!(isomorphism(&g.induced(&idx), &small, ISO_BUDGET).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn metrics() {
        let g = hypercube(3);
        assert_eq!(g.distance(0, 0), Some(0));
        assert_eq!(g.distance(0, 7), Some(3));
        assert_eq!(g.interval(0, 3), vec![0, 1, 2, 3]);
        assert!(g.is_convex(&[0, 1]));
        assert!(!g.is_convex(&[0, 3]));
        assert_eq!(g.convex_closure(&[0, 3], 10).unwrap(), vec![0, 1, 2, 3]);
        let two = Graph::new(2);
        assert_eq!(two.distance(0, 1), None);
    }

    #[test]
    fn halfcube_automorphisms() {
        let split = halfcube_split_and_g().unwrap();
        assert_eq!(split.plus.len(), 8);
        assert_eq!(split.minus.len(), 8);
        let (v, g) = pj_graph(4, 1).unwrap();
        let (_, half) = halfcube(4);
        let gamma = Graph::from_fn(8, |i, j| split.plus[i].intersection(split.plus[j]).len() == 2);
        assert!(isomorphism(&gamma, &half, ISO_BUDGET).unwrap().is_some());
        for delta in 0..2 {
            let perm = &split.g[delta];
            let mut seen = perm.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..24).collect::<Vec<_>>());
            for a in 0..24 {
                for b in 0..24 {
                    if a != b {
                        assert_eq!(g.has_edge(a, b), g.has_edge(perm[a], perm[b]));
                    }
                }
            }
            for (_, top) in pj_cliques(4, 1).unwrap().tops {
                let image: Vec<SignedSet> = top.iter().map(|s| v[perm[v.binary_search(s).unwrap()]]).collect();
                let common = image.iter().fold(image[0], |acc, s| acc.intersection(*s));
                let joined = image.iter().fold(SignedSet::empty(), |acc, s| acc.union(*s));
                assert_eq!(common.len(), 1);
                assert!(split.class(delta).contains(&joined));
            }
        }
    }
}
