//! Seeded random search for induced copies of a pattern graph inside a
//! Grassmann graph, with classification of what was found.
//!
//! Trial `t` of a run with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `t`, so any single trial can be replayed in isolation.

use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::apartments::{
    check_clique_images, classify_pj_l0_image, verify_theorem, EmbeddingMap, PjZeroCase, Rejection, Theorem, Verdict,
    VerifyRequest,
};
use crate::error::{Error, Result};
use crate::graphs::{pj_graph, Graph};
use crate::grassmann::locally_independent;
use crate::polar::{PolarSpace, SingularSubspace};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "pattern", rename_all = "kebab-case")]
pub enum Pattern {
    PolarJohnson { l: usize, m: usize },
    Hypercube { dim: usize },
}

impl Pattern {
    /// The pattern as a polar Johnson graph: `H_m` is `PJ(m, m−1)`.
    pub fn pj_parameters(self) -> (usize, usize) {
        match self {
            Pattern::PolarJohnson { l, m } => (l, m),
            Pattern::Hypercube { dim } => (dim, dim.saturating_sub(1)),
        }
    }

    pub fn graph(self) -> Result<Graph> {
        let (l, m) = self.pj_parameters();
        if l == 0 {
            return Err(Error::param("pattern must be nonempty"));
        }
        Ok(pj_graph(l, m)?.1)
    }
}

#[derive(Copy, Clone, Debug)]
pub struct SearchConfig {
    pub trials: usize,
    pub seed: u64,
    /// Backtracking nodes allowed per trial.
    pub node_budget: u64,
}

/// An induced copy: `vertices[i]` is the target vertex for pattern vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Found {
    pub trial: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchOutcome {
    pub trials: usize,
    pub found: Vec<Found>,
    /// Trials that ran out of budget before finishing their search.
    pub truncated: usize,
    pub nodes: u64,
}

fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.order());
    let mut seen = vec![false; g.order()];
    for start in 0..g.order() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        order.push(start);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

struct Trial<'a> {
    target: &'a Graph,
    pattern: &'a Graph,
    order: &'a [usize],
    rng: ChaCha8Rng,
    image: Vec<usize>,
    used: FixedBitSet,
    nodes: u64,
    budget: u64,
}

impl Trial<'_> {
    fn candidates(&self, depth: usize) -> Vec<usize> {
        let n = self.target.order();
        let v = self.order[depth];
        let mut set = FixedBitSet::with_capacity(n);
        set.insert_range(..);
        for &u in &self.order[..depth] {
            let img = self.image[u];
            if self.pattern.has_edge(u, v) {
                set.intersect_with(self.target.neighbor_set(img));
            } else {
                set.difference_with(self.target.neighbor_set(img));
            }
        }
        set.difference_with(&self.used);
        set.ones().collect()
    }

    /// `Some(true)` on success, `Some(false)` when exhausted, `None` past budget.
    fn extend(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let mut cands = self.candidates(depth);
        cands.shuffle(&mut self.rng);
        let v = self.order[depth];
        for c in cands {
            self.image[v] = c;
            self.used.insert(c);
            match self.extend(depth + 1) {
                Some(false) => {}
                done => return done,
            }
            self.used.set(c, false);
        }
        Some(false)
    }
}

/// Runs seeded trials in parallel; each trial is a randomized backtracking
/// search for one induced copy of `pattern` in `target`.
pub fn random_embeddings(target: &Graph, pattern: &Graph, cfg: &SearchConfig) -> SearchOutcome {
    let order = bfs_order(pattern);
    let nodes = AtomicU64::new(0);
    let results: Vec<(Option<Found>, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(t as u64);
            let mut trial = Trial {
                target,
                pattern,
                order: &order,
                rng,
                image: vec![usize::MAX; pattern.order()],
                used: FixedBitSet::with_capacity(target.order()),
                nodes: 0,
                budget: cfg.node_budget,
            };
            let outcome = if pattern.order() > target.order() {
                Some(false)
            } else {
                trial.extend(0)
            };
            nodes.fetch_add(trial.nodes, Ordering::Relaxed);
            match outcome {
                Some(true) => (
                    Some(Found {
                        trial: t,
                        vertices: trial.image,
                    }),
                    false,
                ),
                Some(false) => (None, false),
                None => (None, true),
            }
        })
        .collect();
    SearchOutcome {
        trials: cfg.trials,
        truncated: results.iter().filter(|r| r.1).count(),
        found: results.into_iter().filter_map(|r| r.0).collect(),
        nodes: nodes.into_inner(),
    }
}

/// What a found copy turned out to be.
#[derive(Clone, Debug)]
pub enum Classification {
    /// A `PJ(l,0)` image, sorted into the two possible shapes.
    PjZero(PjZeroCase),
    /// A hypercube image in the dual polar space.
    Hypercube {
        locally_independent: bool,
        verdict: std::result::Result<SingularSubspace, Rejection>,
    },
    /// A `PJ(l,m)` image with `m ≥ 1`.
    PolarJohnson {
        big_star: Option<SingularSubspace>,
        tops_in_tops: bool,
        verdict: std::result::Result<SingularSubspace, Rejection>,
    },
}

impl Classification {
    pub fn summary(&self) -> String {
        match self {
            Classification::PjZero(PjZeroCase::BigStarFrame { s, l }) => {
                format!("{l}-frame of the big star at a subspace of dimension {}", s.proj_dim())
            }
            Classification::PjZero(PjZeroCase::RankThreeFrame { .. }) => "frame of a rank-three interval".to_string(),
            Classification::Hypercube {
                locally_independent,
                verdict,
            } => match verdict {
                Ok(n) => format!("apartment of a parabolic subspace, base dimension {}", n.proj_dim()),
                Err(r) if !locally_independent => format!("not locally independent ({r})"),
                Err(r) => format!("rejected: {r}"),
            },
            Classification::PolarJohnson { big_star, verdict, .. } => match (verdict, big_star) {
                (Ok(n), _) => format!("spanned by an l-frame over a base of dimension {}", n.proj_dim()),
                (Err(_), Some(s)) => format!("inside the big star at a subspace of dimension {}", s.proj_dim()),
                (Err(r), None) => format!("rejected: {r}"),
            },
        }
    }
}

pub fn classify_found(space: &PolarSpace, pattern: Pattern, xs: &[SingularSubspace]) -> Result<Classification> {
    let (l, m) = pattern.pj_parameters();
    let verdict_base = |v: Verdict| match v {
        Verdict::Accept(c) => Ok(c.base.clone()),
        Verdict::Reject(r) => Err(r),
    };
    match pattern {
        Pattern::Hypercube { dim } => {
            let li = locally_independent(space, xs)?;
            let req = VerifyRequest {
                theorem: Theorem::Thm41,
                l: 0,
                m: dim,
                members: xs.to_vec(),
                map: Some(EmbeddingMap::new(l, m, xs[0].rank() - 1, xs.to_vec())?),
            };
            Ok(Classification::Hypercube {
                locally_independent: li,
                verdict: verdict_base(verify_theorem(space, &req)?),
            })
        }
        Pattern::PolarJohnson { m: 0, .. } => Ok(Classification::PjZero(classify_pj_l0_image(space, xs)?)),
        Pattern::PolarJohnson { l, m } => {
            let f = EmbeddingMap::new(l, m, xs[0].rank() - 1, xs.to_vec())?;
            let report = check_clique_images(space, &f)?;
            let req = VerifyRequest {
                theorem: Theorem::Thm44,
                l,
                m,
                members: xs.to_vec(),
                map: None,
            };
            Ok(Classification::PolarJohnson {
                big_star: report.image_big_star.clone(),
                tops_in_tops: report.t1,
                verdict: verdict_base(verify_theorem(space, &req)?),
            })
        }
    }
}
