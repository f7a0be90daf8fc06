//! Polar spaces defined by classical forms over GF(p).
//!
//! Coordinates are laid out in blocks: `(x_1..x_n, y_1..y_n)` for the
//! symplectic and hyperbolic kinds, with an extra leading `x_0` for the
//! parabolic kind. The hyperbolic pairs are `e_i = x_i`, `f_i = y_i`.

use std::fmt;
use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{combinations, for_each_vector, normalize, LinearSolver, Prime, RowSpace};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    /// Alternating form, type C.
    Symplectic,
    /// `Q = Σ x_i y_i`, type D.
    Hyperbolic,
    /// `Q = x_0² + Σ x_i y_i`, type B. Odd characteristic only.
    Parabolic,
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormKind::Symplectic => "symplectic",
            FormKind::Hyperbolic => "hyperbolic",
            FormKind::Parabolic => "parabolic",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormSpec {
    pub kind: FormKind,
    pub rank: usize,
    pub p: Prime,
}

impl FormSpec {
    fn offset(&self) -> usize {
        usize::from(self.kind == FormKind::Parabolic)
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.rank + self.offset()
    }

    /// The bilinear form: the alternating form for the symplectic kind, the
    /// polarization `Q(u+v) − Q(u) − Q(v)` for the orthogonal kinds.
    pub fn polar(&self, u: &[u8], v: &[u8]) -> u8 {
        let p = self.p;
        let o = self.offset();
        let n = self.rank;
        let mut acc: u32 = 0;
        let pm = p.get();
        match self.kind {
            FormKind::Symplectic => {
                for i in 0..n {
                    acc += u[i] as u32 * v[n + i] as u32;
                    acc += (pm - u[n + i] as u32) * v[i] as u32 % pm;
                }
            }
            FormKind::Hyperbolic | FormKind::Parabolic => {
                if o == 1 {
                    acc += 2 * u[0] as u32 * v[0] as u32;
                }
                for i in 0..n {
                    acc += u[o + i] as u32 * v[o + n + i] as u32;
                    acc += u[o + n + i] as u32 * v[o + i] as u32;
                }
            }
        }
        (acc % pm) as u8
    }

    /// The quadratic form; identically zero for the symplectic kind.
    pub fn quadratic(&self, v: &[u8]) -> u8 {
        let o = self.offset();
        let n = self.rank;
        let mut acc: u32 = 0;
        match self.kind {
            FormKind::Symplectic => return 0,
            FormKind::Parabolic => acc += v[0] as u32 * v[0] as u32,
            FormKind::Hyperbolic => {}
        }
        for i in 0..n {
            acc += v[o + i] as u32 * v[o + n + i] as u32;
        }
        (acc % self.p.get()) as u8
    }

    pub fn is_singular_vector(&self, v: &[u8]) -> bool {
        self.quadratic(v) == 0
    }

    /// True iff every vector of the span of `rows` is singular.
    pub fn is_totally_singular(&self, rows: &[Vec<u8>]) -> bool {
        rows.iter().enumerate().all(|(i, a)| {
            self.quadratic(a) == 0 && rows[..i].iter().all(|b| self.polar(a, b) == 0)
        })
    }

    /// Gram rows `v ↦ f(b, v)` for each `b`, usable as kernel functionals.
    fn functionals(&self, rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let d = self.ambient_dim();
        let mut unit = vec![0u8; d];
        rows.iter()
            .map(|b| {
                (0..d)
                    .map(|j| {
                        unit[j] = 1;
                        let x = self.polar(b, &unit);
                        unit[j] = 0;
                        x
                    })
                    .collect()
            })
            .collect()
    }
}

/// Registry index of a point.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointId(pub u32);

impl PointId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A totally singular subspace, stored canonically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SingularSubspace(RowSpace);

impl SingularSubspace {
    pub fn space(&self) -> &RowSpace {
        &self.0
    }

    pub fn into_space(self) -> RowSpace {
        self.0
    }

    /// Trusts the caller that `space` is totally singular.
    pub(crate) fn new_unchecked(space: RowSpace) -> Self {
        SingularSubspace(space)
    }
}

impl Deref for SingularSubspace {
    type Target = RowSpace;
    fn deref(&self) -> &RowSpace {
        &self.0
    }
}

impl fmt::Debug for SingularSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Singular{:?}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct PolarSpace {
    form: FormSpec,
    points: Vec<Vec<u8>>,
}

impl PolarSpace {
    pub fn build(kind: FormKind, n: usize, p: u32) -> Result<Self> {
        let p = Prime::new(p)?;
        if n < 2 {
            return Err(Error::param(format!("rank must be at least 2, got {n}")));
        }
        Self::from_form(kind, n, p)
    }

    /// Also accepts rank 1, which arises for quotients by large subspaces.
    pub(crate) fn from_form(kind: FormKind, n: usize, p: Prime) -> Result<Self> {
        if kind == FormKind::Parabolic && p.get() == 2 {
            return Err(Error::Unsupported(
                "parabolic quadrics need odd characteristic".into(),
            ));
        }
        if n == 0 {
            return Err(Error::param("rank must be positive"));
        }
        if n > 8 {
            return Err(Error::Unsupported(format!("rank {n} is too large to enumerate")));
        }
        let form = FormSpec { kind, rank: n, p };
        let d = form.ambient_dim();
        let total = (p.get() as f64).powi(d as i32);
        if total > 5.0e7 {
            return Err(Error::Unsupported(format!(
                "GF({p})^{d} is too large to enumerate"
            )));
        }
        // Leading coordinate position from last to first yields lexicographic order.
        let mut points = Vec::new();
        for lead in (0..d).rev() {
            let mut v = vec![0u8; d];
            v[lead] = 1;
            for_each_vector(p, d - lead - 1, |tail| {
                v[lead + 1..].copy_from_slice(tail);
                if form.quadratic(&v) == 0 {
                    points.push(v.clone());
                }
            });
        }
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Ok(PolarSpace { form, points })
    }

    pub fn form(&self) -> &FormSpec {
        &self.form
    }

    pub fn kind(&self) -> FormKind {
        self.form.kind
    }

    pub fn rank(&self) -> usize {
        self.form.rank
    }

    pub fn modulus(&self) -> Prime {
        self.form.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.form.ambient_dim()
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn point_ids(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.points.len() as u32).map(PointId)
    }

    pub fn point(&self, id: PointId) -> &[u8] {
        &self.points[id.index()]
    }

    /// Registry id of the point spanned by `v`, if `v` is a nonzero singular vector.
    pub fn point_id(&self, v: &[u8]) -> Option<PointId> {
        if v.len() != self.ambient_dim() {
            return None;
        }
        let mut w: Vec<u8> = v.iter().map(|&x| x % self.form.p.get() as u8).collect();
        if !normalize(self.form.p, &mut w) {
            return None;
        }
        self.points
            .binary_search(&w)
            .ok()
            .map(|i| PointId(i as u32))
    }

    pub fn point_space(&self, id: PointId) -> SingularSubspace {
        SingularSubspace(RowSpace::from_rows_unchecked(
            self.form.p,
            self.ambient_dim(),
            vec![self.point(id).to_vec()],
        ))
    }

    fn check_id(&self, id: PointId) -> Result<()> {
        if id.index() >= self.points.len() {
            return Err(Error::param(format!("unknown point id {}", id.0)));
        }
        Ok(())
    }

    /// Collinearity of two distinct points.
    pub fn collinear(&self, a: PointId, b: PointId) -> Result<bool> {
        self.check_id(a)?;
        self.check_id(b)?;
        if a == b {
            return Err(Error::param("collinearity needs two distinct points"));
        }
        Ok(self.perpendicular(a, b))
    }

    /// `a ⊥ b`, where every point is perpendicular to itself.
    #[inline]
    pub fn perpendicular(&self, a: PointId, b: PointId) -> bool {
        self.form.polar(self.point(a), self.point(b)) == 0
    }

    /// Points perpendicular to every point of `xs`.
    pub fn perp_set(&self, xs: &[PointId]) -> Result<Vec<PointId>> {
        for &x in xs {
            self.check_id(x)?;
        }
        Ok(self
            .point_ids()
            .filter(|&q| xs.iter().all(|&x| self.perpendicular(q, x)))
            .collect())
    }

    /// The orthogonal complement of a subspace with respect to the polar form.
    pub fn perp(&self, s: &RowSpace) -> RowSpace {
        RowSpace::kernel(self.form.p, self.ambient_dim(), &self.form.functionals(s.rows()))
    }

    pub fn span(&self, vectors: &[Vec<u8>]) -> Result<RowSpace> {
        crate::linalg::rref_canonical(self.form.p, self.ambient_dim(), vectors)
    }

    pub fn span_points(&self, ids: &[PointId]) -> RowSpace {
        RowSpace::from_rows_unchecked(
            self.form.p,
            self.ambient_dim(),
            ids.iter().map(|&i| self.point(i).to_vec()).collect(),
        )
    }

    pub fn is_totally_singular(&self, s: &RowSpace) -> bool {
        self.form.is_totally_singular(s.rows())
    }

    pub fn singular(&self, s: RowSpace) -> Result<SingularSubspace> {
        if s.modulus() != self.form.p {
            return Err(Error::ModulusMismatch(s.modulus().get(), self.form.p.get()));
        }
        if s.ambient_dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: s.ambient_dim(),
            });
        }
        if !self.is_totally_singular(&s) {
            return Err(Error::NotSingular);
        }
        Ok(SingularSubspace(s))
    }

    pub fn singular_from_rows(&self, rows: &[Vec<u8>]) -> Result<SingularSubspace> {
        self.singular(self.span(rows)?)
    }

    pub fn span_singular(&self, ids: &[PointId]) -> Result<SingularSubspace> {
        self.singular(self.span_points(ids))
    }

    /// Registry ids of the points of a subspace, sorted.
    pub fn points_of(&self, s: &RowSpace) -> Vec<PointId> {
        let mut out: Vec<PointId> = s
            .projective_points()
            .iter()
            .filter_map(|v| self.point_id(v))
            .collect();
        out.sort();
        out
    }

    /// Every totally singular subspace of projective dimension `k`, in
    /// canonical order.
    pub fn enumerate_singular(&self, k: usize) -> Result<Vec<SingularSubspace>> {
        let n = self.rank();
        if k >= n {
            return Err(Error::param(format!(
                "projective dimension {k} exceeds the maximum {}",
                n - 1
            )));
        }
        let d = self.ambient_dim();
        let r = k + 1;
        let pivot_sets = combinations(d, r);
        let mut out: Vec<SingularSubspace> = pivot_sets
            .par_iter()
            .flat_map_iter(|pivots| {
                let mut found = Vec::new();
                let mut rows: Vec<Vec<u8>> = Vec::with_capacity(r);
                self.extend_rows(pivots, &mut rows, &mut found);
                found.into_iter()
            })
            .collect();
        out.sort();
        Ok(out)
    }

    fn extend_rows(&self, pivots: &[usize], rows: &mut Vec<Vec<u8>>, out: &mut Vec<SingularSubspace>) {
        let i = rows.len();
        let d = self.ambient_dim();
        if i == pivots.len() {
            out.push(SingularSubspace(RowSpace::from_rows_unchecked(
                self.form.p,
                d,
                rows.clone(),
            )));
            return;
        }
        let pc = pivots[i];
        let free: Vec<usize> = (pc + 1..d).filter(|c| !pivots.contains(c)).collect();
        let mut row = vec![0u8; d];
        row[pc] = 1;
        let mut candidates = Vec::new();
        for_each_vector(self.form.p, free.len(), |vals| {
            for (&c, &x) in free.iter().zip(vals) {
                row[c] = x;
            }
            if self.form.quadratic(&row) == 0 && rows.iter().all(|b| self.form.polar(&row, b) == 0) {
                candidates.push(row.clone());
            }
        });
        for cand in candidates {
            rows.push(cand);
            self.extend_rows(pivots, rows, out);
            rows.pop();
        }
    }

    /// `{e_1, f_1, …, e_n, f_n}` with σ swapping each `e_i` and `f_i`.
    pub fn standard_frame(&self) -> Frame {
        let n = self.rank();
        let o = self.form.offset();
        let d = self.ambient_dim();
        let unit = |j: usize| {
            let mut v = vec![0u8; d];
            v[j] = 1;
            v
        };
        let mut points = Vec::with_capacity(2 * n);
        for i in 0..n {
            points.push(self.point_id(&unit(o + i)).expect("e_i is singular"));
            points.push(self.point_id(&unit(o + n + i)).expect("f_i is singular"));
        }
        Frame::from_pairs(points)
    }

    /// Extends `xs ∪ ys` to a frame of the whole space.
    ///
    /// `xs` must be pairwise perpendicular and linearly independent, `ys`
    /// pairwise perpendicular, `|ys| ≤ |xs| ≤ n`, and every `y` must be
    /// non-perpendicular to exactly one `x`, with distinct `y`s using distinct
    /// `x`s. The returned frame lists the matched pairs first.
    pub fn extend_to_frame(&self, xs: &[PointId], ys: &[PointId]) -> Result<Frame> {
        let n = self.rank();
        for &z in xs.iter().chain(ys) {
            self.check_id(z)?;
        }
        if xs.is_empty() && ys.is_empty() {
            return Ok(self.standard_frame());
        }
        if ys.len() > xs.len() || xs.len() > n {
            return Err(Error::pre(format!(
                "need |Y| <= |X| <= {n}, got |X| = {}, |Y| = {}",
                xs.len(),
                ys.len()
            )));
        }
        let mut all: Vec<PointId> = xs.iter().chain(ys).copied().collect();
        all.sort();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::pre("X and Y must consist of distinct points"));
        }
        for (i, &a) in xs.iter().enumerate() {
            for &b in &xs[..i] {
                if !self.perpendicular(a, b) {
                    return Err(Error::pre(format!("x {} and x {} are not collinear", a.0, b.0)));
                }
            }
        }
        for (i, &a) in ys.iter().enumerate() {
            for &b in &ys[..i] {
                if !self.perpendicular(a, b) {
                    return Err(Error::pre(format!("y {} and y {} are not collinear", a.0, b.0)));
                }
            }
        }
        if self.span_points(xs).rank() != xs.len() {
            return Err(Error::pre("X is not linearly independent"));
        }
        let mut partner: Vec<Option<usize>> = vec![None; xs.len()];
        for (j, &y) in ys.iter().enumerate() {
            let opposite: Vec<usize> = (0..xs.len())
                .filter(|&i| !self.perpendicular(xs[i], y))
                .collect();
            let [i] = opposite[..] else {
                return Err(Error::pre(format!(
                    "y {} is non-collinear with {} points of X, expected exactly one",
                    y.0,
                    opposite.len()
                )));
            };
            if let Some(prev) = partner[i] {
                return Err(Error::pre(format!(
                    "y {} and y {} share the partner x {}",
                    ys[prev].0, y.0, xs[i].0
                )));
            }
            partner[i] = Some(j);
        }

        let mut pairs: Vec<(PointId, PointId)> = Vec::with_capacity(n);
        let mut leftover = Vec::new();
        let mut fixed = Vec::new();
        for (i, &x) in xs.iter().enumerate() {
            match partner[i] {
                Some(j) => {
                    pairs.push((x, ys[j]));
                    fixed.push(x);
                    fixed.push(ys[j]);
                }
                None => leftover.push(x),
            }
        }
        // The residual space: perpendicular to every matched pair.
        let w = self.perp(&self.span_points(&fixed));
        let in_w = |q: PointId| w.contains_vector(self.point(q));
        let wanted = n - pairs.len();
        let mut a = leftover;
        while a.len() < wanted {
            let span = self.span_points(&a);
            let next = self
                .point_ids()
                .find(|&q| in_w(q) && a.iter().all(|&x| self.perpendicular(q, x)) && !span.contains_vector(self.point(q)))
                .ok_or_else(|| Error::Inconsistent("residual space has no maximal subspace".into()))?;
            a.push(next);
        }
        let mut b: Vec<PointId> = Vec::with_capacity(wanted);
        for i in 0..wanted {
            let next = self
                .point_ids()
                .find(|&q| {
                    in_w(q)
                        && !self.perpendicular(q, a[i])
                        && a.iter().enumerate().all(|(j, &x)| j == i || self.perpendicular(q, x))
                        && b.iter().all(|&y| self.perpendicular(q, y))
                })
                .ok_or_else(|| Error::Inconsistent("no hyperbolic partner in residual space".into()))?;
            b.push(next);
        }
        pairs.extend(a.into_iter().zip(b));
        let frame = Frame::from_pairs(pairs.into_iter().flat_map(|(x, y)| [x, y]).collect());
        frame.validate(self)?;
        Ok(frame)
    }

    /// The polar space `S^⊥/S`, with coordinates adapted to a standard form.
    pub fn quotient(&self, s: &SingularSubspace) -> Result<Quotient> {
        if s.ambient_dim() != self.ambient_dim() || s.modulus() != self.modulus() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: s.ambient_dim(),
            });
        }
        if !self.is_totally_singular(s) {
            return Err(Error::NotSingular);
        }
        let n = self.rank();
        let r = s.rank();
        if r + 1 > n {
            return Err(Error::pre(format!(
                "quotient by a subspace of projective dimension {} leaves rank {}",
                r as i32 - 1,
                n as i32 - r as i32
            )));
        }
        let p = self.modulus();
        let form = &self.form;
        if s.is_zero() {
            let basis = RowSpace::full(p, self.ambient_dim()).rows().to_vec();
            return Ok(Quotient {
                base: s.clone(),
                space: self.clone(),
                solver: LinearSolver::new(p, &basis)?,
                basis,
            });
        }
        let perp = self.perp(s);
        let mut rest = perp.complement_of(s);
        let mut es = Vec::new();
        let mut us = Vec::new();
        let stop = form.offset();
        while rest.len() > stop {
            let e = if form.kind == FormKind::Symplectic {
                rest[0].clone()
            } else {
                find_singular(p, form, &rest).ok_or_else(|| {
                    Error::Inconsistent("quotient form has no singular vector".into())
                })?
            };
            let mut u = rest
                .iter()
                .find(|r| form.polar(&e, r) != 0)
                .cloned()
                .ok_or_else(|| Error::Inconsistent("quotient form is degenerate".into()))?;
            let c = p.inv(form.polar(&e, &u));
            p.scale(&mut u, c);
            let qu = form.quadratic(&u);
            p.axpy(&mut u, p.neg(qu), &e);
            let fue = form.polar(&u, &e);
            let projected: Vec<Vec<u8>> = rest
                .iter()
                .map(|r| {
                    let mut r2 = r.clone();
                    let alpha = form.polar(r, &u);
                    let beta = p.mul(form.polar(r, &e), p.inv(fue));
                    p.axpy(&mut r2, p.neg(alpha), &e);
                    p.axpy(&mut r2, p.neg(beta), &u);
                    r2
                })
                .collect();
            let basis = RowSpace::from_rows_unchecked(p, self.ambient_dim(), projected);
            rest = basis.rows().to_vec();
            es.push(e);
            us.push(u);
        }
        let m = es.len();
        if m != n - r {
            return Err(Error::Inconsistent(format!(
                "quotient has Witt index {m}, expected {}",
                n - r
            )));
        }
        let mut basis = Vec::with_capacity(2 * m + 1);
        let mut scale = 1u8;
        if form.kind == FormKind::Parabolic {
            let w = rest.pop().expect("parabolic quotient keeps an anisotropic vector");
            scale = form.quadratic(&w);
            basis.push(w);
        }
        basis.extend(es);
        for mut u in us {
            p.scale(&mut u, scale);
            basis.push(u);
        }
        let space = PolarSpace::from_form(form.kind, m, p)?;
        let mut solver_rows = basis.clone();
        solver_rows.extend(s.rows().iter().cloned());
        let solver = LinearSolver::new(p, &solver_rows)?;
        Ok(Quotient {
            base: s.clone(),
            space,
            basis,
            solver,
        })
    }
}

fn find_singular(p: Prime, form: &FormSpec, rest: &[Vec<u8>]) -> Option<Vec<u8>> {
    if let Some(r) = rest.iter().find(|r| form.quadratic(r) == 0) {
        return Some(r.clone());
    }
    let d = rest[0].len();
    let mut found = None;
    // Small supports first: a singular vector almost always sits in the span
    // of the first few basis vectors.
    for width in [2usize, 3, rest.len()] {
        let width = width.min(rest.len());
        for_each_vector(p, width, |c| {
            if found.is_some() || c.iter().all(|&x| x == 0) {
                return;
            }
            let mut v = vec![0u8; d];
            for (x, r) in c.iter().zip(rest) {
                p.axpy(&mut v, *x, r);
            }
            if form.quadratic(&v) == 0 {
                found = Some(v);
            }
        });
        if found.is_some() {
            break;
        }
    }
    found
}

/// The residue `S^⊥/S` realized as its own polar space.
#[derive(Clone, Debug)]
pub struct Quotient {
    base: SingularSubspace,
    space: PolarSpace,
    basis: Vec<Vec<u8>>,
    solver: LinearSolver,
}

impl Quotient {
    pub fn base(&self) -> &SingularSubspace {
        &self.base
    }

    pub fn space(&self) -> &PolarSpace {
        &self.space
    }

    fn lift_vector(&self, v: &[u8]) -> Vec<u8> {
        let p = self.base.modulus();
        let mut out = vec![0u8; self.base.ambient_dim()];
        for (c, b) in v.iter().zip(&self.basis) {
            p.axpy(&mut out, *c, b);
        }
        out
    }

    /// The subspace of the ambient space corresponding to a quotient subspace.
    pub fn lift(&self, x: &RowSpace) -> SingularSubspace {
        let mut rows = self.base.rows().to_vec();
        rows.extend(x.rows().iter().map(|r| self.lift_vector(r)));
        SingularSubspace(RowSpace::from_rows_unchecked(
            self.base.modulus(),
            self.base.ambient_dim(),
            rows,
        ))
    }

    pub fn lift_point(&self, id: PointId) -> SingularSubspace {
        self.lift(&self.space.point_space(id))
    }

    /// The image of a subspace `X` with `S ⊆ X ⊆ S^⊥`.
    pub fn project(&self, x: &RowSpace) -> Result<SingularSubspace> {
        if !x.includes(&self.base) {
            return Err(Error::pre("subspace does not contain the quotient base"));
        }
        let k = self.basis.len();
        let mut rows = Vec::with_capacity(x.rank());
        for r in x.rows() {
            let c = self
                .solver
                .solve(r)
                .ok_or_else(|| Error::pre("subspace is not inside the perp of the base"))?;
            rows.push(c[..k].to_vec());
        }
        let q = RowSpace::from_rows_unchecked(self.base.modulus(), k, rows);
        self.space.singular(q)
    }

    pub fn project_point(&self, x: &RowSpace) -> Result<PointId> {
        let q = self.project(x)?;
        if q.rank() != 1 {
            return Err(Error::pre("projection is not a point"));
        }
        Ok(self.space.point_id(&q.rows()[0]).expect("singular vectors are registered"))
    }
}

/// `2l` points with a fixed-point-free involution σ; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub points: Vec<PointId>,
    pub sigma: Vec<usize>,
}

impl Frame {
    /// Consecutive entries form the σ-pairs.
    pub fn from_pairs(points: Vec<PointId>) -> Self {
        assert!(points.len().is_multiple_of(2), "frame needs an even number of points");
        let sigma = (0..points.len()).map(|i| i ^ 1).collect();
        Frame { points, sigma }
    }

    /// Number of σ-pairs.
    pub fn l(&self) -> usize {
        self.points.len() / 2
    }

    pub fn pairs(&self) -> Vec<(PointId, PointId)> {
        (0..self.points.len())
            .filter(|&i| i < self.sigma[i])
            .map(|i| (self.points[i], self.points[self.sigma[i]]))
            .collect()
    }

    pub fn validate(&self, space: &PolarSpace) -> Result<()> {
        let m = self.points.len();
        if self.sigma.len() != m || !m.is_multiple_of(2) || m == 0 {
            return Err(Error::Inconsistent("frame needs 2l points and a matching involution".into()));
        }
        if m / 2 > space.rank() {
            return Err(Error::Inconsistent(format!(
                "frame has {} pairs but the rank is {}",
                m / 2,
                space.rank()
            )));
        }
        for (i, &s) in self.sigma.iter().enumerate() {
            if s >= m || s == i || self.sigma[s] != i {
                return Err(Error::Inconsistent(format!("sigma is not a fixed-point-free involution at {i}")));
            }
        }
        for &q in &self.points {
            space.check_id(q)?;
        }
        for i in 0..m {
            for j in 0..i {
                let (a, b) = (self.points[i], self.points[j]);
                if a == b {
                    return Err(Error::Inconsistent(format!("point {} repeated", a.0)));
                }
                let perp = space.perpendicular(a, b);
                if perp == (self.sigma[i] == j) {
                    return Err(Error::Inconsistent(format!(
                        "points {} and {} break the frame collinearity pattern",
                        a.0, b.0
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize) -> PolarSpace {
        PolarSpace::build(FormKind::Symplectic, n, 2).unwrap()
    }

    /// Brute force count of normalized singular vectors.
    fn count_singular_points(kind: FormKind, n: usize, p: u32) -> usize {
        let p = Prime::new(p).unwrap();
        let form = FormSpec { kind, rank: n, p };
        let mut count = 0;
        for_each_vector(p, form.ambient_dim(), |v| {
            if v.iter().find(|&&x| x != 0) == Some(&1) && form.quadratic(v) == 0 {
                count += 1;
            }
        });
        count
    }

    #[test]
    fn point_counts() {
        assert_eq!(w(3).point_count(), 63);
        assert_eq!(w(2).point_count(), 15);
        let q = PolarSpace::build(FormKind::Hyperbolic, 3, 2).unwrap();
        assert_eq!(q.point_count(), count_singular_points(FormKind::Hyperbolic, 3, 2));
        assert_eq!(q.point_count(), 35);
        let b = PolarSpace::build(FormKind::Parabolic, 2, 3).unwrap();
        assert_eq!(b.point_count(), count_singular_points(FormKind::Parabolic, 2, 3));
        assert_eq!(b.point_count(), 40);
    }

    #[test]
    fn build_rejects_bad_parameters() {
        assert!(matches!(PolarSpace::build(FormKind::Parabolic, 3, 2), Err(Error::Unsupported(_))));
        assert!(matches!(PolarSpace::build(FormKind::Symplectic, 1, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(PolarSpace::build(FormKind::Symplectic, 3, 4), Err(Error::InvalidModulus(4))));
    }

    #[test]
    fn collinearity_examples() {
        let s = w(3);
        let f = s.standard_frame();
        let (e1, f1, e2) = (f.points[0], f.points[1], f.points[2]);
        assert!(s.collinear(e1, e2).unwrap());
        assert!(!s.collinear(e1, f1).unwrap());
        assert!(s.collinear(e1, e1).is_err());
    }

    #[test]
    fn polarization_matches_quadratic_form() {
        let q = PolarSpace::build(FormKind::Hyperbolic, 3, 2).unwrap();
        let form = q.form();
        for a in q.point_ids() {
            for b in q.point_ids() {
                let (u, v) = (q.point(a), q.point(b));
                let sum: Vec<u8> = u.iter().zip(v).map(|(x, y)| (x + y) % 2).collect();
                let expect = (form.quadratic(&sum) + 4 - form.quadratic(u) - form.quadratic(v)) % 2;
                assert_eq!(form.polar(u, v), expect);
            }
        }
    }

    #[test]
    fn perp_sets() {
        let s = w(3);
        let f = s.standard_frame();
        assert_eq!(s.perp_set(&f.points[..1]).unwrap().len(), 31);
        assert!(s.perp_set(&f.points).unwrap().is_empty());
        assert_eq!(s.perp_set(&f.points[..2]).unwrap().len(), 15);
    }

    #[test]
    fn singular_counts() {
        let s = w(3);
        assert_eq!(s.enumerate_singular(0).unwrap().len(), 63);
        assert_eq!(s.enumerate_singular(1).unwrap().len(), 315);
        assert_eq!(s.enumerate_singular(2).unwrap().len(), 135);
        assert!(s.enumerate_singular(3).is_err());
        let q = PolarSpace::build(FormKind::Hyperbolic, 3, 2).unwrap();
        assert_eq!(q.enumerate_singular(2).unwrap().len(), 30);
    }

    #[test]
    fn singular_enumeration_matches_filter() {
        let p = Prime::new(2).unwrap();
        for kind in [FormKind::Symplectic, FormKind::Hyperbolic] {
            let s = PolarSpace::build(kind, 3, 2).unwrap();
            for k in 0..3 {
                let mut brute = Vec::new();
                crate::linalg::for_each_subspace(p, 6, k + 1, |rows| {
                    if s.form().is_totally_singular(rows) {
                        brute.push(s.span(rows).unwrap());
                    }
                });
                brute.sort();
                let fast: Vec<RowSpace> = s
                    .enumerate_singular(k)
                    .unwrap()
                    .into_iter()
                    .map(SingularSubspace::into_space)
                    .collect();
                assert_eq!(fast, brute, "{kind} k={k}");
            }
        }
    }

    #[test]
    fn standard_frames_validate() {
        for (kind, n, p) in [
            (FormKind::Symplectic, 3, 2),
            (FormKind::Hyperbolic, 3, 2),
            (FormKind::Parabolic, 2, 3),
        ] {
            let s = PolarSpace::build(kind, n, p).unwrap();
            let f = s.standard_frame();
            assert_eq!(f.points.len(), 2 * n);
            assert_eq!(f.sigma[..2], [1, 0]);
            f.validate(&s).unwrap();
        }
    }

    #[test]
    fn frame_extension_examples() {
        let s = w(3);
        assert_eq!(s.extend_to_frame(&[], &[]).unwrap(), s.standard_frame());
        let std = s.standard_frame();
        let f = s.extend_to_frame(&[std.points[0]], &[std.points[1]]).unwrap();
        assert!(f.points.contains(&std.points[0]) && f.points.contains(&std.points[1]));
        let err = s.extend_to_frame(&[std.points[0]], &[std.points[2]]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn quotient_by_point() {
        let s = w(3);
        let pt = s.point_space(PointId(0));
        let q = s.quotient(&pt).unwrap();
        assert_eq!(q.space().rank(), 2);
        assert_eq!(q.space().point_count(), 15);
        for id in q.space().point_ids() {
            let line = q.lift_point(id);
            assert_eq!(line.rank(), 2);
            assert!(s.is_totally_singular(&line));
            assert_eq!(q.project_point(&line).unwrap(), id);
        }
    }

    #[test]
    fn quotients_preserve_collinearity() {
        for (kind, n, p) in [
            (FormKind::Hyperbolic, 4, 2),
            (FormKind::Parabolic, 3, 3),
            (FormKind::Symplectic, 3, 3),
        ] {
            let s = PolarSpace::build(kind, n, p).unwrap();
            for base in s.enumerate_singular(0).unwrap().iter().step_by(7) {
                let q = s.quotient(base).unwrap();
                assert_eq!(q.space().rank(), n - 1);
                let lifts: Vec<_> = q.space().point_ids().map(|i| q.lift_point(i)).collect();
                for (i, a) in lifts.iter().enumerate() {
                    for (j, b) in lifts.iter().enumerate().take(i) {
                        let joint = s.is_totally_singular(&a.join(b));
                        let perp = q.space().perpendicular(PointId(i as u32), PointId(j as u32));
                        assert_eq!(joint, perp);
                    }
                }
            }
        }
    }

    #[test]
    fn empty_quotient_is_identity() {
        let s = w(3);
        let q = s.quotient(&SingularSubspace::new_unchecked(RowSpace::zero(s.modulus(), 6))).unwrap();
        assert_eq!(q.space().point_count(), 63);
        for id in s.point_ids().take(20) {
            let x = s.point_space(id);
            assert_eq!(q.lift(&q.project(&x).unwrap()), x);
        }
    }
}
