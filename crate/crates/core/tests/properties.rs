use proptest::prelude::*;

use polaris::apartments::{apartment, descend, extract_certificate, is_embedding, standard_parabolic, EmbeddingMap};
use polaris::linalg::{contains, meet_join, rref_canonical, Prime};
use polaris::polar::{FormKind, Frame, PointId, PolarSpace, SingularSubspace};

fn matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0..p as u8, cols), rows)
}

/// Row operations that keep the row space: add a multiple of one row to
/// another, scale a row by a unit, swap two rows.
fn scramble(p: Prime, rows: &[Vec<u8>], ops: &[(usize, usize, u8)]) -> Vec<Vec<u8>> {
    let mut out = rows.to_vec();
    let n = out.len();
    if n == 0 {
        return out;
    }
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        let c = c % p.get() as u8;
        if i == j {
            if c != 0 {
                p.scale(&mut out[i], c);
            }
        } else if c == 0 {
            out.swap(i, j);
        } else {
            let src = out[j].clone();
            p.axpy(&mut out[i], c, &src);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn rref_is_canonical_under_row_operations(
        p in prop::sample::select(vec![2u32, 3, 5]),
        seed in matrix(5, 6, 8),
        ops in prop::collection::vec((0usize..6, 0usize..6, 0u8..5), 0..40),
    ) {
        let p = Prime::new(p).unwrap();
        let rows: Vec<Vec<u8>> = seed.iter().map(|r| r.iter().map(|&x| x % p.get() as u8).collect()).collect();
        let a = rref_canonical(p, 8, &rows).unwrap();
        let b = rref_canonical(p, 8, &scramble(p, &rows, &ops)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn modular_law(
        p in prop::sample::select(vec![2u32, 3]),
        d in 1usize..=10,
        ra in 0usize..=10,
        rb in 0usize..=10,
        raw_a in matrix(3, 10, 10),
        raw_b in matrix(3, 10, 10),
    ) {
        let p = Prime::new(p).unwrap();
        let cut = |raw: &[Vec<u8>], r: usize| -> Vec<Vec<u8>> {
            raw[..r.min(d)].iter().map(|row| row[..d].iter().map(|&x| x % p.get() as u8).collect()).collect()
        };
        let a = rref_canonical(p, d, &cut(&raw_a, ra)).unwrap();
        let b = rref_canonical(p, d, &cut(&raw_b, rb)).unwrap();
        let (m, j) = meet_join(&a, &b).unwrap();
        prop_assert_eq!(m.rank() + j.rank(), a.rank() + b.rank());
        prop_assert!(a.includes(&m) && b.includes(&m));
        prop_assert!(j.includes(&a) && j.includes(&b));
    }

    #[test]
    fn containment_is_meet_equality(
        p in prop::sample::select(vec![2u32, 3]),
        raw_a in matrix(3, 5, 6),
        pick in prop::collection::vec(prop::collection::vec(0u8..3, 5), 0..4),
        raw_b in matrix(3, 3, 6),
        sub in any::<bool>(),
    ) {
        let p = Prime::new(p).unwrap();
        let red = |rows: &[Vec<u8>]| -> Vec<Vec<u8>> {
            rows.iter().map(|r| r.iter().map(|&x| x % p.get() as u8).collect()).collect()
        };
        let a = rref_canonical(p, 6, &red(&raw_a)).unwrap();
        let b = if sub {
            // Combinations of a's rows give a subspace of a.
            let rows: Vec<Vec<u8>> = pick
                .iter()
                .map(|c| {
                    let mut v = vec![0u8; 6];
                    for (x, r) in c.iter().zip(a.rows()) {
                        p.axpy(&mut v, *x % p.get() as u8, r);
                    }
                    v
                })
                .collect();
            rref_canonical(p, 6, &rows).unwrap()
        } else {
            rref_canonical(p, 6, &red(&raw_b)).unwrap()
        };
        let inside = contains(&a, &b).unwrap();
        prop_assert_eq!(inside, a.meet(&b) == b);
        if sub {
            prop_assert!(inside);
        }
    }
}

fn kinds(p: u32) -> Vec<FormKind> {
    if p == 2 {
        vec![FormKind::Symplectic, FormKind::Hyperbolic]
    } else {
        vec![FormKind::Symplectic, FormKind::Hyperbolic, FormKind::Parabolic]
    }
}

#[test]
fn polar_axioms_small_spaces() {
    for p in [2u32, 3] {
        for n in 2..=3usize {
            for kind in kinds(p) {
                let s = PolarSpace::build(kind, n, p).unwrap();
                let ids: Vec<PointId> = s.point_ids().collect();
                for line in s.enumerate_singular(1).unwrap() {
                    let pts = s.points_of(&line);
                    assert_eq!(pts.len(), p as usize + 1, "{kind} n={n} p={p}");
                    for &a in &ids {
                        let seen = pts.iter().filter(|&&b| s.perpendicular(a, b)).count();
                        assert!(seen == 1 || seen == pts.len(), "{kind} n={n} p={p}: {seen}");
                    }
                }
                for &a in &ids {
                    assert!(ids.iter().any(|&b| !s.perpendicular(a, b)), "{kind} n={n} p={p}");
                }
                // Maximal singular subspaces: every one of dimension n−1 and
                // none of dimension n.
                let tops = s.enumerate_singular(n - 1).unwrap();
                assert!(!tops.is_empty());
                for t in &tops {
                    let perp = s.perp(t);
                    assert_eq!(s.points_of(&perp), s.points_of(t), "{kind} n={n} p={p}: a top extends");
                }
                assert!(s.enumerate_singular(n).map(|v| v.is_empty()).unwrap_or(true));
            }
        }
    }
}

#[test]
fn frames_are_independent() {
    for kind in [FormKind::Symplectic, FormKind::Hyperbolic] {
        let s = PolarSpace::build(kind, 3, 2).unwrap();
        let f = s.standard_frame();
        for (i, &x) in f.points.iter().enumerate() {
            let others: Vec<PointId> = f.points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y).collect();
            let span = s.span_points(&others);
            assert!(!span.contains_vector(s.point(x)), "{kind}: frame point {i} in the span of the rest");
        }
    }
}

#[test]
fn quotient_is_bijective_and_preserves_collinearity() {
    let s = PolarSpace::build(FormKind::Symplectic, 3, 3).unwrap();
    let f = s.standard_frame();
    let base = s.point_space(f.points[0]);
    let q = s.quotient(&base).unwrap();
    let qs = q.space();
    let lines_through: Vec<SingularSubspace> = s
        .enumerate_singular(1)
        .unwrap()
        .into_iter()
        .filter(|l| l.includes(&base))
        .collect();
    assert_eq!(lines_through.len(), qs.point_count());
    let mut images: Vec<PointId> = lines_through.iter().map(|l| q.project_point(l).unwrap()).collect();
    for (l, &x) in lines_through.iter().zip(&images) {
        assert_eq!(&q.lift_point(x), l);
    }
    for (i, a) in lines_through.iter().enumerate() {
        for (j, b) in lines_through.iter().enumerate().skip(i + 1) {
            let upstairs = s.is_totally_singular(&a.join(b));
            assert_eq!(upstairs, qs.perpendicular(images[i], images[j]));
        }
    }
    images.sort();
    images.dedup();
    assert_eq!(images.len(), qs.point_count());
}

fn transport_holds(f: &EmbeddingMap, g: &EmbeddingMap) -> usize {
    let upper = f.vertices();
    let lower = g.vertices();
    let mut pairs = 0;
    for (i, s) in lower.iter().enumerate() {
        for (j, t) in upper.iter().enumerate() {
            if s.is_subset(*t) {
                assert!(
                    f.images[j].includes(&g.images[i]),
                    "f({t}) does not contain the descended image of {s}"
                );
                pairs += 1;
            }
        }
    }
    pairs
}

#[test]
fn descent_transports_incidence() {
    let mut checked = 0;
    for kind in [FormKind::Symplectic, FormKind::Hyperbolic] {
        for n in 3..=5usize {
            let s = PolarSpace::build(kind, n, 2).unwrap();
            for l in 2..=n.min(4) {
                let std = s.standard_frame();
                let frame = Frame::from_pairs(std.points[..2 * l].to_vec());
                for k in 1..l {
                    let apt = apartment(&s, &frame, k).unwrap();
                    let mut f = apt.embedding();
                    while f.m > 0 {
                        let g = descend(&f).unwrap();
                        checked += transport_holds(&f, &g);
                        assert!(g.images.iter().all(|x| x.rank() == f.level));
                        f = g;
                    }
                }
            }
        }
    }
    assert!(checked > 1000, "only {checked} incident pairs");
}

#[test]
fn round_trip_over_gf3() {
    for kind in [FormKind::Symplectic, FormKind::Hyperbolic, FormKind::Parabolic] {
        let s = PolarSpace::build(kind, 4, 3).unwrap();
        let apt = standard_parabolic(&s, 1, 1, 4).unwrap();
        let cert = extract_certificate(&s, &apt.embedding()).unwrap().unwrap();
        assert!(cert.base.is_zero());
        assert_eq!(cert.regenerate(&s).unwrap(), apt.member_set(), "{kind}");
    }
}

/// The set generated by an `l`-frame equals the intersection of the
/// apartments of all frames extending it, except for hyperbolic spaces at
/// `l = n−1`.
#[test]
fn lframe_sets_are_apartment_intersections() {
    for kind in [FormKind::Symplectic, FormKind::Hyperbolic] {
        let s = PolarSpace::build(kind, 3, 2).unwrap();
        let std = s.standard_frame();
        for l in 1..=2usize {
            let head = std.points[..2 * l].to_vec();
            let perp: Vec<PointId> = s.perp_set(&head).unwrap();
            let mut extensions = Vec::new();
            extend(&s, &head, &perp, &mut extensions);
            assert!(extensions.len() > 1);
            for k in 0..l {
                let generated = apartment(&s, &Frame::from_pairs(head.clone()), k).unwrap().member_set();
                let mut common: Option<Vec<SingularSubspace>> = None;
                for frame in &extensions {
                    let set = apartment(&s, frame, k).unwrap().member_set();
                    common = Some(match common {
                        None => set,
                        Some(c) => c.into_iter().filter(|x| set.contains(x)).collect(),
                    });
                }
                let common = common.unwrap();
                if kind == FormKind::Hyperbolic && l + 1 == s.rank() {
                    // B^⊥ is a hyperbolic line with two singular points, so
                    // the extension is unique and the intersection is a full
                    // apartment.
                    assert_eq!(extensions.len(), 2);
                    assert_eq!(common, apartment(&s, &extensions[0], k).unwrap().member_set());
                    assert!(common.len() > generated.len());
                } else {
                    assert_eq!(common, generated, "{kind} l={l} k={k}");
                }
            }
        }
    }
}

/// Every full frame whose first pairs are `head`.
fn extend(s: &PolarSpace, head: &[PointId], pool: &[PointId], out: &mut Vec<Frame>) {
    if head.len() == 2 * s.rank() {
        out.push(Frame::from_pairs(head.to_vec()));
        return;
    }
    for &a in pool {
        for &b in pool {
            if a == b || s.perpendicular(a, b) {
                continue;
            }
            let mut next = head.to_vec();
            next.extend([a, b]);
            let rest: Vec<PointId> = pool.iter().copied().filter(|&x| s.perpendicular(x, a) && s.perpendicular(x, b)).collect();
            extend(s, &next, &rest, out);
        }
    }
}

#[test]
fn parabolic_gf3_apartments_embed() {
    let s = PolarSpace::build(FormKind::Parabolic, 3, 3).unwrap();
    for k in 0..3 {
        let apt = apartment(&s, &s.standard_frame(), k).unwrap();
        assert!(is_embedding(&s, &apt.embedding()), "k={k}");
    }
}
