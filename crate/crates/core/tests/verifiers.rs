use polaris::apartments::{
    apartment, check_clique_images, extract_certificate, standard_parabolic, verify_theorem, Clause, Theorem,
    VerifyRequest,
};
use polaris::grassmann::neighbors;
use polaris::polar::{FormKind, PolarSpace};

fn space(kind: FormKind, n: usize) -> PolarSpace {
    PolarSpace::build(kind, n, 2).unwrap()
}

fn request(theorem: Theorem, l: usize, m: usize, members: Vec<polaris::polar::SingularSubspace>) -> VerifyRequest {
    VerifyRequest {
        theorem,
        l,
        m,
        members,
        map: None,
    }
}

#[test]
fn line_apartment_of_rank_three_is_accepted() {
    let s = space(FormKind::Symplectic, 3);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    let v = verify_theorem(&s, &request(Theorem::Thm42, 3, 1, apt.members.clone())).unwrap();
    let cert = match v {
        polaris::apartments::Verdict::Accept(c) => c,
        polaris::apartments::Verdict::Reject(r) => panic!("{r}"),
    };
    assert!(cert.base.is_zero());
    assert_eq!(cert.regenerate(&s).unwrap(), apt.member_set());
}

#[test]
fn plane_apartment_is_a_hypercube() {
    let s = space(FormKind::Symplectic, 3);
    let apt = apartment(&s, &s.standard_frame(), 2).unwrap();
    let v = verify_theorem(&s, &request(Theorem::Thm41, 0, 3, apt.members.clone())).unwrap();
    assert!(v.is_accept(), "{:?}", v.rejection());
}

#[test]
fn rank_four_line_apartment() {
    for kind in [FormKind::Symplectic, FormKind::Hyperbolic] {
        let s = space(kind, 4);
        let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
        let report = check_clique_images(&s, &apt.embedding()).unwrap();
        assert!(report.t1 && report.t2);
        let cert = extract_certificate(&s, &apt.embedding()).unwrap().unwrap();
        assert_eq!(cert.regenerate(&s).unwrap(), apt.member_set());
        for thm in [Theorem::Thm43, Theorem::Thm44, Theorem::Cor41, Theorem::Cor43] {
            let v = verify_theorem(&s, &request(thm, 4, 1, apt.members.clone())).unwrap();
            assert!(v.is_accept(), "{kind} {thm}: {:?}", v.rejection());
        }
    }
}

#[test]
fn dropping_a_member_breaks_the_isomorphism() {
    let s = space(FormKind::Symplectic, 3);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    let members = apt.members[1..].to_vec();
    let v = verify_theorem(&s, &request(Theorem::Thm42, 3, 1, members)).unwrap();
    assert_eq!(v.rejection().unwrap().clause, Clause::GraphIsomorphism);
}

#[test]
fn replacing_a_member_is_rejected() {
    let s = space(FormKind::Symplectic, 4);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    for i in [0, 7, 23] {
        let out = neighbors(&s, &apt.members[i])
            .into_iter()
            .find(|x| !apt.members.contains(x))
            .unwrap();
        let mut members = apt.members.clone();
        members[i] = out;
        let v = verify_theorem(&s, &request(Theorem::Thm43, 4, 1, members)).unwrap();
        assert!(!v.is_accept());
    }
}

#[test]
fn parabolic_line_frame_in_rank_five() {
    let s = space(FormKind::Hyperbolic, 5);
    let apt = standard_parabolic(&s, 2, 1, 4).unwrap();
    assert_eq!(apt.len(), 24);
    let cert = extract_certificate(&s, &apt.embedding()).unwrap().unwrap();
    assert_eq!(cert.base, apt.base);
    let v = verify_theorem(&s, &request(Theorem::Thm44, 4, 1, apt.members.clone())).unwrap();
    assert!(v.is_accept(), "{:?}", v.rejection());
}

fn expect_accept(s: &PolarSpace, req: &VerifyRequest) -> Box<polaris::apartments::Certificate> {
    match verify_theorem(s, req).unwrap() {
        polaris::apartments::Verdict::Accept(c) => c,
        polaris::apartments::Verdict::Reject(r) => panic!("{} rejected: {r}", req.theorem),
    }
}

#[test]
fn planes_through_a_point_form_a_square() {
    let s = space(FormKind::Symplectic, 3);
    let std = s.standard_frame();
    let q = s.quotient(&s.point_space(std.points[0])).unwrap();
    let sub = q.space().standard_frame();
    let apt = polaris::apartments::parabolic_apartment(&s, &q, &sub, 2).unwrap();
    assert_eq!(apt.len(), 4);
    let cert = expect_accept(&s, &request(Theorem::Thm41, 0, 2, apt.members.clone()));
    assert_eq!(cert.base, s.point_space(std.points[0]));
}

#[test]
fn parabolic_apartment_meets_the_line_theorem() {
    let s = space(FormKind::Symplectic, 5);
    let apt = standard_parabolic(&s, 2, 1, 4).unwrap();
    let cert = expect_accept(&s, &request(Theorem::Thm42, 4, 1, apt.members.clone()));
    assert_eq!(cert.base, apt.base);
    assert_eq!(cert.regenerate(&s).unwrap(), apt.member_set());
    let v = verify_theorem(&s, &request(Theorem::Thm42, 4, 1, apt.members[..23].to_vec())).unwrap();
    assert_eq!(v.rejection().unwrap().clause, Clause::GraphIsomorphism);
}

#[test]
fn line_frame_of_rank_five() {
    let s = space(FormKind::Symplectic, 5);
    let std = s.standard_frame();
    let frame = polaris::polar::Frame::from_pairs(std.points[..8].to_vec());
    let apt = apartment(&s, &frame, 1).unwrap();
    let cert = extract_certificate(&s, &apt.embedding()).unwrap().unwrap();
    assert!(cert.base.is_zero());
    assert_eq!(cert.generators, apt.generators);
    assert!(!cert.is_full());
    let cert = expect_accept(&s, &request(Theorem::Cor43, 4, 1, apt.members.clone()));
    assert_eq!(cert.regenerate(&s).unwrap(), apt.member_set());
}

#[test]
fn stars_go_to_stars_when_l_minus_m_is_four() {
    let s = space(FormKind::Symplectic, 5);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    let report = check_clique_images(&s, &apt.embedding()).unwrap();
    assert!(report.stars_in_stars() && !report.stars.is_empty());
    assert!(report.t1 && report.t2 && report.big_stars_in_big_stars());
    assert!(report.image_big_star.is_none());
}

#[test]
fn half_cube_twist_sends_a_top_into_a_star() {
    let s = space(FormKind::Symplectic, 4);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    let split = polaris::graphs::halfcube_split_and_g().unwrap();
    let f = apt.embedding();
    for g in &split.g {
        let h = f.compose(g);
        assert!(polaris::apartments::is_embedding(&s, &h));
        let report = check_clique_images(&s, &h).unwrap();
        assert!(!report.t1);
        assert!(report.tops.iter().any(|c| c.in_star && !c.in_top));
        let req = VerifyRequest {
            theorem: Theorem::Thm43,
            l: 4,
            m: 1,
            members: apt.members.clone(),
            map: Some(h.clone()),
        };
        assert_eq!(verify_theorem(&s, &req).unwrap().rejection().unwrap().clause, Clause::Hypothesis);
        let req = VerifyRequest { map: None, ..req };
        expect_accept(&s, &req);
    }
}

#[test]
fn collapsed_top_stops_the_descent() {
    let s = space(FormKind::Symplectic, 4);
    let apt = apartment(&s, &s.standard_frame(), 1).unwrap();
    let std = s.standard_frame();
    let pt = |e: i32| s.point(std.points[polaris::apartments::frame_index(e)]).to_vec();
    let add = |a: &[u8], b: &[u8]| a.iter().zip(b).map(|(x, y)| (x + y) % 2).collect::<Vec<u8>>();
    let mut f = apt.embedding();
    let verts = f.vertices();
    let at = |e: &[i32]| verts.binary_search(&polaris::graphs::SignedSet::from_elements(e).unwrap()).unwrap();
    f.images[at(&[1, 4])] = s.singular_from_rows(&[pt(1), add(&pt(2), &pt(3))]).unwrap();
    f.images[at(&[2, 4])] = s.singular_from_rows(&[pt(2), add(&pt(1), &pt(3))]).unwrap();
    match polaris::apartments::descend(&f) {
        Err(polaris::Error::SpecialMap { vertex, .. }) => assert_eq!(vertex, "{4}"),
        other => panic!("unexpected {other:?}"),
    }
    let r = extract_certificate(&s, &f).unwrap().unwrap_err();
    assert!(matches!(r.clause, Clause::TopsInTops | Clause::DistinctTops | Clause::Descent));
}

#[test]
fn local_certificate_counts() {
    let s = space(FormKind::Symplectic, 5);
    let apt = standard_parabolic(&s, 2, 1, 4).unwrap();
    let f = apt.embedding();
    let verts = f.vertices();
    let v = verts.binary_search(&polaris::graphs::SignedSet::from_elements(&[1, 2]).unwrap()).unwrap();
    let local = polaris::apartments::local_apartment_certificate(&s, &f, v).unwrap().unwrap();
    assert_eq!(local.basis.len(), 6);
    assert_eq!(local.base, apt.base);

    let star_only = verts.binary_search(&polaris::graphs::SignedSet::from_elements(&[1, -2]).unwrap()).unwrap();
    let replacement = neighbors(&s, &f.images[v])
        .into_iter()
        .find(|x| !f.images.contains(x) && x.includes(&apt.base))
        .unwrap();
    let mut g = f.clone();
    g.images[star_only] = replacement;
    let r = polaris::apartments::local_apartment_certificate(&s, &g, v).unwrap().unwrap_err();
    assert_eq!(r.clause, Clause::LocalCertificate);
    assert!(r.detail.contains("neighbourhood"), "{r}");
}
