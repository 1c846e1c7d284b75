use std::collections::BTreeMap;

use bvres::b::{BBimodule, BPoint};
use bvres::bimodule::{check_bimodule_map_sample, check_bimodule_sample, Bimodule};
use bvres::mapping::{
    check_path_sample, eval_along, lift_path, psi_double_prime, psi_prime_eval, q_x, render_along, xi_eval,
    HofiberPoint, Names, PointedFamily, QCircX, QElem, TwistFamily, TwistPath, XPath,
};
use bvres::operads::{FramedElement, IntervalConfig, LambdaSequence, LittleIntervals, Operad};
use bvres::suites::{check_operad_map_sample, CheckLog};
use bvres::trees::{Child, InjectiveMap, Node, Tree};
use bvres::w::WPoint;
use bvres::{rat, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Fam = TwistFamily<LittleIntervals>;

fn iv(v: &[(i64, i64, i64, i64)]) -> IntervalConfig {
    IntervalConfig::new(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect()).unwrap()
}

fn setup() -> (Fam, BBimodule<LittleIntervals>, PointedFamily) {
    (TwistFamily::new(LittleIntervals), BBimodule::new(LittleIntervals), PointedFamily::standard())
}

fn assert_clean(log: CheckLog, what: &str) {
    let report = log.finish("laws", what, 0, 0);
    assert!(report.passed(), "{}", report.to_text());
}

/// Frames written out by hand: root thirds, halves on input 1 at length `t`.
#[test]
fn twist_frames_sum_bumps_along_root_paths() {
    let (fam, _, _) = setup();
    let y: WPoint<IntervalConfig> = Tree::Rooted(Node {
        deco: iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]),
        children: vec![
            Child::Inner(rat(1, 2), Box::new(Node { deco: iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), children: vec![Child::Leaf(1), Child::Leaf(3)] })),
            Child::Leaf(2),
        ],
    });
    let d = fam.delta(&rat(2, 1), &y).unwrap();
    // 2 · (1/2)(1 − 1/2) = 1/2 on the two upper leaves
    assert_eq!(d.frame, vec![rat(1, 2), rat(0, 1), rat(1, 2)]);
    assert_eq!(d.base, fam.w.mu(&y).unwrap());
    assert_eq!(fam.eta_mu(&y).unwrap().frame, vec![rat(0, 1); 3]);
}

#[test]
fn every_twist_is_an_operad_map() {
    let (fam, _, _) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in [rat(0, 1), rat(1, 1), rat(-1, 2), rat(7, 3)] {
        let f = |y: &WPoint<IntervalConfig>| fam.delta(&s, y);
        let mut log = CheckLog::new();
        for _ in 0..100 {
            check_operad_map_sample(&fam.w, &fam.q, &f, &mut rng, 4, &mut log);
        }
        assert_clean(log, &format!("delta_{s}"));
    }
}

#[test]
fn sampled_paths_satisfy_every_bullet() {
    let (fam, _, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut log = CheckLog::new();
    for _ in 0..150 {
        let h = HofiberPoint::random(&mut rng, &xs);
        h.check(&xs).unwrap();
        check_path_sample(&fam, &h.path, xs.scale(h.x).unwrap(), &mut rng, 3, &mut log);
    }
    assert_clean(log, "paths");
}

#[test]
fn a_path_with_the_wrong_end_fails_only_that_bullet() {
    let (fam, _, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let path = TwistPath::linear(rat(0, 1), rat(1, 1));
    let mut log = CheckLog::new();
    for _ in 0..100 {
        check_path_sample(&fam, &path, xs.scale(2).unwrap(), &mut rng, 3, &mut log);
    }
    let report = log.finish("paths", "mutated", 100, 3);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    assert_eq!(failed, vec!["end"]);
    assert!(report.checks.iter().find(|c| c.id == "end").unwrap().witness.is_some());
    let h = HofiberPoint { x: 2, path };
    assert!(matches!(h.check(&xs), Err(Error::Invariant { invariant, .. }) if invariant == "end"));
}

#[test]
fn path_parsing_and_interpolation() {
    let p: TwistPath = "0/1:0/1,1/2:2/1,1/1:1/1".parse().unwrap();
    assert_eq!(p.scale_at(&rat(1, 4)).unwrap(), rat(1, 1));
    assert_eq!(p.scale_at(&rat(3, 4)).unwrap(), rat(3, 2));
    assert_eq!(p.to_string(), "0/1:0/1,1/2:2/1,1/1:1/1");
    assert!("1/2:0/1,1/1:0/1".parse::<TwistPath>().is_err());
    assert!(p.scale_at(&rat(5, 4)).is_err());
}

#[test]
fn q_x_and_q_circ_x_are_bimodules() {
    let (fam, _, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for x in 0..xs.len() {
        let qx = q_x(&fam, &xs, x).unwrap();
        let mut log = CheckLog::new();
        for _ in 0..80 {
            check_bimodule_sample(&qx, &mut rng, 3, &mut log);
        }
        assert_clean(log, &qx.name());
    }
    let qcx = QCircX::new(fam, xs);
    let mut log = CheckLog::new();
    for _ in 0..150 {
        check_bimodule_sample(&qcx, &mut rng, 3, &mut log);
    }
    assert_clean(log, "QoX");
}

#[test]
fn tagged_right_action_repeats_the_tag() {
    let (fam, _, xs) = setup();
    let qcx = QCircX::new(fam.clone(), xs.clone());
    let q = fam.eta(iv(&[(1, 4, 3, 4)]));
    let p: WPoint<IntervalConfig> = Tree::corolla(iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), 2);
    let a = xs.lookup("a").unwrap();
    let out = qcx.right(&(q.clone(), vec![a]), 1, &p).unwrap();
    let expected = fam.q.compose(&q, 1, &fam.delta(xs.scale(a).unwrap(), &p).unwrap()).unwrap();
    assert_eq!(out, (expected, vec![a, a]));
    assert_eq!(qcx.right(&(q.clone(), vec![a]), 1, &fam.w.unit()).unwrap(), (q, vec![a]));
}

#[test]
fn tagged_left_action_substitutes_intervals() {
    let (fam, _, xs) = setup();
    let qcx = QCircX::new(fam.clone(), xs);
    let p: WPoint<IntervalConfig> = Tree::corolla(iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]), 2);
    let q1 = FramedElement { base: iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), frame: vec![rat(1, 1), rat(2, 1)] };
    let q2 = FramedElement { base: iv(&[(1, 4, 3, 4)]), frame: vec![rat(-1, 1)] };
    let out = qcx.left(&p, &[(q1, vec![1, 2]), (q2, vec![0])]).unwrap();
    // [0,1/3] ↦ [0,1/6],[1/6,1/3]; [2/3,1] ↦ [2/3 + 1/12, 2/3 + 1/4]
    assert_eq!(out.0.base, iv(&[(0, 1, 1, 6), (1, 6, 1, 3), (3, 4, 11, 12)]));
    assert_eq!(out.0.frame, vec![rat(1, 1), rat(2, 1), rat(-1, 1)]);
    assert_eq!(out.1, vec![1, 2, 0]);
}

#[test]
fn xi_at_the_constant_loop_is_eta_mu_mu_prime() {
    let (fam, b, _) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = TwistPath::constant(rat(0, 1));
    for n in 1..=5 {
        for _ in 0..20 {
            let y = b.sample(&mut rng, n);
            assert_eq!(xi_eval(&fam, &g, &y).unwrap(), fam.eta_mu_prime(&b, &y).unwrap());
        }
    }
    assert!(matches!(xi_eval(&fam, &TwistPath::linear(rat(0, 1), rat(1, 1)), &Tree::Trivial), Err(Error::Domain(_))));
}

#[test]
fn evaluations_are_bimodule_maps() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = q_x(&fam, &xs, 0).unwrap();
    let qcx = QCircX::new(fam.clone(), xs.clone());
    let (mut xi_log, mut psi_log, mut psi2_log) = (CheckLog::new(), CheckLog::new(), CheckLog::new());
    for _ in 0..60 {
        let g = TwistPath::random(&mut rng, rat(0, 1), rat(0, 1));
        let f = |y: &BPoint<IntervalConfig>| xi_eval(&fam, &g, y);
        check_bimodule_map_sample(&b, &base, &f, &mut rng, 3, &mut xi_log);

        let h = HofiberPoint::random(&mut rng, &xs);
        let target = q_x(&fam, &xs, h.x).unwrap();
        let f = |y: &BPoint<IntervalConfig>| psi_prime_eval(&fam, &xs, &h, y).map(|r| r.1);
        check_bimodule_map_sample(&b, &target, &f, &mut rng, 3, &mut psi_log);

        let f2 = psi_double_prime(h.x, &f);
        check_bimodule_map_sample(&b, &qcx, &f2, &mut rng, 3, &mut psi2_log);
    }
    assert_clean(xi_log, "xi");
    assert_clean(psi_log, "psi'");
    assert_clean(psi2_log, "psi''");
}

#[test]
fn evaluation_ignores_the_representative() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=5 {
        for _ in 0..30 {
            let raw = b.sample_raw(&mut rng, n);
            let h = HofiberPoint::random(&mut rng, &xs);
            let canonical = b.normalize(&raw).unwrap();
            assert_eq!(eval_along(&fam, &h.path, &raw).unwrap(), eval_along(&fam, &h.path, &canonical).unwrap());
        }
    }
}

#[test]
fn projection_and_top_vertices() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let h = HofiberPoint::random(&mut rng, &xs);
        let n = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, n);
        assert_eq!(psi_prime_eval(&fam, &xs, &h, &y).unwrap().0, h.x);
        // a vertex at height 1 goes through δ_x
        let w = fam.w.sample(&mut rng, 2);
        let top = b.vertex(w.clone(), rat(1, 1));
        if !top.is_trivial() {
            let got = psi_prime_eval(&fam, &xs, &h, &top).unwrap().1;
            assert_eq!(got, fam.delta(xs.scale(h.x).unwrap(), &w).unwrap());
        }
    }
}

#[test]
fn lifting_at_time_zero_is_the_starting_map() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let h = HofiberPoint::random(&mut rng, &xs);
        let f = |y: &BPoint<IntervalConfig>| psi_prime_eval(&fam, &xs, &h, y).map(|r| r.1);
        let f0 = psi_double_prime(h.x, &f);
        let gamma = XPath::random(&mut rng, h.x, &xs);
        let n = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, n);
        let lifted = lift_path(&b, &fam, &xs, &f0, &gamma, h.x, &rat(0, 1), &y).unwrap();
        assert_eq!(lifted, f0(&y).unwrap());
    }
}

#[test]
fn lifting_a_single_vertex_stretches_it_to_the_top() {
    let (fam, b, xs) = setup();
    let a = xs.lookup("a").unwrap();
    let h = HofiberPoint { x: a, path: TwistPath::linear(rat(0, 1), rat(1, 1)) };
    let f = |y: &BPoint<IntervalConfig>| psi_prime_eval(&fam, &xs, &h, y).map(|r| r.1);
    let f0 = psi_double_prime(a, &f);
    let w: WPoint<IntervalConfig> = Tree::Rooted(Node {
        deco: iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]),
        children: vec![
            Child::Inner(rat(1, 2), Box::new(Node { deco: iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), children: vec![Child::Leaf(1), Child::Leaf(2)] })),
            Child::Leaf(3),
        ],
    });
    let y = b.vertex(w.clone(), rat(1, 2));
    let gamma = XPath::new(vec![(rat(0, 1), a), (rat(1, 2), 2)]).unwrap();
    let lifted = lift_path(&b, &fam, &xs, &f0, &gamma, a, &rat(1, 1), &y).unwrap();
    // cut at 1/2, the vertex sits on it, stays below and is stretched to height 1: δ_a(w)
    assert_eq!(lifted, (fam.delta(&rat(1, 1), &w).unwrap(), vec![2, 2, 2]));
}

#[test]
fn lifting_a_straddling_point() {
    let (fam, b, xs) = setup();
    let a = xs.lookup("a").unwrap();
    let bb = xs.lookup("b").unwrap();
    let h = HofiberPoint { x: a, path: TwistPath::linear(rat(0, 1), rat(1, 1)) };
    let f = |y: &BPoint<IntervalConfig>| psi_prime_eval(&fam, &xs, &h, y).map(|r| r.1);
    let f0 = psi_double_prime(a, &f);
    let lower = iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]);
    let upper: WPoint<IntervalConfig> = Tree::Rooted(Node {
        deco: iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]),
        children: vec![
            Child::Inner(rat(1, 3), Box::new(Node { deco: iv(&[(1, 4, 3, 4)]), children: vec![Child::Leaf(1)] })),
            Child::Leaf(2),
        ],
    });
    let y = b
        .normalize(&Tree::Rooted(Node {
            deco: bvres::b::BLabel { w: Tree::corolla(lower.clone(), 2), height: rat(1, 3) },
            children: vec![
                Child::Leaf(1),
                Child::Inner((), Box::new(Node { deco: bvres::b::BLabel { w: upper.clone(), height: rat(7, 8) }, children: vec![Child::Leaf(2), Child::Leaf(3)] })),
            ],
        }))
        .unwrap();
    // t = 1/2: cut at 3/4; γ jumps to b at time 1/4
    let gamma = XPath::new(vec![(rat(0, 1), a), (rat(1, 4), bb)]).unwrap();
    let lifted = lift_path(&b, &fam, &xs, &f0, &gamma, a, &rat(1, 2), &y).unwrap();
    // lower vertex: height (1/3)/(3/4) = 4/9, so δ_{κ(4/9)} = δ_{4/9} of the corolla, with zero frames
    // upper vertex: 2·7/8 + 1/2 − 2 = 1/4, γ(1/4) = b, scale −1/2, edge 1/3 gives bump 2/9, so frame −1/9
    let q0 = fam.eta(lower);
    let q1 = fam.delta(&rat(-1, 2), &upper).unwrap();
    assert_eq!(q1.frame, vec![rat(-1, 9), rat(0, 1)]);
    let expected: QElem<IntervalConfig> = fam.q.compose(&q0, 2, &q1).unwrap();
    assert_eq!(lifted, (expected, vec![bb, bb, bb]));
}

fn figure_point(b: &BBimodule<LittleIntervals>) -> (BPoint<IntervalConfig>, Names<IntervalConfig>) {
    let mut reg = BTreeMap::new();
    reg.insert("x1".to_string(), Tree::corolla(iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), 2));
    reg.insert("a".to_string(), Tree::corolla(iv(&[(0, 1, 1, 4), (1, 4, 1, 2), (1, 2, 1, 1)]), 3));
    reg.insert("x2".to_string(), Tree::corolla(iv(&[(0, 1, 1, 8), (1, 4, 1, 2), (3, 4, 1, 1)]), 3));
    let y = b
        .parse_with("(v $x1 (v $a l1 l2 l3):h=1/1 (v $x2 l4 l5 l6):h=1/2):h=1/3", &reg, &BTreeMap::new())
        .unwrap();
    let mut names = Names::from_registry(&reg);
    names.heights.insert(rat(1, 3), "t1".into());
    names.heights.insert(rat(1, 2), "t2".into());
    (y, names)
}

#[test]
fn the_two_level_example_prints_as_a_composite() {
    let (fam, b, _) = setup();
    let (y, names) = figure_point(&b);
    assert_eq!(y.arity(), 6);
    assert_eq!(render_along(&fam, &y, &names, None).to_string(), "g2(x1;t1)(g3(a;1); g3(x2;t2))");
    assert_eq!(
        render_along(&fam, &y, &names, Some(("eta.mu", "delta_x"))).to_string(),
        "g2(x1;t1)(delta_x(a); g3(x2;t2))"
    );
    let g = TwistPath::random(&mut ChaCha8Rng::seed_from_u64(10), rat(0, 1), rat(0, 1));
    let by_hand = {
        let n = |name: &str| names.labels.iter().find(|(_, v)| v.as_str() == name).unwrap().0.clone();
        let top = g.eval(&fam, &n("a"), &rat(1, 1)).unwrap();
        let right = g.eval(&fam, &n("x2"), &rat(1, 2)).unwrap();
        fam.q.compose_all(&g.eval(&fam, &n("x1"), &rat(1, 3)).unwrap(), &[top, right]).unwrap()
    };
    assert_eq!(xi_eval(&fam, &g, &y).unwrap(), by_hand);
}

#[test]
fn restriction_commutes_with_evaluation() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let h = HofiberPoint::random(&mut rng, &xs);
        let y = b.sample(&mut rng, 4);
        let u = InjectiveMap::random(&mut rng, 2, 4);
        let lhs = eval_along(&fam, &h.path, &b.act(&u, &y).unwrap()).unwrap();
        let rhs = fam.q.act(&u, &eval_along(&fam, &h.path, &y).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
