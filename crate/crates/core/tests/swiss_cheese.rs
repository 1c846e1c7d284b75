use std::collections::BTreeMap;

use bvres::b::{BBimodule, BPoint};
use bvres::bimodule::{check_bimodule_map_sample, Bimodule};
use bvres::mapping::{psi_prime_eval, xi_eval, HofiberPoint, Names, PointedFamily, QCircX, QElem, Tagged, TwistFamily, TwistPath};
use bvres::operads::{IntervalConfig, LittleIntervals, Operad};
use bvres::suites::CheckLog;
use bvres::swiss_cheese::{alpha_eval, d1_action_eval, render_alpha, subdivide, Color, Region, RegionKind, Sc1Element};
use bvres::trees::Tree;
use bvres::{rat, Error, Rational, Result};
use proptest::prelude::*;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Fam = TwistFamily<LittleIntervals>;
type B = BBimodule<LittleIntervals>;
type Pt = BPoint<IntervalConfig>;

fn iv(v: &[(i64, i64, i64, i64)]) -> IntervalConfig {
    IntervalConfig::new(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect()).unwrap()
}

fn setup() -> (Fam, B, PointedFamily) {
    (TwistFamily::new(LittleIntervals), BBimodule::new(LittleIntervals), PointedFamily::standard())
}

fn loop_path(rng: &mut dyn RngCore) -> TwistPath {
    TwistPath::random(rng, rat(0, 1), rat(0, 1))
}

fn closed_map<'a>(fam: &'a Fam, g: TwistPath) -> impl Fn(&Pt) -> Result<QElem<IntervalConfig>> + 'a {
    move |p| xi_eval(fam, &g, p)
}

fn open_map<'a>(fam: &'a Fam, xs: &'a PointedFamily, h: HofiberPoint) -> impl Fn(&Pt) -> Result<Tagged<IntervalConfig>> + 'a {
    move |p| {
        let (x, q) = psi_prime_eval(fam, xs, &h, p)?;
        let n = q.frame.len();
        Ok((q, vec![x; n]))
    }
}

fn open_c(v: &[(i64, i64, i64, i64)]) -> Sc1Element {
    Sc1Element::new(Color::Open, iv(v)).unwrap()
}

#[test]
fn gaps_between_discs() {
    let c = open_c(&[(1, 4, 1, 2), (3, 4, 1, 1)]);
    assert_eq!(c.gaps(), vec![(rat(0, 1), rat(1, 4)), (rat(1, 2), rat(3, 4))]);
    // labels out of position order
    let c = Sc1Element::new(Color::Closed, iv(&[(1, 2, 3, 4), (0, 1, 1, 4)])).unwrap();
    assert_eq!(c.gaps(), vec![(rat(0, 1), rat(0, 1)), (rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 1))]);
    let kinds: Vec<RegionKind> = c.regions().iter().map(|r| r.kind).collect();
    assert_eq!(
        kinds,
        vec![RegionKind::Gap(0), RegionKind::Disc(2), RegionKind::Gap(1), RegionKind::Disc(1), RegionKind::Gap(2)]
    );
}

#[test]
fn open_configurations_end_at_one() {
    assert!(matches!(Sc1Element::new(Color::Open, iv(&[(1, 4, 1, 2)])), Err(Error::Invariant { .. })));
    let c = Sc1Element::decode("o:1/4,1/2;3/4,1/1").unwrap();
    assert_eq!(c.closed_inputs(), 1);
    assert_eq!(Sc1Element::decode(&c.encode()).unwrap(), c);
    assert_eq!(Sc1Element::from_json(&c.to_json()).unwrap(), c);
    assert!(Sc1Element::decode("x:0/1,1/1").is_err());
}

#[test]
fn rescaling_maps_a_disc_onto_the_unit_interval() {
    let disc = Region { kind: RegionKind::Disc(1), lo: rat(1, 4), hi: rat(1, 2), closed_top: false };
    assert_eq!(disc.rescale(&rat(3, 8)), rat(1, 2));
    assert_eq!(disc.rescale(&rat(1, 4)), rat(0, 1));
    let open = Region { kind: RegionKind::Disc(2), lo: rat(1, 2), hi: rat(1, 1), closed_top: true };
    assert_eq!(open.rescale(&rat(7, 8)), rat(3, 4));
    assert!(open.contains(&rat(1, 1)) && !disc.contains(&rat(1, 2)));
}

#[test]
fn composition_respects_colors() {
    let c = open_c(&[(0, 1, 1, 4), (1, 2, 1, 1)]);
    let closed = Sc1Element::new(Color::Closed, iv(&[(0, 1, 1, 2), (1, 2, 1, 1)])).unwrap();
    let open = open_c(&[(0, 1, 1, 2), (1, 2, 1, 1)]);
    let inner = c.compose(1, &closed).unwrap();
    assert_eq!(inner.config, iv(&[(0, 1, 1, 8), (1, 8, 1, 4), (1, 2, 1, 1)]));
    let outer = c.compose(2, &open).unwrap();
    assert_eq!(outer.config, iv(&[(0, 1, 1, 4), (1, 2, 3, 4), (3, 4, 1, 1)]));
    assert_eq!(outer.color, Color::Open);
    assert!(matches!(c.compose(1, &open), Err(Error::Domain(_))));
    assert!(matches!(c.compose(2, &closed), Err(Error::Domain(_))));
    assert!(matches!(closed.compose(3, &closed), Err(Error::Arity(_))));
}

/// The worked point: discs `[1/8, 3/8]` and `[1/2, 1]`, five vertices.
fn worked_point(b: &B) -> (Pt, Names<IntervalConfig>) {
    let mut reg = BTreeMap::new();
    for (name, c) in [
        ("x1", iv(&[(0, 1, 1, 2), (1, 2, 1, 1)])),
        ("x2", iv(&[(0, 1, 1, 3), (2, 3, 1, 1)])),
        ("x3", iv(&[(0, 1, 1, 4), (1, 2, 1, 1)])),
        ("x4", iv(&[(0, 1, 1, 2), (3, 4, 1, 1)])),
        ("x5", iv(&[(1, 4, 1, 2), (1, 2, 1, 1)])),
    ] {
        reg.insert(name.to_string(), Tree::corolla(c, 2));
    }
    let y = b
        .parse_with(
            "(v $x1 (v $x2 (v $x3 (v $x4 l1 l2):h=3/4 l3):h=5/8 l4):h=7/16 (v $x5 l5 l6):h=7/8):h=1/4",
            &reg,
            &BTreeMap::new(),
        )
        .unwrap();
    let mut names = Names::from_registry(&reg);
    for (h, t) in [(rat(1, 4), "t1"), (rat(7, 16), "t2"), (rat(5, 8), "t3"), (rat(3, 4), "t4"), (rat(7, 8), "t5")] {
        names.heights.insert(h, t.into());
    }
    (y, names)
}

#[test]
fn the_worked_point_prints_as_nested_composites() {
    let (fam, b, _) = setup();
    let (y, names) = worked_point(&b);
    assert_eq!(y.arity(), 6);
    let c = open_c(&[(1, 8, 3, 8), (1, 2, 1, 1)]);
    assert_eq!(
        render_alpha(&fam, &c, &y, &names).unwrap().to_string(),
        "(f1(c1*(x1;t1))(eta.mu(x2), *'))(f2(c2*(z1_2)), f2(iota(*)), f2(c2*(x5;t5)))"
    );
    let sub = subdivide(&c, &y).unwrap();
    let sizes: Vec<Vec<usize>> = sub.levels.iter().map(|l| l.iter().map(|s| s.body.vertex_count()).collect()).collect();
    assert_eq!(sizes, vec![vec![0], vec![1], vec![1, 0], vec![2, 0, 1]]);
}

#[test]
fn the_worked_point_evaluates_level_by_level() {
    let (fam, b, xs) = setup();
    let (y, _) = worked_point(&b);
    let c = open_c(&[(1, 8, 3, 8), (1, 2, 1, 1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f1 = closed_map(&fam, loop_path(&mut rng));
    let h = HofiberPoint { x: 1, path: TwistPath::linear(rat(0, 1), rat(1, 1)) };
    let f2 = open_map(&fam, &xs, h);
    let got = alpha_eval(&fam, &b, &c, &[&f1], &f2, &y).unwrap();

    // by hand from the regions
    let sub = subdivide(&c, &y).unwrap();
    let l = |k: usize, j: usize| sub.levels[k][j].body.clone();
    let stretch = |p: &Pt, lo: Rational, hi: Rational| {
        p.try_map(
            |lab: &bvres::b::BLabel<IntervalConfig>| {
                Ok(bvres::b::BLabel { w: lab.w.clone(), height: &(&lab.height - &lo) / &(&hi - &lo) })
            },
            |_| Ok(()),
        )
        .unwrap()
    };
    let renumber = |mut p: Pt| {
        let first = p.leaf_word().into_iter().min().unwrap();
        p.map_leaves(|k| k + 1 - first);
        p
    };
    let level1 = f1(&stretch(&l(1, 0), rat(1, 8), rat(3, 8))).unwrap();
    let level2 = vec![fam.eta_mu_prime(&b, &l(2, 0)).unwrap(), fam.q.unit()];
    let tops: Vec<Tagged<IntervalConfig>> = (0..3)
        .map(|j| f2(&stretch(&renumber(l(3, j)), rat(1, 2), rat(1, 1))).unwrap())
        .collect();
    let acc = fam.q.compose_all(&level1, &level2).unwrap();
    let qs: Vec<_> = tops.iter().map(|t| t.0.clone()).collect();
    let expected = fam.q.compose_all(&acc, &qs).unwrap();
    assert_eq!(got.0, expected);
    assert_eq!(got.1, vec![1; 6]);
}

#[test]
fn the_identity_configurations_act_trivially() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, n);
        let f = closed_map(&fam, loop_path(&mut rng));
        let h = HofiberPoint::random(&mut rng, &xs);
        let g = open_map(&fam, &xs, h);
        assert_eq!(d1_action_eval(&fam, &b, &Sc1Element::identity(Color::Closed), &[&f], &y).unwrap(), f(&y).unwrap());
        assert_eq!(alpha_eval(&fam, &b, &Sc1Element::identity(Color::Open), &[], &g, &y).unwrap(), g(&y).unwrap());
    }
}

#[test]
fn nested_actions_match_composed_configurations() {
    let (fam, b, xs) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for round in 0..200 {
        let n = rng.gen_range(0..=2);
        let c = Sc1Element::random(&mut rng, n, Color::Open);
        let i = rng.gen_range(1..=n + 1);
        let m = rng.gen_range(if i <= n { 1 } else { 0 }..=2);
        let c2 = Sc1Element::random(&mut rng, m, if i <= n { Color::Closed } else { Color::Open });
        let arity = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, arity);

        let fs: Vec<_> = (0..n).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let gs: Vec<_> = (0..m).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let top_a = open_map(&fam, &xs, HofiberPoint::random(&mut rng, &xs));
        let top_b = open_map(&fam, &xs, HofiberPoint::random(&mut rng, &xs));
        let fs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = fs.iter().map(|f| f as _).collect();
        let gs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = gs.iter().map(|f| f as _).collect();

        let composed = c.compose(i, &c2).unwrap();
        let (lhs, rhs) = if i <= n {
            let mut flat = fs[..i - 1].to_vec();
            flat.extend(gs.iter().copied());
            flat.extend(fs[i..].iter().copied());
            let inner = |p: &Pt| d1_action_eval(&fam, &b, &c2, &gs, p);
            let mut nested = fs.clone();
            nested[i - 1] = &inner;
            (
                alpha_eval(&fam, &b, &composed, &flat, &top_a, &y).unwrap(),
                alpha_eval(&fam, &b, &c, &nested, &top_a, &y).unwrap(),
            )
        } else {
            let mut flat = fs.clone();
            flat.extend(gs.iter().copied());
            let inner = |p: &Pt| alpha_eval(&fam, &b, &c2, &gs, &top_b, p);
            (
                alpha_eval(&fam, &b, &composed, &flat, &top_b, &y).unwrap(),
                alpha_eval(&fam, &b, &c, &fs, &inner, &y).unwrap(),
            )
        };
        assert_eq!(lhs, rhs, "round {round}: {c} ∘_{i} {c2} at {}", b.to_text(&y));
    }
}

#[test]
fn nested_closed_actions_match_composed_configurations() {
    let (fam, b, _) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let c = Sc1Element::random(&mut rng, n, Color::Closed);
        let i = rng.gen_range(1..=n);
        let m = rng.gen_range(1..=2);
        let c2 = Sc1Element::random(&mut rng, m, Color::Closed);
        let arity = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, arity);
        let fs: Vec<_> = (0..n).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let gs: Vec<_> = (0..m).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let fs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = fs.iter().map(|f| f as _).collect();
        let gs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = gs.iter().map(|f| f as _).collect();
        let mut flat = fs[..i - 1].to_vec();
        flat.extend(gs.iter().copied());
        flat.extend(fs[i..].iter().copied());
        let inner = |p: &Pt| d1_action_eval(&fam, &b, &c2, &gs, p);
        let mut nested = fs.clone();
        nested[i - 1] = &inner;
        assert_eq!(
            d1_action_eval(&fam, &b, &c.compose(i, &c2).unwrap(), &flat, &y).unwrap(),
            d1_action_eval(&fam, &b, &c, &nested, &y).unwrap()
        );
    }
}

#[test]
fn the_action_lands_in_bimodule_maps() {
    let (fam, b, xs) = setup();
    let target = QCircX::new(fam.clone(), xs.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut log = CheckLog::new();
    for _ in 0..60 {
        let n = rng.gen_range(0..=2);
        let c = Sc1Element::random(&mut rng, n, Color::Open);
        let fs: Vec<_> = (0..n).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let fs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = fs.iter().map(|f| f as _).collect();
        let top = open_map(&fam, &xs, HofiberPoint::random(&mut rng, &xs));
        let alpha = |p: &Pt| alpha_eval(&fam, &b, &c, &fs, &top, p);
        for _ in 0..3 {
            check_bimodule_map_sample(&b, &target, &alpha, &mut rng, 3, &mut log);
        }
    }
    let report = log.finish("laws", "alpha", 0, 0);
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn with_a_single_point_the_open_action_is_the_closed_one() {
    let fam = TwistFamily::new(LittleIntervals);
    let b = BBimodule::new(LittleIntervals);
    let star = PointedFamily::new(vec![("*".into(), rat(0, 1))]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..60 {
        let n = rng.gen_range(0..=2);
        let c = Sc1Element::random(&mut rng, n, Color::Open);
        let as_closed = Sc1Element::new(Color::Closed, c.config.clone()).unwrap();
        let fs: Vec<_> = (0..=n).map(|_| closed_map(&fam, loop_path(&mut rng))).collect();
        let fs: Vec<&dyn Fn(&Pt) -> Result<QElem<IntervalConfig>>> = fs.iter().map(|f| f as _).collect();
        let last = fs[n];
        let top = |p: &Pt| {
            let q = last(p)?;
            let k = q.frame.len();
            Ok((q, vec![0; k]))
        };
        let arity = rng.gen_range(1..=4);
        let y = b.sample(&mut rng, arity);
        let (q, tags) = alpha_eval(&fam, &b, &c, &fs[..n], &top, &y).unwrap();
        assert!(tags.iter().all(|&t| star.name(t) == "*"));
        assert_eq!(q, d1_action_eval(&fam, &b, &as_closed, &fs, &y).unwrap());
    }
}

#[test]
fn wrong_numbers_of_maps_are_rejected() {
    let (fam, b, xs) = setup();
    let c = open_c(&[(0, 1, 1, 4), (1, 2, 1, 1)]);
    let top = open_map(&fam, &xs, HofiberPoint { x: 0, path: TwistPath::constant(rat(0, 1)) });
    assert!(matches!(alpha_eval(&fam, &b, &c, &[], &top, &Tree::Trivial), Err(Error::Arity(_))));
    let closed = Sc1Element::identity(Color::Closed);
    assert!(matches!(alpha_eval(&fam, &b, &closed, &[], &top, &Tree::Trivial), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn regions_partition_the_unit_interval(seed in any::<u64>(), n in 0usize..4, open in any::<bool>(), k in 0i64..=48) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let color = if open || n == 0 { Color::Open } else { Color::Closed };
        let c = Sc1Element::random(&mut rng, n, color);
        let h = rat(k, 48);
        let hits = c.regions().iter().filter(|r| r.contains(&h)).count();
        prop_assert_eq!(hits, 1, "{} at {}", c, h);
    }

    #[test]
    fn subdivision_keeps_every_vertex(seed in any::<u64>(), n in 0usize..3, arity in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = BBimodule::new(LittleIntervals);
        let c = Sc1Element::random(&mut rng, n, Color::Open);
        let y = b.sample(&mut rng, arity);
        let sub = subdivide(&c, &y).unwrap();
        let total: usize = sub.levels.iter().flatten().map(|s| s.body.vertex_count()).sum();
        prop_assert_eq!(total, y.vertex_count());
        for w in sub.levels.windows(2) {
            let exits: usize = w[0].iter().map(|s| s.body.arity()).sum();
            prop_assert_eq!(exits, w[1].len());
        }
        let leaves: usize = sub.levels.last().unwrap().iter().map(|s| s.body.arity()).sum();
        prop_assert_eq!(leaves, arity);
        // cutting never raises the filtration level
        let k = b.filtration_level(&y).unwrap().0;
        for (region, level) in sub.regions.iter().zip(&sub.levels) {
            for s in level {
                let part = b.normalize(&s.normalized(region)).unwrap();
                prop_assert!(b.filtration_level(&part).unwrap().0 <= k);
            }
        }
    }
}
