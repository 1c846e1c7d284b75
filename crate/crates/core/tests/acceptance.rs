//! The acceptance criteria, each timed against its limit. Prints one line
//! per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bvres::b::BBimodule;
use bvres::catalog::run_suite;
use bvres::mapping::{render_along, xi_eval, Names, TwistFamily, TwistPath};
use bvres::operads::{Associative, Framed, IntervalConfig, LittleDiscs, LittleIntervals, Operad, Reflection};
use bvres::suites::Report;
use bvres::swiss_cheese::{render_alpha, Color, Sc1Element};
use bvres::trees::Tree;
use bvres::{rat, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn suites(reports: Vec<Result<Report>>) -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    for r in reports {
        match r {
            Ok(r) if r.passed() && r.checks.iter().all(|c| c.trials > 0) => count += 1,
            Ok(r) => failed.push(r.to_text()),
            Err(e) => failed.push(e.to_string()),
        }
    }
    if failed.is_empty() {
        Outcome { passed: true, detail: format!("{count} suite{}", if count == 1 { "" } else { "s" }) }
    } else {
        Outcome { passed: false, detail: failed.join("\n") }
    }
}

fn iv(v: &[(i64, i64, i64, i64)]) -> IntervalConfig {
    IntervalConfig::new(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect()).unwrap()
}

fn axioms() -> Outcome {
    fn both<P: Operad + Clone + 'static>(p: P, out: &mut Vec<Result<Report>>) {
        out.push(run_suite("operad-axioms", p.clone(), 500, SEED));
        out.push(run_suite("w-operad-axioms", p, 500, SEED));
    }
    let mut out = Vec::new();
    both(LittleIntervals, &mut out);
    both(LittleDiscs, &mut out);
    both(Associative, &mut out);
    both(Framed::new(LittleIntervals, Reflection), &mut out);
    suites(out)
}

fn morphisms() -> Outcome {
    let names = ["mu", "mu-prime", "xi", "psi-prime", "psi-double-prime"];
    suites(names.iter().map(|n| run_suite(n, LittleIntervals, 200, SEED)).collect())
}

fn display_a() -> Outcome {
    let fam = TwistFamily::new(LittleIntervals);
    let b = BBimodule::new(LittleIntervals);
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
    let got = render_along(&fam, &y, &names, None).to_string();
    let expected = "g2(x1;t1)(g3(a;1); g3(x2;t2))";

    // the value agrees with the composite read off the display
    let g = TwistPath::random(&mut ChaCha8Rng::seed_from_u64(SEED), rat(0, 1), rat(0, 1));
    let value = xi_eval(&fam, &g, &y).unwrap();
    let by_hand = fam
        .q
        .compose_all(
            &g.eval(&fam, &reg["x1"], &rat(1, 3)).unwrap(),
            &[g.eval(&fam, &reg["a"], &rat(1, 1)).unwrap(), g.eval(&fam, &reg["x2"], &rat(1, 2)).unwrap()],
        )
        .unwrap();
    Outcome { passed: got == expected && value == by_hand, detail: got }
}

fn display_b() -> Outcome {
    let fam = TwistFamily::new(LittleIntervals);
    let b = BBimodule::new(LittleIntervals);
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
    let c = Sc1Element::new(Color::Open, iv(&[(1, 8, 3, 8), (1, 2, 1, 1)])).unwrap();
    let got = render_alpha(&fam, &c, &y, &names).unwrap().to_string();
    let expected = "(f1(c1*(x1;t1))(eta.mu(x2), *'))(f2(c2*(z1_2)), f2(iota(*)), f2(c2*(x5;t5)))";
    Outcome { passed: got == expected, detail: got }
}

fn fibration() -> Outcome {
    suites(vec![run_suite("fibration", LittleIntervals, 200, SEED)])
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<u64>, fn() -> Outcome)> = vec![
        ("operad and W axioms, 4 operads x 500 samples", Some(60), axioms),
        ("confluence, 500 W and 500 B points x 10 orders", Some(120), || {
            suites(vec![run_suite("confluence", LittleIntervals, 500, SEED)])
        }),
        ("morphism suites mu, mu', xi, psi', psi'', 200 samples", Some(120), morphisms),
        ("worked display A", None, display_a),
        ("worked display B", None, display_b),
        ("fibration square, 200 samples", None, fibration),
        ("SC1 nested vs composed, 200 samples", Some(180), || {
            suites(vec![run_suite("sc1", LittleIntervals, 200, SEED)])
        }),
        ("bracketing independence for k <= 4, 200 points", None, || {
            suites(vec![run_suite("truncation", LittleIntervals, 200, SEED)])
        }),
        ("matching objects of X^n, |X| <= 3, n <= 4", None, || {
            suites(vec![run_suite("matching", LittleIntervals, 1, SEED)])
        }),
    ];
    let mut all = true;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_time = limit.map_or(true, |s| took <= Duration::from_secs(s));
        let ok = outcome.passed && in_time;
        all &= ok;
        let budget = limit.map_or(String::new(), |s| format!(", limit {s} s"));
        println!(
            "{} {}. {name} ({:.2} s{budget}): {}",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64(),
            outcome.detail.lines().next().unwrap_or("")
        );
        if !outcome.passed {
            println!("{}", outcome.detail);
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
