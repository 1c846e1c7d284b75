//! Named check suites, each producing a [`Report`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::b::{BBimodule, BPoint};
use crate::bimodule::{check_bimodule_map_sample, check_bimodule_sample, Bimodule, PulledBack};
use crate::error::{Error, Result};
use crate::mapping::{
    check_path_sample, lift_path, psi_double_prime, psi_prime_eval, q_x, xi_eval, HofiberPoint, PointedFamily,
    QCircX, QElem, TwistFamily, TwistPath, XPath,
};
use crate::operads::{enumerate_matching_families, matching_restrict, Operad, PointedSet, XPowers};
use crate::rational::Rational;
use crate::suites::{check_operad_map_sample, run_operad_axioms, CheckLog, Mutated, Report};
use crate::swiss_cheese::{alpha_eval, d1_action_eval, ClosedMap, Color, Sc1Element};
use crate::w::{random_chooser, WOperad};

pub const SUITES: &[(&str, &str)] = &[
    ("operad-axioms", "unit, associativity and Λ laws of the base operad"),
    ("w-operad-axioms", "the same laws for W over the base"),
    ("mutated-axioms", "the base laws for a composition with swapped inputs; expected to fail"),
    ("b-bimodule", "bimodule laws of B over W"),
    ("confluence", "random reduction orders reach the canonical form, in W and in B"),
    ("mu", "μ: W → base is an operad map"),
    ("mu-prime", "μ′: B → W is a bimodule map"),
    ("paths", "sampled fiber paths satisfy the path conditions"),
    ("xi", "ξ at sampled loops is a bimodule map"),
    ("psi-prime", "ψ′ at sampled fiber points is a bimodule map into 𝒬ₓ"),
    ("psi-double-prime", "ψ″ images are bimodule maps into 𝒬∘X"),
    ("fibration", "π∘ψ′ is the projection and the lift at time 0 is f₀"),
    ("sc1", "composed configurations act as nested ones"),
    ("truncation", "truncated evaluations do not depend on the bracketing"),
    ("matching", "matching objects of X^{×•} for |X| ≤ 3 and n ≤ 4"),
];

const MAX_ARITY: usize = 3;

/// Runs the suite `name` over `base`.
pub fn run_suite<P>(name: &str, base: P, samples: usize, seed: u64) -> Result<Report>
where
    P: Operad + Clone + 'static,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = base.name();
    let mut log = CheckLog::new();
    match name {
        "operad-axioms" => return Ok(renamed(run_operad_axioms(&base, samples, seed, 4), name)),
        "w-operad-axioms" => return Ok(renamed(run_operad_axioms(&WOperad::new(base), samples, seed, MAX_ARITY), name)),
        "mutated-axioms" => return Ok(renamed(run_operad_axioms(&Mutated(base), samples, seed, 4), name)),
        "b-bimodule" => {
            let b = BBimodule::new(base);
            for _ in 0..samples {
                check_bimodule_sample(&b, &mut rng, MAX_ARITY, &mut log);
            }
        }
        "confluence" => confluence(base, samples, &mut rng, &mut log),
        "mu" => {
            let w = WOperad::new(base.clone());
            let f = |y: &_| w.mu(y);
            for _ in 0..samples {
                check_operad_map_sample(&w, &base, &f, &mut rng, MAX_ARITY, &mut log);
            }
        }
        "mu-prime" => {
            let b = BBimodule::new(base);
            let target = PulledBack::over_itself(b.w.clone());
            let f = |x: &_| b.mu_prime(x);
            for _ in 0..samples {
                check_bimodule_map_sample(&b, &target, &f, &mut rng, MAX_ARITY, &mut log);
            }
        }
        "paths" => {
            let fam = TwistFamily::new(base);
            let xs = PointedFamily::standard();
            for _ in 0..samples {
                let h = HofiberPoint::random(&mut rng, &xs);
                check_path_sample(&fam, &h.path, xs.scale(h.x)?, &mut rng, MAX_ARITY, &mut log);
            }
        }
        "xi" | "psi-prime" | "psi-double-prime" => morphisms(name, base, samples, &mut rng, &mut log)?,
        "fibration" => fibration(base, samples, &mut rng, &mut log)?,
        "sc1" => sc1(base, samples, &mut rng, &mut log),
        "truncation" => truncation(base, samples, &mut rng, &mut log),
        "matching" => matching(&mut log)?,
        other => {
            let known: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
            return Err(Error::domain(format!("unknown suite `{other}`; known: {}", known.join(", "))));
        }
    }
    Ok(log.finish(name, &label, samples, seed))
}

fn renamed(mut r: Report, name: &str) -> Report {
    r.suite = name.to_string();
    r
}

fn confluence<P: Operad + Clone>(base: P, samples: usize, rng: &mut dyn RngCore, log: &mut CheckLog) {
    log.declare("w-confluence", "10 random reduction orders of a raw W point agree");
    log.declare("b-confluence", "10 random reduction orders of a raw B point agree");
    let b = BBimodule::new(base);
    for _ in 0..samples {
        let n = rng.gen_range(1..=5);
        let raw = b.w.sample_raw(rng, n);
        let outcome = (|| -> Result<bool> {
            let canonical = b.w.normalize(&raw)?;
            for _ in 0..10 {
                if b.w.normalize_in_order(&raw, &mut random_chooser(rng))? != canonical {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        log.record("w-confluence", outcome, || b.w.to_text(&raw));

        let raw = b.sample_raw(rng, n);
        let outcome = (|| -> Result<bool> {
            let canonical = b.normalize(&raw)?;
            for _ in 0..10 {
                if b.normalize_in_order(&raw, &mut random_chooser(rng))? != canonical {
                    return Ok(false);
                }
            }
            Ok(true)
        })();
        log.record("b-confluence", outcome, || b.to_text(&raw));
    }
}

fn loop_path(rng: &mut dyn RngCore) -> TwistPath {
    TwistPath::random(rng, Rational::zero(), Rational::zero())
}

fn morphisms<P>(name: &str, base: P, samples: usize, rng: &mut dyn RngCore, log: &mut CheckLog) -> Result<()>
where
    P: Operad + Clone + 'static,
{
    let b = BBimodule::new(base.clone());
    let fam = TwistFamily::new(base);
    let xs = PointedFamily::standard();
    let qcx = QCircX::new(fam.clone(), xs.clone());
    let untwisted = q_x(&fam, &xs, 0)?;
    for _ in 0..samples {
        match name {
            "xi" => {
                let g = loop_path(rng);
                let f = |p: &BPoint<P::Elem>| xi_eval(&fam, &g, p);
                check_bimodule_map_sample(&b, &untwisted, &f, rng, MAX_ARITY, log);
            }
            "psi-prime" => {
                let h = HofiberPoint::random(rng, &xs);
                let target = q_x(&fam, &xs, h.x)?;
                let f = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
                check_bimodule_map_sample(&b, &target, &f, rng, MAX_ARITY, log);
            }
            _ => {
                let h = HofiberPoint::random(rng, &xs);
                let q = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
                let f = psi_double_prime(h.x, &q);
                check_bimodule_map_sample(&b, &qcx, &f, rng, MAX_ARITY, log);
            }
        }
    }
    Ok(())
}

fn fibration<P>(base: P, samples: usize, rng: &mut dyn RngCore, log: &mut CheckLog) -> Result<()>
where
    P: Operad + Clone + 'static,
{
    log.declare("projection", "π∘ψ′(x, g) = x");
    log.declare("lift-start", "the lift at time 0 is f₀");
    let b = BBimodule::new(base.clone());
    let fam = TwistFamily::new(base);
    let xs = PointedFamily::standard();
    for _ in 0..samples {
        let h = HofiberPoint::random(rng, &xs);
        let n = rng.gen_range(1..=4);
        let y = b.sample(rng, n);
        let proj = psi_prime_eval(&fam, &xs, &h, &y).map(|r| r.0 == h.x);
        log.record("projection", proj, || format!("x = {}, g = {}, y = {}", xs.name(h.x), h.path, b.to_text(&y)));

        let q = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
        let f0 = psi_double_prime(h.x, &q);
        let gamma = XPath::random(rng, h.x, &xs);
        let start = (|| -> Result<bool> {
            Ok(lift_path(&b, &fam, &xs, &f0, &gamma, h.x, &Rational::zero(), &y)? == f0(&y)?)
        })();
        log.record("lift-start", start, || format!("g = {}, y = {}", h.path, b.to_text(&y)));
    }
    Ok(())
}

type ClosedFn<'a, A> = Box<dyn Fn(&BPoint<A>) -> Result<QElem<A>> + 'a>;

fn sc1<P: Operad + Clone>(base: P, samples: usize, rng: &mut dyn RngCore, log: &mut CheckLog) {
    log.declare("closed-input", "α(c ∘ᵢ c′; ..) = α(c; .., c′(..), ..) at a closed input");
    log.declare("open-input", "α(c ∘ c′; ..) = α(c; .., α(c′; ..)) at the open input");
    log.declare("closed-color", "closed configurations compose the same way");
    let b = BBimodule::new(base.clone());
    let fam = TwistFamily::new(base);
    let xs = PointedFamily::standard();
    let loops = |k: usize, rng: &mut dyn RngCore| -> Vec<ClosedFn<'_, P::Elem>> {
        (0..k)
            .map(|_| {
                let g = loop_path(rng);
                let fam = &fam;
                Box::new(move |p: &BPoint<P::Elem>| xi_eval(fam, &g, p)) as ClosedFn<'_, P::Elem>
            })
            .collect()
    };
    for _ in 0..samples {
        let n = rng.gen_range(0..=2);
        let c = Sc1Element::random(rng, n, Color::Open);
        let i = rng.gen_range(1..=n + 1);
        let m = rng.gen_range(if i <= n { 1 } else { 0 }..=2);
        let c2 = Sc1Element::random(rng, m, if i <= n { Color::Closed } else { Color::Open });
        let arity = rng.gen_range(1..=4);
        let y = b.sample(rng, arity);
        let fs = loops(n, rng);
        let gs = loops(m, rng);
        let fs: Vec<ClosedMap<'_, P::Elem>> = fs.iter().map(|f| f.as_ref()).collect();
        let gs: Vec<ClosedMap<'_, P::Elem>> = gs.iter().map(|f| f.as_ref()).collect();
        let h = HofiberPoint::random(rng, &xs);
        let q = |p: &BPoint<P::Elem>| psi_prime_eval(&fam, &xs, &h, p).map(|r| r.1);
        let top = psi_double_prime(h.x, &q);
        let witness = || format!("c = {c}, i = {i}, c′ = {c2}, y = {}", b.to_text(&y));

        let outcome = (|| -> Result<bool> {
            let composed = c.compose(i, &c2)?;
            if i <= n {
                let mut flat = fs[..i - 1].to_vec();
                flat.extend(gs.iter().copied());
                flat.extend(fs[i..].iter().copied());
                let inner = |p: &BPoint<P::Elem>| d1_action_eval(&fam, &b, &c2, &gs, p);
                let mut nested = fs.clone();
                nested[i - 1] = &inner;
                Ok(alpha_eval(&fam, &b, &composed, &flat, &top, &y)? == alpha_eval(&fam, &b, &c, &nested, &top, &y)?)
            } else {
                let mut flat = fs.clone();
                flat.extend(gs.iter().copied());
                let inner = |p: &BPoint<P::Elem>| alpha_eval(&fam, &b, &c2, &gs, &top, p);
                Ok(alpha_eval(&fam, &b, &composed, &flat, &top, &y)? == alpha_eval(&fam, &b, &c, &fs, &inner, &y)?)
            }
        })();
        log.record(if i <= n { "closed-input" } else { "open-input" }, outcome, witness);

        let k = rng.gen_range(1..=2);
        let d = Sc1Element::random(rng, k, Color::Closed);
        let j = rng.gen_range(1..=k);
        let d2 = Sc1Element::random(rng, 1, Color::Closed);
        let ds = loops(k, rng);
        let es = loops(1, rng);
        let ds: Vec<ClosedMap<'_, P::Elem>> = ds.iter().map(|f| f.as_ref()).collect();
        let es: Vec<ClosedMap<'_, P::Elem>> = es.iter().map(|f| f.as_ref()).collect();
        let outcome = (|| -> Result<bool> {
            let mut flat = ds[..j - 1].to_vec();
            flat.extend(es.iter().copied());
            flat.extend(ds[j..].iter().copied());
            let inner = |p: &BPoint<P::Elem>| d1_action_eval(&fam, &b, &d2, &es, p);
            let mut nested = ds.clone();
            nested[j - 1] = &inner;
            Ok(d1_action_eval(&fam, &b, &d.compose(j, &d2)?, &flat, &y)? == d1_action_eval(&fam, &b, &d, &nested, &y)?)
        })();
        log.record("closed-color", outcome, || format!("c = {d}, i = {j}, c′ = {d2}, y = {}", b.to_text(&y)));
    }
}

fn truncation<P: Operad + Clone>(base: P, samples: usize, rng: &mut dyn RngCore, log: &mut CheckLog) {
    log.declare("w-bracketing", "W evaluation on Wₖ agrees for every bracketing and equals μ");
    log.declare("b-bracketing", "B evaluation on Bₖ agrees for every bracketing and equals μ′");
    let b = BBimodule::new(base.clone());
    let target = PulledBack::over_itself(b.w.clone());
    let mu = |c: &_| b.w.mu(c);
    let mu_prime = |c: &_| b.mu_prime(c);
    for _ in 0..samples {
        let n = rng.gen_range(1..=4);
        let a = b.w.sample(rng, n);
        let k = b.w.filtration_level(&a).max(1);
        let mut order = ChaCha8Rng::seed_from_u64(rng.gen());
        let outcome = (|| -> Result<bool> {
            let fixed = b.w.eval_truncated(&base, k, &a, &mu, None)?;
            let shuffled = b.w.eval_truncated(&base, k, &a, &mu, Some(&mut order))?;
            Ok(fixed == shuffled && fixed == b.w.mu(&a)?)
        })();
        log.record("w-bracketing", outcome, || format!("k = {k}, a = {}", b.w.to_text(&a)));

        let x = b.sample(rng, n);
        let outcome = (|| -> Result<bool> {
            let k = b.filtration_level(&x)?.0.max(1);
            let fixed = b.eval_truncated(&target, k, &x, &mu_prime, None)?;
            let shuffled = b.eval_truncated(&target, k, &x, &mu_prime, Some(&mut order))?;
            Ok(fixed == shuffled && fixed == b.mu_prime(&x)?)
        })();
        log.record("b-bracketing", outcome, || b.to_text(&x));
    }
}

/// Exhaustive: `M(1)` is one point and restriction `Xⁿ → M(n)` is a
/// bijection.
fn matching(log: &mut CheckLog) -> Result<()> {
    log.declare("point", "M(X^{×•})(1) is a single point");
    log.declare("powers", "restriction Xⁿ → M(X^{×•})(n) is a bijection");
    for size in 1..=3 {
        let seq = XPowers(PointedSet::new(size)?);
        let one = enumerate_matching_families(&seq, 1).map(|f| f.len() == 1);
        log.record("point", one, || format!("|X| = {size}"));
        for n in 2..=4 {
            let outcome = (|| -> Result<bool> {
                let families = enumerate_matching_families(&seq, n)?;
                if families.len() != size.pow(n as u32) {
                    return Ok(false);
                }
                let mut images = Vec::new();
                for y in crate::operads::LambdaSequence::elements(&seq, n).expect("finite") {
                    images.push(matching_restrict(&seq, &y)?);
                }
                images.sort();
                images.dedup();
                let mut sorted = families;
                sorted.sort();
                Ok(images == sorted)
            })();
            log.record("powers", outcome, || format!("|X| = {size}, n = {n}"));
        }
    }
    Ok(())
}
