//! Randomized law checks with machine-readable reports.

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::Result;
use crate::operads::{act_forget_then_permute, act_permute_then_forget, LambdaSequence, Operad};
use crate::trees::InjectiveMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NoSamples,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub law: String,
    pub passed: bool,
    pub trials: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub operad: String,
    pub samples: usize,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} on {}: {} ({} samples, seed {})\n",
            self.suite,
            self.operad,
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::NoSamples => "no-samples",
            },
            self.samples,
            self.seed
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {} ({} trials): {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.id,
                c.trials,
                c.law
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("        witness: {w}\n"));
            }
        }
        out
    }
}

/// Accumulates outcomes per law.
#[derive(Debug, Default)]
pub struct CheckLog {
    checks: Vec<CheckResult>,
}

impl CheckLog {
    pub fn new() -> Self {
        CheckLog::default()
    }

    pub fn declare(&mut self, id: &str, law: &str) {
        if self.checks.iter().all(|c| c.id != id) {
            self.checks.push(CheckResult {
                id: id.into(),
                law: law.into(),
                passed: true,
                trials: 0,
                failures: 0,
                witness: None,
            });
        }
    }

    /// Records one trial. An error counts as a failure.
    pub fn record(&mut self, id: &str, outcome: Result<bool>, witness: impl FnOnce() -> String) {
        let c = self
            .checks
            .iter_mut()
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("check `{id}` was not declared"));
        c.trials += 1;
        let failure = match outcome {
            Ok(true) => None,
            Ok(false) => Some(witness()),
            Err(e) => Some(format!("{}; error: {e}", witness())),
        };
        if let Some(w) = failure {
            c.passed = false;
            c.failures += 1;
            if c.witness.is_none() {
                c.witness = Some(w);
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn finish(self, suite: &str, operad: &str, samples: usize, seed: u64) -> Report {
        let status = if samples == 0 {
            Status::NoSamples
        } else if self.checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            suite: suite.into(),
            operad: operad.into(),
            samples,
            seed,
            status,
            checks: self.checks,
        }
    }
}

pub const OPERAD_LAWS: &[(&str, &str)] = &[
    ("valid", "composites and restrictions satisfy the carrier invariants"),
    ("unit-right", "x ∘_i 1 = x"),
    ("unit-left", "1 ∘_1 x = x"),
    ("assoc-sequential", "(x ∘_i y) ∘_{i+j-1} z = x ∘_i (y ∘_j z)"),
    ("assoc-parallel", "(x ∘_i y) ∘_{k+|y|-1} z = (x ∘_k z) ∘_i y for i < k"),
    ("lambda-identity", "id* x = x"),
    ("lambda-functorial", "(u∘v)* x = v*(u* x)"),
    ("lambda-factorizations", "u* computed as forget-then-permute equals permute-then-forget"),
    ("sigma-equivariance", "(σ*x) ∘_i (τ*y) = ρ*(x ∘_{σ(i)} y) for permutations σ, τ"),
    ("lambda-compose", "(u*x) ∘_i (v*y) = ρ*(x ∘_{u(i)} y)"),
    ("lambda-reduced", "u*(x ∘_k y) = u''*x when u misses every input of y"),
];

/// One round of the operad axioms on random elements of arity at most
/// `max_arity`.
pub fn check_operad_sample<O: Operad>(o: &O, rng: &mut dyn RngCore, max_arity: usize, log: &mut CheckLog) {
    for (id, law) in OPERAD_LAWS {
        log.declare(id, law);
    }
    let enc = |x: &O::Elem| o.encode(x);
    let n = rng.gen_range(1..=max_arity);
    let m = rng.gen_range(1..=max_arity);
    let l = rng.gen_range(1..=max_arity);
    let x = o.sample(rng, n);
    let y = o.sample(rng, m);
    let z = o.sample(rng, l);
    let e = o.unit();

    let i = rng.gen_range(1..=n);
    let xy = o.compose(&x, i, &y);
    log.record("valid", xy.and_then(|c| o.validate(&c).map(|_| true)), || {
        format!("x = {}, i = {i}, y = {}", enc(&x), enc(&y))
    });

    log.record("unit-right", o.compose(&x, i, &e).map(|r| r == x), || format!("x = {}, i = {i}", enc(&x)));
    log.record("unit-left", o.compose(&e, 1, &x).map(|r| r == x), || format!("x = {}", enc(&x)));

    let j = rng.gen_range(1..=m);
    let seq = (|| -> Result<bool> {
        let lhs = o.compose(&o.compose(&x, i, &y)?, i + j - 1, &z)?;
        let rhs = o.compose(&x, i, &o.compose(&y, j, &z)?)?;
        Ok(lhs == rhs)
    })();
    log.record("assoc-sequential", seq, || {
        format!("x = {}, i = {i}, y = {}, j = {j}, z = {}", enc(&x), enc(&y), enc(&z))
    });

    if n >= 2 {
        let i1 = rng.gen_range(1..n);
        let k = rng.gen_range(i1 + 1..=n);
        let par = (|| -> Result<bool> {
            let lhs = o.compose(&o.compose(&x, i1, &y)?, k + m - 1, &z)?;
            let rhs = o.compose(&o.compose(&x, k, &z)?, i1, &y)?;
            Ok(lhs == rhs)
        })();
        log.record("assoc-parallel", par, || {
            format!("x = {}, i = {i1}, y = {}, k = {k}, z = {}", enc(&x), enc(&y), enc(&z))
        });
    }

    log.record("lambda-identity", o.act(&InjectiveMap::identity(n), &x).map(|r| r == x), || {
        format!("x = {}", enc(&x))
    });

    let a = rng.gen_range(1..=n);
    let b = rng.gen_range(1..=a);
    let u = InjectiveMap::random(rng, a, n);
    let v = InjectiveMap::random(rng, b, a);
    let functorial = (|| -> Result<bool> {
        let lhs = o.act(&u.compose(&v)?, &x)?;
        let rhs = o.act(&v, &o.act(&u, &x)?)?;
        o.validate(&lhs)?;
        Ok(lhs == rhs)
    })();
    log.record("lambda-functorial", functorial, || format!("x = {}, u = {u}, v = {v}", enc(&x)));

    let factor = (|| -> Result<bool> {
        let direct = o.act(&u, &x)?;
        Ok(direct == act_forget_then_permute(o, &u, &x)? && direct == act_permute_then_forget(o, &u, &x)?)
    })();
    log.record("lambda-factorizations", factor, || format!("x = {}, u = {u}", enc(&x)));

    let sigma = InjectiveMap::random_permutation(rng, n);
    let tau = InjectiveMap::random_permutation(rng, m);
    let si = rng.gen_range(1..=n);
    log.record("sigma-equivariance", lambda_compose_law(o, &x, &y, &sigma, si, &tau), || {
        format!("x = {}, σ = {sigma}, i = {si}, y = {}, τ = {tau}", enc(&x), enc(&y))
    });

    let ui = rng.gen_range(1..=a);
    let mv = rng.gen_range(1..=m);
    let w = InjectiveMap::random(rng, mv, m);
    log.record("lambda-compose", lambda_compose_law(o, &x, &y, &u, ui, &w), || {
        format!("x = {}, u = {u}, i = {ui}, y = {}, v = {w}", enc(&x), enc(&y))
    });

    if n >= 2 {
        let reduced = (|| -> Result<bool> {
            let total = n + m - 1;
            let outside: Vec<usize> = (1..=total).filter(|p| *p < i || *p >= i + m).collect();
            let count = rng.gen_range(1..=outside.len());
            let pick = InjectiveMap::random(rng, count, outside.len());
            let chosen = pick.values().iter().map(|&p| outside[p - 1]).collect();
            let u = InjectiveMap::new(chosen, total)?;
            let u2 = u.avoiding_block(i, m).expect("u avoids the block by construction");
            Ok(o.act(&u, &o.compose(&x, i, &y)?)? == o.act(&u2, &x)?)
        })();
        log.record("lambda-reduced", reduced, || {
            format!("x = {}, i = {i}, y = {}", enc(&x), enc(&y))
        });
    }
}

fn lambda_compose_law<O: Operad>(
    o: &O,
    x: &O::Elem,
    y: &O::Elem,
    u: &InjectiveMap,
    i: usize,
    v: &InjectiveMap,
) -> Result<bool> {
    let lhs = o.compose(&o.act(u, x)?, i, &o.act(v, y)?)?;
    let rho = InjectiveMap::block(u, i, v)?;
    let rhs = o.act(&rho, &o.compose(x, u.apply(i), y)?)?;
    Ok(lhs == rhs)
}

pub fn run_operad_axioms<O: Operad>(o: &O, samples: usize, seed: u64, max_arity: usize) -> Report {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut log = CheckLog::new();
    for (id, law) in OPERAD_LAWS {
        log.declare(id, law);
    }
    for _ in 0..samples {
        check_operad_sample(o, &mut rng, max_arity, &mut log);
    }
    log.finish("operad-axioms", &o.name(), samples, seed)
}

pub const MAP_LAWS: &[(&str, &str)] = &[
    ("map-unit", "f(1) = 1"),
    ("map-compose", "f(x ∘_i y) = f(x) ∘_i f(y)"),
    ("map-lambda", "f(u*x) = u*f(x)"),
];

/// One round of the operad-map laws for `f: source -> target`.
pub fn check_operad_map_sample<S: Operad, T: Operad>(
    source: &S,
    target: &T,
    f: &dyn Fn(&S::Elem) -> Result<T::Elem>,
    rng: &mut dyn RngCore,
    max_arity: usize,
    log: &mut CheckLog,
) {
    for (id, law) in MAP_LAWS {
        log.declare(id, law);
    }
    log.record("map-unit", f(&source.unit()).map(|v| v == target.unit()), || "f(1)".into());
    let n = rng.gen_range(1..=max_arity);
    let m = rng.gen_range(1..=max_arity);
    let x = source.sample(rng, n);
    let y = source.sample(rng, m);
    let i = rng.gen_range(1..=n);
    let comp = (|| -> Result<bool> {
        let lhs = f(&source.compose(&x, i, &y)?)?;
        let rhs = target.compose(&f(&x)?, i, &f(&y)?)?;
        Ok(lhs == rhs)
    })();
    log.record("map-compose", comp, || {
        format!("x = {}, i = {i}, y = {}", source.encode(&x), source.encode(&y))
    });
    let a = rng.gen_range(1..=n);
    let u = InjectiveMap::random(rng, a, n);
    let lam = (|| -> Result<bool> { Ok(f(&source.act(&u, &x)?)? == target.act(&u, &f(&x)?)?) })();
    log.record("map-lambda", lam, || format!("x = {}, u = {u}", source.encode(&x)));
}

/// An operad whose composition is deliberately wrong: composites of arity
/// at least two come out with their first two inputs swapped.
#[derive(Clone, Debug)]
pub struct Mutated<O>(pub O);

impl<O: Operad> LambdaSequence for Mutated<O> {
    type Elem = O::Elem;

    fn arity(&self, x: &O::Elem) -> usize {
        self.0.arity(x)
    }

    fn act(&self, u: &InjectiveMap, x: &O::Elem) -> Result<O::Elem> {
        self.0.act(u, x)
    }
}

impl<O: Operad> Operad for Mutated<O> {
    fn name(&self) -> String {
        format!("mutated-{}", self.0.name())
    }

    fn unit(&self) -> O::Elem {
        self.0.unit()
    }

    fn compose(&self, x: &O::Elem, i: usize, y: &O::Elem) -> Result<O::Elem> {
        let c = self.0.compose(x, i, y)?;
        let n = self.0.arity(&c);
        if n < 2 {
            return Ok(c);
        }
        let mut swap: Vec<usize> = (1..=n).collect();
        swap.swap(0, 1);
        self.0.act(&InjectiveMap::new(swap, n)?, &c)
    }

    fn validate(&self, x: &O::Elem) -> Result<()> {
        self.0.validate(x)
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> O::Elem {
        self.0.sample(rng, arity)
    }

    fn encode(&self, x: &O::Elem) -> String {
        self.0.encode(x)
    }

    fn decode(&self, s: &str) -> Result<O::Elem> {
        self.0.decode(s)
    }

    fn to_json(&self, x: &O::Elem) -> serde_json::Value {
        self.0.to_json(x)
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<O::Elem> {
        self.0.from_json(v)
    }
}
