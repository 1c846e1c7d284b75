//! Reduced bimodules over an operad, and their law checks.
//!
//! A bimodule `M` over `𝒪` has a left action `p(m_1, .., m_n)`, right
//! actions `m ∘^i p`, and a Λ-action, subject to associativity, interchange
//! and Λ-compatibility. Arity zero is a point, which makes restrictions of a
//! left action along an injection missing whole blocks well defined.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::operads::{LambdaSequence, Operad};
use crate::suites::CheckLog;
use crate::trees::InjectiveMap;

pub trait Bimodule: LambdaSequence + Send + Sync {
    type Over: Operad;

    fn operad(&self) -> &Self::Over;

    fn name(&self) -> String;

    /// `p(m_1, .., m_n)`.
    fn left(&self, p: &<Self::Over as LambdaSequence>::Elem, args: &[Self::Elem]) -> Result<Self::Elem>;

    /// `m ∘^i p`, with `i` 1-based.
    fn right(&self, m: &Self::Elem, i: usize, p: &<Self::Over as LambdaSequence>::Elem) -> Result<Self::Elem>;

    fn validate(&self, m: &Self::Elem) -> Result<()>;

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem;

    fn encode(&self, m: &Self::Elem) -> String;
}

pub type ElemMap<S, T> = Arc<dyn Fn(&S) -> Result<T> + Send + Sync>;

/// An operad `Q` seen as a bimodule over `𝒪` through two operad maps: the
/// left action goes through `left_map`, the right action through `right_map`.
pub struct PulledBack<O: Operad, Q: Operad> {
    pub over: O,
    pub target: Q,
    pub left_map: ElemMap<O::Elem, Q::Elem>,
    pub right_map: ElemMap<O::Elem, Q::Elem>,
    pub label: String,
}

impl<O: Operad, Q: Operad> PulledBack<O, Q> {
    pub fn new(
        over: O,
        target: Q,
        left_map: ElemMap<O::Elem, Q::Elem>,
        right_map: ElemMap<O::Elem, Q::Elem>,
        label: impl Into<String>,
    ) -> Self {
        PulledBack { over, target, left_map, right_map, label: label.into() }
    }
}

impl<O: Operad> PulledBack<O, O>
where
    O: Clone,
{
    /// `𝒪` as a bimodule over itself.
    pub fn over_itself(o: O) -> Self {
        let id: ElemMap<O::Elem, O::Elem> = Arc::new(|x: &O::Elem| Ok(x.clone()));
        let label = o.name();
        PulledBack::new(o.clone(), o, id.clone(), id, label)
    }
}

impl<O: Operad, Q: Operad> LambdaSequence for PulledBack<O, Q> {
    type Elem = Q::Elem;

    fn arity(&self, m: &Q::Elem) -> usize {
        self.target.arity(m)
    }

    fn act(&self, u: &InjectiveMap, m: &Q::Elem) -> Result<Q::Elem> {
        self.target.act(u, m)
    }
}

impl<O: Operad, Q: Operad> Bimodule for PulledBack<O, Q> {
    type Over = O;

    fn operad(&self) -> &O {
        &self.over
    }

    fn name(&self) -> String {
        self.label.clone()
    }

    fn left(&self, p: &O::Elem, args: &[Q::Elem]) -> Result<Q::Elem> {
        self.target.compose_all(&(self.left_map)(p)?, args)
    }

    fn right(&self, m: &Q::Elem, i: usize, p: &O::Elem) -> Result<Q::Elem> {
        self.target.compose(m, i, &(self.right_map)(p)?)
    }

    fn validate(&self, m: &Q::Elem) -> Result<()> {
        self.target.validate(m)
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Q::Elem {
        self.target.sample(rng, arity)
    }

    fn encode(&self, m: &Q::Elem) -> String {
        self.target.encode(m)
    }
}

/// Offsets of the blocks of a full composite.
fn offsets(arities: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    arities
        .iter()
        .map(|a| {
            let o = acc;
            acc += a;
            o
        })
        .collect()
}

pub const BIMODULE_LAWS: &[(&str, &str)] = &[
    ("valid", "actions and restrictions satisfy the carrier invariants"),
    ("right-unit", "m ∘^i 1 = m"),
    ("left-unit", "1(m) = m"),
    ("right-sequential", "(m ∘^i p) ∘^{i+j-1} q = m ∘^i (p ∘_j q)"),
    ("right-parallel", "(m ∘^i p) ∘^{k+|p|-1} q = (m ∘^k q) ∘^i p for i < k"),
    ("left-assoc", "p(.., q(m'_1..m'_l), ..) = (p ∘_i q)(.., m'_1..m'_l, ..)"),
    ("interchange", "p(m_1..m_n) ∘^k q = p(.., m_j ∘^{k'} q, ..) for k in block j"),
    ("lambda-identity", "id* m = m"),
    ("lambda-functorial", "(u∘v)* m = v*(u* m)"),
    ("lambda-right", "(u*m) ∘^i (v*p) = ρ*(m ∘^{u(i)} p)"),
    ("lambda-left", "(u*p)(v_1* m_{u(1)}, ..) = ρ*(p(m_1..m_n))"),
];

/// One round of the bimodule laws.
pub fn check_bimodule_sample<M: Bimodule>(bm: &M, rng: &mut dyn RngCore, max_arity: usize, log: &mut CheckLog) {
    for (id, law) in BIMODULE_LAWS {
        log.declare(id, law);
    }
    let o = bm.operad();
    let n = rng.gen_range(1..=max_arity);
    let m_ar = rng.gen_range(1..=max_arity);
    let l = rng.gen_range(1..=max_arity);
    let m = bm.sample(rng, n);
    let p = o.sample(rng, m_ar);
    let q = o.sample(rng, l);
    let i = rng.gen_range(1..=n);
    let em = |x: &M::Elem| bm.encode(x);
    let eo = |x: &<M::Over as LambdaSequence>::Elem| o.encode(x);

    let mp = bm.right(&m, i, &p);
    log.record("valid", mp.clone().and_then(|r| bm.validate(&r).map(|_| true)), || {
        format!("m = {}, i = {i}, p = {}", em(&m), eo(&p))
    });
    log.record("right-unit", bm.right(&m, i, &o.unit()).map(|r| r == m), || {
        format!("m = {}, i = {i}", em(&m))
    });
    log.record("left-unit", bm.left(&o.unit(), std::slice::from_ref(&m)).map(|r| r == m), || {
        format!("m = {}", em(&m))
    });

    let j = rng.gen_range(1..=m_ar);
    let seq = (|| -> Result<bool> {
        let lhs = bm.right(&mp.clone()?, i + j - 1, &q)?;
        let rhs = bm.right(&m, i, &o.compose(&p, j, &q)?)?;
        Ok(lhs == rhs)
    })();
    log.record("right-sequential", seq, || {
        format!("m = {}, i = {i}, p = {}, j = {j}, q = {}", em(&m), eo(&p), eo(&q))
    });

    if n >= 2 {
        let i1 = rng.gen_range(1..n);
        let k = rng.gen_range(i1 + 1..=n);
        let par = (|| -> Result<bool> {
            let lhs = bm.right(&bm.right(&m, i1, &p)?, k + m_ar - 1, &q)?;
            let rhs = bm.right(&bm.right(&m, k, &q)?, i1, &p)?;
            Ok(lhs == rhs)
        })();
        log.record("right-parallel", par, || {
            format!("m = {}, i = {i1}, p = {}, k = {k}, q = {}", em(&m), eo(&p), eo(&q))
        });
    }

    // left associativity: p has arity m_ar, q has arity l and goes into slot li
    let li = rng.gen_range(1..=m_ar);
    let outer: Vec<M::Elem> = (0..m_ar).map(|_| {
        let a = rng.gen_range(1..=2);
        bm.sample(rng, a)
    }).collect();
    let inner: Vec<M::Elem> = (0..l).map(|_| {
        let a = rng.gen_range(1..=2);
        bm.sample(rng, a)
    }).collect();
    let lassoc = (|| -> Result<bool> {
        let mut args = outer.clone();
        args[li - 1] = bm.left(&q, &inner)?;
        let lhs = bm.left(&p, &args)?;
        let mut flat: Vec<M::Elem> = outer[..li - 1].to_vec();
        flat.extend(inner.iter().cloned());
        flat.extend(outer[li..].iter().cloned());
        let rhs = bm.left(&o.compose(&p, li, &q)?, &flat)?;
        Ok(lhs == rhs)
    })();
    log.record("left-assoc", lassoc, || {
        format!("p = {}, i = {li}, q = {}", eo(&p), eo(&q))
    });

    let arities: Vec<usize> = outer.iter().map(|x| bm.arity(x)).collect();
    let total: usize = arities.iter().sum();
    let k = rng.gen_range(1..=total);
    let inter = (|| -> Result<bool> {
        let lhs = bm.right(&bm.left(&p, &outer)?, k, &q)?;
        let offs = offsets(&arities);
        let j = (0..arities.len()).rev().find(|&j| offs[j] < k).expect("k lies in some block");
        let mut args = outer.clone();
        args[j] = bm.right(&outer[j], k - offs[j], &q)?;
        let rhs = bm.left(&p, &args)?;
        Ok(lhs == rhs)
    })();
    log.record("interchange", inter, || format!("p = {}, k = {k}, q = {}", eo(&p), eo(&q)));

    log.record("lambda-identity", bm.act(&InjectiveMap::identity(n), &m).map(|r| r == m), || {
        format!("m = {}", em(&m))
    });

    let a = rng.gen_range(1..=n);
    let b = rng.gen_range(1..=a);
    let u = InjectiveMap::random(rng, a, n);
    let v = InjectiveMap::random(rng, b, a);
    let functorial = (|| -> Result<bool> {
        let lhs = bm.act(&u.compose(&v)?, &m)?;
        bm.validate(&lhs)?;
        Ok(lhs == bm.act(&v, &bm.act(&u, &m)?)?)
    })();
    log.record("lambda-functorial", functorial, || format!("m = {}, u = {u}, v = {v}", em(&m)));

    let ui = rng.gen_range(1..=a);
    let pv = rng.gen_range(1..=m_ar);
    let w = InjectiveMap::random(rng, pv, m_ar);
    let lright = (|| -> Result<bool> {
        let lhs = bm.right(&bm.act(&u, &m)?, ui, &o.act(&w, &p)?)?;
        let rho = InjectiveMap::block(&u, ui, &w)?;
        let rhs = bm.act(&rho, &bm.right(&m, u.apply(ui), &p)?)?;
        Ok(lhs == rhs)
    })();
    log.record("lambda-right", lright, || {
        format!("m = {}, u = {u}, i = {ui}, p = {}, v = {w}", em(&m), eo(&p))
    });

    let ka = rng.gen_range(1..=m_ar);
    let up = InjectiveMap::random(rng, ka, m_ar);
    let lleft = (|| -> Result<bool> {
        let mut vs = Vec::with_capacity(ka);
        let mut small = Vec::with_capacity(ka);
        for j in 1..=ka {
            let target = up.apply(j);
            let ar = arities[target - 1];
            let c = rng.gen_range(1..=ar);
            let vj = InjectiveMap::random(rng, c, ar);
            small.push(bm.act(&vj, &outer[target - 1])?);
            vs.push(vj);
        }
        let lhs = bm.left(&o.act(&up, &p)?, &small)?;
        let rho = InjectiveMap::multi_block(&up, &vs, &arities)?;
        let rhs = bm.act(&rho, &bm.left(&p, &outer)?)?;
        Ok(lhs == rhs)
    })();
    log.record("lambda-left", lleft, || format!("p = {}, u = {up}", eo(&p)));
}

pub const BIMODULE_MAP_LAWS: &[(&str, &str)] = &[
    ("map-left", "f(p(m_1..m_n)) = p(f(m_1)..f(m_n))"),
    ("map-right", "f(m ∘^i p) = f(m) ∘^i p"),
    ("map-lambda", "f(u*m) = u*f(m)"),
];

/// One round of the bimodule-map laws for `f: source -> target`, both over
/// the same operad.
pub fn check_bimodule_map_sample<S: Bimodule, T: Bimodule>(
    source: &S,
    target: &T,
    f: &dyn Fn(&S::Elem) -> Result<T::Elem>,
    rng: &mut dyn RngCore,
    max_arity: usize,
    log: &mut CheckLog,
) where
    T::Over: Operad<Elem = <S::Over as LambdaSequence>::Elem>,
{
    for (id, law) in BIMODULE_MAP_LAWS {
        log.declare(id, law);
    }
    let o = source.operad();
    let n = rng.gen_range(1..=max_arity);
    let m = source.sample(rng, n);
    let pa = rng.gen_range(1..=max_arity);
    let p = o.sample(rng, pa);
    let args: Vec<S::Elem> = (0..pa)
        .map(|_| {
            let a = rng.gen_range(1..=2);
            source.sample(rng, a)
        })
        .collect();
    let left = (|| -> Result<bool> {
        let lhs = f(&source.left(&p, &args)?)?;
        let images = args.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(lhs == target.left(&p, &images)?)
    })();
    log.record("map-left", left, || {
        let shown: Vec<String> = args.iter().map(|a| source.encode(a)).collect();
        format!("p = {}, m = [{}]", o.encode(&p), shown.join(", "))
    });
    let i = rng.gen_range(1..=n);
    let right = (|| -> Result<bool> {
        Ok(f(&source.right(&m, i, &p)?)? == target.right(&f(&m)?, i, &p)?)
    })();
    log.record("map-right", right, || {
        format!("m = {}, i = {i}, p = {}", source.encode(&m), o.encode(&p))
    });
    let a = rng.gen_range(1..=n);
    let u = InjectiveMap::random(rng, a, n);
    let lam = (|| -> Result<bool> { Ok(f(&source.act(&u, &m)?)? == target.act(&u, &f(&m)?)?) })();
    log.record("map-lambda", lam, || format!("m = {}, u = {u}", source.encode(&m)));
}

pub(crate) fn arity_error(expected: usize, found: usize) -> Error {
    Error::arity(format!("left action of an arity-{expected} element on {found} arguments"))
}
