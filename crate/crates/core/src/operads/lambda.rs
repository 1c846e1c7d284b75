//! Λ-sequences, the product `Y∘X` with powers of a pointed set, matching
//! families, and truncation.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_action_arity, Element, Operad};
use crate::error::{Error, Result};
use crate::trees::InjectiveMap;

/// Arity-indexed carriers with restriction maps `u*`.
pub trait LambdaSequence {
    type Elem: Element;

    fn arity(&self, x: &Self::Elem) -> usize;

    fn act(&self, u: &InjectiveMap, x: &Self::Elem) -> Result<Self::Elem>;

    /// All elements of arity `n`, for finite sequences.
    fn elements(&self, _n: usize) -> Option<Vec<Self::Elem>> {
        None
    }
}

/// A finite pointed set `{0, 1, .., size-1}` with basepoint `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointedSet {
    pub size: usize,
}

impl PointedSet {
    pub const BASEPOINT: usize = 0;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("a pointed set needs its basepoint"));
        }
        Ok(PointedSet { size })
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.size
    }
}

/// The Λ-sequence `n ↦ Xⁿ` acting by precomposition.
#[derive(Clone, Copy, Debug)]
pub struct XPowers(pub PointedSet);

impl LambdaSequence for XPowers {
    type Elem = Vec<usize>;

    fn arity(&self, x: &Vec<usize>) -> usize {
        x.len()
    }

    fn act(&self, u: &InjectiveMap, x: &Vec<usize>) -> Result<Vec<usize>> {
        check_action_arity(u, x.len())?;
        Ok(u.values().iter().map(|&j| x[j - 1]).collect())
    }

    fn elements(&self, n: usize) -> Option<Vec<Vec<usize>>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.0.size).map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        Some(out)
    }
}

/// Objectwise product `Y∘X = Y × X^{×•}` with the diagonal action.
#[derive(Clone, Debug)]
pub struct Product<Y> {
    pub inner: Y,
    pub set: PointedSet,
}

impl<Y: LambdaSequence> Product<Y> {
    pub fn new(inner: Y, set: PointedSet) -> Self {
        Product { inner, set }
    }
}

impl<Y: LambdaSequence> LambdaSequence for Product<Y> {
    type Elem = (Y::Elem, Vec<usize>);

    fn arity(&self, x: &Self::Elem) -> usize {
        self.inner.arity(&x.0)
    }

    fn act(&self, u: &InjectiveMap, x: &Self::Elem) -> Result<Self::Elem> {
        if x.1.len() != self.inner.arity(&x.0) {
            return Err(Error::arity("tag count differs from arity"));
        }
        Ok((self.inner.act(u, &x.0)?, XPowers(self.set).act(u, &x.1)?))
    }

    fn elements(&self, n: usize) -> Option<Vec<Self::Elem>> {
        let ys = self.inner.elements(n)?;
        let xs = XPowers(self.set).elements(n)?;
        Some(
            ys.iter()
                .flat_map(|y| xs.iter().map(move |x| (y.clone(), x.clone())))
                .collect(),
        )
    }
}

/// A point of the matching object: one entry per order-preserving injection
/// `u: [i] -> [n]` with `i < n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchingFamily<E: Ord> {
    pub n: usize,
    pub entries: BTreeMap<InjectiveMap, E>,
}

impl<E: Ord> MatchingFamily<E> {
    /// Every order-preserving proper injection into `[n]`.
    pub fn index(n: usize) -> Vec<InjectiveMap> {
        (1..n)
            .flat_map(|i| InjectiveMap::all_order_preserving(i, n))
            .collect()
    }
}

/// The family of all proper restrictions of `y`.
pub fn matching_restrict<Y: LambdaSequence>(seq: &Y, y: &Y::Elem) -> Result<MatchingFamily<Y::Elem>> {
    let n = seq.arity(y);
    if n == 0 {
        return Err(Error::domain("arity zero is not materialized"));
    }
    let entries = MatchingFamily::<Y::Elem>::index(n)
        .into_iter()
        .map(|u| Ok((u.clone(), seq.act(&u, y)?)))
        .collect::<Result<_>>()?;
    Ok(MatchingFamily { n, entries })
}

impl<E: Element> MatchingFamily<E> {
    /// True iff `y_{u∘v} = v*(y_u)` for every composable pair.
    pub fn is_compatible<Y: LambdaSequence<Elem = E>>(&self, seq: &Y) -> Result<bool> {
        for u in Self::index(self.n) {
            let yu = self
                .entries
                .get(&u)
                .ok_or_else(|| Error::domain(format!("matching family misses the entry {u}")))?;
            if seq.arity(yu) != u.domain() {
                return Ok(false);
            }
            for j in 1..u.domain() {
                for v in InjectiveMap::all_order_preserving(j, u.domain()) {
                    let uv = u.compose(&v)?;
                    let yuv = self
                        .entries
                        .get(&uv)
                        .ok_or_else(|| Error::domain(format!("matching family misses the entry {uv}")))?;
                    if *yuv != seq.act(&v, yu)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// All compatible families of a finite Λ-sequence in arity `n`, found by an
/// exhaustive search that fills entries by increasing source arity.
pub fn enumerate_matching_families<Y: LambdaSequence>(
    seq: &Y,
    n: usize,
) -> Result<Vec<MatchingFamily<Y::Elem>>> {
    let index = MatchingFamily::<Y::Elem>::index(n);
    let mut candidates = Vec::with_capacity(index.len());
    for u in &index {
        candidates.push(
            seq.elements(u.domain())
                .ok_or_else(|| Error::domain("enumeration needs a finite Λ-sequence"))?,
        );
    }
    let mut out = Vec::new();
    let mut chosen: BTreeMap<InjectiveMap, Y::Elem> = BTreeMap::new();
    search(seq, &index, &candidates, 0, &mut chosen, &mut out, n)?;
    Ok(out)
}

fn search<Y: LambdaSequence>(
    seq: &Y,
    index: &[InjectiveMap],
    candidates: &[Vec<Y::Elem>],
    pos: usize,
    chosen: &mut BTreeMap<InjectiveMap, Y::Elem>,
    out: &mut Vec<MatchingFamily<Y::Elem>>,
    n: usize,
) -> Result<()> {
    if pos == index.len() {
        out.push(MatchingFamily {
            n,
            entries: chosen.clone(),
        });
        return Ok(());
    }
    let u = &index[pos];
    'cand: for y in &candidates[pos] {
        for j in 1..u.domain() {
            for v in InjectiveMap::all_order_preserving(j, u.domain()) {
                let uv = u.compose(&v)?;
                let prior = chosen.get(&uv).expect("smaller arities are filled first");
                if *prior != seq.act(&v, y)? {
                    continue 'cand;
                }
            }
        }
        chosen.insert(u.clone(), y.clone());
        search(seq, index, candidates, pos + 1, chosen, out, n)?;
        chosen.remove(u);
    }
    Ok(())
}

/// The `k`-truncation: arities above `k` are empty and every structure map
/// with an output above `k` is dropped.
#[derive(Clone, Debug)]
pub struct Truncated<Y> {
    pub inner: Y,
    pub k: usize,
}

impl<Y> Truncated<Y> {
    pub fn new(inner: Y, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("truncation level must be at least 1"));
        }
        Ok(Truncated { inner, k })
    }

    /// Truncating again keeps the smaller level.
    pub fn truncate(self, j: usize) -> Result<Self> {
        let k = self.k.min(j);
        Truncated::new(self.inner, k)
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.k {
            return Err(Error::domain(format!("arity {n} is empty in the {}-truncation", self.k)));
        }
        Ok(())
    }
}

impl<Y: LambdaSequence> LambdaSequence for Truncated<Y> {
    type Elem = Y::Elem;

    fn arity(&self, x: &Y::Elem) -> usize {
        self.inner.arity(x)
    }

    fn act(&self, u: &InjectiveMap, x: &Y::Elem) -> Result<Y::Elem> {
        self.check(self.inner.arity(x))?;
        self.inner.act(u, x)
    }

    fn elements(&self, n: usize) -> Option<Vec<Y::Elem>> {
        if n > self.k {
            Some(Vec::new())
        } else {
            self.inner.elements(n)
        }
    }
}

impl<O: Operad> Operad for Truncated<O> {
    fn name(&self) -> String {
        format!("{}<={}", self.inner.name(), self.k)
    }

    fn unit(&self) -> O::Elem {
        self.inner.unit()
    }

    fn compose(&self, x: &O::Elem, i: usize, y: &O::Elem) -> Result<O::Elem> {
        let n = self.inner.arity(x) + self.inner.arity(y) - 1;
        self.check(n)?;
        self.inner.compose(x, i, y)
    }

    fn validate(&self, x: &O::Elem) -> Result<()> {
        self.check(self.inner.arity(x))?;
        self.inner.validate(x)
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> O::Elem {
        self.inner.sample(rng, arity.min(self.k))
    }

    fn encode(&self, x: &O::Elem) -> String {
        self.inner.encode(x)
    }

    fn decode(&self, s: &str) -> Result<O::Elem> {
        let x = self.inner.decode(s)?;
        self.check(self.inner.arity(&x))?;
        Ok(x)
    }

    fn to_json(&self, x: &O::Elem) -> serde_json::Value {
        self.inner.to_json(x)
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<O::Elem> {
        let x = self.inner.from_json(v)?;
        self.check(self.inner.arity(&x))?;
        Ok(x)
    }
}
