//! Maps out of `W𝒫` and `B𝒫` into a twisted target, paths of operad maps,
//! the bimodules `𝒬ₓ` and `𝒬∘X`, the evaluations `ξ`, `ψ′`, `ψ″`, and the
//! path-lifting recipe.
//!
//! The target is `𝒬 = 𝒫∘ℚ`: `𝒫` framed by the additive rationals acting
//! trivially, with `η(θ) = (θ; 0, .., 0)`. For `s ∈ ℚ` the operad map
//! `δ_s: W𝒫 → 𝒬` sends `y` to `μ(y)` framed at leaf `k` by `s·Σ t(1−t)`
//! over the edges between the root and `k`. Lengths 0 and 1 contribute
//! nothing, so `δ_s` respects contraction and grafting, and `δ_0 = η∘μ`.
//! Removing a unit vertex merges two edges and would change the sum; this
//! never happens for discs and intervals, whose restrictions are never the
//! unit, but it does for the associative operad.
//!
//! `X` is a finite pointed set whose points carry a scale, `δ_x = δ_{scale(x)}`.
//! A path of maps is `t ↦ δ_{κ(t)}` for a piecewise-linear `κ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::b::{BBimodule, BLabel, BPoint};
use crate::bimodule::{arity_error, Bimodule, ElemMap, PulledBack};
use crate::error::{Error, Result};
use crate::operads::{evaluate_tree, Framed, FramedElement, LambdaSequence, Operad, PointedSet, Product, Translation};
use crate::rational::Rational;
use crate::suites::CheckLog;
use crate::symbolic::Term;
use crate::trees::{Child, InjectiveMap, Node, Tree};
use crate::w::{WOperad, WPoint};

pub type Target<P> = Framed<P, Translation>;
pub type QElem<A> = FramedElement<A, Rational>;
/// A point of `𝒬∘X`: an element of `𝒬` with one point of `X` per input.
pub type Tagged<A> = (QElem<A>, Vec<usize>);

/// `t(1−t)`, zero at both ends of `[0, 1]`.
pub fn bump(t: &Rational) -> Rational {
    t * &(Rational::one() - t)
}

/// The family `s ↦ δ_s`.
#[derive(Clone, Debug)]
pub struct TwistFamily<P> {
    pub w: WOperad<P>,
    pub q: Target<P>,
}

impl<P: Operad + Clone> TwistFamily<P> {
    pub fn new(base: P) -> Self {
        TwistFamily { w: WOperad::new(base.clone()), q: Framed::new(base, Translation) }
    }

    pub fn eta(&self, theta: P::Elem) -> QElem<P::Elem> {
        self.q.trivially_framed(theta)
    }

    pub fn delta(&self, s: &Rational, y: &WPoint<P::Elem>) -> Result<QElem<P::Elem>> {
        let base = self.w.mu(y)?;
        let mut frame = vec![Rational::zero(); y.arity()];
        if let Tree::Rooted(root) = y {
            collect_bumps(root, s, &Rational::zero(), &mut frame);
        }
        Ok(FramedElement { base, frame })
    }

    pub fn eta_mu(&self, y: &WPoint<P::Elem>) -> Result<QElem<P::Elem>> {
        self.delta(&Rational::zero(), y)
    }

    /// `η∘μ∘μ′`, the untwisted map out of `B𝒫`.
    pub fn eta_mu_prime(&self, b_mod: &BBimodule<P>, b: &BPoint<P::Elem>) -> Result<QElem<P::Elem>> {
        self.eta_mu(&b_mod.mu_prime(b)?)
    }
}

fn collect_bumps<A>(node: &Node<A, Rational>, s: &Rational, acc: &Rational, frame: &mut [Rational]) {
    for c in &node.children {
        match c {
            Child::Leaf(k) => frame[k - 1] = acc.clone(),
            Child::Inner(t, sub) => collect_bumps(sub, s, &(acc + &(s * &bump(t))), frame),
        }
    }
}

/// `X` with the scales of its points; the basepoint `0` has scale 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedFamily {
    names: Vec<String>,
    scales: Vec<Rational>,
}

impl PointedFamily {
    pub fn new(points: Vec<(String, Rational)>) -> Result<Self> {
        let Some((_, s0)) = points.first() else {
            return Err(Error::domain("a pointed set needs its basepoint"));
        };
        if !s0.is_zero() {
            return Err(Error::domain(format!("the basepoint must go to η∘μ, but its scale is {s0}")));
        }
        let (names, scales) = points.into_iter().unzip();
        Ok(PointedFamily { names, scales })
    }

    /// `{*, a, b}` with scales `0, 1, −1/2`.
    pub fn standard() -> Self {
        PointedFamily::new(vec![
            ("*".into(), Rational::zero()),
            ("a".into(), Rational::one()),
            ("b".into(), Rational::new(-1, 2)),
        ])
        .expect("basepoint has scale 0")
    }

    pub fn set(&self) -> PointedSet {
        PointedSet { size: self.names.len() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn scale(&self, x: usize) -> Result<&Rational> {
        self.scales.get(x).ok_or_else(|| Error::domain(format!("no point {x} in X")))
    }

    pub fn name(&self, x: usize) -> &str {
        self.names.get(x).map_or("?", String::as_str)
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// `t ↦ δ_{κ(t)}` with `κ` linear between knots `(t, κ(t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistPath {
    knots: Vec<(Rational, Rational)>,
}

impl TwistPath {
    pub fn new(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        let ok_ends = knots.first().is_some_and(|k| k.0.is_zero()) && knots.last().is_some_and(|k| k.0.is_one());
        if knots.len() < 2 || !ok_ends {
            return Err(Error::domain("knots must start at t = 0 and end at t = 1"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::domain("knot times must increase"));
        }
        Ok(TwistPath { knots })
    }

    pub fn constant(s: Rational) -> Self {
        TwistPath { knots: vec![(Rational::zero(), s.clone()), (Rational::one(), s)] }
    }

    pub fn linear(from: Rational, to: Rational) -> Self {
        TwistPath { knots: vec![(Rational::zero(), from), (Rational::one(), to)] }
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn start(&self) -> &Rational {
        &self.knots[0].1
    }

    pub fn end(&self) -> &Rational {
        &self.knots[self.knots.len() - 1].1
    }

    pub fn is_loop(&self) -> bool {
        self.start().is_zero() && self.end().is_zero()
    }

    pub fn scale_at(&self, t: &Rational) -> Result<Rational> {
        if !t.in_unit_interval() {
            return Err(Error::domain(format!("time {t} outside [0, 1]")));
        }
        let k = self.knots.iter().rposition(|(a, _)| a <= t).expect("first knot is at 0");
        if k + 1 == self.knots.len() {
            return Ok(self.knots[k].1.clone());
        }
        let ((t0, s0), (t1, s1)) = (&self.knots[k], &self.knots[k + 1]);
        Ok(s0 + &(&(s1 - s0) * &(&(t - t0) / &(t1 - t0))))
    }

    pub fn eval<P: Operad + Clone>(
        &self,
        family: &TwistFamily<P>,
        y: &WPoint<P::Elem>,
        t: &Rational,
    ) -> Result<QElem<P::Elem>> {
        family.delta(&self.scale_at(t)?, y)
    }

    /// Up to two interior knots on the eighths, scales on the quarters in
    /// `[−2, 2]`.
    pub fn random(rng: &mut dyn RngCore, start: Rational, end: Rational) -> Self {
        let mut times: Vec<i64> = (1..8).collect();
        times.shuffle(rng);
        let mut inner: Vec<i64> = times[..rng.gen_range(0..=2)].to_vec();
        inner.sort_unstable();
        let mut knots = vec![(Rational::zero(), start)];
        for t in inner {
            knots.push((Rational::new(t, 8), Rational::new(rng.gen_range(-8..=8), 4)));
        }
        knots.push((Rational::one(), end));
        TwistPath { knots }
    }
}

impl fmt::Display for TwistPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.knots.iter().map(|(t, s)| format!("{t}:{s}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for TwistPath {
    type Err = Error;

    /// `t:s,t:s,..`
    fn from_str(s: &str) -> Result<Self> {
        let knots = s
            .split(',')
            .map(|k| {
                let (t, v) = k
                    .split_once(':')
                    .ok_or_else(|| Error::Parse { position: 0, message: format!("knot `{k}` is not `t:s`") })?;
                Ok((t.trim().parse()?, v.trim().parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        TwistPath::new(knots)
    }
}

/// A point `(x, g)` of the homotopy fiber: `g` runs from `δ_*` to `δ_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HofiberPoint {
    pub x: usize,
    pub path: TwistPath,
}

impl HofiberPoint {
    pub fn check(&self, xs: &PointedFamily) -> Result<()> {
        if !self.path.start().is_zero() {
            return Err(Error::invariant(
                "start",
                format!("g(-, 0) must be δ_* = η∘μ, but the path starts at scale {}", self.path.start()),
            ));
        }
        let want = xs.scale(self.x)?;
        if self.path.end() != want {
            return Err(Error::invariant(
                "end",
                format!(
                    "g(-, 1) must be δ_{} (scale {want}), but the path ends at scale {}",
                    xs.name(self.x),
                    self.path.end()
                ),
            ));
        }
        Ok(())
    }

    pub fn random(rng: &mut dyn RngCore, xs: &PointedFamily) -> Self {
        let x = rng.gen_range(0..xs.len());
        let end = xs.scale(x).expect("in range").clone();
        HofiberPoint { x, path: TwistPath::random(rng, Rational::zero(), end) }
    }
}

pub const PATH_LAWS: &[(&str, &str)] = &[
    ("unit", "g(1; t) = 1'"),
    ("compose", "g(y ∘_i z; t) = g(y; t) ∘_i g(z; t)"),
    ("start", "g(y; 0) = η∘μ(y)"),
    ("end", "g(y; 1) = δ_x(y)"),
    ("lambda", "g(u*y; t) = u* g(y; t)"),
];

/// One round of the path conditions for a path meant to end at `δ_{end}`.
pub fn check_path_sample<P: Operad + Clone>(
    family: &TwistFamily<P>,
    path: &TwistPath,
    end: &Rational,
    rng: &mut dyn RngCore,
    max_arity: usize,
    log: &mut CheckLog,
) {
    for (id, law) in PATH_LAWS {
        log.declare(id, law);
    }
    let (w, q) = (&family.w, &family.q);
    let t = if rng.gen_bool(0.3) {
        path.knots()[rng.gen_range(0..path.knots().len())].0.clone()
    } else {
        Rational::new(rng.gen_range(0..=8), 8)
    };
    let n = rng.gen_range(1..=max_arity);
    let y = w.sample(rng, n);
    let m = rng.gen_range(1..=max_arity);
    let z = w.sample(rng, m);
    let i = rng.gen_range(1..=n);
    let g = |a: &WPoint<P::Elem>, t: &Rational| path.eval(family, a, t);
    let shown = |a: &WPoint<P::Elem>| w.to_text(a);

    log.record("unit", g(&w.unit(), &t).map(|r| r == q.unit()), || format!("t = {t}"));
    let comp = (|| -> Result<bool> { Ok(g(&w.compose(&y, i, &z)?, &t)? == q.compose(&g(&y, &t)?, i, &g(&z, &t)?)?) })();
    log.record("compose", comp, || format!("y = {}, i = {i}, z = {}, t = {t}", shown(&y), shown(&z)));
    let start = (|| -> Result<bool> { Ok(g(&y, &Rational::zero())? == family.eta_mu(&y)?) })();
    log.record("start", start, || format!("y = {}", shown(&y)));
    let stop = (|| -> Result<bool> { Ok(g(&y, &Rational::one())? == family.delta(end, &y)?) })();
    log.record("end", stop, || format!("y = {}", shown(&y)));
    let a = rng.gen_range(1..=n);
    let u = InjectiveMap::random(rng, a, n);
    let lam = (|| -> Result<bool> { Ok(g(&w.act(&u, &y)?, &t)? == q.act(&u, &g(&y, &t)?)?) })();
    log.record("lambda", lam, || format!("y = {}, u = {u}, t = {t}", shown(&y)));
}

/// `𝒬ₓ`: left action through `δ_*`, right action through `δ_x`.
pub fn q_x<P>(family: &TwistFamily<P>, xs: &PointedFamily, x: usize) -> Result<PulledBack<WOperad<P>, Target<P>>>
where
    P: Operad + Clone + 'static,
{
    let s = xs.scale(x)?.clone();
    let (f0, f1) = (family.clone(), family.clone());
    let left: ElemMap<WPoint<P::Elem>, QElem<P::Elem>> = Arc::new(move |p| f0.eta_mu(p));
    let right: ElemMap<WPoint<P::Elem>, QElem<P::Elem>> = Arc::new(move |p| f1.delta(&s, p));
    Ok(PulledBack::new(family.w.clone(), family.q.clone(), left, right, format!("Q_{}", xs.name(x))))
}

/// `𝒬∘X`: the right action at input `i` goes through `δ_{x_i}` and repeats
/// the tag `x_i`; the left action goes through `δ_*` and concatenates tags.
#[derive(Clone, Debug)]
pub struct QCircX<P> {
    pub family: TwistFamily<P>,
    pub xs: PointedFamily,
    product: Product<Target<P>>,
}

impl<P: Operad + Clone> QCircX<P> {
    pub fn new(family: TwistFamily<P>, xs: PointedFamily) -> Self {
        let product = Product::new(family.q.clone(), xs.set());
        QCircX { family, xs, product }
    }
}

impl<P: Operad + Clone> LambdaSequence for QCircX<P> {
    type Elem = Tagged<P::Elem>;

    fn arity(&self, m: &Self::Elem) -> usize {
        self.product.arity(m)
    }

    fn act(&self, u: &InjectiveMap, m: &Self::Elem) -> Result<Self::Elem> {
        self.product.act(u, m)
    }
}

impl<P: Operad + Clone> Bimodule for QCircX<P> {
    type Over = WOperad<P>;

    fn operad(&self) -> &WOperad<P> {
        &self.family.w
    }

    fn name(&self) -> String {
        format!("{}∘X", self.family.q.name())
    }

    fn left(&self, p: &WPoint<P::Elem>, args: &[Self::Elem]) -> Result<Self::Elem> {
        if p.arity() != args.len() {
            return Err(arity_error(p.arity(), args.len()));
        }
        let qs: Vec<QElem<P::Elem>> = args.iter().map(|a| a.0.clone()).collect();
        let q = self.family.q.compose_all(&self.family.eta_mu(p)?, &qs)?;
        Ok((q, args.iter().flat_map(|a| a.1.iter().copied()).collect()))
    }

    fn right(&self, m: &Self::Elem, i: usize, p: &WPoint<P::Elem>) -> Result<Self::Elem> {
        let Some(&xi) = m.1.get(i.wrapping_sub(1)) else {
            return Err(Error::arity(format!("right action at input {i} of an arity-{} point", m.1.len())));
        };
        let q = self.family.q.compose(&m.0, i, &self.family.delta(self.xs.scale(xi)?, p)?)?;
        let mut tags = m.1[..i - 1].to_vec();
        tags.extend(std::iter::repeat_n(xi, p.arity()));
        tags.extend_from_slice(&m.1[i..]);
        Ok((q, tags))
    }

    fn validate(&self, m: &Self::Elem) -> Result<()> {
        self.family.q.validate(&m.0)?;
        if m.1.len() != m.0.frame.len() {
            return Err(Error::invariant("one tag per input", format!("{} tags for arity {}", m.1.len(), m.0.frame.len())));
        }
        if let Some(x) = m.1.iter().find(|&&x| x >= self.xs.len()) {
            return Err(Error::invariant("tags lie in X", format!("tag {x}")));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem {
        let q = self.family.q.sample(rng, arity);
        let tags = (0..arity).map(|_| rng.gen_range(0..self.xs.len())).collect();
        (q, tags)
    }

    fn encode(&self, m: &Self::Elem) -> String {
        let tags: Vec<&str> = m.1.iter().map(|&x| self.xs.name(x)).collect();
        format!("{}@{}", self.family.q.encode(&m.0), tags.join(","))
    }
}

/// Replaces each vertex `(y_v, t_v)` by `g(y_v; t_v)` and composes along the
/// tree.
pub fn eval_along<P: Operad + Clone>(
    family: &TwistFamily<P>,
    path: &TwistPath,
    b: &BPoint<P::Elem>,
) -> Result<QElem<P::Elem>> {
    evaluate_tree(&family.q, b, |_, n| path.eval(family, &n.deco.w, &n.deco.height))
}

/// `ξ(g)` for a loop `g` at `η∘μ`.
pub fn xi_eval<P: Operad + Clone>(family: &TwistFamily<P>, g: &TwistPath, b: &BPoint<P::Elem>) -> Result<QElem<P::Elem>> {
    if !g.is_loop() {
        return Err(Error::domain(format!(
            "ξ needs a loop at η∘μ, but the path runs from scale {} to {}",
            g.start(),
            g.end()
        )));
    }
    eval_along(family, g, b)
}

/// `ψ′(x, g)` at `b`: the same recipe, paired with `x`.
pub fn psi_prime_eval<P: Operad + Clone>(
    family: &TwistFamily<P>,
    xs: &PointedFamily,
    h: &HofiberPoint,
    b: &BPoint<P::Elem>,
) -> Result<(usize, QElem<P::Elem>)> {
    h.check(xs)?;
    Ok((h.x, eval_along(family, &h.path, b)?))
}

/// `ψ″(x, f)`: `p ↦ (f(p); x, .., x)`.
pub fn psi_double_prime<'f, A>(
    x: usize,
    f: &'f dyn Fn(&BPoint<A>) -> Result<QElem<A>>,
) -> impl Fn(&BPoint<A>) -> Result<Tagged<A>> + 'f {
    move |p| {
        let q = f(p)?;
        let n = q.frame.len();
        Ok((q, vec![x; n]))
    }
}

/// A path in `X`, constant on `[t_k, t_{k+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPath {
    knots: Vec<(Rational, usize)>,
}

impl XPath {
    pub fn new(knots: Vec<(Rational, usize)>) -> Result<Self> {
        if !knots.first().is_some_and(|k| k.0.is_zero()) {
            return Err(Error::domain("a path in X starts at time 0"));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) || knots.iter().any(|k| !k.0.in_unit_interval()) {
            return Err(Error::domain("switching times must increase inside [0, 1]"));
        }
        Ok(XPath { knots })
    }

    pub fn constant(x: usize) -> Self {
        XPath { knots: vec![(Rational::zero(), x)] }
    }

    pub fn at(&self, s: &Rational) -> usize {
        self.knots.iter().rev().find(|(t, _)| t <= s).map_or(self.knots[0].1, |k| k.1)
    }

    pub fn random(rng: &mut dyn RngCore, start: usize, xs: &PointedFamily) -> Self {
        let mut knots = vec![(Rational::zero(), start)];
        let mut t = 0;
        for _ in 0..rng.gen_range(0..=2) {
            t = rng.gen_range(t + 1..=8);
            knots.push((Rational::new(t, 8), rng.gen_range(0..xs.len())));
            if t == 8 {
                break;
            }
        }
        XPath { knots }
    }
}

enum Upper<'b, A> {
    Leaf,
    Part(&'b Node<BLabel<A>, ()>),
}

/// The lift at time `t` of `γ` through `f₀`: cut `b` at height `1 − t/2`,
/// stretch the lower part back to `[0, 1]` and apply `f₀`, send an upper
/// vertex at height `s` to `δ_{γ(2s+t−2)}` of its label, and compose. A
/// vertex exactly at the cut stays below. Every tag becomes `γ(t)`.
#[allow(clippy::too_many_arguments)]
pub fn lift_path<P: Operad + Clone>(
    b_mod: &BBimodule<P>,
    family: &TwistFamily<P>,
    xs: &PointedFamily,
    f0: &dyn Fn(&BPoint<P::Elem>) -> Result<Tagged<P::Elem>>,
    gamma: &XPath,
    x: usize,
    t: &Rational,
    b: &BPoint<P::Elem>,
) -> Result<Tagged<P::Elem>> {
    if !t.in_unit_interval() {
        return Err(Error::domain(format!("time {t} outside [0, 1]")));
    }
    if gamma.at(&Rational::zero()) != x {
        return Err(Error::domain(format!("the path in X starts at {}, not at {}", xs.name(gamma.at(&Rational::zero())), xs.name(x))));
    }
    let cut = Rational::one() - &(t / &Rational::from_int(2));
    let sigma = b.leaf_positions();
    let mut planar = b.clone();
    planar.map_leaves(|k| sigma.apply(k));

    let mut uppers = Vec::new();
    let lower = match &planar {
        Tree::Trivial => {
            uppers.push(Upper::Leaf);
            Tree::Trivial
        }
        Tree::Rooted(root) if root.deco.height > cut => {
            uppers.push(Upper::Part(root));
            Tree::Trivial
        }
        Tree::Rooted(root) => Tree::Rooted(split_below(root, &cut, &mut uppers)),
    };
    let stretched = b_mod.normalize(&stretch(&lower, &cut))?;
    let (q0, _) = f0(&stretched)?;

    let two = Rational::from_int(2);
    let mut qs = Vec::with_capacity(uppers.len());
    for u in &uppers {
        qs.push(match u {
            Upper::Leaf => family.q.unit(),
            Upper::Part(node) => {
                let mut tree = Tree::Rooted((*node).clone());
                let first = tree.leaf_word().into_iter().min().expect("a part has leaves");
                tree.map_leaves(|k| k + 1 - first);
                evaluate_tree(&family.q, &tree, |_, n| {
                    let s = &(&(&two * &n.deco.height) + t) - &two;
                    family.delta(xs.scale(gamma.at(&s))?, &n.deco.w)
                })?
            }
        });
    }
    let q = family.q.compose_all(&q0, &qs)?;
    let n = q.frame.len();
    Ok((family.q.act(&sigma, &q)?, vec![gamma.at(t); n]))
}

fn split_below<'b, A: Clone>(
    node: &'b Node<BLabel<A>, ()>,
    cut: &Rational,
    uppers: &mut Vec<Upper<'b, A>>,
) -> Node<BLabel<A>, ()> {
    let children = node
        .children
        .iter()
        .map(|c| match c {
            Child::Inner((), sub) if sub.deco.height <= *cut => Child::Inner((), Box::new(split_below(sub, cut, uppers))),
            Child::Inner((), sub) => {
                uppers.push(Upper::Part(sub));
                Child::Leaf(uppers.len())
            }
            Child::Leaf(_) => {
                uppers.push(Upper::Leaf);
                Child::Leaf(uppers.len())
            }
        })
        .collect();
    Node { deco: node.deco.clone(), children }
}

fn stretch<A: Clone>(tree: &BPoint<A>, cut: &Rational) -> BPoint<A> {
    tree.try_map(|l: &BLabel<A>| Ok(BLabel { w: l.w.clone(), height: &l.height / cut }), |_| Ok(()))
        .expect("infallible")
}

/// Names for printing a point symbolically.
#[derive(Clone, Debug)]
pub struct Names<A: Ord> {
    pub labels: BTreeMap<WPoint<A>, String>,
    pub heights: BTreeMap<Rational, String>,
}

impl<A: Ord> Default for Names<A> {
    fn default() -> Self {
        Names { labels: BTreeMap::new(), heights: BTreeMap::new() }
    }
}

impl<A: Ord + Clone> Names<A> {
    /// Reverses a registry of named labels.
    pub fn from_registry(registry: &BTreeMap<String, WPoint<A>>) -> Self {
        let labels = registry.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        Names { labels, heights: BTreeMap::new() }
    }

    pub fn label<P: Operad<Elem = A>>(&self, w: &WOperad<P>, x: &WPoint<A>) -> String {
        self.labels.get(x).cloned().unwrap_or_else(|| w.to_text(x))
    }

    /// Unnamed heights print as `p/q`, except the ends, which print as `0`
    /// and `1`.
    pub fn height(&self, h: &Rational) -> String {
        match self.heights.get(h) {
            Some(name) => name.clone(),
            None if h.is_zero() => "0".into(),
            None if h.is_one() => "1".into(),
            None => h.to_string(),
        }
    }
}

/// The evaluation along a path, written out: `g{arity}(label;height)` per
/// vertex, composed along the tree with `; ` between arguments. With
/// `ends`, vertices at heights 0 and 1 print as `ends.0(label)` and
/// `ends.1(label)` instead.
pub fn render_along<P: Operad + Clone>(
    family: &TwistFamily<P>,
    b: &BPoint<P::Elem>,
    names: &Names<P::Elem>,
    ends: Option<(&str, &str)>,
) -> Term {
    fn go<P: Operad + Clone>(
        family: &TwistFamily<P>,
        n: &Node<BLabel<P::Elem>, ()>,
        names: &Names<P::Elem>,
        ends: Option<(&str, &str)>,
    ) -> Term {
        let label = names.label(&family.w, &n.deco.w);
        let h = &n.deco.height;
        let head = match ends {
            Some((zero, _)) if h.is_zero() => Term::atom(format!("{zero}({label})")),
            Some((_, one)) if h.is_one() => Term::atom(format!("{one}({label})")),
            _ => Term::atom(format!("g{}({label};{})", n.arity(), names.height(h))),
        };
        let args = n
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(_) => Term::unit(),
                Child::Inner((), sub) => go(family, sub, names, ends),
            })
            .collect();
        Term::apply(head, args, "; ")
    }
    match b {
        Tree::Trivial => Term::unit(),
        Tree::Rooted(root) => go(family, root, names, ends),
    }
}
