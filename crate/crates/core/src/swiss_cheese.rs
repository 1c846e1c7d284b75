//! The two-colored operad `SC₁` and its action on pairs of spaces of
//! bimodule maps `(B𝒫 → 𝒬, B𝒫 → 𝒬∘X)`.
//!
//! A closed configuration is a configuration of intervals in `[0, 1]`. An
//! open one has `n` closed inputs and one open input, its last interval,
//! which ends at 1. The intervals and the gaps between them cut `[0, 1]` into
//! horizontal regions, and a point of `B𝒫` is cut along the same heights.
//! Gaps are closed and discs open, so a vertex on a boundary belongs to the
//! gap. The open disc also contains 1.

use std::fmt;

use rand::{Rng, RngCore};
use serde_json::{json, Value};

use crate::b::{BBimodule, BLabel, BPoint};
use crate::bimodule::arity_error;
use crate::error::{Error, Result};
use crate::mapping::{Names, QElem, Tagged, TwistFamily};
use crate::operads::{IntervalConfig, LambdaSequence, LittleIntervals, Operad};
use crate::rational::Rational;
use crate::symbolic::Term;
use crate::trees::{Child, InjectiveMap, Node, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Closed,
    Open,
}

impl Color {
    fn tag(self) -> char {
        match self {
            Color::Closed => 'c',
            Color::Open => 'o',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Closed => "closed",
            Color::Open => "open",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sc1Element {
    pub color: Color,
    pub config: IntervalConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// Gap number `i`, counted from the bottom starting at 0.
    Gap(usize),
    /// The disc with this input label.
    Disc(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
    pub lo: Rational,
    pub hi: Rational,
    pub closed_top: bool,
}

impl Region {
    pub fn contains(&self, h: &Rational) -> bool {
        match self.kind {
            RegionKind::Gap(_) => self.lo <= *h && *h <= self.hi,
            RegionKind::Disc(_) => self.lo < *h && (*h < self.hi || (self.closed_top && *h == self.hi)),
        }
    }

    /// `h ↦ (h − lo)/(hi − lo)`.
    pub fn rescale(&self, h: &Rational) -> Rational {
        &(h - &self.lo) / &(&self.hi - &self.lo)
    }
}

impl Sc1Element {
    pub fn new(color: Color, config: IntervalConfig) -> Result<Self> {
        config.check()?;
        if color == Color::Open && !config.intervals.last().is_some_and(|(_, b)| b.is_one()) {
            return Err(Error::invariant("the open interval ends at 1", format!("o:{}", config.encode())));
        }
        Ok(Sc1Element { color, config })
    }

    /// The configuration with one input of each color that acts as the identity.
    pub fn identity(color: Color) -> Self {
        Sc1Element { color, config: IntervalConfig::unit() }
    }

    pub fn closed_inputs(&self) -> usize {
        match self.color {
            Color::Closed => self.config.arity(),
            Color::Open => self.config.arity() - 1,
        }
    }

    /// `self ∘ᵢ other`. Closed inputs take closed configurations and the open
    /// input takes an open one.
    pub fn compose(&self, i: usize, other: &Sc1Element) -> Result<Self> {
        let n = self.closed_inputs();
        let expected = if i <= n {
            Color::Closed
        } else if i == n + 1 && self.color == Color::Open {
            Color::Open
        } else {
            return Err(Error::arity(format!("input {i} of a configuration with {} inputs", self.config.arity())));
        };
        if other.color != expected {
            return Err(Error::domain(format!("input {i} is {expected}, got a {} configuration", other.color)));
        }
        let config = LittleIntervals.compose(&self.config, i, &other.config)?;
        Sc1Element::new(self.color, config)
    }

    /// Closed disc labels sorted by position.
    fn closed_by_position(&self) -> Vec<usize> {
        let n = self.closed_inputs();
        self.config.labels_by_position().into_iter().filter(|&l| l <= n).collect()
    }

    /// The gaps between consecutive discs, from the bottom.
    pub fn gaps(&self) -> Vec<(Rational, Rational)> {
        let iv = &self.config.intervals;
        let mut bounds = vec![Rational::zero()];
        for l in self.closed_by_position() {
            bounds.push(iv[l - 1].0.clone());
            bounds.push(iv[l - 1].1.clone());
        }
        bounds.push(match self.color {
            Color::Closed => Rational::one(),
            Color::Open => iv[iv.len() - 1].0.clone(),
        });
        bounds.chunks(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    /// Gaps and discs interleaved from the bottom.
    pub fn regions(&self) -> Vec<Region> {
        let iv = &self.config.intervals;
        let gaps = self.gaps();
        let discs = self.closed_by_position();
        let mut out = Vec::with_capacity(2 * gaps.len());
        for (g, (lo, hi)) in gaps.into_iter().enumerate() {
            out.push(Region { kind: RegionKind::Gap(g), lo, hi, closed_top: true });
            if let Some(&l) = discs.get(g) {
                let (lo, hi) = iv[l - 1].clone();
                out.push(Region { kind: RegionKind::Disc(l), lo, hi, closed_top: false });
            }
        }
        if self.color == Color::Open {
            let (lo, hi) = iv[iv.len() - 1].clone();
            out.push(Region { kind: RegionKind::Disc(iv.len()), lo, hi, closed_top: true });
        }
        out
    }

    /// Random configuration with `n` closed inputs. Closed ones need `n ≥ 1`.
    pub fn random(rng: &mut dyn RngCore, n: usize, color: Color) -> Self {
        match color {
            Color::Closed => Sc1Element { color, config: IntervalConfig::random(rng, n.max(1)) },
            Color::Open => {
                let c0 = Rational::new(rng.gen_range(if n == 0 { 0 } else { 2 }..=6), 8);
                let mut intervals = Vec::with_capacity(n + 1);
                if n > 0 {
                    let inner = IntervalConfig::random(rng, n);
                    intervals.extend(inner.intervals.into_iter().map(|(a, b)| (&a * &c0, &b * &c0)));
                }
                intervals.push((c0, Rational::one()));
                Sc1Element { color, config: IntervalConfig { intervals } }
            }
        }
    }

    /// `c:a,b;..` or `o:a,b;..`.
    pub fn encode(&self) -> String {
        format!("{}:{}", self.color.tag(), self.config.encode())
    }

    pub fn decode(s: &str) -> Result<Self> {
        let color = match s.split_once(':') {
            Some(("c", _)) => Color::Closed,
            Some(("o", _)) => Color::Open,
            _ => {
                return Err(Error::Parse { position: 0, message: format!("`{s}` does not start with `c:` or `o:`") });
            }
        };
        Sc1Element::new(color, IntervalConfig::decode(&s[2..])?)
    }

    pub fn to_json(&self) -> Value {
        let intervals: Vec<Value> = self.config.intervals.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
        json!({ "color": self.color.to_string(), "intervals": intervals })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse { position: 0, message: m.to_string() };
        let color = match v.get("color").and_then(Value::as_str) {
            Some("closed") => Color::Closed,
            Some("open") => Color::Open,
            _ => return Err(bad("`color` must be \"closed\" or \"open\"")),
        };
        let intervals = v
            .get("intervals")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `intervals`"))?
            .iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => {
                    let a = a.as_str().ok_or_else(|| bad("endpoints are strings"))?;
                    let b = b.as_str().ok_or_else(|| bad("endpoints are strings"))?;
                    Ok((a.parse()?, b.parse()?))
                }
                _ => Err(bad("an interval is a pair of endpoints")),
            })
            .collect::<Result<Vec<_>>>()?;
        Sc1Element::new(color, IntervalConfig { intervals })
    }
}

impl fmt::Display for Sc1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// The part of a point lying in one region and starting from one strand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subpoint<A> {
    /// Position among the subpoints of its region, from 1.
    pub position: usize,
    pub body: BPoint<A>,
}

#[derive(Clone, Debug)]
pub struct Subdivision<A> {
    pub regions: Vec<Region>,
    /// One list per region; the subpoints of a region are the inputs of the
    /// one below.
    pub levels: Vec<Vec<Subpoint<A>>>,
    /// Planar position of each leaf of the original point.
    pub sigma: InjectiveMap,
}

enum Strand<'y, A> {
    Leaf,
    Vertex(&'y Node<BLabel<A>, ()>),
}

impl<A> Clone for Strand<'_, A> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<A> Copy for Strand<'_, A> {}

/// Cuts `y` along the regions of `c`. Leaves are first renumbered in planar
/// order; `sigma` undoes this.
pub fn subdivide<A: Clone>(c: &Sc1Element, y: &BPoint<A>) -> Result<Subdivision<A>> {
    let regions = c.regions();
    let sigma = y.leaf_positions();
    let mut planar = y.clone();
    planar.map_leaves(|k| sigma.apply(k));
    let locate = |h: &Rational| {
        regions
            .iter()
            .position(|r| r.contains(h))
            .ok_or_else(|| Error::domain(format!("height {h} lies in no region of {c}")))
    };

    let mut strands = vec![match &planar {
        Tree::Trivial => Strand::Leaf,
        Tree::Rooted(root) => Strand::Vertex(root),
    }];
    let mut levels = Vec::with_capacity(regions.len());
    for (r, region) in regions.iter().enumerate() {
        let mut next = Vec::new();
        let mut level = Vec::with_capacity(strands.len());
        for (p, s) in strands.iter().enumerate() {
            let body = match *s {
                Strand::Vertex(v) if region.contains(&v.deco.height) => Tree::Rooted(extract(v, region, &mut next)),
                Strand::Vertex(v) if locate(&v.deco.height)? < r => {
                    return Err(Error::domain(format!(
                        "height {} sits below the region [{}, {}] it was reached in",
                        v.deco.height, region.lo, region.hi
                    )));
                }
                other => {
                    next.push(other);
                    Tree::Trivial
                }
            };
            level.push(Subpoint { position: p + 1, body });
        }
        levels.push(level);
        strands = next;
    }
    if strands.iter().any(|s| matches!(s, Strand::Vertex(_))) {
        return Err(Error::domain(format!("a vertex lies above every region of {c}")));
    }
    Ok(Subdivision { regions, levels, sigma })
}

fn extract<'y, A: Clone>(
    node: &'y Node<BLabel<A>, ()>,
    region: &Region,
    exits: &mut Vec<Strand<'y, A>>,
) -> Node<BLabel<A>, ()> {
    let children = node
        .children
        .iter()
        .map(|c| match c {
            Child::Inner((), sub) if region.contains(&sub.deco.height) => {
                Child::Inner((), Box::new(extract(sub, region, exits)))
            }
            Child::Inner((), sub) => {
                exits.push(Strand::Vertex(sub));
                Child::Leaf(exits.len())
            }
            Child::Leaf(_) => {
                exits.push(Strand::Leaf);
                Child::Leaf(exits.len())
            }
        })
        .collect();
    Node { deco: node.deco.clone(), children }
}

impl<A: Clone> Subpoint<A> {
    /// The body with its exits numbered from 1 and, inside a disc, its
    /// heights stretched to `[0, 1]`. This is what the map on that region
    /// is evaluated at.
    pub fn normalized(&self, region: &Region) -> BPoint<A> {
        let mut tree = self.body.clone();
        if let Some(first) = tree.leaf_word().into_iter().min() {
            tree.map_leaves(|k| k + 1 - first);
        }
        if matches!(region.kind, RegionKind::Gap(_)) {
            return tree;
        }
        tree.try_map(|l: &BLabel<A>| Ok(BLabel { w: l.w.clone(), height: region.rescale(&l.height) }), |_| Ok(()))
            .expect("infallible")
    }
}

pub type ClosedMap<'f, A> = &'f dyn Fn(&BPoint<A>) -> Result<QElem<A>>;
pub type OpenMap<'f, A> = &'f dyn Fn(&BPoint<A>) -> Result<Tagged<A>>;

/// Composes the levels below the open disc, or all of them for a closed
/// configuration.
fn closed_levels<P: Operad + Clone>(
    family: &TwistFamily<P>,
    b_mod: &BBimodule<P>,
    sub: &Subdivision<P::Elem>,
    closed: &[ClosedMap<'_, P::Elem>],
    count: usize,
) -> Result<QElem<P::Elem>> {
    let mut acc: Option<QElem<P::Elem>> = None;
    for (region, level) in sub.regions.iter().zip(&sub.levels).take(count) {
        let values = level
            .iter()
            .map(|s| match region.kind {
                RegionKind::Gap(_) => family.eta_mu_prime(b_mod, &s.normalized(region)),
                RegionKind::Disc(l) => closed[l - 1](&s.normalized(region)),
            })
            .collect::<Result<Vec<_>>>()?;
        acc = Some(match acc {
            None => values.into_iter().next().expect("one strand at the bottom"),
            Some(q) => family.q.compose_all(&q, &values)?,
        });
    }
    Ok(acc.unwrap_or_else(|| family.q.unit()))
}

/// `α(c; f₁, .., fₙ, f)(y)` for an open configuration `c`.
pub fn alpha_eval<P: Operad + Clone>(
    family: &TwistFamily<P>,
    b_mod: &BBimodule<P>,
    c: &Sc1Element,
    closed: &[ClosedMap<'_, P::Elem>],
    open: OpenMap<'_, P::Elem>,
    y: &BPoint<P::Elem>,
) -> Result<Tagged<P::Elem>> {
    if c.color != Color::Open {
        return Err(Error::domain(format!("{c} is closed, so it acts on maps into 𝒬")));
    }
    if closed.len() != c.closed_inputs() {
        return Err(arity_error(c.closed_inputs(), closed.len()));
    }
    let sub = subdivide(c, y)?;
    let last = sub.regions.len() - 1;
    let acc = closed_levels(family, b_mod, &sub, closed, last)?;
    let top = &sub.regions[last];
    let mut qs = Vec::new();
    let mut tags = Vec::new();
    for s in &sub.levels[last] {
        let (q, t) = open(&s.normalized(top))?;
        qs.push(q);
        tags.extend(t);
    }
    let q = family.q.compose_all(&acc, &qs)?;
    let n = tags.len();
    let tags = (1..=n).map(|j| tags[sub.sigma.apply(j) - 1]).collect();
    Ok((family.q.act(&sub.sigma, &q)?, tags))
}

/// The action of a closed configuration on maps `B𝒫 → 𝒬`.
pub fn d1_action_eval<P: Operad + Clone>(
    family: &TwistFamily<P>,
    b_mod: &BBimodule<P>,
    c: &Sc1Element,
    closed: &[ClosedMap<'_, P::Elem>],
    y: &BPoint<P::Elem>,
) -> Result<QElem<P::Elem>> {
    if c.color != Color::Closed {
        return Err(Error::domain(format!("{c} is open, so it acts on pairs of maps")));
    }
    if closed.len() != c.closed_inputs() {
        return Err(arity_error(c.closed_inputs(), closed.len()));
    }
    let sub = subdivide(c, y)?;
    let q = closed_levels(family, b_mod, &sub, closed, sub.regions.len())?;
    family.q.act(&sub.sigma, &q)
}

/// `α(c; f₁, ..)(y)` written out. A subpoint with one vertex prints its
/// label; a larger one prints as `z{position}_{disc}` inside a disc and
/// `w{position}_{gap}` inside a gap.
pub fn render_alpha<P: Operad + Clone>(
    family: &TwistFamily<P>,
    c: &Sc1Element,
    y: &BPoint<P::Elem>,
    names: &Names<P::Elem>,
) -> Result<Term> {
    let sub = subdivide(c, y)?;
    let mut acc: Option<Term> = None;
    for (region, level) in sub.regions.iter().zip(&sub.levels) {
        let args: Vec<Term> = level
            .iter()
            .map(|s| {
                let single = match &s.body {
                    Tree::Rooted(n) if s.body.vertex_count() == 1 => Some(n),
                    _ => None,
                };
                match region.kind {
                    RegionKind::Gap(g) => match (&s.body, single) {
                        (Tree::Trivial, _) => Term::unit(),
                        (_, Some(n)) => Term::atom(format!("eta.mu({})", names.label(&family.w, &n.deco.w))),
                        _ => Term::atom(format!("eta.mu(w{}_{g})", s.position)),
                    },
                    RegionKind::Disc(l) => Term::atom(match (&s.body, single) {
                        (Tree::Trivial, _) => format!("f{l}(iota(*))"),
                        (_, Some(n)) => format!(
                            "f{l}(c{l}*({};{}))",
                            names.label(&family.w, &n.deco.w),
                            names.height(&n.deco.height)
                        ),
                        _ => format!("f{l}(c{l}*(z{}_{l}))", s.position),
                    }),
                }
            })
            .collect();
        acc = Some(match acc {
            None => args.into_iter().next().expect("one strand at the bottom"),
            Some(head) => Term::apply(head, args, ", "),
        });
    }
    Ok(acc.unwrap_or_else(Term::unit))
}
