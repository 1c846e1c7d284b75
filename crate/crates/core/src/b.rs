//! The bimodule resolution `B𝒫` of `𝒫` over `W𝒫`.
//!
//! A point is a tree whose vertices carry points of `W𝒫` and heights in
//! `[0,1]`, non-decreasing away from the root. Adjacent vertices of equal
//! height merge by composing their labels in `W𝒫`, unit-labeled unary
//! vertices disappear, and children are ordered by smallest leaf as in `W𝒫`.
//! The left action adds a root at height 0, the right action adds a vertex
//! at height 1.
//!
//! In normal form at most one vertex sits at height 0 (the root), and every
//! vertex at height 1 has only leaves above it.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bimodule::{arity_error, Bimodule};
use crate::error::{Error, Result};
use crate::operads::eval::evaluate_tree;
use crate::operads::{json_array, json_str, LambdaSequence, Operad};
use crate::rational::Rational;
use crate::sample::{random_shape, shuffle_leaves};
use crate::text::{offset_error, parse_tree, write_tree, Parser, TreeSyntax};
use crate::trees::{Child, InjectiveMap, Node, Tree, VertexId};
use crate::w::{children_sorted, field, parse_err, permute_children, remove_unary, sorting_permutation, WOperad, WPoint};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BLabel<A> {
    pub w: WPoint<A>,
    pub height: Rational,
}

pub type BPoint<A> = Tree<BLabel<A>, ()>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BStep {
    /// Merge the child in `slot` into `parent`; both have the same height.
    Merge { parent: VertexId, slot: usize },
    RemoveUnit { vertex: VertexId },
    Sort { vertex: VertexId },
}

impl fmt::Display for BStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BStep::Merge { parent, slot } => write!(f, "merge {parent:?}/{slot}"),
            BStep::RemoveUnit { vertex } => write!(f, "remove unit {vertex:?}"),
            BStep::Sort { vertex } => write!(f, "sort {vertex:?}"),
        }
    }
}

/// A point split at its height-0 and height-1 vertices.
///
/// `b = bottom(c_1 ∘ tops_1, .., c_r ∘ tops_r)` read in planar order and then
/// relabeled by `leaf_word`. Components have their leaves numbered in planar
/// order; a component may be the trivial tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BDecomposition<A> {
    pub bottom: Option<WPoint<A>>,
    pub components: Vec<BPoint<A>>,
    /// Per component and per component leaf, the height-1 label above it.
    pub tops: Vec<Vec<Option<WPoint<A>>>>,
    /// External leaf numbers in planar order.
    pub leaf_word: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct BBimodule<P> {
    pub w: WOperad<P>,
    pub max_depth: usize,
    /// Probability that a sampled unary vertex carries the unit.
    pub unit_rate: f64,
}

pub const HEIGHT_GRID: [(i64, i64); 7] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];

impl<P: Operad> BBimodule<P> {
    pub fn new(base: P) -> Self {
        let mut w = WOperad::new(base);
        w.max_depth = 2;
        BBimodule { w, max_depth: 3, unit_rate: 0.2 }
    }

    pub fn base(&self) -> &P {
        &self.w.base
    }

    /// The one-vertex point, in normal form.
    pub fn vertex(&self, w: WPoint<P::Elem>, height: Rational) -> BPoint<P::Elem> {
        if w.is_trivial() {
            return Tree::Trivial;
        }
        let n = w.arity();
        Tree::corolla(BLabel { w, height }, n)
    }

    pub fn check_raw(&self, b: &BPoint<P::Elem>) -> Result<()> {
        b.check_leaf_labeling()?;
        for id in b.planar_traversal() {
            let node = b.node(&id).expect("traversal yields vertices");
            let h = &node.deco.height;
            if !h.in_unit_interval() {
                return Err(Error::domain(format!("height {h} of vertex {id:?} outside [0, 1]")));
            }
            if node.deco.w.arity() != node.arity() {
                return Err(Error::arity(format!(
                    "vertex {id:?} has {} inputs but a label of arity {}",
                    node.arity(),
                    node.deco.w.arity()
                )));
            }
            self.w.validate(&node.deco.w)?;
            for (j, c) in node.children.iter().enumerate() {
                if let Child::Inner(_, sub) = c {
                    if sub.deco.height < *h {
                        return Err(Error::domain(format!(
                            "heights must not decrease away from the root: edge {id:?}/{j} goes from {h} down to {}",
                            sub.deco.height
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn steps(&self, b: &BPoint<P::Elem>) -> Vec<BStep> {
        let mut out = Vec::new();
        for id in b.planar_traversal() {
            let node = b.node(&id).expect("traversal yields vertices");
            for (j, c) in node.children.iter().enumerate() {
                if let Child::Inner(_, sub) = c {
                    if sub.deco.height == node.deco.height {
                        out.push(BStep::Merge { parent: id.clone(), slot: j });
                    }
                }
            }
            if node.deco.w.is_trivial() {
                out.push(BStep::RemoveUnit { vertex: id.clone() });
            }
            if !children_sorted(node) {
                out.push(BStep::Sort { vertex: id });
            }
        }
        out
    }

    pub fn apply_step(&self, b: &BPoint<P::Elem>, step: &BStep) -> Result<BPoint<P::Elem>> {
        let mut t = b.clone();
        match step {
            BStep::RemoveUnit { vertex } => return remove_unary(t, vertex, |_, _| ()),
            BStep::Merge { parent, slot } => {
                let node = node_mut(&mut t, parent)?;
                let Some(Child::Inner(..)) = node.children.get(*slot) else {
                    return Err(Error::domain(format!("slot {slot} of {parent:?} is not an inner edge")));
                };
                let Child::Inner(_, child) = node.children.remove(*slot) else { unreachable!() };
                node.deco.w = self.w.compose(&node.deco.w, slot + 1, &child.deco.w)?;
                let tail = node.children.split_off(*slot);
                node.children.extend(child.children);
                node.children.extend(tail);
            }
            BStep::Sort { vertex } => {
                let node = node_mut(&mut t, vertex)?;
                let pi = sorting_permutation(node);
                node.deco.w = self.w.act(&pi, &node.deco.w)?;
                permute_children(node, &pi);
            }
        }
        Ok(t)
    }

    pub fn normalize_in_order(
        &self,
        b: &BPoint<P::Elem>,
        choose: &mut dyn FnMut(usize) -> usize,
    ) -> Result<BPoint<P::Elem>> {
        self.check_raw(b)?;
        let mut t = b.clone();
        loop {
            let steps = self.steps(&t);
            if steps.is_empty() {
                return Ok(t);
            }
            let k = choose(steps.len());
            t = self.apply_step(&t, &steps[k])?;
        }
    }

    pub fn normalize(&self, b: &BPoint<P::Elem>) -> Result<BPoint<P::Elem>> {
        self.normalize_in_order(b, &mut |_| 0)
    }

    pub fn is_normal(&self, b: &BPoint<P::Elem>) -> bool {
        self.steps(b).is_empty()
    }

    /// `μ′`: all heights set to 0, so the whole tree merges into one point
    /// of `W𝒫`.
    pub fn mu_prime(&self, b: &BPoint<P::Elem>) -> Result<WPoint<P::Elem>> {
        evaluate_tree(&self.w, b, |_, n| Ok(n.deco.w.clone()))
    }

    pub fn decompose(&self, b: &BPoint<P::Elem>) -> Result<BDecomposition<P::Elem>> {
        let mut d = BDecomposition {
            bottom: None,
            components: Vec::new(),
            tops: Vec::new(),
            leaf_word: Vec::new(),
        };
        match b {
            Tree::Trivial => {
                d.components.push(Tree::Trivial);
                d.tops.push(vec![None]);
                d.leaf_word.push(1);
            }
            Tree::Rooted(root) if root.deco.height.is_zero() => {
                d.bottom = Some(root.deco.w.clone());
                for c in &root.children {
                    match c {
                        Child::Leaf(k) => {
                            d.components.push(Tree::Trivial);
                            d.tops.push(vec![None]);
                            d.leaf_word.push(*k);
                        }
                        Child::Inner(_, n) => middle_component(n, &mut d)?,
                    }
                }
            }
            Tree::Rooted(root) => middle_component(root, &mut d)?,
        }
        Ok(d)
    }

    /// The planar reassembly, before relabeling by the leaf word.
    fn reassemble_planar(&self, d: &BDecomposition<P::Elem>) -> Result<BPoint<P::Elem>> {
        let mut values = Vec::with_capacity(d.components.len());
        for (c, tops) in d.components.iter().zip(&d.tops) {
            let mut v = c.clone();
            for (leaf, top) in tops.iter().enumerate().rev() {
                if let Some(q) = top {
                    v = self.right(&v, leaf + 1, q)?;
                }
            }
            values.push(v);
        }
        match &d.bottom {
            Some(p) => self.left(p, &values),
            None => values.pop().ok_or_else(|| Error::domain("no components")),
        }
    }

    pub fn reassemble(&self, d: &BDecomposition<P::Elem>) -> Result<BPoint<P::Elem>> {
        let planar = self.reassemble_planar(d)?;
        self.act(&positions(&d.leaf_word)?, &planar)
    }

    /// `(k, i)`: the largest leaf count `k` of a prime component and the
    /// largest vertex count among components with `k` leaves.
    pub fn filtration_level(&self, b: &BPoint<P::Elem>) -> Result<(usize, usize)> {
        let d = self.decompose(b)?;
        let k = d.components.iter().map(Tree::arity).max().unwrap_or(0);
        let aux = d
            .components
            .iter()
            .filter(|c| c.arity() == k)
            .map(Tree::vertex_count)
            .max()
            .unwrap_or(0);
        Ok((k, aux))
    }

    /// Extends an assignment `f` on prime points with at most `k` leaves to
    /// `B𝒫ₖ` using the actions of the target bimodule. With `rng`, the left
    /// and right actions are applied in a random order.
    pub fn eval_truncated<M: Bimodule<Over = WOperad<P>>>(
        &self,
        target: &M,
        k: usize,
        b: &BPoint<P::Elem>,
        f: &dyn Fn(&BPoint<P::Elem>) -> Result<M::Elem>,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<M::Elem> {
        let d = self.decompose(b)?;
        let mut values = Vec::with_capacity(d.components.len());
        for (idx, c) in d.components.iter().enumerate() {
            if c.arity() > k {
                return Err(Error::Filtration(format!(
                    "prime component {idx} has {} leaves, more than {k}",
                    c.arity()
                )));
            }
            values.push(f(c)?);
        }
        let planar = match rng {
            None => {
                for (v, tops) in values.iter_mut().zip(&d.tops) {
                    for (leaf, top) in tops.iter().enumerate().rev() {
                        if let Some(q) = top {
                            *v = target.right(v, leaf + 1, q)?;
                        }
                    }
                }
                match &d.bottom {
                    Some(p) => target.left(p, &values)?,
                    None => values.pop().ok_or_else(|| Error::domain("no components"))?,
                }
            }
            Some(rng) => assemble_in_random_order(target, &d, values, rng)?,
        };
        target.act(&positions(&d.leaf_word)?, &planar)
    }

    /// A random, usually unnormalized, point with `n` leaves.
    pub fn sample_raw(&self, rng: &mut dyn RngCore, n: usize) -> BPoint<P::Elem> {
        let shape = random_shape(rng, n, self.max_depth);
        let Tree::Rooted(root) = &shape else { unreachable!() };
        let mut t = Tree::Rooted(self.sample_node(rng, root, 0));
        shuffle_leaves(&mut t, rng);
        t
    }

    fn sample_node(&self, rng: &mut dyn RngCore, shape: &Node<usize, ()>, min_height: usize) -> Node<BLabel<P::Elem>, ()> {
        let hi = rng.gen_range(min_height..HEIGHT_GRID.len());
        let (a, b) = HEIGHT_GRID[hi];
        let r = shape.deco;
        let w = if r == 1 && rng.gen_bool(self.unit_rate) {
            Tree::Trivial
        } else {
            self.w.sample(rng, r)
        };
        let children = shape
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(k) => Child::Leaf(*k),
                Child::Inner((), sub) => Child::Inner((), Box::new(self.sample_node(rng, sub, hi))),
            })
            .collect();
        Node { deco: BLabel { w, height: Rational::new(a, b) }, children }
    }

    pub fn to_text(&self, b: &BPoint<P::Elem>) -> String {
        write_tree(
            b,
            &|l: &BLabel<P::Elem>| format!("<{}>", self.w.to_text(&l.w)),
            &|l: &BLabel<P::Elem>| format!(":h={}", l.height),
            &|_| String::new(),
        )
    }

    /// Parses and normalizes. A decoration is `<W-point text>` (whose own
    /// `$name` references resolve in `base_registry`) or `$name`, resolved
    /// in `w_registry`.
    pub fn parse_with(
        &self,
        text: &str,
        w_registry: &BTreeMap<String, WPoint<P::Elem>>,
        base_registry: &BTreeMap<String, P::Elem>,
    ) -> Result<BPoint<P::Elem>> {
        let mut p = Parser::new(text);
        let mut deco = |p: &mut Parser| -> Result<BLabel<P::Elem>> {
            let w = if p.eat("$") {
                let name = p.ident()?;
                w_registry
                    .get(name)
                    .cloned()
                    .ok_or_else(|| p.error(format!("unknown label `{name}`")))?
            } else {
                let (start, inner) = p.balanced('<', '>')?;
                let mut q = Parser::new(inner);
                let raw = self
                    .w
                    .parse_raw(&mut q, base_registry)
                    .and_then(|r| q.finish().map(|_| r))
                    .map_err(|e| offset_error(e, start))?;
                self.w.normalize(&raw).map_err(|e| offset_error(e, start))?
            };
            Ok(BLabel { w, height: Rational::zero() })
        };
        let mut suffix = |p: &mut Parser, l: &mut BLabel<P::Elem>| -> Result<()> {
            p.expect(":h=")?;
            l.height = p.rational()?;
            Ok(())
        };
        let mut edge = |_: &mut Parser| Ok(());
        let raw = parse_tree(&mut p, &mut TreeSyntax { deco: &mut deco, node_suffix: &mut suffix, edge: &mut edge })?;
        p.finish()?;
        self.normalize(&raw)
    }

    pub fn decode(&self, text: &str) -> Result<BPoint<P::Elem>> {
        self.parse_with(text, &BTreeMap::new(), &BTreeMap::new())
    }

    pub fn to_json(&self, b: &BPoint<P::Elem>) -> Value {
        match b {
            Tree::Trivial => json!({ "leaf": 1 }),
            Tree::Rooted(n) => json!({ "root": self.node_json(n) }),
        }
    }

    fn node_json(&self, n: &Node<BLabel<P::Elem>, ()>) -> Value {
        let children: Vec<Value> = n
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(k) => json!({ "leaf": k }),
                Child::Inner((), sub) => json!({ "root": self.node_json(sub) }),
            })
            .collect();
        json!({
            "label": self.w.to_json(&n.deco.w),
            "height": n.deco.height.to_string(),
            "children": children,
        })
    }

    pub fn from_json(&self, v: &Value) -> Result<BPoint<P::Elem>> {
        let raw = match v.get("root") {
            None => {
                if v.get("leaf").and_then(Value::as_u64) == Some(1) {
                    Tree::Trivial
                } else {
                    return Err(parse_err("a point is {\"root\": ..} or {\"leaf\": 1}"));
                }
            }
            Some(r) => Tree::Rooted(self.node_from_json(r)?),
        };
        self.normalize(&raw)
    }

    fn node_from_json(&self, v: &Value) -> Result<Node<BLabel<P::Elem>, ()>> {
        let w = self.w.from_json(field(v, "label")?)?;
        let height: Rational = json_str(field(v, "height")?)?.parse()?;
        let children = json_array(field(v, "children")?)?
            .iter()
            .map(|c| {
                if let Some(k) = c.get("leaf") {
                    let k = k.as_u64().ok_or_else(|| parse_err("leaf numbers are integers"))?;
                    Ok(Child::Leaf(k as usize))
                } else {
                    Ok(Child::Inner((), Box::new(self.node_from_json(field(c, "root")?)?)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Node { deco: BLabel { w, height }, children })
    }
}

fn node_mut<'t, A>(t: &'t mut BPoint<A>, id: &[usize]) -> Result<&'t mut Node<BLabel<A>, ()>> {
    let Tree::Rooted(root) = t else {
        return Err(Error::domain("the trivial tree has no vertices"));
    };
    root.at_mut(id).ok_or_else(|| Error::domain(format!("no vertex at {id:?}")))
}

/// `σ` with `σ(k)` = position of `k` in `word`.
pub(crate) fn positions(word: &[usize]) -> Result<InjectiveMap> {
    let mut pos = vec![0; word.len()];
    for (p, &k) in word.iter().enumerate() {
        if k == 0 || k > word.len() {
            return Err(Error::domain(format!("leaf word {word:?} is not a permutation")));
        }
        pos[k - 1] = p + 1;
    }
    InjectiveMap::new(pos, word.len())
}

fn middle_component<A: Clone>(node: &Node<BLabel<A>, ()>, d: &mut BDecomposition<A>) -> Result<()> {
    if node.deco.height.is_one() {
        d.components.push(Tree::Trivial);
        d.tops.push(vec![Some(node.deco.w.clone())]);
        push_top_leaves(node, &mut d.leaf_word)?;
        return Ok(());
    }
    let mut tops = Vec::new();
    let comp = copy_middle(node, &mut tops, &mut d.leaf_word)?;
    d.components.push(Tree::Rooted(comp));
    d.tops.push(tops);
    Ok(())
}

fn push_top_leaves<A>(node: &Node<BLabel<A>, ()>, word: &mut Vec<usize>) -> Result<()> {
    for c in &node.children {
        match c {
            Child::Leaf(k) => word.push(*k),
            Child::Inner(..) => return Err(Error::domain("a vertex at height 1 has a vertex above it; normalize first")),
        }
    }
    Ok(())
}

fn copy_middle<A: Clone>(
    node: &Node<BLabel<A>, ()>,
    tops: &mut Vec<Option<WPoint<A>>>,
    word: &mut Vec<usize>,
) -> Result<Node<BLabel<A>, ()>> {
    if node.deco.height.is_zero() {
        return Err(Error::domain("a vertex at height 0 above the root; normalize first"));
    }
    let mut children = Vec::with_capacity(node.arity());
    for c in &node.children {
        match c {
            Child::Leaf(k) => {
                tops.push(None);
                word.push(*k);
                children.push(Child::Leaf(tops.len()));
            }
            Child::Inner((), sub) if sub.deco.height.is_one() => {
                tops.push(Some(sub.deco.w.clone()));
                push_top_leaves(sub, word)?;
                children.push(Child::Leaf(tops.len()));
            }
            Child::Inner((), sub) => {
                children.push(Child::Inner((), Box::new(copy_middle(sub, tops, word)?)));
            }
        }
    }
    Ok(Node { deco: node.deco.clone(), children })
}

/// Pending right actions are tracked by the planar slot they occupy.
fn assemble_in_random_order<P: Operad, M: Bimodule<Over = WOperad<P>>>(
    target: &M,
    d: &BDecomposition<P::Elem>,
    mut values: Vec<M::Elem>,
    rng: &mut dyn RngCore,
) -> Result<M::Elem> {
    // slots[j][s] = Some(q) when the s-th input of values[j] still waits for q
    let mut slots: Vec<Vec<Option<WPoint<P::Elem>>>> = d.tops.clone();
    let mut bottom = d.bottom.clone();
    loop {
        let pending: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.iter().enumerate().filter(|(_, q)| q.is_some()).map(move |(i, _)| (j, i)))
            .collect();
        let choices = pending.len() + usize::from(bottom.is_some());
        if choices == 0 {
            break;
        }
        let pick = rng.gen_range(0..choices);
        if pick == pending.len() {
            let p = bottom.take().expect("counted");
            let v = target.left(&p, &values)?;
            values = vec![v];
            slots = vec![slots.concat()];
        } else {
            let (j, i) = pending[pick];
            let q = slots[j][i].take().expect("pending");
            values[j] = target.right(&values[j], i + 1, &q)?;
            let filled = vec![None; q.arity()];
            slots[j].splice(i..=i, filled);
        }
    }
    if values.len() != 1 {
        return Err(Error::domain("assembly left several pieces"));
    }
    Ok(values.pop().expect("one value"))
}

impl<P: Operad> LambdaSequence for BBimodule<P> {
    type Elem = BPoint<P::Elem>;

    fn arity(&self, b: &Self::Elem) -> usize {
        b.arity()
    }

    fn act(&self, u: &InjectiveMap, b: &Self::Elem) -> Result<Self::Elem> {
        let raw = b.delete_leaves_with(u, |_, l, kept| {
            Ok(BLabel { w: self.w.act(kept, &l.w)?, height: l.height.clone() })
        })?;
        self.normalize(&raw)
    }
}

impl<P: Operad> Bimodule for BBimodule<P> {
    type Over = WOperad<P>;

    fn operad(&self) -> &WOperad<P> {
        &self.w
    }

    fn name(&self) -> String {
        format!("B({})", self.w.base.name())
    }

    fn left(&self, p: &WPoint<P::Elem>, args: &[Self::Elem]) -> Result<Self::Elem> {
        if p.arity() != args.len() {
            return Err(arity_error(p.arity(), args.len()));
        }
        if p.is_trivial() {
            return Ok(args[0].clone());
        }
        // a new root at height 0 above which the arguments sit side by side
        let mut offset = 0;
        let mut children = Vec::with_capacity(args.len());
        for a in args {
            let mut a = a.clone();
            let shift = offset;
            a.map_leaves(|k| k + shift);
            offset += a.arity();
            children.push(match a {
                Tree::Trivial => Child::Leaf(shift + 1),
                Tree::Rooted(n) => Child::Inner((), Box::new(n)),
            });
        }
        let root = Node { deco: BLabel { w: p.clone(), height: Rational::zero() }, children };
        self.normalize(&Tree::Rooted(root))
    }

    fn right(&self, m: &Self::Elem, i: usize, p: &WPoint<P::Elem>) -> Result<Self::Elem> {
        if i == 0 || i > m.arity() {
            return Err(Error::arity(format!("right action at input {i} of an arity-{} point", m.arity())));
        }
        let top = self.vertex(p.clone(), Rational::one());
        self.normalize(&m.graft(i, &top, ())?)
    }

    fn validate(&self, b: &Self::Elem) -> Result<()> {
        self.check_raw(b)?;
        if let Some(step) = self.steps(b).first() {
            return Err(Error::invariant("normal form", format!("`{step}` still applies")));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem {
        let raw = self.sample_raw(rng, arity);
        self.normalize(&raw).expect("sampled points are well formed")
    }

    fn encode(&self, b: &Self::Elem) -> String {
        self.to_text(b)
    }
}
