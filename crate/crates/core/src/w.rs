//! The Boardman–Vogt resolution `W𝒫`.
//!
//! A point is a tree whose vertices carry elements of `𝒫` and whose inner
//! edges carry lengths in `[0,1]`, up to three relations: an edge of length 0
//! is contracted by composing in `𝒫`, a unary vertex labeled by the unit is
//! removed (its two edges merge, keeping the larger length), and permuting
//! the inputs of a vertex is the same as acting on its label.
//!
//! The normal form contracts every 0-edge, removes every unit vertex, and
//! orders the children of each vertex by their smallest leaf number. That
//! ordering gives the lexicographically least leaf word among all planar
//! presentations, and the labels are then determined.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, RngCore};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operads::eval::{contract_at, evaluate_by_random_contraction, evaluate_tree};
use crate::operads::{check_compose_index, json_array, json_str, LambdaSequence, Operad};
use crate::rational::Rational;
use crate::sample::{decorate, random_shape, shuffle_leaves};
use crate::text::{offset_error, parse_tree, write_tree, Parser, TreeSyntax};
use crate::trees::{Child, InjectiveMap, Node, Tree, VertexId};

pub type WPoint<A> = Tree<A, Rational>;

/// One rewriting step towards the normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WStep {
    /// Contract the 0-edge in `slot` (0-based) of the vertex `parent`.
    Contract { parent: VertexId, slot: usize },
    /// Remove the unary unit-labeled vertex.
    RemoveUnit { vertex: VertexId },
    /// Reorder the children of the vertex by smallest leaf.
    Sort { vertex: VertexId },
}

impl fmt::Display for WStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WStep::Contract { parent, slot } => write!(f, "contract {parent:?}/{slot}"),
            WStep::RemoveUnit { vertex } => write!(f, "remove unit {vertex:?}"),
            WStep::Sort { vertex } => write!(f, "sort {vertex:?}"),
        }
    }
}

/// Prime components of a point, and how they graft back together.
///
/// Component leaves are numbered in planar order. The skeleton has one
/// vertex per component (decorated by its index in `components`) whose
/// children follow the component's leaves; its leaves carry the external
/// numbering of the original point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WDecomposition<A> {
    pub components: Vec<WPoint<A>>,
    pub skeleton: Tree<usize, ()>,
}

#[derive(Clone, Debug)]
pub struct WOperad<P> {
    pub base: P,
    pub max_depth: usize,
    /// Probability that a sampled unary vertex is labeled by the unit.
    pub unit_rate: f64,
}

impl<P: Operad> WOperad<P> {
    pub fn new(base: P) -> Self {
        WOperad { base, max_depth: 3, unit_rate: 0.3 }
    }

    /// The corolla on `a`, in normal form.
    pub fn corolla(&self, a: P::Elem) -> WPoint<P::Elem> {
        if self.base.is_unit(&a) {
            return Tree::Trivial;
        }
        let n = self.base.arity(&a);
        Tree::corolla(a, n)
    }

    /// Well-formedness of a possibly unnormalized point.
    pub fn check_raw(&self, a: &WPoint<P::Elem>) -> Result<()> {
        a.check_leaf_labeling()?;
        for id in a.planar_traversal() {
            let node = a.node(&id).expect("traversal yields vertices");
            if self.base.arity(&node.deco) != node.arity() {
                return Err(Error::arity(format!(
                    "vertex {id:?} has {} inputs but a label of arity {}",
                    node.arity(),
                    self.base.arity(&node.deco)
                )));
            }
            self.base.validate(&node.deco)?;
            for c in &node.children {
                if let Child::Inner(t, _) = c {
                    if !t.in_unit_interval() {
                        return Err(Error::domain(format!("edge length {t} outside [0, 1]")));
                    }
                }
            }
        }
        Ok(())
    }

    /// All rewriting steps applicable to `a`.
    pub fn steps(&self, a: &WPoint<P::Elem>) -> Vec<WStep> {
        let mut out = Vec::new();
        for id in a.planar_traversal() {
            let node = a.node(&id).expect("traversal yields vertices");
            for (j, c) in node.children.iter().enumerate() {
                if let Child::Inner(t, _) = c {
                    if t.is_zero() {
                        out.push(WStep::Contract { parent: id.clone(), slot: j });
                    }
                }
            }
            if node.arity() == 1 && self.base.is_unit(&node.deco) {
                out.push(WStep::RemoveUnit { vertex: id.clone() });
            }
            if !children_sorted(node) {
                out.push(WStep::Sort { vertex: id });
            }
        }
        out
    }

    pub fn apply_step(&self, a: &WPoint<P::Elem>, step: &WStep) -> Result<WPoint<P::Elem>> {
        let mut t = a.clone();
        match step {
            WStep::Contract { parent, slot } => contract_at(&self.base, &mut t, parent, *slot)?,
            WStep::RemoveUnit { vertex } => t = remove_unary(t, vertex, |s, t| s.clone().max(t.clone()))?,
            WStep::Sort { vertex } => {
                let Tree::Rooted(root) = &mut t else {
                    return Err(Error::domain("the trivial tree has no vertices"));
                };
                let node = root
                    .at_mut(vertex)
                    .ok_or_else(|| Error::domain(format!("no vertex at {vertex:?}")))?;
                let pi = sorting_permutation(node);
                node.deco = self.base.act(&pi, &node.deco)?;
                permute_children(node, &pi);
            }
        }
        Ok(t)
    }

    /// Rewrites until no step applies, letting `choose` pick among the
    /// applicable steps.
    pub fn normalize_in_order(
        &self,
        a: &WPoint<P::Elem>,
        choose: &mut dyn FnMut(usize) -> usize,
    ) -> Result<WPoint<P::Elem>> {
        self.check_raw(a)?;
        let mut t = a.clone();
        loop {
            let steps = self.steps(&t);
            if steps.is_empty() {
                return Ok(t);
            }
            let k = choose(steps.len());
            t = self.apply_step(&t, &steps[k])?;
        }
    }

    pub fn normalize(&self, a: &WPoint<P::Elem>) -> Result<WPoint<P::Elem>> {
        self.normalize_in_order(a, &mut |_| 0)
    }

    pub fn is_normal(&self, a: &WPoint<P::Elem>) -> bool {
        self.steps(a).is_empty()
    }

    /// `μ`: every length is set to 0 and the whole tree is contracted.
    pub fn mu(&self, a: &WPoint<P::Elem>) -> Result<P::Elem> {
        evaluate_tree(&self.base, a, |_, n| Ok(n.deco.clone()))
    }

    /// Cuts every edge of length 1.
    pub fn decompose(&self, a: &WPoint<P::Elem>) -> WDecomposition<P::Elem> {
        let mut components = Vec::new();
        let skeleton = match a {
            Tree::Trivial => Tree::Trivial,
            Tree::Rooted(root) => Tree::Rooted(cut_component(root, &mut components)),
        };
        WDecomposition { components, skeleton }
    }

    /// Grafts the components back with edges of length 1.
    pub fn regraft(&self, d: &WDecomposition<P::Elem>) -> Result<WPoint<P::Elem>> {
        evaluate_tree(self, &d.skeleton, |_, n| {
            d.components
                .get(n.deco)
                .cloned()
                .ok_or_else(|| Error::domain(format!("no component {}", n.deco)))
        })
    }

    /// The least `k` with `a` in `W𝒫ₖ`: the largest leaf count of a prime
    /// component (0 for the unit).
    pub fn filtration_level(&self, a: &WPoint<P::Elem>) -> usize {
        self.decompose(a)
            .components
            .iter()
            .map(|c| c.arity())
            .max()
            .unwrap_or(0)
    }

    /// Extends an assignment `f` on prime points with at most `k` leaves to
    /// `W𝒫ₖ`, by evaluating `f` on the prime components and composing in
    /// `q`. With `rng`, the composites are formed in a random order.
    pub fn eval_truncated<Q: Operad>(
        &self,
        q: &Q,
        k: usize,
        a: &WPoint<P::Elem>,
        f: &dyn Fn(&WPoint<P::Elem>) -> Result<Q::Elem>,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<Q::Elem> {
        let d = self.decompose(a);
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
        match rng {
            None => evaluate_tree(q, &d.skeleton, |_, n| Ok(values[n.deco].clone())),
            Some(rng) => {
                let tree = d.skeleton.try_map(|&i| Ok(values[i].clone()), |_| Ok(()))?;
                evaluate_by_random_contraction(q, tree, rng)
            }
        }
    }

    /// A random, usually unnormalized, point with `n` leaves.
    pub fn sample_raw(&self, rng: &mut dyn RngCore, n: usize) -> WPoint<P::Elem> {
        let shape = random_shape(rng, n, self.max_depth);
        let base = &self.base;
        let unit_rate = self.unit_rate;
        let mut t = decorate(
            &shape,
            rng,
            &mut |rng, r| {
                if r == 1 && rng.gen_bool(unit_rate) {
                    base.unit()
                } else {
                    base.sample(rng, r)
                }
            },
            &mut |rng| random_length(rng),
        );
        shuffle_leaves(&mut t, rng);
        t
    }

    pub fn to_text(&self, a: &WPoint<P::Elem>) -> String {
        write_tree(
            a,
            &|d| format!("[{}]", self.base.encode(d)),
            &|_| String::new(),
            &|t| format!(":t={t}"),
        )
    }

    /// Parses the text form and normalizes. A decoration is either `[..]`,
    /// decoded by the base operad, or `$name`, looked up in `registry`.
    pub fn parse_with(&self, text: &str, registry: &BTreeMap<String, P::Elem>) -> Result<WPoint<P::Elem>> {
        let mut p = Parser::new(text);
        let raw = self.parse_raw(&mut p, registry)?;
        p.finish()?;
        self.normalize(&raw)
    }

    pub(crate) fn parse_raw(
        &self,
        p: &mut Parser,
        registry: &BTreeMap<String, P::Elem>,
    ) -> Result<WPoint<P::Elem>> {
        let base = &self.base;
        let mut deco = |p: &mut Parser| -> Result<P::Elem> {
            if p.eat("$") {
                let name = p.ident()?;
                return registry
                    .get(name)
                    .cloned()
                    .ok_or_else(|| p.error(format!("unknown decoration `{name}`")));
            }
            let (start, inner) = p.balanced('[', ']')?;
            base.decode(inner).map_err(|e| offset_error(e, start))
        };
        let mut suffix = |_: &mut Parser, _: &mut P::Elem| Ok(());
        let mut edge = |p: &mut Parser| -> Result<Rational> {
            p.expect(":t=")?;
            p.rational()
        };
        parse_tree(p, &mut TreeSyntax { deco: &mut deco, node_suffix: &mut suffix, edge: &mut edge })
    }

    fn node_json(&self, n: &Node<P::Elem, Rational>) -> Value {
        let children: Vec<Value> = n
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(k) => json!({ "leaf": k }),
                Child::Inner(t, sub) => json!({ "length": t.to_string(), "root": self.node_json(sub) }),
            })
            .collect();
        json!({ "label": self.base.to_json(&n.deco), "children": children })
    }

    fn node_from_json(&self, v: &Value) -> Result<Node<P::Elem, Rational>> {
        let deco = self.base.from_json(field(v, "label")?)?;
        let children = json_array(field(v, "children")?)?
            .iter()
            .map(|c| {
                if let Some(k) = c.get("leaf") {
                    let k = k.as_u64().ok_or_else(|| parse_err("leaf numbers are integers"))?;
                    Ok(Child::Leaf(k as usize))
                } else {
                    let t: Rational = json_str(field(c, "length")?)?.parse()?;
                    Ok(Child::Inner(t, Box::new(self.node_from_json(field(c, "root")?)?)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Node { deco, children })
    }
}

pub(crate) fn field<'v>(v: &'v Value, name: &str) -> Result<&'v Value> {
    v.get(name).ok_or_else(|| parse_err(format!("missing field `{name}`")))
}

pub(crate) fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse { position: 0, message: message.into() }
}

pub(crate) fn random_length(rng: &mut dyn RngCore) -> Rational {
    Rational::new(rng.gen_range(0..=4), 4)
}

pub(crate) fn children_sorted<V, E>(node: &Node<V, E>) -> bool {
    node.children.windows(2).all(|w| w[0].min_leaf() < w[1].min_leaf())
}

/// `π` with `π(j)` = the old slot of the child that comes `j`-th after sorting.
pub(crate) fn sorting_permutation<V, E>(node: &Node<V, E>) -> InjectiveMap {
    let mut idx: Vec<usize> = (1..=node.arity()).collect();
    idx.sort_by_key(|&j| node.children[j - 1].min_leaf());
    InjectiveMap::new(idx, node.arity()).expect("a reordering is a permutation")
}

pub(crate) fn permute_children<V, E>(node: &mut Node<V, E>, pi: &InjectiveMap) {
    let mut old: Vec<Option<Child<V, E>>> = node.children.drain(..).map(Some).collect();
    node.children = pi
        .values()
        .iter()
        .map(|&j| old[j - 1].take().expect("each slot used once"))
        .collect();
}

/// Removes a unary vertex, merging its incoming and outgoing edges with
/// `merge(incoming, outgoing)`.
pub(crate) fn remove_unary<V, E: Clone>(
    tree: Tree<V, E>,
    vertex: &[usize],
    merge: impl Fn(&E, &E) -> E,
) -> Result<Tree<V, E>> {
    let Tree::Rooted(mut root) = tree else {
        return Err(Error::domain("the trivial tree has no vertices"));
    };
    let Some((&slot, parent)) = vertex.split_last() else {
        if root.arity() != 1 {
            return Err(Error::domain("only unary vertices can be removed"));
        }
        return Ok(match root.children.pop().expect("unary") {
            Child::Leaf(_) => Tree::Trivial,
            Child::Inner(_, n) => Tree::Rooted(*n),
        });
    };
    let p = root
        .at_mut(parent)
        .ok_or_else(|| Error::domain(format!("no vertex at {parent:?}")))?;
    let replacement = match &mut p.children[slot] {
        Child::Leaf(_) => return Err(Error::domain(format!("no vertex at {vertex:?}"))),
        Child::Inner(s, v) => {
            if v.arity() != 1 {
                return Err(Error::domain("only unary vertices can be removed"));
            }
            match v.children.pop().expect("unary") {
                Child::Leaf(k) => Child::Leaf(k),
                Child::Inner(t, w) => Child::Inner(merge(s, &t), w),
            }
        }
    };
    p.children[slot] = replacement;
    Ok(Tree::Rooted(root))
}

fn cut_component<A: Clone>(root: &Node<A, Rational>, components: &mut Vec<WPoint<A>>) -> Node<usize, ()> {
    let idx = components.len();
    components.push(Tree::Trivial);
    let mut skeleton_children = Vec::new();
    let mut counter = 0;
    let comp = copy_until_cut(root, components, &mut skeleton_children, &mut counter);
    components[idx] = Tree::Rooted(comp);
    Node { deco: idx, children: skeleton_children }
}

fn copy_until_cut<A: Clone>(
    node: &Node<A, Rational>,
    components: &mut Vec<WPoint<A>>,
    skeleton_children: &mut Vec<Child<usize, ()>>,
    counter: &mut usize,
) -> Node<A, Rational> {
    let children = node
        .children
        .iter()
        .map(|c| match c {
            Child::Leaf(k) => {
                *counter += 1;
                skeleton_children.push(Child::Leaf(*k));
                Child::Leaf(*counter)
            }
            Child::Inner(t, sub) if t.is_one() => {
                *counter += 1;
                let s = cut_component(sub, components);
                skeleton_children.push(Child::Inner((), Box::new(s)));
                Child::Leaf(*counter)
            }
            Child::Inner(t, sub) => {
                Child::Inner(t.clone(), Box::new(copy_until_cut(sub, components, skeleton_children, counter)))
            }
        })
        .collect();
    Node { deco: node.deco.clone(), children }
}

impl<P: Operad> LambdaSequence for WOperad<P> {
    type Elem = WPoint<P::Elem>;

    fn arity(&self, a: &Self::Elem) -> usize {
        a.arity()
    }

    fn act(&self, u: &InjectiveMap, a: &Self::Elem) -> Result<Self::Elem> {
        let raw = a.delete_leaves_with(u, |_, deco, kept| self.base.act(kept, deco))?;
        self.normalize(&raw)
    }
}

impl<P: Operad> Operad for WOperad<P> {
    fn name(&self) -> String {
        format!("W({})", self.base.name())
    }

    fn unit(&self) -> Self::Elem {
        Tree::Trivial
    }

    fn compose(&self, a: &Self::Elem, i: usize, b: &Self::Elem) -> Result<Self::Elem> {
        check_compose_index(a.arity(), i)?;
        self.normalize(&a.graft(i, b, Rational::one())?)
    }

    fn validate(&self, a: &Self::Elem) -> Result<()> {
        self.check_raw(a)?;
        if let Some(step) = self.steps(a).first() {
            return Err(Error::invariant("normal form", format!("`{step}` still applies")));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem {
        let raw = self.sample_raw(rng, arity);
        self.normalize(&raw).expect("sampled points are well formed")
    }

    fn encode(&self, a: &Self::Elem) -> String {
        self.to_text(a)
    }

    fn decode(&self, s: &str) -> Result<Self::Elem> {
        self.parse_with(s, &BTreeMap::new())
    }

    fn to_json(&self, a: &Self::Elem) -> Value {
        match a {
            Tree::Trivial => json!({ "leaf": 1 }),
            Tree::Rooted(n) => json!({ "root": self.node_json(n) }),
        }
    }

    fn from_json(&self, v: &Value) -> Result<Self::Elem> {
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
}

/// Random reduction order for confluence checks.
pub fn random_chooser(rng: &mut dyn RngCore) -> impl FnMut(usize) -> usize + '_ {
    move |n| rng.gen_range(0..n)
}

/// All planar presentations of a point obtained by permuting children at
/// every vertex (with the matching relabeling), for brute-force checks.
pub fn planar_presentations<P: Operad>(w: &WOperad<P>, a: &WPoint<P::Elem>) -> Result<Vec<WPoint<P::Elem>>> {
    let mut out = vec![a.clone()];
    // children before parents, so that permuting never moves an unvisited vertex
    for id in a.planar_traversal().into_iter().rev() {
        let mut next = Vec::new();
        for t in &out {
            let node = t.node(&id).expect("shape is preserved");
            for pi in InjectiveMap::all_permutations(node.arity()) {
                let mut t2 = t.clone();
                if let Tree::Rooted(root) = &mut t2 {
                    let n = root.at_mut(&id).expect("shape is preserved");
                    n.deco = w.base.act(&pi, &n.deco)?;
                    permute_children(n, &pi);
                }
                next.push(t2);
            }
        }
        out = next;
    }
    Ok(out)
}
