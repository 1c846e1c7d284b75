//! Planar rooted trees with numbered leaves.
//!
//! A [`Tree`] is either the trivial tree (a single leaf, no vertex) or a
//! rooted tree of [`Node`]s. Each node carries a decoration `V` and an ordered
//! list of child slots; a slot is either an external leaf carrying its
//! external number, or an inner edge with decoration `E` leading to another
//! node. Reading the leaf numbers left to right gives the leaf labeling, a
//! permutation of `1..n`.
//!
//! Trees compare structurally. Vertex identifiers ([`VertexId`]) are paths of
//! child-slot indices from the root and carry no semantics of their own.

mod injective;

pub use injective::InjectiveMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path of 0-based child-slot indices from the root.
pub type VertexId = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tree<V, E> {
    Trivial,
    Rooted(Node<V, E>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Node<V, E> {
    pub deco: V,
    pub children: Vec<Child<V, E>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Child<V, E> {
    Leaf(usize),
    Inner(E, Box<Node<V, E>>),
}

/// Per-vertex record of a leaf deletion: the order-preserving injection of
/// surviving child slots into the original ones, keyed by the vertex's path in
/// the original tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionLedger {
    pub entries: Vec<(VertexId, InjectiveMap)>,
}

impl DeletionLedger {
    /// Entries in which some slot was actually deleted.
    pub fn lossy(&self) -> impl Iterator<Item = &(VertexId, InjectiveMap)> {
        self.entries.iter().filter(|(_, kept)| !kept.is_identity())
    }

    pub fn is_empty(&self) -> bool {
        self.lossy().next().is_none()
    }
}

impl<V, E> Node<V, E> {
    pub fn corolla(deco: V, arity: usize) -> Self {
        Node {
            deco,
            children: (1..=arity).map(Child::Leaf).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                Child::Leaf(_) => 1,
                Child::Inner(_, n) => n.leaf_count(),
            })
            .sum()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(_) => 0,
                Child::Inner(_, n) => n.vertex_count(),
            })
            .sum::<usize>()
    }

    pub fn leaf_word_into(&self, out: &mut Vec<usize>) {
        for c in &self.children {
            match c {
                Child::Leaf(k) => out.push(*k),
                Child::Inner(_, n) => n.leaf_word_into(out),
            }
        }
    }

    pub fn min_leaf(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.min_leaf())
            .min()
            .expect("nodes have at least one slot")
    }

    pub fn map_leaves(&mut self, f: &mut impl FnMut(usize) -> usize) {
        for c in &mut self.children {
            match c {
                Child::Leaf(k) => *k = f(*k),
                Child::Inner(_, n) => n.map_leaves(f),
            }
        }
    }

    pub fn try_map<V2, E2>(
        &self,
        fv: &mut impl FnMut(&V) -> Result<V2>,
        fe: &mut impl FnMut(&E) -> Result<E2>,
    ) -> Result<Node<V2, E2>> {
        let deco = fv(&self.deco)?;
        let children = self
            .children
            .iter()
            .map(|c| {
                Ok(match c {
                    Child::Leaf(k) => Child::Leaf(*k),
                    Child::Inner(e, n) => Child::Inner(fe(e)?, Box::new(n.try_map(fv, fe)?)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Node { deco, children })
    }

    fn traverse(&self, path: &mut VertexId, out: &mut Vec<VertexId>) {
        out.push(path.clone());
        for (j, c) in self.children.iter().enumerate() {
            if let Child::Inner(_, n) = c {
                path.push(j);
                n.traverse(path, out);
                path.pop();
            }
        }
    }

    pub fn at(&self, id: &[usize]) -> Option<&Node<V, E>> {
        match id.split_first() {
            None => Some(self),
            Some((j, rest)) => match self.children.get(*j)? {
                Child::Inner(_, n) => n.at(rest),
                Child::Leaf(_) => None,
            },
        }
    }

    pub fn at_mut(&mut self, id: &[usize]) -> Option<&mut Node<V, E>> {
        match id.split_first() {
            None => Some(self),
            Some((j, rest)) => match self.children.get_mut(*j)? {
                Child::Inner(_, n) => n.at_mut(rest),
                Child::Leaf(_) => None,
            },
        }
    }

    /// Replace the slot holding leaf `label` with `replacement`; returns false
    /// when no such leaf exists below this node.
    fn replace_leaf(&mut self, label: usize, replacement: &mut Option<Child<V, E>>) -> bool {
        for c in &mut self.children {
            match c {
                Child::Leaf(k) if *k == label => {
                    *c = replacement.take().expect("replacement consumed once");
                    return true;
                }
                Child::Leaf(_) => {}
                Child::Inner(_, n) => {
                    if n.replace_leaf(label, replacement) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

impl<V, E> Child<V, E> {
    pub fn min_leaf(&self) -> usize {
        match self {
            Child::Leaf(k) => *k,
            Child::Inner(_, n) => n.min_leaf(),
        }
    }
}

impl<V, E> Tree<V, E> {
    pub fn corolla(deco: V, arity: usize) -> Self {
        Tree::Rooted(Node::corolla(deco, arity))
    }

    pub fn root(&self) -> Option<&Node<V, E>> {
        match self {
            Tree::Trivial => None,
            Tree::Rooted(n) => Some(n),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Tree::Trivial)
    }

    /// Number of leaves.
    pub fn arity(&self) -> usize {
        match self {
            Tree::Trivial => 1,
            Tree::Rooted(n) => n.leaf_count(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.root().map_or(0, Node::vertex_count)
    }

    /// External leaf numbers in planar left-to-right order.
    pub fn leaf_word(&self) -> Vec<usize> {
        match self {
            Tree::Trivial => vec![1],
            Tree::Rooted(n) => {
                let mut out = Vec::new();
                n.leaf_word_into(&mut out);
                out
            }
        }
    }

    /// Checks that the leaf labeling is a permutation of `1..n`.
    pub fn check_leaf_labeling(&self) -> Result<()> {
        let mut word = self.leaf_word();
        word.sort_unstable();
        if word.iter().enumerate().all(|(p, &k)| k == p + 1) {
            Ok(())
        } else {
            Err(Error::invariant(
                "leaf labeling is a permutation",
                format!("leaves read {:?}", self.leaf_word()),
            ))
        }
    }

    /// The permutation σ with σ(k) = planar position of leaf `k`.
    pub fn leaf_positions(&self) -> InjectiveMap {
        let word = self.leaf_word();
        let mut pos = vec![0; word.len()];
        for (p, &k) in word.iter().enumerate() {
            pos[k - 1] = p + 1;
        }
        InjectiveMap::new(pos, word.len()).expect("leaf labeling is a permutation")
    }

    /// Depth-first, left-to-right order of vertices.
    pub fn planar_traversal(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        if let Tree::Rooted(n) = self {
            n.traverse(&mut Vec::new(), &mut out);
        }
        out
    }

    pub fn node(&self, id: &[usize]) -> Option<&Node<V, E>> {
        self.root()?.at(id)
    }

    pub fn map_leaves(&mut self, mut f: impl FnMut(usize) -> usize) {
        if let Tree::Rooted(n) = self {
            n.map_leaves(&mut f);
        }
    }

    pub fn try_map<V2, E2>(
        &self,
        mut fv: impl FnMut(&V) -> Result<V2>,
        mut fe: impl FnMut(&E) -> Result<E2>,
    ) -> Result<Tree<V2, E2>> {
        Ok(match self {
            Tree::Trivial => Tree::Trivial,
            Tree::Rooted(n) => Tree::Rooted(n.try_map(&mut fv, &mut fe)?),
        })
    }
}

impl<V: Clone, E: Clone> Tree<V, E> {
    /// Graft `guest` onto the leaf numbered `leaf` of `self`, with the usual
    /// operadic renumbering: the guest's leaves take the numbers
    /// `leaf..leaf+m-1`, later host leaves shift up by `m-1`.
    pub fn graft(&self, leaf: usize, guest: &Tree<V, E>, edge: E) -> Result<Tree<V, E>> {
        let n = self.arity();
        if leaf == 0 || leaf > n {
            return Err(Error::arity(format!("cannot graft at leaf {leaf} of a {n}-leaf tree")));
        }
        let m = guest.arity();
        let mut guest = guest.clone();
        guest.map_leaves(|k| k + leaf - 1);
        let mut host = self.clone();
        host.map_leaves(|k| match k.cmp(&leaf) {
            std::cmp::Ordering::Less => k,
            std::cmp::Ordering::Equal => k,
            std::cmp::Ordering::Greater => k + m - 1,
        });
        match (host, guest) {
            (Tree::Trivial, g) => Ok(g),
            (h, Tree::Trivial) => Ok(h),
            (Tree::Rooted(mut h), Tree::Rooted(g)) => {
                let mut repl = Some(Child::Inner(edge, Box::new(g)));
                let found = h.replace_leaf(leaf, &mut repl);
                debug_assert!(found);
                Ok(Tree::Rooted(h))
            }
        }
    }

    /// Delete the leaves outside the image of `u: [m] -> [n]` and renumber the
    /// survivors (`u(j)` becomes `j`). Vertices left without inputs are
    /// removed together with their inner edge. `restrict` receives each
    /// surviving vertex's decoration and the injection of its surviving slots.
    pub fn delete_leaves_with<V2>(
        &self,
        u: &InjectiveMap,
        mut restrict: impl FnMut(&VertexId, &V, &InjectiveMap) -> Result<V2>,
    ) -> Result<Tree<V2, E>> {
        let n = self.arity();
        if u.codomain() != n {
            return Err(Error::arity(format!(
                "injection into [{}] applied to a tree with {n} leaves",
                u.codomain()
            )));
        }
        match self {
            Tree::Trivial => Ok(Tree::Trivial),
            Tree::Rooted(root) => {
                let out = delete_rec(root, u, &mut Vec::new(), &mut restrict)?;
                Ok(Tree::Rooted(out.expect("an injection keeps at least one leaf")))
            }
        }
    }

    /// Tree-level deletion: returns the pruned tree and the ledger of deleted
    /// slots per vertex.
    pub fn delete_leaves(&self, u: &InjectiveMap) -> Result<(Tree<V, E>, DeletionLedger)> {
        let mut entries = Vec::new();
        let tree = self.delete_leaves_with(u, |id, v, kept| {
            entries.push((id.clone(), kept.clone()));
            Ok(v.clone())
        })?;
        Ok((tree, DeletionLedger { entries }))
    }
}

fn delete_rec<V, V2, E: Clone>(
    node: &Node<V, E>,
    u: &InjectiveMap,
    path: &mut VertexId,
    restrict: &mut impl FnMut(&VertexId, &V, &InjectiveMap) -> Result<V2>,
) -> Result<Option<Node<V2, E>>> {
    let mut kept_slots = Vec::new();
    let mut children = Vec::new();
    for (j, c) in node.children.iter().enumerate() {
        match c {
            Child::Leaf(k) => {
                if let Some(newk) = u.preimage(*k) {
                    kept_slots.push(j + 1);
                    children.push(Child::Leaf(newk));
                }
            }
            Child::Inner(e, sub) => {
                path.push(j);
                let r = delete_rec(sub, u, path, restrict)?;
                path.pop();
                if let Some(sub) = r {
                    kept_slots.push(j + 1);
                    children.push(Child::Inner(e.clone(), Box::new(sub)));
                }
            }
        }
    }
    if kept_slots.is_empty() {
        return Ok(None);
    }
    let kept = InjectiveMap::new(kept_slots, node.arity())?;
    let deco = restrict(path, &node.deco, &kept)?;
    Ok(Some(Node { deco, children }))
}

#[cfg(test)]
mod tests {
    use super::*;

    type T = Tree<&'static str, ()>;

    fn c2(name: &'static str) -> T {
        Tree::corolla(name, 2)
    }

    #[test]
    fn graft_two_corollas() {
        let t = c2("a").graft(1, &c2("b"), ()).unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.leaf_word(), vec![1, 2, 3]);
        assert_eq!(t.vertex_count(), 2);
    }

    #[test]
    fn graft_onto_unary_corolla() {
        let t = c2("a").graft(2, &c2("b"), ()).unwrap();
        let u = Tree::corolla("u", 1).graft(1, &t, ()).unwrap();
        assert_eq!(u.vertex_count(), 3);
        assert_eq!(u.leaf_word(), t.leaf_word());
        match &u {
            Tree::Rooted(n) => assert_eq!(n.arity(), 1),
            _ => unreachable!(),
        }
    }

    /// Independent oracle: leaf positions after grafting computed from the
    /// block substitution of permutations.
    fn oracle_graft_word(host: &[usize], leaf: usize, guest: &[usize]) -> Vec<usize> {
        let m = guest.len();
        let mut out = Vec::new();
        for &k in host {
            if k == leaf {
                out.extend(guest.iter().map(|g| g + leaf - 1));
            } else if k > leaf {
                out.push(k + m - 1);
            } else {
                out.push(k);
            }
        }
        out
    }

    #[test]
    fn graft_twisted_host() {
        let mut host = c2("a");
        host.map_leaves(|k| 3 - k); // labeling (2 1)
        let t = host.graft(1, &c2("b"), ()).unwrap();
        assert_eq!(t.leaf_word(), oracle_graft_word(&[2, 1], 1, &[1, 2]));
        assert_eq!(t.leaf_word(), vec![3, 1, 2]);
    }

    #[test]
    fn graft_rejects_bad_leaf() {
        assert!(c2("a").graft(3, &c2("b"), ()).is_err());
        assert!(c2("a").graft(0, &c2("b"), ()).is_err());
    }

    #[test]
    fn delete_identity_is_noop() {
        let t = c2("a").graft(1, &c2("b"), ()).unwrap();
        let (d, ledger) = t.delete_leaves(&InjectiveMap::identity(3)).unwrap();
        assert_eq!(d, t);
        assert!(ledger.is_empty());
    }

    #[test]
    fn delete_one_leaf_of_corolla() {
        let u = InjectiveMap::new(vec![2], 2).unwrap();
        let (d, ledger) = c2("a").delete_leaves(&u).unwrap();
        assert_eq!(d, Tree::corolla("a", 1));
        let lossy: Vec<_> = ledger.lossy().collect();
        assert_eq!(lossy.len(), 1);
        assert_eq!(lossy[0].1.values(), &[2]);
    }

    #[test]
    fn delete_makes_lower_vertex_unary() {
        let t = c2("a").graft(1, &c2("b"), ()).unwrap();
        let u = InjectiveMap::new(vec![1, 3], 3).unwrap();
        let (d, ledger) = t.delete_leaves(&u).unwrap();
        // Brute force over leaf positions: leaves 1 and 3 survive; leaf 2 sat
        // on the upper vertex, which keeps its first slot only.
        assert_eq!(d.leaf_word(), vec![1, 2]);
        assert_eq!(d.vertex_count(), 2);
        let lossy: Vec<_> = ledger.lossy().cloned().collect();
        assert_eq!(lossy, vec![(vec![0], InjectiveMap::new(vec![1], 2).unwrap())]);
    }

    #[test]
    fn delete_removes_empty_subtrees() {
        let t = c2("a").graft(1, &c2("b"), ()).unwrap();
        let u = InjectiveMap::new(vec![3], 3).unwrap();
        let (d, _) = t.delete_leaves(&u).unwrap();
        assert_eq!(d, Tree::corolla("a", 1));
    }

    #[test]
    fn traversal_orders() {
        assert_eq!(Tree::<&str, u8>::corolla("r", 1).planar_traversal(), vec![Vec::<usize>::new()]);
        let t = Tree::Rooted(Node {
            deco: "r",
            children: vec![
                Child::Inner((), Box::new(Node::corolla("a", 1))),
                Child::Inner((), Box::new(Node::corolla("b", 1))),
            ],
        });
        assert_eq!(t.planar_traversal(), vec![vec![], vec![0], vec![1]]);
        let names: Vec<_> = t
            .planar_traversal()
            .iter()
            .map(|id| t.node(id).unwrap().deco)
            .collect();
        assert_eq!(names, vec!["r", "a", "b"]);
    }
}
