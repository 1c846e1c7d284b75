//! Folding decorated trees into an operad.
//!
//! A tree whose vertices are sent to elements of an operad `Q` (of matching
//! arity) evaluates to the iterated composite. The composite is first formed
//! with inputs in planar leaf order and then relabeled so that input `k` is
//! the leaf numbered `k`.

use rand::{Rng, RngCore};

use super::Operad;
use crate::error::{Error, Result};
use crate::trees::{Child, Node, Tree, VertexId};

/// Evaluates `tree` in `q`, sending each vertex to `vertex(id, node)`.
pub fn evaluate_tree<Q: Operad, V, E>(
    q: &Q,
    tree: &Tree<V, E>,
    mut vertex: impl FnMut(&VertexId, &Node<V, E>) -> Result<Q::Elem>,
) -> Result<Q::Elem> {
    match tree {
        Tree::Trivial => Ok(q.unit()),
        Tree::Rooted(root) => {
            let planar = planar_value(q, root, &mut Vec::new(), &mut vertex)?;
            q.act(&tree.leaf_positions(), &planar)
        }
    }
}

/// Composite of a rooted tree with inputs in planar leaf order.
pub fn planar_value<Q: Operad, V, E>(
    q: &Q,
    node: &Node<V, E>,
    path: &mut VertexId,
    vertex: &mut impl FnMut(&VertexId, &Node<V, E>) -> Result<Q::Elem>,
) -> Result<Q::Elem> {
    let mut acc = vertex(path, node)?;
    if q.arity(&acc) != node.arity() {
        return Err(Error::arity(format!(
            "vertex {path:?} has {} inputs but its value has arity {}",
            node.arity(),
            q.arity(&acc)
        )));
    }
    for (j, c) in node.children.iter().enumerate().rev() {
        if let Child::Inner(_, sub) = c {
            path.push(j);
            let v = planar_value(q, sub, path, vertex)?;
            path.pop();
            acc = q.compose(&acc, j + 1, &v)?;
        }
    }
    Ok(acc)
}

/// Every inner edge as `(parent, slot)` with a 0-based slot.
pub fn inner_edges<V, E>(tree: &Tree<V, E>) -> Vec<(VertexId, usize)> {
    let mut out = Vec::new();
    for id in tree.planar_traversal() {
        let node = tree.node(&id).expect("traversal yields vertices");
        for (j, c) in node.children.iter().enumerate() {
            if matches!(c, Child::Inner(..)) {
                out.push((id.clone(), j));
            }
        }
    }
    out
}

/// Contracts the inner edge at `slot` of `parent`, composing the two labels.
pub fn contract_at<Q: Operad, E>(
    q: &Q,
    tree: &mut Tree<Q::Elem, E>,
    parent: &[usize],
    slot: usize,
) -> Result<()> {
    let Tree::Rooted(root) = tree else {
        return Err(Error::domain("the trivial tree has no edges"));
    };
    let node = root
        .at_mut(parent)
        .ok_or_else(|| Error::domain(format!("no vertex at {parent:?}")))?;
    if !matches!(node.children.get(slot), Some(Child::Inner(..))) {
        return Err(Error::domain(format!("slot {slot} of {parent:?} is not an inner edge")));
    }
    let Child::Inner(_, child) = node.children.remove(slot) else {
        unreachable!()
    };
    node.deco = q.compose(&node.deco, slot + 1, &child.deco)?;
    let tail = node.children.split_off(slot);
    node.children.extend(child.children);
    node.children.extend(tail);
    Ok(())
}

/// Evaluates a tree already decorated in `q` by contracting its inner edges
/// one at a time in a random order.
pub fn evaluate_by_random_contraction<Q: Operad, E>(
    q: &Q,
    mut tree: Tree<Q::Elem, E>,
    rng: &mut dyn RngCore,
) -> Result<Q::Elem> {
    let sigma = tree.leaf_positions();
    loop {
        let edges = inner_edges(&tree);
        if edges.is_empty() {
            break;
        }
        let (parent, slot) = &edges[rng.gen_range(0..edges.len())];
        contract_at(q, &mut tree, parent, *slot)?;
    }
    match tree {
        Tree::Trivial => Ok(q.unit()),
        Tree::Rooted(root) => q.act(&sigma, &root.deco),
    }
}
