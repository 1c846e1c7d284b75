//! Random tree shapes for the samplers.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::trees::{Child, InjectiveMap, Node, Tree};

/// A random planar shape with `n` leaves numbered `1..n` left to right. Each
/// vertex is decorated with its arity. Vertices have at most three inputs and
/// the tree has at most `max_depth` levels of vertices.
pub fn random_shape(rng: &mut dyn RngCore, n: usize, max_depth: usize) -> Tree<usize, ()> {
    assert!(n >= 1 && max_depth >= 1);
    let mut next = 1;
    Tree::Rooted(shape_node(rng, n, 1, max_depth, &mut next))
}

fn shape_node(rng: &mut dyn RngCore, n: usize, depth: usize, max_depth: usize, next: &mut usize) -> Node<usize, ()> {
    let r = if depth >= max_depth {
        n
    } else if n == 1 || rng.gen_bool(0.1) {
        1
    } else {
        rng.gen_range(2..=n.min(3))
    };
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    cuts.truncate(r - 1);
    cuts.sort_unstable();
    cuts.push(n);
    let mut children = Vec::with_capacity(r);
    let mut prev = 0;
    for c in cuts {
        let part = c - prev;
        prev = c;
        if part == 1 && (depth >= max_depth || rng.gen_bool(0.6)) {
            children.push(Child::Leaf(*next));
            *next += 1;
        } else {
            children.push(Child::Inner((), Box::new(shape_node(rng, part, depth + 1, max_depth, next))));
        }
    }
    Node { deco: r, children }
}

/// Replaces arity decorations and unit edge data with sampled values.
pub fn decorate<V, E>(
    shape: &Tree<usize, ()>,
    rng: &mut dyn RngCore,
    fv: &mut dyn FnMut(&mut dyn RngCore, usize) -> V,
    fe: &mut dyn FnMut(&mut dyn RngCore) -> E,
) -> Tree<V, E> {
    fn go<V, E>(
        n: &Node<usize, ()>,
        rng: &mut dyn RngCore,
        fv: &mut dyn FnMut(&mut dyn RngCore, usize) -> V,
        fe: &mut dyn FnMut(&mut dyn RngCore) -> E,
    ) -> Node<V, E> {
        let deco = fv(rng, n.deco);
        let children = n
            .children
            .iter()
            .map(|c| match c {
                Child::Leaf(k) => Child::Leaf(*k),
                Child::Inner((), sub) => {
                    let e = fe(rng);
                    Child::Inner(e, Box::new(go(sub, rng, fv, fe)))
                }
            })
            .collect();
        Node { deco, children }
    }
    match shape {
        Tree::Trivial => Tree::Trivial,
        Tree::Rooted(n) => Tree::Rooted(go(n, rng, fv, fe)),
    }
}

/// Renumbers the leaves by a random permutation.
pub fn shuffle_leaves<V, E>(tree: &mut Tree<V, E>, rng: &mut dyn RngCore) {
    let perm = InjectiveMap::random_permutation(rng, tree.arity());
    tree.map_leaves(|k| perm.apply(k));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes_have_requested_arity_and_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..7 {
            for _ in 0..30 {
                let t = random_shape(&mut rng, n, 3);
                assert_eq!(t.leaf_word(), (1..=n).collect::<Vec<_>>());
                assert!(t.planar_traversal().iter().all(|id| id.len() < 3));
                let mut s = t.clone();
                shuffle_leaves(&mut s, &mut rng);
                s.check_leaf_labeling().unwrap();
            }
        }
    }
}
