//! Graphviz export. One node per vertex, named by its slot path from the
//! root; external leaves are listed inside their vertex.

use std::fmt::Write;

use crate::b::{BBimodule, BPoint};
use crate::operads::Operad;
use crate::trees::{Child, Node, Tree};
use crate::w::{WOperad, WPoint};

/// DOT text for any tree, given vertex and edge annotations.
pub fn tree_dot<V, E>(tree: &Tree<V, E>, vertex: &dyn Fn(&V) -> Vec<String>, edge: &dyn Fn(&E) -> Option<String>) -> String {
    let mut out = String::from("digraph point {\n  node [shape=box, fontname=\"monospace\"];\n");
    match tree {
        Tree::Trivial => out.push_str("  l1 [shape=plaintext, label=\"leaf 1\"];\n"),
        Tree::Rooted(root) => node_dot(root, "v", vertex, edge, &mut out),
    }
    out.push_str("}\n");
    out
}

fn node_dot<V, E>(
    n: &Node<V, E>,
    id: &str,
    vertex: &dyn Fn(&V) -> Vec<String>,
    edge: &dyn Fn(&E) -> Option<String>,
    out: &mut String,
) {
    let mut lines = vertex(&n.deco);
    let leaves: Vec<String> = n
        .children
        .iter()
        .enumerate()
        .filter_map(|(s, c)| match c {
            Child::Leaf(k) => Some(format!("{}:l{k}", s + 1)),
            Child::Inner(..) => None,
        })
        .collect();
    if !leaves.is_empty() {
        lines.push(leaves.join(" "));
    }
    let label: Vec<String> = lines.iter().map(|l| escape(l)).collect();
    writeln!(out, "  {id} [label=\"{}\"];", label.join("\\n")).expect("writing to a string");
    for (s, c) in n.children.iter().enumerate() {
        if let Child::Inner(e, sub) = c {
            let child = format!("{id}_{}", s + 1);
            let mut attrs = format!("taillabel=\"{}\"", s + 1);
            if let Some(l) = edge(e) {
                write!(attrs, ", label=\"{}\"", escape(&l)).expect("writing to a string");
            }
            writeln!(out, "  {id} -> {child} [{attrs}];").expect("writing to a string");
            node_dot(sub, &child, vertex, edge, out);
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn w_dot<P: Operad>(w: &WOperad<P>, a: &WPoint<P::Elem>) -> String {
    tree_dot(a, &|d| vec![w.base.encode(d)], &|t| Some(format!("t={t}")))
}

pub fn b_dot<P: Operad>(b: &BBimodule<P>, x: &BPoint<P::Elem>) -> String {
    tree_dot(x, &|l| vec![b.w.to_text(&l.w), format!("h={}", l.height)], &|_| None)
}
