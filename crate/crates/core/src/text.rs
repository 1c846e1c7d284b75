//! The textual tree grammar.
//!
//! ```text
//! tree  := "l1" | node
//! node  := "(" "v" deco child* ")" suffix
//! child := "l" <k> | node edge
//! ```
//!
//! Decorations, node suffixes and edge suffixes are supplied by the caller:
//! points of `W𝒫` use `[..]` decorations and `:t=p/q` edge lengths, points of
//! `B𝒫` use `<..>` decorations and a `:h=p/q` height after every vertex.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trees::{Child, Node, Tree};

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    pub fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    pub fn usize(&mut self) -> Result<usize> {
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits.parse().map_err(|_| Error::Parse {
            position: start,
            message: "expected a number".into(),
        })
    }

    pub fn rational(&mut self) -> Result<Rational> {
        let start = self.pos;
        let text = self.take_while(|c| c.is_ascii_digit() || c == '-' || c == '/');
        text.parse().map_err(|_| Error::Parse {
            position: start,
            message: format!("`{text}` is not a rational p/q"),
        })
    }

    pub fn ident(&mut self) -> Result<&'a str> {
        let id = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if id.is_empty() {
            Err(self.error("expected a name"))
        } else {
            Ok(id)
        }
    }

    /// The text between `open` and its matching `close`, nesting allowed.
    pub fn balanced(&mut self, open: char, close: char) -> Result<(usize, &'a str)> {
        self.expect(&open.to_string())?;
        let start = self.pos;
        let mut depth = 1;
        for (off, c) in self.src[start..].char_indices() {
            if c == open {
                depth += 1;
            } else if c == close {
                depth -= 1;
                if depth == 0 {
                    self.pos = start + off + c.len_utf8();
                    return Ok((start, &self.src[start..start + off]));
                }
            }
        }
        Err(self.error(format!("unclosed `{open}`")))
    }
}

/// Shifts the position of an error raised while parsing a substring.
pub fn offset_error(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { position, message } => Error::Parse { position: position + by, message },
        other => other,
    }
}

pub struct TreeSyntax<'f, V, E> {
    pub deco: &'f mut dyn FnMut(&mut Parser) -> Result<V>,
    pub node_suffix: &'f mut dyn FnMut(&mut Parser, &mut V) -> Result<()>,
    pub edge: &'f mut dyn FnMut(&mut Parser) -> Result<E>,
}

pub fn parse_tree<V, E>(p: &mut Parser, syntax: &mut TreeSyntax<V, E>) -> Result<Tree<V, E>> {
    if p.peek() == Some('l') {
        p.expect("l")?;
        let k = p.usize()?;
        if k != 1 {
            return Err(p.error("the trivial tree is written l1"));
        }
        return Ok(Tree::Trivial);
    }
    Ok(Tree::Rooted(parse_node(p, syntax)?))
}

fn parse_node<V, E>(p: &mut Parser, syntax: &mut TreeSyntax<V, E>) -> Result<Node<V, E>> {
    p.expect("(")?;
    p.expect("v")?;
    let mut deco = (syntax.deco)(p)?;
    let mut children = Vec::new();
    loop {
        match p.peek() {
            Some(')') => break,
            Some('l') => {
                p.expect("l")?;
                children.push(Child::Leaf(p.usize()?));
            }
            Some('(') => {
                let node = parse_node(p, syntax)?;
                let e = (syntax.edge)(p)?;
                children.push(Child::Inner(e, Box::new(node)));
            }
            _ => return Err(p.error("expected a leaf `l<k>`, a vertex, or `)`")),
        }
    }
    p.expect(")")?;
    if children.is_empty() {
        return Err(p.error("a vertex needs at least one input"));
    }
    (syntax.node_suffix)(p, &mut deco)?;
    Ok(Node { deco, children })
}

pub fn write_tree<V, E>(
    tree: &Tree<V, E>,
    deco: &dyn Fn(&V) -> String,
    node_suffix: &dyn Fn(&V) -> String,
    edge: &dyn Fn(&E) -> String,
) -> String {
    match tree {
        Tree::Trivial => "l1".into(),
        Tree::Rooted(n) => {
            let mut out = String::new();
            write_node(n, deco, node_suffix, edge, &mut out);
            out
        }
    }
}

fn write_node<V, E>(
    n: &Node<V, E>,
    deco: &dyn Fn(&V) -> String,
    node_suffix: &dyn Fn(&V) -> String,
    edge: &dyn Fn(&E) -> String,
    out: &mut String,
) {
    out.push_str("(v ");
    out.push_str(&deco(&n.deco));
    for c in &n.children {
        out.push(' ');
        match c {
            Child::Leaf(k) => {
                out.push('l');
                out.push_str(&k.to_string());
            }
            Child::Inner(e, sub) => {
                write_node(sub, deco, node_suffix, edge, out);
                out.push_str(&edge(e));
            }
        }
    }
    out.push(')');
    out.push_str(&node_suffix(&n.deco));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain_syntax_parse(s: &str) -> Result<Tree<String, ()>> {
        let mut deco = |p: &mut Parser| Ok(p.balanced('[', ']')?.1.to_string());
        let mut suffix = |_: &mut Parser, _: &mut String| Ok(());
        let mut edge = |_: &mut Parser| Ok(());
        let mut syn = TreeSyntax { deco: &mut deco, node_suffix: &mut suffix, edge: &mut edge };
        let mut p = Parser::new(s);
        let t = parse_tree(&mut p, &mut syn)?;
        p.finish()?;
        Ok(t)
    }

    #[test]
    fn round_trip() {
        let s = "(v [a] l2 (v [b[c]] l1 l3))";
        let t = plain_syntax_parse(s).unwrap();
        assert_eq!(t.leaf_word(), vec![2, 1, 3]);
        let back = write_tree(&t, &|d: &String| format!("[{d}]"), &|_| String::new(), &|_| String::new());
        assert_eq!(back, s);
    }

    #[test]
    fn reports_positions() {
        match plain_syntax_parse("(v [a] l1 x)") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(plain_syntax_parse("(v [a])").is_err());
        assert!(plain_syntax_parse("(v [a l1)").is_err());
        assert!(plain_syntax_parse("l2").is_err());
        assert!(plain_syntax_parse("l1").unwrap().is_trivial());
    }
}
