//! Composite expressions, for printing an evaluation instead of computing it.

use std::fmt;

/// The unit of the target operad.
pub const TARGET_UNIT: &str = "*'";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Atom(String),
    Apply { head: Box<Term>, args: Vec<Term>, sep: &'static str },
}

impl Term {
    pub fn atom(s: impl Into<String>) -> Term {
        Term::Atom(s.into())
    }

    pub fn unit() -> Term {
        Term::atom(TARGET_UNIT)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Term::Atom(s) if s == TARGET_UNIT)
    }

    /// `head(args)`. A unit head on one argument is that argument, and a
    /// head applied to units only is the head.
    pub fn apply(head: Term, args: Vec<Term>, sep: &'static str) -> Term {
        if head.is_unit() && args.len() == 1 {
            return args.into_iter().next().expect("one argument");
        }
        if args.iter().all(Term::is_unit) {
            return head;
        }
        Term::Apply { head: Box::new(head), args, sep }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(s) => f.write_str(s),
            Term::Apply { head, args, sep } => {
                if matches!(**head, Term::Apply { .. }) {
                    write!(f, "({head})")?;
                } else {
                    write!(f, "{head}")?;
                }
                f.write_str("(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
