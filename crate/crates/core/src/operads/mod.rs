//! Effective operads: carriers with decidable equality, partial
//! compositions, and the action of injections (which contains the symmetric
//! group action).
//!
//! Conventions: for `u: [m] -> [n]` and `x` of arity `n`, `u*(x)` has arity
//! `m` and its `j`-th input is the `u(j)`-th input of `x`. All operads are
//! reduced, so arity zero is never materialized.

mod assoc;
mod discs;
pub mod eval;
mod framed;
mod intervals;
pub mod lambda;

use std::fmt::Debug;
use std::hash::Hash;

use rand::RngCore;

pub use assoc::{Associative, LinearOrder};
pub use discs::{Disc, DiscConfig, LittleDiscs};
pub use eval::{evaluate_by_random_contraction, evaluate_tree};
pub use framed::{FrameGroup, Framed, FramedElement, Reflection, Translation};
pub use intervals::{IntervalConfig, LittleIntervals};
pub use lambda::{
    enumerate_matching_families, matching_restrict, LambdaSequence, MatchingFamily, PointedSet,
    Product, Truncated, XPowers,
};

use crate::error::{Error, Result};
use crate::trees::InjectiveMap;

/// Bounds shared by every carrier element.
pub trait Element: Clone + Eq + Ord + Hash + Debug + Send + Sync {}
impl<T: Clone + Eq + Ord + Hash + Debug + Send + Sync> Element for T {}

/// A reduced operad with exact, decidable structure.
pub trait Operad: LambdaSequence + Send + Sync {
    fn name(&self) -> String;

    fn unit(&self) -> Self::Elem;

    fn is_unit(&self, x: &Self::Elem) -> bool {
        *x == self.unit()
    }

    /// Partial composition `x ∘_i y`, with `i` 1-based.
    fn compose(&self, x: &Self::Elem, i: usize, y: &Self::Elem) -> Result<Self::Elem>;

    /// Full composition `x(y_1, .., y_n)`.
    fn compose_all(&self, x: &Self::Elem, ys: &[Self::Elem]) -> Result<Self::Elem> {
        let n = self.arity(x);
        if ys.len() != n {
            return Err(Error::arity(format!(
                "full composition of an arity-{n} element with {} arguments",
                ys.len()
            )));
        }
        let mut acc = x.clone();
        for (j, y) in ys.iter().enumerate().rev() {
            acc = self.compose(&acc, j + 1, y)?;
        }
        Ok(acc)
    }

    /// Checks the carrier invariants of a single element.
    fn validate(&self, x: &Self::Elem) -> Result<()>;

    /// A random element of the given arity.
    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem;

    /// Compact text form used inside `[...]` decorations.
    fn encode(&self, x: &Self::Elem) -> String;

    fn decode(&self, s: &str) -> Result<Self::Elem>;

    fn to_json(&self, x: &Self::Elem) -> serde_json::Value;

    fn from_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;
}

/// Marker for operads in which a composite or restriction of non-unit
/// elements is never the unit.
pub trait UnitRigid: Operad {}

pub(crate) fn check_action_arity(u: &InjectiveMap, n: usize) -> Result<()> {
    if u.codomain() != n {
        return Err(Error::arity(format!(
            "injection into [{}] acting on an element of arity {n}",
            u.codomain()
        )));
    }
    Ok(())
}

pub(crate) fn check_compose_index(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::arity(format!("composition index {i} outside [1, {n}]")));
    }
    Ok(())
}

/// `u*` computed as forget (order-preserving part) then permute.
pub fn act_forget_then_permute<Y: LambdaSequence>(
    y: &Y,
    u: &InjectiveMap,
    x: &Y::Elem,
) -> Result<Y::Elem> {
    let (iota, sigma) = u.factor_forget_then_permute();
    let forgotten = y.act(&iota, x)?;
    y.act(&sigma, &forgotten)
}

/// `u*` computed as permute then forget.
pub fn act_permute_then_forget<Y: LambdaSequence>(
    y: &Y,
    u: &InjectiveMap,
    x: &Y::Elem,
) -> Result<Y::Elem> {
    let (tau, iota0) = u.factor_permute_then_forget();
    let permuted = y.act(&tau, x)?;
    y.act(&iota0, &permuted)
}

pub(crate) fn json_str(v: &serde_json::Value) -> Result<&str> {
    v.as_str()
        .ok_or_else(|| Error::Parse { position: 0, message: format!("expected a string, found {v}") })
}

pub(crate) fn json_array(v: &serde_json::Value) -> Result<&Vec<serde_json::Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse { position: 0, message: format!("expected an array, found {v}") })
}
