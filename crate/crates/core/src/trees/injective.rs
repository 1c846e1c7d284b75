//! Morphisms of the category of finite sets `[n] = {1..n}` and injections.
//!
//! Values are 1-based throughout, matching the operadic indexing of inputs.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An injective map `u: [m] -> [n]`, stored as the list `u(1), .., u(m)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InjectiveMap {
    values: Vec<usize>,
    codomain: usize,
}

impl InjectiveMap {
    pub fn new(values: Vec<usize>, codomain: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("injections start from a nonempty set"));
        }
        let mut seen = vec![false; codomain + 1];
        for &v in &values {
            if v == 0 || v > codomain {
                return Err(Error::domain(format!("value {v} outside [1, {codomain}]")));
            }
            if seen[v] {
                return Err(Error::domain(format!("value {v} repeated; map is not injective")));
            }
            seen[v] = true;
        }
        Ok(InjectiveMap { values, codomain })
    }

    pub fn identity(n: usize) -> Self {
        InjectiveMap {
            values: (1..=n).collect(),
            codomain: n,
        }
    }

    /// The order-preserving inclusion `[m] -> [n]` with image `{1..m}`.
    pub fn standard_inclusion(m: usize, n: usize) -> Self {
        assert!(m <= n && m >= 1);
        InjectiveMap {
            values: (1..=m).collect(),
            codomain: n,
        }
    }

    /// The order-preserving injection whose image is the given set.
    pub fn from_image(mut image: Vec<usize>, codomain: usize) -> Result<Self> {
        image.sort_unstable();
        Self::new(image, codomain)
    }

    pub fn domain(&self) -> usize {
        self.values.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, j: usize) -> usize {
        self.values[j - 1]
    }

    pub fn is_order_preserving(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_permutation(&self) -> bool {
        self.values.len() == self.codomain
    }

    pub fn is_identity(&self) -> bool {
        self.is_permutation() && self.is_order_preserving()
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &InjectiveMap) -> Result<InjectiveMap> {
        if other.codomain != self.domain() {
            return Err(Error::arity(format!(
                "cannot compose [{}]->[{}] after [{}]->[{}]",
                self.domain(),
                self.codomain,
                other.domain(),
                other.codomain
            )));
        }
        Ok(InjectiveMap {
            values: other.values.iter().map(|&j| self.apply(j)).collect(),
            codomain: self.codomain,
        })
    }

    /// Inverse of a permutation.
    pub fn inverse(&self) -> Result<InjectiveMap> {
        if !self.is_permutation() {
            return Err(Error::domain("only permutations are invertible"));
        }
        let mut inv = vec![0; self.codomain];
        for (j, &v) in self.values.iter().enumerate() {
            inv[v - 1] = j + 1;
        }
        Ok(InjectiveMap {
            values: inv,
            codomain: self.codomain,
        })
    }

    /// `(position in image, i)` preimage lookup.
    pub fn preimage(&self, v: usize) -> Option<usize> {
        self.values.iter().position(|&x| x == v).map(|p| p + 1)
    }

    /// Factor `u = ι ∘ σ` with `ι` order-preserving onto the image of `u`
    /// and `σ` a permutation of `[m]` (forget, then permute).
    pub fn factor_forget_then_permute(&self) -> (InjectiveMap, InjectiveMap) {
        let iota = InjectiveMap::from_image(self.values.clone(), self.codomain)
            .expect("image of an injection is a valid image");
        let sigma = InjectiveMap {
            values: self
                .values
                .iter()
                .map(|v| iota.preimage(*v).expect("value in image"))
                .collect(),
            codomain: self.domain(),
        };
        (iota, sigma)
    }

    /// Factor `u = τ ∘ ι₀` with `ι₀` the standard inclusion `[m] -> [n]` and
    /// `τ` a permutation of `[n]` (permute, then forget).
    pub fn factor_permute_then_forget(&self) -> (InjectiveMap, InjectiveMap) {
        let m = self.domain();
        let n = self.codomain;
        let mut tau = self.values.clone();
        tau.extend((1..=n).filter(|v| !self.values.contains(v)));
        (
            InjectiveMap {
                values: tau,
                codomain: n,
            },
            InjectiveMap::standard_inclusion(m, n),
        )
    }

    /// The reindexing map for a full composite.
    ///
    /// Given a big composite `γ(p; b_1..b_n)` whose blocks have sizes
    /// `big_arities`, and a small composite `γ(u*p; v_1* b_{u(1)}, ..,
    /// v_m* b_{u(m)})`, returns the injection from the inputs of the small one
    /// into the inputs of the big one sending block `j` into block `u(j)`
    /// through `v_j`.
    pub fn multi_block(
        u: &InjectiveMap,
        vs: &[InjectiveMap],
        big_arities: &[usize],
    ) -> Result<InjectiveMap> {
        if vs.len() != u.domain() || big_arities.len() != u.codomain {
            return Err(Error::arity("multi_block: shape mismatch"));
        }
        let mut offsets = Vec::with_capacity(big_arities.len());
        let mut acc = 0;
        for a in big_arities {
            offsets.push(acc);
            acc += a;
        }
        let mut values = Vec::new();
        for (j, v) in vs.iter().enumerate() {
            let target = u.values[j];
            if v.codomain != big_arities[target - 1] {
                return Err(Error::arity("multi_block: block arity mismatch"));
            }
            values.extend(v.values.iter().map(|l| offsets[target - 1] + l));
        }
        InjectiveMap::new(values, acc)
    }

    /// The reindexing map for a partial composite:
    /// `(u*x) ∘_i (v*y) = ρ* (x ∘_{u(i)} y)` where `ρ = block(u, i, v)`.
    pub fn block(u: &InjectiveMap, i: usize, v: &InjectiveMap) -> Result<InjectiveMap> {
        if i == 0 || i > u.domain() {
            return Err(Error::arity(format!("block index {i} out of range")));
        }
        let target = u.apply(i);
        let big: Vec<usize> = (1..=u.codomain)
            .map(|k| if k == target { v.codomain } else { 1 })
            .collect();
        let vs: Vec<InjectiveMap> = (1..=u.domain())
            .map(|j| if j == i { v.clone() } else { InjectiveMap::identity(1) })
            .collect();
        Self::multi_block(u, &vs, &big)
    }

    /// For `u: [m] -> [n+k-1]` whose image avoids the block `start..start+k-1`
    /// of a partial composite `x ∘_start y` (with `y` of arity `k`), the map
    /// `[m] -> [n]` that sees only the inputs of `x` other than `start`.
    pub fn avoiding_block(&self, start: usize, k: usize) -> Option<InjectiveMap> {
        let end = start + k - 1;
        if self.values.iter().any(|v| (start..=end).contains(v)) {
            return None;
        }
        let n = self.codomain + 1 - k;
        let values = self
            .values
            .iter()
            .map(|&v| if v < start { v } else { v + 1 - k })
            .collect();
        Some(InjectiveMap { values, codomain: n })
    }

    pub fn all_permutations(n: usize) -> Vec<InjectiveMap> {
        Self::all_injections(n, n)
    }

    pub fn all_injections(m: usize, n: usize) -> Vec<InjectiveMap> {
        fn rec(m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<InjectiveMap>) {
            if cur.len() == m {
                out.push(InjectiveMap {
                    values: cur.clone(),
                    codomain: n,
                });
                return;
            }
            for v in 1..=n {
                if !cur.contains(&v) {
                    cur.push(v);
                    rec(m, n, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        if m >= 1 && m <= n {
            rec(m, n, &mut Vec::new(), &mut out);
        }
        out
    }

    pub fn all_order_preserving(m: usize, n: usize) -> Vec<InjectiveMap> {
        fn rec(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<InjectiveMap>) {
            if cur.len() == m {
                out.push(InjectiveMap {
                    values: cur.clone(),
                    codomain: n,
                });
                return;
            }
            for v in start..=n {
                cur.push(v);
                rec(m, n, v + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if m >= 1 && m <= n {
            rec(m, n, 1, &mut Vec::new(), &mut out);
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> InjectiveMap {
        let mut all: Vec<usize> = (1..=n).collect();
        all.shuffle(rng);
        all.truncate(m);
        InjectiveMap {
            values: all,
            codomain: n,
        }
    }

    pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> InjectiveMap {
        Self::random(rng, n, n)
    }
}

impl fmt::Debug for InjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]->[{}]{:?}", self.domain(), self.codomain, self.values)
    }
}

impl fmt::Display for InjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inj(v: &[usize], n: usize) -> InjectiveMap {
        InjectiveMap::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn rejects_non_injective() {
        assert!(InjectiveMap::new(vec![1, 1], 2).is_err());
        assert!(InjectiveMap::new(vec![3], 2).is_err());
        assert!(InjectiveMap::new(vec![], 2).is_err());
    }

    #[test]
    fn counts_match_combinatorics() {
        assert_eq!(InjectiveMap::all_injections(2, 4).len(), 12);
        assert_eq!(InjectiveMap::all_order_preserving(2, 4).len(), 6);
        assert_eq!(InjectiveMap::all_permutations(3).len(), 6);
    }

    #[test]
    fn both_factorizations_recompose() {
        for u in InjectiveMap::all_injections(2, 4) {
            let (iota, sigma) = u.factor_forget_then_permute();
            assert!(iota.is_order_preserving());
            assert_eq!(iota.compose(&sigma).unwrap(), u);
            let (tau, iota0) = u.factor_permute_then_forget();
            assert!(tau.is_permutation());
            assert_eq!(tau.compose(&iota0).unwrap(), u);
        }
    }

    #[test]
    fn block_of_identities_is_identity() {
        let rho = InjectiveMap::block(&InjectiveMap::identity(3), 2, &InjectiveMap::identity(2)).unwrap();
        assert!(rho.is_identity());
        assert_eq!(rho.codomain(), 4);
    }

    #[test]
    fn block_with_transposition() {
        // u swaps the two inputs of x; composing at input 1 of u*x means
        // composing at input 2 of x.
        let rho = InjectiveMap::block(&inj(&[2, 1], 2), 1, &InjectiveMap::identity(2)).unwrap();
        assert_eq!(rho.values(), &[2, 3, 1]);
    }

    #[test]
    fn avoiding_block_shifts_down() {
        let u = inj(&[1, 4], 4);
        let w = u.avoiding_block(2, 2).unwrap();
        assert_eq!(w.values(), &[1, 3]);
        assert_eq!(w.codomain(), 3);
        assert!(inj(&[2], 4).avoiding_block(2, 2).is_none());
    }
}
