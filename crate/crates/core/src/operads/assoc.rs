//! The associative operad: arity `n` is the set of linear orders on `[n]`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{check_action_arity, check_compose_index, json_array, LambdaSequence, Operad};
use crate::error::{Error, Result};
use crate::trees::InjectiveMap;

/// A linear order on the inputs, written as the word listing them in order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinearOrder(pub Vec<usize>);

impl LinearOrder {
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        InjectiveMap::new(word.clone(), n)?;
        Ok(LinearOrder(word))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Associative;

impl LambdaSequence for Associative {
    type Elem = LinearOrder;

    fn arity(&self, x: &LinearOrder) -> usize {
        x.arity()
    }

    fn act(&self, u: &InjectiveMap, x: &LinearOrder) -> Result<LinearOrder> {
        check_action_arity(u, x.arity())?;
        Ok(LinearOrder(x.0.iter().filter_map(|&v| u.preimage(v)).collect()))
    }

    fn elements(&self, n: usize) -> Option<Vec<LinearOrder>> {
        Some(
            InjectiveMap::all_permutations(n)
                .into_iter()
                .map(|p| LinearOrder(p.values().to_vec()))
                .collect(),
        )
    }
}

impl Operad for Associative {
    fn name(&self) -> String {
        "assoc".into()
    }

    fn unit(&self) -> LinearOrder {
        LinearOrder(vec![1])
    }

    fn compose(&self, x: &LinearOrder, i: usize, y: &LinearOrder) -> Result<LinearOrder> {
        check_compose_index(x.arity(), i)?;
        let m = y.arity();
        let mut word = Vec::with_capacity(x.arity() + m - 1);
        for &v in &x.0 {
            if v == i {
                word.extend(y.0.iter().map(|&w| w + i - 1));
            } else if v < i {
                word.push(v);
            } else {
                word.push(v + m - 1);
            }
        }
        Ok(LinearOrder(word))
    }

    fn validate(&self, x: &LinearOrder) -> Result<()> {
        LinearOrder::new(x.0.clone()).map(|_| ())
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> LinearOrder {
        LinearOrder(InjectiveMap::random_permutation(rng, arity).values().to_vec())
    }

    fn encode(&self, x: &LinearOrder) -> String {
        x.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    fn decode(&self, s: &str) -> Result<LinearOrder> {
        let word = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| Error::Parse {
                    position: 0,
                    message: format!("`{t}` is not an input index"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LinearOrder::new(word)
    }

    fn to_json(&self, x: &LinearOrder) -> serde_json::Value {
        serde_json::json!(x.0)
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<LinearOrder> {
        let word = json_array(v)?
            .iter()
            .map(|t| {
                t.as_u64().map(|k| k as usize).ok_or_else(|| Error::Parse {
                    position: 0,
                    message: format!("`{t}` is not an input index"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LinearOrder::new(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[usize]) -> LinearOrder {
        LinearOrder::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_words_compose_to_identity() {
        assert_eq!(Associative.compose(&w(&[1, 2]), 1, &w(&[1, 2])).unwrap(), w(&[1, 2, 3]));
    }

    #[test]
    fn block_substitution() {
        // 2 < 1 with the block 2 1 put in place of input 1
        let z = Associative.compose(&w(&[2, 1]), 1, &w(&[2, 1])).unwrap();
        assert_eq!(z, w(&[3, 2, 1]));
        let z = Associative.compose(&w(&[2, 1, 3]), 2, &w(&[1, 2])).unwrap();
        assert_eq!(z, w(&[2, 3, 1, 4]));
    }

    #[test]
    fn restriction_keeps_relative_order() {
        let u = InjectiveMap::new(vec![3, 1], 3).unwrap();
        // in 3 1 2, input 3 precedes input 1; as inputs 1, 2 of u*x
        assert_eq!(Associative.act(&u, &w(&[3, 1, 2])).unwrap(), w(&[1, 2]));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(LinearOrder::new(vec![1, 1]).is_err());
        assert!(Associative.decode("1,3").is_err());
        assert_eq!(Associative.decode("2,1,3").unwrap(), w(&[2, 1, 3]));
    }
}
