//! The little intervals operad with rational endpoints.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{check_action_arity, check_compose_index, json_array, json_str, LambdaSequence, Operad, UnitRigid};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trees::InjectiveMap;

/// `n` affine embeddings `[0,1] -> [0,1]`, each stored as `(c(0), c(1))`,
/// with pairwise disjoint interiors. The `j`-th entry is the interval labeled
/// `j`; positions along `[0,1]` are independent of labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntervalConfig {
    pub intervals: Vec<(Rational, Rational)>,
}

impl IntervalConfig {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        let c = IntervalConfig { intervals };
        c.check()?;
        Ok(c)
    }

    pub fn unit() -> Self {
        IntervalConfig {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    pub fn arity(&self) -> usize {
        self.intervals.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::invariant("arity at least one", "empty configuration"));
        }
        for (a, b) in &self.intervals {
            if a.is_negative() || !b.in_unit_interval() || a >= b {
                return Err(Error::invariant(
                    "0 <= c(0) < c(1) <= 1",
                    format!("interval [{a}, {b}]"),
                ));
            }
        }
        let mut sorted = self.intervals.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::invariant(
                    "interiors pairwise disjoint",
                    format!("[{}, {}] overlaps [{}, {}]", w[0].0, w[0].1, w[1].0, w[1].1),
                ));
            }
        }
        Ok(())
    }

    /// Image of `t` under the affine embedding labeled `j` (1-based).
    pub fn embed(&self, j: usize, t: &Rational) -> Rational {
        let (a, b) = &self.intervals[j - 1];
        a + &(&(b - a) * t)
    }

    /// Inverse of the `j`-th embedding.
    pub fn pull_back(&self, j: usize, s: &Rational) -> Rational {
        let (a, b) = &self.intervals[j - 1];
        &(s - a) / &(b - a)
    }

    /// Reflection `x ↦ 1 - x` applied to every interval.
    pub fn reflect(&self) -> Self {
        IntervalConfig {
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| (Rational::one() - b, Rational::one() - a))
                .collect(),
        }
    }

    /// Labels sorted by position along `[0,1]`.
    pub fn labels_by_position(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (1..=self.arity()).collect();
        idx.sort_by(|a, b| self.intervals[a - 1].cmp(&self.intervals[b - 1]));
        idx
    }

    pub fn encode(&self) -> String {
        self.intervals
            .iter()
            .map(|(a, b)| format!("{a},{b}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn decode(s: &str) -> Result<Self> {
        let intervals = s
            .split(';')
            .map(|part| {
                let (a, b) = part.split_once(',').ok_or_else(|| Error::Parse {
                    position: 0,
                    message: format!("interval `{part}` is not `a,b`"),
                })?;
                Ok((a.parse()?, b.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        IntervalConfig::new(intervals)
    }

    /// Random configuration of `n` intervals on a grid of mesh `1/d`.
    pub fn random(rng: &mut dyn RngCore, n: usize) -> Self {
        let d = rng.gen_range(2 * n..=3 * n + 2) as i64;
        let mut points: Vec<i64> = (0..=d).collect();
        points.shuffle(rng);
        points.truncate(2 * n);
        points.sort_unstable();
        let mut intervals: Vec<(Rational, Rational)> = points
            .chunks(2)
            .map(|w| (Rational::new(w[0], d), Rational::new(w[1], d)))
            .collect();
        intervals.shuffle(rng);
        IntervalConfig { intervals }
    }
}

/// The operad `𝒟₁` of little intervals.
#[derive(Clone, Copy, Debug, Default)]
pub struct LittleIntervals;

impl LambdaSequence for LittleIntervals {
    type Elem = IntervalConfig;

    fn arity(&self, x: &IntervalConfig) -> usize {
        x.arity()
    }

    fn act(&self, u: &InjectiveMap, x: &IntervalConfig) -> Result<IntervalConfig> {
        check_action_arity(u, x.arity())?;
        Ok(IntervalConfig {
            intervals: u.values().iter().map(|&j| x.intervals[j - 1].clone()).collect(),
        })
    }
}

impl Operad for LittleIntervals {
    fn name(&self) -> String {
        "d1".into()
    }

    fn unit(&self) -> IntervalConfig {
        IntervalConfig::unit()
    }

    fn compose(&self, x: &IntervalConfig, i: usize, y: &IntervalConfig) -> Result<IntervalConfig> {
        check_compose_index(x.arity(), i)?;
        let mut intervals = Vec::with_capacity(x.arity() + y.arity() - 1);
        intervals.extend_from_slice(&x.intervals[..i - 1]);
        for (c, d) in &y.intervals {
            intervals.push((x.embed(i, c), x.embed(i, d)));
        }
        intervals.extend_from_slice(&x.intervals[i..]);
        Ok(IntervalConfig { intervals })
    }

    fn validate(&self, x: &IntervalConfig) -> Result<()> {
        x.check()
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> IntervalConfig {
        IntervalConfig::random(rng, arity)
    }

    fn encode(&self, x: &IntervalConfig) -> String {
        x.encode()
    }

    fn decode(&self, s: &str) -> Result<IntervalConfig> {
        IntervalConfig::decode(s)
    }

    fn to_json(&self, x: &IntervalConfig) -> serde_json::Value {
        serde_json::Value::Array(
            x.intervals
                .iter()
                .map(|(a, b)| serde_json::json!([a.to_string(), b.to_string()]))
                .collect(),
        )
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<IntervalConfig> {
        let intervals = json_array(v)?
            .iter()
            .map(|pair| {
                let pair = json_array(pair)?;
                if pair.len() != 2 {
                    return Err(Error::Parse { position: 0, message: "interval needs two endpoints".into() });
                }
                Ok((json_str(&pair[0])?.parse()?, json_str(&pair[1])?.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        IntervalConfig::new(intervals)
    }
}

impl UnitRigid for LittleIntervals {}
