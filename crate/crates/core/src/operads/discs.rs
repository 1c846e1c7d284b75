//! The little discs operad `𝒟₂` with rational centers and radii.
//!
//! Discs live in the closed unit disc centered at the origin. Containment and
//! disjointness are decided on squared distances, so no square roots appear.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{check_action_arity, check_compose_index, json_array, json_str, LambdaSequence, Operad, UnitRigid};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trees::InjectiveMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Disc {
    pub cx: Rational,
    pub cy: Rational,
    pub r: Rational,
}

impl Disc {
    pub fn new(cx: Rational, cy: Rational, r: Rational) -> Self {
        Disc { cx, cy, r }
    }

    fn unit() -> Self {
        Disc::new(Rational::zero(), Rational::zero(), Rational::one())
    }

    /// Image of `inner` under the similarity taking the unit disc onto `self`.
    fn embed(&self, inner: &Disc) -> Disc {
        Disc {
            cx: &self.cx + &(&self.r * &inner.cx),
            cy: &self.cy + &(&self.r * &inner.cy),
            r: &self.r * &inner.r,
        }
    }

    fn inside_unit(&self) -> bool {
        let one = Rational::one();
        if self.r.is_negative() || self.r.is_zero() || self.r > one {
            return false;
        }
        let slack = &one - &self.r;
        &self.cx * &self.cx + &self.cy * &self.cy <= &slack * &slack
    }

    fn interiors_disjoint(&self, other: &Disc) -> bool {
        let dx = &self.cx - &other.cx;
        let dy = &self.cy - &other.cy;
        let sum = &self.r + &other.r;
        &dx * &dx + &dy * &dy >= &sum * &sum
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiscConfig {
    pub discs: Vec<Disc>,
}

impl DiscConfig {
    pub fn new(discs: Vec<Disc>) -> Result<Self> {
        let c = DiscConfig { discs };
        c.check()?;
        Ok(c)
    }

    pub fn arity(&self) -> usize {
        self.discs.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.discs.is_empty() {
            return Err(Error::invariant("arity at least one", "empty configuration"));
        }
        for (j, d) in self.discs.iter().enumerate() {
            if !d.inside_unit() {
                return Err(Error::invariant(
                    "each disc inside the unit disc",
                    format!("disc {} = ({}, {}; {})", j + 1, d.cx, d.cy, d.r),
                ));
            }
        }
        for a in 0..self.discs.len() {
            for b in a + 1..self.discs.len() {
                if !self.discs[a].interiors_disjoint(&self.discs[b]) {
                    return Err(Error::invariant(
                        "interiors pairwise disjoint",
                        format!("discs {} and {} overlap", a + 1, b + 1),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn encode(&self) -> String {
        self.discs
            .iter()
            .map(|d| format!("{},{},{}", d.cx, d.cy, d.r))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn decode(s: &str) -> Result<Self> {
        let discs = s
            .split(';')
            .map(|part| {
                let fields: Vec<&str> = part.split(',').collect();
                if fields.len() != 3 {
                    return Err(Error::Parse {
                        position: 0,
                        message: format!("disc `{part}` is not `cx,cy,r`"),
                    });
                }
                Ok(Disc::new(fields[0].parse()?, fields[1].parse()?, fields[2].parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscConfig::new(discs)
    }

    /// Discs in `n` vertical cells of `[-1/2, 1/2]`, with small vertical jitter.
    pub fn random(rng: &mut dyn RngCore, n: usize) -> Self {
        let n_i = n as i64;
        let mut discs = Vec::with_capacity(n);
        for cell in 0..n_i {
            // cell width 1/n, center (2 cell + 1)/(2n) - 1/2
            let cx = Rational::new(2 * cell + 1 - n_i, 2 * n_i);
            let cap = Rational::new(1, 2 * n_i).min(Rational::new(1, 4));
            let r = &cap * &Rational::new(rng.gen_range(1..=4), 4);
            let cy = Rational::new(rng.gen_range(-4..=4), 32);
            discs.push(Disc::new(cx, cy, r));
        }
        let perm = InjectiveMap::random_permutation(rng, n);
        DiscConfig {
            discs: perm.values().iter().map(|&j| discs[j - 1].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LittleDiscs;

impl LambdaSequence for LittleDiscs {
    type Elem = DiscConfig;

    fn arity(&self, x: &DiscConfig) -> usize {
        x.arity()
    }

    fn act(&self, u: &InjectiveMap, x: &DiscConfig) -> Result<DiscConfig> {
        check_action_arity(u, x.arity())?;
        Ok(DiscConfig {
            discs: u.values().iter().map(|&j| x.discs[j - 1].clone()).collect(),
        })
    }
}

impl Operad for LittleDiscs {
    fn name(&self) -> String {
        "d2".into()
    }

    fn unit(&self) -> DiscConfig {
        DiscConfig { discs: vec![Disc::unit()] }
    }

    fn compose(&self, x: &DiscConfig, i: usize, y: &DiscConfig) -> Result<DiscConfig> {
        check_compose_index(x.arity(), i)?;
        let outer = &x.discs[i - 1];
        let mut discs = Vec::with_capacity(x.arity() + y.arity() - 1);
        discs.extend_from_slice(&x.discs[..i - 1]);
        discs.extend(y.discs.iter().map(|d| outer.embed(d)));
        discs.extend_from_slice(&x.discs[i..]);
        Ok(DiscConfig { discs })
    }

    fn validate(&self, x: &DiscConfig) -> Result<()> {
        x.check()
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> DiscConfig {
        DiscConfig::random(rng, arity)
    }

    fn encode(&self, x: &DiscConfig) -> String {
        x.encode()
    }

    fn decode(&self, s: &str) -> Result<DiscConfig> {
        DiscConfig::decode(s)
    }

    fn to_json(&self, x: &DiscConfig) -> serde_json::Value {
        serde_json::Value::Array(
            x.discs
                .iter()
                .map(|d| serde_json::json!([d.cx.to_string(), d.cy.to_string(), d.r.to_string()]))
                .collect(),
        )
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<DiscConfig> {
        let discs = json_array(v)?
            .iter()
            .map(|d| {
                let d = json_array(d)?;
                if d.len() != 3 {
                    return Err(Error::Parse { position: 0, message: "disc needs center and radius".into() });
                }
                Ok(Disc::new(
                    json_str(&d[0])?.parse()?,
                    json_str(&d[1])?.parse()?,
                    json_str(&d[2])?.parse()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscConfig::new(discs)
    }
}

impl UnitRigid for LittleDiscs {}
