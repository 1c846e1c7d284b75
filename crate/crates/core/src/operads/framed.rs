//! Framed operads `𝒪∘G` for a group `G` acting on `𝒪` by operad automorphisms.

use std::fmt::Debug;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{check_action_arity, check_compose_index, json_array, json_str, Element, IntervalConfig, LambdaSequence, LittleIntervals, Operad};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trees::InjectiveMap;

/// A group acting on the elements of an operad.
pub trait FrameGroup<O: Operad>: Debug + Send + Sync {
    type G: Element;

    /// Short tag appended to the base operad name.
    fn tag(&self) -> &'static str;

    fn identity(&self) -> Self::G;

    fn mul(&self, a: &Self::G, b: &Self::G) -> Self::G;

    fn act(&self, g: &Self::G, x: &O::Elem) -> O::Elem;

    fn encode(&self, g: &Self::G) -> String;

    fn decode(&self, s: &str) -> Result<Self::G>;

    fn sample(&self, rng: &mut dyn RngCore) -> Self::G;
}

/// `Z/2` acting on `𝒟₁` by the reflection `x ↦ 1 - x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Reflection;

/// Elements of `Z/2`: `false` is the identity `e`, `true` the reflection `r`.
impl FrameGroup<LittleIntervals> for Reflection {
    type G = bool;

    fn tag(&self) -> &'static str {
        "z2"
    }

    fn identity(&self) -> bool {
        false
    }

    fn mul(&self, a: &bool, b: &bool) -> bool {
        a ^ b
    }

    fn act(&self, g: &bool, x: &IntervalConfig) -> IntervalConfig {
        if *g {
            x.reflect()
        } else {
            x.clone()
        }
    }

    fn encode(&self, g: &bool) -> String {
        if *g { "r" } else { "e" }.into()
    }

    fn decode(&self, s: &str) -> Result<bool> {
        match s.trim() {
            "e" => Ok(false),
            "r" => Ok(true),
            other => Err(Error::Parse { position: 0, message: format!("`{other}` is not e or r") }),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> bool {
        rng.gen_bool(0.5)
    }
}

/// The additive group of rationals acting trivially.
#[derive(Clone, Copy, Debug, Default)]
pub struct Translation;

impl<O: Operad> FrameGroup<O> for Translation {
    type G = Rational;

    fn tag(&self) -> &'static str {
        "q"
    }

    fn identity(&self) -> Rational {
        Rational::zero()
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn act(&self, _g: &Rational, x: &O::Elem) -> O::Elem {
        x.clone()
    }

    fn encode(&self, g: &Rational) -> String {
        g.to_string()
    }

    fn decode(&self, s: &str) -> Result<Rational> {
        s.trim().parse()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Rational {
        Rational::new(rng.gen_range(-4..=4), 4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FramedElement<B, G> {
    pub base: B,
    pub frame: Vec<G>,
}

#[derive(Clone, Debug, Default)]
pub struct Framed<O, F> {
    pub base: O,
    pub group: F,
}

impl<O: Operad, F: FrameGroup<O>> Framed<O, F> {
    pub fn new(base: O, group: F) -> Self {
        Framed { base, group }
    }

    /// The element `(θ; 1, .., 1)`.
    pub fn trivially_framed(&self, theta: O::Elem) -> FramedElement<O::Elem, F::G> {
        let n = self.base.arity(&theta);
        FramedElement {
            base: theta,
            frame: vec![self.group.identity(); n],
        }
    }
}

impl<O: Operad, F: FrameGroup<O>> LambdaSequence for Framed<O, F> {
    type Elem = FramedElement<O::Elem, F::G>;

    fn arity(&self, x: &Self::Elem) -> usize {
        x.frame.len()
    }

    fn act(&self, u: &InjectiveMap, x: &Self::Elem) -> Result<Self::Elem> {
        check_action_arity(u, x.frame.len())?;
        Ok(FramedElement {
            base: self.base.act(u, &x.base)?,
            frame: u.values().iter().map(|&j| x.frame[j - 1].clone()).collect(),
        })
    }
}

impl<O: Operad, F: FrameGroup<O>> Operad for Framed<O, F> {
    fn name(&self) -> String {
        format!("{}{}", self.base.name(), self.group.tag())
    }

    fn unit(&self) -> Self::Elem {
        self.trivially_framed(self.base.unit())
    }

    fn compose(&self, x: &Self::Elem, i: usize, y: &Self::Elem) -> Result<Self::Elem> {
        check_compose_index(x.frame.len(), i)?;
        let gi = &x.frame[i - 1];
        let base = self.base.compose(&x.base, i, &self.group.act(gi, &y.base))?;
        let mut frame = Vec::with_capacity(x.frame.len() + y.frame.len() - 1);
        frame.extend_from_slice(&x.frame[..i - 1]);
        frame.extend(y.frame.iter().map(|g| self.group.mul(gi, g)));
        frame.extend_from_slice(&x.frame[i..]);
        Ok(FramedElement { base, frame })
    }

    fn validate(&self, x: &Self::Elem) -> Result<()> {
        if self.base.arity(&x.base) != x.frame.len() {
            return Err(Error::invariant("one frame per input", format!("{} frames", x.frame.len())));
        }
        self.base.validate(&x.base)
    }

    fn sample(&self, rng: &mut dyn RngCore, arity: usize) -> Self::Elem {
        let base = self.base.sample(rng, arity);
        let frame = (0..arity).map(|_| self.group.sample(rng)).collect();
        FramedElement { base, frame }
    }

    fn encode(&self, x: &Self::Elem) -> String {
        let frames: Vec<String> = x.frame.iter().map(|g| self.group.encode(g)).collect();
        format!("{}|{}", self.base.encode(&x.base), frames.join(","))
    }

    fn decode(&self, s: &str) -> Result<Self::Elem> {
        let (b, f) = s.rsplit_once('|').ok_or_else(|| Error::Parse {
            position: 0,
            message: "framed element is `base|frames`".into(),
        })?;
        let base = self.base.decode(b)?;
        let frame = f.split(',').map(|g| self.group.decode(g)).collect::<Result<Vec<_>>>()?;
        let x = FramedElement { base, frame };
        self.validate(&x)?;
        Ok(x)
    }

    fn to_json(&self, x: &Self::Elem) -> serde_json::Value {
        serde_json::json!({
            "base": self.base.to_json(&x.base),
            "frame": x.frame.iter().map(|g| self.group.encode(g)).collect::<Vec<_>>(),
        })
    }

    fn from_json(&self, v: &serde_json::Value) -> Result<Self::Elem> {
        let missing = |k: &str| Error::Parse { position: 0, message: format!("framed element lacks `{k}`") };
        let base = self.base.from_json(v.get("base").ok_or_else(|| missing("base"))?)?;
        let frame = json_array(v.get("frame").ok_or_else(|| missing("frame"))?)?
            .iter()
            .map(|g| self.group.decode(json_str(g)?))
            .collect::<Result<Vec<_>>>()?;
        let x = FramedElement { base, frame };
        self.validate(&x)?;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn d1z2() -> Framed<LittleIntervals, Reflection> {
        Framed::new(LittleIntervals, Reflection)
    }

    fn iv(v: &[(i64, i64, i64, i64)]) -> IntervalConfig {
        IntervalConfig::new(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect()).unwrap()
    }

    #[test]
    fn reflected_frame_reflects_the_inserted_configuration() {
        let op = d1z2();
        let a = FramedElement { base: iv(&[(0, 1, 1, 1)]), frame: vec![true] };
        let b = FramedElement { base: iv(&[(0, 1, 1, 2)]), frame: vec![false] };
        let c = op.compose(&a, 1, &b).unwrap();
        assert_eq!(c.base, iv(&[(1, 2, 1, 1)]));
        assert_eq!(c.frame, vec![true]);
    }

    #[test]
    fn identity_frames_reduce_to_base_composition() {
        let op = d1z2();
        let x = iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]);
        let y = iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]);
        let c = op.compose(&op.trivially_framed(x.clone()), 2, &op.trivially_framed(y.clone())).unwrap();
        assert_eq!(c, op.trivially_framed(LittleIntervals.compose(&x, 2, &y).unwrap()));
    }

    #[test]
    fn translation_frames_add() {
        let op = Framed::new(LittleIntervals, Translation);
        let x = FramedElement { base: iv(&[(0, 1, 1, 2), (1, 2, 1, 1)]), frame: vec![rat(1, 2), rat(1, 3)] };
        let y = FramedElement { base: iv(&[(0, 1, 1, 1)]), frame: vec![rat(1, 4)] };
        let z = op.compose(&x, 1, &y).unwrap();
        assert_eq!(z.frame, vec![rat(3, 4), rat(1, 3)]);
        assert_eq!(op.name(), "d1q");
    }

    #[test]
    fn text_round_trip() {
        let op = d1z2();
        let x = FramedElement { base: iv(&[(0, 1, 1, 3), (2, 3, 1, 1)]), frame: vec![true, false] };
        assert_eq!(op.encode(&x), "0/1,1/3;2/3,1/1|r,e");
        assert_eq!(op.decode(&op.encode(&x)).unwrap(), x);
        assert_eq!(op.from_json(&op.to_json(&x)).unwrap(), x);
    }
}
