//! Exact computations with the Boardman–Vogt resolution `W𝒫` of a reduced
//! operad, the bimodule resolution `B𝒫`, maps out of them, and the
//! Swiss-Cheese actions on spaces of bimodule maps.

pub mod b;
pub mod bimodule;
pub mod catalog;
pub mod dot;
pub mod error;
pub mod mapping;
pub mod operads;
pub mod rational;
pub mod sample;
pub mod suites;
pub mod swiss_cheese;
pub mod symbolic;
pub mod text;
pub mod trees;
pub mod w;

pub use error::{Error, Result};
pub use rational::{rat, Rational};
