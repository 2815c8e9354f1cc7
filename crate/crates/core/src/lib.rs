//! Values, bounds and certificates for two-player nonlocal games, with
//! Feige's game and its repetitions as the worked instance.

pub mod error;
pub mod classical;
pub mod game;
pub mod hybrid;
pub mod linalg;
pub mod lp;
pub mod ncpoly;
pub mod npa;
pub mod quantum;
pub mod rational;
pub mod sdp;
pub mod strategies;

pub use error::{Error, Result};
pub use game::{Game, Relabeling};
pub use rational::Rational;
