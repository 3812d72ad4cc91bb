//! Attainability of payoff vectors in two-player repeated games with vector
//! payoffs played in continuous time.
//!
//! The crate decides whether Player 1 can drive the cumulative payoff to a
//! target vector (with certificates or concrete counter-witnesses), and
//! simulates the block strategies that do the driving.

pub mod catalog;
pub mod discrete;
pub mod checker;
pub mod cli;
pub mod engine;
pub mod error;
pub mod format;
pub mod game;
pub mod lp;
pub mod poly;
pub mod scenarios;
pub mod solver;
pub mod sphere;
pub mod strategies;

pub use error::{Error, Result};
pub use game::{Direction, Game, MatrixGame, MixedAction, Norm};
