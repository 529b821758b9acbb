//! Feasible-set polytopes of implicit linear systems `A x = B y` with
//! box-bounded `y`, evaluated to a user-chosen accuracy by an iterative
//! convex-hull method, plus exact and sampling baselines and a
//! musculoskeletal wrench-capacity layer.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod chull;
pub mod error;
pub mod ichm;
pub mod lp;
pub mod msk;
pub mod numerics;

pub use error::{Error, Result};
