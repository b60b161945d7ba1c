//! Construction, simulation and routing for ZSZ quantum LDPC codes.
//!
//! ZSZ codes are two-block group-algebra codes over the semidirect product
//! `Z_ell ⋊_q Z_m`; with `q = 1` they reduce to bivariate bicycle codes.
//! The crate covers the full pipeline from the group to experiments:
//!
//! - [`group`] and [`gf2`]: group arithmetic, regular representations and
//!   bit-packed GF(2) linear algebra.
//! - [`code`]: two-block and 4D toric CSS codes, logical bases, fixtures.
//! - [`graph`] and [`distance`]: structural analysis and distance bounds.
//! - [`noise`] and [`decoders`]: circuit-level Monte Carlo memory
//!   experiments with BP+OSD and passive greedy decoding.
//! - [`routing`]: grid-transfer move scripts for neutral-atom arrays.
//! - [`harness`]: experiment configuration, CSV output, threshold analysis.

pub mod code;
pub mod decoders;
pub mod distance;
pub mod gf2;
pub mod graph;
pub mod group;
pub mod harness;
pub mod noise;
pub mod par;
pub mod routing;

pub use code::{CodeFamily, CssCode};
pub use gf2::{BitMatrix, BitVec};
pub use group::{GroupAlgebraElement, GroupElement, GroupSpec};
