//! Wang-tile engineering workbench: core algorithms.
//!
//! Everything in this crate is pure computation over immutable inputs, kept
//! `no_std`-compatible (`alloc` required). IO, file formats and the CLI live
//! in the companion `tileforge` crate.
//!
//! Module map:
//!
//! - [`tile`] — tiles, tile sets, finite patch tilings, backtracking search,
//!   torus periods, A/B density bounds, built-in example sets.
//! - [`macro_sim`] — macro-tiles, macro-colors, and finite-window checks of
//!   the simulation relation between tile sets.
//! - [`machine`], [`layout`], [`compiler`] — checker machines, wire/zone
//!   layout planning, and compilation of checkers into tile sets whose
//!   macro-tiles enforce the checker predicate.
//! - [`quine`] — the self-referential program construction on a tiny
//!   stack language with `GetText`/`Execute`.
//! - [`substitution`] — substitution rules, Thue-Morse machinery, shift
//!   agreement counts and aperiodicity measurement.
//! - [`rs`] — finite fields GF(2^t)/GF(p), Reed-Solomon checksums (direct
//!   and streaming) and erasure decoding.
//! - [`islands`] — hierarchical island/bi-island decomposition of dirty
//!   point sets, schedule validation, Bernoulli sampling, Monte Carlo.
//! - [`patcher`] — window robustification, hole filling, percolation
//!   patching and the rank-by-rank error-correction pipeline.
//! - [`zoom`] — exact arithmetic for variable zoom schedules, bit
//!   delegation, responsibility zones, checksum routes and field budgets.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod compiler;
pub mod islands;
pub mod layout;
pub mod machine;
pub mod macro_sim;
pub mod patcher;
pub mod quine;
pub mod rs;
pub mod stream;
pub mod substitution;
pub mod tile;
pub mod zoom;
