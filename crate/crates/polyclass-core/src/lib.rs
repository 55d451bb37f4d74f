// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact classification of multisorted Boolean clones up to minion homomorphism.
//!
//! This crate decides, for a finite family of binary relations between Boolean
//! sorts (and, via translation, for finite structures whose relations have
//! two-element projections), which canonical minion core the associated clone
//! of idempotent polymorphisms is equivalent to, and it produces
//! machine-checkable witness homomorphisms in both directions.
//!
//! # Key concepts
//!
//! * **Truth tables** ([`boolfun`]): Boolean operations of arity `n` stored as
//!   `2^n`-bit masks, with the minor (variable identification/permutation)
//!   operations, duality, and the "triangle" relation `f ⊲ g` that drives the
//!   whole classification.
//! * **Multisorted operations and relations** ([`multisorted`]): tuples of
//!   operations acting sort-wise, preservation of typed binary relations,
//!   polymorphism enumeration, and the idempotent core of a structure.
//! * **Descriptions** ([`descriptions`]): finite constraint systems over
//!   abstract symbols (`⊲` and `=` constraints with optional dualization) that
//!   present such clones syntactically, plus the rewriting pipeline that puts
//!   every description into *reduced* form.
//! * **Canonical cores** ([`canon`]): the minions `T`, `A_k`, `B_k`, `C_k`,
//!   `D_k`, `B_∞`, `C_∞`, `D_∞` that appear as minion cores, their defining
//!   chains, the identities characterising them, and the full homomorphism
//!   order between them.
//! * **Classification** ([`classify`]): chain rank, the collapse of a reduced
//!   description onto its canonical core, explicit term witnesses for the
//!   homomorphisms in both directions, and end-to-end verified reports.
//! * **Truncated minions** ([`mincore`]): brute-force oracles over minions
//!   truncated at a small arity cap — homomorphism search, endomorphism
//!   enumeration and core computation — used to cross-check the symbolic
//!   classification.
//! * **Translation** ([`translate`]): the reduction from finite structures
//!   with small (two-element) relation projections to the multisorted Boolean
//!   setting, and back.
//!
//! The crate is `no_std` (with `alloc`); all I/O, file formats and the command
//! line live in the companion crate `polyclass-cli`.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boolfun;
pub mod canon;
pub mod classify;
pub mod descriptions;
pub mod error;
pub mod mincore;
pub mod multisorted;
pub mod translate;

pub use error::{Error, Result};
