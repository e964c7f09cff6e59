//! Deterministic toolkit for randomness-rate amplification experiments on
//! finite bit sequences.
//!
//! The crate is organized around one end-to-end transformation: two
//! bounded-prefix bit oracles are split into blocks by an exactly computed
//! [`schedule`], each block pair is pushed through a brute-force-certified
//! regular color table ([`regular`]), and the concatenated block outputs form
//! a sequence whose compression-estimated randomness rate can be profiled
//! with [`estimate`]. The [`pipeline`] module ties the pieces together and
//! exposes the a-priori query bound that makes the transformation a bounded
//! (truth-table style) oracle reduction.
//!
//! Everything in this crate is pure computation over explicit inputs: all
//! randomness is derived from caller-provided seeds, and identical inputs
//! produce bit-identical outputs on every platform. IO, file formats, and the
//! command-line surface live in the companion `ratelift-cli` crate.
//!
//! The crate is `no_std` (it requires `alloc`); tests build with `std`.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod estimate;
pub mod pipeline;
pub mod regular;
pub mod schedule;
pub mod sources;

pub use sources::BitString;

/// SplitMix64 step, used wherever the crate derives one seed from another.
///
/// The constants are the reference ones from Steele, Lea and Flood's
/// generator; the function is a bijection on `u64`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
