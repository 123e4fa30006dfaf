//! Irregular turbo codes built from a single recursive systematic convolutional
//! (RSC) constituent.
//!
//! Each information bit is repeated a profile-dependent number of times (its
//! *degree*), the repeated stream is randomly interleaved and fed to one 8-state
//! UMTS RSC encoder, and the parity is punctured to the target rate. Decoding runs
//! a single Log-MAP SISO per iteration; the copies of every information bit
//! exchange extrinsic information between passes. A profile where every bit has
//! degree 2 is the regular turbo code in its one-encoder form and serves as the
//! baseline.
//!
//! The crate is organized bottom-up:
//!
//! - [`profile`]: degree profiles, repetition maps, puncturing and rate arithmetic
//! - [`interleave`]: seeded random permutations
//! - [`rsc`]: the UMTS 13/15 trellis and terminated encoder
//! - [`siso`]: the Log-MAP (BCJR) soft-input soft-output decoder
//! - [`codec`]: the irregular encoder and the iterative single-SISO decoder
//! - [`phy`]: Gray-mapped BPSK/QPSK/16QAM/64QAM, AWGN and soft demapping
//! - [`sim`]: Monte Carlo BER/FER sweeps, throughput and channel capacity
//!
//! ```
//! use irturbo::codec::{Codec, CodecConfig};
//!
//! let config = CodecConfig::new(64, "2:0.85,7:0.15".parse()?, "11101101110".parse()?);
//! let codec = Codec::new(config)?;
//! let bits = vec![1u8; 64];
//! let frame = codec.encode(&bits)?;
//! // Noiseless BPSK LLRs, bit 0 -> +L.
//! let llrs: Vec<f64> = frame.to_bits().iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
//! let result = codec.decode(&codec.split_llrs(&llrs)?, None)?;
//! assert_eq!(result.decisions, bits);
//! # Ok::<(), irturbo::Error>(())
//! ```

pub mod codec;
mod error;
pub mod interleave;
pub mod oracle;
pub mod phy;
pub mod profile;
pub mod rsc;
pub mod selftest;
pub mod sim;
pub mod siso;

pub use error::{Error, Result};

/// A hard bit, always 0 or 1.
pub type Bit = u8;
