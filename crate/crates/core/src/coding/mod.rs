//! Bit-level primitives: an MSB-first bitstream, an exact-integer arithmetic
//! coder that can be flushed mid-stream, and the Elias delta code.

pub mod arith;
mod bitstream;
pub mod elias;

pub use arith::{ArithDecoder, ArithEncoder, SymbolInterval, MAX_TOTAL};
pub use bitstream::{BitReader, Bitstream};
