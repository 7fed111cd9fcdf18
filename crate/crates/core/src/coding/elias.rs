//! Elias delta code shifted by one, so that every `v >= 0` has a codeword:
//! `v` is sent as `gamma(L + 1)` followed by the low `L` bits of `w = v + 1`,
//! where `L = floor(log2 w)`.

use super::{BitReader, Bitstream};
use crate::error::{Error, Result};

#[inline]
fn floor_log2(w: u64) -> u32 {
    63 - w.leading_zeros()
}

/// Codeword length of `v` in bits.
pub fn len(v: u64) -> u32 {
    assert!(v < u64::MAX, "elias: value out of range");
    let l = floor_log2(v + 1);
    let m = floor_log2(l as u64 + 1);
    2 * m + 1 + l
}

pub fn encode(v: u64, out: &mut Bitstream) {
    assert!(v < u64::MAX, "elias: value out of range");
    let w = v + 1;
    let l = floor_log2(w);
    let m = floor_log2(l as u64 + 1);
    out.push_repeat(false, m as u64);
    out.push_bits(l as u64 + 1, m + 1);
    out.push_bits(w, l);
}

pub fn decode(input: &mut BitReader<'_>) -> Result<u64> {
    let mut m = 0u32;
    while !input.read_bit()? {
        m += 1;
        if m > 6 {
            return Err(Error::CorruptStream("elias length prefix too long".into()));
        }
    }
    let l_plus_one = (1u64 << m) | input.read_bits(m)?;
    if l_plus_one > 64 {
        return Err(Error::CorruptStream("elias length field exceeds 64".into()));
    }
    let l = (l_plus_one - 1) as u32;
    let w = (1u64 << l) | input.read_bits(l)?;
    Ok(w - 1)
}
