//! Binary arithmetic coder on 62-bit integer registers with E1/E2/E3
//! renormalization and a terminate-and-restart flush.
//!
//! A symbol with cumulative range `[lo, hi)` out of `total` narrows the current
//! range `r` to `[floor(r lo / total), floor(r lo / total) + floor(r (hi - lo) / total))`.
//! Rounding every width down keeps each coded width at or below its ideal
//! share, so a segment never costs fewer bits than its information content.
//! The price is a few unused code values between neighbours; the decoder
//! treats landing in one as corruption.

use super::Bitstream;
use crate::error::{Error, Result};

const PRECISION: u32 = 62;
const TOP: u64 = 1 << PRECISION;
const HALF: u64 = TOP >> 1;
const QUARTER: u64 = TOP >> 2;

/// Largest admissible interval total.
pub const MAX_TOTAL: u64 = 1 << 32;

/// Cumulative range `[lo, hi)` of one symbol out of `total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolInterval {
    pub lo: u64,
    pub hi: u64,
    pub total: u64,
}

impl SymbolInterval {
    pub fn new(lo: u64, hi: u64, total: u64) -> Result<Self> {
        if total > MAX_TOTAL {
            return Err(Error::PrecisionOverflow { total });
        }
        if !(lo < hi && hi <= total) {
            return Err(Error::Domain(format!("bad symbol interval [{lo}, {hi}) / {total}")));
        }
        Ok(SymbolInterval { lo, hi, total })
    }

    /// The certain event.
    pub const CERTAIN: SymbolInterval = SymbolInterval { lo: 0, hi: 1, total: 1 };

    /// Offset and width of the sub-range this symbol receives out of `range`.
    #[inline]
    fn scale(&self, range: u64) -> (u64, u64) {
        let r = range as u128;
        let start = r * self.lo as u128 / self.total as u128;
        let width = r * (self.hi - self.lo) as u128 / self.total as u128;
        (start as u64, width as u64)
    }
}

/// Encoder half of the coder. Bits are appended to a caller-owned [`Bitstream`].
#[derive(Debug, Clone)]
pub struct ArithEncoder {
    low: u64,
    high: u64,
    pending: u64,
}

impl Default for ArithEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithEncoder {
    pub fn new() -> Self {
        ArithEncoder { low: 0, high: TOP - 1, pending: 0 }
    }

    /// Current range width `high - low + 1`; above `2^60` between steps.
    pub fn range(&self) -> u64 {
        self.high - self.low + 1
    }

    pub fn encode(&mut self, iv: SymbolInterval, out: &mut Bitstream) -> Result<()> {
        if iv.total > MAX_TOTAL {
            return Err(Error::PrecisionOverflow { total: iv.total });
        }
        debug_assert!(iv.lo < iv.hi && iv.hi <= iv.total);
        let (start, width) = iv.scale(self.range());
        self.low += start;
        self.high = self.low + width - 1;
        loop {
            if self.high < HALF {
                self.emit(false, out);
            } else if self.low >= HALF {
                self.emit(true, out);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
        Ok(())
    }

    fn emit(&mut self, bit: bool, out: &mut Bitstream) {
        out.push(bit);
        out.push_repeat(!bit, self.pending);
        self.pending = 0;
    }

    /// Terminates the current segment: emits `pending + 2` bits that pin a
    /// code value inside the interval, then restarts from the full range.
    pub fn flush(&mut self, out: &mut Bitstream) {
        self.pending += 1;
        self.emit(self.low >= QUARTER, out);
        *self = ArithEncoder::new();
    }
}

/// Decoder half. It mirrors the encoder registers over a borrowed stream and
/// reads past the end as zeros; [`ArithDecoder::finish_segment`] checks the
/// flush bits and reports where the next segment starts.
#[derive(Debug, Clone)]
pub struct ArithDecoder<'a> {
    stream: &'a Bitstream,
    low: u64,
    high: u64,
    /// code value window aligned with `low`/`high`
    value: u64,
    pending: u64,
    /// absolute position of the first bit of this segment
    start: u64,
    /// bits the encoder has committed in this segment (excluding pending)
    committed: u64,
    /// absolute position of the next bit shifted into `value`
    next: u64,
}

impl<'a> ArithDecoder<'a> {
    /// Starts decoding a segment at bit `pos`.
    pub fn new(stream: &'a Bitstream, pos: u64) -> Self {
        let mut dec = ArithDecoder {
            stream,
            low: 0,
            high: TOP - 1,
            value: 0,
            pending: 0,
            start: pos,
            committed: 0,
            next: pos,
        };
        dec.resync(pos);
        dec
    }

    /// Restarts at bit `pos` with a fresh interval.
    pub fn resync(&mut self, pos: u64) {
        self.low = 0;
        self.high = TOP - 1;
        self.pending = 0;
        self.start = pos;
        self.committed = 0;
        self.value = 0;
        for k in 0..PRECISION as u64 {
            self.value = (self.value << 1) | self.stream.bit_or_zero(pos + k) as u64;
        }
        self.next = pos + PRECISION as u64;
    }

    /// Cumulative target in `[0, total)` selecting the next symbol.
    pub fn target(&self, total: u64) -> Result<u64> {
        if total > MAX_TOTAL {
            return Err(Error::PrecisionOverflow { total });
        }
        let range = (self.high - self.low + 1) as u128;
        let offset = (self.value - self.low) as u128;
        let c = ((offset + 1) * total as u128 - 1) / range;
        if c >= total as u128 {
            return Err(Error::CorruptStream("code value outside the coding interval".into()));
        }
        Ok(c as u64)
    }

    /// Narrows to the symbol chosen from [`ArithDecoder::target`].
    pub fn consume(&mut self, iv: SymbolInterval) -> Result<()> {
        let (start, width) = iv.scale(self.high - self.low + 1);
        let offset = self.value - self.low;
        if offset < start || offset - start >= width {
            return Err(Error::CorruptStream("code value in an unused gap".into()));
        }
        self.low += start;
        self.high = self.low + width - 1;
        loop {
            if self.high < HALF {
                self.committed += 1 + self.pending;
                self.pending = 0;
            } else if self.low >= HALF {
                self.committed += 1 + self.pending;
                self.pending = 0;
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.stream.bit_or_zero(self.next) as u64;
            self.next += 1;
        }
        Ok(())
    }

    /// Decodes one symbol: `lookup` maps a cumulative target to the symbol
    /// index and its interval.
    pub fn decode<F>(&mut self, total: u64, lookup: F) -> Result<usize>
    where
        F: FnOnce(u64) -> Result<(usize, SymbolInterval)>,
    {
        let c = self.target(total)?;
        let (k, iv) = lookup(c)?;
        debug_assert!(iv.lo <= c && c < iv.hi && iv.total == total);
        self.consume(iv)?;
        Ok(k)
    }

    /// Verifies the flush bits the encoder would have written for this
    /// segment and returns the position just past them.
    pub fn finish_segment(&self) -> Result<u64> {
        let flush_at = self.start + self.committed;
        let end = flush_at + self.pending + 2;
        if end > self.stream.len() {
            return Err(Error::CorruptStream("segment runs past the end of the stream".into()));
        }
        let first = self.low >= QUARTER;
        if self.stream.bit_or_zero(flush_at) != first
            || (flush_at + 1..end).any(|p| self.stream.bit_or_zero(p) == first)
        {
            return Err(Error::CorruptStream("non-canonical flush bits".into()));
        }
        Ok(end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode_all(symbols: &[SymbolInterval]) -> Bitstream {
        let mut out = Bitstream::new();
        let mut enc = ArithEncoder::new();
        for &iv in symbols {
            enc.encode(iv, &mut out).unwrap();
        }
        enc.flush(&mut out);
        out
    }

    fn ideal_bits(symbols: &[SymbolInterval]) -> f64 {
        symbols
            .iter()
            .map(|iv| -(((iv.hi - iv.lo) as f64) / iv.total as f64).log2())
            .sum()
    }

    /// Decodes `n` symbols from a fixed distribution given by cumulative counts.
    fn decode_fixed(stream: &Bitstream, cum: &[u64], n: usize) -> Result<(Vec<usize>, u64)> {
        let total = *cum.last().unwrap();
        let mut dec = ArithDecoder::new(stream, 0);
        let mut out = Vec::new();
        for _ in 0..n {
            let k = dec.decode(total, |c| {
                let k = cum.partition_point(|&x| x <= c) - 1;
                Ok((k, SymbolInterval::new(cum[k], cum[k + 1], total)?))
            })?;
            out.push(k);
        }
        Ok((out, dec.finish_segment()?))
    }

    #[test]
    fn certain_symbol_costs_only_the_flush() {
        let s = encode_all(&[SymbolInterval::CERTAIN; 50]);
        assert!(s.len() <= 2);
        let (dec, end) = decode_fixed(&s, &[0, 1], 50).unwrap();
        assert_eq!(dec, vec![0; 50]);
        assert_eq!(end, s.len());
    }

    #[test]
    fn equiprobable_pair() {
        let msg = [0usize, 1, 1, 0, 1, 0, 0, 1];
        let ivs: Vec<_> = msg.iter().map(|&k| SymbolInterval::new(k as u64, k as u64 + 1, 2).unwrap()).collect();
        let s = encode_all(&ivs);
        assert!(s.len() <= 10, "{}", s.len());
        assert_eq!(decode_fixed(&s, &[0, 1, 2], 8).unwrap().0, msg);
    }

    #[test]
    fn skewed_symbol_repeated() {
        let iv = SymbolInterval::new(0, 255, 256).unwrap();
        let s = encode_all(&[iv; 100]);
        let bound = (100.0 * (256.0f64 / 255.0).log2()).ceil() as u64 + 2;
        assert!(s.len() <= bound, "{} > {bound}", s.len());
    }

    #[test]
    fn empty_and_double_flush() {
        let mut out = Bitstream::new();
        let mut enc = ArithEncoder::new();
        enc.flush(&mut out);
        assert!(out.len() <= 2);
        let first = out.len();
        enc.flush(&mut out);
        assert!(out.len() - first <= 2);
        let dec = ArithDecoder::new(&out, 0);
        let mid = dec.finish_segment().unwrap();
        assert_eq!(mid, first);
        let dec = ArithDecoder::new(&out, mid);
        assert_eq!(dec.finish_segment().unwrap(), out.len());
    }

    #[test]
    fn overflowing_total_rejected() {
        assert_eq!(
            SymbolInterval::new(0, 1, MAX_TOTAL + 1),
            Err(Error::PrecisionOverflow { total: MAX_TOTAL + 1 })
        );
        let mut enc = ArithEncoder::new();
        let bad = SymbolInterval { lo: 0, hi: 1, total: MAX_TOTAL + 1 };
        assert!(enc.encode(bad, &mut Bitstream::new()).is_err());
        assert!(SymbolInterval::new(0, 1, MAX_TOTAL).is_ok());
    }

    #[test]
    fn segments_splice_at_exact_positions() {
        let cum = [0u64, 3, 4, 10];
        let msgs: [&[usize]; 3] = [&[0, 2, 2, 1], &[], &[1, 1, 1, 0, 2]];
        let mut out = Bitstream::new();
        let mut enc = ArithEncoder::new();
        for m in msgs {
            for &k in m {
                enc.encode(SymbolInterval::new(cum[k], cum[k + 1], 10).unwrap(), &mut out).unwrap();
            }
            enc.flush(&mut out);
            out.push_bits(0b101, 3);
        }
        let mut pos = 0;
        for m in msgs {
            let mut dec = ArithDecoder::new(&out, pos);
            for &k in m {
                let got = dec
                    .decode(10, |c| {
                        let k = cum.partition_point(|&x| x <= c) - 1;
                        Ok((k, SymbolInterval::new(cum[k], cum[k + 1], 10)?))
                    })
                    .unwrap();
                assert_eq!(got, k);
            }
            pos = dec.finish_segment().unwrap();
            let mut r = out.reader();
            r.seek(pos).unwrap();
            assert_eq!(r.read_bits(3).unwrap(), 0b101);
            pos += 3;
        }
        assert_eq!(pos, out.len());
    }

    #[test]
    fn segment_length_within_ceiling_plus_two() {
        // pseudo-random partitions with totals up to 2^32
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let len = (next() % 300) as usize;
            let ivs: Vec<_> = (0..len)
                .map(|_| {
                    let total = 1 + next() % MAX_TOTAL;
                    let lo = next() % total;
                    let hi = lo + 1 + next() % (total - lo);
                    SymbolInterval::new(lo, hi, total).unwrap()
                })
                .collect();
            let s = encode_all(&ivs);
            let ideal = ideal_bits(&ivs);
            assert!(s.len() as f64 >= ideal);
            assert!(s.len() as f64 <= ideal.ceil() + 2.0 + 1e-6 * len as f64, "{} vs {ideal}", s.len());
        }
    }
}
