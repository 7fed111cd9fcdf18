use crate::error::{Error, Result};

/// Append-only bit sequence, most significant bit first within each byte.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: u64,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes` holding exactly `len` meaningful bits. The padding of the
    /// last byte must be zero.
    pub fn from_parts(bytes: Vec<u8>, len: u64) -> Result<Self> {
        let need = len.div_ceil(8);
        if bytes.len() as u64 != need {
            return Err(Error::CorruptStream(format!(
                "{} payload bytes for {len} bits (expected {need})",
                bytes.len()
            )));
        }
        let spare = (need * 8 - len) as u32;
        if spare > 0 && bytes[bytes.len() - 1] & ((1u8 << spare) - 1) != 0 {
            return Err(Error::CorruptStream("nonzero padding bits".into()));
        }
        Ok(Bitstream { bytes, len })
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let offset = (self.len % 8) as u32;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len += 1;
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for k in (0..n).rev() {
            self.push((value >> k) & 1 == 1);
        }
    }

    pub fn push_repeat(&mut self, bit: bool, count: u64) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    /// Bit at `pos`; positions at or past the end read as zero.
    #[inline]
    pub fn bit_or_zero(&self, pos: u64) -> bool {
        pos < self.len && self.bytes[(pos / 8) as usize] & (0x80 >> (pos % 8)) != 0
    }

    pub fn get(&self, pos: u64) -> Option<bool> {
        (pos < self.len).then(|| self.bit_or_zero(pos))
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { stream: self, pos: 0 }
    }
}

/// Read cursor over a [`Bitstream`]; it never moves past the end.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    stream: &'a Bitstream,
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn stream(&self) -> &'a Bitstream {
        self.stream
    }

    #[inline]
    pub fn position(&self) -> u64 {
        self.pos
    }

    #[inline]
    pub fn remaining(&self) -> u64 {
        self.stream.len - self.pos
    }

    pub fn seek(&mut self, pos: u64) -> Result<()> {
        if pos > self.stream.len {
            return Err(Error::CorruptStream(format!(
                "seek to bit {pos} past the end ({})",
                self.stream.len
            )));
        }
        self.pos = pos;
        Ok(())
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let bit = self
            .stream
            .get(self.pos)
            .ok_or_else(|| Error::CorruptStream("unexpected end of bitstream".into()))?;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        if self.remaining() < n as u64 {
            return Err(Error::CorruptStream("unexpected end of bitstream".into()));
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.stream.bit_or_zero(self.pos) as u64;
            self.pos += 1;
        }
        Ok(v)
    }
}
