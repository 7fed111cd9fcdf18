use crate::coding::Bitstream;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PCC1";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 8;

/// `"PCC1" | 0x01 | bit length (u64, big-endian) | payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcContainer {
    payload: Bitstream,
}

impl PcContainer {
    pub fn new(payload: Bitstream) -> Self {
        PcContainer { payload }
    }

    pub fn payload(&self) -> &Bitstream {
        &self.payload
    }

    /// Payload length in bits, header excluded.
    pub fn bit_length(&self) -> u64 {
        self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.as_bytes().len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.payload.len().to_be_bytes());
        out.extend_from_slice(self.payload.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(Error::CorruptStream("bad magic".into()));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::CorruptStream("truncated header".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::CorruptStream(format!("unsupported version {}", bytes[4])));
        }
        let bit_length = u64::from_be_bytes(bytes[5..HEADER_LEN].try_into().unwrap());
        let payload = Bitstream::from_parts(bytes[HEADER_LEN..].to_vec(), bit_length)?;
        Ok(PcContainer { payload })
    }
}
