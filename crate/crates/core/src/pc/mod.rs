//! The Pattern Censoring code.
//!
//! Each message symbol is replaced by its dictionary rank, or by the escape
//! rank 0 on its first occurrence. The censored sequence is arithmetic coded
//! under a KT mixture over `{0, ..., K}`; every escape flushes the coder and is
//! followed by the Elias codeword of the new symbol. After the last symbol a
//! final escape and the codeword of 0 terminate the stream.

mod container;
mod dictionary;
mod kt;

pub use container::{PcContainer, MAGIC, VERSION};
pub use dictionary::Dictionary;
pub use kt::KtState;

use crate::coding::{elias, ArithDecoder, ArithEncoder, Bitstream, MAX_TOTAL};
use crate::error::{Error, Result};
use crate::numeric::{idealized_elias_bits, NeumaierSum};

/// Largest message symbol.
pub const MAX_SYMBOL: u64 = 1 << 62;

/// Longest message whose terminal KT denominator `2n + K + 1 <= 3n + 1` still
/// fits the coder precision.
pub const MAX_MESSAGE_LEN: usize = ((MAX_TOTAL - 1) / 3) as usize;

fn check_symbol(x: u64) -> Result<()> {
    if x == 0 || x > MAX_SYMBOL {
        return Err(Error::InvalidSymbol(x));
    }
    Ok(())
}

/// Output of [`censor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Censored {
    pub ranks: Vec<usize>,
    /// first occurrences, in order
    pub redacted: Vec<u64>,
    pub dictionary: Dictionary,
}

pub fn censor(symbols: &[u64]) -> Result<Censored> {
    let mut dictionary = Dictionary::new();
    let mut ranks = Vec::with_capacity(symbols.len());
    let mut redacted = Vec::new();
    for &x in symbols {
        check_symbol(x)?;
        match dictionary.rank_of(x) {
            Some(r) => ranks.push(r),
            None => {
                ranks.push(0);
                redacted.push(x);
                dictionary.insert(x);
            }
        }
    }
    Ok(Censored { ranks, redacted, dictionary })
}

/// One-pass PC encoder.
#[derive(Debug, Clone, Default)]
pub struct PcEncoder {
    dictionary: Dictionary,
    kt: KtState,
    coder: ArithEncoder,
    out: Bitstream,
    trace: Option<Vec<u64>>,
}

impl PcEncoder {
    pub fn new() -> Self {
        PcEncoder { dictionary: Dictionary::new(), ..Default::default() }
    }

    /// Encoder that records [`KtState::digest`] after every symbol.
    pub fn traced() -> Self {
        let mut enc = Self::new();
        enc.trace = Some(vec![enc.kt.digest()]);
        enc
    }

    pub fn kt(&self) -> &KtState {
        &self.kt
    }

    pub fn push(&mut self, x: u64) -> Result<()> {
        check_symbol(x)?;
        if self.kt.i() as usize >= MAX_MESSAGE_LEN {
            return Err(Error::LengthLimitExceeded { len: self.kt.i() as usize + 1, max: MAX_MESSAGE_LEN });
        }
        match self.dictionary.rank_of(x) {
            Some(r) => {
                self.coder.encode(self.kt.interval(r)?, &mut self.out)?;
                self.kt.update(r)?;
            }
            None => {
                self.escape(x)?;
                self.dictionary.insert(x);
                self.kt.update(0)?;
            }
        }
        if let Some(t) = self.trace.as_mut() {
            t.push(self.kt.digest());
        }
        Ok(())
    }

    fn escape(&mut self, payload: u64) -> Result<()> {
        self.coder.encode(self.kt.interval(0)?, &mut self.out)?;
        self.coder.flush(&mut self.out);
        elias::encode(payload, &mut self.out);
        Ok(())
    }

    pub fn finish(mut self) -> Result<(PcContainer, Option<Vec<u64>>)> {
        self.escape(0)?;
        Ok((PcContainer::new(self.out), self.trace))
    }
}

pub fn encode(symbols: &[u64]) -> Result<PcContainer> {
    if symbols.len() > MAX_MESSAGE_LEN {
        return Err(Error::LengthLimitExceeded { len: symbols.len(), max: MAX_MESSAGE_LEN });
    }
    let mut enc = PcEncoder::new();
    for &x in symbols {
        enc.push(x)?;
    }
    Ok(enc.finish()?.0)
}

/// Encodes and returns the state digest at every symbol boundary.
pub fn encode_traced(symbols: &[u64]) -> Result<(PcContainer, Vec<u64>)> {
    let mut enc = PcEncoder::traced();
    for &x in symbols {
        enc.push(x)?;
    }
    let (c, t) = enc.finish()?;
    Ok((c, t.unwrap_or_default()))
}

pub fn decode(container: &PcContainer) -> Result<Vec<u64>> {
    decode_inner(container, None)
}

/// Decodes and returns the state digest at every symbol boundary.
pub fn decode_traced(container: &PcContainer) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut trace = Vec::new();
    let out = decode_inner(container, Some(&mut trace))?;
    Ok((out, trace))
}

fn decode_inner(container: &PcContainer, mut trace: Option<&mut Vec<u64>>) -> Result<Vec<u64>> {
    let stream = container.payload();
    let mut dictionary = Dictionary::new();
    let mut kt = KtState::new();
    let mut out = Vec::new();
    let mut dec = ArithDecoder::new(stream, 0);
    if let Some(t) = trace.as_deref_mut() {
        t.push(kt.digest());
    }
    loop {
        let rank = dec.decode(kt.total(), |c| kt.lookup(c))?;
        if rank > 0 {
            if out.len() >= MAX_MESSAGE_LEN {
                return Err(Error::CorruptStream("message exceeds the length limit".into()));
            }
            out.push(dictionary.symbol_of(rank).expect("rank checked by lookup"));
            kt.update(rank)?;
        } else {
            let mut reader = stream.reader();
            reader.seek(dec.finish_segment()?)?;
            let v = elias::decode(&mut reader)?;
            if v == 0 {
                if reader.remaining() != 0 {
                    return Err(Error::CorruptStream("trailing bits after termination".into()));
                }
                return Ok(out);
            }
            if v > MAX_SYMBOL || dictionary.rank_of(v).is_some() || out.len() >= MAX_MESSAGE_LEN {
                return Err(Error::CorruptStream(format!("invalid redacted symbol {v}")));
            }
            dictionary.insert(v);
            kt.update(0)?;
            out.push(v);
            dec.resync(reader.position());
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(kt.digest());
        }
    }
}

/// How first occurrences are charged in [`ideal_codelength`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EliasCost {
    /// bit length of the codewords actually written
    #[default]
    Realized,
    /// `1 + log2(j v 1) + 2 log2(1 + log2(j v 1))`
    Idealized,
}

/// Flush-free code length of a message, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CodeLength {
    /// `-sum log2` of the KT predictive masses, terminal escape included
    pub mixture_bits: f64,
    pub elias_bits: f64,
}

impl CodeLength {
    pub fn total(&self) -> f64 {
        self.mixture_bits + self.elias_bits
    }
}

pub fn elias_cost(v: u64, cost: EliasCost) -> f64 {
    match cost {
        EliasCost::Realized => elias::len(v) as f64,
        EliasCost::Idealized => idealized_elias_bits(v),
    }
}

pub fn ideal_codelength(symbols: &[u64], cost: EliasCost) -> Result<CodeLength> {
    let mut dictionary = Dictionary::new();
    let mut kt = KtState::new();
    let mut mixture = NeumaierSum::new();
    let mut elias_bits = NeumaierSum::new();
    let mut charge = |kt: &KtState, rank: usize| -> Result<()> {
        let (num, den) = kt.predictive(rank)?;
        mixture.add((den as f64 / num as f64).log2());
        Ok(())
    };
    for &x in symbols {
        check_symbol(x)?;
        let rank = match dictionary.rank_of(x) {
            Some(r) => r,
            None => {
                elias_bits.add(elias_cost(x, cost));
                dictionary.insert(x);
                0
            }
        };
        charge(&kt, rank)?;
        kt.update(rank)?;
    }
    charge(&kt, 0)?;
    elias_bits.add(elias_cost(0, cost));
    Ok(CodeLength { mixture_bits: mixture.value(), elias_bits: elias_bits.value() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABRACADABRA: [u64; 11] = [1, 2, 3, 1, 4, 1, 5, 1, 2, 3, 1];

    #[test]
    fn censor_examples() {
        let c = censor(&ABRACADABRA).unwrap();
        assert_eq!(c.ranks, vec![0, 0, 0, 1, 0, 1, 0, 1, 2, 3, 1]);
        assert_eq!(c.redacted, vec![1, 2, 3, 4, 5]);
        let entries: Vec<_> = c.dictionary.entries().collect();
        assert_eq!(entries, vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]);
        let c = censor(&[7, 7, 7]).unwrap();
        assert_eq!((c.ranks, c.redacted), (vec![0, 1, 1], vec![7]));
        assert_eq!(censor(&[1, 2, 3]).unwrap().ranks, vec![0, 0, 0]);
        assert_eq!(censor(&[3, 0]), Err(Error::InvalidSymbol(0)));
    }

    #[test]
    fn empty_message() {
        let c = encode(&[]).unwrap();
        assert!(c.bit_length() <= 5);
        assert_eq!(decode(&c).unwrap(), Vec::<u64>::new());
        let ideal = ideal_codelength(&[], EliasCost::Realized).unwrap();
        assert_eq!((ideal.mixture_bits, ideal.elias_bits), (0.0, 1.0));
    }

    #[test]
    fn single_symbol_ideal_length() {
        let ideal = ideal_codelength(&[7], EliasCost::Realized).unwrap();
        assert!((ideal.mixture_bits - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert_eq!(ideal.elias_bits, (elias::len(7) + 1) as f64);
    }

    #[test]
    fn abracadabra_round_trip_and_length() {
        let (c, enc_trace) = encode_traced(&ABRACADABRA).unwrap();
        let (dec, dec_trace) = decode_traced(&c).unwrap();
        assert_eq!(dec, ABRACADABRA);
        assert_eq!(enc_trace, dec_trace);
        let ideal = ideal_codelength(&ABRACADABRA, EliasCost::Realized).unwrap().total();
        let actual = c.bit_length() as f64;
        assert!(ideal <= actual && actual <= ideal + 3.0 * 7.0, "{actual} vs {ideal}");
    }

    #[test]
    fn constant_run_gets_cheap() {
        let msg = vec![7u64; 1000];
        let c = encode(&msg).unwrap();
        assert_eq!(decode(&c).unwrap(), msg);
        let ideal = ideal_codelength(&msg, EliasCost::Realized).unwrap();
        assert!((c.bit_length() as f64) <= ideal.total() + 3.0 * 2.0);
        // logarithmic growth: per-symbol cost vanishes
        let longer = ideal_codelength(&vec![7u64; 8000], EliasCost::Realized).unwrap();
        assert!(ideal.mixture_bits / 1000.0 < 0.05);
        assert!(longer.mixture_bits - ideal.mixture_bits < 3.0 * 3.0 * 1.5);
    }

    #[test]
    fn oversized_symbols_rejected() {
        assert_eq!(encode(&[MAX_SYMBOL + 1]), Err(Error::InvalidSymbol(MAX_SYMBOL + 1)));
        let c = encode(&[MAX_SYMBOL, 1]).unwrap();
        assert_eq!(decode(&c).unwrap(), vec![MAX_SYMBOL, 1]);
    }

    #[test]
    fn container_bytes_round_trip() {
        let c = encode(&ABRACADABRA).unwrap();
        let back = PcContainer::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(decode(&back).unwrap(), ABRACADABRA);
    }
}
