//! Bit sequences and their ASCII `0`/`1` file format.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A sequence of bits stored one per byte (`0` or `1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("bit value {bad}")));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    /// Parses `0`/`1` characters; whitespace is ignored.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!(
                    "unexpected character {other:?} in bitstream"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(u8::from(bit));
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn to_ascii(&self) -> String {
        self.0
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    /// Packs eight bits per byte, first bit in the most significant
    /// position; a trailing partial byte is zero-padded.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &b)| acc | (b << (7 - k)))
            })
            .collect()
    }

    pub fn write_ascii(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_ascii())?;
        Ok(())
    }

    pub fn read_ascii(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_ascii(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_roundtrip() {
        let bits = BitSequence::parse_ascii("1011 0010\n").unwrap();
        assert_eq!(bits.len(), 8);
        assert_eq!(bits.to_ascii(), "10110010");
        assert_eq!(bits.ones(), 4);
        assert!(BitSequence::parse_ascii("10x").is_err());
        assert!(BitSequence::new(vec![0, 2]).is_err());
    }

    #[test]
    fn packing() {
        let bits = BitSequence::parse_ascii("101100101").unwrap();
        assert_eq!(bits.to_packed_bytes(), vec![0b1011_0010, 0b1000_0000]);
    }
}
