//! Binary RIS phase configurations.
//!
//! Element `i` carries one bit. Bit `0` leaves the reflection phase at 0
//! (coefficient `+1`), bit `1` shifts it by π (coefficient `-1`).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigurationError {
    #[error("invalid character {0:?} in bit-string (expected '0' or '1')")]
    InvalidBit(char),
    #[error("invalid hex digit {0:?}")]
    InvalidHex(char),
}

/// One binary phase-shift vector `x` of length `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RisConfiguration {
    bits: Vec<bool>,
}

/// One Bernoulli(`p`) draw from a single 32-bit word: true when the word is
/// below `p·2³²`. `p` is effectively quantized to multiples of 2⁻³².
/// `p ≤ 0` and `p ≥ 1` are decided without drawing.
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    BernoulliThreshold::new(p).draw(rng)
}

/// Precomputed form of [`bernoulli`] for repeated draws at one `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BernoulliThreshold {
    Never,
    Always,
    Below(u32),
}

impl BernoulliThreshold {
    pub(crate) fn new(p: f64) -> Self {
        if p <= 0.0 {
            BernoulliThreshold::Never
        } else if p >= 1.0 {
            BernoulliThreshold::Always
        } else {
            // p·2³² < 2³² here, and a zero threshold draws and rejects
            BernoulliThreshold::Below((p * 4_294_967_296.0) as u32)
        }
    }

    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> bool {
        match self {
            BernoulliThreshold::Never => false,
            BernoulliThreshold::Always => true,
            BernoulliThreshold::Below(t) => rng.next_u32() < t,
        }
    }
}

impl RisConfiguration {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    /// Builds from `0`/`1` integers; any nonzero value counts as `1`.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self { bits: bits.iter().map(|&b| b != 0).collect() }
    }

    /// Element `i` takes bit `i` of `value` (LSB = element 0).
    pub fn from_index(value: u64, n: usize) -> Self {
        Self { bits: (0..n).map(|i| i < 64 && (value >> i) & 1 == 1).collect() }
    }

    /// Uniform random configuration. Each bit is drawn as `u < 0.5` so the
    /// stream consumption matches a cross-entropy sample at `P = 0.5`.
    /// Uniform over `{0,1}^N`; each bit is drawn with [`bernoulli`].
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self { bits: (0..n).map(|_| bernoulli(rng, 0.5)).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// Reflection coefficient `Φ_nn` of element `i`: `+1` or `-1`.
    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        1.0 - 2.0 * f64::from(u8::from(self.bits[i]))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `"0110..."`, character `i` is element `i`.
    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Hex packing of the configuration read as an integer with element 0 in
    /// the least significant bit. Most significant digit first, zero padded
    /// to `ceil(N / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.bits.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, k| {
                    let i = 4 * d + k;
                    acc | (u32::from(i < self.bits.len() && self.bits[i]) << k)
                });
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(hex: &str, n: usize) -> Result<Self, ConfigurationError> {
        let mut bits = vec![false; n];
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or(ConfigurationError::InvalidHex(c))?;
            for k in 0..4 {
                let i = 4 * d + k;
                if i < n {
                    bits[i] = (nibble >> k) & 1 == 1;
                }
            }
        }
        Ok(Self { bits })
    }
}

impl FromStr for RisConfiguration {
    type Err = ConfigurationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ConfigurationError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

impl fmt::Display for RisConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl From<Vec<bool>> for RisConfiguration {
    fn from(bits: Vec<bool>) -> Self {
        Self::new(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_is_lsb_first() {
        // elements 0 and 5 set -> 0b10_0001 = 0x21
        let x = RisConfiguration::from_bits(&[1, 0, 0, 0, 0, 1]);
        assert_eq!(x.to_hex(), "21");
        assert_eq!(RisConfiguration::from_bits(&[1, 0, 0]).to_hex(), "1");
        assert_eq!(RisConfiguration::zeros(0).to_hex(), "");
    }

    #[test]
    fn bit_string_is_element_order() {
        let x = RisConfiguration::from_bits(&[1, 0]);
        assert_eq!(x.to_bit_string(), "10");
        assert_eq!("10".parse::<RisConfiguration>().unwrap(), x);
        assert!("12".parse::<RisConfiguration>().is_err());
    }

    #[test]
    fn signs_follow_phase_convention() {
        let x = RisConfiguration::from_bits(&[0, 1]);
        assert_eq!(x.sign(0), 1.0);
        assert_eq!(x.sign(1), -1.0);
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..80)) {
            let x = RisConfiguration::new(bits);
            let back = RisConfiguration::from_hex(&x.to_hex(), x.len()).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn index_round_trip(value in 0u64..(1 << 20)) {
            let x = RisConfiguration::from_index(value, 20);
            let back = u64::from_str_radix(&x.to_hex(), 16).unwrap();
            prop_assert_eq!(back, value);
        }
    }
}
