use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_bias, LabError, Result};

/// A point of the hypercube `{-1, +1}^n`, packed one bit per coordinate.
///
/// Coordinate `i` lives at word `i / 64`, bit `i % 64`; a set bit means `+1`.
/// Bits past `n` in the last word are kept clear so that equality, hashing
/// and popcounts never see them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl Configuration {
    pub fn all_minus(n: usize) -> Self {
        Configuration { n, words: vec![0; word_count(n)] }
    }

    pub fn all_plus(n: usize) -> Self {
        let mut c = Configuration { n, words: vec![u64::MAX; word_count(n)] };
        c.clear_tail();
        c
    }

    /// Builds a configuration from signs; any positive entry is `+1`.
    pub fn from_signs(signs: &[i8]) -> Self {
        let mut c = Self::all_minus(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            if s > 0 {
                c.words[i / 64] |= 1 << (i % 64);
            }
        }
        c
    }

    /// Decodes the integer code used by truth tables: coordinate `i`
    /// contributes bit `i`, set for `+1`.
    pub fn from_code(n: usize, code: u64) -> Self {
        assert!(n <= 64, "codes address at most 64 coordinates");
        let mut c = Self::all_minus(n);
        if n > 0 {
            c.words[0] = code;
            c.clear_tail();
        }
        c
    }

    /// Inverse of [`Configuration::from_code`].
    pub fn code(&self) -> u64 {
        assert!(self.n <= 64, "codes address at most 64 coordinates");
        self.words.first().copied().unwrap_or(0)
    }

    /// Uniform sample when `p == 0.5`, otherwise each coordinate is `+1`
    /// independently with probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        check_bias(p)?;
        let mut c = Self::all_minus(n);
        c.fill_random(p, rng);
        Ok(c)
    }

    pub(crate) fn fill_random<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) {
        if p == 0.5 {
            for w in &mut self.words {
                *w = rng.random();
            }
        } else {
            for w in &mut self.words {
                *w = 0;
            }
            for i in 0..self.n {
                if rng.random_bool(p) {
                    self.words[i / 64] |= 1 << (i % 64);
                }
            }
        }
        self.clear_tail();
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `true` when coordinate `i` is `+1`. Panics if `i >= n`.
    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        assert!(i < self.n, "coordinate {i} out of range for arity {}", self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn sign(&self, i: usize) -> i8 {
        if self.is_plus(i) {
            1
        } else {
            -1
        }
    }

    pub fn get(&self, i: usize) -> Result<i8> {
        if i < self.n {
            Ok(self.sign(i))
        } else {
            Err(LabError::IndexOutOfRange { index: i, n: self.n })
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, plus: bool) {
        assert!(i < self.n, "coordinate {i} out of range for arity {}", self.n);
        let mask = 1u64 << (i % 64);
        if plus {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Flips coordinate `i` in place and returns its new value (`true` for `+1`).
    #[inline]
    pub fn toggle(&mut self, i: usize) -> bool {
        assert!(i < self.n, "coordinate {i} out of range for arity {}", self.n);
        let w = &mut self.words[i / 64];
        *w ^= 1 << (i % 64);
        *w >> (i % 64) & 1 == 1
    }

    /// `ω^i`: a copy with coordinate `i` flipped.
    pub fn flip(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(LabError::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = self.clone();
        out.toggle(i);
        Ok(out)
    }

    /// `-ω`: every sign reversed.
    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        out.negate_in_place();
        out
    }

    pub fn negate_in_place(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.clear_tail();
    }

    /// Number of `+1` coordinates.
    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sum of the coordinates as signs.
    pub fn sign_sum(&self) -> i64 {
        2 * self.count_plus() as i64 - self.n as i64
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.n != other.n {
            return Err(LabError::ArityMismatch { expected: self.n, found: other.n });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Number of `+1` coordinates in `[start, start + len)`.
    #[inline]
    pub fn count_plus_range(&self, start: usize, len: usize) -> u32 {
        debug_assert!(start + len <= self.n);
        let mut total = 0;
        let mut pos = start;
        let end = start + len;
        while pos < end {
            let take = (end - pos).min(64);
            total += self.extract(pos, take).count_ones();
            pos += take;
        }
        total
    }

    /// The `len <= 64` bits starting at `start`, coordinate `start` in bit 0.
    #[inline]
    pub fn extract(&self, start: usize, len: usize) -> u64 {
        debug_assert!(len <= 64 && start + len <= self.n);
        if len == 0 {
            return 0;
        }
        let word = start / 64;
        let offset = start % 64;
        let mut bits = self.words[word] >> offset;
        if offset + len > 64 {
            bits |= self.words[word + 1] << (64 - offset);
        }
        if len < 64 {
            bits &= (1u64 << len) - 1;
        }
        bits
    }

    /// Signs as `+1 / -1`, index 0 first.
    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.is_plus(i) { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

/// Parses the fixture form: one `+` or `-` per coordinate, index 0 leftmost.
impl FromStr for Configuration {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|ch| match ch {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(LabError::Parse(format!("unexpected character {other:?} in configuration"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(Self::from_signs(&signs))
    }
}
