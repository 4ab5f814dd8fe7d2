//! Packed bit vectors used for codewords and feedback sequences.

use std::fmt;

const WORD: usize = 64;

/// Fixed-length bit vector packed into little-endian `u64` words.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut r = BitRow {
            words: vec![u64::MAX; len.div_ceil(WORD)],
            len,
        };
        r.clear_tail();
        r
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut r = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                r.set(i, true);
            }
        }
        r
    }

    /// Parses a string of `0`/`1` characters, ignoring anything else.
    pub fn from_str01(s: &str) -> Self {
        let bits: Vec<bool> = s
            .chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        Self::from_bools(&bits)
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert_eq!(words.len(), len.div_ceil(WORD));
        let mut r = BitRow { words, len };
        r.clear_tail();
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i % WORD);
        if v {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn or_assign(&mut self, other: &BitRow) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn or(&self, other: &BitRow) -> BitRow {
        let mut r = self.clone();
        r.or_assign(other);
        r
    }

    pub fn not(&self) -> BitRow {
        let mut r = BitRow {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        r.clear_tail();
        r
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    /// Mask of valid bits for word `i`.
    #[inline]
    pub(crate) fn word_mask(&self, i: usize) -> u64 {
        let last = self.words.len() - 1;
        let rem = self.len % WORD;
        if i == last && rem != 0 {
            (1u64 << rem) - 1
        } else {
            u64::MAX
        }
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.len().checked_sub(1) {
            let m = self.word_mask(last);
            self.words[last] &= m;
        }
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bits_stay_clear() {
        let r = BitRow::ones(70);
        assert_eq!(r.count_ones(), 70);
        assert_eq!(r.not().count_ones(), 0);
        let z = BitRow::zeros(70).not();
        assert_eq!(z.count_ones(), 70);
    }

    #[test]
    fn iter_ones_matches_get() {
        let r = BitRow::from_str01("0110 0000 0001");
        assert_eq!(r.iter_ones().collect::<Vec<_>>(), vec![1, 2, 11]);
        assert_eq!(r.len(), 12);
    }
}
