//! Language reward: binary purity gate over banned code-point ranges.
//!
//! A completion scores 1.0 iff no character falls in a banned range. Text
//! is NFC-normalized before scanning so precomposed and decomposed forms
//! of Vietnamese diacritics classify identically; the scan itself is over
//! Unicode scalar values, never bytes or grapheme clusters.

use crate::config::CodePointRange;
use crate::{Error, Result};
use unicode_normalization::UnicodeNormalization;

/// Banned ranges in lookup form: sorted by lower bound, pairwise disjoint.
#[derive(Debug, Clone)]
pub struct BannedSet {
    ranges: Vec<CodePointRange>,
}

impl BannedSet {
    pub fn new(ranges: &[CodePointRange]) -> Result<Self> {
        let mut ranges = ranges.to_vec();
        ranges.sort_by_key(|r| (r.low, r.high));
        for r in &ranges {
            if r.low > r.high {
                return Err(Error::Config(format!(
                    "banned range [{:04X}, {:04X}] has low > high",
                    r.low, r.high
                )));
            }
        }
        for pair in ranges.windows(2) {
            if pair[1].low <= pair[0].high {
                return Err(Error::Config(format!(
                    "banned ranges [{:04X}, {:04X}] and [{:04X}, {:04X}] overlap",
                    pair[0].low, pair[0].high, pair[1].low, pair[1].high
                )));
            }
        }
        Ok(Self { ranges })
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Binary search over interval starts: the only candidate interval is
    /// the last one whose low bound does not exceed the code point.
    pub fn contains_char(&self, c: char) -> bool {
        let cp = c as u32;
        let idx = self.ranges.partition_point(|r| r.low <= cp);
        idx > 0 && self.ranges[idx - 1].contains(cp)
    }
}

/// True iff any scalar value of the NFC-normalized text is banned.
pub fn contains_banned(text: &str, set: &BannedSet) -> bool {
    if set.is_empty() {
        return false;
    }
    text.nfc().any(|c| set.contains_char(c))
}

/// 1.0 iff the text contains no banned character, else 0.0.
pub fn language_reward(text: &str, set: &BannedSet) -> f64 {
    if contains_banned(text, set) {
        0.0
    } else {
        1.0
    }
}
