//! Baseline single-pattern searchers: a naive scan and full Boyer-Moore
//! (bad character + strong good suffix).
//!
//! Both count byte comparisons into [`CostCounters::byte_cmps`] as their
//! single cost unit; table lookups and shifts are free. Results are
//! identical between the two: the smallest match start at or after `from`.

use crate::counters::CostCounters;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatcherError {
    #[error("empty pattern")]
    EmptyPattern,
}

/// Leftmost occurrence of `pattern` in `text` starting at or after `from`.
///
/// Textbook per-alignment scan; every byte comparison increments
/// `counters.byte_cmps`. `pattern` must be non-empty and `from <= text.len()`.
pub fn naive_find(
    pattern: &[u8],
    text: &[u8],
    from: usize,
    counters: &mut CostCounters,
) -> Option<usize> {
    debug_assert!(!pattern.is_empty(), "naive_find requires a non-empty pattern");
    let m = pattern.len();
    if m > text.len() {
        return None;
    }
    for start in from..=text.len() - m {
        let mut matched = true;
        for j in 0..m {
            counters.byte_cmps += 1;
            if text[start + j] != pattern[j] {
                matched = false;
                break;
            }
        }
        if matched {
            return Some(start);
        }
    }
    None
}

/// Precomputed Boyer-Moore shift tables for one pattern.
#[derive(Debug, Clone)]
pub struct BmTables {
    pattern: Vec<u8>,
    /// Last occurrence index of each byte in the pattern, -1 if absent.
    bad_char: [i32; 256],
    /// Strong good-suffix shifts, indexed by mismatch position + 1.
    /// Length is pattern length + 1; every entry is in 1..=pattern length.
    good_suffix: Vec<usize>,
}

impl BmTables {
    // The preprocessing below follows the textbook index form.
    #[allow(clippy::needless_range_loop)]
    pub fn build(pattern: &[u8]) -> Result<BmTables, MatcherError> {
        if pattern.is_empty() {
            return Err(MatcherError::EmptyPattern);
        }
        let m = pattern.len();

        let mut bad_char = [-1i32; 256];
        for (i, &b) in pattern.iter().enumerate() {
            bad_char[b as usize] = i as i32;
        }

        // Strong good-suffix preprocessing via widest borders.
        let mut shift = vec![0usize; m + 1];
        let mut border = vec![0usize; m + 2];
        let mut i = m;
        let mut j = m + 1;
        border[i] = j;
        while i > 0 {
            while j <= m && pattern[i - 1] != pattern[j - 1] {
                if shift[j] == 0 {
                    shift[j] = j - i;
                }
                j = border[j];
            }
            i -= 1;
            j -= 1;
            border[i] = j;
        }
        let mut j = border[0];
        for i in 0..=m {
            if shift[i] == 0 {
                shift[i] = j;
            }
            if i == j {
                j = border[j];
            }
        }
        debug_assert!(shift.iter().all(|&s| s >= 1 && s <= m));

        Ok(BmTables { pattern: pattern.to_vec(), bad_char, good_suffix: shift })
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn bad_char_index(&self, byte: u8) -> i32 {
        self.bad_char[byte as usize]
    }

    pub fn good_suffix_shifts(&self) -> &[usize] {
        &self.good_suffix
    }

    /// Leftmost occurrence at or after `from`, same contract as [`naive_find`].
    pub fn find(&self, text: &[u8], from: usize, counters: &mut CostCounters) -> Option<usize> {
        let m = self.pattern.len();
        if m > text.len() {
            return None;
        }
        let last = text.len() - m;
        let mut s = from;
        while s <= last {
            let mut j = m as isize - 1;
            while j >= 0 {
                counters.byte_cmps += 1;
                if self.pattern[j as usize] != text[s + j as usize] {
                    break;
                }
                j -= 1;
            }
            if j < 0 {
                return Some(s);
            }
            let bc = j - self.bad_char[text[s + j as usize] as usize] as isize;
            let gs = self.good_suffix[(j + 1) as usize] as isize;
            s += gs.max(bc).max(1) as usize;
        }
        None
    }
}
