//! Deterministic work counters.
//!
//! Every measurable unit of engine work is tallied here: automaton moves,
//! pattern emissions, byte comparisons in the single-pattern matchers, and
//! build-time work. Counters are architecture-independent and bit-exact
//! across runs, so they can stand in for instruction counts in benchmarks.

use std::ops::{Add, AddAssign, Sub};

/// Tally of engine work, one field per event class. All events cost one unit.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CostCounters {
    /// Successful automaton transitions (one per consumed input byte).
    pub goto_moves: u64,
    /// Failure-link traversals during automaton search.
    pub fail_moves: u64,
    /// Match events reported by automaton search.
    pub output_emissions: u64,
    /// Byte comparisons performed by the naive and Boyer-Moore matchers.
    pub byte_cmps: u64,
    /// Build-time work: trie node creations and failure-queue operations.
    pub build_units: u64,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weighted total with unit weights.
    pub fn total(&self) -> u64 {
        self.goto_moves + self.fail_moves + self.output_emissions + self.byte_cmps + self.build_units
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }
}

impl Add for CostCounters {
    type Output = CostCounters;

    fn add(self, rhs: CostCounters) -> CostCounters {
        CostCounters {
            goto_moves: self.goto_moves + rhs.goto_moves,
            fail_moves: self.fail_moves + rhs.fail_moves,
            output_emissions: self.output_emissions + rhs.output_emissions,
            byte_cmps: self.byte_cmps + rhs.byte_cmps,
            build_units: self.build_units + rhs.build_units,
        }
    }
}

impl AddAssign for CostCounters {
    fn add_assign(&mut self, rhs: CostCounters) {
        *self = *self + rhs;
    }
}

impl Sub for CostCounters {
    type Output = CostCounters;

    fn sub(self, rhs: CostCounters) -> CostCounters {
        CostCounters {
            goto_moves: self.goto_moves - rhs.goto_moves,
            fail_moves: self.fail_moves - rhs.fail_moves,
            output_emissions: self.output_emissions - rhs.output_emissions,
            byte_cmps: self.byte_cmps - rhs.byte_cmps,
            build_units: self.build_units - rhs.build_units,
        }
    }
}
