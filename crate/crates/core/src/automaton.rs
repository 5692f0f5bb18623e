//! Multi-pattern string matching over byte strings: a trie with failure
//! links built breadth-first, searched in a single pass over the text.
//!
//! The automaton is deliberately kept in explicit goto/failure form rather
//! than flattened to a DFA: search cost decomposes into goto moves and
//! failure moves, which the bench harness records separately. Goto edges
//! are stored sparsely per state; the root answers every byte (missing
//! edges loop back to the root) so a search can never dead-end.
//!
//! Patterns are ASCII case-folded at build time. Callers wanting
//! case-insensitive search fold the text themselves; callers needing
//! case-sensitive confirmation verify matches against the raw bytes
//! afterwards (see the engine).

use crate::counters::CostCounters;
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

/// Dense pattern handle: the i-th pattern passed to [`AcAutomaton::build`]
/// gets id i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u32);

impl PatternId {
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

/// One pattern occurrence: `end_index` is the 0-based index of the last
/// matched byte in the searched text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchEvent {
    pub pattern_id: PatternId,
    pub end_index: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("empty pattern set")]
    EmptyPatternSet,
    #[error("empty pattern at index {0}")]
    EmptyPattern(usize),
}

/// Map ASCII uppercase to lowercase; all other bytes pass through.
#[inline]
pub fn fold_byte(b: u8) -> u8 {
    if (0x41..=0x5a).contains(&b) {
        b + 0x20
    } else {
        b
    }
}

/// ASCII case-fold a byte string.
pub fn fold_bytes(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().copied().map(fold_byte).collect()
}

#[derive(Debug, Clone)]
struct State {
    children: BTreeMap<u8, u32>,
    fail: u32,
    depth: u32,
    /// Pattern ids for every pattern that is a suffix of this state's path,
    /// ascending. Merged from the failure chain during construction.
    outputs: Vec<PatternId>,
}

impl State {
    fn new(depth: u32) -> Self {
        State { children: BTreeMap::new(), fail: 0, depth, outputs: Vec::new() }
    }
}

/// Immutable multi-pattern search automaton.
#[derive(Debug, Clone)]
pub struct AcAutomaton {
    states: Vec<State>,
    pattern_lens: Vec<u32>,
    build_cost: CostCounters,
}

impl AcAutomaton {
    /// Build the automaton from a non-empty set of non-empty patterns.
    ///
    /// Patterns are case-folded before insertion; duplicates are allowed and
    /// each id is reported independently. Construction work (trie node
    /// creations plus failure-queue operations) is recorded in the returned
    /// automaton's build cost.
    pub fn build<P: AsRef<[u8]>>(patterns: &[P]) -> Result<AcAutomaton, AutomatonError> {
        if patterns.is_empty() {
            return Err(AutomatonError::EmptyPatternSet);
        }
        let mut cost = CostCounters::new();
        let mut states = vec![State::new(0)];
        cost.build_units += 1; // root
        let mut pattern_lens = Vec::with_capacity(patterns.len());

        for (id, pattern) in patterns.iter().enumerate() {
            let pattern = pattern.as_ref();
            if pattern.is_empty() {
                return Err(AutomatonError::EmptyPattern(id));
            }
            pattern_lens.push(pattern.len() as u32);
            let mut cur = 0u32;
            for &raw in pattern {
                let b = fold_byte(raw);
                let next = match states[cur as usize].children.get(&b) {
                    Some(&n) => n,
                    None => {
                        let depth = states[cur as usize].depth + 1;
                        let n = states.len() as u32;
                        states.push(State::new(depth));
                        cost.build_units += 1;
                        states[cur as usize].children.insert(b, n);
                        n
                    }
                };
                cur = next;
            }
            states[cur as usize].outputs.push(PatternId(id as u32));
        }

        // Breadth-first failure links; outputs are merged down the failure
        // chain so each state's set is complete. Enqueue and dequeue each
        // count one build unit.
        let mut queue = VecDeque::new();
        let depth1: Vec<u32> = states[0].children.values().copied().collect();
        for child in depth1 {
            states[child as usize].fail = 0;
            queue.push_back(child);
            cost.build_units += 1;
        }
        while let Some(cur) = queue.pop_front() {
            cost.build_units += 1;
            let edges: Vec<(u8, u32)> =
                states[cur as usize].children.iter().map(|(&b, &n)| (b, n)).collect();
            for (b, child) in edges {
                let mut f = states[cur as usize].fail;
                let fail = loop {
                    if let Some(&n) = states[f as usize].children.get(&b) {
                        break n;
                    }
                    if f == 0 {
                        break 0;
                    }
                    f = states[f as usize].fail;
                };
                states[child as usize].fail = fail;
                let inherited = states[fail as usize].outputs.clone();
                let own = &mut states[child as usize].outputs;
                *own = merge_sorted(own, &inherited);
                queue.push_back(child);
                cost.build_units += 1;
            }
        }

        Ok(AcAutomaton { states, pattern_lens, build_cost: cost })
    }

    /// Find every occurrence of every pattern in `text`.
    ///
    /// Events come back in nondecreasing `end_index` order with ties broken
    /// by ascending pattern id. Counters: one goto move per consumed byte
    /// (the root's implicit self-loop counts), one fail move per
    /// failure-link traversal, one output emission per event.
    pub fn search(&self, text: &[u8], counters: &mut CostCounters) -> Vec<MatchEvent> {
        let mut events = Vec::new();
        let mut state = 0u32;
        for (i, &b) in text.iter().enumerate() {
            loop {
                if let Some(&next) = self.states[state as usize].children.get(&b) {
                    state = next;
                    counters.goto_moves += 1;
                    break;
                }
                if state == 0 {
                    counters.goto_moves += 1;
                    break;
                }
                state = self.states[state as usize].fail;
                counters.fail_moves += 1;
            }
            for &pid in &self.states[state as usize].outputs {
                events.push(MatchEvent { pattern_id: pid, end_index: i });
                counters.output_emissions += 1;
            }
        }
        events
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_lens.len()
    }

    pub fn pattern_len(&self, id: PatternId) -> usize {
        self.pattern_lens[id.as_usize()] as usize
    }

    /// Snapshot of the construction cost, the zero-packet intercept of a
    /// cumulative-cost curve.
    pub fn build_cost(&self) -> CostCounters {
        self.build_cost
    }

    /// Goto edge lookup (no root fallback), for inspection and tests.
    pub fn goto_edge(&self, state: usize, byte: u8) -> Option<usize> {
        self.states[state].children.get(&byte).map(|&n| n as usize)
    }

    pub fn fail_link(&self, state: usize) -> usize {
        self.states[state].fail as usize
    }

    pub fn trie_depth(&self, state: usize) -> usize {
        self.states[state].depth as usize
    }

    pub fn outputs_at(&self, state: usize) -> &[PatternId] {
        &self.states[state].outputs
    }

    /// Follow goto edges (no failure fallback) from the root along `path`.
    pub fn trie_state(&self, path: &[u8]) -> Option<usize> {
        let mut cur = 0usize;
        for &raw in path {
            cur = self.goto_edge(cur, fold_byte(raw))?;
        }
        Some(cur)
    }

    /// Human-readable state table. Debugging aid with no stability guarantee.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            let _ = write!(out, "state {} depth {} fail {} outputs {:?} edges [", i, s.depth, s.fail, s.outputs.iter().map(|p| p.0).collect::<Vec<_>>());
            for (j, (b, n)) in s.children.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:#04x}->{}", b, n);
            }
            out.push_str("]\n");
        }
        out
    }
}

fn merge_sorted(a: &[PatternId], b: &[PatternId]) -> Vec<PatternId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
