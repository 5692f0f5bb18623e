//! Signature-based network intrusion detection engine.
//!
//! The pipeline mirrors a classic signature IDS: a rules file parses into a
//! [`rules::RuleSet`], compiles into an [`engine::Detector`] holding four
//! protocol-partitioned multi-pattern automata, and inspects packets
//! decoded from capture files, emitting [`engine::Alert`]s. All engine work
//! is tallied in deterministic [`counters::CostCounters`], which the
//! [`bench`] harness turns into cumulative-cost reports instead of
//! wall-clock timings.

pub mod automaton;
pub mod bench;
pub mod counters;
pub mod engine;
pub mod matchers;
pub mod packet;
pub mod rules;

pub use counters::CostCounters;
pub use engine::{Alert, Detector};
pub use packet::{ParsedPacket, PacketProto};
pub use rules::{Rule, RuleSet};
