//! Deterministic benchmark harness over the work counters.
//!
//! Reports are cumulative-cost curves sampled by packet count. The first
//! sample is always the zero-packet intercept carrying the build cost, the
//! analog of the one-time signature-tree construction. Counter totals are
//! exact, so sharded runs merge to the sequential totals and identical
//! inputs always produce byte-identical CSV.

use crate::automaton::{fold_bytes, AcAutomaton, AutomatonError};
use crate::counters::CostCounters;
use crate::engine::Detector;
use crate::matchers::{naive_find, BmTables};
use crate::packet::ParsedPacket;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    AcEngine,
    BmScan,
    NaiveScan,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::AcEngine => "ac_engine",
            Algo::BmScan => "bm_scan",
            Algo::NaiveScan => "naive_scan",
        }
    }
}

/// Cumulative state after `packets` packets. Counters include the build
/// cost, so the curve starts at the intercept and never decreases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub packets: u64,
    pub counters: CostCounters,
    pub alerts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchReport {
    pub algo: Algo,
    pub build_cost: CostCounters,
    pub samples: Vec<Sample>,
}

impl BenchReport {
    pub fn final_sample(&self) -> Sample {
        *self.samples.last().expect("reports always hold the intercept sample")
    }

    /// Work done on packets alone, with the build intercept removed.
    pub fn inspection_cost(&self) -> CostCounters {
        self.final_sample().counters - self.build_cost
    }
}

struct SampleTrack {
    interval: u64,
    samples: Vec<Sample>,
    processed: u64,
    alerts: u64,
}

impl SampleTrack {
    fn new(interval: u64, build_cost: CostCounters) -> Self {
        SampleTrack {
            interval: interval.max(1),
            samples: vec![Sample { packets: 0, counters: build_cost, alerts: 0 }],
            processed: 0,
            alerts: 0,
        }
    }

    fn record(&mut self, counters: CostCounters, new_alerts: u64) {
        self.processed += 1;
        self.alerts += new_alerts;
        if self.processed.is_multiple_of(self.interval) {
            self.samples.push(Sample { packets: self.processed, counters, alerts: self.alerts });
        }
    }

    fn finish(mut self, counters: CostCounters) -> Vec<Sample> {
        if self.samples.last().map(|s| s.packets) != Some(self.processed) {
            self.samples.push(Sample { packets: self.processed, counters, alerts: self.alerts });
        }
        self.samples
    }
}

/// Stream packets through a detector, snapshotting cumulative counters
/// every `sample_interval` packets and at the end.
pub fn run_engine_bench(
    detector: &Detector,
    packets: impl IntoIterator<Item = ParsedPacket>,
    sample_interval: u64,
) -> BenchReport {
    let build_cost = detector.build_cost();
    let mut counters = build_cost;
    let mut track = SampleTrack::new(sample_interval, build_cost);
    for packet in packets {
        let alerts = detector.inspect(&packet, &mut counters);
        track.record(counters, alerts.len() as u64);
    }
    BenchReport { algo: Algo::AcEngine, build_cost, samples: track.finish(counters) }
}

/// Run the three algorithms over identical payload streams: one automaton
/// over all patterns, per-pattern Boyer-Moore scans, and per-pattern naive
/// scans. All three work case-folded and count a hit per (packet, pattern)
/// pair, so their verdicts are directly comparable. Every pattern is
/// scanned in full for every payload; there is no early exit across
/// patterns.
pub fn run_algo_compare(
    patterns: &[Vec<u8>],
    packets: &[ParsedPacket],
    sample_interval: u64,
) -> Result<Vec<BenchReport>, AutomatonError> {
    let automaton = AcAutomaton::build(patterns)?;
    let folded_patterns: Vec<Vec<u8>> = patterns.iter().map(|p| fold_bytes(p)).collect();
    let tables: Vec<BmTables> = folded_patterns
        .iter()
        .map(|p| BmTables::build(p).expect("automaton build already rejected empty patterns"))
        .collect();
    let folded_payloads: Vec<Vec<u8>> = packets.iter().map(|p| fold_bytes(p.payload())).collect();

    let ac_build = automaton.build_cost();
    let mut ac_counters = ac_build;
    let mut ac_track = SampleTrack::new(sample_interval, ac_build);
    for payload in &folded_payloads {
        let events = automaton.search(payload, &mut ac_counters);
        let mut seen = vec![false; patterns.len()];
        let mut hits = 0u64;
        for e in events {
            if !seen[e.pattern_id.as_usize()] {
                seen[e.pattern_id.as_usize()] = true;
                hits += 1;
            }
        }
        ac_track.record(ac_counters, hits);
    }
    let ac_report =
        BenchReport { algo: Algo::AcEngine, build_cost: ac_build, samples: ac_track.finish(ac_counters) };

    let mut bm_counters = CostCounters::new();
    let mut bm_track = SampleTrack::new(sample_interval, CostCounters::new());
    for payload in &folded_payloads {
        let mut hits = 0u64;
        for t in &tables {
            if t.find(payload, 0, &mut bm_counters).is_some() {
                hits += 1;
            }
        }
        bm_track.record(bm_counters, hits);
    }
    let bm_report = BenchReport {
        algo: Algo::BmScan,
        build_cost: CostCounters::new(),
        samples: bm_track.finish(bm_counters),
    };

    let mut naive_counters = CostCounters::new();
    let mut naive_track = SampleTrack::new(sample_interval, CostCounters::new());
    for payload in &folded_payloads {
        let mut hits = 0u64;
        for pattern in &folded_patterns {
            if naive_find(pattern, payload, 0, &mut naive_counters).is_some() {
                hits += 1;
            }
        }
        naive_track.record(naive_counters, hits);
    }
    let naive_report = BenchReport {
        algo: Algo::NaiveScan,
        build_cost: CostCounters::new(),
        samples: naive_track.finish(naive_counters),
    };

    Ok(vec![ac_report, bm_report, naive_report])
}

pub const CSV_HEADER: &str =
    "algo,packets,goto_moves,fail_moves,output_emissions,byte_cmps,build_units,total,alerts";

/// Render one report as CSV: the fixed header then one row per sample.
/// ASCII, LF line endings, no locale formatting.
pub fn emit_csv(report: &BenchReport) -> String {
    emit_csv_all(std::slice::from_ref(report))
}

/// Render several reports into one CSV stream with a single header.
pub fn emit_csv_all(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for report in reports {
        for s in &report.samples {
            let c = s.counters;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                report.algo.name(),
                s.packets,
                c.goto_moves,
                c.fail_moves,
                c.output_emissions,
                c.byte_cmps,
                c.build_units,
                c.total(),
                s.alerts
            );
        }
    }
    out
}
