//! Subcommand implementations.
//!
//! Input paths are validated up front: a rules file, capture, or spec that
//! cannot be opened or parsed is a usage error (exit 2) and produces no
//! output file. Failures while writing results are I/O errors (exit 3).

use crate::genspec::GenSpecFile;
use nids_core::bench::{emit_csv_all, run_algo_compare, run_engine_bench, BenchReport};
use nids_core::counters::CostCounters;
use nids_core::engine::{Alert, Detector};
use nids_core::packet::{decode, gen_capture, read_capture, PacketProto, ParsedPacket};
use nids_core::rules::{parse_ruleset, RuleSet, Variables, VarValue};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Parse repeated `NAME=VALUE` variable bindings.
pub fn parse_vars(pairs: &[String]) -> Result<Variables, CliError> {
    let mut vars = Variables::new();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("--var needs NAME=VALUE, got \"{}\"", pair)))?;
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(usage(format!("bad variable name \"{}\"", name)));
        }
        let value = VarValue::parse(value).map_err(|e| usage(format!("--var {}: {}", name, e)))?;
        vars.insert(name.to_string(), value);
    }
    Ok(vars)
}

fn load_ruleset(path: &Path, vars: &Variables) -> Result<RuleSet, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| usage(format!("cannot read rules file {}: {}", path.display(), e)))?;
    let text = String::from_utf8_lossy(&bytes);
    parse_ruleset(&text, vars).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

/// `check`: report parse/skip/error counts and the protocol partition.
/// Exit 0 when at least one rule parsed.
pub fn cmd_check(rules_path: &Path, var_args: &[String]) -> Result<u8, CliError> {
    let vars = parse_vars(var_args)?;
    let rs = load_ruleset(rules_path, &vars)?;
    let [tcp, udp, icmp, ip] = rs.protocol_counts();
    println!(
        "parsed={} skipped={} tcp={} udp={} icmp={} ip={}",
        rs.rules.len(),
        rs.skipped.len(),
        tcp,
        udp,
        icmp,
        ip
    );
    let mut by_reason: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, reason) in &rs.skipped {
        *by_reason.entry(reason.as_str()).or_default() += 1;
    }
    for (reason, count) in by_reason {
        println!("skip[{}]={}", reason, count);
    }
    if !rs.errors.is_empty() {
        println!("errors={}", rs.errors.len());
        for (line, msg) in &rs.errors {
            eprintln!("error line {}: {}", line, msg);
        }
    }
    Ok(if rs.rules.is_empty() { 2 } else { 0 })
}

fn compile_detector(rules_path: &Path, var_args: &[String]) -> Result<Detector, CliError> {
    let vars = parse_vars(var_args)?;
    let rs = load_ruleset(rules_path, &vars)?;
    Detector::compile(rs).map_err(|e| usage(format!("cannot compile rules: {}", e)))
}

struct CaptureScan {
    packets: Vec<ParsedPacket>,
    records: u64,
    decode_errors: u64,
    truncated: bool,
}

fn read_packets(pcap_path: &Path) -> Result<CaptureScan, CliError> {
    let file = fs::File::open(pcap_path)
        .map_err(|e| usage(format!("cannot open capture {}: {}", pcap_path.display(), e)))?;
    let mut reader = read_capture(BufReader::new(file))
        .map_err(|e| usage(format!("{}: {}", pcap_path.display(), e)))?;
    let mut packets = Vec::new();
    let mut records = 0u64;
    let mut decode_errors = 0u64;
    for record in reader.by_ref() {
        let record = record.map_err(|e| usage(format!("{}: {}", pcap_path.display(), e)))?;
        let index = records;
        records += 1;
        match decode(record, index) {
            Ok(p) => packets.push(p),
            Err(_) => decode_errors += 1,
        }
    }
    Ok(CaptureScan { packets, records, decode_errors, truncated: reader.truncated() })
}

fn format_alert(alert: &Alert) -> String {
    let port = |p: Option<u16>| p.map(|v| v.to_string()).unwrap_or_else(|| "-".to_string());
    let mut hex = String::with_capacity(alert.payload.len() * 2);
    for b in &alert.payload {
        let _ = write!(hex, "{:02x}", b);
    }
    format!(
        "[{}] \"{}\" {} {}:{} -> {}:{} pkt={} payload={}",
        alert.sid,
        alert.msg,
        alert.proto,
        alert.src_ip,
        port(alert.src_port),
        alert.dst_ip,
        port(alert.dst_port),
        alert.packet_index,
        hex
    )
}

/// `scan`: inspect a capture and write one alert line per detection, in
/// packet order then sid order. Summary goes to stdout.
pub fn cmd_scan(
    rules_path: &Path,
    pcap_path: &Path,
    out_path: &Path,
    var_args: &[String],
) -> Result<u8, CliError> {
    let detector = compile_detector(rules_path, var_args)?;
    let scan = read_packets(pcap_path)?;
    if scan.truncated {
        eprintln!("warning: capture ends with a truncated record");
    }

    let mut counters = CostCounters::new();
    let mut out = String::new();
    let mut alert_count = 0u64;
    for packet in &scan.packets {
        if packet.proto == PacketProto::NonIp {
            continue;
        }
        for alert in detector.inspect(packet, &mut counters) {
            out.push_str(&format_alert(&alert));
            out.push('\n');
            alert_count += 1;
        }
    }
    fs::write(out_path, out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", out_path.display(), e)))?;
    println!(
        "packets={} decode_errors={} alerts={}",
        scan.records, scan.decode_errors, alert_count
    );
    Ok(0)
}

/// `bench`: emit a cumulative-cost CSV for the engine or the three-way
/// algorithm comparison.
pub fn cmd_bench(
    rules_path: &Path,
    pcap_path: &Path,
    out_path: &Path,
    var_args: &[String],
    interval: u64,
    compare: bool,
) -> Result<u8, CliError> {
    if interval == 0 {
        return Err(usage("--interval must be at least 1"));
    }
    let vars = parse_vars(var_args)?;
    let rs = load_ruleset(rules_path, &vars)?;
    let scan = read_packets(pcap_path)?;
    if scan.truncated {
        eprintln!("warning: capture ends with a truncated record");
    }
    if scan.decode_errors > 0 {
        eprintln!("warning: {} packets failed to decode and were skipped", scan.decode_errors);
    }

    let reports: Vec<BenchReport> = if compare {
        // One anchor pattern per rule, the same selection the engine uses:
        // longest content, earliest on ties.
        let patterns: Vec<Vec<u8>> = rs
            .rules
            .iter()
            .filter_map(|r| {
                r.contents
                    .iter()
                    .enumerate()
                    .max_by_key(|(i, c)| (c.bytes.len(), usize::MAX - i))
                    .map(|(_, c)| c.bytes.clone())
            })
            .collect();
        if patterns.is_empty() {
            return Err(usage("compare mode needs at least one rule with a content"));
        }
        run_algo_compare(&patterns, &scan.packets, interval)
            .map_err(|e| usage(format!("cannot build comparison automaton: {}", e)))?
    } else {
        let detector =
            Detector::compile(rs).map_err(|e| usage(format!("cannot compile rules: {}", e)))?;
        vec![run_engine_bench(&detector, scan.packets, interval)]
    };

    let csv = emit_csv_all(&reports);
    fs::write(out_path, &csv)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", out_path.display(), e)))?;
    println!("reports={} rows={}", reports.len(), csv.lines().count() - 1);
    Ok(0)
}

/// `gen`: produce a deterministic synthetic capture from a JSON spec.
pub fn cmd_gen(spec_path: &Path, seed: u64, out_path: &Path) -> Result<u8, CliError> {
    let text = fs::read_to_string(spec_path)
        .map_err(|e| usage(format!("cannot read spec {}: {}", spec_path.display(), e)))?;
    let file: GenSpecFile = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: {}", spec_path.display(), e)))?;
    let spec = file.into_spec().map_err(|e| usage(format!("{}: {}", spec_path.display(), e)))?;
    let capture = gen_capture(&spec, seed).map_err(|e| usage(e.to_string()))?;
    fs::write(out_path, &capture)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", out_path.display(), e)))?;
    println!("packets={} bytes={}", spec.count, capture.len());
    Ok(0)
}
