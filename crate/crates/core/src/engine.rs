//! Detection engine: compiles a ruleset into four protocol-partitioned
//! automata plus a verification index, then inspects decoded packets.
//!
//! Each rule with contents contributes one anchor pattern (its longest
//! content, ties going to the earliest) to its protocol group's automaton
//! as a case-folded prefilter. A packet's payload is searched against its
//! own protocol group and the `ip` group; candidate rules found through
//! anchors are then confirmed with full header matching and per-content
//! window verification. Rules without contents match on their header
//! alone.

use crate::automaton::{fold_bytes, AcAutomaton, AutomatonError, PatternId};
use crate::counters::CostCounters;
use crate::matchers::BmTables;
use crate::packet::{PacketProto, ParsedPacket};
use crate::rules::{ContentPattern, Protocol, Rule, RuleHeader, RuleSet};
use std::net::Ipv4Addr;

/// One detection event. Emitted at most once per (rule, packet) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alert {
    pub sid: u32,
    pub msg: String,
    pub proto: PacketProto,
    pub src_ip: Ipv4Addr,
    pub src_port: Option<u16>,
    pub dst_ip: Ipv4Addr,
    pub dst_port: Option<u16>,
    pub packet_index: u64,
    pub payload: Vec<u8>,
}

/// Where an automaton pattern came from: which rule, and which of its
/// contents is the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchor {
    pub rule_idx: usize,
    pub content_ordinal: usize,
}

#[derive(Debug, Default)]
struct Group {
    automaton: Option<AcAutomaton>,
    /// Indexed by the automaton's dense pattern ids.
    anchors: Vec<Anchor>,
    /// Rule indices with no contents, matched on header alone.
    header_only: Vec<usize>,
}

/// Immutable compiled ruleset, safe to share across concurrent searches.
#[derive(Debug)]
pub struct Detector {
    rules: Vec<Rule>,
    groups: [Group; 4],
    build_cost: CostCounters,
}

fn group_index(p: Protocol) -> usize {
    match p {
        Protocol::Tcp => 0,
        Protocol::Udp => 1,
        Protocol::Icmp => 2,
        Protocol::Ip => 3,
    }
}

const IP_GROUP: usize = 3;

impl Detector {
    /// Partition rules by protocol and build one automaton per group from
    /// the anchor contents. Groups without patterns stay empty and cost
    /// nothing to search.
    pub fn compile(rs: RuleSet) -> Result<Detector, AutomatonError> {
        let rules = rs.rules;
        let mut pending: [Vec<Vec<u8>>; 4] = Default::default();
        let mut groups: [Group; 4] = Default::default();

        for (idx, rule) in rules.iter().enumerate() {
            let g = group_index(rule.header.protocol);
            if rule.contents.is_empty() {
                groups[g].header_only.push(idx);
                continue;
            }
            let ordinal = anchor_ordinal(&rule.contents);
            pending[g].push(fold_bytes(&rule.contents[ordinal].bytes));
            groups[g].anchors.push(Anchor { rule_idx: idx, content_ordinal: ordinal });
        }

        let mut build_cost = CostCounters::new();
        for (g, patterns) in pending.iter().enumerate() {
            if patterns.is_empty() {
                continue;
            }
            let automaton = AcAutomaton::build(patterns)?;
            build_cost += automaton.build_cost();
            groups[g].automaton = Some(automaton);
        }
        Ok(Detector { rules, groups, build_cost })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Aggregate construction cost of the four automata.
    pub fn build_cost(&self) -> CostCounters {
        self.build_cost
    }

    pub fn automaton(&self, proto: Protocol) -> Option<&AcAutomaton> {
        self.groups[group_index(proto)].automaton.as_ref()
    }

    /// Anchor table for a group, indexed by pattern id.
    pub fn anchors(&self, proto: Protocol) -> &[Anchor] {
        &self.groups[group_index(proto)].anchors
    }

    pub fn anchor_for(&self, proto: Protocol, id: PatternId) -> Anchor {
        self.groups[group_index(proto)].anchors[id.as_usize()]
    }

    /// Rule indices evaluated on header match alone for a group.
    pub fn header_only(&self, proto: Protocol) -> &[usize] {
        &self.groups[group_index(proto)].header_only
    }

    /// Inspect one decoded packet, returning alerts sorted by sid.
    ///
    /// The payload is searched case-folded against the packet's protocol
    /// group and the `ip` group; candidates are confirmed by header match
    /// and content verification. Counters accumulate the automaton moves
    /// plus the verification byte comparisons.
    pub fn inspect(&self, p: &ParsedPacket, counters: &mut CostCounters) -> Vec<Alert> {
        let proto_group = match p.proto {
            PacketProto::Tcp => Some(group_index(Protocol::Tcp)),
            PacketProto::Udp => Some(group_index(Protocol::Udp)),
            PacketProto::Icmp => Some(group_index(Protocol::Icmp)),
            PacketProto::OtherIp => None,
            PacketProto::NonIp => return Vec::new(),
        };
        let payload = p.payload();
        let folded = fold_bytes(payload);

        let mut candidates: Vec<usize> = Vec::new();
        let search_group = |g: usize, counters: &mut CostCounters, out: &mut Vec<usize>| {
            if let Some(a) = &self.groups[g].automaton {
                for event in a.search(&folded, counters) {
                    out.push(self.groups[g].anchors[event.pattern_id.as_usize()].rule_idx);
                }
            }
        };
        if let Some(g) = proto_group {
            search_group(g, counters, &mut candidates);
        }
        search_group(IP_GROUP, counters, &mut candidates);
        candidates.sort_unstable();
        candidates.dedup();

        let mut alerts = Vec::new();
        for idx in candidates {
            let rule = &self.rules[idx];
            if header_match(&rule.header, p)
                && verify_contents(&rule.contents, payload, &folded, counters)
            {
                alerts.push(self.alert_for(rule, p));
            }
        }
        for &g in proto_group.iter().chain(std::iter::once(&IP_GROUP)) {
            for &idx in &self.groups[g].header_only {
                let rule = &self.rules[idx];
                if header_match(&rule.header, p) {
                    alerts.push(self.alert_for(rule, p));
                }
            }
        }
        alerts.sort_by_key(|a| a.sid);
        alerts
    }

    fn alert_for(&self, rule: &Rule, p: &ParsedPacket) -> Alert {
        Alert {
            sid: rule.sid,
            msg: rule.msg.clone(),
            proto: p.proto,
            src_ip: p.src_ip,
            src_port: p.src_port,
            dst_ip: p.dst_ip,
            dst_port: p.dst_port,
            packet_index: p.index,
            payload: p.payload().to_vec(),
        }
    }
}

/// Longest content wins; ties go to the earliest in rule order.
fn anchor_ordinal(contents: &[ContentPattern]) -> usize {
    let mut best = 0;
    for (i, c) in contents.iter().enumerate().skip(1) {
        if c.bytes.len() > contents[best].bytes.len() {
            best = i;
        }
    }
    best
}

/// Header five-tuple check. An `ip` rule accepts every IPv4 packet class;
/// tcp/udp/icmp require the exact protocol. `<>` rules also try the
/// swapped orientation, and port specs are vacuously true for portless
/// protocols.
pub fn header_match(h: &RuleHeader, p: &ParsedPacket) -> bool {
    let proto_ok = match h.protocol {
        Protocol::Ip => p.proto != PacketProto::NonIp,
        Protocol::Tcp => p.proto == PacketProto::Tcp,
        Protocol::Udp => p.proto == PacketProto::Udp,
        Protocol::Icmp => p.proto == PacketProto::Icmp,
    };
    if !proto_ok {
        return false;
    }
    let forward = h.src_addr.matches(p.src_ip)
        && h.src_port.matches(p.src_port)
        && h.dst_addr.matches(p.dst_ip)
        && h.dst_port.matches(p.dst_port);
    match h.direction {
        crate::rules::Direction::Uni => forward,
        crate::rules::Direction::Bi => {
            forward
                || (h.src_addr.matches(p.dst_ip)
                    && h.src_port.matches(p.dst_port)
                    && h.dst_addr.matches(p.src_ip)
                    && h.dst_port.matches(p.src_port))
        }
    }
}

/// Evaluate a rule's contents against a payload.
///
/// Contents are checked in rule order, greedily: each takes its first
/// admissible occurrence and later contents never backtrack to alternative
/// positions. `offset`/`depth` window a content absolutely from the
/// payload start; `distance`/`within` window it relative to the end of the
/// previous match; unmodified contents after the first continue from the
/// previous match's end. Matching uses Boyer-Moore on folded bytes for
/// `nocase` contents and on the raw bytes otherwise.
pub fn verify_rule(rule: &Rule, payload: &[u8], counters: &mut CostCounters) -> bool {
    let folded = fold_bytes(payload);
    verify_contents(&rule.contents, payload, &folded, counters)
}

fn verify_contents(
    contents: &[ContentPattern],
    payload: &[u8],
    folded: &[u8],
    counters: &mut CostCounters,
) -> bool {
    let mut prev_end = 0usize;
    for (idx, c) in contents.iter().enumerate() {
        if c.bytes.is_empty() {
            return false;
        }
        let (min_start, end_cap) = if c.uses_absolute_window() {
            let anchor0 = c.offset.unwrap_or(0) as usize;
            (anchor0, c.depth.map(|d| anchor0 + d as usize))
        } else if c.uses_relative_window() {
            (
                prev_end + c.distance.unwrap_or(0) as usize,
                c.within.map(|w| prev_end + w as usize),
            )
        } else if idx == 0 {
            (0, None)
        } else {
            (prev_end, None)
        };

        let (haystack, needle) = if c.nocase {
            (folded, fold_bytes(&c.bytes))
        } else {
            (payload, c.bytes.clone())
        };
        let tables = match BmTables::build(&needle) {
            Ok(t) => t,
            Err(_) => return false,
        };
        match tables.find(haystack, min_start, counters) {
            Some(start) => {
                let end = start + needle.len();
                if let Some(cap) = end_cap {
                    if end > cap {
                        return false;
                    }
                }
                prev_end = end;
            }
            None => return false,
        }
    }
    true
}
