//! Test support shared by the unit, property, and acceptance suites.
//!
//! Everything here is an independent second route: the oracles enumerate
//! positions directly with slice comparisons and never call into the
//! automaton, the Boyer-Moore tables, or the engine's verification path.

use nids_core::engine::header_match;
use nids_core::packet::{PacketProto, ParsedPacket};
use nids_core::rules::{
    Action, AddrKind, AddrSpec, ContentPattern, Direction, PortKind, PortSpec, Protocol, Rule,
    RuleHeader,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::net::Ipv4Addr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Multi-pattern matching oracle

/// Every (pattern, end_index) occurrence of the case-folded patterns in
/// `text`, found by testing each pattern at each position, ordered by
/// nondecreasing end index with ties on ascending pattern index.
pub fn brute_force_matches<P: AsRef<[u8]>>(patterns: &[P], text: &[u8]) -> Vec<(usize, usize)> {
    let folded: Vec<Vec<u8>> = patterns.iter().map(|p| lower(p.as_ref())).collect();
    let mut events = Vec::new();
    for end in 0..text.len() {
        for (id, pat) in folded.iter().enumerate() {
            if pat.is_empty() || pat.len() > end + 1 {
                continue;
            }
            let start = end + 1 - pat.len();
            if &text[start..=end] == pat.as_slice() {
                events.push((id, end));
            }
        }
    }
    events
}

fn lower(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().map(|b| b.to_ascii_lowercase()).collect()
}

// ---------------------------------------------------------------------------
// Content-window oracle

/// Reference evaluation of a content list against a payload under the
/// frozen window semantics, by direct occurrence enumeration.
///
/// Each content takes its first admissible occurrence: starts are
/// enumerated ascending from zero with plain slice comparisons, the window
/// predicates (offset/depth absolute, distance/within relative to the
/// previous end, plain continuation otherwise) are applied literally, and
/// the walk is greedy with no backtracking.
pub fn window_verify(contents: &[ContentPattern], payload: &[u8]) -> bool {
    let lowered = lower(payload);
    let mut prev_end = 0usize;
    for (idx, c) in contents.iter().enumerate() {
        let (hay, needle) = if c.nocase {
            (lowered.as_slice(), lower(&c.bytes))
        } else {
            (payload, c.bytes.clone())
        };
        let (min_start, end_cap): (usize, Option<usize>) =
            if c.offset.is_some() || c.depth.is_some() {
                let anchor0 = c.offset.unwrap_or(0) as usize;
                (anchor0, c.depth.map(|d| anchor0 + d as usize))
            } else if c.distance.is_some() || c.within.is_some() {
                (
                    prev_end + c.distance.unwrap_or(0) as usize,
                    c.within.map(|w| prev_end + w as usize),
                )
            } else if idx == 0 {
                (0, None)
            } else {
                (prev_end, None)
            };

        if needle.is_empty() || needle.len() > hay.len() {
            return false;
        }
        let mut found = None;
        for start in 0..=hay.len() - needle.len() {
            if start < min_start {
                continue;
            }
            if &hay[start..start + needle.len()] == needle.as_slice() {
                found = Some(start);
                break;
            }
        }
        match found {
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

/// Reference inspection: sids of every rule whose header accepts the
/// packet and whose contents pass [`window_verify`], ascending. No
/// automaton prefilter is involved.
pub fn inspect_oracle(rules: &[Rule], packet: &ParsedPacket) -> Vec<u32> {
    let mut sids: Vec<u32> = rules
        .iter()
        .filter(|r| header_match(&r.header, packet))
        .filter(|r| r.contents.is_empty() || window_verify(&r.contents, packet.payload()))
        .map(|r| r.sid)
        .collect();
    sids.sort_unstable();
    sids
}

// ---------------------------------------------------------------------------
// Random fixtures

/// Random patterns over an alphabet of the given size (drawn from byte 0
/// upward; size 256 means arbitrary bytes).
pub fn random_patterns(
    rng: &mut ChaCha8Rng,
    count: usize,
    len_range: (usize, usize),
    alphabet: usize,
) -> Vec<Vec<u8>> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(len_range.0..=len_range.1);
            random_text(rng, len, alphabet)
        })
        .collect()
}

pub fn random_text(rng: &mut ChaCha8Rng, len: usize, alphabet: usize) -> Vec<u8> {
    let base = if alphabet >= 2 { b'a' } else { 0 };
    (0..len)
        .map(|_| {
            if alphabet >= 256 {
                rng.gen()
            } else {
                base + rng.gen_range(0..alphabet) as u8
            }
        })
        .collect()
}

/// IPs and ports are drawn from a handful of networks and well-known
/// values shared with [`random_addr_spec`]/[`random_port_spec`], so header
/// matches come out both ways often.
fn random_ip(rng: &mut ChaCha8Rng) -> Ipv4Addr {
    match rng.gen_range(0..4) {
        0 => Ipv4Addr::new(10, rng.gen(), rng.gen(), rng.gen()),
        1 => Ipv4Addr::new(192, 168, rng.gen(), rng.gen()),
        2 => Ipv4Addr::new(172, 16 + rng.gen_range(0..16), rng.gen(), rng.gen()),
        _ => Ipv4Addr::from(rng.gen::<u32>()),
    }
}

fn random_port(rng: &mut ChaCha8Rng) -> u16 {
    match rng.gen_range(0..4) {
        0 => 80,
        1 => 443,
        2 => rng.gen_range(1000..2000),
        _ => rng.gen(),
    }
}

/// A synthetic packet with random endpoints and payload drawn over a
/// small alphabet so content hits are plentiful.
pub fn random_packet(rng: &mut ChaCha8Rng, index: u64, max_payload: usize) -> ParsedPacket {
    let proto = match rng.gen_range(0..4) {
        0 => PacketProto::Tcp,
        1 => PacketProto::Udp,
        2 => PacketProto::Icmp,
        _ => PacketProto::OtherIp,
    };
    let has_ports = matches!(proto, PacketProto::Tcp | PacketProto::Udp);
    let len = rng.gen_range(0..=max_payload);
    let src = random_ip(rng);
    let dst = random_ip(rng);
    ParsedPacket::from_parts(
        proto,
        src,
        dst,
        has_ports.then(|| random_port(rng)),
        has_ports.then(|| random_port(rng)),
        index,
        random_text(rng, len, 4),
    )
}

pub fn random_addr_spec(rng: &mut ChaCha8Rng) -> AddrSpec {
    let base = match rng.gen_range(0..5) {
        0 | 1 => AddrSpec::any(),
        2 => AddrSpec::cidr(Ipv4Addr::new(10, 0, 0, 0), 8),
        3 => AddrSpec::cidr(Ipv4Addr::new(192, 168, 0, 0), 16),
        _ => AddrSpec {
            negated: false,
            kind: AddrKind::List(vec![
                AddrSpec::cidr(Ipv4Addr::new(10, 0, 0, 0), 8),
                AddrSpec::cidr(Ipv4Addr::new(172, 16, 0, 0), 12),
            ]),
        },
    };
    let negate = !matches!(base.kind, AddrKind::Any) && rng.gen_bool(0.25);
    AddrSpec { negated: base.negated != negate, ..base }
}

pub fn random_port_spec(rng: &mut ChaCha8Rng) -> PortSpec {
    let base = match rng.gen_range(0..5) {
        0 | 1 => PortSpec::any(),
        2 => PortSpec::single(80),
        3 => PortSpec::single(443),
        _ => PortSpec { negated: false, kind: PortKind::Range(1000, 1999) },
    };
    let negate = !matches!(base.kind, PortKind::Any) && rng.gen_bool(0.25);
    PortSpec { negated: base.negated != negate, ..base }
}

/// A structurally valid random rule with 1..=3 contents.
pub fn random_rule(rng: &mut ChaCha8Rng, sid: u32, modifier_free: bool) -> Rule {
    let protocol = match rng.gen_range(0..4) {
        0 => Protocol::Tcp,
        1 => Protocol::Udp,
        2 => Protocol::Icmp,
        _ => Protocol::Ip,
    };
    Rule {
        header: RuleHeader {
            action: Action::Alert,
            protocol,
            src_addr: random_addr_spec(rng),
            src_port: random_port_spec(rng),
            direction: if rng.gen_bool(0.2) { Direction::Bi } else { Direction::Uni },
            dst_addr: random_addr_spec(rng),
            dst_port: random_port_spec(rng),
        },
        msg: format!("trial rule {}", sid),
        sid,
        contents: random_contents(rng, modifier_free),
    }
}

/// A random valid content list: 1..=3 contents over {a,b,c,d}, with
/// window modifiers drawn so the parse-time invariants hold. When
/// `modifier_free` is set, only `nocase` may appear.
pub fn random_contents(rng: &mut ChaCha8Rng, modifier_free: bool) -> Vec<ContentPattern> {
    let n = rng.gen_range(1..=3);
    let mut contents = Vec::with_capacity(n);
    for idx in 0..n {
        let len = rng.gen_range(1..=4);
        let mut c = ContentPattern::new(random_text(rng, len, 4));
        if rng.gen_bool(0.3) {
            c.nocase = true;
        }
        if !modifier_free {
            match rng.gen_range(0..4) {
                0 => {
                    // absolute window
                    if rng.gen_bool(0.7) {
                        c.offset = Some(rng.gen_range(0..6));
                    }
                    if rng.gen_bool(0.7) {
                        c.depth = Some(rng.gen_range(c.bytes.len() as u32..=c.bytes.len() as u32 + 8));
                    }
                }
                1 if idx > 0 => {
                    // relative window
                    if rng.gen_bool(0.7) {
                        c.distance = Some(rng.gen_range(0..4));
                    }
                    if rng.gen_bool(0.7) {
                        c.within = Some(rng.gen_range(c.bytes.len() as u32..=c.bytes.len() as u32 + 6));
                    }
                }
                _ => {}
            }
        }
        contents.push(c);
    }
    contents
}

/// Deterministic rule-file text with `n` parseable rules spanning all four
/// protocols, varied endpoints, contents, and modifiers, plus occasional
/// comments. Sids run 1..=n.
pub fn synthetic_ruleset_text(n: usize) -> String {
    const WORDS: [&str; 12] = [
        "exec", "passwd", "admin", "shell", "login", "probe", "flood", "xfer", "query", "token",
        "fetch", "crawl",
    ];
    let mut out = String::new();
    out.push_str("# synthetic ruleset\n");
    for i in 0..n {
        let sid = i + 1;
        let proto = ["tcp", "udp", "icmp", "ip"][i % 4];
        let word = WORDS[i % WORDS.len()];
        let dst_port = match i % 5 {
            0 => "80".to_string(),
            1 => "any".to_string(),
            2 => format!("{}:{}", 1000 + (i % 50) * 10, 1000 + (i % 50) * 10 + 9),
            3 => "!6000".to_string(),
            _ => ":1023".to_string(),
        };
        let dst_port = if proto == "icmp" || proto == "ip" { "any".to_string() } else { dst_port };
        let src_addr = match i % 4 {
            0 => "any".to_string(),
            1 => format!("10.{}.0.0/16", i % 200),
            2 => "!172.16.0.0/12".to_string(),
            _ => "[10.0.0.0/8,192.168.0.0/16]".to_string(),
        };
        let content = format!("{}-{:05}-sig", word, sid);
        let extras = match i % 7 {
            0 => " nocase;".to_string(),
            1 => format!(" offset:{};", i % 10),
            2 => format!(" depth:{};", content.len() + i % 8),
            3 => format!(" content:\"{}|0D 0A|\"; distance:1; within:{};", word, word.len() + 4),
            _ => String::new(),
        };
        out.push_str(&format!(
            "alert {proto} {src_addr} any -> any {dst_port} (msg:\"synthetic {word} {sid}\"; content:\"{content}\";{extras} sid:{sid};)\n"
        ));
        if i % 500 == 0 {
            out.push_str("# section marker\n");
        }
    }
    out
}
