//! Property tests for the rule parser: canonical round-trips, content
//! decoding, and rejection of invariant-violating rules.

use nids_core::rules::{
    content_to_canonical, parse_content_arg, parse_rule, Action, AddrKind, AddrSpec,
    ContentPattern, Direction, ParseOutcome, PortKind, PortSpec, Protocol, Rule, RuleHeader,
    Variables,
};
use proptest::prelude::*;
use std::net::Ipv4Addr;

fn leaf_addr() -> impl Strategy<Value = AddrSpec> {
    prop_oneof![
        Just(AddrSpec::any()),
        (any::<u32>(), 0u8..=32, any::<bool>()).prop_map(|(ip, prefix, neg)| AddrSpec {
            negated: neg,
            kind: AddrKind::Cidr { addr: Ipv4Addr::from(ip), prefix },
        }),
    ]
}

fn addr_strategy() -> impl Strategy<Value = AddrSpec> {
    prop_oneof![
        3 => leaf_addr(),
        1 => (proptest::collection::vec(leaf_addr(), 1..4), any::<bool>())
            .prop_map(|(members, neg)| AddrSpec { negated: neg, kind: AddrKind::List(members) }),
    ]
}

fn port_strategy() -> impl Strategy<Value = PortSpec> {
    prop_oneof![
        Just(PortSpec::any()),
        (any::<u16>(), any::<bool>())
            .prop_map(|(p, neg)| PortSpec { negated: neg, kind: PortKind::Single(p) }),
        (any::<u16>(), any::<u16>(), any::<bool>()).prop_map(|(a, b, neg)| PortSpec {
            negated: neg,
            kind: PortKind::Range(a.min(b), a.max(b)),
        }),
    ]
}

fn content_strategy(first: bool) -> impl Strategy<Value = ContentPattern> {
    let bytes = proptest::collection::vec(any::<u8>(), 1..10);
    let positional = if first { 0..2usize } else { 0..3usize };
    (bytes, any::<bool>(), positional, 0u32..50, 0u32..40, 0u32..30, 1u32..40).prop_map(
        |(bytes, nocase, kind, offset, extra_depth, distance, within)| {
            let mut c = ContentPattern::new(bytes);
            c.nocase = nocase;
            match kind {
                1 => {
                    if offset % 2 == 0 {
                        c.offset = Some(offset);
                    }
                    if extra_depth % 3 != 0 {
                        c.depth = Some(c.bytes.len() as u32 + extra_depth);
                    }
                    if c.offset.is_none() && c.depth.is_none() {
                        c.offset = Some(offset);
                    }
                }
                2 => {
                    if distance % 2 == 0 {
                        c.distance = Some(distance);
                    }
                    if within % 3 != 0 {
                        c.within = Some(within);
                    }
                    if c.distance.is_none() && c.within.is_none() {
                        c.distance = Some(distance);
                    }
                }
                _ => {}
            }
            c
        },
    )
}

fn contents_strategy() -> impl Strategy<Value = Vec<ContentPattern>> {
    prop_oneof![
        1 => Just(Vec::new()),
        2 => content_strategy(true).prop_map(|c| vec![c]),
        2 => (content_strategy(true), proptest::collection::vec(content_strategy(false), 1..3))
            .prop_map(|(first, rest)| {
                let mut v = vec![first];
                v.extend(rest);
                v
            }),
    ]
}

prop_compose! {
    fn rule_strategy()(
        protocol in prop_oneof![Just(Protocol::Tcp), Just(Protocol::Udp), Just(Protocol::Icmp), Just(Protocol::Ip)],
        src_addr in addr_strategy(),
        src_port in port_strategy(),
        direction in prop_oneof![Just(Direction::Uni), Just(Direction::Bi)],
        dst_addr in addr_strategy(),
        dst_port in port_strategy(),
        msg in "[ -~]{0,25}",
        sid in 1u32..,
        contents in contents_strategy(),
    ) -> Rule {
        Rule {
            header: RuleHeader { action: Action::Alert, protocol, src_addr, src_port, direction, dst_addr, dst_port },
            msg,
            sid,
            contents,
        }
    }
}

proptest! {
    /// Canonical text of a parsed rule reparses to a structurally equal rule.
    #[test]
    fn canonical_roundtrip(rule in rule_strategy()) {
        let line = rule.to_string();
        match parse_rule(&line, &Variables::new()) {
            Ok(ParseOutcome::Rule(reparsed)) => prop_assert_eq!(reparsed, rule, "line: {}", line),
            other => prop_assert!(false, "line {:?} gave {:?}", line, other),
        }
    }

    /// Canonical content text decodes back to the exact byte string; in
    /// particular a pure hex run of any bytes always yields those bytes.
    #[test]
    fn content_canonical_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 1..32)) {
        let canon = content_to_canonical(&bytes);
        prop_assert_eq!(parse_content_arg(&canon).unwrap(), bytes.clone());

        let hex: String = bytes.iter().map(|b| format!("{:02x} ", b)).collect();
        let piped = format!("|{}|", hex.trim_end());
        prop_assert_eq!(parse_content_arg(&piped).unwrap(), bytes);
    }

    /// Rules violating the content invariants never parse into a Rule.
    #[test]
    fn violating_rules_rejected(
        kind in 0usize..5,
        len in 2usize..8,
        small in 1u32..6,
    ) {
        let body = "a".repeat(len);
        let line = match kind {
            // distance/within on the first content
            0 => format!("alert tcp any any -> any any (content:\"{body}\"; distance:1; sid:1;)"),
            1 => format!("alert tcp any any -> any any (content:\"{body}\"; within:{len}; sid:1;)"),
            // offset/depth mixed with distance/within on one content
            2 => format!(
                "alert tcp any any -> any any (content:\"x\"; content:\"{body}\"; offset:1; distance:2; sid:1;)"
            ),
            // depth shorter than the content
            3 => {
                let depth = small.min(len as u32 - 1).max(1);
                format!("alert tcp any any -> any any (content:\"{body}\"; depth:{depth}; sid:1;)")
            }
            // zero where positive is required
            _ => format!("alert tcp any any -> any any (content:\"{body}\"; within:0; sid:1;)"),
        };
        match parse_rule(&line, &Variables::new()) {
            Err(_) => {}
            Ok(ParseOutcome::Skip(_)) => {}
            Ok(ParseOutcome::Rule(r)) => prop_assert!(false, "{} parsed into {:?}", line, r),
        }
    }
}

#[test]
fn variables_survive_roundtrip_resolution() {
    // A rule printed canonically carries resolved specs, no $NAMEs.
    let mut vars = Variables::new();
    vars.insert(
        "HOME_NET".to_string(),
        nids_core::rules::VarValue::parse("[10.0.0.0/8,192.168.0.0/16]").unwrap(),
    );
    let line = "alert tcp $HOME_NET any -> !$HOME_NET 80 (msg:\"vars\"; content:\"q\"; sid:3;)";
    let rule = match parse_rule(line, &vars).unwrap() {
        ParseOutcome::Rule(r) => r,
        other => panic!("{:?}", other),
    };
    let canon = rule.to_string();
    assert!(!canon.contains('$'));
    match parse_rule(&canon, &Variables::new()).unwrap() {
        ParseOutcome::Rule(r2) => assert_eq!(r2, rule),
        other => panic!("{:?}", other),
    }
}
