//! Randomized equivalence of the full inspection path (automaton
//! prefilter + header match + windowed verification) against the direct
//! per-rule oracle, plus the engine's structural invariants.

use nids_core::automaton::fold_bytes;
use nids_core::counters::CostCounters;
use nids_core::engine::{verify_rule, Detector};
use nids_core::rules::{Protocol, Rule, RuleSet, Variables};
use nids_testkit as kit;
use rand::Rng;

fn ruleset_of(rules: Vec<Rule>) -> RuleSet {
    RuleSet { rules, variables: Variables::new(), skipped: Vec::new(), errors: Vec::new() }
}

fn random_rules(rng: &mut rand_chacha::ChaCha8Rng, max: usize, modifier_free: bool) -> Vec<Rule> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|i| kit::random_rule(rng, (i + 1) as u32, modifier_free)).collect()
}

fn run_trials(seed: u64, trials: usize, modifier_free: bool) {
    let mut rng = kit::rng(seed);
    for trial in 0..trials {
        let rules = random_rules(&mut rng, 20, modifier_free);
        let detector = Detector::compile(ruleset_of(rules.clone())).unwrap();
        for pkt_idx in 0..4u64 {
            let packet = kit::random_packet(&mut rng, pkt_idx, 24);
            let mut counters = CostCounters::new();
            let got: Vec<u32> = detector.inspect(&packet, &mut counters).iter().map(|a| a.sid).collect();
            let expected = kit::inspect_oracle(&rules, &packet);
            assert_eq!(got, expected, "trial {} packet {:?}", trial, packet);

            // At most one alert per (sid, packet).
            let mut dedup = got.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), got.len());
        }
    }
}

#[test]
fn inspect_matches_oracle_without_modifiers() {
    run_trials(9001, 500, true);
}

#[test]
fn inspect_matches_oracle_with_window_modifiers() {
    run_trials(9002, 250, false);
}

#[test]
fn anchor_soundness() {
    // Whenever verification succeeds, the rule's anchor content occurs in
    // the case-folded payload, so the folded-automaton prefilter can never
    // lose a true match.
    let mut rng = kit::rng(9003);
    let mut hits = 0;
    for _ in 0..2000 {
        let rule = kit::random_rule(&mut rng, 1, false);
        let payload_len = rng.gen_range(0..=32);
        let payload = kit::random_text(&mut rng, payload_len, 4);
        let mut counters = CostCounters::new();
        if verify_rule(&rule, &payload, &mut counters) {
            hits += 1;
            let ordinal = (0..rule.contents.len())
                .max_by_key(|&i| (rule.contents[i].bytes.len(), usize::MAX - i))
                .unwrap();
            let anchor = fold_bytes(&rule.contents[ordinal].bytes);
            let folded = fold_bytes(&payload);
            let found = kit::brute_force_matches(&[anchor.as_slice()], &folded);
            assert!(!found.is_empty(), "anchor missing for {:?} in {:?}", rule, payload);
        }
    }
    assert!(hits > 50, "want a meaningful number of verified rules, got {}", hits);
}

#[test]
fn inspect_counters_decompose_into_search_plus_verify() {
    let rs = nids_core::rules::parse_ruleset(
        "alert tcp any any -> any any (msg:\"m\"; content:\"abab\"; content:\"ba\"; distance:1; sid:4;)",
        &Variables::new(),
    )
    .unwrap();
    let rules = rs.rules.clone();
    let detector = Detector::compile(rs).unwrap();
    let payload = b"xxababyybazz";
    let packet = nids_core::ParsedPacket::from_parts(
        nids_core::PacketProto::Tcp,
        std::net::Ipv4Addr::new(1, 2, 3, 4),
        std::net::Ipv4Addr::new(5, 6, 7, 8),
        Some(1),
        Some(2),
        0,
        payload.to_vec(),
    );
    let mut inspect_counters = CostCounters::new();
    let alerts = detector.inspect(&packet, &mut inspect_counters);
    assert_eq!(alerts.len(), 1);

    let mut search_counters = CostCounters::new();
    detector
        .automaton(Protocol::Tcp)
        .unwrap()
        .search(&fold_bytes(payload), &mut search_counters);
    let mut verify_counters = CostCounters::new();
    assert!(verify_rule(&rules[0], payload, &mut verify_counters));

    assert_eq!(inspect_counters, search_counters + verify_counters);
}

#[test]
fn empty_payload_costs_nothing_and_only_header_rules_fire() {
    let rs = nids_core::rules::parse_ruleset(
        "alert tcp any any -> any any (msg:\"content\"; content:\"zz\"; sid:1;)\nalert ip any any -> any any (msg:\"header\"; sid:2;)",
        &Variables::new(),
    )
    .unwrap();
    let detector = Detector::compile(rs).unwrap();
    let packet = nids_core::ParsedPacket::from_parts(
        nids_core::PacketProto::Tcp,
        std::net::Ipv4Addr::new(1, 1, 1, 1),
        std::net::Ipv4Addr::new(2, 2, 2, 2),
        Some(10),
        Some(20),
        7,
        Vec::new(),
    );
    let mut counters = CostCounters::new();
    let alerts = detector.inspect(&packet, &mut counters);
    assert_eq!(counters.goto_moves, 0);
    assert_eq!(counters.fail_moves, 0);
    let sids: Vec<u32> = alerts.iter().map(|a| a.sid).collect();
    assert_eq!(sids, vec![2]);
}
