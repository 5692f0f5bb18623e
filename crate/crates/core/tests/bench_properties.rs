//! Shape and accounting properties of the benchmark reports.

use nids_core::bench::{emit_csv_all, run_algo_compare, run_engine_bench};
use nids_core::engine::Detector;
use nids_core::rules::{parse_ruleset, Variables};
use nids_testkit as kit;
use rand::Rng;

fn tcp_only_detector() -> Detector {
    let text = "alert tcp any any -> any any (msg:\"a\"; content:\"abab\"; sid:1;)\n\
                alert tcp any any -> any any (msg:\"b\"; content:\"bcbc\"; nocase; sid:2;)\n";
    Detector::compile(parse_ruleset(text, &Variables::new()).unwrap()).unwrap()
}

#[test]
fn cumulative_totals_never_decrease() {
    let mut rng = kit::rng(31);
    let detector = tcp_only_detector();
    let packets: Vec<_> = (0..200).map(|i| kit::random_packet(&mut rng, i, 64)).collect();
    let report = run_engine_bench(&detector, packets, 7);
    let mut prev = 0u64;
    for s in &report.samples {
        assert!(s.counters.total() >= prev);
        prev = s.counters.total();
    }
    assert!(report.build_cost.build_units > 0);
}

#[test]
fn automaton_moves_bounded_by_twice_payload_bytes() {
    // With only one group automaton in play, each payload is searched once,
    // so goto + fail moves stay within 2x the bytes processed.
    let mut rng = kit::rng(32);
    let detector = tcp_only_detector();
    let packets: Vec<_> = (0..300).map(|i| kit::random_packet(&mut rng, i, 128)).collect();
    let total_bytes: u64 = packets.iter().map(|p| p.payload().len() as u64).sum();
    let report = run_engine_bench(&detector, packets, 50);
    let work = report.inspection_cost();
    assert!(
        work.goto_moves + work.fail_moves <= 2 * total_bytes,
        "{} moves over {} bytes",
        work.goto_moves + work.fail_moves,
        total_bytes
    );
}

#[test]
fn compare_verdicts_match_brute_force_counts() {
    let mut rng = kit::rng(33);
    for _ in 0..20 {
        let count = rng.gen_range(1..=8);
        let patterns = kit::random_patterns(&mut rng, count, (1, 5), 4);
        let packets: Vec<_> = (0..30).map(|i| kit::random_packet(&mut rng, i, 40)).collect();
        let reports = run_algo_compare(&patterns, &packets, 10).unwrap();

        let expected_hits: u64 = packets
            .iter()
            .map(|p| {
                let folded: Vec<u8> = p.payload().to_ascii_lowercase();
                let events = kit::brute_force_matches(&patterns, &folded);
                let mut present: Vec<usize> = events.into_iter().map(|(id, _)| id).collect();
                present.sort_unstable();
                present.dedup();
                present.len() as u64
            })
            .sum();

        for r in &reports {
            assert_eq!(r.final_sample().alerts, expected_hits, "algo {:?}", r.algo);
        }
        // Identical sampling grid means the full alert columns agree too.
        let columns: Vec<Vec<u64>> =
            reports.iter().map(|r| r.samples.iter().map(|s| s.alerts).collect()).collect();
        assert_eq!(columns[0], columns[1]);
        assert_eq!(columns[0], columns[2]);
    }
}

#[test]
fn csv_is_byte_deterministic() {
    let mut rng = kit::rng(34);
    let patterns = kit::random_patterns(&mut rng, 5, (2, 6), 4);
    let packets: Vec<_> = (0..50).map(|i| kit::random_packet(&mut rng, i, 64)).collect();
    let a = emit_csv_all(&run_algo_compare(&patterns, &packets, 9).unwrap());
    let b = emit_csv_all(&run_algo_compare(&patterns, &packets, 9).unwrap());
    assert_eq!(a, b);
    assert!(a.is_ascii());
    assert!(!a.contains('\r'));
}
