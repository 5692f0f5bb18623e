//! Randomized equivalence of automaton search against the brute-force
//! (pattern x position) oracle, plus the operational cost bounds.

use nids_core::automaton::AcAutomaton;
use nids_core::counters::CostCounters;
use nids_testkit as kit;
use rand::Rng;

fn trial(rng: &mut rand_chacha::ChaCha8Rng, alphabet: usize, max_text: usize) {
    let pattern_count = rng.gen_range(1..=50);
    let patterns = kit::random_patterns(&mut *rng, pattern_count, (1, 16), alphabet);
    let text_len = rng.gen_range(0..=max_text);
    let text = kit::random_text(&mut *rng, text_len, alphabet);

    let automaton = AcAutomaton::build(&patterns).unwrap();
    let mut counters = CostCounters::new();
    let events: Vec<(usize, usize)> = automaton
        .search(&text, &mut counters)
        .into_iter()
        .map(|e| (e.pattern_id.as_usize(), e.end_index))
        .collect();

    let expected = kit::brute_force_matches(&patterns, &text);
    assert_eq!(events, expected, "alphabet {} text len {}", alphabet, text.len());

    // O(m + z) in counter form.
    let m = text.len() as u64;
    let z = expected.len() as u64;
    assert!(counters.goto_moves <= m);
    assert!(counters.fail_moves <= m);
    assert_eq!(counters.output_emissions, z);
}

#[test]
fn oracle_equivalence_binary_alphabet() {
    let mut rng = kit::rng(101);
    for _ in 0..500 {
        trial(&mut rng, 2, 2048);
    }
}

#[test]
fn oracle_equivalence_full_byte_alphabet() {
    let mut rng = kit::rng(202);
    for _ in 0..500 {
        trial(&mut rng, 256, 4096);
    }
}

#[test]
fn search_is_deterministic() {
    let mut rng = kit::rng(303);
    let patterns = kit::random_patterns(&mut rng, 20, (1, 12), 4);
    let text = kit::random_text(&mut rng, 4096, 4);
    let a = AcAutomaton::build(&patterns).unwrap();
    let b = AcAutomaton::build(&patterns).unwrap();
    let mut ca = CostCounters::new();
    let mut cb = CostCounters::new();
    assert_eq!(a.search(&text, &mut ca), b.search(&text, &mut cb));
    assert_eq!(ca, cb);
    assert_eq!(a.build_cost(), b.build_cost());
}

#[test]
fn failure_links_descend_to_root_within_depth() {
    let mut rng = kit::rng(404);
    for _ in 0..50 {
        let count = rng.gen_range(1..=30);
        let patterns = kit::random_patterns(&mut rng, count, (1, 10), 2);
        let a = AcAutomaton::build(&patterns).unwrap();
        for state in 1..a.state_count() {
            // Each hop strictly reduces trie depth, so the walk to the root
            // takes at most trie-depth(state) hops.
            let mut cur = state;
            let mut hops = 0;
            while cur != 0 {
                let next = a.fail_link(cur);
                assert!(a.trie_depth(next) < a.trie_depth(cur));
                cur = next;
                hops += 1;
            }
            assert!(hops <= a.trie_depth(state));
        }
    }
}

#[test]
fn outputs_are_exactly_path_suffixes() {
    let patterns: Vec<&[u8]> = vec![b"ab", b"b", b"abab", b"ba"];
    let a = AcAutomaton::build(&patterns).unwrap();
    let state = a.trie_state(b"abab").unwrap();
    // Suffixes of "abab" among the patterns: "abab", "ab", "b".
    let got: Vec<usize> = a.outputs_at(state).iter().map(|p| p.as_usize()).collect();
    assert_eq!(got, vec![0, 1, 2]);
}
