//! Boyer-Moore must return exactly what the naive scan returns, for less
//! comparison work on average.

use nids_core::counters::CostCounters;
use nids_core::matchers::{naive_find, BmTables};
use nids_testkit as kit;
use rand::Rng;

#[test]
fn results_identical_over_random_inputs() {
    let mut rng = kit::rng(771);
    for trial in 0..1500 {
        let alphabet = [2usize, 4, 256][trial % 3];
        let text_len = rng.gen_range(0..=4096);
        let text = kit::random_text(&mut rng, text_len, alphabet);
        // Half the time lift the pattern out of the text so matches are common.
        let pattern = if !text.is_empty() && rng.gen_bool(0.5) {
            let len = rng.gen_range(1..=32.min(text.len()));
            let start = rng.gen_range(0..=text.len() - len);
            text[start..start + len].to_vec()
        } else {
            kit::random_patterns(&mut rng, 1, (1, 32), alphabet).pop().unwrap()
        };
        let from = rng.gen_range(0..=text.len());

        let mut nc = CostCounters::new();
        let naive = naive_find(&pattern, &text, from, &mut nc);
        let tables = BmTables::build(&pattern).unwrap();
        let mut bc = CostCounters::new();
        let bm = tables.find(&text, from, &mut bc);
        assert_eq!(naive, bm, "pattern {:?} from {}", pattern, from);

        // Counter sanity bounds.
        let m = pattern.len() as u64;
        let n = text.len() as u64;
        let worst = if n >= m { m * (n - m + 1) } else { 0 };
        assert!(nc.byte_cmps <= worst);
        assert!(bc.byte_cmps <= worst);
    }
}

#[test]
fn bm_beats_naive_on_seeded_random_corpus() {
    let mut rng = kit::rng(772);
    let mut total_naive = 0u64;
    let mut total_bm = 0u64;
    for _ in 0..50 {
        let corpus = kit::random_text(&mut rng, 1024, 256);
        for pattern in [&b"needle"[..], b"GET /index", b"abcdefgh"] {
            let mut nc = CostCounters::new();
            let naive = naive_find(pattern, &corpus, 0, &mut nc);
            let mut bc = CostCounters::new();
            let bm = BmTables::build(pattern).unwrap().find(&corpus, 0, &mut bc);
            assert_eq!(naive, bm);
            total_naive += nc.byte_cmps;
            total_bm += bc.byte_cmps;
        }
    }
    assert!(
        total_bm * 2 < total_naive,
        "expected bm to do under half the comparisons, got {} vs {}",
        total_bm,
        total_naive
    );
}
