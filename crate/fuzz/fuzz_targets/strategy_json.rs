#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::game::feige;
use nlgame::strategies::{eval_deterministic, DeterministicStrategy};

fuzz_target!(|data: &str| {
    if let Ok(s) = DeterministicStrategy::from_json(data) {
        // out-of-range answers must be reported, not panic
        let _ = eval_deterministic(&feige(), &s);
        assert_eq!(DeterministicStrategy::from_json(&s.to_json()).ok(), Some(s));
    }
});
