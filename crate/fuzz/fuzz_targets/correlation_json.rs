#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::strategies::{is_nonsignalling, Correlation};

fuzz_target!(|data: &str| {
    if let Ok(c) = Correlation::from_json(data) {
        let _ = is_nonsignalling(&c, 1e-9);
        let again = Correlation::from_json(&c.to_json()).expect("serialized correlation parses");
        assert_eq!(again.sizes(), c.sizes());
    }
});
