#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::lp::{parse_text, to_text};

fuzz_target!(|data: &str| {
    if let Ok(p) = parse_text(data) {
        let again = parse_text(&to_text(&p)).expect("printed LP parses");
        assert_eq!(again, p);
    }
});
