#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::rational;

fuzz_target!(|data: &str| {
    if let Ok(r) = rational::parse(data) {
        assert_eq!(rational::parse(&rational::format(&r)).ok(), Some(r));
    }
});
