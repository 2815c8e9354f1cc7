#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::game::decode_predicate;

fuzz_target!(|input: (u16, &str)| {
    let (n, s) = input;
    if let Ok(bits) = decode_predicate(s, n as usize) {
        assert_eq!(bits.len(), n as usize);
    }
});
