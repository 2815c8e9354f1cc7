#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::npa::parse_level;

fuzz_target!(|data: &str| {
    if let Ok(level) = parse_level(data) {
        assert!(level.extras.iter().all(|&(s, t)| s + t > level.base));
    }
});
