#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::quantum::{check_degeneracy_condition, NuMatrix};

fuzz_target!(|data: &str| {
    if let Ok(nu) = NuMatrix::from_json(data) {
        let _ = check_degeneracy_condition(&nu);
    }
});
