#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::ncpoly::{Alphabet, NcPoly};

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else {
        return;
    };
    let Ok(s) = std::str::from_utf8(rest) else {
        return;
    };
    let alphabet = if sel & 1 == 0 {
        Alphabet::FEIGE
    } else {
        Alphabet { alice_answers: 2, bob_answers: 2 }
    };
    if let Ok(p) = NcPoly::parse(s, alphabet) {
        let again = NcPoly::parse(&p.to_string(), alphabet).expect("printed polynomial parses");
        assert_eq!(again, p);
        assert_eq!(p.adjoint().adjoint(), p);
    }
});
