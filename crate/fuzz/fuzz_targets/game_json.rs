#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::Game;

fuzz_target!(|data: &str| {
    if let Ok(g) = Game::from_json(data) {
        assert!(g.validate().is_ok());
        let again = Game::from_json(&g.to_json()).expect("serialized game parses");
        assert_eq!(again, g);
    }
});
