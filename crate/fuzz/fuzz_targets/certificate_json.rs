#![no_main]

use libfuzzer_sys::fuzz_target;
use nlgame::game::feige;
use nlgame::ncpoly::{sos_verify, SosCertificate};

fuzz_target!(|data: &str| {
    if let Ok(cert) = SosCertificate::from_json(data) {
        let again = SosCertificate::from_json(&cert.to_json()).expect("serialized certificate parses");
        assert_eq!(again, cert);
        if cert.basis.len() <= 16 {
            let _ = sos_verify(&cert, &feige());
        }
    }
});
