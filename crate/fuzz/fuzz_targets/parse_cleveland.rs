#![no_main]

use cardioseq::data::{parse_str, Dialect};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = Dialect::detect(text);
        if let Ok(d) = parse_str(text, Dialect::Cleveland) {
            assert!(!d.is_empty());
        }
    }
});
