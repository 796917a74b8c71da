#![no_main]

use cardioseq::data::ScalerStats;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ScalerStats::from_text(text);
    }
});
