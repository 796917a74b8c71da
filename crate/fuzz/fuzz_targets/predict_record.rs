#![no_main]

use cardioseq::data::parse_feature_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = parse_feature_list(text) {
            assert_eq!(values.len(), 13);
        }
    }
});
