#![no_main]

use cardioseq::cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut config = RunConfig::default();
        let _ = config.apply_config_text(text);
    }
});
