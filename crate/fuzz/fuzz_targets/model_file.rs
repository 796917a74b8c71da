#![no_main]

use cardioseq::model::Classifier;
use cardioseq::persist::{model_from_text, model_meta, model_to_text};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let _ = model_meta(&text);
    if let Ok(model) = model_from_text(&text) {
        // whatever loads must survive a save and reload
        model_from_text(&model_to_text(&model)).expect("re-parse");
        let _ = model.predict(&[None; 13]);
    }
});
