#![no_main]

use libfuzzer_sys::fuzz_target;
use sidforge::features::{ExtractorKind, LaplaceVariant};
use sidforge::harness::PerturbSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(k) = text.parse::<ExtractorKind>() {
        assert_eq!(k.token(), text);
    }
    let _ = text.parse::<LaplaceVariant>();
    if let Ok(p) = text.parse::<PerturbSpec>() {
        p.validate().unwrap();
        assert_eq!(p.to_string().parse::<PerturbSpec>().unwrap(), p);
    }
});
