#![no_main]

use libfuzzer_sys::fuzz_target;
use sidforge::img::{decode_sidt, encode_sidt};

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = decode_sidt(data) {
        assert_eq!(encode_sidt(&x), data);
    }
});
