#![no_main]

use libfuzzer_sys::fuzz_target;
use sidforge::img::{decode_image, encode_png};

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = decode_image(data) {
        assert!(x.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let again = decode_image(&encode_png(&x).unwrap()).unwrap();
        assert_eq!(again.shape(), x.shape());
    }
});
