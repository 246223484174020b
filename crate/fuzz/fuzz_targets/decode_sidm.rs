#![no_main]

use libfuzzer_sys::fuzz_target;
use sidforge::classifier::LogisticModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = LogisticModel::from_bytes(data) {
        assert_eq!(LogisticModel::from_bytes(&m.to_bytes()).unwrap().to_bytes(), m.to_bytes());
    }
});
