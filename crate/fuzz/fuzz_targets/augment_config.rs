#![no_main]

use libfuzzer_sys::fuzz_target;
use sidforge::transforms::AugmentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = AugmentConfig::from_toml_str(text) {
        cfg.validate().unwrap();
        assert_eq!(AugmentConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }
});
