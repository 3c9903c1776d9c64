#![no_main]
use heis_overdet::cli::config::{parse_config, GLOBAL};
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    if let Ok(cfg) = parse_config(text) {
        for (section, entries) in &cfg.sections {
            assert!(section == GLOBAL || !section.is_empty());
            for (key, value) in entries {
                assert!(!key.is_empty() && !key.contains('-'));
                assert!(!value.contains('"'));
            }
        }
    }
    Corpus::Keep
});
