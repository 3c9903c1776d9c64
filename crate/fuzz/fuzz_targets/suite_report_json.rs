#![no_main]
use heis_overdet::lab::SuiteReport;
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    let Ok(report) = SuiteReport::from_json(text) else {
        return Corpus::Keep;
    };
    let json = report.to_json().expect("a parsed report serializes");
    assert_eq!(SuiteReport::from_json(&json).unwrap(), report);
    Corpus::Keep
});
