#![no_main]
use heis_overdet::cli::numlist::{parse_number, parse_number_list};
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    if let Ok(x) = parse_number(text) {
        assert!(x.is_finite());
    }
    if let Ok(xs) = parse_number_list(text) {
        assert!(!xs.is_empty());
        assert!(xs.iter().all(|x| x.is_finite()));
    }
    Corpus::Keep
});
