#![no_main]
use heis_overdet::lab::IdentityId;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(id) = text.parse::<IdentityId>() {
        // names are canonical, so a successful parse prints back unchanged
        assert_eq!(id.as_str(), text);
        assert_eq!(id.to_string().parse::<IdentityId>().unwrap(), id);
    }
});
