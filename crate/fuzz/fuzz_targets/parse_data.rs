#![no_main]

use hgreen_cli::{parse_data, DataSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(DataSpec::Constant(c)) = parse_data(s) {
            assert!(c.is_finite());
        }
    }
});
