#![no_main]

use hgreen_cli::parse_point;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = parse_point(s) {
            assert!(p.t().is_finite());
            assert!(p.z().iter().all(|&(x, y)| x.is_finite() && y.is_finite()));
            assert_eq!(s.split(',').count(), 2 * p.dim().get() + 1);
        }
    }
});
