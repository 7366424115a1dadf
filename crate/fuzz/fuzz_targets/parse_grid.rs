#![no_main]

use hgreen_cli::parse::MAX_GRID_POINTS;
use hgreen_cli::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_grid(s) {
            assert!(g.len() <= MAX_GRID_POINTS);
            assert!(g.r.min >= 0.0 && g.r.min <= g.r.max && g.t.min <= g.t.max);
            let nodes = g.nodes();
            assert_eq!(nodes.len(), g.len());
            assert!(nodes.iter().all(|&(r, t)| r.is_finite() && t.is_finite()));
        }
    }
});
