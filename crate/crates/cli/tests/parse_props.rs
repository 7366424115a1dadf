use hgreen_cli::{parse_data, parse_grid, parse_point, DataSpec};
use proptest::prelude::*;

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

proptest! {
    #[test]
    fn points_round_trip(n in 1usize..5, seed in prop::collection::vec(-1e6f64..1e6, 9)) {
        let coords = &seed[..2 * n + 1];
        let p = parse_point(&join(coords)).unwrap();
        prop_assert_eq!(p.dim().get(), n);
        prop_assert_eq!(p.t(), coords[2 * n]);
        for (j, &(x, y)) in p.z().iter().enumerate() {
            prop_assert_eq!((x, y), (coords[2 * j], coords[2 * j + 1]));
        }
    }

    #[test]
    fn even_arity_is_rejected(k in 1usize..5, v in -10f64..10.0) {
        prop_assert!(parse_point(&join(&vec![v; 2 * k])).is_err());
    }

    #[test]
    fn grids_round_trip(
        rmin in 0f64..2.0, rlen in 0.001f64..2.0, rs in 2usize..50,
        tmin in -2f64..2.0, tlen in 0.001f64..2.0, ts in 2usize..50,
    ) {
        let g = parse_grid(&format!("{rmin}:{}:{rs},{tmin}:{}:{ts}", rmin + rlen, tmin + tlen)).unwrap();
        prop_assert_eq!(g.len(), rs * ts);
        let nodes = g.nodes();
        prop_assert_eq!(nodes.len(), rs * ts);
        prop_assert_eq!(nodes[0], (rmin, tmin));
        prop_assert!(nodes.iter().all(|&(r, t)| r >= rmin && r <= rmin + rlen + 1e-12 && t >= tmin - 1e-12 && t <= tmin + tlen + 1e-12));
    }

    #[test]
    fn constants_parse(v in -1e9f64..1e9) {
        prop_assert_eq!(parse_data(&format!("{v}")).unwrap(), DataSpec::Constant(v));
    }

    #[test]
    fn parsers_never_panic(s in "\\PC{0,64}") {
        let _ = parse_point(&s);
        let _ = parse_grid(&s);
        let _ = parse_data(&s);
    }
}

/// Replays the checked-in fuzz seeds through the parsers.
#[test]
fn fuzz_corpus_seeds() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for (target, parse) in [
        (
            "parse_point",
            (|s: &str| parse_point(s).is_ok()) as fn(&str) -> bool,
        ),
        ("parse_grid", |s| parse_grid(s).is_ok()),
        ("parse_data", |s| parse_data(s).is_ok()),
    ] {
        let mut accepted = 0;
        for entry in std::fs::read_dir(root.join(target)).unwrap() {
            let bytes = std::fs::read(entry.unwrap().path()).unwrap();
            accepted += usize::from(parse(&String::from_utf8_lossy(&bytes)));
            seen += 1;
        }
        assert!(accepted > 0, "{target}: no seed parses");
    }
    assert!(seen >= 15);
}
