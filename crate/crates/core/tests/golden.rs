//! Experiment 1 at t = 0.001 against a frozen snapshot. Set
//! `CROSSDIFF_BLESS=1` to rewrite the reference files.

use std::fs;
use std::path::PathBuf;

use crossdiff::config::{parse_config, EXP1};
use crossdiff::driver::run_config;
use crossdiff::output::{parse_snapshot_csv, snapshot_csv, snapshot_meta};

const TOL: f64 = 1e-12;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn meta_values(text: &str) -> Vec<(String, Option<f64>)> {
    text.lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.parse().ok())
        })
        .collect()
}

#[test]
fn exp1_snapshot_matches_golden() {
    let mut c = parse_config(EXP1).unwrap();
    c.time.t_final = 1e-3;
    c.output.snapshots = vec![1e-3];
    let summary = run_config(&c).unwrap();
    let snap = summary.snapshots.last().unwrap();
    assert_eq!(snap.t, 1e-3);
    let (csv, meta) = (snapshot_csv(snap), snapshot_meta(snap));

    if std::env::var_os("CROSSDIFF_BLESS").is_some() {
        fs::write(golden("exp1_t0.001.csv"), &csv).unwrap();
        fs::write(golden("exp1_t0.001.meta"), &meta).unwrap();
    }

    let want = parse_snapshot_csv(&fs::read_to_string(golden("exp1_t0.001.csv")).unwrap()).unwrap();
    let got = parse_snapshot_csv(&csv).unwrap();
    assert_eq!(want.x, got.x);
    for (name, a, b) in [("u1", &want.u1, &got.u1), ("u2", &want.u2, &got.u2)] {
        let worst = a.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= TOL, "{name} differs by {worst:e}");
    }

    let want = meta_values(&fs::read_to_string(golden("exp1_t0.001.meta")).unwrap());
    let got = meta_values(&meta);
    assert_eq!(want.len(), got.len());
    for ((kw, vw), (kg, vg)) in want.iter().zip(&got) {
        assert_eq!(kw, kg);
        match (vw, vg) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= TOL * a.abs().max(1.0), "{kw}: {a} vs {b}"),
            (None, None) => {}
            _ => panic!("{kw}: {vw:?} vs {vg:?}"),
        }
    }
}
