//! Drives the `contgibbs` front end in-process: sample, transform one
//! sample with a round trip, and export statistics.

use contgibbs::cli;
use contgibbs::Result;

pub fn run() -> Result<()> {
    let out = std::env::temp_dir().join("contgibbs-example-cli");
    let o = out.to_str().expect("utf-8 temp dir");
    let samples = out.join("samples.jsonl");
    let bonds = out.join("bonds.jsonl");
    let s = samples.to_str().expect("utf-8 path");
    let b = bonds.to_str().expect("utf-8 path");
    let steps: [Vec<&str>; 3] = [
        vec!["contgibbs", "--seed", "11", "--out", o, "sample", "--window", "4", "--sweeps", "200", "--thinning", "2", "--bonds"],
        vec!["contgibbs", "--seed", "11", "--out", o, "transform", "--config", s, "--index", "7", "--bonds", b, "--round-trip"],
        vec!["contgibbs", "--out", o, "stats", "--samples", s, "--regions", "1,2,3"],
    ];
    for args in steps {
        let code = cli::run(args.iter().copied());
        assert_eq!(code, cli::EXIT_OK, "{args:?}");
    }
    println!("{}", std::fs::read_to_string(out.join("counts.csv"))?.lines().take(8).collect::<Vec<_>>().join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
