//! Selecting from a normal sequence along a Sturmian selector.
//!
//! cargo run --release --example kw_demo [n]

use kwlab::experiment::{run, ExperimentManifest};
use kwlab::Record;

fn main() -> kwlab::Result<()> {
    let n = std::env::args().nth(1).unwrap_or_else(|| "1000000".into());
    let manifest = ExperimentManifest::from_record(
        &Record::new()
            .with("experiment", "kw-demo")
            .with("n", n)
            .with("x.kind", "champernowne")
            .with("y.kind", "fibonacci"),
    )?;
    let report = run(&manifest)?;
    for (name, body) in &report.files {
        if name.ends_with(".csv") {
            // last checkpoint of each curve
            for line in body
                .lines()
                .filter(|l| l.contains(&format!(",{},", manifest.n)))
            {
                println!("{line}");
            }
        }
    }
    print!("{}", report.summary());
    Ok(())
}
