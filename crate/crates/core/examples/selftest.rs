//! Run the built-in checks, optionally against another golden-vector file.
//!
//! ```text
//! cargo run --example selftest -- [golden.txt]
//! ```

use irturbo::selftest::{run, RSC_GOLDEN};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let golden = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => RSC_GOLDEN.to_string(),
    };
    let report = run(&golden);
    for c in &report.checks {
        match &c.outcome {
            Ok(()) => println!("ok    {}", c.name),
            Err(e) => println!("FAIL  {}: {e}", c.name),
        }
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
