//! Rate arithmetic for the reference degree profiles.
//!
//! ```text
//! cargo run --example rate_math
//! cargo run --example rate_math -- 2:0.9,5:0.1 1101 5012
//! ```

use irturbo::profile::{code_rate, DegreeProfile, PuncturePattern};

const REFERENCE: &[(&str, &str)] = &[
    ("2:1.0", "unpunctured"),
    ("2:1.0", "10"),
    ("2:0.888,8:0.06,9:0.052", "11101101110"),
    ("2:0.96,6:0.04", "11101101110"),
    ("2:0.95,5:0.05", "11101101110"),
    ("2:0.99,7:0.01", "unpunctured"),
    ("2:0.85,7:0.15", "11101101110"),
    ("2:0.96,9:0.04", "11101101110"),
    ("2:0.95,9:0.05", "10"),
    ("2:0.94,3:0.06", "10"),
];

fn report(profile: &DegreeProfile, pattern: &PuncturePattern, k: usize) -> Result<(), irturbo::Error> {
    let map = profile.realize(k)?;
    let m = map.repeated_length();
    let kept = pattern.kept_count(m);
    println!(
        "{:<24} {:<12} d̄={:.4} f0={:.4} R={:.4}  K={k} M_rep={m} kept={kept} counted={:.4}",
        profile.to_string(),
        pattern.to_string(),
        profile.average_degree(),
        pattern.deleted_fraction(),
        code_rate(profile, pattern),
        k as f64 / (k + kept) as f64,
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [profile, pattern, rest @ ..] = args.as_slice() {
        let k = rest.first().map_or(Ok(5012), |s| s.parse())?;
        return Ok(report(&profile.parse()?, &pattern.parse()?, k)?);
    }
    for &(profile, pattern) in REFERENCE {
        report(&profile.parse()?, &pattern.parse()?, 5012)?;
    }
    Ok(())
}
