//! Run a sweep described by a JSON file and write CSV and JSON results.
//!
//! ```text
//! cargo run --release --example sweep_config -- crates/core/configs/quick_16qam.json out/quick
//! ```

use std::path::PathBuf;

use irturbo::sim::{write_atomic, Simulator, SweepFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().ok_or("usage: sweep_config <config.json> [out prefix]")?);
    let prefix = PathBuf::from(args.next().unwrap_or_else(|| "sweep".into()));

    let config = SweepFile::load(&path)?.to_sim_config()?;
    let sim = Simulator::new(config)?;
    let result = sim.run_sweep_with(|r| {
        println!(
            "{:6.2} dB  frames {:6}  BER {:.3e}  FER {:.3e}  iters {:.2}{}",
            r.ebno_db,
            r.frames,
            r.ber,
            r.fer,
            r.mean_iters,
            if r.censored { "  (censored)" } else { "" }
        )
    })?;
    write_atomic(&prefix.with_extension("csv"), result.to_csv_string()?.as_bytes())?;
    write_atomic(&prefix.with_extension("json"), result.to_json(sim.config())?.as_bytes())?;
    Ok(())
}
