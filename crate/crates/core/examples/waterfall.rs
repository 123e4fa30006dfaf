//! BER/FER waterfall of one code configuration.
//!
//! ```text
//! cargo run --release --example waterfall -- [profile] [puncture] [modulation] [K] [ebno start:stop:step] [max frames]
//! cargo run --release --example waterfall -- 2:0.85,7:0.15 11101101110 64qam 5012 3.0:4.0:0.25 40
//! ```

use irturbo::codec::{CodecConfig, StopRule};
use irturbo::sim::{ebno_grid, SimConfig, Simulator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());

    let profile = arg(0, "2:1.0").parse()?;
    let pattern = arg(1, "1").parse()?;
    let modulation = arg(2, "bpsk").parse()?;
    let k: usize = arg(3, "1003").parse()?;
    let range: Vec<f64> = arg(4, "0.0:1.5:0.25")
        .split(':')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let max_frames: u64 = arg(5, "200").parse()?;

    let codec = CodecConfig::new(k, profile, pattern)
        .with_seed(1)
        .with_max_iterations(32)
        .with_stop_rule(StopRule::Genie);
    let mut config = SimConfig::new(codec, modulation, ebno_grid(range[0], range[1], range[2])?);
    config.max_frames = max_frames;
    config.min_frame_errors = 50;
    config.workers = 0;
    config.ber_floor = Some(1e-6);

    let sim = Simulator::new(config)?;
    println!(
        "K={k} M_rep={} nominal rate {:.4} measured rate {:.4}",
        sim.codec().repetition_map().repeated_length(),
        sim.nominal_rate(),
        sim.measured_rate()
    );
    println!("ebno_db  frames  frame_err  ber        fer        iters");
    let start = std::time::Instant::now();
    sim.run_sweep_with(|r| {
        println!(
            "{:6.2}  {:6}  {:9}  {:.3e}  {:.3e}  {:.2}",
            r.ebno_db, r.frames, r.frame_errors, r.ber, r.fer, r.mean_iters
        )
    })?;
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
