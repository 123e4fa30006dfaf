//! Shannon capacity next to the throughput of a code at a few operating points.
//!
//! ```text
//! cargo run --example capacity_curve -- [rate] [modulation] [fer]
//! ```

use irturbo::phy::Modulation;
use irturbo::sim::{ebno_to_snr, shannon_capacity, throughput};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().map_or(Ok(0.33), |s| s.parse())?;
    let modulation: Modulation = args.next().map_or(Ok(Modulation::Qam64), |s| s.parse())?;
    let fer: f64 = args.next().map_or(Ok(0.0303), |s| s.parse())?;

    let s = throughput(rate, modulation.order(), fer)?;
    println!("R={rate} {modulation} FER={fer}: S = {s:.3} bits/channel use");
    println!("ebno_db  snr_db  capacity  gap_to_S");
    for tenth in 0..=60 {
        let ebno = tenth as f64 / 10.0;
        let snr = ebno_to_snr(ebno, rate, modulation.order())?;
        let c = shannon_capacity(snr);
        if tenth % 5 == 0 {
            println!("{ebno:7.1}  {snr:6.2}  {c:8.4}  {:8.4}", c - s);
        }
    }
    Ok(())
}
