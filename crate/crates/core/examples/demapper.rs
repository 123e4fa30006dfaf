//! Gray-labelled constellations and their soft demapper.
//!
//! ```text
//! cargo run --example demapper -- [modulation] [ebno_db]
//! ```

use irturbo::phy::{awgn, noise_sigma, ChannelParams, Constellation, Modulation};
use irturbo::siso::Metric;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let modulation: Modulation = args.next().map_or(Ok(Modulation::Qam16), |s| s.parse())?;
    let ebno: f64 = args.next().map_or(Ok(6.0), |s| s.parse())?;
    let c = Constellation::new(modulation);
    let m = c.bits_per_symbol();

    println!("{modulation}: axis levels {:?}", c.axis_amplitudes());
    for label in 0..modulation.order().min(16) as u32 {
        let p = c.point(label);
        println!("  {label:0m$b} -> ({:+.4}, {:+.4})", p.re, p.im);
    }

    let sigma2 = noise_sigma(&ChannelParams { ebno_db: ebno, rate: 1.0, bits_per_symbol: m })?;
    let bits: Vec<u8> = (0..4 * m).map(|i| ((i * 7 + 1) % 3 == 0) as u8).collect();
    let rx = awgn(&c.map_bits(&bits), sigma2, modulation.is_real(), &mut ChaCha8Rng::seed_from_u64(3));
    let exact = c.demap_bits(&rx, sigma2, Metric::Exact, bits.len());
    let maxlog = c.demap_bits(&rx, sigma2, Metric::MaxLog, bits.len());
    println!("bit  exact     max-log");
    for ((b, e), l) in bits.iter().zip(&exact).zip(&maxlog) {
        println!("{b}   {e:+8.3}  {l:+8.3}");
    }
    Ok(())
}
