//! Encode one frame, send it over AWGN with a chosen modulation, decode it and
//! print how the decisions evolved.
//!
//! ```text
//! cargo run --example roundtrip -- [ebno_db] [modulation]
//! ```

use irturbo::codec::{Codec, CodecConfig, DecodeTrace};
use irturbo::phy::{awgn, noise_sigma, ChannelParams, Constellation, Modulation};
use irturbo::siso::Metric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let ebno: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;
    let modulation: Modulation = args.next().map_or(Ok(Modulation::Bpsk), |s| s.parse())?;

    let config = CodecConfig::new(1003, "2:0.888,8:0.06,9:0.052".parse()?, "11101101110".parse()?).with_seed(7);
    let codec = Codec::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let bits: Vec<u8> = (0..codec.frame_size()).map(|_| rng.random::<bool>() as u8).collect();

    let tx = codec.encode(&bits)?.to_bits();
    let constellation = Constellation::new(modulation);
    let sigma2 = noise_sigma(&ChannelParams {
        ebno_db: ebno,
        rate: codec.nominal_rate(),
        bits_per_symbol: modulation.bits_per_symbol(),
    })?;
    let rx = awgn(&constellation.map_bits(&tx), sigma2, modulation.is_real(), &mut rng);
    let llrs = constellation.demap_bits(&rx, sigma2, Metric::Exact, tx.len());
    let raw_errors = llrs.iter().zip(&tx).filter(|(l, &b)| (**l < 0.0) != (b == 1)).count();

    let mut trace = DecodeTrace::default();
    let result = codec.decode_traced(&codec.split_llrs(&llrs)?, None, &mut trace)?;
    println!(
        "{modulation} at {ebno} dB: {} coded bits, {raw_errors} raw hard-decision errors",
        tx.len()
    );
    for pass in &trace.passes {
        let errors = pass.decisions.iter().zip(&bits).filter(|(a, b)| a != b).count();
        println!("pass {:>2}: {errors} information bit errors", pass.pass);
    }
    println!("converged: {}, iterations: {}", result.converged, result.iterations_used);
    Ok(())
}
