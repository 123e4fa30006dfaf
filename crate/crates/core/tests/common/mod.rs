#![allow(dead_code)]

use irturbo::interleave::Permutation;
use irturbo::profile::{depuncture, puncture, DegreeProfile, PuncturePattern};
use irturbo::rsc::Trellis;
use irturbo::siso::SisoInput;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian tail probability `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// A noisy SISO input built the way the decoder builds it: random source bits,
/// repeated by `profile`, interleaved, RSC-encoded, punctured, sent over BPSK
/// AWGN with noise variance `sigma2`, plus Gaussian a priori values.
pub struct SisoCase {
    pub input: SisoInput,
    /// Encoder input bits in trellis order.
    pub trellis_bits: Vec<u8>,
}

pub fn siso_case(profile: &str, pattern: &str, k: usize, sigma2: f64, seed: u64) -> SisoCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profile: DegreeProfile = profile.parse().unwrap();
    let pattern: PuncturePattern = pattern.parse().unwrap();
    let map = profile.realize(k).unwrap();
    let m = map.repeated_length();
    let perm = Permutation::generate(seed ^ 0x5eed, m).unwrap();
    let bits: Vec<u8> = (0..k).map(|_| rng.random::<bool>() as u8).collect();
    let trellis_bits = perm.apply(&map.repeat(&bits).unwrap()).unwrap();
    let out = Trellis::build().encode(&trellis_bits);

    let sigma = sigma2.sqrt();
    let mut channel = |b: u8| {
        let x = if b == 0 { 1.0 } else { -1.0 };
        let n: f64 = rng.sample(StandardNormal);
        2.0 * (x + sigma * n) / sigma2
    };
    let sys_src: Vec<f64> = bits.iter().map(|&b| channel(b)).collect();
    let kept: Vec<f64> = puncture(&out.parity, &pattern).iter().map(|&b| channel(b)).collect();
    let tail_systematic = out.tail_systematic.map(&mut channel);
    let tail_parity = out.tail_parity.map(&mut channel);
    let systematic = perm.apply(&map.repeat(&sys_src).unwrap()).unwrap();
    let parity = depuncture(&kept, &pattern, m).unwrap();
    let apriori = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal) * 1.5).collect();
    SisoCase {
        input: SisoInput {
            systematic,
            parity,
            apriori,
            tail_systematic,
            tail_parity,
        },
        trellis_bits,
    }
}

/// Mixed-degree profile per frame size, kept small enough for enumeration.
pub fn mixed_profile(k: usize) -> &'static str {
    match k {
        4 => "2:0.75,4:0.25",
        6 => "2:0.5,3:0.5",
        8 => "2:0.75,4:0.25",
        _ => "2:0.9,4:0.1",
    }
}
