//! Built-in consistency checks run by `irturbo selftest`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{combine_group, Codec, CodecConfig};
use crate::interleave::Permutation;
use crate::oracle::exhaustive_app;
use crate::phy::{Constellation, Modulation};
use crate::profile::{code_rate, depuncture, puncture, DegreeProfile, PuncturePattern};
use crate::rsc::{Trellis, STATE_COUNT, TAIL_LEN};
use crate::siso::{log_map_decode, max_star, SisoInput};
use crate::Bit;

/// The impulse-response vector shipped with the crate.
pub const RSC_GOLDEN: &str = include_str!("../data/rsc_impulse.txt");

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.is_ok())
    }
}

type Check = fn(&str) -> Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("rsc-golden-vector", |g| check_golden(g)),
    ("trellis-vs-shift-register", |_| check_trellis()),
    ("trellis-termination", |_| check_termination()),
    ("max-star", |_| check_max_star()),
    ("log-map-vs-exhaustive-k6", |_| check_log_map()),
    ("interleaver-bijection", |_| check_interleaver()),
    ("puncture-roundtrip", |_| check_puncture()),
    ("extrinsic-combination", |_| check_combine()),
    ("rate-arithmetic", |_| check_rate()),
    ("constellations", |_| check_constellations()),
    ("noiseless-roundtrip", |_| check_roundtrip()),
];

/// Runs every check against `golden`, the contents of an RSC golden-vector file.
pub fn run(golden: &str) -> Report {
    Report {
        checks: CHECKS
            .iter()
            .map(|&(name, check)| {
                let start = Instant::now();
                let outcome = check(golden);
                CheckResult {
                    name,
                    outcome,
                    elapsed: start.elapsed(),
                }
            })
            .collect(),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse_bits(s: &str) -> Result<Vec<Bit>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(format!("bad bit `{c}`")),
        })
        .collect()
}

/// Golden file: `key bits` lines for `input`, `parity`, `tail_systematic`,
/// `tail_parity`; `#` starts a comment.
pub fn check_golden(text: &str) -> Result<(), String> {
    let mut fields = std::collections::HashMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("malformed line `{line}`"))?;
        fields.insert(k, parse_bits(v.trim())?);
    }
    let get = |k: &str| fields.get(k).ok_or_else(|| format!("missing `{k}`"));
    let out = Trellis::build().encode(get("input")?);
    ensure(&out.parity == get("parity")?, || "parity differs from golden vector".into())?;
    ensure(out.tail_systematic.as_slice() == get("tail_systematic")?.as_slice(), || {
        "tail systematic bits differ from golden vector".into()
    })?;
    ensure(out.tail_parity.as_slice() == get("tail_parity")?.as_slice(), || {
        "tail parity bits differ from golden vector".into()
    })
}

fn check_trellis() -> Result<(), String> {
    let t = Trellis::build();
    for s in 0..STATE_COUNT {
        // register bits a_{k-1}, a_{k-2}, a_{k-3}
        let reg = [s & 1, (s >> 1) & 1, (s >> 2) & 1];
        for u in 0..2 {
            let fb = u ^ reg[1] ^ reg[2];
            let parity = fb ^ reg[0] ^ reg[2];
            let next = fb | reg[0] << 1 | reg[1] << 2;
            ensure(t.step(s, u as Bit) == (next, parity as Bit), || {
                format!("transition ({s}, {u}) disagrees with the shift register")
            })?;
        }
    }
    Ok(())
}

fn check_termination() -> Result<(), String> {
    let t = Trellis::build();
    for start in 0..STATE_COUNT {
        let mut s = start;
        for _ in 0..TAIL_LEN {
            s = t.step(s, t.termination_input[s]).0;
        }
        ensure(s == 0, || format!("state {start} does not terminate"))?;
    }
    Ok(())
}

fn check_max_star() -> Result<(), String> {
    ensure((max_star(0.0, 0.0) - std::f64::consts::LN_2).abs() < 1e-12, || "max*(0,0)".into())?;
    ensure((max_star(5.0, 0.0) - 5.006715348).abs() < 1e-8, || "max*(5,0)".into())
}

fn check_log_map() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 12;
    for draw in 0..10 {
        let mut noise = |scale: f64| -> Vec<f64> { (0..n).map(|_| rng.random_range(-scale..scale)).collect() };
        let input = SisoInput {
            systematic: noise(3.0),
            parity: noise(3.0),
            apriori: noise(1.0),
            tail_systematic: [0.7, -1.2, 0.4],
            tail_parity: [-0.3, 2.0, 1.1],
        };
        let out = log_map_decode(&input, &Trellis::build()).map_err(|e| e.to_string())?;
        let oracle = exhaustive_app(&input);
        for (k, (a, o)) in out.app.iter().zip(&oracle).enumerate() {
            ensure((a - o).abs() < 1e-6, || format!("draw {draw} position {k}: {a} vs {o}"))?;
        }
    }
    Ok(())
}

fn check_interleaver() -> Result<(), String> {
    for seed in 0..20u64 {
        let p = Permutation::generate(seed, 101).map_err(|e| e.to_string())?;
        let mut sorted = p.forward().to_vec();
        sorted.sort_unstable();
        ensure(sorted == (0..101).collect::<Vec<_>>(), || format!("seed {seed} not a bijection"))?;
        let x: Vec<usize> = (0..101).map(|i| i * 3).collect();
        let back = p.invert_apply(&p.apply(&x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(back == x, || format!("seed {seed} roundtrip failed"))?;
    }
    Ok(())
}

fn check_puncture() -> Result<(), String> {
    let pattern: PuncturePattern = "11101101110".parse().map_err(|e: crate::Error| e.to_string())?;
    let x: Vec<f64> = (0..37).map(|i| i as f64 + 1.0).collect();
    let restored = depuncture(&puncture(&x, &pattern), &pattern, x.len()).map_err(|e| e.to_string())?;
    for (p, (r, v)) in restored.iter().zip(&x).enumerate() {
        let expect = if pattern.is_kept(p) { *v } else { 0.0 };
        ensure(*r == expect, || format!("position {p}"))?;
    }
    Ok(())
}

fn check_combine() -> Result<(), String> {
    let swap = combine_group(&[1.5, -0.25]).map_err(|e| e.to_string())?;
    ensure(swap == [-0.25, 1.5], || "degree-2 exchange is not a swap".into())?;
    let eq = combine_group(&[0.5; 5]).map_err(|e| e.to_string())?;
    ensure(eq.iter().all(|v| (v - 2.0).abs() < 1e-12), || "equal copies do not scale by d-1".into())
}

fn check_rate() -> Result<(), String> {
    let profile: DegreeProfile = "2:0.888,8:0.06,9:0.052".parse().map_err(|e: crate::Error| e.to_string())?;
    let pattern: PuncturePattern = "11101101110".parse().map_err(|e: crate::Error| e.to_string())?;
    let r = code_rate(&profile, &pattern);
    ensure((r - 0.3354).abs() < 5e-5, || format!("rate {r}"))
}

fn check_constellations() -> Result<(), String> {
    for m in Modulation::ALL {
        let pts = Constellation::new(m).points();
        let e = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
        ensure((e - 1.0).abs() < 1e-12, || format!("{m} energy {e}"))?;
    }
    Ok(())
}

fn check_roundtrip() -> Result<(), String> {
    let config = CodecConfig::new(
        200,
        "2:0.85,7:0.15".parse().map_err(|e: crate::Error| e.to_string())?,
        "11101101110".parse().map_err(|e: crate::Error| e.to_string())?,
    )
    .with_seed(11);
    let codec = Codec::new(config).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bits: Vec<Bit> = (0..200).map(|_| rng.random::<bool>() as Bit).collect();
    let tx = codec.encode(&bits).map_err(|e| e.to_string())?.to_bits();
    let llrs: Vec<f64> = tx.iter().map(|&b| if b == 0 { 30.0 } else { -30.0 }).collect();
    let r = codec
        .decode(&codec.split_llrs(&llrs).map_err(|e| e.to_string())?, None)
        .map_err(|e| e.to_string())?;
    ensure(r.decisions == bits, || "noiseless frame decoded with errors".into())
}
