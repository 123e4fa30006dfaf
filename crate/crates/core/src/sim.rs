//! Monte Carlo BER/FER simulation over AWGN, plus the throughput and capacity
//! formulas used to compare codes against the Shannon bound.
//!
//! Every frame draws its own RNG stream from `(master_seed, ebno_index, frame)`,
//! and a point consumes frames strictly in index order, so results do not
//! depend on the number of worker threads.

use std::io::Write;
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{Codec, CodecConfig, StopRule};
use crate::phy::{awgn, noise_sigma, ChannelParams, Constellation, Modulation};
use crate::profile::{DegreeProfile, PuncturePattern};
use crate::siso::Metric;
use crate::{Bit, Error, Result};

/// Default number of frame errors collected per point.
pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 100;

/// CSV header of [`SimResult::write_csv`].
pub const CSV_HEADER: &str =
    "ebno_db,frames,bit_errors,frame_errors,ber,fer,mean_iters,throughput,nominal_rate,measured_rate,censored";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub codec: CodecConfig,
    pub modulation: Modulation,
    pub ebno_points: Vec<f64>,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub master_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Skip the code entirely and send the information bits as they are.
    #[serde(default)]
    pub uncoded: bool,
    #[serde(default)]
    pub demap_metric: Metric,
    /// Stop a sweep after the first point whose BER falls below this.
    #[serde(default)]
    pub ber_floor: Option<f64>,
}

impl SimConfig {
    pub fn new(codec: CodecConfig, modulation: Modulation, ebno_points: Vec<f64>) -> Self {
        Self {
            codec,
            modulation,
            ebno_points,
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            max_frames: 10_000,
            master_seed: 0,
            workers: 1,
            uncoded: false,
            demap_metric: Metric::Exact,
            ber_floor: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_frame_errors == 0 {
            return Err(Error::InvalidConfig("min_frame_errors must be at least 1".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidConfig("max_frames must be at least 1".into()));
        }
        if self.ebno_points.is_empty() {
            return Err(Error::InvalidConfig("no Eb/N0 points".into()));
        }
        Ok(())
    }
}

/// Integer error counters of one Eb/N0 point. Merging is plain addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCounters {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub iterations: u64,
}

impl PointCounters {
    pub fn merge(self, other: Self) -> Self {
        Self {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            frame_errors: self.frame_errors + other.frame_errors,
            iterations: self.iterations + other.iterations,
        }
    }

    fn add_frame(&mut self, f: FrameOutcome) {
        self.frames += 1;
        self.bit_errors += f.bit_errors;
        self.frame_errors += (f.bit_errors > 0) as u64;
        self.iterations += f.iterations;
    }
}

#[derive(Clone, Copy, Debug)]
struct FrameOutcome {
    bit_errors: u64,
    iterations: u64,
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iters: f64,
    pub throughput: f64,
    pub nominal_rate: f64,
    pub measured_rate: f64,
    /// The frame budget ran out before `min_frame_errors` were seen.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub rows: Vec<SimRow>,
}

impl SimResult {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER.split(','))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// JSON document echoing the full configuration next to the rows.
    pub fn to_json(&self, config: &SimConfig) -> Result<String> {
        let doc = serde_json::json!({
            "config": config,
            "metadata": {
                "generator": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
                "stop_rule": config.codec.stop_rule,
                "iteration_convention": if config.codec.profile.is_regular() {
                    "SISO passes / 2 (regular code, rounded up)"
                } else {
                    "SISO passes"
                },
                "genie_stopping": config.codec.stop_rule == StopRule::Genie,
                "noise_rate": "nominal",
            },
            "rows": self.rows,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of frame `frame` at point `ebno_index`.
pub fn child_seed(master_seed: u64, ebno_index: u64, frame: u64) -> u64 {
    mix(mix(mix(master_seed) ^ ebno_index) ^ frame)
}

/// A configured simulation: codec, constellation and worker pool.
pub struct Simulator {
    config: SimConfig,
    codec: Codec,
    constellation: Constellation,
    pool: Option<rayon::ThreadPool>,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let codec = Codec::new(config.codec.clone())?;
        let pool = if config.workers == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
            )
        };
        Ok(Self {
            constellation: Constellation::new(config.modulation),
            config,
            codec,
            pool,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn nominal_rate(&self) -> f64 {
        if self.config.uncoded {
            1.0
        } else {
            self.codec.nominal_rate()
        }
    }

    pub fn measured_rate(&self) -> f64 {
        if self.config.uncoded {
            1.0
        } else {
            self.codec.measured_rate()
        }
    }

    /// Noise variance per real dimension at `ebno_db`, using the nominal rate.
    pub fn sigma2(&self, ebno_db: f64) -> Result<f64> {
        noise_sigma(&ChannelParams {
            ebno_db,
            rate: self.nominal_rate(),
            bits_per_symbol: self.config.modulation.bits_per_symbol(),
        })
    }

    fn simulate_frame(&self, ebno_index: u64, sigma2: f64, frame: u64) -> Result<FrameOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(self.config.master_seed, ebno_index, frame));
        let k = self.codec.frame_size();
        let bits: Vec<Bit> = (0..k).map(|_| rng.random::<bool>() as Bit).collect();
        let modulation = self.config.modulation;
        let (decisions, iterations) = if self.config.uncoded {
            let symbols = self.constellation.map_bits(&bits);
            let noisy = awgn(&symbols, sigma2, modulation.is_real(), &mut rng);
            let llrs = self.constellation.demap_bits(&noisy, sigma2, self.config.demap_metric, k);
            (llrs.iter().map(|&l| (l < 0.0) as Bit).collect::<Vec<_>>(), 0)
        } else {
            let tx = self.codec.encode(&bits)?.to_bits();
            let symbols = self.constellation.map_bits(&tx);
            let noisy = awgn(&symbols, sigma2, modulation.is_real(), &mut rng);
            let llrs = self
                .constellation
                .demap_bits(&noisy, sigma2, self.config.demap_metric, tx.len());
            let result = self.codec.decode(&self.codec.split_llrs(&llrs)?, Some(&bits))?;
            (result.decisions, result.iterations_used as u64)
        };
        let bit_errors = bits.iter().zip(&decisions).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameOutcome {
            bit_errors,
            iterations,
        })
    }

    fn outcomes(&self, ebno_index: u64, sigma2: f64, frames: Range<u64>) -> Result<Vec<FrameOutcome>> {
        let run = || {
            frames
                .clone()
                .into_par_iter()
                .map(|f| self.simulate_frame(ebno_index, sigma2, f))
                .collect::<Result<Vec<_>>>()
        };
        match &self.pool {
            Some(pool) => pool.install(run),
            None => frames.clone().map(|f| self.simulate_frame(ebno_index, sigma2, f)).collect(),
        }
    }

    /// Counters over an explicit frame range, ignoring the stopping rule.
    pub fn simulate_frames(&self, ebno_index: u64, ebno_db: f64, frames: Range<u64>) -> Result<PointCounters> {
        let sigma2 = self.sigma2(ebno_db)?;
        let mut acc = PointCounters::default();
        for o in self.outcomes(ebno_index, sigma2, frames)? {
            acc.add_frame(o);
        }
        Ok(acc)
    }

    /// Runs frames in index order until `min_frame_errors` frame errors or
    /// `max_frames` frames.
    pub fn run_counters(&self, ebno_index: u64, ebno_db: f64) -> Result<PointCounters> {
        let sigma2 = self.sigma2(ebno_db)?;
        let workers = self.pool.as_ref().map_or(1, |p| p.current_num_threads());
        let chunk = 4 * workers as u64;
        let mut acc = PointCounters::default();
        let mut next = 0;
        'outer: while next < self.config.max_frames && acc.frame_errors < self.config.min_frame_errors {
            let end = (next + chunk).min(self.config.max_frames);
            for o in self.outcomes(ebno_index, sigma2, next..end)? {
                acc.add_frame(o);
                if acc.frame_errors >= self.config.min_frame_errors {
                    break 'outer;
                }
            }
            next = end;
        }
        Ok(acc)
    }

    pub fn row(&self, ebno_db: f64, c: PointCounters) -> SimRow {
        let k = self.codec.frame_size() as f64;
        let frames = c.frames.max(1) as f64;
        let fer = c.frame_errors as f64 / frames;
        SimRow {
            ebno_db,
            frames: c.frames,
            bit_errors: c.bit_errors,
            frame_errors: c.frame_errors,
            ber: c.bit_errors as f64 / (frames * k),
            fer,
            mean_iters: c.iterations as f64 / frames,
            throughput: self.nominal_rate() * self.config.modulation.bits_per_symbol() as f64 * (1.0 - fer),
            nominal_rate: self.nominal_rate(),
            measured_rate: self.measured_rate(),
            censored: c.frame_errors < self.config.min_frame_errors,
        }
    }

    pub fn run_point(&self, ebno_index: usize, ebno_db: f64) -> Result<SimRow> {
        Ok(self.row(ebno_db, self.run_counters(ebno_index as u64, ebno_db)?))
    }

    /// Runs every point in order, calling `progress` after each one.
    pub fn run_sweep_with(&self, mut progress: impl FnMut(&SimRow)) -> Result<SimResult> {
        let mut rows = Vec::with_capacity(self.config.ebno_points.len());
        for (i, &ebno) in self.config.ebno_points.iter().enumerate() {
            let row = self.run_point(i, ebno)?;
            progress(&row);
            let stop = self.config.ber_floor.is_some_and(|floor| row.ber < floor);
            rows.push(row);
            if stop {
                break;
            }
        }
        Ok(SimResult { rows })
    }

    pub fn run_sweep(&self) -> Result<SimResult> {
        self.run_sweep_with(|_| {})
    }
}

/// First point of `config.ebno_points`, as a single row.
pub fn run_point(config: &SimConfig, ebno_db: f64) -> Result<SimRow> {
    Simulator::new(config.clone())?.run_point(0, ebno_db)
}

pub fn run_sweep(config: &SimConfig) -> Result<SimResult> {
    Simulator::new(config.clone())?.run_sweep()
}

/// Throughput in bits per channel use: `R·log₂M·(1 − FER)`.
pub fn throughput(rate: f64, order: usize, fer: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fer) {
        return Err(Error::InvalidConfig(format!("FER {fer} outside [0, 1]")));
    }
    Ok(rate * (order as f64).log2() * (1.0 - fer))
}

/// AWGN capacity `log₂(1 + SNR)` in bit/s/Hz.
pub fn shannon_capacity(snr_db: f64) -> f64 {
    (1.0 + 10f64.powf(snr_db / 10.0)).log2()
}

/// `SNR = Eb/N0 + 10·log₁₀(R·log₂M)`, both in dB.
pub fn ebno_to_snr(ebno_db: f64, rate: f64, order: usize) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::InvalidConfig(format!("rate must be positive, got {rate}")));
    }
    Ok(ebno_db + 10.0 * (rate * (order as f64).log2()).log10())
}

/// Smallest swept Eb/N0 whose BER is at or below `target`.
pub fn converging_ebno(rows: &[SimRow], target: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.ber <= target)
        .map(|r| r.ebno_db)
        .min_by(|a, b| a.total_cmp(b))
}

/// Eb/N0 where the BER curve crosses `target`, interpolating `log₁₀ BER`
/// linearly between the two bracketing points (rows sorted by Eb/N0).
pub fn crossing_ebno(rows: &[SimRow], target: f64) -> Option<f64> {
    let mut sorted: Vec<&SimRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.ebno_db.total_cmp(&b.ebno_db));
    let lt = target.log10();
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.ber > target && b.ber <= target {
            if b.ber == 0.0 {
                return Some(b.ebno_db);
            }
            let (la, lb) = (a.ber.log10(), b.ber.log10());
            return Some(a.ebno_db + (la - lt) / (la - lb) * (b.ebno_db - a.ebno_db));
        }
    }
    sorted.first().filter(|r| r.ber <= target).map(|r| r.ebno_db)
}

/// `start, start + step, …` up to and including `stop`.
pub fn ebno_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::InvalidConfig(format!(
            "bad Eb/N0 range [{start}, {stop}] step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
        .collect())
}

/// On-disk sweep description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub frame_size: usize,
    pub profile: DegreeProfile,
    pub puncture: PuncturePattern,
    pub seed: u64,
    pub modulation: Modulation,
    /// `[start, stop, step]` in dB.
    pub ebno: [f64; 3],
    pub max_iter: usize,
    pub stop_rule: StopRule,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    pub max_frames: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Defaults to `seed`.
    #[serde(default)]
    pub interleaver_seed: Option<u64>,
    #[serde(default)]
    pub uncoded: bool,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub ber_floor: Option<f64>,
}

fn default_min_frame_errors() -> u64 {
    DEFAULT_MIN_FRAME_ERRORS
}

fn default_workers() -> usize {
    1
}

impl SweepFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let codec = CodecConfig::new(self.frame_size, self.profile.clone(), self.puncture.clone())
            .with_seed(self.interleaver_seed.unwrap_or(self.seed))
            .with_max_iterations(self.max_iter)
            .with_stop_rule(self.stop_rule)
            .with_metric(self.metric);
        let config = SimConfig {
            codec,
            modulation: self.modulation,
            ebno_points: ebno_grid(self.ebno[0], self.ebno[1], self.ebno[2])?,
            min_frame_errors: self.min_frame_errors,
            max_frames: self.max_frames,
            master_seed: self.seed,
            workers: self.workers,
            uncoded: self.uncoded,
            demap_metric: self.metric,
            ber_floor: self.ber_floor,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throughput_examples() {
        assert!((throughput(1.0 / 3.0, 2, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(throughput(0.5, 64, 1.0).unwrap(), 0.0);
        assert!((throughput(0.33, 64, 0.0303).unwrap() - 1.92).abs() < 5e-3);
        assert!(throughput(0.5, 4, 1.5).is_err());
        assert!(throughput(0.5, 4, -0.1).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(shannon_capacity(0.0), 1.0);
        assert!((shannon_capacity(10.0 * 3f64.log10()) - 2.0).abs() < 1e-12);
        assert!((shannon_capacity(-30.0) - 0.001441974).abs() < 1e-8);
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(ebno_to_snr(1.3, 1.0, 2).unwrap(), 1.3);
        assert!((ebno_to_snr(0.0, 1.0 / 3.0, 2).unwrap() + 4.771212547).abs() < 1e-8);
        assert!((ebno_to_snr(4.10, 0.33, 64).unwrap() - 7.0666).abs() < 1e-3);
        assert!(ebno_to_snr(0.0, 0.0, 2).is_err());
    }

    #[test]
    fn grid() {
        assert_eq!(ebno_grid(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(ebno_grid(0.1, 0.3, 0.1).unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(ebno_grid(2.0, 2.0, 0.1).unwrap(), vec![2.0]);
        assert!(ebno_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn child_seeds_differ() {
        let a = child_seed(1, 0, 0);
        assert_ne!(a, child_seed(1, 0, 1));
        assert_ne!(a, child_seed(1, 1, 0));
        assert_ne!(a, child_seed(2, 0, 0));
        assert_eq!(a, child_seed(1, 0, 0));
    }

    fn row(ebno_db: f64, ber: f64) -> SimRow {
        SimRow {
            ebno_db,
            frames: 1,
            bit_errors: 0,
            frame_errors: 0,
            ber,
            fer: 0.0,
            mean_iters: 0.0,
            throughput: 0.0,
            nominal_rate: 0.5,
            measured_rate: 0.5,
            censored: false,
        }
    }

    #[test]
    fn crossing_interpolates_in_log_domain() {
        let rows = [row(1.0, 1e-2), row(2.0, 1e-4), row(3.0, 0.0)];
        assert!((crossing_ebno(&rows, 1e-3).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(crossing_ebno(&rows, 1e-5), Some(3.0));
        assert_eq!(converging_ebno(&rows, 1e-4), Some(2.0));
        assert_eq!(crossing_ebno(&rows[..1], 1e-3), None);
    }

    #[test]
    fn sweep_file_parsing() {
        let text = r#"{"frame_size": 100, "profile": "2:0.85,7:0.15", "puncture": "11101101110",
            "seed": 9, "modulation": "64qam", "ebno": [3.0, 4.0, 0.5], "max_iter": 16,
            "stop_rule": "genie", "min_frame_errors": 50, "max_frames": 1000, "workers": 2}"#;
        let cfg = SweepFile::from_json(text).unwrap().to_sim_config().unwrap();
        assert_eq!(cfg.ebno_points, vec![3.0, 3.5, 4.0]);
        assert_eq!(cfg.modulation, Modulation::Qam64);
        assert_eq!(cfg.codec.stop_rule, StopRule::Genie);
        assert_eq!(cfg.codec.interleaver_seed, 9);
        let bad = text.replace("\"workers\": 2", "\"workers\": 2, \"bogus\": 1");
        assert!(SweepFile::from_json(&bad).is_err());
    }
}
