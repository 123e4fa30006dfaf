//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed check or strict-mode censoring, 2 usage or
//! configuration error.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use irturbo::codec::{Codec, CodecConfig, DecodeTrace, StopRule};
use irturbo::phy::Modulation;
use irturbo::profile::{code_rate, DegreeProfile, PuncturePattern};
use irturbo::sim::{self, shannon_capacity, SimConfig, SimRow, Simulator, SweepFile};
use irturbo::{selftest, Bit, Error};

#[derive(Parser)]
#[command(name = "irturbo", version, about = "Irregular turbo code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print average degree, punctured fraction, theta and nominal rate.
    Rate {
        #[arg(long, value_parser = parse_profile)]
        profile: DegreeProfile,
        #[arg(long, value_parser = parse_pattern, default_value = "1")]
        puncture: PuncturePattern,
        /// Also count the realized rate over a frame of this size.
        #[arg(long)]
        frame_size: Option<usize>,
    },
    /// Encode one frame and print it as a bit string.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Information bits; random bits from --seed when omitted.
        #[arg(long)]
        bits: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the interleaver table to this file.
        #[arg(long)]
        dump_interleaver: Option<PathBuf>,
    },
    /// Decode one frame of channel LLRs (whitespace separated, transmission order).
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        llrs: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_iter: usize,
        #[arg(long, value_parser = parse_stop_rule, default_value = "stable")]
        stop_rule: StopRule,
        /// Write per-pass extrinsic values as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a BER/FER sweep and write `<out>.csv` and `<out>.json`.
    Sweep(SweepArgs),
    /// Print Shannon capacity over an SNR range, or next to a sweep's throughput.
    Capacity {
        /// `start:stop:step` in dB.
        #[arg(long, default_value = "-5:20:1")]
        snr: String,
        /// Sweep CSV to place on the SNR axis.
        #[arg(long)]
        sweep_csv: Option<PathBuf>,
        #[arg(long = "mod", value_parser = parse_modulation, default_value = "bpsk")]
        modulation: Modulation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in oracle and property checks.
    Selftest {
        /// Alternative RSC golden-vector file.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long, value_parser = parse_profile, default_value = "2:1.0")]
    profile: DegreeProfile,
    #[arg(long, value_parser = parse_pattern, default_value = "1")]
    puncture: PuncturePattern,
    #[arg(long)]
    frame_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to --seed.
    #[arg(long)]
    interleaver_seed: Option<u64>,
}

impl CodeArgs {
    fn config(&self) -> CodecConfig {
        CodecConfig::new(self.frame_size, self.profile.clone(), self.puncture.clone())
            .with_seed(self.interleaver_seed.unwrap_or(self.seed))
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep description; inline flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_profile)]
    profile: Option<DegreeProfile>,
    #[arg(long, value_parser = parse_pattern)]
    puncture: Option<PuncturePattern>,
    #[arg(long)]
    frame_size: Option<usize>,
    #[arg(long = "mod", value_parser = parse_modulation)]
    modulation: Option<Modulation>,
    /// `start:stop:step` or a single value, in dB.
    #[arg(long)]
    ebno: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_parser = parse_stop_rule)]
    stop_rule: Option<StopRule>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    interleaver_seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    /// Output path prefix.
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
    /// Exit with status 1 if any point is censored.
    #[arg(long)]
    strict: bool,
    /// Send the information bits uncoded.
    #[arg(long)]
    uncoded: bool,
}

fn parse_profile(s: &str) -> Result<DegreeProfile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pattern(s: &str) -> Result<PuncturePattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_modulation(s: &str) -> Result<Modulation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_stop_rule(s: &str) -> Result<StopRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<[f64; 3], Error> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad range `{s}`"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [v] => Ok([v, v, 1.0]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::Parse(format!("bad range `{s}`: expected start:stop:step"))),
    }
}

fn parse_bits(s: &str) -> Result<Vec<Bit>, Error> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("bad bit `{c}`"))),
        })
        .collect()
}

fn bit_string(bits: &[Bit]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => sim::write_atomic(path, text.as_bytes()),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_rate(profile: &DegreeProfile, pattern: &PuncturePattern, frame_size: Option<usize>) -> Result<(), Error> {
    println!("average_degree={:.4}", profile.average_degree());
    println!("punctured_fraction={:.4}", pattern.deleted_fraction());
    println!("theta={:.4}", pattern.theta());
    println!("R={:.4}", code_rate(profile, pattern));
    if let Some(k) = frame_size {
        let map = profile.realize(k)?;
        let kept = pattern.kept_count(map.repeated_length());
        println!("counted_rate={:.4}", k as f64 / (k + kept) as f64);
        println!("measured_rate={:.4}", k as f64 / (k + kept + 6) as f64);
    }
    Ok(())
}

fn cmd_encode(code: &CodeArgs, bits: Option<&str>, out: Option<&Path>, dump: Option<&Path>) -> Result<(), Error> {
    let codec = Codec::new(code.config())?;
    let info = match bits {
        Some(b) => parse_bits(b)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(code.seed);
            (0..code.frame_size).map(|_| rng.random::<bool>() as Bit).collect()
        }
    };
    let frame = codec.encode(&info)?;
    if let Some(path) = dump {
        sim::write_atomic(path, codec.permutation().dump().as_bytes())?;
    }
    emit(out, &format!("info {}\ncodeword {}\n", bit_string(&info), bit_string(&frame.to_bits())))
}

fn cmd_decode(
    code: &CodeArgs,
    llrs: &Path,
    max_iter: usize,
    stop_rule: StopRule,
    trace: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Error> {
    if stop_rule == StopRule::Genie {
        return Err(Error::InvalidConfig("genie stopping needs the transmitted bits; use fixed or stable".into()));
    }
    let codec = Codec::new(code.config().with_max_iterations(max_iter).with_stop_rule(stop_rule))?;
    let values: Vec<f64> = fs::read_to_string(llrs)?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad LLR `{t}`"))))
        .collect::<Result<_, _>>()?;
    let channel = codec.split_llrs(&values)?;
    let result = if let Some(path) = trace {
        let mut t = DecodeTrace::default();
        let r = codec.decode_traced(&channel, None, &mut t)?;
        let mut buf = Vec::new();
        t.write_csv(codec.repetition_map(), &mut buf)?;
        sim::write_atomic(path, &buf)?;
        r
    } else {
        codec.decode(&channel, None)?
    };
    emit(
        out,
        &format!(
            "decoded {}\niterations {}\nsiso_passes {}\nconverged {}\n",
            bit_string(&result.decisions),
            result.iterations_used,
            result.siso_passes,
            result.converged
        ),
    )
}

fn sweep_config(args: &SweepArgs) -> Result<SimConfig, Error> {
    let mut file = match &args.config {
        Some(path) => SweepFile::load(path)?,
        None => SweepFile {
            frame_size: args
                .frame_size
                .ok_or_else(|| Error::InvalidConfig("--frame-size or --config is required".into()))?,
            profile: DegreeProfile::regular(),
            puncture: PuncturePattern::unpunctured(),
            seed: 0,
            modulation: Modulation::Bpsk,
            ebno: parse_range(
                args.ebno
                    .as_deref()
                    .ok_or_else(|| Error::InvalidConfig("--ebno or --config is required".into()))?,
            )?,
            max_iter: 20,
            stop_rule: StopRule::StableDecisions,
            min_frame_errors: sim::DEFAULT_MIN_FRAME_ERRORS,
            max_frames: 10_000,
            workers: 1,
            interleaver_seed: None,
            uncoded: false,
            metric: Default::default(),
            ber_floor: None,
        },
    };
    if let Some(v) = args.frame_size {
        file.frame_size = v;
    }
    if let Some(v) = &args.profile {
        file.profile = v.clone();
    }
    if let Some(v) = &args.puncture {
        file.puncture = v.clone();
    }
    if let Some(v) = args.modulation {
        file.modulation = v;
    }
    if let Some(v) = &args.ebno {
        file.ebno = parse_range(v)?;
    }
    if let Some(v) = args.max_iter {
        file.max_iter = v;
    }
    if let Some(v) = args.stop_rule {
        file.stop_rule = v;
    }
    if let Some(v) = args.seed {
        file.seed = v;
    }
    if args.interleaver_seed.is_some() {
        file.interleaver_seed = args.interleaver_seed;
    }
    if let Some(v) = args.workers {
        file.workers = v;
    }
    if let Some(v) = args.min_frame_errors {
        file.min_frame_errors = v;
    }
    if let Some(v) = args.max_frames {
        file.max_frames = v;
    }
    if args.uncoded {
        file.uncoded = true;
    }
    file.to_sim_config()
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_sweep(args: &SweepArgs) -> Result<bool, Error> {
    let config = sweep_config(args)?;
    let simulator = Simulator::new(config.clone())?;
    let result = simulator.run_sweep_with(|row: &SimRow| {
        eprintln!(
            "Eb/N0 {:6.2} dB  frames {:6}  frame errors {:5}  BER {:.3e}  FER {:.3e}  iters {:.2}{}",
            row.ebno_db,
            row.frames,
            row.frame_errors,
            row.ber,
            row.fer,
            row.mean_iters,
            if row.censored { "  (censored)" } else { "" }
        );
    })?;
    sim::write_atomic(&with_extension(&args.out, "csv"), result.to_csv_string()?.as_bytes())?;
    sim::write_atomic(&with_extension(&args.out, "json"), result.to_json(&config)?.as_bytes())?;
    Ok(!(args.strict && result.rows.iter().any(|r| r.censored)))
}

fn cmd_capacity(snr: &str, sweep_csv: Option<&Path>, modulation: Modulation, out: Option<&Path>) -> Result<(), Error> {
    let mut text = String::new();
    match sweep_csv {
        Some(path) => {
            let mut reader = csv::Reader::from_reader(BufReader::new(fs::File::open(path)?));
            text.push_str("ebno_db,snr_db,throughput,capacity\n");
            for row in reader.deserialize::<SimRow>() {
                let row = row?;
                let snr_db = sim::ebno_to_snr(row.ebno_db, row.nominal_rate, modulation.order())?;
                text.push_str(&format!(
                    "{},{:.4},{:.4},{:.4}\n",
                    row.ebno_db,
                    snr_db,
                    row.throughput,
                    shannon_capacity(snr_db)
                ));
            }
        }
        None => {
            let [start, stop, step] = parse_range(snr)?;
            text.push_str("snr_db,capacity\n");
            for s in sim::ebno_grid(start, stop, step)? {
                text.push_str(&format!("{s},{:.6}\n", shannon_capacity(s)));
            }
        }
    }
    emit(out, &text)
}

fn cmd_selftest(golden: Option<&Path>) -> Result<bool, Error> {
    let text = match golden {
        Some(p) => fs::read_to_string(p)?,
        None => selftest::RSC_GOLDEN.to_string(),
    };
    let report = selftest::run(&text);
    for c in &report.checks {
        match &c.outcome {
            Ok(()) => println!("PASS {:<28} {:>9.3} ms", c.name, c.elapsed.as_secs_f64() * 1e3),
            Err(e) => println!("FAIL {:<28} {:>9.3} ms  {e}", c.name, c.elapsed.as_secs_f64() * 1e3),
        }
    }
    Ok(report.passed())
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::Io(_) | Error::Csv(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Rate {
            profile,
            puncture,
            frame_size,
        } => cmd_rate(profile, puncture, *frame_size).map(|_| true),
        Command::Encode {
            code,
            bits,
            out,
            dump_interleaver,
        } => cmd_encode(code, bits.as_deref(), out.as_deref(), dump_interleaver.as_deref()).map(|_| true),
        Command::Decode {
            code,
            llrs,
            max_iter,
            stop_rule,
            trace,
            out,
        } => cmd_decode(code, llrs, *max_iter, *stop_rule, trace.as_deref(), out.as_deref()).map(|_| true),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Capacity {
            snr,
            sweep_csv,
            modulation,
            out,
        } => cmd_capacity(snr, sweep_csv.as_deref(), *modulation, out.as_deref()).map(|_| true),
        Command::Selftest { golden } => cmd_selftest(golden.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
