use irturbo::codec::{Codec, CodecConfig, DecodeTrace, StopRule};
use irturbo::rsc::Trellis;
use irturbo::siso::{LogMapDecoder, Metric};
use irturbo::Bit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_bits(k: usize, seed: u64) -> Vec<Bit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| rng.random::<bool>() as Bit).collect()
}

/// BPSK over AWGN at `ebno_db` for a rate-`rate` code, returned as channel LLRs.
fn bpsk_llrs(bits: &[Bit], rate: f64, ebno_db: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0));
    bits.iter()
        .map(|&b| {
            let x = if b == 0 { 1.0 } else { -1.0 };
            let n: f64 = rng.sample(StandardNormal);
            2.0 * (x + sigma2.sqrt() * n) / sigma2
        })
        .collect()
}

#[test]
fn bpsk_reference_frame_length() {
    let config = CodecConfig::new(1003, "2:0.888,8:0.06,9:0.052".parse().unwrap(), "11101101110".parse().unwrap());
    let codec = Codec::new(config).unwrap();
    let m = codec.repetition_map().repeated_length();
    assert_eq!(m, 891 * 2 + 60 * 8 + 52 * 9);
    // walk the mask over every parity position
    let mask = b"11101101110";
    let kept = (0..m).filter(|&i| mask[i % mask.len()] == b'1').count();
    assert_eq!(codec.kept_parity(), kept);
    assert_eq!(codec.transmitted_length(), 1003 + kept + 6);
    let frame = codec.encode(&random_bits(1003, 1)).unwrap();
    assert_eq!(frame.to_bits().len(), codec.transmitted_length());
}

#[test]
fn regular_baseline_matches_two_copy_exchange() {
    // The degree-2 code is decoded by swapping the two copies' extrinsics.
    let k = 120;
    let passes = 8;
    let codec = Codec::new(
        CodecConfig::regular(k)
            .with_seed(4)
            .with_max_iterations(passes / 2)
            .with_stop_rule(StopRule::Fixed),
    )
    .unwrap();
    let bits = random_bits(k, 2);
    let tx = codec.encode(&bits).unwrap().to_bits();
    let llrs = codec.split_llrs(&bpsk_llrs(&tx, 1.0 / 3.0, 0.0, 3)).unwrap();
    let mut trace = DecodeTrace::default();
    let result = codec.decode_traced(&llrs, None, &mut trace).unwrap();
    assert_eq!(trace.passes.len(), passes);
    assert_eq!(result.iterations_used, passes / 2);

    let perm = codec.permutation();
    let sys: Vec<f64> = perm
        .apply(&llrs.systematic.iter().flat_map(|&l| [l, l]).collect::<Vec<_>>())
        .unwrap();
    let tail_sys = [llrs.tail[0], llrs.tail[1], llrs.tail[2]];
    let tail_par = [llrs.tail[3], llrs.tail[4], llrs.tail[5]];
    let mut siso = LogMapDecoder::new(Trellis::build(), Metric::Exact);
    let mut apriori = vec![0.0; 2 * k];
    for snapshot in &trace.passes {
        let input = irturbo::siso::SisoInput {
            systematic: sys.clone(),
            parity: llrs.parity.clone(),
            apriori: apriori.clone(),
            tail_systematic: tail_sys,
            tail_parity: tail_par,
        };
        let ext = perm.invert_apply(&siso.decode(&input).unwrap().extrinsic).unwrap();
        for (a, b) in ext.iter().zip(&snapshot.extrinsic) {
            assert!((a - b).abs() < 1e-9, "pass {}", snapshot.pass);
        }
        let decisions: Vec<Bit> = (0..k).map(|j| (llrs.systematic[j] + ext[2 * j] + ext[2 * j + 1] < 0.0) as Bit).collect();
        assert_eq!(decisions, snapshot.decisions);
        let swapped: Vec<f64> = (0..2 * k).map(|i| ext[i ^ 1]).collect();
        apriori = perm.apply(&swapped).unwrap();
    }
}

#[test]
fn genie_never_needs_more_passes_than_fixed() {
    let profile = "2:0.85,7:0.15";
    for seed in 0..4 {
        let base = CodecConfig::new(400, profile.parse().unwrap(), "11101101110".parse().unwrap())
            .with_seed(seed)
            .with_max_iterations(12);
        let genie = Codec::new(base.clone().with_stop_rule(StopRule::Genie)).unwrap();
        let fixed = Codec::new(base.with_stop_rule(StopRule::Fixed)).unwrap();
        let bits = random_bits(400, 10 + seed);
        let tx = genie.encode(&bits).unwrap().to_bits();
        let llrs = genie.split_llrs(&bpsk_llrs(&tx, genie.nominal_rate(), 1.5, seed)).unwrap();
        let g = genie.decode(&llrs, Some(&bits)).unwrap();
        let f = fixed.decode(&llrs, Some(&bits)).unwrap();
        assert!(g.siso_passes <= f.siso_passes);
        assert_eq!(f.siso_passes, 12);
        if g.converged {
            assert_eq!(g.decisions, bits);
        }
    }
}

#[test]
fn high_snr_frames_decode_cleanly() {
    let codec = Codec::new(
        CodecConfig::new(200, "2:0.85,7:0.15".parse().unwrap(), "11101101110".parse().unwrap()).with_seed(7),
    )
    .unwrap();
    for frame in 0..100 {
        let bits = random_bits(200, 1000 + frame);
        let tx = codec.encode(&bits).unwrap().to_bits();
        let llrs = codec.split_llrs(&bpsk_llrs(&tx, codec.nominal_rate(), 3.0, frame)).unwrap();
        assert_eq!(codec.decode(&llrs, None).unwrap().decisions, bits, "frame {frame}");
    }
}

#[test]
fn interleaver_seed_changes_parity_only() {
    let profile = "2:0.888,8:0.06,9:0.052";
    let a = Codec::new(CodecConfig::new(300, profile.parse().unwrap(), "11101101110".parse().unwrap()).with_seed(1)).unwrap();
    let b = Codec::new(CodecConfig::new(300, profile.parse().unwrap(), "11101101110".parse().unwrap()).with_seed(2)).unwrap();
    let bits = random_bits(300, 5);
    let (fa, fb) = (a.encode(&bits).unwrap(), b.encode(&bits).unwrap());
    assert_eq!(fa.systematic, fb.systematic);
    assert_eq!(fa.parity.len(), fb.parity.len());
    assert_ne!(fa.parity, fb.parity);
    assert_eq!(a.encode(&bits).unwrap(), fa);
}

#[test]
fn trace_csv_has_one_row_per_copy_and_pass() {
    let codec = Codec::new(
        CodecConfig::new(30, "2:0.9,4:0.1".parse().unwrap(), "1".parse().unwrap())
            .with_max_iterations(3)
            .with_stop_rule(StopRule::Fixed),
    )
    .unwrap();
    let bits = random_bits(30, 9);
    let tx = codec.encode(&bits).unwrap().to_bits();
    let llrs = codec.split_llrs(&bpsk_llrs(&tx, codec.nominal_rate(), 1.0, 9)).unwrap();
    let mut trace = DecodeTrace::default();
    codec.decode_traced(&llrs, None, &mut trace).unwrap();
    let mut out = Vec::new();
    trace.write_csv(codec.repetition_map(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("pass,position,source,copy,extrinsic"));
    assert_eq!(lines.count(), 3 * codec.repetition_map().repeated_length());
}
