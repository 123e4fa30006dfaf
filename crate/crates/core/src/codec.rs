//! Irregular turbo encoder and iterative single-SISO decoder.
//!
//! Encoding: repeat each information bit by its degree, interleave the repeated
//! stream, run it through the RSC, puncture the parity. The transmitted frame is
//! `systematic (K, original order) ‖ kept parity ‖ tail` where the tail is the
//! three termination inputs followed by their three parity bits.
//!
//! Decoding: the received systematic LLRs are repeated and interleaved like the
//! encoder input, the punctured parity positions are filled with zero LLRs, and
//! each pass of the Log-MAP SISO is followed by the extrinsic exchange among the
//! copies of every information bit: copy `k` of a degree-`d` bit receives the sum
//! of the other `d − 1` extrinsic values as its next a priori LLR.
//!
//! The regular turbo code is the all-degree-2 profile. For that baseline one
//! SISO pass covers both constituent codes at once, so iteration counts are
//! reported as passes ÷ 2 (rounded up) and the pass budget is twice
//! `max_iterations`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::check_len;
use crate::interleave::Permutation;
use crate::profile::{code_rate, depuncture, puncture, DegreeProfile, PuncturePattern, RepetitionMap};
use crate::rsc::{Trellis, TAIL_LEN};
use crate::siso::{LogMapDecoder, Metric};
use crate::{Bit, Error, Result};

/// Tail bits per frame: three termination inputs and their parity.
pub const TAIL_BITS: usize = 2 * TAIL_LEN;

/// When the iterative decoder stops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Always run the full budget.
    Fixed,
    /// Stop once a pass leaves every hard decision unchanged and no decision is
    /// a tie. The first pass is compared against the channel-only decisions.
    #[default]
    StableDecisions,
    /// Stop at the first pass whose decisions equal the known transmitted bits.
    /// Simulation only.
    Genie,
}

impl std::str::FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "stable" | "stable-decisions" => Ok(Self::StableDecisions),
            "genie" => Ok(Self::Genie),
            _ => Err(Error::Parse(format!("unknown stop rule `{s}`"))),
        }
    }
}

/// How the systematic channel LLR is handed to the copies of a bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystematicScaling {
    /// Every copy gets the full channel LLR.
    #[default]
    Full,
    /// Each of the `d` copies gets `1/d` of it.
    InverseDegree,
}

/// How the final decision combines the channel LLR with the copy extrinsics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// `L_ch + Σ E`.
    #[default]
    ChannelOnce,
    /// `d·L_ch + Σ E`.
    ChannelPerCopy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodecConfig {
    /// `K`, information bits per frame.
    pub frame_size: usize,
    pub profile: DegreeProfile,
    pub pattern: PuncturePattern,
    pub interleaver_seed: u64,
    pub max_iterations: usize,
    pub stop_rule: StopRule,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub systematic_scaling: SystematicScaling,
    #[serde(default)]
    pub decision_rule: DecisionRule,
}

impl CodecConfig {
    pub fn new(frame_size: usize, profile: DegreeProfile, pattern: PuncturePattern) -> Self {
        Self {
            frame_size,
            profile,
            pattern,
            interleaver_seed: 0,
            max_iterations: 20,
            stop_rule: StopRule::default(),
            metric: Metric::default(),
            systematic_scaling: SystematicScaling::default(),
            decision_rule: DecisionRule::default(),
        }
    }

    /// Rate-1/3 regular turbo code.
    pub fn regular(frame_size: usize) -> Self {
        Self::new(frame_size, DegreeProfile::regular(), PuncturePattern::unpunctured())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.interleaver_seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_stop_rule(mut self, rule: StopRule) -> Self {
        self.stop_rule = rule;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    /// Nominal rate from the profile and puncture pattern, tail excluded.
    pub fn nominal_rate(&self) -> f64 {
        code_rate(&self.profile, &self.pattern)
    }
}

/// Bits of one encoded frame, in transmission order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedFrame {
    pub systematic: Vec<Bit>,
    pub parity: Vec<Bit>,
    pub tail: [Bit; TAIL_BITS],
}

impl EncodedFrame {
    pub fn transmitted_length(&self) -> usize {
        self.systematic.len() + self.parity.len() + TAIL_BITS
    }

    /// `systematic ‖ parity ‖ tail`.
    pub fn to_bits(&self) -> Vec<Bit> {
        let mut bits = Vec::with_capacity(self.transmitted_length());
        bits.extend_from_slice(&self.systematic);
        bits.extend_from_slice(&self.parity);
        bits.extend_from_slice(&self.tail);
        bits
    }
}

/// Received LLRs of one frame, split like [`EncodedFrame`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelLlrs {
    pub systematic: Vec<f64>,
    pub parity: Vec<f64>,
    pub tail: [f64; TAIL_BITS],
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub decisions: Vec<Bit>,
    /// Iterations in the reporting convention (passes ÷ 2 for the regular code).
    pub iterations_used: usize,
    pub siso_passes: usize,
    pub converged: bool,
    /// Per information bit: channel LLR plus the extrinsics of all its copies.
    pub final_app: Vec<f64>,
}

/// Per-pass decoder state, recorded when tracing.
#[derive(Clone, Debug, PartialEq)]
pub struct PassSnapshot {
    pub pass: usize,
    /// Extrinsic LLRs in repeated-stream (deinterleaved) order.
    pub extrinsic: Vec<f64>,
    pub decisions: Vec<Bit>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecodeTrace {
    pub passes: Vec<PassSnapshot>,
}

impl DecodeTrace {
    /// CSV with columns `pass,position,source,copy,extrinsic`.
    pub fn write_csv(&self, map: &RepetitionMap, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pass", "position", "source", "copy", "extrinsic"])?;
        let layout = map.layout();
        for snap in &self.passes {
            for (pos, (slot, e)) in layout.iter().zip(&snap.extrinsic).enumerate() {
                w.write_record(&[
                    snap.pass.to_string(),
                    pos.to_string(),
                    slot.source.to_string(),
                    slot.copy.to_string(),
                    e.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// New a priori values for the copies of one bit: each copy gets the sum of the
/// other copies' extrinsic values.
pub fn combine_group(extrinsic: &[f64]) -> Result<Vec<f64>> {
    if extrinsic.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "extrinsic group of size {} (degree must be at least 2)",
            extrinsic.len()
        )));
    }
    let total: f64 = extrinsic.iter().sum();
    Ok(extrinsic.iter().map(|e| total - e).collect())
}

/// [`combine_group`] over a whole repeated stream (deinterleaved order).
pub fn extrinsic_combine(extrinsic: &[f64], map: &RepetitionMap) -> Result<Vec<f64>> {
    check_len(map.repeated_length(), extrinsic.len())?;
    let mut out = Vec::with_capacity(extrinsic.len());
    for j in 0..map.source_count() {
        out.extend(combine_group(&extrinsic[map.copies(j)])?);
    }
    Ok(out)
}

/// A configured irregular turbo codec: realized repetition map, interleaver
/// and trellis.
#[derive(Clone, Debug)]
pub struct Codec {
    config: CodecConfig,
    map: RepetitionMap,
    perm: Permutation,
    trellis: Trellis,
    kept_parity: usize,
}

impl Codec {
    pub fn new(config: CodecConfig) -> Result<Self> {
        if config.frame_size == 0 {
            return Err(Error::InvalidConfig("frame size must be at least 1".into()));
        }
        if config.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        let map = config.profile.realize(config.frame_size)?;
        let perm = Permutation::generate(config.interleaver_seed, map.repeated_length())?;
        let kept_parity = config.pattern.kept_count(map.repeated_length());
        Ok(Self {
            config,
            map,
            perm,
            trellis: Trellis::build(),
            kept_parity,
        })
    }

    pub fn config(&self) -> &CodecConfig {
        &self.config
    }

    pub fn repetition_map(&self) -> &RepetitionMap {
        &self.map
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn frame_size(&self) -> usize {
        self.config.frame_size
    }

    pub fn kept_parity(&self) -> usize {
        self.kept_parity
    }

    pub fn transmitted_length(&self) -> usize {
        self.config.frame_size + self.kept_parity + TAIL_BITS
    }

    pub fn nominal_rate(&self) -> f64 {
        self.config.nominal_rate()
    }

    /// `K / transmitted_length`, tail included.
    pub fn measured_rate(&self) -> f64 {
        self.config.frame_size as f64 / self.transmitted_length() as f64
    }

    pub fn is_regular(&self) -> bool {
        self.config.profile.is_regular()
    }

    /// Maximum number of SISO passes per frame.
    pub fn pass_budget(&self) -> usize {
        if self.is_regular() {
            2 * self.config.max_iterations
        } else {
            self.config.max_iterations
        }
    }

    fn reported_iterations(&self, passes: usize) -> usize {
        if self.is_regular() {
            passes.div_ceil(2)
        } else {
            passes
        }
    }

    pub fn encode(&self, bits: &[Bit]) -> Result<EncodedFrame> {
        check_len(self.config.frame_size, bits.len())?;
        let repeated = self.map.repeat(bits)?;
        let interleaved = self.perm.apply(&repeated)?;
        let rsc = self.trellis.encode(&interleaved);
        let mut tail = [0; TAIL_BITS];
        tail[..TAIL_LEN].copy_from_slice(&rsc.tail_systematic);
        tail[TAIL_LEN..].copy_from_slice(&rsc.tail_parity);
        Ok(EncodedFrame {
            systematic: bits.to_vec(),
            parity: puncture(&rsc.parity, &self.config.pattern),
            tail,
        })
    }

    /// Splits a flat LLR vector in transmission order.
    pub fn split_llrs(&self, llrs: &[f64]) -> Result<ChannelLlrs> {
        check_len(self.transmitted_length(), llrs.len())?;
        let k = self.config.frame_size;
        let (systematic, rest) = llrs.split_at(k);
        let (parity, tail) = rest.split_at(self.kept_parity);
        Ok(ChannelLlrs {
            systematic: systematic.to_vec(),
            parity: parity.to_vec(),
            tail: tail.try_into().expect("length checked"),
        })
    }

    /// Iterative decoding. `reference` is required by [`StopRule::Genie`] and
    /// ignored otherwise.
    pub fn decode(&self, llrs: &ChannelLlrs, reference: Option<&[Bit]>) -> Result<DecodeResult> {
        self.decode_inner(llrs, reference, None)
    }

    /// [`decode`](Self::decode) that also records every pass.
    pub fn decode_traced(
        &self,
        llrs: &ChannelLlrs,
        reference: Option<&[Bit]>,
        trace: &mut DecodeTrace,
    ) -> Result<DecodeResult> {
        self.decode_inner(llrs, reference, Some(trace))
    }

    fn decode_inner(
        &self,
        llrs: &ChannelLlrs,
        reference: Option<&[Bit]>,
        mut trace: Option<&mut DecodeTrace>,
    ) -> Result<DecodeResult> {
        let k = self.config.frame_size;
        let m = self.map.repeated_length();
        check_len(k, llrs.systematic.len())?;
        check_len(self.kept_parity, llrs.parity.len())?;
        let reference = match (self.config.stop_rule, reference) {
            (StopRule::Genie, None) => {
                return Err(Error::InvalidConfig("genie stopping needs the transmitted bits".into()))
            }
            (StopRule::Genie, Some(r)) => {
                check_len(k, r.len())?;
                Some(r)
            }
            _ => None,
        };

        let degrees = self.map.degree_of();
        let sys_rep: Vec<f64> = match self.config.systematic_scaling {
            SystematicScaling::Full => self.map.repeat(&llrs.systematic)?,
            SystematicScaling::InverseDegree => {
                let scaled: Vec<f64> = llrs
                    .systematic
                    .iter()
                    .zip(degrees)
                    .map(|(l, &d)| l / d as f64)
                    .collect();
                self.map.repeat(&scaled)?
            }
        };
        let sys_int = self.perm.apply(&sys_rep)?;
        let par = depuncture(&llrs.parity, &self.config.pattern, m)?;
        let tail_sys: [f64; TAIL_LEN] = llrs.tail[..TAIL_LEN].try_into().expect("tail size");
        let tail_par: [f64; TAIL_LEN] = llrs.tail[TAIL_LEN..].try_into().expect("tail size");
        let channel_weight = |j: usize| match self.config.decision_rule {
            DecisionRule::ChannelOnce => 1.0,
            DecisionRule::ChannelPerCopy => degrees[j] as f64,
        };

        let mut siso = LogMapDecoder::new(self.trellis.clone(), self.config.metric);
        let mut apriori = vec![0.0; m];
        let mut ext_int = vec![0.0; m];
        let mut ext_rep = vec![0.0; m];
        let mut next_rep = vec![0.0; m];
        let mut app: Vec<f64> = (0..k).map(|j| channel_weight(j) * llrs.systematic[j]).collect();
        let mut decisions: Vec<Bit> = app.iter().map(|&l| hard(l)).collect();
        let mut previous = decisions.clone();
        let mut passes = 0;
        let mut converged = false;

        for pass in 1..=self.pass_budget() {
            passes = pass;
            siso.extrinsic_into(&sys_int, &par, &apriori, &tail_sys, &tail_par, &mut ext_int);
            self.perm.invert_apply_into(&ext_int, &mut ext_rep);

            for j in 0..k {
                let copies = self.map.copies(j);
                let sum: f64 = ext_rep[copies.clone()].iter().sum();
                for c in copies {
                    next_rep[c] = sum - ext_rep[c];
                }
                app[j] = channel_weight(j) * llrs.systematic[j] + sum;
                decisions[j] = hard(app[j]);
            }
            #[cfg(debug_assertions)]
            for j in 0..k {
                let c = self.map.copies(j);
                let d = c.len() as f64;
                let lhs: f64 = next_rep[c.clone()].iter().sum();
                let rhs: f64 = (d - 1.0) * ext_rep[c].iter().sum::<f64>();
                debug_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
            }

            if let Some(t) = trace.as_deref_mut() {
                t.passes.push(PassSnapshot {
                    pass,
                    extrinsic: ext_rep.clone(),
                    decisions: decisions.clone(),
                });
            }

            let stable = decisions == previous && app.iter().all(|&l| l != 0.0);
            converged = match reference {
                Some(r) => decisions == r,
                None => stable,
            };
            if converged && self.config.stop_rule != StopRule::Fixed {
                break;
            }
            previous.copy_from_slice(&decisions);
            self.perm.apply_into(&next_rep, &mut apriori);
        }

        Ok(DecodeResult {
            decisions,
            iterations_used: self.reported_iterations(passes),
            siso_passes: passes,
            converged,
            final_app: app,
        })
    }
}

/// Tie at zero decides for bit 0.
#[inline]
fn hard(llr: f64) -> Bit {
    if llr >= 0.0 {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn saturate(bits: &[Bit]) -> Vec<f64> {
        bits.iter().map(|&b| if b == 0 { 50.0 } else { -50.0 }).collect()
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine_group(&[1.5, -0.5]).unwrap(), vec![-0.5, 1.5]);
        let got = combine_group(&[1.0, -2.0, 0.5]).unwrap();
        for (g, e) in got.iter().zip([-1.5, 1.5, -1.0]) {
            assert!((g - e).abs() < 1e-12);
        }
        for v in combine_group(&[0.7; 4]).unwrap() {
            assert!((v - 3.0 * 0.7).abs() < 1e-12);
        }
        assert!(combine_group(&[1.0]).is_err());
    }

    #[test]
    fn all_zero_frame_encodes_to_zeros() {
        let codec = Codec::new(CodecConfig::new(100, "2:0.85,7:0.15".parse().unwrap(), "11101101110".parse().unwrap())).unwrap();
        let frame = codec.encode(&[0; 100]).unwrap();
        assert!(frame.to_bits().iter().all(|&b| b == 0));
        assert_eq!(frame.transmitted_length(), codec.transmitted_length());
    }

    #[test]
    fn regular_rate_one_third() {
        let codec = Codec::new(CodecConfig::regular(40)).unwrap();
        assert_eq!(codec.transmitted_length(), 3 * 40 + 6);
        assert!((codec.nominal_rate() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_decodes_in_one_pass() {
        for profile in ["2:1.0", "2:0.85,7:0.15"] {
            let codec = Codec::new(CodecConfig::new(50, profile.parse().unwrap(), "11101101110".parse().unwrap()).with_seed(3)).unwrap();
            let bits: Vec<Bit> = (0..50).map(|i| ((i * 7 + 3) % 5 == 0) as Bit).collect();
            let frame = codec.encode(&bits).unwrap();
            let llrs = codec.split_llrs(&saturate(&frame.to_bits())).unwrap();
            let r = codec.decode(&llrs, None).unwrap();
            assert_eq!(r.decisions, bits);
            assert_eq!(r.iterations_used, 1);
            assert_eq!(r.siso_passes, 1);
            assert!(r.converged);
        }
    }

    #[test]
    fn zero_llrs_tie_to_bit_zero() {
        let codec = Codec::new(CodecConfig::regular(16).with_max_iterations(3)).unwrap();
        let llrs = codec.split_llrs(&vec![0.0; codec.transmitted_length()]).unwrap();
        let r = codec.decode(&llrs, None).unwrap();
        assert!(r.final_app.iter().all(|&l| l == 0.0));
        assert!(r.decisions.iter().all(|&b| b == 0));
        assert!(!r.converged);
        assert_eq!(r.siso_passes, 6);
        assert_eq!(r.iterations_used, 3);
    }

    #[test]
    fn genie_requires_reference() {
        let codec = Codec::new(CodecConfig::regular(8).with_stop_rule(StopRule::Genie)).unwrap();
        let llrs = codec.split_llrs(&vec![1.0; codec.transmitted_length()]).unwrap();
        assert!(codec.decode(&llrs, None).is_err());
        let r = codec.decode(&llrs, Some(&[0; 8])).unwrap();
        assert!(r.converged);
    }

    #[test]
    fn invalid_configs() {
        assert!(Codec::new(CodecConfig::regular(0)).is_err());
        assert!(Codec::new(CodecConfig::regular(8).with_max_iterations(0)).is_err());
        let codec = Codec::new(CodecConfig::regular(8)).unwrap();
        assert!(codec.encode(&[0; 7]).is_err());
        assert!(codec.split_llrs(&[0.0; 3]).is_err());
    }
}
