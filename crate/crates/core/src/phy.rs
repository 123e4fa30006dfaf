//! Gray-mapped modulation, AWGN and soft demapping.
//!
//! Bit 0 maps to the positive amplitude, matching the LLR convention
//! `L = ln(P(0)/P(1))`. Square QAM carries the first half of each symbol's bits
//! on the in-phase axis and the second half on the quadrature axis, each as a
//! Gray-labelled PAM. All constellations have unit average energy and the
//! noise variance `σ²` is per real dimension.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::siso::Metric;
use crate::{Bit, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
    #[serde(rename = "16qam")]
    Qam16,
    #[serde(rename = "64qam")]
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 4] = [Self::Bpsk, Self::Qpsk, Self::Qam16, Self::Qam64];

    /// `M`.
    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// `log₂ M`.
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qpsk => 2,
            Self::Qam16 => 4,
            Self::Qam64 => 6,
        }
    }

    pub fn is_real(self) -> bool {
        self == Self::Bpsk
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Qam16 => "16qam",
            Self::Qam64 => "64qam",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Bpsk),
            "qpsk" => Ok(Self::Qpsk),
            "16qam" | "qam16" => Ok(Self::Qam16),
            "64qam" | "qam64" => Ok(Self::Qam64),
            _ => Err(Error::Parse(format!("unknown modulation `{s}`"))),
        }
    }
}

/// Binary-reflected Gray code.
pub fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

/// Point set and labelling of one modulation.
#[derive(Clone, Debug)]
pub struct Constellation {
    modulation: Modulation,
    /// Bits per real axis.
    axis_bits: usize,
    /// Amplitude per axis label (indexed by label value).
    axis_amplitude: Vec<f64>,
}

impl Constellation {
    pub fn new(modulation: Modulation) -> Self {
        let axis_bits = if modulation.is_real() {
            1
        } else {
            modulation.bits_per_symbol() / 2
        };
        let levels = 1usize << axis_bits;
        let energy = if modulation.is_real() {
            1.0
        } else {
            2.0 * (modulation.order() as f64 - 1.0) / 3.0
        };
        let scale = energy.sqrt();
        let mut axis_amplitude = vec![0.0; levels];
        for i in 0..levels {
            // level 0 is the most positive amplitude
            axis_amplitude[gray(i as u32) as usize] = ((levels - 1) as f64 - 2.0 * i as f64) / scale;
        }
        Self {
            modulation,
            axis_bits,
            axis_amplitude,
        }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    /// Amplitudes of one axis, indexed by Gray label.
    pub fn axis_amplitudes(&self) -> &[f64] {
        &self.axis_amplitude
    }

    /// The symbol carrying `label` (first bit most significant).
    pub fn point(&self, label: u32) -> Complex64 {
        if self.modulation.is_real() {
            return Complex64::new(self.axis_amplitude[label as usize], 0.0);
        }
        let mask = (1 << self.axis_bits) - 1;
        Complex64::new(
            self.axis_amplitude[(label >> self.axis_bits) as usize],
            self.axis_amplitude[(label & mask) as usize],
        )
    }

    /// All `M` points, indexed by label.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.modulation.order() as u32).map(|l| self.point(l)).collect()
    }

    /// Maps bits to symbols, `log₂M` at a time; a final partial symbol is
    /// padded with zero bits.
    pub fn map_bits(&self, bits: &[Bit]) -> Vec<Complex64> {
        bits.chunks(self.bits_per_symbol())
            .map(|chunk| {
                let mut label = 0u32;
                for i in 0..self.bits_per_symbol() {
                    label = (label << 1) | chunk.get(i).copied().unwrap_or(0) as u32;
                }
                self.point(label)
            })
            .collect()
    }

    /// Number of padding bits [`map_bits`](Self::map_bits) adds to `n` bits.
    pub fn pad_bits(&self, n: usize) -> usize {
        let m = self.bits_per_symbol();
        (m - n % m) % m
    }

    /// Per-bit LLRs of every symbol (including padding positions).
    pub fn demap(&self, symbols: &[Complex64], sigma2: f64, metric: Metric) -> Vec<f64> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for y in symbols {
            self.demap_axis(y.re, sigma2, metric, &mut out);
            if !self.modulation.is_real() {
                self.demap_axis(y.im, sigma2, metric, &mut out);
            }
        }
        out
    }

    /// Demaps and drops the LLRs of padding bits.
    pub fn demap_bits(&self, symbols: &[Complex64], sigma2: f64, metric: Metric, n: usize) -> Vec<f64> {
        let mut llrs = self.demap(symbols, sigma2, metric);
        llrs.truncate(n);
        llrs
    }

    fn demap_axis(&self, y: f64, sigma2: f64, metric: Metric, out: &mut Vec<f64>) {
        let inv = 1.0 / (2.0 * sigma2);
        let metrics: Vec<f64> = self
            .axis_amplitude
            .iter()
            .map(|a| -(y - a) * (y - a) * inv)
            .collect();
        for b in (0..self.axis_bits).rev() {
            let mut zero = f64::NEG_INFINITY;
            let mut one = f64::NEG_INFINITY;
            for (label, &m) in metrics.iter().enumerate() {
                let slot = if (label >> b) & 1 == 0 { &mut zero } else { &mut one };
                *slot = match metric {
                    Metric::Exact => log_add(*slot, m),
                    Metric::MaxLog => slot.max(m),
                };
            }
            out.push(zero - one);
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Eb/N0 operating point of a coded link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub ebno_db: f64,
    pub rate: f64,
    pub bits_per_symbol: usize,
}

impl ChannelParams {
    pub fn sigma2(&self) -> Result<f64> {
        noise_sigma(self)
    }
}

/// Noise variance per real dimension for unit-energy symbols:
/// `σ² = 1 / (2·R·log₂M·10^(Eb/N0 / 10))`.
pub fn noise_sigma(params: &ChannelParams) -> Result<f64> {
    if !(params.rate > 0.0) {
        return Err(Error::InvalidConfig(format!("rate must be positive, got {}", params.rate)));
    }
    let ebno = 10f64.powf(params.ebno_db / 10.0);
    Ok(1.0 / (2.0 * params.rate * params.bits_per_symbol as f64 * ebno))
}

/// Adds zero-mean Gaussian noise of variance `sigma2` per real dimension.
/// Only the real part is perturbed when `real_only` is set.
pub fn awgn<R: Rng + ?Sized>(symbols: &[Complex64], sigma2: f64, real_only: bool, rng: &mut R) -> Vec<Complex64> {
    let sigma = sigma2.max(0.0).sqrt();
    symbols
        .iter()
        .map(|s| {
            let re: f64 = rng.sample(StandardNormal);
            let im = if real_only {
                0.0
            } else {
                rng.sample::<f64, _>(StandardNormal)
            };
            Complex64::new(s.re + sigma * re, s.im + sigma * im)
        })
        .collect()
}
