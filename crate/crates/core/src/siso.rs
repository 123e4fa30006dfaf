//! Log-MAP (BCJR) soft-input soft-output decoder for the terminated RSC.
//!
//! LLRs follow `L = ln(P(bit = 0) / P(bit = 1))`. A branch with input `u` and
//! parity `p` has metric `½·(±(Lsys + Lapriori) ± Lpar)`, positive sign for a
//! zero bit. Forward metrics start in state 0; backward metrics start in state
//! 0 after the three tail steps.

use crate::error::check_len;
use crate::rsc::{Trellis, STATE_COUNT, TAIL_LEN};
use crate::Result;

/// LLR magnitude bound applied to SISO inputs and extrinsic outputs.
pub const L_MAX: f64 = 50.0;

/// Finite stand-in for `−∞` in path metrics.
pub const NEG_INF: f64 = -1e9;
const NEG_HALF: f64 = NEG_INF / 2.0;

/// `max*(a, b) = max(a, b) + ln(1 + e^{−|a−b|})`.
///
/// An argument at or below the `−∞` sentinel is absorbed.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if b <= NEG_HALF {
        return a;
    }
    if a <= NEG_HALF {
        return b;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Max-log approximation of [`max_star`]: the correction term is dropped.
#[inline]
pub fn max_log(a: f64, b: f64) -> f64 {
    a.max(b)
}

/// Which Jacobian logarithm the recursions use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Exact Log-MAP.
    #[default]
    Exact,
    /// Max-Log-MAP.
    MaxLog,
}

#[inline]
pub fn clamp_llr(l: f64) -> f64 {
    l.clamp(-L_MAX, L_MAX)
}

/// Soft inputs of one SISO pass, all in trellis (interleaved) order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SisoInput {
    pub systematic: Vec<f64>,
    /// Zero at punctured positions.
    pub parity: Vec<f64>,
    pub apriori: Vec<f64>,
    pub tail_systematic: [f64; TAIL_LEN],
    pub tail_parity: [f64; TAIL_LEN],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SisoOutput {
    pub extrinsic: Vec<f64>,
    /// `systematic + apriori + extrinsic`, computed from the clamped inputs.
    pub app: Vec<f64>,
}

/// Reusable Log-MAP decoder. Holds the forward-metric buffer, so give each
/// worker its own instance.
#[derive(Clone, Debug)]
pub struct LogMapDecoder {
    trellis: Trellis,
    metric: Metric,
    alpha: Vec<[f64; STATE_COUNT]>,
}

impl LogMapDecoder {
    pub fn new(trellis: Trellis, metric: Metric) -> Self {
        Self {
            trellis,
            metric,
            alpha: Vec::new(),
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn decode(&mut self, input: &SisoInput) -> Result<SisoOutput> {
        let n = input.systematic.len();
        check_len(n, input.parity.len())?;
        check_len(n, input.apriori.len())?;
        let mut extrinsic = vec![0.0; n];
        self.extrinsic_into(
            &input.systematic,
            &input.parity,
            &input.apriori,
            &input.tail_systematic,
            &input.tail_parity,
            &mut extrinsic,
        );
        let app = input
            .systematic
            .iter()
            .zip(&input.apriori)
            .zip(&extrinsic)
            .map(|((&s, &a), &e)| clamp_llr(s) + clamp_llr(a) + e)
            .collect();
        Ok(SisoOutput { extrinsic, app })
    }

    /// Writes clamped extrinsic LLRs into `out`. All slices must have equal length.
    pub(crate) fn extrinsic_into(
        &mut self,
        systematic: &[f64],
        parity: &[f64],
        apriori: &[f64],
        tail_systematic: &[f64; TAIL_LEN],
        tail_parity: &[f64; TAIL_LEN],
        out: &mut [f64],
    ) {
        match self.metric {
            Metric::Exact => self.run(max_star, systematic, parity, apriori, tail_systematic, tail_parity, out),
            Metric::MaxLog => self.run(max_log, systematic, parity, apriori, tail_systematic, tail_parity, out),
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline(always)]
    fn run<F: Fn(f64, f64) -> f64>(
        &mut self,
        ms: F,
        systematic: &[f64],
        parity: &[f64],
        apriori: &[f64],
        tail_systematic: &[f64; TAIL_LEN],
        tail_parity: &[f64; TAIL_LEN],
        out: &mut [f64],
    ) {
        let n = systematic.len();
        let t = &self.trellis;
        // sign of a bit's contribution: bit 0 -> +, bit 1 -> -
        let sign = |b: u8, v: f64| if b == 0 { v } else { -v };

        self.alpha.clear();
        self.alpha.reserve(n + 1);
        let mut start = [NEG_INF; STATE_COUNT];
        start[0] = 0.0;
        self.alpha.push(start);
        for k in 0..n {
            let x = 0.5 * (clamp_llr(systematic[k]) + clamp_llr(apriori[k]));
            let y = 0.5 * clamp_llr(parity[k]);
            let prev = self.alpha[k];
            let mut next = [NEG_INF; STATE_COUNT];
            for (s, &a) in prev.iter().enumerate() {
                if a <= NEG_HALF {
                    continue;
                }
                for u in 0..2u8 {
                    let (ns, p) = t.step(s, u);
                    let g = sign(u, x) + sign(p, y);
                    next[ns] = ms(next[ns], a + g);
                }
            }
            normalize(&mut next);
            self.alpha.push(next);
        }

        // Tail: inputs are forced by the state, no a priori.
        let mut beta = [NEG_INF; STATE_COUNT];
        beta[0] = 0.0;
        for i in (0..TAIL_LEN).rev() {
            let x = 0.5 * clamp_llr(tail_systematic[i]);
            let y = 0.5 * clamp_llr(tail_parity[i]);
            let mut prev = [NEG_INF; STATE_COUNT];
            for (s, b) in prev.iter_mut().enumerate() {
                let u = t.termination_input[s];
                let (ns, p) = t.step(s, u);
                if beta[ns] > NEG_HALF {
                    *b = beta[ns] + sign(u, x) + sign(p, y);
                }
            }
            normalize(&mut prev);
            beta = prev;
        }

        for k in (0..n).rev() {
            let x = 0.5 * (clamp_llr(systematic[k]) + clamp_llr(apriori[k]));
            let y = 0.5 * clamp_llr(parity[k]);
            let alpha = &self.alpha[k];
            let mut zero = NEG_INF;
            let mut one = NEG_INF;
            let mut prev = [NEG_INF; STATE_COUNT];
            for s in 0..STATE_COUNT {
                for u in 0..2u8 {
                    let (ns, p) = t.step(s, u);
                    let b = beta[ns];
                    if b <= NEG_HALF {
                        continue;
                    }
                    let py = sign(p, y);
                    prev[s] = ms(prev[s], b + sign(u, x) + py);
                    if alpha[s] > NEG_HALF {
                        let m = alpha[s] + py + b;
                        if u == 0 {
                            zero = ms(zero, m);
                        } else {
                            one = ms(one, m);
                        }
                    }
                }
            }
            out[k] = clamp_llr(zero - one);
            normalize(&mut prev);
            beta = prev;
        }
    }
}

#[inline]
fn normalize(m: &mut [f64; STATE_COUNT]) {
    let top = m.iter().copied().fold(NEG_INF, f64::max);
    if top > NEG_HALF {
        for v in m.iter_mut() {
            if *v > NEG_HALF {
                *v -= top;
            }
        }
    }
}

/// One exact Log-MAP pass with a fresh decoder.
pub fn log_map_decode(input: &SisoInput, trellis: &Trellis) -> Result<SisoOutput> {
    LogMapDecoder::new(trellis.clone(), Metric::Exact).decode(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_star_values() {
        assert!((max_star(0.0, 0.0) - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(max_star(3.5, NEG_INF), 3.5);
        assert_eq!(max_star(NEG_INF, -2.0), -2.0);
        assert!((max_star(5.0, 0.0) - 5.006715348489118).abs() < 1e-9);
        assert!((max_star(0.0, 5.0) - 5.006715348489118).abs() < 1e-9);
        assert_eq!(max_log(5.0, 0.0), 5.0);
    }

    fn zero_input(n: usize) -> SisoInput {
        SisoInput {
            systematic: vec![0.0; n],
            parity: vec![0.0; n],
            apriori: vec![0.0; n],
            ..Default::default()
        }
    }

    #[test]
    fn zero_information_gives_zero_extrinsic() {
        let out = log_map_decode(&zero_input(40), &Trellis::build()).unwrap();
        for (k, e) in out.extrinsic.iter().enumerate().take(37) {
            assert!(e.abs() < 1e-9, "position {k}: {e}");
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let mut input = zero_input(8);
        input.parity.pop();
        assert!(log_map_decode(&input, &Trellis::build()).is_err());
    }

    #[test]
    fn empty_frame() {
        let out = log_map_decode(&zero_input(0), &Trellis::build()).unwrap();
        assert!(out.extrinsic.is_empty());
    }
}
