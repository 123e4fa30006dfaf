//! Brute-force reference for the SISO decoder.
//!
//! Enumerates every input sequence of the terminated RSC, scores each codeword
//! with the probability implied by the input LLRs, and sums the probabilities
//! per bit value. Runs its own shift register rather than the [`crate::rsc`]
//! tables, and shares no code with the BCJR recursions. Cost is `O(n·2ⁿ)`, so it
//! is limited to short sequences.

use crate::siso::SisoInput;

/// Longest input sequence [`exhaustive_app`] accepts.
pub const MAX_ORACLE_LEN: usize = 24;

struct Register {
    a: [u8; 3],
}

impl Register {
    /// Returns the parity bit and shifts in the fed-back bit.
    fn push(&mut self, u: u8) -> u8 {
        let [a1, a2, a3] = self.a;
        let a = u ^ a2 ^ a3;
        let p = a ^ a1 ^ a3;
        self.a = [a, a1, a2];
        p
    }

    fn flush_input(&self) -> u8 {
        self.a[1] ^ self.a[2]
    }
}

struct Enumerator<'a> {
    input: &'a SisoInput,
    offset: f64,
    best: f64,
    bits: Vec<u8>,
    zero: Vec<f64>,
    one: Vec<f64>,
}

fn half_signed(bit: u8, llr: f64) -> f64 {
    if bit == 0 {
        0.5 * llr
    } else {
        -0.5 * llr
    }
}

impl Enumerator<'_> {
    fn leaf_metric(&self, reg: &Register, metric: f64) -> f64 {
        let mut reg = Register { a: reg.a };
        let mut m = metric;
        for i in 0..3 {
            let u = reg.flush_input();
            let p = reg.push(u);
            m += half_signed(u, self.input.tail_systematic[i]) + half_signed(p, self.input.tail_parity[i]);
        }
        m
    }

    fn walk(&mut self, k: usize, reg: Register, metric: f64, accumulate: bool) {
        let n = self.input.systematic.len();
        if k == n {
            let m = self.leaf_metric(&reg, metric);
            if accumulate {
                let w = (m - self.offset).exp();
                for (j, &b) in self.bits.iter().enumerate() {
                    if b == 0 {
                        self.zero[j] += w;
                    } else {
                        self.one[j] += w;
                    }
                }
            } else {
                self.best = self.best.max(m);
            }
            return;
        }
        for u in 0..2u8 {
            let mut r = Register { a: reg.a };
            let p = r.push(u);
            let m = metric
                + half_signed(u, self.input.systematic[k] + self.input.apriori[k])
                + half_signed(p, self.input.parity[k]);
            self.bits[k] = u;
            self.walk(k + 1, r, m, accumulate);
        }
    }
}

/// Exact per-bit a posteriori LLRs `ln P(u_k = 0 | ·) − ln P(u_k = 1 | ·)`.
///
/// # Panics
///
/// If the sequence is longer than [`MAX_ORACLE_LEN`] or the input vectors
/// disagree in length.
pub fn exhaustive_app(input: &SisoInput) -> Vec<f64> {
    let n = input.systematic.len();
    assert!(n <= MAX_ORACLE_LEN, "oracle limited to {MAX_ORACLE_LEN} positions");
    assert!(input.parity.len() == n && input.apriori.len() == n);
    let mut e = Enumerator {
        input,
        offset: 0.0,
        best: f64::NEG_INFINITY,
        bits: vec![0; n],
        zero: vec![0.0; n],
        one: vec![0.0; n],
    };
    e.walk(0, Register { a: [0; 3] }, 0.0, false);
    e.offset = e.best;
    e.walk(0, Register { a: [0; 3] }, 0.0, true);
    e.zero
        .iter()
        .zip(&e.one)
        .map(|(z, o)| z.ln() - o.ln())
        .collect()
}
