//! The 8-state UMTS recursive systematic convolutional code.
//!
//! Feedback polynomial 13 (octal, `1 + D² + D³`), feedforward 15 (octal,
//! `1 + D + D³`). With register contents `a`:
//!
//! ```text
//! a_k = u_k ⊕ a_{k-2} ⊕ a_{k-3}
//! p_k = a_k ⊕ a_{k-1} ⊕ a_{k-3}
//! ```
//!
//! State numbering: `state = a_{k-1} | a_{k-2} << 1 | a_{k-3} << 2`, i.e. the
//! most recent register bit sits in the low position.

use crate::Bit;

pub const MEMORY: usize = 3;
pub const STATE_COUNT: usize = 1 << MEMORY;
/// Number of termination steps (and of tail systematic / tail parity bits).
pub const TAIL_LEN: usize = MEMORY;

/// Transition tables of the RSC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trellis {
    pub next_state: [[u8; 2]; STATE_COUNT],
    pub parity_out: [[Bit; 2]; STATE_COUNT],
    /// Input that makes the fed-back register bit zero.
    pub termination_input: [Bit; STATE_COUNT],
}

impl Default for Trellis {
    fn default() -> Self {
        Self::build()
    }
}

impl Trellis {
    pub fn build() -> Self {
        let mut next_state = [[0; 2]; STATE_COUNT];
        let mut parity_out = [[0; 2]; STATE_COUNT];
        let mut termination_input = [0; STATE_COUNT];
        for s in 0..STATE_COUNT {
            let (a1, a2, a3) = (s & 1, (s >> 1) & 1, (s >> 2) & 1);
            for u in 0..2 {
                let a = u ^ a2 ^ a3;
                parity_out[s][u] = (a ^ a1 ^ a3) as Bit;
                next_state[s][u] = (((s << 1) | a) & (STATE_COUNT - 1)) as u8;
            }
            termination_input[s] = (a2 ^ a3) as Bit;
        }
        Self {
            next_state,
            parity_out,
            termination_input,
        }
    }

    #[inline]
    pub fn step(&self, state: usize, input: Bit) -> (usize, Bit) {
        let u = input as usize;
        (self.next_state[state][u] as usize, self.parity_out[state][u])
    }

    /// Encodes from state 0, then drives the register back to zero.
    pub fn encode(&self, bits: &[Bit]) -> RscOutput {
        let mut state = 0;
        let mut parity = Vec::with_capacity(bits.len());
        for &b in bits {
            let (next, p) = self.step(state, b);
            parity.push(p);
            state = next;
        }
        let mut tail_systematic = [0; TAIL_LEN];
        let mut tail_parity = [0; TAIL_LEN];
        for t in 0..TAIL_LEN {
            let u = self.termination_input[state];
            let (next, p) = self.step(state, u);
            tail_systematic[t] = u;
            tail_parity[t] = p;
            state = next;
        }
        RscOutput {
            parity,
            tail_systematic,
            tail_parity,
            final_state: state,
        }
    }
}

/// Parity and termination bits produced by [`Trellis::encode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RscOutput {
    pub parity: Vec<Bit>,
    pub tail_systematic: [Bit; TAIL_LEN],
    pub tail_parity: [Bit; TAIL_LEN],
    pub final_state: usize,
}
