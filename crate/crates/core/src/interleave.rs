//! Seeded random interleavers.
//!
//! `forward[i]` is the destination of input position `i`: applying the
//! permutation to `x` yields `y` with `y[forward[i]] = x[i]`.
//!
//! Tables come from a Fisher–Yates shuffle driven by ChaCha8 (`rand_chacha`)
//! seeded with `seed_from_u64`. Bounded draws use rejection sampling on raw
//! `next_u64` output, so tables depend only on the ChaCha8 keystream and stay
//! stable across platforms and `rand` releases.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::check_len;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
    seed: u64,
}

/// Uniform draw from `0..=bound` by rejection.
fn draw_inclusive(rng: &mut impl RngCore, bound: u64) -> u64 {
    if bound == u64::MAX {
        return rng.next_u64();
    }
    let range = bound + 1;
    let zone = u64::MAX - (u64::MAX - range + 1) % range;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % range;
        }
    }
}

impl Permutation {
    /// Uniformly random permutation of `n` positions, reproducible from `seed`.
    pub fn generate(seed: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("interleaver size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forward: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = draw_inclusive(&mut rng, i as u64) as usize;
            forward.swap(i, j);
        }
        Ok(Self::from_parts(forward, seed))
    }

    /// Builds a permutation from an explicit forward table.
    pub fn from_table(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut seen = vec![false; n];
        for &d in &forward {
            if d >= n || std::mem::replace(&mut seen[d], true) {
                return Err(Error::InvalidConfig(format!(
                    "forward table is not a bijection on 0..{n}"
                )));
            }
        }
        if n == 0 {
            return Err(Error::InvalidConfig("interleaver size must be at least 1".into()));
        }
        Ok(Self::from_parts(forward, 0))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_table((0..n).collect())
    }

    fn from_parts(forward: Vec<usize>, seed: u64) -> Self {
        let mut inverse = vec![0; forward.len()];
        for (i, &d) in forward.iter().enumerate() {
            inverse[d] = i;
        }
        Self {
            forward,
            inverse,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// π: `out[forward[i]] = seq[i]`.
    pub fn apply<T: Copy>(&self, seq: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), seq.len())?;
        Ok(self.inverse.iter().map(|&i| seq[i]).collect())
    }

    /// π′: `out[i] = seq[forward[i]]`.
    pub fn invert_apply<T: Copy>(&self, seq: &[T]) -> Result<Vec<T>> {
        check_len(self.len(), seq.len())?;
        Ok(self.forward.iter().map(|&d| seq[d]).collect())
    }

    /// In-place variants for hot loops; `out` must already have the right length.
    pub(crate) fn apply_into<T: Copy>(&self, seq: &[T], out: &mut [T]) {
        for (o, &i) in out.iter_mut().zip(&self.inverse) {
            *o = seq[i];
        }
    }

    pub(crate) fn invert_apply_into<T: Copy>(&self, seq: &[T], out: &mut [T]) {
        for (o, &d) in out.iter_mut().zip(&self.forward) {
            *o = seq[d];
        }
    }

    /// Text dump: header `N=<size> seed=<seed>`, then one forward index per line.
    pub fn dump(&self) -> String {
        let mut s = format!("N={} seed={}\n", self.len(), self.seed);
        for d in &self.forward {
            let _ = writeln!(s, "{d}");
        }
        s
    }

    /// Parses the [`dump`](Self::dump) format.
    pub fn read_dump(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty permutation dump".into()))??;
        let mut size = None;
        let mut seed = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("N", v)) => size = v.parse::<usize>().ok(),
                Some(("seed", v)) => seed = v.parse::<u64>().ok(),
                _ => {}
            }
        }
        let (size, seed) = size
            .zip(seed)
            .ok_or_else(|| Error::Parse(format!("bad permutation header `{header}`")))?;
        let forward = lines
            .map(|l| -> Result<usize> {
                let l = l?;
                l.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad permutation index `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        check_len(size, forward.len())?;
        let mut perm = Self::from_table(forward)?;
        perm.seed = seed;
        Ok(perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_one_is_identity() {
        assert_eq!(Permutation::generate(99, 1).unwrap().forward(), &[0]);
        assert!(Permutation::generate(1, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = Permutation::generate(7, 500).unwrap();
        let b = Permutation::generate(7, 500).unwrap();
        let c = Permutation::generate(8, 500).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.forward(), c.forward());
    }

    #[test]
    fn mapping_convention() {
        let p = Permutation::from_table(vec![2, 0, 1]).unwrap();
        assert_eq!(p.apply(&['a', 'b', 'c']).unwrap(), vec!['b', 'c', 'a']);
        assert_eq!(p.invert_apply(&['b', 'c', 'a']).unwrap(), vec!['a', 'b', 'c']);
        let id = Permutation::identity(3).unwrap();
        assert_eq!(id.apply(&[4, 5, 6]).unwrap(), vec![4, 5, 6]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_table(vec![0, 0]).is_err());
        assert!(Permutation::from_table(vec![0, 2]).is_err());
        assert!(Permutation::generate(1, 4).unwrap().apply(&[1, 2]).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let p = Permutation::generate(42, 17).unwrap();
        let text = p.dump();
        assert!(text.starts_with("N=17 seed=42\n"));
        let q = Permutation::read_dump(text.as_bytes()).unwrap();
        assert_eq!(p, q);
        assert!(Permutation::read_dump("N=3 seed=1\n0\n1\n".as_bytes()).is_err());
    }
}
