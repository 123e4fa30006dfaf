//! Degree profiles, repetition maps, parity puncturing and rate arithmetic.
//!
//! A [`DegreeProfile`] says what fraction of the information bits is repeated how
//! many times. [`DegreeProfile::realize`] turns it into a concrete
//! [`RepetitionMap`] for a frame of `K` bits. Parity puncturing is a cyclic
//! keep/delete mask ([`PuncturePattern`]).
//!
//! With average degree `d̄ = Σ dᵢ·fᵢ` and punctured parity fraction `f₀`, the
//! nominal code rate is `R = 1 / (1 + d̄·(1/θ − 1))` where `θ = 1/(2 − f₀)`,
//! i.e. `R = 1 / (1 + d̄·(1 − f₀))`. Tail bits are not part of this bookkeeping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::check_len;
use crate::{Error, Result};

/// Tolerance on `Σ fᵢ = 1`.
pub const FRACTION_SUM_TOLERANCE: f64 = 1e-9;

/// One group of a degree profile: `fraction` of the information bits are
/// repeated `degree` times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeEntry {
    pub degree: usize,
    pub fraction: f64,
}

/// Reason a degree profile was rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileViolation {
    Empty,
    DegreeTooSmall { degree: usize },
    DuplicateDegree { degree: usize },
    FractionOutOfRange { degree: usize, fraction: f64 },
    FractionSum { sum: f64 },
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "profile has no entries"),
            Self::DegreeTooSmall { degree } => write!(f, "degree {degree} is below 2"),
            Self::DuplicateDegree { degree } => write!(f, "degree {degree} appears more than once"),
            Self::FractionOutOfRange { degree, fraction } => {
                write!(f, "fraction {fraction} of degree {degree} is outside (0, 1]")
            }
            Self::FractionSum { sum } => write!(f, "fractions sum to {sum}, not 1"),
        }
    }
}

impl std::error::Error for ProfileViolation {}

/// Checks every degree-profile invariant and names the first one violated.
pub fn validate_profile(entries: &[DegreeEntry]) -> std::result::Result<(), ProfileViolation> {
    if entries.is_empty() {
        return Err(ProfileViolation::Empty);
    }
    for (i, e) in entries.iter().enumerate() {
        if e.degree < 2 {
            return Err(ProfileViolation::DegreeTooSmall { degree: e.degree });
        }
        if entries[..i].iter().any(|o| o.degree == e.degree) {
            return Err(ProfileViolation::DuplicateDegree { degree: e.degree });
        }
        if !(e.fraction > 0.0 && e.fraction <= 1.0) {
            return Err(ProfileViolation::FractionOutOfRange {
                degree: e.degree,
                fraction: e.fraction,
            });
        }
    }
    let sum: f64 = entries.iter().map(|e| e.fraction).sum();
    if (sum - 1.0).abs() > FRACTION_SUM_TOLERANCE {
        return Err(ProfileViolation::FractionSum { sum });
    }
    Ok(())
}

/// The `(dᵢ, fᵢ)` repetition profile of an irregular turbo code.
///
/// Literal syntax is `degree:fraction` pairs separated by commas, e.g.
/// `"2:0.888,8:0.06,9:0.052"`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile {
    entries: Vec<DegreeEntry>,
}

impl DegreeProfile {
    pub fn new(entries: Vec<DegreeEntry>) -> Result<Self> {
        validate_profile(&entries).map_err(|v| Error::InvalidProfile(v.to_string()))?;
        Ok(Self { entries })
    }

    /// Builds a profile from `(degree, fraction)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(degree, fraction)| DegreeEntry { degree, fraction })
                .collect(),
        )
    }

    /// The all-degree-2 profile: the regular turbo code.
    pub fn regular() -> Self {
        Self {
            entries: vec![DegreeEntry {
                degree: 2,
                fraction: 1.0,
            }],
        }
    }

    pub fn entries(&self) -> &[DegreeEntry] {
        &self.entries
    }

    /// `d̄ = Σ dᵢ·fᵢ`.
    pub fn average_degree(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.degree as f64 * e.fraction)
            .sum()
    }

    /// `T`, the largest degree present.
    pub fn max_degree(&self) -> usize {
        self.entries.iter().map(|e| e.degree).max().unwrap_or(2)
    }

    /// True when every bit has degree 2.
    pub fn is_regular(&self) -> bool {
        self.entries.iter().all(|e| e.degree == 2)
    }

    /// Number of bits per group for a frame of `k` bits, in ascending degree
    /// order, by largest-remainder rounding of `fᵢ·k`.
    ///
    /// Ties between equal remainders go to the larger degree.
    pub fn group_counts(&self, k: usize) -> Result<Vec<(usize, usize)>> {
        if k < self.entries.len() {
            return Err(Error::InvalidConfig(format!(
                "frame size {k} is smaller than the {} profile entries",
                self.entries.len()
            )));
        }
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| e.degree);

        let mut counts = Vec::with_capacity(sorted.len());
        let mut remainders = Vec::with_capacity(sorted.len());
        for e in &sorted {
            let exact = e.fraction * k as f64;
            // f·k that is an integer up to float noise is treated as exact
            let snapped = if (exact - exact.round()).abs() < 1e-9 {
                exact.round()
            } else {
                exact
            };
            let floor = snapped.floor();
            counts.push(floor as usize);
            remainders.push(snapped - floor);
        }

        let assigned: usize = counts.iter().sum();
        let by_remainder = |desc: bool| {
            let mut order: Vec<usize> = (0..sorted.len()).collect();
            order.sort_by(|&a, &b| {
                let r = if desc {
                    remainders[b].partial_cmp(&remainders[a])
                } else {
                    remainders[a].partial_cmp(&remainders[b])
                };
                match r.unwrap_or(Ordering::Equal) {
                    Ordering::Equal if (remainders[a] - remainders[b]).abs() <= 1e-12 => {
                        if desc {
                            sorted[b].degree.cmp(&sorted[a].degree)
                        } else {
                            sorted[a].degree.cmp(&sorted[b].degree)
                        }
                    }
                    other => other,
                }
            });
            order
        };
        match assigned.cmp(&k) {
            Ordering::Less => {
                for &i in by_remainder(true).iter().cycle().take(k - assigned) {
                    counts[i] += 1;
                }
            }
            Ordering::Greater => {
                let mut excess = assigned - k;
                for &i in by_remainder(false).iter().cycle() {
                    if excess == 0 {
                        break;
                    }
                    if counts[i] > 0 {
                        counts[i] -= 1;
                        excess -= 1;
                    }
                }
            }
            Ordering::Equal => {}
        }
        Ok(sorted.iter().map(|e| e.degree).zip(counts).collect())
    }

    /// Assigns a degree to each of `k` source bits.
    ///
    /// Source positions `0..n₂` get the smallest degree, the next block the next
    /// degree, and so on. Which bits end up strongly protected is randomized by
    /// the interleaver, not here.
    pub fn realize(&self, k: usize) -> Result<RepetitionMap> {
        if k == 0 {
            return Err(Error::InvalidConfig("frame size must be at least 1".into()));
        }
        let groups = self.group_counts(k)?;
        let degree_of: Vec<usize> = groups
            .iter()
            .flat_map(|&(degree, count)| std::iter::repeat_n(degree, count))
            .collect();
        Ok(RepetitionMap::from_degrees(degree_of, groups))
    }
}

impl fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", e.degree, e.fraction)?;
        }
        Ok(())
    }
}

impl FromStr for DegreeProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for token in s.split(',').map(str::trim) {
            let bad = |why: &str| Error::Parse(format!("bad profile entry `{token}`: {why}"));
            let (d, f) = token
                .split_once(':')
                .ok_or_else(|| bad("expected degree:fraction"))?;
            let degree = d.trim().parse().map_err(|_| bad("degree is not an integer"))?;
            let fraction = f.trim().parse().map_err(|_| bad("fraction is not a number"))?;
            entries.push(DegreeEntry { degree, fraction });
        }
        Self::new(entries)
    }
}

impl Serialize for DegreeProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DegreeProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Cyclic keep (`1`) / delete (`0`) mask over the parity stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuncturePattern {
    mask: Vec<bool>,
}

impl PuncturePattern {
    pub fn new(mask: Vec<bool>) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::InvalidPattern("mask is empty".into()));
        }
        if !mask.iter().any(|&k| k) {
            return Err(Error::InvalidPattern("mask deletes every parity bit".into()));
        }
        Ok(Self { mask })
    }

    /// The all-keep pattern `"1"`.
    pub fn unpunctured() -> Self {
        Self { mask: vec![true] }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn period(&self) -> usize {
        self.mask.len()
    }

    /// Whether parity position `p` survives. Phase 0 at the first parity bit.
    #[inline]
    pub fn is_kept(&self, p: usize) -> bool {
        self.mask[p % self.mask.len()]
    }

    /// `f₀`: fraction of parity bits deleted.
    pub fn deleted_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&k| !k).count() as f64 / self.mask.len() as f64
    }

    /// `θ = 1 / (2 − f₀)`.
    pub fn theta(&self) -> f64 {
        1.0 / (2.0 - self.deleted_fraction())
    }

    /// Number of kept positions among the first `len` parity bits.
    pub fn kept_count(&self, len: usize) -> usize {
        let per_period = self.mask.iter().filter(|&&k| k).count();
        let rest = self.mask[..len % self.mask.len()]
            .iter()
            .filter(|&&k| k)
            .count();
        (len / self.mask.len()) * per_period + rest
    }
}

impl fmt::Display for PuncturePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &k in &self.mask {
            f.write_str(if k { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for PuncturePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("unpunctured") {
            return Ok(Self::unpunctured());
        }
        let mask = s
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::Parse(format!(
                    "bad puncture pattern `{s}`: unexpected character `{c}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mask)
    }
}

impl Serialize for PuncturePattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PuncturePattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nominal code rate `1 / (1 + d̄·(1/θ − 1))`, tail excluded.
pub fn code_rate(profile: &DegreeProfile, pattern: &PuncturePattern) -> f64 {
    1.0 / (1.0 + profile.average_degree() * (1.0 / pattern.theta() - 1.0))
}

/// Which source bit (and which of its copies) sits at a repeated-stream position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopySlot {
    pub source: usize,
    pub copy: usize,
}

/// A degree profile realized over a concrete frame.
///
/// Copies of source bit `j` occupy the contiguous range
/// `offsets[j]..offsets[j + 1]` of the repeated stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepetitionMap {
    degree_of: Vec<usize>,
    offsets: Vec<usize>,
    groups: Vec<(usize, usize)>,
}

impl RepetitionMap {
    fn from_degrees(degree_of: Vec<usize>, groups: Vec<(usize, usize)>) -> Self {
        let mut offsets = Vec::with_capacity(degree_of.len() + 1);
        offsets.push(0);
        let mut acc = 0;
        for &d in &degree_of {
            acc += d;
            offsets.push(acc);
        }
        Self {
            degree_of,
            offsets,
            groups,
        }
    }

    /// `K`, the number of information bits.
    pub fn source_count(&self) -> usize {
        self.degree_of.len()
    }

    /// `M_rep = Σ nᵢ·dᵢ`.
    pub fn repeated_length(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn degree_of(&self) -> &[usize] {
        &self.degree_of
    }

    /// `(degree, count)` per group in ascending degree order.
    pub fn groups(&self) -> &[(usize, usize)] {
        &self.groups
    }

    /// Repeated-stream positions holding copies of source bit `j`.
    #[inline]
    pub fn copies(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// The `(source, copy)` slot at every repeated-stream position.
    pub fn layout(&self) -> Vec<CopySlot> {
        (0..self.source_count())
            .flat_map(|source| (0..self.degree_of[source]).map(move |copy| CopySlot { source, copy }))
            .collect()
    }

    /// Replicates per-source values onto the repeated stream.
    pub fn repeat<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        check_len(self.source_count(), values.len())?;
        let mut out = Vec::with_capacity(self.repeated_length());
        for (&v, &d) in values.iter().zip(&self.degree_of) {
            out.extend(std::iter::repeat_n(v, d));
        }
        Ok(out)
    }
}

/// Repeats each source bit by its degree, copies contiguous in source order.
pub fn repeat_bits<T: Copy>(bits: &[T], map: &RepetitionMap) -> Result<Vec<T>> {
    map.repeat(bits)
}

/// Keeps parity position `p` iff `mask[p mod period]` is set.
pub fn puncture<T: Copy>(parity: &[T], pattern: &PuncturePattern) -> Vec<T> {
    parity
        .iter()
        .enumerate()
        .filter(|(p, _)| pattern.is_kept(*p))
        .map(|(_, &v)| v)
        .collect()
}

/// Restores kept LLRs to their original positions; deleted positions become 0
/// (an erasure).
pub fn depuncture(kept: &[f64], pattern: &PuncturePattern, full_length: usize) -> Result<Vec<f64>> {
    check_len(pattern.kept_count(full_length), kept.len())?;
    let mut it = kept.iter();
    Ok((0..full_length)
        .map(|p| {
            if pattern.is_kept(p) {
                *it.next().expect("kept count checked")
            } else {
                0.0
            }
        })
        .collect())
}
