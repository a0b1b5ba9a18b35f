//! Subsets of the hypercube `{0,1}^n`.
//!
//! Elements are stored as integers: coordinate `i` of the element is bit `i`
//! of its index, which makes the text form `b_0 b_1 ... b_{n-1}` and the
//! integer form agree with [`BitString::from_u64`]. Sets live either as a
//! sorted member list or as a dense `2^n`-bit indicator; both convert freely.
//!
//! File formats:
//!
//! * text: first line `n=<int>`, then one element per line as an `n`-character
//!   0/1 string (blank lines ignored);
//! * dense: 8-byte little-endian `n`, then the `2^n`-bit indicator, bit `z`
//!   stored in byte `z / 8` at bit position `z % 8`.

use std::io::{BufRead, Read, Write};

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest `n` for which elements are representable.
pub const MAX_N: usize = 64;
/// Largest `n` for which a dense indicator may be materialized.
pub const MAX_DENSE_N: usize = 30;

#[derive(Clone, Debug)]
enum Repr {
    Members(Vec<u64>),
    Dense { words: Vec<u64>, count: usize },
}

#[derive(Clone, Debug)]
pub struct CubeSet {
    n: usize,
    repr: Repr,
}

fn universe_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("cube dimension n={n} outside 1..={MAX_N}")));
    }
    Ok(())
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_N {
        return Err(Error::Capacity(format!(
            "dense indicator over 2^{n} points exceeds the 2^{MAX_DENSE_N} cap"
        )));
    }
    Ok(())
}

impl CubeSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, repr: Repr::Members(Vec::new()) })
    }

    /// All of `{0,1}^n` (dense).
    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        check_dense(n)?;
        let size = 1usize << n;
        let mut words = vec![u64::MAX; size.div_ceil(64)];
        if size < 64 {
            words[0] = (1u64 << size) - 1;
        }
        Ok(Self { n, repr: Repr::Dense { words, count: size } })
    }

    /// From element indices; duplicates are merged.
    pub fn from_members(n: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_n(n)?;
        let mask = universe_mask(n);
        let mut v: Vec<u64> = members.into_iter().collect();
        if let Some(bad) = v.iter().find(|&&x| x & !mask != 0) {
            return Err(Error::invalid(format!("element {bad} has bits beyond n={n}")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { n, repr: Repr::Members(v) })
    }

    pub fn from_bitstrings<'a>(n: usize, members: impl IntoIterator<Item = &'a BitString>) -> Result<Self> {
        check_n(n)?;
        let mut v = Vec::new();
        for m in members {
            if m.len() != n {
                return Err(Error::invalid(format!("element of length {} in a set over n={n}", m.len())));
            }
            v.push(m.as_u64());
        }
        Self::from_members(n, v)
    }

    /// Each point included independently with probability `density`.
    pub fn random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        check_dense(n)?;
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::invalid(format!("density {density} outside [0,1]")));
        }
        let size = 1usize << n;
        let mut words = vec![0u64; size.div_ceil(64)];
        let mut count = 0;
        for z in 0..size {
            if rng.random_bool(density) {
                words[z / 64] |= 1 << (z % 64);
                count += 1;
            }
        }
        Ok(Self { n, repr: Repr::Dense { words, count } })
    }

    /// Uniformly random subset of exactly `size` points.
    pub fn random_of_size<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        check_dense(n)?;
        let universe = 1usize << n;
        if size > universe {
            return Err(Error::invalid("subset larger than the cube"));
        }
        let picked = rand::seq::index::sample(rng, universe, size);
        Self::from_members(n, picked.iter().map(|z| z as u64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Members(v) => v.len(),
            Repr::Dense { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense { .. })
    }

    pub fn contains(&self, z: u64) -> bool {
        match &self.repr {
            Repr::Members(v) => v.binary_search(&z).is_ok(),
            Repr::Dense { words, .. } => {
                z <= universe_mask(self.n) && (words[(z / 64) as usize] >> (z % 64)) & 1 == 1
            }
        }
    }

    /// Elements in increasing order.
    pub fn members(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Members(v) => v.clone(),
            Repr::Dense { words, count } => {
                let mut out = Vec::with_capacity(*count);
                for (wi, &w) in words.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let b = w.trailing_zeros() as u64;
                        out.push(wi as u64 * 64 + b);
                        w &= w - 1;
                    }
                }
                out
            }
        }
    }

    /// Dense indicator words (bit `z` of the set is bit `z % 64` of word `z / 64`).
    pub fn indicator_words(&self) -> Result<Vec<u64>> {
        match &self.repr {
            Repr::Dense { words, .. } => Ok(words.clone()),
            Repr::Members(v) => {
                check_dense(self.n)?;
                let size = 1usize << self.n;
                let mut words = vec![0u64; size.div_ceil(64)];
                for &z in v {
                    words[(z / 64) as usize] |= 1 << (z % 64);
                }
                Ok(words)
            }
        }
    }

    pub fn to_dense(&self) -> Result<Self> {
        Ok(Self { n: self.n, repr: Repr::Dense { words: self.indicator_words()?, count: self.len() } })
    }

    pub fn to_sparse(&self) -> Self {
        Self { n: self.n, repr: Repr::Members(self.members()) }
    }

    /// `{ z ^ mask : z in self }`; with `mask` all ones this complements every element.
    pub fn xor_all(&self, mask: u64) -> Self {
        let mask = mask & universe_mask(self.n);
        let v: Vec<u64> = self.members().into_iter().map(|z| z ^ mask).collect();
        Self::from_members(self.n, v).expect("xor preserves the universe")
    }

    /// Bitwise complement of every element.
    pub fn flip_all(&self) -> Self {
        self.xor_all(u64::MAX)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        let (a, b) = (self.members(), other.members());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n={}", self.n)?;
        for z in self.members() {
            writeln!(w, "{}", BitString::from_u64(z, self.n))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::invalid("empty cube set file"))??;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::invalid(format!("bad header {header:?}, expected n=<int>")))?;
        check_n(n)?;
        let mut members = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let b: BitString = line.parse()?;
            if b.len() != n {
                return Err(Error::invalid(format!("element {line:?} does not have length {n}")));
            }
            members.push(b.as_u64());
        }
        Self::from_members(n, members)
    }

    pub fn write_dense<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let words = self.indicator_words()?;
        let nbytes = (1usize << self.n).div_ceil(8);
        let bytes: Vec<u8> = words.iter().flat_map(|x| x.to_le_bytes()).take(nbytes).collect();
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_dense<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        let n = u64::from_le_bytes(head) as usize;
        check_n(n)?;
        check_dense(n)?;
        let size = 1usize << n;
        let mut bytes = vec![0u8; size.div_ceil(8)];
        r.read_exact(&mut bytes)?;
        let mut words = vec![0u64; size.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if size < 64 {
            words[0] &= (1u64 << size) - 1;
        }
        let count = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(Self { n, repr: Repr::Dense { words, count } })
    }
}

impl PartialEq for CubeSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members() == other.members()
    }
}

/// The pair of sets `A = {0^{n/2} x : |x| = n/4}`, `B = {x 0^{n/2} : |x| = n/4}`
/// (coordinates written left to right). Every cross pair is at distance `n/2`.
/// Requires `4 | n`.
pub fn half_weight_counterexample(n: usize) -> Result<(CubeSet, CubeSet)> {
    if n == 0 || n % 4 != 0 || n > MAX_N {
        return Err(Error::invalid(format!("counterexample sets need 4 | n, got n={n}")));
    }
    let half = n / 2;
    let weight = (n / 4) as u32;
    let low: Vec<u64> = (0..1u64 << half).filter(|x| x.count_ones() == weight).collect();
    // Coordinate i is bit i, so "0^{n/2} x" puts x in the high half.
    let a = CubeSet::from_members(n, low.iter().map(|&x| x << half))?;
    let b = CubeSet::from_members(n, low.iter().copied())?;
    Ok((a, b))
}
