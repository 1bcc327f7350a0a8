use std::collections::HashSet;

/// Triangular index of the unordered pair {u, v}, u != v.
#[inline]
pub fn pair_index(u: usize, v: usize) -> u64 {
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    (hi as u64) * (hi as u64 - 1) / 2 + lo as u64
}

/// Inverse of [`pair_index`]: returns (lo, hi) with lo < hi.
#[inline]
pub fn pair_from_index(idx: u64) -> (usize, usize) {
    // hi is the largest h with h(h-1)/2 <= idx
    let mut hi = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as u64;
    while hi * (hi - 1) / 2 > idx {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= idx {
        hi += 1;
    }
    let lo = idx - hi * (hi - 1) / 2;
    (lo as usize, hi as usize)
}

pub fn pair_count(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

// 2^14 nodes is 16 MiB of bits.
const BITMATRIX_MAX_N: usize = 1 << 14;

/// Active-edge set over the complete graph on `n` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeSet {
    Bits { words: Vec<u64>, len: usize },
    Hashed(HashSet<u64>),
}

impl EdgeSet {
    pub fn new(n: usize) -> EdgeSet {
        if n <= BITMATRIX_MAX_N {
            let bits = pair_count(n) as usize;
            EdgeSet::Bits { words: vec![0; bits.div_ceil(64)], len: 0 }
        } else {
            EdgeSet::Hashed(HashSet::new())
        }
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        let i = pair_index(u, v);
        match self {
            EdgeSet::Bits { words, .. } => words[(i / 64) as usize] >> (i % 64) & 1 == 1,
            EdgeSet::Hashed(set) => set.contains(&i),
        }
    }

    /// Sets the bit for {u, v}; returns the previous value.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, on: bool) -> bool {
        let i = pair_index(u, v);
        match self {
            EdgeSet::Bits { words, len } => {
                let w = &mut words[(i / 64) as usize];
                let mask = 1u64 << (i % 64);
                let was = *w & mask != 0;
                if on && !was {
                    *w |= mask;
                    *len += 1;
                } else if !on && was {
                    *w &= !mask;
                    *len -= 1;
                }
                was
            }
            EdgeSet::Hashed(set) => {
                if on {
                    !set.insert(i)
                } else {
                    set.remove(&i)
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            EdgeSet::Bits { len, .. } => *len,
            EdgeSet::Hashed(set) => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All active pairs `(u, v)` with u < v, sorted by (u, v).
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = match self {
            EdgeSet::Bits { words, .. } => {
                let mut v = Vec::new();
                for (wi, &w) in words.iter().enumerate() {
                    let mut rest = w;
                    while rest != 0 {
                        let b = rest.trailing_zeros() as u64;
                        v.push(pair_from_index(wi as u64 * 64 + b));
                        rest &= rest - 1;
                    }
                }
                v
            }
            EdgeSet::Hashed(set) => set.iter().map(|&i| pair_from_index(i)).collect(),
        };
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangular_index_enumerates_pairs() {
        let n = 40;
        let mut idx = 0;
        for hi in 1..n {
            for lo in 0..hi {
                assert_eq!(pair_index(lo, hi), idx);
                assert_eq!(pair_index(hi, lo), idx);
                assert_eq!(pair_from_index(idx), (lo, hi));
                idx += 1;
            }
        }
        assert_eq!(idx, pair_count(n));
    }

    proptest! {
        #[test]
        fn index_roundtrip_large(idx in 0u64..(1u64 << 50)) {
            let (lo, hi) = pair_from_index(idx);
            prop_assert!(lo < hi);
            prop_assert_eq!(pair_index(lo, hi), idx);
        }
    }

    #[test]
    fn bits_and_hashed_agree() {
        let mut a = EdgeSet::new(50);
        let mut b = EdgeSet::Hashed(HashSet::new());
        for (u, v) in [(0, 1), (3, 2), (49, 0), (10, 20), (3, 2)] {
            assert_eq!(a.set(u, v, true), b.set(u, v, true));
        }
        assert_eq!(a.set(0, 1, false), b.set(0, 1, false));
        assert_eq!(a.len(), 3);
        assert_eq!(b.len(), 3);
        assert_eq!(a.sorted_pairs(), b.sorted_pairs());
        assert_eq!(a.sorted_pairs(), vec![(0, 49), (2, 3), (10, 20)]);
        assert!(a.contains(20, 10) && !a.contains(0, 1));
    }
}
