//! Fixed-width bit sets for state subsets. Kept minimal: exactly the
//! operations the subset constructions and reachability passes need.

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    words: Box<[u64]>,
}

impl BitSet {
    pub fn new(capacity: usize) -> Self {
        BitSet {
            words: vec![0; capacity.div_ceil(64)].into_boxed_slice(),
        }
    }

    pub fn singleton(capacity: usize, bit: usize) -> Self {
        let mut s = Self::new(capacity);
        s.insert(bit);
        s
    }

    pub fn insert(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn contains(&self, bit: usize) -> bool {
        self.words[bit / 64] & (1 << (bit % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place intersection. Both sets must have the same capacity.
    pub fn intersect(&mut self, other: &BitSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (w, &o) in self.words.iter_mut().zip(other.words.iter()) {
            *w &= o;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_query_iterate() {
        let mut s = BitSet::new(130);
        for b in [0, 63, 64, 129] {
            s.insert(b);
        }
        assert!(s.contains(64) && !s.contains(65));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert!(BitSet::singleton(130, 65).contains(65));
        assert!(!BitSet::new(1).contains(0));
        assert!(BitSet::new(64).is_empty());
        let mut t = BitSet::new(130);
        t.insert(63);
        t.insert(64);
        t.intersect(&s);
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![63, 64]);
    }
}
