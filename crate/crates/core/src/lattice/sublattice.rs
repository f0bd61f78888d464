use serde::{Deserialize, Serialize};

/// Index of K_N = {Σ m_i u_i : 0 ≤ m_i < N}, flattened lexicographically
/// with the first coordinate most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SublatticeIndex {
    dim: usize,
    period: usize,
}

impl SublatticeIndex {
    pub fn new(dim: usize, period: usize) -> Self {
        assert!(period >= 1, "period must be at least 1");
        Self { dim, period }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// N^d.
    pub fn len(&self) -> usize {
        self.period.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate tuple of a flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim];
        for slot in m.iter_mut().rev() {
            *slot = flat % self.period;
            flat /= self.period;
        }
        m
    }

    /// Flat index of integer coordinates, reduced mod N.
    pub fn flat(&self, m: &[i64]) -> usize {
        let n = self.period as i64;
        m.iter()
            .fold(0usize, |acc, &c| acc * self.period + c.rem_euclid(n) as usize)
    }

    /// Flat index of a + b (mod N).
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<i64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) as i64).collect();
        self.flat(&sum)
    }

    /// Flat index of −a (mod N).
    pub fn neg(&self, a: usize) -> usize {
        let c: Vec<i64> = self.coords(a).iter().map(|&x| -(x as i64)).collect();
        self.flat(&c)
    }

    /// m·k mod N for flat indices m and k.
    pub fn dot_mod(&self, m: usize, k: usize) -> usize {
        let (cm, ck) = (self.coords(m), self.coords(k));
        cm.iter().zip(&ck).map(|(a, b)| a * b).sum::<usize>() % self.period
    }

    /// Coordinate tuples in flat order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |f| self.coords(f))
    }
}
