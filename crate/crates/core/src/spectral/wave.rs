use std::fmt;

/// Integer mode index `k ∈ ℤ³` of the Fourier basis `exp(i (k,x) 2π/ℓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WaveVector(pub [i32; 3]);

impl WaveVector {
    pub const ZERO: WaveVector = WaveVector([0, 0, 0]);

    pub fn new(k1: i32, k2: i32, k3: i32) -> Self {
        WaveVector([k1, k2, k3])
    }

    /// Shell value `(k,k)`.
    pub fn shell(&self) -> u32 {
        self.0.iter().map(|&c| (c * c) as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn neg(&self) -> Self {
        WaveVector([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// True for the representative of `{k, -k}` whose first nonzero entry is positive.
    pub fn is_canonical(&self) -> bool {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) => c > 0,
            None => false,
        }
    }

    pub fn canonical(&self) -> Self {
        if self.is_canonical() || self.is_zero() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn max_abs(&self) -> i32 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.0[0] as f64, self.0[1] as f64, self.0[2] as f64]
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Largest `|k_i|` admitted by a shell cutoff: `floor(sqrt(cutoff))`.
pub fn bandwidth(cutoff: u32) -> i32 {
    let mut k = (cutoff as f64).sqrt() as i32;
    while ((k + 1) * (k + 1)) as u32 <= cutoff {
        k += 1;
    }
    while k > 0 && (k * k) as u32 > cutoff {
        k -= 1;
    }
    k
}

/// Dense cube layout `[-K, K]³` used to store the coefficients of a field with a given cutoff.
///
/// The cube is symmetric, so the index of `-k` is `len - 1 - index(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub cutoff: u32,
    pub k_max: i32,
    pub side: usize,
}

impl Layout {
    pub fn new(cutoff: u32) -> Self {
        let k_max = bandwidth(cutoff);
        Layout { cutoff, k_max, side: (2 * k_max + 1) as usize }
    }

    pub fn len(&self) -> usize {
        self.side * self.side * self.side
    }

    pub fn index(&self, k: WaveVector) -> Option<usize> {
        if k.shell() > self.cutoff {
            return None;
        }
        let s = self.side;
        let o = |c: i32| (c + self.k_max) as usize;
        Some((o(k.0[0]) * s + o(k.0[1])) * s + o(k.0[2]))
    }

    pub fn wave(&self, idx: usize) -> WaveVector {
        let s = self.side;
        let k3 = (idx % s) as i32 - self.k_max;
        let k2 = ((idx / s) % s) as i32 - self.k_max;
        let k1 = (idx / (s * s)) as i32 - self.k_max;
        WaveVector([k1, k2, k3])
    }

    pub fn mirror(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    /// All `(index, k)` pairs inside the shell cutoff, in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, WaveVector)> + '_ {
        (0..self.len())
            .map(move |i| (i, self.wave(i)))
            .filter(move |(_, k)| k.shell() <= self.cutoff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_matches_integer_sqrt() {
        assert_eq!(bandwidth(0), 0);
        assert_eq!(bandwidth(3), 1);
        assert_eq!(bandwidth(4), 2);
        assert_eq!(bandwidth(8), 2);
        assert_eq!(bandwidth(9), 3);
        assert_eq!(bandwidth(16), 4);
    }

    #[test]
    fn layout_mirror_is_negation() {
        let layout = Layout::new(6);
        for (i, k) in layout.modes() {
            assert_eq!(layout.wave(layout.mirror(i)), k.neg());
            assert_eq!(layout.index(k), Some(i));
        }
    }

    #[test]
    fn canonical_representative() {
        assert!(WaveVector::new(0, 1, -3).is_canonical());
        assert!(!WaveVector::new(0, -1, 3).is_canonical());
        assert!(!WaveVector::ZERO.is_canonical());
        assert_eq!(WaveVector::new(-1, 2, 0).canonical(), WaveVector::new(1, -2, 0));
    }
}
