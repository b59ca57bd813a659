use std::fmt;

use crate::padic::MAX_F;

/// Multi-index (j_0, …, j_{f−1}) packed 16 bits per factor with j_0 most
/// significant, so the integer order is the lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub u64);

const BITS: u32 = 16;

#[inline]
fn shift(i: usize) -> u32 {
    BITS * (MAX_F - 1 - i) as u32
}

impl Mono {
    pub fn pack(j: &[u32]) -> Mono {
        let mut m = 0u64;
        for (i, &x) in j.iter().enumerate() {
            debug_assert!(x < 1 << BITS);
            m |= (x as u64) << shift(i);
        }
        Mono(m)
    }

    #[inline]
    pub fn get(self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & 0xffff) as u32
    }

    #[inline]
    pub fn with(self, i: usize, v: u32) -> Mono {
        let s = shift(i);
        Mono((self.0 & !(0xffffu64 << s)) | ((v as u64) << s))
    }

    pub fn unpack(self, f: usize) -> Vec<u32> {
        (0..f).map(|i| self.get(i)).collect()
    }

    /// Σ j_i p^i.
    pub fn total(self, p: u32, f: usize) -> u64 {
        (0..f).rev().fold(0, |acc, i| acc * p as u64 + self.get(i) as u64)
    }

    /// Σ j_i.
    pub fn degree_sum(self, f: usize) -> u32 {
        (0..f).map(|i| self.get(i)).sum()
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..MAX_F).map(|i| self.get(i).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip_and_order() {
        let m = Mono::pack(&[3, 7, 1]);
        assert_eq!(m.unpack(3), vec![3, 7, 1]);
        assert_eq!(m.with(1, 2).unpack(3), vec![3, 2, 1]);
        assert!(Mono::pack(&[1, 9]) < Mono::pack(&[2, 0]));
        assert_eq!(Mono::pack(&[2, 1]).total(3, 2), 5);
    }
}
