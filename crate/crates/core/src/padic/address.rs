use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime number, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(Error::usage(format!("{p} is not a prime")));
        }
        Ok(Self(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// `p^k` as a float, valid for negative `k`.
    #[inline]
    pub fn powi(self, k: i32) -> f64 {
        self.as_f64().powi(k)
    }

    /// Number of leaves of `G_n`.
    pub fn leaves(self, n: usize) -> usize {
        (self.0 as usize).pow(n as u32)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

/// A leaf (or interior node) of the depth-`n` tree of one basin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAddress {
    p: Prime,
    basin: usize,
    digits: Vec<u32>,
}

impl TreeAddress {
    pub fn new(p: Prime, basin: usize, digits: Vec<u32>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d >= p.get()) {
            return Err(Error::usage(format!("digit {d} out of range for p = {}", p.get())));
        }
        Ok(Self { p, basin, digits })
    }

    /// Leaf with the given index inside its basin, `0 <= index < p^depth`.
    pub fn from_leaf_index(p: Prime, basin: usize, depth: usize, mut index: usize) -> Self {
        let base = p.get() as usize;
        let mut digits = vec![0; depth];
        for slot in digits.iter_mut().rev() {
            *slot = (index % base) as u32;
            index /= base;
        }
        Self { p, basin, digits }
    }

    /// Index of this leaf among the `p^depth` leaves of its basin.
    pub fn leaf_index(&self) -> usize {
        let base = self.p.get() as usize;
        self.digits.iter().fold(0, |acc, &d| acc * base + d as usize)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn basin(&self) -> usize {
        self.basin
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// Length of the longest common digit prefix with `other`.
    pub fn common_prefix(&self, other: &TreeAddress) -> usize {
        self.digits.iter().zip(&other.digits).take_while(|(a, b)| a == b).count()
    }
}

/// p-adic distance `p^-k` between two leaves of the same basin and depth,
/// where `k` is the length of their common prefix; 0 for equal leaves.
pub fn padic_distance(a: &TreeAddress, b: &TreeAddress) -> Result<f64> {
    if a.p != b.p || a.basin != b.basin || a.depth() != b.depth() {
        return Err(Error::usage(format!(
            "addresses not comparable: (p={}, basin {}, depth {}) vs (p={}, basin {}, depth {})",
            a.p.get(),
            a.basin,
            a.depth(),
            b.p.get(),
            b.basin,
            b.depth()
        )));
    }
    let k = a.common_prefix(b);
    if k == a.depth() {
        return Ok(0.0);
    }
    Ok(a.p.powi(-(k as i32)))
}

/// A ball `center + p^{-r} Z_p` inside a basin's unit ball, described by its
/// digit prefix. The scale is `r = -prefix.len()` and the Haar volume `p^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallSpec {
    center: TreeAddress,
}

impl BallSpec {
    pub fn new(p: Prime, basin: usize, prefix: Vec<u32>) -> Result<Self> {
        Ok(Self { center: TreeAddress::new(p, basin, prefix)? })
    }

    /// The whole unit ball of a basin.
    pub fn basin(p: Prime, basin: usize) -> Self {
        Self { center: TreeAddress { p, basin, digits: Vec::new() } }
    }

    pub fn p(&self) -> Prime {
        self.center.p
    }

    pub fn basin_index(&self) -> usize {
        self.center.basin
    }

    pub fn prefix(&self) -> &[u32] {
        &self.center.digits
    }

    pub fn center(&self) -> &TreeAddress {
        &self.center
    }

    /// Scale `r <= 0`; the radius and the volume are both `p^r`.
    pub fn scale(&self) -> i32 {
        -(self.center.depth() as i32)
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self)
    }

    pub fn contains(&self, x: &TreeAddress) -> bool {
        x.p == self.center.p && x.basin == self.center.basin && x.digits.starts_with(&self.center.digits)
    }

    /// `true` if `other` lies inside this ball (equality included).
    pub fn contains_ball(&self, other: &BallSpec) -> bool {
        self.contains(&other.center)
    }

    /// The `p` children at scale `r - 1`.
    pub fn children(&self) -> impl Iterator<Item = BallSpec> + '_ {
        (0..self.center.p.get()).map(move |c| {
            let mut digits = self.center.digits.clone();
            digits.push(c);
            BallSpec { center: TreeAddress { p: self.center.p, basin: self.center.basin, digits } }
        })
    }

    /// Parent ball, `None` for a whole basin.
    pub fn parent(&self) -> Option<BallSpec> {
        let mut digits = self.center.digits.clone();
        digits.pop()?;
        Some(BallSpec { center: TreeAddress { p: self.center.p, basin: self.center.basin, digits } })
    }
}

/// Haar volume `p^r` of a ball, with the unit ball normalized to 1.
pub fn ball_volume(b: &BallSpec) -> f64 {
    b.p().powi(b.scale())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(p: u32, digits: &[u32]) -> TreeAddress {
        TreeAddress::new(Prime::new(p).unwrap(), 0, digits.to_vec()).unwrap()
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(13).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(padic_distance(&addr(2, &[0, 0, 0]), &addr(2, &[0, 0, 1])).unwrap(), 0.25);
        assert_eq!(padic_distance(&addr(3, &[1, 1]), &addr(3, &[1, 1])).unwrap(), 0.0);
        assert_eq!(padic_distance(&addr(3, &[1, 2]), &addr(3, &[2, 2])).unwrap(), 1.0);
    }

    #[test]
    fn distance_rejects_mismatch() {
        let p = Prime::new(3).unwrap();
        let a = TreeAddress::new(p, 0, vec![0, 1]).unwrap();
        let b = TreeAddress::new(p, 1, vec![0, 1]).unwrap();
        let c = TreeAddress::new(p, 0, vec![0, 1, 2]).unwrap();
        assert!(padic_distance(&a, &b).is_err());
        assert!(padic_distance(&a, &c).is_err());
    }

    #[test]
    fn digit_out_of_range() {
        assert!(TreeAddress::new(Prime::new(2).unwrap(), 0, vec![0, 2]).is_err());
    }

    #[test]
    fn volumes_match_leaf_counts() {
        let p3 = Prime::new(3).unwrap();
        let p2 = Prime::new(2).unwrap();
        assert_eq!(BallSpec::basin(p3, 0).volume(), 1.0);
        for (p, prefix, n) in [(p3, vec![1], 4usize), (p2, vec![0, 1, 1], 5)] {
            let ball = BallSpec::new(p, 0, prefix).unwrap();
            let inside = (0..p.leaves(n)).filter(|&i| ball.contains(&TreeAddress::from_leaf_index(p, 0, n, i))).count();
            let counted = inside as f64 / p.leaves(n) as f64;
            assert!((ball.volume() - counted).abs() < 1e-15);
        }
        assert!((BallSpec::new(p3, 0, vec![2]).unwrap().volume() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(BallSpec::new(p2, 0, vec![0, 0, 0]).unwrap().volume(), 0.125);
    }

    #[test]
    fn leaf_index_roundtrip() {
        let p = Prime::new(3).unwrap();
        for i in 0..27 {
            assert_eq!(TreeAddress::from_leaf_index(p, 1, 3, i).leaf_index(), i);
        }
    }

    #[test]
    fn ultrametric_inequality_exhaustive() {
        for (p, n) in [(2u32, 4usize), (3, 3)] {
            let p = Prime::new(p).unwrap();
            let leaves: Vec<_> = (0..p.leaves(n)).map(|i| TreeAddress::from_leaf_index(p, 0, n, i)).collect();
            for a in &leaves {
                for b in &leaves {
                    let ab = padic_distance(a, b).unwrap();
                    for c in &leaves {
                        let ac = padic_distance(a, c).unwrap();
                        let bc = padic_distance(b, c).unwrap();
                        assert!(ac <= ab.max(bc));
                    }
                }
            }
        }
    }

    #[test]
    fn shell_measures_sum_to_one() {
        for p in [2u32, 3, 5] {
            let p = Prime::new(p).unwrap();
            for n in 1..8 {
                let shells: f64 = (0..n).map(|m| p.powi(-m) - p.powi(-m - 1)).sum();
                assert!((shells + p.powi(-n) - 1.0).abs() < 1e-15);
            }
        }
    }
}
