use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::DiagramError;

/// A fixed-point-free involution on `0..n`, with no planarity requirement.
///
/// Classical-limit connectivity of braids and tangles lives here, since
/// permutation pairings generally cross.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pairing {
    partner: Vec<usize>,
}

impl Pairing {
    pub fn new(partner: Vec<usize>) -> Result<Self, DiagramError> {
        let n = partner.len();
        for (i, &p) in partner.iter().enumerate() {
            if p >= n || p == i || partner[p] != i {
                return Err(DiagramError::InvalidMatching(format!(
                    "point {i} has inconsistent partner {p}"
                )));
            }
        }
        Ok(Self { partner })
    }

    pub fn from_pairs(n_points: usize, pairs: &[(usize, usize)]) -> Result<Self, DiagramError> {
        let mut partner = vec![usize::MAX; n_points];
        for &(a, b) in pairs {
            if a >= n_points || b >= n_points || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(DiagramError::InvalidMatching(format!("bad pair ({a},{b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Self::new(partner)
    }

    pub fn n_points(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Pairs `(i, j)` with `i < j`, ordered by `i`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, p)| i < p)
            .map(|(i, &p)| (i, p))
            .collect()
    }

    pub fn is_planar(&self) -> bool {
        is_noncrossing(&self.partner)
    }

    pub fn into_planar(self) -> Result<PlanarMatching, DiagramError> {
        PlanarMatching::new(self.partner)
    }
}

impl fmt::Debug for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pairing{:?}", self.pairs())
    }
}

fn is_noncrossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (i, &p) in partner.iter().enumerate() {
        if p > i {
            stack.push(i);
        } else if stack.pop() != Some(p) {
            return false;
        }
    }
    stack.is_empty()
}

/// A non-crossing perfect matching of boundary points taken in line order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PlanarMatching {
    partner: Vec<usize>,
}

impl TryFrom<Vec<usize>> for PlanarMatching {
    type Error = DiagramError;
    fn try_from(v: Vec<usize>) -> Result<Self, DiagramError> {
        Self::new(v)
    }
}

impl From<PlanarMatching> for Vec<usize> {
    fn from(m: PlanarMatching) -> Vec<usize> {
        m.partner
    }
}

impl PlanarMatching {
    pub fn new(partner: Vec<usize>) -> Result<Self, DiagramError> {
        let p = Pairing::new(partner)?;
        if !p.is_planar() {
            return Err(DiagramError::NotPlanar(format!("{:?}", p.pairs())));
        }
        Ok(Self { partner: p.partner })
    }

    pub fn from_pairs(n_points: usize, pairs: &[(usize, usize)]) -> Result<Self, DiagramError> {
        Pairing::from_pairs(n_points, pairs)?.into_planar()
    }

    pub fn empty() -> Self {
        Self { partner: Vec::new() }
    }

    /// Adjacent caps `(0,1)(2,3)...`.
    pub fn adjacent_caps(n_points: usize) -> Self {
        Self {
            partner: (0..n_points).map(|i| i ^ 1).collect(),
        }
    }

    /// Fully nested caps `(0,n-1)(1,n-2)...`.
    pub fn rainbow(n_points: usize) -> Self {
        Self {
            partner: (0..n_points).map(|i| n_points - 1 - i).collect(),
        }
    }

    pub fn n_points(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, i: usize) -> usize {
        self.partner[i]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.as_pairing().pairs()
    }

    pub fn as_pairing(&self) -> Pairing {
        Pairing {
            partner: self.partner.clone(),
        }
    }

    /// Place several matchings side by side along one line.
    pub fn concat(parts: &[&PlanarMatching]) -> Self {
        let mut partner = Vec::new();
        for m in parts {
            let off = partner.len();
            partner.extend(m.partner.iter().map(|p| p + off));
        }
        Self { partner }
    }

    /// Restrict to a contiguous window, provided no line leaves it.
    pub fn window(&self, start: usize, len: usize) -> Option<Self> {
        let mut partner = Vec::with_capacity(len);
        for i in start..start + len {
            let p = self.partner[i];
            if p < start || p >= start + len {
                return None;
            }
            partner.push(p - start);
        }
        Some(Self { partner })
    }
}

impl fmt::Debug for PlanarMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matching{:?}", self.pairs())
    }
}

/// Number of closed cycles in the union of two perfect matchings on the same points.
pub fn count_cycles(a: &[usize], b: &[usize]) -> usize {
    assert_eq!(a.len(), b.len(), "matchings on different point sets");
    let mut seen = vec![false; a.len()];
    let mut cycles = 0;
    for s in 0..a.len() {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut cur = s;
        loop {
            seen[cur] = true;
            let q = a[cur];
            seen[q] = true;
            cur = b[q];
            if cur == s {
                break;
            }
        }
    }
    cycles
}

/// All non-crossing matchings on `2 n_pairs` points, lexicographic by partner sequence.
pub fn enumerate_matchings(n_pairs: usize) -> Vec<PlanarMatching> {
    fn rec(n_pairs: usize) -> Vec<Vec<usize>> {
        if n_pairs == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for inner_pairs in 0..n_pairs {
            let j = 2 * inner_pairs + 1;
            let inner = rec(inner_pairs);
            let outer = rec(n_pairs - 1 - inner_pairs);
            for a in &inner {
                for b in &outer {
                    let mut v = Vec::with_capacity(2 * n_pairs);
                    v.push(j);
                    v.extend(a.iter().map(|p| p + 1));
                    v.push(0);
                    v.extend(b.iter().map(|p| p + j + 1));
                    out.push(v);
                }
            }
        }
        out
    }
    rec(n_pairs)
        .into_iter()
        .map(|partner| PlanarMatching { partner })
        .collect()
}

/// The Catalan number `C_n`.
pub fn catalan(n: u64) -> BigInt {
    let mut c = BigInt::from(1);
    for i in 0..n {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_order() {
        let ms = enumerate_matchings(2);
        assert_eq!(ms[0].partners(), &[1, 0, 3, 2]);
        assert_eq!(ms[1].partners(), &[3, 2, 1, 0]);
    }

    #[test]
    fn catalan_small() {
        let c: Vec<BigInt> = (0..6).map(catalan).collect();
        assert_eq!(c, [1, 1, 2, 5, 14, 42].map(BigInt::from));
    }

    #[test]
    fn crossing_rejected() {
        assert!(PlanarMatching::new(vec![2, 3, 0, 1]).is_err());
        assert!(Pairing::new(vec![2, 3, 0, 1]).is_ok());
    }

    #[test]
    fn cycles_of_basis_pair() {
        let e0 = PlanarMatching::adjacent_caps(4);
        let e1 = PlanarMatching::rainbow(4);
        assert_eq!(count_cycles(e0.partners(), e0.partners()), 2);
        assert_eq!(count_cycles(e0.partners(), e1.partners()), 1);
    }
}
