use std::fmt;
use std::str::FromStr;

use super::{DiagramError, Pairing};

/// A braid word: signed generator indices on a fixed number of strands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, DiagramError> {
        if strands == 0 {
            return Err(DiagramError::Parse("a braid needs at least one strand".into()));
        }
        for &g in &letters {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(DiagramError::IndexOutOfRange(format!(
                    "letter {g} on {strands} strands"
                )));
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn identity(strands: usize) -> Self {
        Self {
            strands,
            letters: Vec::new(),
        }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|g| g.signum() as i64).sum()
    }

    /// The group inverse: reversed word with flipped signs.
    pub fn inverse(&self) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|g| -g).collect(),
        }
    }

    /// Concatenation `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Result<Self, DiagramError> {
        if self.strands != other.strands {
            return Err(DiagramError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self {
            strands: self.strands,
            letters,
        })
    }

    /// The same word on more strands.
    pub fn widen(&self, strands: usize) -> Result<Self, DiagramError> {
        Self::new(strands, self.letters.clone())
    }

    /// Shift every generator index by `k` on `strands` total strands.
    pub fn shifted(&self, k: usize, strands: usize) -> Result<Self, DiagramError> {
        let letters = self
            .letters
            .iter()
            .map(|g| g.signum() * (g.abs() + k as i32))
            .collect();
        Self::new(strands, letters)
    }

    /// Underlying permutation: `perm[i]` is the top position of the strand starting at bottom `i`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = starting strand
        for g in &self.letters {
            let i = g.unsigned_abs() as usize - 1;
            at.swap(i, i + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &s) in at.iter().enumerate() {
            perm[s] = pos;
        }
        perm
    }

    /// Classical-limit connectivity as a pairing of bottom `0..n` with top `n..2n`.
    pub fn connectome(&self) -> Pairing {
        let n = self.strands;
        let mut partner = vec![0; 2 * n];
        for (i, p) in self.permutation().into_iter().enumerate() {
            partner[i] = n + p;
            partner[n + p] = i;
        }
        Pairing::new(partner).expect("permutation pairing is an involution")
    }
}

impl FromStr for BraidWord {
    type Err = DiagramError;

    /// Parses `"n=<strands>: g1 g2 ..."`.
    fn from_str(s: &str) -> Result<Self, DiagramError> {
        let s = s.trim();
        let (head, body) = s
            .split_once(':')
            .ok_or_else(|| DiagramError::Parse(format!("expected 'n=<strands>: letters', got '{s}'")))?;
        let n = head
            .trim()
            .strip_prefix("n=")
            .or_else(|| head.trim().strip_prefix("n ="))
            .ok_or_else(|| DiagramError::Parse(format!("missing 'n=' in '{head}'")))?
            .trim()
            .parse::<usize>()
            .map_err(|e| DiagramError::Parse(format!("strand count: {e}")))?;
        let letters = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|e| DiagramError::Parse(format!("letter '{t}': {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}:", self.strands)?;
        for g in &self.letters {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let w: BraidWord = "n=3: 1 -2 1".parse().unwrap();
        assert_eq!(w.letters(), &[1, -2, 1]);
        assert_eq!(w.to_string(), "n=3: 1 -2 1");
        assert_eq!(w.writhe(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!("3: 1".parse::<BraidWord>().is_err());
        assert!("n=2: 2".parse::<BraidWord>().is_err());
        assert!("n=2: x".parse::<BraidWord>().is_err());
        assert!("n=2: 0".parse::<BraidWord>().is_err());
    }

    #[test]
    fn permutation_of_cycle() {
        let w = BraidWord::new(3, vec![1, 2]).unwrap();
        // strand 0 moves to 1 then 2
        assert_eq!(w.permutation(), vec![2, 0, 1]);
    }
}
