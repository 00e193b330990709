//! Permutations on a finite domain, used to build groups by closure.

use crate::error::{Error, Result};

/// A permutation in one-line notation: `map[p]` is the image of point `p`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    map: Vec<u16>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            map: (0..degree as u16).collect(),
        }
    }

    pub fn from_images(map: Vec<u16>) -> Result<Perm> {
        let mut seen = vec![false; map.len()];
        for &i in &map {
            let i = i as usize;
            if i >= map.len() || seen[i] {
                return Err(Error::DomainMismatch);
            }
            seen[i] = true;
        }
        Ok(Perm { map })
    }

    /// Build from disjoint-or-not cycles over arbitrary point labels; the
    /// degree is fixed by the caller after relabelling.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Perm> {
        let mut map: Vec<u16> = (0..degree as u16).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from >= degree || to >= degree {
                    return Err(Error::DomainMismatch);
                }
                map[from] = to as u16;
            }
        }
        Perm::from_images(map)
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, p: u16) -> u16 {
        self.map[p as usize]
    }

    /// self after other: (self * other)(p) = self(other(p)).
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            map: other.map.iter().map(|&p| self.map[p as usize]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &p)| i as u16 == p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_composition() {
        let a = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
        let ab = a.compose(&b);
        // (0 1) after (0 1 2): 0 -> 1 -> 0, 1 -> 2 -> 2, 2 -> 0 -> 1.
        assert_eq!(ab, Perm::from_images(vec![0, 2, 1]).unwrap());
    }

    #[test]
    fn invalid_images_rejected() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }
}
