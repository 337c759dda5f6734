use super::Gf2Error;

/// A permutation of `0..n` stored as its forward map.
///
/// `forward[j] = i` means position `j` of the reordered sequence holds the
/// element found at position `i` of the original sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    forward: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: (0..n).collect(),
        }
    }

    pub fn new(forward: Vec<usize>) -> Result<Self, Gf2Error> {
        let n = forward.len();
        let mut seen = vec![false; n];
        for &i in &forward {
            if i >= n {
                return Err(Gf2Error::InvalidPermutation(format!("index {i} out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Gf2Error::InvalidPermutation(format!("index {i} repeated")));
            }
        }
        Ok(Self { forward })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Original index found at reordered position `j`.
    #[inline]
    pub fn source(&self, j: usize) -> usize {
        self.forward[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(j, &i)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.forward.len()];
        for (j, &i) in self.forward.iter().enumerate() {
            inv[i] = j;
        }
        Self { forward: inv }
    }

    /// Reorders `v`: `out[j] = v[forward[j]]`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.forward.len());
        self.forward.iter().map(|&i| v[i].clone()).collect()
    }

    /// Undoes [`apply`](Self::apply): `out[forward[j]] = v[j]`.
    pub fn unapply<T: Clone + Default>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.forward.len());
        let mut out = vec![T::default(); v.len()];
        for (j, &i) in self.forward.iter().enumerate() {
            out[i] = v[j].clone();
        }
        out
    }

    /// The permutation that applies `self` first and `then` second, i.e.
    /// `composed.apply(v) == then.apply(&self.apply(v))`.
    pub fn then(&self, then: &Permutation) -> Self {
        assert_eq!(self.len(), then.len());
        Self {
            forward: then.forward.iter().map(|&j| self.forward[j]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        let b = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        let v = vec![10, 11, 12, 13];
        assert_eq!(a.then(&b).apply(&v), b.apply(&a.apply(&v)));
        assert_eq!(a.unapply(&a.apply(&v)), v);
        assert!(a.then(&a.inverse()).is_identity());
    }
}
