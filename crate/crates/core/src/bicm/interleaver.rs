use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A seeded permutation: `interleave(v)[i] = v[forward[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interleaver {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

/// Uniformly random permutation of `0..length`, fixed by `seed`.
pub fn make_interleaver(length: usize, seed: u64) -> Result<Interleaver> {
    if length == 0 {
        return Err(Error::InvalidArgument(
            "interleaver length must be at least 1".into(),
        ));
    }
    let mut forward: Vec<usize> = (0..length).collect();
    forward.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(Interleaver::from_permutation(forward).expect("shuffle is a permutation"))
}

impl Interleaver {
    pub fn identity(length: usize) -> Self {
        Self::from_permutation((0..length).collect()).expect("identity is a permutation")
    }

    pub fn from_permutation(forward: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![usize::MAX; forward.len()];
        for (i, &p) in forward.iter().enumerate() {
            if p >= forward.len() || inverse[p] != usize::MAX {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            inverse[p] = i;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Interleaver {
        Interleaver {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn interleave<T: Clone>(&self, v: &[T]) -> Result<Vec<T>> {
        self.check(v.len())?;
        Ok(self.forward.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn deinterleave<T: Clone>(&self, v: &[T]) -> Result<Vec<T>> {
        self.check(v.len())?;
        Ok(self.inverse.iter().map(|&p| v[p].clone()).collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.forward.len() {
            return Err(Error::LengthMismatch {
                expected: self.forward.len(),
                got: len,
            });
        }
        Ok(())
    }
}
