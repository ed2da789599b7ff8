use crate::error::{Error, Result};

/// A bijection on `{0, .., t-1}` acting on tensor index slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let t = images.len();
        let mut seen = vec![false; t];
        for &i in &images {
            if i >= t || seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 0..{t}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(t: usize) -> Self {
        Self {
            images: (0..t).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// `k -> next(self(k))`. With this convention permuting by `self`
    /// and then by `next` equals permuting once by `self.then(next)`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.len(), next.len());
        Permutation {
            images: self.images.iter().map(|&i| next.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &i) in self.images.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { images: inv }
    }

    /// Reorders an index tuple: `out[k] = tuple[self(k)]`.
    pub fn apply_to_tuple(&self, tuple: &[usize], out: &mut [usize]) {
        for (k, &i) in self.images.iter().enumerate() {
            out[k] = tuple[i];
        }
    }

    /// All `t!` permutations in lexicographic order.
    pub fn all(t: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..t).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..t).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..t).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}
