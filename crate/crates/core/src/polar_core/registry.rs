use std::collections::HashMap;

use crate::error::Result;
use crate::polar_core::dense::{DenseMatrix, SignMatrix, StiefelMatrix};
use crate::polar_core::polar::{polar_decompose, PolarFactors};

/// Caches polar factors by sign-matrix key so that repeated inputs
/// `X * S` always yield the same U-factor.
///
/// Keys are the exact sign entries, not the product: two distinct keys
/// whose products coincide are decomposed independently.
#[derive(Clone, Debug, Default)]
pub struct PdRegistry {
    map: HashMap<Vec<u8>, PolarFactors>,
    hits: usize,
    misses: usize,
}

impl PdRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the stored factors for `key`, decomposing `c` on first use.
    pub fn factors(&mut self, c: &DenseMatrix, key: &SignMatrix) -> Result<&PolarFactors> {
        use std::collections::hash_map::Entry;
        match self.map.entry(key.key_bytes()) {
            Entry::Occupied(e) => {
                self.hits += 1;
                Ok(e.into_mut())
            }
            Entry::Vacant(e) => {
                self.misses += 1;
                Ok(e.insert(polar_decompose(c)?))
            }
        }
    }

    pub fn get(&self, key: &SignMatrix) -> Option<&PolarFactors> {
        self.map.get(&key.key_bytes())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.hits
    }

    pub fn misses(&self) -> usize {
        self.misses
    }
}

/// U-factor of `c = X * key`, memoised in `reg`.
pub fn polar_u_registered(c: &DenseMatrix, key: &SignMatrix, reg: &mut PdRegistry) -> Result<StiefelMatrix> {
    Ok(reg.factors(c, key)?.u.clone())
}
