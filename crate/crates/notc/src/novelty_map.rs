//! Bounded input-space quantizer driven by a novelty ("uniqueness") metric.
//!
//! The map stores up to `max_size` input arrays, called cells. While free
//! slots remain every observed input becomes a new cell. Once the map is
//! full, an input is admitted only if it is more unique than the least
//! unique stored cell, which it then replaces. Every observation returns
//! the index of the cell closest to the input, so the map doubles as a
//! nearest-neighbour quantizer.
//!
//! Because a stored duplicate forces an incoming copy's uniqueness to zero,
//! the cell set depends on *which* inputs were seen, not on how often each
//! one recurs — repeated presentation of the same input cannot churn the map.

use crate::error::{Error, Result};

/// Euclidean distance between two equal-length vectors.
fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Uniqueness of `arrays[index]`: its smallest Euclidean distance to any
/// *other* array in the set.
///
/// Errors when the set has fewer than two arrays (there would be nothing to
/// compare against), when `index` is out of range, or when the arrays do not
/// all share one dimensionality.
pub fn uniqueness(index: usize, arrays: &[Vec<f64>]) -> Result<f64> {
    if arrays.len() < 2 {
        return Err(Error::TooFewElements { needed: 2, actual: arrays.len() });
    }
    if index >= arrays.len() {
        return Err(Error::IndexOutOfRange { index, len: arrays.len() });
    }
    let dim = arrays[0].len();
    for a in arrays {
        if a.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: a.len() });
        }
    }
    let mut best = f64::INFINITY;
    for (j, other) in arrays.iter().enumerate() {
        if j == index {
            continue;
        }
        let d = distance(&arrays[index], other);
        if d < best {
            best = d;
        }
    }
    Ok(best)
}

/// Bounded set of the most unique inputs seen so far.
#[derive(Debug, Clone)]
pub struct NoveltyMap {
    dim: usize,
    max_size: usize,
    cells: Vec<Vec<f64>>,
    /// Per-cell uniqueness, cached once the map is full and refreshed on
    /// every cell change; unused while the map is still filling.
    cell_uniqueness: Vec<f64>,
    update_count: u64,
}

impl NoveltyMap {
    /// Creates an empty map for `dim`-dimensional inputs holding at most
    /// `max_size` cells.
    pub fn new(dim: usize, max_size: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("map dimension must be positive".into()));
        }
        if max_size == 0 {
            return Err(Error::InvalidConfig("map max_size must be positive".into()));
        }
        Ok(NoveltyMap {
            dim,
            max_size,
            cells: Vec::with_capacity(max_size),
            cell_uniqueness: Vec::new(),
            update_count: 0,
        })
    }

    /// Input dimensionality.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximum number of cells.
    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Number of cells currently stored.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// True while no input has been observed.
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The stored cell weight arrays, indexed by cell identifier.
    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    /// Number of cell-value modifications since construction (initial-fill
    /// insertions and replacements each count once).
    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    fn check_dim(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: input.len() });
        }
        Ok(())
    }

    fn refresh_uniqueness_cache(&mut self) {
        self.cell_uniqueness.clear();
        for i in 0..self.cells.len() {
            let mut best = f64::INFINITY;
            for j in 0..self.cells.len() {
                if i != j {
                    let d = distance(&self.cells[i], &self.cells[j]);
                    if d < best {
                        best = d;
                    }
                }
            }
            self.cell_uniqueness.push(best);
        }
    }

    /// Presents one input to the map, possibly inserting or replacing a
    /// cell, and returns the index of the cell closest to the input after
    /// any change.
    ///
    /// While the map is below capacity the input is always inserted. Once
    /// full, the input's uniqueness (its distance to the nearest stored
    /// cell) is compared against the stored cells' own uniqueness values;
    /// only an input strictly more unique than the least unique cell is
    /// admitted, overwriting that cell. Ties pick the lowest index.
    pub fn observe(&mut self, input: &[f64]) -> Result<usize> {
        self.check_dim(input)?;
        if self.cells.len() < self.max_size {
            self.cells.push(input.to_vec());
            self.update_count += 1;
            if self.cells.len() == self.max_size {
                self.refresh_uniqueness_cache();
            }
            return self.nearest(input);
        }

        // Full map: one distance pass serves both the input's uniqueness
        // (min distance to any cell) and the winner query.
        let mut input_uniqueness = f64::INFINITY;
        let mut winner = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            let d = distance(input, cell);
            if d < input_uniqueness {
                input_uniqueness = d;
                winner = i;
            }
        }

        let mut least = 0;
        for i in 1..self.cell_uniqueness.len() {
            if self.cell_uniqueness[i] < self.cell_uniqueness[least] {
                least = i;
            }
        }

        if input_uniqueness > self.cell_uniqueness[least] {
            self.cells[least] = input.to_vec();
            self.update_count += 1;
            self.refresh_uniqueness_cache();
            return self.nearest(input);
        }
        Ok(winner)
    }

    /// Index of the cell closest to `input`, without mutating the map.
    /// Ties pick the lowest index. Errors on an empty map.
    pub fn nearest(&self, input: &[f64]) -> Result<usize> {
        self.check_dim(input)?;
        if self.cells.is_empty() {
            return Err(Error::TooFewElements { needed: 1, actual: 0 });
        }
        let mut best = f64::INFINITY;
        let mut winner = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            let d = distance(input, cell);
            if d < best {
                best = d;
                winner = i;
            }
        }
        Ok(winner)
    }
}
