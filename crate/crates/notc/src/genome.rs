//! Fixed-topology MLP individuals with a direct-encoded genome, plus the two
//! reproduction operators used by NOTC.
//!
//! Each individual is a feedforward network with one hidden tanh layer and an
//! identity output layer, encoded as a flat vector of reals. New individuals
//! are bred either by a differential-evolution trial vector,
//!
//! ```text
//! mutant = r1 + F·(r2 − r3)
//! gene j = mutant[j]  if u_j < CR or j = j_rand
//!          base[j]    otherwise
//! ```
//!
//! or by indexing: copying one uniformly chosen individual verbatim.

use rand::prelude::*;

use crate::error::{Error, Result};

/// A flat real-valued genome; layout is defined by [`MlpSpec`].
pub type Chromosome = Vec<f64>;

/// Shape of the networks: one hidden layer, no bias on the input layer.
///
/// Gene layout, in order: hidden weights row-major (`n_hidden` rows of
/// `n_inputs` weights), hidden biases, output weights row-major (`n_outputs`
/// rows of `n_hidden` weights), output biases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpSpec {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
}

impl MlpSpec {
    /// Creates a spec; every layer must have at least one unit.
    pub fn new(n_inputs: usize, n_hidden: usize, n_outputs: usize) -> Result<Self> {
        if n_inputs == 0 || n_hidden == 0 || n_outputs == 0 {
            return Err(Error::InvalidConfig(
                "mlp layer sizes (inputs, hidden, outputs) must all be positive".into(),
            ));
        }
        Ok(MlpSpec { n_inputs, n_hidden, n_outputs })
    }

    /// Number of genes: one weight per connection plus one bias per
    /// non-input neuron.
    pub fn chromosome_len(&self) -> usize {
        self.n_hidden * (self.n_inputs + 1) + self.n_outputs * (self.n_hidden + 1)
    }
}

/// Differential-evolution parameters: crossover rate CR and the interval the
/// differential weight F is drawn from (uniformly, once per trial vector).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    pub crossover_rate: f64,
    pub differential_weight_min: f64,
    pub differential_weight_max: f64,
}

impl DeParams {
    pub fn new(crossover_rate: f64, weight_min: f64, weight_max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover_rate) {
            return Err(Error::InvalidConfig(format!(
                "crossover_rate must lie in [0, 1], got {crossover_rate}"
            )));
        }
        if !weight_min.is_finite() || !weight_max.is_finite() || weight_min > weight_max {
            return Err(Error::InvalidConfig(format!(
                "differential weight range [{weight_min}, {weight_max}] is not a valid interval"
            )));
        }
        Ok(DeParams {
            crossover_rate,
            differential_weight_min: weight_min,
            differential_weight_max: weight_max,
        })
    }
}

impl Default for DeParams {
    /// Reference configuration: CR 0.2, F uniform in [0, 2].
    fn default() -> Self {
        DeParams {
            crossover_rate: 0.2,
            differential_weight_min: 0.0,
            differential_weight_max: 2.0,
        }
    }
}

/// Evaluates the network encoded by `genes` on `input`, writing hidden
/// activations and outputs into caller-provided buffers (no allocation).
pub fn forward_into(
    spec: &MlpSpec,
    genes: &[f64],
    input: &[f64],
    hidden: &mut [f64],
    output: &mut [f64],
) -> Result<()> {
    let (ni, nh, no) = (spec.n_inputs, spec.n_hidden, spec.n_outputs);
    if genes.len() != spec.chromosome_len() {
        return Err(Error::DimensionMismatch {
            expected: spec.chromosome_len(),
            actual: genes.len(),
        });
    }
    if input.len() != ni {
        return Err(Error::DimensionMismatch { expected: ni, actual: input.len() });
    }
    if hidden.len() != nh {
        return Err(Error::DimensionMismatch { expected: nh, actual: hidden.len() });
    }
    if output.len() != no {
        return Err(Error::DimensionMismatch { expected: no, actual: output.len() });
    }

    let (w1, rest) = genes.split_at(nh * ni);
    let (b1, rest) = rest.split_at(nh);
    let (w2, b2) = rest.split_at(no * nh);

    for h in 0..nh {
        let row = &w1[h * ni..(h + 1) * ni];
        let mut sum = b1[h];
        for i in 0..ni {
            sum += row[i] * input[i];
        }
        hidden[h] = sum.tanh();
    }
    for o in 0..no {
        let row = &w2[o * nh..(o + 1) * nh];
        let mut sum = b2[o];
        for h in 0..nh {
            sum += row[h] * hidden[h];
        }
        output[o] = sum;
    }
    Ok(())
}

/// Evaluates the network encoded by `genes` on `input`.
pub fn forward(spec: &MlpSpec, genes: &[f64], input: &[f64]) -> Result<Vec<f64>> {
    let mut hidden = vec![0.0; spec.n_hidden];
    let mut output = vec![0.0; spec.n_outputs];
    forward_into(spec, genes, input, &mut hidden, &mut output)?;
    Ok(output)
}

/// Draws a fresh chromosome with every gene uniform in [-1, 1].
pub fn random_chromosome<R: Rng>(spec: &MlpSpec, rng: &mut R) -> Chromosome {
    (0..spec.chromosome_len()).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Builds a DE trial vector from `base` and three population members.
///
/// F is drawn once per call from the configured interval, then one forced
/// crossover index j_rand is drawn, then one uniform variate per gene.
/// Every result gene comes from either the mutant `r1 + F·(r2 − r3)` or
/// `base` (binomial crossover); the gene at j_rand always comes from the
/// mutant, so the result cannot equal `base` unless the mutant does.
pub fn de_trial<R: Rng>(
    base: &[f64],
    r1: &[f64],
    r2: &[f64],
    r3: &[f64],
    params: &DeParams,
    rng: &mut R,
) -> Result<Chromosome> {
    let n = base.len();
    if n == 0 {
        return Err(Error::TooFewElements { needed: 1, actual: 0 });
    }
    for other in [r1, r2, r3] {
        if other.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: other.len() });
        }
    }
    let f = rng.random_range(params.differential_weight_min..=params.differential_weight_max);
    let j_rand = rng.random_range(0..n);
    let mut genes = Vec::with_capacity(n);
    for j in 0..n {
        let u: f64 = rng.random();
        if u < params.crossover_rate || j == j_rand {
            genes.push(r1[j] + f * (r2[j] - r3[j]));
        } else {
            genes.push(base[j]);
        }
    }
    Ok(genes)
}

/// Indexing reproduction: an exact copy of one uniformly selected chromosome.
pub fn index_copy<R: Rng>(population: &[&[f64]], rng: &mut R) -> Result<Chromosome> {
    if population.is_empty() {
        return Err(Error::TooFewElements { needed: 1, actual: 0 });
    }
    Ok(population[rng.random_range(0..population.len())].to_vec())
}
