// Copyright 2026 The qss-core Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Computational-basis measurement of any subset of qudits.
//!
//! Outcomes are digit tuples in the order the targets were listed and are
//! always reported in lexicographic order. Outcomes whose probability falls
//! below [`tol::ZERO_PROBABILITY`] are treated as impossible.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::QuditRegister;
use crate::tol;

/// Random stream used for sampling measurement outcomes.
pub type TrialRng = ChaCha20Rng;

/// Stream for trial `trial` of an experiment seeded with `seed`. Streams
/// depend only on `seed ^ trial`, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    ChaCha20Rng::seed_from_u64(seed ^ trial)
}

/// Which qudits were measured, what was seen and how likely it was.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub targets: Vec<usize>,
    pub outcome: Vec<usize>,
    pub probability: f64,
}

/// One post-measurement history.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub record: MeasurementRecord,
    /// State of the unmeasured qudits, in their original relative order.
    /// Holds zero qudits (a single unit amplitude) when everything was measured.
    pub state: QuditRegister,
}

/// Index bookkeeping for splitting a register into measured and kept qudits.
struct Partition {
    dim: usize,
    target_strides: Vec<usize>,
    rest_strides: Vec<usize>,
    outcomes: usize,
    rest_size: usize,
}

impl Partition {
    fn new(reg: &QuditRegister, targets: &[usize]) -> Result<Self> {
        reg.check_targets(targets)?;
        let rest: Vec<usize> = (0..reg.num_qudits()).filter(|p| !targets.contains(p)).collect();
        Ok(Self {
            dim: reg.dim(),
            target_strides: targets.iter().map(|&t| reg.stride(t)).collect(),
            rest_strides: rest.iter().map(|&p| reg.stride(p)).collect(),
            outcomes: reg.dim().pow(targets.len() as u32),
            rest_size: reg.dim().pow(rest.len() as u32),
        })
    }

    fn fold(&self, flat: usize, strides: &[usize]) -> usize {
        strides.iter().fold(0, |acc, s| acc * self.dim + (flat / s) % self.dim)
    }

    fn outcome_index(&self, flat: usize) -> usize {
        self.fold(flat, &self.target_strides)
    }

    fn rest_index(&self, flat: usize) -> usize {
        self.fold(flat, &self.rest_strides)
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.target_strides.len()];
        for slot in digits.iter_mut().rev() {
            *slot = index % self.dim;
            index /= self.dim;
        }
        digits
    }

    fn probabilities(&self, reg: &QuditRegister) -> Vec<f64> {
        let mut probs = vec![0.0; self.outcomes];
        for (flat, amp) in reg.amplitudes().iter().enumerate() {
            probs[self.outcome_index(flat)] += amp.norm_sqr();
        }
        probs
    }

    fn project(&self, reg: &QuditRegister, outcome: usize, probability: f64) -> QuditRegister {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.rest_size];
        let scale = 1.0 / probability.sqrt();
        for (flat, amp) in reg.amplitudes().iter().enumerate() {
            if self.outcome_index(flat) == outcome {
                amps[self.rest_index(flat)] = amp * scale;
            }
        }
        QuditRegister::from_parts(self.dim, self.rest_strides.len(), amps)
    }
}

/// Probability of every possible outcome on `targets`, keyed by digit tuple.
pub fn outcome_distribution(reg: &QuditRegister, targets: &[usize]) -> Result<BTreeMap<Vec<usize>, f64>> {
    let part = Partition::new(reg, targets)?;
    Ok(part
        .probabilities(reg)
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p >= tol::ZERO_PROBABILITY)
        .map(|(i, p)| (part.digits(i), p))
        .collect())
}

/// Projects onto `outcome` and renormalizes the unmeasured qudits.
pub fn collapse(reg: &QuditRegister, targets: &[usize], outcome: &[usize]) -> Result<(QuditRegister, f64)> {
    let part = Partition::new(reg, targets)?;
    if outcome.len() != targets.len() {
        return Err(Error::OutcomeLength { expected: targets.len(), found: outcome.len() });
    }
    for &digit in outcome {
        reg.check_digit(digit)?;
    }
    let index = outcome.iter().fold(0, |acc, &digit| acc * reg.dim() + digit);
    let probability: f64 = reg
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(flat, _)| part.outcome_index(flat) == index)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if probability < tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { outcome: outcome.to_vec() });
    }
    Ok((part.project(reg, index, probability), probability))
}

/// Inverse-CDF draw over `weights` in order, skipping impossible entries.
fn pick<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().filter(|&&p| p >= tol::ZERO_PROBABILITY).sum();
    let draw = rng.random::<f64>() * total;
    let mut chosen = None;
    let mut acc = 0.0;
    for (i, &p) in weights.iter().enumerate() {
        if p < tol::ZERO_PROBABILITY {
            continue;
        }
        chosen = Some(i);
        acc += p;
        if draw < acc {
            break;
        }
    }
    chosen
}

/// Draws one outcome from a distribution built by [`outcome_distribution`],
/// consuming the stream exactly as [`measure`] would on the same register.
pub fn sample_outcome<R: Rng + ?Sized>(
    distribution: &BTreeMap<Vec<usize>, f64>,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let weights: Vec<f64> = distribution.values().copied().collect();
    pick(&weights, rng).and_then(|i| distribution.keys().nth(i).cloned())
}

/// Samples an outcome from `rng` and collapses onto it.
pub fn measure<R: Rng + ?Sized>(reg: &QuditRegister, targets: &[usize], rng: &mut R) -> Result<Branch> {
    let part = Partition::new(reg, targets)?;
    let probs = part.probabilities(reg);
    let index = pick(&probs, rng).ok_or(Error::ZeroVector)?;
    let probability = probs[index];
    Ok(Branch {
        record: MeasurementRecord { targets: targets.to_vec(), outcome: part.digits(index), probability },
        state: part.project(reg, index, probability),
    })
}

/// Every possible outcome on `targets`, lexicographically ordered.
pub fn enumerate_branches(reg: &QuditRegister, targets: &[usize]) -> Result<Vec<Branch>> {
    let part = Partition::new(reg, targets)?;
    Ok(part
        .probabilities(reg)
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p >= tol::ZERO_PROBABILITY)
        .map(|(i, probability)| Branch {
            record: MeasurementRecord { targets: targets.to_vec(), outcome: part.digits(i), probability },
            state: part.project(reg, i, probability),
        })
        .collect())
}
