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

//! Splitting a secret qudit among `N` parties and reconstructing it.
//!
//! Qudit labels used in events are those of the joint register: 0 is the
//! secret, `1..=N` are Bob1..BobN and `N + 1` is Alice's resource qudit. The
//! labels stay fixed while measured qudits drop out of the working register.
//! Reconstruction always consumes the highest-labelled remaining party.

use std::collections::VecDeque;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::measurement::{self, trial_rng, Branch, MeasurementRecord};
use crate::state::{self, register_size, QuditRegister, SecretAmplitudes, DEFAULT_CAP};

/// How the non-recovering parties hand their digits to Bob1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One party at a time, each followed by a phase fix on Bob1.
    Sequential,
    /// All parties at once, followed by a single aggregated phase fix.
    Parallel,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sequential => "sequential",
            Mode::Parallel => "parallel",
        }
    }
}

/// One entry of a protocol transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Event {
    Prepare {
        name: String,
        positions: Vec<usize>,
    },
    Gate {
        name: String,
        positions: Vec<usize>,
    },
    Measure {
        positions: Vec<usize>,
        outcome: Vec<usize>,
        #[serde(serialize_with = "crate::trace::serialize_decimal")]
        probability: f64,
    },
    Message {
        from: String,
        to: Vec<String>,
        payload: Vec<usize>,
    },
    Correction {
        name: String,
        position: usize,
        params: Vec<usize>,
    },
}

fn party(label: usize) -> String {
    format!("bob{label}")
}

fn gate(name: &str, positions: Vec<usize>) -> Event {
    Event::Gate { name: name.into(), positions }
}

fn correction(name: &str, position: usize, params: Vec<usize>) -> Event {
    Event::Correction { name: name.into(), position, params }
}

/// Supplies measurement outcomes: sampled from a random stream or forced.
pub trait OutcomeSource {
    fn measure(&mut self, reg: &QuditRegister, targets: &[usize]) -> Result<Branch>;
}

impl<T: OutcomeSource + ?Sized> OutcomeSource for &mut T {
    fn measure(&mut self, reg: &QuditRegister, targets: &[usize]) -> Result<Branch> {
        (**self).measure(reg, targets)
    }
}

/// Draws outcomes from the wrapped random stream.
#[derive(Debug, Clone)]
pub struct Sampled<R>(pub R);

impl<R: Rng> OutcomeSource for Sampled<R> {
    fn measure(&mut self, reg: &QuditRegister, targets: &[usize]) -> Result<Branch> {
        measurement::measure(reg, targets, &mut self.0)
    }
}

/// Replays a fixed digit sequence, consuming one digit per measured qudit.
#[derive(Debug, Clone, Default)]
pub struct Forced {
    digits: VecDeque<usize>,
}

impl Forced {
    pub fn new(digits: impl IntoIterator<Item = usize>) -> Self {
        Self { digits: digits.into_iter().collect() }
    }

    /// Digits for a full run: Alice's `(l, m)` followed by the reconstruction
    /// digits arranged for `mode`. `party_digits[i]` is the digit of Bob(i + 2).
    pub fn for_run(mode: Mode, l: usize, m: usize, party_digits: &[usize]) -> Self {
        let mut digits = vec![l, m];
        match mode {
            Mode::Sequential => digits.extend(party_digits.iter().rev()),
            Mode::Parallel => digits.extend(party_digits),
        }
        Self::new(digits)
    }

    pub fn remaining(&self) -> usize {
        self.digits.len()
    }
}

impl OutcomeSource for Forced {
    fn measure(&mut self, reg: &QuditRegister, targets: &[usize]) -> Result<Branch> {
        if self.digits.len() < targets.len() {
            return Err(Error::OutcomesExhausted);
        }
        let outcome: Vec<usize> = self.digits.drain(..targets.len()).collect();
        let (state, probability) = measurement::collapse(reg, targets, &outcome)?;
        Ok(Branch { record: MeasurementRecord { targets: targets.to_vec(), outcome, probability }, state })
    }
}

/// Output of one protocol stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub state: QuditRegister,
    pub records: Vec<MeasurementRecord>,
    pub events: Vec<Event>,
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTranscript {
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    pub secret: SecretAmplitudes,
    pub events: Vec<Event>,
    /// Bob1's qudit at the end of reconstruction.
    pub reconstructed: QuditRegister,
    pub final_fidelity: f64,
}

impl ProtocolTranscript {
    /// Alice's measured `(l, m)`.
    pub fn split_outcome(&self) -> Option<(usize, usize)> {
        self.events.iter().find_map(|e| match e {
            Event::Measure { positions, outcome, .. } if positions.first() == Some(&0) => {
                Some((outcome[0], outcome[1]))
            }
            _ => None,
        })
    }

    /// Reconstruction digits ordered by party, Bob2 first.
    pub fn reconstruction_digits(&self) -> Vec<usize> {
        let mut by_label: Vec<(usize, usize)> = self
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Measure { positions, outcome, .. } if positions.first() != Some(&0) => {
                    Some(positions.iter().copied().zip(outcome.iter().copied()))
                }
                _ => None,
            })
            .flatten()
            .collect();
        by_label.sort_unstable();
        by_label.into_iter().map(|(_, k)| k).collect()
    }
}

/// `(1/sqrt d) sum_j |j>^{⊗parties}`.
pub fn prepare_ghz(d: usize, parties: usize) -> Result<QuditRegister> {
    prepare_ghz_with_cap(d, parties, DEFAULT_CAP)
}

pub fn prepare_ghz_with_cap(d: usize, parties: usize, cap: usize) -> Result<QuditRegister> {
    if parties < 2 {
        return Err(Error::TooFewParties { min: 2, found: parties });
    }
    let size = register_size(d, parties, cap)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); size];
    let weight = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    // |j...j> sits at j * (1 + d + ... + d^{parties-1}).
    let step = (size - 1) / (d - 1);
    for j in 0..d {
        amps[j * step] = weight;
    }
    QuditRegister::from_amplitudes_with_cap(d, parties, amps, cap)
}

/// `sum_k alpha_k |k>^{⊗parties}`: the state shared after splitting.
pub fn qss_state(secret: &SecretAmplitudes, parties: usize) -> Result<QuditRegister> {
    if parties == 0 {
        return Err(Error::EmptyRegister);
    }
    let d = secret.dim();
    let size = register_size(d, parties, DEFAULT_CAP)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); size];
    let step = (size - 1) / (d - 1);
    for (k, a) in secret.alphas().iter().enumerate() {
        amps[k * step] = *a;
    }
    QuditRegister::from_amplitudes(d, parties, amps)
}

/// Secret at position 0, Bob1..BobN at `1..=N`, Alice's GHZ share at `N + 1`.
pub fn prepare_joint(secret: &SecretAmplitudes, n: usize) -> Result<QuditRegister> {
    prepare_joint_with_cap(secret, n, DEFAULT_CAP)
}

pub fn prepare_joint_with_cap(secret: &SecretAmplitudes, n: usize, cap: usize) -> Result<QuditRegister> {
    if n < 1 {
        return Err(Error::TooFewParties { min: 1, found: n });
    }
    let d = secret.dim();
    register_size(d, n + 2, cap)?;
    secret.to_register().tensor(&prepare_ghz_with_cap(d, n + 1, cap)?)
}

fn preparation_events(n: usize) -> Vec<Event> {
    vec![
        Event::Prepare { name: "secret".into(), positions: vec![0] },
        Event::Prepare { name: "ghz".into(), positions: (1..=n + 1).collect() },
    ]
}

/// Alice's generalized Bell measurement: XOR from the secret onto her resource
/// qudit, Fourier transform on the secret, then measurement of both. Returns
/// the `N`-qudit state left with Bob1..BobN.
pub fn split(joint: &QuditRegister, n: usize, outcomes: impl OutcomeSource) -> Result<Fragment> {
    let mut outcomes = outcomes;
    if n < 1 {
        return Err(Error::TooFewParties { min: 1, found: n });
    }
    if joint.num_qudits() != n + 2 {
        return Err(Error::DimensionMismatch { expected: n + 2, found: joint.num_qudits() });
    }
    let alice = n + 1;
    let mut events = vec![gate("xor", vec![0, alice])];
    let reg = gates::xor_apply(joint, 0, alice)?;
    events.push(gate("qft", vec![0]));
    let reg = gates::qft_apply(&reg, 0)?;

    let branch = outcomes.measure(&reg, &[0, alice])?;
    let (l, m) = (branch.record.outcome[0], branch.record.outcome[1]);
    events.push(Event::Measure {
        positions: vec![0, alice],
        outcome: vec![l, m],
        probability: branch.record.probability,
    });
    events.push(Event::Message { from: "alice".into(), to: vec![party(1)], payload: vec![l, m] });
    if n >= 2 {
        events.push(Event::Message {
            from: "alice".into(),
            to: (2..=n).map(party).collect(),
            payload: vec![m],
        });
    }
    Ok(Fragment { state: branch.state, records: vec![branch.record], events })
}

/// Bob1 relabels `|m - k> -> exp(-i 2π kl/d) |k>`, every other Bob relabels
/// `|m - k> -> |k>`.
pub fn apply_corrections(branch: &QuditRegister, l: usize, m: usize) -> Result<Fragment> {
    let mut reg = gates::bob1_correction(branch, 0, l, m)?;
    let mut events = vec![correction("relabel_phase", 1, vec![l, m])];
    for pos in 1..branch.num_qudits() {
        reg = gates::bob_mu_correction(&reg, pos, m)?;
        events.push(correction("relabel", pos + 1, vec![m]));
    }
    Ok(Fragment { state: reg, records: Vec::new(), events })
}

/// Removes the last party of a `K`-party shared state: Fourier transform,
/// measurement, message to Bob1 and Bob1's phase fix.
pub fn reconstruct_step(qss: &QuditRegister, outcomes: impl OutcomeSource) -> Result<Fragment> {
    let mut outcomes = outcomes;
    let k_parties = qss.num_qudits();
    if k_parties < 2 {
        return Err(Error::TooFewParties { min: 2, found: k_parties });
    }
    let last = k_parties - 1;
    let reg = gates::qft_apply(qss, last)?;
    let branch = outcomes.measure(&reg, &[last])?;
    let k = branch.record.outcome[0];
    let state = gates::phase_correction(&branch.state, 0, k)?;
    let events = vec![
        gate("qft", vec![k_parties]),
        Event::Measure {
            positions: vec![k_parties],
            outcome: vec![k],
            probability: branch.record.probability,
        },
        Event::Message { from: party(k_parties), to: vec![party(1)], payload: vec![k] },
        correction("phase", 1, vec![k]),
    ];
    Ok(Fragment { state, records: vec![branch.record], events })
}

/// Chain of [`reconstruct_step`] down to Bob1's single qudit.
pub fn reconstruct_sequential(qss: &QuditRegister, outcomes: impl OutcomeSource) -> Result<Fragment> {
    let mut outcomes = outcomes;
    if qss.num_qudits() < 1 {
        return Err(Error::TooFewParties { min: 1, found: 0 });
    }
    let mut state = qss.clone();
    let mut records = Vec::new();
    let mut events = Vec::new();
    while state.num_qudits() >= 2 {
        let step = reconstruct_step(&state, &mut outcomes)?;
        state = step.state;
        records.extend(step.records);
        events.extend(step.events);
    }
    Ok(Fragment { state, records, events })
}

/// Bob2..BobN transform and measure together; Bob1 applies one phase fix for
/// the summed digits.
pub fn reconstruct_parallel(qss: &QuditRegister, outcomes: impl OutcomeSource) -> Result<Fragment> {
    let mut outcomes = outcomes;
    let n = qss.num_qudits();
    if n < 1 {
        return Err(Error::TooFewParties { min: 1, found: 0 });
    }
    if n == 1 {
        return Ok(Fragment { state: qss.clone(), records: Vec::new(), events: Vec::new() });
    }
    let mut reg = qss.clone();
    let mut events = Vec::new();
    for pos in 1..n {
        reg = gates::qft_apply(&reg, pos)?;
        events.push(gate("qft", vec![pos + 1]));
    }
    let targets: Vec<usize> = (1..n).collect();
    let branch = outcomes.measure(&reg, &targets)?;
    let digits = branch.record.outcome.clone();
    events.push(Event::Measure {
        positions: (2..=n).collect(),
        outcome: digits.clone(),
        probability: branch.record.probability,
    });
    for (i, &k) in digits.iter().enumerate() {
        events.push(Event::Message { from: party(i + 2), to: vec![party(1)], payload: vec![k] });
    }
    let k_sum: u64 = digits.iter().map(|&k| k as u64).sum();
    let state = gates::aggregated_phase_correction(&branch.state, 0, k_sum)?;
    events.push(correction("aggregated_phase", 1, vec![k_sum as usize]));
    Ok(Fragment { state, records: vec![branch.record], events })
}

/// End-to-end run with outcomes drawn from `outcomes`.
pub fn run_protocol_with(
    secret: &SecretAmplitudes,
    n: usize,
    mode: Mode,
    outcomes: impl OutcomeSource,
    cap: usize,
) -> Result<ProtocolTranscript> {
    let mut outcomes = outcomes;
    let joint = prepare_joint_with_cap(secret, n, cap)?;
    let mut events = preparation_events(n);

    let split = split(&joint, n, &mut outcomes)?;
    events.extend(split.events);
    let (l, m) = (split.records[0].outcome[0], split.records[0].outcome[1]);

    let corrected = apply_corrections(&split.state, l, m)?;
    events.extend(corrected.events);

    let rebuilt = match mode {
        Mode::Sequential => reconstruct_sequential(&corrected.state, &mut outcomes)?,
        Mode::Parallel => reconstruct_parallel(&corrected.state, &mut outcomes)?,
    };
    events.extend(rebuilt.events);

    let final_fidelity = state::fidelity(&rebuilt.state, &secret.to_register())?;
    Ok(ProtocolTranscript {
        d: secret.dim(),
        n,
        mode,
        secret: secret.clone(),
        events,
        reconstructed: rebuilt.state,
        final_fidelity,
    })
}

/// End-to-end run sampling outcomes from the stream seeded by `seed`.
pub fn run_protocol(
    secret: &SecretAmplitudes,
    n: usize,
    mode: Mode,
    seed: u64,
) -> Result<ProtocolTranscript> {
    run_protocol_with(secret, n, mode, Sampled(trial_rng(seed, 0)), DEFAULT_CAP)
}
