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

//! Brute-force second implementation of the protocol.
//!
//! Every gate is rebuilt here from its defining formula as a full-register
//! operator, placed by explicit Kronecker products of per-qudit factors, and
//! measurements are done by direct projection over digit tuples. None of the
//! stride arithmetic of the fast path is reused. Full-register operators are
//! stored row by row with only their nonzero entries so the oracle cap can be
//! reached without materializing `d^n × d^n` arrays.
//!
//! Nothing in this module draws random numbers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::density::{expected_subset_marginal, reduced_density, DEFAULT_SECRECY_TOL};
use crate::error::{Error, Result};
use crate::gates;
use crate::measurement;
use crate::protocol::{self, Forced, Mode};
use crate::state::{Operator, QuditRegister, SecretAmplitudes};
use crate::tol;

/// Largest joint register (in amplitudes) the oracle will expand.
pub const DEFAULT_ORACLE_CAP: usize = 1 << 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Operator on a whole register, kept as rows of `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FullOperator {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl FullOperator {
    pub fn identity(size: usize) -> Self {
        Self { rows: (0..size).map(|i| vec![(i, ONE)]).collect() }
    }

    pub fn from_dense(op: &Operator) -> Self {
        let n = op.dim();
        let rows =
            (0..n).map(|r| (0..n).map(|c| (c, op.get(r, c))).filter(|&(_, v)| v != ZERO).collect()).collect();
        Self { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let inner = rhs.size();
        let mut rows = Vec::with_capacity(self.size() * inner);
        for outer_row in &self.rows {
            for inner_row in &rhs.rows {
                let mut row = Vec::with_capacity(outer_row.len() * inner_row.len());
                for &(oc, ov) in outer_row {
                    for &(ic, iv) in inner_row {
                        row.push((oc * inner + ic, ov * iv));
                    }
                }
                rows.push(row);
            }
        }
        Self { rows }
    }

    /// `self + rhs`; both must have the same size.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.size(), rhs.size());
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                let mut row: Vec<(usize, Complex64)> = a.iter().chain(b).copied().collect();
                row.sort_by_key(|&(c, _)| c);
                let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
                for (c, v) in row {
                    match merged.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += v,
                        _ => merged.push((c, v)),
                    }
                }
                merged.retain(|&(_, v)| v != ZERO);
                merged
            })
            .collect();
        Self { rows }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.size());
        self.rows.iter().map(|row| row.iter().map(|&(c, x)| x * v[c]).sum()).collect()
    }

    pub fn to_dense(&self) -> Operator {
        let n = self.size();
        let mut entries = vec![ZERO; n * n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                entries[r * n + c] += v;
            }
        }
        Operator::new(n, entries).expect("square by construction")
    }
}

/// Kronecker product of one factor per qudit, position 0 leftmost.
pub fn place(factors: &[FullOperator]) -> FullOperator {
    factors.iter().fold(FullOperator::identity(1), |acc, f| acc.kron(f))
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` at `position` of an `n`-qudit register.
pub fn embed_single(op: &Operator, position: usize, n: usize) -> FullOperator {
    let d = op.dim();
    let factors: Vec<FullOperator> = (0..n)
        .map(|p| if p == position { FullOperator::from_dense(op) } else { FullOperator::identity(d) })
        .collect();
    place(&factors)
}

/// Generalized XOR as `sum_j |j><j|_control ⊗ X^j_target`.
pub fn embed_xor(d: usize, control: usize, target: usize, n: usize) -> FullOperator {
    (0..d)
        .map(|j| {
            let factors: Vec<FullOperator> = (0..n)
                .map(|p| {
                    if p == control {
                        FullOperator::from_dense(&projector(d, j))
                    } else if p == target {
                        FullOperator::from_dense(&shift(d, j))
                    } else {
                        FullOperator::identity(d)
                    }
                })
                .collect();
            place(&factors)
        })
        .reduce(|a, b| a.add(&b))
        .expect("d >= 2")
}

/// `exp(i angle)` for `angle = sign * 2π num / d`, evaluated without reducing `num`.
fn phase(sign: f64, num: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, sign * 2.0 * PI * num as f64 / d as f64)
}

/// Fourier matrix written out from `|j> -> d^{-1/2} sum_k exp(i 2π jk/d) |k>`.
pub fn fourier_matrix(d: usize) -> Operator {
    let s = 1.0 / (d as f64).sqrt();
    Operator::from_fn(d, |k, j| phase(1.0, j * k, d) * s)
}

/// `|k> -> |k + j mod d>`.
pub fn shift(d: usize, j: usize) -> Operator {
    Operator::from_fn(d, |r, c| if r == (c + j) % d { ONE } else { ZERO })
}

pub fn projector(d: usize, j: usize) -> Operator {
    Operator::from_fn(d, |r, c| if r == j && c == j { ONE } else { ZERO })
}

/// `|m - k mod d> -> exp(-i 2π kl/d) |k>`.
pub fn bob1_matrix(d: usize, l: usize, m: usize) -> Operator {
    Operator::from_fn(d, |k, r| if (k + r) % d == m % d { phase(-1.0, k * l, d) } else { ZERO })
}

/// `|m - k mod d> -> |k>`.
pub fn relabel_matrix(d: usize, m: usize) -> Operator {
    bob1_matrix(d, 0, m)
}

/// `|j> -> exp(-i 2π j s/d) |j>` for any nonnegative `s`.
pub fn phase_matrix(d: usize, s: usize) -> Operator {
    Operator::from_fn(d, |r, c| if r == c { phase(-1.0, r * s, d) } else { ZERO })
}

fn digits(d: usize, n: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn index(d: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Projects onto the fixed `(position, digit)` pairs, drops those qudits and
/// renormalizes. Returns the remaining amplitudes and the outcome probability.
pub fn project(d: usize, n: usize, amps: &[Complex64], fixed: &[(usize, usize)]) -> (Vec<Complex64>, f64) {
    let kept = n - fixed.len();
    let mut out = vec![ZERO; d.pow(kept as u32)];
    for (i, a) in amps.iter().enumerate() {
        let ds = digits(d, n, i);
        if fixed.iter().all(|&(p, v)| ds[p] == v) {
            let rest: Vec<usize> =
                (0..n).filter(|p| fixed.iter().all(|&(q, _)| q != *p)).map(|p| ds[p]).collect();
            out[index(d, &rest)] = *a;
        }
    }
    let probability: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if probability > 0.0 {
        let s = 1.0 / probability.sqrt();
        out.iter_mut().for_each(|a| *a *= s);
    }
    (out, probability)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn overlap_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// `max |a_i - e^{iφ} b_i|` with `φ` chosen from the largest entry of `a`.
fn max_diff_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let pivot = (0..a.len()).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()));
    let rot = match pivot {
        Some(i) if b[i].norm() > 0.0 => {
            let r = a[i] / b[i];
            r / r.norm()
        }
        _ => ONE,
    };
    a.iter().zip(b).map(|(x, y)| (x - y * rot).norm()).fold(0.0, f64::max)
}

fn repeated_digit_state(secret: &SecretAmplitudes, parties: usize) -> Vec<Complex64> {
    let d = secret.dim();
    let mut amps = vec![ZERO; d.pow(parties as u32)];
    for (k, a) in secret.alphas().iter().enumerate() {
        amps[index(d, &vec![k; parties])] = *a;
    }
    amps
}

fn check_cap(d: usize, qudits: usize, cap: usize) -> Result<()> {
    match u32::try_from(qudits).ok().and_then(|e| d.checked_pow(e)) {
        Some(size) if size <= cap => Ok(()),
        _ => Err(Error::OracleCapExceeded { dim: d, qudits, cap }),
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub check: String,
    pub d: usize,
    pub n: usize,
    pub mode: Option<Mode>,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn new(
        check: impl Into<String>,
        d: usize,
        n: usize,
        mode: Option<Mode>,
        deviation: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            check: check.into(),
            d,
            n,
            mode,
            deviation,
            tolerance,
            passed: deviation.is_finite() && deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchProbability {
    pub stage: String,
    /// Full outcome history: `l, m` followed by reconstruction digits.
    pub outcome: Vec<usize>,
    pub probability: f64,
    pub expected: f64,
}

/// Result of sweeping every outcome tuple of one `(secret, N, mode)` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseReport {
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    pub split_branches: usize,
    pub final_branches: usize,
    pub expected_final_branches: usize,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    /// Largest entrywise gap between fast-path and oracle states over all branches.
    pub max_fast_deviation: f64,
    /// Largest gap between a corrected split branch and `sum_k alpha_k |k>^{⊗N}`, up to phase.
    pub max_shared_state_deviation: f64,
    pub max_probability_error: f64,
    pub probabilities: Vec<BranchProbability>,
}

impl DenseReport {
    pub fn assertions(&self) -> Vec<Assertion> {
        let (d, n, mode) = (self.d, self.n, Some(self.mode));
        vec![
            Assertion::new("dense.final_fidelity", d, n, mode, 1.0 - self.min_fidelity, tol::FIDELITY),
            Assertion::new("dense.fast_path_agreement", d, n, mode, self.max_fast_deviation, tol::ALGEBRAIC),
            Assertion::new("dense.shared_state", d, n, mode, self.max_shared_state_deviation, tol::ALGEBRAIC),
            Assertion::new(
                "dense.branch_probabilities",
                d,
                n,
                mode,
                self.max_probability_error,
                tol::ALGEBRAIC,
            ),
            Assertion::new(
                "dense.branch_count",
                d,
                n,
                mode,
                self.final_branches.abs_diff(self.expected_final_branches) as f64,
                0.0,
            ),
        ]
    }

    pub fn passed(&self) -> bool {
        self.assertions().iter().all(|a| a.passed)
    }
}

struct Sweep<'a> {
    d: usize,
    secret: &'a SecretAmplitudes,
    report: DenseReport,
}

impl Sweep<'_> {
    fn record(&mut self, stage: &str, outcome: Vec<usize>, probability: f64, expected: f64) {
        self.report.max_probability_error =
            self.report.max_probability_error.max((probability - expected).abs());
        self.report.probabilities.push(BranchProbability {
            stage: stage.into(),
            outcome,
            probability,
            expected,
        });
    }

    fn compare(&mut self, dense: &[Complex64], fast: &QuditRegister) {
        let dev = if dense.len() == fast.len() { max_diff(dense, fast.amplitudes()) } else { f64::INFINITY };
        self.report.max_fast_deviation = self.report.max_fast_deviation.max(dev);
    }

    fn finish(&mut self, dense: &[Complex64]) {
        let f = overlap_sqr(self.secret.alphas(), dense);
        self.report.min_fidelity = self.report.min_fidelity.min(f);
        self.report.max_fidelity = self.report.max_fidelity.max(f);
        self.report.final_branches += 1;
    }

    /// Removes the last of `parties` qudits one outcome at a time.
    fn sequential(
        &mut self,
        dense: Vec<Complex64>,
        fast: QuditRegister,
        parties: usize,
        history: Vec<usize>,
    ) -> Result<()> {
        if parties == 1 {
            self.finish(&dense);
            return Ok(());
        }
        let d = self.d;
        let last = parties - 1;
        let transformed = embed_single(&fourier_matrix(d), last, parties).apply(&dense);
        for k in 0..d {
            let (collapsed, p) = project(d, parties, &transformed, &[(last, k)]);
            let fixed = embed_single(&phase_matrix(d, k), 0, parties - 1).apply(&collapsed);
            let fast_next = protocol::reconstruct_step(&fast, Forced::new([k]))?;
            self.compare(&fixed, &fast_next.state);
            let mut next_history = history.clone();
            next_history.push(k);
            self.record("reconstruct", next_history.clone(), p, 1.0 / d as f64);
            self.sequential(fixed, fast_next.state, parties - 1, next_history)?;
        }
        Ok(())
    }

    fn parallel(
        &mut self,
        dense: Vec<Complex64>,
        fast: QuditRegister,
        parties: usize,
        history: Vec<usize>,
    ) -> Result<()> {
        let d = self.d;
        if parties == 1 {
            let fast_out = protocol::reconstruct_parallel(&fast, Forced::default())?;
            self.compare(&dense, &fast_out.state);
            self.finish(&dense);
            return Ok(());
        }
        let transformed =
            (1..parties).fold(dense, |v, p| embed_single(&fourier_matrix(d), p, parties).apply(&v));
        let outcomes = d.pow((parties - 1) as u32);
        for t in 0..outcomes {
            let ks = digits(d, parties - 1, t);
            let fixed_pairs: Vec<(usize, usize)> = ks.iter().enumerate().map(|(i, &k)| (i + 1, k)).collect();
            let (collapsed, p) = project(d, parties, &transformed, &fixed_pairs);
            let k_sum: usize = ks.iter().sum();
            let fixed = embed_single(&phase_matrix(d, k_sum), 0, 1).apply(&collapsed);
            let fast_out = protocol::reconstruct_parallel(&fast, Forced::new(ks.iter().copied()))?;
            self.compare(&fixed, &fast_out.state);
            let mut h = history.clone();
            h.extend(&ks);
            self.record("reconstruct", h, p, 1.0 / outcomes as f64);
            self.finish(&fixed);
        }
        Ok(())
    }
}

/// Exhaustive two-path check of one protocol configuration.
pub fn dense_protocol_check(secret: &SecretAmplitudes, n: usize, mode: Mode) -> Result<DenseReport> {
    dense_protocol_check_with_cap(secret, n, mode, DEFAULT_ORACLE_CAP)
}

pub fn dense_protocol_check_with_cap(
    secret: &SecretAmplitudes,
    n: usize,
    mode: Mode,
    cap: usize,
) -> Result<DenseReport> {
    if n < 1 {
        return Err(Error::TooFewParties { min: 1, found: n });
    }
    let d = secret.dim();
    let q = n + 2;
    check_cap(d, q, cap)?;

    // amplitude alpha_j / sqrt d at |j, k, ..., k>
    let mut joint = vec![ZERO; d.pow(q as u32)];
    for (j, a) in secret.alphas().iter().enumerate() {
        for k in 0..d {
            let mut ds = vec![k; q];
            ds[0] = j;
            joint[index(d, &ds)] = a / (d as f64).sqrt();
        }
    }
    let fast_joint = protocol::prepare_joint(secret, n)?;
    let encoded = embed_single(&fourier_matrix(d), 0, q).apply(&embed_xor(d, 0, n + 1, q).apply(&joint));
    let shared = repeated_digit_state(secret, n);

    let mut sweep = Sweep {
        d,
        secret,
        report: DenseReport {
            d,
            n,
            mode,
            split_branches: 0,
            final_branches: 0,
            expected_final_branches: d * d * d.pow((n - 1) as u32),
            min_fidelity: f64::INFINITY,
            max_fidelity: f64::NEG_INFINITY,
            max_fast_deviation: max_diff(&joint, fast_joint.amplitudes()),
            max_shared_state_deviation: 0.0,
            max_probability_error: 0.0,
            probabilities: Vec::new(),
        },
    };

    for l in 0..d {
        for m in 0..d {
            let (branch, p) = project(d, q, &encoded, &[(0, l), (n + 1, m)]);
            sweep.record("split", vec![l, m], p, 1.0 / (d * d) as f64);
            sweep.report.split_branches += 1;

            let fast_branch = protocol::split(&fast_joint, n, Forced::new([l, m]))?;
            sweep.compare(&branch, &fast_branch.state);
            let fast_p = fast_branch.records[0].probability;
            sweep.report.max_fast_deviation = sweep.report.max_fast_deviation.max((fast_p - p).abs());

            let mut corrected = embed_single(&bob1_matrix(d, l, m), 0, n).apply(&branch);
            for pos in 1..n {
                corrected = embed_single(&relabel_matrix(d, m), pos, n).apply(&corrected);
            }
            let fast_corrected = protocol::apply_corrections(&fast_branch.state, l, m)?.state;
            sweep.compare(&corrected, &fast_corrected);
            let dev = max_diff_up_to_phase(&shared, &corrected);
            sweep.report.max_shared_state_deviation = sweep.report.max_shared_state_deviation.max(dev);

            match mode {
                Mode::Sequential => sweep.sequential(corrected, fast_corrected, n, vec![l, m])?,
                Mode::Parallel => sweep.parallel(corrected, fast_corrected, n, vec![l, m])?,
            }
        }
    }
    Ok(sweep.report)
}

/// Deviation of one literal qubit-case identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureEntry {
    pub label: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureReport {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub entries: Vec<FixtureEntry>,
}

impl FixtureReport {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    pub fn assertions(&self) -> Vec<Assertion> {
        self.entries
            .iter()
            .map(|e| Assertion::new(format!("fixture.{}", e.label), 2, 2, None, e.deviation, tol::ALGEBRAIC))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= tol::ALGEBRAIC
    }
}

/// Two-party qubit run against the literal branch states: after Alice's Bell
/// measurement `(l, m)` the Bobs hold `a|00>+b|11>`, `a|11>+b|00>`,
/// `a|00>-b|11>` or `a|11>-b|00>`; after Bob2's Hadamard and measurement Bob1
/// holds `a|0>+b|1>` or `a|0>-b|1>`.
pub fn qubit_fixture_check(a: Complex64, b: Complex64) -> Result<FixtureReport> {
    let secret = SecretAmplitudes::new(vec![a, b])?;
    let (a, b) = (secret.alphas()[0], secret.alphas()[1]);
    let joint = protocol::prepare_joint(&secret, 2)?;
    let mut entries = Vec::new();

    let expected_branches = [
        ((0, 0), "a|00>+b|11>", [a, ZERO, ZERO, b]),
        ((0, 1), "a|11>+b|00>", [b, ZERO, ZERO, a]),
        ((1, 0), "a|00>-b|11>", [a, ZERO, ZERO, -b]),
        ((1, 1), "a|11>-b|00>", [-b, ZERO, ZERO, a]),
    ];
    for ((l, m), label, expected) in expected_branches {
        let out = protocol::split(&joint, 2, Forced::new([l, m]))?;
        entries.push(FixtureEntry {
            label: format!("split(l={l},m={m}):{label}"),
            deviation: max_diff_up_to_phase(&expected, out.state.amplitudes()),
        });
    }

    let shared = protocol::split(&joint, 2, Forced::new([0, 0]))?.state;
    let transformed = gates::qft_apply(&shared, 1)?;
    for (k, label, expected) in [(0, "a|0>+b|1>", [a, b]), (1, "a|0>-b|1>", [a, -b])] {
        let (rest, _) = measurement::collapse(&transformed, &[1], &[k])?;
        entries.push(FixtureEntry {
            label: format!("hadamard_measure(k={k}):{label}"),
            deviation: max_diff_up_to_phase(&expected, rest.amplitudes()),
        });
    }
    Ok(FixtureReport { a: [a.re, a.im], b: [b.re, b.im], entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalCheck {
    /// Number of parties still sharing the secret.
    pub parties: usize,
    /// Party labels (Bob1 = 1) whose joint marginal was taken.
    pub subset: Vec<usize>,
    /// Largest entrywise gap to `sum_k |alpha_k|^2 |k...k><k...k|`, over both
    /// the density module and the oracle's own partial trace.
    pub deviation: f64,
    pub max_off_diagonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalReport {
    pub d: usize,
    pub n: usize,
    pub checks: Vec<MarginalCheck>,
}

impl MarginalReport {
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation.max(c.max_off_diagonal)).fold(0.0, f64::max)
    }

    pub fn assertions(&self) -> Vec<Assertion> {
        self.checks
            .iter()
            .map(|c| {
                let label = c.subset.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                Assertion::new(
                    format!("marginal.parties={}.subset={{{label}}}", c.parties),
                    self.d,
                    self.n,
                    None,
                    c.deviation.max(c.max_off_diagonal),
                    DEFAULT_SECRECY_TOL,
                )
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= DEFAULT_SECRECY_TOL
    }
}

/// Reduced density matrix of the qudits at `keep` by direct summation over
/// pairs of basis states that agree on every other qudit.
fn brute_marginal(d: usize, n: usize, amps: &[Complex64], keep: &[usize]) -> Vec<Complex64> {
    let size = d.pow(keep.len() as u32);
    let mut rho = vec![ZERO; size * size];
    for (i, a) in amps.iter().enumerate() {
        let ds = digits(d, n, i);
        let row = index(d, &keep.iter().map(|&p| ds[p]).collect::<Vec<_>>());
        for col in 0..size {
            let mut other = ds.clone();
            for (&p, v) in keep.iter().zip(digits(d, keep.len(), col)) {
                other[p] = v;
            }
            rho[row * size + col] += a * amps[index(d, &other)].conj();
        }
    }
    rho
}

/// Checks every nonempty strict subset of the sharing parties at every stage
/// `K = N, N-1, ..., 2` of sequential reconstruction.
pub fn marginal_sweep(secret: &SecretAmplitudes, n: usize) -> Result<MarginalReport> {
    marginal_sweep_with_cap(secret, n, DEFAULT_ORACLE_CAP)
}

pub fn marginal_sweep_with_cap(secret: &SecretAmplitudes, n: usize, cap: usize) -> Result<MarginalReport> {
    if n < 1 {
        return Err(Error::TooFewParties { min: 1, found: n });
    }
    let d = secret.dim();
    check_cap(d, n + 2, cap)?;

    // A branch with nonzero digits everywhere, so every phase fix is exercised.
    let last = d - 1;
    let joint = protocol::prepare_joint(secret, n)?;
    let branch = protocol::split(&joint, n, Forced::new([last, last]))?;
    let mut state = protocol::apply_corrections(&branch.state, last, last)?.state;

    let mut checks = Vec::new();
    for parties in (2..=n).rev() {
        for mask in 1..(1usize << parties) - 1 {
            let keep: Vec<usize> = (0..parties).filter(|p| mask & (1 << p) != 0).collect();
            let expected = expected_subset_marginal(secret, keep.len());
            let rho = reduced_density(&state, &keep)?;
            let brute = brute_marginal(d, parties, state.amplitudes(), &keep);
            let size = expected.size();
            let brute_dev = (0..size * size)
                .map(|i| (brute[i] - expected.get(i / size, i % size)).norm())
                .fold(0.0, f64::max);
            checks.push(MarginalCheck {
                parties,
                subset: keep.iter().map(|p| p + 1).collect(),
                deviation: rho.max_deviation(&expected)?.max(brute_dev),
                max_off_diagonal: rho.max_off_diagonal(),
            });
        }
        state = protocol::reconstruct_step(&state, Forced::new([last]))?.state;
    }
    Ok(MarginalReport { d, n, checks })
}
