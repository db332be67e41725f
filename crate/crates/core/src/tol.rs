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

//! Numerical tolerances shared by the library, the oracle and the harness.

/// Entrywise tolerance for algebraic identities (unitarity, state equality,
/// probabilities, marginals).
pub const ALGEBRAIC: f64 = 1e-12;

/// Tolerance on end-to-end fidelities: a run passes when `fidelity >= 1 - FIDELITY`.
pub const FIDELITY: f64 = 1e-9;

/// Outcomes below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Relative norm deviation above which raw secret input triggers a warning.
pub const SECRET_NORM_WARNING: f64 = 1e-6;

/// Width of the binomial acceptance band for sampled frequencies, in standard deviations.
pub const SAMPLING_SIGMAS: f64 = 5.0;
