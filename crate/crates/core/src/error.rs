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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("register must hold at least one qudit")]
    EmptyRegister,
    #[error("digit {digit} out of range for dimension {dim}")]
    DigitOutOfRange { digit: usize, dim: usize },
    #[error("flat index {index} out of range for {size} amplitudes")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("register of {dim}^{qudits} amplitudes exceeds the size cap of {cap}")]
    CapExceeded { dim: usize, qudits: usize, cap: usize },
    #[error(
        "oracle cap exceeded: {dim}^{qudits} amplitudes > {cap}; shrink the grid or raise the oracle cap"
    )]
    OracleCapExceeded { dim: usize, qudits: usize, cap: usize },
    #[error("shape mismatch: ({0}, {1}) vs ({2}, {3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("operator dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator entries do not form a square matrix ({0} entries)")]
    NotSquare(usize),
    #[error("qudit position {position} out of range for {qudits} qudits")]
    PositionOutOfRange { position: usize, qudits: usize },
    #[error("qudit position {0} listed more than once")]
    RepeatedTarget(usize),
    #[error("no target positions given")]
    NoTargets,
    #[error("outcome has {found} digits but {expected} targets were given")]
    OutcomeLength { expected: usize, found: usize },
    #[error("amplitude vector has length {found}, expected {expected}")]
    AmplitudeLength { expected: usize, found: usize },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("outcome {outcome:?} has zero probability")]
    ZeroProbability { outcome: Vec<usize> },
    #[error("forced outcome list exhausted")]
    OutcomesExhausted,
    #[error("protocol needs at least {min} parties, got {found}")]
    TooFewParties { min: usize, found: usize },
}
