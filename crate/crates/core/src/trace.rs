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

//! JSON-lines run traces and the CSV run summary.
//!
//! Every real number in a trace is written in scientific notation with 17
//! significant digits, which round-trips any `f64` exactly.

use num_complex::Complex64;
use serde::ser::Error as _;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::protocol::{Event, Mode, ProtocolTranscript};

pub const TRACE_VERSION: u32 = 1;

/// `x` with 17 significant digits, e.g. `1.0000000000000000e0`.
pub fn format_decimal(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize_decimal<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom(format!("non-finite value {x}")));
    }
    RawValue::from_string(format_decimal(*x)).map_err(S::Error::custom)?.serialize(serializer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    #[serde(serialize_with = "serialize_decimal")]
    pub re: f64,
    #[serde(serialize_with = "serialize_decimal")]
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(c: ComplexValue) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// One line of a run trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub version: u32,
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    pub trial: u64,
    pub secret: Vec<ComplexValue>,
    pub events: Vec<Event>,
    #[serde(serialize_with = "serialize_decimal")]
    pub final_fidelity: f64,
}

impl TraceRecord {
    pub fn new(transcript: &ProtocolTranscript, seed: u64, trial: u64) -> Self {
        Self {
            version: TRACE_VERSION,
            d: transcript.d,
            n: transcript.n,
            mode: transcript.mode,
            seed,
            trial,
            secret: transcript.secret.alphas().iter().copied().map(ComplexValue::from).collect(),
            events: transcript.events.clone(),
            final_fidelity: transcript.final_fidelity,
        }
    }

    pub fn to_json_line(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }
}

/// One row of the summary CSV; `k_digits` lists Bob2..BobN separated by `;`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    pub trial: u64,
    pub l: usize,
    pub m: usize,
    pub k_digits: String,
    pub final_fidelity: String,
}

impl SummaryRow {
    pub fn new(transcript: &ProtocolTranscript, trial: u64) -> Self {
        let (l, m) = transcript.split_outcome().unwrap_or_default();
        let k_digits =
            transcript.reconstruction_digits().iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        Self {
            d: transcript.d,
            n: transcript.n,
            mode: transcript.mode,
            trial,
            l,
            m,
            k_digits,
            final_fidelity: format_decimal(transcript.final_fidelity),
        }
    }
}
