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

//! Statevector simulation and exhaustive verification of multiparty
//! d-dimensional quantum information splitting.
//!
//! A secret qudit `sum_k alpha_k |k>` is teleported through an
//! `(N + 1)`-qudit GHZ resource so that `N` parties end up sharing
//! `sum_k alpha_k |k>^{⊗N}`; any party can recover the secret once the others
//! apply a Fourier transform, measure and report their digits.
//!
//! Qudit positions in the joint register are fixed: position 0 holds the
//! secret, positions `1..=N` belong to Bob1..BobN and position `N + 1` is
//! Alice's half of the resource.

pub mod density;
pub mod error;
pub mod gates;
pub mod harness;
pub mod measurement;
pub mod oracle;
pub mod protocol;
pub mod state;
pub mod tol;
pub mod trace;

pub use error::{Error, Result};
pub use state::{apply_local, fidelity, inner_product, Operator, QuditRegister, SecretAmplitudes};
