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

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qss_core::density::reduced_density;
use qss_core::gates::{aggregated_phase_correction, phase_correction, qft_apply, xor_apply};
use qss_core::measurement::{enumerate_branches, outcome_distribution};
use qss_core::protocol::{run_protocol, Mode};
use qss_core::state::{digits_of_index, index_of_digits};
use qss_core::{fidelity, tol, QuditRegister, SecretAmplitudes};

fn register(d: usize, n: usize, seed: u64) -> QuditRegister {
    QuditRegister::random(d, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5, 2usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_round_trip(d in 2usize..=7, n in 1usize..=5, seed in any::<u64>()) {
        let flat = (seed as usize) % d.pow(n as u32);
        let ds = digits_of_index(d, n, flat).unwrap();
        prop_assert_eq!(index_of_digits(d, &ds).unwrap(), flat);
    }

    #[test]
    fn gates_preserve_norm((d, n, seed) in shape(), a in 0usize..4, b in 0usize..4, k in 0usize..8) {
        let (a, b) = (a % n, b % n);
        let reg = register(d, n, seed);
        let mut out = qft_apply(&reg, a).unwrap();
        if a != b {
            out = xor_apply(&out, a, b).unwrap();
        }
        out = phase_correction(&out, b, k % d).unwrap();
        out = aggregated_phase_correction(&out, a, k as u64 * 1_000_003).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= tol::ALGEBRAIC);
    }

    #[test]
    fn disjoint_gates_commute((d, n, seed) in shape()) {
        prop_assume!(n >= 3);
        let reg = register(d, n, seed);
        let ab = xor_apply(&qft_apply(&reg, 0).unwrap(), 1, 2).unwrap();
        let ba = qft_apply(&xor_apply(&reg, 1, 2).unwrap(), 0).unwrap();
        prop_assert!(ab.max_deviation(&ba).unwrap() <= tol::ALGEBRAIC);
    }

    #[test]
    fn branch_probabilities_sum_to_one((d, n, seed) in shape(), mask in 1usize..16) {
        let reg = register(d, n, seed);
        let targets: Vec<usize> = (0..n).filter(|p| mask & (1 << p) != 0).collect();
        prop_assume!(!targets.is_empty());
        let total: f64 = enumerate_branches(&reg, &targets).unwrap().iter().map(|b| b.record.probability).sum();
        prop_assert!((total - 1.0).abs() <= tol::ALGEBRAIC);
        let dist: f64 = outcome_distribution(&reg, &targets).unwrap().values().sum();
        prop_assert!((dist - 1.0).abs() <= tol::ALGEBRAIC);
    }

    #[test]
    fn measurement_order_does_not_matter((d, n, seed) in shape()) {
        let reg = register(d, n, seed);
        let joint = outcome_distribution(&reg, &[0, n - 1]).unwrap();
        let swapped = outcome_distribution(&reg, &[n - 1, 0]).unwrap();
        for (outcome, p) in &joint {
            let q = swapped[&vec![outcome[1], outcome[0]]];
            prop_assert!((p - q).abs() <= tol::ALGEBRAIC);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded((d, n, seed) in shape()) {
        let a = register(d, n, seed);
        let b = register(d, n, seed.wrapping_add(1));
        let ab = fidelity(&a, &b).unwrap();
        prop_assert!((ab - fidelity(&b, &a).unwrap()).abs() <= tol::ALGEBRAIC);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() <= tol::ALGEBRAIC);
    }

    #[test]
    fn reduced_density_is_a_state((d, n, seed) in shape(), mask in 1usize..16) {
        let reg = register(d, n, seed);
        let keep: Vec<usize> = (0..n).filter(|p| mask & (1 << p) != 0).collect();
        prop_assume!(!keep.is_empty());
        let rho = reduced_density(&reg, &keep).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() <= tol::ALGEBRAIC);
        prop_assert!(rho.trace().im.abs() <= tol::ALGEBRAIC);
        prop_assert!(rho.hermiticity_deviation() <= tol::ALGEBRAIC);
    }

    #[test]
    fn sampled_runs_recover_the_secret(d in 2usize..=5, n in 1usize..=4, seed in any::<u64>(), parallel in any::<bool>()) {
        let secret = SecretAmplitudes::random(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let mode = if parallel { Mode::Parallel } else { Mode::Sequential };
        let run = run_protocol(&secret, n, mode, seed).unwrap();
        prop_assert!(run.final_fidelity >= 1.0 - tol::FIDELITY);
        prop_assert_eq!(run.reconstruction_digits().len(), n - 1);
    }
}
