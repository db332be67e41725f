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

//! Qudit Fourier transform, generalized XOR and the correction maps used by
//! the splitting and reconstruction procedures.
//!
//! The correction maps act directly on amplitude strides as a relabeling of
//! one qudit's basis states combined with a diagonal phase. Phases are always
//! evaluated as `exp(±i 2π (p mod d) / d)` for an integer product `p`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{apply_local, root_of_unity, Operator, QuditRegister};

/// `d × d` Fourier matrix with entry `(k, j) = exp(i 2π jk / d) / sqrt d`.
pub fn qft_operator(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let scale = 1.0 / (d as f64).sqrt();
    Ok(Operator::from_fn(d, |k, j| root_of_unity(d, j * k, false) * scale))
}

/// `d² × d²` matrix of `|j>|k> -> |j>|k + j mod d>`, control first.
pub fn xor_operator(d: usize) -> Result<Operator> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(Operator::from_fn(d * d, |row, col| {
        let (j, k) = (col / d, col % d);
        if row == j * d + (k + j) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Fourier transform on the qudit at `target`.
pub fn qft_apply(reg: &QuditRegister, target: usize) -> Result<QuditRegister> {
    apply_local(reg, &qft_operator(reg.dim())?, &[target])
}

/// Generalized XOR: adds the `control` digit to the `target` digit mod `d`.
pub fn xor_apply(reg: &QuditRegister, control: usize, target: usize) -> Result<QuditRegister> {
    reg.check_targets(&[control, target])?;
    let d = reg.dim();
    let (cs, ts) = (reg.stride(control), reg.stride(target));
    let src = reg.amplitudes();
    let mut out = reg.clone();
    let dst = out.amplitudes_mut();
    for (idx, amp) in src.iter().enumerate() {
        let j = (idx / cs) % d;
        let k = (idx / ts) % d;
        let moved = idx - k * ts + ((k + j) % d) * ts;
        dst[moved] = *amp;
    }
    Ok(out)
}

/// Relabels `|r> -> |(m - r) mod d>` on `target` and multiplies the new label
/// `k` by `exp(-i 2π kl / d)`.
pub fn bob1_correction(reg: &QuditRegister, target: usize, l: usize, m: usize) -> Result<QuditRegister> {
    reg.check_position(target)?;
    reg.check_digit(l)?;
    reg.check_digit(m)?;
    let d = reg.dim();
    let phases: Vec<Complex64> = (0..d).map(|k| root_of_unity(d, k * l, true)).collect();
    let stride = reg.stride(target);
    let src = reg.amplitudes();
    let mut out = reg.clone();
    let dst = out.amplitudes_mut();
    for (idx, amp) in src.iter().enumerate() {
        let r = (idx / stride) % d;
        let k = (m + d - r) % d;
        dst[idx - r * stride + k * stride] = amp * phases[k];
    }
    Ok(out)
}

/// Pure relabeling `|r> -> |(m - r) mod d>` on `target`.
pub fn bob_mu_correction(reg: &QuditRegister, target: usize, m: usize) -> Result<QuditRegister> {
    bob1_correction(reg, target, 0, m)
}

fn diagonal_phase(reg: &QuditRegister, target: usize, k: usize) -> Result<QuditRegister> {
    reg.check_position(target)?;
    let d = reg.dim();
    let phases: Vec<Complex64> = (0..d).map(|j| root_of_unity(d, j * k, true)).collect();
    let stride = reg.stride(target);
    let mut out = reg.clone();
    for (idx, amp) in out.amplitudes_mut().iter_mut().enumerate() {
        *amp *= phases[(idx / stride) % d];
    }
    Ok(out)
}

/// `|j> -> exp(-i 2π j k / d) |j>` on `target`.
pub fn phase_correction(reg: &QuditRegister, target: usize, k: usize) -> Result<QuditRegister> {
    reg.check_digit(k)?;
    diagonal_phase(reg, target, k)
}

/// One diagonal phase for a whole set of reconstruction outcomes; `k_sum` is
/// reduced mod `d` before use.
pub fn aggregated_phase_correction(reg: &QuditRegister, target: usize, k_sum: u64) -> Result<QuditRegister> {
    let reduced = (k_sum % reg.dim() as u64) as usize;
    diagonal_phase(reg, target, reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::fidelity;
    use crate::tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(d: usize, digits: &[usize]) -> QuditRegister {
        QuditRegister::basis(d, digits).unwrap()
    }

    #[test]
    fn qft_two_is_hadamard() {
        let h = Operator::new(
            2,
            vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        )
        .unwrap();
        assert!(qft_operator(2).unwrap().max_deviation(&h).unwrap() <= tol::ALGEBRAIC);
    }

    #[test]
    fn qft_three_column_one() {
        let q = qft_operator(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        for (k, expected) in [c(1.0, 0.0), omega, omega * omega].into_iter().enumerate() {
            assert!((q.get(k, 1) - expected * s).norm() < tol::ALGEBRAIC);
        }
    }

    #[test]
    fn qft_unitary_up_to_nine() {
        for d in 2..=9 {
            let q = qft_operator(d).unwrap();
            assert!(q.unitarity_deviation() <= tol::ALGEBRAIC, "d={d}");
        }
        assert_eq!(qft_operator(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn qft_of_zero_overlaps_half_at_d4() {
        let zero = basis(4, &[0]);
        let out = qft_apply(&zero, 0).unwrap();
        let ip = crate::state::inner_product(&zero, &out).unwrap();
        assert!((ip - c(0.5, 0.0)).norm() < tol::ALGEBRAIC);
    }

    #[test]
    fn qft_on_zero_qubit_is_plus() {
        let out = qft_apply(&basis(2, &[0]), 0).unwrap();
        let plus = QuditRegister::from_amplitudes(2, 1, vec![c(1.0, 0.0); 2]).unwrap();
        assert!(out.max_deviation(&plus).unwrap() <= tol::ALGEBRAIC);
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_apply(&basis(3, &[1, 1]), 0, 1).unwrap(), basis(3, &[1, 2]));
        assert_eq!(xor_apply(&basis(2, &[1, 1]), 0, 1).unwrap(), basis(2, &[1, 0]));
        for d in 2..=5 {
            for k in 0..d {
                assert_eq!(xor_apply(&basis(d, &[0, k]), 0, 1).unwrap(), basis(d, &[0, k]));
            }
        }
        // control after target in position order
        assert_eq!(xor_apply(&basis(3, &[2, 0, 2]), 2, 0).unwrap(), basis(3, &[1, 0, 2]));
        assert_eq!(xor_apply(&basis(3, &[0, 0]), 1, 1), Err(Error::RepeatedTarget(1)));
    }

    #[test]
    fn xor_operator_matches_register_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=4 {
            let r = QuditRegister::random(d, 3, &mut rng).unwrap();
            let xor = xor_operator(d).unwrap();
            assert!(xor.is_unitary(tol::ALGEBRAIC));
            let dense = apply_local(&r, &xor, &[2, 0]).unwrap();
            let fast = xor_apply(&r, 2, 0).unwrap();
            assert!(dense.max_deviation(&fast).unwrap() <= tol::ALGEBRAIC);
        }
    }

    #[test]
    fn xor_d_times_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 2..=5 {
            let r = QuditRegister::random(d, 3, &mut rng).unwrap();
            let mut out = r.clone();
            for _ in 0..d {
                out = xor_apply(&out, 0, 2).unwrap();
            }
            assert_eq!(out, r);
        }
    }

    #[test]
    fn bob1_examples() {
        // l = 0, m = 0: r -> -r mod d with no phase
        for d in 2..=5 {
            for r in 0..d {
                let out = bob1_correction(&basis(d, &[r]), 0, 0, 0).unwrap();
                assert_eq!(out, basis(d, &[(d - r) % d]));
            }
        }
        let out = bob1_correction(&basis(2, &[0]), 0, 1, 1).unwrap();
        assert!((out.amplitudes()[1] - c(-1.0, 0.0)).norm() < tol::ALGEBRAIC);
        assert!(out.amplitudes()[0].norm() < tol::ALGEBRAIC);
        assert_eq!(
            bob1_correction(&basis(2, &[0]), 0, 2, 0),
            Err(Error::DigitOutOfRange { digit: 2, dim: 2 })
        );
    }

    #[test]
    fn bob_mu_examples() {
        assert_eq!(bob_mu_correction(&basis(2, &[0]), 0, 0).unwrap(), basis(2, &[0]));
        assert_eq!(bob_mu_correction(&basis(2, &[1]), 0, 0).unwrap(), basis(2, &[1]));
        for (from, to) in [(0, 1), (1, 0), (2, 2)] {
            assert_eq!(bob_mu_correction(&basis(3, &[from]), 0, 1).unwrap(), basis(3, &[to]));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let r = QuditRegister::random(4, 2, &mut rng).unwrap();
        for m in 0..4 {
            assert_eq!(bob_mu_correction(&r, 1, m).unwrap(), bob1_correction(&r, 1, 0, m).unwrap());
        }
    }

    #[test]
    fn bob1_is_phase_after_relabel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 2..=5 {
            let r = QuditRegister::random(d, 2, &mut rng).unwrap();
            for l in 0..d {
                for m in 0..d {
                    let direct = bob1_correction(&r, 0, l, m).unwrap();
                    let composed = phase_correction(&bob_mu_correction(&r, 0, m).unwrap(), 0, l).unwrap();
                    assert!(direct.max_deviation(&composed).unwrap() <= tol::ALGEBRAIC);
                }
            }
        }
    }

    #[test]
    fn phase_correction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = QuditRegister::random(3, 2, &mut rng).unwrap();
        assert_eq!(phase_correction(&r, 1, 0).unwrap(), r);
        let out = phase_correction(&basis(2, &[1]), 0, 1).unwrap();
        assert!((out.amplitudes()[1] - c(-1.0, 0.0)).norm() < tol::ALGEBRAIC);
        let out = phase_correction(&r, 0, 2).unwrap();
        for (a, b) in out.amplitudes().iter().zip(r.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < tol::ALGEBRAIC);
        }
        assert!(phase_correction(&r, 0, 3).is_err());
    }

    #[test]
    fn phase_correction_undoes_reconstruction_phases() {
        // sum_j alpha_j exp(i 2π j k / d) |j> -> sum_j alpha_j |j>, alpha_j > 0
        let d = 5;
        let alphas: Vec<f64> = (0..d).map(|j| (j + 1) as f64).collect();
        let norm = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
        for k in 0..d {
            let amps = alphas
                .iter()
                .enumerate()
                .map(|(j, a)| Complex64::from_polar(a / norm, 2.0 * PI * (j * k) as f64 / d as f64))
                .collect();
            let reg = QuditRegister::from_amplitudes(d, 1, amps).unwrap();
            let out = phase_correction(&reg, 0, k).unwrap();
            for (j, amp) in out.amplitudes().iter().enumerate() {
                assert!((amp - c(alphas[j] / norm, 0.0)).norm() < tol::ALGEBRAIC);
            }
        }
    }

    #[test]
    fn aggregated_phase_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 2..=5 {
            let r = QuditRegister::random(d, 2, &mut rng).unwrap();
            for mult in 0..3u64 {
                assert!(
                    aggregated_phase_correction(&r, 0, mult * d as u64).unwrap().max_deviation(&r).unwrap()
                        <= tol::ALGEBRAIC
                );
            }
            for ka in 0..d {
                for kb in 0..d {
                    let agg = aggregated_phase_correction(&r, 1, (ka + kb) as u64).unwrap();
                    let seq = phase_correction(&phase_correction(&r, 1, kb).unwrap(), 1, ka).unwrap();
                    assert!(agg.max_deviation(&seq).unwrap() <= tol::ALGEBRAIC);
                }
            }
        }
        let out = aggregated_phase_correction(&basis(3, &[1]), 0, 2).unwrap();
        let expected = Complex64::from_polar(1.0, -4.0 * PI / 3.0);
        assert!((out.amplitudes()[1] - expected).norm() < tol::ALGEBRAIC);
    }

    #[test]
    fn register_maps_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for d in 2..=4 {
            for _ in 0..100 {
                let r = QuditRegister::random(d, 3, &mut rng).unwrap();
                let outs = [
                    qft_apply(&r, 1).unwrap(),
                    xor_apply(&r, 0, 2).unwrap(),
                    bob1_correction(&r, 2, 1, d - 1).unwrap(),
                    phase_correction(&r, 0, 1).unwrap(),
                    aggregated_phase_correction(&r, 1, 7).unwrap(),
                ];
                for out in &outs {
                    assert!((out.norm_sqr() - 1.0).abs() <= tol::ALGEBRAIC);
                    assert!((fidelity(out, out).unwrap() - 1.0).abs() <= tol::ALGEBRAIC);
                }
            }
        }
    }
}
