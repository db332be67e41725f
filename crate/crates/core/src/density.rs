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

//! Reduced density matrices and the diagonal-marginal check.
//!
//! Marginals are summed straight from the statevector over the traced digit
//! assignments, so only the `d^k × d^k` result is ever materialized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{QuditRegister, SecretAmplitudes};

/// Default tolerance on off-diagonal magnitudes in [`is_diagonal`].
pub const DEFAULT_SECRECY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `d^k × d^k` density matrix over `k` qudits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    qudits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|reg><reg|`.
    pub fn pure(reg: &QuditRegister) -> Self {
        let amps = reg.amplitudes();
        let entries = amps.iter().flat_map(|a| amps.iter().map(move |b| a * b.conj())).collect();
        Self { dim: reg.dim(), qudits: reg.num_qudits(), entries }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(dim: usize, qudits: usize, diag: &[f64]) -> Self {
        let size = diag.len();
        debug_assert_eq!(size, dim.pow(qudits as u32));
        let mut entries = vec![ZERO; size * size];
        for (i, &p) in diag.iter().enumerate() {
            entries[i * size + i] = Complex64::new(p, 0.0);
        }
        Self { dim, qudits, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qudits(&self) -> usize {
        self.qudits
    }

    /// Side length `d^k`.
    pub fn size(&self) -> usize {
        self.dim.pow(self.qudits as u32)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.size() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.size()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (self.get(r, c) - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim || self.qudits != other.qudits {
            return Err(Error::ShapeMismatch(self.dim, self.qudits, other.dim, other.qudits));
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.size();
        self.entries
            .iter()
            .enumerate()
            .filter(|(i, _)| i / n != i % n)
            .map(|(_, e)| e.norm())
            .fold(0.0, f64::max)
    }

    /// Traces out the qudit at `position` of this matrix.
    pub fn trace_out(&self, position: usize) -> Result<Self> {
        if position >= self.qudits {
            return Err(Error::PositionOutOfRange { position, qudits: self.qudits });
        }
        if self.qudits == 1 {
            return Err(Error::EmptyRegister);
        }
        let d = self.dim;
        let stride = d.pow((self.qudits - 1 - position) as u32);
        let small = self.size() / d;
        // Inserts digit `t` at `position` into an index of the smaller space.
        let widen = |i: usize, t: usize| (i / stride) * stride * d + t * stride + i % stride;
        let mut entries = vec![ZERO; small * small];
        for r in 0..small {
            for c in 0..small {
                entries[r * small + c] = (0..d).map(|t| self.get(widen(r, t), widen(c, t))).sum();
            }
        }
        Ok(Self { dim: d, qudits: self.qudits - 1, entries })
    }
}

/// Partial trace of `|reg><reg|` onto the qudits at `keep`, in the listed order.
pub fn reduced_density(reg: &QuditRegister, keep: &[usize]) -> Result<DensityMatrix> {
    reg.check_targets(keep)?;
    let d = reg.dim();
    let traced: Vec<usize> = (0..reg.num_qudits()).filter(|p| !keep.contains(p)).collect();
    let keep_strides: Vec<usize> = keep.iter().map(|&p| reg.stride(p)).collect();
    let traced_strides: Vec<usize> = traced.iter().map(|&p| reg.stride(p)).collect();

    let offsets = |strides: &[usize]| -> Vec<usize> {
        (0..d.pow(strides.len() as u32))
            .map(|mut i| {
                let mut off = 0;
                for s in strides.iter().rev() {
                    off += (i % d) * s;
                    i /= d;
                }
                off
            })
            .collect()
    };
    let kept_offsets = offsets(&keep_strides);
    let traced_offsets = offsets(&traced_strides);

    let size = kept_offsets.len();
    let amps = reg.amplitudes();
    let mut entries = vec![ZERO; size * size];
    let mut column = vec![ZERO; size];
    for &t in &traced_offsets {
        for (slot, &k) in column.iter_mut().zip(&kept_offsets) {
            *slot = amps[t + k];
        }
        for (r, a) in column.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (c, b) in column.iter().enumerate() {
                entries[r * size + c] += a * b.conj();
            }
        }
    }
    Ok(DensityMatrix { dim: d, qudits: keep.len(), entries })
}

/// True iff no off-diagonal entry exceeds `tol` in magnitude.
pub fn is_diagonal(rho: &DensityMatrix, tol: f64) -> bool {
    rho.max_off_diagonal() <= tol
}

/// `sum_k |alpha_k|^2 |k><k|`, the marginal each sharing party holds.
pub fn expected_marginal(secret: &SecretAmplitudes) -> DensityMatrix {
    expected_subset_marginal(secret, 1)
}

/// `sum_k |alpha_k|^2 |k...k><k...k|` over `parties` qudits.
pub fn expected_subset_marginal(secret: &SecretAmplitudes, parties: usize) -> DensityMatrix {
    let d = secret.dim();
    let size = d.pow(parties as u32);
    let mut diag = vec![0.0; size];
    // |k...k> sits at k * (1 + d + d^2 + ...).
    let repunit: usize = (0..parties).map(|i| d.pow(i as u32)).sum();
    for (k, a) in secret.alphas().iter().enumerate() {
        diag[k * repunit] = a.norm_sqr();
    }
    DensityMatrix::diagonal(d, parties, &diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn keep_all_is_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = QuditRegister::random(3, 2, &mut rng).unwrap();
        let rho = reduced_density(&r, &[0, 1]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::pure(&r)).unwrap() < tol::ALGEBRAIC);
    }

    #[test]
    fn product_state_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = QuditRegister::random(3, 1, &mut rng).unwrap();
        let b = QuditRegister::random(3, 1, &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        let rho = reduced_density(&ab, &[0]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::pure(&a)).unwrap() < tol::ALGEBRAIC);
        let rho = reduced_density(&ab, &[1]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::pure(&b)).unwrap() < tol::ALGEBRAIC);
    }

    #[test]
    fn keep_order_defines_factor_order() {
        let r = QuditRegister::basis(2, &[0, 1, 1]).unwrap();
        let rho = reduced_density(&r, &[2, 0]).unwrap();
        // |1>|0> -> index 2
        assert_eq!(rho.get(2, 2), c(1.0));
    }

    #[test]
    fn is_diagonal_examples() {
        let rho = DensityMatrix::diagonal(3, 1, &[0.2, 0.3, 0.5]);
        assert!(is_diagonal(&rho, 1e-12));
        let plus = QuditRegister::from_amplitudes(2, 1, vec![c(1.0), c(1.0)]).unwrap();
        let rho = DensityMatrix::pure(&plus);
        assert!(!is_diagonal(&rho, 1e-12));
        assert!((rho.max_off_diagonal() - 0.5).abs() < tol::ALGEBRAIC);
    }

    #[test]
    fn expected_marginal_examples() {
        let basis = SecretAmplitudes::basis(4, 0).unwrap();
        assert_eq!(expected_marginal(&basis), DensityMatrix::diagonal(4, 1, &[1.0, 0.0, 0.0, 0.0]));
        let uniform = SecretAmplitudes::uniform(5).unwrap();
        let rho = expected_marginal(&uniform);
        assert!(rho.max_deviation(&DensityMatrix::diagonal(5, 1, &[0.2; 5])).unwrap() < tol::ALGEBRAIC);
        let two = expected_subset_marginal(&SecretAmplitudes::basis(3, 2).unwrap(), 2);
        assert_eq!(two.get(8, 8), c(1.0));
    }

    #[test]
    fn trace_out_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = QuditRegister::random(2, 4, &mut rng).unwrap();
        let direct = reduced_density(&r, &[1, 3]).unwrap();
        let full = DensityMatrix::pure(&r);
        let a = full.trace_out(2).unwrap().trace_out(0).unwrap();
        let b = full.trace_out(0).unwrap().trace_out(1).unwrap();
        assert!(a.max_deviation(&direct).unwrap() < tol::ALGEBRAIC);
        assert!(b.max_deviation(&direct).unwrap() < tol::ALGEBRAIC);
        assert_eq!(
            DensityMatrix::pure(&QuditRegister::basis(2, &[0]).unwrap()).trace_out(0),
            Err(Error::EmptyRegister)
        );
    }

    #[test]
    fn trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 2..=4 {
            let r = QuditRegister::random(d, 3, &mut rng).unwrap();
            for keep in [vec![0], vec![2, 1], vec![0, 1, 2]] {
                let rho = reduced_density(&r, &keep).unwrap();
                assert!((rho.trace() - c(1.0)).norm() < tol::ALGEBRAIC);
                assert!(rho.hermiticity_deviation() < tol::ALGEBRAIC);
            }
        }
        let r = QuditRegister::basis(2, &[0, 0]).unwrap();
        assert_eq!(reduced_density(&r, &[]), Err(Error::NoTargets));
    }
}
