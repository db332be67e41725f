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

//! Dense statevectors over `n` qudits of dimension `d`.
//!
//! Amplitudes are stored in mixed-radix order with qudit position 0 as the
//! most significant digit, so the flat index of `|j_0 j_1 ... j_{n-1}>` is
//! `((j_0 * d + j_1) * d + ...) * d + j_{n-1}`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol;

/// Default upper bound on the number of amplitudes a register may hold.
pub const DEFAULT_CAP: usize = 1 << 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of amplitudes of an `n`-qudit register, checked against `cap`.
pub fn register_size(d: usize, n: usize, cap: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    u32::try_from(n)
        .ok()
        .and_then(|e| d.checked_pow(e))
        .filter(|&size| size <= cap)
        .ok_or(Error::CapExceeded { dim: d, qudits: n, cap })
}

/// Mixed-radix flat index of `digits`, digit 0 most significant.
pub fn index_of_digits(d: usize, digits: &[usize]) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    digits.iter().try_fold(0usize, |acc, &digit| {
        if digit >= d {
            return Err(Error::DigitOutOfRange { digit, dim: d });
        }
        Ok(acc * d + digit)
    })
}

/// Inverse of [`index_of_digits`] for an `n`-qudit register.
pub fn digits_of_index(d: usize, n: usize, flat: usize) -> Result<Vec<usize>> {
    let size = register_size(d, n, usize::MAX)?;
    if flat >= size {
        return Err(Error::IndexOutOfRange { index: flat, size });
    }
    let mut digits = vec![0; n];
    let mut rest = flat;
    for slot in digits.iter_mut().rev() {
        *slot = rest % d;
        rest /= d;
    }
    Ok(digits)
}

/// `exp(sign * i 2 pi exponent / d)` with the exponent reduced mod `d` first.
pub(crate) fn root_of_unity(d: usize, exponent: usize, conjugate: bool) -> Complex64 {
    let k = exponent % d;
    if k == 0 {
        return ONE;
    }
    let angle = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
    Complex64::from_polar(1.0, if conjugate { -angle } else { angle })
}

/// Pure state of `n` qudits, each of dimension `d`.
#[derive(Clone, PartialEq)]
pub struct QuditRegister {
    dim: usize,
    qudits: usize,
    amps: Vec<Complex64>,
}

impl fmt::Debug for QuditRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuditRegister")
            .field("d", &self.dim)
            .field("n", &self.qudits)
            .field("amps", &self.amps)
            .finish()
    }
}

impl QuditRegister {
    /// Product basis state `|digits>` under the default size cap.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        Self::basis_with_cap(d, digits, DEFAULT_CAP)
    }

    pub fn basis_with_cap(d: usize, digits: &[usize], cap: usize) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let size = register_size(d, digits.len(), cap)?;
        let index = index_of_digits(d, digits)?;
        let mut amps = vec![ZERO; size];
        amps[index] = ONE;
        Ok(Self { dim: d, qudits: digits.len(), amps })
    }

    /// Register built from raw amplitudes, normalized on the way in.
    pub fn from_amplitudes(d: usize, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_amplitudes_with_cap(d, n, amps, DEFAULT_CAP)
    }

    pub fn from_amplitudes_with_cap(d: usize, n: usize, amps: Vec<Complex64>, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let size = register_size(d, n, cap)?;
        if amps.len() != size {
            return Err(Error::AmplitudeLength { expected: size, found: amps.len() });
        }
        let mut reg = Self { dim: d, qudits: n, amps };
        reg.normalize()?;
        Ok(reg)
    }

    /// Haar-random pure state, drawn from i.i.d. complex Gaussians.
    pub fn random<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Self> {
        let size = register_size(d, n, DEFAULT_CAP)?;
        let amps = (0..size)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(d, n, amps)
    }

    /// Assembles a register from amplitudes already known to be normalized.
    /// `n == 0` is allowed here: it is the scalar left after measuring every qudit.
    pub(crate) fn from_parts(dim: usize, qudits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), dim.pow(qudits as u32));
        Self { dim, qudits, amps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qudits(&self) -> usize {
        self.qudits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Amplitude of the product basis state `|digits>`.
    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        if digits.len() != self.qudits {
            return Err(Error::OutcomeLength { expected: self.qudits, found: digits.len() });
        }
        Ok(self.amps[index_of_digits(self.dim, digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let scale = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }

    /// Distance between neighbouring digits of `position` in the flat index.
    pub fn stride(&self, position: usize) -> usize {
        self.dim.pow((self.qudits - 1 - position) as u32)
    }

    pub fn check_position(&self, position: usize) -> Result<()> {
        if position >= self.qudits {
            return Err(Error::PositionOutOfRange { position, qudits: self.qudits });
        }
        Ok(())
    }

    /// Validates a nonempty list of distinct, in-range positions.
    pub fn check_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.is_empty() {
            return Err(Error::NoTargets);
        }
        for (i, &t) in targets.iter().enumerate() {
            self.check_position(t)?;
            if targets[..i].contains(&t) {
                return Err(Error::RepeatedTarget(t));
            }
        }
        Ok(())
    }

    pub fn check_digit(&self, digit: usize) -> Result<()> {
        if digit >= self.dim {
            return Err(Error::DigitOutOfRange { digit, dim: self.dim });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.qudits != other.qudits {
            return Err(Error::ShapeMismatch(self.dim, self.qudits, other.dim, other.qudits));
        }
        Ok(())
    }

    /// Copy of `self` multiplied by the global phase `exp(i theta)`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self { amps: self.amps.iter().map(|a| a * phase).collect(), ..self.clone() }
    }

    /// Tensor product `self ⊗ other`; `other` occupies the trailing positions.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(self.dim, self.qudits, other.dim, other.qudits));
        }
        let qudits = self.qudits + other.qudits;
        register_size(self.dim, qudits, DEFAULT_CAP)?;
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Ok(Self { dim: self.dim, qudits, amps })
    }

    /// Largest entrywise deviation `|self_i - other_i|`.
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest entrywise deviation after rotating `other` so that its global
    /// phase matches `self` at the first amplitude of `self` that is not negligible.
    pub fn max_deviation_up_to_phase(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let pivot = self.amps.iter().position(|a| a.norm() > tol::ALGEBRAIC);
        let phase = match pivot {
            Some(i) if other.amps[i].norm() > 0.0 => {
                let ratio = self.amps[i] / other.amps[i];
                ratio / ratio.norm()
            }
            _ => ONE,
        };
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b * phase).norm()).fold(0.0, f64::max))
    }
}

/// `<a|b>`, conjugating `a`.
pub fn inner_product(a: &QuditRegister, b: &QuditRegister) -> Result<Complex64> {
    a.check_same_shape(b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|<a|b>|^2`, clamped into `[0, 1]`.
pub fn fidelity(a: &QuditRegister, b: &QuditRegister) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Dense square complex matrix acting on one or more qudits, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::NotSquare(entries.len()));
        }
        Ok(Self { dim, entries })
    }

    /// Builds the matrix entry by entry from `f(row, col)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let entries = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        Ok(Self::from_fn(self.dim, |r, c| (0..self.dim).map(|k| self.get(r, k) * rhs.get(k, c)).sum()))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        Self::from_fn(dim, |r, c| self.get(r / rhs.dim, c / rhs.dim) * rhs.get(r % rhs.dim, c % rhs.dim))
    }

    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `max |U†U - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.adjoint().matmul(self).expect("same dimension");
        product.max_deviation(&Self::identity(self.dim)).expect("same dimension")
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }
}

/// Applies `op ⊗ I` to `reg`, where the tensor factors of `op` are the qudits
/// at `targets` in the listed order (first target most significant).
pub fn apply_local(reg: &QuditRegister, op: &Operator, targets: &[usize]) -> Result<QuditRegister> {
    reg.check_targets(targets)?;
    let local = reg.dim.pow(targets.len() as u32);
    if op.dim != local {
        return Err(Error::DimensionMismatch { expected: local, found: op.dim });
    }

    // Offset of each local basis state relative to the all-zero target digits.
    let strides: Vec<usize> = targets.iter().map(|&t| reg.stride(t)).collect();
    let offsets: Vec<usize> = (0..local)
        .map(|mut li| {
            let mut off = 0;
            for s in strides.iter().rev() {
                off += (li % reg.dim) * s;
                li /= reg.dim;
            }
            off
        })
        .collect();

    let mut out = vec![ZERO; reg.amps.len()];
    let mut gathered = vec![ZERO; local];
    for base in 0..reg.amps.len() {
        if strides.iter().any(|&s| (base / s) % reg.dim != 0) {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = reg.amps[base + off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let coeffs = &op.entries[row * local..(row + 1) * local];
            out[base + off] = coeffs.iter().zip(&gathered).map(|(c, g)| c * g).sum();
        }
    }
    Ok(QuditRegister { amps: out, ..reg.clone() })
}

/// Normalized coefficients `alpha_0 ... alpha_{d-1}` of the secret qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct SecretAmplitudes {
    alphas: Vec<Complex64>,
}

impl SecretAmplitudes {
    /// Normalizes `alphas`; the dimension is the list length.
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidDimension(alphas.len()));
        }
        let norm = alphas.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { alphas: alphas.into_iter().map(|a| a / norm).collect() })
    }

    /// The basis secret `|j>`.
    pub fn basis(d: usize, j: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if j >= d {
            return Err(Error::DigitOutOfRange { digit: j, dim: d });
        }
        let mut alphas = vec![ZERO; d];
        alphas[j] = ONE;
        Ok(Self { alphas })
    }

    /// Equal-weight secret `(1/sqrt d) sum_j |j>`.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![ONE; d])
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Self::new(
            (0..d).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// The secret as a one-qudit register.
    pub fn to_register(&self) -> QuditRegister {
        QuditRegister { dim: self.dim(), qudits: 1, amps: self.alphas.clone() }
    }
}
