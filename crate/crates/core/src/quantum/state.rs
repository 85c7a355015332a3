//! Pure states of an `n`-spin chain.
//!
//! Basis index convention: spin 1 (the left end of the chain, Alice's side) is
//! the most significant bit, and a set bit means the spin is in `|1⟩`. With
//! this ordering `|100⟩` is index 4, so kets print left to right in chain
//! order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization slack accepted by [`StateVector::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Mask selecting `site` (1-based) in a basis index of an `n_spins` chain.
#[inline]
pub fn site_mask(n_spins: usize, site: usize) -> usize {
    1 << (n_spins - site)
}

/// Value of `site` (1-based) in basis state `index`.
#[inline]
pub fn site_bit(index: usize, n_spins: usize, site: usize) -> bool {
    index & site_mask(n_spins, site) != 0
}

/// Basis index of a bitstring given in chain order.
pub fn index_of_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Bitstring (chain order) of basis state `index`.
pub fn bits_of_index(index: usize, n_spins: usize) -> Vec<bool> {
    (1..=n_spins).map(|s| site_bit(index, n_spins, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_spins: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from explicit amplitudes, which must already be normalized.
    pub fn new(n_spins: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked(n_spins, amplitudes)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(n_spins: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::unchecked(n_spins, amplitudes)
    }

    /// Wraps amplitudes without checking the norm. Used for propagated states,
    /// whose norm is controlled by the propagator tolerance instead.
    pub(crate) fn unchecked(n_spins: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_spins == 0 || n_spins >= usize::BITS as usize {
            return Err(Error::invalid("n_spins", format!("{n_spins} is not a usable chain length")));
        }
        let dim = 1usize << n_spins;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_spins: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_spins;
        if index >= dim {
            return Err(Error::invalid("index", format!("{index} exceeds dimension {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::unchecked(n_spins, amps)
    }

    /// Basis state from a chain-ordered bitstring.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::basis(bits.len(), index_of_bits(bits))
    }

    /// Superposition `Σ c_k |index_k⟩`, normalized.
    pub fn superposition(
        n_spins: usize,
        terms: impl IntoIterator<Item = (usize, Complex64)>,
    ) -> Result<Self> {
        let dim = 1usize << n_spins;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (index, c) in terms {
            if index >= dim {
                return Err(Error::invalid("index", format!("{index} exceeds dimension {dim}")));
            }
            amps[index] += c;
        }
        Self::normalized(n_spins, amps)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies each amplitude by `e^{i·phase(index)}`.
    pub fn apply_diagonal_phase(&self, phase: impl Fn(usize) -> f64) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a * Complex64::from_polar(1.0, phase(i)))
            .collect();
        StateVector {
            n_spins: self.n_spins,
            amplitudes,
        }
    }

    /// Total probability of the basis states selected by `pred`.
    pub fn population(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub(crate) fn check_same_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_spins {
            return Err(Error::SiteOutOfRange {
                site,
                n_spins: self.n_spins,
            });
        }
        Ok(())
    }
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]` against rounding.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// `⟨ψ|σᶻ_site|ψ⟩` with `σᶻ|0⟩ = +|0⟩` and `σᶻ|1⟩ = −|1⟩`.
pub fn sigma_z_expectation(state: &StateVector, site: usize) -> Result<f64> {
    state.check_site(site)?;
    let mask = site_mask(state.n_spins, site);
    let value = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = a.norm_sqr();
            if i & mask == 0 {
                p
            } else {
                -p
            }
        })
        .sum::<f64>();
    Ok(value.clamp(-1.0, 1.0))
}

/// `⟨σᶻ⟩` for every site in one pass over the amplitudes.
pub fn sigma_z_profile(state: &StateVector) -> Vec<f64> {
    let n = state.n_spins;
    let mut out = vec![0.0; n];
    for (i, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        for (k, slot) in out.iter_mut().enumerate() {
            if site_bit(i, n, k + 1) {
                *slot -= p;
            } else {
                *slot += p;
            }
        }
    }
    out.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_ordering_is_msb_first() {
        let s = StateVector::from_bits(&[true, false, false]).unwrap();
        assert_eq!(s.amplitude(4), c(1.0, 0.0));
        assert_eq!(bits_of_index(4, 3), vec![true, false, false]);
        assert_eq!(index_of_bits(&[false, true, true]), 3);
    }

    #[test]
    fn rejects_unnormalized_and_wrong_length() {
        assert!(matches!(
            StateVector::new(1, vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            StateVector::new(2, vec![c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(StateVector::normalized(1, vec![c(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let plus = StateVector::superposition(1, [(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(fidelity(&plus, &plus).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert_abs_diff_eq!(fidelity(&zero, &plus).unwrap(), 0.5, epsilon = 1e-15);
        let phased = plus.apply_diagonal_phase(|_| 0.7);
        assert_abs_diff_eq!(fidelity(&phased, &plus).unwrap(), 1.0, epsilon = 1e-15);
        let two = StateVector::basis(2, 0).unwrap();
        assert!(fidelity(&zero, &two).is_err());
    }

    #[test]
    fn sigma_z_examples() {
        let s = StateVector::from_bits(&[true, false, false, false, false]).unwrap();
        assert_eq!(sigma_z_expectation(&s, 1).unwrap(), -1.0);
        assert_eq!(sigma_z_expectation(&s, 2).unwrap(), 1.0);
        let plus = StateVector::superposition(1, [(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(sigma_z_expectation(&plus, 1).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            sigma_z_expectation(&s, 6),
            Err(Error::SiteOutOfRange { site: 6, .. })
        ));
        assert!(sigma_z_expectation(&s, 0).is_err());
        assert_eq!(sigma_z_profile(&s), vec![-1.0, 1.0, 1.0, 1.0, 1.0]);
    }
}
