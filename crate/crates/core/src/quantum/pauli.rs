//! Symbolic weighted Pauli strings.
//!
//! Every Hamiltonian in this crate is a real-weighted sum of Pauli strings,
//! which keeps its matrix Hermitian by construction. Sites are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// `coeff · ⊗_site factors[site]`, identity on unlisted sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub factors: BTreeMap<usize, Pauli>,
}

impl PauliTerm {
    pub fn new(coeff: f64, factors: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        Self {
            coeff,
            factors: factors.into_iter().collect(),
        }
    }

    pub fn x(site: usize, coeff: f64) -> Self {
        Self::new(coeff, [(site, Pauli::X)])
    }

    pub fn z(site: usize, coeff: f64) -> Self {
        Self::new(coeff, [(site, Pauli::Z)])
    }

    pub fn zz(a: usize, b: usize, coeff: f64) -> Self {
        Self::new(coeff, [(a, Pauli::Z), (b, Pauli::Z)])
    }

    pub fn xx(a: usize, b: usize, coeff: f64) -> Self {
        Self::new(coeff, [(a, Pauli::X), (b, Pauli::X)])
    }

    pub fn yy(a: usize, b: usize, coeff: f64) -> Self {
        Self::new(coeff, [(a, Pauli::Y), (b, Pauli::Y)])
    }

    /// True when the string contains only `Z` factors.
    pub fn is_diagonal(&self) -> bool {
        self.factors.values().all(|p| *p == Pauli::Z)
    }

    /// Bit mask of sites flipped by the string (X and Y factors).
    fn flip_mask(&self, n_spins: usize) -> usize {
        self.factors
            .iter()
            .filter(|(_, p)| **p != Pauli::Z)
            .fold(0, |m, (site, _)| m | (1 << (n_spins - site)))
    }

    /// `⟨j ⊕ flip_mask| P |j⟩` without the coefficient.
    fn phase_on(&self, n_spins: usize, column: usize) -> Complex64 {
        let mut phase = Complex64::new(1.0, 0.0);
        for (&site, &p) in &self.factors {
            let bit = column & (1 << (n_spins - site)) != 0;
            phase *= match (p, bit) {
                (Pauli::X, _) => Complex64::new(1.0, 0.0),
                (Pauli::Y, false) => Complex64::new(0.0, 1.0),
                (Pauli::Y, true) => Complex64::new(0.0, -1.0),
                (Pauli::Z, false) => Complex64::new(1.0, 0.0),
                (Pauli::Z, true) => Complex64::new(-1.0, 0.0),
            };
        }
        phase
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coeff)?;
        if self.factors.is_empty() {
            return f.write_str("·I");
        }
        for (site, p) in &self.factors {
            write!(f, "·{p}{site}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n_spins: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_spins: usize) -> Self {
        Self {
            n_spins,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(n_spins: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = Self::new(n_spins);
        for t in terms {
            sum.push(t)?;
        }
        Ok(sum)
    }

    /// Appends a term, rejecting site indices outside `[1, n_spins]`.
    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if let Some((&site, _)) = term
            .factors
            .iter()
            .find(|(&s, _)| s == 0 || s > self.n_spins)
        {
            return Err(Error::SiteOutOfRange {
                site,
                n_spins: self.n_spins,
            });
        }
        if !term.coeff.is_finite() {
            return Err(Error::invalid("coeff", format!("{term} has a non-finite weight")));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Terms with a zero coefficient removed.
    pub fn pruned(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            terms: self.terms.iter().filter(|t| t.coeff != 0.0).cloned().collect(),
        }
    }

    /// The `Z`-only part of the sum.
    pub fn diagonal_part(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            terms: self.terms.iter().filter(|t| t.is_diagonal()).cloned().collect(),
        }
    }

    /// Diagonal matrix element `⟨index|H|index⟩` from the `Z`-only terms.
    pub fn diagonal_energy(&self, index: usize) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.is_diagonal())
            .map(|t| t.coeff * t.phase_on(self.n_spins, index).re)
            .sum()
    }

    /// Sparse matrix `Σ coeff · (⊗ Pauli factors)`.
    pub fn realize(&self) -> Result<Operator> {
        realize(self)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Builds the sparse matrix of a Pauli sum.
///
/// Terms are grouped by the set of sites they flip; each group contributes
/// exactly one entry per row, at column `row ⊕ mask`.
pub fn realize(p: &PauliSum) -> Result<Operator> {
    let n = p.n_spins;
    if n == 0 || n >= usize::BITS as usize - 1 {
        return Err(Error::invalid("n_spins", format!("{n} is not a usable chain length")));
    }
    for t in &p.terms {
        if let Some(&site) = t.factors.keys().find(|&&s| s == 0 || s > n) {
            return Err(Error::SiteOutOfRange { site, n_spins: n });
        }
    }
    let mut groups: BTreeMap<usize, Vec<&PauliTerm>> = BTreeMap::new();
    for t in p.terms.iter().filter(|t| t.coeff != 0.0) {
        groups.entry(t.flip_mask(n)).or_default().push(t);
    }
    let dim = 1usize << n;
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut row_entries: Vec<(usize, Complex64)> = Vec::with_capacity(groups.len());
    row_ptr.push(0);
    for row in 0..dim {
        row_entries.clear();
        for (&mask, terms) in &groups {
            let col = row ^ mask;
            let v: Complex64 = terms
                .iter()
                .map(|t| t.coeff * t.phase_on(n, col))
                .sum();
            if v != Complex64::new(0.0, 0.0) {
                row_entries.push((col, v));
            }
        }
        row_entries.sort_unstable_by_key(|(c, _)| *c);
        for &(c, v) in &row_entries {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(Operator::from_csr(n, row_ptr, cols, vals))
}
