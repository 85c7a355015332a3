//! Sparse complex operators in compressed-row form.

use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    n_spins: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Operator {
    pub(crate) fn from_csr(
        n_spins: usize,
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), (1 << n_spins) + 1);
        debug_assert_eq!(cols.len(), vals.len());
        Self {
            n_spins,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates add up.
    pub fn from_triplets(
        n_spins: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let dim = 1usize << n_spins;
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.max(c) + 1,
                });
            }
            rows[r].push((c, v));
        }
        Ok(Self::from_rows(n_spins, rows))
    }

    fn from_rows(n_spins: usize, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|(c, _)| *c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = Complex64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self::from_csr(n_spins, row_ptr, cols, vals)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// True when every stored entry has a zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// `y ← A x`.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        self.check_dim(state.dim())?;
        let amps = state.amplitudes();
        let y = self.apply(amps);
        Ok(amps.iter().zip(&y).map(|(a, b)| a.conj() * b).sum())
    }

    /// `A†`.
    pub fn adjoint(&self) -> Operator {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim()];
        for (r, c, v) in self.entries() {
            rows[c].push((r, v.conj()));
        }
        Self::from_rows(self.n_spins, rows)
    }

    /// `A + s·B`.
    pub fn add_scaled(&self, other: &Operator, s: Complex64) -> Result<Operator> {
        self.check_dim(other.dim())?;
        let mut rows: Vec<Vec<(usize, Complex64)>> = (0..self.dim())
            .map(|r| self.row(r).collect())
            .collect();
        for (r, c, v) in other.entries() {
            rows[r].push((c, s * v));
        }
        Ok(Self::from_rows(self.n_spins, rows))
    }

    /// Sparse product `A·B`.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim())?;
        let rows = (0..self.dim())
            .map(|r| {
                let mut acc = Vec::new();
                for (k, a) in self.row(r) {
                    acc.extend(other.row(k).map(|(c, b)| (c, a * b)));
                }
                acc
            })
            .collect();
        Ok(Self::from_rows(self.n_spins, rows))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add_scaled(&ba, Complex64::new(-1.0, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Upper bound on the spectral radius (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense row-major copy. Intended for small operators and tests.
    pub fn to_dense_rows(&self) -> Vec<Vec<Complex64>> {
        let dim = self.dim();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (r, c, v) in self.entries() {
            m[r][c] = v;
        }
        m
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli::{PauliSum, PauliTerm};

    #[test]
    fn commutator_of_x_and_z() {
        let x = PauliSum::from_terms(1, [PauliTerm::x(1, 1.0)]).unwrap().realize().unwrap();
        let z = PauliSum::from_terms(1, [PauliTerm::z(1, 1.0)]).unwrap().realize().unwrap();
        // [X, Z] = −2iY, whose entries have modulus 2.
        let c = x.commutator(&z).unwrap();
        assert_eq!(c.max_norm(), 2.0);
        assert_eq!(c.get(0, 1), Complex64::new(-2.0, 0.0));
        assert_eq!(z.commutator(&z).unwrap().nnz(), 0);
    }

    #[test]
    fn triplets_accumulate_and_hermiticity() {
        let i = Complex64::new(0.0, 1.0);
        let a = Operator::from_triplets(1, [(0, 1, i), (1, 0, -i), (0, 0, Complex64::new(1.0, 0.0))])
            .unwrap();
        assert_eq!(a.hermiticity_defect(), 0.0);
        let b = Operator::from_triplets(1, [(0, 1, i), (0, 1, i)]).unwrap();
        assert_eq!(b.get(0, 1), 2.0 * i);
        assert_eq!(b.hermiticity_defect(), 2.0);
        assert!(Operator::from_triplets(1, [(2, 0, i)]).is_err());
        assert_eq!(b.adjoint().get(1, 0), -2.0 * i);
    }

    #[test]
    fn apply_and_expectation() {
        let h = PauliSum::from_terms(2, [PauliTerm::x(2, 1.0), PauliTerm::z(1, 0.5)])
            .unwrap()
            .realize()
            .unwrap();
        let psi = StateVector::basis(2, 0).unwrap();
        let y = h.apply(psi.amplitudes());
        assert_eq!(y[1], Complex64::new(1.0, 0.0));
        assert_eq!(y[0], Complex64::new(0.5, 0.0));
        assert_eq!(h.expectation(&psi).unwrap(), Complex64::new(0.5, 0.0));
        assert!(h.expectation(&StateVector::basis(1, 0).unwrap()).is_err());
        assert_eq!(h.norm_bound(), 1.5);
    }
}
