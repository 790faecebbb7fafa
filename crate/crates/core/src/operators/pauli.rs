//! Pauli strings and weighted sums of them (qubit operators).

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("qubit index {index} out of range for {qubit_count} qubits")]
    QubitOutOfRange { index: usize, qubit_count: usize },
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product of two letters as (power of i, letter).
    pub fn multiply(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) => (0, p),
            (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Pauli letters, one per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(qubit_count: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; qubit_count],
        }
    }

    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    /// Identity string with `letter` placed on the given qubits.
    pub fn with_letters(
        qubit_count: usize,
        placed: &[(usize, Pauli)],
    ) -> Result<Self, OperatorError> {
        let mut letters = vec![Pauli::I; qubit_count];
        for &(q, p) in placed {
            if q >= qubit_count {
                return Err(OperatorError::QubitOutOfRange {
                    index: q,
                    qubit_count,
                });
            }
            letters[q] = p;
        }
        Ok(PauliString { letters })
    }

    pub fn qubit_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Product with phase: `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, Complex64), OperatorError> {
        if self.qubit_count() != other.qubit_count() {
            return Err(OperatorError::QubitMismatch(
                self.qubit_count(),
                other.qubit_count(),
            ));
        }
        let mut i_power: u8 = 0;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.multiply(b);
                i_power = (i_power + k) % 4;
                p
            })
            .collect();
        let phase = match i_power {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok((PauliString { letters }, phase))
    }

    /// True iff the letters agree or at least one is identity on every qubit.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> Result<bool, OperatorError> {
        if self.qubit_count() != other.qubit_count() {
            return Err(OperatorError::QubitMismatch(
                self.qubit_count(),
                other.qubit_count(),
            ));
        }
        Ok(self
            .letters
            .iter()
            .zip(&other.letters)
            .all(|(&a, &b)| a.commutes_with(b)))
    }

    /// Global commutation: strings commute iff they anticommute on an even
    /// number of qubits.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, OperatorError> {
        if self.qubit_count() != other.qubit_count() {
            return Err(OperatorError::QubitMismatch(
                self.qubit_count(),
                other.qubit_count(),
            ));
        }
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| !a.commutes_with(b))
            .count();
        Ok(anti % 2 == 0)
    }
}

impl fmt::Display for PauliString {
    /// Renders as `[X0 Z1 Y3]`, identity qubits omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut first = true;
        for (q, &p) in self.letters.iter().enumerate() {
            if p != Pauli::I {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}{}", p.as_char(), q)?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// Weighted sum of Pauli strings. Terms are kept in canonical (lexicographic)
/// order; zero-coefficient terms are dropped by `simplify`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QubitOperator {
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub const DEFAULT_TOL: f64 = 1e-12;

    pub fn zero() -> Self {
        QubitOperator::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Self {
        let mut op = QubitOperator::zero();
        for (s, c) in terms {
            op.add_term(s, c);
        }
        op
    }

    pub fn constant(qubit_count: usize, value: Complex64) -> Self {
        QubitOperator::from_terms([(PauliString::identity(qubit_count), value)])
    }

    pub fn add_term(&mut self, string: PauliString, coeff: Complex64) {
        let entry = self
            .terms
            .entry(string)
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, string: &PauliString) -> Complex64 {
        self.terms
            .get(string)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn qubit_count(&self) -> Option<usize> {
        self.terms.keys().next().map(|s| s.qubit_count())
    }

    /// Merge duplicates and drop terms with |coefficient| <= tol.
    pub fn simplify(&self, tol: f64) -> QubitOperator {
        assert!(tol >= 0.0, "tolerance must be non-negative");
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(s, c)| (s.clone(), *c))
            .collect();
        QubitOperator { terms }
    }

    /// Hermitian iff every coefficient is real (Pauli strings are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    pub fn max_imag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> QubitOperator {
        QubitOperator {
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (s.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &QubitOperator) -> QubitOperator {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), *c);
        }
        out
    }

    pub fn multiply(&self, other: &QubitOperator) -> Result<QubitOperator, OperatorError> {
        let mut out = QubitOperator::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (p, phase) = a.multiply(b)?;
                out.add_term(p, ca * cb * phase);
            }
        }
        Ok(out)
    }

    /// [self, other] = self*other - other*self.
    pub fn commutator(&self, other: &QubitOperator) -> Result<QubitOperator, OperatorError> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        Ok(ab.add(&ba.scale(Complex64::new(-1.0, 0.0))))
    }
}

impl fmt::Display for QubitOperator {
    /// Canonical rendering, one term per line: `(-0.5+0j) [X0 Z1 Y3]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                writeln!(f)?;
            }
            write!(f, "({}{:+}j) {}", c.re, c.im, s)?;
            first = false;
        }
        Ok(())
    }
}
