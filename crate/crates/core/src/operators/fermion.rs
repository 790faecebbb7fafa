//! Second-quantized fermionic operators and the Jordan-Wigner mapping.
//!
//! Spin orbitals are indexed interleaved: mode 2p is the alpha spin orbital
//! of spatial orbital p, mode 2p+1 the beta one. Under Jordan-Wigner the
//! qubit basis state |1> marks an occupied spin orbital.

use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

use super::pauli::{Pauli, PauliString, QubitOperator};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FermionError {
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
}

/// One creation (`dagger = true`) or annihilation operator on a spin orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }
    pub fn annihilate(mode: usize) -> Self {
        Ladder {
            mode,
            dagger: false,
        }
    }
}

/// Sum of ladder-operator products with complex weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        FermionOperator::default()
    }

    pub fn constant(value: f64) -> Self {
        FermionOperator {
            terms: vec![(Complex64::new(value, 0.0), Vec::new())],
        }
    }

    pub fn term(coeff: Complex64, product: Vec<Ladder>) -> Self {
        FermionOperator {
            terms: vec![(coeff, product)],
        }
    }

    /// `coeff * a^dag_p a_q`.
    pub fn hopping(coeff: f64, p: usize, q: usize) -> Self {
        FermionOperator::term(
            Complex64::new(coeff, 0.0),
            vec![Ladder::create(p), Ladder::annihilate(q)],
        )
    }

    pub fn add_term(&mut self, coeff: Complex64, product: Vec<Ladder>) {
        self.terms.push((coeff, product));
    }

    pub fn extend(&mut self, other: &FermionOperator) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Ladder>)] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, factor: Complex64) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (c * factor, p.clone()))
                .collect(),
        }
    }

    /// Hermitian conjugate: reverse each product, flip daggers, conjugate.
    pub fn adjoint(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| {
                    let rev = p
                        .iter()
                        .rev()
                        .map(|l| Ladder {
                            mode: l.mode,
                            dagger: !l.dagger,
                        })
                        .collect();
                    (c.conj(), rev)
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        out.terms
            .extend(other.scale(Complex64::new(-1.0, 0.0)).terms);
        out
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, p)| p.iter().map(|l| l.mode))
            .max()
    }

    /// Normal-ordered canonical form: creations left of annihilations, mode
    /// indices ascending within each block, contractions expanded via the
    /// anticommutation relations. Terms with repeated creations (or
    /// annihilations) on one mode vanish.
    pub fn normal_ordered(&self, tol: f64) -> FermionOperator {
        let mut canonical: BTreeMap<Vec<Ladder>, Complex64> = BTreeMap::new();
        for (coeff, product) in &self.terms {
            normal_order_product(*coeff, product.clone(), &mut canonical);
        }
        FermionOperator {
            terms: canonical
                .into_iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(p, c)| (c, p))
                .collect(),
        }
    }

    /// Zero operator test via normal ordering.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.normal_ordered(tol).terms.is_empty()
    }
}

/// Recursively rewrites `product` into normal order, accumulating results.
fn normal_order_product(
    coeff: Complex64,
    product: Vec<Ladder>,
    out: &mut BTreeMap<Vec<Ladder>, Complex64>,
) {
    for i in 0..product.len().saturating_sub(1) {
        let (a, b) = (product[i], product[i + 1]);
        match (a.dagger, b.dagger) {
            (false, true) => {
                // a_p a^dag_q = delta_pq - a^dag_q a_p
                if a.mode == b.mode {
                    let mut contracted = product.clone();
                    contracted.remove(i + 1);
                    contracted.remove(i);
                    normal_order_product(coeff, contracted, out);
                }
                let mut swapped = product;
                swapped.swap(i, i + 1);
                normal_order_product(-coeff, swapped, out);
                return;
            }
            (true, true) | (false, false) => {
                if a.mode == b.mode {
                    return; // nilpotent
                }
                if a.mode > b.mode {
                    let mut swapped = product;
                    swapped.swap(i, i + 1);
                    normal_order_product(-coeff, swapped, out);
                    return;
                }
            }
            (true, false) => {}
        }
    }
    let entry = out
        .entry(product)
        .or_insert(Complex64::new(0.0, 0.0));
    *entry += coeff;
}

/// Total particle-number operator over `n_modes` spin orbitals.
pub fn number_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for m in 0..n_modes {
        op.add_term(
            Complex64::new(1.0, 0.0),
            vec![Ladder::create(m), Ladder::annihilate(m)],
        );
    }
    op
}

/// S_z operator with interleaved spin ordering: (n_alpha - n_beta) / 2.
pub fn sz_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for m in 0..n_modes {
        let w = if m % 2 == 0 { 0.5 } else { -0.5 };
        op.add_term(
            Complex64::new(w, 0.0),
            vec![Ladder::create(m), Ladder::annihilate(m)],
        );
    }
    op
}

/// Jordan-Wigner transform. Mode p maps to
/// `a_p -> Z_0 .. Z_{p-1} (X_p + i Y_p)/2` under the |1> = occupied
/// convention.
pub fn jordan_wigner(
    op: &FermionOperator,
    n_modes: usize,
) -> Result<QubitOperator, FermionError> {
    let mut out = QubitOperator::zero();
    for (coeff, product) in op.terms() {
        let mut mapped = QubitOperator::constant(n_modes, Complex64::new(1.0, 0.0));
        for ladder in product {
            if ladder.mode >= n_modes {
                return Err(FermionError::ModeOutOfRange {
                    index: ladder.mode,
                    n_modes,
                });
            }
            let factor = jw_ladder(ladder, n_modes);
            mapped = mapped
                .multiply(&factor)
                .expect("qubit counts agree by construction");
        }
        for (s, c) in mapped.terms() {
            out.add_term(s.clone(), c * coeff);
        }
    }
    Ok(out.simplify(0.0))
}

fn jw_ladder(ladder: &Ladder, n_modes: usize) -> QubitOperator {
    let p = ladder.mode;
    let mut x_letters = vec![Pauli::I; n_modes];
    let mut y_letters = vec![Pauli::I; n_modes];
    for q in 0..p {
        x_letters[q] = Pauli::Z;
        y_letters[q] = Pauli::Z;
    }
    x_letters[p] = Pauli::X;
    y_letters[p] = Pauli::Y;
    // a = (X + iY)/2, a^dag = (X - iY)/2 with the Z chain in front.
    let y_sign = if ladder.dagger { -0.5 } else { 0.5 };
    QubitOperator::from_terms([
        (PauliString::new(x_letters), Complex64::new(0.5, 0.0)),
        (PauliString::new(y_letters), Complex64::new(0.0, y_sign)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn number_operator_maps_to_half_one_minus_z() {
        let op = FermionOperator::hopping(1.0, 1, 1);
        let q = jordan_wigner(&op, 2).unwrap();
        let id = PauliString::identity(2);
        let z1 = PauliString::with_letters(2, &[(1, Pauli::Z)]).unwrap();
        assert_eq!(q.n_terms(), 2);
        assert_abs_diff_eq!(q.coefficient(&id).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.coefficient(&z1).re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn hermitian_hopping_maps_to_xx_plus_yy() {
        let mut op = FermionOperator::hopping(1.0, 0, 1);
        op.extend(&FermionOperator::hopping(1.0, 1, 0));
        let q = jordan_wigner(&op, 2).unwrap();
        let xx = PauliString::new(vec![Pauli::X, Pauli::X]);
        let yy = PauliString::new(vec![Pauli::Y, Pauli::Y]);
        assert_eq!(q.n_terms(), 2);
        assert_abs_diff_eq!(q.coefficient(&xx).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.coefficient(&yy).re, 0.5, epsilon = 1e-15);
        assert!(q.is_hermitian(1e-12));
    }

    #[test]
    fn mode_out_of_range_is_an_error() {
        let op = FermionOperator::hopping(1.0, 3, 0);
        assert_eq!(
            jordan_wigner(&op, 2).unwrap_err(),
            FermionError::ModeOutOfRange {
                index: 3,
                n_modes: 2
            }
        );
    }

    #[test]
    fn normal_ordering_contracts() {
        // a_0 a^dag_0 = 1 - a^dag_0 a_0
        let op = FermionOperator::term(
            Complex64::new(1.0, 0.0),
            vec![Ladder::annihilate(0), Ladder::create(0)],
        );
        let no = op.normal_ordered(1e-12);
        assert_eq!(no.n_terms(), 2);
        let constant: Complex64 = no
            .terms()
            .iter()
            .filter(|(_, p)| p.is_empty())
            .map(|(c, _)| *c)
            .sum();
        assert_abs_diff_eq!(constant.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn anticommutator_of_distinct_modes_vanishes() {
        // {a_0, a^dag_1} = 0
        let ab = FermionOperator::term(
            Complex64::new(1.0, 0.0),
            vec![Ladder::annihilate(0), Ladder::create(1)],
        );
        let ba = FermionOperator::term(
            Complex64::new(1.0, 0.0),
            vec![Ladder::create(1), Ladder::annihilate(0)],
        );
        let mut sum = ab;
        sum.extend(&ba);
        assert!(sum.is_zero(1e-12));
    }
}
