//! Exact statevector engine: Fock states, Pauli exponentials, expectation
//! values, shot sampling and trajectory noise.
//!
//! Basis convention: bit q of an amplitude index is the occupation of qubit
//! q, so the bitstring "1100" (qubits 0 and 1 set) is amplitude index 3.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::eigen::lanczos_lowest;
use crate::measurement::ShotTable;
use crate::operators::{Pauli, PauliString, QubitOperator};
use crate::seeding::{stream_rng, Purpose};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("qubit count mismatch: state has {state}, operator has {operator}")]
    QubitMismatch { state: usize, operator: usize },
    #[error("occupation string length {found} does not match qubit count {expected}")]
    BadOccupationLength { found: usize, expected: usize },
    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("{qubits} qubits exceed the exact-diagonalization cap of {cap}")]
    DimensionCap { qubits: usize, cap: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("empty operator has no ground state")]
    EmptyOperator,
}

/// Stochastic noise knobs for emulator-style runs. The defaults are
/// qualitative placeholders, not calibrated against any hardware.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub depolarizing_prob_per_exponential: f64,
    pub measurement_flip_prob: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            depolarizing_prob_per_exponential: 1e-3,
            measurement_flip_prob: 2e-3,
            seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), EngineError> {
        for p in [
            self.depolarizing_prob_per_exponential,
            self.measurement_flip_prob,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(EngineError::BadProbability(p));
            }
        }
        Ok(())
    }
}

/// Precomputed action of a Pauli string on basis indices:
/// `P |i> = phase(i) |i ^ flip>`.
#[derive(Debug, Clone, Copy)]
pub struct PauliMasks {
    pub flip: u64,
    sign: u64,
    y_phase: Complex64,
}

impl PauliMasks {
    pub fn new(string: &PauliString) -> Self {
        let mut flip = 0u64;
        let mut sign = 0u64;
        let mut y_count = 0u32;
        for (q, &p) in string.letters().iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    y_count += 1;
                }
                Pauli::Z => sign |= 1 << q,
            }
        }
        let y_phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliMasks {
            flip,
            sign,
            y_phase,
        }
    }

    #[inline]
    pub fn phase(&self, index: u64) -> Complex64 {
        if (index & self.sign).count_ones() % 2 == 0 {
            self.y_phase
        } else {
            -self.y_phase
        }
    }
}

/// Normalized complex amplitudes over 2^qubit_count basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(amplitudes.len(), 1 << n_qubits);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Text dump, one `index real imag` line per amplitude.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&format!("{i} {:.17e} {:.17e}\n", a.re, a.im));
        }
        out
    }

    fn check_operator(&self, qubits: usize) -> Result<(), EngineError> {
        if qubits != self.n_qubits {
            return Err(EngineError::QubitMismatch {
                state: self.n_qubits,
                operator: qubits,
            });
        }
        Ok(())
    }

    /// In-place P|psi>.
    pub fn apply_pauli(&mut self, string: &PauliString) -> Result<(), EngineError> {
        self.check_operator(string.qubit_count())?;
        let m = PauliMasks::new(string);
        if m.flip == 0 {
            for (i, a) in self.amplitudes.iter_mut().enumerate() {
                *a *= m.phase(i as u64);
            }
        } else {
            for i in 0..self.amplitudes.len() as u64 {
                let j = i ^ m.flip;
                if i < j {
                    let ai = self.amplitudes[i as usize];
                    let aj = self.amplitudes[j as usize];
                    // new_i = phase(j) a_j ; new_j = phase(i) a_i
                    self.amplitudes[i as usize] = m.phase(j) * aj;
                    self.amplitudes[j as usize] = m.phase(i) * ai;
                }
            }
        }
        Ok(())
    }

    /// In-place exp(i theta P)|psi> = (cos theta + i sin theta P)|psi>.
    pub fn apply_pauli_exponential(
        &mut self,
        string: &PauliString,
        theta: f64,
    ) -> Result<(), EngineError> {
        self.check_operator(string.qubit_count())?;
        let m = PauliMasks::new(string);
        let (c, s) = (theta.cos(), theta.sin());
        let is = Complex64::new(0.0, s);
        if m.flip == 0 {
            for (i, a) in self.amplitudes.iter_mut().enumerate() {
                *a *= c + is * m.phase(i as u64);
            }
        } else {
            for i in 0..self.amplitudes.len() as u64 {
                let j = i ^ m.flip;
                if i < j {
                    let ai = self.amplitudes[i as usize];
                    let aj = self.amplitudes[j as usize];
                    self.amplitudes[i as usize] = c * ai + is * m.phase(j) * aj;
                    self.amplitudes[j as usize] = c * aj + is * m.phase(i) * ai;
                }
            }
        }
        Ok(())
    }

    /// Op|psi> as a fresh (generally unnormalized) vector.
    pub fn apply_operator(&self, op: &QubitOperator) -> Result<StateVector, EngineError> {
        if let Some(q) = op.qubit_count() {
            self.check_operator(q)?;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (string, &coeff) in op.terms() {
            let m = PauliMasks::new(string);
            for i in 0..self.amplitudes.len() as u64 {
                let j = i ^ m.flip;
                out[j as usize] += coeff * m.phase(i) * self.amplitudes[i as usize];
            }
        }
        Ok(StateVector::from_amplitudes(self.n_qubits, out))
    }

    /// <psi|P|psi> without allocation.
    pub fn pauli_expectation(&self, string: &PauliString) -> Result<Complex64, EngineError> {
        self.check_operator(string.qubit_count())?;
        let m = PauliMasks::new(string);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.amplitudes.len() as u64 {
            let j = i ^ m.flip;
            acc += self.amplitudes[j as usize].conj() * m.phase(i) * self.amplitudes[i as usize];
        }
        Ok(acc)
    }

    fn expectation_complex(&self, op: &QubitOperator) -> Result<Complex64, EngineError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (string, &coeff) in op.terms() {
            acc += coeff * self.pauli_expectation(string)?;
        }
        Ok(acc)
    }

    /// Real expectation value of a Hermitian operator, with the imaginary
    /// residue returned as a diagnostic.
    pub fn expectation_with_residue(
        &self,
        op: &QubitOperator,
    ) -> Result<(f64, f64), EngineError> {
        if !op.is_hermitian(1e-10) {
            return Err(EngineError::NotHermitian(op.max_imag()));
        }
        let value = self.expectation_complex(op)?;
        Ok((value.re, value.im.abs()))
    }

    pub fn expectation(&self, op: &QubitOperator) -> Result<f64, EngineError> {
        let (value, residue) = self.expectation_with_residue(op)?;
        debug_assert!(residue < 1e-10, "imaginary residue {residue:e}");
        Ok(value)
    }
}

/// Computational basis state from an occupation bitstring; character q of
/// the string is qubit q.
pub fn fock_state(qubit_count: usize, occupation: &str) -> Result<StateVector, EngineError> {
    if occupation.len() != qubit_count {
        return Err(EngineError::BadOccupationLength {
            found: occupation.len(),
            expected: qubit_count,
        });
    }
    let index = ShotTable::parse_bits(occupation);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
    amplitudes[index as usize] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        n_qubits: qubit_count,
        amplitudes,
    })
}

/// Particle-number / S_z sector restriction for exact diagonalization,
/// in the interleaved spin-orbital convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetrySector {
    pub n_particles: u32,
    /// Twice the spin projection; `None` leaves S_z unrestricted.
    pub ms2: Option<i32>,
}

impl SymmetrySector {
    fn contains(&self, index: u64, n_qubits: usize) -> bool {
        if index.count_ones() != self.n_particles {
            return false;
        }
        match self.ms2 {
            None => true,
            Some(ms2) => {
                let mut alpha = 0i32;
                let mut beta = 0i32;
                for q in 0..n_qubits {
                    if index >> q & 1 == 1 {
                        if q % 2 == 0 {
                            alpha += 1;
                        } else {
                            beta += 1;
                        }
                    }
                }
                alpha - beta == ms2
            }
        }
    }
}

pub const DEFAULT_QUBIT_CAP: usize = 14;

/// Lowest eigenpair of a Hermitian qubit operator by matrix-free Lanczos,
/// optionally restricted to a symmetry sector.
pub fn exact_ground_state(
    op: &QubitOperator,
    sector: Option<SymmetrySector>,
    cap: usize,
) -> Result<(f64, StateVector), EngineError> {
    let n_qubits = op.qubit_count().ok_or(EngineError::EmptyOperator)?;
    if n_qubits > cap {
        return Err(EngineError::DimensionCap {
            qubits: n_qubits,
            cap,
        });
    }
    if !op.is_hermitian(1e-10) {
        return Err(EngineError::NotHermitian(op.max_imag()));
    }
    let dim = 1usize << n_qubits;
    let masks: Vec<(PauliMasks, Complex64)> = op
        .terms()
        .map(|(s, &c)| (PauliMasks::new(s), c))
        .collect();
    let project: Box<dyn Fn(&mut [Complex64])> = match sector {
        None => Box::new(|_: &mut [Complex64]| {}),
        Some(sec) => Box::new(move |v: &mut [Complex64]| {
            for (i, a) in v.iter_mut().enumerate() {
                if !sec.contains(i as u64, n_qubits) {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
        }),
    };
    let matvec = |x: &[Complex64], y: &mut [Complex64]| {
        y.fill(Complex64::new(0.0, 0.0));
        for (m, c) in &masks {
            for i in 0..dim as u64 {
                let j = i ^ m.flip;
                y[j as usize] += c * m.phase(i) * x[i as usize];
            }
        }
        project(y);
    };
    // Two deterministic restarts guard against an unlucky start vector.
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for restart in 0..2u64 {
        let mut rng = stream_rng(0xE16E, Purpose::Lanczos, restart);
        let mut start: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        project(&mut start);
        let norm: f64 = start.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue; // empty sector for this operator size
        }
        let (value, vector) = lanczos_lowest(dim, &matvec, &start, 4 * dim.max(50), 1e-13);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, vector));
        }
    }
    let (energy, vector) = best.expect("at least one restart produced a vector");
    let mut state = StateVector::from_amplitudes(n_qubits, vector);
    state.normalize();
    Ok((energy, state))
}

fn rotation_for_letter(letter: Pauli) -> Option<[Complex64; 4]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match letter {
        // H: X basis -> Z basis
        Pauli::X => Some([
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ]),
        // H S^dag: Y basis -> Z basis
        Pauli::Y => Some([
            Complex64::new(h, 0.0),
            Complex64::new(0.0, -h),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, h),
        ]),
        Pauli::Z | Pauli::I => None,
    }
}

fn apply_single_qubit(state: &mut StateVector, qubit: usize, m: &[Complex64; 4]) {
    let bit = 1u64 << qubit;
    for i in 0..state.amplitudes.len() as u64 {
        if i & bit == 0 {
            let j = i | bit;
            let a0 = state.amplitudes[i as usize];
            let a1 = state.amplitudes[j as usize];
            state.amplitudes[i as usize] = m[0] * a0 + m[1] * a1;
            state.amplitudes[j as usize] = m[2] * a0 + m[3] * a1;
        }
    }
}

/// Rotates each qubit from its measurement letter into the Z basis and
/// returns the Born probabilities over bitstrings.
pub fn measurement_probabilities(state: &StateVector, letters: &[Pauli]) -> Vec<f64> {
    let mut rotated = state.clone();
    for (q, &letter) in letters.iter().enumerate() {
        if let Some(m) = rotation_for_letter(letter) {
            apply_single_qubit(&mut rotated, q, &m);
        }
    }
    rotated.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Samples shot counts in the given measurement basis. Deterministic for a
/// fixed seed; optional per-shot measurement flips use the noise stream.
pub fn sample_bitstrings(
    state: &StateVector,
    letters: &[Pauli],
    shots: u64,
    noise: Option<&NoiseSpec>,
    seed: u64,
) -> Result<ShotTable, EngineError> {
    if shots == 0 {
        return Err(EngineError::ZeroShots);
    }
    if letters.len() != state.n_qubits {
        return Err(EngineError::QubitMismatch {
            state: state.n_qubits,
            operator: letters.len(),
        });
    }
    if let Some(n) = noise {
        n.validate()?;
    }
    let probs = measurement_probabilities(state, letters);
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = stream_rng(seed, Purpose::Sampling, 0);
    let flip_prob = noise.map_or(0.0, |n| n.measurement_flip_prob);
    let mut flip_rng = noise.map(|n| stream_rng(n.seed ^ seed, Purpose::MeasurementFlip, 0));
    let mut table = ShotTable::new(0, state.n_qubits);
    for _ in 0..shots {
        let r = rng.gen_range(0.0..total);
        let mut bits = cumulative.partition_point(|&c| c <= r) as u64;
        if flip_prob > 0.0 {
            let frng = flip_rng.as_mut().expect("noise present");
            for q in 0..state.n_qubits {
                if frng.gen::<f64>() < flip_prob {
                    bits ^= 1 << q;
                }
            }
        }
        table.record(bits, 1);
    }
    Ok(table)
}

/// Trajectory depolarizing noise: with probability `prob` per listed qubit,
/// applies a uniformly random non-identity Pauli to it. Qubits are visited
/// in ascending order so a fixed rng stream reproduces exactly.
pub fn apply_depolarizing(
    state: &mut StateVector,
    qubits: &[usize],
    prob: f64,
    rng: &mut ChaCha12Rng,
) -> Result<(), EngineError> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(EngineError::BadProbability(prob));
    }
    for &q in qubits {
        if rng.gen::<f64>() < prob {
            let letter = match rng.gen_range(0..3) {
                0 => Pauli::X,
                1 => Pauli::Y,
                _ => Pauli::Z,
            };
            let string = PauliString::with_letters(state.n_qubits, &[(q, letter)])
                .expect("qubit in range");
            state.apply_pauli(&string)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_states_have_single_amplitude() {
        let s = fock_state(4, "0000").unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, 1.0);
        let s = fock_state(4, "1100").unwrap();
        assert_abs_diff_eq!(s.amplitudes()[3].re, 1.0);
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
        assert!(fock_state(3, "10").is_err());
    }

    #[test]
    fn zero_angle_exponential_is_identity() {
        let mut s = fock_state(2, "10").unwrap();
        let before = s.clone();
        s.apply_pauli_exponential(&PauliString::new(vec![Pauli::X, Pauli::Y]), 0.0)
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn exponential_preserves_norm() {
        let mut s = fock_state(3, "101").unwrap();
        for (letters, theta) in [
            (vec![Pauli::X, Pauli::Y, Pauli::Z], 0.37),
            (vec![Pauli::Y, Pauli::I, Pauli::X], -1.2),
            (vec![Pauli::Z, Pauli::Z, Pauli::I], 2.9),
        ] {
            s.apply_pauli_exponential(&PauliString::new(letters), theta)
                .unwrap();
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let s = fock_state(2, "01").unwrap();
        let op = QubitOperator::constant(2, Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(s.expectation(&op).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn z_on_occupied_qubit_is_minus_one() {
        let s = fock_state(3, "100").unwrap();
        let z0 = QubitOperator::from_terms([(
            PauliString::with_letters(3, &[(0, Pauli::Z)]).unwrap(),
            Complex64::new(1.0, 0.0),
        )]);
        assert_abs_diff_eq!(s.expectation(&z0).unwrap(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_expectation_rejected() {
        let s = fock_state(1, "0").unwrap();
        let op = QubitOperator::from_terms([(
            PauliString::new(vec![Pauli::X]),
            Complex64::new(0.0, 1.0),
        )]);
        assert!(matches!(
            s.expectation(&op),
            Err(EngineError::NotHermitian(_))
        ));
    }

    #[test]
    fn diagonal_operator_ground_state_is_min_entry() {
        // Z0 + 2 Z1: minimum at both qubits occupied -> -3
        let op = QubitOperator::from_terms([
            (
                PauliString::with_letters(2, &[(0, Pauli::Z)]).unwrap(),
                Complex64::new(1.0, 0.0),
            ),
            (
                PauliString::with_letters(2, &[(1, Pauli::Z)]).unwrap(),
                Complex64::new(2.0, 0.0),
            ),
        ]);
        let (e, _) = exact_ground_state(&op, None, DEFAULT_QUBIT_CAP).unwrap();
        assert_abs_diff_eq!(e, -3.0, epsilon = 1e-10);
    }

    #[test]
    fn dimension_cap_enforced() {
        let op = QubitOperator::constant(4, Complex64::new(1.0, 0.0));
        assert!(matches!(
            exact_ground_state(&op, None, 3),
            Err(EngineError::DimensionCap { qubits: 4, cap: 3 })
        ));
    }

    #[test]
    fn sector_restriction_selects_half_filling() {
        // -Z0 - Z1 has global minimum |11>, but the 1-particle sector
        // ground energy is 0.
        let op = QubitOperator::from_terms([
            (
                PauliString::with_letters(2, &[(0, Pauli::Z)]).unwrap(),
                Complex64::new(-1.0, 0.0),
            ),
            (
                PauliString::with_letters(2, &[(1, Pauli::Z)]).unwrap(),
                Complex64::new(-1.0, 0.0),
            ),
        ]);
        let sector = SymmetrySector {
            n_particles: 1,
            ms2: None,
        };
        let (e, state) = exact_ground_state(&op, Some(sector), DEFAULT_QUBIT_CAP).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-10);
        assert!(state.amplitudes()[0].norm() < 1e-8);
        assert!(state.amplitudes()[3].norm() < 1e-8);
    }

    #[test]
    fn sampling_computational_state_is_deterministic() {
        let s = fock_state(3, "101").unwrap();
        let letters = vec![Pauli::Z, Pauli::Z, Pauli::Z];
        let table = sample_bitstrings(&s, &letters, 100, None, 7).unwrap();
        assert_eq!(table.counts.len(), 1);
        assert_eq!(table.counts[&0b101], 100);
    }

    #[test]
    fn full_flip_probability_inverts_bits() {
        let s = fock_state(1, "0").unwrap();
        let noise = NoiseSpec {
            depolarizing_prob_per_exponential: 0.0,
            measurement_flip_prob: 1.0,
            seed: 3,
        };
        let table = sample_bitstrings(&s, &[Pauli::Z], 50, Some(&noise), 11).unwrap();
        assert_eq!(table.counts[&1], 50);
    }

    #[test]
    fn half_flip_probability_is_roughly_uniform() {
        let s = fock_state(1, "0").unwrap();
        let noise = NoiseSpec {
            depolarizing_prob_per_exponential: 0.0,
            measurement_flip_prob: 0.5,
            seed: 5,
        };
        let shots = 10_000u64;
        let table = sample_bitstrings(&s, &[Pauli::Z], shots, Some(&noise), 13).unwrap();
        let ones = *table.counts.get(&1).unwrap_or(&0) as f64;
        // 5 sigma binomial bound around shots/2
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((ones - shots as f64 / 2.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn depolarizing_extremes() {
        let mut s = fock_state(2, "10").unwrap();
        let before = s.clone();
        let mut rng = stream_rng(1, Purpose::Depolarizing, 0);
        apply_depolarizing(&mut s, &[0, 1], 0.0, &mut rng).unwrap();
        assert_eq!(s, before);

        // prob 1 on one qubit: the state differs from the input by one of
        // X, Y, Z on that qubit.
        let mut s = fock_state(1, "0").unwrap();
        let reference = s.clone();
        apply_depolarizing(&mut s, &[0], 1.0, &mut rng).unwrap();
        let mut matched = false;
        for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mut candidate = reference.clone();
            candidate
                .apply_pauli(&PauliString::new(vec![letter]))
                .unwrap();
            if candidate.fidelity(&s) > 1.0 - 1e-12 {
                matched = true;
            }
        }
        assert!(matched);
    }
}
