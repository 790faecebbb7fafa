//! Measurement grouping, shot tables, PMSV post-selection and bootstrap
//! statistics.
//!
//! Grouping uses qubit-wise commutativity so that every group is measured
//! with single-qubit basis rotations only.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::operators::{OperatorError, Pauli, PauliString, QubitOperator};
use crate::seeding::{stream_rng, Purpose};
use crate::HARTREE_TO_EV;
use rand::Rng;

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("cannot group an empty operator")]
    EmptyOperator,
    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("expected one shot table per group: {tables} tables for {groups} groups")]
    TableCountMismatch { tables: usize, groups: usize },
    #[error("group {0} has zero surviving shots")]
    ZeroSurvivingShots(usize),
    #[error("bootstrap needs at least 2 batches, got {0}")]
    TooFewBatches(usize),
    #[error("bootstrap needs non-empty shot tables")]
    InsufficientShots,
    #[error("symmetry {0} does not commute with the Hamiltonian")]
    SymmetryNotConserved(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// A set of qubit-wise commuting Pauli strings measured by one circuit.
#[derive(Debug, Clone)]
pub struct MeasurementGroup {
    /// Per-qubit measurement letter; `I` where no member touches the qubit.
    pub letters: Vec<Pauli>,
    pub members: Vec<PauliString>,
}

impl MeasurementGroup {
    fn accepts(&self, term: &PauliString) -> bool {
        self.letters
            .iter()
            .zip(term.letters())
            .all(|(&g, &t)| t == Pauli::I || g == Pauli::I || g == t)
    }

    fn insert(&mut self, term: PauliString) {
        for (q, &t) in term.letters().iter().enumerate() {
            if t != Pauli::I {
                self.letters[q] = t;
            }
        }
        self.members.push(term);
    }

    /// A member's eigenvalue is read from the measured bits on its support.
    pub fn eigenvalue(member: &PauliString, bits: u64) -> f64 {
        let mut mask = 0u64;
        for q in member.support() {
            mask |= 1 << q;
        }
        if (bits & mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Greedy qubit-wise-commuting grouping with deterministic term order:
/// |coefficient| descending, lexicographic tiebreak.
pub fn group_pauli_terms(op: &QubitOperator) -> Result<Vec<MeasurementGroup>, MeasurementError> {
    if op.is_empty() {
        return Err(MeasurementError::EmptyOperator);
    }
    let n_qubits = op.qubit_count().expect("non-empty operator");
    let mut terms: Vec<(&PauliString, f64)> =
        op.terms().map(|(s, c)| (s, c.norm())).collect();
    terms.sort_by(|(sa, ca), (sb, cb)| {
        cb.partial_cmp(ca)
            .expect("finite coefficients")
            .then_with(|| sa.cmp(sb))
    });
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for (term, _) in terms {
        match groups.iter_mut().find(|g| g.accepts(term)) {
            Some(g) => g.insert(term.clone()),
            None => {
                let mut g = MeasurementGroup {
                    letters: vec![Pauli::I; n_qubits],
                    members: Vec::new(),
                };
                g.insert(term.clone());
                groups.push(g);
            }
        }
    }
    for g in &groups {
        debug_assert!(verify_group(g));
    }
    Ok(groups)
}

/// All intra-group pairs qubit-wise commute and match the group letters.
pub fn verify_group(group: &MeasurementGroup) -> bool {
    for (i, a) in group.members.iter().enumerate() {
        for b in &group.members[i + 1..] {
            if !a.qubit_wise_commutes(b).unwrap_or(false) {
                return false;
            }
        }
        for (q, &t) in a.letters().iter().enumerate() {
            if t != Pauli::I && group.letters[q] != t {
                return false;
            }
        }
    }
    true
}

/// Sampled measurement outcomes for one group. Bitstrings are stored as
/// integers; bit q of the key is the outcome of qubit q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotTable {
    pub group_id: usize,
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub shots_total: u64,
    pub shots_kept: u64,
}

impl ShotTable {
    pub fn new(group_id: usize, n_qubits: usize) -> Self {
        ShotTable {
            group_id,
            n_qubits,
            counts: BTreeMap::new(),
            shots_total: 0,
            shots_kept: 0,
        }
    }

    pub fn record(&mut self, bits: u64, count: u64) {
        *self.counts.entry(bits).or_insert(0) += count;
        self.shots_total += count;
        self.shots_kept += count;
    }

    /// Renders bit q of `bits` as character q of the string.
    pub fn bitstring(&self, bits: u64) -> String {
        (0..self.n_qubits)
            .map(|q| if bits >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bits(s: &str) -> u64 {
        s.chars()
            .enumerate()
            .filter(|(_, c)| *c == '1')
            .fold(0u64, |acc, (q, _)| acc | 1 << q)
    }

    /// CSV lines `group,bitstring,count` in deterministic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (&bits, &count) in &self.counts {
            out.push_str(&format!(
                "{},{},{}\n",
                self.group_id,
                self.bitstring(bits),
                count
            ));
        }
        out
    }
}

/// Conserved Z-product symmetries with their required eigenvalues.
#[derive(Debug, Clone)]
pub struct SymmetrySpec {
    pub symmetries: Vec<(PauliString, i8)>,
}

impl SymmetrySpec {
    /// Particle-number parity per spin sector plus total parity, with
    /// required eigenvalues fixed by the reference occupation (interleaved
    /// spin ordering, |1> = occupied).
    pub fn from_reference(reference: &str) -> Self {
        let n = reference.len();
        let occ: Vec<bool> = reference.chars().map(|c| c == '1').collect();
        let sector = |filter: &dyn Fn(usize) -> bool| {
            let letters: Vec<Pauli> = (0..n)
                .map(|q| if filter(q) { Pauli::Z } else { Pauli::I })
                .collect();
            let parity = (0..n).filter(|&q| filter(q) && occ[q]).count();
            (
                PauliString::new(letters),
                if parity % 2 == 0 { 1 } else { -1 },
            )
        };
        SymmetrySpec {
            symmetries: vec![
                sector(&|q| q % 2 == 0),
                sector(&|q| q % 2 == 1),
                sector(&|_| true),
            ],
        }
    }

    /// Every symmetry must commute with the Hamiltonian.
    pub fn validate_against(&self, hamiltonian: &QubitOperator) -> Result<(), MeasurementError> {
        for (s, _) in &self.symmetries {
            let sym_op = QubitOperator::from_terms([(s.clone(), 1.0.into())]);
            let comm = sym_op.commutator(hamiltonian)?.simplify(1e-10);
            if !comm.is_empty() {
                return Err(MeasurementError::SymmetryNotConserved(s.to_string()));
            }
        }
        Ok(())
    }
}

/// Result of PMSV post-selection on one shot table.
#[derive(Debug, Clone)]
pub struct PmsvOutcome {
    pub table: ShotTable,
    /// Indices into the SymmetrySpec that were checked.
    pub applied: Vec<usize>,
    /// Indices that could not be checked in this measurement basis.
    pub skipped: Vec<usize>,
    pub discarded: u64,
}

/// Discards bitstrings whose symmetry eigenvalue disagrees with the required
/// value. Only symmetries diagonal in the group's measurement basis are
/// checked; the rest are reported as skipped, never silently assumed.
pub fn pmsv_filter(table: &ShotTable, group: &MeasurementGroup, sym: &SymmetrySpec) -> PmsvOutcome {
    let mut applied = Vec::new();
    let mut skipped = Vec::new();
    let mut checks: Vec<(u64, i8)> = Vec::new();
    for (idx, (s, required)) in sym.symmetries.iter().enumerate() {
        let compatible = s
            .letters()
            .iter()
            .zip(&group.letters)
            .all(|(&sq, &gq)| sq == Pauli::I || gq == Pauli::Z || gq == Pauli::I);
        if compatible {
            let mut mask = 0u64;
            for q in s.support() {
                mask |= 1 << q;
            }
            checks.push((mask, *required));
            applied.push(idx);
        } else {
            skipped.push(idx);
        }
    }
    let mut filtered = ShotTable::new(table.group_id, table.n_qubits);
    filtered.shots_total = table.shots_total;
    let mut kept = 0u64;
    for (&bits, &count) in &table.counts {
        let ok = checks.iter().all(|&(mask, required)| {
            let parity = if (bits & mask).count_ones() % 2 == 0 {
                1
            } else {
                -1
            };
            parity == required
        });
        if ok {
            *filtered.counts.entry(bits).or_insert(0) += count;
            kept += count;
        }
    }
    filtered.shots_kept = kept;
    let discarded = table.shots_kept - kept;
    PmsvOutcome {
        table: filtered,
        applied,
        skipped,
        discarded,
    }
}

/// Energy estimate assembled from per-group shot tables.
#[derive(Debug, Clone)]
pub struct ExpectationEstimate {
    pub energy: f64,
    /// Variance of the per-group mean contribution.
    pub group_variances: Vec<f64>,
    /// Groups whose tables had no surviving shots; their terms are missing
    /// from `energy`.
    pub invalid_groups: Vec<usize>,
}

impl ExpectationEstimate {
    pub fn standard_error(&self) -> f64 {
        self.group_variances.iter().sum::<f64>().sqrt()
    }
}

/// Sum over terms of coefficient times the empirical eigenvalue mean.
pub fn estimate_expectation(
    op: &QubitOperator,
    groups: &[MeasurementGroup],
    tables: &[ShotTable],
) -> Result<ExpectationEstimate, MeasurementError> {
    if groups.len() != tables.len() {
        return Err(MeasurementError::TableCountMismatch {
            tables: tables.len(),
            groups: groups.len(),
        });
    }
    if !op.is_hermitian(1e-10) {
        return Err(MeasurementError::NotHermitian(op.max_imag()));
    }
    let mut energy = 0.0;
    let mut group_variances = Vec::with_capacity(groups.len());
    let mut invalid_groups = Vec::new();
    for (gid, (group, table)) in groups.iter().zip(tables).enumerate() {
        if table.shots_kept == 0 {
            invalid_groups.push(gid);
            group_variances.push(f64::NAN);
            continue;
        }
        let coeffs: Vec<f64> = group
            .members
            .iter()
            .map(|m| op.coefficient(m).re)
            .collect();
        let masks: Vec<u64> = group
            .members
            .iter()
            .map(|m| m.support().iter().fold(0u64, |acc, &q| acc | 1 << q))
            .collect();
        let kept = table.shots_kept as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (&bits, &count) in &table.counts {
            let mut v = 0.0;
            for (c, &mask) in coeffs.iter().zip(&masks) {
                let e = if (bits & mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                v += c * e;
            }
            sum += v * count as f64;
            sum_sq += v * v * count as f64;
        }
        let mean = sum / kept;
        let var = (sum_sq / kept - mean * mean).max(0.0) / kept;
        energy += mean;
        group_variances.push(var);
    }
    Ok(ExpectationEstimate {
        energy,
        group_variances,
        invalid_groups,
    })
}

/// Infinite-shot substitute: tables whose counts are exact Born weights
/// reproduce the statevector expectation through the same estimator path.
pub fn estimate_from_probabilities(
    op: &QubitOperator,
    groups: &[MeasurementGroup],
    probability_tables: &[Vec<(u64, f64)>],
) -> Result<f64, MeasurementError> {
    if groups.len() != probability_tables.len() {
        return Err(MeasurementError::TableCountMismatch {
            tables: probability_tables.len(),
            groups: groups.len(),
        });
    }
    let mut energy = 0.0;
    for (group, probs) in groups.iter().zip(probability_tables) {
        for member in &group.members {
            let c = op.coefficient(member).re;
            if c == 0.0 {
                continue;
            }
            let mask = member.support().iter().fold(0u64, |acc, &q| acc | 1 << q);
            let mean: f64 = probs
                .iter()
                .map(|&(bits, p)| {
                    if (bits & mask).count_ones() % 2 == 0 {
                        p
                    } else {
                        -p
                    }
                })
                .sum();
            energy += c * mean;
        }
    }
    Ok(energy)
}

/// Resamples each table with replacement (same kept-shot count) into B
/// batches, evaluates the derived quantity per batch and returns the batch
/// mean and population standard deviation.
pub fn bootstrap_statistics<F>(
    tables: &[ShotTable],
    batches: usize,
    seed: u64,
    evaluator: F,
) -> Result<(f64, f64), MeasurementError>
where
    F: Fn(&[ShotTable]) -> f64,
{
    if batches < 2 {
        return Err(MeasurementError::TooFewBatches(batches));
    }
    if tables.is_empty() || tables.iter().any(|t| t.shots_kept == 0) {
        return Err(MeasurementError::InsufficientShots);
    }
    let mut values = Vec::with_capacity(batches);
    for b in 0..batches {
        let resampled: Vec<ShotTable> = tables
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let mut rng =
                    stream_rng(seed, Purpose::Bootstrap, (b as u64) << 20 | ti as u64);
                resample_table(t, &mut rng)
            })
            .collect();
        values.push(evaluator(&resampled));
    }
    let mean = values.iter().sum::<f64>() / batches as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / batches as f64;
    Ok((mean, var.sqrt()))
}

fn resample_table(table: &ShotTable, rng: &mut rand_chacha::ChaCha12Rng) -> ShotTable {
    let entries: Vec<(u64, u64)> = table.counts.iter().map(|(&b, &c)| (b, c)).collect();
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0u64;
    for &(_, c) in &entries {
        acc += c;
        cumulative.push(acc);
    }
    let total = acc;
    let mut out = ShotTable::new(table.group_id, table.n_qubits);
    out.shots_total = table.shots_kept;
    for _ in 0..table.shots_kept {
        let r = rng.gen_range(0..total);
        let pos = cumulative.partition_point(|&c| c <= r);
        *out.counts.entry(entries[pos].0).or_insert(0) += 1;
    }
    out.shots_kept = table.shots_kept;
    out
}

/// Activation and dissociation energies from the three species energies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergyDifferences {
    pub ea_hartree: f64,
    pub ed_hartree: f64,
    pub ea_ev: f64,
    pub ed_ev: f64,
}

/// E_a = E_TS - E_reactant, E_d = E_product - E_reactant.
pub fn energy_differences(e_reactant: f64, e_ts: f64, e_product: f64) -> EnergyDifferences {
    let ea = e_ts - e_reactant;
    let ed = e_product - e_reactant;
    EnergyDifferences {
        ea_hartree: ea,
        ed_hartree: ed,
        ea_ev: ea * HARTREE_TO_EV,
        ed_ev: ed * HARTREE_TO_EV,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn op_from(terms: &[(&[(usize, Pauli)], f64)], n: usize) -> QubitOperator {
        QubitOperator::from_terms(terms.iter().map(|(placed, c)| {
            (
                PauliString::with_letters(n, placed).unwrap(),
                Complex64::new(*c, 0.0),
            )
        }))
    }

    #[test]
    fn z_terms_group_together_x_apart() {
        use Pauli::*;
        let op = op_from(
            &[
                (&[(0, Z)], 1.0),
                (&[(1, Z)], 0.5),
                (&[(0, Z), (1, Z)], 0.25),
                (&[(0, X), (1, X)], 0.125),
            ],
            2,
        );
        let groups = group_pauli_terms(&op).unwrap();
        assert_eq!(groups.len(), 2);
        let sizes: Vec<usize> = groups.iter().map(|g| g.members.len()).collect();
        assert_eq!(sizes, vec![3, 1]);
        assert!(groups.iter().all(verify_group));
    }

    #[test]
    fn all_identity_operator_is_one_group() {
        let op = QubitOperator::constant(3, Complex64::new(2.0, 0.0));
        let groups = group_pauli_terms(&op).unwrap();
        assert_eq!(groups.len(), 1);
    }

    #[test]
    fn grouping_is_a_partition() {
        use Pauli::*;
        let op = op_from(
            &[
                (&[(0, X)], 0.4),
                (&[(1, Y)], 0.3),
                (&[(0, Z), (1, Z)], 0.2),
                (&[(0, X), (1, Y)], 0.1),
            ],
            2,
        );
        let groups = group_pauli_terms(&op).unwrap();
        let total: usize = groups.iter().map(|g| g.members.len()).sum();
        assert_eq!(total, op.n_terms());
    }

    #[test]
    fn pmsv_keeps_even_parity() {
        use Pauli::*;
        let group = MeasurementGroup {
            letters: vec![Z, Z, Z, Z],
            members: vec![PauliString::with_letters(4, &[(0, Z)]).unwrap()],
        };
        let sym = SymmetrySpec {
            symmetries: vec![(
                PauliString::new(vec![Z, Z, Z, Z]),
                1, // even parity required
            )],
        };
        let mut table = ShotTable::new(0, 4);
        table.record(ShotTable::parse_bits("1100"), 10);
        table.record(ShotTable::parse_bits("1000"), 5);
        let outcome = pmsv_filter(&table, &group, &sym);
        assert_eq!(outcome.discarded, 5);
        assert_eq!(outcome.table.shots_kept, 10);
        assert_eq!(outcome.table.shots_total, 15);
        assert_eq!(
            outcome.table.counts.get(&ShotTable::parse_bits("1100")),
            Some(&10)
        );
    }

    #[test]
    fn pmsv_skips_incompatible_symmetries() {
        use Pauli::*;
        let group = MeasurementGroup {
            letters: vec![X, X],
            members: vec![PauliString::new(vec![X, X])],
        };
        let sym = SymmetrySpec::from_reference("10");
        let mut table = ShotTable::new(0, 2);
        table.record(0b01, 7);
        let outcome = pmsv_filter(&table, &group, &sym);
        assert!(outcome.applied.is_empty());
        assert_eq!(outcome.skipped, vec![0, 1, 2]);
        assert_eq!(outcome.discarded, 0);
    }

    #[test]
    fn identity_term_contributes_its_coefficient() {
        let op = QubitOperator::constant(2, Complex64::new(-1.5, 0.0));
        let groups = group_pauli_terms(&op).unwrap();
        let mut table = ShotTable::new(0, 2);
        table.record(0b00, 3);
        let est = estimate_expectation(&op, &groups, &[table]).unwrap();
        assert!((est.energy - -1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_surviving_shots_is_flagged() {
        let op = op_from(&[(&[(0, Pauli::Z)], 1.0)], 1);
        let groups = group_pauli_terms(&op).unwrap();
        let table = ShotTable::new(0, 1);
        let est = estimate_expectation(&op, &groups, &[table]).unwrap();
        assert_eq!(est.invalid_groups, vec![0]);
    }

    #[test]
    fn bootstrap_of_constant_evaluator_has_zero_stddev() {
        let mut table = ShotTable::new(0, 1);
        table.record(0, 50);
        table.record(1, 50);
        let (mean, sd) = bootstrap_statistics(&[table], 10, 42, |_| 3.25).unwrap();
        assert_eq!(mean, 3.25);
        assert_eq!(sd, 0.0);
    }

    #[test]
    fn bootstrap_rejects_bad_inputs() {
        let mut table = ShotTable::new(0, 1);
        table.record(0, 5);
        assert!(matches!(
            bootstrap_statistics(&[table.clone()], 1, 0, |_| 0.0),
            Err(MeasurementError::TooFewBatches(1))
        ));
        let empty = ShotTable::new(0, 1);
        assert!(matches!(
            bootstrap_statistics(&[empty], 5, 0, |_| 0.0),
            Err(MeasurementError::InsufficientShots)
        ));
    }

    #[test]
    fn energy_difference_arithmetic() {
        let d = energy_differences(-1.0, -0.5, -1.2);
        assert!((d.ea_hartree - 0.5).abs() < 1e-15);
        assert!((d.ed_hartree + 0.2).abs() < 1e-15);
        assert!((d.ea_ev - 0.5 * HARTREE_TO_EV).abs() < 1e-12);
        let zero = energy_differences(-2.0, -2.0, -2.0);
        assert_eq!(zero.ea_hartree, 0.0);
        assert_eq!(zero.ed_hartree, 0.0);
    }
}
