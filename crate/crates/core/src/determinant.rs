//! Slater determinants over interleaved spin orbitals: enumeration,
//! Slater-Condon matrix elements and small-scale exact diagonalization.
//!
//! A determinant is a u64 bitmask; bit m set means spin orbital m occupied.
//! The reference product ordering is ascending mode index, which matches the
//! Jordan-Wigner basis-state convention used by the statevector engine, so a
//! determinant-basis coefficient vector doubles as qubit amplitudes.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::eigen::lanczos_lowest;
use crate::integrals::MolecularIntegrals;
use crate::statevector::StateVector;

/// Annihilate mode m: `a_m |det> = sign |det'>`, or None if unoccupied.
#[inline]
pub fn annihilate(det: u64, m: usize) -> Option<(u64, f64)> {
    if det >> m & 1 == 0 {
        return None;
    }
    let below = (det & ((1u64 << m) - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((det & !(1u64 << m), sign))
}

/// Create mode p: `a^dag_p |det> = sign |det'>`, or None if occupied.
#[inline]
pub fn create(det: u64, p: usize) -> Option<(u64, f64)> {
    if det >> p & 1 == 1 {
        return None;
    }
    let below = (det & ((1u64 << p) - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((det | 1u64 << p, sign))
}

pub fn occupied_modes(det: u64, n_so: usize) -> Vec<usize> {
    (0..n_so).filter(|&m| det >> m & 1 == 1).collect()
}

/// All C(positions, k) occupation masks, ascending by mask value.
pub fn combinations(positions: &[usize], k: usize) -> Vec<u64> {
    fn rec(positions: &[usize], k: usize, start: usize, mask: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..=positions.len().saturating_sub(k) {
            rec(positions, k - 1, i + 1, mask | 1 << positions[i], out);
        }
    }
    let mut out = Vec::new();
    if k <= positions.len() {
        rec(positions, k, 0, 0, &mut out);
    }
    out.sort_unstable();
    out
}

/// Determinants with fixed alpha/beta counts over n_spatial interleaved
/// orbitals, ascending by mask.
pub fn sector_dets(n_spatial: usize, n_alpha: usize, n_beta: usize) -> Vec<u64> {
    let alpha_pos: Vec<usize> = (0..n_spatial).map(|p| 2 * p).collect();
    let beta_pos: Vec<usize> = (0..n_spatial).map(|p| 2 * p + 1).collect();
    let mut out = Vec::new();
    for a in combinations(&alpha_pos, n_alpha) {
        for b in combinations(&beta_pos, n_beta) {
            out.push(a | b);
        }
    }
    out.sort_unstable();
    out
}

/// The aufbau determinant: lowest n_alpha alpha and n_beta beta modes.
pub fn aufbau_det(n_alpha: usize, n_beta: usize) -> u64 {
    let mut det = 0u64;
    for p in 0..n_alpha {
        det |= 1 << (2 * p);
    }
    for p in 0..n_beta {
        det |= 1 << (2 * p + 1);
    }
    det
}

/// <row|H|col> by the Slater-Condon rules (core energy included on the
/// diagonal).
pub fn slater_condon(ints: &MolecularIntegrals, row: u64, col: u64) -> f64 {
    let n_so = ints.n_spin_orbitals();
    let diff = row ^ col;
    match diff.count_ones() {
        0 => {
            let occ = occupied_modes(col, n_so);
            let mut e = ints.e_core();
            for &m in &occ {
                e += ints.h1_so(m, m);
            }
            for &m in &occ {
                for &n in &occ {
                    if m != n {
                        e += 0.5 * ints.antisym_so(m, n, m, n);
                    }
                }
            }
            e
        }
        2 => {
            let m = (col & diff).trailing_zeros() as usize;
            let p = (row & diff).trailing_zeros() as usize;
            let (d1, s1) = annihilate(col, m).expect("hole occupied");
            let (_, s2) = create(d1, p).expect("particle empty");
            let mut e = ints.h1_so(p, m);
            for n in occupied_modes(col & row, n_so) {
                e += ints.antisym_so(p, n, m, n);
            }
            s1 * s2 * e
        }
        4 => {
            let holes = occupied_modes(col & diff, n_so);
            let parts = occupied_modes(row & diff, n_so);
            let (m, n) = (holes[0], holes[1]);
            let (p, q) = (parts[0], parts[1]);
            // phase of a^dag_p a^dag_q a_n a_m |col>
            let (d1, s1) = annihilate(col, m).expect("hole occupied");
            let (d2, s2) = annihilate(d1, n).expect("hole occupied");
            let (d3, s3) = create(d2, q).expect("particle empty");
            let (_, s4) = create(d3, p).expect("particle empty");
            s1 * s2 * s3 * s4 * ints.antisym_so(p, q, m, n)
        }
        _ => 0.0,
    }
}

/// Dense Hamiltonian over an explicit determinant basis.
pub fn build_dense(ints: &MolecularIntegrals, dets: &[u64]) -> DMatrix<f64> {
    let dim = dets.len();
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = slater_condon(ints, dets[i], dets[j]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// H|psi> for a sparse determinant wavefunction, by generating all single
/// and double excitations from each support determinant.
pub fn apply_hamiltonian_sparse(
    ints: &MolecularIntegrals,
    psi: &BTreeMap<u64, f64>,
) -> BTreeMap<u64, f64> {
    let n_so = ints.n_spin_orbitals();
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    for (&det, &coeff) in psi {
        let occ = occupied_modes(det, n_so);
        let virt: Vec<usize> = (0..n_so).filter(|&m| det >> m & 1 == 0).collect();
        *out.entry(det).or_insert(0.0) += slater_condon(ints, det, det) * coeff;
        for &m in &occ {
            for &p in &virt {
                let target = det & !(1u64 << m) | 1u64 << p;
                let v = slater_condon(ints, target, det);
                if v != 0.0 {
                    *out.entry(target).or_insert(0.0) += v * coeff;
                }
            }
        }
        for (im, &m) in occ.iter().enumerate() {
            for &n in &occ[im + 1..] {
                for (ip, &p) in virt.iter().enumerate() {
                    for &q in &virt[ip + 1..] {
                        let target =
                            det & !(1u64 << m) & !(1u64 << n) | 1u64 << p | 1u64 << q;
                        let v = slater_condon(ints, target, det);
                        if v != 0.0 {
                            *out.entry(target).or_insert(0.0) += v * coeff;
                        }
                    }
                }
            }
        }
    }
    out
}

const DENSE_FCI_LIMIT: usize = 1200;

/// Lowest eigenpair over the given determinant basis; dense below
/// `DENSE_FCI_LIMIT`, Lanczos above.
pub fn lowest_eigenpair(ints: &MolecularIntegrals, dets: &[u64]) -> (f64, Vec<f64>) {
    assert!(!dets.is_empty(), "empty determinant basis");
    if dets.len() <= DENSE_FCI_LIMIT {
        let h = build_dense(ints, dets);
        let eig = SymmetricEigen::new(h);
        let mut best = 0;
        for i in 1..dets.len() {
            if eig.eigenvalues[i] < eig.eigenvalues[best] {
                best = i;
            }
        }
        (
            eig.eigenvalues[best],
            eig.eigenvectors.column(best).iter().copied().collect(),
        )
    } else {
        let h = build_dense(ints, dets);
        let matvec = |x: &[Complex64], y: &mut [Complex64]| {
            for (i, yi) in y.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, xj) in x.iter().enumerate() {
                    acc += h[(i, j)] * xj;
                }
                *yi = acc;
            }
        };
        let start: Vec<Complex64> = (0..dets.len())
            .map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.0))
            .collect();
        let (value, vector) = lanczos_lowest(dets.len(), &matvec, &start, 600, 1e-13);
        (value, vector.iter().map(|c| c.re).collect())
    }
}

/// FCI ground energy in the (n_elec, ms2) sector of the integral set.
pub fn fci_ground_energy(ints: &MolecularIntegrals) -> f64 {
    let n_alpha = (ints.n_elec() as i32 + ints.ms2()) as usize / 2;
    let n_beta = ints.n_elec() - n_alpha;
    let dets = sector_dets(ints.n_orb(), n_alpha, n_beta);
    lowest_eigenpair(ints, &dets).0
}

/// FCI restricted to determinants with the listed spatial orbitals doubly
/// occupied.
pub fn frozen_core_fci(ints: &MolecularIntegrals, frozen: &[usize]) -> f64 {
    let core_mask: u64 = frozen
        .iter()
        .flat_map(|&p| [2 * p, 2 * p + 1])
        .fold(0, |acc, m| acc | 1 << m);
    let remaining: Vec<usize> = (0..ints.n_orb()).filter(|p| !frozen.contains(p)).collect();
    let n_rest = ints.n_elec() - 2 * frozen.len();
    let n_alpha = (n_rest as i32 + ints.ms2()) as usize / 2;
    let n_beta = n_rest - n_alpha;
    let alpha_pos: Vec<usize> = remaining.iter().map(|&p| 2 * p).collect();
    let beta_pos: Vec<usize> = remaining.iter().map(|&p| 2 * p + 1).collect();
    let mut dets = Vec::new();
    for a in combinations(&alpha_pos, n_alpha) {
        for b in combinations(&beta_pos, n_beta) {
            dets.push(core_mask | a | b);
        }
    }
    dets.sort_unstable();
    lowest_eigenpair(ints, &dets).0
}

/// Interprets a determinant-basis vector as qubit amplitudes.
pub fn dets_to_statevector(dets: &[u64], coeffs: &[f64], n_qubits: usize) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    for (&d, &c) in dets.iter().zip(coeffs) {
        amps[d as usize] = Complex64::new(c, 0.0);
    }
    let mut sv = StateVector::from_amplitudes(n_qubits, amps);
    sv.normalize();
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ladder_signs_follow_mode_order() {
        // det {0,2}: annihilating mode 2 crosses mode 0 -> sign -1
        let det = 0b101u64;
        let (d, s) = annihilate(det, 2).unwrap();
        assert_eq!(d, 0b001);
        assert_eq!(s, -1.0);
        let (d, s) = annihilate(det, 0).unwrap();
        assert_eq!(d, 0b100);
        assert_eq!(s, 1.0);
        assert!(annihilate(det, 1).is_none());
        let (d, s) = create(det, 1).unwrap();
        assert_eq!(d, 0b111);
        assert_eq!(s, -1.0);
    }

    #[test]
    fn sector_enumeration_counts() {
        // 2 spatial orbitals, 1 alpha + 1 beta = 4 determinants
        let dets = sector_dets(2, 1, 1);
        assert_eq!(dets.len(), 4);
        // 3 spatial orbitals, closed shell pair: C(3,1)^2
        assert_eq!(sector_dets(3, 1, 1).len(), 9);
        assert_eq!(aufbau_det(1, 1), 0b11);
    }

    #[test]
    fn diagonal_matches_hf_energy() {
        let mut ints = MolecularIntegrals::empty(2, 2, 0);
        ints.set_e_core(0.7);
        ints.h1_set(0, 0, -1.2);
        ints.h1_set(1, 1, -0.4);
        ints.h1_set(0, 1, -0.1);
        ints.h2_set(0, 0, 0, 0, 0.6);
        ints.h2_set(1, 1, 1, 1, 0.5);
        ints.h2_set(0, 0, 1, 1, 0.3);
        ints.h2_set(0, 1, 0, 1, 0.05);
        let hf = crate::integrals::hf_energy(&ints, "1100").unwrap();
        assert_abs_diff_eq!(
            slater_condon(&ints, 0b11, 0b11),
            hf,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let mut ints = MolecularIntegrals::empty(2, 2, 0);
        ints.h1_set(0, 0, -1.0);
        ints.h1_set(1, 1, -0.3);
        ints.h1_set(0, 1, -0.2);
        ints.h2_set(0, 0, 0, 0, 0.5);
        ints.h2_set(0, 0, 1, 1, 0.25);
        ints.h2_set(0, 1, 0, 1, 0.1);
        ints.h2_set(1, 1, 1, 1, 0.45);
        let dets = sector_dets(2, 1, 1);
        let h = build_dense(&ints, &dets);
        let mut psi = BTreeMap::new();
        for (i, &d) in dets.iter().enumerate() {
            psi.insert(d, 0.3 + 0.2 * i as f64);
        }
        let hpsi = apply_hamiltonian_sparse(&ints, &psi);
        for (i, &di) in dets.iter().enumerate() {
            let mut expected = 0.0;
            for (j, &dj) in dets.iter().enumerate() {
                expected += h[(i, j)] * psi[&dj];
            }
            assert_abs_diff_eq!(
                hpsi.get(&di).copied().unwrap_or(0.0),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn frozen_core_matches_restricted_enumeration() {
        let mut ints = MolecularIntegrals::empty(3, 4, 0);
        ints.h1_set(0, 0, -4.0);
        ints.h1_set(1, 1, -1.0);
        ints.h1_set(2, 2, -0.5);
        ints.h1_set(1, 2, -0.15);
        ints.h2_set(0, 0, 0, 0, 1.0);
        ints.h2_set(1, 1, 1, 1, 0.7);
        ints.h2_set(2, 2, 2, 2, 0.6);
        ints.h2_set(1, 1, 2, 2, 0.3);
        ints.h2_set(1, 2, 1, 2, 0.1);
        ints.h2_set(0, 0, 1, 1, 0.5);
        ints.h2_set(0, 0, 2, 2, 0.4);
        let frozen = frozen_core_fci(&ints, &[0]);
        let full = fci_ground_energy(&ints);
        // freezing can only raise or keep the energy
        assert!(frozen >= full - 1e-12);
    }
}
