//! Mean-field inputs: FCIDUMP integrals, orbital bundles, second-quantized
//! Hamiltonian construction and Hartree-Fock reference energies.
//!
//! Two-electron integrals are stored in chemist notation (ij|kl) over spatial
//! orbitals with the full 8-fold permutational symmetry; spin-orbital
//! expansion happens only when the Hamiltonian is built.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::operators::{FermionOperator, Ladder};

#[derive(Debug, Error)]
pub enum IntegralsError {
    #[error("malformed FCIDUMP header: {0}")]
    MalformedHeader(String),
    #[error("FCIDUMP line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("FCIDUMP line {line}: index {index} out of range (NORB={n_orb})")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        n_orb: usize,
    },
    #[error("conflicting duplicate value at ({i},{j},{k},{l}): {a} vs {b}")]
    ConflictingDuplicate {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        a: f64,
        b: f64,
    },
    #[error("h1 is not symmetric: |h1[{i},{j}] - h1[{j},{i}]| = {dev:e}")]
    AsymmetricH1 { i: usize, j: usize, dev: f64 },
    #[error("h2 violates 8-fold symmetry at ({i},{j},{k},{l}): deviation {dev:e}")]
    AsymmetricH2 {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        dev: f64,
    },
    #[error("electron count {n_elec} exceeds capacity of {n_orb} orbitals")]
    TooManyElectrons { n_elec: usize, n_orb: usize },
    #[error("occupation has {found} electrons, expected {expected}")]
    WrongParticleCount { found: usize, expected: usize },
    #[error("occupation length {found} does not match {expected} spin orbitals")]
    WrongOccupationLength { found: usize, expected: usize },
    #[error("orbital bundle: {0}")]
    MalformedBundle(String),
    #[error("orbital bundle: MO coefficients not S-orthonormal (max deviation {0:e})")]
    NonOrthonormal(f64),
    #[error("orbital bundle: occupations sum to {found}, not an integer electron count")]
    BadOccupationSum { found: f64 },
}

const SYMMETRY_TOL: f64 = 1e-10;

/// Core energy plus one- and two-electron integrals in Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    n_orb: usize,
    n_elec: usize,
    ms2: i32,
    e_core: f64,
    h1: DMatrix<f64>,
    /// Flat (ij|kl) tensor, index ((i*n + j)*n + k)*n + l.
    h2: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn new(
        n_orb: usize,
        n_elec: usize,
        ms2: i32,
        e_core: f64,
        h1: DMatrix<f64>,
        h2: Vec<f64>,
    ) -> Result<Self, IntegralsError> {
        assert_eq!(h1.nrows(), n_orb);
        assert_eq!(h1.ncols(), n_orb);
        assert_eq!(h2.len(), n_orb.pow(4));
        if n_elec > 2 * n_orb {
            return Err(IntegralsError::TooManyElectrons { n_elec, n_orb });
        }
        let ints = MolecularIntegrals {
            n_orb,
            n_elec,
            ms2,
            e_core,
            h1,
            h2,
        };
        ints.validate_symmetry()?;
        Ok(ints)
    }

    /// All-zero integrals, for incremental construction in tests and builders.
    pub fn empty(n_orb: usize, n_elec: usize, ms2: i32) -> Self {
        MolecularIntegrals {
            n_orb,
            n_elec,
            ms2,
            e_core: 0.0,
            h1: DMatrix::zeros(n_orb, n_orb),
            h2: vec![0.0; n_orb.pow(4)],
        }
    }

    fn validate_symmetry(&self) -> Result<(), IntegralsError> {
        let n = self.n_orb;
        for i in 0..n {
            for j in (i + 1)..n {
                let dev = (self.h1[(i, j)] - self.h1[(j, i)]).abs();
                if dev > SYMMETRY_TOL {
                    return Err(IntegralsError::AsymmetricH1 { i, j, dev });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.h2_get(i, j, k, l);
                        for w in [
                            self.h2_get(j, i, k, l),
                            self.h2_get(i, j, l, k),
                            self.h2_get(k, l, i, j),
                        ] {
                            let dev = (v - w).abs();
                            if dev > SYMMETRY_TOL {
                                return Err(IntegralsError::AsymmetricH2 { i, j, k, l, dev });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }
    pub fn n_elec(&self) -> usize {
        self.n_elec
    }
    pub fn ms2(&self) -> i32 {
        self.ms2
    }
    pub fn e_core(&self) -> f64 {
        self.e_core
    }
    pub fn set_e_core(&mut self, value: f64) {
        self.e_core = value;
    }
    pub fn h1(&self) -> &DMatrix<f64> {
        &self.h1
    }

    #[inline]
    pub fn h2_get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.h2[((i * self.n_orb + j) * self.n_orb + k) * self.n_orb + l]
    }

    /// Sets (ij|kl) and all 8 symmetry-equivalent slots.
    pub fn h2_set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let n = self.n_orb;
        for (a, b, c, d) in [
            (i, j, k, l),
            (j, i, k, l),
            (i, j, l, k),
            (j, i, l, k),
            (k, l, i, j),
            (l, k, i, j),
            (k, l, j, i),
            (l, k, j, i),
        ] {
            self.h2[((a * n + b) * n + c) * n + d] = value;
        }
    }

    pub fn h1_set(&mut self, i: usize, j: usize, value: f64) {
        self.h1[(i, j)] = value;
        self.h1[(j, i)] = value;
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orb
    }

    /// Spin-orbital one-body element under interleaved ordering.
    #[inline]
    pub fn h1_so(&self, m: usize, n: usize) -> f64 {
        if m % 2 == n % 2 {
            self.h1[(m / 2, n / 2)]
        } else {
            0.0
        }
    }

    /// Antisymmetrized spin-orbital element <MN||PQ> = <MN|PQ> - <MN|QP>.
    #[inline]
    pub fn antisym_so(&self, m: usize, n: usize, p: usize, q: usize) -> f64 {
        let direct = if m % 2 == p % 2 && n % 2 == q % 2 {
            self.h2_get(m / 2, p / 2, n / 2, q / 2)
        } else {
            0.0
        };
        let exchange = if m % 2 == q % 2 && n % 2 == p % 2 {
            self.h2_get(m / 2, q / 2, n / 2, p / 2)
        } else {
            0.0
        };
        direct - exchange
    }
}

/// Second-quantized Hamiltonian over interleaved spin orbitals:
/// `H = e_core + sum h_pq a^dag_p a_q + 1/2 sum (pq|rs) a^dag_p a^dag_r a_s a_q`.
pub fn build_hamiltonian(ints: &MolecularIntegrals) -> FermionOperator {
    let n = ints.n_orb();
    let mut op = FermionOperator::zero();
    if ints.e_core() != 0.0 {
        op.add_term(Complex64::new(ints.e_core(), 0.0), Vec::new());
    }
    for p in 0..n {
        for q in 0..n {
            let v = ints.h1[(p, q)];
            if v == 0.0 {
                continue;
            }
            for spin in 0..2 {
                op.add_term(
                    Complex64::new(v, 0.0),
                    vec![
                        Ladder::create(2 * p + spin),
                        Ladder::annihilate(2 * q + spin),
                    ],
                );
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.h2_get(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (cp, cr) = (2 * p + sigma, 2 * r + tau);
                            let (as_, aq) = (2 * s + tau, 2 * q + sigma);
                            if cp == cr || as_ == aq {
                                continue; // nilpotent
                            }
                            op.add_term(
                                Complex64::new(0.5 * v, 0.0),
                                vec![
                                    Ladder::create(cp),
                                    Ladder::create(cr),
                                    Ladder::annihilate(as_),
                                    Ladder::annihilate(aq),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    op
}

/// Parses a bitstring like "1100"; character k is spin orbital k.
pub fn parse_occupation(bits: &str) -> Result<Vec<bool>, IntegralsError> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(IntegralsError::MalformedBundle(format!(
                "invalid occupation character '{other}'"
            ))),
        })
        .collect()
}

/// <HF|H|HF> evaluated analytically from the integrals for a determinant
/// given as a spin-orbital occupation bitstring.
pub fn hf_energy(ints: &MolecularIntegrals, occupation: &str) -> Result<f64, IntegralsError> {
    let occ = parse_occupation(occupation)?;
    if occ.len() != ints.n_spin_orbitals() {
        return Err(IntegralsError::WrongOccupationLength {
            found: occ.len(),
            expected: ints.n_spin_orbitals(),
        });
    }
    let occupied: Vec<usize> = occ
        .iter()
        .enumerate()
        .filter(|(_, &o)| o)
        .map(|(m, _)| m)
        .collect();
    if occupied.len() != ints.n_elec() {
        return Err(IntegralsError::WrongParticleCount {
            found: occupied.len(),
            expected: ints.n_elec(),
        });
    }
    let mut energy = ints.e_core();
    for &m in &occupied {
        energy += ints.h1_so(m, m);
    }
    for &m in &occupied {
        for &n in &occupied {
            if m != n {
                energy += 0.5 * ints.antisym_so(m, n, m, n);
            }
        }
    }
    Ok(energy)
}

/// The canonical Hartree-Fock occupation for the integral set: lowest spin
/// orbitals filled, alpha before beta, honoring ms2.
pub fn reference_occupation(ints: &MolecularIntegrals) -> String {
    let n_alpha = (ints.n_elec() as i32 + ints.ms2()) as usize / 2;
    let n_beta = ints.n_elec() - n_alpha;
    let mut bits = vec!['0'; ints.n_spin_orbitals()];
    for p in 0..n_alpha {
        bits[2 * p] = '1';
    }
    for p in 0..n_beta {
        bits[2 * p + 1] = '1';
    }
    bits.into_iter().collect()
}

// ---------------------------------------------------------------------------
// FCIDUMP
// ---------------------------------------------------------------------------

/// Parses Molpro-style FCIDUMP text.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals, IntegralsError> {
    let mut lines = text.lines().enumerate();
    let mut header = String::new();
    let mut header_done = false;
    for (_, line) in lines.by_ref() {
        let trimmed = line.trim();
        header.push(' ');
        header.push_str(trimmed);
        if trimmed.contains("&END") || trimmed.ends_with('/') {
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(IntegralsError::MalformedHeader(
            "missing &END terminator".into(),
        ));
    }
    if !header.trim_start().starts_with("&FCI") {
        return Err(IntegralsError::MalformedHeader(
            "missing &FCI marker".into(),
        ));
    }
    let n_orb = parse_header_field(&header, "NORB")?
        .ok_or_else(|| IntegralsError::MalformedHeader("missing NORB".into()))?
        as usize;
    let n_elec = parse_header_field(&header, "NELEC")?
        .ok_or_else(|| IntegralsError::MalformedHeader("missing NELEC".into()))?
        as usize;
    let ms2 = parse_header_field(&header, "MS2")?.unwrap_or(0) as i32;

    if n_elec > 2 * n_orb {
        return Err(IntegralsError::TooManyElectrons { n_elec, n_orb });
    }

    let mut ints = MolecularIntegrals::empty(n_orb, n_elec, ms2);
    let mut seen_h1: Vec<bool> = vec![false; n_orb * n_orb];
    let mut seen_h2: Vec<bool> = vec![false; n_orb.pow(4)];
    let mut seen_core = false;

    for (line_no, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(IntegralsError::MalformedLine {
                line: line_no + 1,
                reason: format!("expected `value i j k l`, found {} fields", fields.len()),
            });
        }
        let value: f64 = fields[0].parse().map_err(|_| IntegralsError::MalformedLine {
            line: line_no + 1,
            reason: format!("cannot parse value `{}`", fields[0]),
        })?;
        let idx: Vec<usize> = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<usize>().map_err(|_| IntegralsError::MalformedLine {
                    line: line_no + 1,
                    reason: format!("cannot parse index `{f}`"),
                })
            })
            .collect::<Result<_, _>>()?;
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        for &ix in &idx {
            if ix > n_orb {
                return Err(IntegralsError::IndexOutOfRange {
                    line: line_no + 1,
                    index: ix,
                    n_orb,
                });
            }
        }
        match (i, j, k, l) {
            (0, 0, 0, 0) => {
                if seen_core && (ints.e_core() - value).abs() > SYMMETRY_TOL {
                    return Err(IntegralsError::ConflictingDuplicate {
                        i: 0,
                        j: 0,
                        k: 0,
                        l: 0,
                        a: ints.e_core(),
                        b: value,
                    });
                }
                ints.set_e_core(value);
                seen_core = true;
            }
            (i, 0, 0, 0) if i > 0 => {
                // Orbital-energy line; carried by some writers, not part of H.
            }
            (i, j, 0, 0) if i > 0 && j > 0 => {
                let (a, b) = (i - 1, j - 1);
                if seen_h1[a * n_orb + b] && (ints.h1[(a, b)] - value).abs() > SYMMETRY_TOL {
                    return Err(IntegralsError::ConflictingDuplicate {
                        i,
                        j,
                        k: 0,
                        l: 0,
                        a: ints.h1[(a, b)],
                        b: value,
                    });
                }
                ints.h1_set(a, b, value);
                seen_h1[a * n_orb + b] = true;
                seen_h1[b * n_orb + a] = true;
            }
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (a, b, c, d) = (i - 1, j - 1, k - 1, l - 1);
                let flat = ((a * n_orb + b) * n_orb + c) * n_orb + d;
                if seen_h2[flat] && (ints.h2_get(a, b, c, d) - value).abs() > SYMMETRY_TOL {
                    return Err(IntegralsError::ConflictingDuplicate {
                        i,
                        j,
                        k,
                        l,
                        a: ints.h2_get(a, b, c, d),
                        b: value,
                    });
                }
                ints.h2_set(a, b, c, d, value);
                for (p, q, r, s) in [
                    (a, b, c, d),
                    (b, a, c, d),
                    (a, b, d, c),
                    (b, a, d, c),
                    (c, d, a, b),
                    (d, c, a, b),
                    (c, d, b, a),
                    (d, c, b, a),
                ] {
                    seen_h2[((p * n_orb + q) * n_orb + r) * n_orb + s] = true;
                }
            }
            _ => {
                return Err(IntegralsError::MalformedLine {
                    line: line_no + 1,
                    reason: format!("unsupported index pattern ({i} {j} {k} {l})"),
                });
            }
        }
    }
    Ok(ints)
}

fn parse_header_field(header: &str, key: &str) -> Result<Option<i64>, IntegralsError> {
    let Some(pos) = header.find(key) else {
        return Ok(None);
    };
    let rest = &header[pos + key.len()..];
    let rest = rest.trim_start();
    let rest = rest
        .strip_prefix('=')
        .ok_or_else(|| IntegralsError::MalformedHeader(format!("{key} without `=`")))?;
    let value: String = rest
        .trim_start()
        .chars()
        .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
        .collect();
    value
        .parse::<i64>()
        .map(Some)
        .map_err(|_| IntegralsError::MalformedHeader(format!("cannot parse {key} value")))
}

/// Writes canonical FCIDUMP text: one representative per 8-fold symmetry
/// class, values at 17 significant digits, two-electron block first, then
/// one-electron, then the core energy.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_orb();
    let mut out = String::new();
    out.push_str(&format!(
        "&FCI NORB={},NELEC={},MS2={},\n&END\n",
        n,
        ints.n_elec(),
        ints.ms2()
    ));
    // Canonical representative: i >= j, k >= l, pair(i,j) >= pair(k,l).
    for i in 1..=n {
        for j in 1..=i {
            let ij = i * (i - 1) / 2 + j;
            for k in 1..=i {
                for l in 1..=k {
                    let kl = k * (k - 1) / 2 + l;
                    if kl > ij {
                        continue;
                    }
                    let v = ints.h2_get(i - 1, j - 1, k - 1, l - 1);
                    if v != 0.0 {
                        out.push_str(&format_line(v, i, j, k, l));
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=i {
            let v = ints.h1[(i - 1, j - 1)];
            if v != 0.0 {
                out.push_str(&format_line(v, i, j, 0, 0));
            }
        }
    }
    out.push_str(&format_line(ints.e_core(), 0, 0, 0, 0));
    out
}

fn format_line(value: f64, i: usize, j: usize, k: usize, l: usize) -> String {
    format!("{value:>24.16E} {i:>4} {j:>4} {k:>4} {l:>4}\n")
}

// ---------------------------------------------------------------------------
// Orbital bundles
// ---------------------------------------------------------------------------

/// Which block of molecular orbitals an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitalSubset {
    Occupied,
    Virtual,
}

/// Mean-field orbitals plus the atomic projectors used for active-space
/// selection.
#[derive(Debug, Clone)]
pub struct OrbitalBundle {
    pub ao_overlap: DMatrix<f64>,
    pub mo_coeff: DMatrix<f64>,
    pub mo_occ: Vec<f64>,
    pub projector_coeff: DMatrix<f64>,
}

impl OrbitalBundle {
    pub fn validate(&self) -> Result<(), IntegralsError> {
        let n_ao = self.ao_overlap.nrows();
        if self.ao_overlap.ncols() != n_ao {
            return Err(IntegralsError::MalformedBundle(
                "AO overlap must be square".into(),
            ));
        }
        if self.mo_coeff.nrows() != n_ao {
            return Err(IntegralsError::MalformedBundle(format!(
                "MO coefficients have {} AO rows, expected {n_ao}",
                self.mo_coeff.nrows()
            )));
        }
        if self.mo_occ.len() != self.mo_coeff.ncols() {
            return Err(IntegralsError::MalformedBundle(format!(
                "{} occupations for {} MOs",
                self.mo_occ.len(),
                self.mo_coeff.ncols()
            )));
        }
        if self.projector_coeff.nrows() != n_ao {
            return Err(IntegralsError::MalformedBundle(format!(
                "projectors have {} AO rows, expected {n_ao}",
                self.projector_coeff.nrows()
            )));
        }
        let gram = self.mo_coeff.transpose() * &self.ao_overlap * &self.mo_coeff;
        let dev = (&gram - DMatrix::identity(gram.nrows(), gram.ncols()))
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if dev > 1e-8 {
            return Err(IntegralsError::NonOrthonormal(dev));
        }
        let total: f64 = self.mo_occ.iter().sum();
        if (total - total.round()).abs() > 1e-8 {
            return Err(IntegralsError::BadOccupationSum { found: total });
        }
        Ok(())
    }

    pub fn n_mo(&self) -> usize {
        self.mo_coeff.ncols()
    }

    pub fn n_elec(&self) -> usize {
        self.mo_occ.iter().sum::<f64>().round() as usize
    }

    /// Indices of occupied (occ > 0) and empty molecular orbitals.
    pub fn subset_indices(&self, subset: OrbitalSubset) -> Vec<usize> {
        self.mo_occ
            .iter()
            .enumerate()
            .filter(|(_, &o)| match subset {
                OrbitalSubset::Occupied => o > 0.0,
                OrbitalSubset::Virtual => o == 0.0,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Parses the structured text layout: named sections, each a dimension header
/// followed by whitespace-separated rows. `#` starts a comment line.
pub fn parse_orbital_bundle(text: &str) -> Result<OrbitalBundle, IntegralsError> {
    let mut tokens = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .peekable();
    let mut ao_overlap = None;
    let mut mo_coeff = None;
    let mut mo_occ: Option<Vec<f64>> = None;
    let mut projectors = None;

    while let Some(section) = tokens.next() {
        match section {
            "AO_OVERLAP" | "MO_COEFF" | "PROJECTORS" => {
                let rows = next_dim(&mut tokens, section)?;
                let cols = next_dim(&mut tokens, section)?;
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows * cols {
                    data.push(next_value(&mut tokens, section)?);
                }
                let m = DMatrix::from_row_slice(rows, cols, &data);
                match section {
                    "AO_OVERLAP" => ao_overlap = Some(m),
                    "MO_COEFF" => mo_coeff = Some(m),
                    _ => projectors = Some(m),
                }
            }
            "MO_OCC" => {
                let count = next_dim(&mut tokens, section)?;
                let mut occ = Vec::with_capacity(count);
                for _ in 0..count {
                    occ.push(next_value(&mut tokens, section)?);
                }
                mo_occ = Some(occ);
            }
            other => {
                return Err(IntegralsError::MalformedBundle(format!(
                    "unknown section `{other}`"
                )));
            }
        }
    }
    let bundle = OrbitalBundle {
        ao_overlap: ao_overlap
            .ok_or_else(|| IntegralsError::MalformedBundle("missing AO_OVERLAP".into()))?,
        mo_coeff: mo_coeff
            .ok_or_else(|| IntegralsError::MalformedBundle("missing MO_COEFF".into()))?,
        mo_occ: mo_occ.ok_or_else(|| IntegralsError::MalformedBundle("missing MO_OCC".into()))?,
        projector_coeff: projectors
            .ok_or_else(|| IntegralsError::MalformedBundle("missing PROJECTORS".into()))?,
    };
    bundle.validate()?;
    Ok(bundle)
}

pub fn write_orbital_bundle(bundle: &OrbitalBundle) -> String {
    let mut out = String::new();
    write_matrix(&mut out, "AO_OVERLAP", &bundle.ao_overlap);
    write_matrix(&mut out, "MO_COEFF", &bundle.mo_coeff);
    out.push_str(&format!("MO_OCC {}\n", bundle.mo_occ.len()));
    let occ: Vec<String> = bundle.mo_occ.iter().map(|v| format!("{v:.16E}")).collect();
    out.push_str(&occ.join(" "));
    out.push('\n');
    write_matrix(&mut out, "PROJECTORS", &bundle.projector_coeff);
    out
}

fn write_matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    out.push_str(&format!("{name} {} {}\n", m.nrows(), m.ncols()));
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.16E}", m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn next_dim<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    section: &str,
) -> Result<usize, IntegralsError> {
    tokens
        .next()
        .ok_or_else(|| IntegralsError::MalformedBundle(format!("{section}: missing dimension")))?
        .parse()
        .map_err(|_| IntegralsError::MalformedBundle(format!("{section}: bad dimension")))
}

fn next_value<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    section: &str,
) -> Result<f64, IntegralsError> {
    tokens
        .next()
        .ok_or_else(|| IntegralsError::MalformedBundle(format!("{section}: missing value")))?
        .parse()
        .map_err(|_| IntegralsError::MalformedBundle(format!("{section}: bad value")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn core_only_file() {
        let ints = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 0.5 0 0 0 0\n").unwrap();
        assert_abs_diff_eq!(ints.e_core(), 0.5);
        assert_eq!(ints.n_orb(), 2);
        assert!(ints.h1().iter().all(|&v| v == 0.0));
        assert!(ints.h2.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_integrals_write_header_plus_core_only() {
        let ints = MolecularIntegrals::empty(2, 2, 0);
        let text = write_fcidump(&ints);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3); // &FCI header, &END, core line
        assert!(lines[2].contains(" 0    0    0    0"));
    }

    #[test]
    fn round_trip_preserves_values_exactly() {
        let mut ints = MolecularIntegrals::empty(3, 4, 0);
        ints.set_e_core(0.123456789012345678);
        ints.h1_set(0, 1, -1.5000000000000002);
        ints.h1_set(2, 2, 0.3333333333333333);
        ints.h2_set(0, 1, 2, 2, 0.1234567890123456789);
        ints.h2_set(1, 1, 0, 0, -7.000000000000001e-3);
        let text = write_fcidump(&ints);
        let reparsed = parse_fcidump(&text).unwrap();
        assert_eq!(reparsed, ints);
        // parse . write . parse is idempotent
        assert_eq!(write_fcidump(&reparsed), text);
    }

    #[test]
    fn conflicting_duplicates_rejected() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 1 1 0 0\n2.0 1 1 0 0\n";
        assert!(matches!(
            parse_fcidump(text),
            Err(IntegralsError::ConflictingDuplicate { .. })
        ));
        // agreeing duplicates are fine
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 1 1 0 0\n1.0 1 1 0 0\n 0.0 0 0 0 0\n";
        assert!(parse_fcidump(text).is_ok());
    }

    #[test]
    fn index_out_of_range_rejected() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 3 1 0 0\n";
        assert!(matches!(
            parse_fcidump(text),
            Err(IntegralsError::IndexOutOfRange { index: 3, .. })
        ));
    }

    #[test]
    fn malformed_header_rejected() {
        assert!(matches!(
            parse_fcidump("NORB=2\n&END\n"),
            Err(IntegralsError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_fcidump("&FCI NELEC=2,\n&END\n"),
            Err(IntegralsError::MalformedHeader(_))
        ));
    }

    #[test]
    fn hf_energy_of_empty_occupation_is_core() {
        let mut ints = MolecularIntegrals::empty(2, 0, 0);
        ints.set_e_core(-3.25);
        ints.h1_set(0, 0, 1.0);
        assert_abs_diff_eq!(hf_energy(&ints, "0000").unwrap(), -3.25);
    }

    #[test]
    fn hf_energy_counts_particles() {
        let ints = MolecularIntegrals::empty(2, 2, 0);
        assert!(matches!(
            hf_energy(&ints, "1000"),
            Err(IntegralsError::WrongParticleCount { .. })
        ));
        assert!(matches!(
            hf_energy(&ints, "110"),
            Err(IntegralsError::WrongOccupationLength { .. })
        ));
    }

    #[test]
    fn identity_h1_gives_core_plus_particle_number() {
        let mut ints = MolecularIntegrals::empty(3, 2, 0);
        ints.set_e_core(1.5);
        for p in 0..3 {
            ints.h1_set(p, p, 1.0);
        }
        // H = e_core + N; on a 2-electron determinant: 1.5 + 2
        assert_abs_diff_eq!(hf_energy(&ints, "110000").unwrap(), 3.5);
        let ham = build_hamiltonian(&ints);
        assert_eq!(ham.n_terms(), 1 + 6);
    }

    #[test]
    fn bundle_round_trip() {
        let bundle = OrbitalBundle {
            ao_overlap: DMatrix::identity(2, 2),
            mo_coeff: DMatrix::identity(2, 2),
            mo_occ: vec![2.0, 0.0],
            projector_coeff: DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
        };
        bundle.validate().unwrap();
        let text = write_orbital_bundle(&bundle);
        let parsed = parse_orbital_bundle(&text).unwrap();
        assert_eq!(parsed.mo_occ, bundle.mo_occ);
        assert_eq!(parsed.ao_overlap, bundle.ao_overlap);
        assert_eq!(parsed.n_elec(), 2);
    }

    #[test]
    fn bundle_orthonormality_enforced() {
        let bundle = OrbitalBundle {
            ao_overlap: DMatrix::identity(2, 2),
            mo_coeff: DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
            mo_occ: vec![2.0, 0.0],
            projector_coeff: DMatrix::identity(2, 2),
        };
        assert!(matches!(
            bundle.validate(),
            Err(IntegralsError::NonOrthonormal(_))
        ));
    }
}
