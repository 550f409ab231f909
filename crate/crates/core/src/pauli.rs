//! Signed N-qubit Pauli operators and unsigned Pauli subgroups over GF(2).
//!
//! A Pauli operator is stored bit-packed as `i^phase · Π_j X_j^{x_j} Z_j^{z_j}`
//! with the X factor to the left of the Z factor on every qubit. Qubit 0 is
//! the leftmost character of the string form and the most significant bit of
//! a computational-basis index.

use crate::linalg::Matrix;
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Maximum supported qubit count for the bit-packed representation.
pub const MAX_QUBITS: usize = 64;

/// A signed Pauli operator `i^phase · Π_j X_j^{x_j} Z_j^{z_j}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliOp {
    pub fn new(n: usize, x: u64, z: u64, phase: u8) -> Self {
        assert!(n <= MAX_QUBITS, "qubit count {n} exceeds {MAX_QUBITS}");
        let mask = mask(n);
        assert!(x & !mask == 0 && z & !mask == 0, "mask wider than n qubits");
        PauliOp { n, x, z, phase: phase & 3 }
    }

    pub fn identity(n: usize) -> Self {
        PauliOp::new(n, 0, 0, 0)
    }

    /// The Hermitian representative of an unsigned Pauli: one of
    /// `{I,X,Y,Z}^⊗n` with an overall `+` sign.
    pub fn hermitian(n: usize, x: u64, z: u64) -> Self {
        PauliOp::new(n, x, z, ((x & z).count_ones() & 3) as u8)
    }

    /// Single-qubit X on `j`, identity elsewhere.
    pub fn x_on(n: usize, j: usize) -> Self {
        PauliOp::new(n, bit(n, j), 0, 0)
    }

    /// Single-qubit Z on `j`, identity elsewhere.
    pub fn z_on(n: usize, j: usize) -> Self {
        PauliOp::new(n, 0, bit(n, j), 0)
    }

    /// Single-qubit Y on `j`, identity elsewhere.
    pub fn y_on(n: usize, j: usize) -> Self {
        PauliOp::new(n, bit(n, j), bit(n, j), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// X bit of qubit `j`.
    pub fn x_bit(&self, j: usize) -> bool {
        self.x & bit(self.n, j) != 0
    }

    /// Z bit of qubit `j`.
    pub fn z_bit(&self, j: usize) -> bool {
        self.z & bit(self.n, j) != 0
    }

    /// Whether the operator is Hermitian (phase parity matches the Y count).
    pub fn is_hermitian(&self) -> bool {
        (self.phase & 1) as u32 == ((self.x & self.z).count_ones() & 1)
    }

    /// Sign of a Hermitian Pauli relative to its `+` representative.
    /// Panics if the operator is not Hermitian.
    pub fn sign(&self) -> i8 {
        assert!(self.is_hermitian(), "sign of a non-Hermitian Pauli");
        let rep = ((self.x & self.z).count_ones() & 3) as u8;
        if (self.phase + 4 - rep) & 3 == 0 {
            1
        } else {
            -1
        }
    }

    /// Drop the phase, returning the Hermitian `+` representative.
    pub fn unsigned(&self) -> Self {
        PauliOp::hermitian(self.n, self.x, self.z)
    }

    pub fn negate(&self) -> Self {
        PauliOp::new(self.n, self.x, self.z, (self.phase + 2) & 3)
    }

    /// Exact signed product. Both operands must act on the same register.
    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        assert_eq!(self.n, other.n, "Pauli product dimension mismatch");
        // Z^{z1} X^{x2} = (-1)^{|z1∧x2|} X^{x2} Z^{z1}
        let swaps = (self.z & other.x).count_ones() as u8;
        PauliOp::new(
            self.n,
            self.x ^ other.x,
            self.z ^ other.z,
            (self.phase + other.phase + 2 * (swaps & 1)) & 3,
        )
    }

    pub fn adjoint(&self) -> PauliOp {
        // (i^p X Z)† = (-i)^p (-1)^{|x∧z|} X Z
        let flips = ((self.x & self.z).count_ones() & 1) as u8;
        PauliOp::new(self.n, self.x, self.z, (4 - self.phase + 2 * flips) & 3)
    }

    /// True iff the two operators commute (symplectic form vanishes).
    pub fn commutes(&self, other: &PauliOp) -> bool {
        assert_eq!(self.n, other.n, "commutation check dimension mismatch");
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        s & 1 == 0
    }

    /// The GF(2) row vector (x | z) of the unsigned part.
    pub fn vector(&self) -> u128 {
        (self.x as u128) | ((self.z as u128) << self.n)
    }

    pub fn from_vector(n: usize, v: u128) -> Self {
        let m = mask(n) as u128;
        PauliOp::hermitian(n, (v & m) as u64, ((v >> n) & m) as u64)
    }

    /// Embed an operator on `self.n` qubits into a register of `n` qubits at
    /// `offset`, identity elsewhere.
    pub fn embed(&self, n: usize, offset: usize) -> PauliOp {
        assert!(offset + self.n <= n, "embedding out of range");
        PauliOp::new(n, self.x << offset_shift(n, self.n, offset), self.z << offset_shift(n, self.n, offset), self.phase)
    }

    /// Restrict to the `len` qubits starting at `offset`; the operator must be
    /// the identity outside that window.
    pub fn restrict(&self, offset: usize, len: usize) -> PauliOp {
        let window = window_mask(self.n, offset, len);
        assert!(
            self.x & !window == 0 && self.z & !window == 0,
            "restriction discards support"
        );
        let sh = offset_shift(self.n, len, offset);
        PauliOp::new(len, (self.x >> sh) & mask(len), (self.z >> sh) & mask(len), self.phase)
    }

    /// Parse `[+|-|+i|-i]` followed by `n` characters from `IXYZ`.
    pub fn parse(s: &str) -> Result<PauliOp> {
        let s = s.trim();
        let (extra, body) = if let Some(rest) = s.strip_prefix("+i").or_else(|| s.strip_prefix("-i")) {
            (if s.starts_with('+') { 1u8 } else { 3u8 }, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2u8, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0u8, rest)
        } else {
            (0u8, s)
        };
        let n = body.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("bad Pauli string length in {s:?}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (j, c) in body.chars().enumerate() {
            let b = bit(n, j);
            match c {
                'I' => {}
                'X' => x |= b,
                'Y' => {
                    x |= b;
                    z |= b;
                }
                'Z' => z |= b,
                _ => return Err(Error::Parse(format!("bad Pauli letter {c:?} in {s:?}"))),
            }
        }
        let rep = PauliOp::hermitian(n, x, z);
        Ok(PauliOp::new(n, x, z, (rep.phase + extra) & 3))
    }

    /// Dense matrix, dimension `2^n`.
    pub fn to_matrix(&self) -> Matrix {
        assert!(self.n <= 12, "dense Pauli export capped at 12 qubits");
        let dim = 1usize << self.n;
        let mut m = Matrix::zeros(dim, dim);
        let ph = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        let (xi, zi) = (self.index_mask(self.x), self.index_mask(self.z));
        for col in 0..dim {
            let row = col ^ xi;
            let sgn = ((col & zi).count_ones() & 1) as u8;
            m[(row, col)] = ph[((self.phase + 2 * sgn) & 3) as usize];
        }
        m
    }

    /// Apply to every column of a dense matrix in place (left multiplication).
    pub fn apply_left(&self, m: &mut Matrix) {
        let dim = 1usize << self.n;
        assert_eq!(m.rows(), dim);
        let ph = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        let (xi, zi) = (self.index_mask(self.x), self.index_mask(self.z));
        let cols = m.cols();
        let mut out = Matrix::zeros(dim, cols);
        for b in 0..dim {
            let f = ph[((self.phase + 2 * (((b & zi).count_ones() & 1) as u8)) & 3) as usize];
            let r = b ^ xi;
            for c in 0..cols {
                out[(r, c)] = f * m[(b, c)];
            }
        }
        *m = out;
    }

    /// Translate a qubit mask (bit j = qubit j) into a basis-index mask where
    /// qubit 0 is the most significant bit.
    fn index_mask(&self, qmask: u64) -> usize {
        let mut out = 0usize;
        for j in 0..self.n {
            if qmask & bit(self.n, j) != 0 {
                out |= 1 << (self.n - 1 - j);
            }
        }
        out
    }

    // In-place single-gate conjugation rules, written on the packed
    // (x, z, phase) form. Per qubit the stored factor is X^x Z^z, so e.g.
    // conjugation by S sends X^x Z^z to i^x X^x Z^{z⊕x}.

    pub(crate) fn h_at(&mut self, j: usize) {
        let b = bit(self.n, j);
        let (a, c) = (self.x & b != 0, self.z & b != 0);
        if a && c {
            self.phase = (self.phase + 2) & 3;
        }
        if a != c {
            self.x ^= b;
            self.z ^= b;
        }
    }

    pub(crate) fn s_at(&mut self, j: usize) {
        let b = bit(self.n, j);
        if self.x & b != 0 {
            self.z ^= b;
            self.phase = (self.phase + 1) & 3;
        }
    }

    pub(crate) fn sdg_at(&mut self, j: usize) {
        let b = bit(self.n, j);
        if self.x & b != 0 {
            self.z ^= b;
            self.phase = (self.phase + 3) & 3;
        }
    }

    pub(crate) fn cz_at(&mut self, j: usize, k: usize) {
        let (bj, bk) = (bit(self.n, j), bit(self.n, k));
        let (a, c) = (self.x & bj != 0, self.x & bk != 0);
        if a {
            self.z ^= bk;
        }
        if c {
            self.z ^= bj;
        }
        if a && c {
            self.phase = (self.phase + 2) & 3;
        }
    }

    pub(crate) fn cnot_at(&mut self, control: usize, target: usize) {
        let (bc, bt) = (bit(self.n, control), bit(self.n, target));
        if self.x & bc != 0 {
            self.x ^= bt;
        }
        if self.z & bt != 0 {
            self.z ^= bc;
        }
    }

    pub(crate) fn swap_at(&mut self, j: usize, k: usize) {
        let (bj, bk) = (bit(self.n, j), bit(self.n, k));
        if (self.x & bj != 0) != (self.x & bk != 0) {
            self.x ^= bj | bk;
        }
        if (self.z & bj != 0) != (self.z & bk != 0) {
            self.z ^= bj | bk;
        }
    }

    /// Conjugation by a Hermitian Pauli: a sign flip when anticommuting.
    pub(crate) fn pauli_conj_by(&mut self, p: &PauliOp) {
        if !self.commutes(p) {
            self.phase = (self.phase + 2) & 3;
        }
    }
}

impl std::fmt::Display for PauliOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rep = ((self.x & self.z).count_ones() & 3) as u8;
        match (self.phase + 4 - rep) & 3 {
            0 => {}
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i")?,
            _ => unreachable!(),
        }
        for j in 0..self.n {
            let c = match (self.x_bit(j), self.z_bit(j)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

fn bit(n: usize, j: usize) -> u64 {
    assert!(j < n, "qubit index {j} out of range for {n} qubits");
    1u64 << j
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn window_mask(n: usize, offset: usize, len: usize) -> u64 {
    assert!(offset + len <= n);
    mask(len) << offset
}

// Qubit bits are stored LSB-first, so an embed at `offset` is a plain shift.
fn offset_shift(_n: usize, _len: usize, offset: usize) -> usize {
    offset
}

/// Reduced row echelon form of GF(2) row vectors of the given bit width.
/// Rows come back sorted by pivot position; zero rows are dropped.
pub(crate) fn gf2_rref(rows: &mut Vec<u128>, width: usize) {
    let mut out: Vec<u128> = Vec::new();
    for col in 0..width {
        let b = 1u128 << col;
        if let Some(i) = rows.iter().position(|r| r & b != 0) {
            let piv = rows.swap_remove(i);
            for r in rows.iter_mut() {
                if *r & b != 0 {
                    *r ^= piv;
                }
            }
            for r in out.iter_mut() {
                if *r & b != 0 {
                    *r ^= piv;
                }
            }
            out.push(piv);
            rows.retain(|r| *r != 0);
            if rows.is_empty() {
                break;
            }
        }
    }
    // Pivots were produced in ascending column order already.
    *rows = out;
}

/// Kernel basis of the linear map given by `rows` (each row is one equation)
/// acting on `width`-bit vectors.
pub(crate) fn gf2_kernel(rows: &[u128], width: usize) -> Vec<u128> {
    let mut rr: Vec<u128> = rows.to_vec();
    gf2_rref(&mut rr, width);
    let pivots: Vec<usize> = rr.iter().map(|r| r.trailing_zeros() as usize).collect();
    let mut basis = Vec::new();
    for free in 0..width {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = 1u128 << free;
        for (r, &p) in rr.iter().zip(&pivots) {
            if r & (1u128 << free) != 0 {
                v |= 1u128 << p;
            }
        }
        basis.push(v);
    }
    basis
}

/// An unsigned Pauli subgroup: the GF(2) span of (x|z) vectors, stored as a
/// canonical RREF basis so equal subgroups compare equal bytewise.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliSubgroup {
    n: usize,
    basis: Vec<u128>,
}

impl PauliSubgroup {
    pub fn trivial(n: usize) -> Self {
        PauliSubgroup { n, basis: Vec::new() }
    }

    pub fn from_vectors(n: usize, vectors: impl IntoIterator<Item = u128>) -> Self {
        let mut rows: Vec<u128> = vectors.into_iter().filter(|v| *v != 0).collect();
        gf2_rref(&mut rows, 2 * n);
        PauliSubgroup { n, basis: rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Basis as Hermitian `+` Pauli representatives.
    pub fn basis_paulis(&self) -> Vec<PauliOp> {
        self.basis.iter().map(|&v| PauliOp::from_vector(self.n, v)).collect()
    }

    pub fn basis_vectors(&self) -> &[u128] {
        &self.basis
    }

    /// Membership of an unsigned Pauli, by GF(2) elimination against the basis.
    pub fn contains(&self, p: &PauliOp) -> bool {
        assert_eq!(p.n(), self.n);
        let mut v = p.vector();
        for b in &self.basis {
            if v & (1u128 << b.trailing_zeros()) != 0 {
                v ^= b;
            }
        }
        v == 0
    }

    /// All `2^rank` elements, as Hermitian representatives. Capped for safety.
    pub fn elements(&self) -> Vec<PauliOp> {
        assert!(self.rank() <= 20, "subgroup too large to enumerate");
        let r = self.rank();
        (0..1u32 << r)
            .map(|sel| {
                let mut v = 0u128;
                for (i, b) in self.basis.iter().enumerate() {
                    if sel >> i & 1 == 1 {
                        v ^= b;
                    }
                }
                PauliOp::from_vector(self.n, v)
            })
            .collect()
    }

    /// Rank of the symplectic Gram matrix of the basis (always even).
    pub fn symplectic_gram_rank(&self) -> usize {
        let r = self.rank();
        let ps = self.basis_paulis();
        let mut rows: Vec<u128> = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = 0u128;
            for j in 0..r {
                if !ps[i].commutes(&ps[j]) {
                    row |= 1u128 << j;
                }
            }
            rows.push(row);
        }
        let mut rr = rows;
        gf2_rref(&mut rr, r);
        rr.len()
    }
}

/// Subgroup generated by the unsigned parts of `gens` on an `n`-qubit
/// register. `n` is explicit so the empty generating set is well defined.
pub fn subgroup_from_generators(n: usize, gens: &[PauliOp]) -> PauliSubgroup {
    for g in gens {
        assert_eq!(g.n(), n, "generator register size mismatch");
    }
    PauliSubgroup::from_vectors(n, gens.iter().map(|g| g.vector()))
}

/// The Pauli support subgroup of a set of dense generators: the group
/// generated by every unsigned Pauli whose Hilbert–Schmidt overlap with some
/// generator exceeds `tol` relative to that generator's Frobenius norm.
pub fn pauli_support_of_unitary_group(gens: &[Matrix], tol: f64) -> Result<PauliSubgroup> {
    assert!(tol > 0.0, "tolerance must be positive");
    let dim = gens.first().map(|g| g.rows()).unwrap_or(1);
    if !dim.is_power_of_two() {
        return Err(Error::Parse(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > 13 {
        return Err(Error::CapExceeded(format!("pauli support scan at {n} qubits")));
    }
    for g in gens {
        assert_eq!(g.rows(), dim, "generator dimensions differ");
        assert_eq!(g.cols(), dim, "generators must be square");
    }
    let norms: Vec<f64> = gens.iter().map(|g| g.frobenius_norm()).collect();
    let mut vectors = Vec::new();
    for v in 0..(1u128 << (2 * n)) {
        if v == 0 {
            continue;
        }
        let p = PauliOp::from_vector(n, v);
        let (xi, zi) = (p.index_mask(p.x), p.index_mask(p.z));
        let ph = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        for (g, nrm) in gens.iter().zip(&norms) {
            // tr(G P) = Σ_b ⟨b|G|b⊕x⟩ · P-phase(b)
            let mut tr = C64::new(0.0, 0.0);
            for b in 0..dim {
                let f = ph[((p.phase + 2 * (((b & zi).count_ones() & 1) as u8)) & 3) as usize];
                tr += g[(b ^ xi, b)] * f;
            }
            if tr.norm() > tol * nrm.max(f64::MIN_POSITIVE) {
                vectors.push(v);
                break;
            }
        }
    }
    Ok(PauliSubgroup::from_vectors(n, vectors))
}
