//! Clifford conjugation of Pauli subgroups into standard form.
//!
//! Any Pauli subgroup can be conjugated, up to phase, onto
//! `{I,X,Y,Z}^⊗n1 ⊗ {I,Z}^⊗n2 ⊗ {I}^⊗n3`: anticommuting generator pairs are
//! moved one at a time onto fresh (Z, X) qubit slots, then the remaining
//! abelian part is moved onto single Z slots.

use crate::clifford::CliffordTableau;
use crate::pauli::{subgroup_from_generators, PauliOp, PauliSubgroup};
use crate::{Error, Result};

/// A canonicalizing Clifford `w` with the block sizes of the target form:
/// `w · Q · w†` equals, mod phase, the subgroup generated by X/Z on the first
/// `n1` qubits and Z on the next `n2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StandardForm {
    w: CliffordTableau,
    n1: usize,
    n2: usize,
    n3: usize,
}

impl StandardForm {
    /// A standard form whose subgroup is already in standard position.
    pub fn standard(n1: usize, n2: usize, n3: usize) -> Self {
        StandardForm { w: CliffordTableau::identity(n1 + n2 + n3), n1, n2, n3 }
    }

    pub fn new(w: CliffordTableau, n1: usize, n2: usize, n3: usize) -> Self {
        assert_eq!(w.n(), n1 + n2 + n3, "block sizes must partition the register");
        StandardForm { w, n1, n2, n3 }
    }

    pub fn w(&self) -> &CliffordTableau {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2 + self.n3
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn n3(&self) -> usize {
        self.n3
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Generators of the standard-position subgroup: X_j, Z_j on the first
    /// block and Z_j on the second, all with `+` signs.
    pub fn standard_generators(&self) -> Vec<PauliOp> {
        let n = self.n();
        let mut gens = Vec::new();
        for j in 0..self.n1 {
            gens.push(PauliOp::x_on(n, j));
            gens.push(PauliOp::z_on(n, j));
        }
        for j in self.n1..self.n1 + self.n2 {
            gens.push(PauliOp::z_on(n, j));
        }
        gens
    }

    pub fn standard_subgroup(&self) -> PauliSubgroup {
        subgroup_from_generators(self.n(), &self.standard_generators())
    }

    /// Generators of the original subgroup `w† R w` with `+` signs chosen so
    /// that the standard generators map onto them exactly.
    pub fn original_generators(&self) -> Vec<PauliOp> {
        let winv = self.w.inverse();
        self.standard_generators().iter().map(|g| winv.conjugate_pauli(g)).collect()
    }
}

/// Clifford built from S†, H, CNOT and SWAP that maps `p` onto Z of the
/// `target` qubit (up to sign). `p` must be non-identity and supported on
/// qubits at or after `target`.
pub(crate) fn reduce_to_z(p: &PauliOp, target: usize) -> Result<CliffordTableau> {
    if p.is_identity_up_to_phase() {
        return Err(Error::IdentityPauli);
    }
    let n = p.n();
    for j in 0..target {
        assert!(!p.x_bit(j) && !p.z_bit(j), "support below the target qubit");
    }
    // Local letters to Z: S† turns Y into X, H turns X into Z.
    let mut w = CliffordTableau::identity(n);
    let mut v = *p;
    for j in target..n {
        match (v.x_bit(j), v.z_bit(j)) {
            (true, true) => {
                w.left_sdg(j);
                v.sdg_at(j);
                w.left_h(j);
                v.h_at(j);
            }
            (true, false) => {
                w.left_h(j);
                v.h_at(j);
            }
            _ => {}
        }
    }
    debug_assert_eq!(v.x_mask(), 0);
    let a = (target..n).find(|&j| v.z_bit(j)).expect("non-identity image");
    // CNOT_{j,a} turns Z_j Z_a into Z_a, collapsing the Z string onto a.
    for j in target..n {
        if j != a && v.z_bit(j) {
            w.left_cnot(j, a);
            v.cnot_at(j, a);
        }
    }
    if a != target {
        w.left_swap(target, a);
    }
    debug_assert_eq!(w.conjugate_pauli(p).unsigned(), PauliOp::z_on(n, target));
    Ok(w)
}

/// Clifford mapping an anticommuting pair `(p, q)` onto (Z, X) of the
/// `target` qubit, up to signs. Both operators must be supported on qubits at
/// or after `target`.
pub(crate) fn reduce_pair(p: &PauliOp, q: &PauliOp, target: usize) -> Result<CliffordTableau> {
    if p.commutes(q) {
        return Err(Error::CommutingPair);
    }
    let n = p.n();
    let mut w = reduce_to_z(p, target)?;
    let q1 = w.conjugate_pauli(q);
    debug_assert!(q1.x_bit(target), "anticommuting image must carry X on the target");
    if q1.z_bit(target) {
        w.left_sdg(target);
    }
    let q2 = w.conjugate_pauli(q);
    // Peel the tail beyond the target qubit, if any, onto Z_{target+1} and
    // absorb it with a CZ.
    let tail = PauliOp::new(
        n,
        q2.x_mask() & !(1 << target),
        q2.z_mask() & !(1 << target),
        0,
    );
    if !tail.is_identity_up_to_phase() {
        w = reduce_to_z(&tail.unsigned(), target + 1)?.compose(&w);
        w.left_cz(target, target + 1);
    }
    debug_assert_eq!(w.conjugate_pauli(p).unsigned(), PauliOp::z_on(n, target));
    debug_assert_eq!(w.conjugate_pauli(q).unsigned(), PauliOp::x_on(n, target));
    Ok(w)
}

/// Clifford mapping `p` onto Z of the first qubit, up to sign.
pub fn pauli_to_z(p: &PauliOp) -> Result<CliffordTableau> {
    reduce_to_z(p, 0)
}

/// Clifford mapping the anticommuting pair `(p, q)` onto (Z, X) of the first
/// qubit, up to signs.
pub fn pair_to_zx(p: &PauliOp, q: &PauliOp) -> Result<CliffordTableau> {
    reduce_pair(p, q, 0)
}

/// The conjugated subgroup `w · q · w†`, mod phase, as a fresh RREF basis.
pub fn conjugate_subgroup(w: &CliffordTableau, q: &PauliSubgroup) -> PauliSubgroup {
    assert_eq!(w.n(), q.n(), "conjugation dimension mismatch");
    let gens: Vec<PauliOp> = q.basis_paulis().iter().map(|g| w.conjugate_pauli(g)).collect();
    subgroup_from_generators(q.n(), &gens)
}

/// Canonicalize a Pauli subgroup: returns `w` and block sizes (n1, n2, n3)
/// such that `w · q · w†` is the standard subgroup, mod phase.
///
/// Anticommuting pairs are extracted first, then commuting generators; ties
/// are broken by lowest RREF pivot, which makes the result deterministic.
pub fn canonicalize(q: &PauliSubgroup) -> StandardForm {
    let n = q.n();
    let mut residual: Vec<u128> = q.basis_vectors().to_vec();
    let mut w = CliffordTableau::identity(n);
    let mut k = 0usize;
    let mut n1 = 0usize;
    let mut n2 = 0usize;

    let rref = |rows: &mut Vec<u128>| crate::pauli::gf2_rref(rows, 2 * n);

    // Pull out anticommuting pairs while any exist.
    loop {
        rref(&mut residual);
        let ps: Vec<PauliOp> = residual.iter().map(|&v| PauliOp::from_vector(n, v)).collect();
        let mut pair = None;
        'outer: for i in 0..ps.len() {
            for j in (i + 1)..ps.len() {
                if !ps[i].commutes(&ps[j]) {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else { break };
        let step = reduce_pair(&ps[i], &ps[j], k).expect("pair anticommutes");
        let zk = PauliOp::z_on(n, k).vector();
        let xk = PauliOp::x_on(n, k).vector();
        let mut next = Vec::with_capacity(residual.len() - 2);
        for (idx, op) in ps.iter().enumerate() {
            if idx == i || idx == j {
                continue;
            }
            let mut v = step.conjugate_pauli(op).vector();
            if v & zk != 0 {
                v ^= zk;
            }
            if v & xk != 0 {
                v ^= xk;
            }
            next.push(v);
        }
        residual = next;
        w = step.compose(&w);
        n1 += 1;
        k += 1;
    }

    // The rest is abelian: peel one Z slot per generator.
    loop {
        rref(&mut residual);
        let Some(&v) = residual.first() else { break };
        let g = PauliOp::from_vector(n, v);
        let step = reduce_to_z(&g, k).expect("residual generator is non-identity");
        let zk = PauliOp::z_on(n, k).vector();
        let mut next = Vec::with_capacity(residual.len() - 1);
        for &u in residual.iter().skip(1) {
            let mut vv = step.conjugate_pauli(&PauliOp::from_vector(n, u)).vector();
            if vv & zk != 0 {
                vv ^= zk;
            }
            debug_assert_eq!(vv & PauliOp::x_on(n, k).vector(), 0);
            next.push(vv);
        }
        residual = next;
        w = step.compose(&w);
        n2 += 1;
        k += 1;
    }

    StandardForm { w, n1, n2, n3: n - n1 - n2 }
}
