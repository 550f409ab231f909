//! Exact uniform sampling, enumeration, counting and decomposition of
//! symmetric Clifford groups.
//!
//! For a Pauli symmetry in standard form (n1, n2, n3), every symmetric
//! Clifford operator factors uniquely, mod phase, as
//!
//!   W† · (C_{n2}(P_{n2}) ⋯ C_1(P_1)) · V · Π CZ^{ν} · Π S^{μ} · W
//!
//! with S powers `μ_j ∈ {0..3}` and CZ exponents `ν_{jk} ∈ {0,1}` on the
//! second block, `V` a Clifford on the third block, and `C_j(P_j)` a
//! controlled Pauli from qubit j of the second block onto the third.
//! Uniform parameters therefore give exactly uniform group elements, and the
//! parameters can be recovered from any symmetric tableau.

use crate::canonical::{pauli_to_z, StandardForm};
use crate::clifford::{clifford_from_index, clifford_order, random_clifford, CliffordTableau};
use crate::pauli::{PauliOp, PauliSubgroup};
use crate::{Error, Result};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

/// One symmetric Clifford element in its unique parameterization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymCliffordElement {
    sf: StandardForm,
    mu: Vec<u8>,
    nu: Vec<u8>,
    v: CliffordTableau,
    p: Vec<PauliOp>,
}

fn nu_index(n2: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n2);
    j * n2 - j * (j + 1) / 2 + (k - j - 1)
}

impl SymCliffordElement {
    pub fn mu(&self) -> &[u8] {
        &self.mu
    }

    pub fn nu(&self) -> &[u8] {
        &self.nu
    }

    pub fn v(&self) -> &CliffordTableau {
        &self.v
    }

    pub fn p(&self) -> &[PauliOp] {
        &self.p
    }

    pub fn standard_form(&self) -> &StandardForm {
        &self.sf
    }

    /// Assemble the full tableau `W†·(T Π C_j(P_j))·V·(Π CZ^ν)·(Π S^μ)·W`.
    pub fn to_tableau(&self) -> CliffordTableau {
        let (n1, n2, n3) = self.sf.dims();
        let n = self.sf.n();
        let a3 = n1 + n2;
        let mut t = self.sf.w().clone();
        for j in 0..n2 {
            for _ in 0..self.mu[j] {
                t.left_s(n1 + j);
            }
        }
        for j in 0..n2 {
            for k in (j + 1)..n2 {
                if self.nu[nu_index(n2, j, k)] != 0 {
                    t.left_cz(n1 + j, n1 + k);
                }
            }
        }
        if n3 > 0 {
            t.left_apply(&self.v.embed(n, a3));
        }
        // Time-ordered product: C_1 acts first, C_{n2} last.
        for j in 0..n2 {
            if !self.p[j].is_identity_up_to_phase() {
                let target = self.p[j].embed(n, a3);
                t.left_apply(&CliffordTableau::controlled_pauli(n1 + j, &target));
            }
        }
        self.sf.w().inverse().compose(&t)
    }
}

/// |C_{N,Q} / U_0| = 4^{n2} · 2^{n2(n2−1)/2} · |C_{n3}/U_0| · 4^{n2·n3}.
pub fn group_size(sf: &StandardForm) -> BigUint {
    let (_, n2, n3) = sf.dims();
    let mut out = BigUint::from(1u8);
    out <<= 2 * n2;
    out <<= n2 * n2.saturating_sub(1) / 2;
    out *= clifford_order(n3);
    out <<= 2 * n2 * n3;
    out
}

/// Uniform draw from the symmetric Clifford group of `sf`.
pub fn sample_pauli_symmetric(sf: &StandardForm, rng: &mut impl Rng) -> SymCliffordElement {
    let (_, n2, n3) = sf.dims();
    let mu = (0..n2).map(|_| rng.gen_range(0..4u8)).collect();
    let nu = (0..n2 * n2.saturating_sub(1) / 2).map(|_| rng.gen_range(0..2u8)).collect();
    let v = random_clifford(n3, rng);
    let p = (0..n2)
        .map(|_| {
            if n3 == 0 {
                PauliOp::identity(0)
            } else {
                PauliOp::from_vector(n3, rng.gen_range(0..(1u128 << (2 * n3))))
            }
        })
        .collect();
    SymCliffordElement { sf: sf.clone(), mu, nu, v, p }
}

/// The `index`-th element under the lexicographic order (μ, ν, V, P).
pub fn element_from_index(sf: &StandardForm, index: u128) -> SymCliffordElement {
    let (_, n2, n3) = sf.dims();
    let v_count: u128 = {
        let o = clifford_order(n3);
        let digits = o.to_u64_digits();
        match digits.len() {
            0 => 1,
            1 => digits[0] as u128,
            2 => (digits[0] as u128) | ((digits[1] as u128) << 64),
            _ => panic!("enumeration block too large"),
        }
    };
    let p_count: u128 = 1u128 << (2 * n2 * n3);
    let nu_count: u128 = 1u128 << (n2 * n2.saturating_sub(1) / 2);
    let mut idx = index;
    let p_index = idx % p_count;
    idx /= p_count;
    let v_index = idx % v_count;
    idx /= v_count;
    let nu_index_ = idx % nu_count;
    idx /= nu_count;
    let mu_index = idx;

    let mut mu = vec![0u8; n2];
    let mut m = mu_index;
    for j in (0..n2).rev() {
        mu[j] = (m % 4) as u8;
        m /= 4;
    }
    let nbits = n2 * n2.saturating_sub(1) / 2;
    let mut nu = vec![0u8; nbits];
    for (b, slot) in nu.iter_mut().enumerate() {
        *slot = ((nu_index_ >> (nbits - 1 - b)) & 1) as u8;
    }
    let v = clifford_from_index(n3, v_index);
    let mut p = Vec::with_capacity(n2);
    let mut pi = p_index;
    let per = 1u128 << (2 * n3);
    for _ in 0..n2 {
        p.push(PauliOp::from_vector(n3, pi % per.max(1)));
        pi /= per.max(1);
    }
    p.reverse();
    SymCliffordElement { sf: sf.clone(), mu, nu, v, p }
}

/// Enumerate the whole symmetric Clifford group, erroring out when its size
/// exceeds `cap`.
pub fn enumerate_pauli_symmetric(
    sf: &StandardForm,
    cap: u128,
) -> Result<impl Iterator<Item = SymCliffordElement> + '_> {
    let size = group_size(sf);
    if size > BigUint::from(cap) {
        return Err(Error::EnumerationCap { size, cap });
    }
    let total: u128 = size.to_u64_digits().iter().rev().fold(0u128, |acc, &d| (acc << 64) | d as u128);
    let sf = sf.clone();
    Ok((0..total).map(move |i| element_from_index(&sf, i)))
}

/// True iff conjugation by `u` fixes every basis generator of `q` exactly,
/// including the sign (generators taken with `+` signs).
pub fn is_symmetric(u: &CliffordTableau, q: &PauliSubgroup) -> bool {
    assert_eq!(u.n(), q.n(), "symmetry check dimension mismatch");
    q.basis_paulis().iter().all(|g| u.conjugate_pauli(g) == *g)
}

/// Recover the unique parameters of a symmetric Clifford tableau.
///
/// Works in the standard frame: successively fixes the X generator of each
/// second-block qubit in the Heisenberg picture, reading off the S power, the
/// CZ exponents and the controlled-Pauli targets, until only a third-block
/// Clifford remains.
pub fn decompose(u: &CliffordTableau, sf: &StandardForm) -> Result<SymCliffordElement> {
    let n = sf.n();
    assert_eq!(u.n(), n, "decompose dimension mismatch");
    let (n1, n2, n3) = sf.dims();
    let a3 = n1 + n2;

    let r_frame = sf.w().compose(u).compose(&sf.w().inverse());
    for g in sf.standard_generators() {
        if r_frame.conjugate_pauli(&g) != g {
            return Err(Error::NotSymmetric);
        }
    }

    let mut d = r_frame.inverse();
    let mut mu = vec![0u8; n2];
    let mut nu = vec![0u8; n2 * n2.saturating_sub(1) / 2];
    let mut q_list: Vec<PauliOp> = Vec::new();
    let mut t_acc = CliffordTableau::identity(n3);

    for l in 0..n2 {
        let xq = PauliOp::x_on(n, n1 + l);
        let img = d.conjugate_pauli(&xq);
        if !img.x_bit(n1 + l) {
            return Err(Error::Internal("image lost its X component".into()));
        }
        for j in 0..a3 {
            let ok = if j == n1 + l {
                true
            } else if j >= n1 && j > n1 + l {
                !img.x_bit(j)
            } else {
                !img.x_bit(j) && !img.z_bit(j)
            };
            if !ok {
                return Err(Error::Internal(format!("unexpected support on qubit {j}")));
            }
        }

        // Reduce the third-block tail to a Z string (Z on its first qubit).
        let tail_x = (img.x_mask() >> a3) & ((1u64 << n3.max(1)) - 1);
        let tail_z = (img.z_mask() >> a3) & ((1u64 << n3.max(1)) - 1);
        let t_loc = if n3 > 0 && (tail_x | tail_z) != 0 {
            pauli_to_z(&PauliOp::hermitian(n3, tail_x, tail_z))?
        } else {
            CliffordTableau::identity(n3)
        };
        let mut step = if n3 > 0 { t_loc.embed(n, a3) } else { CliffordTableau::identity(n) };
        let img = step.conjugate_pauli(&img);

        // S power: rotate Y back to X on the control qubit, then fix the sign.
        let mut mu_l: u8 = if img.z_bit(n1 + l) { 3 } else { 0 };
        if CliffordTableau::phase_s_power(n, n1 + l, mu_l).conjugate_pauli(&img).sign() < 0 {
            mu_l = (mu_l + 2) & 3;
        }
        let s_gate = CliffordTableau::phase_s_power(n, n1 + l, mu_l);
        step = s_gate.compose(&step);
        let img = s_gate.conjugate_pauli(&img);
        debug_assert!(img.sign() > 0 && !img.z_bit(n1 + l));

        // CZ exponents absorb the remaining Z string.
        for k in (l + 1)..n2 {
            if img.z_bit(n1 + k) {
                nu[nu_index(n2, l, k)] = 1;
                step = CliffordTableau::cz(n, n1 + l, n1 + k).compose(&step);
            }
        }
        let mut xi = 0u64;
        for k in 0..n3 {
            if img.z_bit(a3 + k) {
                xi |= 1 << k;
                step = CliffordTableau::cz(n, n1 + l, a3 + k).compose(&step);
            }
        }
        d = step.compose(&d);
        if d.conjugate_pauli(&xq) != xq {
            return Err(Error::Internal("X generator not fixed after reduction".into()));
        }

        mu[l] = mu_l;
        for qj in q_list.iter_mut() {
            *qj = t_loc.conjugate_pauli(qj);
        }
        t_acc = t_loc.compose(&t_acc);
        q_list.push(PauliOp::new(n3, 0, xi, 0));
    }

    for j in 0..a3 {
        let fixed = d.conjugate_pauli(&PauliOp::x_on(n, j)) == PauliOp::x_on(n, j)
            && d.conjugate_pauli(&PauliOp::z_on(n, j)) == PauliOp::z_on(n, j);
        if !fixed {
            return Err(Error::Internal("residual acts outside the third block".into()));
        }
    }
    let d3 = if n3 > 0 { d.restrict(a3, n3) } else { CliffordTableau::identity(0) };
    let d3_inv = d3.inverse();
    let v = d3_inv.compose(&t_acc);
    let mut p = Vec::with_capacity(n2);
    for (j, qj) in q_list.iter().enumerate() {
        let img = d3_inv.conjugate_pauli(qj);
        if img.sign() < 0 {
            mu[j] = (mu[j] + 2) & 3;
        }
        p.push(img.unsigned());
    }

    Ok(SymCliffordElement { sf: sf.clone(), mu, nu, v, p })
}

// --- U(1) and SU(2) symmetric Clifford groups ---

/// |C_{N,U(1)} / U_0| = 2^{N(N−1)/2} · 4^N · N!.
pub fn u1_size(n: usize) -> BigUint {
    let mut out = BigUint::from(1u8);
    out <<= n * (n - 1) / 2;
    out <<= 2 * n;
    for k in 2..=n {
        out *= BigUint::from(k);
    }
    out
}

fn u1_element(n: usize, mu: &[u8], nu: &[u8], sigma: &[usize]) -> CliffordTableau {
    let mut t = CliffordTableau::permutation(sigma);
    for (j, &m) in mu.iter().enumerate() {
        for _ in 0..m {
            t.left_s(j);
        }
    }
    let mut b = 0usize;
    for j in 0..n {
        for k in (j + 1)..n {
            if nu[b] != 0 {
                t.left_cz(j, k);
            }
            b += 1;
        }
    }
    t
}

/// Uniform element of the U(1)-symmetric Clifford group mod phase:
/// (Π CZ^ν)(Π S^μ) K_σ with uniform parameters.
pub fn sample_u1(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    assert!(n >= 1);
    let mu: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4u8)).collect();
    let nu: Vec<u8> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(0..2u8)).collect();
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    u1_element(n, &mu, &nu, &sigma)
}

fn permutation_from_lehmer(n: usize, mut code: u128) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    let mut radix: u128 = (1..=n as u128).product();
    for k in (1..=n).rev() {
        radix /= k as u128;
        let digit = (code / radix) as usize;
        code %= radix;
        out.push(pool.remove(digit));
    }
    out
}

/// Enumerate the U(1)-symmetric Clifford group, lexicographic over (μ, ν, σ).
pub fn enumerate_u1(n: usize, cap: u128) -> Result<impl Iterator<Item = CliffordTableau>> {
    assert!(n >= 1);
    let size = u1_size(n);
    if size > BigUint::from(cap) {
        return Err(Error::EnumerationCap { size, cap });
    }
    let total: u128 = size.to_u64_digits().iter().rev().fold(0u128, |acc, &d| (acc << 64) | d as u128);
    let fact: u128 = (1..=n as u128).product();
    let nbits = n * (n - 1) / 2;
    Ok((0..total).map(move |i| {
        let sigma_i = i % fact;
        let rest = i / fact;
        let nu_i = rest % (1u128 << nbits);
        let mu_i = rest >> nbits;
        let mut mu = vec![0u8; n];
        let mut m = mu_i;
        for j in (0..n).rev() {
            mu[j] = (m % 4) as u8;
            m /= 4;
        }
        let mut nu = vec![0u8; nbits];
        for (b, slot) in nu.iter_mut().enumerate() {
            *slot = ((nu_i >> (nbits - 1 - b)) & 1) as u8;
        }
        let sigma = permutation_from_lehmer(n, sigma_i);
        u1_element(n, &mu, &nu, &sigma)
    }))
}

/// Uniform element of the SU(2)-symmetric Clifford group mod phase: a qubit
/// permutation.
pub fn sample_su2(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    assert!(n >= 1);
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    CliffordTableau::permutation(&sigma)
}

/// |C_{N,SU(2)} / U_0| = N!.
pub fn su2_size(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// Enumerate the SU(2)-symmetric Clifford group (all qubit permutations).
pub fn enumerate_su2(n: usize, cap: u128) -> Result<impl Iterator<Item = CliffordTableau>> {
    assert!(n >= 1);
    let size = su2_size(n);
    if size > BigUint::from(cap) {
        return Err(Error::EnumerationCap { size, cap });
    }
    let total: u128 = size.to_u64_digits().iter().rev().fold(0u128, |acc, &d| (acc << 64) | d as u128);
    Ok((0..total).map(move |i| CliffordTableau::permutation(&permutation_from_lehmer(n, i))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::clifford::enumerate_cliffords;
    use crate::pauli::subgroup_from_generators;
    use crate::shard_rng;
    use num_complex::Complex64 as C64;
    use std::collections::HashSet;

    fn p(s: &str) -> PauliOp {
        PauliOp::parse(s).unwrap()
    }

    #[test]
    fn group_size_examples() {
        // The four-qubit symmetry ⟨X⊗4, Z⊗4⟩ has blocks (0, 2, 2).
        let q = subgroup_from_generators(4, &[p("XXXX"), p("ZZZZ")]);
        let sf = canonicalize(&q);
        assert_eq!(sf.dims(), (0, 2, 2));
        assert_eq!(group_size(&sf), BigUint::from(94_371_840u64));

        // No symmetry: the full Clifford group, ~1.2e13 ~ 2^{2N²+3N}.
        let sf = StandardForm::standard(0, 0, 4);
        let full = group_size(&sf);
        assert_eq!(full, BigUint::from(12_128_668_876_800u64));
        let asymptotic = (2.0f64).powi(2 * 16 + 3 * 4);
        let exact = 12_128_668_876_800f64;
        assert!((exact / asymptotic).log10().abs() < 0.5);

        // Fully constrained: only the identity class.
        assert_eq!(group_size(&StandardForm::standard(3, 0, 0)), BigUint::from(1u8));

        assert_eq!(group_size(&StandardForm::standard(0, 1, 0)), BigUint::from(4u8));
        assert_eq!(group_size(&StandardForm::standard(0, 2, 0)), BigUint::from(32u8));
        assert_eq!(group_size(&StandardForm::standard(0, 1, 1)), BigUint::from(384u32));
    }

    #[test]
    fn samples_are_symmetric() {
        let mut rng = shard_rng(5, 5);
        let q = subgroup_from_generators(4, &[p("XXXX"), p("ZZZZ")]);
        let sf = canonicalize(&q);
        let std_sub = sf.standard_subgroup();
        for _ in 0..50 {
            let e = sample_pauli_symmetric(&sf, &mut rng);
            let t = e.to_tableau();
            // symmetric for the original subgroup (signs induced by W)
            let r = sf.w().compose(&t).compose(&sf.w().inverse());
            assert!(is_symmetric(&r, &std_sub));
        }
    }

    #[test]
    fn trivial_symmetry_only_identity_class() {
        let sf = StandardForm::standard(2, 0, 0);
        let mut rng = shard_rng(6, 6);
        let e = sample_pauli_symmetric(&sf, &mut rng);
        assert_eq!(e.to_tableau(), CliffordTableau::identity(2));
        assert_eq!(group_size(&sf), BigUint::from(1u8));
    }

    #[test]
    fn enumerate_small_groups() {
        // (0,1,0): the four S powers.
        let sf = StandardForm::standard(0, 1, 0);
        let all: Vec<_> = enumerate_pauli_symmetric(&sf, 10).unwrap().collect();
        assert_eq!(all.len(), 4);
        let set: HashSet<_> = all.iter().map(|e| e.to_tableau()).collect();
        assert_eq!(set.len(), 4);
        assert!(set.contains(&CliffordTableau::identity(1)));
        assert!(set.contains(&CliffordTableau::phase_s(1, 0)));

        // (0,2,0): 4·4·2 = 32 distinct elements.
        let sf = StandardForm::standard(0, 2, 0);
        let set: HashSet<_> = enumerate_pauli_symmetric(&sf, 100)
            .unwrap()
            .map(|e| e.to_tableau())
            .collect();
        assert_eq!(set.len(), 32);

        // (0,1,1): 4·24·4 = 384 distinct elements.
        let sf = StandardForm::standard(0, 1, 1);
        let set: HashSet<_> = enumerate_pauli_symmetric(&sf, 1000)
            .unwrap()
            .map(|e| e.to_tableau())
            .collect();
        assert_eq!(set.len(), 384);

        // cap errors out with the size attached
        match enumerate_pauli_symmetric(&StandardForm::standard(0, 2, 2), 100) {
            Err(Error::EnumerationCap { size, .. }) => {
                assert_eq!(size, BigUint::from(94_371_840u64))
            }
            _ => panic!("expected cap error"),
        }
    }

    #[test]
    fn brute_force_equivalence_c2_z1() {
        // All 11520 two-qubit Clifford classes, filtered by symmetry under
        // ⟨Z_1⟩, must reproduce the enumerated group exactly.
        let q = subgroup_from_generators(2, &[p("ZI")]);
        let symmetric: Vec<CliffordTableau> =
            enumerate_cliffords(2).filter(|t| is_symmetric(t, &q)).collect();
        assert_eq!(symmetric.len(), 384);

        let sf = canonicalize(&q);
        assert_eq!(sf.dims(), (0, 1, 1));
        let enumerated: HashSet<CliffordTableau> = enumerate_pauli_symmetric(&sf, 1000)
            .unwrap()
            .map(|e| e.to_tableau())
            .collect();
        let brute: HashSet<CliffordTableau> = symmetric.iter().cloned().collect();
        assert_eq!(enumerated, brute);

        // And every element decomposes back to itself.
        for t in &symmetric {
            let e = decompose(t, &sf).unwrap();
            assert_eq!(e.to_tableau(), *t);
        }
    }

    #[test]
    fn decompose_round_trip_random() {
        let mut rng = shard_rng(9, 9);
        let q = subgroup_from_generators(4, &[p("XXXX"), p("ZZZZ")]);
        let sf = canonicalize(&q);
        for _ in 0..100 {
            let e = sample_pauli_symmetric(&sf, &mut rng);
            let t = e.to_tableau();
            let back = decompose(&t, &sf).unwrap();
            assert_eq!(back, e, "unique parameters must be recovered exactly");
            assert_eq!(back.to_tableau(), t);
        }
        // identity decomposes to all-trivial parameters
        let e = decompose(&CliffordTableau::identity(4), &sf).unwrap();
        assert!(e.mu.iter().all(|&m| m == 0));
        assert!(e.nu.iter().all(|&b| b == 0));
        assert_eq!(e.v, CliffordTableau::identity(2));
        assert!(e.p.iter().all(|q| q.is_identity_up_to_phase()));

        // non-symmetric input is rejected
        let h = CliffordTableau::hadamard(4, 0);
        assert!(matches!(decompose(&h, &sf), Err(Error::NotSymmetric)));
    }

    #[test]
    fn is_symmetric_examples() {
        let q = subgroup_from_generators(1, &[p("Z")]);
        assert!(is_symmetric(&CliffordTableau::phase_s(1, 0), &q));
        assert!(!is_symmetric(&CliffordTableau::hadamard(1, 0), &q));
        // X flips the sign of Z: not symmetric even though unsigned Z is fixed.
        let xgate = CliffordTableau::pauli_gate(&p("X"));
        assert!(!is_symmetric(&xgate, &q));
    }

    #[test]
    fn mu_sampling_uniform() {
        let sf = StandardForm::standard(0, 1, 0);
        let mut rng = shard_rng(123, 0);
        let mut counts = [0usize; 4];
        for _ in 0..100_000 {
            let e = sample_pauli_symmetric(&sf, &mut rng);
            counts[e.mu[0] as usize] += 1;
        }
        let expect = 100_000f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}"); // dof 3, p > 0.001
    }

    #[test]
    fn u1_sizes_and_enumeration() {
        assert_eq!(u1_size(2), BigUint::from(64u32));
        assert_eq!(u1_size(4), BigUint::from(393_216u32));
        assert_eq!(su2_size(3), BigUint::from(6u8));

        // n=1: the four S powers, no CZ, trivial permutation.
        let all: Vec<_> = enumerate_u1(1, 10).unwrap().collect();
        assert_eq!(all.len(), 4);
        let set: HashSet<_> = all.into_iter().collect();
        assert_eq!(set.len(), 4);

        let set: HashSet<_> = enumerate_u1(2, 100).unwrap().collect();
        assert_eq!(set.len(), 64);

        let set: HashSet<_> = enumerate_su2(3, 10).unwrap().collect();
        assert_eq!(set.len(), 6);
    }

    #[test]
    fn u1_elements_commute_with_total_z() {
        // Dense check at n ≤ 3: every enumerated element commutes with Z_tot.
        for n in [2usize, 3] {
            let dim = 1 << n;
            let mut z_tot = crate::linalg::Matrix::zeros(dim, dim);
            for j in 0..n {
                z_tot = z_tot.add(&PauliOp::z_on(n, j).to_matrix());
            }
            let cap = if n == 2 { 64 } else { 50 };
            for (i, t) in enumerate_u1(n, 1_000_000).unwrap().enumerate() {
                if i >= cap {
                    break;
                }
                let u = t.to_matrix().unwrap();
                let comm = u.matmul(&z_tot).sub(&z_tot.matmul(&u));
                assert!(comm.max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn su2_fixes_all_total_spins() {
        let n = 3;
        let dim = 1 << n;
        let mut rng = shard_rng(31, 0);
        let mut totals = Vec::new();
        for axis in 0..3 {
            let mut tot = crate::linalg::Matrix::zeros(dim, dim);
            for j in 0..n {
                let op = match axis {
                    0 => PauliOp::x_on(n, j),
                    1 => PauliOp::y_on(n, j),
                    _ => PauliOp::z_on(n, j),
                };
                tot = tot.add(&op.to_matrix());
            }
            totals.push(tot);
        }
        for _ in 0..20 {
            let t = sample_su2(n, &mut rng);
            let u = t.to_matrix().unwrap();
            for tot in &totals {
                let comm = u.matmul(tot).sub(&tot.matmul(&u));
                assert!(comm.max_abs() < 1e-10);
            }
        }

        // n=1 has only the identity; n=3 has 6 classes, uniformly sampled.
        assert_eq!(sample_su2(1, &mut rng), CliffordTableau::identity(1));
        let classes: Vec<_> = enumerate_su2(3, 10).unwrap().collect();
        let mut counts = vec![0usize; 6];
        for _ in 0..10_000 {
            let t = sample_su2(3, &mut rng);
            counts[classes.iter().position(|c| *c == t).unwrap()] += 1;
        }
        let expect = 10_000f64 / 6.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 20.52, "chi2 = {chi2}"); // dof 5, p > 0.001
    }

    #[test]
    fn permutation_traces() {
        // tr K_σ = 2^{#cycles}; for S_3: identity 8, transpositions 4, 3-cycles 2.
        let id = CliffordTableau::permutation(&[0, 1, 2]);
        let swap01 = CliffordTableau::permutation(&[1, 0, 2]);
        let cyc = CliffordTableau::permutation(&[1, 2, 0]);
        for (t, want) in [(id, 64.0), (swap01, 16.0), (cyc, 4.0)] {
            assert_eq!(t.trace_magnitude_squared(), want);
            let dense = t.to_matrix().unwrap().trace();
            assert!((dense - C64::new(want.sqrt(), 0.0)).norm() < 1e-9);
        }
    }
}
