//! Clifford operators as stabilizer tableaux: the signed Pauli images of the
//! generators `X_j`, `Z_j`. Tableaux carry no global phase; every quantity we
//! derive from them (symmetry membership, group sizes, |trace| magnitudes) is
//! phase-insensitive.

use crate::canonical::reduce_pair;
use crate::linalg::Matrix;
use crate::pauli::{gf2_kernel, PauliOp};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use rand::Rng;

/// A Clifford operator mod global phase, as the images of `X_j` and `Z_j`
/// under conjugation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PauliOp>,
    z_images: Vec<PauliOp>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            x_images: (0..n).map(|j| PauliOp::x_on(n, j)).collect(),
            z_images: (0..n).map(|j| PauliOp::z_on(n, j)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, j: usize) -> &PauliOp {
        &self.x_images[j]
    }

    pub fn z_image(&self, j: usize) -> &PauliOp {
        &self.z_images[j]
    }

    fn from_images(x_images: Vec<PauliOp>, z_images: Vec<PauliOp>) -> Self {
        let n = x_images.len();
        debug_assert_eq!(z_images.len(), n);
        CliffordTableau { n, x_images, z_images }
    }

    /// Exact signed image of `p` under conjugation.
    pub fn conjugate_pauli(&self, p: &PauliOp) -> PauliOp {
        assert_eq!(p.n(), self.n, "conjugation dimension mismatch");
        let mut acc = PauliOp::new(self.n, 0, 0, p.phase());
        for j in 0..self.n {
            if p.x_bit(j) {
                acc = acc.mul(&self.x_images[j]);
            }
            if p.z_bit(j) {
                acc = acc.mul(&self.z_images[j]);
            }
        }
        acc
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &CliffordTableau) -> CliffordTableau {
        assert_eq!(self.n, other.n, "composition dimension mismatch");
        CliffordTableau::from_images(
            other.x_images.iter().map(|p| self.conjugate_pauli(p)).collect(),
            other.z_images.iter().map(|p| self.conjugate_pauli(p)).collect(),
        )
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // Unsigned part: the symplectic inverse Ω Mᵀ Ω of the 2n x 2n
        // GF(2) matrix whose columns are the generator images.
        let col = |c: usize| -> u128 {
            if c < n {
                self.x_images[c].vector()
            } else {
                self.z_images[c - n].vector()
            }
        };
        let swap = |i: usize| if i < n { i + n } else { i - n };
        let inv_col = |c: usize| -> u128 {
            let mut v = 0u128;
            for r in 0..2 * n {
                // (Ω Mᵀ Ω)(r, c) = M(swap(c), swap(r))
                if col(swap(r)) >> swap(c) & 1 == 1 {
                    v |= 1u128 << r;
                }
            }
            v
        };
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for j in 0..n {
            let mut cand = PauliOp::from_vector(n, inv_col(j));
            let img = self.conjugate_pauli(&cand);
            debug_assert_eq!(img.unsigned(), PauliOp::x_on(n, j));
            if img.sign() < 0 {
                cand = cand.negate();
            }
            x_images.push(cand);
        }
        for j in 0..n {
            let mut cand = PauliOp::from_vector(n, inv_col(n + j));
            let img = self.conjugate_pauli(&cand);
            debug_assert_eq!(img.unsigned(), PauliOp::z_on(n, j));
            if img.sign() < 0 {
                cand = cand.negate();
            }
            z_images.push(cand);
        }
        CliffordTableau::from_images(x_images, z_images)
    }

    /// Check that the images preserve all commutation relations and are
    /// Hermitian signed Paulis.
    pub fn satisfies_symplectic_condition(&self) -> bool {
        let n = self.n;
        let gen = |i: usize| if i < n { &self.x_images[i] } else { &self.z_images[i - n] };
        for i in 0..2 * n {
            if !gen(i).is_hermitian() {
                return false;
            }
            for j in (i + 1)..2 * n {
                let should_anticommute = j == i + n;
                if gen(i).commutes(gen(j)) == should_anticommute {
                    return false;
                }
            }
        }
        true
    }

    /// Embed into an `n`-qubit register at `offset`, identity elsewhere.
    pub fn embed(&self, n: usize, offset: usize) -> CliffordTableau {
        assert!(offset + self.n <= n);
        let mut t = CliffordTableau::identity(n);
        for j in 0..self.n {
            t.x_images[offset + j] = self.x_images[j].embed(n, offset);
            t.z_images[offset + j] = self.z_images[j].embed(n, offset);
        }
        t
    }

    /// Restrict to a window on which the tableau acts independently; the
    /// images of the window generators must be supported inside the window.
    pub fn restrict(&self, offset: usize, len: usize) -> CliffordTableau {
        CliffordTableau::from_images(
            (0..len).map(|j| self.x_images[offset + j].restrict(offset, len)).collect(),
            (0..len).map(|j| self.z_images[offset + j].restrict(offset, len)).collect(),
        )
    }

    // --- in-place gate application (left multiplication by a gate) ---
    // These mutate every generator image with the packed-bit conjugation
    // rules and allocate nothing; they are the hot path of sampling.

    fn for_images(&mut self, f: impl Fn(&mut PauliOp)) {
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            f(img);
        }
    }

    pub fn left_h(&mut self, j: usize) {
        self.for_images(|p| p.h_at(j));
    }

    pub fn left_s(&mut self, j: usize) {
        self.for_images(|p| p.s_at(j));
    }

    pub fn left_sdg(&mut self, j: usize) {
        self.for_images(|p| p.sdg_at(j));
    }

    pub fn left_cz(&mut self, j: usize, k: usize) {
        self.for_images(|p| p.cz_at(j, k));
    }

    pub fn left_cnot(&mut self, control: usize, target: usize) {
        self.for_images(|p| p.cnot_at(control, target));
    }

    pub fn left_swap(&mut self, j: usize, k: usize) {
        self.for_images(|p| p.swap_at(j, k));
    }

    pub fn left_pauli(&mut self, p: &PauliOp) {
        self.for_images(|img| img.pauli_conj_by(p));
    }

    /// Left-multiply by an arbitrary gate tableau, reusing storage.
    pub fn left_apply(&mut self, gate: &CliffordTableau) {
        assert_eq!(gate.n, self.n);
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            *img = gate.conjugate_pauli(img);
        }
    }

    // --- gate constructors ---

    pub fn hadamard(n: usize, j: usize) -> Self {
        let mut t = CliffordTableau::identity(n);
        t.x_images[j] = PauliOp::z_on(n, j);
        t.z_images[j] = PauliOp::x_on(n, j);
        t
    }

    pub fn phase_s(n: usize, j: usize) -> Self {
        let mut t = CliffordTableau::identity(n);
        t.x_images[j] = PauliOp::y_on(n, j);
        t
    }

    /// S^k for k mod 4.
    pub fn phase_s_power(n: usize, j: usize, k: u8) -> Self {
        let s = CliffordTableau::phase_s(n, j);
        let mut t = CliffordTableau::identity(n);
        for _ in 0..(k & 3) {
            t = s.compose(&t);
        }
        t
    }

    pub fn cz(n: usize, j: usize, k: usize) -> Self {
        assert_ne!(j, k);
        let mut t = CliffordTableau::identity(n);
        t.x_images[j] = PauliOp::x_on(n, j).mul(&PauliOp::z_on(n, k));
        t.x_images[k] = PauliOp::x_on(n, k).mul(&PauliOp::z_on(n, j));
        t
    }

    pub fn cnot(n: usize, control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        let mut t = CliffordTableau::identity(n);
        t.x_images[control] = PauliOp::x_on(n, control).mul(&PauliOp::x_on(n, target));
        t.z_images[target] = PauliOp::z_on(n, control).mul(&PauliOp::z_on(n, target));
        t
    }

    pub fn swap(n: usize, j: usize, k: usize) -> Self {
        let mut t = CliffordTableau::identity(n);
        t.x_images.swap(j, k);
        t.z_images.swap(j, k);
        let (xj, xk) = (PauliOp::x_on(n, j), PauliOp::x_on(n, k));
        let (zj, zk) = (PauliOp::z_on(n, j), PauliOp::z_on(n, k));
        t.x_images[j] = xk;
        t.x_images[k] = xj;
        t.z_images[j] = zk;
        t.z_images[k] = zj;
        t
    }

    /// Permutation operator K_σ that brings qubit j to qubit σ(j):
    /// K_σ (|ψ_1⟩⊗…⊗|ψ_n⟩) = |ψ_{σ⁻¹(1)}⟩⊗…⊗|ψ_{σ⁻¹(n)}⟩.
    pub fn permutation(sigma: &[usize]) -> Self {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in sigma {
            assert!(s < n && !seen[s], "not a permutation");
            seen[s] = true;
        }
        CliffordTableau::from_images(
            (0..n).map(|j| PauliOp::x_on(n, sigma[j])).collect(),
            (0..n).map(|j| PauliOp::z_on(n, sigma[j])).collect(),
        )
    }

    /// Conjugation by a Hermitian Pauli, as a tableau (sign flips only).
    pub fn pauli_gate(p: &PauliOp) -> Self {
        assert!(p.is_hermitian(), "Pauli gate must be Hermitian");
        let n = p.n();
        let flip = |g: PauliOp| if g.commutes(p) { g } else { g.negate() };
        CliffordTableau::from_images(
            (0..n).map(|j| flip(PauliOp::x_on(n, j))).collect(),
            (0..n).map(|j| flip(PauliOp::z_on(n, j))).collect(),
        )
    }

    /// Controlled-P with control qubit `control`; `p` is given on the full
    /// register, must be Hermitian and act trivially on the control.
    pub fn controlled_pauli(control: usize, p: &PauliOp) -> Self {
        let n = p.n();
        assert!(control < n, "control index out of range");
        assert!(p.is_hermitian(), "controlled target must be Hermitian");
        assert!(
            !p.x_bit(control) && !p.z_bit(control),
            "controlled target must not touch the control qubit"
        );
        let zc = PauliOp::z_on(n, control);
        let mut t = CliffordTableau::identity(n);
        t.x_images[control] = PauliOp::x_on(n, control).mul(p);
        for q in 0..n {
            if q == control {
                continue;
            }
            if !PauliOp::x_on(n, q).commutes(p) {
                t.x_images[q] = zc.mul(&PauliOp::x_on(n, q));
            }
            if !PauliOp::z_on(n, q).commutes(p) {
                t.z_images[q] = zc.mul(&PauliOp::z_on(n, q));
            }
        }
        t
    }

    /// |tr C|² of any phase representative, exactly. A Clifford trace
    /// magnitude is either 0 or 2^{k/2} where k is the dimension of the
    /// subgroup of unsigned Paulis fixed by conjugation; it is nonzero iff
    /// every fixed Pauli is fixed with a `+` sign.
    pub fn trace_magnitude_squared(&self) -> f64 {
        match self.fixed_space_exponent() {
            Some(k) => (2.0f64).powi(k as i32),
            None => 0.0,
        }
    }

    /// `Some(k)` with |tr C|² = 2^k, or `None` when the trace vanishes.
    pub fn fixed_space_exponent(&self) -> Option<u32> {
        let n = self.n;
        // Rows of (M - I) over GF(2); row r is the r-th component map.
        let mut rows = vec![0u128; 2 * n];
        for c in 0..2 * n {
            let img = if c < n { self.x_images[c].vector() } else { self.z_images[c - n].vector() };
            let v = img ^ (1u128 << c);
            for (r, row) in rows.iter_mut().enumerate() {
                *row |= ((v >> r) & 1) << c;
            }
        }
        let kernel = gf2_kernel(&rows, 2 * n);
        // The sign character is multiplicative on the fixed subgroup, so it
        // is trivial iff it is trivial on a basis.
        for v in &kernel {
            let p = PauliOp::from_vector(n, *v);
            let img = self.conjugate_pauli(&p);
            debug_assert_eq!(img.unsigned(), p);
            if img.sign() < 0 {
                return None;
            }
        }
        Some(kernel.len() as u32)
    }

    /// Dense unitary with U P U† = matrix(conjugate_pauli(P)) for all
    /// generators; the global phase is fixed by making the first nonzero
    /// entry (row-major scan) positive real.
    pub fn to_matrix(&self) -> Result<Matrix> {
        self.to_matrix_capped(10)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<Matrix> {
        if self.n > cap {
            return Err(Error::CapExceeded(format!("dense export of {} qubits (cap {cap})", self.n)));
        }
        let n = self.n;
        let dim = 1usize << n;
        // Projector onto the stabilizer state U|0…0⟩: Π_j (I + U Z_j U†)/2.
        let mut proj = Matrix::identity(dim);
        for j in 0..n {
            let mut sp = proj.clone();
            self.z_images[j].apply_left(&mut sp);
            proj = proj.add(&sp).scale(C64::new(0.5, 0.0));
        }
        let (mut best, mut best_norm) = (0usize, 0.0f64);
        for c in 0..dim {
            let nrm: f64 = (0..dim).map(|r| proj[(r, c)].norm_sqr()).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = c;
            }
        }
        let scale = 1.0 / best_norm.sqrt();
        let psi: Vec<C64> = (0..dim).map(|r| proj[(r, best)] * scale).collect();

        // Column x of U is Π_j (U X_j U†)^{x_j} applied to U|0…0⟩.
        let mut u = Matrix::zeros(dim, dim);
        for x in 0..dim {
            let mut colm = Matrix::zeros(dim, 1);
            for (r, v) in psi.iter().enumerate() {
                colm[(r, 0)] = *v;
            }
            for j in 0..n {
                if x >> (n - 1 - j) & 1 == 1 {
                    self.x_images[j].apply_left(&mut colm);
                }
            }
            for r in 0..dim {
                u[(r, x)] = colm[(r, 0)];
            }
        }
        // Deterministic global phase.
        let first = u.data().iter().find(|c| c.norm() > 1e-8).copied().unwrap();
        Ok(u.scale(first.conj() / first.norm()))
    }
}

impl std::fmt::Display for CliffordTableau {
    /// Debug text format: 2n lines `X_j -> <signed pauli>` / `Z_j -> <...>`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for j in 0..self.n {
            writeln!(f, "X_{} -> {}", j + 1, self.x_images[j])?;
            writeln!(f, "Z_{} -> {}", j + 1, self.z_images[j])?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CliffordTableau(n={})\n{}", self.n, self)
    }
}

/// Parse the text format produced by `Display`.
pub fn parse_tableau(text: &str) -> Result<CliffordTableau> {
    let mut xs: Vec<(usize, PauliOp)> = Vec::new();
    let mut zs: Vec<(usize, PauliOp)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("bad tableau line {line:?}")))?;
        let p = PauliOp::parse(rhs)?;
        let lhs = lhs.trim();
        let (kind, idx) = lhs
            .split_once('_')
            .ok_or_else(|| Error::Parse(format!("bad tableau label {lhs:?}")))?;
        let j: usize = idx
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad qubit index {idx:?}")))?;
        match kind.trim() {
            "X" => xs.push((j, p)),
            "Z" => zs.push((j, p)),
            _ => return Err(Error::Parse(format!("bad generator label {lhs:?}"))),
        }
    }
    let n = xs.len();
    if n == 0 || zs.len() != n {
        return Err(Error::Parse("tableau must list X_j and Z_j for every qubit".into()));
    }
    xs.sort_by_key(|(j, _)| *j);
    zs.sort_by_key(|(j, _)| *j);
    let t = CliffordTableau::from_images(
        xs.into_iter().map(|(_, p)| p).collect(),
        zs.into_iter().map(|(_, p)| p).collect(),
    );
    if t.x_images.iter().chain(&t.z_images).any(|p| p.n() != n) {
        return Err(Error::Parse("tableau row length disagrees with qubit count".into()));
    }
    if !t.satisfies_symplectic_condition() {
        return Err(Error::Parse("tableau violates the symplectic condition".into()));
    }
    Ok(t)
}

/// |C_n / U_0| = 2^{n²+2n} · Π_{j=1}^{n} (4^j − 1).
pub fn clifford_order(n: usize) -> BigUint {
    let mut out = BigUint::from(1u8);
    for j in 1..=n {
        // 2·(4^j − 1) choices of the Z_1 image times 4^j anticommuting partners.
        out *= 2u8 * ((BigUint::from(1u8) << (2 * j)) - 1u8);
        out <<= 2 * j;
    }
    out
}

/// The w-th solution of ⟨v, p⟩ = 1 over GF(2)^{2k}, with a fixed
/// parameterization: one particular solution plus a basis of the orthogonal
/// complement indexed by the bits of `w`.
fn anticommuting_vector(k: usize, p: u128, w: u128) -> u128 {
    let mk = (1u128 << k) - 1;
    let dual = ((p >> k) & mk) | ((p & mk) << k);
    debug_assert!(dual != 0);
    let b = dual.trailing_zeros() as usize;
    let mut v = 1u128 << b;
    let mut wi = 0;
    for pos in 0..2 * k {
        if pos == b {
            continue;
        }
        if w >> wi & 1 == 1 {
            v ^= 1u128 << pos;
            if dual >> pos & 1 == 1 {
                v ^= 1u128 << b;
            }
        }
        wi += 1;
    }
    v
}

/// One recursion level: from the choice indices build the tableau factor that
/// maps `Z_offset -> P` and `X_offset -> Q` exactly (with signs).
fn level_factor(n: usize, offset: usize, ip: u128, iq: u128) -> CliffordTableau {
    let k = n - offset;
    let sign_p = ip & 1 == 1;
    let up = (ip >> 1) + 1;
    let p_local = PauliOp::from_vector(k, up);
    let sign_q = iq & 1 == 1;
    let q_local = PauliOp::from_vector(k, anticommuting_vector(k, up, iq >> 1));
    let mut p = p_local.embed(n, offset);
    let mut q = q_local.embed(n, offset);
    if sign_p {
        p = p.negate();
    }
    if sign_q {
        q = q.negate();
    }
    // Reduce (P, Q) -> (Z_offset, X_offset) unsigned, then patch signs via
    // Pauli conjugations, and invert to realize Z_offset -> P, X_offset -> Q.
    let mut w = reduce_pair(&p, &q, offset).expect("level pair anticommutes by construction");
    let sp = w.conjugate_pauli(&p).sign();
    let sq = w.conjugate_pauli(&q).sign();
    let mut corr = PauliOp::identity(n);
    if sp < 0 {
        corr = corr.mul(&PauliOp::x_on(n, offset));
    }
    if sq < 0 {
        corr = corr.mul(&PauliOp::z_on(n, offset));
    }
    if !corr.is_identity_up_to_phase() {
        w.left_pauli(&corr.unsigned());
    }
    w.inverse()
}

/// Exactly uniform sample from C_n / U_0.
pub fn random_clifford(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    assert!(n <= 32, "random Clifford capped at 32 qubits");
    let mut c = CliffordTableau::identity(n);
    for offset in 0..n {
        let k = n - offset;
        let np: u128 = 2 * ((1u128 << (2 * k)) - 1);
        let nq: u128 = 1u128 << (2 * k);
        let ip = rng.gen_range(0..np);
        let iq = rng.gen_range(0..nq);
        c = c.compose(&level_factor(n, offset, ip, iq));
    }
    c
}

/// The `index`-th element of C_n / U_0 under a fixed mixed-radix order;
/// bijective over `0..clifford_order(n)`.
pub fn clifford_from_index(n: usize, index: u128) -> CliffordTableau {
    assert!(n <= 7, "indexed Clifford enumeration capped at 7 qubits");
    let mut radices = Vec::with_capacity(n);
    for offset in 0..n {
        let k = n - offset;
        radices.push(2 * ((1u128 << (2 * k)) - 1) * (1u128 << (2 * k)));
    }
    let total: u128 = radices.iter().product();
    assert!(index < total, "Clifford index out of range");
    let mut rest = total;
    let mut idx = index;
    let mut c = CliffordTableau::identity(n);
    for (offset, &radix) in radices.iter().enumerate() {
        rest /= radix;
        let choice = idx / rest;
        idx %= rest;
        let k = n - offset;
        let nq = 1u128 << (2 * k);
        c = c.compose(&level_factor(n, offset, choice / nq, choice % nq));
    }
    c
}

/// Lazily enumerate all of C_n / U_0 in index order.
pub fn enumerate_cliffords(n: usize) -> impl Iterator<Item = CliffordTableau> {
    let total: u128 = (0..n)
        .map(|offset| {
            let k = n - offset;
            2 * ((1u128 << (2 * k)) - 1) * (1u128 << (2 * k))
        })
        .product();
    (0..total).map(move |i| clifford_from_index(n, i))
}
