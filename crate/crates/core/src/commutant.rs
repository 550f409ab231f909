//! Numerical block decomposition of symmetric unitary groups.
//!
//! A symmetry generates a *-algebra A; the unitaries commuting with it form
//! ⊕_λ I_{d_λ} ⊗ U(m_λ) in a suitable basis. We find that basis numerically:
//! a generic Hermitian element of A has eigenspaces u_i ⊗ J_λ, a generic
//! Hermitian element of the commutant has eigenspaces I_λ ⊗ v_j, and matching
//! up which eigenspaces intersect identifies the blocks and a product basis.

use crate::linalg::{haar_unitary, hermitian_eig, Matrix};
use crate::pauli::{PauliOp, PauliSubgroup};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// A symmetry constraint: either a Pauli subgroup, conservation of total Z
/// (U(1)), conservation of all three total spins (SU(2)), or explicit
/// Hermitian generators of a Lie algebra.
#[derive(Clone, Debug)]
pub enum SymmetrySpec {
    Pauli(PauliSubgroup),
    U1(usize),
    SU2(usize),
    Custom { n: usize, generators: Vec<Matrix> },
}

impl SymmetrySpec {
    pub fn n(&self) -> usize {
        match self {
            SymmetrySpec::Pauli(q) => q.n(),
            SymmetrySpec::U1(n) | SymmetrySpec::SU2(n) => *n,
            SymmetrySpec::Custom { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n()
    }

    pub fn label(&self) -> String {
        match self {
            SymmetrySpec::Pauli(q) => {
                let gens: Vec<String> = q.basis_paulis().iter().map(|p| p.to_string()).collect();
                format!("pauli:{}", gens.join(","))
            }
            SymmetrySpec::U1(n) => format!("u1:{n}"),
            SymmetrySpec::SU2(n) => format!("su2:{n}"),
            SymmetrySpec::Custom { n, generators } => format!("custom:{n}:{}", generators.len()),
        }
    }

    fn total_operator(n: usize, single: fn(usize, usize) -> PauliOp) -> Matrix {
        let dim = 1usize << n;
        let mut tot = Matrix::zeros(dim, dim);
        for j in 0..n {
            tot = tot.add(&single(n, j).to_matrix());
        }
        tot
    }

    /// Hermitian generators whose commutant is the symmetric unitary group.
    pub fn hermitian_generators(&self) -> Vec<Matrix> {
        match self {
            SymmetrySpec::Pauli(q) => q.basis_paulis().iter().map(|p| p.to_matrix()).collect(),
            SymmetrySpec::U1(n) => vec![Self::total_operator(*n, PauliOp::z_on)],
            SymmetrySpec::SU2(n) => vec![
                Self::total_operator(*n, PauliOp::x_on),
                Self::total_operator(*n, PauliOp::y_on),
                Self::total_operator(*n, PauliOp::z_on),
            ],
            SymmetrySpec::Custom { generators, .. } => generators.clone(),
        }
    }

    /// Sampled dense group elements: exact Paulis for a Pauli symmetry,
    /// random one-parameter exponentials otherwise.
    pub fn sample_group_elements(&self, count: usize, rng: &mut impl Rng) -> Vec<Matrix> {
        let n = self.n();
        let dim = self.dim();
        let mut out = vec![Matrix::identity(dim)];
        match self {
            SymmetrySpec::Pauli(q) => {
                out.extend(q.basis_paulis().iter().map(|p| p.to_matrix()));
            }
            SymmetrySpec::U1(_) => {
                for _ in 0..count {
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let mut u = Matrix::zeros(dim, dim);
                    for b in 0..dim {
                        let weight = (b as u64).count_ones() as i32;
                        // e^{iθ Z_tot} is diagonal with phase θ·(n − 2·weight)
                        u[(b, b)] = C64::from_polar(1.0, theta * (n as i32 - 2 * weight) as f64);
                    }
                    out.push(u);
                }
            }
            SymmetrySpec::SU2(_) => {
                for _ in 0..count {
                    let (a, b, c): (f64, f64, f64) = (
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                    );
                    let phi = (a * a + b * b + c * c).sqrt().max(1e-12);
                    let (s, co) = (phi.sin() / phi, phi.cos());
                    // e^{i(aX + bY + cZ)} = cos φ I + i sin φ (n̂·σ)
                    let v = Matrix::from_rows(vec![
                        vec![C64::new(co, s * c), C64::new(s * b, s * a)],
                        vec![C64::new(-s * b, s * a), C64::new(co, -s * c)],
                    ]);
                    let mut u = Matrix::identity(1);
                    for _ in 0..n {
                        u = u.kron(&v);
                    }
                    out.push(u);
                }
            }
            SymmetrySpec::Custom { generators, .. } => {
                for _ in 0..count {
                    let g = &generators[rng.gen_range(0..generators.len())];
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    out.push(hermitian_exponential(g, theta));
                }
            }
        }
        out
    }

    /// Parse the JSON symmetry format:
    /// `{"type":"pauli","n":4,"generators":["XXXX","ZZZZ"]}` |
    /// `{"type":"u1","n":4}` | `{"type":"su2","n":3}` |
    /// `{"type":"custom","n":2,"hermitian_generators":[[[[re,im],…],…],…]}`.
    pub fn from_json(text: &str) -> Result<SymmetrySpec> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad symmetry JSON: {e}")))?;
        let ty = v["type"].as_str().ok_or_else(|| Error::Parse("missing \"type\"".into()))?;
        let n = v["n"].as_u64().ok_or_else(|| Error::Parse("missing \"n\"".into()))? as usize;
        match ty {
            "pauli" => {
                let gens = v["generators"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("missing \"generators\"".into()))?;
                let mut ops = Vec::new();
                for g in gens {
                    let s = g.as_str().ok_or_else(|| Error::Parse("generator must be a string".into()))?;
                    let p = PauliOp::parse(s)?;
                    if p.n() != n {
                        return Err(Error::Parse(format!("generator {s:?} is not on {n} qubits")));
                    }
                    ops.push(p);
                }
                Ok(SymmetrySpec::Pauli(crate::pauli::subgroup_from_generators(n, &ops)))
            }
            "u1" => Ok(SymmetrySpec::U1(n)),
            "su2" => Ok(SymmetrySpec::SU2(n)),
            "custom" => {
                let mats = v["hermitian_generators"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("missing \"hermitian_generators\"".into()))?;
                let dim = 1usize << n;
                let mut generators = Vec::new();
                for mat in mats {
                    let rows = mat.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
                    if rows.len() != dim {
                        return Err(Error::Parse(format!("matrix must be {dim}x{dim}")));
                    }
                    let mut m = Matrix::zeros(dim, dim);
                    for (i, row) in rows.iter().enumerate() {
                        let row = row.as_array().ok_or_else(|| Error::Parse("row must be an array".into()))?;
                        if row.len() != dim {
                            return Err(Error::Parse(format!("matrix must be {dim}x{dim}")));
                        }
                        for (j, entry) in row.iter().enumerate() {
                            let pair = entry.as_array().ok_or_else(|| Error::Parse("entry must be [re, im]".into()))?;
                            if pair.len() != 2 {
                                return Err(Error::Parse("entry must be [re, im]".into()));
                            }
                            let re = pair[0].as_f64().ok_or_else(|| Error::Parse("entry must be numeric".into()))?;
                            let im = pair[1].as_f64().ok_or_else(|| Error::Parse("entry must be numeric".into()))?;
                            m[(i, j)] = C64::new(re, im);
                        }
                    }
                    if m.sub(&m.dagger()).max_abs() > 1e-9 * m.frobenius_norm().max(1.0) {
                        return Err(Error::Parse("custom generator is not Hermitian".into()));
                    }
                    generators.push(m);
                }
                Ok(SymmetrySpec::Custom { n, generators })
            }
            other => Err(Error::Parse(format!("unknown symmetry type {other:?}"))),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            SymmetrySpec::Pauli(q) => {
                let gens: Vec<String> = q.basis_paulis().iter().map(|p| p.to_string()).collect();
                serde_json::json!({"type": "pauli", "n": q.n(), "generators": gens}).to_string()
            }
            SymmetrySpec::U1(n) => serde_json::json!({"type": "u1", "n": n}).to_string(),
            SymmetrySpec::SU2(n) => serde_json::json!({"type": "su2", "n": n}).to_string(),
            SymmetrySpec::Custom { n, generators } => {
                let mats: Vec<Vec<Vec<[f64; 2]>>> = generators
                    .iter()
                    .map(|m| {
                        (0..m.rows())
                            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                            .collect()
                    })
                    .collect();
                serde_json::json!({"type": "custom", "n": n, "hermitian_generators": mats}).to_string()
            }
        }
    }
}

fn hermitian_exponential(g: &Matrix, theta: f64) -> Matrix {
    let (vals, vecs) = hermitian_eig(g, 1e-9);
    let dim = g.rows();
    let mut d = Matrix::zeros(dim, dim);
    for (i, &l) in vals.iter().enumerate() {
        d[(i, i)] = C64::from_polar(1.0, theta * l);
    }
    vecs.matmul(&d).matmul(&vecs.dagger())
}

/// One isotypic block: the symmetric unitary group acts as I_d ⊗ U(m) on the
/// column span of `basis` (dim × d·m, columns ordered with the m index fast).
#[derive(Clone, Debug)]
pub struct Block {
    pub d: usize,
    pub m: usize,
    pub basis: Matrix,
}

/// Full block structure of a symmetric unitary group.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub dim: usize,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    /// Σ d_λ², the frame potential of the group at t = 1.
    pub fn sum_d_squared(&self) -> u128 {
        self.blocks.iter().map(|b| (b.d * b.d) as u128).sum()
    }

    /// Σ m_λ², the dimension of the commutant algebra.
    pub fn commutant_dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.m * b.m).sum()
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of the associative *-algebra generated
/// by `I` and the given Hermitian generators.
pub fn algebra_basis(dim: usize, gens: &[Matrix], cap: usize) -> Result<Vec<Matrix>> {
    let mut basis: Vec<Matrix> = Vec::new();
    let try_push = |m: &Matrix, basis: &mut Vec<Matrix>| -> bool {
        let scale = m.frobenius_norm();
        if scale < 1e-14 {
            return false;
        }
        let mut r = m.scale(C64::new(1.0 / scale, 0.0));
        for _ in 0..2 {
            for e in basis.iter() {
                let c = e.hs_inner(&r);
                r = r.sub(&e.scale(c));
            }
        }
        let norm = r.frobenius_norm();
        if norm > 1e-7 {
            basis.push(r.scale(C64::new(1.0 / norm, 0.0)));
            true
        } else {
            false
        }
    };
    try_push(&Matrix::identity(dim), &mut basis);
    for g in gens {
        try_push(g, &mut basis);
    }
    let mut frontier = 0;
    while frontier < basis.len() {
        if basis.len() > cap {
            return Err(Error::CapExceeded(format!("algebra basis larger than {cap}")));
        }
        let e = basis[frontier].clone();
        for g in gens {
            let prod = e.matmul(g);
            try_push(&prod, &mut basis);
        }
        frontier += 1;
    }
    Ok(basis)
}

/// Residual of `m` after projection onto the span of an orthonormal basis.
fn span_residual(m: &Matrix, basis: &[Matrix]) -> f64 {
    let mut r = m.clone();
    for e in basis {
        let c = e.hs_inner(&r);
        r = r.sub(&e.scale(c));
    }
    r.frobenius_norm()
}

/// A Hermitian element of the commutant of the algebra: Σ_i E_i M E_i†
/// maps any M into the commutant and is onto it.
fn commutant_element(basis: &[Matrix], rng: &mut impl Rng) -> Matrix {
    let dim = basis[0].rows();
    let mut g = Matrix::zeros(dim, dim);
    for v in 0..dim * dim {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        g[(v / dim, v % dim)] = C64::new(re, im);
    }
    let h = g.add(&g.dagger());
    let mut out = Matrix::zeros(dim, dim);
    for e in basis {
        out = out.add(&e.matmul(&h).matmul(&e.dagger()));
    }
    out.add(&out.dagger()).scale(C64::new(0.5, 0.0))
}

fn algebra_element(basis: &[Matrix], rng: &mut impl Rng) -> Matrix {
    let dim = basis[0].rows();
    let mut out = Matrix::zeros(dim, dim);
    for e in basis {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        out = out.add(&e.scale(C64::new(re, im)));
    }
    out.add(&out.dagger()).scale(C64::new(0.5, 0.0))
}

/// Cluster sorted eigenvalues with a relative gap threshold of 1e-6.
fn cluster(vals: &[f64]) -> Vec<(usize, usize)> {
    let spread = (vals.last().unwrap() - vals.first().unwrap()).max(1.0);
    let gap = 1e-6 * spread;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Decompose the symmetric unitary group of `spec` into its blocks.
///
/// Random generic elements of the algebra and its commutant are drawn until
/// the reconstructed product basis passes verification against every
/// generator (at most 5 retries).
pub fn block_decompose(spec: &SymmetrySpec, tol: f64, rng: &mut impl Rng) -> Result<BlockDecomposition> {
    let n = spec.n();
    if n > 8 {
        return Err(Error::CapExceeded(format!("dense block decomposition at {n} qubits")));
    }
    let dim = spec.dim();
    let gens = spec.hermitian_generators();
    let basis = algebra_basis(dim, &gens, dim * dim)?;

    let mut last_residual = f64::INFINITY;
    for _retry in 0..5 {
        match try_decompose(dim, &gens, &basis, rng) {
            Some(bd) => {
                let residual = verify(&bd, &gens);
                if residual < tol {
                    return Ok(bd);
                }
                last_residual = residual;
            }
            None => continue,
        }
    }
    let _ = last_residual;
    Err(Error::DecompositionFailed(5))
}

fn try_decompose(
    dim: usize,
    _gens: &[Matrix],
    basis: &[Matrix],
    rng: &mut impl Rng,
) -> Option<BlockDecomposition> {
    let a = algebra_element(basis, rng);
    let b = commutant_element(basis, rng);
    let (avals, avecs) = hermitian_eig(&a, 1e-8);
    let (bvals, bvecs) = hermitian_eig(&b, 1e-8);
    let aclusters = cluster(&avals);
    let bclusters = cluster(&bvals);

    // tr(P_a P_b) = 1 when the eigenspaces share a block, 0 otherwise.
    let na = aclusters.len();
    let nb = bclusters.len();
    let mut adj = vec![vec![false; nb]; na];
    for (ia, &(a0, a1)) in aclusters.iter().enumerate() {
        for (ib, &(b0, b1)) in bclusters.iter().enumerate() {
            let mut t = 0.0;
            for ca in a0..a1 {
                let ua = avecs.column(ca);
                for cb in b0..b1 {
                    let ub = bvecs.column(cb);
                    let dot: C64 = ua.iter().zip(&ub).map(|(x, y)| x.conj() * y).sum();
                    t += dot.norm_sqr();
                }
            }
            adj[ia][ib] = t > 0.5;
        }
    }

    // Connected components over the a/b cluster bipartite graph.
    let mut acomp = vec![usize::MAX; na];
    let mut bcomp = vec![usize::MAX; nb];
    let mut ncomp = 0;
    for seed in 0..na {
        if acomp[seed] != usize::MAX {
            continue;
        }
        let comp = ncomp;
        ncomp += 1;
        let mut stack = vec![(true, seed)];
        while let Some((is_a, i)) = stack.pop() {
            if is_a {
                if acomp[i] != usize::MAX {
                    continue;
                }
                acomp[i] = comp;
                for (j, row) in adj[i].iter().enumerate() {
                    if *row {
                        stack.push((false, j));
                    }
                }
            } else {
                if bcomp[i] != usize::MAX {
                    continue;
                }
                bcomp[i] = comp;
                for (j, arow) in adj.iter().enumerate() {
                    if arow[i] {
                        stack.push((true, j));
                    }
                }
            }
        }
    }
    if bcomp.iter().any(|&c| c == usize::MAX) {
        return None;
    }

    let s = algebra_element(basis, rng);
    let mut blocks = Vec::new();
    let mut total = 0usize;
    for comp in 0..ncomp {
        let acl: Vec<(usize, usize)> =
            aclusters.iter().enumerate().filter(|(i, _)| acomp[*i] == comp).map(|(_, c)| *c).collect();
        let bcl: Vec<(usize, usize)> =
            bclusters.iter().enumerate().filter(|(i, _)| bcomp[*i] == comp).map(|(_, c)| *c).collect();
        let d = acl.len();
        let m = bcl.len();
        // Multiplicity consistency: every a-eigenspace in the block has
        // dimension m, every b-eigenspace dimension d.
        if acl.iter().any(|&(s0, s1)| s1 - s0 != m) || bcl.iter().any(|&(s0, s1)| s1 - s0 != d) {
            return None;
        }
        total += d * m;

        let col_block = |vecs: &Matrix, (c0, c1): (usize, usize)| -> Matrix {
            let mut u = Matrix::zeros(dim, c1 - c0);
            for (jj, c) in (c0..c1).enumerate() {
                u.set_column(jj, &vecs.column(c));
            }
            u
        };
        let ua1 = col_block(&avecs, acl[0]);

        // First multiplicity row: one vector per b-eigenspace inside the
        // a_1 eigenspace; coefficients are the dominant column of Ua1† Ub.
        let mut alphas: Vec<Vec<C64>> = Vec::with_capacity(m);
        for &bc in &bcl {
            let ub = col_block(&bvecs, bc);
            let mj = ua1.dagger().matmul(&ub); // m × d
            let mut best = 0usize;
            let mut best_n = 0.0;
            for c in 0..mj.cols() {
                let nn: f64 = (0..mj.rows()).map(|r| mj[(r, c)].norm_sqr()).sum();
                if nn > best_n {
                    best_n = nn;
                    best = c;
                }
            }
            if best_n < 1e-6 {
                return None;
            }
            let col = mj.column(best);
            let nrm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            alphas.push(col.iter().map(|c| c / nrm).collect());
        }

        // Connect the other multiplicity rows through the algebra element S:
        // P_{a_i} S P_{a_1} maps u_1 ⊗ v_j to c_i u_i ⊗ v_j with one scalar
        // per row, so dividing by its magnitude keeps the v_j consistent.
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d * m);
        for (i, &ac) in acl.iter().enumerate() {
            let uai = col_block(&avecs, ac);
            let ci = if i == 0 { None } else { Some(uai.dagger().matmul(&s).matmul(&ua1)) };
            let mut scale = 1.0;
            if let Some(c) = &ci {
                let v0 = mat_vec(c, &alphas[0]);
                scale = v0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if scale < 1e-8 {
                    return None;
                }
            }
            for alpha in &alphas {
                let coeff = match &ci {
                    None => alpha.clone(),
                    Some(c) => mat_vec(c, alpha).iter().map(|x| x / scale).collect(),
                };
                let w = mat_vec_tall(&uai, &coeff);
                cols.push(w);
            }
        }
        let mut bmat = Matrix::zeros(dim, d * m);
        for (j, w) in cols.iter().enumerate() {
            bmat.set_column(j, w);
        }
        blocks.push(Block { d, m, basis: bmat });
    }
    if total != dim {
        return None;
    }
    // Deterministic block order: by (d, m, first basis column fingerprint).
    blocks.sort_by(|x, y| (x.d, x.m).cmp(&(y.d, y.m)));
    Some(BlockDecomposition { dim, blocks })
}

fn mat_vec(m: &Matrix, v: &[C64]) -> Vec<C64> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

fn mat_vec_tall(m: &Matrix, v: &[C64]) -> Vec<C64> {
    mat_vec(m, v)
}

/// Worst residual over: stacked-basis unitarity, generator block structure
/// (A_λ ⊗ I_m inside each block, zero across blocks).
pub fn verify(bd: &BlockDecomposition, gens: &[Matrix]) -> f64 {
    let dim = bd.dim;
    let mut stacked = Matrix::zeros(dim, dim);
    let mut off = 0;
    for b in &bd.blocks {
        for c in 0..b.d * b.m {
            stacked.set_column(off + c, &b.basis.column(c));
        }
        off += b.d * b.m;
    }
    let mut worst = stacked.unitarity_defect();
    for g in gens {
        let t = stacked.dagger().matmul(g).matmul(&stacked);
        let scale = 1.0 + g.max_abs();
        let mut row0 = 0;
        for b in &bd.blocks {
            let sz = b.d * b.m;
            // off-diagonal (between blocks)
            for i in 0..sz {
                for j in 0..dim {
                    if j >= row0 && j < row0 + sz {
                        continue;
                    }
                    worst = worst.max(t[(row0 + i, j)].norm() / scale);
                }
            }
            // inside the block: must equal A ⊗ I_m
            let mut a_est = Matrix::zeros(b.d, b.d);
            for i1 in 0..b.d {
                for i2 in 0..b.d {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..b.m {
                        s += t[(row0 + i1 * b.m + j, row0 + i2 * b.m + j)];
                    }
                    a_est[(i1, i2)] = s / C64::new(b.m as f64, 0.0);
                }
            }
            for i1 in 0..b.d {
                for i2 in 0..b.d {
                    for j1 in 0..b.m {
                        for j2 in 0..b.m {
                            let want = if j1 == j2 { a_est[(i1, i2)] } else { C64::new(0.0, 0.0) };
                            let got = t[(row0 + i1 * b.m + j1, row0 + i2 * b.m + j2)];
                            worst = worst.max((got - want).norm() / scale);
                        }
                    }
                }
            }
            row0 += sz;
        }
    }
    worst
}

/// Haar sample from the symmetric unitary group: an independent Haar block
/// on each U(m_λ), extended by I_{d_λ} and rotated back by the block bases.
pub fn haar_symmetric_unitary(bd: &BlockDecomposition, rng: &mut impl Rng) -> Matrix {
    let mut u = Matrix::zeros(bd.dim, bd.dim);
    for b in &bd.blocks {
        let um = haar_unitary(b.m, rng);
        let block = Matrix::identity(b.d).kron(&um);
        u = u.add(&b.basis.matmul(&block).matmul(&b.basis.dagger()));
    }
    u
}

/// ∫_{U(m)} |tr U|^{2a} dμ: the number of permutations of `a` letters whose
/// longest decreasing subsequence is at most `m`. Equals a! once m ≥ a and 1
/// at m = 1.
pub fn trace_moment(a: usize, m: usize) -> u128 {
    assert!(a <= 6, "trace moments implemented for a ≤ 6");
    if a == 0 {
        return 1;
    }
    if m >= a {
        return (1..=a as u128).product();
    }
    let mut perm: Vec<usize> = (0..a).collect();
    let mut count = 0u128;
    loop {
        // longest decreasing subsequence by quadratic DP
        let mut best = 1usize;
        let mut dp = vec![1usize; a];
        for i in 0..a {
            for j in 0..i {
                if perm[j] > perm[i] {
                    dp[i] = dp[i].max(dp[j] + 1);
                }
            }
            best = best.max(dp[i]);
        }
        if best <= m {
            count += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    count
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exact frame potential of the symmetric unitary group (Haar on it):
/// tr W = Σ_λ d_λ tr U_λ with independent Haar blocks, so
/// F_t = Σ over compositions (t_λ) of t of (t!/Π t_λ!)² Π d_λ^{2 t_λ} M_{t_λ}(m_λ).
pub fn analytic_frame_potential(bd: &BlockDecomposition, t: usize) -> Result<u128> {
    if t == 0 || t > 6 {
        return Err(Error::Unsupported(format!("analytic frame potential needs 1 ≤ t ≤ 6, got {t}")));
    }
    let fact = |k: usize| -> u128 { (1..=k as u128).product() };
    let tfact = fact(t);
    let mut total = 0u128;
    let nblocks = bd.blocks.len();
    let mut parts = vec![0usize; nblocks];
    fn rec(
        blocks: &[Block],
        parts: &mut Vec<usize>,
        idx: usize,
        remaining: usize,
        tfact: u128,
        fact: &dyn Fn(usize) -> u128,
        total: &mut u128,
    ) {
        if idx == blocks.len() {
            if remaining != 0 {
                return;
            }
            let mut coeff = tfact;
            for &p in parts.iter() {
                coeff /= fact(p);
            }
            let mut term = coeff * coeff;
            for (b, &p) in blocks.iter().zip(parts.iter()) {
                term *= (b.d as u128).pow(2 * p as u32);
                term *= trace_moment(p, b.m);
            }
            *total += term;
            return;
        }
        for p in 0..=remaining {
            parts[idx] = p;
            rec(blocks, parts, idx + 1, remaining - p, tfact, fact, total);
        }
        parts[idx] = 0;
    }
    rec(&bd.blocks, &mut parts, 0, t, tfact, &fact, &mut total);
    Ok(total)
}

/// Dimension of the commutant algebra Σ m_λ².
pub fn commutant_dimension(spec: &SymmetrySpec, tol: f64, rng: &mut impl Rng) -> Result<usize> {
    Ok(block_decompose(spec, tol, rng)?.commutant_dimension())
}

/// Whether two symmetries impose the same constraint, i.e. generate the same
/// *-algebra: equal commutant dimensions plus mutual containment of each
/// side's generators in the other side's algebra span.
pub fn equal_constraints(a: &SymmetrySpec, b: &SymmetrySpec, tol: f64, rng: &mut impl Rng) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::Unsupported("constraint comparison across different registers".into()));
    }
    let dim = a.dim();
    let ga = a.hermitian_generators();
    let gb = b.hermitian_generators();
    let ba = algebra_basis(dim, &ga, dim * dim)?;
    let bb = algebra_basis(dim, &gb, dim * dim)?;
    if ba.len() != bb.len() {
        return Ok(false);
    }
    let contained = |gens: &[Matrix], basis: &[Matrix]| {
        gens.iter().all(|g| span_residual(g, basis) <= tol.max(1e-9) * g.frobenius_norm().max(1.0))
    };
    if !contained(&ga, &bb) || !contained(&gb, &ba) {
        return Ok(false);
    }
    let da = commutant_dimension(a, 1e-7, rng)?;
    let db = commutant_dimension(b, 1e-7, rng)?;
    Ok(da == db)
}
