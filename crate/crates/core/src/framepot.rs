//! Frame potentials, twirling channels, the derandomizing D-channel, and
//! design certification.
//!
//! The frame potential of an ensemble is the mean of |tr(U U′†)|^{2t} over
//! independent pairs. For a group it reduces to a single sum by right
//! invariance; for the Haar measure on a symmetric unitary group it is an
//! exact integer supplied by `commutant::analytic_frame_potential`, and every
//! sub-ensemble lies above that value, with equality exactly at a design.

use crate::canonical::StandardForm;
use crate::clifford::{enumerate_cliffords, random_clifford, CliffordTableau};
use crate::commutant::{analytic_frame_potential, block_decompose, equal_constraints, BlockDecomposition, SymmetrySpec};
use crate::linalg::{haar_unitary, Matrix};
use crate::pauli::{pauli_support_of_unitary_group, PauliOp, PauliSubgroup};
use crate::samplers::{sample_pauli_symmetric, sample_su2, sample_u1};
use crate::{canonical, shard_rng, Error, Result};
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    McPairwise,
    GroupSumExact,
    Analytic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::McPairwise => "mc_pairwise",
            Method::GroupSumExact => "group_sum_exact",
            Method::Analytic => "analytic",
        }
    }
}

/// A frame-potential value with its provenance.
#[derive(Clone, Debug)]
pub struct FramePotentialEstimate {
    pub t: usize,
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub method: Method,
}

/// An ensemble a twirl or frame potential can be taken over. Clifford-valued
/// ensembles keep their tableau form so pair traces stay exact.
pub enum TwirlEnsemble {
    FiniteGroup(Vec<Matrix>),
    FiniteClifford(Vec<CliffordTableau>),
    HaarUnitary { dim: usize },
    HaarSymmetric(BlockDecomposition),
    PauliSymmetricClifford(StandardForm),
    U1Clifford { n: usize },
    SU2Clifford { n: usize },
}

enum Draw {
    Dense(Matrix),
    Tableau(CliffordTableau),
}

impl TwirlEnsemble {
    pub fn dim(&self) -> usize {
        match self {
            TwirlEnsemble::FiniteGroup(els) => els.first().map(|m| m.rows()).unwrap_or(0),
            TwirlEnsemble::FiniteClifford(els) => 1usize << els.first().map(|t| t.n()).unwrap_or(0),
            TwirlEnsemble::HaarUnitary { dim } => *dim,
            TwirlEnsemble::HaarSymmetric(bd) => bd.dim,
            TwirlEnsemble::PauliSymmetricClifford(sf) => 1usize << sf.n(),
            TwirlEnsemble::U1Clifford { n } | TwirlEnsemble::SU2Clifford { n } => 1usize << n,
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> Draw {
        match self {
            TwirlEnsemble::FiniteGroup(els) => Draw::Dense(els[rng.gen_range(0..els.len())].clone()),
            TwirlEnsemble::FiniteClifford(els) => Draw::Tableau(els[rng.gen_range(0..els.len())].clone()),
            TwirlEnsemble::HaarUnitary { dim } => Draw::Dense(haar_unitary(*dim, rng)),
            TwirlEnsemble::HaarSymmetric(bd) => Draw::Dense(crate::commutant::haar_symmetric_unitary(bd, rng)),
            TwirlEnsemble::PauliSymmetricClifford(sf) => {
                Draw::Tableau(sample_pauli_symmetric(sf, rng).to_tableau())
            }
            TwirlEnsemble::U1Clifford { n } => Draw::Tableau(sample_u1(*n, rng)),
            TwirlEnsemble::SU2Clifford { n } => Draw::Tableau(sample_su2(*n, rng)),
        }
    }
}

fn pair_value(a: Draw, b: Draw, t: usize) -> f64 {
    let base = match (a, b) {
        (Draw::Tableau(u), Draw::Tableau(v)) => u.compose(&v.inverse()).trace_magnitude_squared(),
        (Draw::Dense(u), Draw::Dense(v)) => u.trace_mul_dagger(&v).norm_sqr(),
        (Draw::Tableau(u), Draw::Dense(v)) | (Draw::Dense(v), Draw::Tableau(u)) => {
            u.to_matrix().expect("dense cap").trace_mul_dagger(&v).norm_sqr()
        }
    };
    base.powi(t as i32)
}

const SHARD: u64 = 1024;

/// Monte Carlo frame potential over independent pairs (U, U′) drawn from the
/// two ensembles. Deterministic for a fixed seed regardless of thread count:
/// samples are split into fixed shards with per-shard RNGs and merged in
/// index order.
pub fn frame_potential_mc(
    a: &TwirlEnsemble,
    b: &TwirlEnsemble,
    t: usize,
    m_samples: u64,
    seed: u64,
) -> FramePotentialEstimate {
    assert_eq!(a.dim(), b.dim(), "frame potential dimension mismatch");
    assert!(t >= 1 && m_samples >= 2);
    let shards = m_samples.div_ceil(SHARD);
    let partials: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(seed, s);
            let count = SHARD.min(m_samples - s * SHARD);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let v = pair_value(a.draw(&mut rng), b.draw(&mut rng), t);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partials.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let m = m_samples as f64;
    let mean = sum / m;
    let var = (sumsq / m - mean * mean).max(0.0);
    FramePotentialEstimate {
        t,
        value: mean,
        stderr: (var / m).sqrt(),
        samples: m_samples,
        method: Method::McPairwise,
    }
}

/// Exact frame potential of a finite group (mod phase) via the single-sum
/// identity F_t = (1/|X|) Σ_W |tr W|^{2t} from right invariance.
pub fn frame_potential_group_sum(ensemble: &TwirlEnsemble, t: usize) -> Result<FramePotentialEstimate> {
    let (len, sum) = match ensemble {
        TwirlEnsemble::FiniteGroup(els) => {
            if els.len() as u64 > 10_000_000 {
                return Err(Error::CapExceeded("group sum over more than 1e7 elements".into()));
            }
            let s: f64 = els.par_iter().map(|w| w.trace().norm_sqr().powi(t as i32)).sum();
            (els.len(), s)
        }
        TwirlEnsemble::FiniteClifford(els) => {
            if els.len() as u64 > 10_000_000 {
                return Err(Error::CapExceeded("group sum over more than 1e7 elements".into()));
            }
            let s: f64 = els.par_iter().map(|w| w.trace_magnitude_squared().powi(t as i32)).sum();
            (els.len(), s)
        }
        _ => return Err(Error::Unsupported("group sum needs a finite ensemble".into())),
    };
    Ok(FramePotentialEstimate {
        t,
        value: sum / len as f64,
        stderr: 0.0,
        samples: len as u64,
        method: Method::GroupSumExact,
    })
}

fn kron_power(u: &Matrix, t: usize) -> Matrix {
    let mut out = Matrix::identity(1);
    for _ in 0..t {
        out = out.kron(u);
    }
    out
}

fn densify(d: Draw) -> Matrix {
    match d {
        Draw::Dense(m) => m,
        Draw::Tableau(t) => t.to_matrix().expect("dense cap"),
    }
}

/// The t-fold twirl Φ_{t,X}(L): exact average for finite ensembles, Monte
/// Carlo with `m_samples` draws otherwise.
pub fn apply_twirl(
    ensemble: &TwirlEnsemble,
    t: usize,
    l: &Matrix,
    m_samples: u64,
    seed: u64,
) -> Matrix {
    let dim = ensemble.dim();
    let big = dim.pow(t as u32);
    assert_eq!(l.rows(), big, "operator must act on {t} copies");
    assert_eq!(l.cols(), big);
    let conjugate_sum = |els: &[Matrix]| -> Matrix {
        let mut acc = Matrix::zeros(big, big);
        for u in els {
            let k = kron_power(u, t);
            acc = acc.add(&l.conjugated_by(&k));
        }
        acc.scale(C64::new(1.0 / els.len() as f64, 0.0))
    };
    match ensemble {
        TwirlEnsemble::FiniteGroup(els) => conjugate_sum(els),
        TwirlEnsemble::FiniteClifford(els) => {
            let dense: Vec<Matrix> = els.iter().map(|t| t.to_matrix().expect("dense cap")).collect();
            conjugate_sum(&dense)
        }
        _ => {
            let shards = m_samples.div_ceil(SHARD);
            let partials: Vec<Matrix> = (0..shards)
                .into_par_iter()
                .map(|s| {
                    let mut rng = shard_rng(seed, s);
                    let count = SHARD.min(m_samples - s * SHARD);
                    let mut acc = Matrix::zeros(big, big);
                    for _ in 0..count {
                        let u = densify(ensemble.draw(&mut rng));
                        acc = acc.add(&l.conjugated_by(&kron_power(&u, t)));
                    }
                    acc
                })
                .collect();
            let mut acc = Matrix::zeros(big, big);
            for p in partials {
                acc = acc.add(&p);
            }
            acc.scale(C64::new(1.0 / m_samples as f64, 0.0))
        }
    }
}

// --- the derandomizing D-channel ---

/// How the third-block Clifford average is evaluated.
pub enum D3Mode {
    /// Exact average over all of C_{n3}/U_0 (precomputed conjugators).
    Exact(Vec<Matrix>),
    /// Monte Carlo average over uniformly random third-block Cliffords.
    Mc { count: u64 },
}

/// The ordered mixture channel D = D4 ∘ D3 ∘ D2 ∘ D1 acting on operators over
/// three copies of the register, for a standard-position symmetry
/// (n1, n2, n3):
///
/// * D1: S-power 4-mixtures on each second-block qubit (a diagonal weight
///   selection rule);
/// * D2: CZ 2-mixtures on each second-block pair (a parity selection rule);
/// * D3: the Clifford average on the third block;
/// * D4: controlled-Pauli 4^{n3}-mixtures from each second-block qubit.
///
/// Its output lies in the fixed-point space of the 3-fold twirl over the
/// symmetric unitary group, and equals that twirl.
pub struct DChannel {
    n1: usize,
    n2: usize,
    n3: usize,
    keys: Vec<u64>,
    d3: D3Mode,
    d4: Vec<Vec<Matrix>>,
}

const COPIES: usize = 3;

/// Build the D-channel for a standard-position symmetry. Exact third-block
/// averaging is used whenever n3 ≤ 2; otherwise `mc_for_d3` random Cliffords.
pub fn build_d_channel(sf: &StandardForm, mc_for_d3: u64) -> Result<DChannel> {
    let (n1, n2, n3) = sf.dims();
    let n = sf.n();
    let big = 1usize << (COPIES * n);
    if big > 4096 {
        return Err(Error::CapExceeded(format!("D-channel at 3x{n} qubits (dim {big})")));
    }

    // Per-basis-state key: second-block weights (one sum per qubit) and pair
    // parities; D1 and D2 together keep exactly the entries whose row and
    // column keys agree.
    let bit = |state: usize, copy: usize, qubit: usize| -> u64 {
        let g = copy * n + qubit;
        ((state >> (COPIES * n - 1 - g)) & 1) as u64
    };
    let mut keys = vec![0u64; big];
    for (state, key) in keys.iter_mut().enumerate() {
        let mut k = 0u64;
        for m in 0..n2 {
            let w: u64 = (0..COPIES).map(|c| bit(state, c, n1 + m)).sum();
            k = k * 4 + w;
        }
        for m in 0..n2 {
            for mp in (m + 1)..n2 {
                let par: u64 = (0..COPIES)
                    .map(|c| bit(state, c, n1 + m) * bit(state, c, n1 + mp))
                    .sum::<u64>()
                    & 1;
                k = k * 2 + par;
            }
        }
        *key = k;
    }

    let single_to_triple = |u: &Matrix| -> Matrix {
        let mut out = Matrix::identity(1);
        for _ in 0..COPIES {
            out = out.kron(u);
        }
        out
    };

    let d3 = if n3 == 0 {
        D3Mode::Exact(vec![Matrix::identity(big)])
    } else if n3 <= 2 {
        let front = Matrix::identity(1 << (n1 + n2));
        let mut conj = Vec::new();
        for v in enumerate_cliffords(n3) {
            let vd = v.to_matrix()?;
            conj.push(single_to_triple(&front.kron(&vd)));
        }
        D3Mode::Exact(conj)
    } else {
        D3Mode::Mc { count: mc_for_d3.max(1) }
    };

    // Controlled-Pauli conjugators, one family per second-block qubit.
    let mut d4 = Vec::with_capacity(n2);
    for m in 0..n2 {
        let mut family = Vec::new();
        for v in 0..(1u128 << (2 * n3)) {
            let q_local = PauliOp::from_vector(n3, v);
            let q_full = q_local.embed(n, n1 + n2);
            let gate = CliffordTableau::controlled_pauli(n1 + m, &q_full);
            family.push(single_to_triple(&gate.to_matrix()?));
        }
        d4.push(family);
    }

    Ok(DChannel { n1, n2, n3, keys, d3, d4 })
}

impl DChannel {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Apply D to an operator on three register copies. The RNG is only
    /// consumed in Monte Carlo D3 mode.
    pub fn apply(&self, l: &Matrix, rng: &mut impl Rng) -> Matrix {
        let big = self.keys.len();
        assert_eq!(l.rows(), big, "operator dimension mismatch");
        // D1, D2: diagonal selection rules.
        let mut cur = l.clone();
        for r in 0..big {
            for c in 0..big {
                if self.keys[r] != self.keys[c] {
                    cur[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        // D3: third-block Clifford average.
        cur = match &self.d3 {
            D3Mode::Exact(conjugators) => {
                let mut acc = Matrix::zeros(big, big);
                for k in conjugators {
                    acc = acc.add(&cur.conjugated_by(k));
                }
                acc.scale(C64::new(1.0 / conjugators.len() as f64, 0.0))
            }
            D3Mode::Mc { count } => {
                let n = self.n1 + self.n2 + self.n3;
                let front = Matrix::identity(1 << (self.n1 + self.n2));
                let mut acc = Matrix::zeros(big, big);
                for _ in 0..*count {
                    let v = random_clifford(self.n3, rng).to_matrix().expect("dense cap");
                    let mut k = Matrix::identity(1);
                    for _ in 0..COPIES {
                        k = k.kron(&front.kron(&v));
                    }
                    debug_assert_eq!(k.rows(), 1usize << (COPIES * n));
                    acc = acc.add(&cur.conjugated_by(&k));
                }
                acc.scale(C64::new(1.0 / *count as f64, 0.0))
            }
        };
        // D4: controlled-Pauli mixtures, one second-block qubit at a time.
        for family in &self.d4 {
            let mut acc = Matrix::zeros(big, big);
            for k in family {
                acc = acc.add(&cur.conjugated_by(k));
            }
            cur = acc.scale(C64::new(1.0 / family.len() as f64, 0.0));
        }
        cur
    }
}

// --- classification and certification ---

#[derive(Clone, Debug)]
pub struct ClassifyReport {
    pub pauli_equivalent: bool,
    pub candidate: PauliSubgroup,
}

/// Decide whether a symmetry imposes the same constraint as some Pauli
/// subgroup: build the candidate from the Pauli support of sampled group
/// elements, then test constraint equality.
pub fn classify_symmetry(spec: &SymmetrySpec, tol: f64, seed: u64) -> Result<ClassifyReport> {
    let mut rng = shard_rng(seed, 0);
    let samples = spec.sample_group_elements(8, &mut rng);
    let candidate = pauli_support_of_unitary_group(&samples, tol)?;
    let pauli_equivalent = equal_constraints(spec, &SymmetrySpec::Pauli(candidate.clone()), tol, &mut rng)?;
    Ok(ClassifyReport { pauli_equivalent, candidate })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Design,
    NotDesign,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Design => "design",
            Verdict::NotDesign => "not_design",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyRow {
    pub t: usize,
    pub estimate: FramePotentialEstimate,
    pub analytic: f64,
    pub verdict: Verdict,
}

/// The symmetric Clifford sampler ensemble for a supported symmetry.
pub fn clifford_ensemble(spec: &SymmetrySpec) -> Result<TwirlEnsemble> {
    match spec {
        SymmetrySpec::Pauli(q) => Ok(TwirlEnsemble::PauliSymmetricClifford(canonical::canonicalize(q))),
        SymmetrySpec::U1(n) => Ok(TwirlEnsemble::U1Clifford { n: *n }),
        SymmetrySpec::SU2(n) => Ok(TwirlEnsemble::SU2Clifford { n: *n }),
        SymmetrySpec::Custom { .. } => {
            Err(Error::Unsupported("no symmetric Clifford sampler for custom symmetries".into()))
        }
    }
}

/// Compare the symmetric Clifford group's frame potentials against the
/// symmetric unitary group for t = 1..t_max: within 3σ of the floor is a
/// design, more than 5σ above it is not, anything else is inconclusive
/// (raise the budget).
pub fn certify_design(
    spec: &SymmetrySpec,
    t_max: usize,
    budget: u64,
    seed: u64,
) -> Result<Vec<CertifyRow>> {
    let ensemble = clifford_ensemble(spec)?;
    let mut rng = shard_rng(seed, u64::MAX);
    let bd = block_decompose(spec, 1e-8, &mut rng)?;
    let mut rows = Vec::new();
    for t in 1..=t_max {
        let est = frame_potential_mc(&ensemble, &ensemble, t, budget, seed.wrapping_add(1_000_003 * t as u64));
        let analytic = analytic_frame_potential(&bd, t)? as f64;
        let gap = est.value - analytic;
        let verdict = if gap.abs() < 3.0 * est.stderr {
            Verdict::Design
        } else if gap > 5.0 * est.stderr {
            Verdict::NotDesign
        } else {
            Verdict::Inconclusive
        };
        rows.push(CertifyRow { t, estimate: est, analytic, verdict });
    }
    Ok(rows)
}
