//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line with the measured numbers (visible with `--nocapture`).
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`.

use num_complex::Complex64 as C64;
use rand::Rng;
use std::time::Instant;
use symclif_core::canonical::{canonicalize, conjugate_subgroup, StandardForm};
use symclif_core::clifford::{enumerate_cliffords, CliffordTableau};
use symclif_core::commutant::{
    analytic_frame_potential, block_decompose, haar_symmetric_unitary, SymmetrySpec,
};
use symclif_core::framepot::{
    apply_twirl, build_d_channel, classify_symmetry, frame_potential_group_sum, frame_potential_mc,
    TwirlEnsemble,
};
use symclif_core::linalg::Matrix;
use symclif_core::pauli::{subgroup_from_generators, PauliOp, PauliSubgroup};
use symclif_core::samplers::{decompose, enumerate_pauli_symmetric, is_symmetric, sample_pauli_symmetric};
use symclif_core::shard_rng;

fn p(s: &str) -> PauliOp {
    PauliOp::parse(s).unwrap()
}

fn random_subgroup(n: usize, rng: &mut impl Rng) -> PauliSubgroup {
    let gens = rng.gen_range(0..=(2 * n));
    let vectors: Vec<u128> = (0..gens).map(|_| rng.gen::<u128>() & ((1u128 << (2 * n)) - 1)).collect();
    PauliSubgroup::from_vectors(n, vectors)
}

#[test]
fn criterion_01_canonicalization_soundness() {
    let start = Instant::now();
    let mut rng = shard_rng(0xC1, 0);
    for trial in 0..500 {
        let n = 1 + rng.gen_range(0..8usize);
        let q = random_subgroup(n, &mut rng);
        let sf = canonicalize(&q);
        assert_eq!(
            conjugate_subgroup(sf.w(), &q),
            sf.standard_subgroup(),
            "trial {trial}: conjugated subgroup differs from the standard form"
        );
        assert_eq!(2 * sf.n1() + sf.n2(), q.rank(), "trial {trial}: rank accounting");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("criterion 01 PASS: 500 random subgroups canonicalized soundly in {elapsed:?}");
}

#[test]
fn criterion_02_brute_force_group_equivalence() {
    let q = subgroup_from_generators(2, &[p("ZI")]);
    let brute: Vec<CliffordTableau> = enumerate_cliffords(2).filter(|t| is_symmetric(t, &q)).collect();
    assert_eq!(brute.len(), 384, "symmetric subset of the 11520 classes");

    let sf = canonicalize(&q);
    assert_eq!(sf.dims(), (0, 1, 1));
    let enumerated: std::collections::HashSet<CliffordTableau> =
        enumerate_pauli_symmetric(&sf, 1_000).unwrap().map(|e| e.to_tableau()).collect();
    assert_eq!(enumerated.len(), 384);
    let brute_set: std::collections::HashSet<CliffordTableau> = brute.iter().cloned().collect();
    assert_eq!(enumerated, brute_set, "enumerated group equals the brute-force filter as a set");

    for t in &brute {
        let e = decompose(t, &sf).expect("every symmetric element decomposes");
        assert_eq!(e.to_tableau(), *t, "decompose round trip");
    }
    println!("criterion 02 PASS: 384 classes match the brute-force filter and all round-trip");
}

#[test]
fn criterion_03_exact_3_design_n2() {
    let start = Instant::now();
    let q = subgroup_from_generators(2, &[p("ZI")]);
    let sf = canonicalize(&q);
    let dense: Vec<Matrix> = enumerate_pauli_symmetric(&sf, 1_000)
        .unwrap()
        .map(|e| e.to_tableau().to_matrix().unwrap())
        .collect();
    assert_eq!(dense.len(), 384);
    let ens = TwirlEnsemble::FiniteGroup(dense);

    let mut rng = shard_rng(0xC3, 0);
    let bd = block_decompose(&SymmetrySpec::Pauli(q), 1e-8, &mut rng).unwrap();
    let expected = [2.0, 8.0, 46.0];
    for t in 1..=3usize {
        let exact = frame_potential_group_sum(&ens, t).unwrap();
        let analytic = analytic_frame_potential(&bd, t).unwrap() as f64;
        assert!((analytic - expected[t - 1]).abs() < 1e-12);
        assert!(
            (exact.value - analytic).abs() < 1e-9,
            "t={t}: group sum {} vs analytic {analytic}",
            exact.value
        );
    }
    let f4 = frame_potential_group_sum(&ens, 4).unwrap();
    let floor4 = analytic_frame_potential(&bd, 4).unwrap() as f64;
    assert!(f4.value > floor4 + 1e-6, "t=4: {} vs floor {floor4}", f4.value);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 03 PASS: F_1..3 = 2, 8, 46 exactly; F_4 = {:.6} > {floor4} ({elapsed:?})",
        f4.value
    );
}

#[test]
fn criterion_04_single_qubit_clifford_sanity() {
    // Exact dense single-sum over the 24 classes. Note: the Haar floor on
    // U(2) is the trace moment M_t(2) (t! only applies once dim ≥ t), so the
    // 3-design equality reads F_3 = 5 and the 4-design excess F_4 = 15 > 14.
    let dense: Vec<Matrix> = enumerate_cliffords(1).map(|t| t.to_matrix().unwrap()).collect();
    assert_eq!(dense.len(), 24);
    let ens = TwirlEnsemble::FiniteGroup(dense);
    let mut rng = shard_rng(0xC4, 0);
    let bd = block_decompose(&SymmetrySpec::Pauli(PauliSubgroup::trivial(1)), 1e-8, &mut rng).unwrap();

    let f3 = frame_potential_group_sum(&ens, 3).unwrap();
    let floor3 = analytic_frame_potential(&bd, 3).unwrap() as f64;
    assert_eq!(floor3, 5.0);
    assert!((f3.value - floor3).abs() < 1e-9, "F_3 = {} vs floor {floor3}", f3.value);

    let f4 = frame_potential_group_sum(&ens, 4).unwrap();
    let floor4 = analytic_frame_potential(&bd, 4).unwrap() as f64;
    assert_eq!(floor4, 14.0);
    assert!(f4.value > floor4 + 1e-6, "F_4 = {} vs floor {floor4}", f4.value);
    assert!((f4.value - 15.0).abs() < 1e-9);
    println!(
        "criterion 04 PASS: F_3 = {} equals the design floor {floor3}; F_4 = {} > {floor4}",
        f3.value, f4.value
    );
}

#[test]
fn criterion_05_pauli_frame_potentials_n6() {
    let start = Instant::now();
    let sf = StandardForm::standard(1, 2, 3);
    let ens = TwirlEnsemble::PauliSymmetricClifford(sf);

    let mut rng = shard_rng(0xC5, 0);
    let q = StandardForm::standard(1, 2, 3).standard_subgroup();
    let bd = block_decompose(&SymmetrySpec::Pauli(q), 1e-8, &mut rng).unwrap();
    let analytic: Vec<f64> = (1..=4).map(|t| analytic_frame_potential(&bd, t).unwrap() as f64).collect();
    assert_eq!(analytic, vec![16.0, 512.0, 24576.0, 1_572_864.0]);

    // Main run at M = 1e5 pairs: equality within 3σ for t ≤ 3, a > 5σ excess
    // at t = 4.
    let m_top = 100_000u64;
    for t in 1..=3usize {
        let est = frame_potential_mc(&ens, &ens, t, m_top, 0x50 + t as u64);
        let dev = (est.value - analytic[t - 1]).abs();
        assert!(
            dev < 3.0 * est.stderr,
            "t={t}: {} vs {} (σ = {})",
            est.value,
            analytic[t - 1],
            est.stderr
        );
        assert!(est.value + 5.0 * est.stderr >= analytic[t - 1], "lower-bound invariant");
        println!("criterion 05: t={t} M=1e5 estimate {:.2} ± {:.2} (floor {})", est.value, est.stderr, analytic[t - 1]);
    }
    // The t=4 excess is real (≈ 19% above the floor) but |tr|^8 is heavy
    // tailed at this size: the per-sample deviation is ~4e7, so resolving the
    // gap at 5σ needs a few million pairs. 4e6 keeps the z-score comfortably
    // above 5 and the runtime well inside the budget.
    let est4 = frame_potential_mc(&ens, &ens, 4, 4_000_000, 0x54);
    assert!(
        est4.value - analytic[3] > 5.0 * est4.stderr,
        "t=4 gap: {} vs {} (σ = {})",
        est4.value,
        analytic[3],
        est4.stderr
    );
    println!(
        "criterion 05: t=4 M=4e6 estimate {:.0} ± {:.0} exceeds floor {} by {:.1}σ",
        est4.value,
        est4.stderr,
        analytic[3],
        (est4.value - analytic[3]) / est4.stderr
    );

    // Trendwise error decay for t ≤ 3 across M = 1e3, 1e4, 1e5: the
    // least-squares slope of log(relative error) against log(M) is negative.
    for t in 1..=3usize {
        let mut logs = Vec::new();
        for (i, m) in [1_000u64, 10_000, 100_000].into_iter().enumerate() {
            let est = frame_potential_mc(&ens, &ens, t, m, 0x60 + (4 * t + i) as u64);
            let rel = ((est.value - analytic[t - 1]).abs() / analytic[t - 1]).max(1e-12);
            logs.push(((m as f64).ln(), rel.ln()));
        }
        let xm = logs.iter().map(|(x, _)| x).sum::<f64>() / 3.0;
        let ym = logs.iter().map(|(_, y)| y).sum::<f64>() / 3.0;
        let slope = logs.iter().map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>()
            / logs.iter().map(|(x, _)| (x - xm) * (x - xm)).sum::<f64>();
        assert!(slope < 0.0, "t={t}: error trend slope {slope} not decreasing");
        println!("criterion 05: t={t} error-decay slope {slope:.2}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!("criterion 05 PASS: design for t ≤ 3, non-design at t = 4, decaying errors ({elapsed:?})");
}

#[test]
fn criterion_06_u1_frame_potentials_n4() {
    let ens = TwirlEnsemble::U1Clifford { n: 4 };
    let mut rng = shard_rng(0xC6, 0);
    let bd = block_decompose(&SymmetrySpec::U1(4), 1e-8, &mut rng).unwrap();
    assert_eq!(analytic_frame_potential(&bd, 1).unwrap(), 5);
    assert_eq!(analytic_frame_potential(&bd, 2).unwrap(), 48);

    let f1 = frame_potential_mc(&ens, &ens, 1, 100_000, 0x61);
    assert!((f1.value - 5.0).abs() < 3.0 * f1.stderr, "F_1 = {} ± {}", f1.value, f1.stderr);
    let f2 = frame_potential_mc(&ens, &ens, 2, 100_000, 0x62);
    assert!(
        f2.value - 48.0 > 5.0 * f2.stderr,
        "F_2 = {} ± {} must exceed 48 by > 5σ",
        f2.value,
        f2.stderr
    );
    println!(
        "criterion 06 PASS: F_1 = {:.3} ± {:.3} (floor 5); F_2 = {:.1} ± {:.1} above 48 by {:.1}σ",
        f1.value,
        f1.stderr,
        f2.value,
        f2.stderr,
        (f2.value - 48.0) / f2.stderr
    );
}

#[test]
fn criterion_07_su2_check_n3() {
    let els: Vec<CliffordTableau> = symclif_core::samplers::enumerate_su2(3, 10).unwrap().collect();
    assert_eq!(els.len(), 6);
    let ens = TwirlEnsemble::FiniteClifford(els);
    let mut rng = shard_rng(0xC7, 0);
    let bd = block_decompose(&SymmetrySpec::SU2(3), 1e-8, &mut rng).unwrap();

    let f1 = frame_potential_group_sum(&ens, 1).unwrap();
    assert!((f1.value - 20.0).abs() < 1e-9, "F_1 = {}", f1.value);
    assert_eq!(bd.sum_d_squared(), 20);
    assert_eq!(analytic_frame_potential(&bd, 1).unwrap(), 20);

    let f2 = frame_potential_group_sum(&ens, 2).unwrap();
    let floor2 = analytic_frame_potential(&bd, 2).unwrap() as f64;
    assert!(f2.value > floor2 + 1e-6, "F_2 = {} vs floor {floor2}", f2.value);
    println!("criterion 07 PASS: F_1 = 20 = Σd²; F_2 = {} > {floor2}", f2.value);
}

#[test]
fn criterion_08_twirl_equality_n1() {
    // Exact Φ_3 over the four S powers vs the diagonal-Haar twirl, which by
    // the monomial selection rule keeps exactly the entries whose row and
    // column indices have equal Hamming weight.
    let s_group: Vec<Matrix> =
        (0..4u8).map(|k| CliffordTableau::phase_s_power(1, 0, k).to_matrix().unwrap()).collect();
    let ens = TwirlEnsemble::FiniteGroup(s_group);
    let mut rng = shard_rng(0xC8, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let mut l = Matrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                l[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let twirled = apply_twirl(&ens, 3, &l, 1, 0);
        let mut oracle = l.clone();
        for i in 0..8usize {
            for j in 0..8usize {
                if i.count_ones() != j.count_ones() {
                    oracle[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        worst = worst.max(twirled.sub(&oracle).max_abs());
    }
    assert!(worst < 1e-9, "max deviation {worst}");
    println!("criterion 08 PASS: exact Φ_3 equals the diagonal-Haar twirl (max dev {worst:.2e})");
}

#[test]
fn criterion_09_d_channel_verification() {
    let sf = StandardForm::standard(0, 1, 1);
    let dc = build_d_channel(&sf, 0).unwrap();
    let mut rng = shard_rng(0xC9, 0);
    let q = sf.standard_subgroup();
    let bd = block_decompose(&SymmetrySpec::Pauli(q), 1e-8, &mut rng).unwrap();
    let sf_sampler = StandardForm::standard(0, 1, 1);

    let mut worst_invariance: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    for trial in 0..10 {
        let mut l = Matrix::zeros(64, 64);
        for i in 0..64 {
            for j in 0..64 {
                l[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let dl = dc.apply(&l, &mut rng);

        // Fixed under 20 sampled 3-fold symmetric Clifford conjugations.
        for _ in 0..20 {
            let u = sample_pauli_symmetric(&sf_sampler, &mut rng).to_tableau().to_matrix().unwrap();
            let k = u.kron(&u).kron(&u);
            let dev = dl.conjugated_by(&k).sub(&dl).max_abs();
            worst_invariance = worst_invariance.max(dev);
        }

        // Matches the Monte Carlo 3-fold twirl over the symmetric unitary
        // group within its own error (shard-based per-entry stderr).
        let shards = 20usize;
        let per_shard = 500u64;
        let mut means = Vec::with_capacity(shards);
        for s in 0..shards {
            let mut srng = shard_rng(0x900 + trial as u64, s as u64);
            let mut acc = Matrix::zeros(64, 64);
            for _ in 0..per_shard {
                let u = haar_symmetric_unitary(&bd, &mut srng);
                let k = u.kron(&u).kron(&u);
                acc = acc.add(&l.conjugated_by(&k));
            }
            means.push(acc.scale(C64::new(1.0 / per_shard as f64, 0.0)));
        }
        let mut mean = Matrix::zeros(64, 64);
        for m in &means {
            mean = mean.add(m);
        }
        mean = mean.scale(C64::new(1.0 / shards as f64, 0.0));
        for i in 0..64 {
            for j in 0..64 {
                let mu = mean[(i, j)];
                let var: f64 =
                    means.iter().map(|m| (m[(i, j)] - mu).norm_sqr()).sum::<f64>() / (shards - 1) as f64;
                let stderr = (var / shards as f64).sqrt();
                let dev = (dl[(i, j)] - mu).norm();
                assert!(
                    dev <= 6.0 * stderr + 1e-6,
                    "trial {trial} entry ({i},{j}): |D(L)-MC| = {dev:.3e} vs σ {stderr:.3e}"
                );
                if stderr > 0.0 {
                    worst_sigma = worst_sigma.max(dev / stderr);
                }
            }
        }
    }
    assert!(worst_invariance < 1e-8, "invariance residual {worst_invariance}");
    println!(
        "criterion 09 PASS: invariance residual {worst_invariance:.2e}; MC twirl match within {worst_sigma:.2}σ"
    );
}

#[test]
fn criterion_10_classification() {
    for n in 1..=4usize {
        let zn = PauliOp::hermitian(n, 0, (1u64 << n) - 1);
        let spec = SymmetrySpec::Pauli(subgroup_from_generators(n, &[zn]));
        let rep = classify_symmetry(&spec, 1e-8, 0xA0 + n as u64).unwrap();
        assert!(rep.pauli_equivalent, "⟨Z⊗{n}⟩ must classify as Pauli");
    }
    let rep = classify_symmetry(&SymmetrySpec::SU2(1), 1e-8, 0xB1).unwrap();
    assert!(rep.pauli_equivalent, "SU(2) on one qubit is the full Pauli constraint");
    assert_eq!(rep.candidate.rank(), 2);
    for n in 2..=4usize {
        let rep = classify_symmetry(&SymmetrySpec::U1(n), 1e-8, 0xB2 + n as u64).unwrap();
        assert!(!rep.pauli_equivalent, "U(1) on {n} qubits is not Pauli");
        let rep = classify_symmetry(&SymmetrySpec::SU2(n), 1e-8, 0xB6 + n as u64).unwrap();
        assert!(!rep.pauli_equivalent, "SU(2) on {n} qubits is not Pauli");
    }
    println!("criterion 10 PASS: Pauli and non-Pauli constraints classified correctly");
}
