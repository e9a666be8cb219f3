//! Cross-module invariants on seeded random instances: measure identities,
//! criterion equivalences, witness soundness, and Monte Carlo agreement.

use kusuoka_core::ergodicity::{
    algebra_irreducible, ergodicity_verdict, lemma_trace_limit, nonergodic_tail_mass,
    pvm2_eigenvector_in_theta, rank1_subset_search, scaled_projection_criterion, suggest_m_max,
    VerdictStatus, Witness,
};
use kusuoka_core::instances::{
    computational_split_povm, diagonal_unitary, eigenbasis_pvm, hadamard,
    nonergodic_two_proj_instance, random_onb_pvm, random_rank1_povm, random_two_proj_povm,
    reducible_rank1_instance,
};
use kusuoka_core::linalg::hermitian_eig;
use kusuoka_core::markov::{is_irreducible, markov_cylinder_prob, transition_matrix};
use kusuoka_core::measure::{KusuokaSystem, OperatorFamily};
use kusuoka_core::quantum::{haar_random_unitary, validate_povm};
use kusuoka_core::rng::CounterRng;
use kusuoka_core::trajectories::{empirical_cylinder_freq, sample_trajectory_indexed};
use kusuoka_core::{C64, ComplexMatrix, OutcomeString, Pifs, Povm, Tolerances, Unitary};

fn tols() -> Tolerances {
    Tolerances::default()
}

fn strings(k: usize, n: usize) -> Vec<OutcomeString> {
    let count = k.pow(n as u32);
    (0..count)
        .map(|idx| {
            let mut rest = idx;
            let mut symbols = Vec::with_capacity(n);
            for _ in 0..n {
                symbols.push(rest % k);
                rest /= k;
            }
            OutcomeString::new(symbols)
        })
        .collect()
}

/// Random full-rank POVM outside the special classes: normalize random PSD
/// matrices by the inverse square root of their sum.
fn random_general_povm(d: usize, k: usize, seed: u64) -> Povm {
    let mut rng = CounterRng::stream(seed, 17);
    let parts: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ComplexMatrix::from_fn(d, d, |_, _| {
                let (x, y) = rng.next_gaussian_pair();
                C64::new(x, y)
            });
            g.matmul(&g.adjoint())
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &parts {
        sum = sum.add(p);
    }
    let dec = hermitian_eig(&sum, 1e-8, &tols()).unwrap();
    let inv_sqrt_vals: Vec<C64> = dec
        .eigenvalues
        .iter()
        .map(|z| C64::new(1.0 / z.re.sqrt(), 0.0))
        .collect();
    let v = &dec.eigenvectors;
    let t = v
        .matmul(&ComplexMatrix::diagonal(&inv_sqrt_vals))
        .matmul(&v.adjoint());
    let elements: Vec<ComplexMatrix> =
        parts.iter().map(|p| t.matmul(p).matmul(&t).hermitize()).collect();
    validate_povm(elements, &tols()).expect("normalized PSD parts form a POVM")
}

fn instance_zoo() -> Vec<(String, Pifs)> {
    let mut zoo: Vec<(String, Pifs)> = Vec::new();
    let mut push = |name: String, u: Unitary, povm: Povm| {
        zoo.push((name, Pifs::new(u, povm, &tols()).unwrap()));
    };
    for seed in 0..3u64 {
        push(
            format!("general-d3-seed{seed}"),
            haar_random_unitary(3, 100 + seed),
            random_general_povm(3, 3, seed),
        );
        push(
            format!("rank1-d2k3-seed{seed}"),
            haar_random_unitary(2, 200 + seed),
            random_rank1_povm(2, 3, 300 + seed),
        );
        push(
            format!("pvm-d4-seed{seed}"),
            haar_random_unitary(4, 400 + seed),
            random_onb_pvm(4, 500 + seed),
        );
        push(
            format!("twoproj-d3-seed{seed}"),
            haar_random_unitary(3, 600 + seed),
            random_two_proj_povm(3, 700 + seed),
        );
    }
    push(
        "block-d3".into(),
        diagonal_unitary(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]),
        computational_split_povm(3),
    );
    zoo
}

#[test]
fn measure_identities_consistency_and_shift_invariance() {
    for (name, p) in instance_zoo() {
        let k = p.k();
        for n in 1..=5usize {
            let mut total = 0.0;
            for s in strings(k, n) {
                let prob = p.kusuoka_cylinder_prob(&s).unwrap();
                total += prob.value();
                // dual-route agreement
                assert!(
                    prob.difference() <= 1e-10,
                    "{name}: route difference {} at {s}",
                    prob.difference()
                );
                // consistency and shift-invariance
                let mut right = 0.0;
                let mut left = 0.0;
                for j in 0..k {
                    let mut ext = s.clone();
                    ext.push(j);
                    right += p.kusuoka_cylinder_prob(&ext).unwrap().value();
                    let mut pre = vec![j];
                    pre.extend_from_slice(s.symbols());
                    left += p
                        .kusuoka_cylinder_prob(&OutcomeString::new(pre))
                        .unwrap()
                        .value();
                }
                assert!((right - prob.value()).abs() <= 1e-10, "{name}: consistency at {s}");
                assert!((left - prob.value()).abs() <= 1e-10, "{name}: shift at {s}");
            }
            assert!((total - 1.0).abs() <= 1e-9, "{name}: total at n = {n} is {total}");
        }
    }
}

#[test]
fn recursive_and_closed_form_probabilities_agree() {
    for (name, p) in instance_zoo() {
        let rho = p.stationary_state();
        for s in strings(p.k(), 4) {
            let closed = p.string_prob(&rho, &s).unwrap();
            let recursive = p.string_prob_recursive(&rho, &s).unwrap();
            assert!(
                (closed - recursive).abs() <= 1e-10,
                "{name}: {s} closed {closed} vs recursive {recursive}"
            );
        }
    }
}

#[test]
fn kusuoka_system_matches_pifs_measure() {
    for (name, p) in instance_zoo() {
        let system = KusuokaSystem::new(OperatorFamily::from_pifs(&p), &tols()).unwrap();
        for s in strings(p.k(), 3) {
            let lhs = system.cylinder_prob(&s).unwrap();
            let rhs = p.kusuoka_cylinder_prob(&s).unwrap().value();
            assert!((lhs - rhs).abs() <= 1e-11, "{name} at {s}");
        }
    }
}

#[test]
fn markov_factorization_matches_exact_measure() {
    for d in [2usize, 3] {
        for seed in 0..5u64 {
            let p = Pifs::new(
                haar_random_unitary(d, 40 + seed),
                random_rank1_povm(d, d + 1, 50 + seed),
                &tols(),
            )
            .unwrap();
            let q = transition_matrix(&p).unwrap();
            assert!(q.bistochastic_residual() <= 1e-10);
            for n in 1..=6usize {
                for s in strings(p.k(), n) {
                    let markov = markov_cylinder_prob(&q, &s).unwrap();
                    let exact = p.kusuoka_cylinder_prob(&s).unwrap().value();
                    assert!(
                        (markov - exact).abs() <= 1e-10,
                        "d={d} seed={seed} at {s}: {markov} vs {exact}"
                    );
                }
            }
        }
    }
}

/// The three rank-1 criteria must agree instance by instance.
#[test]
fn rank1_criterion_equivalence() {
    let mut checked = 0;
    let mut verdict_mix = [0usize; 2];
    let mut cases: Vec<(Unitary, Povm)> = Vec::new();
    for d in [2usize, 3, 4] {
        for extra in 0..3usize {
            for seed in 0..2u64 {
                let k = d + extra;
                cases.push((
                    haar_random_unitary(d, 1000 + seed),
                    random_rank1_povm(d, k, 2000 + 10 * d as u64 + seed),
                ));
            }
        }
        // eigenbasis PVMs are the canonical reducible cases
        let u = haar_random_unitary(d, 3000 + d as u64);
        let povm = eigenbasis_pvm(&u, &tols()).unwrap();
        cases.push((u, povm));
    }
    cases.push(reducible_rank1_instance(4));

    for (u, povm) in cases {
        let p = Pifs::new(u, povm, &tols()).unwrap();
        let chain = is_irreducible(&transition_matrix(&p).unwrap(), p.zero_prob_threshold());
        let subset = rank1_subset_search(p.unitary(), p.povm(), &tols()).unwrap();
        let algebra = algebra_irreducible(p.kraus(), 1e-9);
        assert_eq!(
            chain.irreducible,
            subset.is_none(),
            "transition vs subset disagree"
        );
        assert_eq!(
            chain.irreducible, algebra.irreducible,
            "transition vs algebra disagree"
        );
        verdict_mix[chain.irreducible as usize] += 1;
        checked += 1;
    }
    assert!(checked >= 20);
    assert!(verdict_mix[0] > 0 && verdict_mix[1] > 0, "need both verdicts: {verdict_mix:?}");
}

/// Eigenvector-in-Θ must match (negated) Burnside irreducibility.
#[test]
fn two_proj_criterion_equivalence() {
    let mut verdict_mix = [0usize; 2];
    for d in [2usize, 3, 4] {
        for seed in 0..4u64 {
            let u = haar_random_unitary(d, 4000 + seed);
            let povm = random_two_proj_povm(d, 5000 + seed);
            let p = Pifs::new(u, povm, &tols()).unwrap();
            let found = pvm2_eigenvector_in_theta(p.unitary(), p.povm(), &tols())
                .unwrap()
                .is_some();
            let algebra = algebra_irreducible(p.kraus(), 1e-9);
            assert_eq!(found, !algebra.irreducible, "d={d} seed={seed}");
            verdict_mix[found as usize] += 1;
        }
        for seed in 0..4u64 {
            let (u, povm) = nonergodic_two_proj_instance(d, 6000 + seed);
            let p = Pifs::new(u, povm, &tols()).unwrap();
            let found = pvm2_eigenvector_in_theta(p.unitary(), p.povm(), &tols())
                .unwrap()
                .is_some();
            assert!(found, "engineered instance must have an eigenvector in Θ");
            let algebra = algebra_irreducible(p.kraus(), 1e-9);
            assert!(!algebra.irreducible);
            verdict_mix[1] += 1;
        }
    }
    assert!(verdict_mix[0] > 0 && verdict_mix[1] > 0);
}

/// Every NonErgodic witness re-verifies independently.
#[test]
fn witnesses_are_sound() {
    let mut cases: Vec<Pifs> = Vec::new();
    for d in [2usize, 3, 4] {
        let u = haar_random_unitary(d, 7000 + d as u64);
        cases.push(Pifs::new(u.clone(), eigenbasis_pvm(&u, &tols()).unwrap(), &tols()).unwrap());
        let (nu, npovm) = nonergodic_two_proj_instance(d, 7100 + d as u64);
        cases.push(Pifs::new(nu, npovm, &tols()).unwrap());
    }
    let (ru, rpovm) = reducible_rank1_instance(5);
    cases.push(Pifs::new(ru, rpovm, &tols()).unwrap());

    let mut eigen_witnesses = 0;
    let mut subset_witnesses = 0;
    for p in &cases {
        let verdict = ergodicity_verdict(p, &tols()).unwrap();
        assert_eq!(verdict.status, VerdictStatus::NonErgodic);
        assert!(verdict.consistent, "cross-checks disagree");
        match verdict.witness.expect("NonErgodic must carry a witness") {
            Witness::EigenvectorInTheta { vector, eigenvalue } => {
                let u = p.unitary().matrix();
                let residual = u.matmul(&vector).sub(&vector.scale(eigenvalue)).hs_norm();
                assert!(residual <= 1e-8, "eigen residual {residual}");
                let z = &p.povm().two_proj_view().unwrap().z;
                assert!(z.hs_inner(&vector).norm() <= 1e-8);
                eigen_witnesses += 1;
            }
            Witness::IndexSubset { subset, subspace } => {
                assert!(
                    scaled_projection_criterion(p.unitary(), p.povm(), &subspace, &tols())
                        .unwrap()
                );
                // no transition mass leaves the subset
                let q = transition_matrix(p).unwrap();
                for &i in &subset {
                    for j in 0..q.k() {
                        if !subset.contains(&j) {
                            assert!(q.get(i, j) <= 1e-12);
                        }
                    }
                }
                subset_witnesses += 1;
            }
            Witness::InvariantSubspace { subspace } => {
                assert!(
                    scaled_projection_criterion(p.unitary(), p.povm(), &subspace, &tols())
                        .unwrap()
                );
            }
        }
    }
    assert!(eigen_witnesses > 0 && subset_witnesses > 0);
}

#[test]
fn lemma_sequences_decay_to_the_spectral_value() {
    for d in [2usize, 3, 4] {
        for seed in 0..4u64 {
            let u = haar_random_unitary(d, 8000 + seed);
            let povm = random_two_proj_povm(d, 8100 + seed);
            let sug = suggest_m_max(&u, &povm, 1e-6, 1 << 22, &tols()).unwrap();
            assert!(!sug.capped, "d={d} seed={seed} rate {:?}", sug.rate);
            let limit = lemma_trace_limit(&u, &povm, sug.m_max, &tols()).unwrap();
            for w in limit.sequence.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "sequence must be nonincreasing");
            }
            assert!(
                limit.convergence_gap.abs() <= 1e-6,
                "d={d} seed={seed}: gap {} after m={}",
                limit.convergence_gap,
                sug.m_max
            );
            assert!(limit.spectral_value <= (d - 1) as f64);
        }
    }
}

/// Monte Carlo link: the fraction of trajectories that read all-1 over a
/// long window estimates the non-ergodic tail mass.
#[test]
fn empirical_tail_fraction_matches_spectral_mass() {
    let block = Pifs::new(
        diagonal_unitary(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]),
        computational_split_povm(3),
        &tols(),
    )
    .unwrap();
    let (nu, npovm) = nonergodic_two_proj_instance(3, 6002);
    let engineered = Pifs::new(nu, npovm, &tols()).unwrap();

    for (name, p, samples) in [("block", block, 10_000u64), ("engineered", engineered, 4_000)] {
        let mass = nonergodic_tail_mass(p.unitary(), p.povm(), &tols()).unwrap();
        let sug = suggest_m_max(p.unitary(), p.povm(), 1e-6, 1 << 22, &tols()).unwrap();
        let window = sug.m_max.max(4);
        let mut all_ones = 0u64;
        for index in 0..samples {
            let t = sample_trajectory_indexed(&p, window, 909, index, false).unwrap();
            if t.outcomes.symbols().iter().all(|&s| s == 0) {
                all_ones += 1;
            }
        }
        let freq = all_ones as f64 / samples as f64;
        let se = (freq * (1.0 - freq) / samples as f64).sqrt().max(1e-4);
        assert!(
            (freq - mass).abs() <= 3.0 * se,
            "{name}: freq {freq} vs mass {mass} (se {se}, window {window})"
        );
    }
}

/// Goodness of fit of empirical length-3 cylinder frequencies against the
/// exact measure, at significance 1e−3.
#[test]
fn chi_square_cylinder_fit() {
    // critical values of χ² at upper tail 1e−3
    let cases = [
        ("hadamard-comp", Pifs::new(hadamard(), random_onb_pvm(2, 0), &tols()).unwrap(), 24.321886347856854),
        (
            "rank1-d3",
            Pifs::new(
                haar_random_unitary(3, 20),
                random_rank1_povm(3, 3, 121),
                &tols(),
            )
            .unwrap(),
            54.05196238857664,
        ),
    ];
    for (name, p, critical) in cases {
        let k = p.k();
        let n = 10_000u64;
        // exact cell probabilities must be bounded away from zero for the
        // χ² approximation to make sense
        let probs: Vec<f64> = strings(k, 3)
            .iter()
            .map(|s| p.kusuoka_cylinder_prob(s).unwrap().value())
            .collect();
        let min_p = probs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min_p > 2e-3, "{name}: pick a seed with non-degenerate cells ({min_p})");

        let stats = empirical_cylinder_freq(&p, 3, n, 3, 31).unwrap();
        let mut chi2 = 0.0;
        for (s, expected_p) in strings(k, 3).iter().zip(&probs) {
            let observed = stats.cylinder_counts.get(s).copied().unwrap_or(0) as f64;
            let expected = expected_p * n as f64;
            chi2 += (observed - expected).powi(2) / expected;
        }
        assert!(
            chi2 < critical,
            "{name}: χ² = {chi2} exceeds the 1e-3 critical value {critical}"
        );
    }
}

/// Determinism of ensembles: identical parameters give identical statistics.
#[test]
fn empirical_statistics_are_deterministic() {
    let p = Pifs::new(hadamard(), random_onb_pvm(2, 1), &tols()).unwrap();
    let a = empirical_cylinder_freq(&p, 2, 500, 4, 77).unwrap();
    let b = empirical_cylinder_freq(&p, 2, 500, 4, 77).unwrap();
    assert_eq!(a, b);
}
