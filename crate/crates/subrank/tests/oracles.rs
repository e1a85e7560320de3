//! Dual-route checks: each test validates an implementation against an
//! independent computation path.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use subrank::cones::{
    cone_membership, supermodular_rank, witness_interior, xi_from_taus, PairIndex, XiPattern,
    DEFAULT_TOL,
};
use subrank::lattice::all_masks;
use subrank::metrics::{generalized_curvature, generalized_inverse_curvature};
use subrank::objectives::{random_monotone, BayesianAOptInstance, ColumnSubsetInstance};
use subrank::{SetFunctionTable, Subset};

fn gaussian_table(n: usize, rng: &mut ChaCha8Rng) -> SetFunctionTable {
    SetFunctionTable::from_fn(n, |_| StandardNormal.sample(rng)).unwrap()
}

/// A rank-2 certificate is not just a membership pattern: an explicit
/// two-summand decomposition exists. Construct it — shift by a scaled
/// interior direction of the disagreement pattern — and verify both
/// summands land in their cones and add back to the function.
#[test]
fn rank_two_witnesses_admit_explicit_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut decomposed = 0usize;
    for n in [3usize, 4] {
        for _ in 0..200 {
            let f = gaussian_table(n, &mut rng);
            let (rank, witness) = supermodular_rank(&f, DEFAULT_TOL).unwrap();
            if rank != 2 {
                continue;
            }
            let xi1 = XiPattern::from_sign_vector(&witness[0]);
            let xi2 = XiPattern::from_sign_vector(&witness[1]);
            // Direction with strict rows exactly where the two cones
            // disagree, zero rows where they agree.
            let mut tilde = XiPattern::zero(n);
            for pair in PairIndex::all(n) {
                let (s1, s2) = (xi1.get(pair), xi2.get(pair));
                if s1 != s2 {
                    tilde.set(pair, s1);
                }
            }
            let direction = witness_interior(&tilde).unwrap();
            // Any shift beyond half the worst row magnitude works.
            let worst_row = PairIndex::all(n)
                .iter()
                .flat_map(|p| subrank::cones::imset_evaluate(&f, p.i(), p.j()).unwrap())
                .fold(0.0f64, |acc, v| acc.max(v.abs()));
            let lambda = worst_row / 2.0 + 1.0;
            let half_plus = f.add(&direction.scale(lambda).unwrap()).unwrap().scale(0.5).unwrap();
            let half_minus = f.add(&direction.scale(-lambda).unwrap()).unwrap().scale(0.5).unwrap();
            assert!(
                cone_membership(&half_plus, &xi1, 1e-9).unwrap(),
                "first summand escapes its cone"
            );
            assert!(
                cone_membership(&half_minus, &xi2, 1e-9).unwrap(),
                "second summand escapes its cone"
            );
            let recombined = half_plus.add(&half_minus).unwrap();
            for (a, b) in recombined.values().iter().zip(f.values()) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
            decomposed += 1;
        }
    }
    assert!(decomposed > 50, "too few rank-2 samples: {decomposed}");
}

/// The shared-pattern computation agrees with literally intersecting the
/// per-summand constraint patterns.
#[test]
fn shared_pattern_matches_literal_intersection() {
    for n in [3usize, 4, 5] {
        let canonical = subrank::cones::SignVector::enumerate_canonical(n);
        for t1 in &canonical {
            for t2 in &canonical {
                let shared = xi_from_taus(&[t1.clone(), t2.clone()]).unwrap();
                for pair in PairIndex::all(n) {
                    let (a, b) = (t1.pair_sign(pair), t2.pair_sign(pair));
                    let expect = if a == b { a } else { 0 };
                    assert_eq!(shared.get(pair), expect);
                }
            }
        }
    }
}

/// Chain-form curvature equals the literal three-set definition
/// (all T, S and e ∈ S ∖ T).
#[test]
fn curvature_chain_form_matches_literal_definition() {
    fn literal(f: &SetFunctionTable, inverse: bool) -> f64 {
        let n = f.n();
        let mut worst = 0.0f64;
        for t in all_masks(n) {
            for s in all_masks(n) {
                for e in s.elements() {
                    if t.contains(e) {
                        continue;
                    }
                    let u = s.without(e);
                    let w = u | t;
                    let at_u = f.value_at(u.with(e)) - f.value_at(u);
                    let at_w = f.value_at(w.with(e)) - f.value_at(w);
                    let (num, den) = if inverse { (at_u, at_w) } else { (at_w, at_u) };
                    if den > 0.0 {
                        worst = worst.max(1.0 - num / den);
                    }
                }
            }
        }
        worst.min(1.0)
    }

    for seed in 0..10u64 {
        let f = random_monotone(5, seed).unwrap();
        assert_eq!(generalized_curvature(&f).unwrap(), literal(&f, false));
        assert_eq!(
            generalized_inverse_curvature(&f).unwrap(),
            literal(&f, true)
        );
    }
}

/// The Gram-system trace reduction used by the Bayesian objective agrees
/// with inverting the full ambient-dimension matrix.
#[test]
fn bayesian_gram_reduction_matches_direct_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, d, beta, sigma) = (7usize, 12usize, 0.7, 0.4);
    let data = DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
    let inst = BayesianAOptInstance::new(data.clone(), beta, sigma).unwrap();
    let c = (beta * sigma).powi(-2);
    for s in all_masks(n) {
        let idx: Vec<usize> = s.elements().map(|e| e - 1).collect();
        let direct = if idx.is_empty() {
            0.0
        } else {
            let xs = data.select_columns(idx.iter());
            let m = DMatrix::identity(d, d) + c * (&xs * xs.transpose());
            let trace = m.try_inverse().unwrap().trace();
            (d as f64 - trace) / (beta * beta)
        };
        let fast = inst.evaluate(s).unwrap();
        assert!(
            (fast - direct).abs() <= 1e-9 * (1.0 + direct.abs()),
            "mask {s:?}: {fast} vs {direct}"
        );
    }
}

/// The rank-revealing projection energy agrees with solving the
/// least-squares normal equations on full-column-rank selections.
#[test]
fn column_gain_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (n, d) = (6usize, 9usize);
    let a = DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
    let inst = ColumnSubsetInstance::new(a.clone());
    for s in all_masks(n) {
        if s.is_empty() || s.len() > 4 {
            continue;
        }
        let idx: Vec<usize> = s.elements().map(|e| e - 1).collect();
        let sub = a.select_columns(idx.iter());
        let gram = sub.transpose() * &sub;
        let coeff = gram
            .try_inverse()
            .expect("Gaussian columns are independent")
            * (sub.transpose() * &a);
        let projected = &sub * coeff;
        let direct: f64 = projected.iter().map(|v| v * v).sum();
        let fast = inst.gain(s);
        assert!(
            (fast - direct).abs() <= 1e-8 * (1.0 + direct),
            "mask {s:?}: {fast} vs {direct}"
        );
    }
}

/// Determinant route check: on diagonal kernels the value factorizes.
#[test]
fn determinantal_diagonal_factorization() {
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0, 0.25]));
    let inst = subrank::objectives::DeterminantalInstance::new(diag, 0.5).unwrap();
    // det(I + 4·Σ_S) = Π_{e∈S} (1 + 4σ_e).
    for s in all_masks(3) {
        let expect: f64 = s
            .elements()
            .map(|e| 1.0 + 4.0 * [1.0, 4.0, 0.25][e - 1])
            .product();
        let got = inst.evaluate(s);
        assert!((got - expect).abs() <= 1e-12 * expect, "mask {s:?}");
    }
}

/// Monte Carlo volume spot check with an exactly known cell: on two
/// elements every function has supermodular rank one, so the rank-1 cell
/// is exactly 100%.
#[test]
fn two_element_rank_one_cell_is_exact() {
    let est = subrank::experiments::volume_estimate(&subrank::experiments::VolumeRequest {
        n: 2,
        family: subrank::experiments::RankFamily::Supermodular,
        rank: 1,
        samples: 20_000,
        seed: 3,
    })
    .unwrap();
    assert_eq!(est.hits, est.samples);
}

/// Projection against a tiny hand-solved quadratic program: two violated
/// rows sharing variables on three elements.
#[test]
fn projection_matches_hand_solved_active_set() {
    // Target chosen so that projecting onto the submodular cone activates
    // exactly the two rows of pair (1,2); solving the 2×2 dual system by
    // hand: both rows have value 1 at the target, the rows are orthogonal
    // (disjoint supports), so each projects independently by 1/4.
    let mut values = vec![0.0; 8];
    let set = |vals: &mut Vec<f64>, mask: u32, v: f64| vals[mask as usize] = v;
    // Pair (1,2), context ∅: f(∅) + f({1,2}) − f({1}) − f({2}) = 1.
    set(&mut values, 0b000, 0.5);
    set(&mut values, 0b011, 0.5);
    // Pair (1,2), context {3}: f({3}) + f(V) − f({1,3}) − f({2,3}) = 1.
    set(&mut values, 0b100, 0.5);
    set(&mut values, 0b111, 0.5);
    let f = SetFunctionTable::new(3, values).unwrap();

    // Restrict the pattern to pair (1,2) so the hand solution is exact.
    let mut xi = XiPattern::zero(3);
    xi.set(PairIndex::new(1, 2).unwrap(), -1);
    let (g, report) = subrank::project::project_onto_cone(
        &f,
        &xi,
        &subrank::project::ProjectionOptions::default(),
    )
    .unwrap();
    assert!(report.converged);
    // Each row moves its four entries by 1/4 toward equality, leaving the
    // constant table at 0.25.
    for (mask, got) in g.values().iter().enumerate() {
        assert!((got - 0.25).abs() <= 1e-9, "mask {mask}: {got}");
    }
    // Two orthogonal moves of squared length 1/4 each.
    assert!((report.distance - 0.5f64.sqrt()).abs() <= 1e-9);
}

/// Random-oracle projections land on the same point as deterministic ones
/// (the optimum is unique for a strictly convex objective).
#[test]
fn oracle_choice_does_not_change_the_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..10u64 {
        let f = gaussian_table(4, &mut rng);
        let xi = XiPattern::submodular(4);
        let det = subrank::project::ProjectionOptions::default();
        let rnd = subrank::project::ProjectionOptions {
            oracle: subrank::project::OracleKind::Random,
            samples_per_pair: Some(3),
            rng_seed: trial,
            ..det
        };
        let (g1, r1) = subrank::project::project_onto_cone(&f, &xi, &det).unwrap();
        let (g2, r2) = subrank::project::project_onto_cone(&f, &xi, &rnd).unwrap();
        assert!(r1.converged && r2.converged);
        for (a, b) in g1.values().iter().zip(g2.values()) {
            assert!((a - b).abs() <= 1e-6, "trial {trial}: {a} vs {b}");
        }
    }
}
