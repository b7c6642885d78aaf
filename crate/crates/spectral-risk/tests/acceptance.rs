//! Acceptance suite: every release-gating property of the crate, one test
//! per criterion, each printing a PASS line with its measured margin (run
//! with `--nocapture` to see them). Tolerances are pinned in the asserts.
//!
//! All randomness is seeded, so the suite is deterministic.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spectral_risk::conjugate::{build_f0, conjugate_integral, HingeTerm, PiecewiseLinearConvex};
use spectral_risk::optimize::{grid_search_oracle, minimize_spectral, ScenarioProblem};
use spectral_risk::risk::{
    avar, avar_ru, check_feasible, comonotone_value, dual_bound, spectral_risk,
    spectral_risk_cdf, spectral_risk_kusuoka,
};
use spectral_risk::{DualVariate, EmpiricalDistribution, KusuokaMeasure, StepSpectrum};
use std::time::Instant;

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream)
}

/// Random distribution with `n` support points in `[lo, hi]` and random
/// positive weights.
fn random_distribution(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: f64,
    hi: f64,
) -> EmpiricalDistribution {
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    EmpiricalDistribution::from_samples(&values, Some(&weights)).unwrap()
}

/// Random spectrum with exactly `levels` step levels; atom locations stay
/// below `max_loc` so densities remain bounded.
fn random_spectrum(rng: &mut ChaCha8Rng, levels: usize, max_loc: f64) -> StepSpectrum {
    if levels == 1 {
        return StepSpectrum::expectation();
    }
    let mut locs: Vec<f64> = Vec::new();
    while locs.len() < levels - 1 {
        let l = rng.gen_range(0.01..max_loc);
        if locs.iter().all(|&x: &f64| (x - l).abs() > 1e-6) {
            locs.push(l);
        }
    }
    locs.sort_by(f64::total_cmp);
    let with_zero_atom = rng.gen_bool(0.5);
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    if with_zero_atom {
        atoms.push((0.0, rng.gen_range(0.05..1.0)));
    }
    for &l in &locs {
        atoms.push((l, rng.gen_range(0.05..1.0)));
    }
    let total: f64 = atoms.iter().map(|&(_, m)| m).sum();
    let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(l, m)| (l, m / total)).collect();
    StepSpectrum::from_kusuoka(&KusuokaMeasure::new(&atoms).unwrap())
}

/// Random feasible dual density: couple a uniform variable with the
/// scenarios in a random order and average the spectrum over each
/// probability cell (a conditional expectation of `sigma(U)`, hence below
/// the spectrum in convex order), optionally blended toward the constant 1.
fn random_feasible_dual(
    rng: &mut ChaCha8Rng,
    d: &EmpiricalDistribution,
    s: &StepSpectrum,
) -> DualVariate {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let probs = d.probs();
    let mut z = vec![0.0; n];
    let mut lo = 0.0;
    for &idx in &order {
        let hi = lo + probs[idx];
        z[idx] = s.integral_between(lo, hi.min(1.0)) / probs[idx];
        lo = hi;
    }
    let lambda = rng.gen_range(0.0..1.0);
    let z: Vec<f64> = z.iter().map(|&v| lambda + (1.0 - lambda) * v).collect();
    DualVariate::new(&z, probs).unwrap()
}

#[test]
fn criterion_1_representation_agreement() {
    let mut rng = rng(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let n = rng.gen_range(1..=200);
        let m = rng.gen_range(1..=20);
        let nonneg = case % 2 == 0;
        let (lo, hi) = if nonneg { (0.0, 100.0) } else { (-100.0, 100.0) };
        let d = random_distribution(&mut rng, n, lo, hi);
        let s = random_spectrum(&mut rng, m, 0.98);
        let measure = s.to_kusuoka();

        let quantile_route = spectral_risk(&d, &s);
        let mixture_route = spectral_risk_kusuoka(&d, &measure);
        let infimum_route = build_f0(&d, &measure).expectation(&d);

        worst = worst
            .max((quantile_route - mixture_route).abs())
            .max((quantile_route - infimum_route).abs())
            .max((mixture_route - infimum_route).abs());
        if d.min_support() >= 0.0 {
            let cdf_route = spectral_risk_cdf(&d, &s).unwrap();
            worst = worst.max((cdf_route - quantile_route).abs());
        }
        assert!(
            worst <= 1e-9,
            "case {case}: representations diverge by {worst:.3e}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 10.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: representation agreement over 500 cases, max discrepancy {worst:.3e}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_brute_force_dual_attainment() {
    use itertools::Itertools;
    let mut rng = rng(2);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = rng.gen_range(1..=7usize);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let d = EmpiricalDistribution::uniform(&values).unwrap();
        if d.len() < n {
            continue; // merged duplicates would break equal weighting
        }
        let levels = rng.gen_range(1..=6);
        let s = random_spectrum(&mut rng, levels, 0.9);
        let risk = spectral_risk(&d, &s);

        let mut best = f64::NEG_INFINITY;
        for perm in (0..n).permutations(n) {
            best = best.max(comonotone_value(&d, &s, &perm).unwrap());
        }
        let sorted = comonotone_value(&d, &s, &(0..n).collect::<Vec<_>>()).unwrap();
        worst = worst.max((best - risk).abs()).max((sorted - best).abs());
        assert!(
            worst <= 1e-12,
            "case {case}: permutation supremum off by {worst:.3e}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 30.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 2: brute-force dual attainment over 50 cases, max error {worst:.3e}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_weak_duality_both_directions() {
    let mut rng = rng(3);
    let mut max_dual_excess = f64::NEG_INFINITY;
    let mut max_gap: f64 = 0.0;

    for _ in 0..200 {
        let n = rng.gen_range(1..=60);
        let levels = rng.gen_range(1..=10);
        let d = random_distribution(&mut rng, n, -50.0, 50.0);
        let s = random_spectrum(&mut rng, levels, 0.9);
        let risk = spectral_risk(&d, &s);

        let zv = random_feasible_dual(&mut rng, &d, &s);
        let check = check_feasible(&zv, &s);
        assert!(check.feasible, "generator must produce feasible duals");
        let bound = dual_bound(&d, &zv).unwrap();
        max_dual_excess = max_dual_excess.max(bound - risk);
        assert!(bound <= risk + 1e-9, "dual bound {bound} exceeds risk {risk}");
    }

    for _ in 0..200 {
        let n = rng.gen_range(1..=60);
        let levels = rng.gen_range(1..=10);
        let d = random_distribution(&mut rng, n, -50.0, 50.0);
        let s = random_spectrum(&mut rng, levels, 0.9);
        let risk = spectral_risk(&d, &s);

        let k = rng.gen_range(1..=5);
        let mut terms: Vec<HingeTerm> = (0..k)
            .map(|_| {
                HingeTerm::new(
                    rng.gen_range(-60.0..60.0),
                    rng.gen_range(0.05..2.0),
                    rng.gen_range(0.0..0.9),
                )
                .unwrap()
            })
            .collect();
        terms.push(HingeTerm::new(70.0, s.max_level() + 1.0, 0.0).unwrap());
        let f = PiecewiseLinearConvex::new(0.0, terms).unwrap();
        let objective = f.expectation(&d) + conjugate_integral(&f, &s).unwrap();
        assert!(
            objective >= risk - 1e-9,
            "ansatz objective {objective} below risk {risk}"
        );

        let f0 = build_f0(&d, &s.to_kusuoka());
        let gap =
            (f0.expectation(&d) + conjugate_integral(&f0, &s).unwrap() - risk).abs();
        max_gap = max_gap.max(gap);
        assert!(gap <= 1e-10, "f0 duality gap {gap:.3e}");
    }
    println!(
        "[PASS] criterion 3: weak duality (max dual excess {max_dual_excess:.3e}) and f0 attainment (max gap {max_gap:.3e}) over 200+200 cases"
    );
}

#[test]
fn criterion_4_avar_identities() {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=100);
        let d = random_distribution(&mut rng, n, -50.0, 50.0);
        let alpha = rng.gen_range(0.0..0.999);
        let (value, qstar) = avar_ru(&d, alpha).unwrap();
        let direct = avar(&d, alpha).unwrap();
        worst = worst.max((value - direct).abs());
        assert!(worst <= 1e-10);
        assert_eq!(qstar, d.quantile(alpha).unwrap());
    }

    // corollary: the elementwise dual criteria coincide with convex-order
    // feasibility for the AVaR spectrum
    let mut agreements = [0usize; 2];
    for case in 0..200 {
        let alpha = rng.gen_range(0.0..0.95);
        let s = StepSpectrum::avar(alpha).unwrap();
        let n = rng.gen_range(2..=40);
        let probs = vec![1.0 / n as f64; n];
        let cap = 1.0 / (1.0 - alpha);

        let base: Vec<f64> = {
            let d = EmpiricalDistribution::uniform(
                &(0..n).map(|i| i as f64).collect::<Vec<_>>(),
            )
            .unwrap();
            random_feasible_dual(&mut rng, &d, &s).z().to_vec()
        };
        let mut z = base;
        match case % 4 {
            0 => {} // feasible as constructed
            1 => {
                // negative dip, mean restored elsewhere
                let i = rng.gen_range(0..n);
                let j = (i + 1) % n;
                let dip = rng.gen_range(0.01..0.5);
                let old = z[i];
                z[i] = -dip;
                z[j] += old + dip;
            }
            2 => {
                // cap violation at one atom, mass rebalanced
                let i = rng.gen_range(0..n);
                let bump = cap * rng.gen_range(0.01..0.25);
                z[i] += bump;
                let k = n as f64;
                for (j, v) in z.iter_mut().enumerate() {
                    if j != i {
                        *v -= bump / (k - 1.0);
                    }
                }
                if z.iter().any(|&v| v < 0.0) {
                    // keep this draw a pure cap violation
                    for v in z.iter_mut() {
                        *v = v.max(0.0);
                    }
                }
            }
            _ => {
                // mean off by one percent
                for v in z.iter_mut() {
                    *v *= 1.01;
                }
            }
        }
        let zv = DualVariate::new(&z, &probs).unwrap();
        let elementwise = (zv.mean() - 1.0).abs() <= 1e-9
            && z.iter().all(|&v| v >= -1e-9)
            && z.iter().all(|&v| (1.0 - alpha) * v <= 1.0 + 1e-9);
        let convex_order = check_feasible(&zv, &s).feasible;
        assert_eq!(
            elementwise, convex_order,
            "case {case}: criteria disagree (alpha {alpha}, z {z:?})"
        );
        agreements[usize::from(elementwise)] += 1;
    }
    assert!(agreements[0] > 0 && agreements[1] > 0, "both outcomes exercised");
    println!(
        "[PASS] criterion 4: AVaR variational identity (max error {worst:.3e}) and dual-criteria agreement ({} feasible / {} infeasible)",
        agreements[1], agreements[0]
    );
}

#[test]
fn criterion_5_conjugate_calculus() {
    let mut rng = rng(5);
    let mut worst_conj: f64 = 0.0;
    let mut worst_affine: f64 = 0.0;
    let mut worst_biconj: f64 = 0.0;

    for case in 0..20 {
        // knots on the oracle's millesimal grid keep the grid supremum exact
        let k = rng.gen_range(1..=6);
        let terms: Vec<HingeTerm> = (0..k)
            .map(|_| {
                HingeTerm::new(
                    rng.gen_range(-20_000..20_000i64) as f64 / 1e3,
                    rng.gen_range(0.05..2.0),
                    rng.gen_range(0.0..0.9),
                )
                .unwrap()
            })
            .collect();
        let base = rng.gen_range(0.0..1.0);
        let f = PiecewiseLinearConvex::new(base, terms).unwrap();
        let table = f.conjugate();

        let q_min = f.terms().first().unwrap().knot;
        let q_max = f.terms().last().unwrap().knot;
        let (grid_lo, grid_hi) = (q_min - 50.0, q_max + 50.0);
        let steps = ((grid_hi - grid_lo) / 1e-3).round() as usize;
        let samples: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let y = grid_lo + i as f64 * 1e-3;
                (y, f.eval(y))
            })
            .collect();
        let brute = |x: f64, samples: &[(f64, f64)]| {
            samples
                .iter()
                .map(|&(y, fy)| x * y - fy)
                .fold(f64::NEG_INFINITY, f64::max)
        };

        let (lo, hi) = table.domain();
        for _ in 0..100 {
            let x = rng.gen_range(lo..=hi);
            let err = (table.value_at(x).unwrap() - brute(x, &samples)).abs();
            worst_conj = worst_conj.max(err);
            assert!(err <= 1e-6, "case {case}: conjugate off by {err:.3e} at {x}");
        }

        // Appendix lemma: transformed conjugate vs brute-force conjugation
        let a = rng.gen_range(-2.0..2.0);
        let b = rng.gen_range(-2.0..2.0);
        let gamma = rng.gen_range(0.5..2.0);
        let lambda = *[-1.0, -0.5, 0.5, 1.0].choose(&mut rng).unwrap();
        let c = rng.gen_range(-2_000..2_000i64) as f64 / 1e3;
        let g_table = table.affine_transform(a, b, gamma, lambda, c).unwrap();
        let kinks: Vec<f64> = f.terms().iter().map(|t| (t.knot - c) / lambda).collect();
        let kink_lo = kinks.iter().cloned().fold(f64::INFINITY, f64::min) - 50.0;
        let kink_hi = kinks.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 50.0;
        let steps = ((kink_hi - kink_lo) / 1e-3).round() as usize;
        let g_samples: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let x = kink_lo + i as f64 * 1e-3;
                (x, a + b * x + gamma * f.eval(lambda * x + c))
            })
            .collect();
        let (glo, ghi) = g_table.domain();
        for _ in 0..20 {
            let y = rng.gen_range(glo..=ghi);
            let err = (g_table.value_at(y).unwrap() - brute(y, &g_samples)).abs();
            worst_affine = worst_affine.max(err);
            assert!(err <= 1e-6, "case {case}: transform off by {err:.3e} at {y}");
        }

        // biconjugate fixpoint
        for _ in 0..100 {
            let y = rng.gen_range(q_min - 30.0..q_max + 30.0);
            let err = (table.biconjugate_at(y) - f.eval(y)).abs();
            worst_biconj = worst_biconj.max(err);
            assert!(err <= 1e-8, "case {case}: biconjugate off by {err:.3e}");
        }
    }
    println!(
        "[PASS] criterion 5: conjugate vs grid oracle {worst_conj:.3e}, affine transforms {worst_affine:.3e}, biconjugate {worst_biconj:.3e}"
    );
}

#[test]
fn criterion_6_portfolio_optimizer_vs_oracle() {
    let mut rng = rng(6);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let s_count = rng.gen_range(2..=10);
        let losses: Vec<Vec<f64>> = (0..s_count)
            .map(|_| {
                (0..2)
                    .map(|_| rng.gen_range(-0.25..0.25))
                    .collect::<Vec<f64>>()
            })
            .collect();
        let weights: Vec<f64> = (0..s_count).map(|_| rng.gen_range(0.2..1.0)).collect();
        let spectrum = random_spectrum(&mut rng, 3, 0.6);
        let problem = ScenarioProblem::new(&losses, Some(&weights), spectrum).unwrap();

        let sol = minimize_spectral(&problem).unwrap();
        let (_, oracle_value) = grid_search_oracle(&problem, 1e-3).unwrap();
        let err = (sol.value - oracle_value).abs();
        worst = worst.max(err);
        assert!(
            err <= 1e-4,
            "case {case}: solver {} vs oracle {} differ by {err:.3e}",
            sol.value,
            oracle_value
        );
        assert!(sol.gap <= 1e-6, "solver/evaluator residual {:.3e}", sol.gap);
    }

    // the hedge instance is solved exactly
    let hedge = ScenarioProblem::new(
        &[vec![0.0, 2.0], vec![2.0, 0.0]],
        None,
        StepSpectrum::avar(0.5).unwrap(),
    )
    .unwrap();
    let sol = minimize_spectral(&hedge).unwrap();
    assert!((sol.weights[0] - 0.5).abs() <= 1e-3);
    assert!((sol.weights[1] - 0.5).abs() <= 1e-3);
    assert!((sol.value - 1.0).abs() <= 1e-6);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 60.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 6: optimizer matches grid oracle over 20 problems, max gap {worst:.3e}, hedge exact, {elapsed:.2?}"
    );
}

#[test]
fn criterion_7_upper_bound_discretization() {
    // fixed nonnegative 10-point distribution (the majorant inequality
    // needs F^{-1} >= 0)
    let d = EmpiricalDistribution::from_samples(
        &[0.0, 0.4, 1.1, 1.6, 2.0, 3.3, 4.1, 5.9, 7.4, 9.5],
        Some(&[0.05, 0.1, 0.15, 0.1, 0.1, 0.15, 0.1, 0.1, 0.1, 0.05]),
    )
    .unwrap();

    // closed-form cell integration oracle for sigma(u) = 2u:
    // R = sum_i v_i (c_i^2 - c_{i-1}^2)
    let mut exact = 0.0;
    let mut prev = 0.0;
    for (v, c) in d.values().iter().zip(d.cumulative()) {
        exact += v * (c * c - prev * prev);
        prev = *c;
    }

    let mut bounds = Vec::new();
    for n in [2usize, 4, 8, 16, 32] {
        let majorant = StepSpectrum::discretize_upper(|u| 2.0 * u, n).unwrap();
        assert!(majorant.is_majorant());
        bounds.push(spectral_risk(&d, &majorant));
    }
    for w in bounds.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "refinement increased the bound: {bounds:?}");
    }
    for &b in &bounds {
        assert!(b >= exact - 1e-12, "bound {b} below exact {exact}");
    }
    let gap_first = bounds[0] - exact;
    let gap_last = bounds[4] - exact;
    assert!(
        gap_last <= gap_first / 8.0,
        "gap at n=32 ({gap_last:.3e}) not below gap at n=2 / 8 ({:.3e})",
        gap_first / 8.0
    );
    println!(
        "[PASS] criterion 7: discretization bounds decrease {bounds:?} toward exact {exact:.6}, gap ratio {:.1}",
        gap_first / gap_last
    );
}

#[test]
fn criterion_8_unit_density_corollary() {
    let mut rng = rng(8);
    let s = StepSpectrum::expectation();
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    for case in 0..100 {
        let n = rng.gen_range(2..=64);
        let probs = vec![1.0 / n as f64; n];
        let mut z = vec![1.0; n];
        if case % 2 == 1 {
            // sizable perturbation: must be rejected
            let eps = rng.gen_range(1e-5..1e-2);
            let i = rng.gen_range(0..n);
            z[i] += eps;
            let k = n as f64;
            for (j, v) in z.iter_mut().enumerate() {
                if j != i {
                    *v -= eps / (k - 1.0);
                }
            }
        } else if case % 4 == 2 {
            // perturbation below the feasibility tolerance: accepted
            let eps = rng.gen_range(1e-12..5e-10);
            let i = rng.gen_range(0..n);
            z[i] += eps;
            z[(i + 1) % n] -= eps;
        }
        let zv = DualVariate::new(&z, &probs).unwrap();
        let check = check_feasible(&zv, &s);
        if check.feasible {
            accepted += 1;
            let deviation = z
                .iter()
                .map(|&v| (v - 1.0).abs())
                .fold(0.0f64, f64::max);
            assert!(
                deviation <= 1e-7,
                "accepted dual deviates from 1 by {deviation:.3e}"
            );
        } else {
            rejected += 1;
            assert!(case % 2 == 1, "an intended-feasible dual was rejected");
        }
    }
    assert_eq!(rejected, 50, "all perturbed duals must be rejected");
    println!(
        "[PASS] criterion 8: under the unit spectrum, {accepted} accepted duals are all within 1e-7 of 1 and {rejected} perturbations were rejected"
    );
}

#[test]
fn criterion_9_risk_measure_axioms() {
    let mut rng = rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=50);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let d = EmpiricalDistribution::from_samples(&values, Some(&weights)).unwrap();
        let levels = rng.gen_range(1..=8);
        let s = random_spectrum(&mut rng, levels, 0.9);
        let risk = spectral_risk(&d, &s);

        // translation equivariance
        let c = rng.gen_range(-20.0..20.0);
        let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
        let d_shift = EmpiricalDistribution::from_samples(&shifted, Some(&weights)).unwrap();
        let t_err = (spectral_risk(&d_shift, &s) - (risk + c)).abs();

        // positive homogeneity
        let lambda = rng.gen_range(0.01..5.0);
        let scaled: Vec<f64> = values.iter().map(|v| v * lambda).collect();
        let d_scale = EmpiricalDistribution::from_samples(&scaled, Some(&weights)).unwrap();
        let h_err = (spectral_risk(&d_scale, &s) - lambda * risk).abs();

        // monotonicity under scenario-wise dominance
        let dominated: Vec<f64> = values
            .iter()
            .map(|v| v + rng.gen_range(0.0..10.0))
            .collect();
        let d_dom = EmpiricalDistribution::from_samples(&dominated, Some(&weights)).unwrap();
        let m_violation = (risk - spectral_risk(&d_dom, &s)).max(0.0);

        // convexity on coupled scenario vectors
        let other: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let d_other = EmpiricalDistribution::from_samples(&other, Some(&weights)).unwrap();
        let lam = rng.gen_range(0.0..1.0);
        let mixed: Vec<f64> = values
            .iter()
            .zip(&other)
            .map(|(a, b)| (1.0 - lam) * a + lam * b)
            .collect();
        let d_mix = EmpiricalDistribution::from_samples(&mixed, Some(&weights)).unwrap();
        let c_violation = (spectral_risk(&d_mix, &s)
            - ((1.0 - lam) * risk + lam * spectral_risk(&d_other, &s)))
        .max(0.0);

        worst = worst.max(t_err).max(h_err).max(m_violation).max(c_violation);
        assert!(t_err <= 1e-9, "translation equivariance off by {t_err:.3e}");
        assert!(h_err <= 1e-9, "homogeneity off by {h_err:.3e}");
        assert!(m_violation <= 1e-9, "monotonicity violated by {m_violation:.3e}");
        assert!(c_violation <= 1e-9, "convexity violated by {c_violation:.3e}");
    }
    println!("[PASS] criterion 9: axioms (T), (H), (M), (C) hold on 200 instances, max deviation {worst:.3e}");
}
