use budgetlab::bounds::{self, full_grid, leadingones_exact_level_ratio};
use budgetlab::oracle::{build_full_chain, build_level_chain, delta_summary, verify_sandwich};
use budgetlab::simulate::{estimate_mean_error, InitSpec};
use budgetlab::{AlgorithmSpec, BitString, FitnessSpec, RngStream};
use rand::Rng;

fn algorithms() -> Vec<AlgorithmSpec> {
    vec![AlgorithmSpec::rls(), AlgorithmSpec::ea(), AlgorithmSpec::sa()]
}

/// Empirical kernel rows against the enumerated transition matrix. With several
/// hundred entries per case the threshold is five standard errors.
#[test]
fn sampled_kernel_matches_full_chain() {
    let samples = 100_000;
    let specs = [
        FitnessSpec::binval(3).unwrap(),
        FitnessSpec::zigzag(4).unwrap(),
        FitnessSpec::leading_ones(4).unwrap(),
        FitnessSpec::linear(vec![0.3, 1.7, 0.9, 0.31]).unwrap(),
    ];
    for spec in &specs {
        for algo in algorithms() {
            let chain = build_full_chain(&algo, spec).unwrap();
            let kernel = algo.kernel(spec.n()).unwrap();
            let mut rng = RngStream::new(2024, spec.n() as u64);
            for x in 0..chain.size() {
                let start = BitString::from_index(x, spec.n());
                let mut counts = vec![0usize; chain.size()];
                for _ in 0..samples {
                    counts[kernel.step(spec, &start, &mut rng).unwrap().to_index()] += 1;
                }
                for (y, &c) in counts.iter().enumerate() {
                    let p = chain.probability(x, y).clamp(0.0, 1.0);
                    let freq = c as f64 / samples as f64;
                    let sd = (p * (1.0 - p) / samples as f64).sqrt();
                    assert!(
                        (freq - p).abs() <= 5.0 * sd + 1e-12,
                        "{} {:?} {} -> {}: {freq} vs {p}",
                        spec.kind().name(),
                        algo.kind(),
                        chain.state_label(x),
                        chain.state_label(y)
                    );
                }
            }
        }
    }
}

#[test]
fn sa_accepts_worse_moves_with_metropolis_probability() {
    // OneMax n=5 from 11100: the single flips of a one lose 1, the pair flips of two ones lose 2
    let spec = FitnessSpec::onemax(5).unwrap();
    let temperature = 0.7;
    let algo = AlgorithmSpec::sa_with_temperature(temperature).unwrap();
    let kernel = algo.kernel(5).unwrap();
    let x: BitString = "11100".parse().unwrap();
    let mut rng = RngStream::new(5, 0);
    let samples = 400_000;
    let (mut down1, mut down2) = (0usize, 0usize);
    for _ in 0..samples {
        match kernel.step(&spec, &x, &mut rng).unwrap().ones_count() {
            2 => down1 += 1,
            1 => down2 += 1,
            _ => {}
        }
    }
    let p1 = 0.5 * 3.0 / 5.0 * (-1.0f64 / temperature).exp();
    let p2 = 0.5 * 3.0 / 10.0 * (-2.0f64 / temperature).exp();
    for (c, p) in [(down1, p1), (down2, p2)] {
        let f = c as f64 / samples as f64;
        let sd = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((f - p).abs() < 4.0 * sd, "{f} vs {p}");
    }
}

/// Lumps the full chain by ones count and compares it with the level chain.
#[test]
fn level_chain_is_the_lumped_full_chain() {
    for n in [2usize, 5, 6, 9] {
        for spec in [FitnessSpec::onemax(n).unwrap(), FitnessSpec::zigzag(n).unwrap()] {
            for algo in algorithms() {
                if n < 2 {
                    continue;
                }
                let full = build_full_chain(&algo, &spec).unwrap();
                let levels = build_level_chain(&algo, &spec).unwrap();
                // every state of a level must carry the same lumped row
                for x in 0..full.size() {
                    let i = (x as u32).count_ones() as usize;
                    let mut lumped = vec![0.0; n + 1];
                    for y in 0..full.size() {
                        lumped[(y as u32).count_ones() as usize] += full.probability(x, y);
                    }
                    for j in 0..=n {
                        assert!(
                            (lumped[j] - levels.probability(i, j)).abs() < 1e-12,
                            "{} {:?} n={n} x={} j={j}",
                            spec.kind().name(),
                            algo.kind(),
                            full.state_label(x)
                        );
                    }
                }
                let a = full.expected_error_curve(300);
                let b = levels.expected_error_curve(300);
                for (t, (u, v)) in a.iter().zip(&b).enumerate() {
                    assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "t={t}: {u} vs {v}");
                }
            }
        }
    }
}

/// Averaging per-state error decrease over the uniform suffix reproduces the
/// closed-form level ratio.
#[test]
fn leadingones_level_ratio_from_full_chain() {
    for n in 2..=10usize {
        let chain = build_full_chain(&AlgorithmSpec::ea(), &FitnessSpec::leading_ones(n).unwrap()).unwrap();
        let next = chain.apply(chain.errors());
        for i in 0..n {
            let (mut drop, mut err, mut count) = (0.0, 0.0, 0usize);
            for x in 0..chain.size() {
                if BitString::from_index(x, n).leading_ones() == i {
                    drop += chain.errors()[x] - next[x];
                    err += chain.errors()[x];
                    count += 1;
                }
            }
            assert_eq!(count, 1 << (n - i - 1));
            let ratio = drop / err;
            let closed = leadingones_exact_level_ratio(i, n).unwrap();
            assert!((ratio - closed).abs() <= 1e-12 * closed, "n={n} i={i}: {ratio} vs {closed}");
        }
    }
}

fn assert_upper(curve: &bounds::BoundCurve, exact: &[f64]) {
    for (&t, &v) in curve.t_grid.iter().zip(&curve.values) {
        assert!(exact[t] <= v * (1.0 + 1e-9) + 1e-300, "{} t={t}: {} > {v}", curve.label, exact[t]);
    }
}

fn assert_lower(curve: &bounds::BoundCurve, exact: &[f64]) {
    for (&t, &v) in curve.t_grid.iter().zip(&curve.values) {
        assert!(exact[t] >= v * (1.0 - 1e-9), "{} t={t}: {} < {v}", curve.label, exact[t]);
    }
}

#[test]
fn closed_form_bounds_enclose_exact_error() {
    let grid = full_grid(500);
    let mut rng = RngStream::new(11, 0);
    for n in [3usize, 6, 8] {
        let lin = FitnessSpec::random_linear(n, &mut rng).unwrap();
        for spec in [lin, FitnessSpec::binval(n).unwrap(), FitnessSpec::onemax(n).unwrap()] {
            let rls = build_full_chain(&AlgorithmSpec::rls(), &spec).unwrap().expected_error_curve(500);
            let exact = bounds::rls_linear_exact(rls[0], n, &grid).unwrap();
            assert_upper(&exact, &rls);
            assert_lower(&exact, &rls);

            let ea = build_full_chain(&AlgorithmSpec::ea(), &spec).unwrap().expected_error_curve(500);
            assert_upper(&bounds::ea_linear_upper(ea[0], n, &grid).unwrap(), &ea);
            assert_lower(&bounds::ea_linear_lower(ea[0], n, &grid).unwrap(), &ea);
            for p in [0.5 / n as f64, 2.0 / n as f64] {
                let algo = AlgorithmSpec::ea_with_rate(p).unwrap();
                let e = build_full_chain(&algo, &spec).unwrap().expected_error_curve(500);
                assert_upper(&bounds::ea_mutation_bound(e[0], n, p, &grid).unwrap(), &e);
            }
        }
    }
    for n in [4usize, 8, 10] {
        let zz = FitnessSpec::zigzag(n).unwrap();
        let e = build_full_chain(&AlgorithmSpec::ea(), &zz).unwrap().expected_error_curve(2000);
        assert_upper(&bounds::zigzag_ea_upper(e[0], n, &full_grid(2000)).unwrap(), &e);
    }
}

#[test]
fn leadingones_rigorous_envelopes_on_small_n() {
    let grid = full_grid(5000);
    for n in 2..=10usize {
        let e = build_full_chain(&AlgorithmSpec::ea(), &FitnessSpec::leading_ones(n).unwrap())
            .unwrap()
            .expected_error_curve(5000);
        assert!((e[0] - bounds::leadingones_initial_error(n)).abs() < 1e-12);
        assert_upper(&bounds::leadingones_upper(n, &grid).unwrap(), &e);
        assert_lower(&bounds::leadingones_lower(n, &grid).unwrap(), &e);
    }
}

/// The ratio extrema from the chain agree with the closed forms where those are exact.
#[test]
fn delta_summary_closed_forms() {
    let spec = FitnessSpec::linear(vec![0.4, 1.1, 0.25, 3.0]).unwrap();
    let algo = AlgorithmSpec::ea_with_rate(0.25).unwrap();
    let s = delta_summary(&build_full_chain(&algo, &spec).unwrap()).unwrap();
    assert!((s.delta_min - 27.0 / 256.0).abs() < 1e-14);
    let x: BitString = s.argmin_state.parse().unwrap();
    assert_eq!(x.ones_count(), 3);
    // the only zero sits at the smallest coefficient
    assert!(!x.get(2));

    let spec = FitnessSpec::linear(vec![0.7, 0.1, 2.3, 0.4, 1.9]).unwrap();
    let s = delta_summary(&build_full_chain(&AlgorithmSpec::rls(), &spec).unwrap()).unwrap();
    assert!((s.delta_min - 0.2).abs() < 1e-14 && (s.delta_max - 0.2).abs() < 1e-14);
}

#[test]
fn sandwich_examples() {
    let cases = [
        (AlgorithmSpec::ea(), FitnessSpec::leading_ones(8).unwrap(), 2000),
        (AlgorithmSpec::sa(), FitnessSpec::zigzag(8).unwrap(), 2000),
        (AlgorithmSpec::ea(), FitnessSpec::binval(8).unwrap(), 500),
    ];
    for (algo, spec, horizon) in cases {
        let chain = build_full_chain(&algo, &spec).unwrap();
        let rep = verify_sandwich(&chain, horizon).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert!(rep.two_step_tighter);
        assert!(rep.max_violation <= 1e-9);
    }
}

#[test]
fn sa_is_a_supermartingale_on_structured_functions() {
    for n in [4usize, 8, 10] {
        let specs = [
            FitnessSpec::binval(n).unwrap(),
            FitnessSpec::leading_ones(n).unwrap(),
            FitnessSpec::zigzag(n).unwrap(),
        ];
        for spec in specs {
            let chain = build_full_chain(&AlgorithmSpec::sa(), &spec).unwrap();
            let (inc, at) = chain.max_expected_increase();
            assert!(inc <= 1e-12, "{} n={n}: +{inc} at {}", spec.kind().name(), chain.state_label(at));
        }
    }
    for n in [50usize, 100, 200] {
        let chain = build_level_chain(&AlgorithmSpec::sa(), &FitnessSpec::zigzag(n).unwrap()).unwrap();
        assert!(chain.max_expected_increase().0 <= 1e-12);
    }
}

/// On OneMax the accepted worsening moves outweigh the single improving flip at
/// one zero: `-1/8 + 7/8 * 1/8 * 1/2 + 2 * 21/56 * 1/64 = +1/256` for n = 8.
#[test]
fn sa_on_onemax_is_not_a_supermartingale() {
    let chain = build_full_chain(&AlgorithmSpec::sa(), &FitnessSpec::onemax(8).unwrap()).unwrap();
    let (inc, at) = chain.max_expected_increase();
    assert!((inc - 1.0 / 256.0).abs() < 1e-15, "{inc}");
    assert_eq!(chain.state_label(at).matches('0').count(), 1);
}

#[test]
fn elitist_exact_error_is_non_increasing() {
    for spec in [FitnessSpec::binval(7).unwrap(), FitnessSpec::leading_ones(7).unwrap(), FitnessSpec::zigzag(7).unwrap()] {
        for algo in [AlgorithmSpec::rls(), AlgorithmSpec::ea()] {
            let e = build_full_chain(&algo, &spec).unwrap().expected_error_curve(400);
            assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }
}

#[test]
fn monte_carlo_tracks_the_oracle() {
    let cases = [
        (AlgorithmSpec::ea(), FitnessSpec::leading_ones(8).unwrap()),
        (AlgorithmSpec::sa(), FitnessSpec::zigzag(8).unwrap()),
        (AlgorithmSpec::rls(), FitnessSpec::onemax(8).unwrap()),
    ];
    for (algo, spec) in cases {
        let exact = build_full_chain(&algo, &spec).unwrap().expected_error_curve(200);
        let mc = estimate_mean_error(&algo, &spec, &InitSpec::UniformRandom, 200, 4000, 17).unwrap();
        let sem = mc.sem.as_ref().unwrap();
        // once only a handful of replicates are still away from the optimum the
        // sample standard error is itself unreliable
        for t in (0..=200).step_by(10).filter(|&t| exact[t] * 4000.0 >= 100.0) {
            let tol = 5.0 * sem[t] + 1e-12;
            assert!((mc.mean_error[t] - exact[t]).abs() <= tol, "{:?} t={t}", algo.kind());
        }
    }
}

#[test]
fn fixed_init_oracle_matches_rls_formula() {
    let mut rng = RngStream::new(3, 3);
    for n in 3..=8usize {
        let spec = FitnessSpec::random_linear(n, &mut rng).unwrap();
        let bits = BitString::new((0..n).map(|_| rng.gen::<bool>()).collect());
        let init = InitSpec::Fixed { bits };
        let chain = build_full_chain(&AlgorithmSpec::rls(), &spec).unwrap().with_init(&init).unwrap();
        let e = chain.expected_error_curve(100);
        for (t, v) in e.iter().enumerate() {
            let f = e[0] * (1.0 - 1.0 / n as f64).powi(t as i32);
            assert!((v - f).abs() <= 1e-10 * f.max(1e-300), "n={n} t={t}");
        }
    }
}
