//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Criteria that sweep seeded random instances share one suite run.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{errorbar_width_oracle, grid_index, qubit_sum, report_line};

use qwidths::checks::{
    ball_counting_localizability_check, compare_linf_bounds, run_suite, CheckReport, SuiteConfig,
    TighterBound,
};
use qwidths::distances::{linf_distance, werner_distance, WernerMethod};
use qwidths::metric::FiniteMetricSpace;
use qwidths::observables::{
    family_qubit_covariant, family_trivial, qubit_x_pvm, qubit_z_pvm, random_joint_povm,
    random_state, ProbabilityDistribution,
};
use qwidths::scenario::{bloch_state, nqubit_scenario, torus_scenario, QUBIT_SUM_BOUND};
use qwidths::seed::rng_from;
use qwidths::widths::{binary_entropy, errorbar_width};
use qwidths::observables::induced_distribution;

const TOL: f64 = 1e-9;

fn suite() -> &'static (Vec<CheckReport>, Duration) {
    static SUITE: OnceLock<(Vec<CheckReport>, Duration)> = OnceLock::new();
    SUITE.get_or_init(|| {
        let start = Instant::now();
        let reports = run_suite(&SuiteConfig::default());
        (reports, start.elapsed())
    })
}

fn assert_rows_pass(reports: &[CheckReport], name: &str) -> (usize, f64) {
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for r in reports.iter().filter(|r| r.name == name) {
        count += 1;
        worst = worst.min(r.margin);
        assert!(
            r.margin >= -TOL,
            "{name} violated: margin {} (params {:?})",
            r.margin,
            r.params
        );
    }
    assert!(count > 0, "no rows named {name}");
    (count, worst)
}

#[test]
fn criterion_01_qubit_localization_constant() {
    let start = Instant::now();
    let n_states = 10_000u64;
    let mut max_sum = f64::NEG_INFINITY;
    for i in 0..n_states {
        max_sum = max_sum.max(qubit_sum(42, i));
    }
    assert!(
        max_sum <= QUBIT_SUM_BOUND + 1e-9,
        "sweep exceeded the bound: {max_sum}"
    );

    let inv = 1.0 / 2f64.sqrt();
    let star = bloch_state(inv, 0.0, inv).unwrap();
    let z = qubit_z_pvm();
    let x = qubit_x_pvm();
    let pz = induced_distribution(&star, z.as_povm()).unwrap();
    let px = induced_distribution(&star, x.as_povm()).unwrap();
    let attained = pz.weights().iter().copied().fold(0.0, f64::max)
        + px.weights().iter().copied().fold(0.0, f64::max);
    assert!(
        attained >= QUBIT_SUM_BOUND - 1e-9,
        "maximizer fell short: {attained}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    report_line(
        1,
        "qubit localization constant",
        true,
        &format!(
            "max over {n_states} states = {max_sum:.12}, maximizer = {attained:.12}, bound = {QUBIT_SUM_BOUND:.12}, {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_02_width_transfer_on_random_instances() {
    let (reports, elapsed) = suite();
    let (na, wa) = assert_rows_pass(reports, "width_transfer_a");
    let (nb, _) = assert_rows_pass(reports, "width_transfer_b");
    let (ns, ws) = assert_rows_pass(reports, "width_transfer_sum");
    // 4 dimensions x 100 instances x 9 confidence pairs.
    assert_eq!(na, 3600);
    assert_eq!(nb, 3600);
    assert_eq!(ns, 3600);
    assert!(*elapsed < Duration::from_secs(60), "suite took {elapsed:?}");
    report_line(
        2,
        "width transfer",
        true,
        &format!(
            "{na} instances-pairs, worst margins a={wa:.3e} sum={ws:.3e}, suite in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_03_ball_counting_bounds() {
    let (reports, _) = suite();
    let (nl, wl) = assert_rows_pass(reports, "ball_bound_localization");
    let (nm, _) = assert_rows_pass(reports, "ball_bound_measurement");

    // For the conjugate qubit pair the right-hand side is 2 (1-e1-e2)^2.
    let z = qubit_z_pvm();
    let x = qubit_x_pvm();
    let mut rng = rng_from(42, &[3]);
    let rho = random_state(2, &mut rng).unwrap();
    let mut worst_dev = 0.0f64;
    for &(e1, e2) in &[(0.0, 0.0), (0.1, 0.1), (0.25, 0.1), (0.25, 0.25)] {
        let r = ball_counting_localizability_check(&rho, &z, &x, e1, e2, TOL).unwrap();
        let expected = 2.0 * (1.0 - e1 - e2) * (1.0 - e1 - e2);
        worst_dev = worst_dev.max((r.rhs - expected).abs());
        assert!(
            (r.rhs - expected).abs() <= 1e-12,
            "rhs {} vs 2(1-e1-e2)^2 = {expected}",
            r.rhs
        );
    }
    report_line(
        3,
        "ball-counting bounds",
        true,
        &format!("{nl}+{nm} rows, worst margin {wl:.3e}, qubit rhs deviation {worst_dev:.2e}"),
    );
}

#[test]
fn criterion_04_werner_distance_routes() {
    let dims = [2usize, 3, 4];
    let mut checked = 0usize;
    let mut worst_gap = 0.0f64;
    for (k, &dim) in dims.iter().cycle().take(51).enumerate() {
        let mut rng = rng_from(42, &[4, k as u64]);
        let n: usize = 2 + (k % 3).min(2); // outcome counts 2..4
        let space = std::sync::Arc::new(if k % 2 == 0 {
            FiniteMetricSpace::discrete(n)
        } else {
            FiniteMetricSpace::cyclic(n, 0.75)
        });
        let make = |rng: &mut rand_chacha::ChaCha8Rng| {
            random_joint_povm(dim, space.clone(), space.clone(), rng)
                .unwrap()
                .marginals()
                .unwrap()
                .0
        };
        let f1 = make(&mut rng);
        let f2 = make(&mut rng);
        let f3 = make(&mut rng);
        let exact = werner_distance(&f1, &f2, WernerMethod::Exact).unwrap().value;
        let alt = werner_distance(&f1, &f2, WernerMethod::Alternating)
            .unwrap()
            .value;
        worst_gap = worst_gap.max((exact - alt).abs());
        assert!(
            (exact - alt).abs() <= 1e-7,
            "instance {k}: exact {exact} vs alternating {alt}"
        );
        assert!(alt <= exact + 1e-9, "ascent exceeded the exact optimum");
        // Identity, symmetry, triangle inequality.
        let self_dist = werner_distance(&f1, &f1, WernerMethod::Exact).unwrap().value;
        assert!(self_dist.abs() <= 1e-10);
        let d21 = werner_distance(&f2, &f1, WernerMethod::Exact).unwrap().value;
        assert!((exact - d21).abs() <= 1e-8);
        let d13 = werner_distance(&f1, &f3, WernerMethod::Exact).unwrap().value;
        let d23 = werner_distance(&f2, &f3, WernerMethod::Exact).unwrap().value;
        assert!(d13 <= exact + d23 + 1e-8);
        checked += 1;
    }

    // Frozen two-point value: trivial marginal against the conjugate basis.
    let x = qubit_x_pvm();
    let m = family_qubit_covariant(1.0, 0.0).unwrap();
    let (_, m2) = m.marginals().unwrap();
    let dw = werner_distance(&m2, x.as_povm(), WernerMethod::Exact).unwrap().value;
    assert!((dw - 0.5).abs() <= 1e-9, "trivial-vs-conjugate D_W = {dw}");
    report_line(
        4,
        "Werner distance routes",
        true,
        &format!("{checked} instances, max |exact - alternating| = {worst_gap:.2e}, frozen value {dw:.12}"),
    );
}

#[test]
fn criterion_05_werner_width_and_transfer() {
    let (reports, _) = suite();
    let (nw, ww) = assert_rows_pass(reports, "werner_width_bound");
    let (na, wa) = assert_rows_pass(reports, "werner_transfer_a");
    let (nb, _) = assert_rows_pass(reports, "werner_transfer_b");
    report_line(
        5,
        "Werner width bound and transfer",
        true,
        &format!(
            "{nw} width rows (worst {ww:.3e}), {}+{} transfer rows (worst {wa:.3e})",
            na, nb
        ),
    );
}

#[test]
fn criterion_06_linf_bounds() {
    // Frozen qubit instance.
    let z = qubit_z_pvm();
    let x = qubit_x_pvm();
    let q = ProbabilityDistribution::new(x.space().clone(), vec![0.5, 0.5]).unwrap();
    let m = family_trivial(&z, &q).unwrap();
    let (m1, m2) = m.marginals().unwrap();
    let d1 = linf_distance(&m1, z.as_povm()).unwrap().value;
    let d2 = linf_distance(&m2, x.as_povm()).unwrap().value;
    let sum = d1 + d2;
    let bound = 1.0 - 1.0 / 2f64.sqrt();
    assert!((sum - 0.5).abs() <= 1e-9, "distance sum {sum}");
    assert!(sum >= bound - 1e-9);

    // Existence search and the commutator bound on every suite instance.
    let (reports, _) = suite();
    let (nt, wt) = assert_rows_pass(reports, "localization_transfer");
    let (nc, _) = assert_rows_pass(reports, "commutator_bound");
    let (ns, _) = assert_rows_pass(reports, "linf_sum_bound");

    // Each bound is the tighter one somewhere on the boundary family.
    let grid: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
    let rows = compare_linf_bounds(
        &z,
        &x,
        |t| {
            let angle = t * std::f64::consts::FRAC_PI_2;
            family_qubit_covariant(angle.cos(), angle.sin())
        },
        &grid,
        TOL,
    )
    .unwrap();
    let linf_regions = rows
        .iter()
        .filter(|r| r.tighter == TighterBound::LinfSum)
        .count();
    let commutator_regions = rows
        .iter()
        .filter(|r| r.tighter == TighterBound::Commutator)
        .count();
    assert!(linf_regions > 0, "sum bound never tighter");
    assert!(commutator_regions > 0, "commutator bound never tighter");
    report_line(
        6,
        "l-infinity bounds",
        true,
        &format!(
            "frozen sum {sum:.12} >= {bound:.12}; {nt}/{ns}/{nc} suite rows (worst transfer margin {wt:.3e}); regimes {linf_regions}/{commutator_regions}"
        ),
    );
}

#[test]
fn criterion_07_torus_products() {
    let start = Instant::now();
    let grid = [
        (0.0, 0.0),
        (0.0, 0.1),
        (0.1, 0.0),
        (0.1, 0.1),
        (0.1, 0.25),
        (0.25, 0.1),
        (0.25, 0.25),
    ];
    let mut rows_checked = 0usize;
    let mut worst = f64::INFINITY;
    for n in 3..=8usize {
        let reports = torus_scenario(n, &grid, 1000, 42, TOL).unwrap();
        for r in &reports {
            if r.informational {
                continue;
            }
            assert!(
                r.pass,
                "N={n}: {} failed with margin {} ({})",
                r.name, r.margin, r.witness
            );
            if r.name == "torus_unbiasedness" {
                assert!(r.rhs <= 1e-12, "unbiasedness deviation {}", r.rhs);
            } else {
                worst = worst.min(r.margin);
            }
            rows_checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    report_line(
        7,
        "torus width products",
        true,
        &format!("{rows_checked} rows over N=3..8, worst margin {worst:.3e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_08_nqubit_entropy() {
    assert_eq!(binary_entropy(0.5).unwrap(), 1.0, "h(1/2) must be exactly 1");
    let grid = [
        (0.0, 0.0),
        (0.0, 0.1),
        (0.1, 0.0),
        (0.1, 0.1),
        (0.1, 0.25),
        (0.25, 0.25),
    ];
    let mut worst = f64::INFINITY;
    let mut rows = 0usize;
    for n in [2usize, 3] {
        let reports = nqubit_scenario(n, &grid, 1000, 42, TOL, false).unwrap();
        for r in &reports {
            assert!(
                r.pass,
                "N={n}: {} failed with margin {} ({})",
                r.name, r.margin, r.witness
            );
            worst = worst.min(r.margin);
            rows += 1;
        }
    }
    report_line(
        8,
        "N-qubit entropy bound",
        true,
        &format!("{rows} rows, worst margin {worst:.3e}, h(1/2) exact"),
    );
}

#[test]
fn criterion_09_errorbar_oracle_equivalence() {
    let mut worst_steps = 0usize;
    for k in 0..20usize {
        let dim = 2 + k % 2; // 2 or 3
        let n = 2 + k % 2; // outcome counts 2 or 3, never above dim
        let mut rng = rng_from(42, &[9, k as u64]);
        let space = std::sync::Arc::new(if k % 3 == 0 {
            FiniteMetricSpace::cyclic(n, 0.8)
        } else {
            FiniteMetricSpace::discrete(n)
        });
        let e = qwidths::observables::random_pvm(dim, n, space.clone(), &mut rng).unwrap();
        let m = random_joint_povm(dim, space.clone(), space.clone(), &mut rng).unwrap();
        let (m1, _) = m.marginals().unwrap();
        let eps = [0.1, 0.25, 0.5][k % 3];
        let exact = errorbar_width(&m1, &e, eps).unwrap().width;
        let oracle = errorbar_width_oracle(&m1, &e, eps, 10_000, 1000 + k as u64);
        let widths = space.candidate_widths();
        let steps = grid_index(&widths, exact).abs_diff(grid_index(&widths, oracle));
        assert!(
            steps <= 1,
            "instance {k}: oracle {oracle} vs exact {exact} ({steps} grid steps apart)"
        );
        worst_steps = worst_steps.max(steps);
    }
    report_line(
        9,
        "error-bar width oracle",
        true,
        &format!("20 instances, max grid-step distance {worst_steps}"),
    );
}

#[test]
fn criterion_10_suite_reports_deterministic() {
    // Library-level half of the determinism criterion; the CLI suite checks
    // the byte identity of two `verify --seed 42` runs end to end.
    let cfg = SuiteConfig {
        dims: vec![2, 3],
        instances_per_dim: 5,
        ..Default::default()
    };
    let a = serde_json::to_string(&run_suite(&cfg)).unwrap();
    let b = serde_json::to_string(&run_suite(&cfg)).unwrap();
    assert_eq!(a, b, "suite JSON differs between identical runs");
    report_line(
        10,
        "suite determinism (library half)",
        true,
        &format!("{} bytes identical across runs", a.len()),
    );
}
