//! Structured scenario runners: a conjugate qubit pair, Fourier-conjugate
//! position/momentum on a discrete torus, product bases on N qubits, and a
//! three-dimensional pair that is jointly localizable but has no sharp joint
//! measurement.
//!
//! Each runner produces a bundle of [`CheckReport`]s. Sweep rows record the
//! tightest margin over the swept states or parameters together with the
//! achieving configuration; rows named `*_printed` are informational
//! re-evaluations of an alternative constant and never gate a run.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::checks::{
    ball_counting_localizability_check, landau_pollak_check, CheckParams, CheckReport,
};
use crate::error::{Error, Result};
use crate::exec::par_map_range;
use crate::linalg::{CMatrix, DensityOperator, HermitianOperator};
use crate::metric::FiniteMetricSpace;
use crate::observables::{
    family_qubit_covariant, family_smeared, family_trivial, induced_distribution,
    qubit_x_pvm, qubit_z_pvm, random_pure_vector, ProbabilityDistribution, Pvm,
};
use crate::seed::rng_from;
use crate::widths::{binary_entropy, errorbar_width, overall_width};

/// `1 + 1/sqrt(2)`: the sharp two-outcome localization constant.
pub const QUBIT_SUM_BOUND: f64 = 1.707106781186547524400844362104849;

const STREAM_QUBIT: u64 = 1;
const STREAM_TORUS: u64 = 2;
const STREAM_NQUBIT: u64 = 3;

fn scenario_params(seed: u64) -> CheckParams {
    CheckParams {
        seed: Some(seed),
        ..Default::default()
    }
}

/// Pure qubit state with the given Bloch vector (must have norm <= 1; unit
/// norm gives a pure state).
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityOperator> {
    let m = CMatrix::from_rows(&[
        vec![(0.5 * (1.0 + z), 0.0), (0.5 * x, 0.5 * y)],
        vec![(0.5 * x, -0.5 * y), (0.5 * (1.0 - z), 0.0)],
    ]);
    DensityOperator::new(HermitianOperator::new(m)?)
}

fn bloch_coords(rho: &DensityOperator) -> (f64, f64, f64) {
    let m = rho.matrix();
    let x = (m[(0, 1)] + m[(1, 0)]).re;
    let y = (m[(1, 0)] - m[(0, 1)]).im;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    (x, y, z)
}

/// Conjugate qubit pair: localization sum bound, its attainment, the
/// ball-product bound over a grid of confidence pairs, and the measurement
/// analog over the covariant family sweep.
pub fn qubit_scenario(
    eps_grid: &[(f64, f64)],
    n_states: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let z = qubit_z_pvm();
    let x = qubit_x_pvm();
    let params = scenario_params(seed);
    let mut reports = Vec::new();

    // Localization sums over seeded pure states.
    let sums: Vec<(f64, (f64, f64, f64))> = par_map_range(n_states, |i| {
        let mut rng = rng_from(seed, &[STREAM_QUBIT, i as u64]);
        let psi = random_pure_vector(2, &mut rng);
        let rho = DensityOperator::pure(&psi).expect("unit vector");
        let pz = induced_distribution(&rho, z.as_povm()).expect("dims match");
        let px = induced_distribution(&rho, x.as_povm()).expect("dims match");
        let sum = pz.weights().iter().copied().fold(0.0, f64::max)
            + px.weights().iter().copied().fold(0.0, f64::max);
        (sum, bloch_coords(&rho))
    });
    let (max_sum, at) = sums
        .into_iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .expect("at least one state");
    reports.push(CheckReport::bound(
        "qubit_state_sum_bound",
        QUBIT_SUM_BOUND,
        max_sum,
        tol,
        format!(
            "bloch=({:.4};{:.4};{:.4});states={n_states}",
            at.0, at.1, at.2
        ),
        params.clone(),
    ));

    // The analytic maximizer attains the bound.
    let inv = 1.0 / 2f64.sqrt();
    let star = bloch_state(inv, 0.0, inv)?;
    let pz = induced_distribution(&star, z.as_povm())?;
    let px = induced_distribution(&star, x.as_povm())?;
    let attained = pz.weights().iter().copied().fold(0.0, f64::max)
        + px.weights().iter().copied().fold(0.0, f64::max);
    reports.push(CheckReport::bound(
        "qubit_bloch_attainment",
        attained,
        QUBIT_SUM_BOUND,
        tol,
        "bloch=(0.7071;0;0.7071)",
        params.clone(),
    ));

    // Ball-product bound on a smaller state sweep per confidence pair.
    let probe_states = n_states.clamp(1, 100);
    for &(e1, e2) in eps_grid {
        if e1 + e2 > 1.0 {
            continue;
        }
        let margins: Vec<CheckReport> = par_map_range(probe_states, |i| {
            let mut rng = rng_from(seed, &[STREAM_QUBIT, 7, i as u64]);
            let psi = random_pure_vector(2, &mut rng);
            let rho = DensityOperator::pure(&psi).expect("unit vector");
            ball_counting_localizability_check(&rho, &z, &x, e1, e2, tol).expect("qubit check")
        });
        let worst = margins
            .into_iter()
            .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
            .expect("at least one state");
        let mut report = worst;
        report.name = "qubit_ball_product".into();
        report.params = CheckParams {
            eps1: Some(e1),
            eps2: Some(e2),
            ..params.clone()
        };
        reports.push(report);
    }

    // Measurement analog over the covariant boundary family, with the
    // confidence levels chosen by the marginal fidelities.
    let sweep = 64usize;
    let mut worst_sum = f64::NEG_INFINITY;
    let mut worst_param = 0.0;
    let mut max_width: f64 = 0.0;
    for k in 0..=sweep {
        let t = k as f64 / sweep as f64 * (PI / 2.0);
        let m = family_qubit_covariant(t.cos(), t.sin())?;
        let (m1, m2) = m.marginals()?;
        let fid1 = (0..2)
            .map(|i| z.element(i).trace_product(m1.element(i)))
            .fold(f64::INFINITY, f64::min);
        let fid2 = (0..2)
            .map(|i| x.element(i).trace_product(m2.element(i)))
            .fold(f64::INFINITY, f64::min);
        let sum = fid1 + fid2;
        if sum > worst_sum {
            worst_sum = sum;
            worst_param = t;
        }
        // Choice rule: at eps_i = 1 - fid_i both error-bar widths vanish.
        let w1 = errorbar_width(&m1, &z, (1.0 - fid1).clamp(0.0, 1.0))?.width;
        let w2 = errorbar_width(&m2, &x, (1.0 - fid2).clamp(0.0, 1.0))?.width;
        max_width = max_width.max(w1).max(w2);
    }
    reports.push(CheckReport::bound(
        "qubit_measurement_sum_bound",
        QUBIT_SUM_BOUND,
        worst_sum,
        tol,
        format!(
            "lambda={:.4};mu={:.4}",
            worst_param.cos(),
            worst_param.sin()
        ),
        params.clone(),
    ));
    reports.push(CheckReport::bound(
        "qubit_choice_rule_width",
        0.0,
        max_width,
        tol,
        format!("sweep={}", sweep + 1),
        params,
    ));

    Ok(reports)
}

/// Clock matrix `u |n> = exp(i 2 pi n / N) |n>`.
pub fn weyl_u(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Shift matrix `v |n> = |n+1 mod N>`.
pub fn weyl_v(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == (j + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Position PVM `{|n><n|}` and its Fourier conjugate `{|kbar><kbar|}` with
/// `|kbar> = (1/sqrt(N)) sum_n exp(-i 2 pi k n / N) |n>`, both on the
/// circular metric of step `2 pi / N`.
pub fn fourier_pvm_pair(n: usize) -> Result<(Pvm, Pvm)> {
    let space = Arc::new(FiniteMetricSpace::cyclic(n, 2.0 * PI / n as f64));
    let position: Vec<HermitianOperator> = (0..n)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[k] = C64::new(1.0, 0.0);
            HermitianOperator::projector(&v)
        })
        .collect();
    let momentum: Vec<HermitianOperator> = (0..n)
        .map(|k| {
            let v: Vec<C64> = (0..n)
                .map(|m| {
                    C64::from_polar(
                        1.0 / (n as f64).sqrt(),
                        -2.0 * PI * (k * m) as f64 / n as f64,
                    )
                })
                .collect();
            HermitianOperator::projector(&v)
        })
        .collect();
    Ok((
        Pvm::from_parts(space.clone(), position)?,
        Pvm::from_parts(space, momentum)?,
    ))
}

/// Discrete torus: Weyl relation, mutual unbiasedness, and the width-product
/// bound `(W1 + 2pi/N)(W2 + 2pi/N) >= (4 pi^2 / N)(1 - e1 - e2)^2` for
/// seeded states and for trivial/smeared joint-measurement families. The
/// same product with the `1/N` additive constant is logged informationally.
pub fn torus_scenario(
    n: usize,
    eps_grid: &[(f64, f64)],
    n_states: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    if n < 2 {
        return Err(Error::DomainViolation {
            value: n as f64,
            domain: "torus size must be at least 2",
        });
    }
    let params = scenario_params(seed);
    let (q, p) = fourier_pvm_pair(n)?;
    let hbar = 2.0 * PI / n as f64;
    let mut reports = Vec::new();

    // Weyl relation u v = exp(i hbar) v u.
    let u = weyl_u(n);
    let v = weyl_v(n);
    let lhs = u.mul(&v);
    let rhs = v.mul(&u).scale_c(C64::from_polar(1.0, hbar));
    reports.push(CheckReport::bound(
        "torus_weyl_relation",
        1e-10,
        lhs.sub(&rhs).max_abs(),
        0.0,
        format!("N={n}"),
        params.clone(),
    ));

    // Mutual unbiasedness |<n|kbar>|^2 = 1/N.
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let overlap = q.element(i).trace_product(p.element(k));
            dev = dev.max((overlap - 1.0 / n as f64).abs());
        }
    }
    reports.push(CheckReport::bound(
        "torus_unbiasedness",
        1e-12,
        dev,
        0.0,
        format!("N={n}"),
        params.clone(),
    ));

    // Width products over seeded states (plus the two basis states).
    let factor = 4.0 * PI * PI / n as f64;
    for &(e1, e2) in eps_grid {
        if e1 + e2 > 1.0 {
            continue;
        }
        let rows: Vec<(f64, f64, usize)> = par_map_range(n_states + 2, |i| {
            let rho = if i == 0 {
                let mut v = vec![C64::new(0.0, 0.0); n];
                v[0] = C64::new(1.0, 0.0);
                DensityOperator::pure(&v).expect("basis state")
            } else if i == 1 {
                let v = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
                DensityOperator::pure(&v).expect("uniform state")
            } else {
                let mut rng = rng_from(seed, &[STREAM_TORUS, n as u64, i as u64]);
                DensityOperator::pure(&random_pure_vector(n, &mut rng)).expect("unit vector")
            };
            let pq = induced_distribution(&rho, q.as_povm()).expect("dims");
            let pp = induced_distribution(&rho, p.as_povm()).expect("dims");
            let w1 = overall_width(&pq, e1).expect("eps in range").width;
            let w2 = overall_width(&pp, e2).expect("eps in range").width;
            let derived = (w1 + hbar) * (w2 + hbar);
            let printed = (w1 + 1.0 / n as f64) * (w2 + 1.0 / n as f64);
            (derived, printed, i)
        });
        let rhs = factor * (1.0 - e1 - e2).powi(2);
        let eps_params = CheckParams {
            eps1: Some(e1),
            eps2: Some(e2),
            ..params.clone()
        };
        let (worst, _, at) = rows
            .iter()
            .copied()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .expect("nonempty sweep");
        reports.push(CheckReport::bound(
            "torus_width_product",
            worst,
            rhs,
            tol,
            format!("N={n};state={at}"),
            eps_params.clone(),
        ));
        let (_, worst_printed, at_printed) = rows
            .iter()
            .copied()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty sweep");
        reports.push(
            CheckReport::bound(
                "torus_width_product_printed",
                worst_printed,
                rhs,
                tol,
                format!("N={n};state={at_printed}"),
                eps_params.clone(),
            )
            .informational(),
        );

        // Error-bar analog for the two structured families.
        let uniform =
            ProbabilityDistribution::new(p.space().clone(), vec![1.0 / n as f64; n])?;
        for (label, m) in [
            ("trivial", family_trivial(&q, &uniform)?),
            ("smeared", family_smeared(&q, &p)?),
        ] {
            let (m1, m2) = m.marginals()?;
            let w1 = errorbar_width(&m1, &q, e1)?.width;
            let w2 = errorbar_width(&m2, &p, e2)?.width;
            reports.push(CheckReport::bound(
                format!("torus_errorbar_product_{label}"),
                (w1 + hbar) * (w2 + hbar),
                rhs,
                tol,
                format!("N={n};W1={w1:.6};W2={w2:.6}"),
                eps_params.clone(),
            ));
        }
    }
    Ok(reports)
}

fn nqubit_space(n: usize) -> Arc<FiniteMetricSpace> {
    Arc::new(FiniteMetricSpace::hamming_rescaled(n))
}

/// Product computational and conjugate PVMs on `n` qubits over the rescaled
/// Hamming metric.
pub fn nqubit_pvm_pair(n: usize) -> Result<(Pvm, Pvm)> {
    let dim = 1usize << n;
    let space = nqubit_space(n);
    let z: Vec<HermitianOperator> = (0..dim)
        .map(|idx| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[idx] = C64::new(1.0, 0.0);
            HermitianOperator::projector(&v)
        })
        .collect();
    let amp = 1.0 / (dim as f64).sqrt();
    let x: Vec<HermitianOperator> = (0..dim)
        .map(|idx| {
            let v: Vec<C64> = (0..dim)
                .map(|row| {
                    let sign = if (row & idx).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    C64::new(sign * amp, 0.0)
                })
                .collect();
            HermitianOperator::projector(&v)
        })
        .collect();
    Ok((
        Pvm::from_parts(space.clone(), z)?,
        Pvm::from_parts(space, x)?,
    ))
}

/// GHZ state `(|0...0> + |1...1>)/sqrt(2)`.
pub fn ghz_state(n: usize) -> Result<DensityOperator> {
    let dim = 1usize << n;
    let mut v = vec![C64::new(0.0, 0.0); dim];
    let amp = 1.0 / 2f64.sqrt();
    v[0] = C64::new(amp, 0.0);
    v[dim - 1] = C64::new(amp, 0.0);
    DensityOperator::pure(&v)
}

/// N-qubit entropy bound
/// `h(W1) + h(W2) >= 1 + (2/N) log2(1 - e1 - e2)` with widths clamped to the
/// counting-bound domain `[0, 1/2]`. Pairs with `e1 + e2 >= 1` are skipped
/// (the right-hand side diverges and the bound is vacuous).
pub fn nqubit_scenario(
    n: usize,
    eps_grid: &[(f64, f64)],
    n_states: usize,
    seed: u64,
    tol: f64,
    allow_large: bool,
) -> Result<Vec<CheckReport>> {
    if n > 3 && !allow_large {
        return Err(Error::DimensionTooLarge {
            context: "product-basis scenario",
            n,
            max: 3,
        });
    }
    let dim = 1usize << n;
    let (z, x) = nqubit_pvm_pair(n)?;
    let params = scenario_params(seed);
    let mut reports = Vec::new();

    for &(e1, e2) in eps_grid {
        if e1 + e2 >= 1.0 {
            continue;
        }
        // Structured probes first: |0..0>, the uniform superposition, GHZ.
        let rows: Vec<(f64, usize)> = par_map_range(n_states + 3, |i| {
            let rho = match i {
                0 => {
                    let mut v = vec![C64::new(0.0, 0.0); dim];
                    v[0] = C64::new(1.0, 0.0);
                    DensityOperator::pure(&v).expect("basis state")
                }
                1 => {
                    let v = vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
                    DensityOperator::pure(&v).expect("uniform state")
                }
                2 => ghz_state(n).expect("GHZ"),
                _ => {
                    let mut rng = rng_from(seed, &[STREAM_NQUBIT, n as u64, i as u64]);
                    DensityOperator::pure(&random_pure_vector(dim, &mut rng))
                        .expect("unit vector")
                }
            };
            let pz = induced_distribution(&rho, z.as_povm()).expect("dims");
            let px = induced_distribution(&rho, x.as_povm()).expect("dims");
            let w1 = overall_width(&pz, e1).expect("eps in range").width;
            let w2 = overall_width(&px, e2).expect("eps in range").width;
            let entropy = binary_entropy(w1.min(0.5)).expect("clamped domain")
                + binary_entropy(w2.min(0.5)).expect("clamped domain");
            (entropy, i)
        });
        let rhs = 1.0 + 2.0 / n as f64 * (1.0 - e1 - e2).log2();
        let (worst, at) = rows
            .into_iter()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .expect("nonempty sweep");
        reports.push(CheckReport::bound(
            "nqubit_entropy_bound",
            worst,
            rhs,
            tol,
            format!("N={n};state={at}"),
            CheckParams {
                eps1: Some(e1),
                eps2: Some(e2),
                ..params.clone()
            },
        ));
    }
    Ok(reports)
}

/// The direct-sum pair on `C (+) C^2`: its shared first summand hosts a
/// state that is perfectly localized for both observables, while the block
/// pair acts like the conjugate qubit pair.
pub fn c3_scenario(tol: f64) -> Result<Vec<CheckReport>> {
    let space = Arc::new(FiniteMetricSpace::discrete(3));
    let inv = 1.0 / 2f64.sqrt();
    let basis = |k: usize| {
        let mut v = vec![C64::new(0.0, 0.0); 3];
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let a = Pvm::from_parts(
        space.clone(),
        vec![
            HermitianOperator::projector(&basis(0)),
            HermitianOperator::projector(&basis(1)),
            HermitianOperator::projector(&basis(2)),
        ],
    )?;
    let plus = [C64::new(0.0, 0.0), C64::new(inv, 0.0), C64::new(inv, 0.0)];
    let minus = [C64::new(0.0, 0.0), C64::new(inv, 0.0), C64::new(-inv, 0.0)];
    let b = Pvm::from_parts(
        space,
        vec![
            HermitianOperator::projector(&basis(0)),
            HermitianOperator::projector(&plus),
            HermitianOperator::projector(&minus),
        ],
    )?;
    let params = CheckParams::default();
    let mut reports = Vec::new();

    // The first-summand state localizes both observables at width zero.
    let rho = DensityOperator::pure(&basis(0))?;
    let pa = induced_distribution(&rho, a.as_povm())?;
    let pb = induced_distribution(&rho, b.as_povm())?;
    let wa = overall_width(&pa, 0.0)?.width;
    let wb = overall_width(&pb, 0.0)?.width;
    reports.push(CheckReport::bound(
        "c3_joint_localizability",
        0.0,
        wa.max(wb),
        tol,
        "state=first_summand",
        params.clone(),
    ));

    // The C^2 block reproduces the conjugate-pair overlap 1/2.
    let mut dev: f64 = 0.0;
    for i in 1..3 {
        for j in 1..3 {
            dev = dev.max((a.element(i).trace_product(b.element(j)) - 0.5).abs());
        }
    }
    reports.push(CheckReport::bound(
        "c3_block_overlap",
        1e-9,
        dev,
        0.0,
        "block=(1;2)x(1;2)",
        params.clone(),
    ));

    // Shared projections make the Landau-Pollak bound trivial.
    let mut lp = landau_pollak_check(&rho, &a, &[0], &b, &[0], tol)?;
    lp.name = "c3_landau_pollak".into();
    reports.push(lp);

    Ok(reports)
}
