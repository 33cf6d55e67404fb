//! Command-line runner: validate configurations, compute widths and
//! distances, verify the full inequality suite on seeded random instances,
//! and reproduce the structured example scenarios.
//!
//! Exit status is 0 exactly when every non-informational check row passes;
//! configuration or I/O failures exit with status 2.

mod config;
mod output;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use qwidths::checks::{
    ball_counting_localizability_check, ball_counting_measurability_check, compare_linf_bounds,
    landau_pollak_check, localization_bounds_check, run_suite, werner_transfer_check,
    werner_width_check, width_transfer_check, CheckParams, CheckReport, SuiteConfig,
};
use qwidths::distances::{linf_distance, werner_distance, WernerMethod, VERTEX_ENUMERATION_MAX};
use qwidths::linalg::DensityOperator;
use qwidths::observables::{induced_distribution, random_state};
use qwidths::scenario::{c3_scenario, nqubit_scenario, qubit_scenario, torus_scenario};
use qwidths::seed::rng_from;
use qwidths::widths::{errorbar_width, overall_width};
use qwidths::{Povm, Pvm};

use config::{build_scene, default_eps_grid, Scene};
use output::{emit, Format};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "qwidths",
    about = "Width and distance quantifiers for joint localizability and joint measurability",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Master seed for every stochastic sweep.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Absolute tolerance for check margins.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Thread count for parallel sweeps (0 = library default). Ignored in
    /// builds without the `parallel` feature.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the invariants of every object in a config file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Overall widths of seeded states under the configured PVMs.
    Width {
        #[arg(long)]
        config: PathBuf,
        /// Number of random states on top of the basis states.
        #[arg(long, default_value_t = 10)]
        instances: usize,
    },
    /// Error-bar widths of the configured joint measurement's marginals.
    Errorbar {
        #[arg(long)]
        config: PathBuf,
    },
    /// Werner and l-infinity distances between the configured observables.
    Distance {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the inequality suite: on seeded random instances by default, or
    /// on the configured objects when --config is given.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Hilbert-space dimensions for random instances.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5])]
        dims: Vec<usize>,
        /// Random instances per dimension.
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// Reproduce a structured example scenario.
    Example {
        #[arg(value_enum)]
        which: ExampleKind,
        /// Size parameter (torus size or qubit count) instead of the
        /// default range.
        #[arg(long)]
        n: Option<usize>,
        /// States per sweep (defaults: qubit 10000, torus/nqubit 1000).
        #[arg(long)]
        states: Option<usize>,
        /// Allow qubit counts above the desk-scale default.
        #[arg(long, default_value_t = false)]
        force: bool,
    },
    /// Confidence-grid x family-parameter frontier over the covariant
    /// boundary family, comparing the two l-infinity bounds.
    Sweep {
        /// Parameter grid size on the quarter circle.
        #[arg(long, default_value_t = 33)]
        points: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleKind {
    Qubit,
    Torus,
    Nqubit,
    C3,
}

fn main() {
    let cli = Cli::parse();
    init_thread_pool(cli.parallel);
    match run(&cli) {
        Ok(reports) => {
            if let Err(err) = emit(&reports, cli.format, cli.out.as_deref()) {
                eprintln!("error: {err:#}");
                std::process::exit(2);
            }
            let all_pass = reports
                .iter()
                .filter(|r| !r.informational)
                .all(|r| r.pass);
            std::process::exit(if all_pass { 0 } else { 1 });
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

#[cfg(feature = "parallel")]
fn init_thread_pool(threads: Option<usize>) {
    if let Some(n) = threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn init_thread_pool(_threads: Option<usize>) {}

fn run(cli: &Cli) -> anyhow::Result<Vec<CheckReport>> {
    match &cli.command {
        Command::Validate { config } => {
            let cfg = config::load(config)?;
            Ok(validate_scene(&cfg))
        }
        Command::Width { config, instances } => {
            let cfg = config::load(config)?;
            let scene = build_scene(&cfg)?;
            let seed = cli.seed.or(scene.seed).unwrap_or(DEFAULT_SEED);
            width_rows(&scene, *instances, seed)
        }
        Command::Errorbar { config } => {
            let cfg = config::load(config)?;
            let scene = build_scene(&cfg)?;
            errorbar_rows(&scene)
        }
        Command::Distance { config } => {
            let cfg = config::load(config)?;
            let scene = build_scene(&cfg)?;
            distance_rows(&scene)
        }
        Command::Verify {
            config,
            dims,
            instances,
        } => match config {
            Some(path) => {
                let cfg = config::load(path)?;
                let scene = build_scene(&cfg)?;
                let seed = cli.seed.or(scene.seed).unwrap_or(DEFAULT_SEED);
                let tol = cli.tolerance.or(scene.tolerance).unwrap_or(DEFAULT_TOL);
                config_checks(&scene, seed, tol)
            }
            None => {
                let suite = SuiteConfig {
                    seed: cli.seed.unwrap_or(DEFAULT_SEED),
                    dims: dims.clone(),
                    instances_per_dim: *instances,
                    tol: cli.tolerance.unwrap_or(DEFAULT_TOL),
                    ..Default::default()
                };
                Ok(run_suite(&suite))
            }
        },
        Command::Example {
            which,
            n,
            states,
            force,
        } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let tol = cli.tolerance.unwrap_or(DEFAULT_TOL);
            let grid = default_eps_grid();
            let mut reports = Vec::new();
            match which {
                ExampleKind::Qubit => {
                    reports.extend(qubit_scenario(&grid, states.unwrap_or(10_000), seed, tol)?);
                }
                ExampleKind::Torus => {
                    let sizes: Vec<usize> = match n {
                        Some(n) => vec![*n],
                        None => (3..=8).collect(),
                    };
                    for size in sizes {
                        reports.extend(torus_scenario(
                            size,
                            &grid,
                            states.unwrap_or(1000),
                            seed,
                            tol,
                        )?);
                    }
                }
                ExampleKind::Nqubit => {
                    let sizes: Vec<usize> = match n {
                        Some(n) => vec![*n],
                        None => vec![2, 3],
                    };
                    for size in sizes {
                        reports.extend(nqubit_scenario(
                            size,
                            &grid,
                            states.unwrap_or(1000),
                            seed,
                            tol,
                            *force,
                        )?);
                    }
                }
                ExampleKind::C3 => reports.extend(c3_scenario(tol)?),
            }
            Ok(reports)
        }
        Command::Sweep { points } => {
            let tol = cli.tolerance.unwrap_or(DEFAULT_TOL);
            sweep_rows(*points, tol)
        }
    }
}

fn ok_row(name: &str, witness: String) -> CheckReport {
    CheckReport::bound(name, 0.0, 0.0, 0.0, witness, CheckParams::default())
}

/// Build every configured object, reporting one row per object.
fn validate_scene(cfg: &config::Config) -> Vec<CheckReport> {
    let mut rows = Vec::new();
    let mut push = |name: &str, result: anyhow::Result<String>| match result {
        Ok(witness) => rows.push(ok_row(name, witness)),
        Err(err) => rows.push(CheckReport::error_row(
            name,
            &format!("{err:#}"),
            CheckParams::default(),
        )),
    };
    let a = cfg
        .pvm_a
        .as_ref()
        .map(|p| config::build_pvm(p, cfg.dimension));
    let b = cfg
        .pvm_b
        .as_ref()
        .map(|p| config::build_pvm(p, cfg.dimension));
    if let Some(result) = &a {
        push(
            "validate_pvm_a",
            result
                .as_ref()
                .map(|p| format!("outcomes={}", p.len()))
                .map_err(|e| anyhow::anyhow!("{e:#}")),
        );
    }
    if let Some(result) = &b {
        push(
            "validate_pvm_b",
            result
                .as_ref()
                .map(|p| format!("outcomes={}", p.len()))
                .map_err(|e| anyhow::anyhow!("{e:#}")),
        );
    }
    if let Some(j) = &cfg.joint_povm {
        let built = config::build_joint(
            j,
            cfg.dimension,
            a.as_ref().and_then(|r| r.as_ref().ok()),
            b.as_ref().and_then(|r| r.as_ref().ok()),
        );
        push(
            "validate_joint_povm",
            built.map(|m| {
                format!(
                    "outcomes={}x{}",
                    m.space_a().len(),
                    m.space_b().len()
                )
            }),
        );
    }
    if rows.is_empty() {
        rows.push(ok_row("validate", "nothing to validate".into()));
    }
    rows
}

fn require_pvm<'s>(p: &'s Option<Pvm>, name: &str) -> anyhow::Result<&'s Pvm> {
    p.as_ref()
        .with_context(|| format!("config needs {name} for this command"))
}

/// Overall widths of basis states plus seeded random states.
fn width_rows(scene: &Scene, instances: usize, seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    let mut rows = Vec::new();
    let sides: Vec<(&str, &Pvm)> = [
        ("width_a", scene.a.as_ref()),
        ("width_b", scene.b.as_ref()),
    ]
    .into_iter()
    .filter_map(|(n, p)| p.map(|p| (n, p)))
    .collect();
    if sides.is_empty() {
        anyhow::bail!("config needs pvm_a (and optionally pvm_b) for the width command");
    }
    let dim = scene.dim;
    let states: Vec<(String, DensityOperator)> = (0..dim)
        .map(|k| {
            let mut v = vec![qwidths::num_complex::Complex64::new(0.0, 0.0); dim];
            v[k] = qwidths::num_complex::Complex64::new(1.0, 0.0);
            Ok((format!("basis{k}"), DensityOperator::pure(&v)?))
        })
        .chain((0..instances).map(|i| {
            let mut rng = rng_from(seed, &[500, i as u64]);
            Ok((format!("random{i}"), random_state(dim, &mut rng)?))
        }))
        .collect::<qwidths::Result<_>>()?;
    for (name, pvm) in sides {
        for &(e1, e2) in &scene.epsilons {
            let eps = if name == "width_a" { e1 } else { e2 };
            for (label, rho) in &states {
                let p = induced_distribution(rho, pvm.as_povm())?;
                let w = overall_width(&p, eps)?;
                rows.push(CheckReport::bound(
                    name,
                    w.width,
                    0.0,
                    0.0,
                    format!(
                        "state={label};x={};mass={:.6}",
                        w.achieving_outcome, w.worst_case_probability
                    ),
                    CheckParams {
                        eps1: Some(eps),
                        seed: Some(seed),
                        dim: Some(dim),
                        ..Default::default()
                    },
                ));
            }
        }
    }
    Ok(rows)
}

/// Error-bar widths of the configured joint measurement's marginals.
fn errorbar_rows(scene: &Scene) -> anyhow::Result<Vec<CheckReport>> {
    let a = require_pvm(&scene.a, "pvm_a")?;
    let b = require_pvm(&scene.b, "pvm_b")?;
    let m = scene
        .m
        .as_ref()
        .context("config needs joint_povm for the errorbar command")?;
    let (m1, m2) = m.marginals()?;
    let mut rows = Vec::new();
    for &(e1, e2) in &scene.epsilons {
        for (name, povm, pvm, eps) in [
            ("errorbar_a", &m1, a, e1),
            ("errorbar_b", &m2, b, e2),
        ] {
            let w = errorbar_width(povm, pvm, eps)?;
            rows.push(CheckReport::bound(
                name,
                w.width,
                0.0,
                0.0,
                format!(
                    "x={};q={:.6}",
                    w.achieving_outcome, w.worst_case_probability
                ),
                CheckParams {
                    eps1: Some(eps),
                    dim: Some(scene.dim),
                    ..Default::default()
                },
            ));
        }
    }
    Ok(rows)
}

fn distance_pair_rows(
    prefix: &str,
    lhs: &Povm,
    rhs: &Povm,
    dim: usize,
) -> anyhow::Result<Vec<CheckReport>> {
    let mut rows = Vec::new();
    let method = if lhs.space().len() <= VERTEX_ENUMERATION_MAX {
        WernerMethod::Exact
    } else {
        WernerMethod::Alternating
    };
    let dw = werner_distance(lhs, rhs, method)?;
    rows.push(CheckReport::bound(
        format!("werner_{prefix}"),
        dw.value,
        0.0,
        0.0,
        format!("method={:?}", dw.method),
        CheckParams {
            dim: Some(dim),
            ..Default::default()
        },
    ));
    let dl = linf_distance(lhs, rhs)?;
    rows.push(CheckReport::bound(
        format!("linf_{prefix}"),
        dl.value,
        0.0,
        0.0,
        String::new(),
        CheckParams {
            dim: Some(dim),
            ..Default::default()
        },
    ));
    Ok(rows)
}

/// Werner and l-infinity distances for the configured observables.
fn distance_rows(scene: &Scene) -> anyhow::Result<Vec<CheckReport>> {
    let mut rows = Vec::new();
    if let (Some(m), Some(a), Some(b)) = (&scene.m, &scene.a, &scene.b) {
        let (m1, m2) = m.marginals()?;
        rows.extend(distance_pair_rows("m1_a", &m1, a.as_povm(), scene.dim)?);
        rows.extend(distance_pair_rows("m2_b", &m2, b.as_povm(), scene.dim)?);
    }
    if let (Some(a), Some(b)) = (&scene.a, &scene.b) {
        if a.space().compatible(b.space()) {
            rows.extend(distance_pair_rows("a_b", a.as_povm(), b.as_povm(), scene.dim)?);
        }
    }
    if rows.is_empty() {
        anyhow::bail!("config needs pvm_a/pvm_b (and optionally joint_povm) for distances");
    }
    Ok(rows)
}

/// Run the named checks (default: all applicable) on the configured objects.
fn config_checks(scene: &Scene, seed: u64, tol: f64) -> anyhow::Result<Vec<CheckReport>> {
    let a = require_pvm(&scene.a, "pvm_a")?;
    let b = require_pvm(&scene.b, "pvm_b")?;
    let m = scene
        .m
        .as_ref()
        .context("config needs joint_povm for the verify command")?;
    let enabled = |name: &str| {
        scene
            .checks
            .as_ref()
            .map_or(true, |list| list.iter().any(|c| c == name))
    };
    let mut rng = rng_from(seed, &[100]);
    let rho = random_state(scene.dim, &mut rng)?;
    let mut rows: Vec<CheckReport> = Vec::new();
    let guarded = |name: &str, rows: &mut Vec<CheckReport>, result: qwidths::Result<Vec<CheckReport>>| {
        match result {
            Ok(mut r) => rows.append(&mut r),
            Err(err) => rows.push(CheckReport::error_row(
                name,
                &err.to_string(),
                CheckParams::default(),
            )),
        }
    };

    if enabled("landau_pollak") {
        guarded(
            "landau_pollak",
            &mut rows,
            landau_pollak_check(&rho, a, &[0], b, &[0], tol).map(|r| vec![r]),
        );
    }
    for &(e1, e2) in &scene.epsilons {
        if e1 + e2 > 1.0 {
            continue;
        }
        if enabled("width_transfer") {
            guarded(
                "width_transfer",
                &mut rows,
                width_transfer_check(a, b, m, e1, e2, tol)
                    .map(|(r, _)| vec![r.a_side, r.b_side, r.ball_sum]),
            );
        }
        if enabled("ball_localization") {
            guarded(
                "ball_localization",
                &mut rows,
                ball_counting_localizability_check(&rho, a, b, e1, e2, tol).map(|r| vec![r]),
            );
        }
        if enabled("ball_measurement") {
            guarded(
                "ball_measurement",
                &mut rows,
                ball_counting_measurability_check(m, a, b, e1, e2, tol).map(|r| vec![r]),
            );
        }
        if enabled("werner_transfer") && e1 > 0.0 && e2 > 0.0 && e1 + e2 < 1.0 {
            guarded(
                "werner_transfer",
                &mut rows,
                werner_transfer_check(a, b, m, e1, e2, tol).map(|(x, y)| vec![x, y]),
            );
        }
        if enabled("werner_width") && e1 > 0.0 {
            let (m1, _) = m.marginals()?;
            guarded(
                "werner_width",
                &mut rows,
                werner_width_check(&m1, a, e1, tol).map(|r| vec![r]),
            );
        }
    }
    if enabled("localization_transfer") || enabled("linf_sum") || enabled("commutator_bound") {
        guarded(
            "localization_bounds",
            &mut rows,
            localization_bounds_check(a, b, m, tol).map(|rs| {
                rs.into_iter()
                    .filter(|r| {
                        scene.checks.as_ref().map_or(true, |list| {
                            list.iter().any(|c| r.name.starts_with(c.as_str()))
                        })
                    })
                    .collect::<Vec<_>>()
            }),
        );
    }
    Ok(rows)
}

/// Frontier over the covariant boundary family: both l-infinity bounds per
/// parameter, plus the error-bar widths per confidence pair.
fn sweep_rows(points: usize, tol: f64) -> anyhow::Result<Vec<CheckReport>> {
    use qwidths::observables::{family_qubit_covariant, qubit_x_pvm, qubit_z_pvm};
    anyhow::ensure!(points >= 2, "sweep needs at least two grid points");
    let z = qubit_z_pvm();
    let x = qubit_x_pvm();
    let grid: Vec<f64> = (0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect();
    let comparisons = compare_linf_bounds(
        &z,
        &x,
        |t| {
            let angle = t * std::f64::consts::FRAC_PI_2;
            family_qubit_covariant(angle.cos(), angle.sin())
        },
        &grid,
        tol,
    )?;
    let mut rows = Vec::new();
    for cmp in &comparisons {
        let angle = cmp.parameter * std::f64::consts::FRAC_PI_2;
        let tag = format!(
            "lambda={:.6};mu={:.6};tighter={:?}",
            angle.cos(),
            angle.sin(),
            cmp.tighter
        );
        let mut linf = cmp.linf_sum.clone();
        linf.name = "sweep_linf_sum".into();
        linf.witness = tag.clone();
        rows.push(linf);
        let mut com = cmp.commutator.clone();
        com.name = "sweep_commutator".into();
        com.witness = tag;
        rows.push(com);
    }
    // Error-bar width frontier over the default confidence grid.
    for &t in &grid {
        let angle = t * std::f64::consts::FRAC_PI_2;
        let m = family_qubit_covariant(angle.cos(), angle.sin())?;
        let (m1, m2) = m.marginals()?;
        for &(e1, e2) in &default_eps_grid() {
            let w1 = errorbar_width(&m1, &z, e1)?;
            let w2 = errorbar_width(&m2, &x, e2)?;
            rows.push(CheckReport::bound(
                "sweep_errorbar_product",
                (w1.width).max(w2.width),
                0.0,
                0.0,
                format!(
                    "lambda={:.6};mu={:.6};W1={:.6};W2={:.6}",
                    angle.cos(),
                    angle.sin(),
                    w1.width,
                    w2.width
                ),
                CheckParams {
                    eps1: Some(e1),
                    eps2: Some(e2),
                    ..Default::default()
                },
            ));
        }
    }
    Ok(rows)
}
