//! Executable inequality checks and the seeded verification suite.
//!
//! Every check produces a [`CheckReport`] oriented so that `pass` holds
//! exactly when `lhs - rhs >= -tol`: the left-hand side is always the side
//! a theorem guarantees to dominate.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::distances::{werner_distance, linf_distance, WernerMethod};
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::linalg::DensityOperator;
use crate::metric::FiniteMetricSpace;
use crate::observables::{
    induced_distribution, max_commutator_norm, max_pairwise_norm, max_pairwise_trace,
    random_joint_povm, random_pvm, random_state, JointPovm, Povm, Pvm,
};
use crate::linalg::operator_norm;
use crate::seed::{derive_seed, rng_from};
use crate::tol;
use crate::widths::{errorbar_width, overall_width, WidthResult};
use crate::witness::{
    posterior_records, select_transfer_witness, PosteriorRecord, TransferWitness,
};

/// Parameters a report was produced under; absent fields print empty.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckParams {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
}

/// One verified inequality.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; the check passes iff the margin is at least `-tol`.
    pub margin: f64,
    pub pass: bool,
    pub tol: f64,
    pub witness: String,
    /// Informational rows are reported but never gate an exit status.
    pub informational: bool,
    pub params: CheckParams,
}

impl CheckReport {
    /// Report for a claim `lhs >= rhs`.
    pub fn bound(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tol: f64,
        witness: impl Into<String>,
        params: CheckParams,
    ) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            pass: margin >= -tol,
            tol,
            witness: witness.into(),
            informational: false,
            params,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    /// Row standing in for a failed computation.
    pub fn error_row(name: impl Into<String>, message: &str, params: CheckParams) -> Self {
        Self {
            name: name.into(),
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            pass: false,
            tol: 0.0,
            witness: format!("ERROR: {}", message.replace(',', ";")),
            informational: false,
            params,
        }
    }
}

fn subset_labels(space: &FiniteMetricSpace, subset: &[usize]) -> String {
    let names: Vec<&str> = subset.iter().map(|&i| space.label(i)).collect();
    format!("{{{}}}", names.join(";"))
}

fn validate_subset(space: &FiniteMetricSpace, subset: &[usize]) -> Result<()> {
    for &i in subset {
        if i >= space.len() {
            return Err(Error::UnknownOutcome {
                index: i,
                size: space.len(),
            });
        }
    }
    Ok(())
}

/// Landau-Pollak bound:
/// `tr(rho A(Da)) + tr(rho B(Db)) <= 1 + ||A(Da) B(Db)||`.
pub fn landau_pollak_check(
    rho: &DensityOperator,
    a: &Pvm,
    delta_a: &[usize],
    b: &Pvm,
    delta_b: &[usize],
    tol: f64,
) -> Result<CheckReport> {
    validate_subset(a.space(), delta_a)?;
    validate_subset(b.space(), delta_b)?;
    let ea = a.aggregate(delta_a);
    let eb = b.aggregate(delta_b);
    let norm = operator_norm(&ea.matrix().mul(eb.matrix()))?;
    let sum = rho.expect(&ea) + rho.expect(&eb);
    Ok(CheckReport::bound(
        "landau_pollak",
        1.0 + norm,
        sum,
        tol,
        format!(
            "Da={};Db={}",
            subset_labels(a.space(), delta_a),
            subset_labels(b.space(), delta_b)
        ),
        CheckParams::default(),
    ))
}

/// Overall width that treats a confidence level of one (or beyond, up to
/// rounding) as trivially satisfied at width zero. The width functional
/// itself is defined for eps < 1; check right-hand sides use the closure.
fn overall_width_closure(
    p: &crate::observables::ProbabilityDistribution,
    eps: f64,
) -> Result<WidthResult> {
    if eps >= 1.0 - 1e-15 {
        return Ok(WidthResult {
            width: 0.0,
            epsilon: eps,
            achieving_outcome: p.space().label(0).to_string(),
            worst_case_probability: p.ball_mass(0, 0.0)?,
        });
    }
    overall_width(p, eps)
}

/// Reports produced by the width-transfer construction: the two width
/// inequalities plus the posterior ball sum that drives them.
#[derive(Clone, Debug)]
pub struct WidthTransferReports {
    pub a_side: CheckReport,
    pub b_side: CheckReport,
    pub ball_sum: CheckReport,
}

/// Width transfer on a precomputed witness: the error-bar widths of the
/// marginals dominate the overall widths of the witness distributions at
/// confidence `eps1 + eps2`, and the posterior ball sum reaches
/// `2 - eps1 - eps2`.
pub fn width_transfer_check_with(
    witness: &TransferWitness,
    a: &Pvm,
    b: &Pvm,
    eps1: f64,
    eps2: f64,
    tol: f64,
    params: &CheckParams,
) -> Result<WidthTransferReports> {
    let rec = &witness.record;
    let wit = format!(
        "x'={};y'={};p={:.3e}",
        a.space().label(rec.x),
        b.space().label(rec.y),
        rec.probability
    );
    let p = CheckParams {
        eps1: Some(eps1),
        eps2: Some(eps2),
        ..params.clone()
    };
    let pa = induced_distribution(&rec.witness, a.as_povm())?;
    let pb = induced_distribution(&rec.witness, b.as_povm())?;
    let wa = overall_width_closure(&pa, eps1 + eps2)?;
    let wb = overall_width_closure(&pb, eps1 + eps2)?;
    Ok(WidthTransferReports {
        a_side: CheckReport::bound(
            "width_transfer_a",
            witness.w1.width,
            wa.width,
            tol,
            wit.clone(),
            p.clone(),
        ),
        b_side: CheckReport::bound(
            "width_transfer_b",
            witness.w2.width,
            wb.width,
            tol,
            wit.clone(),
            p.clone(),
        ),
        ball_sum: CheckReport::bound(
            "width_transfer_sum",
            witness.ball_sum,
            2.0 - eps1 - eps2,
            tol,
            wit,
            p,
        ),
    })
}

/// Convenience wrapper building the witness in place.
pub fn width_transfer_check(
    a: &Pvm,
    b: &Pvm,
    m: &JointPovm,
    eps1: f64,
    eps2: f64,
    tol: f64,
) -> Result<(WidthTransferReports, TransferWitness)> {
    let witness = crate::witness::transfer_witness(a, b, m, eps1, eps2)?;
    let reports =
        width_transfer_check_with(&witness, a, b, eps1, eps2, tol, &CheckParams::default())?;
    Ok((reports, witness))
}

/// Ball-counting localizability bound: the ball-cardinality product at the
/// overall widths of any state dominates `(1-e1-e2)^2 / max tr(A_x B_y)`.
pub fn ball_counting_localizability_check(
    rho: &DensityOperator,
    a: &Pvm,
    b: &Pvm,
    eps1: f64,
    eps2: f64,
    tol: f64,
) -> Result<CheckReport> {
    let pa = induced_distribution(rho, a.as_povm())?;
    let pb = induced_distribution(rho, b.as_povm())?;
    let wa = overall_width_closure(&pa, eps1)?;
    let wb = overall_width_closure(&pb, eps2)?;
    let lhs = (a.space().max_ball_cardinality(wa.width)?
        * b.space().max_ball_cardinality(wb.width)?) as f64;
    let rhs = (1.0 - eps1 - eps2).powi(2) / max_pairwise_trace(a, b);
    Ok(CheckReport::bound(
        "ball_bound_localization",
        lhs,
        rhs,
        tol,
        format!("W1={:.6};W2={:.6}", wa.width, wb.width),
        CheckParams {
            eps1: Some(eps1),
            eps2: Some(eps2),
            ..Default::default()
        },
    ))
}

/// Ball-counting measurability bound: same product built from the error-bar
/// widths of the joint measurement's marginals.
pub fn ball_counting_measurability_check(
    m: &JointPovm,
    a: &Pvm,
    b: &Pvm,
    eps1: f64,
    eps2: f64,
    tol: f64,
) -> Result<CheckReport> {
    let (m1, m2) = m.marginals()?;
    let w1 = errorbar_width(&m1, a, eps1)?;
    let w2 = errorbar_width(&m2, b, eps2)?;
    ball_counting_measurability_check_with(&w1, &w2, a, b, eps1, eps2, tol)
}

/// As [`ball_counting_measurability_check`], reusing cached widths.
pub fn ball_counting_measurability_check_with(
    w1: &WidthResult,
    w2: &WidthResult,
    a: &Pvm,
    b: &Pvm,
    eps1: f64,
    eps2: f64,
    tol: f64,
) -> Result<CheckReport> {
    let lhs = (a.space().max_ball_cardinality(w1.width)?
        * b.space().max_ball_cardinality(w2.width)?) as f64;
    let rhs = (1.0 - eps1 - eps2).powi(2) / max_pairwise_trace(a, b);
    Ok(CheckReport::bound(
        "ball_bound_measurement",
        lhs,
        rhs,
        tol,
        format!("We1={:.6};We2={:.6}", w1.width, w2.width),
        CheckParams {
            eps1: Some(eps1),
            eps2: Some(eps2),
            ..Default::default()
        },
    ))
}

/// Werner-distance control of the error-bar width:
/// `(2/eps) D_W(E1, E) >= We_eps(E1, E)`.
pub fn werner_width_check(e1: &Povm, e: &Pvm, eps: f64, tol: f64) -> Result<CheckReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon {
            value: eps,
            expected: "(0, 1]",
        });
    }
    let dw = werner_distance(e1, e.as_povm(), WernerMethod::Exact)?;
    let wb = errorbar_width(e1, e, eps)?;
    Ok(CheckReport::bound(
        "werner_width_bound",
        2.0 / eps * dw.value,
        wb.width,
        tol,
        format!("DW={:.6e};x={}", dw.value, wb.achieving_outcome),
        CheckParams {
            eps1: Some(eps),
            ..Default::default()
        },
    ))
}

/// Werner-distance transfer on the shared width-transfer witness:
/// `D_W(M_i, .) >= (eps_i / 2) W_{eps1+eps2}(witness distribution)`.
pub fn werner_transfer_check_with(
    witness: &TransferWitness,
    a: &Pvm,
    b: &Pvm,
    dw1: f64,
    dw2: f64,
    eps1: f64,
    eps2: f64,
    tol: f64,
    params: &CheckParams,
) -> Result<(CheckReport, CheckReport)> {
    if !(eps1 > 0.0 && eps1 < 1.0 && eps2 > 0.0 && eps2 < 1.0 && eps1 + eps2 < 1.0) {
        return Err(Error::InvalidEpsilon {
            value: eps1 + eps2,
            expected: "eps1, eps2 in (0,1) with eps1 + eps2 < 1",
        });
    }
    let rec = &witness.record;
    let wit = format!(
        "x'={};y'={}",
        a.space().label(rec.x),
        b.space().label(rec.y)
    );
    let p = CheckParams {
        eps1: Some(eps1),
        eps2: Some(eps2),
        ..params.clone()
    };
    let pa = induced_distribution(&rec.witness, a.as_povm())?;
    let pb = induced_distribution(&rec.witness, b.as_povm())?;
    let wa = overall_width(&pa, eps1 + eps2)?;
    let wb = overall_width(&pb, eps1 + eps2)?;
    Ok((
        CheckReport::bound(
            "werner_transfer_a",
            dw1,
            eps1 / 2.0 * wa.width,
            tol,
            wit.clone(),
            p.clone(),
        ),
        CheckReport::bound("werner_transfer_b", dw2, eps2 / 2.0 * wb.width, tol, wit, p),
    ))
}

/// Convenience wrapper computing the witness and both Werner distances.
pub fn werner_transfer_check(
    a: &Pvm,
    b: &Pvm,
    m: &JointPovm,
    eps1: f64,
    eps2: f64,
    tol: f64,
) -> Result<(CheckReport, CheckReport)> {
    let witness = crate::witness::transfer_witness(a, b, m, eps1, eps2)?;
    let (m1, m2) = m.marginals()?;
    let dw1 = werner_distance(&m1, a.as_povm(), WernerMethod::Exact)?.value;
    let dw2 = werner_distance(&m2, b.as_povm(), WernerMethod::Exact)?.value;
    werner_transfer_check_with(
        &witness,
        a,
        b,
        dw1,
        dw2,
        eps1,
        eps2,
        tol,
        &CheckParams::default(),
    )
}

fn localization_error_of(weights: &[f64]) -> f64 {
    1.0 - weights.iter().copied().fold(0.0, f64::max)
}

/// Localization transfer: some posterior record satisfies
/// `D_inf(M1,A) + D_inf(M2,B) >= LE(witness^A) + LE(witness^B)`.
/// Records are scanned in descending LE-sum order and the first satisfying
/// one is reported, so the reported inequality is the tightest true one.
pub fn localization_transfer_check_with(
    records: &[PosteriorRecord],
    a: &Pvm,
    b: &Pvm,
    d1: f64,
    d2: f64,
    tol: f64,
    params: &CheckParams,
) -> CheckReport {
    let mut scored: Vec<(f64, &PosteriorRecord)> = records
        .iter()
        .map(|r| {
            (
                localization_error_of(&r.posterior_a) + localization_error_of(&r.posterior_b),
                r,
            )
        })
        .collect();
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let lhs = d1 + d2;
    let chosen = scored
        .iter()
        .find(|(le, _)| lhs - le >= -tol)
        .or_else(|| scored.last())
        .expect("at least one posterior record");
    let (le_sum, rec) = chosen;
    CheckReport::bound(
        "localization_transfer",
        lhs,
        *le_sum,
        tol,
        format!(
            "x'={};y'={}",
            a.space().label(rec.x),
            b.space().label(rec.y)
        ),
        params.clone(),
    )
}

/// l-infinity sum bound: `D_inf(M1,A) + D_inf(M2,B) >= 1 - max ||A_x B_y||`.
pub fn linf_sum_check_with(
    a: &Pvm,
    b: &Pvm,
    d1: f64,
    d2: f64,
    tol: f64,
    params: &CheckParams,
) -> Result<CheckReport> {
    let rhs = 1.0 - max_pairwise_norm(a, b)?;
    Ok(CheckReport::bound(
        "linf_sum_bound",
        d1 + d2,
        rhs,
        tol,
        format!("D1={d1:.6e};D2={d2:.6e}"),
        params.clone(),
    ))
}

/// Commutator bound: `2 D1 D2 + D1 + D2 + 4 sqrt(D1 D2) >= max ||[A_x,B_y]||`.
pub fn commutator_bound_check_with(
    a: &Pvm,
    b: &Pvm,
    d1: f64,
    d2: f64,
    tol: f64,
    params: &CheckParams,
) -> Result<CheckReport> {
    let lhs = 2.0 * d1 * d2 + d1 + d2 + 4.0 * (d1 * d2).sqrt();
    let rhs = max_commutator_norm(a, b)?;
    Ok(CheckReport::bound(
        "commutator_bound",
        lhs,
        rhs,
        tol,
        format!("D1={d1:.6e};D2={d2:.6e}"),
        params.clone(),
    ))
}

/// All three l-infinity-based checks for one joint measurement.
pub fn localization_bounds_check(
    a: &Pvm,
    b: &Pvm,
    m: &JointPovm,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let (m1, m2) = m.marginals()?;
    let d1 = linf_distance(&m1, a.as_povm())?.value;
    let d2 = linf_distance(&m2, b.as_povm())?.value;
    let resource = crate::witness::EntangledResource::new(m.dim());
    let records = posterior_records(m, a, b, &resource)?;
    let params = CheckParams::default();
    Ok(vec![
        localization_transfer_check_with(&records, a, b, d1, d2, tol, &params),
        linf_sum_check_with(a, b, d1, d2, tol, &params)?,
        commutator_bound_check_with(a, b, d1, d2, tol, &params)?,
    ])
}

/// Which of the two l-infinity bounds is tighter at a parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TighterBound {
    LinfSum,
    Commutator,
    Tie,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundComparison {
    pub parameter: f64,
    pub linf_sum: CheckReport,
    pub commutator: CheckReport,
    pub tighter: TighterBound,
}

/// Evaluate both l-infinity bounds over a parametric joint-measurement
/// family and record which is tighter (smaller slack) at each grid point.
pub fn compare_linf_bounds(
    a: &Pvm,
    b: &Pvm,
    family: impl Fn(f64) -> Result<JointPovm>,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<BoundComparison>> {
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        let m = family(t)?;
        let (m1, m2) = m.marginals()?;
        let d1 = linf_distance(&m1, a.as_povm())?.value;
        let d2 = linf_distance(&m2, b.as_povm())?.value;
        let params = CheckParams::default();
        let linf_sum = linf_sum_check_with(a, b, d1, d2, tol, &params)?;
        let commutator = commutator_bound_check_with(a, b, d1, d2, tol, &params)?;
        let tighter = if (linf_sum.margin - commutator.margin).abs() <= tol {
            TighterBound::Tie
        } else if linf_sum.margin < commutator.margin {
            TighterBound::LinfSum
        } else {
            TighterBound::Commutator
        };
        rows.push(BoundComparison {
            parameter: t,
            linf_sum,
            commutator,
            tighter,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Seeded verification suite
// ---------------------------------------------------------------------------

/// Configuration of the random-instance verification suite.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub instances_per_dim: usize,
    pub eps_grid: Vec<(f64, f64)>,
    pub prop_eps: Vec<f64>,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let levels = [0.0, 0.1, 0.25];
        let eps_grid = levels
            .iter()
            .flat_map(|&e1| levels.iter().map(move |&e2| (e1, e2)))
            .collect();
        Self {
            seed: 42,
            dims: vec![2, 3, 4, 5],
            instances_per_dim: 100,
            eps_grid,
            prop_eps: vec![0.1, 0.25, 0.5],
            tol: tol::CHECK_DEFAULT,
        }
    }
}

/// One random verification instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub dim: usize,
    pub index: usize,
    pub seed: u64,
    pub a: Pvm,
    pub b: Pvm,
    pub m: JointPovm,
    pub rho: DensityOperator,
}

/// Random metric by shortest-path completion of uniform edge weights.
fn random_metric(n: usize, rng: &mut impl Rng) -> FiniteMetricSpace {
    let mut m = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = 0.5 + rng.gen::<f64>();
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] + m[k][j] < m[i][j] {
                    m[i][j] = m[i][k] + m[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::explicit((0..n).map(|i| i.to_string()).collect(), m)
        .expect("shortest-path completion yields a metric")
}

fn random_space(n: usize, rng: &mut impl Rng) -> Arc<FiniteMetricSpace> {
    Arc::new(match rng.gen_range(0..3u8) {
        0 => FiniteMetricSpace::discrete(n),
        1 => FiniteMetricSpace::cyclic(n, 0.5 + rng.gen::<f64>()),
        _ => random_metric(n, rng),
    })
}

/// Deterministically generate the instance `(dim, index)` of a suite seed.
pub fn generate_instance(master_seed: u64, dim: usize, index: usize) -> Result<Instance> {
    let seed = derive_seed(master_seed, &[dim as u64, index as u64]);
    let mut rng = rng_from(master_seed, &[dim as u64, index as u64]);
    let max_outcomes = dim.min(4);
    let n_a = rng.gen_range(2..=max_outcomes);
    let n_b = rng.gen_range(2..=max_outcomes);
    let space_a = random_space(n_a, &mut rng);
    let space_b = random_space(n_b, &mut rng);
    let a = random_pvm(dim, n_a, space_a.clone(), &mut rng)?;
    let b = random_pvm(dim, n_b, space_b.clone(), &mut rng)?;
    let m = random_joint_povm(dim, space_a, space_b, &mut rng)?;
    let rho = random_state(dim, &mut rng)?;
    Ok(Instance {
        dim,
        index,
        seed,
        a,
        b,
        m,
        rho,
    })
}

/// Run every applicable check on one instance. Report order is fixed.
pub fn run_instance(
    inst: &Instance,
    eps_grid: &[(f64, f64)],
    prop_eps: &[f64],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let Instance { a, b, m, rho, .. } = inst;
    let params = CheckParams {
        eps1: None,
        eps2: None,
        dim: Some(inst.dim),
        seed: Some(inst.seed),
    };
    let mut reports = Vec::new();

    let mut lp = landau_pollak_check(rho, a, &[0], b, &[0], tol)?;
    lp.params = params.clone();
    reports.push(lp);

    // Shared per-instance quantities.
    let (m1, m2) = m.marginals()?;
    let resource = crate::witness::EntangledResource::new(m.dim());
    let records = posterior_records(m, a, b, &resource)?;
    let dw1 = werner_distance(&m1, a.as_povm(), WernerMethod::Exact)?.value;
    let dw2 = werner_distance(&m2, b.as_povm(), WernerMethod::Exact)?.value;
    let d1 = linf_distance(&m1, a.as_povm())?.value;
    let d2 = linf_distance(&m2, b.as_povm())?.value;

    // Error-bar widths per distinct confidence level.
    let mut w1_cache: Vec<(f64, WidthResult)> = Vec::new();
    let mut w2_cache: Vec<(f64, WidthResult)> = Vec::new();
    let width_at = |cache: &mut Vec<(f64, WidthResult)>,
                        first: bool,
                        eps: f64|
     -> Result<WidthResult> {
        if let Some((_, w)) = cache.iter().find(|(e, _)| *e == eps) {
            return Ok(w.clone());
        }
        let w = if first {
            errorbar_width(&m1, a, eps)?
        } else {
            errorbar_width(&m2, b, eps)?
        };
        cache.push((eps, w.clone()));
        Ok(w)
    };

    for &(e1, e2) in eps_grid {
        let w1 = width_at(&mut w1_cache, true, e1)?;
        let w2 = width_at(&mut w2_cache, false, e2)?;
        let witness = select_transfer_witness(a, b, &records, w1.clone(), w2.clone())?;
        let wt = width_transfer_check_with(&witness, a, b, e1, e2, tol, &params)?;
        reports.push(wt.a_side);
        reports.push(wt.b_side);
        reports.push(wt.ball_sum);

        let mut loc = ball_counting_localizability_check(rho, a, b, e1, e2, tol)?;
        loc.params = CheckParams {
            eps1: Some(e1),
            eps2: Some(e2),
            ..params.clone()
        };
        reports.push(loc);
        let mut meas =
            ball_counting_measurability_check_with(&w1, &w2, a, b, e1, e2, tol)?;
        meas.params = CheckParams {
            eps1: Some(e1),
            eps2: Some(e2),
            ..params.clone()
        };
        reports.push(meas);

        if e1 > 0.0 && e2 > 0.0 && e1 + e2 < 1.0 {
            let (wa, wb) =
                werner_transfer_check_with(&witness, a, b, dw1, dw2, e1, e2, tol, &params)?;
            reports.push(wa);
            reports.push(wb);
        }
    }

    for &eps in prop_eps {
        let mut r = werner_width_check(&m1, a, eps, tol)?;
        r.params = CheckParams {
            eps1: Some(eps),
            ..params.clone()
        };
        reports.push(r);
    }

    reports.push(localization_transfer_check_with(
        &records, a, b, d1, d2, tol, &params,
    ));
    reports.push(linf_sum_check_with(a, b, d1, d2, tol, &params)?);
    reports.push(commutator_bound_check_with(a, b, d1, d2, tol, &params)?);

    Ok(reports)
}

/// Run the whole suite; instances evaluate independently (in parallel with
/// the `parallel` feature) and reports keep a fixed order. A failed instance
/// contributes a single ERROR row instead of aborting the suite.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for &dim in &cfg.dims {
        for index in 0..cfg.instances_per_dim {
            jobs.push((dim, index));
        }
    }
    let nested = par_map(&jobs, |&(dim, index)| {
        let run = || -> Result<Vec<CheckReport>> {
            let inst = generate_instance(cfg.seed, dim, index)?;
            run_instance(&inst, &cfg.eps_grid, &cfg.prop_eps, cfg.tol)
        };
        run().unwrap_or_else(|err| {
            vec![CheckReport::error_row(
                "instance_error",
                &err.to_string(),
                CheckParams {
                    dim: Some(dim),
                    seed: Some(derive_seed(cfg.seed, &[dim as u64, index as u64])),
                    ..Default::default()
                },
            )]
        })
    });
    nested.into_iter().flatten().collect()
}
