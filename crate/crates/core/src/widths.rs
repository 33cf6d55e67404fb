//! Width functionals: overall width (localizability), error-bar width
//! (measurability), localization error and binary entropy.
//!
//! Both widths are infima of conditions monotone in the ball width, and on a
//! finite space the condition can only change at widths `2 d(x,y)`, so both
//! are computed exactly by scanning the candidate grid. The infimum over
//! `w > 0` reports 0 whenever the width-0 ball already satisfies the
//! condition, since then every positive width does.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, CMatrix, HermitianOperator};
use crate::observables::{Povm, ProbabilityDistribution, Pvm};
use crate::tol;

/// A width value together with the outcome that realizes the extremum.
///
/// For the overall width, `achieving_outcome` is a ball center carrying the
/// required mass and `worst_case_probability` is that mass. For the
/// error-bar width it is the reference outcome forcing the largest width,
/// and the probability is the worst-case ball mass over states localized
/// there.
#[derive(Clone, Debug, Serialize)]
pub struct WidthResult {
    pub width: f64,
    pub epsilon: f64,
    pub achieving_outcome: String,
    pub worst_case_probability: f64,
}

/// Overall width `W_eps(p)`: the smallest width `w` such that some ball of
/// width `w` carries mass at least `1 - eps`.
pub fn overall_width(p: &ProbabilityDistribution, eps: f64) -> Result<WidthResult> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon {
            value: eps,
            expected: "[0, 1)",
        });
    }
    let space = p.space();
    let need = 1.0 - eps - tol::CONFIDENCE_SLACK;
    let widths = space.candidate_widths();
    for &w in &widths {
        for x in 0..space.len() {
            let mass = p.ball_mass(x, w)?;
            if mass >= need {
                return Ok(WidthResult {
                    width: w,
                    epsilon: eps,
                    achieving_outcome: space.label(x).to_string(),
                    worst_case_probability: mass,
                });
            }
        }
    }
    // The full-cover ball carries the whole mass; reaching this point means
    // the total drifted below `need` by rounding, and the infimum is the
    // largest grid width.
    let w = *widths.last().expect("candidate grid is nonempty");
    Ok(WidthResult {
        width: w,
        epsilon: eps,
        achieving_outcome: space.label(0).to_string(),
        worst_case_probability: p.ball_mass(0, w)?,
    })
}

/// Orthonormal basis of the range of a projection, read off its eigensystem
/// (eigenvalue above 1/2 marks a range direction). Columns of the result.
fn range_basis(e: &HermitianOperator) -> Result<CMatrix> {
    let spec = hermitian_eigensystem(e)?;
    let cols: Vec<usize> = (0..e.dim())
        .filter(|&k| spec.eigenvalues[k] > 0.5)
        .collect();
    let mut u = CMatrix::zeros(e.dim(), cols.len());
    for (j, &k) in cols.iter().enumerate() {
        for i in 0..e.dim() {
            u[(i, j)] = spec.eigenvectors[(i, k)];
        }
    }
    Ok(u)
}

/// Worst-case ball mass at outcome `x` and width `w`: the minimum of
/// `tr(rho M1(ball(x,w)))` over states supported in `range(E_x)`, i.e. the
/// smallest eigenvalue of the compression of `M1(ball)` to that range.
fn worst_case_ball_mass(m1: &Povm, basis: &CMatrix, x: usize, w: f64) -> Result<f64> {
    let ball = m1.space().ball(x, w)?;
    let agg = m1.aggregate(&ball);
    let compressed = basis.adjoint().mul(agg.matrix()).mul(basis);
    let spec = hermitian_eigensystem(&HermitianOperator::new(compressed)?)?;
    Ok(spec.min_eigenvalue())
}

/// Error-bar width of `m1` relative to the reference PVM `e`: the smallest
/// width `w` such that every state perfectly localized at any outcome `x` of
/// `e` throws at least `1 - eps` of its `m1` mass into the ball of width `w`
/// around `x`. Outcomes with a vanishing effect are skipped (no state
/// localizes there).
pub fn errorbar_width(m1: &Povm, e: &Pvm, eps: f64) -> Result<WidthResult> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon {
            value: eps,
            expected: "[0, 1]",
        });
    }
    if !m1.space().compatible(e.space()) {
        return Err(Error::IncompatibleSpaces);
    }
    if m1.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            context: "POVM and reference PVM dimensions differ",
            left: m1.dim(),
            right: e.dim(),
        });
    }

    let space = m1.space();
    let widths = space.candidate_widths();
    let need = 1.0 - eps - tol::CONFIDENCE_SLACK;

    let mut result = WidthResult {
        width: 0.0,
        epsilon: eps,
        achieving_outcome: "-".into(),
        worst_case_probability: 1.0,
    };
    let mut any = false;
    for x in 0..e.len() {
        if e.element(x).trace_re() <= tol::ZERO_PROB {
            continue;
        }
        let basis = range_basis(e.element(x))?;
        // Smallest satisfying width for this outcome; the full-cover width
        // always satisfies the condition up to rounding and is the fallback.
        let mut picked = None;
        for &w in &widths {
            let q = worst_case_ball_mass(m1, &basis, x, w)?;
            if q >= need {
                picked = Some((w, q));
                break;
            }
        }
        let (w, q) = match picked {
            Some(p) => p,
            None => {
                let w = *widths.last().expect("candidate grid is nonempty");
                (w, worst_case_ball_mass(m1, &basis, x, w)?)
            }
        };
        if !any || w > result.width {
            result = WidthResult {
                width: w,
                epsilon: eps,
                achieving_outcome: space.label(x).to_string(),
                worst_case_probability: q,
            };
            any = true;
        }
    }
    Ok(result)
}

/// Localization error `LE(p) = 1 - max_x p(x)`.
pub fn localization_error(p: &ProbabilityDistribution) -> f64 {
    1.0 - p.weights().iter().copied().fold(0.0, f64::max)
}

/// Binary entropy `h(w) = -w log2 w - (1-w) log2(1-w)`, with `h(0)=h(1)=0`.
pub fn binary_entropy(w: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::DomainViolation {
            value: w,
            domain: "[0, 1]",
        });
    }
    let term = |t: f64| if t == 0.0 { 0.0 } else { -t * t.log2() };
    Ok(term(w) + term(1.0 - w))
}
