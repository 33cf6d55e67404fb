//! Distances between observables on a common outcome space: the l-infinity
//! distance `max_x ||F1_x - F2_x||` and the Werner (Monge-type) distance
//! `sup_{f in Lip} ||sum_x (F1_x - F2_x) f(x)||`.
//!
//! Constant functions drop out because both arguments are POVMs (the effect
//! sums cancel), so the Lipschitz ball is gauge-fixed at `f(x_0) = 0` and
//! becomes a bounded polytope. The exact route maximizes the convex norm
//! objective over that polytope's vertices; the alternating route ascends
//! between the top eigenvector of the smeared difference and the exact
//! Kantorovich optimizer for the induced signed measure.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, HermitianOperator};
use crate::metric::FiniteMetricSpace;
use crate::observables::{random_pure_vector, Povm};
use crate::tol;
use crate::transport::{
    enumerate_min_cost, solve_min_cost, TransportProblem, ENUMERATION_LIMIT,
};

/// Internal seed for the alternating ascent's random starts; fixed so the
/// function is deterministic.
const ASCENT_SEED: u64 = 0x57a7_5eed;

/// Largest outcome count accepted by the vertex-enumeration route.
pub const VERTEX_ENUMERATION_MAX: usize = 6;

/// Real function on the outcomes, gauge-fixed to vanish at the first one.
#[derive(Clone, Debug)]
pub struct LipschitzFunction {
    values: Vec<f64>,
}

impl LipschitzFunction {
    pub fn new(mut values: Vec<f64>) -> Self {
        let base = values.first().copied().unwrap_or(0.0);
        for v in values.iter_mut() {
            *v -= base;
        }
        Self { values }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks `|f(x) - f(y)| <= d(x,y) + slack` on all pairs.
    pub fn is_valid(&self, space: &FiniteMetricSpace) -> bool {
        let n = space.len();
        if self.values.len() != n {
            return false;
        }
        for i in 0..n {
            for j in 0..n {
                if (self.values[i] - self.values[j]).abs() > space.dist(i, j) + tol::BALL_SLACK {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceMethod {
    Exact,
    Alternating { starts: usize },
}

/// The maximizing data behind a distance value.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// l-infinity: the outcome attaining the max and the extremal vector.
    Outcome { label: String, psi: Vec<C64> },
    /// Werner: the optimal Lipschitz function and the extremal vector.
    Function {
        f: LipschitzFunction,
        psi: Vec<C64>,
    },
}

#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub value: f64,
    pub method: DistanceMethod,
    pub certificate: Certificate,
    /// Known upper bound on the optimality gap: zero for exact routes,
    /// `None` when the alternating route runs standalone (a lower bound
    /// with no certified gap).
    pub gap_bound: Option<f64>,
}

fn check_common_space(f1: &Povm, f2: &Povm) -> Result<()> {
    if !f1.space().compatible(f2.space()) {
        return Err(Error::IncompatibleSpaces);
    }
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch {
            context: "POVM dimensions differ",
            left: f1.dim(),
            right: f2.dim(),
        });
    }
    Ok(())
}

/// Extremal eigenpair by magnitude: `(signed eigenvalue, eigenvector)`.
fn extremal_eigenpair(h: &HermitianOperator) -> Result<(f64, Vec<C64>)> {
    let spec = hermitian_eigensystem(h)?;
    let lo = spec.min_eigenvalue();
    let hi = spec.max_eigenvalue();
    if -lo > hi {
        Ok((lo, spec.column(0)))
    } else {
        Ok((hi, spec.column(h.dim() - 1)))
    }
}

/// l-infinity distance `max_x ||F1_x - F2_x||`.
pub fn linf_distance(f1: &Povm, f2: &Povm) -> Result<DistanceResult> {
    check_common_space(f1, f2)?;
    let mut best_value = -1.0;
    let mut best: Option<(usize, Vec<C64>)> = None;
    for x in 0..f1.len() {
        let delta = f1.element(x).sub(f2.element(x));
        let (lam, psi) = extremal_eigenpair(&delta)?;
        if lam.abs() > best_value {
            best_value = lam.abs();
            best = Some((x, psi));
        }
    }
    let (x, psi) = best.expect("POVMs have at least one outcome");
    Ok(DistanceResult {
        value: best_value,
        method: DistanceMethod::Exact,
        certificate: Certificate::Outcome {
            label: f1.space().label(x).to_string(),
            psi,
        },
        gap_bound: Some(0.0),
    })
}

/// Exact optimum of `sum_x f(x) mu(x)` over the Lipschitz ball, for a
/// balanced signed measure `mu`, by Kantorovich-Rubinstein duality: the
/// optimal transport cost between the positive and negative parts, with the
/// optimizer recovered from the transport duals.
pub fn kantorovich_value(
    mu: &[f64],
    space: &FiniteMetricSpace,
) -> Result<(f64, LipschitzFunction)> {
    if mu.len() != space.len() {
        return Err(Error::DimensionMismatch {
            context: "measure must cover the outcome space",
            left: mu.len(),
            right: space.len(),
        });
    }
    let total: f64 = mu.iter().sum();
    if total.abs() > tol::MEASURE_BALANCE {
        return Err(Error::UnbalancedMeasure { sum: total });
    }
    let sources: Vec<(usize, f64)> = mu
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1e-14)
        .map(|(i, &v)| (i, v))
        .collect();
    let sinks: Vec<(usize, f64)> = mu
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -1e-14)
        .map(|(i, &v)| (i, -v))
        .collect();
    if sources.is_empty() || sinks.is_empty() {
        return Ok((0.0, LipschitzFunction::zero(space.len())));
    }
    let problem = TransportProblem {
        supply: sources.iter().map(|&(_, v)| v).collect(),
        demand: sinks.iter().map(|&(_, v)| v).collect(),
        cost: sources
            .iter()
            .map(|&(i, _)| sinks.iter().map(|&(j, _)| space.dist(i, j)).collect())
            .collect(),
    };
    let solution = solve_min_cost(&problem);
    #[cfg(debug_assertions)]
    for (i, &u) in solution.potential_u.iter().enumerate() {
        for (j, &v) in solution.potential_v.iter().enumerate() {
            debug_assert!(
                u + v <= problem.cost[i][j] + 1e-9,
                "transport duals infeasible at ({i},{j})"
            );
        }
    }
    let value = if sources.len() <= ENUMERATION_LIMIT && sinks.len() <= ENUMERATION_LIMIT {
        let enumerated = enumerate_min_cost(&problem);
        debug_assert!(
            (enumerated - solution.value).abs() <= 1e-9,
            "transport routes disagree: {enumerated} vs {}",
            solution.value
        );
        enumerated
    } else {
        solution.value
    };

    // Optimal Lipschitz function as the metric envelope of the sink duals:
    // f(z) = min_j (d(z, y_j) - v_j); 1-Lipschitz, tight on support.
    let values: Vec<f64> = (0..space.len())
        .map(|z| {
            sinks
                .iter()
                .zip(&solution.potential_v)
                .map(|(&(j, _), &v)| space.dist(z, j) - v)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok((value, LipschitzFunction::new(values)))
}

/// Smeared difference `D(f) = sum_x (F1_x - F2_x) f(x)`.
fn smeared_difference(
    deltas: &[HermitianOperator],
    f: &LipschitzFunction,
) -> HermitianOperator {
    let dim = deltas[0].dim();
    let mut out = HermitianOperator::zero(dim);
    for (delta, &v) in deltas.iter().zip(f.values()) {
        if v != 0.0 {
            out = out.add(&delta.scale(v));
        }
    }
    out
}

/// Vertices of the gauge-fixed Lipschitz polytope, by enumerating maximal
/// active constraint sets of full rank. Deduplicated on a 1e-9 grid.
fn lipschitz_vertices(space: &FiniteMetricSpace) -> Vec<LipschitzFunction> {
    let n = space.len();
    if n == 1 {
        return vec![LipschitzFunction::zero(1)];
    }
    let dim = n - 1;
    // Hyperplanes f_i - f_j = s*d(i,j) over the free coordinates f_1..f_{n-1}.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for sign in [1.0, -1.0] {
                let mut row = vec![0.0; dim];
                if i > 0 {
                    row[i - 1] = 1.0;
                }
                row[j - 1] = -1.0;
                planes.push((row, sign * space.dist(i, j)));
            }
        }
    }

    let mut vertices: Vec<LipschitzFunction> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut subset = vec![0usize; dim];
    enumerate_subsets(planes.len(), dim, &mut subset, 0, 0, &mut |chosen| {
        let mut a = vec![vec![0.0; dim]; dim];
        let mut b = vec![0.0; dim];
        for (r, &p) in chosen.iter().enumerate() {
            a[r].copy_from_slice(&planes[p].0);
            b[r] = planes[p].1;
        }
        if let Some(g) = solve_dense(&mut a, &mut b) {
            let mut f = vec![0.0; n];
            f[1..].copy_from_slice(&g);
            // Feasibility on all pairs.
            for i in 0..n {
                for j in 0..n {
                    if (f[i] - f[j]).abs() > space.dist(i, j) + 1e-9 {
                        return;
                    }
                }
            }
            let key: Vec<i64> = f
                .iter()
                .map(|v| (v / tol::VERTEX_DEDUP).round() as i64)
                .collect();
            if seen.insert(key) {
                vertices.push(LipschitzFunction::new(f));
            }
        }
    });
    // Always include the center, so the candidate set is never empty.
    if vertices.is_empty() {
        vertices.push(LipschitzFunction::zero(n));
    }
    vertices
}

fn enumerate_subsets(
    pool: usize,
    k: usize,
    scratch: &mut [usize],
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(scratch);
        return;
    }
    for p in start..pool {
        scratch[depth] = p;
        enumerate_subsets(pool, k, scratch, depth + 1, p + 1, visit);
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap()
        })?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WernerMethod {
    /// Vertex enumeration; exact, limited to small outcome sets.
    Exact,
    /// Seeded multi-start alternating ascent; a certified lower bound.
    Alternating,
}

/// Werner distance `D_W(F1, F2) = sup_{f in Lip} ||F1(f) - F2(f)||`.
pub fn werner_distance(f1: &Povm, f2: &Povm, method: WernerMethod) -> Result<DistanceResult> {
    check_common_space(f1, f2)?;
    let deltas: Vec<HermitianOperator> = (0..f1.len())
        .map(|x| f1.element(x).sub(f2.element(x)))
        .collect();
    match method {
        WernerMethod::Exact => {
            let n = f1.space().len();
            if n > VERTEX_ENUMERATION_MAX {
                return Err(Error::VertexEnumerationTooLarge {
                    size: n,
                    max: VERTEX_ENUMERATION_MAX,
                });
            }
            let mut best_value = -1.0;
            let mut best: Option<(LipschitzFunction, Vec<C64>)> = None;
            for f in lipschitz_vertices(f1.space()) {
                let d = smeared_difference(&deltas, &f);
                let (lam, psi) = extremal_eigenpair(&d)?;
                if lam.abs() > best_value {
                    best_value = lam.abs();
                    best = Some((f, psi));
                }
            }
            let (f, psi) = best.expect("vertex set is nonempty");
            Ok(DistanceResult {
                value: best_value.max(0.0),
                method: DistanceMethod::Exact,
                certificate: Certificate::Function { f, psi },
                gap_bound: Some(0.0),
            })
        }
        WernerMethod::Alternating => {
            let dim = f1.dim();
            let n = f1.space().len();
            let mut best_value = 0.0f64;
            let mut best: Option<(LipschitzFunction, Vec<C64>)> = None;
            for start in 0..tol::ALTERNATING_STARTS {
                let mut rng = crate::seed::rng_from(ASCENT_SEED, &[start as u64]);
                let mut psi = random_pure_vector(dim, &mut rng);
                let mut value = 0.0f64;
                let mut f_cur = LipschitzFunction::zero(n);
                for _iter in 0..tol::ALTERNATING_MAX_ITERS {
                    // Signed measure induced by psi, recentered to kill the
                    // POVM-sum rounding residue.
                    let mut mu: Vec<f64> =
                        deltas.iter().map(|d| d.matrix().expectation(&psi)).collect();
                    let shift = mu.iter().sum::<f64>() / n as f64;
                    for v in mu.iter_mut() {
                        *v -= shift;
                    }
                    let (_, f) = kantorovich_value(&mu, f1.space())?;
                    let d = smeared_difference(&deltas, &f);
                    let (lam, top) = extremal_eigenpair(&d)?;
                    let new_value = lam.abs();
                    psi = top;
                    f_cur = f;
                    if new_value <= value + tol::ALTERNATING_CONVERGENCE {
                        value = value.max(new_value);
                        break;
                    }
                    value = new_value;
                }
                if value > best_value || best.is_none() {
                    best_value = value;
                    best = Some((f_cur, psi));
                }
            }
            let (f, psi) = best.expect("at least one start runs");
            Ok(DistanceResult {
                value: best_value,
                method: DistanceMethod::Alternating {
                    starts: tol::ALTERNATING_STARTS,
                },
                certificate: Certificate::Function { f, psi },
                gap_bound: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::observables::{
        family_qubit_covariant, qubit_x_pvm, qubit_z_pvm, random_joint_povm,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn linf_examples() {
        let z = qubit_z_pvm();
        let x = qubit_x_pvm();
        assert_abs_diff_eq!(
            linf_distance(z.as_povm(), z.as_povm()).unwrap().value,
            0.0,
            epsilon = 1e-12
        );
        // Trivial marginal vs the conjugate PVM: eigenvalues of
        // (1/2)1 - |xbar><xbar| are +-1/2.
        let m = family_qubit_covariant(1.0, 0.0).unwrap();
        let (_, m2) = m.marginals().unwrap();
        let r = linf_distance(&m2, x.as_povm()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-10);
        // Z vs X: ||P - Q|| = sqrt(1 - 1/2).
        let r = linf_distance(z.as_povm(), x.as_povm()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 2f64.sqrt(), epsilon = 1e-10);
        // Certificate reproduces the value.
        if let Certificate::Outcome { label, psi } = &r.certificate {
            let xi: usize = label.parse().unwrap();
            let delta = z.element(xi).sub(x.element(xi));
            assert_abs_diff_eq!(
                delta.matrix().expectation(psi).abs(),
                r.value,
                epsilon = 1e-9
            );
        } else {
            panic!("expected outcome certificate");
        }
    }

    #[test]
    fn kantorovich_examples() {
        let two = FiniteMetricSpace::discrete(2);
        let (v, f) = kantorovich_value(&[0.0, 0.0], &two).unwrap();
        assert_eq!(v, 0.0);
        assert!(f.is_valid(&two));

        let a = 0.37;
        let (v, f) = kantorovich_value(&[a, -a], &two).unwrap();
        assert_abs_diff_eq!(v, a, epsilon = 1e-12);
        assert!(f.is_valid(&two));
        // Optimizer reproduces the value.
        let attained: f64 = f.values().iter().zip([a, -a]).map(|(x, m)| x * m).sum();
        assert_abs_diff_eq!(attained, v, epsilon = 1e-10);

        let cyc = FiniteMetricSpace::cyclic(4, 2.0 * PI / 4.0);
        let (v, f) = kantorovich_value(&[1.0, 0.0, -1.0, 0.0], &cyc).unwrap();
        assert_abs_diff_eq!(v, PI, epsilon = 1e-12);
        assert!(f.is_valid(&cyc));
        let attained: f64 = f
            .values()
            .iter()
            .zip([1.0, 0.0, -1.0, 0.0])
            .map(|(x, m)| x * m)
            .sum();
        assert_abs_diff_eq!(attained, v, epsilon = 1e-10);

        assert!(matches!(
            kantorovich_value(&[0.5, 0.0], &two),
            Err(Error::UnbalancedMeasure { .. })
        ));
    }

    #[test]
    fn kantorovich_optimizer_valid_on_random_measures() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(51, &[0]);
        for n in [3usize, 5, 9] {
            let space = FiniteMetricSpace::cyclic(n, 0.9);
            for _ in 0..30 {
                let mut mu: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
                let shift = mu.iter().sum::<f64>() / n as f64;
                for v in mu.iter_mut() {
                    *v -= shift;
                }
                let (value, f) = kantorovich_value(&mu, &space).unwrap();
                assert!(f.is_valid(&space), "n={n}");
                let attained: f64 = f.values().iter().zip(&mu).map(|(x, m)| x * m).sum();
                assert_abs_diff_eq!(attained, value, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn werner_examples() {
        let z = qubit_z_pvm();
        let x = qubit_x_pvm();
        let r = werner_distance(z.as_povm(), z.as_povm(), WernerMethod::Exact).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);

        let m = family_qubit_covariant(1.0, 0.0).unwrap();
        let (_, m2) = m.marginals().unwrap();
        let r = werner_distance(&m2, x.as_povm(), WernerMethod::Exact).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-10);

        let r = werner_distance(z.as_povm(), x.as_povm(), WernerMethod::Exact).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 2f64.sqrt(), epsilon = 1e-10);
        if let Certificate::Function { f, psi } = &r.certificate {
            assert!(f.is_valid(z.space()));
            let deltas: Vec<HermitianOperator> = (0..2)
                .map(|i| z.element(i).sub(x.element(i)))
                .collect();
            let d = smeared_difference(&deltas, f);
            assert_abs_diff_eq!(d.matrix().expectation(psi).abs(), r.value, epsilon = 1e-9);
        } else {
            panic!("expected function certificate");
        }
    }

    #[test]
    fn werner_rejects_large_exact_instances() {
        let space = Arc::new(FiniteMetricSpace::discrete(7));
        let mut elements = vec![HermitianOperator::zero(2); 7];
        elements[0] = HermitianOperator::identity(2);
        let povm = Povm::new(space, elements).unwrap();
        assert!(matches!(
            werner_distance(&povm, &povm, WernerMethod::Exact),
            Err(Error::VertexEnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn alternating_matches_exact_on_two_point_instances() {
        let z = qubit_z_pvm();
        let x = qubit_x_pvm();
        let exact = werner_distance(z.as_povm(), x.as_povm(), WernerMethod::Exact).unwrap();
        let alt =
            werner_distance(z.as_povm(), x.as_povm(), WernerMethod::Alternating).unwrap();
        assert!(alt.value <= exact.value + 1e-9);
        assert_abs_diff_eq!(alt.value, exact.value, epsilon = 1e-8);
    }

    #[test]
    fn werner_distance_is_a_metric_on_random_instances() {
        let mut rng = crate::seed::rng_from(52, &[0]);
        let sa = Arc::new(FiniteMetricSpace::cyclic(3, 1.0));
        let sb = Arc::new(FiniteMetricSpace::discrete(2));
        let make = |rng: &mut rand_chacha::ChaCha8Rng| {
            let m = random_joint_povm(3, sa.clone(), sb.clone(), rng).unwrap();
            m.marginals().unwrap().0
        };
        for _ in 0..10 {
            let f1 = make(&mut rng);
            let f2 = make(&mut rng);
            let f3 = make(&mut rng);
            let d12 = werner_distance(&f1, &f2, WernerMethod::Exact).unwrap().value;
            let d21 = werner_distance(&f2, &f1, WernerMethod::Exact).unwrap().value;
            let d13 = werner_distance(&f1, &f3, WernerMethod::Exact).unwrap().value;
            let d23 = werner_distance(&f2, &f3, WernerMethod::Exact).unwrap().value;
            assert_abs_diff_eq!(d12, d21, epsilon = 1e-8);
            assert!(d13 <= d12 + d23 + 1e-8);
            // Same for the l-infinity distance.
            let l12 = linf_distance(&f1, &f2).unwrap().value;
            let l21 = linf_distance(&f2, &f1).unwrap().value;
            let l13 = linf_distance(&f1, &f3).unwrap().value;
            let l23 = linf_distance(&f2, &f3).unwrap().value;
            assert_abs_diff_eq!(l12, l21, epsilon = 1e-10);
            assert!(l13 <= l12 + l23 + 1e-8);
        }
    }

    #[test]
    fn two_point_werner_equals_linf() {
        let mut rng = crate::seed::rng_from(53, &[0]);
        let s2 = Arc::new(FiniteMetricSpace::discrete(2));
        for _ in 0..10 {
            let m = random_joint_povm(3, s2.clone(), s2.clone(), &mut rng).unwrap();
            let (m1, m2) = m.marginals().unwrap();
            let dw = werner_distance(&m1, &m2, WernerMethod::Exact).unwrap().value;
            let dl = linf_distance(&m1, &m2).unwrap().value;
            assert_abs_diff_eq!(dw, dl, epsilon = 1e-9);
        }
    }
}
