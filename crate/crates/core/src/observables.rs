//! PVMs, POVMs and joint POVMs over finite metric spaces, the outcome
//! distributions they induce, structured joint-measurement families and
//! noncommutativity functionals.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, operator_norm, psd_sqrt, CMatrix, DensityOperator, HermitianOperator,
};
use crate::metric::FiniteMetricSpace;
use crate::tol;

/// Positive-operator-valued measure: one PSD effect per outcome, summing to
/// the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    space: Arc<FiniteMetricSpace>,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(space: Arc<FiniteMetricSpace>, elements: Vec<HermitianOperator>) -> Result<Self> {
        if elements.len() != space.len() {
            return Err(Error::InvalidPovm {
                reason: format!(
                    "{} effects for a space of {} outcomes",
                    elements.len(),
                    space.len()
                ),
            });
        }
        let dim = elements
            .first()
            .map(|e| e.dim())
            .ok_or_else(|| Error::InvalidPovm {
                reason: "empty effect list".into(),
            })?;
        let mut sum = HermitianOperator::zero(dim);
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "POVM effects must share one dimension",
                    left: e.dim(),
                    right: dim,
                });
            }
            let lam = hermitian_eigensystem(e)?.min_eigenvalue();
            if lam < -tol::EIG_CLAMP {
                return Err(Error::InvalidPovm {
                    reason: format!("effect {i} has eigenvalue {lam:.3e}"),
                });
            }
            sum = sum.add(e);
        }
        let dev = sum
            .matrix()
            .sub(&CMatrix::identity(dim))
            .max_abs();
        if dev > tol::POVM_SUM {
            return Err(Error::InvalidPovm {
                reason: format!("effects sum to identity only within {dev:.3e}"),
            });
        }
        Ok(Self { space, elements })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, x: usize) -> &HermitianOperator {
        &self.elements[x]
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Effect of an outcome subset: `F(Delta) = sum_{x in Delta} F_x`.
    pub fn aggregate(&self, subset: &[usize]) -> HermitianOperator {
        let mut sum = HermitianOperator::zero(self.dim());
        for &x in subset {
            sum = sum.add(&self.elements[x]);
        }
        sum
    }
}

/// Projection-valued measure: a POVM of mutually orthogonal projections.
#[derive(Clone, Debug)]
pub struct Pvm {
    povm: Povm,
}

impl Pvm {
    pub fn new(povm: Povm) -> Result<Self> {
        for (x, e) in povm.elements().iter().enumerate() {
            let idem = e.matrix().mul(e.matrix()).sub(e.matrix()).max_abs();
            if idem > tol::PVM_SHARP {
                return Err(Error::InvalidPovm {
                    reason: format!("effect {x} is not idempotent (residual {idem:.3e})"),
                });
            }
            for (y, f) in povm.elements().iter().enumerate().skip(x + 1) {
                let cross = e.matrix().mul(f.matrix()).max_abs();
                if cross > tol::PVM_SHARP {
                    return Err(Error::InvalidPovm {
                        reason: format!("effects {x},{y} are not orthogonal ({cross:.3e})"),
                    });
                }
            }
        }
        Ok(Self { povm })
    }

    pub fn from_parts(
        space: Arc<FiniteMetricSpace>,
        elements: Vec<HermitianOperator>,
    ) -> Result<Self> {
        Self::new(Povm::new(space, elements)?)
    }

    pub fn as_povm(&self) -> &Povm {
        &self.povm
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.povm.space()
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn element(&self, x: usize) -> &HermitianOperator {
        self.povm.element(x)
    }

    pub fn aggregate(&self, subset: &[usize]) -> HermitianOperator {
        self.povm.aggregate(subset)
    }
}

/// POVM on a product outcome space `Omega_A x Omega_B`, stored densely with
/// the A index outermost.
#[derive(Clone, Debug)]
pub struct JointPovm {
    space_a: Arc<FiniteMetricSpace>,
    space_b: Arc<FiniteMetricSpace>,
    elements: Vec<HermitianOperator>,
}

impl JointPovm {
    pub fn new(
        space_a: Arc<FiniteMetricSpace>,
        space_b: Arc<FiniteMetricSpace>,
        elements: Vec<HermitianOperator>,
    ) -> Result<Self> {
        let expected = space_a.len() * space_b.len();
        if elements.len() != expected {
            return Err(Error::InvalidPovm {
                reason: format!("{} effects for {} outcome pairs", elements.len(), expected),
            });
        }
        let dim = elements[0].dim();
        let mut sum = HermitianOperator::zero(dim);
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "joint POVM effects must share one dimension",
                    left: e.dim(),
                    right: dim,
                });
            }
            let lam = hermitian_eigensystem(e)?.min_eigenvalue();
            if lam < -tol::EIG_CLAMP {
                return Err(Error::NotPositive { lambda: lam });
            }
            sum = sum.add(e);
            let _ = i;
        }
        let dev = sum.matrix().sub(&CMatrix::identity(dim)).max_abs();
        if dev > tol::POVM_SUM {
            return Err(Error::InvalidPovm {
                reason: format!("joint effects sum to identity only within {dev:.3e}"),
            });
        }
        Ok(Self {
            space_a,
            space_b,
            elements,
        })
    }

    pub fn space_a(&self) -> &Arc<FiniteMetricSpace> {
        &self.space_a
    }

    pub fn space_b(&self) -> &Arc<FiniteMetricSpace> {
        &self.space_b
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn element(&self, x: usize, y: usize) -> &HermitianOperator {
        &self.elements[x * self.space_b.len() + y]
    }

    /// Marginal POVMs `M1(x) = sum_y M(x,y)` and `M2(y) = sum_x M(x,y)`.
    pub fn marginals(&self) -> Result<(Povm, Povm)> {
        let dim = self.dim();
        let na = self.space_a.len();
        let nb = self.space_b.len();
        let mut first = vec![HermitianOperator::zero(dim); na];
        let mut second = vec![HermitianOperator::zero(dim); nb];
        for x in 0..na {
            for y in 0..nb {
                let e = self.element(x, y);
                first[x] = first[x].add(e);
                second[y] = second[y].add(e);
            }
        }
        Ok((
            Povm::new(self.space_a.clone(), first)?,
            Povm::new(self.space_b.clone(), second)?,
        ))
    }
}

/// Probability distribution over the outcomes of a metric space.
#[derive(Clone, Debug)]
pub struct ProbabilityDistribution {
    space: Arc<FiniteMetricSpace>,
    weights: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(space: Arc<FiniteMetricSpace>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::DimensionMismatch {
                context: "weights must cover the outcome space",
                left: weights.len(),
                right: space.len(),
            });
        }
        if weights.iter().any(|&w| w < -tol::ZERO_PROB) {
            return Err(Error::InvalidPovm {
                reason: "negative probability weight".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::TRACE_ONE {
            return Err(Error::InvalidPovm {
                reason: format!("weights sum to {total}"),
            });
        }
        Ok(Self { space, weights })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    /// Mass carried by a ball of width `w` around `x`.
    pub fn ball_mass(&self, x: usize, w: f64) -> Result<f64> {
        Ok(self
            .space
            .ball(x, w)?
            .into_iter()
            .map(|y| self.weights[y])
            .sum())
    }
}

/// Outcome distribution `x -> tr(rho F_x)`, clamped at zero and renormalized
/// if the total drifts beyond [`tol::DISTRIBUTION_DRIFT`].
pub fn induced_distribution(rho: &DensityOperator, f: &Povm) -> Result<ProbabilityDistribution> {
    if rho.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            context: "state and POVM dimensions differ",
            left: rho.dim(),
            right: f.dim(),
        });
    }
    let mut weights: Vec<f64> = f
        .elements()
        .iter()
        .map(|e| rho.expect(e).max(0.0))
        .collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol::DISTRIBUTION_DRIFT {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    ProbabilityDistribution::new(f.space().clone(), weights)
}

/// `M_{xy} = A_x q_y`: measure `A` and roll an independent `q` for the
/// second outcome.
pub fn family_trivial(a: &Pvm, q: &ProbabilityDistribution) -> Result<JointPovm> {
    let elements = (0..a.len())
        .flat_map(|x| {
            (0..q.space().len())
                .map(move |y| a.element(x).scale(q.weight(y)))
                .collect::<Vec<_>>()
        })
        .collect();
    JointPovm::new(a.space().clone(), q.space().clone(), elements)
}

/// `M_{xy} = A_x^{1/2} B_y A_x^{1/2}`.
pub fn family_smeared(a: &Pvm, b: &Pvm) -> Result<JointPovm> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "smeared family needs one dimension",
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut elements = Vec::with_capacity(a.len() * b.len());
    for x in 0..a.len() {
        let root = psd_sqrt(a.element(x))?;
        for y in 0..b.len() {
            let m = root.matrix().mul(b.element(y).matrix()).mul(root.matrix());
            elements.push(HermitianOperator::new(m)?);
        }
    }
    JointPovm::new(a.space().clone(), b.space().clone(), elements)
}

/// Covariant qubit family `M_{zx} = (1/4)(1 + (-1)^z lam sz + (-1)^x mu sx)`,
/// positive exactly when `lam^2 + mu^2 <= 1` (checked by eigenvalue).
pub fn family_qubit_covariant(lambda: f64, mu: f64) -> Result<JointPovm> {
    let space = Arc::new(FiniteMetricSpace::discrete(2));
    let mut elements = Vec::with_capacity(4);
    for z in 0..2 {
        for x in 0..2 {
            let sz = if z == 0 { lambda } else { -lambda };
            let sx = if x == 0 { mu } else { -mu };
            let m = CMatrix::from_rows(&[
                vec![(0.25 * (1.0 + sz), 0.0), (0.25 * sx, 0.0)],
                vec![(0.25 * sx, 0.0), (0.25 * (1.0 - sz), 0.0)],
            ]);
            let h = HermitianOperator::new(m)?;
            let lam_min = hermitian_eigensystem(&h)?.min_eigenvalue();
            if lam_min < -tol::EIG_CLAMP {
                return Err(Error::NotPositive { lambda: lam_min });
            }
            elements.push(h);
        }
    }
    JointPovm::new(space.clone(), space, elements)
}

/// Joint POVM from explicit effects (A index outermost).
pub fn family_explicit(
    space_a: Arc<FiniteMetricSpace>,
    space_b: Arc<FiniteMetricSpace>,
    elements: Vec<HermitianOperator>,
) -> Result<JointPovm> {
    JointPovm::new(space_a, space_b, elements)
}

/// `max_{x,y} tr(A_x B_y)`.
pub fn max_pairwise_trace(a: &Pvm, b: &Pvm) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for x in 0..a.len() {
        for y in 0..b.len() {
            best = best.max(a.element(x).trace_product(b.element(y)));
        }
    }
    best.max(0.0)
}

/// `max_{x,y} ||A_x B_y||`.
pub fn max_pairwise_norm(a: &Pvm, b: &Pvm) -> Result<f64> {
    let mut best: f64 = 0.0;
    for x in 0..a.len() {
        for y in 0..b.len() {
            let prod = a.element(x).matrix().mul(b.element(y).matrix());
            best = best.max(operator_norm(&prod)?);
        }
    }
    Ok(best)
}

/// `max_{x,y} ||[A_x, B_y]||`.
pub fn max_commutator_norm(a: &Pvm, b: &Pvm) -> Result<f64> {
    let mut best: f64 = 0.0;
    for x in 0..a.len() {
        for y in 0..b.len() {
            let ab = a.element(x).matrix().mul(b.element(y).matrix());
            let ba = b.element(y).matrix().mul(a.element(x).matrix());
            best = best.max(operator_norm(&ab.sub(&ba))?);
        }
    }
    Ok(best)
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Gaussian matrix with iid complex standard normal entries.
pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

/// Haar-random unit vector.
pub fn random_pure_vector(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random unitary via Gram-Schmidt (with one reorthogonalization pass)
/// on a Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..dim {
                    let sub = proj * cols[k][i];
                    cols[j][i] -= sub;
                }
            }
        }
        let n: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 1e-12, "Gaussian matrix numerically singular");
        for z in cols[j].iter_mut() {
            *z /= n;
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// PVM from an orthonormal-column partition of a random unitary; the last
/// outcome absorbs the remaining rank.
pub fn random_pvm(
    dim: usize,
    n_outcomes: usize,
    space: Arc<FiniteMetricSpace>,
    rng: &mut impl Rng,
) -> Result<Pvm> {
    if n_outcomes > dim || n_outcomes == 0 {
        return Err(Error::RankInfeasible {
            dim,
            outcomes: n_outcomes,
        });
    }
    if space.len() != n_outcomes {
        return Err(Error::DimensionMismatch {
            context: "space size must equal outcome count",
            left: space.len(),
            right: n_outcomes,
        });
    }
    let u = random_unitary(dim, rng);
    let base = dim / n_outcomes;
    let mut elements = Vec::with_capacity(n_outcomes);
    let mut col = 0usize;
    for x in 0..n_outcomes {
        let size = if x + 1 == n_outcomes {
            dim - col
        } else {
            base
        };
        let mut p = CMatrix::zeros(dim, dim);
        for c in col..col + size {
            let v: Vec<C64> = (0..dim).map(|i| u[(i, c)]).collect();
            p = p.add(&CMatrix::outer(&v));
        }
        col += size;
        elements.push(HermitianOperator::new(p)?);
    }
    Pvm::from_parts(space, elements)
}

/// Joint POVM by Gram normalization of Gaussian seeds:
/// `M_i = S^{-1/2} G_i G_i^dag S^{-1/2}` with `S = sum_i G_i G_i^dag`.
pub fn random_joint_povm(
    dim: usize,
    space_a: Arc<FiniteMetricSpace>,
    space_b: Arc<FiniteMetricSpace>,
    rng: &mut impl Rng,
) -> Result<JointPovm> {
    let count = space_a.len() * space_b.len();
    let seeds: Vec<CMatrix> = (0..count)
        .map(|_| {
            let g = random_gaussian_matrix(dim, dim, rng);
            g.mul(&g.adjoint())
        })
        .collect();
    let mut s = CMatrix::zeros(dim, dim);
    for g in &seeds {
        s = s.add(g);
    }
    let s_h = HermitianOperator::new(s)?;
    let spec = hermitian_eigensystem(&s_h)?;
    let mut inv_root = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let lam = spec.eigenvalues[k];
        assert!(lam > 1e-10, "Gram matrix numerically singular");
        let col = spec.column(k);
        let w = 1.0 / lam.sqrt();
        for i in 0..dim {
            for j in 0..dim {
                inv_root[(i, j)] += col[i] * col[j].conj() * w;
            }
        }
    }
    let elements: Result<Vec<HermitianOperator>> = seeds
        .into_iter()
        .map(|g| HermitianOperator::new(inv_root.mul(&g).mul(&inv_root)))
        .collect();
    JointPovm::new(space_a, space_b, elements?)
}

/// Random full-rank state `G G^dag / tr(G G^dag)`.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    let g = random_gaussian_matrix(dim, dim, rng);
    let p = g.mul(&g.adjoint());
    let tr = p.trace().re;
    DensityOperator::new(HermitianOperator::new(p.scale(1.0 / tr))?)
}

/// Haar-random pure state.
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> Result<DensityOperator> {
    DensityOperator::pure(&random_pure_vector(dim, rng))
}

/// Computational-basis qubit PVM on the two-point discrete space.
pub fn qubit_z_pvm() -> Pvm {
    let space = Arc::new(FiniteMetricSpace::discrete(2));
    let z0 = HermitianOperator::from_diag(&[1.0, 0.0]);
    let z1 = HermitianOperator::from_diag(&[0.0, 1.0]);
    Pvm::from_parts(space, vec![z0, z1]).expect("static qubit PVM")
}

/// Conjugate-basis qubit PVM `{|0bar>, |1bar>}` on the two-point space.
pub fn qubit_x_pvm() -> Pvm {
    let space = Arc::new(FiniteMetricSpace::discrete(2));
    let inv = 1.0 / 2f64.sqrt();
    let plus = [C64::new(inv, 0.0), C64::new(inv, 0.0)];
    let minus = [C64::new(inv, 0.0), C64::new(-inv, 0.0)];
    Pvm::from_parts(
        space,
        vec![
            HermitianOperator::projector(&plus),
            HermitianOperator::projector(&minus),
        ],
    )
    .expect("static qubit PVM")
}
