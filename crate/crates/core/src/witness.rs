//! Entanglement-based witness construction.
//!
//! A maximally entangled resource over `aux (x) sys` steers the system into
//! remote-state-preparation ensembles for any reference PVM, with a common
//! average of `1/N`. Conditioning on the outcome of a joint measurement on
//! the system half leaves an auxiliary posterior whose image under the basis
//! transpose is a system state: the witness whose outcome distributions
//! inherit the measurement's error-bar widths.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace_first, partial_trace_second, psd_sqrt, tensor, CMatrix, DensityOperator,
    HermitianOperator,
};
use crate::observables::{JointPovm, Pvm};
use crate::tol;
use crate::widths::{errorbar_width, WidthResult};

/// Maximally entangled pair of `dim`-dimensional systems,
/// `(1/sqrt(dim)) sum_i a_i (x) e_i` with the auxiliary factor first.
#[derive(Clone, Debug)]
pub struct EntangledResource {
    dim: usize,
}

impl EntangledResource {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The resource vector in the product basis, auxiliary index outermost.
    pub fn state_vector(&self) -> Vec<C64> {
        let n = self.dim;
        let amp = 1.0 / (n as f64).sqrt();
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = C64::new(amp, 0.0);
        }
        v
    }

    /// Projector onto the resource vector.
    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::projector(&self.state_vector())
    }

    /// `<Phi0| (1 (x) X) |Phi0>` for a system-side operator.
    pub fn sandwich_system(&self, x: &CMatrix) -> C64 {
        let full = tensor(&CMatrix::identity(self.dim), x);
        let v = self.state_vector();
        full.sandwich(&v, &v)
    }
}

/// Basis transpose on operators; unital, positive, projection-preserving.
pub fn gamma(x: &CMatrix) -> CMatrix {
    x.transpose()
}

/// Dual of the transpose on states: also the transpose (it is self-dual).
pub fn gamma_star(rho: &DensityOperator) -> Result<DensityOperator> {
    DensityOperator::new(HermitianOperator::new(rho.matrix().transpose())?)
}

/// One prepared state of a remote-preparation ensemble.
#[derive(Clone, Debug)]
pub struct PreparedState {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityOperator,
}

/// Remote-state-preparation ensemble for a reference PVM: outcome `x` occurs
/// with probability `<Phi0|(1 (x) F_x)|Phi0>` and leaves the system in a
/// state perfectly localized at `x`. Zero-probability outcomes are skipped.
pub fn preparation_ensemble(
    f: &Pvm,
    resource: &EntangledResource,
) -> Result<Vec<PreparedState>> {
    if f.dim() != resource.dim() {
        return Err(Error::DimensionMismatch {
            context: "PVM and resource dimensions differ",
            left: f.dim(),
            right: resource.dim(),
        });
    }
    let n = resource.dim();
    let phi = resource.projector();
    let mut out = Vec::new();
    for x in 0..f.len() {
        let p = resource.sandwich_system(f.element(x).matrix()).re;
        if p <= tol::ZERO_PROB {
            continue;
        }
        let lifted = tensor(&CMatrix::identity(n), f.element(x).matrix());
        let clamped = lifted.mul(phi.matrix()).mul(&lifted);
        let reduced = partial_trace_first(&clamped, n, n)?;
        let state = DensityOperator::new(HermitianOperator::new(reduced.scale(1.0 / p))?)?;
        out.push(PreparedState {
            outcome: x,
            probability: p,
            state,
        });
    }
    Ok(out)
}

/// Posterior data conditioned on one joint-measurement outcome.
#[derive(Clone, Debug)]
pub struct PosteriorRecord {
    pub x: usize,
    pub y: usize,
    /// `p_M(x, y) = <Phi0|(1 (x) M_xy)|Phi0>`.
    pub probability: f64,
    /// Auxiliary posterior state.
    pub theta: DensityOperator,
    /// System-side witness `gamma*(theta)`.
    pub witness: DensityOperator,
    /// Posterior reference distributions `tr(witness A_x)` and
    /// `tr(witness B_y)` over the two outcome spaces.
    pub posterior_a: Vec<f64>,
    pub posterior_b: Vec<f64>,
}

/// All posterior records of a joint measurement against the reference pair,
/// skipping outcomes with vanishing probability.
pub fn posterior_records(
    m: &JointPovm,
    a: &Pvm,
    b: &Pvm,
    resource: &EntangledResource,
) -> Result<Vec<PosteriorRecord>> {
    let n = resource.dim();
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "joint POVM and resource dimensions differ",
            left: m.dim(),
            right: n,
        });
    }
    let phi = resource.projector();
    let id = CMatrix::identity(n);
    let mut records = Vec::new();
    for x in 0..m.space_a().len() {
        for y in 0..m.space_b().len() {
            let effect = m.element(x, y);
            let p = resource.sandwich_system(effect.matrix()).re;
            if p <= tol::ZERO_PROB {
                continue;
            }
            let root = psd_sqrt(effect)?;
            let lifted = tensor(&id, root.matrix());
            let clamped = lifted.mul(phi.matrix()).mul(&lifted);
            let reduced = partial_trace_second(&clamped, n, n)?;
            let theta =
                DensityOperator::new(HermitianOperator::new(reduced.scale(1.0 / p))?)?;
            let witness = gamma_star(&theta)?;
            let posterior_a = (0..a.len())
                .map(|i| witness.expect(a.element(i)).max(0.0))
                .collect();
            let posterior_b = (0..b.len())
                .map(|j| witness.expect(b.element(j)).max(0.0))
                .collect();
            records.push(PosteriorRecord {
                x,
                y,
                probability: p,
                theta,
                witness,
                posterior_a,
                posterior_b,
            });
        }
    }
    Ok(records)
}

/// Witness selected for the width-transfer inequalities, together with the
/// error-bar widths it certifies and the posterior ball sum it achieves.
#[derive(Clone, Debug)]
pub struct TransferWitness {
    pub record: PosteriorRecord,
    pub w1: WidthResult,
    pub w2: WidthResult,
    /// `sum_{x in ball(x', w1)} p(x|x'y') + sum_{y in ball(y', w2)} p(y|x'y')`,
    /// guaranteed to reach `2 - eps1 - eps2` for the selected record.
    pub ball_sum: f64,
}

/// Select the posterior record maximizing the two-sided posterior ball mass
/// at the given widths. The probability-weighted average of that mass is at
/// least `2 - eps1 - eps2`, so the maximum is too; ties break in
/// lexicographic outcome order.
pub fn select_transfer_witness(
    a: &Pvm,
    b: &Pvm,
    records: &[PosteriorRecord],
    w1: WidthResult,
    w2: WidthResult,
) -> Result<TransferWitness> {
    let mut best: Option<(f64, &PosteriorRecord)> = None;
    for rec in records {
        let ball_a = a.space().ball(rec.x, w1.width)?;
        let ball_b = b.space().ball(rec.y, w2.width)?;
        let sum: f64 = ball_a.iter().map(|&i| rec.posterior_a[i]).sum::<f64>()
            + ball_b.iter().map(|&j| rec.posterior_b[j]).sum::<f64>();
        if best.as_ref().map_or(true, |&(s, _)| sum > s) {
            best = Some((sum, rec));
        }
    }
    let (ball_sum, record) = best.ok_or_else(|| Error::InvalidPovm {
        reason: "joint POVM has no outcome with positive probability".into(),
    })?;
    Ok(TransferWitness {
        record: record.clone(),
        w1,
        w2,
        ball_sum,
    })
}

/// Build the witness for a pair of confidence levels from scratch.
pub fn transfer_witness(
    a: &Pvm,
    b: &Pvm,
    m: &JointPovm,
    eps1: f64,
    eps2: f64,
) -> Result<TransferWitness> {
    if eps1 + eps2 > 1.0 + 1e-12 {
        return Err(Error::InvalidEpsilon {
            value: eps1 + eps2,
            expected: "eps1 + eps2 <= 1",
        });
    }
    let (m1, m2) = m.marginals()?;
    let w1 = errorbar_width(&m1, a, eps1)?;
    let w2 = errorbar_width(&m2, b, eps2)?;
    let resource = EntangledResource::new(m.dim());
    let records = posterior_records(m, a, b, &resource)?;
    select_transfer_witness(a, b, &records, w1, w2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::observables::{
        family_trivial, induced_distribution, qubit_x_pvm, qubit_z_pvm, random_joint_povm,
        random_pvm, random_state, ProbabilityDistribution,
    };
    use crate::widths::overall_width;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    #[test]
    fn resource_reduces_to_maximally_mixed() {
        for n in [2usize, 3, 5] {
            let res = EntangledResource::new(n);
            let v = res.state_vector();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            let proj = res.projector();
            for reduce in [partial_trace_first, partial_trace_second] {
                let red = reduce(proj.matrix(), n, n).unwrap();
                let dev = red.sub(&CMatrix::identity(n).scale(1.0 / n as f64)).max_abs();
                assert!(dev <= 1e-10);
            }
        }
    }

    #[test]
    fn gamma_fixes_real_and_transposes() {
        let id = CMatrix::identity(3);
        assert!(gamma(&id).sub(&id).max_abs() == 0.0);
        let z = qubit_z_pvm();
        for i in 0..2 {
            // Diagonal projections are transpose fixed points.
            assert!(gamma(z.element(i).matrix()).sub(z.element(i).matrix()).max_abs() == 0.0);
        }
        let m = CMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 0.0)],
        ]);
        let t = gamma(&m);
        assert_eq!(t[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(t[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn gamma_duality_on_random_pairs() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(61, &[0]);
        for dim in 2..=6usize {
            let rho = random_state(dim, &mut rng).unwrap();
            let g = crate::observables::random_gaussian_matrix(dim, dim, &mut rng);
            let x = HermitianOperator::new(g.add(&g.adjoint()).scale(0.5)).unwrap();
            let lhs = {
                let gx = HermitianOperator::new(gamma(x.matrix())).unwrap();
                rho.expect(&gx)
            };
            let rhs = gamma_star(&rho).unwrap().expect(&x);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
            let _ = rng.gen::<u64>();
        }
    }

    #[test]
    fn gamma_of_pvm_is_pvm() {
        let mut rng = crate::seed::rng_from(62, &[0]);
        let space = Arc::new(FiniteMetricSpace::discrete(3));
        let a = random_pvm(4, 3, space.clone(), &mut rng).unwrap();
        let transposed: Vec<HermitianOperator> = (0..3)
            .map(|i| HermitianOperator::new(gamma(a.element(i).matrix())).unwrap())
            .collect();
        assert!(Pvm::from_parts(space, transposed).is_ok());
    }

    #[test]
    fn preparation_ensemble_qubit_bases() {
        let res = EntangledResource::new(2);
        let z = qubit_z_pvm();
        let ens = preparation_ensemble(&z, &res).unwrap();
        assert_eq!(ens.len(), 2);
        for (i, prep) in ens.iter().enumerate() {
            assert_abs_diff_eq!(prep.probability, 0.5, epsilon = 1e-12);
            let dev = prep.state.matrix().sub(z.element(i).matrix()).max_abs();
            assert!(dev <= 1e-10);
        }
        let x = qubit_x_pvm();
        let ens = preparation_ensemble(&x, &res).unwrap();
        for (i, prep) in ens.iter().enumerate() {
            assert_abs_diff_eq!(prep.probability, 0.5, epsilon = 1e-12);
            // Real projectors are fixed by the transpose.
            let dev = prep.state.matrix().sub(x.element(i).matrix()).max_abs();
            assert!(dev <= 1e-10, "outcome {i}");
        }
    }

    #[test]
    fn preparation_ensemble_localizes_and_averages() {
        let mut rng = crate::seed::rng_from(63, &[0]);
        for dim in [2usize, 3, 4] {
            let res = EntangledResource::new(dim);
            let space = Arc::new(FiniteMetricSpace::discrete(dim.min(3)));
            let f = random_pvm(dim, dim.min(3), space, &mut rng).unwrap();
            let ens = preparation_ensemble(&f, &res).unwrap();
            let mut avg = CMatrix::zeros(dim, dim);
            for prep in &ens {
                let p = induced_distribution(&prep.state, f.as_povm()).unwrap();
                assert_abs_diff_eq!(p.weight(prep.outcome), 1.0, epsilon = 1e-9);
                avg = avg.add(&prep.state.matrix().scale(prep.probability));
            }
            let dev = avg.sub(&CMatrix::identity(dim).scale(1.0 / dim as f64)).max_abs();
            assert!(dev <= 1e-9, "dim {dim}");
        }
    }

    #[test]
    fn posterior_records_for_trivial_family() {
        let z = qubit_z_pvm();
        let x = qubit_x_pvm();
        let q = ProbabilityDistribution::new(x.space().clone(), vec![0.5, 0.5]).unwrap();
        let m = family_trivial(&z, &q).unwrap();
        let res = EntangledResource::new(2);
        let records = posterior_records(&m, &z, &x, &res).unwrap();
        assert_eq!(records.len(), 4);
        for rec in &records {
            assert_abs_diff_eq!(rec.probability, 0.25, epsilon = 1e-12);
            // The witness collapses to |z><z| regardless of the second index.
            let dev = rec.witness.matrix().sub(z.element(rec.x).matrix()).max_abs();
            assert!(dev <= 1e-9);
        }
        let total: f64 = records.iter().map(|r| r.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn posterior_record_invariants_on_random_instances() {
        let mut rng = crate::seed::rng_from(64, &[0]);
        for dim in [2usize, 3] {
            let sa = Arc::new(FiniteMetricSpace::discrete(2));
            let sb = Arc::new(FiniteMetricSpace::discrete(2));
            let a = random_pvm(dim, 2, sa.clone(), &mut rng).unwrap();
            let b = random_pvm(dim, 2, sb.clone(), &mut rng).unwrap();
            let m = random_joint_povm(dim, sa, sb, &mut rng).unwrap();
            let res = EntangledResource::new(dim);
            let records = posterior_records(&m, &a, &b, &res).unwrap();
            let total: f64 = records.iter().map(|r| r.probability).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
            let ens = preparation_ensemble(&a, &res).unwrap();
            for rec in &records {
                // p_M is tr(M)/dim.
                assert_abs_diff_eq!(
                    rec.probability,
                    m.element(rec.x, rec.y).trace_re() / dim as f64,
                    epsilon = 1e-10
                );
                // Posterior theta is the transpose of the normalized effect.
                let expected = m
                    .element(rec.x, rec.y)
                    .matrix()
                    .transpose()
                    .scale(1.0 / m.element(rec.x, rec.y).trace_re());
                assert!(rec.theta.matrix().sub(&expected).max_abs() <= 1e-9);
                // Duality: tr(theta gamma(A_x)) = tr(witness A_x).
                for (i, &pa) in rec.posterior_a.iter().enumerate() {
                    let via_theta = {
                        let g = HermitianOperator::new(gamma(a.element(i).matrix())).unwrap();
                        rec.theta.expect(&g)
                    };
                    assert_abs_diff_eq!(pa, via_theta, epsilon = 1e-9);
                }
                // Bayes consistency against the preparation ensemble.
                for prep in &ens {
                    let joint = prep.probability
                        * prep.state.expect(m.element(rec.x, rec.y));
                    let bayes = rec.probability * rec.posterior_a[prep.outcome];
                    assert_abs_diff_eq!(joint, bayes, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn transfer_witness_trivial_family() {
        let z = qubit_z_pvm();
        let x = qubit_x_pvm();
        let q = ProbabilityDistribution::new(x.space().clone(), vec![0.5, 0.5]).unwrap();
        let m = family_trivial(&z, &q).unwrap();
        let tw = transfer_witness(&z, &x, &m, 0.1, 0.1).unwrap();
        assert_eq!(tw.w1.width, 0.0);
        assert_eq!(tw.w2.width, 2.0);
        assert!(tw.ball_sum >= 2.0 - 0.2 - 1e-9);
        // Witness outcome distributions certify both inequalities.
        let pa = induced_distribution(&tw.record.witness, z.as_povm()).unwrap();
        let pb = induced_distribution(&tw.record.witness, x.as_povm()).unwrap();
        assert_eq!(overall_width(&pa, 0.2).unwrap().width, 0.0);
        assert_eq!(overall_width(&pb, 0.2).unwrap().width, 2.0);
    }
}
