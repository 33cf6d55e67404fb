//! Dense complex linear algebra: Hermitian eigensystems, PSD square roots,
//! tensor products, partial traces and operator norms.
//!
//! Everything is desk-scale (dimensions up to a few dozen), so the
//! eigensolver is a cyclic complex Jacobi iteration: O(n^3) per sweep,
//! unconditionally stable, and deterministic for a fixed input because the
//! sweep order is fixed.

use num_complex::Complex64 as C64;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j].0, rows[i][j].1))
    }

    /// Rank-one projector `|v><v|` (the vector is used as given).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, c: f64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn scale_c(&self, c: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Apply to a vector: `self * v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Quadratic form `<u| self |v>`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.apply(v);
        u.iter().zip(&av).map(|(ui, x)| ui.conj() * x).sum()
    }

    /// `<v| self |v>` as a real number (imaginary part discarded).
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.sandwich(v, v).re
    }

    fn herm_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }
}

/// Square matrix validated (and symmetrized) to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validate Hermiticity to within [`tol::HERMITICITY`] relative to the
    /// largest entry, then store the symmetrized part `(M + M^dag)/2`.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                context: "Hermitian operator must be square",
                left: mat.rows(),
                right: mat.cols(),
            });
        }
        let scale = mat.max_abs().max(1.0);
        let dev = mat.herm_deviation();
        if dev > tol::HERMITICITY * scale {
            return Err(Error::NonHermitian { deviation: dev });
        }
        let sym = mat.add(&mat.adjoint()).scale(0.5);
        Ok(Self { mat: sym })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim),
        }
    }

    /// Real diagonal matrix.
    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = CMatrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self { mat: m }
    }

    /// Projector onto a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 0.0, "cannot project onto the zero vector");
        let unit: Vec<C64> = v.iter().map(|z| z / n).collect();
        Self {
            mat: CMatrix::outer(&unit),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace_re(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.add(&other.mat),
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.sub(&other.mat),
        }
    }

    pub fn scale(&self, c: f64) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.scale(c),
        }
    }

    /// `Re tr(self * other)`; real for Hermitian pairs.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                s += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        s.re
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend; eigenvectors are the matching orthonormal columns
/// with the phase fixed so the first nonvanishing component of each column
/// is real positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors[(i, j)])
            .collect()
    }
}

fn off_diagonal_mass(h: &CMatrix) -> f64 {
    let n = h.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius mass drops below
/// [`tol::JACOBI_OFF`] relative to the input norm; errors with
/// [`Error::NoConvergence`] after [`tol::JACOBI_MAX_SWEEPS`] sweeps.
pub fn hermitian_eigensystem(h: &HermitianOperator) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n);
    let threshold = tol::JACOBI_OFF * h.matrix().frobenius_norm().max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while off_diagonal_mass(&a) > threshold {
        if sweeps >= tol::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off: off_diagonal_mass(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g < 1e-300 {
                    continue;
                }
                // Phase that makes the (p,q) block real, then a standard
                // real Jacobi rotation on [[app, g], [g, aqq]].
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update with U: U[p][p]=c, U[p][q]=s,
                // U[q][p]=-s*conj(phase), U[q][q]=c*conj(phase).
                let sp = C64::new(s, 0.0) * phase.conj();
                let cp = C64::new(c, 0.0) * phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sp;
                    a[(k, q)] = akp * s + akq * cp;
                }
                // Row update with U^dag.
                let sph = C64::new(s, 0.0) * phase;
                let cph = C64::new(c, 0.0) * phase;
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * sph;
                    a[(q, k)] = apk * s + aqk * cph;
                }
                // Accumulate eigenvectors: V <- V U.
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sp;
                    v[(k, q)] = vkp * s + vkq * cp;
                }
                // Clean the eliminated pair.
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }

    // Sort ascending; stable order breaks ties deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        // Phase fix: first nonvanishing component made real positive.
        let mut phase = C64::new(1.0, 0.0);
        for i in 0..n {
            let z = v[(i, old_j)];
            if z.norm() > 1e-12 {
                phase = z.conj() / z.norm();
                break;
            }
        }
        for i in 0..n {
            vecs[(i, new_j)] = v[(i, old_j)] * phase;
        }
    }

    Ok(Spectrum {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Largest singular value of a square matrix, computed as
/// `sqrt(lambda_max(M^dag M))`. Hermitian input is not required.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "operator norm needs a square matrix",
            left: m.rows(),
            right: m.cols(),
        });
    }
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let gram = HermitianOperator::new(m.adjoint().mul(m))?;
    let spec = hermitian_eigensystem(&gram)?;
    Ok(spec.max_eigenvalue().max(0.0).sqrt())
}

/// PSD square root. Eigenvalues in `[-EIG_CLAMP, 0)` clamp to zero; anything
/// below the clamp floor is an error.
pub fn psd_sqrt(p: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = hermitian_eigensystem(p)?;
    if spec.min_eigenvalue() < -tol::EIG_CLAMP {
        return Err(Error::NegativeEigenvalue {
            lambda: spec.min_eigenvalue(),
        });
    }
    let n = p.dim();
    // Zero out spectral rounding noise so the root does not amplify it
    // (sqrt turns 1e-17 into 3e-9).
    let floor = 1e-13 * spec.max_eigenvalue().max(0.0);
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = if spec.eigenvalues[k] <= floor {
            0.0
        } else {
            spec.eigenvalues[k].sqrt()
        };
        if lam == 0.0 {
            continue;
        }
        let col = spec.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * lam;
            }
        }
    }
    HermitianOperator::new(out)
}

/// Kronecker product; the first factor indexes the slow (outer) block.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    CMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

fn check_product_dims(t: &CMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if !t.is_square() || t.rows() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            context: "partial trace expects a square dim_a*dim_b matrix",
            left: t.rows(),
            right: dim_a * dim_b,
        });
    }
    Ok(())
}

/// Trace out the first tensor factor, returning an operator on the second.
pub fn partial_trace_first(t: &CMatrix, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    check_product_dims(t, dim_a, dim_b)?;
    let mut out = CMatrix::zeros(dim_b, dim_b);
    for m in 0..dim_b {
        for n in 0..dim_b {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..dim_a {
                s += t[(a * dim_b + m, a * dim_b + n)];
            }
            out[(m, n)] = s;
        }
    }
    Ok(out)
}

/// Trace out the second tensor factor, returning an operator on the first.
pub fn partial_trace_second(t: &CMatrix, dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    check_product_dims(t, dim_a, dim_b)?;
    let mut out = CMatrix::zeros(dim_a, dim_a);
    for a in 0..dim_a {
        for c in 0..dim_a {
            let mut s = C64::new(0.0, 0.0);
            for m in 0..dim_b {
                s += t[(a * dim_b + m, c * dim_b + m)];
            }
            out[(a, c)] = s;
        }
    }
    Ok(out)
}

/// Positive unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    /// Validate positivity (eigenvalues above `-EIG_CLAMP`) and unit trace.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let spec = hermitian_eigensystem(&op)?;
        if spec.min_eigenvalue() < -tol::EIG_CLAMP {
            return Err(Error::NegativeEigenvalue {
                lambda: spec.min_eigenvalue(),
            });
        }
        let tr = op.trace_re();
        if (tr - 1.0).abs() > tol::TRACE_ONE {
            return Err(Error::InvalidPovm {
                reason: format!("density operator trace {tr} is not 1"),
            });
        }
        Ok(Self { op })
    }

    /// Pure state from a nonzero vector (normalized internally).
    pub fn pure(v: &[C64]) -> Result<Self> {
        Self::new(HermitianOperator::projector(v))
    }

    /// Maximally mixed state `1/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::from_diag(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// `tr(rho X)` for Hermitian `X` (real by construction).
    pub fn expect(&self, x: &HermitianOperator) -> f64 {
        self.op.trace_product(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> HermitianOperator {
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        HermitianOperator::new(g.add(&g.adjoint()).scale(0.5)).unwrap()
    }

    fn reconstruct(spec: &Spectrum) -> CMatrix {
        let n = spec.eigenvalues.len();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let col = spec.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj() * spec.eigenvalues[k];
                }
            }
        }
        out
    }

    #[test]
    fn eigensystem_identity() {
        let spec = hermitian_eigensystem(&HermitianOperator::identity(2)).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigensystem_diagonal_sorts_ascending() {
        let h = HermitianOperator::from_diag(&[3.0, -1.0]);
        let spec = hermitian_eigensystem(&h).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn eigensystem_sigma_x_closed_form() {
        // [[0,1],[1,0]] has eigenvalues -1, 1.
        let h = HermitianOperator::new(CMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ]))
        .unwrap();
        let spec = hermitian_eigensystem(&h).unwrap();
        assert_abs_diff_eq!(spec.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigensystem_reconstructs_and_is_orthonormal() {
        let mut rng = crate::seed::rng_from(11, &[0]);
        for n in [2usize, 3, 5, 8, 13] {
            let h = random_hermitian(n, &mut rng);
            let spec = hermitian_eigensystem(&h).unwrap();
            let scale = h.matrix().max_abs().max(1.0);
            let err = reconstruct(&spec).sub(h.matrix()).max_abs();
            assert!(err <= 1e-10 * scale, "reconstruction error {err} at n={n}");
            let gram = spec.eigenvectors.adjoint().mul(&spec.eigenvectors);
            let dev = gram.sub(&CMatrix::identity(n)).max_abs();
            assert!(dev <= 1e-10, "orthonormality deviation {dev} at n={n}");
        }
    }

    #[test]
    fn eigensystem_is_deterministic() {
        let mut rng = crate::seed::rng_from(12, &[0]);
        let h = random_hermitian(6, &mut rng);
        let a = hermitian_eigensystem(&h).unwrap();
        let b = hermitian_eigensystem(&h).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert!(a.eigenvectors == b.eigenvectors);
    }

    #[test]
    fn trace_equals_eigenvalue_sum_and_norm_is_max_abs_eigenvalue() {
        let mut rng = crate::seed::rng_from(13, &[0]);
        for _ in 0..20 {
            let h = random_hermitian(4, &mut rng);
            let spec = hermitian_eigensystem(&h).unwrap();
            let sum: f64 = spec.eigenvalues.iter().sum();
            assert_abs_diff_eq!(sum, h.trace_re(), epsilon = 1e-9);
            let max_abs = spec
                .eigenvalues
                .iter()
                .map(|l| l.abs())
                .fold(0.0, f64::max);
            assert_abs_diff_eq!(
                operator_norm(h.matrix()).unwrap(),
                max_abs,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(0.5, 0.0), (0.0, 0.0)],
        ]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        // Rank-one projection has norm 1.
        let p = HermitianOperator::projector(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_abs_diff_eq!(operator_norm(p.matrix()).unwrap(), 1.0, epsilon = 1e-10);
        // Product of the two conjugate qubit projections has norm 1/sqrt(2).
        let z0 = p;
        let x0 = HermitianOperator::projector(&[
            C64::new(1.0 / 2f64.sqrt(), 0.0),
            C64::new(1.0 / 2f64.sqrt(), 0.0),
        ]);
        let prod = z0.matrix().mul(x0.matrix());
        assert_abs_diff_eq!(
            operator_norm(&prod).unwrap(),
            1.0 / 2f64.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = HermitianOperator::identity(3);
        assert!(psd_sqrt(&id).unwrap().matrix().sub(id.matrix()).max_abs() < 1e-12);

        let p = HermitianOperator::projector(&[C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        assert!(psd_sqrt(&p).unwrap().matrix().sub(p.matrix()).max_abs() < 1e-10);

        let d = HermitianOperator::from_diag(&[4.0, 9.0]);
        let r = psd_sqrt(&d).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 3.0, epsilon = 1e-12);

        let neg = HermitianOperator::from_diag(&[1.0, -0.5]);
        assert!(matches!(
            psd_sqrt(&neg),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn psd_sqrt_scaling_and_residual() {
        let mut rng = crate::seed::rng_from(14, &[0]);
        let g = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let p = HermitianOperator::new(g.mul(&g.adjoint())).unwrap();
        let r = psd_sqrt(&p).unwrap();
        assert!(r.matrix().mul(r.matrix()).sub(p.matrix()).max_abs() <= tol::SQRT_RESIDUAL);
        for c in [0.25, 4.0] {
            let lhs = psd_sqrt(&p.scale(c)).unwrap();
            let rhs = r.scale(c.sqrt());
            assert!(
                lhs.matrix().sub(rhs.matrix()).max_abs() <= 1e-9,
                "sqrt scaling at c={c}"
            );
        }
    }

    #[test]
    fn tensor_and_partial_traces() {
        let id4 = tensor(&CMatrix::identity(2), &CMatrix::identity(2));
        assert!(id4.sub(&CMatrix::identity(4)).max_abs() == 0.0);

        // Maximally entangled projector reduces to 1/2 on each side.
        let inv = 1.0 / 2f64.sqrt();
        let phi: Vec<C64> = vec![
            C64::new(inv, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(inv, 0.0),
        ];
        let proj = CMatrix::outer(&phi);
        let red = partial_trace_first(&proj, 2, 2).unwrap();
        assert!(red.sub(&CMatrix::identity(2).scale(0.5)).max_abs() < 1e-12);

        // partial_trace_second(P (x) Q) = tr(Q) P.
        let mut rng = crate::seed::rng_from(15, &[0]);
        let p = random_hermitian(3, &mut rng);
        let mut q = random_hermitian(2, &mut rng);
        // normalize q to unit trace
        let tr = q.trace_re();
        q = q.scale(1.0 / tr);
        let t = tensor(p.matrix(), q.matrix());
        let back = partial_trace_second(&t, 3, 2).unwrap();
        assert!(back.sub(p.matrix()).max_abs() < 1e-10);

        // Trace preservation on a random PSD input.
        let g = CMatrix::from_fn(6, 6, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let psd = g.mul(&g.adjoint());
        let t1 = partial_trace_first(&psd, 2, 3).unwrap();
        let t2 = partial_trace_second(&psd, 2, 3).unwrap();
        assert_abs_diff_eq!(t1.trace().re, psd.trace().re, epsilon = 1e-10);
        assert_abs_diff_eq!(t2.trace().re, psd.trace().re, epsilon = 1e-10);
        // Positivity preserved.
        let s1 = hermitian_eigensystem(&HermitianOperator::new(t1).unwrap()).unwrap();
        let s2 = hermitian_eigensystem(&HermitianOperator::new(t2).unwrap()).unwrap();
        assert!(s1.min_eigenvalue() > -1e-10);
        assert!(s2.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(HermitianOperator::from_diag(&[0.5, 0.5])).is_ok());
        assert!(DensityOperator::new(HermitianOperator::from_diag(&[1.5, -0.5])).is_err());
        assert!(DensityOperator::new(HermitianOperator::from_diag(&[0.7, 0.7])).is_err());
    }
}
