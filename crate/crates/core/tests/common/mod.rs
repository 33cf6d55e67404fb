//! Shared helpers for the integration suites: an independent brute-force
//! oracle for the error-bar width and a pass/fail line printer.

use qwidths::linalg::{hermitian_eigensystem, CMatrix, DensityOperator};
use qwidths::num_complex::Complex64 as C64;
use qwidths::observables::{induced_distribution, random_pure_vector, Povm, Pvm};
use qwidths::seed::rng_from;

/// Brute-force error-bar width: for every reference outcome, minimize the
/// ball mass of the induced distribution over a dense sample of pure states
/// in the reference range (dimension of the range read off the eigensystem,
/// independent of the compression route used by the implementation).
pub fn errorbar_width_oracle(m1: &Povm, e: &Pvm, eps: f64, samples: usize, seed: u64) -> f64 {
    let space = m1.space();
    let widths = space.candidate_widths();
    let need = 1.0 - eps - 1e-12;
    let mut result = 0.0f64;
    for x in 0..e.len() {
        if e.element(x).trace_re() <= 1e-12 {
            continue;
        }
        // Orthonormal range basis of the reference projection.
        let spec = hermitian_eigensystem(e.element(x)).expect("reference is Hermitian");
        let cols: Vec<usize> = (0..e.dim())
            .filter(|&k| spec.eigenvalues[k] > 0.5)
            .collect();
        let rank = cols.len();
        let basis = CMatrix::from_fn(e.dim(), rank, |i, j| spec.eigenvectors[(i, cols[j])]);

        // Worst ball mass per candidate width over the sampled states.
        let mut min_mass = vec![f64::INFINITY; widths.len()];
        let n_samples = if rank == 1 { 1 } else { samples };
        let mut rng = rng_from(seed, &[x as u64]);
        for _ in 0..n_samples {
            let coeff = random_pure_vector(rank, &mut rng);
            let psi = basis.apply(&coeff);
            let rho = DensityOperator::pure(&psi).expect("unit vector");
            let p = induced_distribution(&rho, m1).expect("dims match");
            for (wi, &w) in widths.iter().enumerate() {
                let mass = p.ball_mass(x, w).expect("outcome in range");
                if mass < min_mass[wi] {
                    min_mass[wi] = mass;
                }
            }
        }
        let w_x = widths
            .iter()
            .zip(&min_mass)
            .find(|(_, &mass)| mass >= need)
            .map(|(&w, _)| w)
            .unwrap_or_else(|| *widths.last().expect("nonempty grid"));
        result = result.max(w_x);
    }
    result
}

/// Index of a width value on the candidate grid.
pub fn grid_index(widths: &[f64], value: f64) -> usize {
    widths
        .iter()
        .position(|&w| (w - value).abs() <= 1e-9)
        .unwrap_or_else(|| panic!("width {value} not on the candidate grid {widths:?}"))
}

pub fn report_line(number: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {:>2} ({name}): {} — {detail}",
        number,
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Haar-random pure qubit sum sweep used by the first criterion.
pub fn qubit_sum(seed: u64, index: u64) -> f64 {
    let z = qwidths::observables::qubit_z_pvm();
    let x = qwidths::observables::qubit_x_pvm();
    let mut rng = rng_from(seed, &[1, index]);
    let psi: Vec<C64> = random_pure_vector(2, &mut rng);
    let rho = DensityOperator::pure(&psi).expect("unit vector");
    let pz = induced_distribution(&rho, z.as_povm()).expect("dims");
    let px = induced_distribution(&rho, x.as_povm()).expect("dims");
    pz.weights().iter().copied().fold(0.0, f64::max)
        + px.weights().iter().copied().fold(0.0, f64::max)
}
