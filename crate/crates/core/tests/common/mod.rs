//! Shared helpers for the integration suites.
//!
//! The matrix builders here are deliberately a different computation route
//! from the library's simulator: gates become explicit small matrices
//! scattered into the full space by index arithmetic, and eigenvalues come
//! from a Schur decomposition instead of the library's commuting
//! Hermitian-pair route. Tests that compare the two routes therefore
//! exercise genuinely independent code paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qident::circuit::{Circuit, Gate, GateKind, Polarity};
use qident::sim::{CMatrix, StateVector};
use qident::verifier::VerifierSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The gate's matrix on its target qubits alone (targets\[0\] = low bit).
/// `arity` is the number of targets; only the conditional-phase kind has
/// variable arity (phase on the all-ones target pattern).
pub fn small_matrix(kind: &GateKind, arity: usize) -> DMatrix<Complex64> {
    let one = Complex64::ONE;
    let zero = Complex64::ZERO;
    let i = Complex64::I;
    match kind {
        GateKind::Id => DMatrix::identity(2, 2),
        GateKind::X => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        GateKind::Y => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
        GateKind::Z => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        GateKind::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
        }
        GateKind::S => DMatrix::from_row_slice(2, 2, &[one, zero, zero, i]),
        GateKind::Sdg => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -i]),
        GateKind::T => {
            DMatrix::from_row_slice(2, 2, &[one, zero, zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
        }
        GateKind::Tdg => {
            DMatrix::from_row_slice(2, 2, &[one, zero, zero, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)])
        }
        GateKind::Rx(a) => {
            let (cos, sin) = ((a / 2.0).cos(), (a / 2.0).sin());
            DMatrix::from_row_slice(2, 2, &[c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)])
        }
        GateKind::Ry(a) => {
            let (cos, sin) = ((a / 2.0).cos(), (a / 2.0).sin());
            DMatrix::from_row_slice(2, 2, &[c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)])
        }
        GateKind::Rz(a) => DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![
                Complex64::from_polar(1.0, -a / 2.0),
                Complex64::from_polar(1.0, a / 2.0),
            ]),
        ),
        // two-qubit kinds: index = bit(targets[0]) + 2*bit(targets[1])
        GateKind::Cx => {
            let mut m = DMatrix::zeros(4, 4);
            // control = targets[0] (low bit), target flips when it is set
            m[(0, 0)] = one;
            m[(2, 2)] = one;
            m[(3, 1)] = one;
            m[(1, 3)] = one;
            m
        }
        GateKind::Cz => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            one, one, one, -one,
        ])),
        GateKind::Swap => {
            let mut m = DMatrix::zeros(4, 4);
            m[(0, 0)] = one;
            m[(1, 2)] = one;
            m[(2, 1)] = one;
            m[(3, 3)] = one;
            m
        }
        GateKind::Cp(a) => {
            let dim = 1usize << arity;
            let mut m = DMatrix::identity(dim, dim);
            m[(dim - 1, dim - 1)] = Complex64::from_polar(1.0, *a);
            m
        }
    }
}

/// Full-space matrix of one gate, built by explicit index scatter.
pub fn gate_matrix(gate: &Gate, n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let k = gate.targets.len();
    let small = small_matrix(&gate.kind, k);
    assert_eq!(small.nrows(), 1 << k, "target arity matches matrix size");
    let mut full = CMatrix::zeros(dim, dim);
    'cols: for col in 0..dim {
        for ctl in &gate.controls {
            let bit = col >> ctl.qubit & 1;
            let want = match ctl.polarity {
                Polarity::One => 1,
                Polarity::Zero => 0,
            };
            if bit != want {
                full[(col, col)] = Complex64::ONE;
                continue 'cols;
            }
        }
        let mut t_in = 0usize;
        let mut base = col;
        for (pos, &q) in gate.targets.iter().enumerate() {
            t_in |= (col >> q & 1) << pos;
            base &= !(1usize << q);
        }
        for r in 0..1usize << k {
            let amp = small[(r, t_in)];
            if amp == Complex64::ZERO {
                continue;
            }
            let mut row = base;
            for (pos, &q) in gate.targets.iter().enumerate() {
                row |= (r >> pos & 1) << q;
            }
            full[(row, col)] += amp;
        }
    }
    full
}

/// Full-circuit unitary by matrix products of the scattered gate matrices.
pub fn circuit_matrix(circuit: &Circuit) -> CMatrix {
    let dim = 1usize << circuit.n_qubits();
    let mut u = CMatrix::identity(dim, dim);
    for gate in circuit.gates() {
        u = gate_matrix(gate, circuit.n_qubits()) * u;
    }
    u
}

/// Eigenvalues via Schur decomposition (Francis QR), independent of the
/// library's eigensystem route.
pub fn schur_eigenvalues(u: &CMatrix) -> Vec<Complex64> {
    let (_, t) = u.clone().schur().unpack();
    (0..t.nrows()).map(|j| t[(j, j)]).collect()
}

/// Minimize `max_j |lambda_j - e^{i phi}|` over a uniform phi grid: the
/// brute-force counterpart of the covering-arc distance (the operator norm
/// of `u - e^{i phi} 1` equals that maximum because the matrix is normal).
pub fn grid_distance_oracle(eigenvalues: &[Complex64], grid_points: usize) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..grid_points {
        let phi = 2.0 * std::f64::consts::PI * (k as f64) / (grid_points as f64);
        let probe = Complex64::from_polar(1.0, phi);
        let worst = eigenvalues
            .iter()
            .map(|l| (l - probe).norm())
            .fold(0.0f64, f64::max);
        best = best.min(worst);
    }
    best
}

/// Haar-ish random state from a seeded gaussian draw.
pub fn random_state(n_qubits: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << n_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| {
            // Box-Muller from uniform draws keeps the dependency surface small
            let u1: f64 = rng.random_range(1e-12..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(n_qubits, amps).expect("normalized by construction")
}

/// Seeded random verifier on 2..=5 total qubits with at least one ancilla.
pub fn random_verifier(seed: u64) -> VerifierSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = rng.random_range(2..=5usize);
    let n_ancillas = rng.random_range(1..total);
    let n_inputs = total - n_ancillas;
    let output = rng.random_range(0..total);
    let gates = rng.random_range(4..=20usize);
    let circuit = qident::circuit::random_circuit(total, gates, rng.random());
    VerifierSpec::new(circuit, n_inputs, output, None).expect("valid verifier shape")
}
