//! Dense state-vector and unitary simulation.
//!
//! Basis-state convention: qubit `q` is bit `q` of the index, so qubit 0 is
//! the least-significant bit. Dense work is capped well below anything that
//! would thrash memory: state vectors at [`MAX_STATE_QUBITS`] qubits, full
//! unitaries at [`MAX_UNITARY_QUBITS`].

use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest register simulated as an explicit amplitude vector (16M entries).
pub const MAX_STATE_QUBITS: usize = 24;
/// Largest register whose full unitary matrix is materialized (4096 x 4096).
pub const MAX_UNITARY_QUBITS: usize = 12;

const TWO_PI: f64 = 2.0 * PI;
/// Arbitrary fixed seed so norm estimates are reproducible by default.
const DEFAULT_NORM_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

fn check_state_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_STATE_QUBITS {
        return Err(Error::DenseLimit {
            what: "state vector",
            needed: n_qubits,
            limit: MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

/// A pure state on `n_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0>.
    pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
        StateVector::basis(n_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<StateVector> {
        check_state_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::dimension(format!(
                "basis index {} out of range for dimension {}",
                index, dim
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Build from explicit amplitudes; the vector must be normalized to
    /// within 1e-9.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<StateVector> {
        check_state_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::dimension(format!(
                "{} amplitudes for a {}-qubit state (expected {})",
                amplitudes.len(),
                n_qubits,
                dim
            )));
        }
        let state = StateVector { n_qubits, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> StateVector {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        StateVector { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product with `self` on the low-order qubits and `other` above.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        check_state_cap(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for hi in &other.amplitudes {
            for lo in &self.amplitudes {
                amplitudes.push(hi * lo);
            }
        }
        Ok(StateVector { n_qubits: n, amplitudes })
    }

    /// Probability that measuring `qubit` yields `value`.
    pub fn probability_of_bit(&self, qubit: usize, value: bool) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n_qubits: self.n_qubits });
        }
        let mask = 1usize << qubit;
        let want = if value { mask } else { 0 };
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Zero out every amplitude where `qubit` does not read `value`.
    /// The result is intentionally not renormalized.
    pub fn project_bit(&self, qubit: usize, value: bool) -> Result<StateVector> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n_qubits: self.n_qubits });
        }
        let mask = 1usize << qubit;
        let want = if value { mask } else { 0 };
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| if i & mask == want { a } else { Complex64::ZERO })
            .collect();
        Ok(StateVector { n_qubits: self.n_qubits, amplitudes })
    }

    /// Apply one gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let data = &mut self.amplitudes;
        match gate.kind {
            GateKind::Id => {}
            GateKind::Cx => {
                let cm = 1usize << gate.targets[0];
                let tm = 1usize << gate.targets[1];
                for i in 0..data.len() {
                    if i & cm != 0 && i & tm == 0 {
                        data.swap(i, i | tm);
                    }
                }
            }
            GateKind::Cz => {
                let m = (1usize << gate.targets[0]) | (1usize << gate.targets[1]);
                for (i, a) in data.iter_mut().enumerate() {
                    if i & m == m {
                        *a = -*a;
                    }
                }
            }
            GateKind::Swap => {
                let am = 1usize << gate.targets[0];
                let bm = 1usize << gate.targets[1];
                for i in 0..data.len() {
                    if i & am != 0 && i & bm == 0 {
                        data.swap(i, i ^ am ^ bm);
                    }
                }
            }
            GateKind::Cp(angle) => {
                let mut ones = 0usize;
                let mut zeros = 0usize;
                for &t in &gate.targets {
                    ones |= 1 << t;
                }
                for c in &gate.controls {
                    match c.polarity {
                        Polarity::One => ones |= 1 << c.qubit,
                        Polarity::Zero => zeros |= 1 << c.qubit,
                    }
                }
                let phase = Complex64::from_polar(1.0, angle);
                for (i, a) in data.iter_mut().enumerate() {
                    if i & ones == ones && i & zeros == 0 {
                        *a *= phase;
                    }
                }
            }
            _ => {
                let m = single_qubit_matrix(&gate.kind)
                    .expect("validate() admits only single-target kinds here");
                apply_single(data, gate.targets[0], &m);
            }
        }
        Ok(())
    }

    /// Apply every gate of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: circuit.n_qubits(),
                right: self.n_qubits,
            });
        }
        #[cfg(debug_assertions)]
        let norm_before = self.norm();
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        #[cfg(debug_assertions)]
        debug_assert!(
            (self.norm() - norm_before).abs() < 1e-6,
            "gate kernels must preserve the norm"
        );
        Ok(())
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amplitudes)
    }

    pub fn from_vector(v: &CVector) -> Result<StateVector> {
        let dim = v.len();
        let n_qubits = dim.trailing_zeros() as usize;
        if dim == 0 || dim != 1 << n_qubits {
            return Err(Error::dimension(format!("{} is not a power-of-two dimension", dim)));
        }
        StateVector::from_amplitudes(n_qubits, v.iter().copied().collect())
    }

    /// Render as text: a `dim D` header, then one `re im` pair per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim {}", self.dim());
        for a in &self.amplitudes {
            let _ = writeln!(out, "{:?} {:?}", a.re, a.im);
        }
        out
    }

    /// Parse the text format accepted by [`StateVector::to_text`]. Blank
    /// lines and `#` comments are allowed; the state must be normalized.
    pub fn parse(text: &str) -> Result<StateVector> {
        let mut dim: Option<usize> = None;
        let mut amplitudes: Vec<Complex64> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let mut tokens = content.split_whitespace();
            let Some(first) = tokens.next() else { continue };
            match dim {
                None => {
                    if first != "dim" {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: "expected `dim D` header".into(),
                        });
                    }
                    let d: usize = tokens
                        .next()
                        .ok_or_else(|| Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: "missing dimension".into(),
                        })?
                        .parse()
                        .map_err(|_| Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: "invalid dimension".into(),
                        })?;
                    if d == 0 || !d.is_power_of_two() {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: format!("dimension {} is not a power of two", d),
                        });
                    }
                    check_state_cap(d.trailing_zeros() as usize)?;
                    dim = Some(d);
                }
                Some(d) => {
                    if amplitudes.len() == d {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: format!("more than {} amplitude lines", d),
                        });
                    }
                    let re: f64 = first.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        col: 1,
                        msg: format!("invalid real part: `{}`", first),
                    })?;
                    let im_tok = tokens.next().ok_or_else(|| Error::Parse {
                        line: line_no,
                        col: 1,
                        msg: "missing imaginary part".into(),
                    })?;
                    let im: f64 = im_tok.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        col: 1,
                        msg: format!("invalid imaginary part: `{}`", im_tok),
                    })?;
                    if tokens.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            col: 1,
                            msg: "expected exactly two numbers per line".into(),
                        });
                    }
                    amplitudes.push(Complex64::new(re, im));
                }
            }
        }
        let d = dim.ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "missing `dim D` header".into(),
        })?;
        if amplitudes.len() != d {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                col: 1,
                msg: format!("expected {} amplitude lines, got {}", d, amplitudes.len()),
            });
        }
        StateVector::from_amplitudes(d.trailing_zeros() as usize, amplitudes)
    }
}

fn single_qubit_matrix(kind: &GateKind) -> Option<[[Complex64; 2]; 2]> {
    let o = Complex64::ONE;
    let z = Complex64::ZERO;
    let i = Complex64::I;
    let m = match *kind {
        GateKind::Id => [[o, z], [z, o]],
        GateKind::X => [[z, o], [o, z]],
        GateKind::Y => [[z, -i], [i, z]],
        GateKind::Z => [[o, z], [z, -o]],
        GateKind::H => {
            let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
            [[s, s], [s, -s]]
        }
        GateKind::S => [[o, z], [z, i]],
        GateKind::Sdg => [[o, z], [z, -i]],
        GateKind::T => [[o, z], [z, Complex64::from_polar(1.0, FRAC_PI_4)]],
        GateKind::Tdg => [[o, z], [z, Complex64::from_polar(1.0, -FRAC_PI_4)]],
        GateKind::Rx(a) => {
            let c = Complex64::new((a / 2.0).cos(), 0.0);
            let s = Complex64::new(0.0, -(a / 2.0).sin());
            [[c, s], [s, c]]
        }
        GateKind::Ry(a) => {
            let c = Complex64::new((a / 2.0).cos(), 0.0);
            let s = Complex64::new((a / 2.0).sin(), 0.0);
            [[c, -s], [s, c]]
        }
        GateKind::Rz(a) => [
            [Complex64::from_polar(1.0, -a / 2.0), z],
            [z, Complex64::from_polar(1.0, a / 2.0)],
        ],
        _ => return None,
    };
    Some(m)
}

fn apply_single(data: &mut [Complex64], q: usize, m: &[[Complex64; 2]; 2]) {
    let mask = 1usize << q;
    let low = mask - 1;
    for pair in 0..data.len() / 2 {
        let i0 = ((pair & !low) << 1) | (pair & low);
        let i1 = i0 | mask;
        let a0 = data[i0];
        let a1 = data[i1];
        data[i0] = m[0][0] * a0 + m[0][1] * a1;
        data[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Gram matrix of the projected circuit columns: entry (i, j) is
/// `<c(e_i ⊗ 0...0), P c(e_j ⊗ 0...0)>` where `c` runs the circuit with the
/// trailing qubits zero-initialized and `P` projects `output_qubit` onto 1.
///
/// This one operator carries both membership tests (is a basis state in the
/// flagged subspace?) and acceptance maximization (which witness is most
/// likely accepted?): it is Hermitian with spectrum in [0, 1].
pub fn projected_gram(circuit: &Circuit, n_inputs: usize, output_qubit: usize) -> Result<CMatrix> {
    let n_total = circuit.n_qubits();
    if n_inputs == 0 || n_inputs > n_total {
        return Err(Error::dimension(format!(
            "{} input qubits out of {} total",
            n_inputs, n_total
        )));
    }
    if output_qubit >= n_total {
        return Err(Error::QubitOutOfRange { index: output_qubit, n_qubits: n_total });
    }
    if n_inputs > MAX_UNITARY_QUBITS {
        return Err(Error::DenseLimit {
            what: "projected Gram matrix",
            needed: n_inputs,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << n_inputs;
    let ancillas = StateVector::zero_state(n_total - n_inputs)?;
    let mut projected: Vec<StateVector> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut state = StateVector::basis(n_inputs, j)?.tensor(&ancillas)?;
        state.apply_circuit(circuit)?;
        projected.push(state.project_bit(output_qubit, true)?);
    }
    let mut gram = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let v = projected[r].inner(&projected[c])?;
            gram[(r, c)] = v;
            gram[(c, r)] = v.conj();
        }
    }
    Ok(gram)
}

/// Materialize the full unitary of `circuit` by applying it to every basis
/// state; column `j` is the image of basis state `j`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::DenseLimit {
            what: "dense unitary",
            needed: n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut u = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut col = StateVector::basis(n, j)?;
        col.apply_circuit(circuit)?;
        u.column_mut(j).copy_from_slice(col.amplitudes());
    }
    Ok(u)
}

/// Largest singular value of `m`, estimated to about 1e-12 relative accuracy
/// with a reproducible default seed.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    operator_norm_with_seed(m, DEFAULT_NORM_SEED)
}

/// Power iteration on `m* m` from a seeded random start. Deterministic for a
/// fixed seed; different seeds vary only the start vector.
pub fn operator_norm_with_seed(m: &CMatrix, seed: u64) -> Result<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let mh = m.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVector::from_fn(m.ncols(), |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let vn = v.norm();
    if vn == 0.0 {
        // unreachable for any real rng draw, but keep the math total
        v[0] = Complex64::ONE;
    } else {
        v /= Complex64::new(vn, 0.0);
    }
    const MAX_ITERS: usize = 10_000;
    let mut lambda_prev = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let w = m * &v;
        let lambda = w.norm_squared();
        if lambda == 0.0 {
            return Ok(0.0);
        }
        if (lambda - lambda_prev).abs() <= 1e-12 * lambda.max(1.0) {
            return Ok(lambda.sqrt());
        }
        lambda_prev = lambda;
        let u = &mh * &w;
        let un = u.norm();
        if un == 0.0 {
            return Ok(lambda.sqrt());
        }
        v = u / Complex64::new(un, 0.0);
    }
    Err(Error::NoConvergence { iterations: MAX_ITERS })
}

/// Eigendecomposition of a unitary matrix.
///
/// `phases[j]` lies in `[0, 2pi)` and `vectors.column(j)` is a unit
/// eigenvector with eigenvalue `e^{i phases[j]}`. Phases are sorted
/// ascending.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub phases: Vec<f64>,
    pub vectors: CMatrix,
}

/// Maximum entrywise deviation of `u* u` from the identity.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            let want = if r == c { Complex64::ONE } else { Complex64::ZERO };
            dev = dev.max((g[(r, c)] - want).norm());
        }
    }
    dev
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::dimension(format!(
            "matrix is {}x{}, expected square",
            u.nrows(),
            u.ncols()
        )));
    }
    let deviation = unitarity_deviation(u);
    if deviation > 1e-8 {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending by
/// eigenvalue. The input is re-symmetrized first, so tiny Hermiticity
/// violations from accumulated roundoff are harmless.
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::dimension(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).copy_from(&eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Joint-diagonalization eigensolver for unitaries.
///
/// A unitary U splits into the commuting Hermitian pair H = (U + U*)/2 and
/// K = (U - U*)/(2i). Eigenvectors of H with distinct eigenvalues are
/// eigenvectors of U; inside an H-eigenspace (cos theta ties, e.g. theta and
/// -theta) K separates the tie. Each joint vector's eigenvalue is read off
/// as the Rayleigh quotient v* U v, which is quadratically insensitive to
/// the basis error inside near-degenerate clusters.
pub fn unitary_eigensystem(u: &CMatrix) -> Result<UnitaryEigen> {
    check_unitary(u)?;
    let dim = u.nrows();
    if dim == 0 {
        return Ok(UnitaryEigen { phases: Vec::new(), vectors: CMatrix::zeros(0, 0) });
    }
    let half = Complex64::new(0.5, 0.0);
    let h = (u + u.adjoint()) * half;
    let (h_values, h_vectors) = hermitian_eigensystem(&h)?;

    let mut phases = Vec::with_capacity(dim);
    let mut vectors = CMatrix::zeros(dim, dim);
    let mut filled = 0usize;
    let mut start = 0usize;
    while start < dim {
        let mut end = start + 1;
        while end < dim && h_values[end] - h_values[end - 1] <= 1e-8 {
            end += 1;
        }
        let block = h_vectors.columns(start, end - start).clone_owned();
        let joint = if end - start == 1 {
            block
        } else {
            // resolve the cluster with K restricted to its span
            let k = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
            let compressed = block.adjoint() * &k * &block;
            let (_, w) = hermitian_eigensystem(&compressed)?;
            block * w
        };
        for col in joint.column_iter() {
            let mut v = col.clone_owned();
            let n = v.norm();
            if n > 0.0 {
                v /= Complex64::new(n, 0.0);
            }
            let lambda = v.dotc(&(u * &v));
            let modulus_error = (lambda.norm() - 1.0).abs();
            if modulus_error > 1e-8 {
                return Err(Error::NotUnitary { deviation: modulus_error });
            }
            let mut theta = lambda.arg();
            if theta < 0.0 {
                theta += TWO_PI;
            }
            if theta >= TWO_PI - 1e-12 {
                theta = 0.0;
            }
            phases.push(theta);
            vectors.column_mut(filled).copy_from(&v);
            filled += 1;
        }
        start = end;
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let sorted_phases: Vec<f64> = order.iter().map(|&j| phases[j]).collect();
    let mut sorted_vectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.column_mut(dst).copy_from(&vectors.column(src));
    }
    Ok(UnitaryEigen { phases: sorted_phases, vectors: sorted_vectors })
}

/// Sorted eigenphases of a unitary, each in `[0, 2pi)`.
pub fn eigenphases(u: &CMatrix) -> Result<Vec<f64>> {
    unitary_eigensystem(u).map(|e| e.phases)
}
