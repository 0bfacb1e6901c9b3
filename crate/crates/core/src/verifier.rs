//! Verifier acceptance semantics, phase estimation, and the construction
//! of a verifier circuit that tests two circuits for equivalence up to a
//! global phase.
//!
//! A verifier is a circuit with a witness register, zero-initialized
//! ancillas, and one output qubit; it accepts when the output reads 1. The
//! equivalence verifier runs phase estimation of `a = y* x` on two witness
//! registers, optionally checks subspace membership flags, and accepts when
//! the two phase readings differ by enough. Its acceptance probability can
//! be computed two independent ways: by dense simulation of the emitted
//! circuit, or by the closed-form kernel over `a`'s eigenbasis implemented
//! in [`equivalence_acceptance`]. Tests hold the two routes together.

use crate::circuit::{controlled, Circuit, Control, Gate};
use crate::error::{Error, Result};
use crate::sim::{
    circuit_unitary, hermitian_eigensystem, projected_gram, unitary_eigensystem, CMatrix,
    StateVector, MAX_STATE_QUBITS,
};
use crate::spectral::{check_thresholds, minimal_covering_arc};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Largest witness register the acceptance maximizer will diagonalize.
pub const MAX_WITNESS_QUBITS: usize = 10;
/// Largest phase register, for both the readout kernel and the histogram.
pub const MAX_PHASE_BITS: usize = 12;

/// A verifier: a circuit whose first `n_inputs` qubits take the witness,
/// whose remaining qubits are zero-initialized ancillas, and whose
/// `output_qubit` is measured to accept. `epsilon`, when declared, is the
/// promised error bound.
#[derive(Debug, Clone)]
pub struct VerifierSpec {
    circuit: Circuit,
    n_inputs: usize,
    output_qubit: usize,
    epsilon: Option<f64>,
}

impl VerifierSpec {
    pub fn new(
        circuit: Circuit,
        n_inputs: usize,
        output_qubit: usize,
        epsilon: Option<f64>,
    ) -> Result<VerifierSpec> {
        let n_total = circuit.n_qubits();
        if n_inputs == 0 || n_inputs > n_total {
            return Err(Error::invalid(format!(
                "verifier needs between 1 and {} input qubits, got {}",
                n_total, n_inputs
            )));
        }
        if output_qubit >= n_total {
            return Err(Error::QubitOutOfRange { index: output_qubit, n_qubits: n_total });
        }
        if let Some(e) = epsilon {
            if !(e > 0.0 && e <= 1.0 / 3.0) {
                return Err(Error::invalid(format!(
                    "declared error bound must lie in (0, 1/3], got {}",
                    e
                )));
            }
        }
        Ok(VerifierSpec { circuit, n_inputs, output_qubit, epsilon })
    }

    /// Read the input/ancilla split and output qubit from the circuit's
    /// annotations; ancillas default to 0 and the output to the last qubit.
    pub fn from_annotations(circuit: Circuit) -> Result<VerifierSpec> {
        let n_ancillas = circuit.ancilla_count().unwrap_or(0);
        let output_qubit = circuit.output_qubit().unwrap_or(circuit.n_qubits() - 1);
        let n_total = circuit.n_qubits();
        if n_ancillas >= n_total {
            return Err(Error::invalid(format!(
                "{} ancillas leave no input qubits in a {}-qubit verifier",
                n_ancillas, n_total
            )));
        }
        VerifierSpec::new(circuit, n_total - n_ancillas, output_qubit, None)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_ancillas(&self) -> usize {
        self.circuit.n_qubits() - self.n_inputs
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }
}

/// The state offered to a verifier's witness register: a pure state or a
/// convex mixture of pure states.
#[derive(Debug, Clone)]
pub enum Witness {
    Pure(StateVector),
    Mixture(Vec<(f64, StateVector)>),
}

/// Exact probability that the verifier's output qubit reads 1 on this
/// witness. Mixtures are convex combinations of the pure-state runs; that
/// is exactly the trace formula for a mixed witness, by linearity.
pub fn acceptance_probability(v: &VerifierSpec, w: &Witness) -> Result<f64> {
    match w {
        Witness::Pure(state) => {
            if state.n_qubits() != v.n_inputs {
                return Err(Error::QubitCountMismatch {
                    left: state.n_qubits(),
                    right: v.n_inputs,
                });
            }
            let mut full = state.tensor(&StateVector::zero_state(v.n_ancillas())?)?;
            full.apply_circuit(&v.circuit)?;
            full.probability_of_bit(v.output_qubit, true)
        }
        Witness::Mixture(parts) => {
            if parts.is_empty() {
                return Err(Error::invalid("mixture must contain at least one state"));
            }
            let total: f64 = parts.iter().map(|(w, _)| *w).sum();
            if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "mixture weights must be nonnegative and sum to 1 (sum = {})",
                    total
                )));
            }
            let mut p = 0.0;
            for (weight, state) in parts {
                p += weight * acceptance_probability(v, &Witness::Pure(state.clone()))?;
            }
            Ok(p)
        }
    }
}

/// The best witness and its acceptance probability.
#[derive(Debug, Clone)]
pub struct MaxAcceptance {
    pub p_max: f64,
    pub witness: StateVector,
}

/// Maximize acceptance over all witnesses: the top eigenpair of the
/// compressed operator `Q = (1 ⊗ <0...0|) U* P U (1 ⊗ |0...0>)` on the
/// witness register. Every witness satisfies
/// `acceptance_probability <= p_max`.
pub fn max_acceptance(v: &VerifierSpec) -> Result<MaxAcceptance> {
    if v.n_inputs > MAX_WITNESS_QUBITS {
        return Err(Error::DenseLimit {
            what: "witness register",
            needed: v.n_inputs,
            limit: MAX_WITNESS_QUBITS,
        });
    }
    let q = projected_gram(&v.circuit, v.n_inputs, v.output_qubit)?;
    let (values, vectors) = hermitian_eigensystem(&q)?;
    let top = values.len() - 1;
    let p_max = values[top].clamp(0.0, 1.0);
    let mut col: Vec<Complex64> = vectors.column(top).iter().copied().collect();
    let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in &mut col {
            *a /= norm;
        }
    }
    Ok(MaxAcceptance { p_max, witness: StateVector::from_raw(v.n_inputs, col) })
}

/// Which side of the acceptance promise a verifier falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerifierClass {
    Case1,
    Case2,
    PromiseViolated,
}

/// CASE1 when `p_max >= 1 - epsilon` (some witness is accepted with high
/// probability), CASE2 when `p_max <= epsilon` (every witness is rejected
/// with high probability).
pub fn classify_acceptance(p_max: f64, epsilon: f64) -> Result<VerifierClass> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::invalid(format!(
            "error bound must lie in (0, 1/2), got {}",
            epsilon
        )));
    }
    Ok(if p_max >= 1.0 - epsilon {
        VerifierClass::Case1
    } else if p_max <= epsilon {
        VerifierClass::Case2
    } else {
        VerifierClass::PromiseViolated
    })
}

pub fn classify_verifier(v: &VerifierSpec, epsilon: f64) -> Result<VerifierClass> {
    classify_acceptance(max_acceptance(v)?.p_max, epsilon)
}

/// Unit eigenvectors of `a` at the two endpoints of the minimal covering
/// arc of its spectrum: the witness pair with the widest certifiable phase
/// separation.
#[derive(Debug, Clone)]
pub struct ExtremalPair {
    pub vector_start: StateVector,
    pub vector_end: StateVector,
    pub phase_start: f64,
    pub phase_end: f64,
}

impl ExtremalPair {
    /// Chord between the endpoint eigenvalues, `2 sin(L/2)` for arc
    /// length L.
    pub fn chord(&self) -> f64 {
        let l = (self.phase_end - self.phase_start).rem_euclid(TWO_PI);
        2.0 * (l / 2.0).sin()
    }
}

/// Find the arc-endpoint eigenvectors of a unitary. Errors when the
/// spectrum is a single point (no pair separates anything).
pub fn find_extremal_eigenvectors(a: &CMatrix) -> Result<ExtremalPair> {
    let eig = unitary_eigensystem(a)?;
    let arc = minimal_covering_arc(&eig.phases)?;
    if arc.length < 1e-12 {
        return Err(Error::DegenerateSpectrum);
    }
    let start_idx = eig
        .phases
        .iter()
        .position(|&p| p == arc.start)
        .expect("arc start is one of the phases");
    let mut end_idx = start_idx;
    let mut best_offset = 0.0;
    for (j, &p) in eig.phases.iter().enumerate() {
        let offset = (p - arc.start).rem_euclid(TWO_PI);
        if offset <= arc.length + 1e-9 && offset >= best_offset {
            best_offset = offset;
            end_idx = j;
        }
    }
    let n_qubits = a.nrows().trailing_zeros() as usize;
    let take = |idx: usize| {
        let mut col: Vec<Complex64> = eig.vectors.column(idx).iter().copied().collect();
        let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut col {
            *a /= norm;
        }
        StateVector::from_raw(n_qubits, col)
    };
    Ok(ExtremalPair {
        vector_start: take(start_idx),
        vector_end: take(end_idx),
        phase_start: eig.phases[start_idx],
        phase_end: eig.phases[end_idx],
    })
}

/// Witness for the two-register equivalence verifier: `start` goes to the
/// low register, `end` to the high one.
pub fn pair_witness(start: &StateVector, end: &StateVector) -> Result<StateVector> {
    start.tensor(end)
}

/// Complex readout amplitude of phase estimation: the coefficient of
/// outcome `y` when estimating eigenphase `theta` with `t_bits` bits.
fn qpe_amplitude(theta: f64, y: usize, t_bits: usize) -> Complex64 {
    let t = (1usize << t_bits) as f64;
    let delta = theta - TWO_PI * (y as f64) / t;
    let den = Complex64::from_polar(1.0, delta) - Complex64::ONE;
    if den.norm() < 1e-12 {
        // delta is 0 mod 2pi: every term of the geometric sum is 1
        return Complex64::ONE;
    }
    let num = Complex64::from_polar(1.0, t * delta) - Complex64::ONE;
    num / den / Complex64::new(t, 0.0)
}

/// Probability that phase estimation of eigenphase `theta` with `t_bits`
/// bits reads outcome `y`.
pub fn qpe_kernel(theta: f64, y: usize, t_bits: usize) -> f64 {
    qpe_amplitude(theta, y, t_bits).norm_sqr()
}

fn check_phase_bits(t_bits: usize) -> Result<()> {
    if t_bits > MAX_PHASE_BITS {
        return Err(Error::DenseLimit {
            what: "phase register",
            needed: t_bits,
            limit: MAX_PHASE_BITS,
        });
    }
    Ok(())
}

/// Outcome distribution of `t_bits`-bit phase estimation of `a` on state
/// `psi`: `Pr[y] = sum_j |c_j|^2 K(theta_j, y)` over `psi`'s eigenbasis
/// coefficients.
pub fn qpe_distribution(a: &CMatrix, psi: &StateVector, t_bits: usize) -> Result<Vec<f64>> {
    if t_bits == 0 {
        return Err(Error::invalid("phase estimation needs at least one bit"));
    }
    check_phase_bits(t_bits)?;
    if a.nrows() != psi.dim() {
        return Err(Error::dimension(format!(
            "operator dimension {} does not match state dimension {}",
            a.nrows(),
            psi.dim()
        )));
    }
    let eig = unitary_eigensystem(a)?;
    let psi_vec = psi.to_vector();
    let coeffs = eig.vectors.adjoint() * psi_vec;
    let t = 1usize << t_bits;
    let mut dist = vec![0.0; t];
    for (j, &theta) in eig.phases.iter().enumerate() {
        let weight = coeffs[j].norm_sqr();
        if weight < 1e-300 {
            continue;
        }
        for (y, p) in dist.iter_mut().enumerate() {
            *p += weight * qpe_kernel(theta, y, t_bits);
        }
    }
    Ok(dist)
}

/// Parameters of the equivalence verifier: phase-register width and the
/// promise thresholds it must distinguish.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquivalenceParams {
    /// Phase-register bits per witness register.
    pub t: usize,
    pub delta: f64,
    pub mu: f64,
    /// Accept when the estimated chord reaches this value; the squared
    /// threshold is the midpoint of the promise gap in squared-chord units.
    pub chord_threshold: f64,
}

impl EquivalenceParams {
    /// Pick the phase-register width from the promise gap: the readout bin
    /// width `2pi/2^t` may shift the squared chord by at most `8pi/2^t`,
    /// which is held to half the gap `delta^2 - mu^2`.
    pub fn for_promise(delta: f64, mu: f64) -> Result<EquivalenceParams> {
        check_thresholds(delta, mu)?;
        let needed = (8.0 * PI / (delta * delta - mu * mu)).log2().ceil() as usize;
        EquivalenceParams::with_bits(needed.max(4), delta, mu)
    }

    /// Explicit phase-register width. Widths below the `for_promise` sizing
    /// rule are allowed; accuracy is then the caller's responsibility.
    pub fn with_bits(t: usize, delta: f64, mu: f64) -> Result<EquivalenceParams> {
        check_thresholds(delta, mu)?;
        if t < 2 {
            return Err(Error::invalid(format!(
                "phase register needs at least 2 bits, got {}",
                t
            )));
        }
        check_phase_bits(t)?;
        let chord_threshold = ((delta * delta + mu * mu) / 2.0).sqrt();
        Ok(EquivalenceParams { t, delta, mu, chord_threshold })
    }

    /// Chord implied by a circular bin difference: the readouts disagree by
    /// `dbin` bins out of `2^t`, i.e. by angle `2pi dbin / 2^t`.
    pub fn chord_of_difference(&self, dbin: usize) -> f64 {
        let t = (1usize << self.t) as f64;
        2.0 * (PI * (dbin as f64) / t).sin().abs()
    }

    /// The classical accept predicate on the circular outcome difference.
    pub fn accepts_difference(&self, dbin: usize) -> bool {
        self.chord_of_difference(dbin) >= self.chord_threshold
    }
}

/// Acceptance probability of the equivalence verifier, computed in the
/// eigenbasis of `a = y* x` without building the verifier circuit.
///
/// The witness lives on `2n` qubits (low register estimates against the
/// high one). Expanding it as a matrix `C` over eigenvector pairs, the
/// probability of reading `(y_a, y_b)` with both membership flags set is
/// `sum conj(C) .* (R(y_a) C R(y_b)^T)` where `R(y)` scales the compressed
/// membership operator by readout amplitudes. Summing over accepted
/// outcome pairs gives the exact acceptance probability, including all
/// cross terms of entangled witnesses.
pub fn equivalence_acceptance(
    x: &Circuit,
    y: &Circuit,
    subspace: Option<&crate::spectral::SubspaceSpec>,
    witness: &StateVector,
    params: &EquivalenceParams,
) -> Result<f64> {
    let n = x.n_qubits();
    if witness.n_qubits() != 2 * n {
        return Err(Error::QubitCountMismatch {
            left: witness.n_qubits(),
            right: 2 * n,
        });
    }
    let a = circuit_unitary(&x.concat(&y.inverse())?)?;
    let eig = unitary_eigensystem(&a)?;
    let dim = a.nrows();

    // witness as a matrix over (low register, high register) indices
    let mut wmat = CMatrix::zeros(dim, dim);
    let amps = witness.amplitudes();
    for ib in 0..dim {
        for ia in 0..dim {
            wmat[(ia, ib)] = amps[ia + (ib << n)];
        }
    }
    let c = eig.vectors.adjoint() * &wmat * eig.vectors.conjugate();

    // membership operator compressed into the eigenbasis
    let f = match subspace {
        None => CMatrix::identity(dim, dim),
        Some(spec) => {
            if spec.n_inputs() != n {
                return Err(Error::QubitCountMismatch { left: spec.n_inputs(), right: n });
            }
            let m = projected_gram(spec.circuit(), spec.n_inputs(), spec.output_qubit())?;
            eig.vectors.adjoint() * m * &eig.vectors
        }
    };

    let t = 1usize << params.t;
    let gammas: Vec<Vec<Complex64>> = eig
        .phases
        .iter()
        .map(|&theta| (0..t).map(|y| qpe_amplitude(theta, y, params.t)).collect())
        .collect();
    let r_of = |y: usize| -> CMatrix {
        CMatrix::from_fn(dim, dim, |p, q| gammas[p][y].conj() * f[(p, q)] * gammas[q][y])
    };
    let r: Vec<CMatrix> = (0..t).map(r_of).collect();
    // s(y_a) = C* R(y_a) C; each outcome pair then costs only an
    // elementwise dot with R(y_b)
    let s: Vec<CMatrix> = r.iter().map(|ra| c.adjoint() * ra * &c).collect();

    let mut total = Complex64::ZERO;
    for (ya, sa) in s.iter().enumerate() {
        for (yb, rb) in r.iter().enumerate() {
            if !params.accepts_difference((ya + t - yb) % t) {
                continue;
            }
            let mut term = Complex64::ZERO;
            for q in 0..dim {
                for p in 0..dim {
                    term += sa[(p, q)] * rb[(p, q)];
                }
            }
            total += term;
        }
    }
    Ok(total.re.clamp(0.0, 1.0))
}

/// Quantum Fourier transform on `t_bits` qubits (qubit 0 least
/// significant): the unitary with entries `omega^{rc} / sqrt(2^t)` for
/// `omega = e^{2 pi i / 2^t}`. The readout stage of phase estimation is
/// its inverse.
pub fn fourier_circuit(t_bits: usize) -> Result<Circuit> {
    if t_bits == 0 {
        return Err(Error::invalid("Fourier transform needs at least one qubit"));
    }
    let mut c = Circuit::new(t_bits);
    for i in (0..t_bits).rev() {
        c.push(Gate::h(i))?;
        for j in 0..i {
            c.push(Gate::cp(PI / (1usize << (i - j)) as f64, vec![], vec![j, i]))?;
        }
    }
    for k in 0..t_bits / 2 {
        c.push(Gate::swap(k, t_bits - 1 - k))?;
    }
    Ok(c)
}

/// Largest register the equivalence-verifier builder accepts per compared
/// circuit, so the composite stays simulable.
pub const MAX_BUILD_QUBITS: usize = 5;

/// Emit the equivalence verifier as an ordinary circuit.
///
/// Register layout, низкий to high: witness a (n), witness b (n), then with
/// a subspace two ancilla blocks (m each) and two membership flags, then
/// two phase registers (t each), then the output qubit. The witness
/// registers are the verifier input; everything else is ancilla.
///
/// Stages: phase registers into uniform superposition; controlled powers
/// of `a = y* x` on each witness register; inverse Fourier readout;
/// membership circuits plus flag copy-out (after the estimation, so the
/// transformed witness registers are never reused); one multi-controlled
/// phase flip of the output per accepted readout pattern.
pub fn build_equivalence_verifier(
    x: &Circuit,
    y: &Circuit,
    subspace: Option<&crate::spectral::SubspaceSpec>,
    params: &EquivalenceParams,
) -> Result<VerifierSpec> {
    let n = x.n_qubits();
    if y.n_qubits() != n {
        return Err(Error::QubitCountMismatch { left: n, right: y.n_qubits() });
    }
    if n > MAX_BUILD_QUBITS {
        return Err(Error::DenseLimit {
            what: "equivalence verifier witness register",
            needed: n,
            limit: MAX_BUILD_QUBITS,
        });
    }
    if let Some(spec) = subspace {
        if spec.n_inputs() != n {
            return Err(Error::QubitCountMismatch { left: spec.n_inputs(), right: n });
        }
    }
    let m = subspace.map_or(0, |s| s.n_ancillas());
    let t = params.t;
    let flags = if subspace.is_some() { 2 } else { 0 };
    let total = 2 * n + 2 * m + flags + 2 * t + 1;
    if total > MAX_STATE_QUBITS {
        return Err(Error::DenseLimit {
            what: "equivalence verifier register",
            needed: total,
            limit: MAX_STATE_QUBITS,
        });
    }
    let wa: Vec<usize> = (0..n).collect();
    let wb: Vec<usize> = (n..2 * n).collect();
    let anc_a: Vec<usize> = (2 * n..2 * n + m).collect();
    let anc_b: Vec<usize> = (2 * n + m..2 * n + 2 * m).collect();
    let flag_a = 2 * n + 2 * m;
    let flag_b = flag_a + 1;
    let pa_base = 2 * n + 2 * m + flags;
    let pa: Vec<usize> = (pa_base..pa_base + t).collect();
    let pb: Vec<usize> = (pa_base + t..pa_base + 2 * t).collect();
    let out = total - 1;

    let mut c = Circuit::new(total);
    for &q in pa.iter().chain(&pb) {
        c.push(Gate::h(q))?;
    }

    // controlled powers: bit j of a phase register applies a 2^j times
    let a_circ = x.concat(&y.inverse())?;
    for (reg, phase) in [(&wa, &pa), (&wb, &pb)] {
        let embedded = a_circ.embed(total, reg)?;
        for (j, &ctrl) in phase.iter().enumerate() {
            for _ in 0..1usize << j {
                for gate in embedded.gates() {
                    for g in controlled(gate, ctrl)? {
                        c.push(g)?;
                    }
                }
            }
        }
    }

    let readout = fourier_circuit(t)?.inverse();
    for phase in [&pa, &pb] {
        let embedded = readout.embed(total, phase)?;
        for gate in embedded.gates() {
            c.push(gate.clone())?;
        }
    }

    if let Some(spec) = subspace {
        for (reg, anc, flag) in [(&wa, &anc_a, flag_a), (&wb, &anc_b, flag_b)] {
            let mut map: Vec<usize> = reg.clone();
            map.extend(anc);
            let embedded = spec.circuit().embed(total, &map)?;
            for gate in embedded.gates() {
                c.push(gate.clone())?;
            }
            c.push(Gate::cx(map[spec.output_qubit()], flag))?;
        }
    }

    // accept block: out flips on exactly the accepted readout patterns
    let bit_controls = |value: usize, qubits: &[usize]| -> Vec<Control> {
        qubits
            .iter()
            .enumerate()
            .map(|(r, &q)| {
                if value >> r & 1 == 1 {
                    Control::one(q)
                } else {
                    Control::zero(q)
                }
            })
            .collect()
    };
    c.push(Gate::h(out))?;
    let t_dim = 1usize << t;
    for ya in 0..t_dim {
        for yb in 0..t_dim {
            if !params.accepts_difference((ya + t_dim - yb) % t_dim) {
                continue;
            }
            let mut controls = bit_controls(ya, &pa);
            controls.extend(bit_controls(yb, &pb));
            if subspace.is_some() {
                controls.push(Control::one(flag_a));
                controls.push(Control::one(flag_b));
            }
            c.push(Gate::cp(PI, controls, vec![out]))?;
        }
    }
    c.push(Gate::h(out))?;

    c.set_output_qubit(Some(out))?;
    c.set_ancilla_count(Some(total - 2 * n))?;
    VerifierSpec::new(c, 2 * n, out, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    }

    fn basis_witness(n: usize, idx: usize) -> Witness {
        Witness::Pure(StateVector::basis(n, idx).unwrap())
    }

    #[test]
    fn acceptance_of_constant_verifiers() {
        let accept = VerifierSpec::from_annotations(
            Circuit::parse("qubits 2\noutput 1\nancillas 1\nx 1\n").unwrap(),
        )
        .unwrap();
        let reject = VerifierSpec::from_annotations(
            Circuit::parse("qubits 2\noutput 1\nancillas 1\n").unwrap(),
        )
        .unwrap();
        let coin = VerifierSpec::from_annotations(
            Circuit::parse("qubits 2\noutput 1\nancillas 1\nh 1\n").unwrap(),
        )
        .unwrap();
        for idx in 0..2 {
            assert_close(acceptance_probability(&accept, &basis_witness(1, idx)).unwrap(), 1.0, 1e-12);
            assert_close(acceptance_probability(&reject, &basis_witness(1, idx)).unwrap(), 0.0, 1e-12);
            assert_close(acceptance_probability(&coin, &basis_witness(1, idx)).unwrap(), 0.5, 1e-12);
        }
    }

    #[test]
    fn mixture_is_convex_combination() {
        let v = VerifierSpec::from_annotations(
            Circuit::parse("qubits 2\noutput 1\nancillas 1\ncx 0 1\n").unwrap(),
        )
        .unwrap();
        let w = Witness::Mixture(vec![
            (0.25, StateVector::basis(1, 0).unwrap()),
            (0.75, StateVector::basis(1, 1).unwrap()),
        ]);
        assert_close(acceptance_probability(&v, &w).unwrap(), 0.75, 1e-12);
        let bad = Witness::Mixture(vec![(0.5, StateVector::basis(1, 0).unwrap())]);
        assert!(acceptance_probability(&v, &bad).is_err());
    }

    #[test]
    fn max_acceptance_finds_the_flagged_state() {
        let v = VerifierSpec::from_annotations(
            Circuit::parse("qubits 2\noutput 1\nancillas 1\ncx 0 1\n").unwrap(),
        )
        .unwrap();
        let ma = max_acceptance(&v).unwrap();
        assert_close(ma.p_max, 1.0, 1e-10);
        assert_close(ma.witness.amplitudes()[1].norm(), 1.0, 1e-9);
        let p = acceptance_probability(&v, &Witness::Pure(ma.witness)).unwrap();
        assert_close(p, 1.0, 1e-10);
    }

    #[test]
    fn classification_covers_all_three_cases() {
        assert_eq!(classify_acceptance(1.0, 0.1).unwrap(), VerifierClass::Case1);
        assert_eq!(classify_acceptance(0.0, 0.1).unwrap(), VerifierClass::Case2);
        assert_eq!(classify_acceptance(0.5, 0.1).unwrap(), VerifierClass::PromiseViolated);
        assert!(classify_acceptance(0.5, 0.6).is_err());
    }

    #[test]
    fn extremal_pair_of_z() {
        let u = circuit_unitary(&Circuit::parse("qubits 1\nz 0\n").unwrap()).unwrap();
        let pair = find_extremal_eigenvectors(&u).unwrap();
        assert_close(pair.phase_start, 0.0, 1e-12);
        assert_close(pair.phase_end, PI, 1e-12);
        assert_close(pair.chord(), 2.0, 1e-12);
        assert_close(pair.vector_start.amplitudes()[0].norm(), 1.0, 1e-9);
        assert_close(pair.vector_end.amplitudes()[1].norm(), 1.0, 1e-9);
    }

    #[test]
    fn degenerate_spectrum_has_no_pair() {
        let u = CMatrix::identity(4, 4);
        assert!(matches!(
            find_extremal_eigenvectors(&u),
            Err(Error::DegenerateSpectrum)
        ));
    }

    #[test]
    fn qpe_is_exact_on_dyadic_phases() {
        let u = circuit_unitary(&Circuit::parse("qubits 1\ns 0\n").unwrap()).unwrap();
        // eigenphase pi/2 of |1> is bin 2 of 8
        let dist = qpe_distribution(&u, &StateVector::basis(1, 1).unwrap(), 3).unwrap();
        assert_close(dist[2], 1.0, 1e-12);
        let mixed = StateVector::from_amplitudes(
            1,
            vec![
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let dist = qpe_distribution(&u, &mixed, 3).unwrap();
        assert_close(dist[0], 0.5, 1e-12);
        assert_close(dist[2], 0.5, 1e-12);
    }

    #[test]
    fn qpe_distribution_is_normalized_off_dyadic() {
        let u = circuit_unitary(&Circuit::parse("qubits 1\nrz 0 1.23\n").unwrap()).unwrap();
        let psi = StateVector::basis(1, 1).unwrap();
        let dist = qpe_distribution(&u, &psi, 5).unwrap();
        assert_close(dist.iter().sum::<f64>(), 1.0, 1e-10);
        assert!(dist.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn fourier_circuit_matches_the_transform_matrix() {
        for t in 1..=3usize {
            let dim = 1 << t;
            let u = circuit_unitary(&fourier_circuit(t).unwrap()).unwrap();
            let omega = TWO_PI / dim as f64;
            let scale = 1.0 / (dim as f64).sqrt();
            for r in 0..dim {
                for col in 0..dim {
                    let want = Complex64::from_polar(scale, omega * (r * col % dim) as f64);
                    assert!(
                        (u[(r, col)] - want).norm() < 1e-12,
                        "t={} entry ({},{}): {} vs {}",
                        t,
                        r,
                        col,
                        u[(r, col)],
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn params_sizing_rule() {
        let delta = 2.0 * (PI / 8.0).sin();
        let p = EquivalenceParams::for_promise(delta, 0.2).unwrap();
        assert_eq!(p.t, 6);
        assert_close(
            p.chord_threshold * p.chord_threshold,
            (delta * delta + 0.04) / 2.0,
            1e-12,
        );
        let q = EquivalenceParams::with_bits(4, delta, 0.2).unwrap();
        assert_eq!(q.t, 4);
        assert!(EquivalenceParams::with_bits(1, delta, 0.2).is_err());
        assert!(EquivalenceParams::with_bits(4, 0.1, 0.2).is_err());
    }

    #[test]
    fn dyadic_honest_pair_is_always_accepted() {
        let x = Circuit::parse("qubits 1\ns 0\n").unwrap();
        let y = Circuit::new(1);
        let params = EquivalenceParams::with_bits(4, 2.0 * (PI / 8.0).sin(), 0.2).unwrap();
        let a = circuit_unitary(&x.concat(&y.inverse()).unwrap()).unwrap();
        let pair = find_extremal_eigenvectors(&a).unwrap();
        assert_close(pair.phase_end - pair.phase_start, FRAC_PI_2, 1e-12);
        let w = pair_witness(&pair.vector_start, &pair.vector_end).unwrap();
        let p = equivalence_acceptance(&x, &y, None, &w, &params).unwrap();
        assert_close(p, 1.0, 1e-12);
        // identical circuits leave nothing to detect
        let w0 = pair_witness(&pair.vector_start, &pair.vector_start).unwrap();
        let p0 = equivalence_acceptance(&x, &x, None, &w0, &params).unwrap();
        assert_close(p0, 0.0, 1e-12);
    }

    #[test]
    fn built_verifier_agrees_with_the_kernel() {
        let x = Circuit::parse("qubits 1\ns 0\n").unwrap();
        let y = Circuit::new(1);
        let params = EquivalenceParams::with_bits(3, 2.0 * (PI / 8.0).sin(), 0.2).unwrap();
        let built = build_equivalence_verifier(&x, &y, None, &params).unwrap();
        assert_eq!(built.n_inputs(), 2);
        assert_eq!(built.output_qubit(), built.circuit().n_qubits() - 1);
        let a = circuit_unitary(&x.concat(&y.inverse()).unwrap()).unwrap();
        let pair = find_extremal_eigenvectors(&a).unwrap();
        let w = pair_witness(&pair.vector_start, &pair.vector_end).unwrap();
        let direct = acceptance_probability(&built, &Witness::Pure(w.clone())).unwrap();
        let kernel = equivalence_acceptance(&x, &y, None, &w, &params).unwrap();
        assert_close(direct, kernel, 1e-9);
        assert_close(direct, 1.0, 1e-9);
    }

    #[test]
    fn built_verifier_register_cap() {
        let x = Circuit::new(5);
        let params = EquivalenceParams::with_bits(8, 1.0, 0.1).unwrap();
        assert!(matches!(
            build_equivalence_verifier(&x, &x, None, &params),
            Err(Error::DenseLimit { .. })
        ));
    }
}
