//! Distance from a unitary to the nearest phase multiple of the identity,
//! and equivalence of two circuits up to such a phase, optionally
//! restricted to an invariant subspace.
//!
//! The distance is purely spectral: with eigenphases covered by a minimal
//! circular arc of length L, the operator-norm distance to the closest
//! `e^{i phi} 1` is `2 sin(L/4)`, attained at the phase pointing to the
//! middle of the arc. The arc is found by locating the largest gap between
//! circularly consecutive eigenphases.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::sim::{
    circuit_unitary, eigenphases, hermitian_eigensystem, operator_norm, projected_gram, CMatrix,
};
use serde::Serialize;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// The shortest circular arc containing a set of phases, as a start angle
/// and a length (both radians; the arc runs counterclockwise from `start`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringArc {
    pub start: f64,
    pub length: f64,
}

/// Minimal covering arc of a nonempty set of phases in `[0, 2pi)`.
///
/// Equal to the complement of the largest gap between circularly
/// consecutive phases. When several gaps tie for largest, the arc with the
/// smallest start angle is returned, so the result is deterministic.
pub fn minimal_covering_arc(phases: &[f64]) -> Result<CoveringArc> {
    if phases.is_empty() {
        return Err(Error::invalid("at least one phase is required"));
    }
    for &p in phases {
        if !p.is_finite() || !(0.0..TWO_PI).contains(&p) {
            return Err(Error::invalid(format!("phase {} outside [0, 2pi)", p)));
        }
    }
    let mut sorted = phases.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut best_gap = f64::NEG_INFINITY;
    let mut best_start = f64::INFINITY;
    for i in 0..n {
        let (next, start) = if i + 1 == n {
            (sorted[0] + TWO_PI, sorted[0])
        } else {
            (sorted[i + 1], sorted[i + 1])
        };
        let gap = next - sorted[i];
        if gap > best_gap || (gap == best_gap && start < best_start) {
            best_gap = gap;
            best_start = start;
        }
    }
    Ok(CoveringArc { start: best_start, length: (TWO_PI - best_gap).max(0.0) })
}

/// Spectral summary of a unitary: its eigenphases, the minimal arc covering
/// them, the phase of the closest phase multiple of the identity, and the
/// operator-norm distance to it.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub eigenphases: Vec<f64>,
    pub arc_start: f64,
    pub arc_length: f64,
    pub optimal_phase: f64,
    pub distance: f64,
}

/// Build the report from already-computed eigenphases in `[0, 2pi)`.
pub fn report_from_phases(eigenphases: Vec<f64>) -> Result<SpectralReport> {
    let arc = minimal_covering_arc(&eigenphases)?;
    let mut optimal_phase = (arc.start + arc.length / 2.0).rem_euclid(TWO_PI);
    if optimal_phase >= TWO_PI - 1e-12 {
        optimal_phase = 0.0;
    }
    Ok(SpectralReport {
        eigenphases,
        arc_start: arc.start,
        arc_length: arc.length,
        optimal_phase,
        distance: 2.0 * (arc.length / 4.0).sin(),
    })
}

/// Spectral summary of a unitary matrix.
pub fn spectral_report(u: &CMatrix) -> Result<SpectralReport> {
    report_from_phases(eigenphases(u)?)
}

/// `min over phi of ||u - e^{i phi} 1||` in the operator norm.
pub fn distance_to_phase_multiple(u: &CMatrix) -> Result<f64> {
    Ok(spectral_report(u)?.distance)
}

/// Outcome of a promise decision: close to a phase multiple of the
/// identity, far from every one, or in the excluded middle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Near,
    Far,
    PromiseViolated,
}

/// A decision together with the evidence it was made on.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityVerdict {
    pub verdict: Verdict,
    pub distance: f64,
    pub optimal_phase: f64,
    pub delta: f64,
    pub mu: f64,
}

/// Thresholds must satisfy `0 <= mu < delta <= 2`; 2 is the largest
/// possible distance between unitaries.
pub fn check_thresholds(delta: f64, mu: f64) -> Result<()> {
    let ok = delta.is_finite() && mu.is_finite() && 0.0 <= mu && mu < delta && delta <= 2.0;
    if !ok {
        return Err(Error::BadThresholds { delta, mu });
    }
    Ok(())
}

/// Apply the promise thresholds to a spectral report: NEAR when the
/// distance is at most `mu`, FAR when it is at least `delta`, and an
/// explicit promise violation in between (exact simulation can audit the
/// promise instead of assuming it).
pub fn decide_from_report(report: &SpectralReport, delta: f64, mu: f64) -> Result<IdentityVerdict> {
    check_thresholds(delta, mu)?;
    let verdict = if report.distance <= mu {
        Verdict::Near
    } else if report.distance >= delta {
        Verdict::Far
    } else {
        Verdict::PromiseViolated
    };
    Ok(IdentityVerdict {
        verdict,
        distance: report.distance,
        optimal_phase: report.optimal_phase,
        delta,
        mu,
    })
}

/// Is `circuit` within `mu` of some phase multiple of the identity, or at
/// least `delta` away from all of them?
pub fn decide_identity(circuit: &Circuit, delta: f64, mu: f64) -> Result<IdentityVerdict> {
    check_thresholds(delta, mu)?;
    let u = circuit_unitary(circuit)?;
    decide_from_report(&spectral_report(&u)?, delta, mu)
}

/// A subspace of an `n`-qubit space defined by a membership circuit: the
/// circuit runs on the `n` inputs plus zero-initialized ancillas and flags
/// membership on its output qubit.
#[derive(Debug, Clone)]
pub struct SubspaceSpec {
    circuit: Circuit,
    n_inputs: usize,
    n_ancillas: usize,
    output_qubit: usize,
}

impl SubspaceSpec {
    pub fn new(circuit: Circuit, n_ancillas: usize, output_qubit: usize) -> Result<SubspaceSpec> {
        let n_total = circuit.n_qubits();
        if n_ancillas >= n_total {
            return Err(Error::invalid(format!(
                "{} ancillas leave no input qubits in a {}-qubit membership circuit",
                n_ancillas, n_total
            )));
        }
        if output_qubit >= n_total {
            return Err(Error::QubitOutOfRange { index: output_qubit, n_qubits: n_total });
        }
        Ok(SubspaceSpec {
            circuit,
            n_inputs: n_total - n_ancillas,
            n_ancillas,
            output_qubit,
        })
    }

    /// Read the ancilla count and output qubit from the circuit's own
    /// annotations; ancillas default to 0 and the output to the last qubit.
    pub fn from_annotations(circuit: Circuit) -> Result<SubspaceSpec> {
        let n_ancillas = circuit.ancilla_count().unwrap_or(0);
        let output_qubit = circuit.output_qubit().unwrap_or(circuit.n_qubits() - 1);
        SubspaceSpec::new(circuit, n_ancillas, output_qubit)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }
}

/// A realized subspace: the membership operator, an orthonormal basis of
/// its eigenvalue-1 eigenspace (`2^n x k`, possibly k = 0), and the
/// projector onto that span.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub membership: CMatrix,
    pub basis: CMatrix,
    pub projector: CMatrix,
}

impl Subspace {
    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.ncols() == 0
    }
}

/// Realize a membership circuit as an explicit subspace.
///
/// The membership operator `M` is the projected Gram of the circuit columns
/// (inputs in, ancillas zeroed, output qubit projected onto 1). A clean
/// test makes `M` a projector: every eigenvalue within 1e-6 of 0 or 1; an
/// eigenvalue strictly inside the band is a hard error. The subspace may
/// legitimately be trivial (k = 0); only restriction onto it is an error.
pub fn subspace_projector(spec: &SubspaceSpec) -> Result<Subspace> {
    let membership = projected_gram(&spec.circuit, spec.n_inputs, spec.output_qubit)?;
    let dim = membership.nrows();
    let (values, vectors) = hermitian_eigensystem(&membership)?;
    let mut members: Vec<usize> = Vec::new();
    for (j, &v) in values.iter().enumerate() {
        if v >= 1.0 - 1e-6 {
            members.push(j);
        } else if v > 1e-6 {
            return Err(Error::DirtyMembership { value: v });
        }
    }
    let mut basis = CMatrix::zeros(dim, members.len());
    for (dst, &src) in members.iter().enumerate() {
        basis.column_mut(dst).copy_from(&vectors.column(src));
    }
    let projector = &basis * basis.adjoint();
    Ok(Subspace { membership, basis, projector })
}

/// Compress `y* x` onto the subspace, first checking that the subspace is
/// nontrivial and really invariant under it (leakage in operator norm at
/// most 1e-7). The result is unitary on the subspace whenever the check
/// passes, since the leakage bounds the unitarity defect quadratically.
pub fn restricted_operator(x: &Circuit, y: &Circuit, sub: &Subspace) -> Result<CMatrix> {
    if sub.is_trivial() {
        return Err(Error::TrivialSubspace);
    }
    let a = circuit_unitary(&x.concat(&y.inverse())?)?;
    if a.nrows() != sub.basis.nrows() {
        return Err(Error::dimension(format!(
            "operator dimension {} does not match subspace ambient dimension {}",
            a.nrows(),
            sub.basis.nrows()
        )));
    }
    let ab = &a * &sub.basis;
    let leak = &ab - &sub.basis * (sub.basis.adjoint() * &ab);
    let leakage = operator_norm(&leak)?;
    if leakage > 1e-7 {
        return Err(Error::SubspaceNotInvariant { leakage });
    }
    Ok(sub.basis.adjoint() * ab)
}

/// Are `x` and `y` equal up to a global phase (within `mu`), or at least
/// `delta` apart from every phase alignment? With a subspace given, the
/// question is asked of the compressed operator instead.
pub fn decide_equivalence(
    x: &Circuit,
    y: &Circuit,
    subspace: Option<&SubspaceSpec>,
    delta: f64,
    mu: f64,
) -> Result<IdentityVerdict> {
    check_thresholds(delta, mu)?;
    let report = equivalence_report(x, y, subspace)?;
    decide_from_report(&report, delta, mu)
}

/// The spectral report underlying [`decide_equivalence`].
pub fn equivalence_report(
    x: &Circuit,
    y: &Circuit,
    subspace: Option<&SubspaceSpec>,
) -> Result<SpectralReport> {
    let a = match subspace {
        None => circuit_unitary(&x.concat(&y.inverse())?)?,
        Some(spec) => {
            if x.n_qubits() != spec.n_inputs() {
                return Err(Error::QubitCountMismatch {
                    left: x.n_qubits(),
                    right: spec.n_inputs(),
                });
            }
            let sub = subspace_projector(spec)?;
            restricted_operator(x, y, &sub)?
        }
    };
    spectral_report(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    }

    #[test]
    fn arc_of_single_phase_is_degenerate() {
        let arc = minimal_covering_arc(&[1.3]).unwrap();
        assert_eq!(arc.start, 1.3);
        assert_eq!(arc.length, 0.0);
    }

    #[test]
    fn antipodal_pair_breaks_tie_toward_zero() {
        let arc = minimal_covering_arc(&[0.0, PI]).unwrap();
        assert_eq!(arc.start, 0.0);
        assert_close(arc.length, PI, 1e-15);
    }

    #[test]
    fn cluster_away_from_zero() {
        // largest gap runs 0.2 -> 6.0, so the arc starts at 6.0 and wraps
        let arc = minimal_covering_arc(&[0.1, 0.2, 6.0]).unwrap();
        assert_close(arc.start, 6.0, 1e-15);
        assert_close(arc.length, TWO_PI - 5.8, 1e-12);
    }

    #[test]
    fn arc_crossing_zero_is_found() {
        let arc = minimal_covering_arc(&[FRAC_PI_4, 7.0 * FRAC_PI_4]).unwrap();
        assert_close(arc.start, 7.0 * FRAC_PI_4, 1e-15);
        assert_close(arc.length, FRAC_PI_2, 1e-12);
        let report = report_from_phases(vec![FRAC_PI_4, 7.0 * FRAC_PI_4]).unwrap();
        assert_close(report.optimal_phase, 0.0, 1e-12);
        assert_close(report.distance, 2.0 * (PI / 8.0).sin(), 1e-12);
    }

    #[test]
    fn t_gate_distance() {
        let c = Circuit::parse("qubits 1\nt 0\n").unwrap();
        let u = circuit_unitary(&c).unwrap();
        let d = distance_to_phase_multiple(&u).unwrap();
        assert_close(d, 2.0 * (PI / 16.0).sin(), 1e-12);
    }

    #[test]
    fn identity_is_near_itself() {
        let c = Circuit::new(2);
        let v = decide_identity(&c, 0.5, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Near);
        assert_eq!(v.distance, 0.0);
    }

    #[test]
    fn z_gate_is_far() {
        let c = Circuit::parse("qubits 1\nz 0\n").unwrap();
        let v = decide_identity(&c, 1.0, 0.5).unwrap();
        assert_eq!(v.verdict, Verdict::Far);
        assert_close(v.distance, std::f64::consts::SQRT_2, 1e-12);
        assert_close(v.optimal_phase, FRAC_PI_2, 1e-12);
    }

    #[test]
    fn middle_ground_is_reported() {
        let c = Circuit::parse("qubits 1\nrz 0 0.4\n").unwrap();
        let v = decide_identity(&c, 0.3, 1e-6).unwrap();
        assert_eq!(v.verdict, Verdict::PromiseViolated);
        assert_close(v.distance, 2.0 * (0.1f64).sin(), 1e-12);
    }

    #[test]
    fn thresholds_are_validated() {
        let c = Circuit::new(1);
        assert!(matches!(
            decide_identity(&c, 0.1, 0.2),
            Err(Error::BadThresholds { .. })
        ));
        assert!(matches!(
            decide_identity(&c, 2.5, 0.1),
            Err(Error::BadThresholds { .. })
        ));
    }

    #[test]
    fn equivalence_of_commuting_orders() {
        let x = Circuit::parse("qubits 2\nz 0\nz 1\n").unwrap();
        let y = Circuit::parse("qubits 2\nz 1\nz 0\n").unwrap();
        let v = decide_equivalence(&x, &y, None, 0.5, 1e-9).unwrap();
        assert_eq!(v.verdict, Verdict::Near);
        assert_eq!(v.distance, 0.0);
    }

    #[test]
    fn flag_circuit_selects_expected_subspace() {
        let text = "qubits 2\nancillas 1\ncx 0 1\n";
        let spec = SubspaceSpec::from_annotations(Circuit::parse(text).unwrap()).unwrap();
        assert_eq!(spec.n_inputs(), 1);
        assert_eq!(spec.output_qubit(), 1);
        let sub = subspace_projector(&spec).unwrap();
        assert_eq!(sub.dimension(), 1);
        // the member is |1>
        assert_close(sub.projector[(1, 1)].re, 1.0, 1e-10);
        assert_close(sub.projector[(0, 0)].norm(), 0.0, 1e-10);
        assert_close(sub.membership[(1, 1)].re, 1.0, 1e-10);
    }

    #[test]
    fn always_on_flag_gives_full_space() {
        let spec =
            SubspaceSpec::from_annotations(Circuit::parse("qubits 2\nancillas 1\nx 1\n").unwrap())
                .unwrap();
        let sub = subspace_projector(&spec).unwrap();
        assert_eq!(sub.dimension(), 2);
        assert!((&sub.projector - CMatrix::identity(2, 2)).norm() < 1e-9);
    }

    #[test]
    fn dirty_membership_is_rejected() {
        let spec =
            SubspaceSpec::from_annotations(Circuit::parse("qubits 2\nancillas 1\nh 1\n").unwrap())
                .unwrap();
        match subspace_projector(&spec) {
            Err(Error::DirtyMembership { value }) => assert_close(value, 0.5, 1e-9),
            other => panic!("expected dirty membership, got {:?}", other),
        }
    }

    #[test]
    fn trivial_subspace_builds_but_rejects_restriction() {
        let spec =
            SubspaceSpec::from_annotations(Circuit::parse("qubits 2\nancillas 1\n").unwrap())
                .unwrap();
        let sub = subspace_projector(&spec).unwrap();
        assert!(sub.is_trivial());
        assert_close(sub.membership.norm(), 0.0, 1e-12);
        let c = Circuit::new(1);
        assert!(matches!(
            restricted_operator(&c, &c, &sub),
            Err(Error::TrivialSubspace)
        ));
    }

    #[test]
    fn non_invariant_operator_is_rejected() {
        let spec =
            SubspaceSpec::from_annotations(Circuit::parse("qubits 2\nancillas 1\ncx 0 1\n").unwrap())
                .unwrap();
        let x = Circuit::parse("qubits 1\nh 0\n").unwrap();
        let y = Circuit::new(1);
        match decide_equivalence(&x, &y, Some(&spec), 0.5, 1e-9) {
            Err(Error::SubspaceNotInvariant { leakage }) => {
                assert_close(leakage, std::f64::consts::FRAC_1_SQRT_2, 1e-9);
            }
            other => panic!("expected invariance failure, got {:?}", other),
        }
    }

    #[test]
    fn restriction_turns_z_into_a_global_phase() {
        // z differs from the identity only by the phase on |1>, which is a
        // global phase once restricted to span{|1>}
        let spec =
            SubspaceSpec::from_annotations(Circuit::parse("qubits 2\nancillas 1\ncx 0 1\n").unwrap())
                .unwrap();
        let x = Circuit::parse("qubits 1\nz 0\n").unwrap();
        let y = Circuit::new(1);
        let full = decide_equivalence(&x, &y, None, 0.5, 0.1).unwrap();
        assert_eq!(full.verdict, Verdict::Far);
        let restricted = decide_equivalence(&x, &y, Some(&spec), 0.3, 0.1).unwrap();
        assert_eq!(restricted.verdict, Verdict::Near);
        assert_close(restricted.distance, 0.0, 1e-9);
    }
}
