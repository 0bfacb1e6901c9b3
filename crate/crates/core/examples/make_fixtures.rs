//! Regenerate the fixture corpus under `fixtures/` at the repository root.
//!
//! Every circuit is written in canonical serialized form, so parsing any
//! fixture and serializing it again reproduces the file byte for byte. The
//! completeness/soundness calibration for the equivalence verifier is
//! recomputed from scratch and frozen into `calibration.json`.

use qident::circuit::{random_circuit, Circuit, Gate};
use qident::sim::circuit_unitary;
use qident::verifier::{
    acceptance_probability, build_equivalence_verifier, equivalence_acceptance,
    find_extremal_eigenvectors, max_acceptance, pair_witness, EquivalenceParams, Witness,
};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write_circuit(dir: &Path, name: &str, circuit: &Circuit) {
    let text = circuit.serialize();
    let reparsed = Circuit::parse(&text).expect("serialized fixture parses");
    assert_eq!(reparsed.serialize(), text, "fixture {} is not canonical", name);
    fs::write(dir.join(name), text).expect("write fixture");
    println!("wrote {}", name);
}

fn main() {
    let dir = fixtures_dir();
    fs::create_dir_all(&dir).expect("fixtures dir");

    write_circuit(&dir, "id.qc", &Circuit::new(1));
    write_circuit(&dir, "id2.qc", &Circuit::new(2));

    let mut z = Circuit::new(1);
    z.push(Gate::z(0)).unwrap();
    write_circuit(&dir, "z.qc", &z);

    let mut t = Circuit::new(1);
    t.push(Gate::t(0)).unwrap();
    write_circuit(&dir, "t.qc", &t);

    let mut cx = Circuit::new(2);
    cx.push(Gate::cx(0, 1)).unwrap();
    write_circuit(&dir, "cx.qc", &cx);

    for n in 2..=5usize {
        let c = random_circuit(n, 6 * n, 0xC0FFEE + n as u64);
        write_circuit(&dir, &format!("rand{}.qc", n), &c);
    }

    for (name, text) in [
        ("accept_all.qc", "qubits 2\noutput 1\nancillas 1\nx 1\n"),
        ("reject_all.qc", "qubits 2\noutput 1\nancillas 1\n"),
        ("coin.qc", "qubits 2\noutput 1\nancillas 1\nh 1\n"),
        ("cxflag.qc", "qubits 2\nancillas 1\ncx 0 1\n"),
    ] {
        let c = Circuit::parse(text).expect("verifier fixture parses");
        write_circuit(&dir, name, &c);
    }

    // Calibration: the dyadic completeness/soundness reference pair. The
    // compared circuits are a single s gate versus nothing on two qubits
    // (eigenphase separation pi/2), estimated with 4 phase bits.
    let delta = 2.0 * (PI / 8.0).sin();
    let mu = 0.2;
    let params = EquivalenceParams::with_bits(4, delta, mu).expect("params");
    let x = Circuit::parse("qubits 2\ns 0\n").unwrap();
    let y = Circuit::new(2);

    let a = circuit_unitary(&x.concat(&y.inverse()).unwrap()).unwrap();
    let honest = find_extremal_eigenvectors(&a).expect("separated spectrum");
    let witness = pair_witness(&honest.vector_start, &honest.vector_end).unwrap();

    let built = build_equivalence_verifier(&x, &y, None, &params).expect("build");
    let completeness =
        acceptance_probability(&built, &Witness::Pure(witness.clone())).expect("simulate");
    let kernel = equivalence_acceptance(&x, &y, None, &witness, &params).expect("kernel");
    assert!(
        (completeness - kernel).abs() < 1e-9,
        "simulated and closed-form acceptance disagree: {} vs {}",
        completeness,
        kernel
    );

    let built_same = build_equivalence_verifier(&x, &x, None, &params).expect("build");
    let soundness = max_acceptance(&built_same).expect("maximize").p_max;

    let calibration = serde_json::json!({
        "t": params.t,
        "delta": params.delta,
        "mu": params.mu,
        "chord_threshold": params.chord_threshold,
        "completeness": completeness,
        "soundness_p_max": soundness,
        "soundness_threshold": 0.05,
        "required_gap": 0.5,
        "measured_gap": completeness - soundness,
    });
    let mut text = serde_json::to_string_pretty(&calibration).unwrap();
    text.push('\n');
    fs::write(dir.join("calibration.json"), text).expect("write calibration");
    println!(
        "wrote calibration.json (completeness {:.12}, soundness {:.3e})",
        completeness, soundness
    );

    let readme = "\
# Fixture corpus

Canonical-form circuit files used by the test suites and the CLI examples.
Regenerate with `cargo run -p qident --example make_fixtures`; every file is
deterministic, so regeneration is byte-stable.

- `id.qc`, `id2.qc`: empty circuits on 1 and 2 qubits.
- `z.qc`, `t.qc`, `cx.qc`: single standard gates.
- `rand2.qc` .. `rand5.qc`: seeded random circuits on n qubits with 6n gates
  drawn from the whole gate alphabet (seed `0xC0FFEE + n`).
- `accept_all.qc`: verifier that accepts every witness (x on its output).
- `reject_all.qc`: verifier that never accepts (no gates).
- `coin.qc`: verifier that accepts with probability 1/2 (h on its output).
- `cxflag.qc`: membership circuit flagging the span of |1> on one input
  qubit (cx from the input onto the flag ancilla).
- `calibration.json`: frozen completeness/soundness reference for the
  equivalence verifier on the s-gate-versus-identity pair at 4 phase bits,
  recomputed from scratch by the generator.
";
    fs::write(dir.join("README.md"), readme).expect("write README");
    println!("wrote README.md");
}
