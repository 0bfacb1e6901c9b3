//! Gate-level circuit representation and the text format it round-trips
//! through.
//!
//! Qubit 0 is the least-significant bit of a basis-state index; "last qubit"
//! always means index `n_qubits - 1`. The representation is deliberately
//! small: a fixed gate alphabet, explicit qubit indices, and two optional
//! annotations (`output`, `ancillas`) that downstream verifier types read.
//! Qubit counts are unbounded here; dense limits are enforced by the
//! simulator, not the representation.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

/// The gate alphabet. Rotation angles are radians; `Cp` is a phase applied
/// to basis states selected by the owning gate's control and target lists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Cx,
    Cz,
    Swap,
    Cp(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Id => "id",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Cp(_) => "cp",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) | GateKind::Cp(a) => Some(a),
            _ => None,
        }
    }

    /// Number of target qubits the kind expects; `None` for `Cp`, whose
    /// target list may have any length (including zero: a global phase).
    fn target_arity(&self) -> Option<usize> {
        match self {
            GateKind::Cp(_) => None,
            GateKind::Cx | GateKind::Cz | GateKind::Swap => Some(2),
            _ => Some(1),
        }
    }

    fn inverse(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Cp(a) => GateKind::Cp(-a),
            k => k,
        }
    }
}

/// Whether a control fires on |0> or on |1>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Zero,
    One,
}

/// A signed control: the gate acts only on basis states where `qubit`
/// matches `polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::One }
    }

    pub fn zero(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Zero }
    }
}

/// One gate application. `controls` is nonempty only for `Cp`; for `Cp`
/// the target qubits act as additional positive controls, so the phase
/// fires exactly when every control matches its polarity and every target
/// is |1>.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn single(kind: GateKind, q: usize) -> Gate {
        Gate { kind, targets: vec![q], controls: Vec::new() }
    }

    pub fn x(q: usize) -> Gate {
        Gate::single(GateKind::X, q)
    }

    pub fn y(q: usize) -> Gate {
        Gate::single(GateKind::Y, q)
    }

    pub fn z(q: usize) -> Gate {
        Gate::single(GateKind::Z, q)
    }

    pub fn h(q: usize) -> Gate {
        Gate::single(GateKind::H, q)
    }

    pub fn s(q: usize) -> Gate {
        Gate::single(GateKind::S, q)
    }

    pub fn sdg(q: usize) -> Gate {
        Gate::single(GateKind::Sdg, q)
    }

    pub fn t(q: usize) -> Gate {
        Gate::single(GateKind::T, q)
    }

    pub fn tdg(q: usize) -> Gate {
        Gate::single(GateKind::Tdg, q)
    }

    pub fn rx(q: usize, angle: f64) -> Gate {
        Gate::single(GateKind::Rx(angle), q)
    }

    pub fn ry(q: usize, angle: f64) -> Gate {
        Gate::single(GateKind::Ry(angle), q)
    }

    pub fn rz(q: usize, angle: f64) -> Gate {
        Gate::single(GateKind::Rz(angle), q)
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate { kind: GateKind::Cx, targets: vec![control, target], controls: Vec::new() }
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate { kind: GateKind::Cz, targets: vec![a, b], controls: Vec::new() }
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        Gate { kind: GateKind::Swap, targets: vec![a, b], controls: Vec::new() }
    }

    /// Phase gate `e^{i angle}` on the basis states selected by `controls`
    /// and `targets` (targets require |1>). Empty lists give a global phase.
    pub fn cp(angle: f64, controls: Vec<Control>, targets: Vec<usize>) -> Gate {
        Gate { kind: GateKind::Cp(angle), targets, controls }
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Structural checks: arity per kind, angle finiteness, all indices
    /// distinct and below `n_qubits`, controls only on `Cp`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Some(a) = self.kind.angle() {
            if !a.is_finite() {
                return Err(Error::invalid(format!(
                    "angle of {} must be finite",
                    self.kind.name()
                )));
            }
        }
        if let Some(arity) = self.kind.target_arity() {
            if self.targets.len() != arity {
                return Err(Error::invalid(format!(
                    "{} takes {} qubit(s), got {}",
                    self.kind.name(),
                    arity,
                    self.targets.len()
                )));
            }
            if !self.controls.is_empty() {
                return Err(Error::invalid(format!(
                    "{} does not take signed controls",
                    self.kind.name()
                )));
            }
        }
        let mut seen = Vec::with_capacity(self.targets.len() + self.controls.len());
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if seen.contains(&q) {
                return Err(Error::DuplicateQubit { index: q });
            }
            seen.push(q);
        }
        Ok(())
    }

    fn remap(&self, map: &[usize]) -> Gate {
        Gate {
            kind: self.kind,
            targets: self.targets.iter().map(|&q| map[q]).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control { qubit: map[c.qubit], polarity: c.polarity })
                .collect(),
        }
    }
}

/// An ordered list of gates on a fixed register, applied first to last.
///
/// `output_qubit` and `ancilla_count` are annotations carried by the text
/// format; ancillas are always the trailing qubits of the register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    output_qubit: Option<usize>,
    ancilla_count: Option<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit { n_qubits, gates: Vec::new(), output_qubit: None, ancilla_count: None }
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output_qubit(&self) -> Option<usize> {
        self.output_qubit
    }

    pub fn ancilla_count(&self) -> Option<usize> {
        self.ancilla_count
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn set_output_qubit(&mut self, q: Option<usize>) -> Result<()> {
        if let Some(q) = q {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
            }
        }
        self.output_qubit = q;
        Ok(())
    }

    pub fn set_ancilla_count(&mut self, m: Option<usize>) -> Result<()> {
        if let Some(m) = m {
            if m > self.n_qubits {
                return Err(Error::invalid(format!(
                    "{} ancillas do not fit in {} qubits",
                    m, self.n_qubits
                )));
            }
        }
        self.ancilla_count = m;
        Ok(())
    }

    /// Gates reversed and daggered; annotations survive since the register
    /// keeps its meaning.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            output_qubit: self.output_qubit,
            ancilla_count: self.ancilla_count,
        }
    }

    /// `self` followed by `other` (so the composite applies `self` first).
    /// Annotations: first one set wins, `self` before `other`.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().chain(other.gates.iter()).cloned().collect(),
            output_qubit: self.output_qubit.or(other.output_qubit),
            ancilla_count: self.ancilla_count.or(other.ancilla_count),
        })
    }

    /// Relocate the circuit into a larger register: qubit `i` of `self`
    /// becomes `map[i]`. The map must be injective and in range. The
    /// identity embedding returns the circuit unchanged; otherwise the
    /// output annotation is remapped and the ancilla annotation is dropped
    /// (trailing-qubit ancillas do not survive an arbitrary relocation).
    pub fn embed(&self, n_total: usize, map: &[usize]) -> Result<Circuit> {
        if map.len() != self.n_qubits {
            return Err(Error::dimension(format!(
                "embedding map covers {} qubits, circuit has {}",
                map.len(),
                self.n_qubits
            )));
        }
        let mut seen = vec![false; n_total];
        for &q in map {
            if q >= n_total {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: n_total });
            }
            if seen[q] {
                return Err(Error::invalid(format!("embedding map reuses qubit {}", q)));
            }
            seen[q] = true;
        }
        if n_total == self.n_qubits && map.iter().enumerate().all(|(i, &q)| i == q) {
            return Ok(self.clone());
        }
        Ok(Circuit {
            n_qubits: n_total,
            gates: self.gates.iter().map(|g| g.remap(map)).collect(),
            output_qubit: self.output_qubit.map(|q| map[q]),
            ancilla_count: None,
        })
    }

    /// Render to the text format. Serialization is canonical: parsing the
    /// output and serializing again reproduces it byte for byte.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.n_qubits);
        if let Some(q) = self.output_qubit {
            let _ = writeln!(out, "output {}", q);
        }
        if let Some(m) = self.ancilla_count {
            let _ = writeln!(out, "ancillas {}", m);
        }
        for g in &self.gates {
            out.push_str(g.kind.name());
            if let GateKind::Cp(a) = g.kind {
                let _ = write!(out, " {:?}", a);
                for c in &g.controls {
                    let sign = match c.polarity {
                        Polarity::One => '+',
                        Polarity::Zero => '-',
                    };
                    let _ = write!(out, " {}{}", sign, c.qubit);
                }
                if !g.targets.is_empty() {
                    out.push_str(" :");
                    for &t in &g.targets {
                        let _ = write!(out, " {}", t);
                    }
                }
            } else {
                for &t in &g.targets {
                    let _ = write!(out, " {}", t);
                }
                if let Some(a) = g.kind.angle() {
                    let _ = write!(out, " {:?}", a);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parse the text format. `#` starts a comment; the first content line
    /// must be `qubits N`; `output Q` and `ancillas M` may appear once each.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let tokens = tokenize(content);
            if tokens.is_empty() {
                continue;
            }
            let head = &tokens[0];
            match circuit {
                None => {
                    if head.text != "qubits" {
                        return Err(parse_err(line_no, head.col, "expected `qubits N` header"));
                    }
                    let n = parse_count(line_no, &tokens, 1, "qubit count")?;
                    expect_len(line_no, &tokens, 2)?;
                    if n == 0 {
                        return Err(parse_err(line_no, tokens[1].col, "qubit count must be positive"));
                    }
                    circuit = Some(Circuit::new(n));
                }
                Some(ref mut c) => match head.text {
                    "qubits" => {
                        return Err(parse_err(line_no, head.col, "duplicate `qubits` header"));
                    }
                    "output" => {
                        if c.output_qubit.is_some() {
                            return Err(parse_err(line_no, head.col, "duplicate `output` directive"));
                        }
                        let q = parse_count(line_no, &tokens, 1, "output qubit")?;
                        expect_len(line_no, &tokens, 2)?;
                        c.set_output_qubit(Some(q))
                            .map_err(|e| parse_err(line_no, tokens[1].col, &e.to_string()))?;
                    }
                    "ancillas" => {
                        if c.ancilla_count.is_some() {
                            return Err(parse_err(line_no, head.col, "duplicate `ancillas` directive"));
                        }
                        let m = parse_count(line_no, &tokens, 1, "ancilla count")?;
                        expect_len(line_no, &tokens, 2)?;
                        c.set_ancilla_count(Some(m))
                            .map_err(|e| parse_err(line_no, tokens[1].col, &e.to_string()))?;
                    }
                    _ => {
                        let gate = parse_gate(line_no, &tokens)?;
                        c.push(gate)
                            .map_err(|e| parse_err(line_no, head.col, &e.to_string()))?;
                    }
                },
            }
        }
        circuit.ok_or_else(|| parse_err(1, 1, "missing `qubits N` header"))
    }
}

struct Token<'a> {
    text: &'a str,
    /// 1-based column of the token start.
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { text: &line[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { text: &line[s..], col: s + 1 });
    }
    tokens
}

fn parse_err(line: usize, col: usize, msg: &str) -> Error {
    Error::Parse { line, col, msg: msg.to_string() }
}

fn expect_len(line: usize, tokens: &[Token], want: usize) -> Result<()> {
    if tokens.len() > want {
        let extra = &tokens[want];
        return Err(parse_err(line, extra.col, &format!("unexpected token `{}`", extra.text)));
    }
    Ok(())
}

fn parse_count(line: usize, tokens: &[Token], pos: usize, what: &str) -> Result<usize> {
    let tok = tokens
        .get(pos)
        .ok_or_else(|| parse_err(line, tokens[pos - 1].col, &format!("missing {}", what)))?;
    tok.text
        .parse::<usize>()
        .map_err(|_| parse_err(line, tok.col, &format!("invalid {}: `{}`", what, tok.text)))
}

fn parse_angle(line: usize, tokens: &[Token], pos: usize) -> Result<f64> {
    let tok = tokens
        .get(pos)
        .ok_or_else(|| parse_err(line, tokens[pos - 1].col, "missing angle"))?;
    let a: f64 = tok
        .text
        .parse()
        .map_err(|_| parse_err(line, tok.col, &format!("invalid angle: `{}`", tok.text)))?;
    if !a.is_finite() {
        return Err(parse_err(line, tok.col, "angle must be finite"));
    }
    Ok(a)
}

fn parse_gate(line: usize, tokens: &[Token]) -> Result<Gate> {
    let head = &tokens[0];
    let gate = match head.text {
        "id" | "x" | "y" | "z" | "h" | "s" | "sdg" | "t" | "tdg" => {
            let q = parse_count(line, tokens, 1, "qubit index")?;
            expect_len(line, tokens, 2)?;
            let kind = match head.text {
                "id" => GateKind::Id,
                "x" => GateKind::X,
                "y" => GateKind::Y,
                "z" => GateKind::Z,
                "h" => GateKind::H,
                "s" => GateKind::S,
                "sdg" => GateKind::Sdg,
                "t" => GateKind::T,
                _ => GateKind::Tdg,
            };
            Gate::single(kind, q)
        }
        "rx" | "ry" | "rz" => {
            let q = parse_count(line, tokens, 1, "qubit index")?;
            let a = parse_angle(line, tokens, 2)?;
            expect_len(line, tokens, 3)?;
            let kind = match head.text {
                "rx" => GateKind::Rx(a),
                "ry" => GateKind::Ry(a),
                _ => GateKind::Rz(a),
            };
            Gate::single(kind, q)
        }
        "cx" | "cz" | "swap" => {
            let a = parse_count(line, tokens, 1, "qubit index")?;
            let b = parse_count(line, tokens, 2, "qubit index")?;
            expect_len(line, tokens, 3)?;
            let kind = match head.text {
                "cx" => GateKind::Cx,
                "cz" => GateKind::Cz,
                _ => GateKind::Swap,
            };
            Gate { kind, targets: vec![a, b], controls: Vec::new() }
        }
        "cp" => {
            let angle = parse_angle(line, tokens, 1)?;
            let mut controls = Vec::new();
            let mut targets = Vec::new();
            let mut after_colon = false;
            for tok in &tokens[2..] {
                if !after_colon {
                    if tok.text == ":" {
                        after_colon = true;
                        continue;
                    }
                    let (polarity, rest) = match tok.text.as_bytes().first() {
                        Some(b'+') => (Polarity::One, &tok.text[1..]),
                        Some(b'-') => (Polarity::Zero, &tok.text[1..]),
                        _ => {
                            return Err(parse_err(
                                line,
                                tok.col,
                                &format!(
                                    "expected a signed control like +{0} or -{0}, got `{1}`",
                                    tok.text, tok.text
                                ),
                            ));
                        }
                    };
                    let qubit = rest.parse::<usize>().map_err(|_| {
                        parse_err(line, tok.col, &format!("invalid control qubit: `{}`", tok.text))
                    })?;
                    controls.push(Control { qubit, polarity });
                } else {
                    let q = tok.text.parse::<usize>().map_err(|_| {
                        parse_err(line, tok.col, &format!("invalid qubit index: `{}`", tok.text))
                    })?;
                    targets.push(q);
                }
            }
            Gate::cp(angle, controls, targets)
        }
        other => {
            return Err(parse_err(line, head.col, &format!("unknown gate `{}`", other)));
        }
    };
    Ok(gate)
}

/// Expand `gate` into gates that apply it only when `control` is |1>.
///
/// Every kind in the alphabet stays inside the alphabet: diagonal kinds grow
/// an extra positive control, the rest are conjugated onto a diagonal core
/// (H -> cz via a basis change on the target, cx -> doubly-controlled phase
/// between h's, swap via the cx sandwich).
pub fn controlled(gate: &Gate, control: usize) -> Result<Vec<Gate>> {
    if gate.qubits().any(|q| q == control) {
        return Err(Error::DuplicateQubit { index: control });
    }
    let seq = match gate.kind {
        GateKind::Id => vec![],
        GateKind::X => vec![Gate::cx(control, gate.targets[0])],
        GateKind::Y => {
            let t = gate.targets[0];
            vec![Gate::sdg(t), Gate::cx(control, t), Gate::s(t)]
        }
        GateKind::Z => vec![Gate::cz(control, gate.targets[0])],
        GateKind::H => {
            let t = gate.targets[0];
            vec![
                Gate::ry(t, -FRAC_PI_4),
                Gate::cz(control, t),
                Gate::ry(t, FRAC_PI_4),
            ]
        }
        GateKind::S => vec![Gate::cp(FRAC_PI_2, vec![], vec![control, gate.targets[0]])],
        GateKind::Sdg => vec![Gate::cp(-FRAC_PI_2, vec![], vec![control, gate.targets[0]])],
        GateKind::T => vec![Gate::cp(FRAC_PI_4, vec![], vec![control, gate.targets[0]])],
        GateKind::Tdg => vec![Gate::cp(-FRAC_PI_4, vec![], vec![control, gate.targets[0]])],
        GateKind::Rx(a) => {
            let t = gate.targets[0];
            vec![
                Gate::h(t),
                Gate::cp(-a / 2.0, vec![], vec![control]),
                Gate::cp(a, vec![], vec![control, t]),
                Gate::h(t),
            ]
        }
        GateKind::Ry(a) => {
            let t = gate.targets[0];
            vec![
                Gate::sdg(t),
                Gate::h(t),
                Gate::cp(-a / 2.0, vec![], vec![control]),
                Gate::cp(a, vec![], vec![control, t]),
                Gate::h(t),
                Gate::s(t),
            ]
        }
        GateKind::Rz(a) => vec![
            Gate::cp(-a / 2.0, vec![], vec![control]),
            Gate::cp(a, vec![], vec![control, gate.targets[0]]),
        ],
        GateKind::Cx => {
            let (c, t) = (gate.targets[0], gate.targets[1]);
            vec![
                Gate::h(t),
                Gate::cp(PI, vec![], vec![control, c, t]),
                Gate::h(t),
            ]
        }
        GateKind::Cz => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            vec![Gate::cp(PI, vec![], vec![control, a, b])]
        }
        GateKind::Swap => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            vec![
                Gate::cx(b, a),
                Gate::h(b),
                Gate::cp(PI, vec![], vec![control, a, b]),
                Gate::h(b),
                Gate::cx(b, a),
            ]
        }
        GateKind::Cp(a) => {
            let mut controls = gate.controls.clone();
            controls.push(Control::one(control));
            vec![Gate::cp(a, controls, gate.targets.clone())]
        }
    };
    Ok(seq)
}

/// Deterministic pseudo-random circuit: `n_gates` draws over the whole gate
/// alphabet (signed-control phase gates included when room allows), fully
/// determined by the seed. Used for fixture generation and randomized tests.
pub fn random_circuit(n_qubits: usize, n_gates: usize, seed: u64) -> Circuit {
    use rand::{Rng, SeedableRng};

    assert!(n_qubits > 0, "random circuit needs at least one qubit");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n_qubits);
    let two_pi = 2.0 * PI;
    for _ in 0..n_gates {
        let two_qubit = n_qubits >= 2 && rng.random_range(0..10) >= 6;
        let gate = if two_qubit {
            let a = rng.random_range(0..n_qubits);
            let mut b = rng.random_range(0..n_qubits - 1);
            if b >= a {
                b += 1;
            }
            match rng.random_range(0..4) {
                0 => Gate::cx(a, b),
                1 => Gate::cz(a, b),
                2 => Gate::swap(a, b),
                _ => {
                    let angle = rng.random_range(0.0..two_pi);
                    let mut controls = Vec::new();
                    if n_qubits >= 3 && rng.random_range(0..4) == 0 {
                        let mut extra = rng.random_range(0..n_qubits - 2);
                        for used in [a.min(b), a.max(b)] {
                            if extra >= used {
                                extra += 1;
                            }
                        }
                        controls.push(if rng.random_bool(0.5) {
                            Control::one(extra)
                        } else {
                            Control::zero(extra)
                        });
                    }
                    Gate::cp(angle, controls, vec![a, b])
                }
            }
        } else {
            let q = rng.random_range(0..n_qubits);
            match rng.random_range(0..11) {
                0 => Gate::x(q),
                1 => Gate::y(q),
                2 => Gate::z(q),
                3 => Gate::h(q),
                4 => Gate::s(q),
                5 => Gate::sdg(q),
                6 => Gate::t(q),
                7 => Gate::tdg(q),
                8 => Gate::rx(q, rng.random_range(0.0..two_pi)),
                9 => Gate::ry(q, rng.random_range(0.0..two_pi)),
                _ => Gate::rz(q, rng.random_range(0.0..two_pi)),
            }
        };
        c.push(gate).expect("generated gate is valid by construction");
    }
    c
}
