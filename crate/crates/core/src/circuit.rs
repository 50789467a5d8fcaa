//! Circuit intermediate representation, OpenQASM 2.0 subset parser and
//! lowering of derived gates to the encodable core set.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use thiserror::Error;

/// Gate names accepted by the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Y,
    Z,
    CX,
    RX,
    RY,
    RZ,
    CZ,
    Swap,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::CX => "cx",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::CZ => "cz",
            GateKind::Swap => "swap",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }

    /// Core kinds survive lowering; `Sdg`, `Tdg`, `CZ` and `Swap` do not.
    pub fn is_core(self) -> bool {
        !matches!(
            self,
            GateKind::Sdg | GateKind::Tdg | GateKind::CZ | GateKind::Swap
        )
    }
}

/// A gate application. Two-qubit variants are `(control, target)` for CX and
/// `(a, b)` for the symmetric gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
    RX(usize, f64),
    RY(usize, f64),
    RZ(usize, f64),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::S(_) => GateKind::S,
            Gate::Sdg(_) => GateKind::Sdg,
            Gate::T(_) => GateKind::T,
            Gate::Tdg(_) => GateKind::Tdg,
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::CX(..) => GateKind::CX,
            Gate::CZ(..) => GateKind::CZ,
            Gate::Swap(..) => GateKind::Swap,
            Gate::RX(..) => GateKind::RX,
            Gate::RY(..) => GateKind::RY,
            Gate::RZ(..) => GateKind::RZ,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::RX(q, _)
            | Gate::RY(q, _)
            | Gate::RZ(q, _) => vec![q],
            Gate::CX(a, b) | Gate::CZ(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::RX(_, a) | Gate::RY(_, a) | Gate::RZ(_, a) => Some(a),
            _ => None,
        }
    }

    /// Builds a gate from its kind, operands and optional angle, checking arity.
    pub fn from_parts(kind: GateKind, qubits: &[usize], angle: Option<f64>) -> Option<Gate> {
        if qubits.len() != kind.arity() || kind.is_rotation() != angle.is_some() {
            return None;
        }
        let q = qubits[0];
        Some(match kind {
            GateKind::H => Gate::H(q),
            GateKind::S => Gate::S(q),
            GateKind::Sdg => Gate::Sdg(q),
            GateKind::T => Gate::T(q),
            GateKind::Tdg => Gate::Tdg(q),
            GateKind::X => Gate::X(q),
            GateKind::Y => Gate::Y(q),
            GateKind::Z => Gate::Z(q),
            GateKind::CX => Gate::CX(q, qubits[1]),
            GateKind::CZ => Gate::CZ(q, qubits[1]),
            GateKind::Swap => Gate::Swap(q, qubits[1]),
            GateKind::RX => Gate::RX(q, angle?),
            GateKind::RY => Gate::RY(q, angle?),
            GateKind::RZ => Gate::RZ(q, angle?),
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.kind().name();
        let args = self
            .qubits()
            .iter()
            .map(|q| format!("q[{q}]"))
            .collect::<Vec<_>>()
            .join(",");
        match self.angle() {
            // `{:?}` keeps enough digits to round-trip through the parser
            Some(a) => write!(f, "{name}({a:?}) {args};"),
            None => write!(f, "{name} {args};"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate {index} ({gate}): qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange {
        index: usize,
        gate: String,
        qubit: usize,
        n: usize,
    },
    #[error("gate {index} ({gate}): operands must be distinct")]
    RepeatedOperand { index: usize, gate: String },
    #[error("gate {index} ({gate}): angle is not finite")]
    NonFiniteAngle { index: usize, gate: String },
    #[error("measured qubit {qubit} out of range for {n} qubits")]
    MeasuredOutOfRange { qubit: usize, n: usize },
    #[error("invalid measurement spec `{0}`")]
    BadMeasureSpec(String),
}

/// A validated gate list over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        check_gate(self.n, self.gates.len(), &gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(|g| g.kind().is_core())
    }

    /// Replaces every derived gate by its core-gate sequence.
    ///
    /// The rewrites are exact up to global phase, which the encoding discards:
    /// `sdg = s s s`, `tdg = rz(-pi/4)`, `cz a,b = h b; cx a,b; h b` and
    /// `swap a,b = cx a,b; cx b,a; cx a,b`.
    pub fn lower(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for &g in &self.gates {
            match g {
                Gate::Sdg(q) => gates.extend([Gate::S(q); 3]),
                Gate::Tdg(q) => gates.push(Gate::RZ(q, -FRAC_PI_4)),
                Gate::CZ(a, b) => gates.extend([Gate::H(b), Gate::CX(a, b), Gate::H(b)]),
                Gate::Swap(a, b) => gates.extend([Gate::CX(a, b), Gate::CX(b, a), Gate::CX(a, b)]),
                core => gates.push(core),
            }
        }
        Circuit { n: self.n, gates }
    }

    /// OpenQASM 2.0 text accepted by [`parse_qasm`].
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        out.push_str(&format!("qreg q[{}];\n", self.n));
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

fn check_gate(n: usize, index: usize, gate: &Gate) -> Result<(), CircuitError> {
    let qs = gate.qubits();
    for &q in &qs {
        if q >= n {
            return Err(CircuitError::QubitOutOfRange {
                index,
                gate: gate.to_string(),
                qubit: q,
                n,
            });
        }
    }
    if qs.len() == 2 && qs[0] == qs[1] {
        return Err(CircuitError::RepeatedOperand {
            index,
            gate: gate.to_string(),
        });
    }
    if let Some(a) = gate.angle() {
        if !a.is_finite() {
            return Err(CircuitError::NonFiniteAngle {
                index,
                gate: gate.to_string(),
            });
        }
    }
    Ok(())
}

/// Computational-basis measurement: which qubits are measured and the
/// outcome bit requested for each.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MeasurementSpec {
    outcomes: BTreeMap<usize, bool>,
}

impl MeasurementSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every qubit of an `n`-qubit register measured with the same outcome.
    pub fn all(n: usize, outcome: bool) -> Self {
        MeasurementSpec {
            outcomes: (0..n).map(|q| (q, outcome)).collect(),
        }
    }

    pub fn single(qubit: usize, outcome: bool) -> Self {
        let mut spec = Self::new();
        spec.set(qubit, outcome);
        spec
    }

    pub fn with(mut self, qubit: usize, outcome: bool) -> Self {
        self.set(qubit, outcome);
        self
    }

    pub fn set(&mut self, qubit: usize, outcome: bool) {
        self.outcomes.insert(qubit, outcome);
    }

    pub fn outcome(&self, qubit: usize) -> Option<bool> {
        self.outcomes.get(&qubit).copied()
    }

    /// Measured qubits in ascending order with their outcome bits.
    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.outcomes.iter().map(|(&q, &b)| (q, b))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<(), CircuitError> {
        match self.outcomes.keys().find(|&&q| q >= n) {
            Some(&qubit) => Err(CircuitError::MeasuredOutOfRange { qubit, n }),
            None => Ok(()),
        }
    }

    /// Parses `all=0`, `all=1` or a comma list such as `q3=1,q0=0`.
    pub fn parse(text: &str, n: usize) -> Result<Self, CircuitError> {
        let bad = || CircuitError::BadMeasureSpec(text.to_string());
        let bit = |s: &str| match s.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(bad()),
        };
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("all=") {
            return Ok(Self::all(n, bit(rest)?));
        }
        let mut spec = Self::new();
        for item in text.split(',') {
            let (lhs, rhs) = item.split_once('=').ok_or_else(bad)?;
            let q: usize = lhs
                .trim()
                .strip_prefix('q')
                .and_then(|s| s.parse().ok())
                .ok_or_else(bad)?;
            if spec.outcome(q).is_some() {
                return Err(bad());
            }
            spec.set(q, bit(rhs)?);
        }
        spec.validate(n)?;
        Ok(spec)
    }
}

impl fmt::Display for MeasurementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(q, b)| format!("q{q}={}", u8::from(b)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{col}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported gate `{0}`")]
    UnsupportedGate(String),
    #[error("unsupported statement `{0}`")]
    UnsupportedStatement(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("exactly one quantum register is supported")]
    RegisterCount,
    #[error("angle expression does not evaluate to a finite number")]
    NonFiniteAngle,
    #[error(transparent)]
    Invalid(#[from] CircuitError),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, QasmError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let at = |tok| Token {
                tok,
                line: li + 1,
                col,
            };
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(at(Tok::Ident(chars[start..i].iter().collect())));
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse::<f64>().map_err(|_| QasmError {
                    line: li + 1,
                    col,
                    kind: QasmErrorKind::Syntax(format!("bad number `{s}`")),
                })?;
                out.push(at(Tok::Num(v)));
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(QasmError {
                        line: li + 1,
                        col,
                        kind: QasmErrorKind::Syntax("unterminated string".into()),
                    });
                }
                out.push(at(Tok::Str(chars[start..i].iter().collect())));
                i += 1;
            } else if "[](),;+-*/=>".contains(c) {
                out.push(at(Tok::Sym(c)));
                i += 1;
            } else {
                return Err(QasmError {
                    line: li + 1,
                    col,
                    kind: QasmErrorKind::Syntax(format!("unexpected character `{c}`")),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.eof)
    }

    fn err(&self, kind: QasmErrorKind) -> QasmError {
        let (line, col) = self.here();
        QasmError { line, col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> QasmError {
        self.err(QasmErrorKind::Syntax(msg.into()))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(format!("expected `{c}`"))),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.syntax("expected identifier")),
        }
    }

    fn skip_statement(&mut self) -> Result<(), QasmError> {
        while let Some(t) = self.next() {
            if t == Tok::Sym(';') {
                return Ok(());
            }
        }
        Err(self.syntax("missing `;`"))
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.factor()?);
        }
        if self.eat_sym('+') {
            return self.factor();
        }
        if self.eat_sym('(') {
            let v = self.expr()?;
            self.expect_sym(')')?;
            return Ok(v);
        }
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            _ => Err(self.syntax("expected number, `pi` or `(`")),
        }
    }

    fn index(&mut self) -> Result<usize, QasmError> {
        self.expect_sym('[')?;
        let v = match self.next() {
            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => v as usize,
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected non-negative integer index"));
            }
        };
        self.expect_sym(']')?;
        Ok(v)
    }
}

fn gate_kind(name: &str) -> Option<GateKind> {
    Some(match name {
        "h" => GateKind::H,
        "s" => GateKind::S,
        "sdg" => GateKind::Sdg,
        "t" => GateKind::T,
        "tdg" => GateKind::Tdg,
        "x" => GateKind::X,
        "y" => GateKind::Y,
        "z" => GateKind::Z,
        "cx" | "CX" => GateKind::CX,
        "rx" => GateKind::RX,
        "ry" => GateKind::RY,
        // the phase gate equals rz up to a global phase
        "rz" | "p" => GateKind::RZ,
        "cz" => GateKind::CZ,
        "swap" => GateKind::Swap,
        _ => return None,
    })
}

/// Parses the supported OpenQASM 2.0 subset into a [`Circuit`].
///
/// `measure`, `creg` and `barrier` statements are skipped with a logged
/// warning; measurements are supplied separately as a [`MeasurementSpec`].
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = tokenize(text)?;
    let eof = (text.lines().count().max(1), 1);
    let mut p = Parser { toks, pos: 0, eof };
    let mut reg: Option<(String, usize)> = None;
    let mut gates: Vec<(Gate, (usize, usize))> = Vec::new();

    while p.peek().is_some() {
        let start = p.here();
        let word = p.ident()?;
        match word.as_str() {
            "OPENQASM" => {
                match p.next() {
                    Some(Tok::Num(2.0)) => {}
                    _ => return Err(p.syntax("only OPENQASM 2.0 is supported")),
                }
                p.expect_sym(';')?;
            }
            "include" => {
                match p.next() {
                    Some(Tok::Str(s)) if s == "qelib1.inc" => {}
                    _ => {
                        return Err(QasmError {
                            line: start.0,
                            col: start.1,
                            kind: QasmErrorKind::UnsupportedStatement("include".into()),
                        })
                    }
                }
                p.expect_sym(';')?;
            }
            "qreg" => {
                let name = p.ident()?;
                let size = p.index()?;
                p.expect_sym(';')?;
                if reg.is_some() {
                    return Err(QasmError {
                        line: start.0,
                        col: start.1,
                        kind: QasmErrorKind::RegisterCount,
                    });
                }
                reg = Some((name, size));
            }
            "creg" | "measure" | "barrier" => {
                log::warn!(
                    "line {}: ignoring `{word}` statement; measurement comes from the measurement spec",
                    start.0
                );
                p.skip_statement()?;
            }
            "gate" | "opaque" | "if" | "reset" | "U" => {
                return Err(QasmError {
                    line: start.0,
                    col: start.1,
                    kind: QasmErrorKind::UnsupportedStatement(word),
                })
            }
            name => {
                let kind = gate_kind(name).ok_or_else(|| QasmError {
                    line: start.0,
                    col: start.1,
                    kind: QasmErrorKind::UnsupportedGate(name.to_string()),
                })?;
                let angle = if p.eat_sym('(') {
                    let at = p.here();
                    let v = p.expr()?;
                    p.expect_sym(')')?;
                    if !v.is_finite() {
                        return Err(QasmError {
                            line: at.0,
                            col: at.1,
                            kind: QasmErrorKind::NonFiniteAngle,
                        });
                    }
                    Some(v)
                } else {
                    None
                };
                let mut qubits = Vec::new();
                loop {
                    let at = p.here();
                    let r = p.ident()?;
                    match &reg {
                        Some((rn, _)) if *rn == r => {}
                        _ => {
                            return Err(QasmError {
                                line: at.0,
                                col: at.1,
                                kind: QasmErrorKind::UnknownRegister(r),
                            })
                        }
                    }
                    qubits.push(p.index()?);
                    if !p.eat_sym(',') {
                        break;
                    }
                }
                p.expect_sym(';')?;
                let gate = Gate::from_parts(kind, &qubits, angle).ok_or_else(|| QasmError {
                    line: start.0,
                    col: start.1,
                    kind: QasmErrorKind::Syntax(format!(
                        "`{name}` takes {} operand(s){}",
                        kind.arity(),
                        if kind.is_rotation() { " and one angle" } else { " and no angle" }
                    )),
                })?;
                gates.push((gate, start));
            }
        }
    }

    let (_, n) = reg.ok_or_else(|| p.err(QasmErrorKind::RegisterCount))?;
    let mut circuit = Circuit::new(n);
    for (g, (line, col)) in gates {
        circuit.push(g).map_err(|e| QasmError {
            line,
            col,
            kind: e.into(),
        })?;
    }
    Ok(circuit)
}
