//! Gate-level reversible circuit representation, exact basis-state
//! simulation, measured resource metrics, and the gate-list text format.
//!
//! Circuits here are permutations of computational basis states: every gate
//! is NOT, CNOT, or Toffoli, so a bit-vector is a complete simulation state.
//! Circuits and reports are immutable after construction and safe to share
//! across threads.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate operand {index} out of range for {qubit_count} qubits")]
    OperandOutOfRange { index: usize, qubit_count: usize },
    #[error("gate operands must be distinct, got {0:?}")]
    DuplicateOperand(Vec<usize>),
    #[error("state has {state_len} bits but circuit has {qubit_count} qubits")]
    DimensionMismatch {
        state_len: usize,
        qubit_count: usize,
    },
    #[error("register {name:?} lists qubit {index} twice or overlapping another register")]
    RegisterOverlap { name: String, index: usize },
    #[error("register {name:?} lists qubit {index}, beyond {qubit_count} qubits")]
    RegisterOutOfRange {
        name: String,
        index: usize,
        qubit_count: usize,
    },
    #[error("register {0:?} already defined")]
    DuplicateRegister(String),
    #[error("register name {0:?} may not contain whitespace or commas")]
    BadRegisterName(String),
    #[error("gate-list parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A reversible gate. The last operand is always the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Flips the target unconditionally.
    Not { target: usize },
    /// Flips the target iff the control is set.
    Cnot { control: usize, target: usize },
    /// Flips the target iff both controls are set.
    Toffoli { controls: [usize; 2], target: usize },
}

impl Gate {
    pub fn not(target: usize) -> Self {
        Gate::Not { target }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Gate::Toffoli {
            controls: [c0, c1],
            target,
        }
    }

    /// Operand indices in order; the target comes last.
    pub fn operands(&self) -> impl Iterator<Item = usize> {
        let (ops, len) = match *self {
            Gate::Not { target } => ([target, 0, 0], 1),
            Gate::Cnot { control, target } => ([control, target, 0], 2),
            Gate::Toffoli { controls, target } => ([controls[0], controls[1], target], 3),
        };
        ops.into_iter().take(len)
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::Not { target } => target,
            Gate::Cnot { target, .. } => target,
            Gate::Toffoli { target, .. } => target,
        }
    }

    fn validate(&self, qubit_count: usize) -> Result<(), CircuitError> {
        let ops: Vec<usize> = self.operands().collect();
        for &q in &ops {
            if q >= qubit_count {
                return Err(CircuitError::OperandOutOfRange {
                    index: q,
                    qubit_count,
                });
            }
        }
        for (i, &a) in ops.iter().enumerate() {
            if ops[i + 1..].contains(&a) {
                return Err(CircuitError::DuplicateOperand(ops));
            }
        }
        Ok(())
    }
}

/// An ordered list of reversible gates over a fixed qubit set, with named
/// registers mapping onto qubit indices. Register bit `i` is the `i`-th
/// listed index (little-endian).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
    registers: BTreeMap<String, Vec<usize>>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Self {
            qubit_count,
            gates: Vec::new(),
            registers: BTreeMap::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&[usize]> {
        self.registers.get(name).map(Vec::as_slice)
    }

    /// Appends a gate after checking its operands against the qubit count.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Names a register. Registers must be pairwise disjoint and in range.
    pub fn add_register(&mut self, name: &str, qubits: Vec<usize>) -> Result<(), CircuitError> {
        if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == ',') {
            return Err(CircuitError::BadRegisterName(name.to_string()));
        }
        if self.registers.contains_key(name) {
            return Err(CircuitError::DuplicateRegister(name.to_string()));
        }
        let mut seen: Vec<usize> = self.registers.values().flatten().copied().collect();
        for &q in &qubits {
            if q >= self.qubit_count {
                return Err(CircuitError::RegisterOutOfRange {
                    name: name.to_string(),
                    index: q,
                    qubit_count: self.qubit_count,
                });
            }
            if seen.contains(&q) {
                return Err(CircuitError::RegisterOverlap {
                    name: name.to_string(),
                    index: q,
                });
            }
            seen.push(q);
        }
        self.registers.insert(name.to_string(), qubits);
        Ok(())
    }
}

/// Incremental circuit construction with a bump allocator for fresh wires.
/// Arithmetic builders append onto this and name their registers at the end.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    qubit_count: usize,
    gates: Vec<Gate>,
    registers: Vec<(String, Vec<usize>)>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates one fresh wire, assumed |0> at circuit start.
    pub fn alloc(&mut self) -> usize {
        let q = self.qubit_count;
        self.qubit_count += 1;
        q
    }

    /// Allocates `count` consecutive fresh wires.
    pub fn alloc_many(&mut self, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.alloc()).collect()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn not(&mut self, target: usize) {
        self.push(Gate::not(target));
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.push(Gate::cnot(control, target));
    }

    pub fn toffoli(&mut self, c0: usize, c1: usize, target: usize) {
        self.push(Gate::toffoli(c0, c1, target));
    }

    fn push(&mut self, gate: Gate) {
        gate.validate(self.qubit_count)
            .expect("builder emitted an invalid gate");
        self.gates.push(gate);
    }

    pub fn name_register(&mut self, name: &str, qubits: Vec<usize>) {
        self.registers.push((name.to_string(), qubits));
    }

    /// Qubits not claimed by any named register, in index order.
    pub fn unnamed_qubits(&self) -> Vec<usize> {
        let named: Vec<usize> = self
            .registers
            .iter()
            .flat_map(|(_, qs)| qs.iter().copied())
            .collect();
        (0..self.qubit_count)
            .filter(|q| !named.contains(q))
            .collect()
    }

    pub fn finish(self) -> Circuit {
        let mut circuit = Circuit::new(self.qubit_count);
        for gate in self.gates {
            circuit.push(gate).expect("builder gates are pre-validated");
        }
        for (name, qubits) in self.registers {
            circuit
                .add_register(&name, qubits)
                .expect("builder registers are pre-validated");
        }
        circuit
    }
}

/// A bit-vector assignment to all qubits of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisState {
    bits: Vec<bool>,
}

impl BasisState {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.bits[index] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Writes `value` little-endian across the listed wires.
    pub fn load_value(&mut self, wires: &[usize], value: u128) {
        for (i, &w) in wires.iter().enumerate() {
            self.bits[w] = (value >> i) & 1 == 1;
        }
    }

    /// Reads the listed wires as a little-endian integer.
    pub fn read_value(&self, wires: &[usize]) -> u128 {
        wires
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &w)| acc | (u128::from(self.bits[w]) << i))
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// Measured resource metrics for one concrete circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub qubits: u64,
    pub toffoli_count: u64,
    pub toffoli_depth: u64,
    pub cnot_count: u64,
    pub cnot_depth: u64,
    pub t_count: u64,
}

/// Applies one gate to a basis state, returning the successor state.
/// Only the gate's operand bits may change.
pub fn apply_gate(state: &BasisState, gate: &Gate) -> Result<BasisState, CircuitError> {
    gate.validate(state.len())?;
    let mut next = state.clone();
    apply_gate_in_place(&mut next, gate);
    Ok(next)
}

fn apply_gate_in_place(state: &mut BasisState, gate: &Gate) {
    match *gate {
        Gate::Not { target } => {
            let v = state.get(target);
            state.set(target, !v);
        }
        Gate::Cnot { control, target } => {
            if state.get(control) {
                let v = state.get(target);
                state.set(target, !v);
            }
        }
        Gate::Toffoli { controls, target } => {
            if state.get(controls[0]) && state.get(controls[1]) {
                let v = state.get(target);
                state.set(target, !v);
            }
        }
    }
}

/// Runs the circuit on a basis-state input, applying gates in list order.
/// Pure and deterministic.
pub fn simulate(circuit: &Circuit, input: &BasisState) -> Result<BasisState, CircuitError> {
    if input.len() != circuit.qubit_count() {
        return Err(CircuitError::DimensionMismatch {
            state_len: input.len(),
            qubit_count: circuit.qubit_count(),
        });
    }
    let mut state = input.clone();
    for gate in circuit.gates() {
        apply_gate_in_place(&mut state, gate);
    }
    Ok(state)
}

/// The inverse circuit: the gate list reversed. Every gate here is
/// self-inverse, so `simulate(inverse(c), simulate(c, s)) == s`.
pub fn inverse(circuit: &Circuit) -> Circuit {
    let mut inv = Circuit::new(circuit.qubit_count());
    for gate in circuit.gates().iter().rev() {
        inv.push(*gate).expect("gates valid in the source circuit");
    }
    for (name, qubits) in circuit.registers() {
        inv.add_register(name, qubits.clone())
            .expect("registers valid in the source circuit");
    }
    inv
}

/// Tallies gate counts and ASAP layer depths.
///
/// Depth keeps one integer clock per qubit and per gate class. A gate of the
/// measured class raises all its operand clocks to `max + 1`; NOT gates
/// synchronize operand clocks without adding depth; gates of the other class
/// leave the array untouched. The report depends only on the gate list, not
/// on register names.
pub fn measure_resources(circuit: &Circuit) -> ResourceReport {
    let mut toffoli_count = 0u64;
    let mut cnot_count = 0u64;
    let mut tof_clock = vec![0u64; circuit.qubit_count()];
    let mut cnot_clock = vec![0u64; circuit.qubit_count()];

    for gate in circuit.gates() {
        match gate {
            Gate::Toffoli { .. } => {
                toffoli_count += 1;
                advance(&mut tof_clock, gate, true);
                advance(&mut cnot_clock, gate, false);
            }
            Gate::Cnot { .. } => {
                cnot_count += 1;
                advance(&mut cnot_clock, gate, true);
                advance(&mut tof_clock, gate, false);
            }
            Gate::Not { .. } => {
                advance(&mut tof_clock, gate, false);
                advance(&mut cnot_clock, gate, false);
            }
        }
    }

    ResourceReport {
        qubits: circuit.qubit_count() as u64,
        toffoli_count,
        toffoli_depth: tof_clock.iter().copied().max().unwrap_or(0),
        cnot_count,
        cnot_depth: cnot_clock.iter().copied().max().unwrap_or(0),
        t_count: 7 * toffoli_count,
    }
}

fn advance(clock: &mut [u64], gate: &Gate, counts: bool) {
    // NOT gates (and other-class gates) only synchronize: set to max, add no layer.
    if !counts && !matches!(gate, Gate::Not { .. }) {
        return;
    }
    let m = gate.operands().map(|q| clock[q]).max().unwrap_or(0);
    let next = if counts { m + 1 } else { m };
    for q in gate.operands() {
        clock[q] = next;
    }
}

/// Serializes a circuit to the gate-list text format: a `qubits N` header,
/// one `reg NAME i,j,k` line per register (name-sorted), then one gate per
/// line with lowercase mnemonics (`x 3`, `cx 0 1`, `ccx 0 1 2`). Lines are
/// LF-terminated; `parse_gatelist(export_gatelist(c)) == c`.
pub fn export_gatelist(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", circuit.qubit_count()));
    for (name, qubits) in circuit.registers() {
        let idx: Vec<String> = qubits.iter().map(usize::to_string).collect();
        out.push_str(&format!("reg {} {}\n", name, idx.join(",")));
    }
    for gate in circuit.gates() {
        let line = match *gate {
            Gate::Not { target } => format!("x {target}"),
            Gate::Cnot { control, target } => format!("cx {control} {target}"),
            Gate::Toffoli { controls, target } => {
                format!("ccx {} {} {}", controls[0], controls[1], target)
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses the gate-list text format produced by [`export_gatelist`].
pub fn parse_gatelist(text: &str) -> Result<Circuit, CircuitError> {
    let err = |line: usize, message: &str| CircuitError::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty input, expected `qubits N` header"))?;
    let qubit_count: usize = header
        .strip_prefix("qubits ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| err(1, "expected `qubits N` header"))?;
    let mut circuit = Circuit::new(qubit_count);

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let mnemonic = parts.next().unwrap_or("");
        let rest: Vec<&str> = parts.collect();
        let parse_indices = |tokens: &[&str]| -> Result<Vec<usize>, CircuitError> {
            tokens
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| err(lineno, &format!("bad qubit index {t:?}")))
                })
                .collect()
        };
        match mnemonic {
            "reg" => {
                if rest.len() != 2 {
                    return Err(err(lineno, "expected `reg NAME i,j,k`"));
                }
                let indices = rest[1]
                    .split(',')
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| err(lineno, &format!("bad register index {t:?}")))
                    })
                    .collect::<Result<Vec<usize>, CircuitError>>()?;
                circuit.add_register(rest[0], indices)?;
            }
            "x" => {
                let ops = parse_indices(&rest)?;
                if ops.len() != 1 {
                    return Err(err(lineno, "`x` takes one operand"));
                }
                circuit.push(Gate::not(ops[0]))?;
            }
            "cx" => {
                let ops = parse_indices(&rest)?;
                if ops.len() != 2 {
                    return Err(err(lineno, "`cx` takes two operands"));
                }
                circuit.push(Gate::cnot(ops[0], ops[1]))?;
            }
            "ccx" => {
                let ops = parse_indices(&rest)?;
                if ops.len() != 3 {
                    return Err(err(lineno, "`ccx` takes three operands"));
                }
                circuit.push(Gate::toffoli(ops[0], ops[1], ops[2]))?;
            }
            other => {
                return Err(err(lineno, &format!("unknown mnemonic {other:?}")));
            }
        }
    }
    Ok(circuit)
}
