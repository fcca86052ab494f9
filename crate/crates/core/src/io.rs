//! On-disk formats: circuit JSON, compiled-parameter JSON and dataset files.
//!
//! Circuit documents look like
//!
//! ```json
//! {"n": 2, "gates": [
//!   {"type": "H", "q": 0},
//!   {"type": "RX", "q": 1, "theta": 0.25},
//!   {"type": "CNOT", "control": 0, "target": 1},
//!   {"type": "U1", "q": 0, "matrix": [[[1,0],[0,0]],[[0,0],[0,1]]]}
//! ]}
//! ```
//!
//! Qubits are 0-based. Complex numbers are `[re, im]` pairs and matrices are
//! row-major. Angles are radians.
//!
//! A dataset file has a header line `n,m` followed by one line per pair
//! holding `2·2ⁿ` comma-separated doubles for `x` (interleaved re, im) and
//! then `2·2ⁿ` for `y`. Doubles are written in shortest round-trip form so a
//! reload is bit-exact.

use crate::ansatz::{AnsatzShape, ParamVector};
use crate::circuit::{Circuit, Gate};
use crate::compiler::CompiledAnsatz;
use crate::error::{Error, Result};
use crate::learning::Dataset;
use crate::linalg::{Mat2, C64};
use crate::state::StateVector;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

type WireMatrix = [[[f64; 2]; 2]; 2];

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
#[allow(clippy::upper_case_acronyms)]
enum WireGate {
    H { q: usize },
    RX { q: usize, theta: f64 },
    RY { q: usize, theta: f64 },
    RZ { q: usize, theta: f64 },
    CNOT { control: usize, target: usize },
    U1 { q: usize, matrix: WireMatrix },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCircuit {
    n: usize,
    gates: Vec<WireGate>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn to_wire(g: &Gate) -> WireGate {
    match *g {
        Gate::H { q } => WireGate::H { q },
        Gate::Rx { q, theta } => WireGate::RX { q, theta },
        Gate::Ry { q, theta } => WireGate::RY { q, theta },
        Gate::Rz { q, theta } => WireGate::RZ { q, theta },
        Gate::Cnot { control, target } => WireGate::CNOT { control, target },
        Gate::U1 { q, matrix } => WireGate::U1 {
            q,
            matrix: matrix.map(|row| row.map(|z| [z.re, z.im])),
        },
    }
}

fn from_wire(g: WireGate) -> Gate {
    match g {
        WireGate::H { q } => Gate::H { q },
        WireGate::RX { q, theta } => Gate::Rx { q, theta },
        WireGate::RY { q, theta } => Gate::Ry { q, theta },
        WireGate::RZ { q, theta } => Gate::Rz { q, theta },
        WireGate::CNOT { control, target } => Gate::Cnot { control, target },
        WireGate::U1 { q, matrix } => Gate::U1 {
            q,
            matrix: matrix.map(|row| row.map(|[re, im]| C64::new(re, im))) as Mat2,
        },
    }
}

/// Parse and validate a circuit document.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let wire: WireCircuit = serde_json::from_str(text).map_err(json_error)?;
    let mut circuit = Circuit::new(wire.n).map_err(|e| Error::parse("n", e.to_string()))?;
    for (i, g) in wire.gates.into_iter().enumerate() {
        circuit
            .push(from_wire(g))
            .map_err(|e| Error::parse(format!("gates[{i}]"), e.to_string()))?;
    }
    Ok(circuit)
}

/// Canonical single-line JSON for a circuit.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let wire = WireCircuit {
        n: circuit.n(),
        gates: circuit.gates().iter().map(to_wire).collect(),
    };
    serde_json::to_string(&wire).expect("circuit serialization cannot fail")
}

pub fn read_circuit(path: &std::path::Path) -> Result<Circuit> {
    parse_circuit(&std::fs::read_to_string(path)?)
}

/// Compiled parameters as stored by `compile --out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub n: usize,
    pub depth: usize,
    pub layers_used: usize,
    pub global_phase: f64,
    pub normalized_len: usize,
    pub theta: Vec<f64>,
}

impl From<&CompiledAnsatz> for ParamsFile {
    fn from(c: &CompiledAnsatz) -> Self {
        ParamsFile {
            n: c.shape.n(),
            depth: c.shape.depth(),
            layers_used: c.layers_used,
            global_phase: c.global_phase,
            normalized_len: c.normalized_len,
            theta: c.theta.values().to_vec(),
        }
    }
}

impl ParamsFile {
    pub fn into_compiled(self) -> Result<CompiledAnsatz> {
        let shape = AnsatzShape::new(self.n, self.depth).map_err(|e| Error::parse("n/depth", e.to_string()))?;
        let theta = ParamVector::new(&shape, self.theta).map_err(|e| Error::parse("theta", e.to_string()))?;
        if self.layers_used > shape.depth() {
            return Err(Error::parse("layers_used", "exceeds depth"));
        }
        Ok(CompiledAnsatz {
            shape,
            theta,
            layers_used: self.layers_used,
            global_phase: self.global_phase,
            normalized_len: self.normalized_len,
        })
    }
}

pub fn serialize_params(c: &CompiledAnsatz) -> String {
    serde_json::to_string_pretty(&ParamsFile::from(c)).expect("params serialization cannot fail")
}

pub fn parse_params(text: &str) -> Result<CompiledAnsatz> {
    let file: ParamsFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_compiled()
}

fn write_state<W: Write>(out: &mut W, s: &StateVector, first: &mut bool) -> std::io::Result<()> {
    for a in s.amplitudes() {
        for v in [a.re, a.im] {
            if !*first {
                out.write_all(b",")?;
            }
            *first = false;
            write!(out, "{v}")?;
        }
    }
    Ok(())
}

pub fn write_dataset<W: Write>(mut out: W, data: &Dataset) -> Result<()> {
    writeln!(out, "{},{}", data.n(), data.len())?;
    for (x, y) in data.pairs() {
        let mut first = true;
        write_state(&mut out, x, &mut first)?;
        write_state(&mut out, y, &mut first)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_usize(field: &str, what: &str, line: usize) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("line {line}"), format!("{what} is not a non-negative integer")))
}

pub fn read_dataset<R: BufRead>(input: R) -> Result<Dataset> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::parse("line 1", "missing header"))??;
    let mut parts = header.split(',');
    let (Some(n), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::parse("line 1", "header must be `n,m`"));
    };
    let n = parse_usize(n, "n", 1)?;
    let m = parse_usize(m, "m", 1)?;
    if n == 0 || n > crate::state::MAX_STATE_QUBITS {
        return Err(Error::parse("line 1", format!("qubit count {n} out of range")));
    }
    let dim = 1usize << n;
    let mut pairs = Vec::with_capacity(m);
    for k in 0..m {
        let lineno = k + 2;
        let loc = || format!("line {lineno}");
        let line = lines.next().ok_or_else(|| Error::parse(loc(), "missing pair line"))??;
        let values = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(loc(), e.to_string()))?;
        if values.len() != 4 * dim {
            return Err(Error::parse(loc(), format!("expected {} values, found {}", 4 * dim, values.len())));
        }
        let state = |chunk: &[f64]| {
            let amps = chunk.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
            StateVector::from_amplitudes(n, amps).map_err(|e| Error::parse(loc(), e.to_string()))
        };
        pairs.push((state(&values[..2 * dim])?, state(&values[2 * dim..])?));
    }
    for (extra, line) in lines.enumerate() {
        if !line?.trim().is_empty() {
            return Err(Error::parse(format!("line {}", m + 2 + extra), "trailing data after m pairs"));
        }
    }
    Dataset::new(n, pairs)
}
