//! Circuit text format.
//!
//! One gate per line:
//!
//! ```text
//! RY <qbit> <angle-radians>
//! X <qbit>
//! H <qbit>
//! CZ [!]q ...            # `!` = |0>-polarity control; last qbit is the Z target
//! CX [!]q ... <target>
//! INIT <path-to-matrix-file>
//! ```
//!
//! `#` begins a comment. The matrix file holds `k` on its first line followed
//! by `2^k * 2^k` row-major decimal floats. The writer records the register
//! width and qbit roles as comments so its own output round-trips.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

use super::{Circuit, Gate, QbitRole, UnitaryInit};

/// Parses a circuit file; `INIT` paths resolve relative to the file's parent.
pub fn parse_circuit(path: &Path) -> Result<Circuit> {
    let source = fs::read_to_string(path)?;
    parse_circuit_str(&source, path.parent())
}

/// Parses circuit text; `base` anchors relative `INIT` paths.
pub fn parse_circuit_str(source: &str, base: Option<&Path>) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut max_qbit: Option<usize> = None;
    let mut declared_width: Option<usize> = None;
    let mut roles: Vec<(usize, QbitRole)> = Vec::new();

    for (lineno, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            parse_directive(comment, &mut declared_width, &mut roles);
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let op = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        let gate = parse_gate(op, &rest, base)
            .map_err(|e| Error::Parse(format!("line {}: {}", lineno + 1, e)))?;
        for q in gate.qbits() {
            max_qbit = Some(max_qbit.map_or(q, |m| m.max(q)));
        }
        gates.push(gate);
    }

    let width_from_gates = max_qbit.map_or(0, |m| m + 1);
    let num_qbits = declared_width.unwrap_or(width_from_gates).max(width_from_gates);
    let mut circuit = Circuit::new(num_qbits);
    circuit.gates = gates;
    for (q, role) in roles {
        if q < num_qbits {
            circuit.qbit_roles[q] = role;
        }
    }
    circuit.validate()?;
    Ok(circuit)
}

fn parse_directive(
    comment: &str,
    declared_width: &mut Option<usize>,
    roles: &mut Vec<(usize, QbitRole)>,
) {
    let trimmed = comment.trim();
    if let Some(rest) = trimmed.strip_prefix("qbits:") {
        if let Ok(n) = rest.trim().parse::<usize>() {
            *declared_width = Some(n);
        }
    } else if let Some(rest) = trimmed.strip_prefix("role") {
        let mut it = rest.split_whitespace();
        if let (Some(q), Some(tag)) = (it.next(), it.next()) {
            if let (Ok(q), Some(role)) = (q.parse::<usize>(), QbitRole::from_str(tag)) {
                roles.push((q, role));
            }
        }
    }
}

fn parse_gate(op: &str, args: &[&str], base: Option<&Path>) -> Result<Gate> {
    let qbit = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad qbit index `{s}`")))
    };
    match op {
        "X" | "H" => {
            if args.len() != 1 {
                return Err(Error::Parse(format!("{op} takes one qbit")));
            }
            let q = qbit(args[0])?;
            Ok(if op == "X" { Gate::X(q) } else { Gate::H(q) })
        }
        "RY" => {
            if args.len() != 2 {
                return Err(Error::Parse("RY takes a qbit and an angle".into()));
            }
            let q = qbit(args[0])?;
            let angle: f64 = args[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad angle `{}`", args[1])))?;
            Ok(Gate::Ry { qbit: q, angle })
        }
        "CZ" => {
            if args.is_empty() {
                return Err(Error::Parse("CZ needs at least one qbit".into()));
            }
            let mut qbits = Vec::new();
            let mut polarity = Vec::new();
            for tok in args {
                let (p, q) = split_polarity(tok)?;
                qbits.push(q);
                polarity.push(p);
            }
            if qbits.len() == 1 && polarity[0] {
                return Ok(Gate::Z(qbits[0]));
            }
            Ok(Gate::ControlledZ { qbits, polarity })
        }
        "CX" => {
            if args.len() < 2 {
                return Err(Error::Parse("CX needs controls and a target".into()));
            }
            let (controls_toks, target_tok) = args.split_at(args.len() - 1);
            let mut controls = Vec::new();
            let mut polarity = Vec::new();
            for tok in controls_toks {
                let (p, q) = split_polarity(tok)?;
                controls.push(q);
                polarity.push(p);
            }
            let target = qbit(target_tok[0])?;
            Ok(Gate::ControlledX {
                controls,
                polarity,
                target,
            })
        }
        "INIT" => {
            if args.len() != 1 {
                return Err(Error::Parse("INIT takes a matrix file path".into()));
            }
            let raw = Path::new(args[0]);
            let path = if raw.is_relative() {
                base.map(|b| b.join(raw)).unwrap_or_else(|| raw.to_path_buf())
            } else {
                raw.to_path_buf()
            };
            let (num_qbits, matrix) = read_matrix_file(&path)?;
            Ok(Gate::Init(UnitaryInit::new(num_qbits, matrix)?))
        }
        other => Err(Error::Parse(format!("unknown gate `{other}`"))),
    }
}

fn split_polarity(token: &str) -> Result<(bool, usize)> {
    let (polarity, digits) = match token.strip_prefix('!') {
        Some(rest) => (false, rest),
        None => (true, token),
    };
    let q = digits
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad qbit token `{token}`")))?;
    Ok((polarity, q))
}

fn read_matrix_file(path: &Path) -> Result<(usize, SquareMatrix)> {
    let text = fs::read_to_string(path)?;
    let mut tokens = text.split_whitespace();
    let k: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .parse()
        .map_err(|_| Error::Parse("matrix file must start with the qbit count".into()))?;
    let dim = 1usize << k;
    let mut data = Vec::with_capacity(dim * dim);
    for tok in tokens {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("bad matrix entry `{tok}`")))?;
        data.push(v);
    }
    if data.len() != dim * dim {
        return Err(Error::Parse(format!(
            "matrix file holds {} entries, expected {}",
            data.len(),
            dim * dim
        )));
    }
    Ok((k, SquareMatrix::from_row_major(dim, data)?))
}

/// Writes `k` and the row-major entries of an initialization matrix.
pub fn write_matrix_file(path: &Path, num_qbits: usize, matrix: &SquareMatrix) -> Result<()> {
    let dim = matrix.dim();
    let mut out = String::new();
    writeln!(out, "{num_qbits}").unwrap();
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| format!("{:.17}", matrix.get(r, c))).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes a circuit file; any `INIT` matrix lands next to it as `<stem>.mat`.
pub fn write_circuit(circuit: &Circuit, path: &Path) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# qbits: {}", circuit.num_qbits).unwrap();
    for (q, role) in circuit.qbit_roles.iter().enumerate() {
        writeln!(out, "# role {} {}", q, role.as_str()).unwrap();
    }
    for gate in &circuit.gates {
        match gate {
            Gate::X(q) => writeln!(out, "X {q}").unwrap(),
            Gate::H(q) => writeln!(out, "H {q}").unwrap(),
            Gate::Ry { qbit, angle } => writeln!(out, "RY {qbit} {angle:.17}").unwrap(),
            Gate::Z(q) => writeln!(out, "CZ {q}").unwrap(),
            Gate::ControlledZ { qbits, polarity } => {
                let toks: Vec<String> = qbits
                    .iter()
                    .zip(polarity)
                    .map(|(q, p)| if *p { q.to_string() } else { format!("!{q}") })
                    .collect();
                writeln!(out, "CZ {}", toks.join(" ")).unwrap();
            }
            Gate::ControlledX {
                controls,
                polarity,
                target,
            } => {
                let mut toks: Vec<String> = controls
                    .iter()
                    .zip(polarity)
                    .map(|(q, p)| if *p { q.to_string() } else { format!("!{q}") })
                    .collect();
                toks.push(target.to_string());
                writeln!(out, "CX {}", toks.join(" ")).unwrap();
            }
            Gate::Init(init) => {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "circuit".into());
                let mat_name = format!("{stem}.mat");
                let mat_path = path.with_file_name(&mat_name);
                write_matrix_file(&mat_path, init.num_qbits, &init.matrix)?;
                writeln!(out, "INIT {mat_name}").unwrap();
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}
