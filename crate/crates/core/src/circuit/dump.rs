//! Line-oriented text form: a `QUBITS n` header, then one gate per line as
//! `NAME targets [controls] angle`, with `!q` for an open control. Composite
//! gates are flattened. Dense payloads follow as `{re im re im ...}` row-major.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Circuit, Control, Gate, GateKind};
use crate::linalg::CMatrix;
use crate::{Error, Result};

pub fn to_text(circuit: &Circuit) -> String {
    let mut s = format!("QUBITS {}\n", circuit.n_qubits());
    for g in circuit.gates() {
        write_gate(&mut s, g, &[]);
    }
    s
}

fn write_gate(s: &mut String, g: &Gate, extra: &[Control]) {
    let mut ctrls = extra.to_vec();
    ctrls.extend_from_slice(&g.controls);
    match &g.kind {
        GateKind::Block(c) => c.gates().iter().for_each(|h| write_gate(s, h, &ctrls)),
        GateKind::Conjugated { outer, inner } => {
            outer.gates().iter().for_each(|h| write_gate(s, h, &[]));
            inner.gates().iter().for_each(|h| write_gate(s, h, &ctrls));
            outer.inverse().gates().iter().for_each(|h| write_gate(s, h, &[]));
        }
        kind => {
            let flat = Gate {
                kind: kind.clone(),
                targets: g.targets.clone(),
                controls: ctrls,
            };
            let _ = write!(s, "{flat}");
            if let GateKind::Unitary(m) = kind {
                let parts: Vec<String> = m.transpose().iter().map(|z| format!("{:?} {:?}", z.re, z.im)).collect();
                let _ = write!(s, " {{{}}}", parts.join(" "));
            }
            s.push('\n');
        }
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_list(tok: &str, line: usize) -> Result<Vec<usize>> {
    if tok.is_empty() {
        return Ok(Vec::new());
    }
    tok.split(',')
        .map(|t| t.parse().map_err(|_| perr(line, format!("bad qubit '{t}'"))))
        .collect()
}

pub fn from_text(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, payload) = match body.find('{') {
            Some(p) => {
                let end = body.rfind('}').ok_or_else(|| perr(line, "unclosed '{'"))?;
                (body[..p].trim(), Some(&body[p + 1..end]))
            }
            None => (body, None),
        };
        let mut toks = head.split_whitespace();
        let name = toks.next().unwrap();
        if name == "QUBITS" {
            let n = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(line, "QUBITS needs a count"))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| perr(line, "missing QUBITS header"))?;
        let mut targets = Vec::new();
        let mut controls = Vec::new();
        let mut angle = None;
        for tok in toks {
            if let Some(inner) = tok.strip_prefix('[') {
                let inner = inner.strip_suffix(']').ok_or_else(|| perr(line, "unclosed '['"))?;
                for part in inner.split(',').filter(|p| !p.is_empty()) {
                    let (neg, q) = match part.strip_prefix('!') {
                        Some(q) => (true, q),
                        None => (false, part),
                    };
                    let q: usize = q.parse().map_err(|_| perr(line, "bad control"))?;
                    controls.push(if neg { Control::neg(q) } else { Control::pos(q) });
                }
            } else if tok.chars().all(|ch| ch.is_ascii_digit() || ch == ',') {
                targets = parse_list(tok, line)?;
            } else {
                angle = Some(
                    tok.parse::<f64>()
                        .map_err(|_| perr(line, format!("bad angle '{tok}'")))?,
                );
            }
        }
        let need = |a: Option<f64>| a.ok_or_else(|| perr(line, format!("{name} needs an angle")));
        let kind = match name {
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "T" => GateKind::T,
            "TDG" => GateKind::Tdg,
            "W" => GateKind::W,
            "WDG" => GateKind::Wdg,
            "RX" => GateKind::Rx(need(angle)?),
            "RY" => GateKind::Ry(need(angle)?),
            "RZ" => GateKind::Rz(need(angle)?),
            "P" => GateKind::Phase(need(angle)?),
            "RZZ" => GateKind::Rzz(need(angle)?),
            "GPHASE" => GateKind::GlobalPhase(need(angle)?),
            "UNITARY" => {
                let vals: Vec<f64> = payload
                    .ok_or_else(|| perr(line, "UNITARY needs a payload"))?
                    .split_whitespace()
                    .map(|v| v.parse().map_err(|_| perr(line, "bad matrix entry")))
                    .collect::<Result<_>>()?;
                let dim = 1usize << targets.len();
                if vals.len() != 2 * dim * dim {
                    return Err(perr(line, "matrix payload has the wrong size"));
                }
                let m = CMatrix::from_fn(dim, dim, |r, col| {
                    let k = 2 * (r * dim + col);
                    Complex64::new(vals[k], vals[k + 1])
                });
                GateKind::Unitary(Arc::new(m))
            }
            other => return Err(perr(line, format!("unknown gate '{other}'"))),
        };
        let gate = Gate {
            kind,
            targets,
            controls,
        };
        c.try_push(gate).map_err(|e| perr(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| perr(0, "empty circuit text"))
}
