//! Compilation of logical circuits into pi-pulse schedules.
//!
//! Every gate becomes one or two pi pulses: a reflection `n . sigma` is a
//! single one-qubit pulse, an arbitrary rotation is the product of two
//! reflections, and an XY gate is a single three-site pulse.

use serde::Serialize;

use crate::chain::{ChainLayout, OneQubitParams, TwoQubitParams};
use crate::error::{Error, Result};
use crate::evolution::{Pulse, PulseSchedule};
use crate::gates::{
    cross, dot, logical_embed, one_qubit_gate, rotation_gate, two_qubit_gate, BlochVector,
};
use crate::linalg::Operator;

/// A basis vector counts as parallel to the axis when `|axis x e|` is below this.
const PARALLEL_EPS: f64 = 1e-6;

const UNIT_AXIS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogicalGate {
    /// `exp(-i angle/2 sigma . axis)` on one qubit.
    Rotation {
        qubit: usize,
        axis: [f64; 3],
        angle: f64,
    },
    /// `n . sigma` on one qubit.
    Reflection { qubit: usize, n: BlochVector },
    /// Two-qubit XY gate on qubits `pair` and `pair + 1`.
    Xy { pair: usize, vartheta: f64 },
}

impl LogicalGate {
    /// Analytic matrix on the qubits the gate touches.
    pub fn matrix(&self) -> Operator {
        match *self {
            LogicalGate::Rotation { axis, angle, .. } => rotation_gate(&axis, angle),
            LogicalGate::Reflection { n, .. } => one_qubit_gate(&n),
            LogicalGate::Xy { vartheta, .. } => two_qubit_gate(vartheta),
        }
    }

    fn first_qubit(&self) -> usize {
        match *self {
            LogicalGate::Rotation { qubit, .. } | LogicalGate::Reflection { qubit, .. } => qubit,
            LogicalGate::Xy { pair, .. } => pair,
        }
    }

    fn validate(&self, layout: &ChainLayout) -> std::result::Result<(), String> {
        match *self {
            LogicalGate::Rotation { qubit, axis, angle } => {
                layout.check_qubit(qubit).map_err(|e| e.to_string())?;
                let norm = dot(&axis, &axis).sqrt();
                if norm.is_nan() || (norm - 1.0).abs() > UNIT_AXIS_EPS {
                    return Err(format!(
                        "rotation axis must be unit length, got norm {norm}"
                    ));
                }
                if !angle.is_finite() {
                    return Err(format!("non-finite rotation angle {angle}"));
                }
                Ok(())
            }
            LogicalGate::Reflection { qubit, .. } => {
                layout.check_qubit(qubit).map_err(|e| e.to_string())
            }
            LogicalGate::Xy { pair, vartheta } => {
                layout.check_pair(pair).map_err(|e| e.to_string())?;
                if !vartheta.is_finite() {
                    return Err(format!("non-finite coupling angle {vartheta}"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LogicalCircuit {
    pub gates: Vec<LogicalGate>,
}

impl LogicalCircuit {
    pub fn new(gates: Vec<LogicalGate>) -> Self {
        LogicalCircuit { gates }
    }

    pub fn validate(&self, layout: &ChainLayout) -> Result<()> {
        for (index, gate) in self.gates.iter().enumerate() {
            gate.validate(layout)
                .map_err(|reason| Error::InvalidGate { index, reason })?;
        }
        Ok(())
    }

    /// Product of the gate matrices on the `2^N` logical space, first gate rightmost.
    pub fn unitary(&self, layout: &ChainLayout) -> Result<Operator> {
        self.validate(layout)?;
        let n = layout.n_logical();
        let mut acc = Operator::identity(layout.logical_dim());
        for gate in &self.gates {
            let full = logical_embed(&gate.matrix(), gate.first_qubit(), n)?;
            acc = full.matmul(&acc);
        }
        Ok(acc)
    }
}

/// Pair of reflections `(n, m)` with `(m . sigma)(n . sigma) = exp(-i angle/2 sigma . axis)`.
pub fn compile_rotation(axis: [f64; 3], angle: f64) -> Result<(BlochVector, BlochVector)> {
    let norm = dot(&axis, &axis).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroAxis);
    }
    if !norm.is_finite() || !angle.is_finite() {
        return Err(Error::NotUnitVector { norm });
    }
    let a = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let e = basis
        .iter()
        .find(|e| {
            let c = cross(&a, e);
            dot(&c, &c).sqrt() > PARALLEL_EPS
        })
        .expect("a unit vector cannot be parallel to all three axes");
    let along = dot(e, &a);
    let n = BlochVector::normalize([
        e[0] - along * a[0],
        e[1] - along * a[1],
        e[2] - along * a[2],
    ])?;
    let (s, c) = (angle / 2.0).sin_cos();
    let an = cross(&a, &n.as_array());
    let nv = n.as_array();
    let m = BlochVector::normalize([
        c * nv[0] + s * an[0],
        c * nv[1] + s * an[1],
        c * nv[2] + s * an[2],
    ])?;
    Ok((n, m))
}

/// Drive angles producing the reflection `n . sigma`.
pub fn reflection_params(n: &BlochVector) -> Result<OneQubitParams> {
    let (theta, phi) = n.angles();
    OneQubitParams::new(theta, phi)
}

/// Which circuit gate a pulse implements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseOrigin {
    pub gate_index: usize,
    pub rule: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledCircuit {
    pub schedule: PulseSchedule,
    pub origins: Vec<PulseOrigin>,
}

pub fn compile_circuit(circuit: &LogicalCircuit, layout: &ChainLayout) -> Result<PulseSchedule> {
    Ok(compile_circuit_traced(circuit, layout)?.schedule)
}

/// Compiles and records, for each pulse, the gate and rule it came from.
pub fn compile_circuit_traced(
    circuit: &LogicalCircuit,
    layout: &ChainLayout,
) -> Result<CompiledCircuit> {
    circuit.validate(layout)?;
    let mut pulses = Vec::new();
    let mut origins = Vec::new();
    for (index, gate) in circuit.gates.iter().enumerate() {
        match *gate {
            LogicalGate::Reflection { qubit, n } => {
                pulses.push(Pulse::one_qubit(qubit, reflection_params(&n)?));
                origins.push(PulseOrigin {
                    gate_index: index,
                    rule: "reflection: one pi pulse implementing n.sigma",
                });
            }
            LogicalGate::Rotation { qubit, axis, angle } => {
                let (n, m) = compile_rotation(axis, angle)?;
                pulses.push(Pulse::one_qubit(qubit, reflection_params(&n)?));
                pulses.push(Pulse::one_qubit(qubit, reflection_params(&m)?));
                origins.push(PulseOrigin {
                    gate_index: index,
                    rule: "rotation: first reflection n.sigma of (m.sigma)(n.sigma)",
                });
                origins.push(PulseOrigin {
                    gate_index: index,
                    rule: "rotation: second reflection m.sigma of (m.sigma)(n.sigma)",
                });
            }
            LogicalGate::Xy { pair, vartheta } => {
                pulses.push(Pulse::three_site(pair, TwoQubitParams::new(vartheta)?));
                origins.push(PulseOrigin {
                    gate_index: index,
                    rule: "xy: one three-site pi pulse on the pair block",
                });
            }
        }
    }
    Ok(CompiledCircuit {
        schedule: PulseSchedule::new(pulses),
        origins,
    })
}
