//! On-disk JSON formats for schedules and circuits.

use std::f64::consts::PI;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use nahqc::compiler::{LogicalCircuit, LogicalGate};
use nahqc::evolution::{Envelope, Pulse, PulseKind, PulseSchedule};
use nahqc::{BlochVector, OneQubitParams, TwoQubitParams};

use crate::CliError;

fn default_area() -> f64 {
    PI
}

fn default_envelope() -> String {
    Envelope::Square.name().to_string()
}

fn default_duration() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseDto {
    OneQubit {
        qubit: usize,
        theta: f64,
        phi: f64,
        #[serde(default = "default_area")]
        area: f64,
        #[serde(default = "default_envelope")]
        envelope: String,
        #[serde(default = "default_duration")]
        duration: f64,
    },
    ThreeSite {
        pair: usize,
        vartheta: f64,
        #[serde(default = "default_area")]
        area: f64,
        #[serde(default = "default_envelope")]
        envelope: String,
        #[serde(default = "default_duration")]
        duration: f64,
    },
}

/// Schedule document. Extra top-level fields are ignored so that the output
/// of `compile` can be fed straight to `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub pulses: Vec<PulseDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateDto {
    Rotation {
        qubit: usize,
        axis: [f64; 3],
        angle: f64,
    },
    Reflection {
        qubit: usize,
        n: [f64; 3],
    },
    Xy {
        pair: usize,
        vartheta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub gates: Vec<GateDto>,
}

fn envelope(name: &str, index: usize) -> Result<Envelope, CliError> {
    Envelope::from_name(name).ok_or_else(|| CliError::Invalid {
        what: format!("pulses[{index}].envelope"),
        message: format!("unknown envelope {name:?} (expected square, gaussian or sin2)"),
    })
}

impl PulseDto {
    pub fn to_pulse(&self, index: usize) -> Result<Pulse, CliError> {
        let invalid = |e: nahqc::Error| CliError::Invalid {
            what: format!("pulses[{index}]"),
            message: e.to_string(),
        };
        let (pulse, area, env, duration) = match self {
            PulseDto::OneQubit {
                qubit,
                theta,
                phi,
                area,
                envelope,
                duration,
            } => (
                Pulse::one_qubit(*qubit, OneQubitParams::new(*theta, *phi).map_err(invalid)?),
                *area,
                envelope,
                *duration,
            ),
            PulseDto::ThreeSite {
                pair,
                vartheta,
                area,
                envelope,
                duration,
            } => (
                Pulse::three_site(*pair, TwoQubitParams::new(*vartheta).map_err(invalid)?),
                *area,
                envelope,
                *duration,
            ),
        };
        Ok(pulse
            .with_area(area)
            .with_envelope(self::envelope(env, index)?, duration))
    }

    pub fn from_pulse(pulse: &Pulse) -> Self {
        let envelope = pulse.envelope.name().to_string();
        match pulse.kind {
            PulseKind::OneQubit { qubit, params } => {
                let (theta, phi) = params.raw();
                PulseDto::OneQubit {
                    qubit,
                    theta,
                    phi,
                    area: pulse.area,
                    envelope,
                    duration: pulse.duration,
                }
            }
            PulseKind::ThreeSite { pair, params } => PulseDto::ThreeSite {
                pair,
                vartheta: params.raw(),
                area: pulse.area,
                envelope,
                duration: pulse.duration,
            },
        }
    }
}

impl ScheduleFile {
    pub fn to_schedule(&self) -> Result<PulseSchedule, CliError> {
        let pulses = self
            .pulses
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_pulse(i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PulseSchedule::new(pulses))
    }

    pub fn from_schedule(schedule: &PulseSchedule) -> Self {
        ScheduleFile {
            pulses: schedule.pulses.iter().map(PulseDto::from_pulse).collect(),
        }
    }
}

impl CircuitFile {
    pub fn to_circuit(&self) -> Result<LogicalCircuit, CliError> {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(index, g)| {
                Ok(match *g {
                    GateDto::Rotation { qubit, axis, angle } => {
                        LogicalGate::Rotation { qubit, axis, angle }
                    }
                    GateDto::Reflection { qubit, n } => LogicalGate::Reflection {
                        qubit,
                        n: BlochVector::normalize(n).map_err(|e| CliError::Invalid {
                            what: format!("gates[{index}].n"),
                            message: e.to_string(),
                        })?,
                    },
                    GateDto::Xy { pair, vartheta } => LogicalGate::Xy { pair, vartheta },
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(LogicalCircuit::new(gates))
    }
}

/// Parses a JSON document, reporting the failing field path and position.
pub fn parse_json<T: DeserializeOwned>(text: &str, source: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            file: source.to_string(),
            line: inner.line(),
            column: inner.column(),
            path,
            message: strip_location(&inner.to_string()),
        }
    })?;
    de.end().map_err(|e| CliError::Parse {
        file: source.to_string(),
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: strip_location(&e.to_string()),
    })?;
    Ok(value)
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_location(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(cut) => message[..cut].to_string(),
        None => message.to_string(),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text, &path.display().to_string())
}
