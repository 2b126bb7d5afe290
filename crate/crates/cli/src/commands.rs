//! Implementation of the `simulate`, `compile`, `extract-gate` and `verify` subcommands.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use nahqc::chain::logical_encode;
use nahqc::compiler::compile_circuit_traced;
use nahqc::evolution::{run_schedule, schedule_unitary};
use nahqc::gates::{
    extract_logical_gate, logical_amplitudes, site_populations, EntanglingVerdict, Makhlin,
};
use nahqc::{ChainLayout, Operator};

use crate::formats::{read_json, CircuitFile, PulseDto, ScheduleFile};
use crate::suites::{self, Suite, SuiteConfig, SuiteReport};
use crate::{json, CliError};

/// Largest chain size handled without a warning (3^7 = 2187-dimensional propagators).
pub const COMFORTABLE_QUBITS: usize = 4;

pub fn layout(n: usize) -> Result<ChainLayout, CliError> {
    let layout = ChainLayout::new(n).map_err(|e| CliError::Usage(format!("--qubits: {e}")))?;
    if n > COMFORTABLE_QUBITS {
        eprintln!(
            "warning: {n} qubits means {}-dimensional dense propagators; this may be slow",
            layout.dim()
        );
    }
    Ok(layout)
}

pub fn parse_bits(text: &str, n: usize) -> Result<Vec<u8>, CliError> {
    let bits = text
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(CliError::Usage(format!(
                "--initial: expected only 0 and 1, found {other:?}"
            ))),
        })
        .collect::<Result<Vec<u8>, _>>()?;
    if bits.len() != n {
        return Err(CliError::Usage(format!(
            "--initial: expected {n} bits, got {}",
            bits.len()
        )));
    }
    Ok(bits)
}

fn basis_labels(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|k| format!("{k:0width$b}", width = n))
        .collect()
}

fn core(e: nahqc::Error) -> CliError {
    CliError::Core(e)
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub qubits: usize,
    pub initial: String,
    pub pulses: usize,
    pub basis: Vec<String>,
    pub logical_amplitudes: Vec<Complex64>,
    pub site_populations: Vec<[f64; 3]>,
    pub leakage: f64,
}

pub fn simulate(
    schedule: &Path,
    qubits: usize,
    initial: &str,
) -> Result<SimulationReport, CliError> {
    let layout = layout(qubits)?;
    let bits = parse_bits(initial, qubits)?;
    let file: ScheduleFile = read_json(schedule)?;
    let schedule = file.to_schedule()?;
    let psi0 = logical_encode(&bits, &layout).map_err(core)?;
    let out = run_schedule(&schedule, &psi0, &layout).map_err(core)?;
    let (amplitudes, leakage) = logical_amplitudes(&out, &layout);
    Ok(SimulationReport {
        qubits,
        initial: initial.to_string(),
        pulses: schedule.len(),
        basis: basis_labels(qubits),
        logical_amplitudes: amplitudes,
        site_populations: site_populations(&out, &layout),
        leakage,
    })
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub pulse: usize,
    pub gate_index: usize,
    pub rule: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CompileReport {
    pub qubits: usize,
    pub pulses: Vec<PulseDto>,
    pub provenance: Vec<Provenance>,
    pub predicted_logical_gate: Operator,
}

pub fn compile(circuit: &Path, qubits: usize) -> Result<CompileReport, CliError> {
    let layout = layout(qubits)?;
    let file: CircuitFile = read_json(circuit)?;
    let circuit = file.to_circuit()?;
    let compiled = compile_circuit_traced(&circuit, &layout).map_err(core)?;
    let predicted = circuit.unitary(&layout).map_err(core)?;
    Ok(CompileReport {
        qubits,
        pulses: ScheduleFile::from_schedule(&compiled.schedule).pulses,
        provenance: compiled
            .origins
            .iter()
            .enumerate()
            .map(|(pulse, o)| Provenance {
                pulse,
                gate_index: o.gate_index,
                rule: o.rule,
            })
            .collect(),
        predicted_logical_gate: predicted,
    })
}

#[derive(Debug, Serialize)]
pub struct ExtractReport {
    pub qubits: usize,
    pub leakage: f64,
    pub exact: bool,
    pub logical_gate: Operator,
    pub makhlin: Option<Makhlin>,
    pub entangling: Option<EntanglingVerdict>,
}

pub fn extract_gate(schedule: &Path, qubits: usize) -> Result<ExtractReport, CliError> {
    let layout = layout(qubits)?;
    let file: ScheduleFile = read_json(schedule)?;
    let schedule = file.to_schedule()?;
    let u = schedule_unitary(&schedule, &layout).map_err(core)?;
    let report = extract_logical_gate(&u, &layout).map_err(core)?;
    Ok(ExtractReport {
        qubits,
        leakage: report.leakage,
        exact: report.exact,
        logical_gate: report.logical_gate,
        makhlin: report.makhlin,
        entangling: report.entangling,
    })
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn verify(suite: Suite, config: &SuiteConfig) -> VerifyReport {
    let suites = suites::run(suite, config);
    VerifyReport {
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}

/// Human-readable summary, one line per check.
pub fn verify_summary(report: &VerifyReport) -> String {
    let mut out = String::new();
    for suite in &report.suites {
        for c in &suite.checks {
            out.push_str(&format!(
                "[{}] {}: {} = {:.3e} (threshold {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                suite.suite,
                c.name,
                c.measured,
                c.threshold
            ));
        }
    }
    out.push_str(if report.pass {
        "verify: PASS\n"
    } else {
        "verify: FAIL\n"
    });
    out
}

/// Writes `value` as deterministic JSON to `out`, or to stdout when absent.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = json::to_string(value).map_err(|e| CliError::Usage(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
