//! Verification suites run by `nahqc verify`.
//!
//! Every check reduces to one number, such as a residual or a fidelity deficit
//! `1 - F`, that must not exceed its threshold.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nahqc::chain::{block_sz, logical_encode};
use nahqc::compiler::{
    compile_circuit, compile_circuit_traced, compile_rotation, LogicalCircuit, LogicalGate,
};
use nahqc::evolution::{propagate_exact, propagate_stepped, run_schedule, schedule_unitary};
use nahqc::gates::{
    bloch_grid, compose_rule, entanglement_entropy, extract_logical_gate, logical_amplitudes,
    logical_embed, one_qubit_gate, projected_block_maps, rotation_gate, site_populations,
    two_qubit_gate,
};
use nahqc::holonomy::{assess, loglog_slope, wilson_convergence, CertifyThresholds};
use nahqc::linalg::inner;
use nahqc::{
    gate_fidelity, BlochVector, ChainLayout, Envelope, OneQubitParams, Operator, Pulse,
    PulseSchedule, Result, TwoQubitParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Onequbit,
    Twoqubit,
    Holonomy,
    Compiler,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Onequbit => "onequbit",
            Suite::Twoqubit => "twoqubit",
            Suite::Holonomy => "holonomy",
            Suite::Compiler => "compiler",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Replaces the threshold of every residual check; slope and determinism checks keep theirs.
    pub tol: Option<f64>,
    /// Path samples used by the holonomy suite.
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tol: None,
            samples: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Recorder {
    suite: &'static str,
    tol: Option<f64>,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str, config: &SuiteConfig) -> Self {
        Recorder {
            suite,
            tol: config.tol,
            checks: Vec::new(),
        }
    }

    fn residual(&mut self, name: &str, measured: f64, threshold: f64) {
        self.push(name, measured, self.tol.unwrap_or(threshold));
    }

    /// A check whose threshold `--tol` does not touch.
    fn fixed(&mut self, name: &str, measured: f64, threshold: f64) {
        self.push(name, measured, threshold);
    }

    fn push(&mut self, name: &str, measured: f64, threshold: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            measured,
            threshold,
            pass: measured <= threshold,
        });
    }

    fn failed(&mut self, name: &str, error: nahqc::Error) {
        self.checks.push(Check {
            suite: self.suite,
            name: format!("{name}: {error}"),
            measured: f64::INFINITY,
            threshold: 0.0,
            pass: false,
        });
    }

    fn run(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.failed(name, e);
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
        }
    }
}

pub fn run(suite: Suite, config: &SuiteConfig) -> Vec<SuiteReport> {
    match suite {
        Suite::Onequbit => vec![one_qubit(config)],
        Suite::Twoqubit => vec![two_qubit(config)],
        Suite::Holonomy => vec![holonomy(config)],
        Suite::Compiler => vec![compiler(config)],
        Suite::All => vec![
            one_qubit(config),
            two_qubit(config),
            holonomy(config),
            compiler(config),
        ],
    }
}

fn deficit(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(1.0 - gate_fidelity(a, b)?)
}

fn bloch_points() -> Vec<BlochVector> {
    bloch_grid()
        .into_iter()
        .map(|(t, p)| BlochVector::from_angles(t, p))
        .collect()
}

fn one_qubit(config: &SuiteConfig) -> SuiteReport {
    let mut r = Recorder::new("onequbit", config);
    let layout = ChainLayout::new(2).expect("two-qubit layout");
    let logical = layout.logical_indices();

    r.run("pi pulse equals n.sigma", |r| {
        let mut worst = 0.0f64;
        for i in 0..16 {
            for j in 0..16 {
                let (theta, phi) = (PI * i as f64 / 15.0, TAU * j as f64 / 16.0);
                let pulse = Pulse::one_qubit(1, OneQubitParams::new(theta, phi)?);
                let gate = extract_logical_gate(&propagate_exact(&pulse, &layout)?, &layout)?;
                let target =
                    logical_embed(&one_qubit_gate(&BlochVector::from_angles(theta, phi)), 1, 2)?;
                worst = worst.max(deficit(&gate.logical_gate, &target)?);
            }
        }
        r.residual(
            "pi pulse equals n.sigma (16x16 grid, fidelity deficit)",
            worst,
            1e-10,
        );
        Ok(())
    });

    r.run("composition", |r| {
        let points = bloch_points();
        let mut worst = 0.0f64;
        for n in &points {
            for m in &points {
                let schedule = PulseSchedule::new(vec![reflection(2, n)?, reflection(2, m)?]);
                let projected = schedule_unitary(&schedule, &layout)?.restrict(&logical);
                let target = logical_embed(&compose_rule(n, m), 2, 2)?;
                worst = worst.max((&projected - &target).max_abs());
            }
        }
        r.residual("two pi pulses compose (max entry error)", worst, 1e-10);
        Ok(())
    });

    r.run("rotation round trip", |r| {
        let mut worst = 0.0f64;
        for axis in bloch_points() {
            for k in 0..8 {
                let angle = -TAU + 4.0 * PI * (k as f64 + 0.25) / 8.0;
                let a = axis.as_array();
                let (n, m) = compile_rotation(a, angle)?;
                worst = worst.max(deficit(&compose_rule(&n, &m), &rotation_gate(&a, angle))?);
            }
        }
        r.residual(
            "compiled rotations reproduce exp(-i g/2 a.sigma) (fidelity deficit)",
            worst,
            1e-10,
        );
        Ok(())
    });

    r.run("envelope independence", |r| {
        let base = Pulse::one_qubit(1, OneQubitParams::new(1.2, 0.4)?);
        let exact = propagate_exact(&base, &layout)?;
        let mut worst = 0.0f64;
        for env in [Envelope::Square, Envelope::Gaussian, Envelope::SinSquared] {
            for steps in [10, 100, 10_000] {
                let u = propagate_stepped(&base.with_envelope(env, 2.0), steps, &layout)?;
                worst = worst.max(deficit(&u, &exact)?);
            }
        }
        r.residual(
            "envelope shape does not matter at fixed area (fidelity deficit)",
            worst,
            1e-9,
        );
        Ok(())
    });

    r.finish()
}

fn reflection(qubit: usize, n: &BlochVector) -> Result<Pulse> {
    let (theta, phi) = n.angles();
    Ok(Pulse::one_qubit(qubit, OneQubitParams::new(theta, phi)?))
}

fn varthetas() -> Vec<f64> {
    (0..32).map(|j| TAU * j as f64 / 32.0).collect()
}

fn two_qubit(config: &SuiteConfig) -> SuiteReport {
    let mut r = Recorder::new("twoqubit", config);
    let layout = ChainLayout::new(2).expect("two-qubit layout");
    let logical = layout.logical_indices();

    r.run("block maps", |r| {
        let mut worst = 0.0f64;
        for &vt in &varthetas() {
            for k in 1..=16 {
                let area = TAU * k as f64 / 16.0;
                let pulse = Pulse::three_site(1, TwoQubitParams::new(vt)?).with_area(area);
                let projected = propagate_exact(&pulse, &layout)?.restrict(&logical);
                let maps = projected_block_maps(vt, area);
                worst = worst.max((&projected.restrict(&[1, 2]) - &maps.a).max_abs());
                worst = worst.max((projected[(3, 3)] - maps.c).norm());
            }
        }
        r.residual("projected block maps (max entry error)", worst, 1e-10);
        Ok(())
    });

    r.run("two-qubit gate", |r| {
        let (mut fid, mut leak, mut aux) = (0.0f64, 0.0f64, 0.0f64);
        for &vt in &varthetas() {
            let pulse = Pulse::three_site(1, TwoQubitParams::new(vt)?);
            let report = extract_logical_gate(&propagate_exact(&pulse, &layout)?, &layout)?;
            fid = fid.max(deficit(&report.logical_gate, &two_qubit_gate(vt))?);
            leak = leak.max(report.leakage);
            for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
                let out = run_schedule(
                    &PulseSchedule::new(vec![pulse]),
                    &logical_encode(&bits, &layout)?,
                    &layout,
                )?;
                let p = site_populations(&out, &layout)[1];
                aux = aux.max(p[1] + p[2]);
            }
        }
        r.residual(
            "pi-area gate matches the XY target (fidelity deficit)",
            fid,
            1e-10,
        );
        r.residual("leakage out of the logical subspace", leak, 1e-10);
        r.residual("auxiliary site population outside |0>", aux, 1e-12);
        Ok(())
    });

    r.run("S_z structure", |r| {
        let sz = block_sz(1, &layout)?;
        let (mut comm, mut fixed) = (0.0f64, 0.0f64);
        for vt in [0.3, PI / 2.0, 2.0, 4.5] {
            let pulse = Pulse::three_site(1, TwoQubitParams::new(vt)?).with_area(1.3);
            let u = propagate_exact(&pulse, &layout)?;
            comm = comm.max(u.commutator(&sz).frobenius_norm());
            for index in 0..layout.dim() {
                if layout.site_codes(index).contains(&2) {
                    let col = u.column(index);
                    let err: f64 = col
                        .iter()
                        .enumerate()
                        .map(|(k, z)| (z - if k == index { 1.0 } else { 0.0 }).norm_sqr())
                        .sum();
                    fixed = fixed.max(err.sqrt());
                }
            }
        }
        r.residual("propagator commutes with S_z", comm, 1e-10);
        r.residual("states with |e> are fixed points", fixed, 1e-12);
        Ok(())
    });

    r.run("entanglement", |r| {
        let half = Complex64::new(0.5, 0.0);
        let plus = [half; 4];
        let s = entanglement_entropy(&two_qubit_gate(PI / 2.0).apply(&plus))?;
        r.residual(
            "XY(pi/2) on |++> has entropy ln 2 (absolute error)",
            (s - LN_2).abs(),
            1e-9,
        );
        let grid = bloch_grid();
        let mut worst = 0.0f64;
        for vt in [0.0, PI] {
            let g = two_qubit_gate(vt);
            for &(ta, pa) in &grid {
                for &(tb, pb) in &grid {
                    let a = [
                        Complex64::new((ta / 2.0).cos(), 0.0),
                        Complex64::from_polar((ta / 2.0).sin(), pa),
                    ];
                    let b = [
                        Complex64::new((tb / 2.0).cos(), 0.0),
                        Complex64::from_polar((tb / 2.0).sin(), pb),
                    ];
                    let input = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
                    worst = worst.max(entanglement_entropy(&g.apply(&input))?);
                }
            }
        }
        r.residual(
            "XY(0) and XY(pi) never entangle grid products (entropy)",
            worst,
            1e-8,
        );
        Ok(())
    });

    r.finish()
}

fn holonomy(config: &SuiteConfig) -> SuiteReport {
    let mut r = Recorder::new("holonomy", config);
    let layout = ChainLayout::new(2).expect("two-qubit layout");
    let thresholds = CertifyThresholds::default();
    let mut counts: Vec<usize> = (6..)
        .map(|p| 1usize << p)
        .take_while(|&k| k <= config.samples)
        .collect();
    if counts.len() < 3 {
        counts = vec![64, 128, 256];
    }
    let canonical = [
        (
            "one-qubit",
            Pulse::one_qubit(1, OneQubitParams::new(PI / 4.0, 0.0).expect("angles")),
        ),
        (
            "three-site",
            Pulse::three_site(1, TwoQubitParams::new(PI / 2.0).expect("angle")),
        ),
    ];
    for (family, pulse) in canonical {
        r.run(family, |r| {
            let report = assess(&pulse, &layout, config.samples)?;
            r.residual(
                &format!("{family}: parallel transport max ||PHP||"),
                report.parallel_transport_residual,
                thresholds.parallel_transport,
            );
            r.residual(
                &format!("{family}: dynamical phase"),
                report.dynamical_phase.abs(),
                thresholds.dynamical_phase,
            );
            r.residual(
                &format!("{family}: cyclicity residual"),
                report.cyclicity_residual,
                thresholds.cyclicity,
            );
            r.residual(
                &format!("{family}: Wilson loop vs propagator (fidelity deficit)"),
                1.0 - report.cross_fidelity.unwrap_or(0.0),
                1.0 - thresholds.cross_fidelity,
            );
            let points = wilson_convergence(&pulse, &layout, &counts)?;
            let slope = loglog_slope(
                &points
                    .iter()
                    .map(|p| (p.samples as f64, p.raw_deficit))
                    .collect::<Vec<_>>(),
            );
            r.fixed(
                &format!("{family}: convergence slope of the Wilson product"),
                slope,
                -0.9,
            );
            Ok(())
        });
    }
    r.finish()
}

fn random_circuit(rng: &mut ChaCha8Rng) -> (usize, LogicalCircuit) {
    let n = rng.gen_range(1..=3);
    let depth = rng.gen_range(1..=6);
    let unit = |rng: &mut ChaCha8Rng| loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if let Ok(b) = BlochVector::normalize(v) {
            if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) > 1e-4 {
                return b;
            }
        }
    };
    let gates = (0..depth)
        .map(|_| {
            let kind = if n >= 2 {
                rng.gen_range(0..3)
            } else {
                rng.gen_range(0..2)
            };
            match kind {
                0 => LogicalGate::Rotation {
                    qubit: rng.gen_range(1..=n),
                    axis: unit(rng).as_array(),
                    angle: rng.gen_range(-TAU..TAU),
                },
                1 => LogicalGate::Reflection {
                    qubit: rng.gen_range(1..=n),
                    n: unit(rng),
                },
                _ => LogicalGate::Xy {
                    pair: rng.gen_range(1..n),
                    vartheta: rng.gen_range(0.0..TAU),
                },
            }
        })
        .collect();
    (n, LogicalCircuit::new(gates))
}

fn compiler(config: &SuiteConfig) -> SuiteReport {
    let mut r = Recorder::new("compiler", config);

    r.run("examples", |r| {
        let layout = ChainLayout::new(2)?;
        let circuit = LogicalCircuit::new(vec![
            LogicalGate::Rotation {
                qubit: 1,
                axis: [0.0, 0.0, 1.0],
                angle: PI / 2.0,
            },
            LogicalGate::Xy {
                pair: 1,
                vartheta: PI / 2.0,
            },
        ]);
        let schedule = compile_circuit(&circuit, &layout)?;
        let gate = extract_logical_gate(&schedule_unitary(&schedule, &layout)?, &layout)?;
        let target = two_qubit_gate(PI / 2.0)
            .matmul(&rotation_gate(&[0.0, 0.0, 1.0], PI / 2.0).kron(&Operator::identity(2)));
        r.residual(
            "rotation then XY example (fidelity deficit)",
            deficit(&gate.logical_gate, &target)?,
            1e-9,
        );
        Ok(())
    });

    r.run("round trip", |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00c0_ffee);
        let (mut gate_worst, mut state_worst, mut nondeterministic) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let (n, circuit) = random_circuit(&mut rng);
            let layout = ChainLayout::new(n)?;
            let compiled = compile_circuit_traced(&circuit, &layout)?;
            if compiled != compile_circuit_traced(&circuit, &layout)? {
                nondeterministic += 1.0;
            }
            let analytic = circuit.unitary(&layout)?;
            let report =
                extract_logical_gate(&schedule_unitary(&compiled.schedule, &layout)?, &layout)?;
            gate_worst = gate_worst.max(deficit(&report.logical_gate, &analytic)?);

            let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let out = run_schedule(
                &compiled.schedule,
                &logical_encode(&bits, &layout)?,
                &layout,
            )?;
            let (amps, _) = logical_amplitudes(&out, &layout);
            let position = bits.iter().fold(0usize, |acc, &b| 2 * acc + b as usize);
            let column = analytic.column(position);
            state_worst = state_worst.max(1.0 - inner(&column, &amps).norm_sqr());
        }
        r.residual(
            "100 random circuits: compiled gate vs analytic (fidelity deficit)",
            gate_worst,
            1e-8,
        );
        r.residual(
            "100 random circuits: simulated state vs analytic (fidelity deficit)",
            state_worst,
            1e-8,
        );
        r.fixed(
            "compilation is deterministic (mismatches)",
            nondeterministic,
            0.0,
        );
        Ok(())
    });

    r.finish()
}
