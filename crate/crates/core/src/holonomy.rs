//! Certification that a pulse acts holonomically on the computational subspace.
//!
//! The gate is obtained two independent ways and compared:
//!
//! * the projected propagator `P(0) U(tau) P(0)`, restricted to the initial
//!   frame and unitarized;
//! * a discrete Wilson loop: the ordered product of overlaps between frames
//!   sampled along the subspace path, closed back onto the initial frame.
//!   This depends only on the sequence of projectors `P(t_j)`, not on the
//!   gauge of the sampled frames.
//!
//! Alongside, the path is checked for parallel transport (`P H P = 0`),
//! vanishing dynamical phase and cyclicity (`P(tau) = P(0)`).

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::ChainLayout;
use crate::error::{Error, Result};
use crate::evolution::{propagate_exact, Pulse};
use crate::linalg::{
    hermitian_eigen, inner, polar_unitary, trace_overlap, Operator, StateVector, ZERO,
};

/// Frames are re-orthonormalized after this many slices.
pub const REORTHONORMALIZE_EVERY: usize = 64;

/// Largest `||P(tau) - P(0)||_F` for which a Wilson loop is closed.
pub const WILSON_CYCLICITY: f64 = 1e-6;

const FRAME_TOLERANCE: f64 = 1e-10;

/// Pass/fail thresholds of [`certify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyThresholds {
    pub parallel_transport: f64,
    pub dynamical_phase: f64,
    pub cyclicity: f64,
    pub cross_fidelity: f64,
}

impl Default for CertifyThresholds {
    fn default() -> Self {
        CertifyThresholds {
            parallel_transport: 1e-9,
            dynamical_phase: 1e-9,
            cyclicity: 1e-8,
            cross_fidelity: 1.0 - 1e-6,
        }
    }
}

/// Sampled path of a K-dimensional subspace.
#[derive(Debug, Clone)]
pub struct SubspacePath {
    times: Vec<f64>,
    areas: Vec<f64>,
    /// `frames[j][a]` is `|zeta_a(t_j)>`.
    frames: Vec<Vec<Vec<Complex64>>>,
}

impl SubspacePath {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Dimension K of the subspace.
    pub fn rank(&self) -> usize {
        self.frames[0].len()
    }

    pub fn dim(&self) -> usize {
        self.frames[0][0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Cumulative pulse area at each sample.
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn frame(&self, j: usize) -> &[Vec<Complex64>] {
        &self.frames[j]
    }

    pub fn projector(&self, j: usize) -> Operator {
        let frame = &self.frames[j];
        Operator::from_fn(self.dim(), |r, c| {
            frame.iter().map(|z| z[r] * z[c].conj()).sum()
        })
    }

    /// `||P(tau) - P(0)||_F`
    pub fn cyclicity_residual(&self) -> f64 {
        (&self.projector(self.len() - 1) - &self.projector(0)).frobenius_norm()
    }

    /// Largest violation of `P^2 = P`, `P = P^dagger`, `Tr P = K` over all samples.
    pub fn projector_defect(&self) -> f64 {
        let k = self.rank() as f64;
        (0..self.len())
            .map(|j| {
                let p = self.projector(j);
                let idem = (&p.matmul(&p) - &p).frobenius_norm();
                let herm = p.hermiticity_defect();
                let tr = (p.trace() - Complex64::new(k, 0.0)).norm();
                idem.max(herm).max(tr)
            })
            .fold(0.0, f64::max)
    }

    /// Replaces every frame by `frame * R_j` for unitary `R_j`; the subspaces are unchanged.
    pub fn regauge(&mut self, mut rotation: impl FnMut(usize) -> Operator) {
        for (j, frame) in self.frames.iter_mut().enumerate() {
            let r = rotation(j);
            *frame = rotate_frame(frame, &r);
        }
    }
}

fn rotate_frame(frame: &[Vec<Complex64>], r: &Operator) -> Vec<Vec<Complex64>> {
    let k = frame.len();
    (0..k)
        .map(|b| {
            let mut out = vec![ZERO; frame[0].len()];
            for a in 0..k {
                let w = r[(a, b)];
                for (o, z) in out.iter_mut().zip(&frame[a]) {
                    *o += z * w;
                }
            }
            out
        })
        .collect()
}

/// `Z_1^dagger Z_2` for two frames of equal rank.
fn overlap(z1: &[Vec<Complex64>], z2: &[Vec<Complex64>]) -> Operator {
    Operator::from_fn(z1.len(), |a, b| inner(&z1[a], &z2[b]))
}

fn orthonormality_defect(frame: &[Vec<Complex64>]) -> f64 {
    (&overlap(frame, frame) - &Operator::identity(frame.len())).frobenius_norm()
}

/// Modified Gram-Schmidt on the columns of a frame.
fn reorthonormalize(frame: &mut [Vec<Complex64>]) {
    for a in 0..frame.len() {
        let (done, rest) = frame.split_at_mut(a);
        let v = &mut rest[0];
        for q in done.iter() {
            let proj = inner(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let norm = crate::linalg::norm2(v);
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Evolves `initial_frame` through the pulse and samples it at `samples` equally spaced times.
pub fn trace_subspace(
    pulse: &Pulse,
    initial_frame: &[StateVector],
    samples: usize,
    layout: &ChainLayout,
) -> Result<SubspacePath> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    if initial_frame.is_empty() {
        return Err(Error::FrameNotOrthonormal { defect: f64::NAN });
    }
    let frame0: Vec<Vec<Complex64>> = initial_frame
        .iter()
        .map(|s| s.amplitudes().to_vec())
        .collect();
    if let Some(bad) = frame0.iter().find(|z| z.len() != layout.dim()) {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            actual: bad.len(),
        });
    }
    let defect = orthonormality_defect(&frame0);
    if defect > FRAME_TOLERANCE {
        return Err(Error::FrameNotOrthonormal { defect });
    }

    let h = pulse.hamiltonian(layout)?;
    let (values, vectors) = hermitian_eigen(&h);
    let vectors_adj = vectors.adjoint();
    let to_full = |coeffs: &[Vec<Complex64>]| -> Vec<Vec<Complex64>> {
        coeffs.iter().map(|c| vectors.apply(c)).collect()
    };

    // frame coefficients in the eigenbasis of H, where each slice is diagonal
    let mut coeffs: Vec<Vec<Complex64>> = frame0.iter().map(|z| vectors_adj.apply(z)).collect();
    let steps = samples - 1;
    let dt = pulse.duration / steps as f64;
    let slice_areas = pulse
        .envelope
        .slice_areas(pulse.area, pulse.duration, steps);

    let mut times = Vec::with_capacity(samples);
    let mut areas = Vec::with_capacity(samples);
    let mut frames = Vec::with_capacity(samples);
    times.push(0.0);
    areas.push(0.0);
    frames.push(frame0);
    let mut area = 0.0;
    for (j, &da) in slice_areas.iter().enumerate() {
        let phases: Vec<Complex64> = values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -da * l))
            .collect();
        for c in coeffs.iter_mut() {
            for (x, p) in c.iter_mut().zip(&phases) {
                *x *= p;
            }
        }
        if (j + 1) % REORTHONORMALIZE_EVERY == 0 {
            reorthonormalize(&mut coeffs);
        }
        area += da;
        times.push((j + 1) as f64 * dt);
        areas.push(area);
        frames.push(to_full(&coeffs));
    }
    Ok(SubspacePath {
        times,
        areas,
        frames,
    })
}

/// Per-sample parallel-transport diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelTransport {
    /// `max_j ||P(t_j) H P(t_j)||_F`
    pub residual: f64,
    /// `epsilon(t_j) = Tr(P H P) / K`
    pub energies: Vec<f64>,
}

pub fn check_parallel_transport(path: &SubspacePath, h: &Operator) -> Result<ParallelTransport> {
    if h.dim() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: path.dim(),
            actual: h.dim(),
        });
    }
    let k = path.rank() as f64;
    let mut residual: f64 = 0.0;
    let mut energies = Vec::with_capacity(path.len());
    for frame in &path.frames {
        let hz: Vec<Vec<Complex64>> = frame.iter().map(|z| h.apply(z)).collect();
        // ||P H P||_F = ||Z^dagger H Z||_F for an orthonormal frame
        let m = overlap(frame, &hz);
        residual = residual.max(m.frobenius_norm());
        energies.push(m.trace().re / k);
    }
    Ok(ParallelTransport { residual, energies })
}

/// `int epsilon dt`, by the trapezoid rule over the pulse area.
///
/// Energies are taken at unit envelope, so integrating over area accounts for the envelope.
pub fn dynamical_phase(path: &SubspacePath, energies: &[f64]) -> f64 {
    path.areas
        .windows(2)
        .zip(energies.windows(2))
        .map(|(a, e)| 0.5 * (e[0] + e[1]) * (a[1] - a[0]))
        .sum()
}

/// Ordered overlap product `(Z_0^dagger Z_M)(Z_M^dagger Z_{M-1}) ... (Z_1^dagger Z_0)`, not unitarized.
pub fn wilson_product(path: &SubspacePath) -> Operator {
    let mut acc = Operator::identity(path.rank());
    for j in 0..path.len() - 1 {
        acc = overlap(&path.frames[j + 1], &path.frames[j]).matmul(&acc);
    }
    overlap(&path.frames[0], &path.frames[path.len() - 1]).matmul(&acc)
}

/// Discrete Wilson loop of a closed path, in the basis of the initial frame.
pub fn wilson_loop(path: &SubspacePath) -> Result<Operator> {
    let residual = path.cyclicity_residual();
    if residual >= WILSON_CYCLICITY {
        return Err(Error::NotCyclic { residual });
    }
    polar_unitary(&wilson_product(path))
}

/// `Z_0^dagger U(tau) Z_0` of the exact propagator, not unitarized.
pub fn projected_propagator(
    pulse: &Pulse,
    initial_frame: &[StateVector],
    layout: &ChainLayout,
) -> Result<Operator> {
    let u = propagate_exact(pulse, layout)?;
    let k = initial_frame.len();
    let images: Vec<Vec<Complex64>> = initial_frame
        .iter()
        .map(|s| u.apply(s.amplitudes()))
        .collect();
    Ok(Operator::from_fn(k, |a, b| {
        inner(initial_frame[a].amplitudes(), &images[b])
    }))
}

/// Logical basis states in lexicographic order.
pub fn logical_frame(layout: &ChainLayout) -> Vec<StateVector> {
    layout
        .logical_indices()
        .into_iter()
        .map(|i| StateVector::basis(layout.dim(), i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    ParallelTransport { residual: f64 },
    DynamicalPhase { phase: f64 },
    Cyclicity { residual: f64 },
    CrossFidelity { fidelity: Option<f64> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ParallelTransport { residual } => {
                write!(f, "parallel transport residual {residual:.3e}")
            }
            Violation::DynamicalPhase { phase } => write!(f, "dynamical phase {phase:.3e}"),
            Violation::Cyclicity { residual } => write!(f, "cyclicity residual {residual:.3e}"),
            Violation::CrossFidelity { fidelity: Some(v) } => {
                write!(f, "Wilson/propagator cross fidelity {v:.12}")
            }
            Violation::CrossFidelity { fidelity: None } => {
                write!(f, "Wilson loop undefined on an open path")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyReport {
    pub samples: usize,
    pub parallel_transport_residual: f64,
    pub dynamical_phase: f64,
    pub cyclicity_residual: f64,
    /// Unitarized Wilson loop; absent on an open path.
    pub wilson_gate: Option<Operator>,
    /// Unitarized projected propagator; absent when the projection is singular.
    pub propagator_gate: Option<Operator>,
    pub cross_fidelity: Option<f64>,
    /// `1 - |Tr(G^dagger W)| / K` for the raw overlap product `W`.
    pub raw_wilson_deficit: Option<f64>,
}

/// False for NaN, so a non-finite diagnostic is always a violation.
fn below(value: f64, limit: f64) -> bool {
    value < limit
}

impl HolonomyReport {
    pub fn violations(&self, t: &CertifyThresholds) -> Vec<Violation> {
        let mut out = Vec::new();
        if !below(self.parallel_transport_residual, t.parallel_transport) {
            out.push(Violation::ParallelTransport {
                residual: self.parallel_transport_residual,
            });
        }
        if !below(self.dynamical_phase.abs(), t.dynamical_phase) {
            out.push(Violation::DynamicalPhase {
                phase: self.dynamical_phase,
            });
        }
        if !below(self.cyclicity_residual, t.cyclicity) {
            out.push(Violation::Cyclicity {
                residual: self.cyclicity_residual,
            });
        }
        if !self.cross_fidelity.is_some_and(|f| f >= t.cross_fidelity) {
            out.push(Violation::CrossFidelity {
                fidelity: self.cross_fidelity,
            });
        }
        out
    }
}

/// Runs every holonomy diagnostic on the logical subspace without judging the outcome.
pub fn assess(pulse: &Pulse, layout: &ChainLayout, samples: usize) -> Result<HolonomyReport> {
    let frame = logical_frame(layout);
    let path = trace_subspace(pulse, &frame, samples, layout)?;
    let h = pulse.hamiltonian(layout)?;
    let pt = check_parallel_transport(&path, &h)?;
    let phase = dynamical_phase(&path, &pt.energies);
    let cyclicity_residual = path.cyclicity_residual();

    let wilson_gate = wilson_loop(&path).ok();
    let propagator_gate = polar_unitary(&projected_propagator(pulse, &frame, layout)?).ok();
    let (cross_fidelity, raw_wilson_deficit) = match (&wilson_gate, &propagator_gate) {
        (Some(w), Some(g)) => (
            Some(trace_overlap(g, w).min(1.0)),
            Some(1.0 - trace_overlap(g, &wilson_product(&path))),
        ),
        _ => (None, None),
    };
    Ok(HolonomyReport {
        samples,
        parallel_transport_residual: pt.residual,
        dynamical_phase: phase,
        cyclicity_residual,
        wilson_gate,
        propagator_gate,
        cross_fidelity,
        raw_wilson_deficit,
    })
}

/// Certifies a gate pulse as holonomic under the default thresholds.
pub fn certify(pulse: &Pulse, layout: &ChainLayout, samples: usize) -> Result<HolonomyReport> {
    certify_with(pulse, layout, samples, &CertifyThresholds::default())
}

pub fn certify_with(
    pulse: &Pulse,
    layout: &ChainLayout,
    samples: usize,
    thresholds: &CertifyThresholds,
) -> Result<HolonomyReport> {
    let report = assess(pulse, layout, samples)?;
    let violations = report.violations(thresholds);
    if violations.is_empty() {
        Ok(report)
    } else {
        Err(Error::NotHolonomic { violations })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub samples: usize,
    pub cross_fidelity: f64,
    pub raw_deficit: f64,
}

/// Wilson-loop agreement with the propagator gate as the sampling is refined.
pub fn wilson_convergence(
    pulse: &Pulse,
    layout: &ChainLayout,
    sample_counts: &[usize],
) -> Result<Vec<ConvergencePoint>> {
    sample_counts
        .iter()
        .map(|&samples| {
            let r = assess(pulse, layout, samples)?;
            match (r.cross_fidelity, r.raw_wilson_deficit) {
                (Some(cross_fidelity), Some(raw_deficit)) => Ok(ConvergencePoint {
                    samples,
                    cross_fidelity,
                    raw_deficit,
                }),
                _ => Err(Error::NotCyclic {
                    residual: r.cyclicity_residual,
                }),
            }
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
