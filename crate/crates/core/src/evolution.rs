//! Pulses and their propagation on the chain.
//!
//! During a pulse exactly one block Hamiltonian is active and it is constant
//! up to the real envelope, so the propagator depends on the envelope only
//! through its area.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{
    h1_block, h3_block, ChainLayout, LocalOperator, OneQubitParams, TwoQubitParams,
};
use crate::error::{Error, Result};
use crate::linalg::{
    expm_hermitian, hermitian_eigen, spectral_map, Operator, StateVector, Tolerances,
};

/// Gaussian envelopes are truncated at this many standard deviations on each side.
const GAUSSIAN_HALF_WIDTH_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    Square,
    Gaussian,
    SinSquared,
}

impl Envelope {
    pub fn name(self) -> &'static str {
        match self {
            Envelope::Square => "square",
            Envelope::Gaussian => "gaussian",
            Envelope::SinSquared => "sin2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "square" => Some(Envelope::Square),
            "gaussian" => Some(Envelope::Gaussian),
            "sin2" | "sin_squared" | "sin^2" => Some(Envelope::SinSquared),
            _ => None,
        }
    }

    /// Unnormalized shape on `[0, duration]`.
    pub fn shape(self, t: f64, duration: f64) -> f64 {
        let x = t / duration;
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        match self {
            Envelope::Square => 1.0,
            Envelope::Gaussian => {
                let z = (x - 0.5) * 2.0 * GAUSSIAN_HALF_WIDTH_SIGMAS;
                (-0.5 * z * z).exp()
            }
            Envelope::SinSquared => (PI * x).sin().powi(2),
        }
    }

    /// Pulse area carried by each of `steps` equal time slices.
    ///
    /// The shape is sampled at slice midpoints and rescaled so the slice
    /// areas sum to `area`.
    pub fn slice_areas(self, area: f64, duration: f64, steps: usize) -> Vec<f64> {
        let dt = duration / steps as f64;
        let samples: Vec<f64> = (0..steps)
            .map(|j| self.shape((j as f64 + 0.5) * dt, duration))
            .collect();
        let total: f64 = samples.iter().sum();
        samples.into_iter().map(|s| area * s / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PulseKind {
    OneQubit {
        qubit: usize,
        params: OneQubitParams,
    },
    ThreeSite {
        pair: usize,
        params: TwoQubitParams,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pulse {
    pub kind: PulseKind,
    pub area: f64,
    pub envelope: Envelope,
    pub duration: f64,
}

impl Pulse {
    /// One-qubit pi pulse with a square unit-duration envelope.
    pub fn one_qubit(qubit: usize, params: OneQubitParams) -> Self {
        Pulse {
            kind: PulseKind::OneQubit { qubit, params },
            area: PI,
            envelope: Envelope::Square,
            duration: 1.0,
        }
    }

    /// Three-site pi pulse with a square unit-duration envelope.
    pub fn three_site(pair: usize, params: TwoQubitParams) -> Self {
        Pulse {
            kind: PulseKind::ThreeSite { pair, params },
            area: PI,
            envelope: Envelope::Square,
            duration: 1.0,
        }
    }

    pub fn with_area(mut self, area: f64) -> Self {
        self.area = area;
        self
    }

    pub fn with_envelope(mut self, envelope: Envelope, duration: f64) -> Self {
        self.envelope = envelope;
        self.duration = duration;
        self
    }

    pub fn validate(&self, layout: &ChainLayout) -> Result<()> {
        if !self.area.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "non-finite area {}",
                self.area
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        match self.kind {
            PulseKind::OneQubit { qubit, .. } => layout.check_qubit(qubit),
            PulseKind::ThreeSite { pair, .. } => layout.check_pair(pair),
        }
    }

    /// Coupling Hamiltonian at unit envelope, restricted to its sites.
    pub fn hamiltonian_block(&self, layout: &ChainLayout) -> Result<LocalOperator> {
        self.validate(layout)?;
        match self.kind {
            PulseKind::OneQubit { qubit, params } => {
                h1_block(layout.qubit_site(qubit)?, &params, layout)
            }
            PulseKind::ThreeSite { pair, params } => h3_block(pair, &params, layout),
        }
    }

    pub fn hamiltonian(&self, layout: &ChainLayout) -> Result<Operator> {
        Ok(self.hamiltonian_block(layout)?.embed(layout))
    }

    /// Cumulative pulse area at `steps + 1` equally spaced times.
    pub fn area_profile(&self, steps: usize) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for da in self.envelope.slice_areas(self.area, self.duration, steps) {
            acc += da;
            out.push(acc);
        }
        out
    }
}

/// Pulses applied strictly one after another.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PulseSchedule {
    pub pulses: Vec<Pulse>,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<Pulse>) -> Self {
        PulseSchedule { pulses }
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn total_duration(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum()
    }

    pub fn validate(&self, layout: &ChainLayout) -> Result<()> {
        self.pulses.iter().try_for_each(|p| p.validate(layout))
    }
}

/// Exact block propagator `exp(-i a H_block)` on the pulse's own sites.
pub fn propagate_block(pulse: &Pulse, layout: &ChainLayout) -> Result<LocalOperator> {
    let block = pulse.hamiltonian_block(layout)?;
    let u = expm_hermitian(block.matrix(), pulse.area)?;
    Ok(block.map_matrix(|_| u))
}

/// Full-chain propagator of a pulse: `exp(-i a H)`.
///
/// The exponential is taken on the active sites and embedded, which equals
/// exponentiating the embedded Hamiltonian since `exp(A ⊗ I) = exp(A) ⊗ I`.
pub fn propagate_exact(pulse: &Pulse, layout: &ChainLayout) -> Result<Operator> {
    Ok(propagate_block(pulse, layout)?.embed(layout))
}

/// Time-sliced propagator `prod_j exp(-i da_j H)`, later slices on the left.
pub fn propagate_stepped(pulse: &Pulse, steps: usize, layout: &ChainLayout) -> Result<Operator> {
    if steps == 0 {
        return Err(Error::InvalidPulse("steps must be at least 1".into()));
    }
    let block = pulse.hamiltonian_block(layout)?;
    let (values, vectors) = hermitian_eigen(block.matrix());
    let mut acc = Operator::identity(block.matrix().dim());
    for da in pulse
        .envelope
        .slice_areas(pulse.area, pulse.duration, steps)
    {
        let slice = spectral_map(&values, &vectors, |l| Complex64::from_polar(1.0, -da * l));
        acc = slice.matmul(&acc);
    }
    Ok(block.map_matrix(|_| acc).embed(layout))
}

/// Applies every pulse of the schedule in order to `psi0`.
pub fn run_schedule(
    schedule: &PulseSchedule,
    psi0: &StateVector,
    layout: &ChainLayout,
) -> Result<StateVector> {
    if psi0.dim() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            actual: psi0.dim(),
        });
    }
    let mut amplitudes = psi0.amplitudes().to_vec();
    for pulse in &schedule.pulses {
        propagate_block(pulse, layout)?.apply_in_place(layout, &mut amplitudes);
    }
    let norm = crate::linalg::norm2(&amplitudes);
    if (norm - 1.0).abs() > Tolerances::DEFAULT.normalization {
        return Err(Error::NotNormalized { norm });
    }
    StateVector::normalized(amplitudes)
}

/// End-to-end full-chain propagator of a schedule.
pub fn schedule_unitary(schedule: &PulseSchedule, layout: &ChainLayout) -> Result<Operator> {
    let mut u = Operator::identity(layout.dim());
    for pulse in &schedule.pulses {
        u = propagate_block(pulse, layout)?.left_multiply(layout, &u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{block_sz, embed, logical_encode, EXCITED};
    use crate::linalg::gate_fidelity;

    fn layout(n: usize) -> ChainLayout {
        ChainLayout::new(n).unwrap()
    }

    fn hadamard_pulse(qubit: usize) -> Pulse {
        Pulse::one_qubit(qubit, OneQubitParams::new(PI / 4.0, 0.0).unwrap())
    }

    fn xy_pulse(pair: usize, vt: f64) -> Pulse {
        Pulse::three_site(pair, TwoQubitParams::new(vt).unwrap())
    }

    #[test]
    fn slice_areas_sum_to_area() {
        for env in [Envelope::Square, Envelope::Gaussian, Envelope::SinSquared] {
            for steps in [1, 10, 100, 10_000] {
                let total: f64 = env.slice_areas(PI, 2.0, steps).iter().sum();
                assert!((total - PI).abs() < 1e-9, "{env:?} {steps}");
            }
        }
    }

    #[test]
    fn slice_areas_approximate_shape_integral() {
        // fine trapezoid quadrature of the normalized shape
        let duration = 1.5;
        for env in [Envelope::Gaussian, Envelope::SinSquared] {
            let n = 200_000;
            let h = duration / n as f64;
            let integral: f64 = (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * env.shape(k as f64 * h, duration)
                })
                .sum::<f64>()
                * h;
            let steps = 1000;
            let areas = env.slice_areas(1.0, duration, steps);
            let dt = duration / steps as f64;
            let peak = areas[steps / 2] / dt;
            let peak_shape = env.shape((steps / 2) as f64 * dt + dt / 2.0, duration);
            assert!((peak / peak_shape - 1.0 / integral).abs() < 1e-5);
        }
    }

    #[test]
    fn zero_area_is_identity() {
        let l = layout(2);
        let u = propagate_exact(&hadamard_pulse(1).with_area(0.0), &l).unwrap();
        assert!((&u - &Operator::identity(27)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn exact_matches_full_chain_exponential() {
        let l = layout(2);
        for pulse in [
            hadamard_pulse(2).with_area(1.3),
            xy_pulse(1, 0.8).with_area(2.1),
        ] {
            let direct = expm_hermitian(&pulse.hamiltonian(&l).unwrap(), pulse.area).unwrap();
            let u = propagate_exact(&pulse, &l).unwrap();
            assert!((&u - &direct).frobenius_norm() < 1e-12);
            assert!(u.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn two_pi_three_site_pulse_is_identity_on_logical_block() {
        let l = layout(2);
        let u = propagate_exact(&xy_pulse(1, 1.234).with_area(2.0 * PI), &l).unwrap();
        let block = u.restrict(&l.logical_indices());
        assert!((&block - &Operator::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn stepped_single_square_slice_equals_exact() {
        let l = layout(2);
        let p = xy_pulse(1, 0.4);
        let a = propagate_stepped(&p, 1, &l).unwrap();
        let b = propagate_exact(&p, &l).unwrap();
        assert!((&a - &b).frobenius_norm() < 1e-12);
    }

    #[test]
    fn stepped_envelopes_match_exact() {
        let l = layout(2);
        for env in [Envelope::Gaussian, Envelope::SinSquared] {
            for base in [hadamard_pulse(1), xy_pulse(1, PI / 3.0)] {
                let p = base.with_envelope(env, 2.0);
                let exact = propagate_exact(&p, &l).unwrap();
                for steps in [10, 100, 10_000] {
                    let stepped = propagate_stepped(&p, steps, &l).unwrap();
                    assert!(gate_fidelity(&stepped, &exact).unwrap() >= 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn three_site_propagator_conserves_sz_and_fixes_excited_states() {
        let l = layout(2);
        let sz = block_sz(1, &l).unwrap();
        for k in 0..8 {
            let p = xy_pulse(1, k as f64 * 0.7).with_area(0.3 + k as f64);
            let u = propagate_exact(&p, &l).unwrap();
            assert!(u.commutator(&sz).frobenius_norm() < 1e-10);
            for index in 0..l.dim() {
                if l.site_codes(index).contains(&EXCITED) {
                    let col = u.column(index);
                    for (r, z) in col.iter().enumerate() {
                        let expected = if r == index { 1.0 } else { 0.0 };
                        assert!((z - expected).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn pair_pulse_commutes_with_far_site() {
        let l = layout(3);
        let u = propagate_exact(&xy_pulse(1, 0.77), &l).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let mut unit = Operator::zeros(3);
                unit[(r, c)] = crate::linalg::ONE;
                let far = embed(&unit, 5, &l).unwrap();
                assert!(u.commutator(&far).frobenius_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn run_empty_schedule() {
        let l = layout(2);
        let psi = logical_encode(&[1, 0], &l).unwrap();
        let out = run_schedule(&PulseSchedule::default(), &psi, &l).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn run_sigma_z_pulse_keeps_zero_state() {
        let l = layout(2);
        let psi = logical_encode(&[0, 0], &l).unwrap();
        let schedule = PulseSchedule::new(vec![Pulse::one_qubit(
            1,
            OneQubitParams::new(0.0, 0.0).unwrap(),
        )]);
        let out = run_schedule(&schedule, &psi, &l).unwrap();
        assert!((out.inner(&psi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn run_schedule_matches_matrix_route() {
        let l = layout(2);
        let schedule = PulseSchedule::new(vec![hadamard_pulse(1), xy_pulse(1, PI / 2.0)]);
        let psi = logical_encode(&[0, 0], &l).unwrap();
        let out = run_schedule(&schedule, &psi, &l).unwrap();
        let mut direct = psi.amplitudes().to_vec();
        for p in &schedule.pulses {
            direct = propagate_exact(p, &l).unwrap().apply(&direct);
        }
        let err: f64 = out
            .amplitudes()
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm())
            .sum();
        assert!(err < 1e-12);
        let u = schedule_unitary(&schedule, &l).unwrap();
        let via_u = u.apply(psi.amplitudes());
        let err: f64 = via_u.iter().zip(&direct).map(|(a, b)| (a - b).norm()).sum();
        assert!(err < 1e-12);
    }

    #[test]
    fn run_rejects_dimension_mismatch() {
        let psi = StateVector::basis(3, 0);
        assert!(matches!(
            run_schedule(&PulseSchedule::default(), &psi, &layout(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pulse_validation() {
        let l = layout(2);
        assert!(hadamard_pulse(3).validate(&l).is_err());
        assert!(xy_pulse(2, 0.0).validate(&l).is_err());
        assert!(hadamard_pulse(1)
            .with_envelope(Envelope::Square, 0.0)
            .validate(&l)
            .is_err());
        assert!(hadamard_pulse(1)
            .with_area(f64::INFINITY)
            .validate(&l)
            .is_err());
        assert!(propagate_stepped(&hadamard_pulse(1), 0, &l).is_err());
    }
}
