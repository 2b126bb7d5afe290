use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nahqc::chain::logical_encode;
use nahqc::compiler::{compile_circuit, LogicalCircuit, LogicalGate};
use nahqc::evolution::{propagate_exact, run_schedule, schedule_unitary};
use nahqc::gates::{extract_logical_gate, logical_amplitudes};
use nahqc::linalg::inner;
use nahqc::{
    gate_fidelity, BlochVector, ChainLayout, Envelope, OneQubitParams, Pulse, PulseSchedule,
    TwoQubitParams,
};

fn unit(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-4 && norm2 <= 1.0 {
            return BlochVector::normalize(v).unwrap();
        }
    }
}

#[test]
fn compiled_circuits_reproduce_their_analytic_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let layout = ChainLayout::new(n).unwrap();
        let depth = rng.gen_range(1..=6);
        let gates = (0..depth)
            .map(|_| match rng.gen_range(0..if n > 1 { 3 } else { 2 }) {
                0 => LogicalGate::Rotation {
                    qubit: rng.gen_range(1..=n),
                    axis: unit(&mut rng).as_array(),
                    angle: rng.gen_range(-TAU..TAU),
                },
                1 => LogicalGate::Reflection {
                    qubit: rng.gen_range(1..=n),
                    n: unit(&mut rng),
                },
                _ => LogicalGate::Xy {
                    pair: rng.gen_range(1..n),
                    vartheta: rng.gen_range(0.0..TAU),
                },
            })
            .collect();
        let circuit = LogicalCircuit::new(gates);
        let schedule = compile_circuit(&circuit, &layout).unwrap();
        let analytic = circuit.unitary(&layout).unwrap();
        let report =
            extract_logical_gate(&schedule_unitary(&schedule, &layout).unwrap(), &layout).unwrap();
        assert!(report.leakage < 1e-10);
        let f = gate_fidelity(&report.logical_gate, &analytic).unwrap();
        assert!(f >= 1.0 - 1e-8, "{circuit:?}: {f}");

        let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
        let out =
            run_schedule(&schedule, &logical_encode(&bits, &layout).unwrap(), &layout).unwrap();
        let (amps, outside) = logical_amplitudes(&out, &layout);
        assert!(outside < 1e-10);
        let column = analytic.column(bits.iter().fold(0, |acc, &b| 2 * acc + b as usize));
        assert!(inner(&column, &amps).norm_sqr() >= 1.0 - 1e-8);
    }
}

fn envelope() -> impl Strategy<Value = Envelope> {
    prop_oneof![
        Just(Envelope::Square),
        Just(Envelope::Gaussian),
        Just(Envelope::SinSquared)
    ]
}

fn pulse(n: usize) -> impl Strategy<Value = Pulse> {
    let one =
        (1..=n, 0.0..TAU, 0.0..TAU, -10.0f64..10.0, envelope()).prop_map(|(q, t, p, a, e)| {
            Pulse::one_qubit(q, OneQubitParams::new(t, p).unwrap())
                .with_area(a)
                .with_envelope(e, 1.0)
        });
    if n < 2 {
        return one.boxed();
    }
    let three = (1..n, 0.0..TAU, -10.0f64..10.0).prop_map(|(pair, vt, a)| {
        Pulse::three_site(pair, TwoQubitParams::new(vt).unwrap()).with_area(a)
    });
    prop_oneof![one, three].boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagators_are_unitary(p in pulse(2)) {
        let layout = ChainLayout::new(2).unwrap();
        let u = propagate_exact(&p, &layout).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-10);
    }

    #[test]
    fn schedules_preserve_the_norm(pulses in prop::collection::vec(pulse(3), 0..5), k in 0usize..8) {
        let layout = ChainLayout::new(3).unwrap();
        let bits = [(k >> 2) as u8 & 1, (k >> 1) as u8 & 1, k as u8 & 1];
        let out = run_schedule(&PulseSchedule::new(pulses), &logical_encode(&bits, &layout).unwrap(), &layout).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }
}
