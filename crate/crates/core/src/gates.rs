//! Closed-form holonomic gates and diagnostics on extracted logical gates.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{ChainLayout, LOCAL_DIM};
use crate::error::{Error, Result};
use crate::linalg::{
    gate_fidelity, hermitian_eigen, polar_unitary, Operator, StateVector, Tolerances, I, ZERO,
};

/// Below this `sin(theta)` a Bloch vector is treated as a pole and gets `phi = 0`.
pub const POLE_EPS: f64 = 1e-12;

/// Minimal Schmidt coefficient that counts as entanglement.
pub const SCHMIDT_THRESHOLD: f64 = 1e-4;

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(BlochVector([x, y, z]))
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Renormalizes any non-zero finite vector.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(BlochVector([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochVector([st * cp, st * sp, ct])
    }

    /// Polar and azimuthal angles, `theta in [0, pi]`, `phi in [0, 2 pi)`, `phi = 0` at the poles.
    pub fn angles(&self) -> (f64, f64) {
        let [x, y, z] = self.0;
        let rho = x.hypot(y);
        let theta = rho.atan2(z);
        if theta.sin() < POLE_EPS {
            return (theta, 0.0);
        }
        let phi = y.atan2(x).rem_euclid(TAU);
        (theta, if phi >= TAU { 0.0 } else { phi })
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn cross(&self, other: &BlochVector) -> [f64; 3] {
        cross(&self.0, &other.0)
    }
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn pauli_x() -> Operator {
    Operator::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Operator {
    Operator::from_fn(2, |r, c| match (r, c) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn pauli_z() -> Operator {
    Operator::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
}

/// `v . sigma` for an arbitrary real 3-vector.
pub fn sigma_dot(v: &[f64; 3]) -> Operator {
    let [x, y, z] = *v;
    Operator::from_fn(2, |r, c| match (r, c) {
        (0, 0) => Complex64::new(z, 0.0),
        (1, 1) => Complex64::new(-z, 0.0),
        (0, 1) => Complex64::new(x, -y),
        _ => Complex64::new(x, y),
    })
}

/// Gate of a one-qubit pi pulse: `n . sigma`.
pub fn one_qubit_gate(n: &BlochVector) -> Operator {
    sigma_dot(&n.0)
}

/// `n . m - i sigma . (n x m)`, the product of the pi-pulse gates for `n` then `m`.
pub fn compose_rule(n: &BlochVector, m: &BlochVector) -> Operator {
    let scalar = Operator::identity(2).scale(Complex64::new(n.dot(m), 0.0));
    let vector = sigma_dot(&n.cross(m)).scale(-I);
    &scalar + &vector
}

/// `exp(-i angle/2 sigma . axis)` for a unit axis.
pub fn rotation_gate(axis: &[f64; 3], angle: f64) -> Operator {
    let (s, c) = (angle / 2.0).sin_cos();
    &Operator::identity(2).scale(Complex64::new(c, 0.0))
        + &sigma_dot(axis).scale(Complex64::new(0.0, -s))
}

/// Two-qubit gate of a three-site pi pulse, basis `|00>, |01>, |10>, |11>`.
pub fn two_qubit_gate(vartheta: f64) -> Operator {
    let (s, c) = vartheta.sin_cos();
    Operator::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, s, 0.0],
        [0.0, s, -c, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ])
}

/// Projected action of a three-site pulse of area `a` on the logical block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockMaps {
    /// 2x2 map on `{|01>_L, |10>_L}`.
    pub a: Operator,
    /// Scalar on `|11>_L`.
    pub c: f64,
}

pub fn projected_block_maps(vartheta: f64, area: f64) -> BlockMaps {
    let (sh, ch) = (vartheta / 2.0).sin_cos();
    let ca = area.cos();
    let off = vartheta.sin() * (area / 2.0).sin().powi(2);
    BlockMaps {
        a: Operator::from_real_rows([[ch * ch + sh * sh * ca, off], [off, sh * sh + ch * ch * ca]]),
        c: ca,
    }
}

/// Embeds a `2^k`-dimensional gate acting on consecutive logical qubits
/// `first ..= first + k - 1` into the `2^N` logical space.
pub fn logical_embed(gate: &Operator, first_qubit: usize, n_logical: usize) -> Result<Operator> {
    let k = gate.dim().trailing_zeros() as usize;
    if gate.dim() != 1 << k || first_qubit == 0 || first_qubit + k - 1 > n_logical {
        return Err(Error::QubitOutOfRange {
            qubit: first_qubit + k.saturating_sub(1),
            n_logical,
        });
    }
    let left = Operator::identity(1 << (first_qubit - 1));
    let right = Operator::identity(1 << (n_logical - (first_qubit + k - 1)));
    Ok(left.kron(gate).kron(&right))
}

/// Local-unitary invariants of a two-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Makhlin {
    pub g1: Complex64,
    pub g2: f64,
}

fn magic_basis() -> Operator {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let hi = Complex64::new(0.0, FRAC_1_SQRT_2);
    Operator::from_row_major(vec![
        h, ZERO, ZERO, hi, //
        ZERO, hi, h, ZERO, //
        ZERO, hi, -h, ZERO, //
        h, ZERO, ZERO, -hi,
    ])
    .expect("4x4")
}

pub fn makhlin_invariants(u: &Operator) -> Result<Makhlin> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: u.dim(),
        });
    }
    let q = magic_basis();
    let ub = q.adjoint().matmul(u).matmul(&q);
    let m = ub.transpose().matmul(&ub);
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = m.matmul(&m).trace();
    Ok(Makhlin {
        g1: tr * tr / (det * 16.0),
        g2: ((tr * tr - tr2) / (det * 4.0)).re,
    })
}

/// Probabilities `(p_max, p_min)` of the Schmidt decomposition of a two-qubit state.
pub fn schmidt_probabilities(state: &[Complex64]) -> Result<(f64, f64)> {
    if state.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: state.len(),
        });
    }
    let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    let det = (state[0] * state[3] - state[1] * state[2]).norm_sqr() / (norm2 * norm2);
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    // p_min = 2 det / (1 + disc) avoids cancellation for nearly product states
    let p_min = 2.0 * det / (1.0 + disc);
    Ok((1.0 - p_min, p_min))
}

/// Von Neumann entropy (natural log) of either qubit of a two-qubit state.
pub fn entanglement_entropy(state: &[Complex64]) -> Result<f64> {
    let (a, b) = schmidt_probabilities(state)?;
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(h(a) + h(b))
}

fn qubit_state(theta: f64, phi: f64) -> [Complex64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]
}

fn product_state(angles: &[f64; 4]) -> Vec<Complex64> {
    let a = qubit_state(angles[0], angles[1]);
    let b = qubit_state(angles[2], angles[3]);
    vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Product input maximizing the output entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglingWitness {
    /// `(theta, phi)` of the first qubit's input.
    pub first: (f64, f64),
    /// `(theta, phi)` of the second qubit's input.
    pub second: (f64, f64),
    pub entropy: f64,
    pub min_schmidt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglingVerdict {
    pub entangling: bool,
    pub witness: EntanglingWitness,
    pub makhlin: Makhlin,
}

/// The 24 Bloch-sphere points used per qubit by the product-state sweep.
pub fn bloch_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..6 {
            out.push(((i as f64 + 0.5) * PI / 4.0, j as f64 * TAU / 6.0));
        }
    }
    out
}

/// Determinant magnitude of the output coefficient matrix: zero iff product.
fn output_concurrence(u: &Operator, angles: &[f64; 4]) -> f64 {
    let out = u.apply(&product_state(angles));
    2.0 * (out[0] * out[3] - out[1] * out[2]).norm()
}

/// Operational test of whether `u` can entangle a product input.
///
/// Sweeps the 24x24 product grid, then refines the best point by pattern search.
pub fn entangling_verdict(u: &Operator) -> Result<EntanglingVerdict> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: u.dim(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > Tolerances::DEFAULT.unitarity_input {
        return Err(Error::NotUnitary { defect });
    }
    let grid = bloch_grid();
    let mut best = [grid[0].0, grid[0].1, grid[0].0, grid[0].1];
    let mut best_value = f64::NEG_INFINITY;
    for &(ta, pa) in &grid {
        for &(tb, pb) in &grid {
            let point = [ta, pa, tb, pb];
            let value = output_concurrence(u, &point);
            if value > best_value {
                best_value = value;
                best = point;
            }
        }
    }
    let mut step = 0.25;
    while step > 1e-9 {
        let mut improved = false;
        for coord in 0..4 {
            for sign in [1.0, -1.0] {
                let mut trial = best;
                trial[coord] += sign * step;
                let value = output_concurrence(u, &trial);
                if value > best_value {
                    best_value = value;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    let output = u.apply(&product_state(&best));
    let (_, p_min) = schmidt_probabilities(&output)?;
    let min_schmidt = p_min.sqrt();
    let first = BlochVector::from_angles(best[0], best[1]).angles();
    let second = BlochVector::from_angles(best[2], best[3]).angles();
    Ok(EntanglingVerdict {
        entangling: min_schmidt >= SCHMIDT_THRESHOLD,
        witness: EntanglingWitness {
            first,
            second,
            entropy: entanglement_entropy(&output)?,
            min_schmidt,
        },
        makhlin: makhlin_invariants(u)?,
    })
}

/// Logical gate extracted from a full-chain propagator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub logical_gate: Operator,
    /// `||(1 - P_L) U P_L||_2`
    pub leakage: f64,
    /// True when leakage is below threshold and `logical_gate` has been unitarized.
    pub exact: bool,
    pub fidelity_vs_target: Option<f64>,
    pub entangling: Option<EntanglingVerdict>,
    pub makhlin: Option<Makhlin>,
}

impl GateReport {
    /// Records the phase-invariant fidelity against an analytic target.
    pub fn with_target(mut self, target: &Operator) -> Result<Self> {
        self.fidelity_vs_target = Some(if self.exact {
            gate_fidelity(&self.logical_gate, target)?
        } else {
            crate::linalg::trace_overlap(&self.logical_gate, target)
        });
        Ok(self)
    }
}

/// Projects `u_chain` onto the logical subspace and diagnoses the result.
pub fn extract_logical_gate(u_chain: &Operator, layout: &ChainLayout) -> Result<GateReport> {
    if u_chain.dim() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            actual: u_chain.dim(),
        });
    }
    let logical = layout.logical_indices();
    let k = logical.len();
    let projected = u_chain.restrict(&logical);

    let mut is_logical = vec![false; layout.dim()];
    for &i in &logical {
        is_logical[i] = true;
    }
    let mut gram = Operator::zeros(k);
    for r in (0..layout.dim()).filter(|&r| !is_logical[r]) {
        let row = u_chain.row(r);
        for a in 0..k {
            let ua = row[logical[a]].conj();
            if ua == ZERO {
                continue;
            }
            for b in 0..k {
                gram[(a, b)] += ua * row[logical[b]];
            }
        }
    }
    let (values, _) = hermitian_eigen(&gram);
    let leakage = values.last().copied().unwrap_or(0.0).max(0.0).sqrt();

    let exact = leakage < Tolerances::DEFAULT.leakage;
    let logical_gate = if exact {
        polar_unitary(&projected)?
    } else {
        projected
    };
    let (entangling, makhlin) = if exact && k == 4 {
        let verdict = entangling_verdict(&logical_gate)?;
        (Some(verdict), Some(verdict.makhlin))
    } else {
        (None, None)
    };
    Ok(GateReport {
        logical_gate,
        leakage,
        exact,
        fidelity_vs_target: None,
        entangling,
        makhlin,
    })
}

/// Populations of `|0>, |1>, |e>` on every site.
pub fn site_populations(state: &StateVector, layout: &ChainLayout) -> Vec<[f64; 3]> {
    let mut pops = vec![[0.0; LOCAL_DIM]; layout.n_sites()];
    for (index, z) in state.amplitudes().iter().enumerate() {
        let p = z.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (site, code) in layout.site_codes(index).into_iter().enumerate() {
            pops[site][code] += p;
        }
    }
    pops
}

/// Logical amplitudes `<n|psi>` in lexicographic order, and the population outside them.
pub fn logical_amplitudes(state: &StateVector, layout: &ChainLayout) -> (Vec<Complex64>, f64) {
    let amps: Vec<Complex64> = layout
        .logical_indices()
        .into_iter()
        .map(|i| state.amplitudes()[i])
        .collect();
    let inside: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    (amps, (1.0 - inside).max(0.0))
}

/// CNOT with the first qubit as control.
pub fn cnot() -> Operator {
    Operator::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    use crate::linalg::ONE;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::chain::{logical_encode, OneQubitParams, TwoQubitParams};
    use crate::evolution::{propagate_exact, Pulse};

    fn random_unit(rng: &mut impl Rng) -> BlochVector {
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n = dot(&v, &v).sqrt();
            if n > 0.1 && n < 1.0 {
                return BlochVector::normalize(v).unwrap();
            }
        }
    }

    fn plus_plus() -> Vec<Complex64> {
        vec![Complex64::new(0.5, 0.0); 4]
    }

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        (a - b).frobenius_norm() < tol
    }

    #[test]
    fn one_qubit_gate_axes() {
        assert!(close(
            &one_qubit_gate(&BlochVector::new(0.0, 0.0, 1.0).unwrap()),
            &pauli_z(),
            1e-15
        ));
        assert!(close(
            &one_qubit_gate(&BlochVector::new(1.0, 0.0, 0.0).unwrap()),
            &pauli_x(),
            1e-15
        ));
        let h = one_qubit_gate(&BlochVector::from_angles(PI / 4.0, 0.0));
        let oracle = (&pauli_x() + &pauli_z()).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert!(close(&h, &oracle, 1e-15));
        assert!(BlochVector::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn one_qubit_gate_is_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = one_qubit_gate(&random_unit(&mut rng));
            assert!(g.hermiticity_defect() < 1e-15);
            assert!(g.unitarity_defect() < 1e-14);
            assert!(g.trace().norm() < 1e-15);
            assert!((g.determinant() + ONE).norm() < 1e-14);
            assert!(close(&g.matmul(&g), &Operator::identity(2), 1e-14));
        }
    }

    #[test]
    fn compose_rule_cases() {
        let z = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let x = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        assert!(close(&compose_rule(&z, &z), &Operator::identity(2), 1e-15));
        assert!(close(&compose_rule(&z, &x), &pauli_y().scale(-I), 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (n, m) = (random_unit(&mut rng), random_unit(&mut rng));
            let product = one_qubit_gate(&m).matmul(&one_qubit_gate(&n));
            assert!(close(&compose_rule(&n, &m), &product, 1e-12));
        }
    }

    #[test]
    fn two_qubit_gate_cases() {
        let g0 = two_qubit_gate(0.0);
        assert!(close(&g0, &pauli_z().kron(&Operator::identity(2)), 1e-15));
        let g = two_qubit_gate(PI / 2.0);
        let expected = Operator::from_real_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]);
        assert!(close(&g, &expected, 1e-15));
        for k in 0..32 {
            let g = two_qubit_gate(k as f64 * TAU / 32.0);
            assert!(close(&g.matmul(&g), &Operator::identity(4), 1e-12));
            assert!(g.unitarity_defect() < 1e-14);
            assert!((g.determinant() - ONE).norm() < 1e-12);
            assert_eq!(g, g.transpose());
        }
    }

    #[test]
    fn two_qubit_gate_matches_propagator() {
        let l = ChainLayout::new(2).unwrap();
        for k in 0..8 {
            let vt = k as f64 * 0.83;
            let u = propagate_exact(&Pulse::three_site(1, TwoQubitParams::new(vt).unwrap()), &l)
                .unwrap();
            let report = extract_logical_gate(&u, &l).unwrap();
            assert!(report.leakage < 1e-10);
            assert!(close(&report.logical_gate, &two_qubit_gate(vt), 1e-10));
        }
    }

    #[test]
    fn block_maps_cases() {
        let m = projected_block_maps(0.7, 2.0 * PI);
        assert!(close(&m.a, &Operator::identity(2), 1e-15));
        assert!((m.c - 1.0).abs() < 1e-15);
        let vt = 1.1;
        let m = projected_block_maps(vt, PI);
        let expected = Operator::from_real_rows([[vt.cos(), vt.sin()], [vt.sin(), -vt.cos()]]);
        assert!(close(&m.a, &expected, 1e-15));
        assert!((m.c + 1.0).abs() < 1e-15);
        let m = projected_block_maps(PI / 2.0, PI / 2.0);
        assert!(close(
            &m.a,
            &Operator::from_real_rows([[0.5, 0.5], [0.5, 0.5]]),
            1e-15
        ));
        assert!(m.c.abs() < 1e-15);
    }

    #[test]
    fn block_maps_match_numeric_projection() {
        let l = ChainLayout::new(2).unwrap();
        let pulse =
            Pulse::three_site(1, TwoQubitParams::new(PI / 2.0).unwrap()).with_area(PI / 2.0);
        let u = propagate_exact(&pulse, &l).unwrap();
        let idx = l.logical_indices();
        let numeric = u.restrict(&[idx[1], idx[2]]);
        let maps = projected_block_maps(PI / 2.0, PI / 2.0);
        assert!(close(&numeric, &maps.a, 1e-10));
        assert!((u[(idx[3], idx[3])] - Complex64::new(maps.c, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn block_maps_are_contractions() {
        for k in 0..16 {
            let m = projected_block_maps(0.3 * k as f64, 0.4 * k as f64);
            assert!(m.a.spectral_norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn extract_identity() {
        let l = ChainLayout::new(2).unwrap();
        let r = extract_logical_gate(&Operator::identity(27), &l).unwrap();
        assert!(r.exact);
        assert_eq!(r.leakage, 0.0);
        assert!(close(&r.logical_gate, &Operator::identity(4), 1e-15));
        assert!(!r.entangling.unwrap().entangling);
    }

    #[test]
    fn extract_one_qubit_pulse() {
        let l = ChainLayout::new(2).unwrap();
        let p = OneQubitParams::new(1.2, 0.4).unwrap();
        let u = propagate_exact(&Pulse::one_qubit(1, p), &l).unwrap();
        let n = BlochVector::from_array(p.bloch()).unwrap();
        let target = one_qubit_gate(&n).kron(&Operator::identity(2));
        let r = extract_logical_gate(&u, &l)
            .unwrap()
            .with_target(&target)
            .unwrap();
        assert!(r.leakage < 1e-10);
        assert!(r.fidelity_vs_target.unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn extract_non_cyclic_pulse() {
        let l = ChainLayout::new(2).unwrap();
        let pulse =
            Pulse::three_site(1, TwoQubitParams::new(PI / 2.0).unwrap()).with_area(PI / 2.0);
        let u = propagate_exact(&pulse, &l).unwrap();
        let r = extract_logical_gate(&u, &l).unwrap();
        assert!(r.leakage > 0.1);
        assert!(!r.exact);
        assert!(r.entangling.is_none());
        let idx = l.logical_indices();
        assert!(close(&r.logical_gate, &u.restrict(&idx), 0.0 + 1e-15));
    }

    #[test]
    fn extract_checks_dimension() {
        let l = ChainLayout::new(2).unwrap();
        assert!(extract_logical_gate(&Operator::identity(9), &l).is_err());
    }

    #[test]
    fn auxiliary_site_restored_by_pi_pulse() {
        let l = ChainLayout::new(2).unwrap();
        let u =
            propagate_exact(&Pulse::three_site(1, TwoQubitParams::new(0.9).unwrap()), &l).unwrap();
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let psi = logical_encode(&bits, &l).unwrap().evolve(&u).unwrap();
            let pops = site_populations(&psi, &l);
            assert!((pops[1][0] - 1.0).abs() < 1e-12);
            let (_, outside) = logical_amplitudes(&psi, &l);
            assert!(outside < 1e-12);
        }
    }

    #[test]
    fn entropy_of_plus_plus_through_xy_gate() {
        let out = two_qubit_gate(PI / 2.0).apply(&plus_plus());
        assert!((entanglement_entropy(&out).unwrap() - LN_2).abs() < 1e-9);
    }

    #[test]
    fn verdicts() {
        let local = entangling_verdict(&two_qubit_gate(0.0)).unwrap();
        assert!(!local.entangling);
        assert!(local.witness.entropy < 1e-8);
        assert!(!entangling_verdict(&two_qubit_gate(PI)).unwrap().entangling);
        let xy = entangling_verdict(&two_qubit_gate(PI / 2.0)).unwrap();
        assert!(xy.entangling);
        assert!((xy.witness.entropy - LN_2).abs() < 1e-9);
        let c = entangling_verdict(&cnot()).unwrap();
        assert!(c.entangling);
        assert!((c.witness.entropy - LN_2).abs() < 1e-9);
        assert!(
            entangling_verdict(&Operator::identity(4).scale(Complex64::new(2.0, 0.0))).is_err()
        );
    }

    #[test]
    fn cnot_on_plus_zero_is_bell() {
        let plus_zero = vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            ZERO,
        ];
        let out = cnot().apply(&plus_zero);
        assert!((entanglement_entropy(&out).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn makhlin_reference_values() {
        let local = makhlin_invariants(&pauli_z().kron(&pauli_x())).unwrap();
        assert!((local.g1 - ONE).norm() < 1e-12);
        assert!((local.g2 - 3.0).abs() < 1e-12);
        let c = makhlin_invariants(&cnot()).unwrap();
        assert!(c.g1.norm() < 1e-12);
        assert!((c.g2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angles_round_trip_and_poles() {
        let (t, p) = BlochVector::new(0.0, 0.0, 1.0).unwrap().angles();
        assert_eq!((t, p), (0.0, 0.0));
        let (t, p) = BlochVector::new(0.0, 0.0, -1.0).unwrap().angles();
        assert_eq!((t, p), (PI, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = random_unit(&mut rng);
            let (t, p) = n.angles();
            let back = BlochVector::from_angles(t, p);
            for (a, b) in n.as_array().iter().zip(back.as_array()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logical_embedding() {
        let g = logical_embed(&pauli_x(), 2, 3).unwrap();
        let expected = Operator::identity(2)
            .kron(&pauli_x())
            .kron(&Operator::identity(2));
        assert_eq!(g, expected);
        assert!(logical_embed(&cnot(), 3, 3).is_err());
        assert!(logical_embed(&pauli_x(), 0, 3).is_err());
    }
}
