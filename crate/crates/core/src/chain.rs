//! Chain of `2N - 1` three-level sites carrying `N` logical qubits.
//!
//! Basis conventions: each site has local codes `|0> -> 0`, `|1> -> 1`,
//! `|e> -> 2`. Sites are numbered from 1 and site 1 is the most significant
//! digit of the base-3 global index. Odd sites `2l - 1` hold logical qubit
//! `l`; even sites are auxiliary and sit in `|0>` on the logical subspace.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, I, ONE, ZERO};

pub const LOCAL_DIM: usize = 3;

/// Local level codes.
pub const GROUND_0: usize = 0;
pub const GROUND_1: usize = 1;
pub const EXCITED: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainLayout {
    n_logical: usize,
}

impl ChainLayout {
    pub fn new(n_logical: usize) -> Result<Self> {
        if n_logical == 0 {
            return Err(Error::EmptyChain);
        }
        Ok(ChainLayout { n_logical })
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_logical - 1
    }

    /// Dimension of the full chain space, `3^(2N-1)`.
    pub fn dim(&self) -> usize {
        LOCAL_DIM.pow(self.n_sites() as u32)
    }

    pub fn logical_dim(&self) -> usize {
        1 << self.n_logical
    }

    /// Site hosting logical qubit `l` (1-based).
    pub fn qubit_site(&self, qubit: usize) -> Result<usize> {
        self.check_qubit(qubit)?;
        Ok(2 * qubit - 1)
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit == 0 || qubit > self.n_logical {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_logical: self.n_logical,
            });
        }
        Ok(())
    }

    pub fn check_pair(&self, pair: usize) -> Result<()> {
        if pair == 0 || pair >= self.n_logical {
            return Err(Error::PairOutOfRange {
                pair,
                max: self.n_logical.saturating_sub(1),
            });
        }
        Ok(())
    }

    /// Place value of a site in the global index.
    pub fn site_stride(&self, site: usize) -> usize {
        LOCAL_DIM.pow((self.n_sites() - site) as u32)
    }

    /// Global index of a product basis state given per-site codes.
    pub fn basis_index(&self, codes: &[usize]) -> Result<usize> {
        if codes.len() != self.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites(),
                actual: codes.len(),
            });
        }
        Ok(codes.iter().fold(0, |acc, &c| acc * LOCAL_DIM + c))
    }

    /// Per-site codes of a global index.
    pub fn site_codes(&self, index: usize) -> Vec<usize> {
        let mut codes = vec![0; self.n_sites()];
        let mut rest = index;
        for code in codes.iter_mut().rev() {
            *code = rest % LOCAL_DIM;
            rest /= LOCAL_DIM;
        }
        codes
    }

    /// Global index of the logical state `|n_1 ... n_N>_L`.
    pub fn logical_index(&self, bits: &[u8]) -> Result<usize> {
        if bits.len() != self.n_logical {
            return Err(Error::BitCount {
                expected: self.n_logical,
                actual: bits.len(),
            });
        }
        let mut index = 0;
        for (l, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidBit(b));
            }
            index += b as usize * self.site_stride(2 * l + 1);
        }
        Ok(index)
    }

    /// Global indices of all logical states in lexicographic order of `n_1 ... n_N`.
    pub fn logical_indices(&self) -> Vec<usize> {
        (0..self.logical_dim())
            .map(|k| {
                (0..self.n_logical)
                    .filter(|l| (k >> (self.n_logical - 1 - l)) & 1 == 1)
                    .map(|l| self.site_stride(2 * l + 1))
                    .sum()
            })
            .collect()
    }
}

/// Logical state `|n_1 ... n_N>_L` with every auxiliary site in `|0>`.
pub fn logical_encode(bits: &[u8], layout: &ChainLayout) -> Result<StateVector> {
    let index = layout.logical_index(bits)?;
    Ok(StateVector::basis(layout.dim(), index))
}

/// The Gell-Mann matrices used by the chain Hamiltonian.
///
/// `lambda_3`, `lambda_5` and `lambda_8` never appear and are not provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GellMann {
    L1,
    L2,
    L4,
    L6,
    L7,
}

impl GellMann {
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(GellMann::L1),
            2 => Ok(GellMann::L2),
            4 => Ok(GellMann::L4),
            6 => Ok(GellMann::L6),
            7 => Ok(GellMann::L7),
            other => Err(Error::UnsupportedGellMann(other)),
        }
    }

    pub fn matrix(self) -> Operator {
        let mut m = Operator::zeros(LOCAL_DIM);
        let (a, b, upper) = match self {
            // |e><0| + |0><e|
            GellMann::L1 => (EXCITED, GROUND_0, ONE),
            // -i|e><0| + i|0><e|
            GellMann::L2 => (EXCITED, GROUND_0, -I),
            // |e><1| + |1><e|
            GellMann::L4 => (EXCITED, GROUND_1, ONE),
            // |0><1| + |1><0|
            GellMann::L6 => (GROUND_0, GROUND_1, ONE),
            // -i|0><1| + i|1><0|
            GellMann::L7 => (GROUND_0, GROUND_1, -I),
        };
        m[(a, b)] = upper;
        m[(b, a)] = upper.conj();
        m
    }
}

pub fn gell_mann(index: u8) -> Result<Operator> {
    Ok(GellMann::from_index(index)?.matrix())
}

/// Pseudo-spin `sigma_z = |0><0| - |1><1|` on one site (zero on `|e>`).
pub fn pseudo_spin_z() -> Operator {
    Operator::diagonal(&[ONE, -ONE, ZERO])
}

/// Number of sites an operator of dimension `dim` acts on.
pub fn qutrit_count(dim: usize) -> Result<usize> {
    let mut m = 0;
    let mut d = 1;
    while d < dim {
        d *= LOCAL_DIM;
        m += 1;
    }
    if d != dim || dim == 0 {
        return Err(Error::NotQutritOperator(dim));
    }
    Ok(m)
}

/// Operator supported on contiguous sites `start_site ..= start_site + m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    start_site: usize,
    n_sites: usize,
    matrix: Operator,
}

impl LocalOperator {
    pub fn new(matrix: Operator, start_site: usize, layout: &ChainLayout) -> Result<Self> {
        let n_sites = qutrit_count(matrix.dim())?;
        let last = start_site + n_sites.max(1) - 1;
        if start_site == 0 || last > layout.n_sites() {
            return Err(Error::SiteOutOfRange {
                site: if start_site == 0 { 0 } else { last },
                n_sites: layout.n_sites(),
            });
        }
        Ok(LocalOperator {
            start_site,
            n_sites,
            matrix,
        })
    }

    pub fn start_site(&self) -> usize {
        self.start_site
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn map_matrix(&self, f: impl FnOnce(&Operator) -> Operator) -> LocalOperator {
        LocalOperator {
            start_site: self.start_site,
            n_sites: self.n_sites,
            matrix: f(&self.matrix),
        }
    }

    /// Full-chain matrix `I ⊗ op ⊗ I`.
    pub fn embed(&self, layout: &ChainLayout) -> Operator {
        let left = LOCAL_DIM.pow((self.start_site - 1) as u32);
        let right = layout.site_stride(self.start_site + self.n_sites - 1);
        Operator::identity(left)
            .kron(&self.matrix)
            .kron(&Operator::identity(right))
    }

    /// Applies the operator in place to a full-chain amplitude vector.
    pub fn apply_in_place(&self, layout: &ChainLayout, v: &mut [Complex64]) {
        assert_eq!(v.len(), layout.dim(), "state dimension mismatch");
        let local = self.matrix.dim();
        let right = layout.site_stride(self.start_site + self.n_sites - 1);
        let left = v.len() / (local * right);
        let mut gathered = vec![ZERO; local];
        for hi in 0..left {
            for lo in 0..right {
                let base = hi * local * right + lo;
                for (k, g) in gathered.iter_mut().enumerate() {
                    *g = v[base + k * right];
                }
                let out = self.matrix.apply(&gathered);
                for (k, o) in out.into_iter().enumerate() {
                    v[base + k * right] = o;
                }
            }
        }
    }

    /// `embed(self) * op` without materializing the embedding.
    pub fn left_multiply(&self, layout: &ChainLayout, op: &Operator) -> Operator {
        let n = op.dim();
        let mut columns: Vec<Vec<Complex64>> = (0..n).map(|c| op.column(c)).collect();
        for col in &mut columns {
            self.apply_in_place(layout, col);
        }
        Operator::from_fn(n, |r, c| columns[c][r])
    }
}

/// Tensor-embeds `op` (acting on `m` contiguous sites starting at `start_site`) into the chain.
pub fn embed(op: &Operator, start_site: usize, layout: &ChainLayout) -> Result<Operator> {
    Ok(LocalOperator::new(op.clone(), start_site, layout)?.embed(layout))
}

fn wrap(angle: f64, period: f64) -> f64 {
    let r = angle.rem_euclid(period);
    // rem_euclid can round up to exactly `period`
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Drive angles of a one-qubit Lambda pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneQubitParams {
    theta: f64,
    phi: f64,
    raw_theta: f64,
    raw_phi: f64,
}

impl OneQubitParams {
    /// Normalizes to `theta in [0, pi]`, `phi in [0, 2 pi)` describing the same Bloch vector.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "non-finite drive angles theta={theta}, phi={phi}"
            )));
        }
        let mut t = wrap(theta, TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        Ok(OneQubitParams {
            theta: t,
            phi: wrap(p, TAU),
            raw_theta: theta,
            raw_phi: phi,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn raw(&self) -> (f64, f64) {
        (self.raw_theta, self.raw_phi)
    }

    /// `(sin theta cos phi, sin theta sin phi, cos theta)`
    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Coupling angle of a three-site XY pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitParams {
    vartheta: f64,
    raw_vartheta: f64,
}

impl TwoQubitParams {
    pub fn new(vartheta: f64) -> Result<Self> {
        if !vartheta.is_finite() {
            return Err(Error::InvalidPulse(format!(
                "non-finite coupling angle {vartheta}"
            )));
        }
        Ok(TwoQubitParams {
            vartheta: wrap(vartheta, TAU),
            raw_vartheta: vartheta,
        })
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn raw(&self) -> f64 {
        self.raw_vartheta
    }
}

/// Single-site Lambda coupling `sin(theta/2) e^{i phi}|e><0| - cos(theta/2)|e><1| + h.c.`
pub fn h1_local(p: &OneQubitParams) -> Operator {
    let (s, c) = (p.theta / 2.0).sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let l1 = GellMann::L1.matrix().scale(Complex64::new(s * cp, 0.0));
    let l2 = GellMann::L2.matrix().scale(Complex64::new(-s * sp, 0.0));
    let l4 = GellMann::L4.matrix().scale(Complex64::new(-c, 0.0));
    &(&l1 + &l2) + &l4
}

pub fn h1_block(site: usize, p: &OneQubitParams, layout: &ChainLayout) -> Result<LocalOperator> {
    if site == 0 || site > layout.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: layout.n_sites(),
        });
    }
    if site.is_multiple_of(2) {
        return Err(Error::AuxiliarySite(site));
    }
    LocalOperator::new(h1_local(p), site, layout)
}

/// Full-chain one-qubit drive on an odd site.
pub fn h1(site: usize, p: &OneQubitParams, layout: &ChainLayout) -> Result<Operator> {
    Ok(h1_block(site, p, layout)?.embed(layout))
}

/// `lambda6 ⊗ lambda6 + lambda7 ⊗ lambda7` on two sites.
fn xy_pair() -> Operator {
    let l6 = GellMann::L6.matrix();
    let l7 = GellMann::L7.matrix();
    &l6.kron(&l6) + &l7.kron(&l7)
}

/// Three-site XY coupling on sites `(2l'-1, 2l', 2l'+1)` as a 27x27 matrix.
///
/// The coupling is restricted to configurations with all three sites in
/// `{|0>, |1>}`: any basis state with `|e>` on one of the sites is
/// annihilated, including the spectator site of either pair term.
pub fn h3_local(p: &TwoQubitParams) -> Operator {
    let (s, c) = (p.vartheta / 2.0).sin_cos();
    let id = Operator::identity(LOCAL_DIM);
    let left = xy_pair().kron(&id).scale(Complex64::new(-0.5 * c, 0.0));
    let right = id.kron(&xy_pair()).scale(Complex64::new(0.5 * s, 0.0));
    let full = &left + &right;
    let qubit_like = |index: usize| {
        let mut rest = index;
        (0..3).all(|_| {
            let code = rest % LOCAL_DIM;
            rest /= LOCAL_DIM;
            code != EXCITED
        })
    };
    Operator::from_fn(full.dim(), |r, c| {
        if qubit_like(r) && qubit_like(c) {
            full[(r, c)]
        } else {
            ZERO
        }
    })
}

pub fn h3_block(pair: usize, p: &TwoQubitParams, layout: &ChainLayout) -> Result<LocalOperator> {
    layout.check_pair(pair)?;
    LocalOperator::new(h3_local(p), 2 * pair - 1, layout)
}

/// Full-chain three-site coupling mediating a gate between qubits `pair` and `pair + 1`.
pub fn h3(pair: usize, p: &TwoQubitParams, layout: &ChainLayout) -> Result<Operator> {
    Ok(h3_block(pair, p, layout)?.embed(layout))
}

/// `S_z = (sigma_z + sigma_z + sigma_z) / 2` over the three sites of a pair block.
pub fn block_sz(pair: usize, layout: &ChainLayout) -> Result<Operator> {
    layout.check_pair(pair)?;
    let first = 2 * pair - 1;
    let mut acc = Operator::zeros(layout.dim());
    for site in first..first + 3 {
        let sz = embed(&pseudo_spin_z(), site, layout)?;
        acc = &acc + &sz;
    }
    Ok(acc.scale(Complex64::new(0.5, 0.0)))
}
