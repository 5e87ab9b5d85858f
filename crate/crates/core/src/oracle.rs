//! Brute-force reference: the full Hamiltonian on the 2^(1+N₁+N₂)-dimensional
//! product space, dense eigendecomposition, and explicit evolution of every
//! bath z-configuration in the thermal ensemble.
//!
//! Nothing here uses collective-spin labels, multiplicities or the sector
//! detuning formula. The Hamiltonian is assembled term by term from
//! Kronecker products of 2×2 single-site operators, and bath energies are
//! read off the diagonal of the bath Hamiltonian matrix.
//!
//! Site order is dimer, bath-1 spins, bath-2 spins, with site 0 the most
//! significant bit of the basis index. Dimer state 0 is level |1⟩.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::combinatorics::{magnetizations, HalfInt};
use crate::config::SystemConfig;
use crate::error::{DimerError, Result};

/// Largest N₁ + N₂ the oracle will build.
pub const MAX_ORACLE_SPINS: u32 = 14;

type CMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn two_by_two(entries: [f64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &entries.map(c))
}

fn sigma_z() -> CMatrix {
    two_by_two([1.0, 0.0, 0.0, -1.0])
}

fn sigma_x() -> CMatrix {
    two_by_two([0.0, 1.0, 1.0, 0.0])
}

fn projector(level: usize) -> CMatrix {
    if level == 0 {
        two_by_two([1.0, 0.0, 0.0, 0.0])
    } else {
        two_by_two([0.0, 0.0, 0.0, 1.0])
    }
}

/// ⊗ over `sites` sites with the given single-site operators, identity elsewhere.
fn embed(sites: usize, ops: &[(usize, &CMatrix)]) -> CMatrix {
    let identity = CMatrix::identity(2, 2);
    let mut acc = CMatrix::identity(1, 1);
    for s in 0..sites {
        let op = ops.iter().find(|(site, _)| *site == s).map_or(&identity, |(_, m)| *m);
        acc = acc.kronecker(op);
    }
    acc
}

fn guard(config: &SystemConfig) -> Result<(u32, u32)> {
    let (n1, n2) = (config.bath1.size, config.bath2.size);
    if n1 + n2 > MAX_ORACLE_SPINS {
        return Err(DimerError::OracleTooLarge {
            requested: n1 + n2,
            limit: MAX_ORACLE_SPINS,
        });
    }
    Ok((n1, n2))
}

/// Full dimer + bath Hamiltonian as a dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    n1: u32,
    n2: u32,
    matrix: CMatrix,
}

impl DenseHamiltonian {
    pub fn build(config: &SystemConfig) -> Result<Self> {
        let (n1, n2) = guard(config)?;
        let sites = 1 + (n1 + n2) as usize;
        let dim = 1usize << sites;
        let (sz, sx) = (sigma_z(), sigma_x());
        let (p1, p2) = (projector(0), projector(1));
        let bath1: Vec<usize> = (1..=n1 as usize).collect();
        let bath2: Vec<usize> = (1 + n1 as usize..sites).collect();

        let mut h = CMatrix::zeros(dim, dim);
        h += embed(sites, &[(0, &sx)]) * c(config.dimer.hopping);
        h += embed(sites, &[(0, &p1)]) * c(config.dimer.epsilon1);
        h += embed(sites, &[(0, &p2)]) * c(config.dimer.epsilon2);
        for (spins, bath, level) in [(&bath1, &config.bath1, &p1), (&bath2, &config.bath2, &p2)] {
            for &k in spins {
                h += embed(sites, &[(k, &sz)]) * c(bath.splitting / 2.0);
                h += embed(sites, &[(0, level), (k, &sz)]) * c(bath.coupling / 2.0);
            }
        }
        let q = config.correlation.ising;
        if q != 0.0 {
            for &k in &bath1 {
                for &l in &bath2 {
                    h += embed(sites, &[(k, &sz), (l, &sz)]) * c(q / 4.0);
                }
            }
        }
        Ok(DenseHamiltonian { n1, n2, matrix: h })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bath_states(&self) -> usize {
        1usize << (self.n1 + self.n2)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Basis index of |level⟩ ⊗ |bath configuration⟩.
    pub fn index(&self, level: usize, bath: usize) -> usize {
        level * self.bath_states() + bath
    }

    /// H + shift·1.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.dimension() {
            out.matrix[(i, i)] += c(shift);
        }
        out
    }

    /// max |H − H†|.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Diagonal of α₁S₁ᶻ + α₂S₂ᶻ + qS₁ᶻS₂ᶻ on the bath product space.
fn bath_energies(config: &SystemConfig) -> Result<Vec<f64>> {
    let (n1, n2) = guard(config)?;
    let sites = (n1 + n2) as usize;
    let sz = sigma_z();
    let dim = 1usize << sites;
    let mut s1 = CMatrix::zeros(dim, dim);
    let mut s2 = CMatrix::zeros(dim, dim);
    for k in 0..n1 as usize {
        s1 += embed(sites, &[(k, &sz)]) * c(0.5);
    }
    for k in n1 as usize..sites {
        s2 += embed(sites, &[(k, &sz)]) * c(0.5);
    }
    let h = &s1 * c(config.bath1.splitting)
        + &s2 * c(config.bath2.splitting)
        + (&s1 * &s2) * c(config.correlation.ising);
    Ok((0..dim).map(|i| h[(i, i)].re).collect())
}

/// Initial bath z-configurations with their canonical probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalEnsembleState {
    members: Vec<(usize, f64)>,
}

impl ThermalEnsembleState {
    /// Canonical ensemble at the configured temperature. At zero temperature
    /// the lowest-energy configurations share the weight equally.
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let energies = bath_energies(config)?;
        let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = match config.beta() {
            Some(beta) => energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect(),
            None => {
                let band = 1e-12 * e_min.abs().max(1.0);
                energies
                    .iter()
                    .map(|e| if e - e_min <= band { 1.0 } else { 0.0 })
                    .collect()
            }
        };
        let total: f64 = raw.iter().sum();
        let members = raw
            .into_iter()
            .enumerate()
            .filter(|&(_, w)| w > 0.0)
            .map(|(i, w)| (i, w / total))
            .collect();
        Ok(ThermalEnsembleState { members })
    }

    pub fn members(&self) -> &[(usize, f64)] {
        &self.members
    }

    pub fn total_probability(&self) -> f64 {
        self.members.iter().map(|&(_, p)| p).sum()
    }
}

/// Eigendecomposition of the full Hamiltonian, reused across time points.
pub struct OracleEvolver {
    bath_states: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    ensemble: ThermalEnsembleState,
}

impl OracleEvolver {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let ham = DenseHamiltonian::build(config)?;
        let ensemble = ThermalEnsembleState::new(config)?;
        Ok(Self::from_parts(ham, ensemble))
    }

    pub fn from_parts(ham: DenseHamiltonian, ensemble: ThermalEnsembleState) -> Self {
        let bath_states = ham.bath_states();
        let eig = SymmetricEigen::new(ham.matrix);
        OracleEvolver {
            bath_states,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
            ensemble,
        }
    }

    /// e^{−iHt} |1⟩ ⊗ |bath⟩.
    pub fn evolve_state(&self, bath: usize, t: f64) -> DVector<Complex64> {
        let v = &self.eigenvectors;
        let coeffs: DVector<Complex64> = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &e)| v[(bath, k)].conj() * Complex64::from_polar(1.0, -e * t)),
        );
        v * coeffs
    }

    /// Population of level 2 after starting in level 1 with bath configuration `bath`.
    fn level2_population(&self, bath: usize, t: f64) -> f64 {
        let v = &self.eigenvectors;
        let coeffs: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &e)| v[(bath, k)].conj() * Complex64::from_polar(1.0, -e * t))
            .collect();
        (self.bath_states..2 * self.bath_states)
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| v[(i, k)] * a)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }

    /// Tr_B[⟨2|U(t)|1⟩ρ_B⟨1|U(t)†|2⟩].
    pub fn probability(&self, t: f64) -> f64 {
        self.ensemble
            .members
            .iter()
            .map(|&(bath, p)| p * self.level2_population(bath, t))
            .sum()
    }
}

/// One-shot oracle evaluation of P₁→₂(t).
pub fn evolve_probability(config: &SystemConfig, t: f64) -> Result<f64> {
    Ok(OracleEvolver::new(config)?.probability(t))
}

/// Every (m₁, m₂) minimizing α₁m₁ + α₂m₂ + q m₁m₂ on the magnetization grid,
/// within a 1e−12 relative band.
pub fn brute_force_bath_ground(
    alpha1: f64,
    alpha2: f64,
    ising: f64,
    n1: u32,
    n2: u32,
) -> Vec<(HalfInt, HalfInt)> {
    let grid: Vec<(HalfInt, HalfInt, f64)> = magnetizations(n1)
        .flat_map(|m1| magnetizations(n2).map(move |m2| (m1, m2)))
        .map(|(m1, m2)| {
            let (x1, x2) = (m1.value(), m2.value());
            (m1, m2, alpha1 * x1 + alpha2 * x2 + ising * x1 * x2)
        })
        .collect();
    let e_min = grid.iter().map(|g| g.2).fold(f64::INFINITY, f64::min);
    let scale = grid.iter().map(|g| g.2.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    grid.into_iter()
        .filter(|g| g.2 - e_min <= 1e-12 * scale)
        .map(|(m1, m2, _)| (m1, m2))
        .collect()
}
