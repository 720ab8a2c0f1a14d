//! Gibbs states and equilibrium quantities of finite Hermitian operators.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::linops::{
    expectation, hermitian_eig, kron, number, partial_trace_rc, EigenSystem, Operator, ProductSpace,
};

/// Eigenvalues below this are treated as numerical noise around zero.
pub const PSD_TOL: f64 = 1e-12;

/// Canonical state exp(-beta H)/Z together with ln Z.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub rho: Operator,
    pub beta: f64,
    pub ln_z: f64,
    /// Fingerprint of the generating Hamiltonian's entries.
    pub source_hash: u64,
    populations: Vec<f64>,
}

impl ThermalState {
    /// Boltzmann weights in ascending energy order.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn is_generated_by(&self, h: &Operator) -> bool {
        operator_hash(h) == self.source_hash
    }
}

pub fn operator_hash(h: &Operator) -> u64 {
    let mut hasher = DefaultHasher::new();
    h.dim().hash(&mut hasher);
    for z in h.entries() {
        z.re.to_bits().hash(&mut hasher);
        z.im.to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")))
    }
}

/// Shifted Boltzmann weights and ln Z for an ascending spectrum.
fn boltzmann(eigenvalues: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let e0 = eigenvalues[0];
    let weights: Vec<f64> = eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z_shifted: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / z_shifted).collect();
    (probs, z_shifted.ln() - beta * e0)
}

pub fn gibbs_from_eig(eig: &EigenSystem, beta: f64, source_hash: u64) -> Result<ThermalState> {
    check_beta(beta)?;
    let (populations, ln_z) = boltzmann(&eig.eigenvalues, beta);
    let rho = eig.reconstruct_with(&populations).hermitian_part();
    Ok(ThermalState {
        rho,
        beta,
        ln_z,
        source_hash,
        populations,
    })
}

/// exp(-beta h)/Z, evaluated in the eigenbasis with the spectrum shifted to
/// start at zero.
pub fn gibbs_state(h: &Operator, beta: f64) -> Result<ThermalState> {
    check_beta(beta)?;
    let eig = hermitian_eig(h)?;
    gibbs_from_eig(&eig, beta, operator_hash(h))
}

/// ln tr exp(-beta h) by log-sum-exp over the spectrum.
pub fn ln_partition(h: &Operator, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let eig = hermitian_eig(h)?;
    Ok(boltzmann(&eig.eigenvalues, beta).1)
}

/// -tr(rho ln rho) with 0 ln 0 = 0.
pub fn von_neumann_entropy(rho: &Operator) -> Result<f64> {
    let eig = hermitian_eig(rho)?;
    entropy_of_spectrum(&eig.eigenvalues)
}

fn entropy_of_spectrum(p: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &x in p {
        if x < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: x });
        }
        if x > 0.0 {
            s -= x * x.ln();
        }
    }
    Ok(s.max(0.0))
}

/// F = <H> - S / beta for `state` measured against `h`.
pub fn free_energy(state: &ThermalState, h: &Operator) -> Result<f64> {
    let energy = expectation(h, &state.rho)?;
    let entropy = if state.is_generated_by(h) {
        entropy_of_spectrum(&state.populations)?
    } else {
        von_neumann_entropy(&state.rho)?
    };
    Ok(energy - entropy / state.beta)
}

/// Reduced two-level state of an enlarged-system state.
pub fn reduced_tls_state(state: &ThermalState, space: ProductSpace) -> Result<Operator> {
    partial_trace_rc(&state.rho, space)
}

/// <a^dagger a> of the reaction coordinate.
pub fn rc_occupation(state: &ThermalState, space: ProductSpace) -> Result<f64> {
    let num = kron(&Operator::identity(ProductSpace::DIM_TLS), &number(space.dim_rc())?);
    expectation(&num, &state.rho)
}

/// Thermal occupation of a single mode restricted to `n` Fock levels.
pub fn truncated_bose_occupation(omega: f64, beta: f64, n: usize) -> f64 {
    let x = beta * omega;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        let w = (-x * k as f64).exp();
        num += k as f64 * w;
        den += w;
    }
    num / den
}

/// ln sum_{k<n} exp(-beta omega k).
pub fn truncated_harmonic_ln_partition(omega: f64, beta: f64, n: usize) -> f64 {
    let x = beta * omega;
    (0..n).map(|k| (-x * k as f64).exp()).sum::<f64>().ln()
}

/// Trace distance (1/2)||a - b||_1 between two Hermitian operators.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    let eig = hermitian_eig(&(a - b))?;
    Ok(0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>())
}
