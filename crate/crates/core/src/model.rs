//! Two-level system, Ohmic reservoirs, and the reaction-coordinate mapping.
//!
//! Units: k_B = hbar = 1, energies in units of the cold-point bias.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linops::{kron, number, quadrature, sigma_x, sigma_z, Operator, ProductSpace};

/// Convention for the identity term of the two-level Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyShift {
    /// Adds mu/2 * I so the spectrum is exactly {0, mu}.
    #[default]
    GroundAtZero,
}

/// Bias and tunnelling of the two-level system at one cycle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsParams {
    pub epsilon: f64,
    pub delta: f64,
    pub shift: EnergyShift,
}

impl TlsParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            shift: EnergyShift::GroundAtZero,
        }
    }
}

/// Inverse temperature and Ohmic-with-cutoff spectral density of a reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    pub beta: f64,
    pub alpha: f64,
    pub omega_c: f64,
}

impl ReservoirSpec {
    pub fn new(beta: f64, alpha: f64, omega_c: f64) -> Result<Self> {
        let spec = Self { beta, alpha, omega_c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be non-negative, got {}",
                self.alpha
            )));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega_c must be positive, got {}",
                self.omega_c
            )));
        }
        Ok(())
    }
}

/// Enlarged-system parameters for one reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcMapping {
    pub gamma: f64,
    pub omega_rc: f64,
    pub lambda: f64,
    pub n: usize,
}

impl RcMapping {
    pub fn space(&self) -> ProductSpace {
        ProductSpace::new(self.n).expect("mapping holds a validated truncation")
    }
}

/// mu = sqrt(eps^2 + delta^2).
pub fn splitting(p: &TlsParams) -> f64 {
    p.epsilon.hypot(p.delta)
}

/// H_S = (mu/2) I + (eps/2) sigma_z + (delta/2) sigma_x.
pub fn tls_hamiltonian(p: &TlsParams) -> Operator {
    let mu = match p.shift {
        EnergyShift::GroundAtZero => splitting(p),
    };
    let id = Operator::identity(2).scale(mu / 2.0);
    let z = sigma_z().scale(p.epsilon / 2.0);
    let x = sigma_x().scale(p.delta / 2.0);
    &(&id + &z) + &x
}

/// J(omega) = alpha omega omega_c / (omega^2 + omega_c^2).
pub fn spectral_density(spec: &ReservoirSpec, omega: f64) -> Result<f64> {
    if omega < 0.0 || omega.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "spectral density needs omega >= 0, got {omega}"
        )));
    }
    Ok(spec.alpha * omega * spec.omega_c / (omega * omega + spec.omega_c * spec.omega_c))
}

/// Reaction-coordinate parameters with the width fixed so that the RC
/// frequency equals the two-level splitting of `p`.
pub fn rc_mapping(spec: &ReservoirSpec, p: &TlsParams, n: usize) -> Result<RcMapping> {
    if n == 0 {
        return Err(Error::InvalidTruncation(n));
    }
    let mu = splitting(p);
    if mu == 0.0 {
        return Err(Error::DegenerateSplitting);
    }
    let gamma = mu / (2.0 * PI * spec.omega_c);
    let omega_rc = 2.0 * PI * gamma * spec.omega_c;
    let lambda = (PI * spec.alpha * omega_rc / 2.0).sqrt();
    Ok(RcMapping {
        gamma,
        omega_rc,
        lambda,
        n,
    })
}

/// H_S x I - lambda sigma_z x (a^dagger + a) + Omega I x a^dagger a.
pub fn mapped_hamiltonian(p: &TlsParams, m: &RcMapping) -> Result<Operator> {
    let n = m.n;
    let system = kron(&tls_hamiltonian(p), &Operator::identity(n));
    let coupling = kron(&sigma_z(), &quadrature(n)?).scale(-m.lambda);
    let oscillator = kron(&Operator::identity(2), &number(n)?).scale(m.omega_rc);
    Ok((&(&system + &coupling) + &oscillator).hermitian_part())
}

/// sigma_z x (a^dagger + a): the operator whose expectation, times lambda,
/// is the instantaneous decoupling work.
pub fn coupling_operator(n: usize) -> Result<Operator> {
    Ok(kron(&sigma_z(), &quadrature(n)?))
}
