//! The generalized Otto cycle: point energies, stroke ledger, work, heat,
//! decoupling costs and efficiency.
//!
//! Cycle points, in order: A' -(hot isochore)-> B -(decouple)-> B'
//! -(expansion)-> C -(couple)-> C' -(cold isochore)-> D -(decouple)-> D'
//! -(compression)-> A -(couple)-> A'.
//!
//! Every point energy is reported relative to the thermal energy of both
//! uncoupled reservoirs. Terms belonging to the residual baths left after the
//! reaction-coordinate mapping are identical at every point and drop out. The
//! part of a reservoir's energy that does change (the excess over its
//! thermal value while it is still correlated with the system) lives entirely
//! in its reaction coordinate and is evaluated as
//! `Omega * (<a^dagger a> - n_thermal)`, with both occupations at the same
//! Fock truncation so that truncation error cancels.

use crate::error::{Error, Result};
use crate::linops::{expectation, Operator};
use crate::model::{
    coupling_operator, mapped_hamiltonian, rc_mapping, splitting, tls_hamiltonian, ReservoirSpec,
    TlsParams,
};
use crate::thermo::{
    gibbs_state, rc_occupation, reduced_tls_state, truncated_bose_occupation,
    truncated_harmonic_ln_partition,
};

/// Energy tolerance for sign decisions, in units of the cold-point bias.
pub const CLASSIFY_TOL: f64 = 1e-12;
/// Largest relative change of the point energies between truncations n and
/// n - 5 accepted as converged.
pub const TRUNCATION_TOL: f64 = 1e-6;
/// Step used for the internal truncation check.
pub const TRUNCATION_STEP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingModel {
    Weak,
    RcStrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrokeMode {
    Adiabatic,
    Sudden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecouplingMode {
    Instantaneous,
    AdiabaticDecoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reservoir {
    Hot,
    Cold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatingMode {
    Engine,
    Refrigerator,
    Neither,
}

impl CouplingModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CouplingModel::Weak => "weak",
            CouplingModel::RcStrong => "rc-strong",
        }
    }
}

impl StrokeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            StrokeMode::Adiabatic => "adiabatic",
            StrokeMode::Sudden => "sudden",
        }
    }
}

impl DecouplingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecouplingMode::Instantaneous => "instantaneous",
            DecouplingMode::AdiabaticDecoupling => "adiabatic",
        }
    }
}

impl OperatingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperatingMode::Engine => "engine",
            OperatingMode::Refrigerator => "refrigerator",
            OperatingMode::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub hot: ReservoirSpec,
    pub cold: ReservoirSpec,
    pub tls_hot: TlsParams,
    pub tls_cold: TlsParams,
    pub n: usize,
    pub coupling_model: CouplingModel,
    pub stroke_mode: StrokeMode,
    pub decoupling_mode: DecouplingMode,
}

impl CycleConfig {
    /// Defaults: n = 30, RC strong coupling, adiabatic strokes,
    /// instantaneous decoupling.
    pub fn new(hot: ReservoirSpec, cold: ReservoirSpec, tls_hot: TlsParams, tls_cold: TlsParams) -> Self {
        Self {
            hot,
            cold,
            tls_hot,
            tls_cold,
            n: 30,
            coupling_model: CouplingModel::RcStrong,
            stroke_mode: StrokeMode::Adiabatic,
            decoupling_mode: DecouplingMode::Instantaneous,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_modes(mut self, coupling: CouplingModel, stroke: StrokeMode, decoupling: DecouplingMode) -> Self {
        self.coupling_model = coupling;
        self.stroke_mode = stroke;
        self.decoupling_mode = decoupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.hot.validate()?;
        self.cold.validate()?;
        if self.cold.beta <= self.hot.beta {
            return Err(Error::InvalidParameter(format!(
                "cold reservoir must be colder than the hot one (beta_c = {} <= beta_h = {})",
                self.cold.beta, self.hot.beta
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidTruncation(0));
        }
        for p in [&self.tls_hot, &self.tls_cold] {
            if !(p.epsilon.is_finite() && p.delta.is_finite()) {
                return Err(Error::InvalidParameter("non-finite two-level parameter".into()));
            }
            if splitting(p) == 0.0 {
                return Err(Error::DegenerateSplitting);
            }
        }
        Ok(())
    }

    /// Decoupling mode actually used: weak coupling has no decoupling cost,
    /// so it always runs as instantaneous.
    pub fn effective_decoupling(&self) -> DecouplingMode {
        match self.coupling_model {
            CouplingModel::Weak => DecouplingMode::Instantaneous,
            CouplingModel::RcStrong => self.decoupling_mode,
        }
    }

    fn side(&self, which: Reservoir) -> (&ReservoirSpec, &TlsParams) {
        match which {
            Reservoir::Hot => (&self.hot, &self.tls_hot),
            Reservoir::Cold => (&self.cold, &self.tls_cold),
        }
    }
}

/// Energies at the eight labelled points of the cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePointEnergies {
    pub e_a: f64,
    pub e_a_prime: f64,
    pub e_b: f64,
    pub e_b_prime: f64,
    pub e_c: f64,
    pub e_c_prime: f64,
    pub e_d: f64,
    pub e_d_prime: f64,
}

impl CyclePointEnergies {
    /// Energies in cycle order starting from A'.
    pub fn in_cycle_order(&self) -> [f64; 8] {
        [
            self.e_a_prime,
            self.e_b,
            self.e_b_prime,
            self.e_c,
            self.e_c_prime,
            self.e_d,
            self.e_d_prime,
            self.e_a,
        ]
    }

    /// The eight consecutive point-to-point differences A'->B, ..., A->A'.
    pub fn stroke_differences(&self) -> [f64; 8] {
        let e = self.in_cycle_order();
        std::array::from_fn(|i| e[(i + 1) % 8] - e[i])
    }

    /// Sum of the stroke differences around the closed loop.
    pub fn loop_residual(&self) -> f64 {
        self.stroke_differences().iter().sum()
    }

    fn max_abs(&self) -> f64 {
        self.in_cycle_order().iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.in_cycle_order()
            .iter()
            .zip(other.in_cycle_order())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub points: CyclePointEnergies,
    /// Net work done on system plus reservoirs per cycle.
    pub w_net_on: f64,
    pub w_out: f64,
    /// Energy absorbed from the hot reservoir, including decoupling heat.
    pub q_hot: f64,
    /// Energy absorbed from the cold reservoir, including decoupling heat.
    pub q_cold: f64,
    pub w_decouple_hot: f64,
    pub w_decouple_cold: f64,
    pub q_decouple_hot: f64,
    pub q_decouple_cold: f64,
    pub eta: Option<f64>,
    pub mode: OperatingMode,
    /// False when the Fock truncation check failed.
    pub converged: bool,
}

impl CycleResult {
    /// w_net_on + q_hot + q_cold; zero for a closed cycle.
    pub fn first_law_residual(&self) -> f64 {
        self.w_net_on + self.q_hot + self.q_cold
    }
}

/// Equilibrium at the end of one isochore, reduced to the quantities the
/// ledger needs.
#[derive(Debug, Clone)]
pub struct IsochoreEquilibrium {
    pub tls: TlsParams,
    pub beta: f64,
    /// Reduced two-level state at the end of the isochore.
    pub reduced: Operator,
    /// tr[H_S rho_S].
    pub tls_energy: f64,
    /// lambda <sigma_z (a^dagger + a)>, i.e. -<H_I>.
    pub interaction_cost: f64,
    /// Omega (<a^dagger a> - n_thermal).
    pub reservoir_excess: f64,
    /// Gibbs state of the bare two-level Hamiltonian.
    pub bare: Operator,
    pub bare_energy: f64,
    pub ln_z_bare: f64,
    /// ln Z of the coupled system plus reaction coordinate.
    pub ln_z_enlarged: f64,
    /// ln Z of the uncoupled, truncated reaction coordinate.
    pub ln_z_rc: f64,
}

impl IsochoreEquilibrium {
    /// Energy at the end of the isochore (B or D).
    pub fn coupled_energy(&self) -> f64 {
        self.tls_energy - self.interaction_cost + self.reservoir_excess
    }

    /// Free-energy change of a quasi-static switch-off of the interaction.
    pub fn decoupling_free_energy(&self) -> f64 {
        (self.ln_z_enlarged - self.ln_z_bare - self.ln_z_rc) / self.beta
    }
}

fn bare_parts(tls: &TlsParams, beta: f64) -> Result<(Operator, Operator, f64, f64)> {
    let h = tls_hamiltonian(tls);
    let st = gibbs_state(&h, beta)?;
    let energy = expectation(&h, &st.rho)?;
    Ok((h, st.rho, energy, st.ln_z))
}

/// Isochore end state with the system and reservoir uncorrelated.
pub fn weak_isochore(tls: &TlsParams, beta: f64) -> Result<IsochoreEquilibrium> {
    let (_, bare, bare_energy, ln_z_bare) = bare_parts(tls, beta)?;
    Ok(IsochoreEquilibrium {
        tls: *tls,
        beta,
        reduced: bare.clone(),
        tls_energy: bare_energy,
        interaction_cost: 0.0,
        reservoir_excess: 0.0,
        bare,
        bare_energy,
        ln_z_bare,
        ln_z_enlarged: ln_z_bare,
        ln_z_rc: 0.0,
    })
}

/// Isochore end state from the Gibbs state of the mapped Hamiltonian.
pub fn rc_isochore(spec: &ReservoirSpec, tls: &TlsParams, n: usize) -> Result<IsochoreEquilibrium> {
    let beta = spec.beta;
    let m = rc_mapping(spec, tls, n)?;
    let space = m.space();
    let h = mapped_hamiltonian(tls, &m)?;
    let st = gibbs_state(&h, beta)?;
    let (h_s, bare, bare_energy, ln_z_bare) = bare_parts(tls, beta)?;

    let reduced = reduced_tls_state(&st, space)?;
    let tls_energy = expectation(&h_s, &reduced)?;
    let interaction_cost = m.lambda * expectation(&coupling_operator(n)?, &st.rho)?;
    let occupation = rc_occupation(&st, space)?;
    let reservoir_excess =
        m.omega_rc * (occupation - truncated_bose_occupation(m.omega_rc, beta, n));

    Ok(IsochoreEquilibrium {
        tls: *tls,
        beta,
        reduced,
        tls_energy,
        interaction_cost,
        reservoir_excess,
        bare,
        bare_energy,
        ln_z_bare,
        ln_z_enlarged: st.ln_z,
        ln_z_rc: truncated_harmonic_ln_partition(m.omega_rc, beta, n),
    })
}

/// State of system plus reservoirs just after decoupling (B' or D').
struct Decoupled {
    tls_state: Operator,
    reservoir_excess: f64,
    energy: f64,
    work: f64,
    heat: f64,
}

fn decouple(eq: &IsochoreEquilibrium, mode: DecouplingMode) -> Decoupled {
    let before = eq.coupled_energy();
    match mode {
        DecouplingMode::Instantaneous => {
            let energy = eq.tls_energy + eq.reservoir_excess;
            Decoupled {
                tls_state: eq.reduced.clone(),
                reservoir_excess: eq.reservoir_excess,
                energy,
                work: energy - before,
                heat: 0.0,
            }
        }
        DecouplingMode::AdiabaticDecoupling => {
            let energy = eq.bare_energy;
            let work = eq.decoupling_free_energy();
            Decoupled {
                tls_state: eq.bare.clone(),
                reservoir_excess: 0.0,
                energy,
                work,
                heat: energy - before - work,
            }
        }
    }
}

/// Energy at the end of an isentrope from `from` to `to`.
fn isentrope(stroke: StrokeMode, from: &TlsParams, to: &TlsParams, start: &Decoupled) -> Result<f64> {
    let system = match stroke {
        StrokeMode::Adiabatic => {
            splitting(to) / splitting(from) * expectation(&tls_hamiltonian(from), &start.tls_state)?
        }
        StrokeMode::Sudden => expectation(&tls_hamiltonian(to), &start.tls_state)?,
    };
    Ok(system + start.reservoir_excess)
}

struct Ledger {
    points: CyclePointEnergies,
    hot: Decoupled,
    cold: Decoupled,
}

fn assemble(
    cfg: &CycleConfig,
    hot: &IsochoreEquilibrium,
    cold: &IsochoreEquilibrium,
    decoupling: DecouplingMode,
) -> Result<Ledger> {
    let hot_off = decouple(hot, decoupling);
    let cold_off = decouple(cold, decoupling);
    // Reservoirs are thermal again whenever a coupling is switched on, so
    // coupling is free: C' = C and A' = A.
    let e_c = isentrope(cfg.stroke_mode, &cfg.tls_hot, &cfg.tls_cold, &hot_off)?;
    let e_a = isentrope(cfg.stroke_mode, &cfg.tls_cold, &cfg.tls_hot, &cold_off)?;
    let points = CyclePointEnergies {
        e_a,
        e_a_prime: e_a,
        e_b: hot.coupled_energy(),
        e_b_prime: hot_off.energy,
        e_c,
        e_c_prime: e_c,
        e_d: cold.coupled_energy(),
        e_d_prime: cold_off.energy,
    };
    Ok(Ledger {
        points,
        hot: hot_off,
        cold: cold_off,
    })
}

fn finish(ledger: Ledger, converged: bool) -> CycleResult {
    let p = &ledger.points;
    let w_net_on = ledger.hot.work
        + (p.e_c - p.e_b_prime)
        + (p.e_c_prime - p.e_c)
        + ledger.cold.work
        + (p.e_a - p.e_d_prime)
        + (p.e_a_prime - p.e_a);
    let q_hot = (p.e_b - p.e_a_prime) + ledger.hot.heat;
    let q_cold = (p.e_d - p.e_c_prime) + ledger.cold.heat;
    let mut result = CycleResult {
        points: ledger.points,
        w_net_on,
        w_out: -w_net_on,
        q_hot,
        q_cold,
        w_decouple_hot: ledger.hot.work,
        w_decouple_cold: ledger.cold.work,
        q_decouple_hot: ledger.hot.heat,
        q_decouple_cold: ledger.cold.heat,
        eta: None,
        mode: OperatingMode::Neither,
        converged,
    };
    result.eta = efficiency(&result);
    result.mode = classify(&result);
    result
}

fn weak_cycle(cfg: &CycleConfig, stroke: StrokeMode) -> Result<CycleResult> {
    cfg.validate()?;
    let cfg = CycleConfig {
        stroke_mode: stroke,
        ..*cfg
    };
    let hot = weak_isochore(&cfg.tls_hot, cfg.hot.beta)?;
    let cold = weak_isochore(&cfg.tls_cold, cfg.cold.beta)?;
    Ok(finish(
        assemble(&cfg, &hot, &cold, DecouplingMode::Instantaneous)?,
        true,
    ))
}

/// Weak-coupling cycle with adiabatic isentropes. The configured coupling
/// and stroke modes are ignored.
pub fn weak_cycle_adiabatic(cfg: &CycleConfig) -> Result<CycleResult> {
    weak_cycle(cfg, StrokeMode::Adiabatic)
}

/// Weak-coupling cycle with sudden isentropes. The configured coupling and
/// stroke modes are ignored.
pub fn weak_cycle_sudden(cfg: &CycleConfig) -> Result<CycleResult> {
    weak_cycle(cfg, StrokeMode::Sudden)
}

fn rc_equilibria(cfg: &CycleConfig, n: usize) -> Result<(IsochoreEquilibrium, IsochoreEquilibrium)> {
    Ok((
        rc_isochore(&cfg.hot, &cfg.tls_hot, n)?,
        rc_isochore(&cfg.cold, &cfg.tls_cold, n)?,
    ))
}

/// Point energies and the truncation verdict for the strong-coupling cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongPoints {
    pub points: CyclePointEnergies,
    pub converged: bool,
    /// Largest change of any point energy between n and the reference
    /// truncation, relative to the largest point energy.
    pub truncation_delta: f64,
}

fn strong_ledger(cfg: &CycleConfig) -> Result<(Ledger, bool, f64)> {
    cfg.validate()?;
    let decoupling = cfg.effective_decoupling();
    let (hot, cold) = rc_equilibria(cfg, cfg.n)?;
    let ledger = assemble(cfg, &hot, &cold, decoupling)?;

    let n_ref = cfg.n.saturating_sub(TRUNCATION_STEP).max(1);
    let delta = if n_ref == cfg.n {
        // a single Fock level cannot be compared against anything smaller
        if cfg.hot.alpha == 0.0 && cfg.cold.alpha == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        let (hot_ref, cold_ref) = rc_equilibria(cfg, n_ref)?;
        let reference = assemble(cfg, &hot_ref, &cold_ref, decoupling)?;
        let scale = ledger.points.max_abs().max(f64::MIN_POSITIVE);
        ledger.points.max_abs_diff(&reference.points) / scale
    };
    Ok((ledger, delta <= TRUNCATION_TOL, delta))
}

/// Point energies of the reaction-coordinate cycle, with a truncation check
/// against n - 5 Fock levels.
pub fn strong_point_energies(cfg: &CycleConfig) -> Result<StrongPoints> {
    let (ledger, converged, truncation_delta) = strong_ledger(cfg)?;
    Ok(StrongPoints {
        points: ledger.points,
        converged,
        truncation_delta,
    })
}

/// Strong-coupling cycle via the reaction-coordinate mapping.
pub fn strong_cycle(cfg: &CycleConfig) -> Result<CycleResult> {
    let (ledger, converged, _) = strong_ledger(cfg)?;
    Ok(finish(ledger, converged))
}

/// Work (free-energy change) and heat of switching off one reservoir
/// interaction quasi-statically.
pub fn adiabatic_decoupling_terms(cfg: &CycleConfig, which: Reservoir) -> Result<(f64, f64)> {
    cfg.validate()?;
    let (spec, tls) = cfg.side(which);
    let eq = rc_isochore(spec, tls, cfg.n)?;
    let off = decouple(&eq, DecouplingMode::AdiabaticDecoupling);
    Ok((off.work, off.heat))
}

/// Like [`run`] but skips the second diagonalization at n - 5; `converged`
/// is reported as true. Used when the caller studies truncation itself.
pub fn run_unchecked(cfg: &CycleConfig) -> Result<CycleResult> {
    match cfg.coupling_model {
        CouplingModel::Weak => weak_cycle(cfg, cfg.stroke_mode),
        CouplingModel::RcStrong => {
            cfg.validate()?;
            let (hot, cold) = rc_equilibria(cfg, cfg.n)?;
            let ledger = assemble(cfg, &hot, &cold, cfg.effective_decoupling())?;
            Ok(finish(ledger, true))
        }
    }
}

/// Dispatches on the configured coupling model and stroke mode.
pub fn run(cfg: &CycleConfig) -> Result<CycleResult> {
    match cfg.coupling_model {
        CouplingModel::Weak => weak_cycle(cfg, cfg.stroke_mode),
        CouplingModel::RcStrong => strong_cycle(cfg),
    }
}

pub fn classify(result: &CycleResult) -> OperatingMode {
    if result.w_out > CLASSIFY_TOL && result.q_hot > CLASSIFY_TOL {
        OperatingMode::Engine
    } else if result.w_out < -CLASSIFY_TOL && result.q_cold > CLASSIFY_TOL {
        OperatingMode::Refrigerator
    } else {
        OperatingMode::Neither
    }
}

/// w_out / q_hot, undefined unless heat flows in from the hot side.
pub fn efficiency(result: &CycleResult) -> Option<f64> {
    (result.q_hot > CLASSIFY_TOL).then(|| result.w_out / result.q_hot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(eps_h: f64, alpha: f64) -> CycleConfig {
        CycleConfig::new(
            ReservoirSpec::new(1.0, alpha, 2.0).unwrap(),
            ReservoirSpec::new(2.5, alpha, 2.0).unwrap(),
            TlsParams::new(eps_h, 1.0),
            TlsParams::new(1.0, 1.0),
        )
    }

    fn weak_closed_form(cfg: &CycleConfig) -> (f64, f64) {
        let mh = splitting(&cfg.tls_hot);
        let mc = splitting(&cfg.tls_cold);
        let th = (cfg.hot.beta * mh / 2.0).tanh();
        let tc = (cfg.cold.beta * mc / 2.0).tanh();
        (0.5 * (mh - mc) * (tc - th), 0.5 * mh * (tc - th))
    }

    #[test]
    fn weak_adiabatic_matches_tanh_forms() {
        for eps in [0.5, 1.3, 2.0, 3.0, 4.0] {
            let cfg = reference(eps, 0.0);
            let r = weak_cycle_adiabatic(&cfg).unwrap();
            let (w, q) = weak_closed_form(&cfg);
            assert!((r.w_out - w).abs() < 1e-14, "eps {eps}");
            assert!((r.q_hot - q).abs() < 1e-14);
            assert!(r.points.loop_residual().abs() < 1e-14);
            assert!(r.first_law_residual().abs() < 1e-14);
            assert_eq!(r.w_decouple_hot, 0.0);
            assert_eq!(r.w_decouple_cold, 0.0);
        }
    }

    #[test]
    fn weak_adiabatic_at_reference_point() {
        let r = weak_cycle_adiabatic(&reference(2.0, 0.005)).unwrap();
        assert!((r.w_out - 0.056_083_417_368).abs() < 1e-11);
        assert!((r.q_hot - 0.152_589_474_897).abs() < 1e-11);
        assert!((r.eta.unwrap() - (1.0 - 0.4f64.sqrt())).abs() < 1e-9);
        assert_eq!(r.mode, OperatingMode::Engine);
    }

    #[test]
    fn weak_zero_crossing_and_refrigerator() {
        // mu_h beta_h = mu_c beta_c
        let mu_h = 2.5 * 2f64.sqrt();
        let eps = (mu_h * mu_h - 1.0).sqrt();
        let r = weak_cycle_adiabatic(&reference(eps, 0.0)).unwrap();
        assert!(r.w_out.abs() < 1e-10 && r.q_hot.abs() < 1e-10);
        assert_eq!(r.mode, OperatingMode::Neither);
        assert_eq!(r.eta, None);

        let r = weak_cycle_adiabatic(&reference(eps + 0.5, 0.0)).unwrap();
        assert_eq!(r.mode, OperatingMode::Refrigerator);
    }

    #[test]
    fn weak_sudden_trivial_cycles() {
        let mut cfg = reference(1.0, 0.0);
        let r = weak_cycle_sudden(&cfg).unwrap();
        assert!(r.w_net_on.abs() < 1e-15);

        cfg.cold.beta = cfg.hot.beta * (1.0 + 1e-15);
        let r = weak_cycle_sudden(&cfg).unwrap();
        assert!(r.w_out.abs() < 1e-14 && r.q_hot.abs() < 1e-14 && r.q_cold.abs() < 1e-14);
    }

    #[test]
    fn strong_decoupled_limit_matches_weak() {
        for stroke in [StrokeMode::Adiabatic, StrokeMode::Sudden] {
            for dec in [DecouplingMode::Instantaneous, DecouplingMode::AdiabaticDecoupling] {
                let cfg = reference(2.0, 0.0).with_n(10).with_modes(CouplingModel::RcStrong, stroke, dec);
                let strong = strong_cycle(&cfg).unwrap();
                let weak = weak_cycle(&cfg, stroke).unwrap();
                assert!(strong.points.max_abs_diff(&weak.points) < 1e-8);
                assert!((strong.w_out - weak.w_out).abs() < 1e-8);
                assert!(strong.converged);
            }
        }
    }

    #[test]
    fn coupling_steps_are_free() {
        let cfg = reference(2.0, 0.005).with_n(20);
        let p = strong_point_energies(&cfg).unwrap().points;
        assert_eq!(p.e_c_prime, p.e_c);
        assert_eq!(p.e_a_prime, p.e_a);
        assert!(p.e_b_prime - p.e_b > 0.0);
    }

    #[test]
    fn decoupling_split_is_consistent() {
        let cfg = reference(2.0, 0.005).with_n(20);
        let eq = rc_isochore(&cfg.hot, &cfg.tls_hot, cfg.n).unwrap();
        let (w, q) = adiabatic_decoupling_terms(&cfg, Reservoir::Hot).unwrap();
        assert!((w + q - (eq.bare_energy - eq.coupled_energy())).abs() < 1e-10);
        assert!(w < eq.interaction_cost);

        let zero = reference(2.0, 0.0).with_n(20);
        let (w0, q0) = adiabatic_decoupling_terms(&zero, Reservoir::Cold).unwrap();
        assert!(w0.abs() < 1e-12 && q0.abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = reference(2.0, 0.1);
        cfg.cold.beta = 0.5;
        assert!(matches!(run(&cfg), Err(Error::InvalidParameter(_))));
        let cfg = CycleConfig {
            tls_hot: TlsParams::new(0.0, 0.0),
            ..reference(2.0, 0.1)
        };
        assert!(matches!(run(&cfg), Err(Error::DegenerateSplitting)));
    }

    #[test]
    fn classify_boundaries() {
        let mut r = weak_cycle_adiabatic(&reference(2.0, 0.0)).unwrap();
        r.w_out = 0.0;
        r.q_hot = 0.0;
        r.q_cold = 0.0;
        assert_eq!(classify(&r), OperatingMode::Neither);
        assert_eq!(efficiency(&r), None);
    }
}
