//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rcotto::linops::{hermitian_eig, matrix_function, Operator};
use rcotto::model::{mapped_hamiltonian, rc_mapping, splitting, tls_hamiltonian};
use rcotto::otto::{self, CouplingModel, CycleConfig, CycleResult, DecouplingMode, OperatingMode, StrokeMode};
use rcotto::sweep::{self, SweepParam, SweepSpec, Variant};
use rcotto::thermo::{gibbs_state, ln_partition, truncated_harmonic_ln_partition};
use rcotto::{ReservoirSpec, TlsParams};

const WEAK: Variant = Variant {
    coupling: CouplingModel::Weak,
    stroke: StrokeMode::Adiabatic,
    decoupling: DecouplingMode::Instantaneous,
};
const STRONG_INST: Variant = Variant {
    coupling: CouplingModel::RcStrong,
    stroke: StrokeMode::Adiabatic,
    decoupling: DecouplingMode::Instantaneous,
};
const STRONG_ADEC: Variant = Variant {
    coupling: CouplingModel::RcStrong,
    stroke: StrokeMode::Adiabatic,
    decoupling: DecouplingMode::AdiabaticDecoupling,
};

fn config(eps_h: f64, alpha: f64, beta_c: f64) -> CycleConfig {
    CycleConfig::new(
        ReservoirSpec::new(1.0, alpha, 2.0).unwrap(),
        ReservoirSpec::new(beta_c, alpha, 2.0).unwrap(),
        TlsParams::new(eps_h, 1.0),
        TlsParams::new(1.0, 1.0),
    )
}

fn reference(eps_h: f64) -> CycleConfig {
    config(eps_h, 0.005, 2.5)
}

fn carnot(cfg: &CycleConfig) -> f64 {
    1.0 - cfg.hot.beta / cfg.cold.beta
}

/// Every cycle evaluated by the suite, kept for the cross-cutting checks.
#[derive(Default)]
struct Ledger {
    cycles: Vec<(CycleConfig, CycleResult)>,
}

impl Ledger {
    fn run(&mut self, cfg: &CycleConfig) -> CycleResult {
        let r = otto::run(cfg).expect("cycle evaluation");
        self.cycles.push((*cfg, r.clone()));
        r
    }
}

struct Sweep {
    grid: Vec<f64>,
    weak: Vec<CycleResult>,
    inst: Vec<CycleResult>,
    adec: Vec<CycleResult>,
}

fn bias_sweep(ledger: &mut Ledger) -> Sweep {
    let spec = SweepSpec {
        param: SweepParam::EpsilonH,
        from: 0.5,
        to: 4.0,
        steps: 30,
        base: reference(0.5),
        variants: vec![WEAK, STRONG_INST, STRONG_ADEC],
    };
    let grid = spec.grid();
    let rows = sweep::sweep_results(&spec).expect("bias sweep");
    let mut by_variant = rows.chunks(grid.len()).map(|chunk| {
        chunk.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>()
    });
    let weak = by_variant.next().unwrap();
    let inst = by_variant.next().unwrap();
    let adec = by_variant.next().unwrap();
    for (variant, results) in [(WEAK, &weak), (STRONG_INST, &inst), (STRONG_ADEC, &adec)] {
        for (x, r) in grid.iter().zip(results.iter()) {
            ledger.cycles.push((variant.apply(&SweepParam::EpsilonH.apply(&spec.base, *x)), r.clone()));
        }
    }
    Sweep { grid, weak, inst, adec }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn weak_closed_forms(ledger: &mut Ledger) -> Outcome {
    let r = ledger.run(&reference(2.0).with_modes(CouplingModel::Weak, StrokeMode::Adiabatic, DecouplingMode::Instantaneous));
    let eta = r.eta.unwrap_or(f64::NAN);
    let eta_ref = 1.0 - (2.0f64 / 5.0).sqrt();
    let pass = (r.w_out - 0.056089).abs() <= 1e-5
        && (r.q_hot - 0.152591).abs() <= 1e-5
        && (eta - eta_ref).abs() <= 1e-9;
    outcome(
        pass,
        format!("W_out = {:.9}, Q_hot = {:.9}, eta - (1 - sqrt(2/5)) = {:.1e}", r.w_out, r.q_hot, eta - eta_ref),
    )
}

fn zero_crossing(ledger: &mut Ledger) -> Outcome {
    // mu_h beta_h = mu_c beta_c with mu_c = sqrt(2), beta_c / beta_h = 2.5
    let eps_star = (12.5f64 - 1.0).sqrt();
    let cfg = reference(eps_star).with_modes(CouplingModel::Weak, StrokeMode::Adiabatic, DecouplingMode::Instantaneous);
    let mu_h = splitting(&cfg.tls_hot);
    let mu_c = splitting(&cfg.tls_cold);
    let r = ledger.run(&cfg);
    let pass = r.w_out.abs() < 1e-10 && r.q_hot.abs() < 1e-10;
    outcome(
        pass,
        format!(
            "eps_h = {eps_star:.6}, mu_h beta_h - mu_c beta_c = {:.1e}, W_out = {:.1e}, Q_hot = {:.1e}",
            mu_h * cfg.hot.beta - mu_c * cfg.cold.beta,
            r.w_out,
            r.q_hot
        ),
    )
}

fn weak_limit_recovery(ledger: &mut Ledger) -> Outcome {
    let weak = ledger.run(&reference(2.0).with_modes(CouplingModel::Weak, StrokeMode::Adiabatic, DecouplingMode::Instantaneous));
    let eta_weak = weak.eta.unwrap();
    let mut gaps = Vec::new();
    for alpha in [1e-3, 1e-4, 1e-5] {
        let r = ledger.run(&config(2.0, alpha, 2.5));
        let eta = r.eta.unwrap_or(f64::NAN);
        gaps.push(((eta - eta_weak) / eta_weak).abs());
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let pass = monotone && gaps[2] <= 0.01;
    outcome(
        pass,
        format!(
            "relative eta gap at alpha = 1e-3, 1e-4, 1e-5: {:.2e}, {:.2e}, {:.2e}",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn ordering(s: &Sweep) -> Outcome {
    let mut engine_points = 0;
    let mut bad = Vec::new();
    for (i, x) in s.grid.iter().enumerate() {
        let engine = s.weak[i].mode == OperatingMode::Engine || s.inst[i].mode == OperatingMode::Engine;
        if engine {
            engine_points += 1;
            if s.inst[i].w_out >= s.weak[i].w_out {
                bad.push(format!("strong >= weak at eps_h = {x:.3}"));
            }
        }
        if s.adec[i].w_out < s.inst[i].w_out {
            bad.push(format!("adiabatic < instantaneous decoupling at eps_h = {x:.3}"));
        }
    }
    let pass = bad.is_empty() && engine_points > 0;
    outcome(
        pass,
        if pass {
            format!("{engine_points} engine points, {} grid points", s.grid.len())
        } else {
            bad.join("; ")
        },
    )
}

fn decoupling_cost_sign(s: &Sweep) -> Outcome {
    let min_hot = s.inst.iter().map(|r| r.w_decouple_hot).fold(f64::INFINITY, f64::min);
    let min_cold = s.inst.iter().map(|r| r.w_decouple_cold).fold(f64::INFINITY, f64::min);
    outcome(
        min_hot >= 0.0 && min_cold >= 0.0,
        format!("min w_decouple: hot {min_hot:.6}, cold {min_cold:.6}"),
    )
}

fn carnot_bound(ledger: &Ledger) -> Outcome {
    let mut engines = 0;
    let mut worst = f64::NEG_INFINITY;
    for (cfg, r) in &ledger.cycles {
        if r.mode == OperatingMode::Engine {
            engines += 1;
            let eta = r.eta.expect("engine has an efficiency");
            worst = worst.max(eta - carnot(cfg));
        }
    }
    outcome(
        engines > 0 && worst <= 1e-9,
        format!("{engines} engine-mode cycles, max eta - eta_Carnot = {worst:.4}"),
    )
}

fn neither_regime(s: &Sweep) -> Outcome {
    let modes: Vec<OperatingMode> = s.inst.iter().map(|r| r.mode).collect();
    let last_engine = modes.iter().rposition(|m| *m == OperatingMode::Engine);
    let first_fridge = modes.iter().position(|m| *m == OperatingMode::Refrigerator);
    let between: Vec<f64> = match (last_engine, first_fridge) {
        (Some(e), Some(f)) if e < f => (e + 1..f)
            .filter(|&i| modes[i] == OperatingMode::Neither)
            .map(|i| s.grid[i])
            .collect(),
        _ => Vec::new(),
    };
    let pass = !between.is_empty();
    outcome(
        pass,
        match between.as_slice() {
            [] => "no Neither point between engine and refrigerator regions".to_string(),
            [first, .., last] => format!("{} Neither points, eps_h in [{first:.3}, {last:.3}]", between.len()),
            [only] => format!("1 Neither point at eps_h = {only:.3}"),
        },
    )
}

fn quantum_friction(ledger: &mut Ledger) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let steps = 30;
    for i in 0..steps {
        let eps = 0.5 + 3.5 * i as f64 / (steps - 1) as f64;
        let cfg = config(eps, 0.1, 2.5);
        let adiabatic = ledger.run(&cfg.with_modes(CouplingModel::Weak, StrokeMode::Adiabatic, DecouplingMode::Instantaneous));
        let sudden = ledger.run(&cfg.with_modes(CouplingModel::Weak, StrokeMode::Sudden, DecouplingMode::Instantaneous));
        worst = worst.max(sudden.w_out - adiabatic.w_out);
    }
    outcome(
        worst < 0.0,
        format!("max (W_sudden - W_adiabatic) over {steps} points = {worst:.3e}"),
    )
}

/// Full-cycle work and hot-side heat for adiabatic decoupling, written
/// directly in terms of Gibbs states and partition functions.
fn closed_form_adiabatic_decoupling(cfg: &CycleConfig) -> (f64, f64) {
    let hb = tls_hamiltonian(&cfg.tls_hot);
    let hc = tls_hamiltonian(&cfg.tls_cold);
    let (mu_h, mu_c) = (splitting(&cfg.tls_hot), splitting(&cfg.tls_cold));
    let (beta_h, beta_c) = (cfg.hot.beta, cfg.cold.beta);
    let e_h = gibbs_state(&hb, beta_h).unwrap().rho.trace_product(&hb).re;
    let e_c = gibbs_state(&hc, beta_c).unwrap().rho.trace_product(&hc).re;

    // ln Z_joint - ln Z_R collapses to the enlarged system against a bare
    // truncated oscillator; the residual bath cancels.
    let free = |spec: &ReservoirSpec, tls: &TlsParams, h: &Operator, beta: f64| {
        let m = rc_mapping(spec, tls, cfg.n).unwrap();
        let joint = ln_partition(&mapped_hamiltonian(tls, &m).unwrap(), beta).unwrap();
        let bare = ln_partition(h, beta).unwrap();
        let rc = truncated_harmonic_ln_partition(m.omega_rc, beta, cfg.n);
        (joint - bare - rc) / beta
    };
    let df_h = free(&cfg.hot, &cfg.tls_hot, &hb, beta_h);
    let df_c = free(&cfg.cold, &cfg.tls_cold, &hc, beta_c);

    let w = (mu_c / mu_h - 1.0) * e_h + (mu_h / mu_c - 1.0) * e_c + df_h + df_c;
    let q = e_h - (mu_h / mu_c) * e_c - df_h;
    (w, q)
}

fn closed_form_cross_check(ledger: &mut Ledger) -> Outcome {
    let mut worst_w: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for eps in [0.5, 1.25, 2.0, 3.0, 4.0] {
        let cfg = reference(eps).with_modes(CouplingModel::RcStrong, StrokeMode::Adiabatic, DecouplingMode::AdiabaticDecoupling);
        let r = ledger.run(&cfg);
        let (w, q) = closed_form_adiabatic_decoupling(&cfg);
        worst_w = worst_w.max((r.w_net_on - w).abs());
        worst_q = worst_q.max((r.q_hot - q).abs());
    }
    outcome(
        worst_w <= 1e-8 && worst_q <= 1e-8,
        format!("max |dW| = {worst_w:.1e}, max |dQ| = {worst_q:.1e} over 5 points"),
    )
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let a = Operator::from_rows(&rows);
    (&a + &a.adjoint()).scale(0.5)
}

fn frobenius(a: &Operator) -> f64 {
    a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// exp(h) by scaling, a 30-term Taylor series, and repeated squaring.
fn taylor_exp(h: &Operator) -> Operator {
    let mut squarings = 0;
    while frobenius(h) / f64::from(1u32 << squarings) > 0.5 {
        squarings += 1;
    }
    let x = h.scale(1.0 / f64::from(1u32 << squarings));
    let mut term = Operator::identity(h.dim());
    let mut sum = term.clone();
    for k in 1..30 {
        term = term.matmul(&x).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

fn numerical_substrate(ledger: &Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut eig_err: f64 = 0.0;
    for dim in [1, 2, 3, 8, 17, 32, 64, 128] {
        let h = random_hermitian(&mut rng, dim);
        let e = hermitian_eig(&h).unwrap();
        eig_err = eig_err.max(e.reconstruct().max_abs_diff(&h));
    }
    let p = TlsParams::new(2.0, 1.0);
    let m = rc_mapping(&ReservoirSpec::new(1.0, 0.1, 2.0).unwrap(), &p, 30).unwrap();
    let h = mapped_hamiltonian(&p, &m).unwrap();
    eig_err = eig_err.max(hermitian_eig(&h).unwrap().reconstruct().max_abs_diff(&h) / h.max_abs());

    let mut exp_err: f64 = 0.0;
    for _ in 0..20 {
        let a = random_hermitian(&mut rng, 8);
        let h = a.scale(rng.gen_range(0.1..5.0) / frobenius(&a));
        let reference = taylor_exp(&h);
        let got = matrix_function(&h, f64::exp).unwrap();
        exp_err = exp_err.max(got.max_abs_diff(&reference) / reference.max_abs());
    }

    let closure = ledger
        .cycles
        .iter()
        .map(|(_, r)| r.points.loop_residual().abs().max(r.first_law_residual().abs()))
        .fold(0.0, f64::max);

    let mut sets = Vec::new();
    for eps in [0.5, 2.0, 4.0] {
        sets.push(reference(eps));
        sets.push(config(eps, 0.1, 2.5));
        sets.push(config(eps, 0.1, 2.5).with_modes(CouplingModel::RcStrong, StrokeMode::Sudden, DecouplingMode::Instantaneous));
        sets.push(config(eps, 0.001, 1.75).with_modes(CouplingModel::RcStrong, StrokeMode::Sudden, DecouplingMode::Instantaneous));
    }
    sets.push(config(2.0, 0.05, 2.5).with_modes(CouplingModel::RcStrong, StrokeMode::Adiabatic, DecouplingMode::AdiabaticDecoupling));
    let rel_delta = sets
        .iter()
        .map(|cfg| {
            sweep::run_converge(cfg, 30).unwrap().last().and_then(|r| r.rel_delta).unwrap()
        })
        .fold(0.0, f64::max);

    let pass = eig_err <= 1e-10 && exp_err <= 1e-10 && closure <= 1e-10 && rel_delta <= 1e-6;
    outcome(
        pass,
        format!(
            "eig {eig_err:.1e}, exp {exp_err:.1e}, closure {closure:.1e} over {} cycles, rel_delta(n=30) {rel_delta:.1e} over {} sets",
            ledger.cycles.len(),
            sets.len()
        ),
    )
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    let mut ledger = Ledger::default();
    let mut lines = Vec::new();

    let (o, t) = timed(|| weak_closed_forms(&mut ledger));
    lines.push((1, "weak-coupling closed forms", o, t));
    let (o, t) = timed(|| zero_crossing(&mut ledger));
    lines.push((2, "zero crossing", o, t));
    let (o, t) = timed(|| weak_limit_recovery(&mut ledger));
    lines.push((3, "alpha -> 0 recovery", o, t));

    let start = Instant::now();
    let sweep = bias_sweep(&mut ledger);
    let sweep_time = start.elapsed();
    let (o, t) = timed(|| ordering(&sweep));
    lines.push((4, "strong-coupling ordering", o, t + sweep_time));
    let (o, t) = timed(|| decoupling_cost_sign(&sweep));
    lines.push((5, "decoupling-cost sign", o, t));
    let (o, t) = timed(|| neither_regime(&sweep));
    lines.push((7, "neither regime", o, t));
    let (o, t) = timed(|| quantum_friction(&mut ledger));
    lines.push((8, "quantum friction", o, t));
    let (o, t) = timed(|| closed_form_cross_check(&mut ledger));
    lines.push((9, "adiabatic-decoupling cross-check", o, t));
    let (o, t) = timed(|| carnot_bound(&ledger));
    lines.push((6, "Carnot bound", o, t));
    let (o, t) = timed(|| numerical_substrate(&ledger));
    lines.push((10, "numerical substrate", o, t));

    lines.sort_by_key(|(id, ..)| *id);
    let mut failed = 0;
    for (id, name, o, t) in &lines {
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {:<4} {name}: {} [{:.2}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
