// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use emech::analysis::{self, grid, WIGNER_CONVENTION};
use emech::dynamics::{IntegratorSettings, StationarityCriterion};
use emech::model::{load_config, polariton, preset, Branch, Preset};
use emech::protocols::{
    auto_drive_amplitude, count_local_minima, cooling_sweep, detuning_grid, ghz_scan,
    prepare_fock, solve_resonance, CoolingConfig, CoolingPrestage, FockConfig, FockStart, GhzConfig,
    SteadyStateMethod, SwapTiming,
};
use emech::{ModeLayout, QState};

use crate::output::{num, sha256_hex, Csv, Run};
use crate::{BranchArg, CliError, Dims, Outcome, OutputArgs, Range, Source};

/// Relative prominence for counting minima of a cooling curve.
const MINIMUM_PROMINENCE: f64 = 0.05;

fn load(source: &Source) -> Result<Preset, CliError> {
    let mut p = match (&source.preset, &source.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            if !path.exists() {
                return Err(CliError::usage(format!("config file {} not found", path.display())));
            }
            load_config(path)?
        }
        _ => return Err(CliError::usage("give --preset or --config")),
    };
    if source.lossless {
        p.params = p.params.lossless();
    }
    Ok(p)
}

fn hz(x: f64) -> f64 {
    x / TAU
}

fn integrator_json(s: &IntegratorSettings) -> Value {
    serde_json::to_value(s).unwrap_or(Value::Null)
}

// ------------------------------------------------------------------ params

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[command(flatten)]
    source: Source,
    /// Operating ζ (default: the set's own ζ).
    #[arg(long)]
    zeta: Option<f64>,
    /// Drive frequency in Hz for the rotating-frame polariton rows
    /// (default: the configured drive, else none).
    #[arg(long)]
    omega_l_hz: Option<f64>,
    /// Print JSON instead of the table.
    #[arg(long)]
    json: bool,
    /// Also write params.json and a manifest into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn params(a: &ParamsArgs) -> Result<Outcome, CliError> {
    let pr = load(&a.source)?;
    let p = a.zeta.map_or_else(|| pr.params.clone(), |z| pr.params.with_zeta(z));
    p.validate()?;
    let d = p.derive();
    // Sets whose polaritons never split by Ω_m have no Fock operating point.
    let res = match solve_resonance(&p) {
        Ok(r) => Some(r),
        Err(emech::Error::Resonance(msg)) => {
            eprintln!("note: no polariton–mechanics resonance ({msg})");
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(r) = res.filter(|r| !r.exact) {
        eprintln!(
            "note: polariton splitting never reaches Ω_m; resonance rows use the minimum ({:.3e} relative mismatch)",
            r.mismatch
        );
    }
    let at_res = res.map(|r| polariton(&p.with_zeta(r.zeta), 0.0)).transpose()?;
    let omega_l = a
        .omega_l_hz
        .map(|f| TAU * f)
        .or(p.drive.map(|dr| dr.omega_l));
    let at_drive = omega_l.map(|w| polariton(&p, w)).transpose()?;

    let value = json!({
        "preset": pr.name,
        "zeta_span": pr.zeta_span,
        "params": p,
        "derived": d,
        "resonance": res,
        "polariton_at_resonance": at_res,
        "omega_l": omega_l,
        "polariton_at_drive": at_drive,
    });
    if a.json {
        println!("{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::usage(e.to_string()))?);
    } else {
        let row = |name: &str, v: String| println!("  {name:<28} {v}");
        println!("system ({}, ζ = {})", pr.name, p.zeta);
        row("E_C/2π [Hz]", format!("{:.6e}", hz(p.e_c)));
        row("g0/2π [Hz]", format!("{:.6e}", hz(p.g0)));
        row("n_ac", format!("{:.6e}", p.n_ac));
        row("Omega_m/2π [Hz]", format!("{:.6e}", hz(p.omega_m)));
        row("omega_c/2π [Hz]", format!("{:.6e}", hz(p.omega_c)));
        row("kappa_c/2π [Hz]", format!("{:.6e}", hz(p.kappa_c)));
        row("gamma_t/2π [Hz]", format!("{:.6e}", hz(p.gamma_t)));
        row("gamma_phi/2π [Hz]", format!("{:.6e}", hz(p.gamma_phi)));
        row("Q_m", format!("{:.6e}", p.q_m));
        row("T [K]", format!("{:.6e}", p.temperature));
        println!("derived");
        row("omega_t/2π [Hz]", format!("{:.6e}", hz(d.omega_t)));
        row("lambda/2π [Hz]", format!("{:.6e}", hz(d.lambda)));
        row("chi [rad/s]", format!("{:.6e}", d.chi));
        row("g_t/2π [Hz]", format!("{:.6e}", hz(d.g_t)));
        row("g_tc/2π [Hz]", format!("{:.6e}", hz(d.g_tc)));
        row("g_c/2π [Hz]", format!("{:.6e}", hz(d.g_c)));
        row("Gamma_m/2π [Hz]", format!("{:.6e}", hz(d.gamma_m)));
        row("n_thermal", format!("{:.6}", d.n_bar));
        row("Delta/2π [Hz]", format!("{:.6e}", hz(d.delta)));
        if let (Some(res), Some(at_res)) = (res, &at_res) {
            println!(
                "polariton at resonance (ζ = {:.6}{})",
                res.zeta,
                if res.exact { "" } else { ", minimum splitting" }
            );
            row("omega_+/2π [Hz]", format!("{:.6e}", hz(at_res.omega_plus)));
            row("omega_-/2π [Hz]", format!("{:.6e}", hz(at_res.omega_minus)));
            row("alpha_+, alpha_-", format!("{:.6}, {:.6}", at_res.alpha_plus, at_res.alpha_minus));
            row("|G|/2π [Hz]", format!("{:.6e}", hz(at_res.g_threebody.abs())));
            row("splitting mismatch", format!("{:.3e}", res.mismatch));
        } else {
            println!("polariton at resonance: none");
        }
        if let (Some(w), Some(pd)) = (omega_l, &at_drive) {
            println!("polariton at omega_L/2π = {:.6e} Hz", hz(w));
            row("delta_+/2π [Hz]", format!("{:.6e}", hz(pd.delta_plus)));
            row("delta_-/2π [Hz]", format!("{:.6e}", hz(pd.delta_minus)));
            row("g_+/2π, g_-/2π [Hz]", format!("{:.6e}, {:.6e}", hz(pd.g_plus), hz(pd.g_minus)));
        }
    }
    if let Some(dir) = &a.out {
        let mut run = Run::start(dir, "params", false)?;
        run.write_json("params.json", &value)?;
        run.finish(&pr.name, &value, vec![], Value::Null, "none")?;
    }
    Ok(Outcome::default())
}

// -------------------------------------------------------------------- cool

#[derive(Args, Debug)]
pub struct CoolArgs {
    #[command(flatten)]
    source: Source,
    /// Driven polariton.
    #[arg(long, value_enum, default_value = "plus")]
    branch: BranchArg,
    /// Detunings from the driven polariton, in units of Ω_m.
    #[arg(long, default_value = "-3:1:81", allow_hyphen_values = true)]
    sweep: Range,
    /// Truncations t,c,m.
    #[arg(long, default_value = "2,2,30")]
    dims: Dims,
    /// Operating ζ (default: the set's ζ plus its span).
    #[arg(long)]
    zeta: Option<f64>,
    /// Override the bath occupation n̄.
    #[arg(long)]
    n_bar: Option<f64>,
    /// Drive amplitude in rad/s (default: automatic).
    #[arg(long, conflicts_with = "population")]
    e_l_rad: Option<f64>,
    /// Target steady population of the driven polariton for the automatic
    /// drive amplitude.
    #[arg(long)]
    population: Option<f64>,
    /// Evolve from the thermal state for at most this long instead of
    /// solving for the steady state directly.
    #[arg(long)]
    evolve_t_max_s: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

fn branch_of(b: BranchArg) -> Branch {
    match b {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    }
}

pub fn cool(a: &CoolArgs) -> Result<Outcome, CliError> {
    let pr = load(&a.source)?;
    let mut p = pr.params.with_zeta(a.zeta.unwrap_or(pr.params.zeta + pr.zeta_span));
    if let Some(n) = a.n_bar {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(CliError::usage(format!("--n-bar must be ≥ 0, got {n}")));
        }
        p = p.with_bath_occupation(n);
    }
    p.validate()?;
    let branch = branch_of(a.branch);
    let e_l = match (a.e_l_rad, a.population) {
        (Some(e), _) => e,
        (None, pop) => auto_drive_amplitude(&p, branch, pop.unwrap_or(emech::protocols::DEFAULT_POLARITON_POPULATION))?,
    };
    let settings = IntegratorSettings::default();
    let (method, rule) = match a.evolve_t_max_s {
        None => (
            SteadyStateMethod::Direct,
            "direct: Liouvillian null space by sparse LU with the trace constraint".to_string(),
        ),
        Some(t_max) => {
            let criterion = StationarityCriterion {
                window: t_max / 20.0,
                samples: 20,
                rel_tol: 1e-3,
                abs_tol: 1e-4,
                t_max,
            };
            let rule = format!(
                "evolve: window means of n_mech over {:.3e} s windows agree within rel 1e-3 + abs 1e-4; t_max {:.3e} s",
                criterion.window, t_max
            );
            (SteadyStateMethod::Evolve { criterion, settings }, rule)
        }
    };
    let Dims(t, c, m) = a.dims;
    let layout = ModeLayout::standard(t, c, m)?;
    let grid = detuning_grid(p.omega_m, a.sweep.lo, a.sweep.hi, a.sweep.n)?;

    let config = json!({
        "command": "cool",
        "preset": pr.name,
        "params": p,
        "branch": branch,
        "dims": [t, c, m],
        "sweep": {"lo": a.sweep.lo, "hi": a.sweep.hi, "n": a.sweep.n, "unit": "Omega_m"},
        "e_l_rad_s": e_l,
        "method": method,
    });
    let mut run = Run::start(&a.output.out, "cool", a.output.verify)?;
    let cfg = CoolingConfig {
        e_l: Some(e_l),
        method,
    };
    let r = cooling_sweep(&p, branch, &grid, &layout, &cfg)?;

    let mut csv = Csv::new(&["delta_rad_s", "delta_over_omega_m", "n_final", "converged"]);
    for k in 0..r.len() {
        csv.row(&[
            num(r.detunings[k]),
            num(r.detunings[k] / r.omega_m),
            num(r.n_final[k]),
            r.converged[k].to_string(),
        ]);
    }
    run.write("cooling.csv", &csv.into_bytes())?;
    let optimum = r.optimum().map(|(k, v)| json!({"delta_over_omega_m": r.detunings[k] / r.omega_m, "n_final": v}));
    let meta = json!({
        "config": config,
        "omega_branch_rad_s": r.omega_branch,
        "n_thermal": r.n_thermal,
        "convergence_rule": rule,
        "integrator": integrator_json(&settings),
        "optimum": optimum,
        "local_minima": count_local_minima(&r.n_final, MINIMUM_PROMINENCE),
        "minimum_prominence": MINIMUM_PROMINENCE,
    });
    run.write_json("cooling.meta.json", &meta)?;
    run.finish(&pr.name, &config, vec![t, c, m], integrator_json(&settings), &rule)?;

    if let Some(o) = optimum {
        println!(
            "optimum n_final = {:.6} at δ = {:.4} Ω_m ({} local minima)",
            o["n_final"], o["delta_over_omega_m"], meta["local_minima"]
        );
    }
    let unconverged = r.converged.iter().filter(|c| !**c).count();
    let mut warnings = Vec::new();
    if unconverged > 0 {
        warnings.push(format!("{unconverged} of {} points did not reach stationarity", r.len()));
    }
    Ok(Outcome { warnings })
}

// -------------------------------------------------------------------- fock

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StartArg {
    Ideal,
    Cooled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimingArg {
    SqrtN,
    Uniform,
}

#[derive(Args, Debug)]
pub struct FockArgs {
    #[command(flatten)]
    source: Source,
    /// Target Fock number.
    #[arg(long)]
    n: usize,
    /// Initial state: ground state or the output of a cooling stage.
    #[arg(long, value_enum, default_value = "ideal")]
    start: StartArg,
    /// Swap durations per round.
    #[arg(long, value_enum, default_value = "sqrt-n")]
    timing: TimingArg,
    /// Truncations t,c,m (default 2,2,n+10).
    #[arg(long)]
    dims: Option<Dims>,
    /// Target polariton population of the cooling stage's automatic drive.
    #[arg(long)]
    population: Option<f64>,
    /// Truncations of the cooling stage.
    #[arg(long, default_value = "2,2,30")]
    cooling_dims: Dims,
    /// Record observables every this many seconds into fock_trajectory.csv.
    #[arg(long)]
    record_every_s: Option<f64>,
    /// Write the final state as JSON.
    #[arg(long)]
    save_state: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn fock(a: &FockArgs) -> Result<Outcome, CliError> {
    let pr = load(&a.source)?;
    if a.n == 0 {
        return Err(CliError::usage("--n 0: the ground state needs no preparation"));
    }
    let mut cfg = FockConfig::new(a.n);
    cfg.dims = a.dims.map(|Dims(t, c, m)| (t, c, m));
    cfg.timing = match a.timing {
        TimingArg::SqrtN => SwapTiming::SqrtN,
        TimingArg::Uniform => SwapTiming::Uniform,
    };
    cfg.settings.record_every = a.record_every_s;
    cfg.settings.validate()?;
    if a.start == StartArg::Cooled {
        let mut pre = CoolingPrestage::for_preset(&pr);
        if let Some(pop) = a.population {
            pre.e_l = Some(auto_drive_amplitude(&pre.params, pre.branch, pop)?);
        }
        let Dims(t, c, m) = a.cooling_dims;
        pre.dims = (t, c, m);
        cfg.start = FockStart::Cooled(Box::new(pre));
    }
    let layout = cfg.layout()?;
    let config = json!({
        "command": "fock",
        "preset": pr.name,
        "params": pr.params,
        "fock": cfg,
    });
    let mut run = Run::start(&a.output.out, "fock", a.output.verify)?;
    let r = prepare_fock(&pr.params, &cfg)?;

    let mut csv = Csv::new(&["stage", "time_s", "fidelity", "n_mech"]);
    for s in &r.stages {
        csv.row(&[s.stage.to_string(), num(s.time), num(s.fidelity), num(s.n_mech)]);
    }
    run.write("fock.csv", &csv.into_bytes())?;
    if let Some(tr) = &r.trajectory {
        let extra: Vec<&str> = tr
            .observables
            .keys()
            .map(|k| k.as_str())
            .filter(|k| !["n_mech", "p_transmon_1", "n_cavity", "trace", "purity"].contains(k))
            .collect();
        let mut header = vec!["t_s", "n_mech", "p_transmon_1", "n_cavity", "trace", "purity"];
        header.extend(&extra);
        let mut csv = Csv::new(&header);
        for (i, t) in tr.times.iter().enumerate() {
            let mut cells = vec![num(*t)];
            for name in &header[1..] {
                cells.push(num(tr.get(name).map_or(f64::NAN, |v| v[i])));
            }
            csv.row(&cells);
        }
        run.write("fock_trajectory.csv", &csv.into_bytes())?;
    }
    let meta = json!({
        "config": config,
        "resonance": r.resonance,
        "g_threebody_rad_s": r.g_threebody,
        "swap_times_s": r.swap_times,
        "cooled_n": r.cooled_n,
        "fidelity": r.fidelity(),
        "warnings": r.warnings,
    });
    run.write_json("fock.meta.json", &meta)?;
    if let Some(path) = &a.save_state {
        let state = r.final_state.as_ref().ok_or_else(|| CliError::numerical("no final state"))?;
        state.save(path)?;
    }
    run.finish(
        &pr.name,
        &config,
        layout.dims().to_vec(),
        integrator_json(&cfg.settings),
        "fixed-duration protocol",
    )?;
    println!("F(|{}⟩) = {:.6}", a.n, r.fidelity());
    Ok(Outcome { warnings: r.warnings })
}

// --------------------------------------------------------------------- ghz

#[derive(Args, Debug)]
pub struct GhzArgs {
    #[command(flatten)]
    source: Source,
    /// Odd pulse counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7")]
    pulses: Vec<usize>,
    /// Operating ζ (default: the set's ζ plus its span).
    #[arg(long)]
    zeta: Option<f64>,
    /// Mechanical truncation (default: enough for the cat amplitude).
    #[arg(long)]
    mech_dim: Option<usize>,
    /// Keep the cavity in the simulation during the displacement steps.
    #[arg(long)]
    include_cavity: bool,
    /// Thermal phonon number of the initial mechanical state.
    #[arg(long, default_value_t = 0.0)]
    initial_occupation: f64,
    /// Write the final state as JSON (single pulse count only).
    #[arg(long)]
    save_state: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn ghz(a: &GhzArgs) -> Result<Outcome, CliError> {
    let pr = load(&a.source)?;
    if a.pulses.is_empty() {
        return Err(CliError::usage("--pulses is empty"));
    }
    if let Some(n) = a.pulses.iter().find(|n| *n % 2 == 0) {
        return Err(CliError::usage(format!(
            "N_p = {n} is even: the symmetric cat needs an odd pulse count \
             (the even case leaves a relative phase θ and is available from the library only)"
        )));
    }
    if a.save_state.is_some() && a.pulses.len() != 1 {
        return Err(CliError::usage("--save-state needs exactly one pulse count"));
    }
    let p = pr.params.with_zeta(a.zeta.unwrap_or(pr.params.zeta + pr.zeta_span));
    let cfg = GhzConfig {
        mech_dim: a.mech_dim,
        include_cavity: a.include_cavity,
        initial_occupation: a.initial_occupation,
        settings: IntegratorSettings::default(),
    };
    let config = json!({
        "command": "ghz",
        "preset": pr.name,
        "params": p,
        "pulses": a.pulses,
        "ghz": cfg,
    });
    let mut run = Run::start(&a.output.out, "ghz", a.output.verify)?;
    let mut results = ghz_scan(&p, &a.pulses, &cfg)?;

    let mut csv = Csv::new(&["N_p", "beta", "P1_sim", "P1_theory", "fid_cat_odd", "fid_ghz"]);
    for r in &results {
        csv.row(&[
            r.n_p.to_string(),
            num(r.beta),
            num(r.p1_sim),
            num(r.p1_theory),
            num(r.fidelity_cat_odd),
            num(r.fidelity_ghz),
        ]);
        println!(
            "N_p = {}: β = {:.4}, P1 = {:.5} (theory {:.5}), F_cat = {:.5}, F_ghz = {:.5}",
            r.n_p, r.beta, r.p1_sim, r.p1_theory, r.fidelity_cat_odd, r.fidelity_ghz
        );
    }
    run.write("ghz.csv", &csv.into_bytes())?;
    let warnings: Vec<String> = results.iter().flat_map(|r| r.warnings.iter().cloned()).collect();
    let dims: Vec<usize> = vec![3, 2, results.iter().map(|r| r.mech_dim).max().unwrap_or(0)];
    let meta = json!({
        "config": config,
        "g_t_rad_s": p.derive().g_t,
        "results": results,
    });
    run.write_json("ghz.meta.json", &meta)?;
    if let Some(path) = &a.save_state {
        let state = results[0].final_state.take().ok_or_else(|| CliError::numerical("no final state"))?;
        state.save(path)?;
    }
    run.finish(&pr.name, &config, dims, integrator_json(&cfg.settings), "fixed-duration protocol")?;
    Ok(Outcome { warnings })
}

// ------------------------------------------------------------------ wigner

#[derive(Args, Debug)]
pub struct WignerArgs {
    /// State file written by --save-state.
    #[arg(long)]
    load_state: PathBuf,
    /// Mode to keep (required for multi-mode states).
    #[arg(long)]
    mode: Option<String>,
    /// Grid for both x and p.
    #[arg(long, default_value = "-4:4:81", allow_hyphen_values = true)]
    grid: Range,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn wigner(a: &WignerArgs) -> Result<Outcome, CliError> {
    let bytes = fs::read(&a.load_state)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.load_state.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::usage("state file is not UTF-8"))?;
    let state = QState::from_json(&text)?;
    let labels = state.layout().labels().to_vec();
    let mode = match (&a.mode, labels.len()) {
        (Some(m), _) => m.clone(),
        (None, 1) => labels[0].clone(),
        (None, _) => {
            return Err(CliError::usage(format!(
                "state has modes {labels:?}; choose one with --mode"
            )))
        }
    };
    let reduced = state.reduce_to(&mode)?;
    let xs = grid(a.grid.lo, a.grid.hi, a.grid.n);
    let map = analysis::wigner(&reduced, &xs, &xs)?;

    let config = json!({
        "command": "wigner",
        "state_sha256": sha256_hex(&bytes),
        "mode": mode,
        "grid": {"lo": a.grid.lo, "hi": a.grid.hi, "n": a.grid.n},
    });
    let mut run = Run::start(&a.output.out, "wigner", a.output.verify)?;
    let mut csv = Csv::new(&["x", "p", "w"]);
    for (i, x) in map.x.iter().enumerate() {
        for (j, p) in map.p.iter().enumerate() {
            csv.row(&[num(*x), num(*p), num(map.values[i][j])]);
        }
    }
    run.write("wigner.csv", &csv.into_bytes())?;
    let meta = json!({
        "config": config,
        "convention": WIGNER_CONVENTION,
        "x": {"lo": a.grid.lo, "hi": a.grid.hi, "n": a.grid.n},
        "p": {"lo": a.grid.lo, "hi": a.grid.hi, "n": a.grid.n},
        "integral": if a.grid.n > 1 { Some(map.integral()) } else { None },
        "min": map.min(),
        "mode_dim": reduced.layout().total(),
    });
    run.write_json("wigner.meta.json", &meta)?;
    run.finish("none", &config, vec![reduced.layout().total()], Value::Null, "none")?;
    println!("W min = {:.6e}", map.min());
    Ok(Outcome::default())
}
