// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::integrator::{
    integrate, IntegratorSettings, IntegratorStats, Method, OdeSystem, Stepper,
};
use super::lindblad::{CollapseSet, LindbladGenerator};
use crate::error::{Error, Result};
use crate::hilbert::{
    norm_sqr, trace_product, DenseMatrix, ModeLayout, QOperator, QState, StateData, TRANSMON,
};

/// Positivity violations down to this value are projected away with a
/// warning; anything lower is an error.
pub const POSITIVITY_PROJECT: f64 = -1e-6;
/// Eigenvalues above this are treated as round-off and left alone.
const POSITIVITY_IGNORE: f64 = -1e-10;
/// Largest tolerated `‖U†U − 1‖` for [`apply_unitary`].
pub const UNITARITY_TOL: f64 = 1e-9;

/// Constant-generator segment of a schedule.
#[derive(Clone, Debug)]
pub struct Segment {
    pub label: String,
    pub hamiltonian: QOperator,
    pub collapses: CollapseSet,
    pub duration: f64,
}

#[derive(Clone, Debug)]
pub enum Step {
    Evolve(Segment),
    /// Instantaneous unitary, e.g. an idealized pulse or a frame change.
    Unitary { label: String, op: QOperator },
}

/// Ordered list of evolution segments and instantaneous unitaries on one
/// layout.
#[derive(Clone, Debug)]
pub struct Schedule {
    layout: ModeLayout,
    steps: Vec<Step>,
}

impl Schedule {
    pub fn new(layout: &ModeLayout) -> Self {
        Self {
            layout: layout.clone(),
            steps: Vec::new(),
        }
    }

    pub fn evolve(
        mut self,
        label: &str,
        hamiltonian: QOperator,
        collapses: CollapseSet,
        duration: f64,
    ) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::Parameter(format!(
                "segment '{label}' duration must be finite and ≥ 0, got {duration}"
            )));
        }
        self.check_layout(label, hamiltonian.layout())?;
        self.check_layout(label, collapses.layout())?;
        self.steps.push(Step::Evolve(Segment {
            label: label.into(),
            hamiltonian,
            collapses,
            duration,
        }));
        Ok(self)
    }

    pub fn unitary(mut self, label: &str, op: QOperator) -> Result<Self> {
        self.check_layout(label, op.layout())?;
        self.steps.push(Step::Unitary {
            label: label.into(),
            op,
        });
        Ok(self)
    }

    fn check_layout(&self, label: &str, l: &ModeLayout) -> Result<()> {
        if l != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "step '{label}' on {l} but schedule on {}",
                self.layout
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn total_duration(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Evolve(seg) => seg.duration,
                Step::Unitary { .. } => 0.0,
            })
            .sum()
    }
}

/// Named Hermitian observables sampled along a trajectory. `trace` and
/// `purity` are always recorded in addition.
#[derive(Clone, Debug)]
pub struct Observables {
    entries: Vec<(String, QOperator)>,
}

impl Observables {
    pub fn none() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// `n_<label>` for every mode, plus `p_transmon_1` when a transmon is
    /// present.
    pub fn standard(layout: &ModeLayout) -> Result<Self> {
        let mut o = Self::none();
        for (m, label) in layout.labels().iter().enumerate() {
            o.push(&format!("n_{label}"), QOperator::number(layout, m)?);
        }
        if let Some(t) = layout.index_of(TRANSMON) {
            o.push("p_transmon_1", QOperator::level_projector(layout, t, 1)?);
        }
        Ok(o)
    }

    pub fn push(&mut self, name: &str, op: QOperator) {
        self.entries.push((name.into(), op));
    }

    pub fn with(mut self, name: &str, op: QOperator) -> Self {
        self.push(name, op);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }
}

/// Sampled observables and the final state of an evolution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: BTreeMap<String, Vec<f64>>,
    #[serde(skip)]
    pub final_state: Option<QState>,
    pub stats: IntegratorStats,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn new(names: &[String]) -> Self {
        let mut observables = BTreeMap::new();
        for n in names {
            observables.insert(n.clone(), Vec::new());
        }
        Self {
            times: Vec::new(),
            observables,
            final_state: None,
            stats: IntegratorStats::default(),
            warnings: Vec::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&QState> {
        self.final_state.as_ref()
    }

    fn merge_stats(&mut self, s: &IntegratorStats) {
        self.stats.accepted += s.accepted;
        self.stats.rejected += s.rejected;
        self.stats.rhs_evals += s.rhs_evals;
    }
}

struct DensitySystem<'a> {
    gen: &'a LindbladGenerator,
    scratch: Vec<C64>,
}

impl OdeSystem for DensitySystem<'_> {
    fn rhs(&mut self, y: &[C64], dy: &mut [C64]) {
        self.gen.apply_hermitian(y, dy, &mut self.scratch);
    }
}

struct VectorSystem<'a> {
    gen: &'a LindbladGenerator,
}

impl OdeSystem for VectorSystem<'_> {
    fn rhs(&mut self, y: &[C64], dy: &mut [C64]) {
        self.gen.apply_vector(y, dy);
    }
}

fn density_trace(y: &[C64], n: usize) -> f64 {
    (0..n).map(|i| y[i * n + i].re).sum()
}

/// Working state of the integrator: a flat vector or a row-major density.
enum Work {
    Vector(Vec<C64>),
    Density(Vec<C64>),
}

impl Work {
    fn from_state(s: &QState) -> Self {
        match s.data() {
            StateData::Vector(v) => Work::Vector(v.clone()),
            StateData::Density(m) => Work::Density(m.as_slice().to_vec()),
        }
    }

    fn to_state(&self, layout: &ModeLayout) -> QState {
        let n = layout.total();
        match self {
            Work::Vector(v) => QState::vector_unchecked(layout.clone(), v.clone()),
            Work::Density(r) => QState::density_unchecked(
                layout.clone(),
                DenseMatrix::from_row_major(n, n, r.clone()).expect("square buffer"),
            ),
        }
    }

    fn promote(&mut self) {
        if let Work::Vector(v) = self {
            let m = DenseMatrix::outer(v, v);
            *self = Work::Density(m.into_vec());
        }
    }
}

struct Recorder<'a> {
    ops: &'a [(String, QOperator)],
    layout: &'a ModeLayout,
    settings: &'a IntegratorSettings,
}

impl Recorder<'_> {
    /// Samples all observables at `t`, checking positivity of densities.
    fn sample(&self, t: f64, work: &mut Work, traj: &mut Trajectory, stepper: &mut Stepper) -> Result<()> {
        let n = self.layout.total();
        if let Work::Density(r) = work {
            if self.settings.check_positivity {
                let m = DenseMatrix::from_row_major(n, n, r.clone())?.hermitian_part();
                let (vals, vecs) = m.eigh()?;
                let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                if min < POSITIVITY_PROJECT {
                    return Err(Error::Positivity {
                        t,
                        min_eigenvalue: min,
                    });
                }
                if min < POSITIVITY_IGNORE {
                    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
                    let total: f64 = clipped.iter().sum();
                    let mut out = vec![C64::new(0.0, 0.0); n * n];
                    for (k, &p) in clipped.iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        let w = p / total;
                        for i in 0..n {
                            let vi = vecs[(i, k)] * w;
                            for j in 0..n {
                                out[i * n + j] += vi * vecs[(j, k)].conj();
                            }
                        }
                    }
                    *r = out;
                    stepper.reset();
                    let msg = format!("projected density to positive cone at t = {t:.6e} s (min eigenvalue {min:.3e})");
                    log::warn!("{msg}");
                    traj.warnings.push(msg);
                }
            }
        }
        let state = work.to_state(self.layout);
        traj.times.push(t);
        for (name, op) in self.ops {
            let v = match state.data() {
                StateData::Vector(psi) => {
                    let opsi = op.apply(psi);
                    psi.iter().zip(&opsi).map(|(a, b)| a.conj() * b).sum::<C64>()
                }
                StateData::Density(rho) => trace_product(op, rho),
            };
            traj.observables.get_mut(name).expect("registered").push(v.re);
        }
        let (tr, pur) = match state.data() {
            StateData::Vector(psi) => (norm_sqr(psi), norm_sqr(psi).powi(2)),
            StateData::Density(rho) => (density_trace(rho.as_slice(), n), state.purity()),
        };
        traj.observables.get_mut("trace").expect("registered").push(tr);
        traj.observables.get_mut("purity").expect("registered").push(pur);
        Ok(())
    }
}

/// Record times strictly inside `(t0, t1)` on the global grid of spacing
/// `every`, followed by `t1`.
fn record_grid(t0: f64, t1: f64, every: Option<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    if let Some(r) = every {
        let mut k = (t0 / r).floor() as i64 + 1;
        loop {
            let t = k as f64 * r;
            if t >= t1 - 1e-9 * r {
                break;
            }
            if t > t0 {
                out.push(t);
            }
            k += 1;
        }
    }
    out.push(t1);
    out
}

/// Runs `schedule` from `initial`. Pure states stay pure through segments
/// without collapse channels and are promoted to densities otherwise.
pub fn evolve(
    initial: &QState,
    schedule: &Schedule,
    settings: &IntegratorSettings,
    observables: &Observables,
) -> Result<Trajectory> {
    settings.validate()?;
    let layout = schedule.layout();
    if initial.layout() != layout {
        return Err(Error::LayoutMismatch(format!(
            "initial state on {} but schedule on {layout}",
            initial.layout()
        )));
    }
    let mut names: Vec<String> = observables.names().map(String::from).collect();
    for extra in ["trace", "purity"] {
        if names.iter().any(|n| n == extra) {
            return Err(Error::Parameter(format!("observable name '{extra}' is reserved")));
        }
        names.push(extra.into());
    }
    for (name, op) in &observables.entries {
        if op.layout() != layout {
            return Err(Error::LayoutMismatch(format!("observable '{name}' on {}", op.layout())));
        }
    }
    let rec = Recorder {
        ops: &observables.entries,
        layout,
        settings,
    };
    let n = layout.total();
    let mut traj = Trajectory::new(&names);
    let mut work = Work::from_state(initial);
    let mut stepper = Stepper::new();
    let mut t = 0.0;
    rec.sample(t, &mut work, &mut traj, &mut stepper)?;

    for step in schedule.steps() {
        match step {
            Step::Unitary { label, op } => {
                let dev = op.unitarity_error();
                if dev > UNITARITY_TOL {
                    log::error!("step '{label}' is not unitary");
                    return Err(Error::NotUnitary { deviation: dev });
                }
                let s = work.to_state(layout).transform(op);
                work = Work::from_state(&s);
                stepper.reset();
                rec.sample(t, &mut work, &mut traj, &mut stepper)?;
            }
            Step::Evolve(seg) => {
                if seg.duration == 0.0 {
                    continue;
                }
                let gen = LindbladGenerator::new(&seg.hamiltonian, &seg.collapses)?;
                if gen.has_jumps() {
                    if settings.method == Method::Exact {
                        return Err(Error::Parameter(format!(
                            "segment '{}' has collapse channels; the exact method is for closed systems",
                            seg.label
                        )));
                    }
                    work.promote();
                }
                if settings.method == Method::Exact {
                    t = exact_segment(&rec, seg, t, &mut work, &mut traj, &mut stepper)?;
                    continue;
                }
                stepper = Stepper::new();
                let t_end = t + seg.duration;
                let grid = record_grid(t, t_end, settings.record_every);
                let guard = settings.trace_guard;
                let mut t_seg = t;
                for &t_rec in &grid {
                    let check = |tt: f64, y: &[C64], dens: bool| -> Result<()> {
                        let tr = if dens { density_trace(y, n) } else { norm_sqr(y) };
                        let drift = (tr - 1.0).abs();
                        if !(drift <= guard) {
                            return Err(Error::TraceDrift {
                                t: tt,
                                drift,
                                guard,
                            });
                        }
                        Ok(())
                    };
                    let res = match &mut work {
                        Work::Density(y) => {
                            let mut sys = DensitySystem {
                                gen: &gen,
                                scratch: vec![C64::new(0.0, 0.0); n * n],
                            };
                            integrate(&mut sys, y, t_seg, t_rec, settings, &mut stepper, |tt, yy| {
                                check(tt, yy, true)
                            })
                        }
                        Work::Vector(y) => {
                            let mut sys = VectorSystem { gen: &gen };
                            integrate(&mut sys, y, t_seg, t_rec, settings, &mut stepper, |tt, yy| {
                                check(tt, yy, false)
                            })
                        }
                    };
                    traj.merge_stats(&std::mem::take(&mut stepper.stats));
                    if let Err(h) = res {
                        let e = h.into_error(|| work.to_state(layout));
                        log::error!("segment '{}': {e}", seg.label);
                        return Err(e);
                    }
                    t_seg = t_rec;
                    rec.sample(t_rec, &mut work, &mut traj, &mut stepper)?;
                }
                t = t_end;
            }
        }
    }
    traj.final_state = Some(work.to_state(layout));
    Ok(traj)
}

/// Propagates one closed segment with `exp(−iHt) = V e^{−iEt} V†`,
/// sampling on the record grid.
fn exact_segment(
    rec: &Recorder<'_>,
    seg: &Segment,
    t0: f64,
    work: &mut Work,
    traj: &mut Trajectory,
    stepper: &mut Stepper,
) -> Result<f64> {
    let n = rec.layout.total();
    let (vals, vecs) = seg.hamiltonian.to_dense().hermitian_part().eigh()?;
    let vd = vecs.adjoint();
    let t_end = t0 + seg.duration;
    // Start state in the eigenbasis.
    let (psi_e, rho_e) = match &*work {
        Work::Vector(v) => (Some(vd.mul_vec(v)), None),
        Work::Density(r) => {
            let m = DenseMatrix::from_row_major(n, n, r.clone())?;
            (None, Some(vd.matmul(&m).matmul(&vecs)))
        }
    };
    for t_rec in record_grid(t0, t_end, rec.settings.record_every) {
        let dt = t_rec - t0;
        let ph: Vec<C64> = vals.iter().map(|&e| C64::from_polar(1.0, -e * dt)).collect();
        *work = match (&psi_e, &rho_e) {
            (Some(p), _) => {
                let rotated: Vec<C64> = p.iter().zip(&ph).map(|(a, b)| a * b).collect();
                Work::Vector(vecs.mul_vec(&rotated))
            }
            (_, Some(r)) => {
                let rotated = DenseMatrix::from_fn(n, n, |i, j| ph[i] * r[(i, j)] * ph[j].conj());
                Work::Density(vecs.matmul(&rotated).matmul(&vd).into_vec())
            }
            _ => unreachable!(),
        };
        rec.sample(t_rec, work, traj, stepper)?;
    }
    Ok(t_end)
}

/// `U ψ` or `U ρ U†`, rejecting operators that are not unitary to within
/// [`UNITARITY_TOL`].
pub fn apply_unitary(state: &QState, u: &QOperator) -> Result<QState> {
    if state.layout() != u.layout() {
        return Err(Error::LayoutMismatch(format!(
            "state on {} but unitary on {}",
            state.layout(),
            u.layout()
        )));
    }
    let dev = u.unitarity_error();
    if dev > UNITARITY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    Ok(state.transform(u))
}

/// Evolves under a time-independent `h` for `t` with the exact propagator
/// `exp(−iHt)`. Only for closed systems of modest dimension.
pub fn evolve_exact(state: &QState, h: &QOperator, t: f64) -> Result<QState> {
    if state.layout() != h.layout() {
        return Err(Error::LayoutMismatch(format!(
            "state on {} but Hamiltonian on {}",
            state.layout(),
            h.layout()
        )));
    }
    let u = h.propagator(t)?;
    Ok(state.transform(&u))
}

/// Outcome of [`evolve_to_stationarity`].
#[derive(Clone, Debug)]
pub struct Stationary {
    /// Mean of the observable over the last window.
    pub value: f64,
    pub converged: bool,
    /// Window means in order.
    pub window_means: Vec<f64>,
    pub trajectory: Trajectory,
}

/// Stopping rule for [`evolve_to_stationarity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityCriterion {
    /// Window length in seconds.
    pub window: f64,
    /// Samples per window.
    pub samples: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Give up after this much simulated time.
    pub t_max: f64,
}

impl StationarityCriterion {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.t_max >= self.window && self.samples >= 1) {
            return Err(Error::Parameter(
                "stationarity needs window > 0, t_max ≥ window and samples ≥ 1".into(),
            ));
        }
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0 && self.rel_tol + self.abs_tol > 0.0) {
            return Err(Error::Parameter("stationarity tolerances must be ≥ 0, not both 0".into()));
        }
        Ok(())
    }
}

/// Evolves window by window until the window mean of `observable` changes
/// by less than `rel_tol·|m| + abs_tol` between consecutive windows, or
/// `t_max` is reached.
pub fn evolve_to_stationarity(
    initial: &QState,
    h: &QOperator,
    collapses: &CollapseSet,
    observable: &QOperator,
    criterion: &StationarityCriterion,
    settings: &IntegratorSettings,
) -> Result<Stationary> {
    criterion.validate()?;
    let obs = Observables::none().with("observable", observable.clone());
    let mut s = *settings;
    s.record_every = Some(criterion.window / criterion.samples as f64);
    let mut state = initial.clone();
    let mut means = Vec::new();
    let mut full: Option<Trajectory> = None;
    let mut t_done = 0.0;
    let mut converged = false;
    while t_done + criterion.window <= criterion.t_max * (1.0 + 1e-12) {
        let sched = Schedule::new(h.layout()).evolve("window", h.clone(), collapses.clone(), criterion.window)?;
        let tr = evolve(&state, &sched, &s, &obs)?;
        let vals = tr.get("observable").expect("registered");
        // Skip the initial sample, which belongs to the previous window.
        let m = vals[1..].iter().sum::<f64>() / (vals.len() - 1) as f64;
        state = tr.final_state.clone().expect("final state");
        append(&mut full, tr, t_done);
        t_done += criterion.window;
        if let Some(&prev) = means.last() {
            let prev: f64 = prev;
            if (m - prev).abs() < criterion.rel_tol * m.abs() + criterion.abs_tol {
                means.push(m);
                converged = true;
                break;
            }
        }
        means.push(m);
    }
    let mut trajectory = full.expect("at least one window");
    trajectory.final_state = Some(state);
    if !converged {
        let msg = format!("no stationarity within t_max = {:.3e} s", criterion.t_max);
        log::warn!("{msg}");
        trajectory.warnings.push(msg);
    }
    Ok(Stationary {
        value: *means.last().expect("at least one window"),
        converged,
        window_means: means,
        trajectory,
    })
}

fn append(full: &mut Option<Trajectory>, mut tr: Trajectory, offset: f64) {
    for t in tr.times.iter_mut() {
        *t += offset;
    }
    match full {
        None => *full = Some(tr),
        Some(f) => {
            f.times.extend_from_slice(&tr.times[1..]);
            for (k, v) in tr.observables {
                f.observables.get_mut(&k).expect("same names").extend_from_slice(&v[1..]);
            }
            f.merge_stats(&tr.stats);
            f.warnings.extend(tr.warnings);
        }
    }
}

/// Stationary state `L(ρ) = 0, Tr ρ = 1` by a sparse LU solve of the
/// Liouvillian with one equation replaced by the trace condition.
pub fn steady_state(h: &QOperator, collapses: &CollapseSet) -> Result<QState> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};

    let gen = LindbladGenerator::new(h, collapses)?;
    if !gen.has_jumps() {
        return Err(Error::Parameter("steady state needs at least one collapse channel".into()));
    }
    let n = gen.dim();
    let nn = n * n;
    let mut trip: Vec<Triplet<usize, usize, C64>> = gen
        .superoperator_triplets()
        .into_iter()
        .filter(|&(r, _, _)| r != 0)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    for i in 0..n {
        trip.push(Triplet::new(0, i * n + i, C64::new(1.0, 0.0)));
    }
    let m = SparseColMat::<usize, C64>::try_new_from_triplets(nn, nn, &trip)
        .map_err(|e| Error::LinAlg(format!("assembling Liouvillian: {e:?}")))?;
    let lu = m.sp_lu().map_err(|e| Error::LinAlg(format!("sparse LU: {e:?}")))?;
    let mut rhs = faer::Mat::<C64>::zeros(nn, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    let data: Vec<C64> = (0..nn).map(|k| x[(k, 0)]).collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinAlg("singular Liouvillian".into()));
    }
    let rho = DenseMatrix::from_row_major(n, n, data)?.hermitian_part();
    let tr = rho.trace().re;
    let rho = rho.scale(C64::new(1.0 / tr, 0.0));
    Ok(QState::density_unchecked(h.layout().clone(), rho))
}
