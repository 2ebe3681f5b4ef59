//! Alternating minimization over profiles and dislocations.
//!
//! One sweep runs up to three phases, each a descent on the same penalized
//! or volume-projected objective:
//!
//! 1. profile phase: explicit descent of the surface heights along the
//!    negative shape gradient `gamma * curvature + W` (plus penalty and
//!    anchoring gradients when active), with nodal floors keeping the
//!    graph above every dislocation core, followed by exact volume
//!    projection in projected mode and a backtracking line search that
//!    only accepts strict energy decrease;
//! 2. dislocation phase: finite-difference descent of each defect center,
//!    clamped to the admissible set (core disk inside the film, center at
//!    least one core radius above the substrate);
//! 3. nucleation phase: greedy scan of a candidate grid times the signed
//!    fundamental Burgers vectors, accepting the best strictly
//!    energy-decreasing defect.
//!
//! Every phase appends a row to a trace table for auditing; the loop stops
//! when one sweep neither nucleates nor lowers the objective beyond the
//! configured tolerance.

use crate::dislocations::DislocationMeasure;
use crate::elasticity::{ElasticState, ElasticSystem};
use crate::energy::{penalized_energy, Anchoring, EnergyBreakdown, ModelParams, PenaltyTerm};
use crate::error::{Error, Result};
use crate::geometry::Profile;

/// Relative slack of the exact volume projection.
const VOLUME_TOL: f64 = 1e-13;

/// Gradient norms below this end a dislocation descent.
const GRADIENT_FLOOR: f64 = 1e-12;

/// Strictness margin for accepting a nucleation, relative to the
/// objective scale.
const NUCLEATION_MARGIN: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

/// How the volume constraint enters the descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeMode {
    /// Hard constraint: every profile candidate is projected back to the
    /// target volume before evaluation.
    Projected,
    /// Soft constraint: the penalty term joins the objective and its
    /// gradient joins the descent velocity.
    Penalized(PenaltyTerm),
}

/// Step sizes, grids, and iteration budgets of the alternating loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    /// Mesh columns; profiles are resampled onto this grid.
    pub nx: usize,
    /// Maximum alternating sweeps.
    pub max_sweeps: usize,
    /// Relative objective decrease below which a sweep counts as converged.
    pub tol_energy: f64,
    /// Profile descent steps per sweep; zero freezes the profile.
    pub profile_substeps: usize,
    /// Largest pseudo-time step of the profile descent; the line search
    /// adapts downward from the last accepted step.
    pub profile_step: f64,
    /// Largest nodal height change per profile step.
    pub max_move: f64,
    /// Line-search halvings before a phase gives up.
    pub max_halvings: usize,
    /// Finite-difference step for dislocation gradients; keep well under
    /// the core radius.
    pub fd_step: f64,
    /// Initial trial move length of the dislocation descent.
    pub dislocation_step: f64,
    /// Dislocation descent steps per sweep; zero freezes the defects.
    pub dislocation_substeps: usize,
    /// Nucleation candidate columns across one period.
    pub grid_nx: usize,
    /// Nucleation candidate levels above the floor `y = r0`.
    pub grid_ny: usize,
    /// Vertical spacing of nucleation levels.
    pub grid_dy: f64,
    /// Accepted nucleations per nucleation phase; zero disables the phase.
    pub max_nucleations: usize,
    /// Volume handling.
    pub volume_mode: VolumeMode,
}

impl ScheduleParams {
    /// Conservative defaults scaled from the model parameters.
    pub fn defaults(params: &ModelParams) -> ScheduleParams {
        ScheduleParams {
            nx: 48,
            max_sweeps: 30,
            tol_energy: 1e-10,
            profile_substeps: 3,
            profile_step: 0.05,
            max_move: 0.05 * params.mean_height(),
            max_halvings: 15,
            fd_step: params.r0 / 100.0,
            dislocation_step: 0.5 * params.r0,
            dislocation_substeps: 3,
            grid_nx: 12,
            grid_ny: 5,
            grid_dy: params.r0,
            max_nucleations: 1,
            volume_mode: VolumeMode::Projected,
        }
    }

    /// Validates budgets and step sizes against the model.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.nx < 4 {
            return fail(format!("schedule needs nx >= 4, got {}", self.nx));
        }
        if !(self.fd_step > 0.0 && self.fd_step < params.r0 / 10.0) {
            return fail(format!(
                "fd_step must lie in (0, r0/10) = (0, {}), got {}",
                params.r0 / 10.0,
                self.fd_step
            ));
        }
        if !(self.profile_step > 0.0 && self.profile_step.is_finite()) {
            return fail(format!("profile_step must be positive, got {}", self.profile_step));
        }
        if !(self.max_move > 0.0 && self.max_move.is_finite()) {
            return fail(format!("max_move must be positive, got {}", self.max_move));
        }
        if !(self.dislocation_step > 0.0 && self.dislocation_step.is_finite()) {
            return fail(format!(
                "dislocation_step must be positive, got {}",
                self.dislocation_step
            ));
        }
        if !(self.grid_dy > 0.0 && self.grid_dy.is_finite()) {
            return fail(format!("grid_dy must be positive, got {}", self.grid_dy));
        }
        if self.grid_nx == 0 || self.grid_ny == 0 {
            return fail("nucleation grid must have at least one column and level".into());
        }
        if !(self.tol_energy >= 0.0) {
            return fail(format!("tol_energy must be nonnegative, got {}", self.tol_energy));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// CSV header matching [`TraceRow`] fields.
pub const TRACE_HEADER: &str =
    "sweep,phase,elastic,surface,cuts,nucleation,penalty,anchoring,total,volume,n_dislocations";

/// Energy audit after one optimizer phase.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    /// Sweep number, zero for the initial state.
    pub sweep: usize,
    /// Phase that just ran: `init`, `profile`, `dislocation`, `nucleation`.
    pub phase: &'static str,
    /// Energy parts after the phase.
    pub breakdown: EnergyBreakdown,
    /// Profile volume after the phase.
    pub volume: f64,
    /// Number of dislocation entries after the phase.
    pub n_dislocations: usize,
}

/// Result of a full alternating run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizeOutcome {
    /// True when the last sweep made no accepted change beyond tolerance.
    pub converged: bool,
    /// Sweeps actually run.
    pub sweeps: usize,
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// Alternating minimizer holding the current configuration and its solved
/// elastic state.
#[derive(Debug)]
pub struct Optimizer {
    params: ModelParams,
    schedule: ScheduleParams,
    anchoring: Option<Anchoring>,
    profile: Profile,
    sigma: DislocationMeasure,
    system: ElasticSystem,
    state: ElasticState,
    breakdown: EnergyBreakdown,
    trace: Vec<TraceRow>,
    /// Adaptive profile step: last accepted step doubled, capped by the
    /// schedule value.
    profile_dt: f64,
    /// Adaptive dislocation move length, same policy.
    dislocation_len: f64,
}

impl Optimizer {
    /// Builds the optimizer: validates parameters, resamples the profile
    /// onto the schedule grid (projecting to the target volume in
    /// projected mode), checks every initial defect is admissible, and
    /// solves the initial state.
    pub fn new(
        params: ModelParams,
        schedule: ScheduleParams,
        anchoring: Option<Anchoring>,
        profile: &Profile,
        sigma: &DislocationMeasure,
    ) -> Result<Optimizer> {
        params.validate()?;
        schedule.validate(&params)?;
        if (sigma.r0() - params.r0).abs() > 1e-12 * params.r0 {
            return Err(Error::Validation(format!(
                "measure core radius {} disagrees with model core radius {}",
                sigma.r0(),
                params.r0
            )));
        }
        if (profile.period() - params.period).abs() > 1e-12 * params.period {
            return Err(Error::Validation(format!(
                "profile period {} disagrees with model period {}",
                profile.period(),
                params.period
            )));
        }
        if !profile.is_continuous() {
            return Err(Error::Validation(
                "the descent works on continuous profiles; cuts only enter energy comparisons"
                    .into(),
            ));
        }

        let mut heights = profile.heights_on_grid(schedule.nx);
        let dx = params.period / schedule.nx as f64;
        let floors = floors_for(&params, &schedule, sigma);
        for (h, f) in heights.iter_mut().zip(&floors) {
            *h = h.max(*f);
        }
        if matches!(schedule.volume_mode, VolumeMode::Projected) {
            project_volume(&mut heights, &floors, params.volume, dx)?;
        }
        let profile = Profile::from_heights(params.period, &heights)?;

        for (i, e) in sigma.entries().iter().enumerate() {
            if sigma.burgers(i) != [0.0, 0.0] && !profile.ball_fits(e.center, params.r0) {
                return Err(Error::Dislocation(format!(
                    "initial dislocation {i} at ({}, {}) is inadmissible: its core disk \
                     does not fit inside the film",
                    e.center[0], e.center[1]
                )));
            }
        }

        let system =
            ElasticSystem::new(&profile, params.lame(), schedule.nx, thickness_floor(&params))?;
        let state = system.solve_state(sigma, None)?;
        let breakdown = evaluate(&state, &params, &schedule, anchoring.as_ref())?;
        let mut opt = Optimizer {
            params,
            schedule,
            anchoring,
            profile,
            sigma: sigma.clone(),
            system,
            state,
            breakdown,
            trace: Vec::new(),
            profile_dt: schedule.profile_step,
            dislocation_len: schedule.dislocation_step,
        };
        opt.push_trace(0, "init");
        Ok(opt)
    }

    /// Model parameters.
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Schedule in effect.
    pub fn schedule(&self) -> &ScheduleParams {
        &self.schedule
    }

    /// Current profile (on the schedule grid).
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Current dislocation measure.
    pub fn sigma(&self) -> &DislocationMeasure {
        &self.sigma
    }

    /// Solved state of the current configuration.
    pub fn state(&self) -> &ElasticState {
        &self.state
    }

    /// Energy parts of the current configuration.
    pub fn breakdown(&self) -> EnergyBreakdown {
        self.breakdown
    }

    /// Phase-by-phase energy audit so far.
    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    /// Runs the alternating loop to convergence or the sweep budget.
    pub fn alternate_minimize(&mut self) -> Result<MinimizeOutcome> {
        for sweep in 1..=self.schedule.max_sweeps {
            let start = self.breakdown.total;
            if self.schedule.profile_substeps > 0 {
                self.profile_phase()?;
                self.push_trace(sweep, "profile");
            }
            if self.schedule.dislocation_substeps > 0 && !self.sigma.entries().is_empty() {
                self.dislocation_phase()?;
                self.push_trace(sweep, "dislocation");
            }
            let nucleated = if self.schedule.max_nucleations > 0 {
                let n = self.nucleation_phase()?;
                self.push_trace(sweep, "nucleation");
                n
            } else {
                0
            };
            let drop = start - self.breakdown.total;
            if nucleated == 0 && drop <= self.schedule.tol_energy * self.breakdown.total.abs().max(1.0)
            {
                return Ok(MinimizeOutcome { converged: true, sweeps: sweep });
            }
        }
        Ok(MinimizeOutcome { converged: false, sweeps: self.schedule.max_sweeps })
    }

    /// Profile descent phase; true when at least one step was accepted.
    pub fn profile_phase(&mut self) -> Result<bool> {
        let mut any = false;
        for _ in 0..self.schedule.profile_substeps {
            if self.try_profile_step()? {
                any = true;
            } else {
                break;
            }
        }
        Ok(any)
    }

    /// Dislocation descent phase; true when at least one move was accepted.
    pub fn dislocation_phase(&mut self) -> Result<bool> {
        if self.sigma.entries().is_empty() {
            return Ok(false);
        }
        let mut any = false;
        for _ in 0..self.schedule.dislocation_substeps {
            let mut moved = false;
            for i in 0..self.sigma.entries().len() {
                if self.sigma.burgers(i) == [0.0, 0.0] {
                    continue;
                }
                if self.try_dislocation_step(i)? {
                    moved = true;
                }
            }
            if moved {
                any = true;
            } else {
                break;
            }
        }
        Ok(any)
    }

    /// Greedy nucleation scan; returns the number of accepted defects.
    pub fn nucleation_phase(&mut self) -> Result<usize> {
        let mut accepted = 0;
        while accepted < self.schedule.max_nucleations {
            let margin = NUCLEATION_MARGIN * self.breakdown.total.abs().max(1.0);
            let mut best: Option<(f64, DislocationMeasure, ElasticState, EnergyBreakdown)> = None;
            for candidate in self.nucleation_candidates() {
                for coeffs in signed_fundamentals(self.sigma.lattice().fundamentals().len()) {
                    let trial = self.sigma.with_entry(candidate, coeffs)?;
                    let state = self.system.solve_state(&trial, Some(&self.state))?;
                    let bd = evaluate(&state, &self.params, &self.schedule, self.anchoring.as_ref())?;
                    let delta = bd.total - self.breakdown.total;
                    if delta < -margin && best.as_ref().map_or(true, |b| delta < b.0) {
                        best = Some((delta, trial, state, bd));
                    }
                }
            }
            match best {
                Some((_, sigma, state, bd)) => {
                    self.sigma = sigma;
                    self.state = state;
                    self.breakdown = bd;
                    // A new defect reshapes the landscape; restart the
                    // adaptive step sizes.
                    self.profile_dt = self.schedule.profile_step;
                    self.dislocation_len = self.schedule.dislocation_step;
                    accepted += 1;
                }
                None => break,
            }
        }
        Ok(accepted)
    }

    // -- profile descent ----------------------------------------------------

    fn try_profile_step(&mut self) -> Result<bool> {
        let nx = self.schedule.nx;
        let dx = self.params.period / nx as f64;
        let h0 = self.profile.heights_on_grid(nx);
        let v = self.descent_velocity(&h0);
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if vmax < 1e-14 {
            return Ok(false);
        }
        let floors = floors_for(&self.params, &self.schedule, &self.sigma);

        let mut dt = self.profile_dt;
        for _ in 0..=self.schedule.max_halvings {
            let mut h: Vec<f64> = h0
                .iter()
                .zip(&v)
                .zip(&floors)
                .map(|((h, v), f)| {
                    let step = (dt * v).clamp(-self.schedule.max_move, self.schedule.max_move);
                    (h + step).max(*f)
                })
                .collect();
            if matches!(self.schedule.volume_mode, VolumeMode::Projected) {
                project_volume(&mut h, &floors, self.params.volume, dx)?;
            }
            let moved = h.iter().zip(&h0).any(|(a, b)| (a - b).abs() > 1e-15);
            if moved {
                let candidate = Profile::from_heights(self.params.period, &h)?;
                let system = ElasticSystem::with_guess(
                    &candidate,
                    self.params.lame(),
                    nx,
                    thickness_floor(&self.params),
                    Some(self.system.mismatch_displacement()),
                )?;
                let state = system.solve_state(&self.sigma, Some(&self.state))?;
                let bd = evaluate(&state, &self.params, &self.schedule, self.anchoring.as_ref())?;
                if bd.total < self.breakdown.total {
                    self.profile = candidate;
                    self.system = system;
                    self.state = state;
                    self.breakdown = bd;
                    self.profile_dt = (2.0 * dt).min(self.schedule.profile_step);
                    return Ok(true);
                }
            }
            dt *= 0.5;
        }
        Ok(false)
    }

    /// Negative objective gradient with respect to nodal heights, per unit
    /// length: `-(gamma kappa + W + penalty' + anchoring')`, projected to
    /// mean zero in projected mode.
    fn descent_velocity(&self, h: &[f64]) -> Vec<f64> {
        let nx = h.len();
        let dx = self.params.period / nx as f64;
        let w = self.state.surface_density(self.params.e0);
        let tilt = |i: usize| {
            let t = (h[(i + 1) % nx] - h[i]) / dx;
            t / (1.0 + t * t).sqrt()
        };
        let mut v: Vec<f64> = (0..nx)
            .map(|i| {
                let kappa = (tilt((i + nx - 1) % nx) - tilt(i)) / dx;
                -(self.params.gamma * kappa + w[i])
            })
            .collect();

        match self.schedule.volume_mode {
            VolumeMode::Projected => {
                let mean = v.iter().sum::<f64>() / nx as f64;
                for vi in &mut v {
                    *vi -= mean;
                }
            }
            VolumeMode::Penalized(term) => {
                let vol = dx * h.iter().sum::<f64>();
                let slope = match term.kind {
                    crate::energy::PenaltyKind::TwoSided => {
                        term.coefficient * (vol - self.params.volume).signum()
                    }
                    crate::energy::PenaltyKind::OneSidedDeficit => {
                        if vol < self.params.volume {
                            -term.coefficient
                        } else {
                            0.0
                        }
                    }
                };
                for vi in &mut v {
                    *vi -= slope;
                }
            }
        }
        if let Some(a) = &self.anchoring {
            for (i, vi) in v.iter_mut().enumerate() {
                let x = i as f64 * dx;
                *vi -= 2.0 * a.beta * (h[i] - a.anchor.eval(x));
            }
        }
        v
    }

    // -- dislocation descent ------------------------------------------------

    fn try_dislocation_step(&mut self, i: usize) -> Result<bool> {
        let g = self.fd_gradient(i)?;
        let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if norm < GRADIENT_FLOOR {
            return Ok(false);
        }
        let dir = [-g[0] / norm, -g[1] / norm];
        let center = self.sigma.entries()[i].center;

        let mut len = self.dislocation_len;
        for _ in 0..=self.schedule.max_halvings {
            let raw = [center[0] + len * dir[0], center[1] + len * dir[1]];
            let cand = self.project_center(center, raw);
            let moved = (cand[0] - center[0]).hypot(cand[1] - center[1]) > 1e-15;
            if moved {
                let trial = self.sigma.with_center(i, cand);
                let state = self.system.solve_state(&trial, Some(&self.state))?;
                let bd = evaluate(&state, &self.params, &self.schedule, self.anchoring.as_ref())?;
                if bd.total < self.breakdown.total {
                    self.sigma = trial;
                    self.state = state;
                    self.breakdown = bd;
                    self.dislocation_len = (2.0 * len).min(self.schedule.dislocation_step);
                    return Ok(true);
                }
            }
            len *= 0.5;
        }
        Ok(false)
    }

    /// Central finite-difference gradient of the objective in the center
    /// of defect `i`, falling back to one-sided differences at the
    /// boundary of the admissible set.
    fn fd_gradient(&self, i: usize) -> Result<[f64; 2]> {
        let s = self.schedule.fd_step;
        let center = self.sigma.entries()[i].center;
        let mut g = [0.0; 2];
        for c in 0..2 {
            let probe = |sign: f64| -> Result<Option<f64>> {
                let mut z = center;
                z[c] += sign * s;
                if !self.admissible(z) {
                    return Ok(None);
                }
                let trial = self.sigma.with_center(i, z);
                let state = self.system.solve_state(&trial, Some(&self.state))?;
                let bd = evaluate(&state, &self.params, &self.schedule, self.anchoring.as_ref())?;
                Ok(Some(bd.total))
            };
            let plus = probe(1.0)?;
            let minus = probe(-1.0)?;
            g[c] = match (plus, minus) {
                (Some(p), Some(m)) => (p - m) / (2.0 * s),
                (Some(p), None) => (p - self.breakdown.total) / s,
                (None, Some(m)) => (self.breakdown.total - m) / s,
                (None, None) => 0.0,
            };
        }
        Ok(g)
    }

    fn admissible(&self, center: [f64; 2]) -> bool {
        self.profile.ball_fits(center, self.params.r0)
    }

    /// Projects a raw candidate center back into the admissible set:
    /// clamps the height to the core radius, then bisects toward the
    /// (admissible) current center.
    fn project_center(&self, current: [f64; 2], raw: [f64; 2]) -> [f64; 2] {
        let mut cand = [raw[0].rem_euclid(self.params.period), raw[1].max(self.params.r0)];
        if self.admissible(cand) {
            return cand;
        }
        // Bisect along the segment from the current center (t = 0,
        // admissible) toward the candidate (t = 1, not admissible).
        let target = cand;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..50 {
            let t = 0.5 * (lo + hi);
            let z = [
                (current[0] + t * (target[0] - current[0])).rem_euclid(self.params.period),
                (current[1] + t * (target[1] - current[1])).max(self.params.r0),
            ];
            if self.admissible(z) {
                lo = t;
            } else {
                hi = t;
            }
        }
        cand = [
            (current[0] + lo * (target[0] - current[0])).rem_euclid(self.params.period),
            (current[1] + lo * (target[1] - current[1])).max(self.params.r0),
        ];
        cand
    }

    // -- nucleation ----------------------------------------------------------

    fn nucleation_candidates(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for k in 0..self.schedule.grid_nx {
            let x = k as f64 * self.params.period / self.schedule.grid_nx as f64;
            for j in 0..self.schedule.grid_ny {
                let y = self.params.r0 + j as f64 * self.schedule.grid_dy;
                if self.admissible([x, y]) {
                    out.push([x, y]);
                }
            }
        }
        out
    }

    fn push_trace(&mut self, sweep: usize, phase: &'static str) {
        self.trace.push(TraceRow {
            sweep,
            phase,
            breakdown: self.breakdown,
            volume: self.profile.volume(),
            n_dislocations: self.sigma.entries().len(),
        });
    }
}

// ---------------------------------------------------------------------------
// Free helpers
// ---------------------------------------------------------------------------

/// Hard lower bound on film thickness during descent: a quarter core
/// radius, keeping the mesh well posed through every line search.
fn thickness_floor(params: &ModelParams) -> f64 {
    0.25 * params.r0 * (1.0 - 1e-9)
}

/// Per-node height floors: the global thickness floor joined with, for
/// every defect core, the supremum of its core-disk arc over the two mesh
/// cells adjacent to the node. Clamping both endpoints of a cell to the
/// arc supremum over that cell keeps the whole chord above the arc, so
/// core disks never poke through the surface.
fn floors_for(params: &ModelParams, schedule: &ScheduleParams, sigma: &DislocationMeasure) -> Vec<f64> {
    let nx = schedule.nx;
    let dx = params.period / nx as f64;
    let r0 = params.r0;
    let mut floors = vec![0.25 * r0; nx];
    for (i, e) in sigma.entries().iter().enumerate() {
        if sigma.burgers(i) == [0.0, 0.0] {
            continue;
        }
        let [cx, cy] = e.center;
        for shift in [-params.period, 0.0, params.period] {
            let c = cx + shift;
            for (node, floor) in floors.iter_mut().enumerate() {
                let x = node as f64 * dx;
                let (lo, hi) = (x - dx, x + dx);
                // Distance from the disk center to the node's cell pair.
                let dist = if c < lo {
                    lo - c
                } else if c > hi {
                    c - hi
                } else {
                    0.0
                };
                if dist < r0 {
                    let arc = cy + (r0 * r0 - dist * dist).sqrt();
                    *floor = floor.max(arc);
                }
            }
        }
    }
    floors
}

/// Exact volume projection: shifts all nodes for a deficit, lowers only
/// nodes above their floors for an excess, iterating as nodes pin.
fn project_volume(h: &mut [f64], floors: &[f64], target: f64, dx: f64) -> Result<()> {
    for _ in 0..(h.len() + 8) {
        let vol = dx * h.iter().sum::<f64>();
        let deficit = target - vol;
        if deficit.abs() <= VOLUME_TOL * target {
            return Ok(());
        }
        if deficit > 0.0 {
            let shift = deficit / (dx * h.len() as f64);
            for hi in h.iter_mut() {
                *hi += shift;
            }
        } else {
            let active: Vec<usize> =
                (0..h.len()).filter(|&i| h[i] > floors[i] + f64::EPSILON).collect();
            if active.is_empty() {
                return Err(Error::Geometry(
                    "volume projection stuck: every node rests on its floor".into(),
                ));
            }
            let shift = deficit / (dx * active.len() as f64);
            for &i in &active {
                h[i] = floors[i].max(h[i] + shift);
            }
        }
    }
    Err(Error::Geometry("volume projection did not converge".into()))
}

/// Signed fundamental coefficient vectors `+e_m`, `-e_m` in scan order.
fn signed_fundamentals(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::with_capacity(2 * n);
    for m in 0..n {
        for sign in [1, -1] {
            let mut c = vec![0; n];
            c[m] = sign;
            out.push(c);
        }
    }
    out
}

fn evaluate(
    state: &ElasticState,
    params: &ModelParams,
    schedule: &ScheduleParams,
    anchoring: Option<&Anchoring>,
) -> Result<EnergyBreakdown> {
    let penalty = match schedule.volume_mode {
        VolumeMode::Projected => None,
        VolumeMode::Penalized(term) => Some(term),
    };
    penalized_energy(state, params, penalty.as_ref(), anchoring)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
