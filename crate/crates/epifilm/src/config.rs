//! Experiment configuration: a flat `key = value` text format with dotted
//! sections, parsed into a fully validated run description.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment; blank
//! lines are ignored; keys use lowercase dotted words. Unknown or unused
//! keys are errors so typos cannot silently fall back to defaults. Every
//! diagnostic carries the offending line number.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::dislocations::{BurgersLattice, DislocationMeasure};
use crate::energy::{Anchoring, ModelParams, PenaltyKind, PenaltyTerm};
use crate::error::{Error, Result};
use crate::geometry::Profile;
use crate::optimizer::{ScheduleParams, VolumeMode};

/// Agreement required between redundant float declarations (for example
/// the core radius in both the model block and a measure file).
const CONSISTENCY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Raw key-value layer
// ---------------------------------------------------------------------------

/// Parsed `key = value` pairs with consumption tracking.
#[derive(Debug)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
    consumed: BTreeSet<String>,
}

impl RawConfig {
    /// Parses the text format; duplicate keys and malformed lines are
    /// errors addressed by line number.
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let Some(eq) = stripped.find('=') else {
                return Err(Error::Config { line, message: "expected `key = value`".into() });
            };
            let key = stripped[..eq].trim();
            let value = stripped[eq + 1..].trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '.' || c == '_')
            {
                return Err(Error::Config {
                    line,
                    message: format!("invalid key `{key}`: use lowercase dotted words"),
                });
            }
            if value.is_empty() {
                return Err(Error::Config { line, message: format!("key `{key}` has no value") });
            }
            if entries.insert(key.to_string(), (value.to_string(), line)).is_some() {
                return Err(Error::Config { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(RawConfig { entries, consumed: BTreeSet::new() })
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        let hit = self.entries.get(key).cloned();
        if hit.is_some() {
            self.consumed.insert(key.to_string());
        }
        hit
    }

    /// Optional float.
    pub fn get_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| Error::Config {
                line,
                message: format!("key `{key}`: `{v}` is not a number"),
            }),
        }
    }

    /// Required float.
    pub fn require_f64(&mut self, key: &str) -> Result<f64> {
        self.get_f64(key)?.ok_or_else(|| Error::MissingField(key.to_string()))
    }

    /// Optional unsigned integer.
    pub fn get_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| Error::Config {
                line,
                message: format!("key `{key}`: `{v}` is not a non-negative integer"),
            }),
        }
    }

    /// Optional bare string.
    pub fn get_string(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v)
    }

    /// Optional comma-separated float list.
    pub fn get_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|item| {
                    item.trim().parse::<f64>().map_err(|_| Error::Config {
                        line,
                        message: format!("key `{key}`: `{}` is not a number", item.trim()),
                    })
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    /// Line number of a consumed key, for diagnostics pointing back at it.
    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|(_, line)| *line).unwrap_or(0)
    }

    /// Errors if any parsed key was never consumed.
    pub fn finish(&self) -> Result<()> {
        for (key, (_, line)) in &self.entries {
            if !self.consumed.contains(key) {
                return Err(Error::Config {
                    line: *line,
                    message: format!("unrecognized or unused key `{key}`"),
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Modes
// ---------------------------------------------------------------------------

/// What the driver should run, with mode-specific settings resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// One solve of the configured state plus energy export.
    Solve,
    /// Alternating minimization with a full trace.
    Minimize,
    /// Nucleation-threshold scan over a mismatch range.
    Nucleate {
        /// Lower end of the scanned mismatch range.
        e0_min: f64,
        /// Upper end of the scanned mismatch range.
        e0_max: f64,
        /// Number of coarse table rows across the range.
        e0_steps: usize,
        /// Absolute width at which the threshold bisection stops.
        bisect_tol: f64,
    },
    /// Dislocation descent on a frozen profile with a step-by-step table.
    SinkStudy {
        /// Cap on logged descent steps.
        max_steps: usize,
    },
    /// Minimization per surface-tension value; flatness table.
    GammaSweep {
        /// Surface-tension values, run in the given order.
        gammas: Vec<f64>,
    },
    /// Corner-exponent tables.
    Corner {
        /// Opening angles as multiples of pi.
        omegas_over_pi: Vec<f64>,
    },
    /// Full oracle suite.
    Validate {
        /// Base mesh refinement of the suite.
        refine: usize,
    },
}

impl Mode {
    /// CLI name of the mode.
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Minimize => "minimize",
            Mode::Nucleate { .. } => "nucleate",
            Mode::SinkStudy { .. } => "sink-study",
            Mode::GammaSweep { .. } => "gamma-sweep",
            Mode::Corner { .. } => "corner",
            Mode::Validate { .. } => "validate",
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment specification
// ---------------------------------------------------------------------------

/// A fully resolved, validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Physical parameters.
    pub params: ModelParams,
    /// Initial film profile.
    pub profile: Profile,
    /// Initial dislocation content.
    pub sigma: DislocationMeasure,
    /// Optimizer schedule.
    pub schedule: ScheduleParams,
    /// Optional profile anchoring toward the initial profile.
    pub anchoring: Option<Anchoring>,
    /// Dispatch target with its resolved settings.
    pub mode: Mode,
    /// Every resolved setting as text, echoed into the run manifest.
    pub echo: BTreeMap<String, String>,
}

impl ExperimentSpec {
    /// Loads a spec from config text. `base_dir` anchors relative file
    /// paths; `refine` (from the CLI) overrides the mesh refinement.
    pub fn load(
        mode_name: &str,
        text: &str,
        base_dir: &Path,
        refine: Option<usize>,
    ) -> Result<ExperimentSpec> {
        let mut raw = RawConfig::parse(text)?;
        let mut echo = BTreeMap::new();

        let params = ModelParams {
            period: raw.require_f64("model.period")?,
            volume: raw.require_f64("model.volume")?,
            e0: raw.require_f64("model.e0")?,
            gamma: raw.require_f64("model.gamma")?,
            mu: raw.require_f64("model.mu")?,
            lambda: raw.require_f64("model.lambda")?,
            r0: raw.require_f64("model.r0")?,
            core_coefficient: raw.require_f64("model.core_coefficient")?,
        };
        params.validate()?;
        echo_f64(&mut echo, "model.period", params.period);
        echo_f64(&mut echo, "model.volume", params.volume);
        echo_f64(&mut echo, "model.e0", params.e0);
        echo_f64(&mut echo, "model.gamma", params.gamma);
        echo_f64(&mut echo, "model.mu", params.mu);
        echo_f64(&mut echo, "model.lambda", params.lambda);
        echo_f64(&mut echo, "model.r0", params.r0);
        echo_f64(&mut echo, "model.core_coefficient", params.core_coefficient);

        let schedule = read_schedule(&mut raw, &params, refine, &mut echo)?;
        let profile = read_profile(&mut raw, &params, &schedule, base_dir, &mut echo)?;
        let sigma = read_dislocations(&mut raw, &params, base_dir, &mut echo)?;
        let anchoring = match raw.get_f64("anchoring.beta")? {
            None | Some(0.0) => None,
            Some(beta) if beta > 0.0 && beta.is_finite() => {
                echo_f64(&mut echo, "anchoring.beta", beta);
                Some(Anchoring { beta, anchor: profile.clone() })
            }
            Some(beta) => {
                return Err(Error::Config {
                    line: raw.line_of("anchoring.beta"),
                    message: format!("anchoring.beta must be positive or zero, got {beta}"),
                })
            }
        };

        let mode = read_mode(mode_name, &mut raw, refine, &mut echo)?;
        echo.insert("mode".into(), mode.name().into());

        raw.finish()?;
        Ok(ExperimentSpec { params, profile, sigma, schedule, anchoring, mode, echo })
    }

    /// Loads a spec from a config file; relative paths inside the file
    /// resolve against the file's directory.
    pub fn from_file(mode_name: &str, path: &Path, refine: Option<usize>) -> Result<ExperimentSpec> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        ExperimentSpec::load(mode_name, &text, base, refine)
    }
}

// ---------------------------------------------------------------------------
// Section readers
// ---------------------------------------------------------------------------

fn read_schedule(
    raw: &mut RawConfig,
    params: &ModelParams,
    refine: Option<usize>,
    echo: &mut BTreeMap<String, String>,
) -> Result<ScheduleParams> {
    let mut s = ScheduleParams::defaults(params);
    if let Some(nx) = raw.get_usize("schedule.nx")? {
        s.nx = nx;
    }
    if let Some(nx) = refine {
        s.nx = nx;
    }
    if let Some(v) = raw.get_usize("schedule.max_sweeps")? {
        s.max_sweeps = v;
    }
    if let Some(v) = raw.get_f64("schedule.tol_energy")? {
        s.tol_energy = v;
    }
    if let Some(v) = raw.get_usize("schedule.profile_substeps")? {
        s.profile_substeps = v;
    }
    if let Some(v) = raw.get_f64("schedule.profile_step")? {
        s.profile_step = v;
    }
    if let Some(v) = raw.get_f64("schedule.max_move")? {
        s.max_move = v;
    }
    if let Some(v) = raw.get_usize("schedule.max_halvings")? {
        s.max_halvings = v;
    }
    if let Some(v) = raw.get_f64("schedule.fd_step")? {
        s.fd_step = v;
    }
    if let Some(v) = raw.get_f64("schedule.dislocation_step")? {
        s.dislocation_step = v;
    }
    if let Some(v) = raw.get_usize("schedule.dislocation_substeps")? {
        s.dislocation_substeps = v;
    }
    if let Some(v) = raw.get_usize("schedule.grid_nx")? {
        s.grid_nx = v;
    }
    if let Some(v) = raw.get_usize("schedule.grid_ny")? {
        s.grid_ny = v;
    }
    if let Some(v) = raw.get_f64("schedule.grid_dy")? {
        s.grid_dy = v;
    }
    if let Some(v) = raw.get_usize("schedule.max_nucleations")? {
        s.max_nucleations = v;
    }

    let mode_key = raw.get_string("schedule.volume_mode");
    let coefficient = raw.get_f64("schedule.penalty_coefficient")?;
    let kind_key = raw.get_string("schedule.penalty_kind");
    match mode_key.as_deref() {
        None | Some("projected") => {
            if coefficient.is_some() || kind_key.is_some() {
                return Err(Error::Config {
                    line: raw.line_of("schedule.penalty_coefficient").max(raw.line_of("schedule.penalty_kind")),
                    message: "penalty settings require schedule.volume_mode = penalized".into(),
                });
            }
            s.volume_mode = VolumeMode::Projected;
            echo.insert("schedule.volume_mode".into(), "projected".into());
        }
        Some("penalized") => {
            let kind = match kind_key.as_deref() {
                None | Some("two_sided") => PenaltyKind::TwoSided,
                Some("one_sided_deficit") => PenaltyKind::OneSidedDeficit,
                Some(other) => {
                    return Err(Error::Config {
                        line: raw.line_of("schedule.penalty_kind"),
                        message: format!(
                            "schedule.penalty_kind must be two_sided or one_sided_deficit, got `{other}`"
                        ),
                    })
                }
            };
            let coefficient = coefficient.unwrap_or_else(|| params.default_penalty_coefficient());
            if !(coefficient > 0.0 && coefficient.is_finite()) {
                return Err(Error::Config {
                    line: raw.line_of("schedule.penalty_coefficient"),
                    message: format!("penalty coefficient must be positive, got {coefficient}"),
                });
            }
            echo.insert("schedule.volume_mode".into(), "penalized".into());
            echo.insert(
                "schedule.penalty_kind".into(),
                match kind {
                    PenaltyKind::TwoSided => "two_sided".into(),
                    PenaltyKind::OneSidedDeficit => "one_sided_deficit".into(),
                },
            );
            echo_f64(echo, "schedule.penalty_coefficient", coefficient);
            s.volume_mode = VolumeMode::Penalized(PenaltyTerm { kind, coefficient });
        }
        Some(other) => {
            return Err(Error::Config {
                line: raw.line_of("schedule.volume_mode"),
                message: format!(
                    "schedule.volume_mode must be projected or penalized, got `{other}`"
                ),
            })
        }
    }

    s.validate(params)?;
    echo.insert("schedule.nx".into(), s.nx.to_string());
    echo.insert("schedule.max_sweeps".into(), s.max_sweeps.to_string());
    echo_f64(echo, "schedule.tol_energy", s.tol_energy);
    echo.insert("schedule.profile_substeps".into(), s.profile_substeps.to_string());
    echo_f64(echo, "schedule.profile_step", s.profile_step);
    echo_f64(echo, "schedule.max_move", s.max_move);
    echo.insert("schedule.max_halvings".into(), s.max_halvings.to_string());
    echo_f64(echo, "schedule.fd_step", s.fd_step);
    echo_f64(echo, "schedule.dislocation_step", s.dislocation_step);
    echo.insert("schedule.dislocation_substeps".into(), s.dislocation_substeps.to_string());
    echo.insert("schedule.grid_nx".into(), s.grid_nx.to_string());
    echo.insert("schedule.grid_ny".into(), s.grid_ny.to_string());
    echo_f64(echo, "schedule.grid_dy", s.grid_dy);
    echo.insert("schedule.max_nucleations".into(), s.max_nucleations.to_string());
    Ok(s)
}

fn read_profile(
    raw: &mut RawConfig,
    params: &ModelParams,
    schedule: &ScheduleParams,
    base_dir: &Path,
    echo: &mut BTreeMap<String, String>,
) -> Result<Profile> {
    let kind = raw.get_string("profile.kind").unwrap_or_else(|| "flat".into());
    echo.insert("profile.kind".into(), kind.clone());
    let nodes = raw.get_usize("profile.nodes")?.unwrap_or(schedule.nx);
    let profile = match kind.as_str() {
        "flat" => params.flat_profile(nodes)?,
        "cosine" => {
            let amplitude = raw
                .get_f64("profile.amplitude")?
                .ok_or_else(|| Error::MissingField("profile.amplitude".into()))?;
            echo_f64(echo, "profile.amplitude", amplitude);
            Profile::cosine(params.period, params.mean_height(), amplitude, nodes)?
        }
        "file" => {
            let rel = raw
                .get_string("profile.path")
                .ok_or_else(|| Error::MissingField("profile.path".into()))?;
            echo.insert("profile.path".into(), rel.clone());
            let text = std::fs::read_to_string(base_dir.join(&rel))?;
            let profile: Profile = serde_json::from_str(&text).map_err(|e| Error::Config {
                line: raw.line_of("profile.path"),
                message: format!("profile file `{rel}`: {e}"),
            })?;
            if (profile.period() - params.period).abs() > CONSISTENCY_TOL * params.period {
                return Err(Error::Config {
                    line: raw.line_of("profile.path"),
                    message: format!(
                        "profile period {} does not match model.period {}",
                        profile.period(),
                        params.period
                    ),
                });
            }
            profile
        }
        other => {
            return Err(Error::Config {
                line: raw.line_of("profile.kind"),
                message: format!("profile.kind must be flat, cosine, or file, got `{other}`"),
            })
        }
    };
    echo.insert("profile.nodes".into(), nodes.to_string());
    Ok(profile)
}

fn read_dislocations(
    raw: &mut RawConfig,
    params: &ModelParams,
    base_dir: &Path,
    echo: &mut BTreeMap<String, String>,
) -> Result<DislocationMeasure> {
    match raw.get_string("dislocations.path") {
        None => {
            echo.insert("dislocations.path".into(), "(none)".into());
            let lattice = BurgersLattice::new(vec![[1.0, 0.0], [0.0, 1.0]])
                .expect("unit vectors are independent");
            DislocationMeasure::empty(params.r0, lattice)
        }
        Some(rel) => {
            echo.insert("dislocations.path".into(), rel.clone());
            let text = std::fs::read_to_string(base_dir.join(&rel))?;
            let sigma: DislocationMeasure =
                serde_json::from_str(&text).map_err(|e| Error::Config {
                    line: raw.line_of("dislocations.path"),
                    message: format!("dislocation file `{rel}`: {e}"),
                })?;
            if (sigma.r0() - params.r0).abs() > CONSISTENCY_TOL * params.r0 {
                return Err(Error::Config {
                    line: raw.line_of("dislocations.path"),
                    message: format!(
                        "dislocation core radius {} does not match model.r0 {}",
                        sigma.r0(),
                        params.r0
                    ),
                });
            }
            Ok(sigma)
        }
    }
}

fn read_mode(
    mode_name: &str,
    raw: &mut RawConfig,
    refine: Option<usize>,
    echo: &mut BTreeMap<String, String>,
) -> Result<Mode> {
    let mode = match mode_name {
        "solve" => Mode::Solve,
        "minimize" => Mode::Minimize,
        "nucleate" => {
            let e0_min = raw.get_f64("nucleate.e0_min")?.unwrap_or(0.0);
            let e0_max = raw.get_f64("nucleate.e0_max")?.unwrap_or(10.0);
            let e0_steps = raw.get_usize("nucleate.e0_steps")?.unwrap_or(21);
            let bisect_tol = raw.get_f64("nucleate.bisect_tol")?.unwrap_or(1e-3);
            if !(e0_max > e0_min) || e0_steps < 2 || !(bisect_tol > 0.0) {
                return Err(Error::Validation(format!(
                    "nucleation scan needs e0_max > e0_min, at least 2 steps, positive bisect_tol; \
                     got [{e0_min}, {e0_max}], {e0_steps} steps, tol {bisect_tol}"
                )));
            }
            echo_f64(echo, "nucleate.e0_min", e0_min);
            echo_f64(echo, "nucleate.e0_max", e0_max);
            echo.insert("nucleate.e0_steps".into(), e0_steps.to_string());
            echo_f64(echo, "nucleate.bisect_tol", bisect_tol);
            Mode::Nucleate { e0_min, e0_max, e0_steps, bisect_tol }
        }
        "sink-study" => {
            let max_steps = raw.get_usize("sink.max_steps")?.unwrap_or(200);
            if max_steps == 0 {
                return Err(Error::Validation("sink.max_steps must be positive".into()));
            }
            echo.insert("sink.max_steps".into(), max_steps.to_string());
            Mode::SinkStudy { max_steps }
        }
        "gamma-sweep" => {
            let gammas = raw
                .get_f64_list("gamma.values")?
                .ok_or_else(|| Error::MissingField("gamma.values".into()))?;
            if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
                return Err(Error::Validation(
                    "gamma.values must be a non-empty list of positive numbers".into(),
                ));
            }
            echo.insert(
                "gamma.values".into(),
                gammas.iter().map(|g| format!("{g:e}")).collect::<Vec<_>>().join(","),
            );
            Mode::GammaSweep { gammas }
        }
        "corner" => {
            let omegas_over_pi = raw
                .get_f64_list("corner.omega_over_pi")?
                .ok_or_else(|| Error::MissingField("corner.omega_over_pi".into()))?;
            if omegas_over_pi.is_empty()
                || omegas_over_pi.iter().any(|m| !(*m > 0.0 && *m <= 2.0))
            {
                return Err(Error::Validation(
                    "corner.omega_over_pi entries must lie in (0, 2]".into(),
                ));
            }
            echo.insert(
                "corner.omega_over_pi".into(),
                omegas_over_pi.iter().map(|m| format!("{m:e}")).collect::<Vec<_>>().join(","),
            );
            Mode::Corner { omegas_over_pi }
        }
        "validate" => {
            let refine = refine.or(raw.get_usize("validate.refine")?).unwrap_or(64);
            echo.insert("validate.refine".into(), refine.to_string());
            Mode::Validate { refine }
        }
        other => {
            return Err(Error::Config {
                line: 0,
                message: format!(
                    "unknown mode `{other}`; expected solve, minimize, nucleate, sink-study, \
                     gamma-sweep, corner, or validate"
                ),
            })
        }
    };
    Ok(mode)
}

fn echo_f64(echo: &mut BTreeMap<String, String>, key: &str, value: f64) {
    echo.insert(key.to_string(), format!("{value:e}"));
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
model.period = 1.0
model.volume = 1.0
model.e0 = 1.0
model.gamma = 1.0
model.mu = 1.0
model.lambda = 1.0
model.r0 = 0.1
model.core_coefficient = 1.0
";

    fn load(mode: &str, text: &str) -> Result<ExperimentSpec> {
        ExperimentSpec::load(mode, text, Path::new("."), None)
    }

    #[test]
    fn minimal_config_resolves_defaults() {
        let spec = load("solve", BASE).unwrap();
        assert_eq!(spec.schedule.nx, 48);
        assert_eq!(spec.profile.heights_on_grid(4).len(), 4);
        assert!(spec.sigma.entries().is_empty());
        assert_eq!(spec.mode, Mode::Solve);
        assert_eq!(spec.echo["schedule.volume_mode"], "projected");
        assert_eq!(spec.echo["mode"], "solve");
    }

    #[test]
    fn missing_required_field_is_named() {
        let text = BASE.replace("model.e0 = 1.0\n", "");
        match load("solve", &text) {
            Err(Error::MissingField(field)) => assert_eq!(field, "model.e0"),
            other => panic!("expected a missing-field error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let text = format!("{BASE}model.typo = 3.0\n");
        match load("solve", &text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 9);
                assert!(message.contains("model.typo"), "{message}");
            }
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = BASE.replace("model.mu = 1.0", "model.mu = fast");
        match load("solve", &text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("model.mu"), "{message}");
            }
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = format!("{BASE}model.e0 = 2.0\n");
        assert!(matches!(load("solve", &text), Err(Error::Config { line: 9, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header\n\n{BASE}  # trailing comment line\n");
        assert!(load("solve", &text).is_ok());
    }

    #[test]
    fn cosine_profile_requires_amplitude() {
        let text = format!("{BASE}profile.kind = cosine\n");
        match load("solve", &text) {
            Err(Error::MissingField(field)) => assert_eq!(field, "profile.amplitude"),
            other => panic!("expected missing amplitude, got {other:?}"),
        }
        let text = format!("{BASE}profile.kind = cosine\nprofile.amplitude = 0.05\n");
        let spec = load("solve", &text).unwrap();
        assert!(spec.profile.heights_on_grid(8).iter().any(|h| (h - 1.0).abs() > 0.01));
    }

    #[test]
    fn penalty_keys_require_penalized_mode() {
        let text = format!("{BASE}schedule.penalty_coefficient = 2.0\n");
        assert!(matches!(load("minimize", &text), Err(Error::Config { .. })));
        let text = format!(
            "{BASE}schedule.volume_mode = penalized\nschedule.penalty_coefficient = 2.0\n"
        );
        let spec = load("minimize", &text).unwrap();
        match spec.schedule.volume_mode {
            VolumeMode::Penalized(term) => {
                assert_eq!(term.coefficient, 2.0);
                assert_eq!(term.kind, PenaltyKind::TwoSided);
            }
            VolumeMode::Projected => panic!("expected penalized mode"),
        }
    }

    #[test]
    fn refine_override_wins_over_config() {
        let text = format!("{BASE}schedule.nx = 32\n");
        let spec = ExperimentSpec::load("solve", &text, Path::new("."), Some(64)).unwrap();
        assert_eq!(spec.schedule.nx, 64);
        assert_eq!(spec.echo["schedule.nx"], "64");
    }

    #[test]
    fn mode_specific_keys_parse() {
        let text = format!("{BASE}nucleate.e0_max = 6.0\nnucleate.e0_steps = 13\n");
        match load("nucleate", &text).unwrap().mode {
            Mode::Nucleate { e0_min, e0_max, e0_steps, bisect_tol } => {
                assert_eq!(e0_min, 0.0);
                assert_eq!(e0_max, 6.0);
                assert_eq!(e0_steps, 13);
                assert_eq!(bisect_tol, 1e-3);
            }
            other => panic!("wrong mode {other:?}"),
        }
        let text = format!("{BASE}gamma.values = 1, 10, 100\n");
        match load("gamma-sweep", &text).unwrap().mode {
            Mode::GammaSweep { gammas } => assert_eq!(gammas, vec![1.0, 10.0, 100.0]),
            other => panic!("wrong mode {other:?}"),
        }
        let text = format!("{BASE}corner.omega_over_pi = 1.5, 2.0\n");
        match load("corner", &text).unwrap().mode {
            Mode::Corner { omegas_over_pi } => assert_eq!(omegas_over_pi, vec![1.5, 2.0]),
            other => panic!("wrong mode {other:?}"),
        }
    }

    #[test]
    fn mode_keys_for_other_modes_are_unused_errors() {
        let text = format!("{BASE}gamma.values = 1, 10\n");
        assert!(matches!(load("solve", &text), Err(Error::Config { .. })));
    }

    #[test]
    fn unknown_mode_is_rejected() {
        match load("explode", BASE) {
            Err(Error::Config { message, .. }) => assert!(message.contains("explode")),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn dislocation_file_core_radius_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let lattice = BurgersLattice::new(vec![[1.0, 0.0]]).unwrap();
        let sigma = DislocationMeasure::empty(0.2, lattice).unwrap();
        std::fs::write(
            dir.path().join("sigma.json"),
            serde_json::to_string(&sigma).unwrap(),
        )
        .unwrap();
        let text = format!("{BASE}dislocations.path = sigma.json\n");
        let err = ExperimentSpec::load("solve", &text, dir.path(), None);
        assert!(matches!(err, Err(Error::Config { .. })), "{err:?}");
    }

    #[test]
    fn profile_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let profile = Profile::cosine(1.0, 1.0, 0.07, 12).unwrap();
        std::fs::write(
            dir.path().join("profile.json"),
            serde_json::to_string(&profile).unwrap(),
        )
        .unwrap();
        let text = format!("{BASE}profile.kind = file\nprofile.path = profile.json\n");
        let spec = ExperimentSpec::load("solve", &text, dir.path(), None).unwrap();
        assert_eq!(spec.profile.heights_on_grid(12), profile.heights_on_grid(12));
    }
}
