//! Batch experiment driver: dispatches a loaded [`ExperimentSpec`] to the
//! solver, optimizer, or diagnostic suites and writes all result artifacts.
//!
//! Every run produces CSV/JSON files plus a `manifest.json` holding the
//! SHA-256 of each artifact and the fully resolved configuration echo.
//! All floating output uses 17 significant digits; reruns of identical
//! specs produce byte-identical artifact bodies.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentSpec, Mode};
use crate::corner::corner_roots;
use crate::dislocations::DislocationMeasure;
use crate::elasticity::solve_configuration;
use crate::energy::{penalized_energy, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::geometry::Profile;
use crate::optimizer::{Optimizer, TRACE_HEADER};
use crate::validation::validate_suite;

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// What a completed run produced.
#[derive(Debug)]
pub struct RunSummary {
    /// Directory holding the artifacts.
    pub out_dir: PathBuf,
    /// Artifact file names in write order (manifest last).
    pub artifacts: Vec<String>,
}

/// Runs the experiment and writes artifacts into `out_dir` (created if
/// missing). Validation failures in `validate` mode surface as a
/// validation error after all artifacts, including the manifest, are
/// written.
pub fn run(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let mut sink = ArtifactSink::new(out_dir);
    let outcome = match &spec.mode {
        Mode::Solve => run_solve(spec, &mut sink),
        Mode::Minimize => run_minimize(spec, &mut sink),
        Mode::Nucleate { e0_min, e0_max, e0_steps, bisect_tol } => {
            run_nucleate(spec, &mut sink, *e0_min, *e0_max, *e0_steps, *bisect_tol)
        }
        Mode::SinkStudy { max_steps } => run_sink_study(spec, &mut sink, *max_steps),
        Mode::GammaSweep { gammas } => run_gamma_sweep(spec, &mut sink, gammas),
        Mode::Corner { omegas_over_pi } => run_corner(spec, &mut sink, omegas_over_pi),
        Mode::Validate { refine } => run_validate(spec, &mut sink, *refine),
    };
    // Write the manifest even when the run ends in a validation failure,
    // so the partial evidence stays inspectable.
    let deferred = match outcome {
        Ok(()) => None,
        Err(e @ Error::Validation(_)) => Some(e),
        Err(e) => return Err(e),
    };
    sink.write_manifest(spec)?;
    match deferred {
        Some(e) => Err(e),
        None => Ok(RunSummary { out_dir: out_dir.to_path_buf(), artifacts: sink.names }),
    }
}

// ---------------------------------------------------------------------------
// Modes
// ---------------------------------------------------------------------------

fn run_solve(spec: &ExperimentSpec, sink: &mut ArtifactSink) -> Result<()> {
    check_admissible(&spec.profile, &spec.sigma)?;
    let state = solve_configuration(
        &spec.profile,
        &spec.sigma,
        spec.params.lame(),
        spec.schedule.nx,
    )?;
    let breakdown = penalized_energy(&state, &spec.params, None, spec.anchoring.as_ref())?;
    let volume = spec.profile.volume();

    let mut csv = String::from(
        "elastic,surface,cuts,nucleation,penalty,anchoring,total,volume,graph_length,cut_length\n",
    );
    let measure = spec.profile.surface_measure();
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        fmt(breakdown.elastic),
        fmt(breakdown.surface),
        fmt(breakdown.cuts),
        fmt(breakdown.nucleation),
        fmt(breakdown.penalty),
        fmt(breakdown.anchoring),
        fmt(breakdown.total),
        fmt(volume),
        fmt(measure.graph_length),
        fmt(measure.cut_length),
    ));
    sink.write("energy.csv", csv.as_bytes())?;
    sink.write("profile.csv", profile_csv(&spec.profile, spec.schedule.nx).as_bytes())?;
    sink.write_json("dislocations.json", &spec.sigma)?;
    Ok(())
}

fn run_minimize(spec: &ExperimentSpec, sink: &mut ArtifactSink) -> Result<()> {
    let mut opt = Optimizer::new(
        spec.params,
        spec.schedule.clone(),
        spec.anchoring.clone(),
        &spec.profile,
        &spec.sigma,
    )?;
    let outcome = opt.alternate_minimize()?;

    sink.write("trace.csv", trace_csv(&opt).as_bytes())?;
    sink.write("final_profile.csv", profile_csv(opt.profile(), spec.schedule.nx).as_bytes())?;
    sink.write_json("final_profile.json", opt.profile())?;
    sink.write_json("final_dislocations.json", opt.sigma())?;

    let mut summary = BTreeMap::new();
    summary.insert("converged".to_string(), serde_json::json!(outcome.converged));
    summary.insert("sweeps".to_string(), serde_json::json!(outcome.sweeps));
    summary.insert("n_dislocations".to_string(), serde_json::json!(opt.sigma().entries().len()));
    summary.insert("volume".to_string(), serde_json::json!(opt.profile().volume()));
    insert_breakdown(&mut summary, &opt.breakdown());
    sink.write_json("summary.json", &summary)?;
    Ok(())
}

fn run_nucleate(
    spec: &ExperimentSpec,
    sink: &mut ArtifactSink,
    e0_min: f64,
    e0_max: f64,
    e0_steps: usize,
    bisect_tol: f64,
) -> Result<()> {
    // One nucleation phase on the configured start, at a given mismatch;
    // reports whether the sweep accepted a defect and what it changed.
    let attempt = |e0: f64| -> Result<(usize, f64, DislocationMeasure)> {
        let mut params = spec.params;
        params.e0 = e0;
        let mut schedule = spec.schedule.clone();
        schedule.max_nucleations = schedule.max_nucleations.max(1);
        let mut opt =
            Optimizer::new(params, schedule, spec.anchoring.clone(), &spec.profile, &spec.sigma)?;
        let before = opt.breakdown().total;
        let accepted = opt.nucleation_phase()?;
        Ok((accepted, opt.breakdown().total - before, opt.sigma().clone()))
    };

    let mut csv = String::from("e0,accepted,delta_total,site_x,site_y\n");
    let mut last_reject: Option<f64> = None;
    let mut first_accept: Option<(f64, DislocationMeasure)> = None;
    for k in 0..e0_steps {
        let e0 = e0_min + (e0_max - e0_min) * k as f64 / (e0_steps - 1) as f64;
        let (accepted, delta, sigma) = attempt(e0)?;
        let site = sigma.entries().len().checked_sub(1).map(|i| sigma.entries()[i].center);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(e0),
            u32::from(accepted > 0),
            fmt(delta),
            fmt(site.filter(|_| accepted > 0).map_or(0.0, |c| c[0])),
            fmt(site.filter(|_| accepted > 0).map_or(0.0, |c| c[1])),
        ));
        if accepted == 0 {
            if first_accept.is_none() {
                last_reject = Some(e0);
            }
        } else if first_accept.is_none() {
            first_accept = Some((e0, sigma));
        }
    }
    sink.write("threshold.csv", csv.as_bytes())?;

    let (hi, accepted_sigma) = first_accept.ok_or_else(|| {
        Error::Enumeration(format!(
            "no nucleation accepted anywhere in e0 range [{e0_min}, {e0_max}]"
        ))
    })?;
    let mut lo = last_reject.ok_or_else(|| {
        Error::Enumeration(format!(
            "nucleation accepted already at the bottom of the e0 range [{e0_min}, {e0_max}]"
        ))
    })?;
    let mut hi = hi;
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        if attempt(mid)?.0 > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let threshold_empirical = 0.5 * (lo + hi);

    // Independent estimate: self-energy plus core cost of the accepted
    // defect against the mismatch relief rate of the flat-film identity.
    let entry = &accepted_sigma.entries()[accepted_sigma.entries().len() - 1];
    let single = DislocationMeasure::new(
        spec.params.r0,
        accepted_sigma.lattice().clone(),
        vec![entry.clone()],
    )?;
    let state =
        solve_configuration(&spec.profile, &single, spec.params.lame(), spec.schedule.nx)?;
    let burgers = single.burgers(0);
    if burgers[0] <= 0.0 {
        return Err(Error::Enumeration(format!(
            "threshold defect has non-positive horizontal Burgers component {}",
            burgers[0]
        )));
    }
    let norm2 = burgers[0] * burgers[0] + burgers[1] * burgers[1];
    let threshold_formula = (state.self_energy()
        + spec.params.core_coefficient * norm2)
        / (2.0 * spec.params.w0() * burgers[0] * (spec.params.mean_height() - spec.params.r0));

    let mut summary = BTreeMap::new();
    summary.insert("threshold_empirical".to_string(), serde_json::json!(threshold_empirical));
    summary.insert("threshold_formula".to_string(), serde_json::json!(threshold_formula));
    summary.insert(
        "relative_gap".to_string(),
        serde_json::json!((threshold_empirical - threshold_formula).abs() / threshold_formula),
    );
    summary.insert("site".to_string(), serde_json::json!(entry.center));
    summary.insert("coefficients".to_string(), serde_json::json!(entry.coeffs));
    summary.insert("bracket".to_string(), serde_json::json!([lo, hi]));
    sink.write_json("summary.json", &summary)?;
    Ok(())
}

fn run_sink_study(spec: &ExperimentSpec, sink: &mut ArtifactSink, max_steps: usize) -> Result<()> {
    if spec.sigma.entries().is_empty() {
        return Err(Error::Validation(
            "sink-study needs at least one initial dislocation".into(),
        ));
    }
    let mut schedule = spec.schedule.clone();
    schedule.profile_substeps = 0;
    schedule.max_nucleations = 0;
    let mut opt =
        Optimizer::new(spec.params, schedule, spec.anchoring.clone(), &spec.profile, &spec.sigma)?;

    let mut csv = String::from("step,x,y,elastic,total\n");
    let mut push_row = |step: usize, opt: &Optimizer| {
        let c = opt.sigma().entries()[0].center;
        csv.push_str(&format!(
            "{step},{},{},{},{}\n",
            fmt(c[0]),
            fmt(c[1]),
            fmt(opt.breakdown().elastic),
            fmt(opt.breakdown().total),
        ));
    };
    push_row(0, &opt);
    for step in 1..=max_steps {
        let moved = opt.dislocation_phase()?;
        push_row(step, &opt);
        if !moved {
            break;
        }
    }
    sink.write("sink.csv", csv.as_bytes())?;
    sink.write_json("final_dislocations.json", opt.sigma())?;
    Ok(())
}

fn run_gamma_sweep(spec: &ExperimentSpec, sink: &mut ArtifactSink, gammas: &[f64]) -> Result<()> {
    let mut csv = String::from("gamma,sup_distance,total,sweeps,converged\n");
    let flat = spec.params.mean_height();
    for &gamma in gammas {
        let mut params = spec.params;
        params.gamma = gamma;
        let mut opt = Optimizer::new(
            params,
            spec.schedule.clone(),
            spec.anchoring.clone(),
            &spec.profile,
            &spec.sigma,
        )?;
        let outcome = opt.alternate_minimize()?;
        let sup = opt
            .profile()
            .heights_on_grid(spec.schedule.nx)
            .iter()
            .fold(0.0f64, |m, h| m.max((h - flat).abs()));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(gamma),
            fmt(sup),
            fmt(opt.breakdown().total),
            outcome.sweeps,
            u32::from(outcome.converged),
        ));
    }
    sink.write("gamma.csv", csv.as_bytes())?;
    Ok(())
}

fn run_corner(
    _spec: &ExperimentSpec,
    sink: &mut ArtifactSink,
    omegas_over_pi: &[f64],
) -> Result<()> {
    let mut csv = String::from("omega,alpha_re,alpha_im,residual,multiplicity\n");
    for &mult in omegas_over_pi {
        let omega = mult * std::f64::consts::PI;
        for root in corner_roots(omega)? {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt(omega),
                fmt(root.alpha.re),
                fmt(root.alpha.im),
                fmt(root.residual),
                root.multiplicity,
            ));
        }
    }
    sink.write("corner.csv", csv.as_bytes())?;
    Ok(())
}

fn run_validate(spec: &ExperimentSpec, sink: &mut ArtifactSink, refine: usize) -> Result<()> {
    let reports = validate_suite(&spec.params, refine)?;
    let mut csv = String::from("name,value,oracle,abs_error,rel_error,tol,pass\n");
    for r in &reports {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.name,
            fmt(r.value),
            fmt(r.oracle),
            fmt(r.abs_error),
            fmt(r.rel_error),
            fmt(r.tol),
            u32::from(r.pass),
        ));
    }
    sink.write("reports.csv", csv.as_bytes())?;

    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let mut summary = BTreeMap::new();
    summary.insert("n_reports".to_string(), serde_json::json!(reports.len()));
    summary.insert("n_failed".to_string(), serde_json::json!(failed.len()));
    summary.insert("failed".to_string(), serde_json::json!(failed));
    summary.insert("pass".to_string(), serde_json::json!(failed.is_empty()));
    sink.write_json("summary.json", &summary)?;

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{} of {} oracle checks failed: {}",
            failed.len(),
            reports.len(),
            failed.join(", ")
        )))
    }
}

// ---------------------------------------------------------------------------
// Artifact plumbing
// ---------------------------------------------------------------------------

struct ArtifactSink {
    dir: PathBuf,
    names: Vec<String>,
    hashes: BTreeMap<String, String>,
}

impl ArtifactSink {
    fn new(dir: &Path) -> ArtifactSink {
        ArtifactSink { dir: dir.to_path_buf(), names: Vec::new(), hashes: BTreeMap::new() }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.names.push(name.to_string());
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Validation(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn write_manifest(&mut self, spec: &ExperimentSpec) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            mode: &'a str,
            config: &'a BTreeMap<String, String>,
            artifacts: &'a BTreeMap<String, String>,
        }
        let manifest = Manifest {
            mode: spec.mode.name(),
            config: &spec.echo,
            artifacts: &self.hashes.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Validation(format!("serializing manifest: {e}")))?;
        text.push('\n');
        std::fs::write(self.dir.join("manifest.json"), text.as_bytes())?;
        self.names.push("manifest.json".to_string());
        Ok(())
    }
}

/// 17-significant-digit float formatting used by every CSV body.
/// Negative zero is normalized so sign noise never reaches artifacts.
fn fmt(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

fn profile_csv(profile: &Profile, nx: usize) -> String {
    let mut csv = String::from("x,height\n");
    for (i, h) in profile.heights_on_grid(nx).iter().enumerate() {
        let x = i as f64 * profile.period() / nx as f64;
        csv.push_str(&format!("{},{}\n", fmt(x), fmt(*h)));
    }
    csv
}

fn trace_csv(opt: &Optimizer) -> String {
    let mut csv = String::from(TRACE_HEADER);
    csv.push('\n');
    for row in opt.trace() {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.sweep,
            row.phase,
            fmt(row.breakdown.elastic),
            fmt(row.breakdown.surface),
            fmt(row.breakdown.cuts),
            fmt(row.breakdown.nucleation),
            fmt(row.breakdown.penalty),
            fmt(row.breakdown.anchoring),
            fmt(row.breakdown.total),
            fmt(row.volume),
            row.n_dislocations,
        ));
    }
    csv
}

fn insert_breakdown(summary: &mut BTreeMap<String, serde_json::Value>, b: &EnergyBreakdown) {
    // Negative zero is normalized so sign noise never reaches artifacts.
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    summary.insert("elastic".to_string(), serde_json::json!(clean(b.elastic)));
    summary.insert("surface".to_string(), serde_json::json!(clean(b.surface)));
    summary.insert("cuts".to_string(), serde_json::json!(clean(b.cuts)));
    summary.insert("nucleation".to_string(), serde_json::json!(clean(b.nucleation)));
    summary.insert("penalty".to_string(), serde_json::json!(clean(b.penalty)));
    summary.insert("anchoring".to_string(), serde_json::json!(clean(b.anchoring)));
    summary.insert("total".to_string(), serde_json::json!(clean(b.total)));
}

fn check_admissible(profile: &Profile, sigma: &DislocationMeasure) -> Result<()> {
    for (i, entry) in sigma.entries().iter().enumerate() {
        if !profile.ball_fits(entry.center, sigma.r0()) {
            return Err(Error::Dislocation(format!(
                "dislocation {i} at ({}, {}) does not fit its core disk inside the film",
                entry.center[0], entry.center[1]
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentSpec;

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

    fn spec(mode: &str, extra: &str, refine: Option<usize>) -> ExperimentSpec {
        let text = format!("{BASE}{extra}");
        ExperimentSpec::load(mode, &text, Path::new("."), refine).unwrap()
    }

    fn read(dir: &Path, name: &str) -> String {
        std::fs::read_to_string(dir.join(name)).unwrap()
    }

    #[test]
    fn solve_flat_defaults_writes_unit_oracle_energy() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&spec("solve", "", Some(16)), dir.path()).unwrap();
        assert!(summary.artifacts.contains(&"energy.csv".to_string()));
        let energy = read(dir.path(), "energy.csv");
        let row = energy.lines().nth(1).unwrap();
        let total: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert!((total - 7.0 / 3.0).abs() < 1e-8, "flat unit total was {total}");
    }

    #[test]
    fn corner_mode_writes_slit_row() {
        let dir = tempfile::tempdir().unwrap();
        run(&spec("corner", "corner.omega_over_pi = 2.0\n", None), dir.path()).unwrap();
        let table = read(dir.path(), "corner.csv");
        let row = table.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        let re: f64 = cols[1].parse().unwrap();
        let im: f64 = cols[2].parse().unwrap();
        let residual: f64 = cols[3].parse().unwrap();
        assert!((re - 0.5).abs() < 1e-10 && im == 0.0 && residual <= 1e-12);
        assert_eq!(cols[4], "2");
    }

    #[test]
    fn manifest_hashes_match_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        run(&spec("solve", "", Some(16)), dir.path()).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
        let artifacts = manifest["artifacts"].as_object().unwrap();
        assert!(!artifacts.is_empty());
        for (name, hash) in artifacts {
            let bytes = std::fs::read(dir.path().join(name)).unwrap();
            assert_eq!(hash.as_str().unwrap(), sha256_hex(&bytes), "{name}");
        }
        assert_eq!(manifest["config"]["model.r0"], "1e-1");
    }

    #[test]
    fn minimize_rerun_is_byte_identical() {
        let extra = "schedule.max_sweeps = 2\nschedule.nx = 16\nschedule.max_nucleations = 0\nprofile.kind = cosine\nprofile.amplitude = 0.03\n";
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run(&spec("minimize", extra, None), dir_a.path()).unwrap();
        run(&spec("minimize", extra, None), dir_b.path()).unwrap();
        for name in ["trace.csv", "final_profile.csv", "summary.json", "manifest.json"] {
            assert_eq!(read(dir_a.path(), name), read(dir_b.path(), name), "{name}");
        }
    }

    #[test]
    fn sink_study_logs_downward_motion() {
        let dir = tempfile::tempdir().unwrap();
        let lattice = crate::dislocations::BurgersLattice::new(vec![[1.0, 0.0], [0.0, 1.0]])
            .unwrap();
        let sigma = crate::dislocations::DislocationMeasure::new(
            0.1,
            lattice,
            vec![crate::dislocations::DislocationEntry { center: [0.5, 0.5], coeffs: vec![1, 0] }],
        )
        .unwrap();
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("sigma.json"), serde_json::to_string(&sigma).unwrap())
            .unwrap();
        let text = format!(
            "{BASE}model.e0 = 4.0\nschedule.nx = 32\ndislocations.path = sigma.json\nsink.max_steps = 40\n"
        );
        let text = text.replace("model.e0 = 1.0\n", "");
        let spec = ExperimentSpec::load("sink-study", &text, tmp.path(), None).unwrap();
        run(&spec, dir.path()).unwrap();
        let table = read(dir.path(), "sink.csv");
        let rows: Vec<&str> = table.lines().skip(1).collect();
        assert!(rows.len() >= 2);
        let y_first: f64 = rows[0].split(',').nth(2).unwrap().parse().unwrap();
        let y_last: f64 = rows[rows.len() - 1].split(',').nth(2).unwrap().parse().unwrap();
        assert!(y_last < y_first, "defect should sink: {y_first} -> {y_last}");
        let t_first: f64 = rows[0].split(',').nth(4).unwrap().parse().unwrap();
        let t_last: f64 = rows[rows.len() - 1].split(',').nth(4).unwrap().parse().unwrap();
        assert!(t_last < t_first, "energy should drop: {t_first} -> {t_last}");
    }

    #[test]
    fn validate_mode_writes_reports_and_summary() {
        // A wide core keeps the half-refinement solves resolvable.
        let text = format!(
            "{}validate.refine = 32\n",
            BASE.replace("model.r0 = 0.1", "model.r0 = 0.2")
        );
        let spec = ExperimentSpec::load("validate", &text, Path::new("."), None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        match run(&spec, dir.path()) {
            Ok(_) => {
                let summary = read(dir.path(), "summary.json");
                assert!(summary.contains("\"pass\": true"), "{summary}");
            }
            Err(Error::Validation(msg)) => {
                // Failures must still leave the evidence on disk.
                assert!(dir.path().join("reports.csv").exists());
                assert!(dir.path().join("manifest.json").exists(), "{msg}");
                panic!("suite unexpectedly failed at this refinement: {msg}");
            }
            Err(other) => panic!("unexpected error {other:?}"),
        }
        let reports = read(dir.path(), "reports.csv");
        assert!(reports.lines().count() > 10);
    }
}
