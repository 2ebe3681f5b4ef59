//! Total-energy accounting for film configurations.
//!
//! The functional splits into independently computed parts:
//!
//! - elastic energy of the solved strain at the model mismatch,
//! - surface energy `gamma * H1(graph)` including vertical walls,
//! - cut energy `2 * gamma * H1(cuts)` (both crack faces count),
//! - nucleation cost proportional to the squared Burgers moduli,
//! - an optional volume penalty replacing the hard volume constraint,
//! - an optional quadratic anchoring to a reference profile.
//!
//! Every assembled [`EnergyBreakdown`] stores the parts and their sum, so
//! downstream comparisons can always be audited term by term.

use crate::elasticity::{ElasticState, LameTensor};
use crate::error::{Error, Result};
use crate::geometry::Profile;

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

/// Physical and model parameters shared by every energy evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Horizontal period of the film.
    pub period: f64,
    /// Prescribed film volume (area per period).
    pub volume: f64,
    /// Mismatch strain imposed by the substrate; zero switches the
    /// substrate coupling off while keeping defect self energies.
    pub e0: f64,
    /// Surface tension, positive.
    pub gamma: f64,
    /// Shear modulus.
    pub mu: f64,
    /// First Lamé parameter.
    pub lambda: f64,
    /// Dislocation core radius; must leave room for two cores per period.
    pub r0: f64,
    /// Nucleation cost per unit squared Burgers modulus.
    pub core_coefficient: f64,
}

impl ModelParams {
    /// Validates positivity and compatibility of all parameters.
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Validation(format!("{msg} (params: {self:?})")))
            }
        };
        check(self.period.is_finite() && self.period > 0.0, "period must be positive")?;
        check(self.volume.is_finite() && self.volume > 0.0, "volume must be positive")?;
        check(self.e0.is_finite(), "mismatch must be finite")?;
        check(self.gamma.is_finite() && self.gamma > 0.0, "gamma must be positive")?;
        check(
            self.r0.is_finite() && self.r0 > 0.0 && self.r0 < 0.5 * self.period,
            "core radius must lie in (0, period/2)",
        )?;
        check(
            self.core_coefficient.is_finite() && self.core_coefficient >= 0.0,
            "core coefficient must be nonnegative",
        )?;
        LameTensor::new(self.mu, self.lambda).map(|_| ())
    }

    /// Elastic moduli as a tensor.
    pub fn lame(&self) -> LameTensor {
        LameTensor { mu: self.mu, lambda: self.lambda }
    }

    /// Flat-film energy density coefficient `W0`.
    pub fn w0(&self) -> f64 {
        self.lame().w0()
    }

    /// Mean film height `volume / period`.
    pub fn mean_height(&self) -> f64 {
        self.volume / self.period
    }

    /// Flat profile carrying the prescribed volume.
    pub fn flat_profile(&self, n: usize) -> Result<Profile> {
        Profile::flat(self.period, self.mean_height(), n)
    }

    /// Closed-form total energy of the flat defect-free film:
    /// `e0^2 W0 volume + gamma period`.
    pub fn flat_energy(&self) -> f64 {
        self.e0 * self.e0 * self.w0() * self.volume + self.gamma * self.period
    }

    /// Default volume-penalty coefficient: 10 percent above the flat-film
    /// energy density, so refilling a volume deficit always pays off.
    pub fn default_penalty_coefficient(&self) -> f64 {
        1.1 * self.e0 * self.e0 * self.w0()
    }
}

// ---------------------------------------------------------------------------
// Breakdown and penalties
// ---------------------------------------------------------------------------

/// Itemized energy of one configuration; `total` is the sum of all parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    /// Elastic bulk energy at the model mismatch.
    pub elastic: f64,
    /// Surface energy of the extended graph (linear pieces and walls).
    pub surface: f64,
    /// Cut energy, both faces counted.
    pub cuts: f64,
    /// Nucleation cost of the dislocation measure.
    pub nucleation: f64,
    /// Volume-penalty value (zero under the hard constraint).
    pub penalty: f64,
    /// Anchoring value (zero when unanchored).
    pub anchoring: f64,
    /// Sum of all parts above.
    pub total: f64,
}

impl EnergyBreakdown {
    fn assemble(
        elastic: f64,
        surface: f64,
        cuts: f64,
        nucleation: f64,
        penalty: f64,
        anchoring: f64,
    ) -> EnergyBreakdown {
        EnergyBreakdown {
            elastic,
            surface,
            cuts,
            nucleation,
            penalty,
            anchoring,
            total: elastic + surface + cuts + nucleation + penalty + anchoring,
        }
    }
}

/// Shape of the volume-penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    /// `coefficient * |volume - target|`: deviations both ways cost.
    TwoSided,
    /// `coefficient * max(target - volume, 0)`: only deficits cost, excess
    /// volume is handled by the descent itself.
    OneSidedDeficit,
}

/// Volume-penalty specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyTerm {
    /// Penalty shape.
    pub kind: PenaltyKind,
    /// Penalty coefficient; exceed the flat-film energy density
    /// `e0^2 W0` or deficits become energetically attractive.
    pub coefficient: f64,
}

impl PenaltyTerm {
    /// Penalty value for a profile volume against the target.
    pub fn value(&self, volume: f64, target: f64) -> f64 {
        match self.kind {
            PenaltyKind::TwoSided => self.coefficient * (volume - target).abs(),
            PenaltyKind::OneSidedDeficit => self.coefficient * (target - volume).max(0.0),
        }
    }
}

/// Quadratic anchoring to a reference profile.
#[derive(Debug, Clone)]
pub struct Anchoring {
    /// Anchoring strength.
    pub beta: f64,
    /// Reference profile; must share the model period.
    pub anchor: Profile,
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// Surface and cut energies of a profile: `(gamma * graph, 2 gamma * cuts)`.
pub fn surface_parts(profile: &Profile, gamma: f64) -> (f64, f64) {
    let m = profile.surface_measure();
    (gamma * m.graph_length, 2.0 * gamma * m.cut_length)
}

/// Energy of a solved state under the hard volume constraint: elastic plus
/// surface plus nucleation, no penalty and no anchoring.
pub fn total_energy(state: &ElasticState, params: &ModelParams) -> EnergyBreakdown {
    let (surface, cuts) = surface_parts(state.profile(), params.gamma);
    EnergyBreakdown::assemble(
        state.elastic_energy(params.e0),
        surface,
        cuts,
        state.sigma().nucleation_energy(params.core_coefficient),
        0.0,
        0.0,
    )
}

/// Energy of a solved state with the volume constraint replaced by a
/// penalty, plus optional anchoring.
pub fn penalized_energy(
    state: &ElasticState,
    params: &ModelParams,
    penalty: Option<&PenaltyTerm>,
    anchoring: Option<&Anchoring>,
) -> Result<EnergyBreakdown> {
    let base = total_energy(state, params);
    let pen = penalty.map_or(0.0, |p| p.value(state.profile().volume(), params.volume));
    let anc = match anchoring {
        Some(a) => a.beta * anchoring_integral(state.profile(), &a.anchor)?,
        None => 0.0,
    };
    Ok(EnergyBreakdown::assemble(
        base.elastic,
        base.surface,
        base.cuts,
        base.nucleation,
        pen,
        anc,
    ))
}

/// Exact integral of `(h - a)^2` over one period for two piecewise-linear
/// profiles on the same period: Simpson on the union of their breakpoints
/// (the integrand is piecewise quadratic, so Simpson is exact).
pub fn anchoring_integral(profile: &Profile, anchor: &Profile) -> Result<f64> {
    let ell = profile.period();
    if (anchor.period() - ell).abs() > 1e-12 * ell {
        return Err(Error::Geometry(format!(
            "anchor period {} does not match profile period {ell}",
            anchor.period()
        )));
    }
    let mut xs: Vec<f64> = profile
        .nodes()
        .iter()
        .chain(anchor.nodes().iter())
        .map(|p| p[0])
        .collect();
    xs.push(0.0);
    xs.push(ell);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * ell.max(1.0));

    let mut acc = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let f = |left: bool, x: f64| {
            let hp = if left { profile.limits(x).0 } else { profile.limits(x).1 };
            let ha = if left { anchor.limits(x).0 } else { anchor.limits(x).1 };
            (hp - ha) * (hp - ha)
        };
        let mid = {
            let d = profile.eval(0.5 * (x0 + x1)) - anchor.eval(0.5 * (x0 + x1));
            d * d
        };
        acc += (x1 - x0) / 6.0 * (f(false, x0) + 4.0 * mid + f(true, x1));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Stationarity diagnostic
// ---------------------------------------------------------------------------

/// Half-width multiplier of the exclusion window around dislocation
/// columns: surface values within one core radius of a defect column are
/// contaminated by the regularized core and are skipped.
const EXCLUSION_CORES: f64 = 1.0;

/// Sup-norm residual of the profile stationarity condition
/// `gamma * curvature + W = constant` along the free surface.
///
/// The curvature is the discrete first variation of arclength at the mesh
/// columns, `W` the surface elastic density, and the constant the
/// arclength-weighted average over unmasked columns (the volume
/// multiplier is not known a priori). Columns within one core radius of a
/// dislocation are excluded. Errors when fewer than two columns survive
/// the mask.
pub fn euler_lagrange_residual(state: &ElasticState, params: &ModelParams) -> Result<f64> {
    let mesh = state.mesh();
    let nx = mesh.nx();
    let ell = mesh.period();
    let dx = ell / nx as f64;
    let h: Vec<f64> = (0..nx).map(|i| mesh.nodes()[mesh.surface_node(i)][1]).collect();
    let w = state.surface_density(params.e0);

    let slope = |i: usize| (h[(i + 1) % nx] - h[i]) / dx;
    let tilt = |i: usize| {
        let t = slope(i);
        t / (1.0 + t * t).sqrt()
    };
    let seg_len = |i: usize| dx * (1.0 + slope(i) * slope(i)).sqrt();

    let masked: Vec<bool> = (0..nx)
        .map(|i| {
            let x = i as f64 * dx;
            state.sigma().entries().iter().enumerate().any(|(j, e)| {
                if state.sigma().burgers(j) == [0.0, 0.0] {
                    return false;
                }
                let mut d = (x - e.center[0]).abs() % ell;
                d = d.min(ell - d);
                d <= EXCLUSION_CORES * state.sigma().r0()
            })
        })
        .collect();

    let mut residuals = Vec::with_capacity(nx);
    let mut weights = Vec::with_capacity(nx);
    for i in 0..nx {
        if masked[i] {
            continue;
        }
        let prev = (i + nx - 1) % nx;
        let kappa = (tilt(prev) - tilt(i)) / dx;
        residuals.push(params.gamma * kappa + w[i]);
        weights.push(0.5 * (seg_len(prev) + seg_len(i)));
    }
    if residuals.len() < 2 {
        return Err(Error::Validation(
            "stationarity residual needs at least two unmasked surface columns".into(),
        ));
    }
    let wsum: f64 = weights.iter().sum();
    let mean: f64 =
        residuals.iter().zip(&weights).map(|(r, s)| r * s).sum::<f64>() / wsum;
    Ok(residuals.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dislocations::{BurgersLattice, DislocationMeasure};
    use crate::elasticity::solve_configuration;

    fn unit_params() -> ModelParams {
        ModelParams {
            period: 1.0,
            volume: 1.0,
            e0: 1.0,
            gamma: 1.0,
            mu: 1.0,
            lambda: 1.0,
            r0: 0.1,
            core_coefficient: 1.0,
        }
    }

    fn empty_measure(r0: f64) -> DislocationMeasure {
        DislocationMeasure::empty(r0, BurgersLattice::new(vec![[1.0, 0.0], [0.0, 1.0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(unit_params().validate().is_ok());
        let mut p = unit_params();
        p.e0 = 0.0;
        assert!(p.validate().is_ok(), "zero mismatch is a valid degenerate case");
        p = unit_params();
        p.gamma = 0.0;
        assert!(p.validate().is_err());
        p = unit_params();
        p.r0 = 0.5;
        assert!(p.validate().is_err(), "core must fit strictly inside half a period");
        p = unit_params();
        p.volume = -1.0;
        assert!(p.validate().is_err());
        p = unit_params();
        p.lambda = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn flat_film_total_is_closed_form() {
        let params = unit_params();
        let profile = params.flat_profile(16).unwrap();
        let state =
            solve_configuration(&profile, &empty_measure(params.r0), params.lame(), 16).unwrap();
        let b = total_energy(&state, &params);
        let want = 4.0 / 3.0 + 1.0;
        assert!((b.total - want).abs() < 1e-10, "got {}, want {want}", b.total);
        assert!((b.total - params.flat_energy()).abs() < 1e-10);
        assert_eq!(b.cuts, 0.0);
        assert_eq!(b.nucleation, 0.0);
    }

    #[test]
    fn surface_part_is_linear_in_gamma() {
        let params = unit_params();
        let profile = Profile::cosine(1.0, 1.0, 0.1, 16).unwrap();
        let (s1, _) = surface_parts(&profile, params.gamma);
        let (s2, _) = surface_parts(&profile, 2.0 * params.gamma);
        assert!((s2 - 2.0 * s1).abs() < 1e-15);
        assert!(s1 > params.gamma * params.period, "wavy graph is longer than flat");
    }

    #[test]
    fn breakdown_total_is_sum_of_parts() {
        let params = unit_params();
        // Mean below the target volume so the two-sided penalty is active.
        let profile = Profile::cosine(1.0, 0.97, 0.05, 16).unwrap();
        let state =
            solve_configuration(&profile, &empty_measure(params.r0), params.lame(), 16).unwrap();
        let pen = PenaltyTerm { kind: PenaltyKind::TwoSided, coefficient: 2.0 };
        let anc = Anchoring { beta: 0.5, anchor: params.flat_profile(8).unwrap() };
        let b = penalized_energy(&state, &params, Some(&pen), Some(&anc)).unwrap();
        let sum = b.elastic + b.surface + b.cuts + b.nucleation + b.penalty + b.anchoring;
        assert_eq!(b.total, sum);
        assert!(b.penalty > 0.0 && b.anchoring > 0.0);
    }

    #[test]
    fn penalty_values_match_definitions() {
        let two = PenaltyTerm { kind: PenaltyKind::TwoSided, coefficient: 3.0 };
        let one = PenaltyTerm { kind: PenaltyKind::OneSidedDeficit, coefficient: 3.0 };
        assert!((two.value(0.9, 1.0) - 0.3).abs() < 1e-15);
        assert!((two.value(1.1, 1.0) - 0.3).abs() < 1e-15);
        assert!((one.value(0.9, 1.0) - 0.3).abs() < 1e-15);
        assert_eq!(one.value(1.1, 1.0), 0.0);
    }

    #[test]
    fn default_penalty_makes_refilling_favorable() {
        let params = unit_params();
        let pen = PenaltyTerm {
            kind: PenaltyKind::TwoSided,
            coefficient: params.default_penalty_coefficient(),
        };
        let full = params.flat_profile(16).unwrap();
        let deficient = Profile::flat(1.0, 0.9, 16).unwrap();
        let sigma = empty_measure(params.r0);
        let e_full = penalized_energy(
            &solve_configuration(&full, &sigma, params.lame(), 16).unwrap(),
            &params,
            Some(&pen),
            None,
        )
        .unwrap()
        .total;
        let e_deficient = penalized_energy(
            &solve_configuration(&deficient, &sigma, params.lame(), 16).unwrap(),
            &params,
            Some(&pen),
            None,
        )
        .unwrap()
        .total;
        // Deficit of 0.1 should cost 0.1 * (1.1 - 1) * W0 more than refilling.
        let margin = e_deficient - e_full;
        let want = 0.1 * 0.1 * params.w0();
        assert!(
            (margin - want).abs() < 1e-9,
            "refill margin {margin}, want {want}"
        );
    }

    #[test]
    fn anchoring_integral_constant_offset() {
        let p = Profile::flat(1.0, 1.0, 16).unwrap();
        let a = Profile::flat(1.0, 0.9, 8).unwrap();
        let v = anchoring_integral(&p, &a).unwrap();
        assert!((v - 0.01).abs() < 1e-14);
        let anc = Anchoring { beta: 2.0, anchor: a };
        let params = unit_params();
        let state = solve_configuration(&p, &empty_measure(0.1), params.lame(), 16).unwrap();
        let b = penalized_energy(&state, &params, None, Some(&anc)).unwrap();
        assert!((b.anchoring - 0.02).abs() < 1e-13);
    }

    #[test]
    fn anchoring_integral_piecewise_linear_exactness() {
        let p = Profile::from_heights(1.0, &[1.0, 1.2, 1.0, 0.8]).unwrap();
        let a = Profile::cosine(1.0, 1.0, 0.07, 6).unwrap();
        let exact = anchoring_integral(&p, &a).unwrap();
        // Dense midpoint rule as an independent check.
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            let d = p.eval(x) - a.eval(x);
            acc += d * d / n as f64;
        }
        assert!((exact - acc).abs() < 1e-9, "exact {exact} vs dense {acc}");
    }

    #[test]
    fn anchoring_rejects_period_mismatch() {
        let p = Profile::flat(1.0, 1.0, 8).unwrap();
        let a = Profile::flat(2.0, 1.0, 8).unwrap();
        assert!(anchoring_integral(&p, &a).is_err());
    }

    #[test]
    fn flat_film_is_stationary() {
        let params = unit_params();
        let profile = params.flat_profile(32).unwrap();
        let state =
            solve_configuration(&profile, &empty_measure(params.r0), params.lame(), 32).unwrap();
        let r = euler_lagrange_residual(&state, &params).unwrap();
        assert!(r < 1e-8, "flat residual {r}");
    }

    #[test]
    fn perturbed_film_is_not_stationary() {
        let params = unit_params();
        let profile = Profile::cosine(1.0, 1.0, 0.1, 32).unwrap();
        let state =
            solve_configuration(&profile, &empty_measure(params.r0), params.lame(), 32).unwrap();
        let r = euler_lagrange_residual(&state, &params).unwrap();
        assert!(r > 0.5, "cosine bump residual unexpectedly small: {r}");
    }
}
