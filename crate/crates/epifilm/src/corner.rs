//! Corner-singularity exponents at reentrant surface corners.
//!
//! At a corner of opening `omega` the displacement behaves like
//! `r^alpha` with `alpha` a root of
//!
//! `f(alpha) = sin^2(alpha omega) - alpha^2 sin^2(omega)`
//!
//! in the strip `0 < Re alpha < 1`. `alpha = 0` is always a double zero
//! and `alpha = 1` is always a zero; both sit on the strip boundary and
//! are excluded. Roots are found by Newton iteration on `f / f'` (which
//! has only simple zeros, so double roots converge quadratically too)
//! from a dense grid of complex seeds, deduplicated, and the count is
//! cross-checked against the argument-principle winding number of `f`
//! around the search rectangle; a mismatch is an enumeration error, not a
//! result.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Inset of the search rectangle from the strip edges `Re = 0` and
/// `Re = 1`, both of which always carry zeros of `f`.
pub const EDGE_INSET: f64 = 1e-3;

/// Half-height of the search rectangle; strip roots of this family are
/// real, so any modest height works, and the winding check would flag a
/// root escaping above it.
const IM_MAX: f64 = 2.5;

/// Largest acceptable `|f(alpha)|` at a reported root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;

/// Newton step length under which the iteration counts as converged.
const STEP_TOL: f64 = 1e-12;

/// Two roots closer than this collapse into one.
const DEDUP_TOL: f64 = 1e-8;

/// `|f'|` below this at a root marks a multiple root.
const MULTIPLE_ROOT_TOL: f64 = 1e-8;

/// One corner exponent: a root of `f` in the open unit strip.
#[derive(Debug, Clone, Copy)]
pub struct CornerRoot {
    /// Corner opening the root belongs to.
    pub omega: f64,
    /// Root location.
    pub alpha: Complex64,
    /// `|f(alpha)|` at the reported location.
    pub residual: f64,
    /// Root multiplicity (1 or 2).
    pub multiplicity: usize,
}

/// All roots of the corner equation in `{EDGE_INSET <= Re <= 1 - EDGE_INSET}`,
/// sorted by real part, with the Newton enumeration verified against the
/// winding number of `f` around the search rectangle.
pub fn corner_roots(omega: f64) -> Result<Vec<CornerRoot>> {
    check_omega(omega)?;
    let roots = newton_enumerate(omega)?;
    let counted: usize = roots.iter().map(|r| r.multiplicity).sum();
    let wound = rectangle_winding(omega, EDGE_INSET, 1.0 - EDGE_INSET, IM_MAX)?;
    if counted != wound {
        return Err(Error::Enumeration(format!(
            "corner root count mismatch at omega = {omega}: Newton found {counted} \
             (with multiplicity), winding number says {wound}"
        )));
    }
    Ok(roots)
}

/// True when `f` has no roots with real part in `(EDGE_INSET, 1/2)`:
/// the winding number of the left half-strip rectangle vanishes. Valid
/// for openings strictly below `2 pi` (at `2 pi` a root sits exactly on
/// `Re = 1/2`).
pub fn left_strip_is_root_free(omega: f64) -> Result<bool> {
    check_omega(omega)?;
    Ok(rectangle_winding(omega, EDGE_INSET, 0.5, IM_MAX)? == 0)
}

/// The corner function `f(alpha) = sin^2(alpha omega) - alpha^2 sin^2 omega`.
pub fn corner_function(omega: f64, alpha: Complex64) -> Complex64 {
    let s = (alpha * omega).sin();
    s * s - alpha * alpha * omega.sin().powi(2)
}

/// Derivative `f'(alpha) = omega sin(2 alpha omega) - 2 alpha sin^2 omega`.
pub fn corner_derivative(omega: f64, alpha: Complex64) -> Complex64 {
    (alpha * 2.0 * omega).sin() * omega - alpha * 2.0 * omega.sin().powi(2)
}

/// Second derivative `f''(alpha) = 2 omega^2 cos(2 alpha omega) - 2 sin^2 omega`.
fn corner_second_derivative(omega: f64, alpha: Complex64) -> Complex64 {
    (alpha * 2.0 * omega).cos() * 2.0 * omega * omega
        - Complex64::new(2.0 * omega.sin().powi(2), 0.0)
}

// ---------------------------------------------------------------------------
// Newton enumeration
// ---------------------------------------------------------------------------

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega <= 2.0 * std::f64::consts::PI + 1e-12) {
        return Err(Error::Validation(format!(
            "corner opening must lie in (0, 2 pi], got {omega}"
        )));
    }
    Ok(())
}

fn newton_enumerate(omega: f64) -> Result<Vec<CornerRoot>> {
    let mut found: Vec<Complex64> = Vec::new();
    let re_lo = EDGE_INSET;
    let re_hi = 1.0 - EDGE_INSET;

    let mut seeds = Vec::new();
    let n_re = 50;
    for i in 0..=n_re {
        let re = re_lo + (re_hi - re_lo) * i as f64 / n_re as f64;
        let mut im = -2.0;
        while im <= 2.0 + 1e-12 {
            seeds.push(Complex64::new(re, im));
            im += 0.25;
        }
    }

    for seed in seeds {
        if let Some(alpha) = newton_refine(omega, seed) {
            // Snap essentially real roots onto the axis (f is real on it).
            let alpha = if alpha.im.abs() < 1e-10 { Complex64::new(alpha.re, 0.0) } else { alpha };
            if alpha.re < re_lo - 1e-12
                || alpha.re > re_hi + 1e-12
                || alpha.im.abs() > IM_MAX
                || corner_function(omega, alpha).norm() > ROOT_RESIDUAL_TOL
            {
                continue;
            }
            if !found.iter().any(|r| (r - alpha).norm() < DEDUP_TOL) {
                found.push(alpha);
            }
        }
    }

    found.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(found
        .into_iter()
        .map(|alpha| {
            let fp = corner_derivative(omega, alpha).norm();
            CornerRoot {
                omega,
                alpha,
                residual: corner_function(omega, alpha).norm(),
                multiplicity: if fp < MULTIPLE_ROOT_TOL { 2 } else { 1 },
            }
        })
        .collect())
}

/// Damped Newton iteration on `g = f / f'`, whose zeros are exactly the
/// zeros of `f` but all simple. Returns the converged location or `None`.
fn newton_refine(omega: f64, seed: Complex64) -> Option<Complex64> {
    let g_and_step = |z: Complex64| -> Option<Complex64> {
        let f = corner_function(omega, z);
        let fp = corner_derivative(omega, z);
        let fpp = corner_second_derivative(omega, z);
        if fp.norm() == 0.0 && f.norm() == 0.0 {
            return Some(Complex64::new(0.0, 0.0));
        }
        // g = f/f', g' = 1 - f f''/f'^2; Newton step g/g'.
        let denom = fp * fp - f * fpp;
        if denom.norm() < 1e-300 {
            return None;
        }
        Some(f * fp / denom)
    };

    let mut z = seed;
    for _ in 0..80 {
        let step = g_and_step(z)?;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        // Damping: shrink the step while it increases |f| wildly.
        let mut damped = step;
        let f0 = corner_function(omega, z).norm();
        let mut improved = false;
        for _ in 0..10 {
            let trial = z - damped;
            if corner_function(omega, trial).norm() <= f0.max(1e-300) * 4.0 {
                z = trial;
                improved = true;
                break;
            }
            damped *= 0.5;
        }
        if !improved {
            return None;
        }
        if damped.norm() < STEP_TOL && corner_function(omega, z).norm() <= ROOT_RESIDUAL_TOL {
            return Some(z);
        }
        if z.re.abs() > 10.0 || z.im.abs() > 10.0 {
            return None;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Winding number
// ---------------------------------------------------------------------------

/// Number of zeros of `f` (with multiplicity) inside the rectangle
/// `[re_lo, re_hi] x [-im, im]` by the argument principle, tracking the
/// phase adaptively along the boundary.
fn rectangle_winding(omega: f64, re_lo: f64, re_hi: f64, im: f64) -> Result<usize> {
    let corners = [
        Complex64::new(re_lo, -im),
        Complex64::new(re_hi, -im),
        Complex64::new(re_hi, im),
        Complex64::new(re_lo, im),
        Complex64::new(re_lo, -im),
    ];
    let mut total = 0.0;
    for pair in corners.windows(2) {
        total += edge_phase(omega, pair[0], pair[1], 0)?;
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 || rounded < -0.1 {
        return Err(Error::Enumeration(format!(
            "winding number did not settle on an integer at omega = {omega}: {turns}"
        )));
    }
    Ok(rounded as usize)
}

/// Phase change of `f` along one segment, subdividing until each piece
/// stays within a quarter turn (so no full turn can hide inside a piece).
fn edge_phase(omega: f64, a: Complex64, b: Complex64, depth: usize) -> Result<f64> {
    if depth > 48 {
        return Err(Error::Enumeration(
            "phase tracking hit maximal subdivision; a root sits on or near the contour".into(),
        ));
    }
    let fa = corner_function(omega, a);
    let fb = corner_function(omega, b);
    if fa.norm() < 1e-140 || fb.norm() < 1e-140 {
        return Err(Error::Enumeration(
            "corner function vanishes on the winding contour".into(),
        ));
    }
    let ratio = fb / fa;
    let dphi = ratio.arg();
    // Accept only small phase moves on pieces that are already fine enough
    // to rule out a hidden full turn.
    if depth >= 6 && dphi.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(dphi);
    }
    let m = (a + b) * 0.5;
    Ok(edge_phase(omega, a, m, depth + 1)? + edge_phase(omega, m, b, depth + 1)?)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Real strip roots frozen from an independent high-precision solve of
    /// the corner equation.
    const FROZEN: &[(f64, &[f64])] = &[
        (1.1, &[0.833691073820]),
        (1.2, &[0.717799308407]),
        (1.3, &[0.636727720598]),
        (1.4, &[0.581141528741]),
        (1.5, &[0.544483736782, 0.908529189846]),
        (1.6, &[0.521710607470, 0.795785096359]),
        (1.7, &[0.508800183030, 0.701175002767]),
        (1.8, &[0.502529920375, 0.621710449029]),
        (1.9, &[0.500310368854, 0.555201530048]),
    ];

    #[test]
    fn frozen_table_of_real_roots() {
        for (mult, expected) in FROZEN {
            let omega = mult * PI;
            let roots = corner_roots(omega).unwrap();
            assert_eq!(
                roots.len(),
                expected.len(),
                "root count at omega = {mult} pi: got {:?}",
                roots.iter().map(|r| r.alpha).collect::<Vec<_>>()
            );
            for (root, want) in roots.iter().zip(*expected) {
                assert_eq!(root.alpha.im, 0.0, "strip roots must be real");
                assert!(
                    (root.alpha.re - want).abs() < 1e-9,
                    "omega = {mult} pi: got {}, want {want}",
                    root.alpha.re
                );
                assert_eq!(root.multiplicity, 1);
                assert!(root.residual <= ROOT_RESIDUAL_TOL);
            }
        }
    }

    #[test]
    fn full_slit_has_double_root_at_half() {
        let roots = corner_roots(2.0 * PI).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].alpha.re - 0.5).abs() < 1e-9);
        assert_eq!(roots[0].alpha.im, 0.0);
        assert_eq!(roots[0].multiplicity, 2);
    }

    #[test]
    fn flat_and_convex_corners_have_no_strip_roots() {
        for omega in [0.5 * PI, 0.6 * PI, PI] {
            let roots = corner_roots(omega).unwrap();
            assert!(roots.is_empty(), "omega = {omega}: {roots:?}");
        }
    }

    #[test]
    fn all_reentrant_roots_sit_right_of_one_half() {
        for (mult, _) in FROZEN {
            let omega = mult * PI;
            for r in corner_roots(omega).unwrap() {
                assert!(r.alpha.re > 0.5, "omega = {mult} pi root {}", r.alpha.re);
            }
            assert!(left_strip_is_root_free(omega).unwrap(), "omega = {mult} pi");
        }
    }

    #[test]
    fn unit_root_is_excluded() {
        // alpha = 1 solves f identically; it must never be reported.
        for mult in [1.3, 1.7, 2.0] {
            let omega = mult * PI;
            assert!((corner_function(omega, Complex64::new(1.0, 0.0))).norm() < 1e-12);
            for r in corner_roots(omega).unwrap() {
                assert!(r.alpha.re <= 1.0 - EDGE_INSET + 1e-9);
            }
        }
    }

    #[test]
    fn winding_count_stable_under_taller_rectangle() {
        for mult in [1.2, 1.5, 1.9] {
            let omega = mult * PI;
            let a = rectangle_winding(omega, EDGE_INSET, 1.0 - EDGE_INSET, IM_MAX).unwrap();
            let b = rectangle_winding(omega, EDGE_INSET, 1.0 - EDGE_INSET, 4.0).unwrap();
            assert_eq!(a, b, "omega = {mult} pi");
        }
    }

    #[test]
    fn conjugate_symmetry_of_function() {
        let omega = 1.37 * PI;
        for z in [Complex64::new(0.3, 0.7), Complex64::new(0.8, -1.1)] {
            let f = corner_function(omega, z);
            let fc = corner_function(omega, z.conj());
            assert!((f.conj() - fc).norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_openings_rejected() {
        assert!(corner_roots(0.0).is_err());
        assert!(corner_roots(-1.0).is_err());
        assert!(corner_roots(7.0).is_err());
    }
}
