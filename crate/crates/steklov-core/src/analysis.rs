//! Coefficient-ratio diagnostics, analytic bounds, the eigenvalue derivative
//! in the center offset, small-gap asymptotics, and an independent
//! continued-fraction eigenvalue oracle.
//!
//! The scaled modal coefficients `A~_n` of the first eigenfunction obey the
//! three-term recurrence `A~_{n+2} = -A~_{n+1} T_{n+1} - A~_n` with
//!
//! ```text
//! T_n = 2 cosh(xi2) - (2 alpha sigma / n) tanh(n (xi1 - xi2)).
//! ```
//!
//! The true coefficient sequence is the minimal solution of that recurrence,
//! so the consecutive ratios `F_n = A~_{n+1} / A~_n` are recovered stably
//! only by backward recursion `F_{n-1} = -1 / (T_n + F_n)` (a continued
//! fraction); forward iteration locks onto the dominant branch and is kept
//! as a diagnostic only. For `T_n > 2` the ratio map has the fixed points
//! `L_n <= U_n < 0`, nested toward the limits `L_inf = -e^{xi2}` and
//! `U_inf = -e^{-xi2}`.

use alloc::vec::Vec;

use crate::eigenfunction::EigenfunctionSeries;
use crate::geometry::{Annulus, BipolarFrame};
use crate::math::{self, Kahan};
use crate::{Error, Result};

/// Eigenvalue of the concentric annulus, `1 / (r2 ln(r2/r1))`; the maximum
/// over the center offset.
pub fn concentric_value(r1: f64, r2: f64) -> Result<f64> {
    check_radii(r1, r2)?;
    Ok(1.0 / (r2 * math::ln(r2 / r1)))
}

/// Lower bound for the liminf of the eigenvalue as the boundaries touch,
/// `r1 / (2 r2 (r2 - r1))`.
pub fn liminf_lower(r1: f64, r2: f64) -> Result<f64> {
    check_radii(r1, r2)?;
    Ok(r1 / (2.0 * r2 * (r2 - r1)))
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if r1.is_finite() && r2.is_finite() && 0.0 < r1 && r1 < r2 {
        Ok(())
    } else {
        Err(Error::InvalidAnnulus { r1, r2, t: 0.0 })
    }
}

/// Variational upper bound `M(t)` from the distance test function
/// `|x - (t, 0)| - r1`.
pub fn upper_bound_m(annulus: &Annulus) -> f64 {
    let (r1, r2, t) = (annulus.r1(), annulus.r2(), annulus.t());
    let chord = chord_integral(r2, t);
    core::f64::consts::PI * (r2 * r2 - r1 * r1)
        / (2.0 * core::f64::consts::PI * r2 * (r2 * r2 + r1 * r1 + t * t) - 4.0 * r1 * r2 * chord)
}

/// `int_0^pi sqrt(r2^2 - 2 r2 t cos(phi) + t^2) dphi` by Gauss-Legendre
/// quadrature with node doubling.
fn chord_integral(r2: f64, t: f64) -> f64 {
    let integrand = |phi: f64| math::sqrt(r2 * r2 - 2.0 * r2 * t * math::cos(phi) + t * t);
    let mut prev = f64::NAN;
    let mut n = 16;
    loop {
        let (nodes, weights) = crate::quad::gauss_legendre(n);
        let half = 0.5 * core::f64::consts::PI;
        let mut acc = Kahan::default();
        for (&x, &w) in nodes.iter().zip(&weights) {
            acc.add(w * integrand(half * (x + 1.0)));
        }
        let integral = half * acc.value();
        let delta = math::abs(integral - prev);
        if delta < 1e-13 * math::abs(integral) || n > 2048 {
            return integral;
        }
        prev = integral;
        n *= 2;
    }
}

/// Combined eigenvalue cap `min(M(t), sigma_1^0)` used by the ratio ladder.
pub fn sigma_cap(annulus: &Annulus) -> f64 {
    let concentric = concentric_value(annulus.r1(), annulus.r2())
        .expect("annulus invariants guarantee valid radii");
    upper_bound_m(annulus).min(concentric)
}

/// Smallest index from which `T_n > 2` is guaranteed:
/// `n0 = ceil(alpha sigma_cap / (cosh(xi2) - 1))`.
pub fn n0_threshold(frame: &BipolarFrame, sigma_cap: f64) -> usize {
    if sigma_cap <= 0.0 {
        return 0;
    }
    // cosh(xi2) - 1 without cancellation: x^2 / (sqrt(x^2 + 1) + 1) at
    // x = sinh(xi2).
    let x = math::sinh(frame.xi2);
    let denom = x * x / (math::sqrt(x * x + 1.0) + 1.0);
    math::ceil(frame.alpha * sigma_cap / denom) as usize
}

/// Recursion parameter `T_n` for a single index.
pub fn t_value(frame: &BipolarFrame, sigma: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * math::cosh(frame.xi2) - 2.0 * frame.alpha * sigma / n * math::tanh(n * frame.gap())
}

/// `T_1 .. T_{n_max}`.
pub fn t_sequence(frame: &BipolarFrame, sigma: f64, n_max: usize) -> Vec<f64> {
    (1..=n_max).map(|n| t_value(frame, sigma, n)).collect()
}

/// Scaled coefficients `A~_1 .. A~_{n_max}` by forward recursion, linear in
/// the seed `a0`.
///
/// Forward recursion follows the dominant branch of the recurrence, so for
/// any inexact eigenvalue the tail diverges with ratio tending to
/// `-e^{xi2}`; use it as a residual or divergence diagnostic, never to read
/// off ratios.
pub fn ladder_forward(frame: &BipolarFrame, sigma: f64, a0: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return out;
    }
    let (alpha, xi1, xi2) = (frame.alpha, frame.xi1, frame.xi2);
    let a1 = a0 * math::cosh(xi2) / xi1 - a0 * alpha * sigma * (1.0 - xi2 / xi1);
    out.push(a1);
    if n_max == 1 {
        return out;
    }
    let a2 =
        a0 / xi1 + 2.0 * alpha * sigma * a1 * math::tanh(frame.gap()) - 2.0 * a1 * math::cosh(xi2);
    out.push(a2);
    for n in 1..=n_max - 2 {
        let next = -out[n] * t_value(frame, sigma, n + 1) - out[n - 1];
        out.push(next);
    }
    out
}

/// First ratio `A~_2 / A~_1` straight from the recursion seeds; the `a0`
/// factor cancels.
pub fn f1_explicit(frame: &BipolarFrame, sigma: f64) -> f64 {
    let ladder = ladder_forward(frame, sigma, 1.0, 2);
    ladder[1] / ladder[0]
}

/// Minimal-solution ratios `F_{n_lo} .. F_{n_hi}` by backward recursion
/// seeded with `F_{n_hi} = U_inf = -e^{-xi2}`.
///
/// The backward map contracts toward the minimal solution, so entries more
/// than a few dozen indices below `n_hi` are seed-independent; treat the
/// top of the returned window as contaminated.
pub fn f_ratio_backward(
    frame: &BipolarFrame,
    sigma: f64,
    n_lo: usize,
    n_hi: usize,
) -> Result<Vec<f64>> {
    assert!(1 <= n_lo && n_lo <= n_hi, "need 1 <= n_lo <= n_hi");
    let mut out = alloc::vec![0.0; n_hi - n_lo + 1];
    let mut f = -math::exp(-frame.xi2);
    out[n_hi - n_lo] = f;
    for n in (n_lo + 1..=n_hi).rev() {
        let denom = t_value(frame, sigma, n) + f;
        if math::abs(denom) < 1e-300 {
            return Err(Error::DivisionNearZero { index: n });
        }
        f = -1.0 / denom;
        if n > n_lo {
            out[n - 1 - n_lo] = f;
        }
    }
    Ok(out)
}

/// Fixed points `(L_n, U_n)` of the ratio map `x -> -T_n - 1/x`; the pair
/// `(-1, -1)` when `T_n <= 2`.
pub fn fixed_points(frame: &BipolarFrame, sigma: f64, n: usize) -> (f64, f64) {
    fixed_points_of_t(t_value(frame, sigma, n))
}

/// Fixed points from the recursion parameter itself.
pub fn fixed_points_of_t(t_n: f64) -> (f64, f64) {
    if t_n <= 2.0 {
        return (-1.0, -1.0);
    }
    let l = (-t_n - math::sqrt(t_n * t_n - 4.0)) / 2.0;
    // U = 1/L by Vieta; avoids the cancellation in (-T + sqrt(T^2-4))/2.
    (l, 1.0 / l)
}

/// Limits `(L_inf, U_inf) = (-e^{xi2}, -e^{-xi2})` of the fixed points.
pub fn ratio_limits(frame: &BipolarFrame) -> (f64, f64) {
    (-math::exp(frame.xi2), -math::exp(-frame.xi2))
}

/// Ratio diagnostics for `n = 1 ..= n_len`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientLadder {
    pub sigma: f64,
    /// Sandwich threshold from [`n0_threshold`].
    pub n0: usize,
    /// `T_n`, index `i` holding `n = i + 1`.
    pub t: Vec<f64>,
    /// Backward-recursion ratios `F_n`.
    pub f: Vec<f64>,
    /// Lower fixed points `L_n`.
    pub l: Vec<f64>,
    /// Upper fixed points `U_n`.
    pub u: Vec<f64>,
    pub l_inf: f64,
    pub u_inf: f64,
}

/// Assembles the full ladder at a computed eigenvalue.
///
/// The backward recursion is seeded far enough beyond `n_len` that every
/// returned ratio is seed-independent.
pub fn coefficient_ladder(
    annulus: &Annulus,
    frame: &BipolarFrame,
    sigma: f64,
    n_len: usize,
) -> Result<CoefficientLadder> {
    assert!(n_len >= 1);
    let n0 = n0_threshold(frame, sigma_cap(annulus));
    let buffer = 400.max(math::ceil(20.0 / frame.xi2) as usize);
    let f = {
        let mut full = f_ratio_backward(frame, sigma, 1, n_len + buffer)?;
        full.truncate(n_len);
        full
    };
    let t = t_sequence(frame, sigma, n_len);
    let (l, u): (Vec<f64>, Vec<f64>) = t.iter().map(|&tn| fixed_points_of_t(tn)).unzip();
    let (l_inf, u_inf) = ratio_limits(frame);
    Ok(CoefficientLadder {
        sigma,
        n0,
        t,
        f,
        l,
        u,
        l_inf,
        u_inf,
    })
}

/// Analytic bounds of the eigenvalue for one annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// Variational upper bound `M(t)`.
    pub upper_m: f64,
    /// Concentric value `sigma_1^0`, the maximum over the offset.
    pub concentric: f64,
    /// Near-touching liminf lower bound.
    pub liminf_lower: f64,
}

pub fn bounds_report(annulus: &Annulus) -> BoundsReport {
    BoundsReport {
        upper_m: upper_bound_m(annulus),
        concentric: concentric_value(annulus.r1(), annulus.r2())
            .expect("annulus invariants guarantee valid radii"),
        liminf_lower: liminf_lower(annulus.r1(), annulus.r2())
            .expect("annulus invariants guarantee valid radii"),
    }
}

/// Derivative of the first eigenvalue in the center offset, from the modal
/// series of the normalized eigenfunction:
///
/// ```text
/// d sigma / dt = (2 pi / alpha) ( a0^2/xi1^2 - (2 a0/xi1) A_1 cosh(xi1)
///                + 2 sum_n (A_n^2 + A_n A_{n+1} cosh(xi1)) )
/// ```
///
/// negative across the offset range: the eigenvalue only decreases as the
/// annulus loses symmetry.
pub fn shape_derivative(series: &EigenfunctionSeries) -> Result<f64> {
    if !series.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let frame = series.frame();
    let a0 = series.a0();
    let modes = series.modes();
    let cosh_xi1 = math::cosh(frame.xi1);

    let mut acc = Kahan::default();
    acc.add(a0 * a0 / (frame.xi1 * frame.xi1));
    let first = modes.first().copied().unwrap_or(0.0);
    acc.add(-2.0 * a0 / frame.xi1 * first * cosh_xi1);
    for (i, &a) in modes.iter().enumerate() {
        let next = modes.get(i + 1).copied().unwrap_or(0.0);
        let term = 2.0 * (a * a + a * next * cosh_xi1);
        if math::abs(term) < 1e-16 * math::abs(acc.value()) {
            break;
        }
        acc.add(term);
    }
    Ok(2.0 * core::f64::consts::PI / frame.alpha * acc.value())
}

/// Independent eigenvalue oracle: root of
/// `Phi(sigma) = F_1_explicit(sigma) - F_1_backward(sigma)`
/// by bisection over `bracket`.
///
/// The explicit ratio comes from the recursion seeds, the backward one from
/// the continued fraction; they agree exactly when `sigma` is an eigenvalue.
/// `Phi` is negative below the first eigenvalue, and between consecutive
/// eigenvalues it passes through a pole, so the default bracket
/// `(1e-6, sigma_1^0)` is first scanned for the lowest sign change; an
/// explicit bracket must isolate a single root and is bisected as given.
pub fn eigenvalue_by_continued_fraction(
    annulus: &Annulus,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    let frame = annulus.bipolar_frame()?;

    let n_hi =
        n0_threshold(&frame, sigma_cap(annulus)) + 600.max(math::ceil(20.0 / frame.xi2) as usize);
    let phi = |sigma: f64| -> Result<f64> {
        let mut f = -math::exp(-frame.xi2);
        for n in (2..=n_hi).rev() {
            let denom = t_value(&frame, sigma, n) + f;
            if math::abs(denom) < 1e-300 {
                return Err(Error::DivisionNearZero { index: n });
            }
            f = -1.0 / denom;
        }
        Ok(f1_explicit(&frame, sigma) - f)
    };

    let (mut lo, mut hi) = match bracket {
        Some((lo, hi)) => (lo, hi),
        None => {
            // Thin annuli fit further eigenvalues (and the poles between
            // them) under the concentric cap; take the lowest crossing.
            let lo = 1e-6;
            let hi = concentric_value(annulus.r1(), annulus.r2())?;
            let cells = 256;
            let width = (hi - lo) / cells as f64;
            let mut left = lo;
            let mut phi_left = phi(left)?;
            let mut found = None;
            for cell in 1..=cells {
                let right = lo + width * cell as f64;
                let phi_right = phi(right)?;
                if phi_left == 0.0 {
                    return Ok(left);
                }
                if (phi_left > 0.0) != (phi_right > 0.0) {
                    found = Some((left, right));
                    break;
                }
                left = right;
                phi_left = phi_right;
            }
            found.ok_or(Error::NoRootInBracket { lo, hi })?
        }
    };
    assert!(lo < hi, "bracket must be ordered");

    let phi_lo = phi(lo)?;
    if phi_lo == 0.0 {
        return Ok(lo);
    }
    let phi_hi = phi(hi)?;
    if phi_hi == 0.0 {
        return Ok(hi);
    }
    if (phi_lo > 0.0) == (phi_hi > 0.0) {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let phi_mid = phi(mid)?;
        if phi_mid == 0.0 {
            return Ok(mid);
        }
        if (phi_mid > 0.0) == (phi_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    // A pole also flips the sign across it; there |Phi| blows up instead of
    // vanishing.
    if math::abs(phi(root)?) > 1e-3 {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    Ok(root)
}

/// Small-gap predictions for `T_n` and `U_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticLadder {
    /// `R_n = 1 - sigma (2 r2 (r2 - r1) / r1) tanh(n g)/(n g)`.
    pub r: Vec<f64>,
    /// `2 + (2 r1 / (r2 (r2 - r1))) R_n eps`, accurate to `O(eps^2)`.
    pub predicted_t: Vec<f64>,
    /// `-e^{-sqrt(R_n^+) xi2}`, accurate to `O(eps)`.
    pub predicted_u: Vec<f64>,
}

/// Evaluates the ladder for `n = 1 ..= n_max`; meaningful for small gaps.
pub fn asymptotic_ladder(
    annulus: &Annulus,
    frame: &BipolarFrame,
    sigma: f64,
    n_max: usize,
) -> AsymptoticLadder {
    let (r1, r2) = (annulus.r1(), annulus.r2());
    let eps = annulus.eps();
    let gap = frame.gap();
    let shape = 2.0 * r2 * (r2 - r1) / r1;
    let mut r = Vec::with_capacity(n_max);
    let mut predicted_t = Vec::with_capacity(n_max);
    let mut predicted_u = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let s = n as f64 * gap;
        let rn = 1.0 - sigma * shape * math::tanh(s) / s;
        r.push(rn);
        predicted_t.push(2.0 + 2.0 * r1 / (r2 * (r2 - r1)) * rn * eps);
        predicted_u.push(-math::exp(-math::sqrt(rn.max(0.0)) * frame.xi2));
    }
    AsymptoticLadder {
        r,
        predicted_t,
        predicted_u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenfunction::series_from_eigvec;
    use crate::spectral::{finite_section, smallest_eigpair, solve_first_eigenvalue};

    fn solved(r1: f64, r2: f64, t: f64) -> (Annulus, BipolarFrame, f64, usize) {
        let a = Annulus::new(r1, r2, t).unwrap();
        let f = a.bipolar_frame().unwrap();
        let c = solve_first_eigenvalue(&a, 1e-12, 4096).unwrap();
        (a, f, c.sigma, c.n_final)
    }

    #[test]
    fn closed_form_values() {
        assert!((concentric_value(1.0, 3.0).unwrap() - 1.0 / (3.0 * 3.0_f64.ln())).abs() <= 1e-16);
        assert!((liminf_lower(1.0, 3.0).unwrap() - 1.0 / 12.0).abs() <= 1e-16);
        assert!(concentric_value(3.0, 1.0).is_err());
        assert!(liminf_lower(-1.0, 1.0).is_err());
    }

    #[test]
    fn upper_bound_concentric_closed_form() {
        // Constant integrand at t = 0 gives M(0) = (r1 + r2)/(2 r2 (r2 - r1)).
        let a = Annulus::new(1.0, 3.0, 0.0).unwrap();
        assert!((upper_bound_m(&a) - 1.0 / 3.0).abs() <= 1e-13);
        let a = Annulus::new(0.4, 1.1, 0.0).unwrap();
        let expected = 1.5 / (2.2 * 0.7);
        assert!((upper_bound_m(&a) - expected).abs() <= 1e-13 * expected);
    }

    #[test]
    fn chord_integral_degenerate_closed_form() {
        // At t = r2 the integrand is 2 r2 sin(phi/2); integral 4 r2.
        assert!((chord_integral(1.0, 1.0) - 4.0).abs() <= 1e-12);
        assert!((chord_integral(2.5, 2.5) - 10.0).abs() <= 1e-12 * 10.0);
    }

    #[test]
    fn upper_bound_dominates_computed_eigenvalue() {
        for t in [0.4, 1.0, 1.6] {
            let (a, _, sigma, _) = solved(1.0, 3.0, t);
            assert!(sigma <= upper_bound_m(&a) + 1e-10);
            assert!(sigma <= concentric_value(1.0, 3.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn t_sequence_shape() {
        let (_, f, sigma, _) = solved(1.0, 3.0, 1.0);
        let t = t_sequence(&f, sigma, 400);
        let limit = 2.0 * f.xi2.cosh();
        for w in t.windows(2) {
            assert!(w[0] < w[1] && w[1] < limit);
        }
        assert!((t[399] - limit).abs() <= 1e-2);

        // sigma = 0 freezes the sequence at its limit.
        for v in t_sequence(&f, 0.0, 5) {
            assert!((v - limit).abs() <= 1e-15);
        }

        // Exact oracle for this frame: cosh(xi2) = 3/2, tanh(gap) = sqrt(5)/3,
        // hence T_1 = 3 - 5 sigma.
        assert!((t[0] - (3.0 - 5.0 * sigma)).abs() <= 1e-14);
    }

    #[test]
    fn forward_ladder_is_linear_in_a0() {
        // Linearity holds at the ladder scale; entrywise relative comparison
        // would amplify roundoff through the dominant branch as the minimal
        // solution decays.
        let (_, f, sigma, _) = solved(1.0, 3.0, 1.0);
        let one = ladder_forward(&f, sigma, 1.0, 6);
        let scaled = ladder_forward(&f, sigma, -3.5, 6);
        let magnitude = one.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for (x, y) in one.iter().zip(&scaled) {
            assert!((y - (-3.5) * x).abs() <= 1e-12 * 3.5 * magnitude);
        }
        // The leading ratio is a0-free.
        assert!((scaled[1] / scaled[0] - one[1] / one[0]).abs() <= 1e-12);
    }

    #[test]
    fn eigenvector_coefficients_satisfy_the_recursion() {
        let (_, f, _, n_final) = solved(1.0, 3.0, 1.2);
        let eig = smallest_eigpair(&finite_section(&f, n_final)).unwrap();
        let series = series_from_eigvec(&f, &eig).unwrap();
        let scaled = series.scaled_modes();
        let t = t_sequence(&f, series.sigma(), scaled.len());
        let magnitude = scaled.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let floor = 1e3 * f64::EPSILON * magnitude;
        for n in 1..scaled.len() - 1 {
            if scaled[n - 1].abs() < floor || scaled[n].abs() < floor {
                break;
            }
            let residual = scaled[n + 1] + scaled[n] * t[n] + scaled[n - 1];
            assert!(
                residual.abs() <= 1e-9 * magnitude,
                "recursion residual {residual:.2e} at n={n}"
            );
        }
    }

    #[test]
    fn forward_iteration_diverges_to_the_dominant_ratio() {
        // Negative control: a slightly wrong eigenvalue sends the forward
        // ladder to the repelling limit -e^{xi2}. The fixed points approach
        // their limits like 1/n, so the tolerance follows that envelope.
        let (_, f, sigma, _) = solved(1.0, 3.0, 1.0);
        let ladder = ladder_forward(&f, sigma + 1e-6, 1.0, 600);
        let (l_inf, _) = ratio_limits(&f);
        let near = ladder[599] / ladder[598];
        let far = ladder[149] / ladder[148];
        assert!(
            (near - l_inf).abs() <= 5e-3 * l_inf.abs(),
            "ratio {near} vs {l_inf}"
        );
        assert!((near - l_inf).abs() < (far - l_inf).abs());
    }

    #[test]
    fn backward_recursion_is_seed_insensitive() {
        let (_, f, sigma, _) = solved(1.0, 3.0, 1.0);
        let n_hi = 300;
        let base = f_ratio_backward(&f, sigma, 1, n_hi).unwrap();
        // Rerun with a 1e-3 relative seed perturbation, by hand.
        let mut fval = -(-f.xi2).exp() * (1.0 + 1e-3);
        let mut perturbed = alloc::vec![0.0; n_hi];
        perturbed[n_hi - 1] = fval;
        for n in (2..=n_hi).rev() {
            fval = -1.0 / (t_value(&f, sigma, n) + fval);
            perturbed[n - 2] = fval;
        }
        for n in 1..=n_hi - 60 {
            assert!(
                (base[n - 1] - perturbed[n - 1]).abs() <= 1e-12,
                "seed sensitivity at n={n}"
            );
        }
    }

    #[test]
    fn backward_ratios_approach_the_limit() {
        let (a, f, sigma, _) = solved(1.0, 3.0, 1.0);
        let ladder = coefficient_ladder(&a, &f, sigma, 4000).unwrap();
        let u_inf = -((3.0 - 5.0_f64.sqrt()) / 2.0); // -e^{-xi2} = -(3-sqrt 5)/2
        assert!((ladder.u_inf + u_inf.abs()).abs() <= 1e-14);
        // 1/n approach: deviation at n=4000 under 2x the deviation envelope.
        let dev = (ladder.f[3999] - ladder.u_inf).abs();
        assert!(dev <= 2.0 * f.alpha * sigma / 4000.0, "deviation {dev:.2e}");
        let dev_small = (ladder.f[99] - ladder.u_inf).abs();
        assert!(dev > 0.0 && dev < dev_small);
    }

    #[test]
    fn sandwich_and_nesting_hold_beyond_the_threshold() {
        for t in [0.4, 1.0, 1.6] {
            let (a, f, sigma, _) = solved(1.0, 3.0, t);
            let ladder = coefficient_ladder(&a, &f, sigma, 400).unwrap();
            let n0 = ladder.n0.max(1);
            for n in n0..=n0 + 200 {
                let tn = ladder.t[n - 1];
                assert!(tn > 2.0, "T_{n} = {tn} not above 2 at t={t}");
                let (l_n, u_n) = (ladder.l[n - 1], ladder.u[n - 1]);
                let (l_n1, u_n1) = (ladder.l[n], ladder.u[n]);
                assert!(
                    ladder.l_inf < l_n1
                        && l_n1 < l_n
                        && l_n < u_n
                        && u_n < u_n1
                        && u_n1 < ladder.u_inf
                        && ladder.u_inf < 0.0,
                    "nesting broken at n={n}, t={t}"
                );
                let f_n = ladder.f[n - 1];
                assert!(
                    u_n1 < f_n && f_n < ladder.u_inf,
                    "sandwich broken at n={n}, t={t}: U={u_n1} F={f_n} Uinf={}",
                    ladder.u_inf
                );
            }
        }
    }

    #[test]
    fn fixed_point_identities() {
        let (_, f, sigma, _) = solved(1.0, 3.0, 1.0);
        assert_eq!(fixed_points_of_t(2.0), (-1.0, -1.0));
        assert_eq!(fixed_points_of_t(1.5), (-1.0, -1.0));
        for n in [3, 9, 50] {
            let (l, u) = fixed_points(&f, sigma, n);
            assert!((l * u - 1.0).abs() <= 4.0 * f64::EPSILON);
            assert!((l + u + t_value(&f, sigma, n)).abs() <= 1e-14);
        }
        // T_n -> 2 cosh(xi2) sends the pair to (-e^{xi2}, -e^{-xi2}).
        let (l, u) = fixed_points_of_t(2.0 * f.xi2.cosh());
        let (l_inf, u_inf) = ratio_limits(&f);
        assert!((l - l_inf).abs() <= 1e-13 && (u - u_inf).abs() <= 1e-13);
    }

    #[test]
    fn threshold_behaviour() {
        let (a, f, sigma, _) = solved(1.0, 3.0, 1.0);
        assert_eq!(n0_threshold(&f, 0.0), 0);
        let n0 = n0_threshold(&f, sigma_cap(&a));
        assert!((1..=16).contains(&n0), "n0 = {n0}");
        for (i, tn) in t_sequence(&f, sigma, 400).iter().enumerate().skip(n0 - 1) {
            assert!(*tn > 2.0, "T_{} <= 2", i + 1);
        }
    }

    #[test]
    fn threshold_grows_inversely_with_alpha() {
        // Near touching, cosh(xi2) - 1 ~ (alpha/r2)^2 / 2, so the threshold
        // behaves like 2 r2^2 sigma_cap / alpha.
        let a = Annulus::new(1.0, 3.0, 2.0 - 1e-4).unwrap();
        let f = a.bipolar_frame().unwrap();
        let cap = sigma_cap(&a);
        let n0 = n0_threshold(&f, cap) as f64;
        let predicted = 2.0 * 9.0 * cap / f.alpha;
        assert!(
            n0 >= 0.99 * predicted && n0 <= 1.01 * predicted + 1.0,
            "n0 = {n0} vs predicted {predicted}"
        );
    }

    #[test]
    fn derivative_requires_normalization() {
        let (_, f, _, n_final) = solved(1.0, 3.0, 1.2);
        let eig = smallest_eigpair(&finite_section(&f, n_final)).unwrap();
        let raw = series_from_eigvec(&f, &eig).unwrap();
        assert_eq!(shape_derivative(&raw).unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let t = 0.8;
        let (_, f, _, n_final) = solved(1.0, 3.0, t);
        let eig = smallest_eigpair(&finite_section(&f, n_final)).unwrap();
        let series = series_from_eigvec(&f, &eig).unwrap().normalize().unwrap();
        let derivative = shape_derivative(&series).unwrap();
        assert!(derivative < 0.0);

        let h = 1e-5;
        let plus = solved(1.0, 3.0, t + h).2;
        let minus = solved(1.0, 3.0, t - h).2;
        let fd = (plus - minus) / (2.0 * h);
        assert!(
            (derivative - fd).abs() <= 1e-5 * fd.abs(),
            "series {derivative} vs fd {fd}"
        );
    }

    #[test]
    fn continued_fraction_agrees_with_finite_section() {
        for (t, reference) in [(0.4, 0.280415816559), (1.96, 0.161288441909)] {
            let a = Annulus::new(1.0, 3.0, t).unwrap();
            let cf = eigenvalue_by_continued_fraction(&a, None).unwrap();
            assert!(
                (cf - reference).abs() <= 1e-9,
                "t={t}: cf={cf} vs {reference}"
            );
        }
    }

    #[test]
    fn phi_changes_sign_across_the_eigenvalue() {
        // The continued-fraction mismatch, assembled from the public pieces,
        // straddles zero around the finite-section value on every reference
        // row.
        for frac in [0.2, 0.4, 0.6, 0.8, 0.98] {
            let (_, f, sigma, _) = solved(1.0, 3.0, 2.0 * frac);
            let phi = |s: f64| f1_explicit(&f, s) - f_ratio_backward(&f, s, 1, 900).unwrap()[0];
            let below = phi(sigma * (1.0 - 1e-4));
            let above = phi(sigma * (1.0 + 1e-4));
            assert!(
                below * above < 0.0,
                "no sign change at t_frac={frac}: {below:.3e}, {above:.3e}"
            );
        }
    }

    #[test]
    fn oracle_equivalence_beyond_reference_radii() {
        for (r1, r2, t) in [(0.35, 1.0, 0.3), (2.0, 5.0, 2.4), (0.8, 1.0, 0.15)] {
            let a = Annulus::new(r1, r2, t).unwrap();
            let fs = solve_first_eigenvalue(&a, 1e-12, 4096).unwrap().sigma;
            let cf = eigenvalue_by_continued_fraction(&a, None).unwrap();
            assert!(
                (cf - fs).abs() <= 1e-9,
                "({r1}, {r2}, {t}): cf={cf:.12} vs fs={fs:.12}"
            );
        }
    }

    #[test]
    fn continued_fraction_rejects_rootless_brackets() {
        let (a, _, sigma, _) = solved(1.0, 3.0, 1.0);
        match eigenvalue_by_continued_fraction(&a, Some((1e-6, 0.5 * sigma))) {
            Err(Error::NoRootInBracket { .. }) => {}
            other => panic!("expected NoRootInBracket, got {other:?}"),
        }
    }

    #[test]
    fn continued_fraction_requires_offset_frame() {
        let a = Annulus::new(1.0, 3.0, 0.0).unwrap();
        assert_eq!(
            eigenvalue_by_continued_fraction(&a, None).unwrap_err(),
            Error::DegenerateFrame
        );
    }

    #[test]
    fn asymptotic_r_is_uniformly_bounded() {
        for eps in [1e-2, 1e-3] {
            let a = Annulus::new(1.0, 3.0, 2.0 - eps).unwrap();
            let f = a.bipolar_frame().unwrap();
            let sigma = solve_first_eigenvalue(&a, 1e-12, 1 << 14).unwrap().sigma;
            let ladder = asymptotic_ladder(&a, &f, sigma, 64);
            let bound = 1.0 + sigma * 2.0 * 3.0 * 2.0 / 1.0;
            for (rn, (tn, un)) in ladder
                .r
                .iter()
                .zip(ladder.predicted_t.iter().zip(&ladder.predicted_u))
            {
                assert!(rn.abs() <= bound);
                assert!(*tn > 0.0 && *un < 0.0 && *un >= -1.0);
            }
        }
    }
}
