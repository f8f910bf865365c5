//! First eigenfunction as a modal series in bipolar coordinates.
//!
//! The eigenfunction of the finite section is
//!
//! ```text
//! u(xi, theta) = a0 (1 - xi/xi1)
//!                - sum_k (2/k) A_k sinh(k (xi1 - xi)) cos(k theta)
//! ```
//!
//! which vanishes identically on the inner boundary `xi = xi1` by
//! construction. The modal coefficients come from the eigenvector
//! coordinates in the weighted cosine basis; normalization fixes the squared
//! boundary trace integral on the outer circle to one with positive mean.

use alloc::vec::Vec;

use crate::geometry::BipolarFrame;
use crate::math::{self, Kahan};
use crate::spectral::{mode_weights, EigenResult};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// Modal series of the first eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSeries {
    frame: BipolarFrame,
    sigma: f64,
    a0: f64,
    /// `A_1 .. A_{n-1}` with `A_k = k a_k e^{k xi1}`.
    modes: Vec<f64>,
    normalized: bool,
}

impl EigenfunctionSeries {
    pub fn frame(&self) -> &BipolarFrame {
        &self.frame
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Constant coefficient `a0`.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Modal coefficients `A_1 .. A_{n-1}`.
    pub fn modes(&self) -> &[f64] {
        &self.modes
    }

    /// Scaled coefficients `A~_k = A_k cosh(k (xi1 - xi2))`.
    pub fn scaled_modes(&self) -> Vec<f64> {
        let gap = self.frame.gap();
        self.modes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if a == 0.0 {
                    0.0
                } else {
                    a * math::cosh((i + 1) as f64 * gap)
                }
            })
            .collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Series value at `(xi, theta)`, summed from the highest mode down
    /// with compensated accumulation.
    pub fn evaluate(&self, xi: f64, theta: f64) -> Result<f64> {
        if !(self.frame.xi2..=self.frame.xi1).contains(&xi) {
            return Err(Error::OutOfDomain { xi });
        }
        let mut acc = Kahan::default();
        for (i, &a) in self.modes.iter().enumerate().rev() {
            if a == 0.0 {
                continue;
            }
            let k = (i + 1) as f64;
            acc.add(-(2.0 / k) * a * math::sinh(k * (self.frame.xi1 - xi)) * math::cos(k * theta));
        }
        acc.add(self.a0 * (1.0 - xi / self.frame.xi1));
        Ok(acc.value())
    }

    /// Trace on the outer boundary, `u(xi2, theta)`.
    pub fn boundary_trace(&self, theta: f64) -> f64 {
        let (c0, tc) = self.trace_coefficients();
        eval_cosine_series(c0, &tc, theta)
    }

    /// Outward normal derivative on the outer boundary,
    /// `-(cosh xi2 + cos theta)/alpha * du/dxi |_{xi2}`.
    pub fn boundary_flux(&self, theta: f64) -> f64 {
        let scaled = self.scaled_modes();
        let mut acc = Kahan::default();
        for (i, &at) in scaled.iter().enumerate().rev() {
            acc.add(2.0 * at * math::cos((i + 1) as f64 * theta));
        }
        acc.add(-self.a0 / self.frame.xi1);
        -(math::cosh(self.frame.xi2) + math::cos(theta)) / self.frame.alpha * acc.value()
    }

    /// Rescales so the squared trace integrates to one over the outer
    /// boundary, with positive mean.
    pub fn normalize(&self) -> Result<Self> {
        let (c0, tc) = self.trace_coefficients();
        let square = boundary_integral(&self.frame, |theta| {
            let u = eval_cosine_series(c0, &tc, theta);
            u * u
        })?;
        let mean = boundary_integral(&self.frame, |theta| eval_cosine_series(c0, &tc, theta))?;
        let norm = math::sqrt(square);
        let scale = if mean < 0.0 { -1.0 / norm } else { 1.0 / norm };
        if !scale.is_finite() {
            return Err(Error::ZeroFunction);
        }
        Ok(Self {
            frame: self.frame,
            sigma: self.sigma,
            a0: self.a0 * scale,
            modes: self.modes.iter().map(|&a| a * scale).collect(),
            normalized: true,
        })
    }

    /// Variational upper bound `I_m`: closed-form Dirichlet integral over
    /// the squared-trace boundary integral. Scale-free.
    pub fn rayleigh_quotient(&self) -> Result<f64> {
        let gap = self.frame.gap();
        // Green's identity turns the Dirichlet integral into
        // -int trace * du/dxi dtheta at xi2; cosine orthogonality leaves
        // one product of trace-scale and flux-scale coefficients per mode.
        let mut acc = Kahan::default();
        for (i, &a) in self.modes.iter().enumerate().rev() {
            if a == 0.0 {
                continue;
            }
            let k = (i + 1) as f64;
            let trace_k = a * math::sinh(k * gap);
            let flux_k = a * math::cosh(k * gap);
            acc.add(2.0 * TWO_PI / k * trace_k * flux_k);
        }
        acc.add(
            TWO_PI * self.a0 * self.a0 * (1.0 - self.frame.xi2 / self.frame.xi1) / self.frame.xi1,
        );
        let numerator = acc.value();

        let (c0, tc) = self.trace_coefficients();
        let denominator = boundary_integral(&self.frame, |theta| {
            let u = eval_cosine_series(c0, &tc, theta);
            u * u
        })?;
        if denominator <= 0.0 || !denominator.is_finite() {
            return Err(Error::ZeroFunction);
        }
        Ok(numerator / denominator)
    }

    /// Constant term and cosine coefficients of the trace at `xi = xi2`.
    fn trace_coefficients(&self) -> (f64, Vec<f64>) {
        let gap = self.frame.gap();
        let c0 = self.a0 * (1.0 - self.frame.xi2 / self.frame.xi1);
        let tc = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if a == 0.0 {
                    0.0
                } else {
                    let k = (i + 1) as f64;
                    -(2.0 / k) * a * math::sinh(k * gap)
                }
            })
            .collect();
        (c0, tc)
    }
}

/// Cosine series `c0 + sum c_k cos(k theta)` by the Chebyshev three-term
/// recurrence (no transcendental call per mode).
fn eval_cosine_series(c0: f64, coeffs: &[f64], theta: f64) -> f64 {
    let ct = math::cos(theta);
    let mut acc = Kahan::default();
    let mut prev = 1.0; // cos(0)
    let mut cur = ct; // cos(theta)
    for &c in coeffs {
        acc.add(c * cur);
        let next = 2.0 * ct * cur - prev;
        prev = cur;
        cur = next;
    }
    acc.add(c0);
    acc.value()
}

/// Reconstructs the series from a section eigenvector.
///
/// The basis correspondence is `a0 (1 - xi2/xi1) = c_0 / d_0` and
/// `-(2/k) A_k sinh(k (xi1 - xi2)) = c_k / d_k` for `k >= 1`.
pub fn series_from_eigvec(frame: &BipolarFrame, eig: &EigenResult) -> Result<EigenfunctionSeries> {
    if eig.frame() != frame || eig.coeffs.len() != eig.n {
        return Err(Error::FrameMismatch);
    }
    let weights = mode_weights(frame, eig.n);
    let gap = frame.gap();
    let a0 = eig.coeffs[0] / weights.d(0) / (1.0 - frame.xi2 / frame.xi1);
    let modes = (1..eig.n)
        .map(|k| {
            // sinh overflows once k * gap > ~710; the coordinate is then
            // far below the noise floor and the mode is exactly zero.
            let s = math::sinh(k as f64 * gap);
            if s.is_finite() {
                -(k as f64 / 2.0) * eig.coeffs[k] / weights.d(k) / s
            } else {
                0.0
            }
        })
        .collect();
    Ok(EigenfunctionSeries {
        frame: *frame,
        sigma: eig.sigma,
        a0,
        modes,
        normalized: false,
    })
}

/// Integral of `g` over the outer boundary circle, `dS = h dtheta` with the
/// bipolar scale factor `h`. Periodic trapezoid rule with node doubling
/// until the relative change drops below `1e-13`.
pub fn boundary_integral<F: Fn(f64) -> f64>(frame: &BipolarFrame, g: F) -> Result<f64> {
    let mut prev = f64::NAN;
    for m in 4..=20u32 {
        let n = 1usize << m;
        let mut acc = Kahan::default();
        for j in 0..n {
            let theta = -core::f64::consts::PI + TWO_PI * j as f64 / n as f64;
            acc.add(g(theta) * frame.scale_factor(frame.xi2, theta));
        }
        let integral = acc.value() * TWO_PI / n as f64;
        let delta = math::abs(integral - prev);
        if delta < 1e-13 * math::abs(integral) || delta == 0.0 {
            return Ok(integral);
        }
        prev = integral;
    }
    Err(Error::QuadratureStall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Annulus;
    use crate::spectral::{finite_section, smallest_eigpair, solve_first_eigenvalue};
    use core::f64::consts::PI;

    fn converged_series(r1: f64, r2: f64, t: f64) -> EigenfunctionSeries {
        let a = Annulus::new(r1, r2, t).unwrap();
        let frame = a.bipolar_frame().unwrap();
        let c = solve_first_eigenvalue(&a, 1e-12, 4096).unwrap();
        let eig = smallest_eigpair(&finite_section(&frame, c.n_final)).unwrap();
        series_from_eigvec(&frame, &eig).unwrap()
    }

    #[test]
    fn single_mode_inversion() {
        let frame = Annulus::new(1.0, 3.0, 1.0)
            .unwrap()
            .bipolar_frame()
            .unwrap();
        let section = finite_section(&frame, 4);
        let mut eig = smallest_eigpair(&section).unwrap();
        eig.coeffs = alloc::vec![1.0, 0.0, 0.0, 0.0];
        let s = series_from_eigvec(&frame, &eig).unwrap();
        let w = mode_weights(&frame, 4);
        let expected = 1.0 / w.d(0) / (1.0 - frame.xi2 / frame.xi1);
        assert!((s.a0() - expected).abs() <= 1e-15 * expected.abs());
        assert!(s.modes().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn frame_mismatch_is_rejected() {
        let frame = Annulus::new(1.0, 3.0, 1.0)
            .unwrap()
            .bipolar_frame()
            .unwrap();
        let other = Annulus::new(1.0, 3.0, 1.2)
            .unwrap()
            .bipolar_frame()
            .unwrap();
        let eig = smallest_eigpair(&finite_section(&frame, 8)).unwrap();
        assert_eq!(
            series_from_eigvec(&other, &eig).unwrap_err(),
            Error::FrameMismatch
        );
    }

    #[test]
    fn trace_round_trip_against_basis_expansion() {
        let a = Annulus::new(1.0, 3.0, 1.2).unwrap();
        let frame = a.bipolar_frame().unwrap();
        let c = solve_first_eigenvalue(&a, 1e-12, 4096).unwrap();
        let eig = smallest_eigpair(&finite_section(&frame, c.n_final)).unwrap();
        let s = series_from_eigvec(&frame, &eig).unwrap();
        let w = mode_weights(&frame, eig.n);
        let mut worst = 0.0_f64;
        for i in 0..512 {
            let theta = -PI + TWO_PI * i as f64 / 512.0;
            let direct: f64 = (0..eig.n)
                .map(|k| eig.coeffs[k] / w.d(k) * (k as f64 * theta).cos())
                .sum();
            worst = worst.max((s.boundary_trace(theta) - direct).abs());
            worst = worst.max((s.evaluate(frame.xi2, theta).unwrap() - direct).abs());
        }
        assert!(worst <= 1e-12, "trace round-trip error {worst:.2e}");
    }

    #[test]
    fn dirichlet_trace_vanishes_on_inner_circle() {
        let s = converged_series(1.0, 3.0, 1.2);
        let scale: f64 = s.modes().iter().fold(s.a0().abs(), |m, a| m.max(a.abs()));
        for i in 0..512 {
            let theta = -PI + TWO_PI * i as f64 / 512.0;
            let v = s.evaluate(s.frame().xi1, theta).unwrap();
            assert!(v.abs() <= 1e-12 * scale, "inner trace {v:.2e} at {theta}");
        }
    }

    #[test]
    fn evaluate_rejects_points_outside_the_annulus() {
        let s = converged_series(1.0, 3.0, 1.2);
        let f = *s.frame();
        assert!(matches!(
            s.evaluate(f.xi2 - 1e-9, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            s.evaluate(f.xi1 + 1e-9, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(s.evaluate(f.xi2, 0.0).is_ok());
        assert!(s.evaluate(f.xi1, 0.0).is_ok());
    }

    #[test]
    fn boundary_integral_closed_forms() {
        // weight integral: 2 pi r2; weight cancellation: 2 pi alpha;
        // first Fourier mode of the weight: -2 pi r2 e^{-xi2}.
        let frame = Annulus::new(1.0, 3.0, 1.0)
            .unwrap()
            .bipolar_frame()
            .unwrap();
        let circumference = boundary_integral(&frame, |_| 1.0).unwrap();
        assert!((circumference - 6.0 * PI).abs() <= 1e-10);

        let cancel = boundary_integral(&frame, |theta| frame.xi2.cosh() + theta.cos()).unwrap();
        assert!((cancel - TWO_PI * frame.alpha).abs() <= 1e-12 * frame.alpha);

        let first_mode = boundary_integral(&frame, |theta| theta.cos()).unwrap();
        let expected = -TWO_PI * 3.0 * (-frame.xi2).exp();
        assert!(
            (first_mode - expected).abs() <= 1e-10,
            "{first_mode} vs {expected}"
        );
    }

    #[test]
    fn normalization_contract() {
        let s = converged_series(1.0, 3.0, 1.2);
        let n = s.normalize().unwrap();
        assert!(n.is_normalized());
        let square = boundary_integral(n.frame(), |theta| {
            let u = n.boundary_trace(theta);
            u * u
        })
        .unwrap();
        assert!((square - 1.0).abs() <= 1e-10, "norm integral {square}");
        let mean = boundary_integral(n.frame(), |theta| n.boundary_trace(theta)).unwrap();
        assert!(mean > 0.0);
    }

    #[test]
    fn normalization_is_scale_invariant_and_idempotent() {
        let s = converged_series(1.0, 3.0, 1.2);
        let mut doubled = s.clone();
        doubled.a0 *= -2.0;
        for a in &mut doubled.modes {
            *a *= -2.0;
        }
        let n1 = s.normalize().unwrap();
        let n2 = doubled.normalize().unwrap();
        let n3 = n1.normalize().unwrap();
        assert!((n1.a0() - n2.a0()).abs() <= 1e-15 * n1.a0().abs());
        for (a, b) in n1.modes().iter().zip(n2.modes()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1e-300));
        }
        for (a, b) in n1.modes().iter().zip(n3.modes()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(1e-300));
        }
    }

    #[test]
    fn zero_function_is_rejected() {
        let mut s = converged_series(1.0, 3.0, 1.2);
        s.a0 = 0.0;
        for a in &mut s.modes {
            *a = 0.0;
        }
        assert_eq!(s.normalize().unwrap_err(), Error::ZeroFunction);
    }

    #[test]
    fn first_eigenfunction_is_nonnegative() {
        // Sign-fixed eigenfunction stays >= -1e-10 across the annulus.
        let n = converged_series(1.0, 3.0, 1.2).normalize().unwrap();
        let f = *n.frame();
        for i in 0..64 {
            let xi = f.xi2 + f.gap() * i as f64 / 63.0;
            for j in 0..128 {
                let theta = -PI + TWO_PI * j as f64 / 128.0;
                let u = n.evaluate(xi, theta).unwrap();
                assert!(u >= -1e-10, "u({xi},{theta}) = {u:.3e}");
            }
        }
    }

    #[test]
    fn flux_is_even_and_satisfies_robin_condition() {
        let n = converged_series(1.0, 3.0, 1.2).normalize().unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=720 {
            let theta = -PI + TWO_PI * i as f64 / 720.0;
            let flux = n.boundary_flux(theta);
            assert!((flux - n.boundary_flux(-theta)).abs() <= 1e-14 * flux.abs().max(1.0));
            worst = worst.max((flux - n.sigma() * n.boundary_trace(theta)).abs());
        }
        assert!(worst <= 1e-8, "Robin residual {worst:.2e}");
    }

    #[test]
    fn flux_pairing_recovers_the_eigenvalue() {
        let n = converged_series(1.0, 3.0, 1.2).normalize().unwrap();
        let paired = boundary_integral(n.frame(), |theta| {
            n.boundary_flux(theta) * n.boundary_trace(theta)
        })
        .unwrap();
        assert!(
            (paired - n.sigma()).abs() <= 1e-9,
            "{paired} vs {}",
            n.sigma()
        );
    }

    #[test]
    fn rayleigh_quotient_bounds_the_converged_eigenvalue() {
        let a = Annulus::new(1.0, 3.0, 1.2).unwrap();
        let frame = a.bipolar_frame().unwrap();
        let sigma_n = smallest_eigpair(&finite_section(&frame, 64)).unwrap().sigma;
        let mut prev_gap = f64::MAX;
        let mut floor_hit = false;
        for m in 1..=48 {
            let eig = smallest_eigpair(&finite_section(&frame, m)).unwrap();
            let s = series_from_eigvec(&frame, &eig).unwrap();
            let quotient = s.rayleigh_quotient().unwrap();
            assert!(quotient >= sigma_n - 1e-12, "m={m}: {quotient} < {sigma_n}");
            let gap = (quotient - sigma_n).abs();
            if !floor_hit {
                assert!(gap <= prev_gap.max(1e-12), "gap grew at m={m}");
            }
            if gap < 1e-12 {
                floor_hit = true;
            }
            prev_gap = gap;
        }
        assert!(floor_hit, "certificate gap never fell below 1e-12");
    }

    #[test]
    fn rayleigh_quotient_is_scale_free() {
        let s = converged_series(1.0, 3.0, 1.2);
        let q1 = s.rayleigh_quotient().unwrap();
        let mut scaled = s.clone();
        scaled.a0 *= -7.25;
        for a in &mut scaled.modes {
            *a *= -7.25;
        }
        let q2 = scaled.rayleigh_quotient().unwrap();
        assert!((q1 - q2).abs() <= 4.0 * f64::EPSILON * q1);
    }

    #[test]
    fn dirichlet_integral_matches_tensor_quadrature() {
        // Closed-form numerator vs 2-D Gauss-Legendre x trapezoid quadrature
        // of the gradient square; conformal invariance makes the flat
        // (xi, theta) integral the true Dirichlet integral.
        let s = converged_series(1.0, 3.0, 1.2);
        let f = *s.frame();
        let closed = {
            let den = boundary_integral(&f, |theta| {
                let u = s.boundary_trace(theta);
                u * u
            })
            .unwrap();
            s.rayleigh_quotient().unwrap() * den
        };

        let u_xi = |xi: f64, theta: f64| {
            let mut v = -s.a0() / f.xi1;
            for (i, &a) in s.modes().iter().enumerate() {
                let k = (i + 1) as f64;
                v += 2.0 * a * (k * (f.xi1 - xi)).cosh() * (k * theta).cos();
            }
            v
        };
        let u_theta = |xi: f64, theta: f64| {
            let mut v = 0.0;
            for (i, &a) in s.modes().iter().enumerate() {
                let k = (i + 1) as f64;
                v += 2.0 * a * (k * (f.xi1 - xi)).sinh() * (k * theta).sin();
            }
            v
        };

        let (nodes, weights) = crate::quad::gauss_legendre(64);
        let mut total = 0.0;
        let half = 0.5 * f.gap();
        let mid = 0.5 * (f.xi1 + f.xi2);
        let nt = 512;
        for (&x, &w) in nodes.iter().zip(&weights) {
            let xi = mid + half * x;
            let mut ring = 0.0;
            for j in 0..nt {
                let theta = -PI + TWO_PI * j as f64 / nt as f64;
                ring += u_xi(xi, theta).powi(2) + u_theta(xi, theta).powi(2);
            }
            total += w * half * ring * TWO_PI / nt as f64;
        }
        assert!(
            (closed - total).abs() <= 1e-8 * closed.abs(),
            "closed {closed} vs quadrature {total}"
        );
    }

    #[test]
    fn series_is_harmonic_in_frame_coordinates() {
        // 5-point Laplacian residual bounded by the fourth-derivative
        // envelope sum 2 k^3 |A~_k| times h^2/6.
        let s = converged_series(1.0, 3.0, 1.2);
        let f = *s.frame();
        let h = 1e-3;
        let d4: f64 = s
            .scaled_modes()
            .iter()
            .enumerate()
            .map(|(i, &at)| 2.0 * ((i + 1) as f64).powi(3) * at.abs())
            .sum();
        let tol = 1e-6 * d4.max(1.0);
        for i in 1..=10 {
            let xi = f.xi2 + f.gap() * i as f64 / 11.0;
            for j in 0..16 {
                let theta = -3.0 + 6.0 * j as f64 / 15.0;
                let c = s.evaluate(xi, theta).unwrap();
                let lap = (s.evaluate(xi + h, theta).unwrap()
                    + s.evaluate(xi - h, theta).unwrap()
                    + s.evaluate(xi, theta + h).unwrap()
                    + s.evaluate(xi, theta - h).unwrap()
                    - 4.0 * c)
                    / (h * h);
                assert!(
                    lap.abs() <= tol,
                    "Laplacian residual {lap:.2e} at ({xi},{theta})"
                );
            }
        }
    }

    #[test]
    fn quadrature_handles_odd_integrands() {
        let frame = Annulus::new(1.0, 3.0, 1.0)
            .unwrap()
            .bipolar_frame()
            .unwrap();
        let odd = boundary_integral(&frame, |theta| theta.sin()).unwrap();
        assert!(odd.abs() <= 1e-14);
    }
}
