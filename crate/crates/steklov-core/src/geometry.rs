//! Annulus parameters and the bipolar coordinate frame.
//!
//! An eccentric annulus is described by the inner radius `r1`, the outer
//! radius `r2` and the distance `t` between the two centers. For `t > 0`
//! there is a unique bipolar frame `(alpha, xi1, xi2)` in which both
//! boundary circles become coordinate lines `xi = xi_j` with
//! `0 < xi2 < xi1`; the annulus interior is the rectangle
//! `xi2 < xi < xi1`, `-pi < theta <= pi`.

use crate::math;
use crate::{Error, Result};

/// Region between two circles, the inner strictly inside the outer.
///
/// Derived quantity: the boundary gap `eps = r2 - r1 - t`, positive for
/// every valid annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    r1: f64,
    r2: f64,
    t: f64,
}

impl Annulus {
    /// Validates `0 < r1 < r2` and `0 <= t < r2 - r1`.
    pub fn new(r1: f64, r2: f64, t: f64) -> Result<Self> {
        let ok = r1.is_finite()
            && r2.is_finite()
            && t.is_finite()
            && 0.0 < r1
            && r1 < r2
            && 0.0 <= t
            && t < r2 - r1;
        if ok {
            Ok(Self { r1, r2, t })
        } else {
            Err(Error::InvalidAnnulus { r1, r2, t })
        }
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Gap between the two boundary circles, `r2 - r1 - t`.
    pub fn eps(&self) -> f64 {
        self.r2 - self.r1 - self.t
    }

    pub fn is_concentric(&self) -> bool {
        self.t == 0.0
    }

    /// Bipolar frame of the annulus; fails with [`Error::DegenerateFrame`]
    /// at `t = 0` where the pole distance diverges.
    pub fn bipolar_frame(&self) -> Result<BipolarFrame> {
        if self.t == 0.0 {
            return Err(Error::DegenerateFrame);
        }
        let (r1, r2, t) = (self.r1, self.r2, self.t);
        // (r2 -+ r1)^2 - t^2 in factored form; keeps full precision both
        // for t -> 0 and for the near-touching limit eps -> 0.
        let p = math::sqrt((r2 + r1 - t) * (r2 + r1 + t));
        let q = math::sqrt(self.eps() * (r2 - r1 + t));
        let alpha = p * q / (2.0 * t);
        let xi1 = math::asinh(alpha / r1);
        let xi2 = math::asinh(alpha / r2);
        Ok(BipolarFrame { alpha, xi1, xi2 })
    }

    /// Leading small-gap behavior of the frame.
    pub fn asymptotic_frame(&self) -> AsymptoticFrame {
        let (r1, r2) = (self.r1, self.r2);
        let r_star = math::sqrt(2.0 * r1 * r2 / (r2 - r1));
        let sqrt_eps = math::sqrt(self.eps());
        AsymptoticFrame {
            r_star,
            alpha_hat: r_star * sqrt_eps,
            xi_hat_1: r_star / r1 * sqrt_eps,
            xi_hat_2: r_star / r2 * sqrt_eps,
        }
    }
}

/// Bipolar frame `(alpha, xi1, xi2)` with poles at `(+-alpha, 0)`.
///
/// The level values satisfy `r_j sinh(xi_j) = alpha` and `0 < xi2 < xi1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipolarFrame {
    pub alpha: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl BipolarFrame {
    /// Width `xi1 - xi2` of the annulus in the frame.
    pub fn gap(&self) -> f64 {
        self.xi1 - self.xi2
    }

    /// Cartesian point of the bipolar coordinates `(xi, theta)`.
    pub fn to_cartesian(&self, xi: f64, theta: f64) -> (f64, f64) {
        let den = math::cosh(xi) + math::cos(theta);
        (
            self.alpha * math::sinh(xi) / den,
            self.alpha * math::sin(theta) / den,
        )
    }

    /// Common scale factor of both coordinates, `alpha / (cosh xi + cos theta)`.
    pub fn scale_factor(&self, xi: f64, theta: f64) -> f64 {
        self.alpha / (math::cosh(xi) + math::cos(theta))
    }

    /// Abscissa of the center of the level circle `xi = level`
    /// (`alpha coth(level)`); its radius is `alpha / sinh(level)`.
    pub fn circle_center(&self, level: f64) -> f64 {
        self.alpha * math::cosh(level) / math::sinh(level)
    }
}

/// Leading terms of the frame as the boundary gap `eps` closes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFrame {
    /// Scale constant `sqrt(2 r1 r2 / (r2 - r1))`.
    pub r_star: f64,
    /// Leading term of `alpha`, `r_star sqrt(eps)`.
    pub alpha_hat: f64,
    /// Leading term of `xi1`, `(r_star / r1) sqrt(eps)`.
    pub xi_hat_1: f64,
    /// Leading term of `xi2`, `(r_star / r2) sqrt(eps)`.
    pub xi_hat_2: f64,
}
