//! Inverse-transform samplers for the continuous cut parameters.

use rand::Rng;

use crate::rng::open_closed_unit;

/// Draws the second-cut offset `kappa` on `(0, r]` with density
/// `eps / (kappa^(1 - eps) r^eps)`, i.e. CDF `(t / r)^eps`.
/// Tiny `epsilon` can underflow the power to zero; the result is clamped to
/// stay positive.
pub fn sample_kappa<G: Rng + ?Sized>(epsilon: f64, r: usize, rng: &mut G) -> f64 {
    (r as f64 * open_closed_unit(rng).powf(1.0 / epsilon)).max(f64::MIN_POSITIVE)
}

/// Draws a radius on `(0, r]` with density `(1 + alpha) t^alpha / r^(1 + alpha)`,
/// i.e. CDF `(t / r)^(1 + alpha)`.
pub fn sample_radius<G: Rng + ?Sized>(alpha: f64, r: usize, rng: &mut G) -> f64 {
    (r as f64 * open_closed_unit(rng).powf(1.0 / (1.0 + alpha))).max(f64::MIN_POSITIVE)
}
