//! Oracles shared by the integration targets.

use std::f64::consts::PI;

/// Advection strength at which the two v = 0 saddles of the κ = σ = 1,
/// φ = π/2 lattice meet on the real axis.
///
/// A real critical point of `E₊(q) = 2ρ sin q + √(2 + 2cos q − g²)` needs
/// `ρ = h(q) = sin q / (2 cos q √R)`; the collision is the minimum of `h`
/// over the unbroken arc just above π, found by golden-section search.
pub fn saddle_collision_rho(g: f64) -> f64 {
    let h = |q: f64| q.sin() / (2.0 * q.cos() * (2.0 + 2.0 * q.cos() - g * g).sqrt());
    let edge = 2.0 * PI - (g * g / 2.0 - 1.0).acos();
    let (mut a, mut b) = (edge + 1e-12, PI + 1.0);
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if h(c) < h(d) {
            b = d;
        } else {
            a = c;
        }
    }
    h(0.5 * (a + b))
}
