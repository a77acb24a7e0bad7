//! Bessel functions of the first kind and integer order.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `|x|` accepted by [`bessel_j`].
pub const BESSEL_X_MAX: f64 = 50.0;
const SERIES_X_MAX: f64 = 12.0;

/// `J_n(x)` for `n ≥ 0` and `|x| ≤ 50`.
///
/// Uses the ascending power series for `|x| ≤ 12` and Miller's downward
/// recurrence, normalized by `J₀ + 2ΣJ_{2k} = 1`, beyond that (orders
/// above 200 always use the series).
pub fn bessel_j<T: Real>(n: u32, x: T) -> Result<T> {
    if !x.is_finite() || x.abs() > T::lit(BESSEL_X_MAX) {
        return Err(Error::RangeError { x: x.to_f64().unwrap_or(f64::NAN), limit: BESSEL_X_MAX });
    }
    let sign = if x < T::zero() && n % 2 == 1 { -T::one() } else { T::one() };
    let ax = x.abs();
    // High orders have no cancellation in the series and underflow quickly.
    let value = if ax <= T::lit(SERIES_X_MAX) || n > 200 { series(n, ax) } else { miller(n, ax) };
    Ok(sign * value)
}

fn series<T: Real>(n: u32, x: T) -> T {
    let half = x * T::lit(0.5);
    let mut term = T::one();
    for k in 1..=n {
        term = term * half / T::from_count(k as usize);
        if term == T::zero() {
            break;
        }
    }
    if term == T::zero() {
        return T::zero();
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200usize {
        term = term * q / (T::from_count(k) * T::from_count(k + n as usize));
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs().max(T::lit(1e-300)) {
            break;
        }
    }
    sum
}

fn miller<T: Real>(n: u32, x: T) -> T {
    let xf = x.to_f64().unwrap_or(BESSEL_X_MAX);
    let top = (n as f64).max(xf);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;
    let two_over_x = T::lit(2.0) / x;
    let mut above = T::zero();
    let mut current = T::lit(1e-30);
    let mut wanted = T::zero();
    let mut norm = T::zero();
    for k in (1..=start).rev() {
        // J_{k−1} = (2k/x) J_k − J_{k+1}
        let below = two_over_x * T::from_count(k) * current - above;
        above = current;
        current = below;
        if k - 1 == n as usize {
            wanted = current;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm = norm + T::lit(2.0) * current;
        }
        if current.abs() > T::lit(1e250) {
            let s = T::lit(1e-250);
            current = current * s;
            above = above * s;
            wanted = wanted * s;
            norm = norm * s;
        }
    }
    norm = norm + current;
    wanted / norm
}
