use serde::Serialize;

use super::WavePacketField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Intensity history along the ray `n = v t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayTrace<T> {
    pub v: T,
    pub times: Vec<T>,
    /// `|a_n|² + |b_n|²` at the cell nearest to `v t`.
    pub intensities: Vec<T>,
    /// Set when the ray left the lattice and samples were taken at the edge.
    pub clamped: bool,
}

/// Reads the intensity at cell `round(v t)` from each snapshot. Snapshots
/// whose time does not increase are skipped.
pub fn sample_ray<'a, T: Real, I>(snapshots: I, v: T) -> RayTrace<T>
where
    I: IntoIterator<Item = &'a WavePacketField<T>>,
{
    let mut trace = RayTrace { v, times: Vec::new(), intensities: Vec::new(), clamped: false };
    for snap in snapshots {
        if trace.times.last().is_some_and(|&last| snap.t() <= last) {
            continue;
        }
        let half = snap.half();
        let target = (v * snap.t()).round().to_isize().unwrap_or(if v > T::zero() { isize::MAX } else { isize::MIN });
        let n = target.clamp(-half, half);
        trace.clamped |= n != target;
        trace.times.push(snap.t());
        trace.intensities.push(snap.intensity_at(n).expect("clamped index"));
    }
    trace
}

/// Least-squares slope of `ln I` against `t` over samples with `t ≥ t_min`,
/// halved to give an amplitude growth rate.
pub fn fit_growth<T: Real>(trace: &RayTrace<T>, t_min: T) -> Result<T> {
    const NEEDED: usize = 10;
    let points: Vec<(T, T)> = trace
        .times
        .iter()
        .zip(&trace.intensities)
        .filter(|(t, i)| **t >= t_min && **i > T::zero() && i.is_finite())
        .map(|(t, i)| (*t, i.ln()))
        .collect();
    if points.len() < NEEDED {
        return Err(Error::InsufficientData { usable: points.len(), needed: NEEDED });
    }
    let count = T::from_count(points.len());
    let mean_t = points.iter().map(|p| p.0).sum::<T>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / count;
    let sxx: T = points.iter().map(|p| (p.0 - mean_t) * (p.0 - mean_t)).sum();
    let sxy: T = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    if sxx == T::zero() {
        return Err(Error::InsufficientData { usable: 1, needed: NEEDED });
    }
    Ok(sxy / sxx / T::lit(2.0))
}
