//! CSV writers for fields, intensity histories, band tables and spectra.
//!
//! Every number is written in `{:.16e}` form so the files round-trip `f64`
//! exactly.

use std::io::{self, Write};

use crate::floquet::QuasiEnergyBand;
use crate::propagator::{RayTrace, WavePacketField};
use crate::scalar::{Cplx, Real};
use crate::spectrum::ComplexSpectrum;

pub const FIELD_HEADER: &str = "t,n,re_a,im_a,re_b,im_b";
pub const INTENSITY_HEADER: &str = "t,intensity";
pub const BAND_HEADER: &str = "q,re_Eplus,im_Eplus,re_Eminus,im_Eminus";
pub const SPECTRUM_HEADER: &str = "index,re_E,im_E";

fn num<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// One row per cell: `t,n,re_a,im_a,re_b,im_b`.
pub fn write_field<T: Real, W: Write>(out: &mut W, field: &WavePacketField<T>) -> io::Result<()> {
    writeln!(out, "{FIELD_HEADER}")?;
    write_field_rows(out, field)
}

/// Several snapshots under a single header.
pub fn write_fields<'a, T: Real, W: Write>(
    out: &mut W,
    fields: impl IntoIterator<Item = &'a WavePacketField<T>>,
) -> io::Result<()> {
    writeln!(out, "{FIELD_HEADER}")?;
    for f in fields {
        write_field_rows(out, f)?;
    }
    Ok(())
}

fn write_field_rows<T: Real, W: Write>(out: &mut W, field: &WavePacketField<T>) -> io::Result<()> {
    let t = num(field.t());
    for (i, (a, b)) in field.a().iter().zip(field.b()).enumerate() {
        let n = i as isize - field.half();
        writeln!(out, "{t},{n},{},{},{},{}", num(a.re), num(a.im), num(b.re), num(b.im))?;
    }
    Ok(())
}

/// `t,intensity` along a ray.
pub fn write_intensity<T: Real, W: Write>(out: &mut W, trace: &RayTrace<T>) -> io::Result<()> {
    writeln!(out, "{INTENSITY_HEADER}")?;
    for (t, i) in trace.times.iter().zip(&trace.intensities) {
        writeln!(out, "{},{}", num(*t), num(*i))?;
    }
    Ok(())
}

/// `q,re_Eplus,im_Eplus,re_Eminus,im_Eminus` from parallel columns.
pub fn write_bands<T: Real, W: Write>(out: &mut W, q: &[T], plus: &[Cplx<T>], minus: &[Cplx<T>]) -> io::Result<()> {
    if q.len() != plus.len() || q.len() != minus.len() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "band columns differ in length"));
    }
    writeln!(out, "{BAND_HEADER}")?;
    for ((q, p), m) in q.iter().zip(plus).zip(minus) {
        writeln!(out, "{},{},{},{},{}", num(*q), num(p.re), num(p.im), num(m.re), num(m.im))?;
    }
    Ok(())
}

/// Quasi-energy bands in the band-table layout.
pub fn write_quasi_energies<T: Real, W: Write>(out: &mut W, band: &QuasiEnergyBand<T>) -> io::Result<()> {
    write_bands(out, &band.q_grid, &band.e_plus, &band.e_minus)
}

/// `index,re_E,im_E` in the spectrum's sort order.
pub fn write_spectrum<W: Write>(out: &mut W, spectrum: &ComplexSpectrum) -> io::Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for (k, e) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(out, "{k},{},{}", num(e.re), num(e.im))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn field_rows_round_trip() {
        let f = WavePacketField::from_fn(2, 0.5, |n| (cplx(n as f64 / 3.0, 1.0), cplx(0.0, -0.1))).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], FIELD_HEADER);
        assert_eq!(lines.len(), 4);
        let cols: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cols[1], "-1");
        assert_eq!(cols[2].parse::<f64>().unwrap(), -1.0 / 3.0);
    }

    #[test]
    fn band_columns_must_agree() {
        let mut buf = Vec::new();
        let err = write_bands(&mut buf, &[0.0_f64, 1.0], &[cplx(0.0, 0.0)], &[cplx(0.0, 0.0)]).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::InvalidInput);
    }

    #[test]
    fn intensity_table() {
        let trace = RayTrace { v: 0.0, times: vec![0.0_f32, 1.0], intensities: vec![1.0, 2.0], clamped: false };
        let mut buf = Vec::new();
        write_intensity(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "1.0000000000000000e0,2.0000000000000000e0");
    }
}
