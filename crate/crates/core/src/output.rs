//! CSV and JSON writers. Floats are printed with 17 significant digits so a
//! value read back from either format is bit-identical.

use std::io::Write;

use serde::Serialize;

use crate::config::Format;
use crate::error::Result;
use crate::sweep::{BandRun, GapFitReport, SpectrumRun};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_spectrum_csv(run: &SpectrumRun, out: &mut impl Write) -> Result<()> {
    let derivative = run.rows.iter().any(|r| r.dt_domega.is_some());
    out.write_all(if derivative { b"omega,T,R,dT_domega\n" } else { b"omega,T,R\n" })?;
    for row in &run.rows {
        write!(out, "{},{},{}", num(row.omega), num(row.t), num(row.r))?;
        if derivative {
            write!(out, ",{}", row.dt_domega.map(num).unwrap_or_default())?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_bands_csv(run: &BandRun, out: &mut impl Write) -> Result<()> {
    out.write_all(b"omega,T,R,cos_KL,forbidden,spacing\n")?;
    for row in &run.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(row.omega),
            num(row.t),
            num(row.r),
            num(row.cos_kl),
            u8::from(row.forbidden),
            num(row.spacing)
        )?;
    }
    Ok(())
}

pub fn write_gapfit_csv(report: &GapFitReport, out: &mut impl Write) -> Result<()> {
    out.write_all(b"J,delta_omega_B\n")?;
    for &(j, d) in &report.fit.j_samples {
        writeln!(out, "{},{}", num(j), num(d))?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, out: &mut impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Anything the CLI can emit in either format.
pub trait Emit {
    fn write_csv(&self, out: &mut dyn Write) -> Result<()>;

    fn write_json(&self, out: &mut dyn Write) -> Result<()>;

    fn emit(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

macro_rules! emit_impl {
    ($ty:ty, $csv:path) => {
        impl Emit for $ty {
            fn write_csv(&self, mut out: &mut dyn Write) -> Result<()> {
                $csv(self, &mut out)
            }

            fn write_json(&self, mut out: &mut dyn Write) -> Result<()> {
                write_json(self, &mut out)
            }
        }
    };
}

emit_impl!(SpectrumRun, write_spectrum_csv);
emit_impl!(BandRun, write_bands_csv);
emit_impl!(GapFitReport, write_gapfit_csv);
