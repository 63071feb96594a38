//! Energy CSV and NDJSON report writers.
//!
//! The energy CSV starts with a version comment line, then a fixed header:
//!
//! ```text
//! # bipolar-mhd energy v1
//! t,y,h2_u,v2_b,diss_bipolar,diss_gamma,diss_mag,work
//! ```

use std::io::{self, Read, Write};

use serde::Serialize;

use crate::analysis::EnergyRecord;

pub const ENERGY_CSV_VERSION_LINE: &str = "# bipolar-mhd energy v1";

pub fn write_energy_csv(w: &mut impl Write, records: &[EnergyRecord]) -> Result<(), csv::Error> {
    writeln!(w, "{ENERGY_CSV_VERSION_LINE}")?;
    let mut out = csv::Writer::from_writer(w);
    if records.is_empty() {
        out.write_record([
            "t",
            "y",
            "h2_u",
            "v2_b",
            "diss_bipolar",
            "diss_gamma",
            "diss_mag",
            "work",
        ])?;
    }
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_energy_csv(r: impl Read) -> Result<Vec<EnergyRecord>, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    rdr.deserialize().collect()
}

/// Writes `value` as one JSON line.
pub fn write_ndjson(w: &mut impl Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}
