//! On-disk formats: the `SMRT 1` container for boundary data, fields,
//! spectra and reports; run configuration files; phantom files; CSV export.

mod config;
mod csv;
mod phantom_file;
mod smrt;

pub use config::{RunConfig, CONFIG_KEYS};
pub use csv::field_to_csv;
pub use phantom_file::{parse_phantom, phantom_to_string, PHANTOM_MAGIC};
pub use smrt::{
    boundary_from_file, boundary_to_file, field_from_file, field_to_file, read_file, report_to_file, spectrum_from_file,
    spectrum_to_file, write_file, Kind, Provenance, ReportFile, SmrtFile, MAGIC, REPORT_FAMILIES,
};
