//! Reconstruction of the phantom from boundary data: Fourier-Bessel series
//! inversion, time reversal of the Darboux equation, and field comparison.

mod compare;
mod series;
mod time_reversal;

pub use compare::{compare_fields, FieldComparison};
pub use series::{
    inversion_constant, resolvable_band, series_inversion, InversionSpectra, SeriesOptions, NOISE_MARGIN, QUIET_WIDTH,
    ZERO_SHIFT,
};
pub use time_reversal::{time_reversal, TimeReversalOptions, TimeReversalState, CFL_LIMIT};
