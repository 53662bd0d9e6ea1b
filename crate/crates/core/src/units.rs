//! Unit conversions used at the configuration boundary.
//!
//! Everything inside the crate is linear SI: watts, metres, hertz, radians.

/// Speed of light (m/s) as used throughout the link budget.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}
