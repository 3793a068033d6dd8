//! Decibel conversions. Everything inside the crate is linear; dB only at the edges.

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
        assert!((dbm_to_watts(-22.0) - 6.309573444801929e-6).abs() < 1e-18);
        assert!((db_to_linear(linear_to_db(1234.5)) - 1234.5).abs() < 1e-9);
    }
}
