//! Unit conversions applied at the configuration and output boundary.

pub const KT_TO_MS: f64 = 1852.0 / 3600.0;
pub const FT_TO_M: f64 = 0.3048;
pub const DEG_TO_RAD: f64 = core::f64::consts::PI / 180.0;

pub fn deg(rad: f64) -> f64 {
    rad / DEG_TO_RAD
}

pub fn rad(deg: f64) -> f64 {
    deg * DEG_TO_RAD
}

pub fn kts(ms: f64) -> f64 {
    ms / KT_TO_MS
}

pub fn ms(kts: f64) -> f64 {
    kts * KT_TO_MS
}

pub fn ft_to_m(ft: f64) -> f64 {
    ft * FT_TO_M
}
