//! SI constants and unit conversions.

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C_LIGHT: f64 = 299_792_458.0;
pub const K_B: f64 = 1.380_649e-23;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const MU_0: f64 = 1.256_637_062_12e-6;
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
pub const STANDARD_GRAVITY: f64 = 9.806_65;

pub fn ev_to_rad_per_s(ev: f64) -> f64 {
    ev * ELECTRON_VOLT / HBAR
}

pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR / ELECTRON_VOLT
}

/// Vacuum wavelength for angular frequency `omega`.
pub fn wavelength_to_rad_per_s(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / lambda
}

pub fn rad_per_s_to_wavelength(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / omega
}

pub fn micron(value: f64) -> f64 {
    value * 1e-6
}

/// Multiplier taking a length in `unit` to metres.
pub fn length_factor(unit: &str) -> Option<f64> {
    match unit {
        "m" => Some(1.0),
        "mm" => Some(1e-3),
        "um" | "µm" | "micron" => Some(1e-6),
        "nm" => Some(1e-9),
        _ => None,
    }
}

/// Converts a frequency-like quantity to rad/s.
pub fn frequency_to_rad_per_s(value: f64, unit: &str) -> Option<f64> {
    match unit {
        "rad/s" => Some(value),
        "eV" => Some(ev_to_rad_per_s(value)),
        "meV" => Some(ev_to_rad_per_s(value * 1e-3)),
        "Hz" => Some(2.0 * std::f64::consts::PI * value),
        "THz" => Some(2.0 * std::f64::consts::PI * value * 1e12),
        _ => None,
    }
}

pub fn temperature_to_kelvin(value: f64, unit: &str) -> Option<f64> {
    match unit {
        "K" => Some(value),
        "C" | "degC" => Some(value + 273.15),
        _ => None,
    }
}

pub fn conductivity_factor(unit: &str) -> Option<f64> {
    match unit {
        "S/m" | "1/(ohm*m)" | "ohm^-1 m^-1" => Some(1.0),
        "S/cm" => Some(100.0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for &e in &[1e-4, 0.098, 0.12, 3.0] {
            assert!((rad_per_s_to_ev(ev_to_rad_per_s(e)) - e).abs() <= 1e-12 * e);
        }
        for &l in &[0.36e-6, 3.66e-6, 12e-6] {
            assert!((rad_per_s_to_wavelength(wavelength_to_rad_per_s(l)) - l).abs() <= 1e-12 * l);
        }
        assert_eq!(length_factor("um"), Some(1e-6));
        assert!(frequency_to_rad_per_s(1.0, "parsec").is_none());
    }
}
