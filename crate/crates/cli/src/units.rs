//! Unit-suffixed quantities in config files, normalized to SI on parse.
//!
//! A quantity is written as a string, `"<number> <unit>"`; the space is optional.
//! Bare numbers are rejected for dimensional fields.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Prefix of every unit error message; the config layer keys on it.
pub const UNIT_ERROR_PREFIX: &str = "unit mismatch";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    MagneticField,
    Power,
    Frequency,
}

impl Dimension {
    fn si_unit(self) -> &'static str {
        match self {
            Dimension::Time => "s",
            Dimension::MagneticField => "T",
            Dimension::Power => "W",
            Dimension::Frequency => "Hz",
        }
    }

    /// Units with their power-of-ten factor relative to SI.
    fn units(self) -> &'static [(&'static str, i32)] {
        match self {
            Dimension::Time => &[("s", 0), ("ms", -3), ("us", -6), ("µs", -6), ("ns", -9)],
            Dimension::MagneticField => &[
                ("T", 0),
                ("mT", -3),
                ("uT", -6),
                ("µT", -6),
                ("nT", -9),
                ("G", -4),
            ],
            Dimension::Power => &[("W", 0), ("mW", -3)],
            Dimension::Frequency => &[("Hz", 0), ("kHz", 3), ("MHz", 6), ("GHz", 9)],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Time => "time",
            Dimension::MagneticField => "magnetic field",
            Dimension::Power => "power",
            Dimension::Frequency => "frequency",
        }
    }
}

/// Parses `"<number> <unit>"` into SI units of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    // Longest matching suffix wins, so "ms" is not read as "m" + "s".
    let matched = dim
        .units()
        .iter()
        .filter(|(u, _)| text.ends_with(u))
        .max_by_key(|(u, _)| u.len());
    let Some(&(unit, exponent)) = matched else {
        if text.parse::<f64>().is_ok() {
            return Err(format!(
                "{UNIT_ERROR_PREFIX}: `{text}` has no unit; expected a {} such as \"1 {}\"",
                dim.name(),
                dim.si_unit()
            ));
        }
        let valid: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
        return Err(format!(
            "{UNIT_ERROR_PREFIX}: `{text}` does not end in a {} unit (expected one of {})",
            dim.name(),
            valid.join(", ")
        ));
    };
    let num = text[..text.len() - unit.len()].trim();
    let value: f64 = num
        .parse()
        .map_err(|_| format!("invalid number `{num}` in `{text}`"))?;
    if !value.is_finite() {
        return Err(format!("non-finite quantity `{text}`"));
    }
    // Dividing by an exact power of ten keeps "3700 G" equal to 0.37.
    let factor = 10f64.powi(exponent.abs());
    Ok(if exponent < 0 { value / factor } else { value * factor })
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $dim:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name(pub f64);

        impl $name {
            pub fn si(self) -> f64 {
                self.0
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a {} string with unit", $dim.name())
                    }
                    fn visit_str<E: de::Error>(self, s: &str) -> Result<$name, E> {
                        parse_quantity(s, $dim).map($name).map_err(E::custom)
                    }
                    fn visit_i64<E: de::Error>(self, v: i64) -> Result<$name, E> {
                        Err(E::custom(format!(
                            "{UNIT_ERROR_PREFIX}: bare number {v} needs a {} unit",
                            $dim.name()
                        )))
                    }
                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$name, E> {
                        self.visit_i64(v as i64)
                    }
                    fn visit_f64<E: de::Error>(self, v: f64) -> Result<$name, E> {
                        Err(E::custom(format!(
                            "{UNIT_ERROR_PREFIX}: bare number {v} needs a {} unit",
                            $dim.name()
                        )))
                    }
                }
                d.deserialize_any(V)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&format!("{:e} {}", self.0, $dim.si_unit()))
            }
        }
    };
}

quantity!(
    /// Duration in seconds.
    Time,
    Dimension::Time
);
quantity!(
    /// Magnetic field in tesla.
    Field,
    Dimension::MagneticField
);
quantity!(
    /// Power in watts.
    Power,
    Dimension::Power
);
quantity!(
    /// Frequency in hertz.
    Frequency,
    Dimension::Frequency
);

impl Field {
    pub fn gauss(self) -> f64 {
        self.0 * 1e4
    }
    pub fn from_gauss(g: f64) -> Self {
        Self(g / 1e4)
    }
}

impl Power {
    pub fn milliwatts(self) -> f64 {
        self.0 * 1e3
    }
    pub fn from_milliwatts(mw: f64) -> Self {
        Self(mw / 1e3)
    }
}
