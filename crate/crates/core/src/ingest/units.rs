use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalUnit {
    Meter,
    MeterPerSecond,
    Count,
}

impl CanonicalUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            CanonicalUnit::Meter => "m",
            CanonicalUnit::MeterPerSecond => "m/s",
            CanonicalUnit::Count => "count",
        }
    }
}

/// A magnitude in a canonical SI unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityValue {
    pub magnitude: f64,
    pub unit: CanonicalUnit,
}

fn lookup(unit: &str) -> Option<(CanonicalUnit, f64)> {
    let u = unit.trim().to_ascii_lowercase();
    let entry = match u.as_str() {
        "m" | "meter" | "meters" | "metre" | "metres" => (CanonicalUnit::Meter, 1.0),
        "ft" | "foot" | "feet" => (CanonicalUnit::Meter, 0.3048),
        "km" | "kilometer" | "kilometers" | "kilometre" | "kilometres" => (CanonicalUnit::Meter, 1000.0),
        "nm" | "nmi" | "nautical mile" | "nautical miles" => (CanonicalUnit::Meter, 1852.0),
        "m/s" | "mps" | "meters per second" | "metres per second" => (CanonicalUnit::MeterPerSecond, 1.0),
        "knot" | "knots" | "kn" | "kt" | "kts" => (CanonicalUnit::MeterPerSecond, 0.514444),
        "mph" | "miles per hour" => (CanonicalUnit::MeterPerSecond, 0.44704),
        "count" | "turbines" | "units" => (CanonicalUnit::Count, 1.0),
        _ => return None,
    };
    Some(entry)
}

/// Convert `value unit` into meters, meters per second or a plain count.
pub fn normalize_quantity(value: f64, unit: &str) -> Result<QuantityValue, IngestError> {
    let (canonical, factor) =
        lookup(unit).ok_or_else(|| IngestError::UnknownUnit { value: value.to_string(), unit: unit.to_string() })?;
    if !value.is_finite() {
        return Err(IngestError::UnknownUnit { value: value.to_string(), unit: unit.to_string() });
    }
    Ok(QuantityValue { magnitude: value * factor, unit: canonical })
}

/// Express a canonical quantity in `unit`, the inverse of [`normalize_quantity`].
pub fn convert_to(q: QuantityValue, unit: &str) -> Result<f64, IngestError> {
    match lookup(unit) {
        Some((canonical, factor)) if canonical == q.unit => Ok(q.magnitude / factor),
        _ => Err(IngestError::UnknownUnit { value: q.magnitude.to_string(), unit: unit.to_string() }),
    }
}
