//! SI-suffixed quantities for the dissipation commands. A bare number is in
//! base SI units (m, s, m/s).

use anyhow::{anyhow, bail, Result};

/// Suffix and power of ten. Scaling divides by `10^-p` for negative powers,
/// so `100nm` is the same double as `1e-7`.
type Unit = (&'static str, i32);

const LENGTH: &[Unit] = &[("nm", -9), ("um", -6), ("µm", -6), ("mm", -3), ("cm", -2), ("m", 0)];
const TIME: &[Unit] = &[("fs", -15), ("ps", -12), ("ns", -9), ("us", -6), ("µs", -6), ("ms", -3), ("s", 0)];
const VELOCITY: &[Unit] = &[("km/s", 3), ("cm/s", -2), ("m/s", 0)];

fn parse_with(text: &str, units: &[Unit], what: &str) -> Result<f64> {
    let text = text.trim();
    let (number, power) = units
        .iter()
        .find_map(|&(suffix, power)| text.strip_suffix(suffix).map(|n| (n.trim_end(), power)))
        .unwrap_or((text, 0));
    let value: f64 = number
        .parse()
        .map_err(|_| anyhow!("invalid {what} {text:?} (expected e.g. {})", example(units)))?;
    if !value.is_finite() {
        bail!("invalid {what} {text:?}");
    }
    Ok(if power < 0 {
        value / 10f64.powi(-power)
    } else {
        value * 10f64.powi(power)
    })
}

fn example(units: &[Unit]) -> String {
    units.iter().take(2).map(|(s, _)| format!("10{s}")).collect::<Vec<_>>().join(", ")
}

pub fn length(text: &str) -> Result<f64> {
    parse_with(text, LENGTH, "length")
}

pub fn time(text: &str) -> Result<f64> {
    parse_with(text, TIME, "time")
}

pub fn velocity(text: &str) -> Result<f64> {
    parse_with(text, VELOCITY, "velocity")
}
