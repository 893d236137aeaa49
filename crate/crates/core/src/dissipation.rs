//! Energy dissipated per gate operation.
//!
//! `E = N E_sw [ (1 - beta)/beta  (+ or x)  (1 - gamma)^Nc  ...  (1 - exp(-2t/tau)) ]`
//!
//! The junction and propagation factors can be combined two ways. The
//! additive reading reproduces the worked figures usually quoted for this
//! model (about 8 kT dominated by the junction, 0.8 kT from propagation
//! alone) and is the default; the literal product is kept for comparison.
//! Energies are in units of kT, times in seconds.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Default group velocity, 10^6 cm/s.
pub const DEFAULT_GROUP_VELOCITY: f64 = 1.0e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpretation {
    LiteralProduct,
    #[default]
    Additive,
}

impl Interpretation {
    pub fn as_str(self) -> &'static str {
        match self {
            Interpretation::LiteralProduct => "literal_product",
            Interpretation::Additive => "additive",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal_product" | "literal-product" | "literal" | "product" => Ok(Interpretation::LiteralProduct),
            "additive" => Ok(Interpretation::Additive),
            other => Err(Error::InvalidParameter(format!("unknown interpretation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationParams {
    /// Packets per operation.
    pub n: u32,
    /// Packet energy, kT.
    pub e_sw: f64,
    /// Excitation efficiency.
    pub beta: f64,
    /// Junction selectivity.
    pub gamma: f64,
    /// Cascaded junctions.
    pub nc: u32,
    /// Propagation time, s.
    pub t: f64,
    /// Relaxation time, s.
    pub tau: f64,
}

impl Default for DissipationParams {
    /// The two-port junction gate: two packets, 20 kT each, 97% excitation efficiency,
    /// one junction with T0 = 0.9 / Tpi = 0.1, 10 ps transit, 1 ns relaxation.
    fn default() -> Self {
        Self {
            n: 2,
            e_sw: 20.0,
            beta: 0.97,
            gamma: 0.8,
            nc: 1,
            t: 10e-12,
            tau: 1e-9,
        }
    }
}

impl DissipationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        if self.n < 1 {
            return bad("N must be >= 1".into());
        }
        if !(self.e_sw > 0.0 && self.e_sw.is_finite()) {
            return bad(format!("E_sw must be positive, got {}", self.e_sw));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t must be >= 0, got {}", self.t));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        Ok(())
    }

    /// Uses the selectivity of a measured junction.
    pub fn with_transmissions(self, t0: f64, tpi: f64) -> Result<Self> {
        Ok(Self {
            gamma: crate::excitation::selectivity(t0, tpi)?,
            ..self
        })
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::N => self.n as f64,
            Axis::ESw => self.e_sw,
            Axis::Beta => self.beta,
            Axis::Gamma => self.gamma,
            Axis::Nc => self.nc as f64,
            Axis::T => self.t,
            Axis::Tau => self.tau,
        }
    }

    pub fn set(&mut self, axis: Axis, value: f64) -> Result<()> {
        let count = |v: f64| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::InvalidParameter(format!("{axis} must be a whole number, got {v}")))
            }
        };
        match axis {
            Axis::N => self.n = count(value)?,
            Axis::ESw => self.e_sw = value,
            Axis::Beta => self.beta = value,
            Axis::Gamma => self.gamma = value,
            Axis::Nc => self.nc = count(value)?,
            Axis::T => self.t = value,
            Axis::Tau => self.tau = value,
        }
        Ok(())
    }
}

/// `t = L / v_g`.
pub fn propagation_time(length: f64, group_velocity: f64) -> Result<f64> {
    if !(length > 0.0 && group_velocity > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "length and group velocity must be positive, got {length} m and {group_velocity} m/s"
        )));
    }
    Ok(length / group_velocity)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipation {
    pub interpretation: Interpretation,
    /// `N E_sw (1 - beta)/beta`.
    pub excitation: f64,
    /// `N E_sw (1 - gamma)^Nc`.
    pub junction: f64,
    /// `N E_sw (1 - exp(-2t/tau))`.
    pub propagation: f64,
    pub total: f64,
}

pub fn dissipated_energy(params: &DissipationParams, interpretation: Interpretation) -> Result<Dissipation> {
    params.validate()?;
    let scale = params.n as f64 * params.e_sw;
    let excitation = (1.0 - params.beta) / params.beta;
    let junction = (1.0 - params.gamma).powi(params.nc as i32);
    let propagation = -(-2.0 * params.t / params.tau).exp_m1();
    let bracket = match interpretation {
        Interpretation::Additive => excitation + junction + propagation,
        Interpretation::LiteralProduct => excitation + junction * propagation,
    };
    Ok(Dissipation {
        interpretation,
        excitation: scale * excitation,
        junction: scale * junction,
        propagation: scale * propagation,
        total: scale * bracket,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    ESw,
    Beta,
    Gamma,
    Nc,
    T,
    Tau,
}

impl Axis {
    pub const ALL: [Axis; 7] = [Axis::N, Axis::ESw, Axis::Beta, Axis::Gamma, Axis::Nc, Axis::T, Axis::Tau];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::N => "n",
            Axis::ESw => "e_sw",
            Axis::Beta => "beta",
            Axis::Gamma => "gamma",
            Axis::Nc => "nc",
            Axis::T => "t",
            Axis::Tau => "tau",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Axis::ALL
            .into_iter()
            .find(|a| a.as_str() == lower)
            .ok_or_else(|| Error::UnknownAxis(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: Dissipation,
}

/// Evaluates the model with one field of `base` replaced by each of `values`.
pub fn sweep(base: &DissipationParams, axis: &str, values: &[f64], interpretation: Interpretation) -> Result<Vec<SweepRow>> {
    let axis: Axis = axis.parse()?;
    values
        .iter()
        .map(|&value| {
            let mut p = *base;
            p.set(axis, value)?;
            Ok(SweepRow {
                value,
                result: dissipated_energy(&p, interpretation)?,
            })
        })
        .collect()
}
