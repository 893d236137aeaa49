//! Packet launch and port readout.

use crate::dynamics::Chirality;
use crate::lattice::{transverse_energy, SpinLattice, SpinState};
use crate::vec3;
use crate::{Error, Result};

/// Largest transverse tilt accepted anywhere (linear-regime guard).
pub const MAX_AMPLITUDE: f64 = 0.2;
/// Default phase readout threshold on the normalized correlation.
pub const DEFAULT_PHASE_THRESHOLD: f64 = 0.5;
/// Envelope half-support in units of the Gaussian width.
pub const ENVELOPE_SUPPORT: f64 = 4.0;

/// Narrowband Gaussian tone burst on an ordered path of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub region: String,
    /// Envelope center, as an index into the region's site list.
    pub center: f64,
    /// Gaussian standard deviation, in sites.
    pub width: f64,
    pub wavenumber: f64,
    pub amplitude: f64,
    /// `false` -> phase 0, `true` -> phase pi.
    pub phase_bit: bool,
}

impl PacketSpec {
    pub fn new(region: impl Into<String>, center: f64, width: f64, wavenumber: f64) -> Self {
        Self {
            region: region.into(),
            center,
            width,
            wavenumber,
            amplitude: 0.05,
            phase_bit: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude <= MAX_AMPLITUDE) {
            return Err(Error::InvalidPacket(format!(
                "amplitude {} outside (0, {MAX_AMPLITUDE}]",
                self.amplitude
            )));
        }
        if !(self.wavenumber > 0.0 && self.wavenumber < std::f64::consts::PI) {
            return Err(Error::InvalidPacket(format!(
                "wavenumber {} outside (0, pi)",
                self.wavenumber
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidPacket(format!("width {} must be positive", self.width)));
        }
        Ok(())
    }
}

/// Imprints the packet on the named region, travelling toward the end of the
/// region's site list.
pub fn imprint_packet(state: &mut SpinState, lattice: &SpinLattice, spec: &PacketSpec, chirality: Chirality) -> Result<()> {
    let path = lattice.region(&spec.region)?.to_vec();
    imprint_on_path(state, lattice, &path, spec, chirality)
}

/// Adds a packet to the transverse components along `path` (ordered in the
/// direction of travel) and renormalizes `S_z`.
///
/// A mode `Sx + i Sy ~ exp(i c k n)` moves toward increasing `n` for
/// precession sign `c`, so the in-quadrature component carries the chirality.
/// The phase bit is applied as an overall sign so that bit 1 is the exact
/// negative of bit 0.
pub fn imprint_on_path(
    state: &mut SpinState,
    lattice: &SpinLattice,
    path: &[usize],
    spec: &PacketSpec,
    chirality: Chirality,
) -> Result<()> {
    spec.validate()?;
    lattice.check_state(state)?;
    let reach = ENVELOPE_SUPPORT * spec.width;
    if spec.center - reach < 0.0 || spec.center + reach > (path.len() as f64 - 1.0) {
        return Err(Error::ClippedEnvelope(format!(
            "center {} +- {reach} does not fit in {} sites of `{}`",
            spec.center,
            path.len(),
            spec.region
        )));
    }
    let sign = if spec.phase_bit { -1.0 } else { 1.0 };
    let c = chirality.sign();
    for (n, &j) in path.iter().enumerate() {
        if j >= state.len() {
            return Err(Error::InvalidSite(j));
        }
        let x = n as f64 - spec.center;
        let g = sign * spec.amplitude * (-0.5 * (x / spec.width).powi(2)).exp();
        let theta = spec.wavenumber * n as f64;
        let s = state.spins[j];
        state.spins[j] = vec3::tilted(s[0] + g * theta.cos(), s[1] + c * g * theta.sin());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExcitationWarning {
    /// The kicked site is not a waveguide end (degree != 1).
    NotAnEdgeSite { site: usize, degree: usize },
}

impl std::fmt::Display for ExcitationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExcitationWarning::NotAnEdgeSite { site, degree } => {
                write!(f, "site {site} has degree {degree}; impulse is meant for arm ends")
            }
        }
    }
}

/// Broadband kick: `S = (sign * amplitude, 0, sqrt(1 - amplitude^2))`.
pub fn excite_impulse(
    state: &mut SpinState,
    lattice: &SpinLattice,
    site: usize,
    amplitude: f64,
    sign: i8,
) -> Result<Option<ExcitationWarning>> {
    lattice.check_state(state)?;
    if site >= lattice.len() {
        return Err(Error::InvalidSite(site));
    }
    if !(amplitude.abs() <= MAX_AMPLITUDE) {
        return Err(Error::InvalidPacket(format!("|amplitude| {amplitude} > {MAX_AMPLITUDE}")));
    }
    let sign = match sign {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {sign}"))),
    };
    let warning = (lattice.degree(site) != 1).then(|| ExcitationWarning::NotAnEdgeSite {
        site,
        degree: lattice.degree(site),
    });
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    if amplitude != 0.0 {
        state.spins[site] = vec3::tilted(sign * amplitude, 0.0);
    }
    Ok(warning)
}

/// Sum of `S_x^2 + S_y^2` over a named region.
pub fn arm_transverse_energy(state: &SpinState, lattice: &SpinLattice, region: &str) -> Result<f64> {
    Ok(transverse_energy(&state.spins, lattice.region(region)?))
}

/// Junction selectivity `(T0 - Tpi) / (T0 + Tpi)`.
pub fn selectivity(t0: f64, tpi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&tpi) {
        return Err(Error::InvalidParameter(format!(
            "transmissions must lie in [0, 1], got ({t0}, {tpi})"
        )));
    }
    let sum = t0 + tpi;
    if sum == 0.0 {
        return Err(Error::UndefinedSelectivity);
    }
    Ok((t0 - tpi) / sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReadout {
    /// `false` -> in phase with the reference, `true` -> pi.
    pub bit: bool,
    pub correlation: f64,
    pub confidence: f64,
}

/// Normalized correlation of two equally sampled series.
pub fn normalized_correlation(signal: &[f64], reference: &[f64]) -> Result<f64> {
    if signal.len() != reference.len() {
        return Err(Error::InvalidParameter(format!(
            "series lengths differ: {} vs {}",
            signal.len(),
            reference.len()
        )));
    }
    let (mut sr, mut ss, mut rr) = (0.0, 0.0, 0.0);
    for (s, r) in signal.iter().zip(reference) {
        sr += s * r;
        ss += s * s;
        rr += r * r;
    }
    if ss == 0.0 || rr == 0.0 {
        return Ok(0.0);
    }
    Ok(sr / (ss * rr).sqrt())
}

/// Phase of `signal` relative to `reference` from their normalized
/// correlation over the packet window.
pub fn port_phase_readout(signal: &[f64], reference: &[f64], threshold: f64) -> Result<PhaseReadout> {
    let c = normalized_correlation(signal, reference)?;
    if c.abs() <= threshold {
        return Err(Error::AmbiguousPhase {
            correlation: c,
            threshold,
        });
    }
    Ok(PhaseReadout {
        bit: c < 0.0,
        correlation: c,
        confidence: c.abs(),
    })
}

/// Index range of `times` falling inside `[t0, t1]`.
pub fn window(times: &[f64], t0: f64, t1: f64) -> std::ops::Range<usize> {
    let start = times.partition_point(|&t| t < t0);
    let end = times.partition_point(|&t| t <= t1);
    start..end.max(start)
}
