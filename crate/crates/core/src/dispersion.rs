//! Spin-wave band measurements and phase-shifter calibration.

use std::f64::consts::PI;

use crate::dynamics::{Integrator, IntegratorConfig};
use crate::excitation::{imprint_on_path, port_phase_readout, PacketSpec, PhaseReadout, ENVELOPE_SUPPORT};
use crate::lattice::{build_chain, regions, LatticeBuilder, LatticeParams, SpinLattice, SpinState};
use crate::{Error, Result};

/// Linearized band `omega(k) = h + 2J (1 - cos k)`.
pub fn theory_omega(k: f64, params: LatticeParams) -> f64 {
    params.field + 2.0 * params.coupling * (1.0 - k.cos())
}

/// `d omega / dk = 2J sin k`.
pub fn theory_group_velocity(k: f64, params: LatticeParams) -> f64 {
    2.0 * params.coupling * k.sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionOptions {
    pub chain_len: usize,
    /// Gaussian width of the probing packet, in sites.
    pub width: f64,
    pub amplitude: f64,
    /// Distance between the two arrival probes.
    pub probe_gap: usize,
    pub params: LatticeParams,
    /// Relative spread of the instantaneous frequency above which a point is
    /// flagged as low confidence.
    pub spread_limit: f64,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        Self {
            chain_len: 600,
            width: 30.0,
            amplitude: 0.05,
            probe_gap: 100,
            params: LatticeParams::default(),
            spread_limit: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega: f64,
    pub omega_theory: f64,
    pub rel_error: f64,
    /// Weighted relative spread of the instantaneous frequency at the probe.
    pub spread: f64,
    /// High frequency spread, or the packet tail never cleared the far probe.
    pub low_confidence: bool,
    /// Group velocity from the envelope centroid passing two probes.
    pub arrival_velocity: f64,
}

#[derive(Debug, Clone, Copy)]
struct PacketTrace {
    omega: f64,
    spread: f64,
    arrival_velocity: f64,
    capped: bool,
}

const MAX_STEPS: usize = 2_000_000;

fn trace_packet(k: f64, opts: &DispersionOptions, config: &IntegratorConfig) -> Result<PacketTrace> {
    let n = opts.chain_len;
    let reach = ENVELOPE_SUPPORT * opts.width;
    let center = reach + 10.0;
    let p1 = n / 2;
    let p2 = p1 + opts.probe_gap;
    if (p1 as f64) < center + reach || (n - p2) as f64 <= reach {
        return Err(Error::InvalidParameter(format!(
            "chain of {n} sites too short for width {} and probe gap {}",
            opts.width, opts.probe_gap
        )));
    }
    let lattice = build_chain(n, opts.params)?;
    let mut state = SpinState::aligned(n);
    let spec = PacketSpec {
        amplitude: opts.amplitude,
        ..PacketSpec::new(regions::CHAIN, center, opts.width, k)
    };
    imprint_packet_on_chain(&mut state, &lattice, &spec, config)?;

    // Echoes off the far chain end reach p2 at about this time; slow
    // long-wave tails that have not cleared by then are cut off.
    let far_end = (n - 1) as f64;
    let t_cap = (2.0 * far_end - p2 as f64 - (center + reach)) / theory_group_velocity(k, opts.params);
    let max_steps = ((t_cap / config.dt).ceil() as usize).min(MAX_STEPS);
    let mut integ = Integrator::new(&lattice, *config)?;
    let psi = |s: &SpinState, j: usize| (s.spins[j][0], s.spins[j][1]);
    let intensity = |s: &SpinState, j: usize| s.spins[j][0].powi(2) + s.spins[j][1].powi(2);
    // frequency accumulators at p1
    let (mut w_sum, mut wf_sum, mut wff_sum) = (0.0, 0.0, 0.0);
    // per probe: (sum e t, sum e, peak, cleared)
    let mut probes = [(0.0, 0.0, 0.0f64, false); 2];
    let mut prev = psi(&state, p1);
    for _ in 0..max_steps {
        integ.step(&mut state);
        if !probes[0].3 {
            let cur = psi(&state, p1);
            let w = (cur.0.hypot(cur.1)) * (prev.0.hypot(prev.1));
            if w > 0.0 {
                // arg(cur * conj(prev))
                let dphi = (cur.1 * prev.0 - cur.0 * prev.1).atan2(cur.0 * prev.0 + cur.1 * prev.1);
                let f = dphi / config.dt;
                w_sum += w;
                wf_sum += w * f;
                wff_sum += w * f * f;
            }
            prev = cur;
        }
        for (acc, j) in probes.iter_mut().zip([p1, p2]) {
            if acc.3 {
                continue;
            }
            let e = intensity(&state, j);
            acc.0 += e * state.time;
            acc.1 += e;
            acc.2 = acc.2.max(e);
            acc.3 = acc.2 > 0.0 && e < 1e-4 * acc.2;
        }
        if probes[1].3 {
            break;
        }
    }
    if probes[0].1 == 0.0 || probes[1].1 == 0.0 || w_sum == 0.0 {
        return Err(Error::Inconclusive(format!("packet at k = {k} never reached the probes")));
    }
    let mean = wf_sum / w_sum;
    let var = (wff_sum / w_sum - mean * mean).max(0.0);
    let t1 = probes[0].0 / probes[0].1;
    let t2 = probes[1].0 / probes[1].1;
    Ok(PacketTrace {
        omega: mean.abs(),
        spread: var.sqrt() / mean.abs(),
        arrival_velocity: opts.probe_gap as f64 / (t2 - t1),
        capped: !(probes[0].3 && probes[1].3),
    })
}

fn imprint_packet_on_chain(state: &mut SpinState, lattice: &SpinLattice, spec: &PacketSpec, config: &IntegratorConfig) -> Result<()> {
    let path = lattice.region(regions::CHAIN)?.to_vec();
    imprint_on_path(state, lattice, &path, spec, config.chirality)
}

/// Launches a narrowband packet per wavenumber on a chain and measures the
/// precession frequency at a mid-chain site from the phase advance of
/// `Sx + i Sy`, weighted by the local amplitude.
pub fn dispersion_probe(chain_len: usize, k_list: &[f64], config: &IntegratorConfig) -> Result<Vec<DispersionPoint>> {
    let opts = DispersionOptions {
        chain_len,
        ..Default::default()
    };
    dispersion_probe_with(&opts, k_list, config)
}

pub fn dispersion_probe_with(opts: &DispersionOptions, k_list: &[f64], config: &IntegratorConfig) -> Result<Vec<DispersionPoint>> {
    k_list
        .iter()
        .map(|&k| {
            let trace = trace_packet(k, opts, config)?;
            let theory = theory_omega(k, opts.params);
            let low_confidence = trace.capped || trace.spread > opts.spread_limit;
            if trace.capped {
                log::warn!("k = {k}: packet tail did not clear the probes before the echo returned");
            } else if low_confidence {
                log::warn!("k = {k}: frequency spread {:.3} is high", trace.spread);
            }
            Ok(DispersionPoint {
                k,
                omega: trace.omega,
                omega_theory: theory,
                rel_error: (trace.omega - theory) / theory,
                spread: trace.spread,
                low_confidence,
                arrival_velocity: trace.arrival_velocity,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupVelocityCheck {
    pub k: f64,
    /// Envelope speed between the two probes.
    pub arrival_velocity: f64,
    /// Central difference of measured omega at `k +- dk`.
    pub finite_difference: f64,
    pub theory: f64,
}

impl GroupVelocityCheck {
    pub fn rel_mismatch(&self) -> f64 {
        (self.arrival_velocity - self.finite_difference).abs() / self.finite_difference.abs()
    }
}

pub fn group_velocity_check(k: f64, dk: f64, opts: &DispersionOptions, config: &IntegratorConfig) -> Result<GroupVelocityCheck> {
    if !(dk > 0.0 && k - dk > 0.0 && k + dk < PI) {
        return Err(Error::InvalidParameter(format!("k +- dk = {k} +- {dk} leaves (0, pi)")));
    }
    let points = dispersion_probe_with(opts, &[k - dk, k, k + dk], config)?;
    Ok(GroupVelocityCheck {
        k,
        arrival_velocity: points[1].arrival_velocity,
        finite_difference: (points[2].omega - points[0].omega) / (2.0 * dk),
        theory: theory_group_velocity(k, opts.params),
    })
}

/// Field offset that makes a `segment_len`-site segment add a pi phase to a
/// packet of wavenumber `k`.
///
/// At fixed frequency the raised field lowers the wavenumber inside the
/// segment to `k' = k - pi / L`, with `cos k' = cos k + dh / 2J`.
pub fn calibrate_phase_shifter(k: f64, segment_len: usize, params: LatticeParams) -> Result<f64> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::InvalidParameter(format!("wavenumber {k} outside (0, pi)")));
    }
    if segment_len < 4 {
        return Err(Error::InvalidParameter(format!(
            "shifter segment needs at least 4 sites, got {segment_len}"
        )));
    }
    let k_inside = k - PI / segment_len as f64;
    if k_inside <= 0.0 {
        return Err(Error::Uncalibratable(format!(
            "k = {k} cannot lose pi over {segment_len} sites; use a segment longer than {} sites",
            (PI / k).ceil()
        )));
    }
    Ok(2.0 * params.coupling * (k_inside.cos() - k.cos()))
}

/// Packet width used for shifter and gate verification runs.
pub const VERIFY_WIDTH: f64 = 20.0;

/// Two identical uncoupled chains, one carrying `segments` consecutive
/// shifter segments with the given field offset. A packet is launched on
/// each and the `S_x` series at a probe past the segments are compared.
pub fn interferometer_check(
    k: f64,
    segment_len: usize,
    segments: usize,
    offset: f64,
    params: LatticeParams,
    config: &IntegratorConfig,
) -> Result<PhaseReadout> {
    let w = VERIFY_WIDTH;
    let reach = (ENVELOPE_SUPPORT * w).ceil() as usize;
    let center = reach + 10;
    let seg_start = center + reach + 20;
    let seg_end = seg_start + segments * segment_len;
    let probe = seg_end + 20;
    let n = probe + reach + 60;

    let mut b = LatticeBuilder::new();
    for (row, name) in ["reference", "shifted"].into_iter().enumerate() {
        let sites: Vec<usize> = (0..n).map(|x| b.add_site([x as f64, 2.0 * row as f64], name)).collect();
        for pair in sites.windows(2) {
            b.add_bond(pair[0], pair[1], params.coupling)?;
        }
        if name == "shifted" {
            for &j in &sites[seg_start..seg_end] {
                b.set_field_offset(j, offset);
            }
        }
        b.extend_region(name, sites);
    }
    let lattice = b.build(params.field)?;
    let mut state = SpinState::aligned(lattice.len());
    let mut probes = [0; 2];
    for (p, name) in probes.iter_mut().zip(["reference", "shifted"]) {
        let path = lattice.region(name)?.to_vec();
        let spec = PacketSpec::new(name, center as f64, w, k);
        imprint_on_path(&mut state, &lattice, &path, &spec, config.chirality)?;
        *p = path[probe];
    }

    let mut integ = Integrator::new(&lattice, *config)?;
    let mut series = [Vec::new(), Vec::new()];
    let mut peaks = [0.0f64; 2];
    for _ in 0..MAX_STEPS {
        integ.step(&mut state);
        let mut done = true;
        for i in 0..2 {
            let s = state.spins[probes[i]];
            series[i].push(s[0]);
            let e = s[0] * s[0] + s[1] * s[1];
            peaks[i] = peaks[i].max(e);
            done &= peaks[i] > 0.0 && e < 1e-4 * peaks[i];
        }
        if done {
            return port_phase_readout(&series[1], &series[0], crate::excitation::DEFAULT_PHASE_THRESHOLD);
        }
    }
    Err(Error::Inconclusive("interferometer packets never cleared the probe".into()))
}
