//! Full spin-lattice runs of a discretized netlist, read out against the
//! phase-logic model.
//!
//! Each output port is compared with the same port of a *reference* run: the
//! shifter-free discretization of the netlist, driven with all inputs flipped
//! so that the packet arriving at that port starts with phase 0. The
//! reference packet follows the same path and scatters the same way at every
//! junction, so the correlation sign isolates the phase the shifters added
//! plus the input bit, which is exactly the logic model's output bit.

use std::collections::{BTreeMap, HashMap};

use crate::dispersion::{calibrate_phase_shifter, theory_group_velocity, VERIFY_WIDTH};
use crate::dynamics::{Integrator, IntegratorConfig};
use crate::excitation::{imprint_on_path, normalized_correlation, window, PacketSpec, DEFAULT_PHASE_THRESHOLD, ENVELOPE_SUPPORT};
use crate::lattice::{build_from_netlist, DiscretizeOptions, DiscretizedGate, LatticeParams, SpinState};
use crate::logic::{simulate_gate, EventKind, GateNetlist, GateResult};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub sites_per_unit: usize,
    pub wavenumber: f64,
    pub width: f64,
    pub amplitude: f64,
    pub threshold: f64,
    pub params: LatticeParams,
    pub integrator: IntegratorConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            sites_per_unit: 40,
            wavenumber: 0.5,
            width: VERIFY_WIDTH,
            amplitude: 0.05,
            threshold: DEFAULT_PHASE_THRESHOLD,
            params: LatticeParams::default(),
            integrator: IntegratorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortReadout {
    pub port: String,
    /// Input port whose packet the logic model sends here.
    pub source: String,
    pub logic_bit: bool,
    pub physical_bit: bool,
    pub correlation: f64,
    pub confidence: f64,
    /// Signal energy over the window relative to the reference.
    pub energy_ratio: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVerification {
    pub inputs: BTreeMap<String, bool>,
    pub logic: GateResult,
    pub ports: Vec<PortReadout>,
    pub shifter_offset: f64,
    /// Logic/physics disagreements and suspicious readouts.
    pub discrepancies: Vec<String>,
}

impl PhysicalVerification {
    pub fn agrees(&self) -> bool {
        self.discrepancies.is_empty()
    }

    /// Physical phase bit per output port.
    pub fn outputs(&self) -> BTreeMap<String, bool> {
        self.ports.iter().map(|p| (p.port.clone(), p.physical_bit)).collect()
    }

    pub fn min_confidence(&self) -> f64 {
        self.ports.iter().map(|p| p.confidence).fold(f64::INFINITY, f64::min)
    }
}

/// Probe series at every output port for one set of input bits.
type PortSeries = BTreeMap<String, Vec<f64>>;

/// Holds the calibrated gate, its shifter-free twin and a cache of reference
/// runs so a whole truth table shares them.
pub struct PhysicalVerifier<'a> {
    netlist: &'a GateNetlist,
    reference_net: GateNetlist,
    gate: DiscretizedGate,
    reference: DiscretizedGate,
    options: VerifyOptions,
    offset: f64,
    v_g: f64,
    segment_delay: f64,
    cache: HashMap<(Vec<bool>, usize), PortSeries>,
}

impl<'a> PhysicalVerifier<'a> {
    pub fn new(netlist: &'a GateNetlist, options: VerifyOptions) -> Result<Self> {
        let spu = options.sites_per_unit;
        let discretize = DiscretizeOptions {
            params: options.params,
            ..DiscretizeOptions::new(spu)
        };
        let offset = calibrate_phase_shifter(options.wavenumber, discretize.shifter_sites, options.params)?;
        let mut gate = build_from_netlist(netlist, discretize)?;
        gate.set_shifter_offset(offset)?;
        let reference_net = netlist.without_shifters();
        let reference = build_from_netlist(&reference_net, discretize)?;
        let v_g = theory_group_velocity(options.wavenumber, options.params);
        let k_inside = options.wavenumber - std::f64::consts::PI / discretize.shifter_sites as f64;
        let segment_delay = discretize.shifter_sites as f64 * (1.0 / theory_group_velocity(k_inside, options.params) - 1.0 / v_g);
        Ok(Self {
            netlist,
            reference_net,
            gate,
            reference,
            options,
            offset,
            v_g,
            segment_delay,
            cache: HashMap::new(),
        })
    }

    pub fn shifter_offset(&self) -> f64 {
        self.offset
    }

    pub fn gate(&self) -> &DiscretizedGate {
        &self.gate
    }

    fn input_names(&self) -> Vec<String> {
        self.netlist.input_ports().map(|p| p.name.clone()).collect()
    }

    /// Runs the lattice for `n_steps` and records `S_x` at every output port.
    fn run(&self, use_reference: bool, bits: &[bool], n_steps: usize) -> Result<PortSeries> {
        let (gate, net) = if use_reference {
            (&self.reference, &self.reference_net)
        } else {
            (&self.gate, self.netlist)
        };
        let o = &self.options;
        let lattice = &gate.lattice;
        let mut state = SpinState::aligned(lattice.len());
        let reach = ENVELOPE_SUPPORT * o.width;
        for (name, &bit) in self.input_names().iter().zip(bits) {
            let (path, origin) = gate.launch_path(net, name)?;
            let spec = PacketSpec {
                region: name.clone(),
                center: (origin as f64).max(reach),
                width: o.width,
                wavenumber: o.wavenumber,
                amplitude: o.amplitude,
                phase_bit: bit,
            };
            imprint_on_path(&mut state, lattice, &path, &spec, o.integrator.chirality)?;
        }
        let probes: Vec<(String, usize)> = net
            .output_ports()
            .map(|p| (p.name.clone(), gate.node_sites[&p.name]))
            .collect();
        let mut series: PortSeries = probes.iter().map(|(n, _)| (n.clone(), Vec::with_capacity(n_steps))).collect();
        let mut integ = Integrator::new(lattice, o.integrator)?;
        for _ in 0..n_steps {
            integ.step(&mut state);
            for (name, site) in &probes {
                series.get_mut(name).expect("probe").push(state.spins[*site][0]);
            }
        }
        Ok(series)
    }

    /// Lattice-time offset of each input packet: ports too close to a dead
    /// end launch their packet further down the edge.
    fn head_start(&self, port: &str) -> Result<f64> {
        let (_, origin) = self.gate.launch_path(self.netlist, port)?;
        let reach = ENVELOPE_SUPPORT * self.options.width;
        Ok(((origin as f64).max(reach) - origin as f64) / self.v_g)
    }

    pub fn verify(&mut self, inputs: &BTreeMap<String, bool>) -> Result<PhysicalVerification> {
        let names = self.input_names();
        let bits: Vec<bool> = names
            .iter()
            .map(|n| inputs.get(n).copied().ok_or_else(|| Error::Gate(crate::logic::GateError::MissingInput(n.clone()))))
            .collect::<Result<_>>()?;
        let max_time = self.netlist.default_max_time();
        let logic = simulate_gate(self.netlist, inputs, max_time)?;

        let o = self.options;
        let spu = o.sites_per_unit as f64;
        let sigma_t = o.width / self.v_g;
        let dt = o.integrator.dt;
        let mut plans = Vec::new();
        for port in self.netlist.output_ports() {
            let Some(packet) = logic.packet_exiting_at(&port.name) else {
                continue;
            };
            let arrival = logic.arrival_times[&port.name] * spu / self.v_g - self.head_start(&packet.source)?;
            let delay = packet.shifters_crossed as f64 * self.segment_delay;
            let window = (
                (arrival - 4.0 * sigma_t - 10.0).max(0.0),
                arrival + delay + 4.0 * sigma_t + 10.0,
            );
            plans.push((port.name.clone(), packet.source.clone(), packet.phase, window));
        }
        let t_end = plans.iter().map(|p| p.3 .1).fold(0.0, f64::max);
        let n_steps = (t_end / dt).ceil() as usize + 1;
        let times: Vec<f64> = (1..=n_steps).map(|n| n as f64 * dt).collect();

        let test = self.run(false, &bits, n_steps)?;
        let mut ports = Vec::new();
        let mut discrepancies = Vec::new();
        for (port, source, logic_bit, (t0, t1)) in plans {
            let src_bit = inputs[&source];
            let ref_bits: Vec<bool> = bits.iter().map(|b| b ^ src_bit).collect();
            let ref_inputs: BTreeMap<String, bool> = names.iter().cloned().zip(ref_bits.iter().copied()).collect();
            let reference_logic = simulate_gate(&self.reference_net, &ref_inputs, max_time)
                .map_err(|e| Error::InvalidTopology(format!("no shifter-free reference for port {port}: {e}")))?;
            check_same_scattering(&logic, &reference_logic)?;
            let key = (ref_bits.clone(), n_steps);
            if !self.cache.contains_key(&key) {
                let series = self.run(true, &ref_bits, n_steps)?;
                self.cache.insert(key.clone(), series);
            }
            let reference = &self.cache[&key][&port];
            let signal = &test[&port];
            let r = window(&times, t0, t1);
            let c = normalized_correlation(&signal[r.clone()], &reference[r.clone()])?;
            if c.abs() <= o.threshold {
                return Err(Error::AmbiguousPhase {
                    correlation: c,
                    threshold: o.threshold,
                });
            }
            let energy = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>();
            let energy_ratio = energy(&signal[r.clone()]) / energy(&reference[r]);
            let physical_bit = c < 0.0;
            if physical_bit != logic_bit {
                discrepancies.push(format!(
                    "port {port}: logic {} but lattice reads {} (C = {c:.3})",
                    logic_bit as u8, physical_bit as u8
                ));
            }
            if !(0.5..=2.0).contains(&energy_ratio) {
                discrepancies.push(format!("port {port}: packet energy {energy_ratio:.3} of reference"));
            }
            ports.push(PortReadout {
                port,
                source,
                logic_bit,
                physical_bit,
                correlation: c,
                confidence: c.abs(),
                energy_ratio,
                window: (t0, t1),
            });
        }
        Ok(PhysicalVerification {
            inputs: inputs.clone(),
            logic,
            ports,
            shifter_offset: self.offset,
            discrepancies,
        })
    }

    /// Verifies every input combination, first input as the most significant bit.
    pub fn verify_all(&mut self) -> Result<Vec<Result<PhysicalVerification>>> {
        let names = self.input_names();
        if names.len() > crate::logic::MAX_TABLE_INPUTS {
            return Err(Error::Gate(crate::logic::GateError::TooManyInputs(names.len())));
        }
        let rows = 1usize << names.len();
        Ok((0..rows)
            .map(|row| {
                let inputs = names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), row >> (names.len() - 1 - i) & 1 == 1))
                    .collect();
                self.verify(&inputs)
            })
            .collect())
    }
}

fn scattering_pattern(r: &GateResult) -> Vec<(usize, &EventKind, i64)> {
    r.event_log
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Transmit { .. } | EventKind::Reflect { .. }))
        .map(|e| (e.packet, &e.kind, (e.time * 1e6).round() as i64))
        .collect()
}

fn check_same_scattering(test: &GateResult, reference: &GateResult) -> Result<()> {
    if scattering_pattern(test) != scattering_pattern(reference) {
        return Err(Error::InvalidTopology(
            "shifter-free reference scatters differently at the junctions; \
             phases cannot be read against it"
                .into(),
        ));
    }
    Ok(())
}

/// One-shot physical check of a single input assignment.
pub fn verify_gate_physically(
    netlist: &GateNetlist,
    inputs: &BTreeMap<String, bool>,
    options: VerifyOptions,
) -> Result<PhysicalVerification> {
    PhysicalVerifier::new(netlist, options)?.verify(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{buffer_netlist, parse_netlist};

    fn one(port: &str, bit: bool) -> BTreeMap<String, bool> {
        [(port.to_string(), bit)].into_iter().collect()
    }

    // Long enough that a width-20 packet starts clear of the shifter.
    const LONG_INVERTER: &str = "port A in\nport B out\nedge w A B len=8 shifters=5\n";

    #[test]
    fn buffer_and_inverter() {
        let inverter = parse_netlist(LONG_INVERTER).unwrap();
        for (net, flips) in [(buffer_netlist(), false), (inverter, true)] {
            let mut v = PhysicalVerifier::new(&net, VerifyOptions::default()).unwrap();
            for bit in [false, true] {
                let r = v.verify(&one("A", bit)).unwrap();
                assert!(r.agrees(), "{:?}", r.discrepancies);
                assert_eq!(r.outputs()["B"], bit ^ flips);
                assert!(r.min_confidence() >= 0.8, "{}", r.min_confidence());
            }
        }
    }

    #[test]
    fn double_shifter_cancels() {
        let net = parse_netlist(
            "port A in\nport B out\nedge w A B len=10 shifters=5,7\n",
        )
        .unwrap();
        let r = verify_gate_physically(&net, &one("A", false), VerifyOptions::default()).unwrap();
        assert!(r.agrees(), "{:?}", r.discrepancies);
        assert!(!r.outputs()["B"]);
        assert!(r.min_confidence() >= 0.8);
    }

    // Shifters ahead of a junction change which packets pair up, so the
    // shifter-free twin cannot serve as a reference.
    #[test]
    fn shifter_before_junction_has_no_reference() {
        let net = crate::logic::fig4_netlist();
        let inputs = [("A".to_string(), false), ("B".to_string(), true)].into_iter().collect();
        assert!(matches!(
            verify_gate_physically(&net, &inputs, VerifyOptions::default()),
            Err(Error::InvalidTopology(_))
        ));
    }

    #[test]
    fn missing_input_is_rejected() {
        let net = buffer_netlist();
        assert!(verify_gate_physically(&net, &BTreeMap::new(), VerifyOptions::default()).is_err());
    }
}
