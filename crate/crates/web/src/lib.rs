//! Browser bindings: a live two-packet junction, netlist truth tables and
//! dissipation curves. The plain-Rust halves are usable (and tested) natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use magnonsim::dissipation::{dissipated_energy, Axis, DissipationParams, Interpretation};
use magnonsim::dynamics::{Integrator, IntegratorConfig};
use magnonsim::export::{self, Metadata};
use magnonsim::lattice::{magnon_number, regions, SpinLattice, SpinState};
use magnonsim::logic::{check_injective, parse_netlist, truth_table};
use magnonsim::scattering::ScatteringSetup;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct JunctionDemo {
    lattice: SpinLattice,
    state: SpinState,
    config: IntegratorConfig,
    initial: f64,
}

impl JunctionDemo {
    pub fn build(arm_len: usize, wavenumber: f64, relative_pi: bool) -> magnonsim::Result<Self> {
        let setup = ScatteringSetup {
            arm_len,
            wavenumber,
            ..ScatteringSetup::default()
        };
        let config = IntegratorConfig::default();
        let lattice = setup.build_lattice()?;
        let state = setup.initial_state(&lattice, relative_pi, &config)?;
        let all: Vec<usize> = (0..lattice.len()).collect();
        let initial = magnon_number(&state.spins, &all);
        Ok(Self {
            lattice,
            state,
            config,
            initial,
        })
    }

    fn share(&self, names: &[&str]) -> f64 {
        let sites: Vec<usize> = names
            .iter()
            .flat_map(|n| self.lattice.region(n).unwrap_or_default().iter().copied())
            .collect();
        magnon_number(&self.state.spins, &sites) / self.initial
    }
}

#[wasm_bindgen]
impl JunctionDemo {
    /// Two packets on a cross of `arm_len`-site arms, in phase or opposite.
    #[wasm_bindgen(constructor)]
    pub fn new(arm_len: usize, wavenumber: f64, relative_pi: bool) -> Result<JunctionDemo, JsError> {
        Ok(Self::build(arm_len, wavenumber, relative_pi)?)
    }

    pub fn step(&mut self, steps: u32) -> Result<(), JsError> {
        let mut integrator = Integrator::new(&self.lattice, self.config)?;
        for _ in 0..steps {
            integrator.step(&mut self.state);
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn sites(&self) -> usize {
        self.lattice.len()
    }

    /// Flattened `[x0, y0, x1, y1, ...]`.
    pub fn positions(&self) -> Vec<f64> {
        (0..self.lattice.len()).flat_map(|j| self.lattice.position(j)).collect()
    }

    pub fn sx(&self) -> Vec<f64> {
        self.state.spins.iter().map(|s| s[0]).collect()
    }

    /// `[input arms, output arms]` as fractions of the launched excitation.
    pub fn shares(&self) -> Vec<f64> {
        vec![
            self.share(&[regions::ARM_A_IN, regions::ARM_B_IN]),
            self.share(&[regions::ARM_A_OUT, regions::ARM_B_OUT]),
        ]
    }
}

/// Truth table of a netlist as CSV; the `#` block carries the injectivity
/// verdicts.
pub fn truth_table_report(text: &str) -> Result<String, String> {
    let netlist = parse_netlist(text).map_err(|e| e.to_string())?;
    let table = truth_table(&netlist, netlist.default_max_time()).map_err(|e| e.to_string())?;
    let meta = Metadata::new("truth-table")
        .with("gate", &table.gate)
        .with("injective_phase_only", check_injective(&table, false).injective)
        .with("injective_with_timing", check_injective(&table, true).injective);
    let mut out = Vec::new();
    export::write_truth_table(&mut out, &meta, &table).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn truth_table_csv(netlist: &str) -> Result<String, JsError> {
    truth_table_report(netlist).map_err(|e| JsError::new(&e))
}

/// `steps` points of the dissipated energy (kT) with `axis` running linearly
/// from `from` to `to`, other parameters at their defaults except `gamma` and
/// `t`. Returns flattened `[x0, E0, x1, E1, ...]`.
pub fn curve(axis: &str, from: f64, to: f64, steps: usize, gamma: f64, t: f64, literal: bool) -> magnonsim::Result<Vec<f64>> {
    let axis: Axis = axis.parse()?;
    let mut base = DissipationParams {
        gamma,
        t,
        ..DissipationParams::default()
    };
    let interpretation = if literal {
        Interpretation::LiteralProduct
    } else {
        Interpretation::Additive
    };
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(2 * steps);
    for i in 0..steps {
        let mut x = from + (to - from) * i as f64 / (steps - 1) as f64;
        if matches!(axis, Axis::N | Axis::Nc) {
            x = x.round();
        }
        base.set(axis, x)?;
        out.push(x);
        out.push(dissipated_energy(&base, interpretation)?.total);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn dissipation_curve(
    axis: &str,
    from: f64,
    to: f64,
    steps: usize,
    gamma: f64,
    t: f64,
    literal: bool,
) -> Result<Vec<f64>, JsError> {
    Ok(curve(axis, from, to, steps, gamma, t, literal)?)
}

#[wasm_bindgen]
pub fn fig3_netlist() -> String {
    magnonsim::logic::FIG3_NET.to_string()
}
