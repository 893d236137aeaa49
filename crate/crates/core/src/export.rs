//! CSV writers. Every file opens with a `#` metadata block (tool version plus
//! the full run configuration), followed by a header row. Numbers are written
//! in Rust's shortest round-trip form, so identical runs give identical bytes.

use std::io::Write;

use crate::dispersion::DispersionPoint;
use crate::dissipation::{Interpretation, SweepRow};
use crate::dynamics::Trajectory;
use crate::lattice::{SpinLattice, SpinState};
use crate::logic::TruthTable;
use crate::scattering::{ScatteringResult, ScatteringSetup};
use crate::Result;

/// Ordered `key = value` pairs written as the comment block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Self::default()
            .with("tool", "magnonsim")
            .with("version", crate::VERSION)
            .with("command", command)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn write<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k} = {}", v.replace('\n', " "))?;
        }
        Ok(())
    }
}

/// Writes the metadata block, a header and the rows.
pub fn write_table<W, I, R>(w: &mut W, meta: &Metadata, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    meta.write(w)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Rows `(site, x, y, label, field)`.
pub fn write_lattice<W: Write>(w: &mut W, meta: &Metadata, lattice: &SpinLattice) -> Result<()> {
    let rows = (0..lattice.len()).map(|j| {
        let [x, y] = lattice.position(j);
        vec![j.to_string(), num(x), num(y), lattice.label(j).to_string(), num(lattice.field(j))]
    });
    write_table(w, meta, &["site", "x", "y", "label", "field"], rows)
}

/// Snapshot rows `(time, site_id, Sx, Sy, Sz)`.
pub fn write_trajectory<W: Write>(w: &mut W, meta: &Metadata, trajectory: &Trajectory) -> Result<()> {
    let rows = trajectory.samples.iter().flat_map(|s| {
        s.spins.iter().enumerate().map(move |(j, v)| {
            vec![num(s.time), j.to_string(), num(v[0]), num(v[1]), num(v[2])]
        })
    });
    write_table(w, meta, &["time", "site_id", "Sx", "Sy", "Sz"], rows)
}

/// Probe rows `(time, probe_name, value)`.
pub fn write_probes<W: Write>(w: &mut W, meta: &Metadata, trajectory: &Trajectory) -> Result<()> {
    let rows = trajectory.probe_times.iter().enumerate().flat_map(|(i, t)| {
        trajectory
            .probes
            .iter()
            .map(move |p| vec![num(*t), p.name.clone(), num(p.values[i])])
    });
    write_table(w, meta, &["time", "probe_name", "value"], rows)
}

/// One visualization frame: `(site, x, y, Sx, Sy, Sz)`.
pub fn write_frame<W: Write>(w: &mut W, meta: &Metadata, lattice: &SpinLattice, state: &SpinState) -> Result<()> {
    let rows = state.spins.iter().enumerate().map(|(j, v)| {
        let [x, y] = lattice.position(j);
        vec![j.to_string(), num(x), num(y), num(v[0]), num(v[1]), num(v[2])]
    });
    let meta = meta.clone().with("time", state.time);
    write_table(w, &meta, &["site", "x", "y", "Sx", "Sy", "Sz"], rows)
}

pub fn scattering_metadata(meta: Metadata, setup: &ScatteringSetup) -> Metadata {
    meta.with("arm_len", setup.arm_len)
        .with("width", setup.width)
        .with("wavenumber", setup.wavenumber)
        .with("amplitude", setup.amplitude)
        .with("center", setup.center())
        .with("junction", format!("{:?}", setup.junction).to_lowercase())
        .with("coupling", setup.lattice.coupling)
        .with("field", setup.lattice.field)
        .with("plateau_steps", setup.plateau_steps)
        .with("plateau_tol", setup.plateau_tol)
}

/// Rows `(relative_phase, k, width, amplitude, T, R, leakage,
/// junction_pinning, arrival_time, gamma)`; `gamma` pairs the 0 and pi runs.
pub fn write_scattering<W: Write>(
    w: &mut W,
    meta: &Metadata,
    setup: &ScatteringSetup,
    results: &[ScatteringResult],
    gamma: Option<f64>,
) -> Result<()> {
    let gamma = gamma.map(num).unwrap_or_default();
    let rows = results.iter().map(|r| {
        vec![
            if r.relative_pi { "pi" } else { "0" }.to_string(),
            num(setup.wavenumber),
            num(setup.width),
            num(setup.amplitude),
            num(r.transmission),
            num(r.reflection),
            num(r.leakage),
            num(r.junction_pinning),
            num(r.arrival_time),
            gamma.clone(),
        ]
    });
    write_table(
        w,
        meta,
        &["relative_phase", "k", "width", "amplitude", "T", "R", "leakage", "junction_pinning", "arrival_time", "gamma"],
        rows,
    )
}

/// Rows `(in_*, out_*, t_*, reflect_events, status)`; empty cells where a
/// port received no packet or the row failed.
pub fn write_truth_table<W: Write>(w: &mut W, meta: &Metadata, table: &TruthTable) -> Result<()> {
    let mut header: Vec<String> = table.inputs.iter().map(|p| format!("in_{p}")).collect();
    header.extend(table.outputs.iter().map(|p| format!("out_{p}")));
    header.extend(table.outputs.iter().map(|p| format!("t_{p}")));
    header.push("reflect_events".into());
    header.push("status".into());
    let rows = table.rows.iter().map(|row| {
        let mut cells: Vec<String> = row.inputs.iter().map(|&b| bit(b).to_string()).collect();
        match &row.result {
            Ok(r) => {
                cells.extend(table.outputs.iter().map(|o| r.outputs.get(o).map(|&b| bit(b).to_string()).unwrap_or_default()));
                cells.extend(
                    table
                        .outputs
                        .iter()
                        .map(|o| r.arrival_times.get(o).map(|t| num(*t)).unwrap_or_default()),
                );
                cells.push(r.reflect_events().to_string());
                cells.push("ok".into());
            }
            Err(e) => {
                cells.extend(std::iter::repeat_n(String::new(), 2 * table.outputs.len() + 1));
                cells.push(e.to_string());
            }
        }
        cells
    });
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(w, meta, &header, rows)
}

/// Rows `(axis_value, E_diss_kT, excitation_term, junction_term,
/// propagation_term, interpretation)`.
pub fn write_sweep<W: Write>(w: &mut W, meta: &Metadata, rows: &[SweepRow], interpretation: Interpretation) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            num(r.value),
            num(r.result.total),
            num(r.result.excitation),
            num(r.result.junction),
            num(r.result.propagation),
            interpretation.to_string(),
        ]
    });
    write_table(
        w,
        meta,
        &["axis_value", "E_diss_kT", "excitation_term", "junction_term", "propagation_term", "interpretation"],
        rows,
    )
}

/// Rows `(k, omega_measured, omega_theory, rel_error, v_arrival, low_confidence)`.
pub fn write_dispersion<W: Write>(w: &mut W, meta: &Metadata, points: &[DispersionPoint]) -> Result<()> {
    let rows = points.iter().map(|p| {
        vec![
            num(p.k),
            num(p.omega),
            num(p.omega_theory),
            num(p.rel_error),
            num(p.arrival_velocity),
            p.low_confidence.to_string(),
        ]
    });
    write_table(
        w,
        meta,
        &["k", "omega_measured", "omega_theory", "rel_error", "v_arrival", "low_confidence"],
        rows,
    )
}
