use std::collections::BTreeMap;

use super::engine::{simulate_gate, GateError, GateResult};
use super::netlist::GateNetlist;

/// Enumeration limit (`2^16` rows).
pub const MAX_TABLE_INPUTS: usize = 16;

#[derive(Debug, Clone)]
pub struct TruthTableRow {
    pub inputs: Vec<bool>,
    pub result: Result<GateResult, GateError>,
}

impl TruthTableRow {
    /// Output bits in table column order; `None` where a port received nothing.
    pub fn output_bits(&self, outputs: &[String]) -> Option<Vec<Option<bool>>> {
        let r = self.result.as_ref().ok()?;
        Some(outputs.iter().map(|o| r.outputs.get(o).copied()).collect())
    }

    pub fn arrival_times(&self, outputs: &[String]) -> Option<Vec<Option<f64>>> {
        let r = self.result.as_ref().ok()?;
        Some(outputs.iter().map(|o| r.arrival_times.get(o).copied()).collect())
    }
}

#[derive(Debug, Clone)]
pub struct TruthTable {
    pub gate: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<TruthTableRow>,
}

impl TruthTable {
    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.result.is_ok())
    }
}

/// Simulates every input combination; the first input port is the most
/// significant bit of the row index.
pub fn truth_table(netlist: &GateNetlist, max_time: f64) -> Result<TruthTable, GateError> {
    let inputs: Vec<String> = netlist.input_ports().map(|p| p.name.clone()).collect();
    let outputs: Vec<String> = netlist.output_ports().map(|p| p.name.clone()).collect();
    if inputs.len() > MAX_TABLE_INPUTS {
        return Err(GateError::TooManyInputs(inputs.len()));
    }
    let n = inputs.len();
    let rows = (0..1usize << n)
        .map(|row| {
            let bits: Vec<bool> = (0..n).map(|i| (row >> (n - 1 - i)) & 1 == 1).collect();
            let assignment: BTreeMap<String, bool> =
                inputs.iter().cloned().zip(bits.iter().copied()).collect();
            TruthTableRow {
                inputs: bits,
                result: simulate_gate(netlist, &assignment, max_time),
            }
        })
        .collect();
    Ok(TruthTable {
        gate: netlist.name.clone(),
        inputs,
        outputs,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Injectivity {
    pub injective: bool,
    /// Pairs of input rows that map to the same output key.
    pub collisions: Vec<(Vec<bool>, Vec<bool>)>,
}

/// Arrival times are compared on a 1e-6 grid.
fn time_key(t: Option<f64>) -> Option<i64> {
    t.map(|t| (t * 1e6).round() as i64)
}

/// Checks whether distinct inputs give distinct outputs. With `with_timing`
/// the key also includes the arrival-time vector. Rows that aborted are
/// skipped.
pub fn check_injective(table: &TruthTable, with_timing: bool) -> Injectivity {
    let mut seen: BTreeMap<(Vec<Option<bool>>, Vec<Option<i64>>), Vec<bool>> = BTreeMap::new();
    let mut collisions = Vec::new();
    for row in &table.rows {
        let Some(bits) = row.output_bits(&table.outputs) else {
            continue;
        };
        let times = if with_timing {
            row.arrival_times(&table.outputs)
                .unwrap_or_default()
                .into_iter()
                .map(time_key)
                .collect()
        } else {
            Vec::new()
        };
        match seen.get(&(bits.clone(), times.clone())) {
            Some(prev) => collisions.push((prev.clone(), row.inputs.clone())),
            None => {
                seen.insert((bits, times), row.inputs.clone());
            }
        }
    }
    Injectivity {
        injective: collisions.is_empty(),
        collisions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{buffer_netlist, fig3_netlist, fig4_netlist, inverter_netlist};

    fn phase_rows(t: &TruthTable) -> Vec<(Vec<bool>, Vec<bool>)> {
        t.rows
            .iter()
            .map(|r| {
                let out = r.output_bits(&t.outputs).unwrap().into_iter().map(Option::unwrap).collect();
                (r.inputs.clone(), out)
            })
            .collect()
    }

    #[test]
    fn fig3_table() {
        let t = truth_table(&fig3_netlist(), 64.0).unwrap();
        let (f, tr) = (false, true);
        assert_eq!(
            phase_rows(&t),
            vec![
                (vec![f, f], vec![tr, f]),
                (vec![f, tr], vec![f, tr]),
                (vec![tr, f], vec![tr, f]),
                (vec![tr, tr], vec![f, tr]),
            ]
        );
        for row in &t.rows {
            let r = row.result.as_ref().unwrap();
            let expected = if row.inputs[0] == row.inputs[1] { 0 } else { 2 };
            assert_eq!(r.reflect_events(), expected);
        }
    }

    #[test]
    fn fig3_injectivity() {
        let t = truth_table(&fig3_netlist(), 64.0).unwrap();
        let phase_only = check_injective(&t, false);
        assert!(!phase_only.injective);
        let (f, tr) = (false, true);
        assert!(phase_only.collisions.contains(&(vec![f, tr], vec![tr, tr])));
        assert!(phase_only.collisions.contains(&(vec![f, f], vec![tr, f])));
        assert!(check_injective(&t, true).injective);
    }

    #[test]
    fn buffer_and_inverter_tables() {
        let t = truth_table(&buffer_netlist(), 64.0).unwrap();
        assert_eq!(phase_rows(&t), vec![(vec![false], vec![false]), (vec![true], vec![true])]);
        assert!(check_injective(&t, false).injective);
        let t = truth_table(&inverter_netlist(), 64.0).unwrap();
        assert_eq!(phase_rows(&t), vec![(vec![false], vec![true]), (vec![true], vec![false])]);
    }

    #[test]
    fn fig4_terminates_for_all_inputs() {
        let t = truth_table(&fig4_netlist(), 64.0).unwrap();
        assert!(t.is_complete());
        for row in &t.rows {
            let r = row.result.as_ref().unwrap();
            assert_eq!(r.packets.iter().filter(|p| p.exited_at.is_some()).count(), 2);
        }
    }
}
