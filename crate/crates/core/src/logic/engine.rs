use std::collections::BTreeMap;

use thiserror::Error;

use super::netlist::{GateNetlist, NodeRef, PortRole};

/// Arrivals closer than this (in delay units) count as simultaneous.
pub const COINCIDENCE_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Launch { port: String, edge: String },
    Shifter { edge: String, position: f64 },
    Transmit { junction: String, from_arm: String, to_arm: String },
    Reflect { junction: String, arm: String },
    PassThrough { port: String, edge: String },
    Bounce { port: String },
    Exit { port: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub packet: usize,
    pub kind: EventKind,
    /// Phase bit of the packet after the event.
    pub phase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicPacket {
    pub id: usize,
    pub source: String,
    pub initial_phase: bool,
    pub phase: bool,
    pub edge: usize,
    /// Distance from the edge's `from` node.
    pub position: f64,
    /// `+1` moving from `from` to `to`, `-1` the other way.
    pub direction: i8,
    pub born_at: f64,
    pub exited_at: Option<f64>,
    pub exit_port: Option<String>,
    pub shifters_crossed: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub outputs: BTreeMap<String, bool>,
    pub arrival_times: BTreeMap<String, f64>,
    pub event_log: Vec<Event>,
    pub packets: Vec<LogicPacket>,
    pub terminated: bool,
}

impl GateResult {
    pub fn reflect_events(&self) -> usize {
        self.event_log
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Reflect { .. }))
            .count()
    }

    /// Packet that left the gate at `port`, if any.
    pub fn packet_exiting_at(&self, port: &str) -> Option<&LogicPacket> {
        self.packets
            .iter()
            .find(|p| p.exit_port.as_deref() == Some(port))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("input port `{0}` has no assigned bit")]
    MissingInput(String),
    #[error("`{0}` is not an input port")]
    UnknownInput(String),
    #[error("max_time must be positive")]
    InvalidMaxTime,
    #[error("unpaired arrival at junction `{junction}` at t = {time}")]
    UnpairedArrival {
        junction: String,
        time: f64,
        log: Vec<Event>,
    },
    #[error("{count} packets reached junction `{junction}` at t = {time}; only pairs on distinct arms are defined")]
    CrowdedJunction {
        junction: String,
        time: f64,
        count: usize,
        log: Vec<Event>,
    },
    #[error("packets still in flight at max_time = {max_time}")]
    NonTerminating { max_time: f64, log: Vec<Event> },
    #[error("truth table over {0} inputs exceeds the supported maximum")]
    TooManyInputs(usize),
}

impl GateError {
    pub fn event_log(&self) -> Option<&[Event]> {
        match self {
            GateError::UnpairedArrival { log, .. }
            | GateError::CrowdedJunction { log, .. }
            | GateError::NonTerminating { log, .. } => Some(log),
            _ => None,
        }
    }
}

/// What a packet meets next on its edge.
#[derive(Debug, Clone, Copy)]
enum Next {
    Shifter { index: usize },
    Node,
}

struct Engine<'a> {
    net: &'a GateNetlist,
    packets: Vec<LogicPacket>,
    /// Start time of the current edge traversal, per packet.
    entered_at: Vec<f64>,
    log: Vec<Event>,
}

impl<'a> Engine<'a> {
    fn edge_len(&self, p: &LogicPacket) -> f64 {
        self.net.edges[p.edge].length
    }

    /// Next event time and kind for an in-flight packet.
    fn next_event(&self, id: usize) -> (f64, Next) {
        let p = &self.packets[id];
        let edge = &self.net.edges[p.edge];
        let t0 = self.entered_at[id];
        let len = edge.length;
        let start = if p.direction > 0 { 0.0 } else { len };
        // shifters strictly ahead of the current position
        let ahead = edge.shifters.iter().enumerate().filter(|&(_, &s)| {
            if p.direction > 0 {
                s > p.position
            } else {
                s < p.position
            }
        });
        let nearest = if p.direction > 0 {
            ahead.min_by(|a, b| a.1.total_cmp(b.1))
        } else {
            ahead.max_by(|a, b| a.1.total_cmp(b.1))
        };
        match nearest {
            Some((index, &s)) => (t0 + (s - start).abs(), Next::Shifter { index }),
            None => (t0 + len, Next::Node),
        }
    }

    fn node_ahead(&self, id: usize) -> &'a str {
        let p = &self.packets[id];
        let edge = &self.net.edges[p.edge];
        if p.direction > 0 {
            &edge.to
        } else {
            &edge.from
        }
    }

    fn arm_of(&self, id: usize) -> &'a str {
        &self.net.edges[self.packets[id].edge].name
    }

    /// Puts a packet at `node` onto `edge`, heading away from `node`.
    fn depart(&mut self, id: usize, node: &str, edge: usize, time: f64) {
        let e = &self.net.edges[edge];
        let p = &mut self.packets[id];
        p.edge = edge;
        if e.from == node {
            p.direction = 1;
            p.position = 0.0;
        } else {
            p.direction = -1;
            p.position = e.length;
        }
        self.entered_at[id] = time;
    }

    fn record(&mut self, time: f64, id: usize, kind: EventKind) {
        let phase = self.packets[id].phase;
        self.log.push(Event {
            time,
            packet: id,
            kind,
            phase,
        });
    }
}

/// Runs the ideal phase-logic model.
///
/// One packet is launched at `t = 0` from every input-capable port along its
/// launch edge. The run ends when all packets have exited at output ports, or
/// fails with a diagnostic (and the event log so far).
pub fn simulate_gate(
    netlist: &GateNetlist,
    inputs: &BTreeMap<String, bool>,
    max_time: f64,
) -> Result<GateResult, GateError> {
    if !(max_time > 0.0) {
        return Err(GateError::InvalidMaxTime);
    }
    for name in inputs.keys() {
        if !netlist.port(name).is_some_and(|p| p.role.is_input()) {
            return Err(GateError::UnknownInput(name.clone()));
        }
    }
    let mut engine = Engine {
        net: netlist,
        packets: Vec::new(),
        entered_at: Vec::new(),
        log: Vec::new(),
    };
    for port in netlist.input_ports() {
        let bit = *inputs
            .get(&port.name)
            .ok_or_else(|| GateError::MissingInput(port.name.clone()))?;
        let edge = netlist
            .launch_edge(&port.name)
            .expect("validated netlist: ports have edges");
        let edge_idx = netlist.edge_index(&edge.name).expect("edge exists");
        let id = engine.packets.len();
        engine.packets.push(LogicPacket {
            id,
            source: port.name.clone(),
            initial_phase: bit,
            phase: bit,
            edge: edge_idx,
            position: 0.0,
            direction: 1,
            born_at: 0.0,
            exited_at: None,
            exit_port: None,
            shifters_crossed: 0,
        });
        engine.entered_at.push(0.0);
        engine.depart(id, &port.name, edge_idx, 0.0);
        engine.record(
            0.0,
            id,
            EventKind::Launch {
                port: port.name.clone(),
                edge: edge.name.clone(),
            },
        );
    }

    let mut outputs = BTreeMap::new();
    let mut arrival_times = BTreeMap::new();

    loop {
        let active: Vec<usize> = (0..engine.packets.len())
            .filter(|&i| engine.packets[i].exited_at.is_none())
            .collect();
        if active.is_empty() {
            break;
        }
        let upcoming: Vec<(usize, f64, Next)> = active
            .iter()
            .map(|&i| {
                let (t, n) = engine.next_event(i);
                (i, t, n)
            })
            .collect();
        let t_min = upcoming.iter().map(|u| u.1).fold(f64::INFINITY, f64::min);
        if t_min > max_time {
            return Err(GateError::NonTerminating {
                max_time,
                log: engine.log,
            });
        }
        let due: Vec<(usize, f64, Next)> = upcoming
            .into_iter()
            .filter(|u| u.1 - t_min < COINCIDENCE_WINDOW)
            .collect();

        // Shifter crossings first; they never interact.
        let mut arrivals: BTreeMap<&str, Vec<(usize, f64)>> = BTreeMap::new();
        let mut crossed_shifter = false;
        for &(id, t, next) in &due {
            match next {
                Next::Shifter { index } => {
                    crossed_shifter = true;
                    let edge = &netlist.edges[engine.packets[id].edge];
                    let pos = edge.shifters[index];
                    let p = &mut engine.packets[id];
                    p.position = pos;
                    p.phase = !p.phase;
                    p.shifters_crossed += 1;
                    // re-anchor the traversal clock at the shifter
                    let start = if p.direction > 0 { 0.0 } else { edge.length };
                    engine.entered_at[id] = t - (pos - start).abs();
                    engine.record(
                        t,
                        id,
                        EventKind::Shifter {
                            edge: edge.name.clone(),
                            position: pos,
                        },
                    );
                }
                Next::Node => arrivals.entry(engine.node_ahead(id)).or_default().push((id, t)),
            }
        }
        if crossed_shifter {
            // Arrivals due in the same window are re-collected on the next pass,
            // so junction pairing always sees every simultaneous packet.
            continue;
        }

        for (node, group) in arrivals {
            let time = group.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
            for &(id, _) in &group {
                let len = engine.edge_len(&engine.packets[id]);
                engine.packets[id].position = if engine.packets[id].direction > 0 { len } else { 0.0 };
            }
            match netlist.node(node).expect("validated node") {
                NodeRef::Junction(ji) => {
                    let junction = &netlist.junctions[ji];
                    if group.len() == 1 {
                        let (_, t) = group[0];
                        return Err(GateError::UnpairedArrival {
                            junction: junction.name.clone(),
                            time: t,
                            log: engine.log,
                        });
                    }
                    let (a, b) = (group[0].0, group[1].0);
                    if group.len() > 2 || engine.arm_of(a) == engine.arm_of(b) {
                        return Err(GateError::CrowdedJunction {
                            junction: junction.name.clone(),
                            time,
                            count: group.len(),
                            log: engine.log,
                        });
                    }
                    let same_phase = engine.packets[a].phase == engine.packets[b].phase;
                    for id in [a, b] {
                        let arm = engine.arm_of(id);
                        if same_phase {
                            let out = junction.opposite(arm).expect("validated pairs");
                            let out_idx = netlist.edge_index(out).expect("edge exists");
                            engine.depart(id, &junction.name, out_idx, time);
                            engine.record(
                                time,
                                id,
                                EventKind::Transmit {
                                    junction: junction.name.clone(),
                                    from_arm: arm.to_string(),
                                    to_arm: out.to_string(),
                                },
                            );
                        } else {
                            let back = engine.packets[id].edge;
                            engine.depart(id, &junction.name, back, time);
                            engine.record(
                                time,
                                id,
                                EventKind::Reflect {
                                    junction: junction.name.clone(),
                                    arm: arm.to_string(),
                                },
                            );
                        }
                    }
                }
                NodeRef::Port(pi) => {
                    let port = &netlist.ports[pi];
                    for &(id, t) in &group {
                        if port.role.is_output() {
                            let p = &mut engine.packets[id];
                            p.exited_at = Some(t);
                            p.exit_port = Some(port.name.clone());
                            outputs.insert(port.name.clone(), p.phase);
                            arrival_times.insert(port.name.clone(), t);
                            engine.record(t, id, EventKind::Exit { port: port.name.clone() });
                            continue;
                        }
                        debug_assert_eq!(port.role, PortRole::Input);
                        let current = engine.packets[id].edge;
                        let other = netlist
                            .incident_edges(&port.name)
                            .find(|e| e.name != netlist.edges[current].name)
                            .map(|e| netlist.edge_index(&e.name).expect("edge exists"));
                        match other {
                            Some(next) => {
                                engine.depart(id, &port.name, next, t);
                                engine.record(
                                    t,
                                    id,
                                    EventKind::PassThrough {
                                        port: port.name.clone(),
                                        edge: netlist.edges[next].name.clone(),
                                    },
                                );
                            }
                            None => {
                                engine.depart(id, &port.name, current, t);
                                engine.record(t, id, EventKind::Bounce { port: port.name.clone() });
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(GateResult {
        outputs,
        arrival_times,
        event_log: engine.log,
        packets: engine.packets,
        terminated: true,
    })
}
