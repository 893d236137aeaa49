//! Event-driven phase logic over netlists of cross-junctions and pi-shifters.
//!
//! A bit is the phase (0 or pi) of a packet relative to a reference. Packets
//! move at unit speed along edges, flip phase at each shifter, and interact
//! only at junctions, and only in pairs: equal phases continue straight
//! through, opposite phases reflect back along their incoming arms.

mod engine;
mod gates;
mod netlist;
mod table;

pub use engine::{simulate_gate, Event, EventKind, GateError, GateResult, LogicPacket, COINCIDENCE_WINDOW};
pub use gates::{buffer_netlist, fig3_netlist, fig4_netlist, inverter_netlist, BUFFER_NET, FIG3_NET, FIG4_NET, INVERTER_NET};
pub use netlist::{parse_netlist, Edge, GateNetlist, Junction, NetlistError, NetlistErrorKind, NodeRef, Port, PortRole};
pub use table::{check_injective, truth_table, Injectivity, TruthTable, TruthTableRow, MAX_TABLE_INPUTS};
