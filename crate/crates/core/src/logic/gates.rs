//! Built-in netlists.

use super::netlist::{parse_netlist, GateNetlist};

pub const BUFFER_NET: &str = "\
# buffer: a plain waveguide
gate buffer
port A in
port B out
edge w A B len=4
";

pub const INVERTER_NET: &str = "\
# inverter: a waveguide with one pi-shifter
gate inverter
port A in
port B out
edge w A B len=4 shifters=2
";

/// One junction, one shifter, two bidirectional ports. Each port sits on a
/// loop: its launch arm leads into the junction and the through-arm of the
/// other port leads back to it. Reflected paths are 6 units long, transmitted
/// paths 8, so outputs carry distinct arrival times.
pub const FIG3_NET: &str = "\
# two-port reversible gate: one cross-junction and one pi-shifter
gate fig3
port A bidir
port B bidir
junction J pairs (a,d) (b,c)
edge a A J len=3
edge b B J len=3
# through-arm opposite B returns to A across the shifter
edge c J A len=5 shifters=5/2
# through-arm opposite A returns to B
edge d J B len=5
";

/// Experimental four-terminal variant with unidirectional flow.
///
/// Equal inputs cross `J1` straight to the outputs. Unequal inputs reflect
/// at `J1`, pass back through their input ports onto the lower loop where
/// the shifter on `r` makes them equal, and cross `J2` to the outputs.
pub const FIG4_NET: &str = "\
# EXPERIMENTAL four-terminal gate (inputs A, B; outputs A', B')
gate fig4
port A in
port B in
port A' out
port B' out
junction J1 pairs (a,p) (b,q)
junction J2 pairs (r,oa) (s,ob)
edge a A J1 len=2
edge b B J1 len=2
edge r A J2 len=3 shifters=3/2
edge s B J2 len=3
edge p J1 B' len=4
edge q J1 A' len=4 shifters=2
edge oa J2 A' len=2 shifters=1
edge ob J2 B' len=2
";

pub fn buffer_netlist() -> GateNetlist {
    parse_netlist(BUFFER_NET).expect("built-in netlist")
}

pub fn inverter_netlist() -> GateNetlist {
    parse_netlist(INVERTER_NET).expect("built-in netlist")
}

pub fn fig3_netlist() -> GateNetlist {
    parse_netlist(FIG3_NET).expect("built-in netlist")
}

pub fn fig4_netlist() -> GateNetlist {
    parse_netlist(FIG4_NET).expect("built-in netlist")
}
