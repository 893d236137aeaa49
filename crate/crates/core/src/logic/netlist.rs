use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortRole {
    /// Launch-only terminal. A returning packet passes through a port with two
    /// edges and bounces off a port with one (closed waveguide end).
    Input,
    Output,
    Bidirectional,
}

impl PortRole {
    pub fn is_input(self) -> bool {
        matches!(self, PortRole::Input | PortRole::Bidirectional)
    }

    pub fn is_output(self) -> bool {
        matches!(self, PortRole::Output | PortRole::Bidirectional)
    }

    fn keyword(self) -> &'static str {
        match self {
            PortRole::Input => "in",
            PortRole::Output => "out",
            PortRole::Bidirectional => "bidir",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub name: String,
    pub role: PortRole,
}

/// Degree-4 node. Each pair lists two arms (edge names) that are straight
/// through from each other.
#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub name: String,
    pub pairs: [(String, String); 2],
}

impl Junction {
    /// Arm straight through from `arm`.
    pub fn opposite(&self, arm: &str) -> Option<&str> {
        self.pairs.iter().find_map(|(a, b)| {
            if a == arm {
                Some(b.as_str())
            } else if b == arm {
                Some(a.as_str())
            } else {
                None
            }
        })
    }

    /// Arms ordered `[first of pair 0, first of pair 1, second of pair 0, second of pair 1]`.
    pub fn arm_order(&self) -> [&str; 4] {
        [&self.pairs[0].0, &self.pairs[1].0, &self.pairs[0].1, &self.pairs[1].1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub name: String,
    pub from: String,
    pub to: String,
    /// Length in delay units (packets move at unit speed).
    pub length: f64,
    /// Shifter positions measured from `from`, ascending, inside `(0, length)`.
    pub shifters: Vec<f64>,
}

impl Edge {
    pub fn other_end(&self, node: &str) -> &str {
        if self.from == node {
            &self.to
        } else {
            &self.from
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Port(usize),
    Junction(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateNetlist {
    pub name: String,
    pub ports: Vec<Port>,
    pub junctions: Vec<Junction>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("edge `{edge}` references unknown node `{node}`")]
    UnknownNode { edge: String, node: String },
    #[error("node `{0}` has no edges")]
    DanglingNode(String),
    #[error("edge `{0}` must have positive length")]
    NonPositiveLength(String),
    #[error("edge `{edge}`: shifter at {position} outside (0, {length})")]
    ShifterOutOfRange { edge: String, position: f64, length: f64 },
    #[error("junction `{node}` has degree {degree}, expected 4")]
    DegreeViolation { node: String, degree: usize },
    #[error("input port `{node}` has degree {degree}, at most 2 supported")]
    InputDegree { node: String, degree: usize },
    #[error("junction `{0}`: arm pairs must name its four incident edges exactly once")]
    BadPairs(String),
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("netlist graph is not connected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct NetlistError {
    pub line: Option<usize>,
    pub kind: NetlistErrorKind,
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "netlist line {line}: {}", self.kind),
            None => write!(f, "netlist: {}", self.kind),
        }
    }
}

impl NetlistErrorKind {
    fn at(self, line: Option<usize>) -> NetlistError {
        NetlistError { line, kind: self }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> NetlistError {
    NetlistErrorKind::Syntax(msg.into()).at(Some(line))
}

/// Parses `3`, `2.5` or `5/2`.
fn parse_rational(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => text.trim().parse().ok(),
    }
    .filter(|v: &f64| v.is_finite())
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(['(', ')', ',', '=', '#'])
}

/// Parses the line-oriented netlist format:
///
/// ```text
/// gate <name>                                  (optional)
/// port <name> [in|out|bidir]
/// junction <name> pairs (<armA>,<armC>) (<armB>,<armD>)
/// edge <name> <nodeA> <nodeB> len=<rational> shifters=<p1,p2,...>
/// # comment
/// ```
///
/// Arms are named by the incident edge. The netlist is validated before it is
/// returned.
pub fn parse_netlist(text: &str) -> Result<GateNetlist, NetlistError> {
    let mut name = String::from("netlist");
    let mut ports = Vec::new();
    let mut junctions = Vec::new();
    let mut edges = Vec::new();
    let mut lines = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "gate" => {
                if rest.is_empty() {
                    return Err(syntax(line_no, "gate needs a name"));
                }
                name = rest.to_string();
            }
            "port" => {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let (port_name, role) = match tokens.as_slice() {
                    [n] => (*n, PortRole::Bidirectional),
                    [n, r] => {
                        let role = match *r {
                            "in" => PortRole::Input,
                            "out" => PortRole::Output,
                            "bidir" => PortRole::Bidirectional,
                            other => return Err(syntax(line_no, format!("unknown port role `{other}`"))),
                        };
                        (*n, role)
                    }
                    _ => return Err(syntax(line_no, "expected `port <name> [in|out|bidir]`")),
                };
                if !valid_name(port_name) {
                    return Err(syntax(line_no, format!("invalid name `{port_name}`")));
                }
                lines.insert(port_name.to_string(), line_no);
                ports.push(Port {
                    name: port_name.to_string(),
                    role,
                });
            }
            "junction" => {
                let junction = parse_junction(rest).ok_or_else(|| {
                    syntax(line_no, "expected `junction <name> pairs (<a>,<c>) (<b>,<d>)`")
                })?;
                lines.insert(junction.name.clone(), line_no);
                junctions.push(junction);
            }
            "edge" => {
                let edge = parse_edge(rest, line_no)?;
                lines.insert(edge.name.clone(), line_no);
                edges.push(edge);
            }
            other => return Err(syntax(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let netlist = GateNetlist {
        name,
        ports,
        junctions,
        edges,
    };
    netlist.validate_with_lines(|n| lines.get(n).copied())?;
    Ok(netlist)
}

fn parse_junction(rest: &str) -> Option<Junction> {
    let (name, rest) = rest.split_once(char::is_whitespace)?;
    let rest = rest.trim().strip_prefix("pairs")?;
    let compact: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact.strip_prefix('(')?.strip_suffix(')')?;
    let (first, second) = inner.split_once(")(")?;
    let pair = |s: &str| -> Option<(String, String)> {
        let (a, b) = s.split_once(',')?;
        (valid_name(a) && valid_name(b)).then(|| (a.to_string(), b.to_string()))
    };
    if !valid_name(name) {
        return None;
    }
    Some(Junction {
        name: name.to_string(),
        pairs: [pair(first)?, pair(second)?],
    })
}

fn parse_edge(rest: &str, line_no: usize) -> Result<Edge, NetlistError> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() < 4 {
        return Err(syntax(
            line_no,
            "expected `edge <name> <nodeA> <nodeB> len=<rational> [shifters=<p,...>]`",
        ));
    }
    let (name, from, to) = (tokens[0], tokens[1], tokens[2]);
    for n in [name, from, to] {
        if !valid_name(n) {
            return Err(syntax(line_no, format!("invalid name `{n}`")));
        }
    }
    let mut length = None;
    let mut shifters = Vec::new();
    for token in &tokens[3..] {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| syntax(line_no, format!("expected key=value, got `{token}`")))?;
        match key {
            "len" => {
                let v = parse_rational(value)
                    .ok_or_else(|| syntax(line_no, format!("bad length `{value}`")))?;
                length = Some(v);
            }
            "shifters" => {
                for p in value.split(',').filter(|p| !p.trim().is_empty()) {
                    let v = parse_rational(p)
                        .ok_or_else(|| syntax(line_no, format!("bad shifter position `{p}`")))?;
                    shifters.push(v);
                }
            }
            other => return Err(syntax(line_no, format!("unknown edge attribute `{other}`"))),
        }
    }
    let length = length.ok_or_else(|| syntax(line_no, "edge needs len=<rational>"))?;
    shifters.sort_by(f64::total_cmp);
    Ok(Edge {
        name: name.to_string(),
        from: from.to_string(),
        to: to.to_string(),
        length,
        shifters,
    })
}

impl GateNetlist {
    pub fn validate(&self) -> Result<(), NetlistError> {
        self.validate_with_lines(|_| None)
    }

    fn validate_with_lines(&self, line_of: impl Fn(&str) -> Option<usize>) -> Result<(), NetlistError> {
        let mut names = BTreeSet::new();
        let all_names = self
            .ports
            .iter()
            .map(|p| &p.name)
            .chain(self.junctions.iter().map(|j| &j.name))
            .chain(self.edges.iter().map(|e| &e.name));
        for n in all_names {
            if !names.insert(n.as_str()) {
                return Err(NetlistErrorKind::Duplicate(n.clone()).at(line_of(n)));
            }
        }
        for e in &self.edges {
            let line = line_of(&e.name);
            for node in [&e.from, &e.to] {
                if self.node(node).is_none() {
                    return Err(NetlistErrorKind::UnknownNode {
                        edge: e.name.clone(),
                        node: node.clone(),
                    }
                    .at(line));
                }
            }
            if e.from == e.to {
                return Err(NetlistErrorKind::SelfLoop(e.name.clone()).at(line));
            }
            if !(e.length > 0.0) {
                return Err(NetlistErrorKind::NonPositiveLength(e.name.clone()).at(line));
            }
            if let Some(&p) = e.shifters.iter().find(|&&p| !(p > 0.0 && p < e.length)) {
                return Err(NetlistErrorKind::ShifterOutOfRange {
                    edge: e.name.clone(),
                    position: p,
                    length: e.length,
                }
                .at(line));
            }
        }
        for p in &self.ports {
            let degree = self.incident_edges(&p.name).count();
            if degree == 0 {
                return Err(NetlistErrorKind::DanglingNode(p.name.clone()).at(line_of(&p.name)));
            }
            if p.role == PortRole::Input && degree > 2 {
                return Err(NetlistErrorKind::InputDegree {
                    node: p.name.clone(),
                    degree,
                }
                .at(line_of(&p.name)));
            }
        }
        for j in &self.junctions {
            let line = line_of(&j.name);
            let incident: Vec<&str> = self.incident_edges(&j.name).map(|e| e.name.as_str()).collect();
            if incident.is_empty() {
                return Err(NetlistErrorKind::DanglingNode(j.name.clone()).at(line));
            }
            if incident.len() != 4 {
                return Err(NetlistErrorKind::DegreeViolation {
                    node: j.name.clone(),
                    degree: incident.len(),
                }
                .at(line));
            }
            let mut arms: Vec<&str> = j.arm_order().to_vec();
            let mut incident_sorted = incident.clone();
            arms.sort_unstable();
            incident_sorted.sort_unstable();
            if arms != incident_sorted {
                return Err(NetlistErrorKind::BadPairs(j.name.clone()).at(line));
            }
        }
        if !self.is_connected() {
            return Err(NetlistErrorKind::Disconnected.at(None));
        }
        Ok(())
    }

    pub fn node(&self, name: &str) -> Option<NodeRef> {
        if let Some(i) = self.ports.iter().position(|p| p.name == name) {
            return Some(NodeRef::Port(i));
        }
        self.junctions
            .iter()
            .position(|j| j.name == name)
            .map(NodeRef::Junction)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn junction(&self, name: &str) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Edges touching `node`, in declaration order.
    pub fn incident_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.from == node || e.to == node)
    }

    /// The edge a packet launched at `port` starts on: the first declared edge
    /// touching it.
    pub fn launch_edge(&self, port: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.from == port || e.to == port)
    }

    /// Time budget of 64 longest-edge transits.
    pub fn default_max_time(&self) -> f64 {
        64.0 * self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Same topology with every shifter removed.
    pub fn without_shifters(&self) -> GateNetlist {
        let mut net = self.clone();
        for e in &mut net.edges {
            e.shifters.clear();
        }
        net
    }

    pub fn input_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.role.is_input())
    }

    pub fn output_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.role.is_output())
    }

    fn is_connected(&self) -> bool {
        let nodes: Vec<&str> = self
            .ports
            .iter()
            .map(|p| p.name.as_str())
            .chain(self.junctions.iter().map(|j| j.name.as_str()))
            .collect();
        let Some(&start) = nodes.first() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for e in self.incident_edges(n) {
                let m = e.other_end(n);
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        seen.len() == nodes.len()
    }
}

impl fmt::Display for GateNetlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gate {}", self.name)?;
        for p in &self.ports {
            writeln!(f, "port {} {}", p.name, p.role.keyword())?;
        }
        for j in &self.junctions {
            writeln!(
                f,
                "junction {} pairs ({},{}) ({},{})",
                j.name, j.pairs[0].0, j.pairs[0].1, j.pairs[1].0, j.pairs[1].1
            )?;
        }
        for e in &self.edges {
            write!(f, "edge {} {} {} len={}", e.name, e.from, e.to, e.length)?;
            if !e.shifters.is_empty() {
                let list: Vec<String> = e.shifters.iter().map(|p| p.to_string()).collect();
                write!(f, " shifters={}", list.join(","))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
