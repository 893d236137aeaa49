//! Discretization of a logic netlist into a spin lattice.

use std::collections::BTreeMap;

use super::{regions, LatticeBuilder, LatticeParams, SpinLattice};
use crate::logic::{GateNetlist, NodeRef};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizeOptions {
    /// Bonds per delay unit of edge length.
    pub sites_per_unit: usize,
    /// Sites in each shifter segment.
    pub shifter_sites: usize,
    pub params: LatticeParams,
}

impl DiscretizeOptions {
    pub fn new(sites_per_unit: usize) -> Self {
        Self {
            sites_per_unit,
            shifter_sites: sites_per_unit,
            params: LatticeParams::default(),
        }
    }
}

/// Interior sites of one netlist edge, ordered from its `from` node.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSites {
    pub name: String,
    pub from_site: usize,
    pub to_site: usize,
    pub interior: Vec<usize>,
}

impl EdgeSites {
    pub fn bonds(&self) -> usize {
        self.interior.len() + 1
    }

    /// Site at `d` bonds from the `from` node (`0 ..= bonds`).
    pub fn site_at(&self, d: usize) -> usize {
        if d == 0 {
            self.from_site
        } else if d == self.bonds() {
            self.to_site
        } else {
            self.interior[d - 1]
        }
    }

    /// All sites including both end nodes, walked away from `node_site`.
    pub fn walk_from(&self, node_site: usize) -> Vec<usize> {
        let mut sites: Vec<usize> = (0..=self.bonds()).map(|d| self.site_at(d)).collect();
        if node_site == self.to_site {
            sites.reverse();
        }
        sites
    }
}

/// A netlist laid out on a lattice, with lookups back to netlist names.
#[derive(Debug, Clone)]
pub struct DiscretizedGate {
    pub lattice: SpinLattice,
    pub node_sites: BTreeMap<String, usize>,
    pub edges: Vec<EdgeSites>,
    /// Region names of the shifter segments, in netlist order.
    pub shifter_regions: Vec<String>,
    pub sites_per_unit: usize,
}

impl DiscretizedGate {
    pub fn edge(&self, name: &str) -> Option<&EdgeSites> {
        self.edges.iter().find(|e| e.name == name)
    }

    /// Applies the same field offset to every shifter segment.
    pub fn set_shifter_offset(&mut self, offset: f64) -> Result<()> {
        for r in &self.shifter_regions {
            self.lattice.set_region_offset(r, offset)?;
        }
        Ok(())
    }

    /// Sites a packet launched at `port` travels through, ordered in its
    /// direction of motion: the port's other edge (walked toward the port),
    /// the port itself, then the launch edge up to the far node. Also returns
    /// the index of the port site within the path.
    pub fn launch_path(&self, netlist: &GateNetlist, port: &str) -> Result<(Vec<usize>, usize)> {
        let port_site = *self
            .node_sites
            .get(port)
            .ok_or_else(|| Error::UnknownRegion(format!("port:{port}")))?;
        let launch = netlist
            .launch_edge(port)
            .ok_or_else(|| Error::InvalidTopology(format!("port `{port}` has no edge")))?;
        let forward = self.edge(&launch.name).expect("edge discretized").walk_from(port_site);
        let mut path = Vec::new();
        if let Some(back) = netlist.incident_edges(port).find(|e| e.name != launch.name) {
            let mut behind = self.edge(&back.name).expect("edge discretized").walk_from(port_site);
            behind.reverse();
            behind.pop();
            path.extend(behind);
        }
        let origin = path.len();
        path.extend(forward);
        Ok((path, origin))
    }
}

fn even_bonds(length: f64, sites_per_unit: usize) -> usize {
    let raw = (length * sites_per_unit as f64).round() as usize;
    let even = if raw.is_multiple_of(2) { raw } else { raw + 1 };
    even.max(2)
}

/// Lays out every netlist edge as a chain of `round(len * sites_per_unit)`
/// bonds (rounded up to even so every loop is bipartite). Junction nodes
/// become degree-4 sites with neighbors ordered by arm pairs; shifters become
/// marked segments with zero field offset until calibrated.
pub fn build_from_netlist(netlist: &GateNetlist, options: DiscretizeOptions) -> Result<DiscretizedGate> {
    let spu = options.sites_per_unit;
    if spu < 2 {
        return Err(Error::InvalidParameter(format!("sites_per_unit must be >= 2, got {spu}")));
    }
    for j in &netlist.junctions {
        let degree = netlist.incident_edges(&j.name).count();
        if degree != 4 {
            return Err(Error::UnsupportedJunction {
                node: j.name.clone(),
                degree,
            });
        }
    }
    netlist.validate()?;

    let coupling = options.params.coupling;
    let mut b = LatticeBuilder::new();
    let node_names: Vec<&str> = netlist
        .ports
        .iter()
        .map(|p| p.name.as_str())
        .chain(netlist.junctions.iter().map(|j| j.name.as_str()))
        .collect();
    let total: f64 = netlist.edges.iter().map(|e| e.length).sum::<f64>() * spu as f64;
    let radius = total / (2.0 * std::f64::consts::PI);
    let mut node_sites = BTreeMap::new();
    for (i, name) in node_names.iter().enumerate() {
        let angle = 2.0 * std::f64::consts::PI * i as f64 / node_names.len() as f64;
        let label = match netlist.node(name) {
            Some(NodeRef::Junction(_)) => format!("junction:{name}"),
            _ => format!("port:{name}"),
        };
        let site = b.add_site([radius * angle.cos(), radius * angle.sin()], label.clone());
        b.extend_region(label, [site]);
        if matches!(netlist.node(name), Some(NodeRef::Junction(_))) {
            b.extend_region(regions::JUNCTION, [site]);
        }
        node_sites.insert(name.to_string(), site);
    }

    let mut edges = Vec::new();
    let mut shifter_regions = Vec::new();
    for e in &netlist.edges {
        let bonds = even_bonds(e.length, spu);
        let from_site = node_sites[&e.from];
        let to_site = node_sites[&e.to];
        let (p0, p1) = (b_position(&b, from_site), b_position(&b, to_site));
        let label = format!("edge:{}", e.name);
        let interior: Vec<usize> = (1..bonds)
            .map(|d| {
                let f = d as f64 / bonds as f64;
                b.add_site([p0[0] + f * (p1[0] - p0[0]), p0[1] + f * (p1[1] - p0[1])], label.clone())
            })
            .collect();
        b.extend_region(label, interior.iter().copied());
        for (i, &pos) in e.shifters.iter().enumerate() {
            let center = (pos * bonds as f64 / e.length).round() as isize;
            let half = options.shifter_sites as isize / 2;
            let lo = center - half;
            let hi = lo + options.shifter_sites as isize;
            if lo < 1 || hi > bonds as isize {
                return Err(Error::InvalidTopology(format!(
                    "shifter {i} on edge `{}` ({} sites) does not fit inside the edge ({} bonds)",
                    e.name, options.shifter_sites, bonds
                )));
            }
            let name = format!("shifter:{}:{i}", e.name);
            let sites: Vec<usize> = (lo..hi).map(|d| interior[d as usize - 1]).collect();
            for &s in &sites {
                b.set_label(s, name.clone());
            }
            b.extend_region(name.clone(), sites);
            shifter_regions.push(name);
        }
        edges.push(EdgeSites {
            name: e.name.clone(),
            from_site,
            to_site,
            interior,
        });
    }

    // Junction bonds first, in arm-pair order, so the junction field sums
    // mirrored arm pairs before anything else.
    let mut added = std::collections::BTreeSet::new();
    for j in &netlist.junctions {
        let site = node_sites[&j.name];
        for arm in j.arm_order() {
            let es = edges.iter().find(|e| e.name == arm).expect("validated arm");
            let next = if es.from_site == site {
                es.site_at(1)
            } else {
                es.site_at(es.bonds() - 1)
            };
            b.add_bond(site, next, coupling)?;
            added.insert((site.min(next), site.max(next)));
        }
    }
    for es in &edges {
        for d in 0..es.bonds() {
            let (x, y) = (es.site_at(d), es.site_at(d + 1));
            if added.insert((x.min(y), x.max(y))) {
                b.add_bond(x, y, coupling)?;
            }
        }
    }

    let lattice = b.build(options.params.field)?;
    Ok(DiscretizedGate {
        lattice,
        node_sites,
        edges,
        shifter_regions,
        sites_per_unit: spu,
    })
}

fn b_position(b: &LatticeBuilder, site: usize) -> [f64; 2] {
    b.positions[site]
}
