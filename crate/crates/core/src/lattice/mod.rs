//! Spin-lattice topology, the exchange + Zeeman energy and the effective field.
//!
//! Energies use the bond-sum convention: every bond contributes `-J S_j . S_k`
//! once, and the Zeeman term is `-h_j S_jz`, where `h_j` is the combined
//! longitudinal field energy of site `j` (uniform base field plus any local
//! offset, e.g. a phase-shifter segment). Units: `J = 1` by default, spins are
//! unit vectors, times are in units of `hbar / J`.

mod build;
mod netlist;

use std::collections::{BTreeMap, VecDeque};

use crate::vec3::{self, Vec3};
use crate::{Error, Result};

pub use build::{build_chain, build_cross, build_wide_cross, LatticeParams};
pub use netlist::{build_from_netlist, DiscretizeOptions, DiscretizedGate, EdgeSites};

/// Region names shared by the cross-shaped lattices.
pub mod regions {
    pub const CHAIN: &str = "chain";
    pub const ARM_A_IN: &str = "arm_A_in";
    pub const ARM_A_OUT: &str = "arm_A_out";
    pub const ARM_B_IN: &str = "arm_B_in";
    pub const ARM_B_OUT: &str = "arm_B_out";
    pub const JUNCTION: &str = "junction";
}

/// Immutable graph of classical spins.
///
/// Adjacency is stored in compressed rows; neighbor order is the order in which
/// bonds were added, which the cross builders use to make the junction field
/// sum cancel exactly for antisymmetric arm data.
#[derive(Debug, Clone)]
pub struct SpinLattice {
    positions: Vec<[f64; 2]>,
    labels: Vec<String>,
    row_start: Vec<usize>,
    neighbor: Vec<usize>,
    coupling: Vec<f64>,
    base_field: f64,
    field_offset: Vec<f64>,
    regions: BTreeMap<String, Vec<usize>>,
    color: Option<Vec<u8>>,
    sublattices: [Vec<usize>; 2],
}

/// Incremental constructor for [`SpinLattice`].
#[derive(Debug, Default, Clone)]
pub struct LatticeBuilder {
    positions: Vec<[f64; 2]>,
    labels: Vec<String>,
    adjacency: Vec<Vec<(usize, f64)>>,
    field_offset: Vec<f64>,
    regions: BTreeMap<String, Vec<usize>>,
}

impl LatticeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn add_site(&mut self, position: [f64; 2], label: impl Into<String>) -> usize {
        self.positions.push(position);
        self.labels.push(label.into());
        self.adjacency.push(Vec::new());
        self.field_offset.push(0.0);
        self.positions.len() - 1
    }

    /// Adds the bond `j -- k` with exchange energy `coupling`.
    pub fn add_bond(&mut self, j: usize, k: usize, coupling: f64) -> Result<()> {
        let n = self.len();
        if j >= n {
            return Err(Error::InvalidSite(j));
        }
        if k >= n {
            return Err(Error::InvalidSite(k));
        }
        if j == k {
            return Err(Error::InvalidTopology(format!("self-bond on site {j}")));
        }
        if self.adjacency[j].iter().any(|&(m, _)| m == k) {
            return Err(Error::InvalidTopology(format!("duplicate bond {j} -- {k}")));
        }
        self.adjacency[j].push((k, coupling));
        self.adjacency[k].push((j, coupling));
        Ok(())
    }

    pub fn set_label(&mut self, j: usize, label: impl Into<String>) {
        self.labels[j] = label.into();
    }

    pub fn set_field_offset(&mut self, j: usize, offset: f64) {
        self.field_offset[j] = offset;
    }

    /// Appends `sites` (in order) to the named region.
    pub fn extend_region(&mut self, name: impl Into<String>, sites: impl IntoIterator<Item = usize>) {
        self.regions.entry(name.into()).or_default().extend(sites);
    }

    pub fn build(self, base_field: f64) -> Result<SpinLattice> {
        if self.positions.is_empty() {
            return Err(Error::InvalidTopology("lattice has no sites".into()));
        }
        for sites in self.regions.values() {
            if let Some(&bad) = sites.iter().find(|&&s| s >= self.positions.len()) {
                return Err(Error::InvalidSite(bad));
            }
        }
        let mut row_start = Vec::with_capacity(self.adjacency.len() + 1);
        let mut neighbor = Vec::new();
        let mut coupling = Vec::new();
        row_start.push(0);
        for row in &self.adjacency {
            for &(k, c) in row {
                neighbor.push(k);
                coupling.push(c);
            }
            row_start.push(neighbor.len());
        }
        let color = two_color(&self.adjacency);
        let mut sublattices = [Vec::new(), Vec::new()];
        if let Some(color) = &color {
            for (j, &c) in color.iter().enumerate() {
                sublattices[c as usize].push(j);
            }
        }
        Ok(SpinLattice {
            positions: self.positions,
            labels: self.labels,
            row_start,
            neighbor,
            coupling,
            base_field,
            field_offset: self.field_offset,
            regions: self.regions,
            color,
            sublattices,
        })
    }
}

/// BFS two-coloring; `None` when an odd cycle exists.
fn two_color(adjacency: &[Vec<(usize, f64)>]) -> Option<Vec<u8>> {
    let n = adjacency.len();
    let mut color = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if color[root] != u8::MAX {
            continue;
        }
        color[root] = 0;
        queue.push_back(root);
        while let Some(j) = queue.pop_front() {
            for &(k, _) in &adjacency[j] {
                if color[k] == u8::MAX {
                    color[k] = 1 - color[j];
                    queue.push_back(k);
                } else if color[k] == color[j] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

impl SpinLattice {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Neighbors of `j` with their bond couplings, in insertion order.
    pub fn neighbors(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[j]..self.row_start[j + 1];
        self.neighbor[range.clone()]
            .iter()
            .copied()
            .zip(self.coupling[range].iter().copied())
    }

    pub fn degree(&self, j: usize) -> usize {
        self.row_start[j + 1] - self.row_start[j]
    }

    pub fn bond_count(&self) -> usize {
        self.neighbor.len() / 2
    }

    /// Each bond once, as `(j, k, J)` with `j < k`.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |j| {
            self.neighbors(j)
                .filter(move |&(k, _)| j < k)
                .map(move |(k, c)| (j, k, c))
        })
    }

    pub fn position(&self, j: usize) -> [f64; 2] {
        self.positions[j]
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn base_field(&self) -> f64 {
        self.base_field
    }

    /// Longitudinal field energy `h_j` of site `j`.
    #[inline]
    pub fn field(&self, j: usize) -> f64 {
        self.base_field + self.field_offset[j]
    }

    pub fn field_offset(&self, j: usize) -> f64 {
        self.field_offset[j]
    }

    pub fn region(&self, name: &str) -> Result<&[usize]> {
        self.regions
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownRegion(name.to_string()))
    }

    pub fn region_names(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(String::as_str)
    }

    /// Sets the field offset of every site of a region (shifter calibration).
    pub fn set_region_offset(&mut self, name: &str, offset: f64) -> Result<()> {
        let sites = self
            .regions
            .get(name)
            .ok_or_else(|| Error::UnknownRegion(name.to_string()))?;
        for &j in sites {
            self.field_offset[j] = offset;
        }
        Ok(())
    }

    pub fn is_bipartite(&self) -> bool {
        self.color.is_some()
    }

    /// The two color classes, when the lattice is bipartite.
    pub fn sublattices(&self) -> Option<[&[usize]; 2]> {
        self.color
            .as_ref()
            .map(|_| [self.sublattices[0].as_slice(), self.sublattices[1].as_slice()])
    }

    /// `B_j = sum_k J_jk S_k + h_j z`.
    #[inline]
    pub fn effective_field(&self, spins: &[Vec3], j: usize) -> Vec3 {
        let mut b = vec3::ZERO;
        for (k, c) in self.neighbors(j) {
            let s = spins[k];
            b[0] += c * s[0];
            b[1] += c * s[1];
            b[2] += c * s[2];
        }
        b[2] += self.field(j);
        b
    }

    pub fn total_energy(&self, state: &SpinState) -> f64 {
        let s = &state.spins;
        let exchange: f64 = self.bonds().map(|(j, k, c)| -c * vec3::dot(s[j], s[k])).sum();
        let zeeman: f64 = (0..self.len()).map(|j| -self.field(j) * s[j][2]).sum();
        exchange + zeeman
    }

    /// Sum of `S_x^2 + S_y^2` over the sites of a region.
    pub fn region_transverse_energy(&self, state: &SpinState, region: &str) -> Result<f64> {
        Ok(transverse_energy(&state.spins, self.region(region)?))
    }

    pub fn check_state(&self, state: &SpinState) -> Result<()> {
        if state.spins.len() != self.len() {
            return Err(Error::StateMismatch {
                state: state.spins.len(),
                lattice: self.len(),
            });
        }
        Ok(())
    }
}

/// Sum of `S_x^2 + S_y^2` over `sites`.
pub fn transverse_energy(spins: &[Vec3], sites: &[usize]) -> f64 {
    sites
        .iter()
        .map(|&j| spins[j][0] * spins[j][0] + spins[j][1] * spins[j][1])
        .sum()
}

/// Sum of `2 (1 - S_z)` over `sites`, evaluated as `2 S_perp^2 / (1 + S_z)`
/// to keep precision for tiny tilts. Equals the transverse energy to leading
/// order, and its lattice total is a constant of the motion.
pub fn magnon_number(spins: &[Vec3], sites: &[usize]) -> f64 {
    sites
        .iter()
        .map(|&j| {
            let s = spins[j];
            2.0 * (s[0] * s[0] + s[1] * s[1]) / (1.0 + s[2])
        })
        .sum()
}

/// Unit spins indexed by site id, at a time in units of `hbar / J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub spins: Vec<Vec3>,
    pub time: f64,
}

impl SpinState {
    /// All spins along `+z`, the ground state for positive field.
    pub fn aligned(n: usize) -> Self {
        Self {
            spins: vec![vec3::Z_HAT; n],
            time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn total_sz(&self) -> f64 {
        self.spins.iter().map(|s| s[2]).sum()
    }

    pub fn total_transverse_energy(&self) -> f64 {
        self.spins.iter().map(|s| s[0] * s[0] + s[1] * s[1]).sum()
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.spins
            .iter()
            .map(|&s| (vec3::norm(s) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest per-component difference to another state.
    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        self.spins
            .iter()
            .zip(&other.spins)
            .flat_map(|(a, b)| (0..3).map(move |i| (a[i] - b[i]).abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> SpinState {
        let spins = (0..n)
            .map(|_| {
                let v = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                vec3::normalize(v)
            })
            .collect();
        SpinState { spins, time: 0.0 }
    }

    #[test]
    fn chain_of_two() {
        let lat = build_chain(2, LatticeParams::default()).unwrap();
        assert_eq!(lat.bond_count(), 1);
        assert_eq!(lat.degree(0), 1);
        assert_eq!(lat.degree(1), 1);
    }

    #[test]
    fn chain_of_hundred() {
        let lat = build_chain(100, LatticeParams::default()).unwrap();
        assert_eq!(lat.bond_count(), 99);
        assert!((1..99).all(|j| lat.degree(j) == 2));
        assert_eq!(lat.region(regions::CHAIN).unwrap().len(), 100);
    }

    #[test]
    fn short_chain_is_rejected() {
        assert!(matches!(
            build_chain(1, LatticeParams::default()),
            Err(Error::InvalidTopology(_))
        ));
    }

    #[test]
    fn chain_ground_state_energy() {
        let lat = build_chain(3, LatticeParams { coupling: 1.0, field: 0.1 }).unwrap();
        let e = lat.total_energy(&SpinState::aligned(3));
        assert_abs_diff_eq!(e, -2.3, epsilon = 1e-14);
    }

    #[test]
    fn aligned_x_pair_energy() {
        let lat = build_chain(2, LatticeParams { coupling: 1.0, field: 0.0 }).unwrap();
        let state = SpinState {
            spins: vec![[1.0, 0.0, 0.0]; 2],
            time: 0.0,
        };
        assert_abs_diff_eq!(lat.total_energy(&state), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn cross_structure() {
        let lat = build_cross(2, LatticeParams::default()).unwrap();
        assert_eq!(lat.len(), 9);
        let p = lat.region(regions::JUNCTION).unwrap()[0];
        assert_eq!(lat.degree(p), 4);
        assert!(lat.is_bipartite());
        assert_eq!(build_cross(200, LatticeParams::default()).unwrap().len(), 801);
        assert!(build_cross(1, LatticeParams::default()).is_err());
    }

    #[test]
    fn cross_degree_histogram() {
        let arm = 17;
        let lat = build_cross(arm, LatticeParams::default()).unwrap();
        let mut hist = BTreeMap::new();
        for j in 0..lat.len() {
            *hist.entry(lat.degree(j)).or_insert(0usize) += 1;
        }
        assert_eq!(hist[&1], 4);
        assert_eq!(hist[&4], 1);
        assert_eq!(hist[&2], 4 * arm - 4);
        assert_eq!(hist.len(), 3);
    }

    #[test]
    fn adjacency_is_symmetric() {
        for lat in [
            build_cross(5, LatticeParams::default()).unwrap(),
            build_wide_cross(5, LatticeParams::default()).unwrap(),
        ] {
            for j in 0..lat.len() {
                for (k, c) in lat.neighbors(j) {
                    let back: Vec<_> = lat.neighbors(k).filter(|&(m, _)| m == j).collect();
                    assert_eq!(back, vec![(j, c)]);
                }
            }
        }
    }

    #[test]
    fn effective_field_examples() {
        let lat = build_chain(3, LatticeParams { coupling: 1.0, field: 0.1 }).unwrap();
        let b = lat.effective_field(&SpinState::aligned(3).spins, 1);
        assert_abs_diff_eq!(b[2], 2.1, epsilon = 1e-15);
        assert_eq!((b[0], b[1]), (0.0, 0.0));

        let cross = build_cross(3, LatticeParams { coupling: 1.0, field: 0.0 }).unwrap();
        let p = cross.region(regions::JUNCTION).unwrap()[0];
        let b = cross.effective_field(&SpinState::aligned(cross.len()).spins, p);
        assert_eq!(b, [0.0, 0.0, 4.0]);

        let lat = build_chain(3, LatticeParams { coupling: 1.0, field: 0.0 }).unwrap();
        let mut state = SpinState::aligned(3);
        state.spins[0] = vec3::tilted(0.05, 0.0);
        let b = lat.effective_field(&state.spins, 1);
        assert_abs_diff_eq!(b[0], 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b[2], 1.0 + (1.0f64 - 0.0025).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b[2], 1.99875, epsilon = 1e-5);
    }

    #[test]
    fn total_sz_examples() {
        let n = 50;
        let mut state = SpinState::aligned(n);
        assert_eq!(state.total_sz(), n as f64);
        state.spins[7] = vec3::tilted(0.05, 0.0);
        assert_abs_diff_eq!(state.total_sz(), n as f64 - 1.0 + (1.0f64 - 0.0025).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(state.total_sz(), n as f64 - 0.00125, epsilon = 1e-6);
    }

    // Central differences of the energy against -dH/dS_j, treating the three
    // components of S_j as independent coordinates.
    #[test]
    fn effective_field_is_negative_energy_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut builder = LatticeBuilder::new();
        for j in 0..6 {
            builder.add_site([j as f64, 0.0], "x");
            builder.set_field_offset(j, rng.gen_range(-0.2..0.2));
        }
        for (j, k) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4)] {
            builder.add_bond(j, k, rng.gen_range(0.5..1.5)).unwrap();
        }
        let lat = builder.build(0.3).unwrap();
        let step = 1e-5;
        for _ in 0..10 {
            let state = random_state(lat.len(), &mut rng);
            for j in 0..lat.len() {
                let b = lat.effective_field(&state.spins, j);
                for c in 0..3 {
                    let mut plus = state.clone();
                    let mut minus = state.clone();
                    plus.spins[j][c] += step;
                    minus.spins[j][c] -= step;
                    let grad = (lat.total_energy(&plus) - lat.total_energy(&minus)) / (2.0 * step);
                    assert!((b[c] + grad).abs() <= 1e-6, "site {j} comp {c}: {} vs {}", b[c], -grad);
                }
            }
        }
    }

    #[test]
    fn uniform_state_energy_identity() {
        for lat in [
            build_cross(9, LatticeParams { coupling: 1.0, field: 0.37 }).unwrap(),
            build_wide_cross(6, LatticeParams { coupling: 1.0, field: 0.1 }).unwrap(),
        ] {
            let e = lat.total_energy(&SpinState::aligned(lat.len()));
            let h_sum: f64 = (0..lat.len()).map(|j| lat.field(j)).sum();
            assert_abs_diff_eq!(e, -(lat.bond_count() as f64) - h_sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_invariant_under_rotation_about_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lat = build_cross(6, LatticeParams::default()).unwrap();
        let state = random_state(lat.len(), &mut rng);
        let rotated = SpinState {
            spins: state
                .spins
                .iter()
                .map(|&s| vec3::rotate(s, vec3::Z_HAT, 0.731))
                .collect(),
            time: 0.0,
        };
        assert_abs_diff_eq!(lat.total_energy(&state), lat.total_energy(&rotated), epsilon = 1e-12);
    }

    #[test]
    fn odd_cycle_is_not_bipartite() {
        let mut b = LatticeBuilder::new();
        for j in 0..3 {
            b.add_site([j as f64, 0.0], "ring");
        }
        b.add_bond(0, 1, 1.0).unwrap();
        b.add_bond(1, 2, 1.0).unwrap();
        b.add_bond(2, 0, 1.0).unwrap();
        let lat = b.build(0.0).unwrap();
        assert!(!lat.is_bipartite());
        assert!(lat.sublattices().is_none());
    }

    #[test]
    fn duplicate_bond_rejected() {
        let mut b = LatticeBuilder::new();
        b.add_site([0.0, 0.0], "a");
        b.add_site([1.0, 0.0], "b");
        b.add_bond(0, 1, 1.0).unwrap();
        assert!(b.add_bond(1, 0, 1.0).is_err());
        assert!(b.add_bond(0, 0, 1.0).is_err());
    }

    #[test]
    fn region_transverse_energy_is_additive() {
        let lat = build_cross(10, LatticeParams::default()).unwrap();
        let mut state = SpinState::aligned(lat.len());
        assert_eq!(lat.region_transverse_energy(&state, regions::ARM_A_IN).unwrap(), 0.0);
        let a = lat.region(regions::ARM_A_IN).unwrap()[3];
        state.spins[a] = vec3::tilted(0.05, 0.0);
        assert_abs_diff_eq!(
            lat.region_transverse_energy(&state, regions::ARM_A_IN).unwrap(),
            0.0025,
            epsilon = 1e-15
        );
        let b = lat.region(regions::ARM_B_OUT).unwrap()[5];
        state.spins[b] = vec3::tilted(0.01, 0.02);
        let parts: f64 = [
            regions::ARM_A_IN,
            regions::ARM_A_OUT,
            regions::ARM_B_IN,
            regions::ARM_B_OUT,
            regions::JUNCTION,
        ]
        .iter()
        .map(|r| lat.region_transverse_energy(&state, r).unwrap())
        .sum();
        assert_abs_diff_eq!(parts, state.total_transverse_energy(), epsilon = 1e-15);
    }
}
