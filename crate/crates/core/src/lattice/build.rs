use super::{regions, LatticeBuilder, SpinLattice};
use crate::{Error, Result};

/// Uniform exchange coupling and base field of the shipped topologies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub coupling: f64,
    pub field: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            coupling: 1.0,
            field: 0.1,
        }
    }
}

/// Open linear chain of `n` sites; region `chain` lists them left to right.
pub fn build_chain(n: usize, params: LatticeParams) -> Result<SpinLattice> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("chain needs at least 2 sites, got {n}")));
    }
    let mut b = LatticeBuilder::new();
    for j in 0..n {
        b.add_site([j as f64, 0.0], regions::CHAIN);
    }
    for j in 1..n {
        b.add_bond(j - 1, j, params.coupling)?;
    }
    b.extend_region(regions::CHAIN, 0..n);
    b.build(params.field)
}

/// Appends an arm of `len` sites along `dir`, starting one lattice step from
/// `origin`. Returns the ids ordered from nearest to farthest.
fn add_arm(b: &mut LatticeBuilder, origin: [f64; 2], dir: [f64; 2], len: usize, label: &str) -> Vec<usize> {
    let ids: Vec<usize> = (1..=len)
        .map(|d| {
            let d = d as f64;
            b.add_site([origin[0] + d * dir[0], origin[1] + d * dir[1]], label)
        })
        .collect();
    ids
}

fn chain_bonds(b: &mut LatticeBuilder, ids: &[usize], coupling: f64) -> Result<()> {
    for w in ids.windows(2) {
        b.add_bond(w[0], w[1], coupling)?;
    }
    Ok(())
}

/// Two perpendicular chains sharing one spin.
///
/// Arm regions are ordered along the direction of straight-through travel:
/// input arms run from the outer end toward the junction, output arms from
/// the junction outward. The junction's neighbors are stored as
/// `[A_in, B_in, A_out, B_out]`.
pub fn build_cross(arm_len: usize, params: LatticeParams) -> Result<SpinLattice> {
    if arm_len < 2 {
        return Err(Error::InvalidTopology(format!(
            "cross arms need at least 2 sites, got {arm_len}"
        )));
    }
    let mut b = LatticeBuilder::new();
    let p = b.add_site([0.0, 0.0], regions::JUNCTION);
    let mut a_in = add_arm(&mut b, [0.0, 0.0], [-1.0, 0.0], arm_len, regions::ARM_A_IN);
    let mut b_in = add_arm(&mut b, [0.0, 0.0], [0.0, -1.0], arm_len, regions::ARM_B_IN);
    let a_out = add_arm(&mut b, [0.0, 0.0], [1.0, 0.0], arm_len, regions::ARM_A_OUT);
    let b_out = add_arm(&mut b, [0.0, 0.0], [0.0, 1.0], arm_len, regions::ARM_B_OUT);
    a_in.reverse();
    b_in.reverse();
    let j = params.coupling;
    b.add_bond(p, a_in[arm_len - 1], j)?;
    b.add_bond(p, b_in[arm_len - 1], j)?;
    b.add_bond(p, a_out[0], j)?;
    b.add_bond(p, b_out[0], j)?;
    for arm in [&a_in, &b_in, &a_out, &b_out] {
        chain_bonds(&mut b, arm, j)?;
    }
    b.extend_region(regions::JUNCTION, [p]);
    b.extend_region("port_A", [a_in[0]]);
    b.extend_region("port_B", [b_in[0]]);
    b.extend_region(regions::ARM_A_IN, a_in);
    b.extend_region(regions::ARM_B_IN, b_in);
    b.extend_region(regions::ARM_A_OUT, a_out);
    b.extend_region(regions::ARM_B_OUT, b_out);
    b.build(params.field)
}

/// Cross whose shared spin is replaced by a 2x2 plaquette.
///
/// Chain A enters at one corner and leaves at the diagonally opposite one;
/// chain B uses the other diagonal. Swapping A and B is a lattice symmetry
/// with no fixed site, so out-of-phase packets are no longer held back by a
/// pinned spin.
pub fn build_wide_cross(arm_len: usize, params: LatticeParams) -> Result<SpinLattice> {
    if arm_len < 2 {
        return Err(Error::InvalidTopology(format!(
            "cross arms need at least 2 sites, got {arm_len}"
        )));
    }
    let j = params.coupling;
    let mut b = LatticeBuilder::new();
    let p00 = b.add_site([0.0, 0.0], regions::JUNCTION);
    let p10 = b.add_site([1.0, 0.0], regions::JUNCTION);
    let p11 = b.add_site([1.0, 1.0], regions::JUNCTION);
    let p01 = b.add_site([0.0, 1.0], regions::JUNCTION);
    for (x, y) in [(p00, p10), (p10, p11), (p11, p01), (p01, p00)] {
        b.add_bond(x, y, j)?;
    }
    let mut a_in = add_arm(&mut b, [0.0, 0.0], [-1.0, 0.0], arm_len, regions::ARM_A_IN);
    let mut b_in = add_arm(&mut b, [1.0, 0.0], [0.0, -1.0], arm_len, regions::ARM_B_IN);
    let a_out = add_arm(&mut b, [1.0, 1.0], [1.0, 0.0], arm_len, regions::ARM_A_OUT);
    let b_out = add_arm(&mut b, [0.0, 1.0], [0.0, 1.0], arm_len, regions::ARM_B_OUT);
    a_in.reverse();
    b_in.reverse();
    b.add_bond(p00, a_in[arm_len - 1], j)?;
    b.add_bond(p10, b_in[arm_len - 1], j)?;
    b.add_bond(p11, a_out[0], j)?;
    b.add_bond(p01, b_out[0], j)?;
    for arm in [&a_in, &b_in, &a_out, &b_out] {
        chain_bonds(&mut b, arm, j)?;
    }
    b.extend_region(regions::JUNCTION, [p00, p10, p11, p01]);
    b.extend_region("port_A", [a_in[0]]);
    b.extend_region("port_B", [b_in[0]]);
    b.extend_region(regions::ARM_A_IN, a_in);
    b.extend_region(regions::ARM_B_IN, b_in);
    b.extend_region(regions::ARM_A_OUT, a_out);
    b.extend_region(regions::ARM_B_OUT, b_out);
    b.build(params.field)
}
