//! Block structure of the bipartite amplitude matrix of loop-symmetric states.
//!
//! Every block is `mult` copies of a `rows × cols` matrix, each dimension a
//! topological count times a power of `|G|`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{LoopError, Result};
use crate::group::{FiniteGroup, HomSearch, Letter, Word};
use crate::rep::{side_count, CharacterTable};
use crate::topology::{
    fiber_presentation, CutSpec, GenericPresentation, LatticeCounts, SurfaceKind, ValidatedCut,
};

/// `coeff · |G|^gpow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolicDim {
    pub coeff: u64,
    pub gpow: u32,
}

impl SymbolicDim {
    pub fn new(coeff: u64, gpow: u32) -> Self {
        SymbolicDim { coeff, gpow }
    }

    pub fn value(self, group_order: usize) -> BigUint {
        BigUint::from(self.coeff) * BigUint::from(group_order).pow(self.gpow)
    }

    /// The value as `u128`, if it fits.
    pub fn value_u128(self, group_order: usize) -> Option<u128> {
        (group_order as u128)
            .checked_pow(self.gpow)
            .and_then(|p| p.checked_mul(self.coeff as u128))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Boundary holonomy representative, as element indices.
    pub label: Vec<usize>,
    #[serde(default)]
    pub label_names: Vec<String>,
    pub mult: SymbolicDim,
    pub rows: SymbolicDim,
    pub cols: SymbolicDim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub group_order: usize,
    pub base_points: usize,
    pub lattice: LatticeCounts,
    pub blocks: Vec<Block>,
    /// Labels whose preimage is empty on one side.
    #[serde(default)]
    pub dropped: Vec<Vec<usize>>,
    pub total_dof: u128,
}

impl BlockStructure {
    fn finish(
        g: &FiniteGroup,
        base_points: usize,
        lattice: LatticeCounts,
        mut blocks: Vec<Block>,
        mut dropped: Vec<Vec<usize>>,
    ) -> Self {
        blocks.sort_by(|a, b| a.label.cmp(&b.label));
        dropped.sort();
        for b in &mut blocks {
            b.label_names = b.label.iter().map(|&x| g.label(x).to_string()).collect();
        }
        let mut bs = BlockStructure {
            group_order: g.order(),
            base_points,
            lattice,
            blocks,
            dropped,
            total_dof: 0,
        };
        bs.total_dof = bs.recompute_total_dof();
        bs
    }

    /// `Σ mult·rows·cols` over topological coefficients only.
    pub fn recompute_total_dof(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| b.mult.coeff as u128 * b.rows.coeff as u128 * b.cols.coeff as u128)
            .sum()
    }

    /// Dimension of the loop-symmetric subspace, with `|G|` substituted everywhere.
    pub fn hilbert_dim(&self) -> BigUint {
        let n = self.group_order;
        self.blocks
            .iter()
            .map(|b| b.mult.value(n) * b.rows.value(n) * b.cols.value(n))
            .sum()
    }

    /// `(rows, cols)` of every individual block copy, sorted, with copy counts.
    pub fn expanded_shapes(&self) -> Result<BTreeMap<(u128, u128), u128>> {
        let n = self.group_order;
        let too_big = || LoopError::InvalidInput("block dimensions overflow u128".into());
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            let key = (
                b.rows.value_u128(n).ok_or_else(too_big)?,
                b.cols.value_u128(n).ok_or_else(too_big)?,
            );
            *out.entry(key).or_insert(0) += b.mult.value_u128(n).ok_or_else(too_big)?;
        }
        Ok(out)
    }

    /// Multiset of topological shapes `(rows.coeff, cols.coeff) → Σ mult.coeff`.
    pub fn topological_shapes(&self) -> BTreeMap<(u64, u64), u64> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            *out.entry((b.rows.coeff, b.cols.coeff)).or_insert(0) += b.mult.coeff;
        }
        out
    }

    pub fn block(&self, label: &[usize]) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Readable summary such as `C^{6x6} + 4 C^{3x3}` of the topological part.
    pub fn topological_summary(&self) -> String {
        let mut parts: Vec<((u64, u64), u64)> = self.topological_shapes().into_iter().collect();
        parts.sort_by_key(|p| std::cmp::Reverse(p.0));
        parts
            .iter()
            .map(|&((r, c), m)| {
                if m == 1 {
                    format!("C^{{{r}x{c}}}")
                } else {
                    format!("{m} C^{{{r}x{c}}}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn tuples(k: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = k.checked_pow(n as u32).unwrap_or(0);
    (0..total).map(move |mut i| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = i % k;
            i /= k;
        }
        t
    })
}

#[cfg(test)]
pub(crate) fn tuples_for_test(k: usize, n: usize) -> Vec<Vec<usize>> {
    tuples(k, n).collect()
}

fn surface_blocks(
    g: &FiniteGroup,
    ct: &CharacterTable,
    x: SurfaceKind,
    y: SurfaceKind,
    inverted: &[bool],
    lattice: LatticeCounts,
) -> Result<(Vec<Block>, Vec<Vec<usize>>)> {
    let n = inverted.len();
    let results: Vec<Result<std::result::Result<Block, Vec<usize>>>> = tuples(g.num_classes(), n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|classes| {
            let label: Vec<usize> = classes.iter().map(|&c| g.class_rep(c)).collect();
            let rows = side_count(ct, x, &classes)?;
            let y_classes: Vec<usize> = classes
                .iter()
                .zip(inverted)
                .map(|(&c, &inv)| if inv { g.inverse_class(c) } else { c })
                .collect();
            let cols = side_count(ct, y, &y_classes)?;
            if rows == 0 || cols == 0 {
                return Ok(Err(label));
            }
            let mult: u64 = classes.iter().map(|&c| g.class_size(c) as u64).product();
            Ok(Ok(Block {
                label,
                label_names: Vec::new(),
                mult: SymbolicDim::new(mult, lattice.boundary - n as u32),
                rows: SymbolicDim::new(rows, lattice.interior_x),
                cols: SymbolicDim::new(cols, lattice.interior_y),
            }))
        })
        .collect();
    let mut blocks = Vec::new();
    let mut dropped = Vec::new();
    for r in results {
        match r? {
            Ok(b) => blocks.push(b),
            Err(label) => dropped.push(label),
        }
    }
    Ok((blocks, dropped))
}

/// Orbits of pairwise commuting tuples under simultaneous conjugation: `(canonical, size)`.
pub fn commuting_orbits(g: &FiniteGroup, m: usize, caps: &Caps) -> Result<Vec<(Vec<usize>, u64)>> {
    let mut orbits: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for t in g.commuting_tuples(m, &g.all_elements(), caps)? {
        *orbits.entry(g.canonical_conjugate(&t)).or_insert(0) += 1;
    }
    Ok(orbits.into_iter().collect())
}

fn torus_slab_blocks(
    g: &FiniteGroup,
    dim: usize,
    slab: usize,
    lattice: LatticeCounts,
    caps: &Caps,
) -> Result<Vec<Block>> {
    let orbits = commuting_orbits(g, dim - slab, caps)?;
    Ok(orbits
        .into_iter()
        .map(|(phi, size)| {
            let centralizer = g.centralizer_of(&phi);
            if slab == 1 {
                let c = centralizer.len() as u64;
                let mut label = phi.clone();
                label.extend(&phi);
                Block {
                    label,
                    label_names: Vec::new(),
                    mult: SymbolicDim::new(size * size, lattice.boundary - 2),
                    rows: SymbolicDim::new(c, lattice.interior_x),
                    cols: SymbolicDim::new(c, lattice.interior_y),
                }
            } else {
                let cols = g.count_commuting_tuples(slab, &centralizer) as u64;
                let mut label = Vec::new();
                if slab == 2 {
                    label.push(g.identity());
                }
                label.extend(&phi);
                Block {
                    label,
                    label_names: Vec::new(),
                    mult: SymbolicDim::new(size, lattice.boundary - 1),
                    rows: SymbolicDim::new(1, lattice.interior_x),
                    cols: SymbolicDim::new(cols, lattice.interior_y),
                }
            }
        })
        .collect())
}

fn lens_blocks(g: &FiniteGroup, q: i64, lattice: LatticeCounts) -> Vec<Block> {
    (0..g.num_classes())
        .filter(|&c| g.pow(g.class_rep(c), q) == g.identity())
        .map(|c| Block {
            label: vec![g.class_rep(c), g.identity()],
            label_names: Vec::new(),
            mult: SymbolicDim::new(g.class_size(c) as u64, lattice.boundary - 1),
            rows: SymbolicDim::new(1, lattice.interior_x),
            cols: SymbolicDim::new(1, lattice.interior_y),
        })
        .collect()
}

/// Block structure from the closed formulas of each cut family.
pub fn blocks(g: &FiniteGroup, ct: &CharacterTable, cut: &ValidatedCut, caps: &Caps) -> Result<BlockStructure> {
    if ct.group_order() != g.order() || ct.num_classes() != g.num_classes() {
        return Err(LoopError::InvalidInput(
            "character table belongs to a different group".into(),
        ));
    }
    let lattice = cut.lattice();
    let (blocks, dropped) = match cut.spec() {
        CutSpec::TorusSlab { dim, slab } => (torus_slab_blocks(g, *dim, *slab, lattice, caps)?, Vec::new()),
        CutSpec::Lens { q, .. } => (lens_blocks(g, *q, lattice), Vec::new()),
        CutSpec::Generic(gp) => return fiber_blocks(g, gp, lattice, caps),
        _ => {
            let pair = cut
                .surface_pair()
                .expect("remaining variants are surface cuts");
            let inverted: Vec<bool> = pair.signs.iter().map(|s| s.is_minus()).collect();
            surface_blocks(g, ct, pair.x, pair.y, &inverted, lattice)?
        }
    };
    Ok(BlockStructure::finish(g, cut.base_points(), lattice, blocks, dropped))
}

/// Block structure of any cut by brute-force enumeration of its presentation.
pub fn blocks_by_enumeration(g: &FiniteGroup, cut: &ValidatedCut, caps: &Caps) -> Result<BlockStructure> {
    let gp = fiber_presentation(cut.spec())?;
    fiber_blocks(g, &gp, cut.lattice(), caps)
}

/// Counts side homomorphisms by their boundary values.
pub fn boundary_fibers(
    g: &FiniteGroup,
    pres: &crate::group::GroupPresentation,
    caps: &Caps,
) -> Result<BTreeMap<Vec<usize>, u64>> {
    let mut out: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    HomSearch::from_presentation(g, pres)?.for_each(caps, |a| {
        *out.entry(pres.boundary_values(g, a)).or_insert(0) += 1;
    })?;
    Ok(out)
}

/// Canonical representative of a boundary value under independent conjugation at each base point.
pub fn canonical_label(g: &FiniteGroup, gp: &GenericPresentation, values: &[usize]) -> Vec<usize> {
    let mut out = values.to_vec();
    for b in 0..gp.base_points {
        let idx: Vec<usize> = (0..values.len()).filter(|&j| gp.base_of(j) == b).collect();
        if idx.is_empty() {
            continue;
        }
        let sub: Vec<usize> = idx.iter().map(|&j| values[j]).collect();
        for (&j, v) in idx.iter().zip(g.canonical_conjugate(&sub)) {
            out[j] = v;
        }
    }
    out
}

fn fiber_blocks(
    g: &FiniteGroup,
    gp: &GenericPresentation,
    lattice: LatticeCounts,
    caps: &Caps,
) -> Result<BlockStructure> {
    gp.validate(g.order())?;
    if (lattice.boundary as usize) < gp.base_points {
        return Err(LoopError::InvalidCut(
            "fewer boundary vertices than base points".into(),
        ));
    }
    let xs = boundary_fibers(g, &gp.x, caps)?;
    let ys = boundary_fibers(g, &gp.y, caps)?;
    // label -> (element tuples, rows, cols)
    let mut agg: BTreeMap<Vec<usize>, (u64, u64, u64)> = BTreeMap::new();
    let mut dropped: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    for (value, &rows) in &xs {
        let label = canonical_label(g, gp, value);
        match ys.get(value) {
            Some(&cols) => {
                let e = agg.entry(label).or_insert((0, rows, cols));
                if e.1 != rows || e.2 != cols {
                    return Err(LoopError::Consistency(format!(
                        "fiber sizes are not gauge covariant at {value:?}"
                    )));
                }
                e.0 += 1;
            }
            None => {
                dropped.insert(label, ());
            }
        }
    }
    for value in ys.keys().filter(|v| !xs.contains_key(*v)) {
        dropped.insert(canonical_label(g, gp, value), ());
    }
    let gpow = lattice.boundary - gp.base_points as u32;
    let blocks = agg
        .into_iter()
        .map(|(label, (m, r, c))| Block {
            label,
            label_names: Vec::new(),
            mult: SymbolicDim::new(m, gpow),
            rows: SymbolicDim::new(r, lattice.interior_x),
            cols: SymbolicDim::new(c, lattice.interior_y),
        })
        .collect();
    Ok(BlockStructure::finish(
        g,
        gp.base_points,
        lattice,
        blocks,
        dropped.into_keys().collect(),
    ))
}

/// Boundary constraint `w = value` as a relator.
pub(crate) fn pin_word(w: &Word, value: usize, g: &FiniteGroup) -> Word {
    let mut r = w.clone();
    r.push(Letter::Const(g.inv(value)));
    r
}

/// Singular values of one block, each repeated `degeneracy` times in the full matrix.
#[derive(Debug, Clone, Serialize)]
pub struct BlockSpectrum {
    pub label: Vec<usize>,
    pub degeneracy: f64,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub blocks: Vec<BlockSpectrum>,
    /// Von Neumann entropy (nats) of the normalized state.
    pub entropy: f64,
}

/// Entanglement spectrum of a state given by one topological matrix per block label.
///
/// Every copy of a block carries the same matrix; the geometric factors are
/// uniform and add nothing beyond the copy count.
pub fn spectrum_from_amplitudes(bs: &BlockStructure, matrices: &[(Vec<usize>, DMatrix<f64>)]) -> Result<Spectrum> {
    let mut out = Vec::new();
    for (label, m) in matrices {
        let b = bs
            .block(label)
            .ok_or_else(|| LoopError::InvalidInput(format!("no block with label {label:?}")))?;
        if m.nrows() as u64 != b.rows.coeff || m.ncols() as u64 != b.cols.coeff {
            return Err(LoopError::InvalidInput(format!(
                "matrix for {label:?} is {}x{}, block is {}x{}",
                m.nrows(),
                m.ncols(),
                b.rows.coeff,
                b.cols.coeff
            )));
        }
        let sv = m.clone().svd(false, false).singular_values;
        let degeneracy = b.mult.coeff as f64 * (bs.group_order as f64).powi(b.mult.gpow as i32);
        out.push(BlockSpectrum {
            label: label.clone(),
            degeneracy,
            singular_values: sv.iter().copied().filter(|&s| s > 0.0).collect(),
        });
    }
    let norm: f64 = out
        .iter()
        .map(|b| b.degeneracy * b.singular_values.iter().map(|s| s * s).sum::<f64>())
        .sum();
    if norm <= 0.0 {
        return Err(LoopError::InvalidInput("all amplitudes vanish".into()));
    }
    let entropy = out
        .iter()
        .map(|b| {
            b.degeneracy
                * b.singular_values
                    .iter()
                    .map(|s| {
                        let p = s * s / norm;
                        -p * p.ln()
                    })
                    .sum::<f64>()
        })
        .sum();
    Ok(Spectrum { blocks: out, entropy })
}
