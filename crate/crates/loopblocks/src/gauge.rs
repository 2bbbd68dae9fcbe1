//! Gauge-invariant refinement: stabilizers, sector multiplicities, entropies and degeneracies.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::{blocks, pin_word, BlockStructure};
use crate::caps::Caps;
use crate::double::{round_count, QuantumDouble, SConvention, SMatrix};
use crate::error::{LoopError, Result};
use crate::group::{FiniteGroup, GroupPresentation, HomSearch, Letter, Subgroup};
use crate::rep::CharacterTable;
use crate::topology::{fiber_presentation, GenericPresentation, SurfaceKind, ValidatedCut};

/// One side of a cut: its presentation and where its boundary generators sit.
#[derive(Debug, Clone)]
pub struct Side {
    pub pres: GroupPresentation,
    pub base_of: Vec<usize>,
    pub base_points: usize,
}

impl Side {
    pub fn x_of(gp: &GenericPresentation) -> Self {
        Side::new(gp.x.clone(), gp)
    }

    pub fn y_of(gp: &GenericPresentation) -> Self {
        Side::new(gp.y.clone(), gp)
    }

    fn new(pres: GroupPresentation, gp: &GenericPresentation) -> Self {
        Side {
            base_of: (0..gp.boundary.num_generators).map(|j| gp.base_of(j)).collect(),
            pres,
            base_points: gp.base_points,
        }
    }

    /// A surface side with one base point per boundary circle.
    pub fn surface(kind: SurfaceKind, n: usize, inverted: &[bool]) -> Self {
        Side {
            pres: crate::topology::side_presentation(kind, n, inverted),
            base_of: (0..n).collect(),
            base_points: n,
        }
    }

    fn endpoints(&self, i: usize) -> (usize, usize) {
        self.pres
            .endpoints
            .as_ref()
            .map(|e| e[i])
            .unwrap_or((0, 0))
    }

    /// Boundary values grouped by base point.
    pub fn per_base(&self, phi: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.base_points];
        for (j, &v) in phi.iter().enumerate() {
            out[self.base_of[j]].push(v);
        }
        out
    }
}

/// Centralizer of a tuple with its character table.
#[derive(Debug)]
pub struct Factor {
    pub tuple: Vec<usize>,
    pub sub: Subgroup,
    pub table: CharacterTable,
    /// Parent element representing each class of the subgroup.
    pub class_reps: Vec<usize>,
}

impl Factor {
    pub fn order(&self) -> usize {
        self.sub.order()
    }

    pub fn chi(&self, irrep: usize, parent: usize) -> Complex64 {
        self.table.value(irrep, self.sub.local(parent).expect("element of the factor"))
    }
}

/// `G_φ = Π_b C(φ_b)` for a boundary value `φ`.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub factors: Vec<Arc<Factor>>,
}

impl Stabilizer {
    pub fn order(&self) -> u128 {
        self.factors.iter().map(|f| f.order() as u128).product()
    }

    /// Shape of the class-tuple grid.
    fn class_shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.table.num_classes()).collect()
    }

    fn irrep_shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.table.num_irreps()).collect()
    }

    /// Gauge element (one entry per base point) for a flattened class-tuple index.
    fn gauge_at(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (b, f) in self.factors.iter().enumerate().rev() {
            let k = f.table.num_classes();
            out[b] = f.class_reps[idx % k];
            idx /= k;
        }
        out
    }
}

/// Multiplicity data of one irrep of `G_φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    /// Irrep of each factor `C(φ_b)`.
    pub irreps: Vec<usize>,
    pub dim: u64,
    pub x: u64,
    pub y: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub label: Vec<usize>,
    #[serde(default)]
    pub label_names: Vec<String>,
    pub orbit_size: u64,
    pub stabilizer_order: u128,
    pub sectors: Vec<Sector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeBlockStructure {
    pub group_order: usize,
    pub base_points: usize,
    pub boundary_vertices: u32,
    pub orbits: Vec<Orbit>,
    /// Sectors with `x = 0` or `y = 0`.
    pub dropped_sectors: u64,
}

impl GaugeBlockStructure {
    /// `Σ x·y`, the number of gauge-invariant topological states.
    pub fn total_states(&self) -> u128 {
        self.orbits
            .iter()
            .flat_map(|o| &o.sectors)
            .map(|s| s.x as u128 * s.y as u128)
            .sum()
    }

    pub fn sector(&self, label: &[usize], irreps: &[usize]) -> Option<(&Orbit, &Sector)> {
        let o = self.orbits.iter().find(|o| o.label == label)?;
        o.sectors.iter().find(|s| s.irreps == irreps).map(|s| (o, s))
    }
}

/// Fixed-point and character machinery for one group.
pub struct GaugeEngine<'g> {
    group: &'g FiniteGroup,
    caps: Caps,
    cache: Mutex<HashMap<Vec<usize>, Arc<Factor>>>,
}

impl<'g> GaugeEngine<'g> {
    pub fn new(group: &'g FiniteGroup, caps: Caps) -> Self {
        GaugeEngine {
            group,
            caps,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        self.group
    }

    pub fn factor(&self, tuple: &[usize]) -> Result<Arc<Factor>> {
        if let Some(f) = self.cache.lock().expect("cache lock").get(tuple) {
            return Ok(f.clone());
        }
        let g = self.group;
        let sub = g.subgroup(&g.centralizer_of(tuple))?;
        let table = CharacterTable::new(&sub.group)?;
        let class_reps = sub.group.class_reps().iter().map(|&l| sub.elements[l]).collect();
        let f = Arc::new(Factor {
            tuple: tuple.to_vec(),
            sub,
            table,
            class_reps,
        });
        self.cache
            .lock()
            .expect("cache lock")
            .insert(tuple.to_vec(), f.clone());
        Ok(f)
    }

    /// `G_φ` for boundary value `φ` on a side layout.
    pub fn stabilizer(&self, side: &Side, phi: &[usize]) -> Result<Stabilizer> {
        if phi.len() != side.base_of.len() {
            return Err(LoopError::InvalidInput(format!(
                "boundary value has {} entries, expected {}",
                phi.len(),
                side.base_of.len()
            )));
        }
        let factors = side
            .per_base(phi)
            .iter()
            .map(|t| self.factor(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Stabilizer { factors })
    }

    /// Orbit of `φ` under independent conjugation at each base point.
    pub fn orbit(&self, side: &Side, phi: &[usize]) -> Vec<Vec<usize>> {
        let g = self.group;
        let mut orbit = vec![phi.to_vec()];
        for b in 0..side.base_points {
            let idx: Vec<usize> = (0..phi.len()).filter(|&j| side.base_of[j] == b).collect();
            let mut next = Vec::new();
            for v in &orbit {
                for h in 0..g.order() {
                    let mut w = v.clone();
                    for &j in &idx {
                        w[j] = g.conj(h, v[j]);
                    }
                    next.push(w);
                }
            }
            next.sort();
            next.dedup();
            orbit = next;
        }
        orbit
    }

    /// Solutions of `side` with boundary pinned to `φ`.
    fn pinned(&self, side: &Side, phi: &[usize]) -> Result<HomSearch<'g>> {
        let g = self.group;
        let mut search = HomSearch::from_presentation(g, &side.pres)?;
        for (w, &v) in side.pres.boundary_words.iter().zip(phi) {
            match w.0.as_slice() {
                [Letter::Gen { index, inverse }] => {
                    let want = if *inverse { g.inv(v) } else { v };
                    search.restrict(*index, |x| x == want);
                }
                _ => {
                    search.add_relator(pin_word(w, v, g));
                }
            }
        }
        Ok(search)
    }

    /// Number of solutions over `φ` fixed by the gauge element `gauge` (one entry per base point).
    pub fn perm_trace(&self, side: &Side, phi: &[usize], gauge: &[usize]) -> Result<u64> {
        let base = self.pinned(side, phi)?;
        self.trace_from(&base, side, gauge)
    }

    fn trace_from(&self, base: &HomSearch<'g>, side: &Side, gauge: &[usize]) -> Result<u64> {
        let g = self.group;
        let mut search = base.clone();
        for i in 0..side.pres.num_generators {
            let (s, t) = side.endpoints(i);
            let (gs, gt) = (gauge[s], gauge[t]);
            search.restrict(i, |x| g.mul(g.mul(gt, x), g.inv(gs)) == x);
        }
        if search.search_space() == 0 {
            return Ok(0);
        }
        Ok(search.count(&self.caps)? as u64)
    }

    /// `|r⁻¹(φ)|`.
    pub fn fiber_size(&self, side: &Side, phi: &[usize]) -> Result<u64> {
        Ok(self.pinned(side, phi)?.count(&self.caps)? as u64)
    }

    /// Multiplicity of every irrep of `G_φ` in the permutation representation on `r⁻¹(φ)`.
    ///
    /// Returned in lexicographic order of irrep tuples.
    pub fn multiplicities(&self, side: &Side, phi: &[usize]) -> Result<Vec<(Vec<usize>, u64)>> {
        let stab = self.stabilizer(side, phi)?;
        let base = self.pinned(side, phi)?;
        let class_shape = stab.class_shape();
        let total: usize = class_shape.iter().product();
        let irrep_shape = stab.irrep_shape();
        let n_irreps: usize = irrep_shape.iter().product();
        let identity = vec![self.group.identity(); stab.factors.len()];
        if self.trace_from(&base, side, &identity)? == 0 {
            return Ok((0..n_irreps).map(|i| (unflatten(i, &irrep_shape), 0)).collect());
        }
        let traces: Vec<Result<u64>> = (0..total)
            .into_par_iter()
            .map(|k| self.trace_from(&base, side, &stab.gauge_at(k)))
            .collect();
        let mut data: Vec<Complex64> = traces
            .into_iter()
            .map(|t| t.map(|v| Complex64::new(v as f64, 0.0)))
            .collect::<Result<_>>()?;
        let mut shape = class_shape;
        for (axis, f) in stab.factors.iter().enumerate() {
            let m: Vec<Vec<Complex64>> = (0..f.table.num_irreps())
                .map(|a| {
                    (0..f.table.num_classes())
                        .map(|k| f.table.chi(a, k).conj() * f.table.class_size(k) as f64)
                        .collect()
                })
                .collect();
            data = contract_axis(&data, &shape, axis, &m);
            shape[axis] = m.len();
        }
        let order = stab.order() as f64;
        data.iter()
            .enumerate()
            .map(|(i, v)| Ok((unflatten(i, &irrep_shape), round_count(v / order, "multiplicity")?)))
            .collect()
    }

    /// Orbits of `X ×_Z Y` under the gauge group, by Burnside's lemma over each boundary orbit.
    pub fn burnside_orbit_count(&self, gp: &GenericPresentation, labels: &[Vec<usize>]) -> Result<u128> {
        let sx = Side::x_of(gp);
        let sy = Side::y_of(gp);
        labels
            .par_iter()
            .map(|phi| {
                let stab = self.stabilizer(&sx, phi)?;
                let bx = self.pinned(&sx, phi)?;
                let by = self.pinned(&sy, phi)?;
                let total: usize = stab.class_shape().iter().product();
                let mut sum: u128 = 0;
                for k in 0..total {
                    let gauge = stab.gauge_at(k);
                    let tx = self.trace_from(&bx, &sx, &gauge)? as u128;
                    if tx == 0 {
                        continue;
                    }
                    let ty = self.trace_from(&by, &sy, &gauge)? as u128;
                    let size: u128 = class_sizes_at(&stab, k);
                    sum += size * tx * ty;
                }
                let order = stab.order();
                if !sum.is_multiple_of(order) {
                    return Err(LoopError::Consistency(format!(
                        "Burnside sum {sum} not divisible by |G_φ| = {order}"
                    )));
                }
                Ok(sum / order)
            })
            .sum()
    }
}

fn class_sizes_at(stab: &Stabilizer, mut idx: usize) -> u128 {
    let mut out = 1u128;
    for f in stab.factors.iter().rev() {
        let k = f.table.num_classes();
        out *= f.table.class_size(idx % k) as u128;
        idx /= k;
    }
    out
}

fn unflatten(mut i: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for (slot, &d) in out.iter_mut().zip(shape).rev() {
        *slot = i % d;
        i /= d;
    }
    out
}

/// Replaces axis `axis` (length `shape[axis]`) by `m.len()` via `new[.., a, ..] = Σ_k m[a][k] old[.., k, ..]`.
fn contract_axis(data: &[Complex64], shape: &[usize], axis: usize, m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let k = shape[axis];
    let a = m.len();
    let mut out = vec![Complex64::zero(); outer * a * inner];
    for o in 0..outer {
        for (ai, row) in m.iter().enumerate() {
            for (ki, &w) in row.iter().enumerate() {
                if w == Complex64::zero() {
                    continue;
                }
                let src = (o * k + ki) * inner;
                let dst = (o * a + ai) * inner;
                for i in 0..inner {
                    out[dst + i] += w * data[src + i];
                }
            }
        }
    }
    out
}

fn surface_exponent(kind: SurfaceKind, n: usize) -> (i32, u32) {
    match kind {
        SurfaceKind::Orientable { genus } => (2 * genus as i32 + n as i32 - 2, 0),
        SurfaceKind::NonOrientable { crosscaps } => (crosscaps as i32 + n as i32 - 2, crosscaps),
    }
}

/// Closed form of the fixed-point count on a surface side with boundary holonomies `holonomies`.
///
/// Nonzero only when every gauge entry lies in one conjugacy class `[g]`; then it is
/// `Σ_β ι_β^k (|C_g|/d_β)^e Π_j χ_β(h_j⁻¹ c_j h_j)` with `g_j = h_j g h_j⁻¹`.
pub fn perm_trace_closed(qd: &QuantumDouble, kind: SurfaceKind, holonomies: &[usize], gauge: &[usize]) -> Result<u64> {
    let g = qd.group();
    let n = holonomies.len();
    if n == 0 || gauge.len() != n {
        return Err(LoopError::InvalidInput("one gauge entry per boundary circle is required".into()));
    }
    let class = g.class_of(gauge[0]);
    if gauge.iter().any(|&x| g.class_of(x) != class) {
        return Ok(0);
    }
    let z = qd.centralizer(class);
    let args: Vec<usize> = holonomies
        .iter()
        .zip(gauge)
        .map(|(&c, &gj)| {
            let h = qd.transporter(gj);
            z.sub.local(g.conj(g.inv(h), c)).expect("holonomy commutes with the gauge entry")
        })
        .collect();
    let (e, k) = surface_exponent(kind, n);
    let mut total = Complex64::zero();
    for beta in 0..z.table.num_irreps() {
        let mut w = (z.order() as f64 / z.table.dim(beta) as f64).powi(e);
        if k > 0 {
            w *= (z.table.indicator(beta) as f64).powi(k as i32);
        }
        if w == 0.0 {
            continue;
        }
        let prod = args
            .iter()
            .fold(Complex64::one(), |acc, &y| acc * z.table.value(beta, y));
        total += prod * w;
    }
    round_count(total, "closed-form trace")
}

/// Multiplicities of a surface side from the S matrix, for every irrep tuple of `Π_j C(φ_j)`.
///
/// `holonomies[j]` is the side's own boundary holonomy and `owners[j]` the element whose
/// centralizer irreps label the sector (they differ by an inverse on reversed circles).
pub fn multiplicities_smatrix(
    qd: &QuantumDouble,
    engine: &GaugeEngine,
    conv: SConvention,
    kind: SurfaceKind,
    holonomies: &[usize],
    owners: &[usize],
) -> Result<Vec<(Vec<usize>, u64)>> {
    let n = holonomies.len();
    let factors = owners
        .iter()
        .map(|&o| engine.factor(&[o]))
        .collect::<Result<Vec<_>>>()?;
    let shape: Vec<usize> = factors.iter().map(|f| f.table.num_irreps()).collect();
    let total: usize = shape.iter().product();
    let (e, k) = surface_exponent(kind, n);
    let mut acc = vec![Complex64::zero(); total];
    for &x in qd.anyons() {
        let z = qd.centralizer(x.class);
        let mut w = (z.table.dim(x.irrep) as f64 / z.order() as f64).powi(-e);
        if k > 0 {
            w *= (qd.centralizer_indicator(x.class, x.irrep) as f64).powi(k as i32);
        }
        if w == 0.0 {
            continue;
        }
        // S_{x,(c_j, α_j)} for every α_j
        let vs: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let f = &factors[j];
                (0..f.table.num_irreps())
                    .map(|a| {
                        qd.s_general(
                            z.rep,
                            |y| qd.centralizer_char(z.rep, x.irrep, y),
                            holonomies[j],
                            |y| f.chi(a, y),
                            conv,
                        )
                    })
                    .collect()
            })
            .collect();
        let mut prod = vec![Complex64::new(w, 0.0)];
        for v in &vs {
            prod = prod
                .iter()
                .flat_map(|&p| v.iter().map(move |&s| p * s))
                .collect();
        }
        for (a, p) in acc.iter_mut().zip(prod) {
            *a += p;
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(i, v)| Ok((unflatten(i, &shape), round_count(v, "S-matrix multiplicity")?)))
        .collect()
}

/// Gauge-invariant block structure of any cut, from fixed-point multiplicities.
pub fn gauge_blocks(g: &FiniteGroup, ct: &CharacterTable, cut: &ValidatedCut, caps: &Caps) -> Result<GaugeBlockStructure> {
    let bs = blocks(g, ct, cut, caps)?;
    let gp = fiber_presentation(cut.spec())?;
    gauge_blocks_from(g, &bs, &gp, caps)
}

pub fn gauge_blocks_from(
    g: &FiniteGroup,
    bs: &BlockStructure,
    gp: &GenericPresentation,
    caps: &Caps,
) -> Result<GaugeBlockStructure> {
    let engine = GaugeEngine::new(g, *caps);
    let sx = Side::x_of(gp);
    let sy = Side::y_of(gp);
    let results: Vec<Result<(Orbit, u64)>> = bs
        .blocks
        .par_iter()
        .map(|b| {
            let stab = engine.stabilizer(&sx, &b.label)?;
            let xs = engine.multiplicities(&sx, &b.label)?;
            let ys = engine.multiplicities(&sy, &b.label)?;
            let mut dropped = 0;
            let mut sectors = Vec::new();
            for ((irreps, x), (_, y)) in xs.into_iter().zip(ys) {
                if x == 0 || y == 0 {
                    dropped += 1;
                    continue;
                }
                let dim = irreps
                    .iter()
                    .zip(&stab.factors)
                    .map(|(&a, f)| f.table.dim(a) as u64)
                    .product();
                sectors.push(Sector { irreps, dim, x, y });
            }
            let order = stab.order();
            let full = (g.order() as u128).pow(gp.base_points as u32);
            if b.mult.coeff as u128 * order != full {
                return Err(LoopError::Consistency(format!(
                    "orbit {:?}: |[φ]|·|G_φ| = {} ≠ |G|^|A| = {full}",
                    b.label,
                    b.mult.coeff as u128 * order
                )));
            }
            Ok((
                Orbit {
                    label: b.label.clone(),
                    label_names: b.label_names.clone(),
                    orbit_size: b.mult.coeff,
                    stabilizer_order: order,
                    sectors,
                },
                dropped,
            ))
        })
        .collect();
    let mut orbits = Vec::new();
    let mut dropped_sectors = 0;
    for r in results {
        let (o, d) = r?;
        dropped_sectors += d;
        orbits.push(o);
    }
    Ok(GaugeBlockStructure {
        group_order: g.order(),
        base_points: gp.base_points,
        boundary_vertices: bs.lattice.boundary,
        orbits,
        dropped_sectors,
    })
}

/// Orbits of the fiber product of a cut under the gauge group, by Burnside's lemma.
pub fn burnside_orbit_count_for(g: &FiniteGroup, ct: &CharacterTable, cut: &ValidatedCut, caps: &Caps) -> Result<u128> {
    let bs = blocks(g, ct, cut, caps)?;
    let gp = fiber_presentation(cut.spec())?;
    let labels: Vec<Vec<usize>> = bs.blocks.iter().map(|b| b.label.clone()).collect();
    GaugeEngine::new(g, *caps).burnside_orbit_count(&gp, &labels)
}

/// Ground-state degeneracy on a closed surface:
/// `Σ_{[g]} Σ_β (|C_g|/d_β)^{2γ-2}`, or with `ι_β^k` and exponent `k-2`.
pub fn gsd(qd: &QuantumDouble, kind: SurfaceKind) -> Result<u128> {
    let (e, k) = surface_exponent(kind, 0);
    let mut sum = BigRational::zero();
    for &a in qd.anyons() {
        let z = qd.centralizer(a.class);
        let sign = if k > 0 {
            z.table.indicator(a.irrep).pow(k)
        } else {
            1
        };
        if sign == 0 {
            continue;
        }
        let ratio = BigRational::new(BigInt::from(z.order()), BigInt::from(z.table.dim(a.irrep)));
        let term = if e >= 0 {
            num_traits::pow(ratio, e as usize)
        } else {
            num_traits::pow(ratio.recip(), (-e) as usize)
        };
        sum += term * BigRational::from_integer(BigInt::from(sign));
    }
    if !sum.is_integer() || sum.is_negative() {
        return Err(LoopError::Numerical(format!("degeneracy {sum} is not a non-negative integer")));
    }
    sum.to_integer()
        .to_u128()
        .ok_or_else(|| LoopError::Numerical("degeneracy overflows u128".into()))
}

/// Minimal-state correction `|A| ln|G| − ln(|[φ]| d)` in nats.
pub fn tee_minimal(group_order: usize, base_points: usize, orbit_size: u64, dim: u64) -> f64 {
    base_points as f64 * (group_order as f64).ln() - ((orbit_size * dim) as f64).ln()
}

/// Singular values supplied for one sector of one orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorAmplitudes {
    pub orbit: Vec<usize>,
    pub sector: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpec {
    pub amplitudes: Vec<SectorAmplitudes>,
}

/// Entropy split into the area part and the topological part.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub entropy: f64,
    pub area_part: f64,
    pub topological_part: f64,
    /// `|A| ln|G| − topological_part`, the subleading correction.
    pub correction: f64,
}

/// Entanglement entropy of a gauge-invariant state from its sector singular values.
///
/// `S = (|V_∂| − |A|) ln|G| − Σ |[φ]| d Σ_i p_i ln p_i`, `p_i = |ψ_i|²/𝒩`,
/// `𝒩 = Σ |[φ]| d Σ_i |ψ_i|²`.
pub fn entropy_general(gb: &GaugeBlockStructure, state: &StateSpec) -> Result<EntropyReport> {
    let mut weighted = Vec::new();
    for amp in &state.amplitudes {
        let (orbit, sector) = gb.sector(&amp.orbit, &amp.sector).ok_or_else(|| {
            LoopError::InvalidInput(format!(
                "no sector {:?} with x, y > 0 in orbit {:?}",
                amp.sector, amp.orbit
            ))
        })?;
        if amp.values.len() as u64 > sector.x.min(sector.y) {
            return Err(LoopError::InvalidInput(format!(
                "sector {:?} of orbit {:?} admits at most {} singular values",
                amp.sector,
                amp.orbit,
                sector.x.min(sector.y)
            )));
        }
        let w = (orbit.orbit_size * sector.dim) as f64;
        weighted.extend(amp.values.iter().map(|&v| (w, v * v)));
    }
    let norm: f64 = weighted.iter().map(|(w, p)| w * p).sum();
    if norm <= 0.0 {
        return Err(LoopError::InvalidInput("all amplitudes vanish".into()));
    }
    let topological_part: f64 = weighted
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(w, p)| {
            let q = p / norm;
            -w * q * q.ln()
        })
        .sum();
    let ln_g = (gb.group_order as f64).ln();
    let area_part = (gb.boundary_vertices as f64 - gb.base_points as f64) * ln_g;
    Ok(EntropyReport {
        entropy: area_part + topological_part,
        area_part,
        topological_part,
        correction: gb.base_points as f64 * ln_g - topological_part,
    })
}

/// Fusion multiplicity from the S matrix for the anyons at `a`, `b` into `c`.
pub fn fusion_index(qd: &QuantumDouble, s: &SMatrix, a: usize, b: usize, c: usize) -> Result<u64> {
    qd.fusion(s, a, b, c)
}

/// Orbits of the boundary values of a cut, keyed by canonical label, with orbit sizes.
pub fn boundary_orbits(bs: &BlockStructure) -> BTreeMap<Vec<usize>, u64> {
    bs.blocks.iter().map(|b| (b.label.clone(), b.mult.coeff)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;
    use crate::topology::{parse_cut, validate};

    #[test]
    fn d6_torus_tube_stabilizers() {
        let g = parse_group("D6").unwrap();
        let engine = GaugeEngine::new(&g, Caps::default());
        let side = Side::surface(SurfaceKind::Orientable { genus: 0 }, 2, &[]);
        let s = 3;
        let stab = engine.stabilizer(&side, &[s, s]).unwrap();
        assert_eq!(stab.order(), 4);
        assert_eq!(engine.orbit(&side, &[s, s]).len(), 9);
    }

    #[test]
    fn tube_side_pairs_conjugate_irreps() {
        let g = parse_group("D6").unwrap();
        let engine = GaugeEngine::new(&g, Caps::default());
        let side = Side::surface(SurfaceKind::Orientable { genus: 0 }, 2, &[]);
        let m = engine.multiplicities(&side, &[0, 0]).unwrap();
        // the path is acted on from both ends, so only pairs (α, ᾱ) appear, once each
        let ct = CharacterTable::new(&g).unwrap();
        let nonzero: Vec<_> = m.iter().filter(|(_, k)| *k > 0).collect();
        assert_eq!(nonzero.len(), g.num_classes());
        for (irreps, k) in nonzero {
            assert_eq!(*k, 1);
            assert_eq!(irreps[1], ct.conjugate_irrep(irreps[0]));
        }
    }

    #[test]
    fn toric_code_torus() {
        let g = parse_group("Z2").unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        let cut = validate(parse_cut("orient:gx=0,gy=0,n=2").unwrap(), None).unwrap();
        let gb = gauge_blocks(&g, &ct, &cut, &Caps::default()).unwrap();
        assert_eq!(gb.total_states(), 4);
        let qd = QuantumDouble::new(&g).unwrap();
        assert_eq!(gsd(&qd, SurfaceKind::Orientable { genus: 1 }).unwrap(), 4);
        assert_eq!(gsd(&qd, SurfaceKind::NonOrientable { crosscaps: 2 }).unwrap(), 4);
        assert_eq!(gsd(&qd, SurfaceKind::Orientable { genus: 0 }).unwrap(), 1);
    }

    #[test]
    fn closed_trace_matches_fixed_points() {
        let g = parse_group("S3").unwrap();
        let qd = QuantumDouble::new(&g).unwrap();
        let engine = GaugeEngine::new(&g, Caps::default());
        let kind = SurfaceKind::Orientable { genus: 1 };
        let side = Side::surface(kind, 2, &[]);
        let phi = [1, 2];
        let stab = engine.stabilizer(&side, &phi).unwrap();
        for a in &stab.factors[0].sub.elements {
            for b in &stab.factors[1].sub.elements {
                let fp = engine.perm_trace(&side, &phi, &[*a, *b]).unwrap();
                let cf = perm_trace_closed(&qd, kind, &phi, &[*a, *b]).unwrap();
                assert_eq!(fp, cf);
            }
        }
    }

    #[test]
    fn fixed_points_agree_with_smatrix_on_small_sides() {
        let caps = Caps::default();
        for name in ["Z3", "S3", "Q8"] {
            let g = parse_group(name).unwrap();
            let qd = QuantumDouble::new(&g).unwrap();
            let engine = GaugeEngine::new(&g, caps);
            for kind in [
                SurfaceKind::Orientable { genus: 0 },
                SurfaceKind::Orientable { genus: 1 },
                SurfaceKind::NonOrientable { crosscaps: 1 },
                SurfaceKind::NonOrientable { crosscaps: 2 },
            ] {
                for n in 1..=2 {
                    let side = Side::surface(kind, n, &[]);
                    for classes in crate::blocks::tuples_for_test(g.num_classes(), n) {
                        let phi: Vec<usize> = classes.iter().map(|&c| g.class_rep(c)).collect();
                        let fp = engine.multiplicities(&side, &phi).unwrap();
                        for conv in [SConvention::Plain, SConvention::Conjugated] {
                            let sm = multiplicities_smatrix(&qd, &engine, conv, kind, &phi, &phi).unwrap();
                            assert_eq!(fp, sm, "{name} {kind} {phi:?} {conv:?}");
                        }
                    }
                }
            }
        }
    }
}
