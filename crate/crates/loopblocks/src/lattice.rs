//! Explicit small lattices and brute-force checks against the closed forms.
//!
//! Products along a walk read left to right. A vertex field `h` acts on an edge
//! `s → t` by `g ↦ h_s g h_t⁻¹`, which conjugates every closed walk and so preserves flatness.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{LoopError, Result};
use crate::group::{FiniteGroup, GroupPresentation};
use crate::topology::{validate, CutSpec, LatticeCounts, Sign, SurfaceKind, ValidatedCut};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    X,
    Y,
}

/// One step of a plaquette walk: an edge and whether it is traversed along its orientation.
pub type Step = (usize, bool);

/// Edge labels, one group element per edge.
pub type Configuration = Vec<usize>;

#[derive(Debug, Clone)]
pub struct Lattice {
    pub name: String,
    pub num_vertices: usize,
    /// `(source, target)`.
    pub edges: Vec<(usize, usize)>,
    pub plaquettes: Vec<Vec<Step>>,
    /// Side of every edge, when the lattice carries a cut.
    pub region: Option<Vec<Region>>,
    /// One vertex per boundary component (or a single root without a cut).
    pub base_points: Vec<usize>,
    pub cut: Option<CutSpec>,
    /// The closed surface the lattice discretizes.
    pub surface: SurfaceKind,
}

#[derive(Default)]
struct Builder {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    plaquettes: Vec<Vec<Step>>,
    region: Vec<Region>,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    fn edge(&mut self, s: usize, t: usize, side: Region) -> usize {
        self.edges.push((s, t));
        self.region.push(side);
        self.edges.len() - 1
    }

    fn finish(
        self,
        name: &str,
        base_points: Vec<usize>,
        cut: Option<CutSpec>,
        surface: SurfaceKind,
    ) -> Result<Lattice> {
        let lat = Lattice {
            name: name.to_string(),
            num_vertices: self.num_vertices,
            edges: self.edges,
            plaquettes: self.plaquettes,
            region: cut.as_ref().map(|_| self.region),
            base_points,
            cut,
            surface,
        };
        lat.check()?;
        Ok(lat)
    }
}

fn fwd(e: usize) -> Step {
    (e, true)
}

fn bwd(e: usize) -> Step {
    (e, false)
}

fn one_circle(signs: usize) -> Vec<Sign> {
    vec![Sign::Plus; signs]
}

/// `m × m` square grid on the torus or, with `flip`, on the Klein bottle where
/// the column after `m − 1` is column 0 read upside down.
///
/// `side(i)` assigns the vertical edges of column `i` and the horizontals leaving it.
struct Grid {
    m: usize,
    flip: bool,
    h: Vec<usize>,
    v: Vec<usize>,
}

impl Grid {
    fn vid(&self, i: usize, j: usize) -> usize {
        (i % self.m) * self.m + j % self.m
    }

    fn h(&self, i: usize, j: usize) -> usize {
        self.h[(i % self.m) * self.m + j % self.m]
    }

    fn v(&self, i: usize, j: usize) -> usize {
        self.v[(i % self.m) * self.m + j % self.m]
    }

    fn build(b: &mut Builder, m: usize, flip: bool, side: impl Fn(usize) -> Region) -> Grid {
        for _ in 0..m * m {
            b.vertex();
        }
        let mut g = Grid {
            m,
            flip,
            h: Vec::new(),
            v: Vec::new(),
        };
        let wrap_row = |j: usize| if flip { (m - j % m) % m } else { j % m };
        for i in 0..m {
            for j in 0..m {
                let target = if i + 1 < m { g.vid(i + 1, j) } else { g.vid(0, wrap_row(j)) };
                let e = b.edge(g.vid(i, j), target, side(i));
                g.h.push(e);
                let e = b.edge(g.vid(i, j), g.vid(i, j + 1), side(i));
                g.v.push(e);
            }
        }
        g
    }

    /// Plaquette with lower-left corner `(i, j)`.
    fn plaquette(&self, i: usize, j: usize) -> Vec<Step> {
        let m = self.m;
        if i + 1 < m || !self.flip {
            vec![
                fwd(self.h(i, j)),
                fwd(self.v(i + 1, j)),
                bwd(self.h(i, j + 1)),
                bwd(self.v(i, j)),
            ]
        } else {
            // the far side is column 0 between rows -j and -j-1, walked downwards
            let down = (2 * m - j - 1) % m;
            vec![
                fwd(self.h(i, j)),
                bwd(self.v(0, down)),
                bwd(self.h(i, j + 1)),
                bwd(self.v(i, j)),
            ]
        }
    }
}

fn grid_surface(flip: bool) -> SurfaceKind {
    if flip {
        SurfaceKind::NonOrientable { crosscaps: 2 }
    } else {
        SurfaceKind::Orientable { genus: 1 }
    }
}

/// Tube cut of the torus or Klein bottle grid: column 0 with its outgoing horizontals is `X`.
fn grid_tube(m: usize, flip: bool) -> Result<Lattice> {
    let mut b = Builder::default();
    let g = Grid::build(&mut b, m, flip, |i| if i == 0 { Region::X } else { Region::Y });
    for i in 0..m {
        for j in 0..m {
            b.plaquettes.push(g.plaquette(i, j));
        }
    }
    let signs = if flip {
        vec![Sign::Plus, Sign::Minus]
    } else {
        one_circle(2)
    };
    let name = format!("{}:{m}", if flip { "klein" } else { "torus" });
    let base = vec![g.vid(0, 0), g.vid(1, 0)];
    b.finish(
        &name,
        base,
        Some(CutSpec::OrientPair {
            genus_x: 0,
            genus_y: 0,
            boundaries: 2,
            signs,
        }),
        grid_surface(flip),
    )
}

/// Disk cut: plaquette `(0, 0)` is replaced by a cone over its boundary, which forms `X`.
fn grid_disk(m: usize, flip: bool) -> Result<Lattice> {
    if m < 3 {
        return Err(LoopError::InvalidInput("disk lattices need m ≥ 3".into()));
    }
    let mut b = Builder::default();
    let g = Grid::build(&mut b, m, flip, |_| Region::Y);
    for i in 0..m {
        for j in 0..m {
            if (i, j) != (0, 0) {
                b.plaquettes.push(g.plaquette(i, j));
            }
        }
    }
    let square = g.plaquette(0, 0);
    for &(e, _) in &square {
        b.region[e] = Region::X;
    }
    let centre = b.vertex();
    let corners = [g.vid(0, 0), g.vid(1, 0), g.vid(1, 1), g.vid(0, 1)];
    let spokes: Vec<usize> = corners.iter().map(|&c| b.edge(centre, c, Region::X)).collect();
    for k in 0..4 {
        b.plaquettes
            .push(vec![fwd(spokes[k]), square[k], bwd(spokes[(k + 1) % 4])]);
    }
    let cut = if flip {
        CutSpec::Mixed {
            genus_x: 0,
            crosscaps_y: 2,
            boundaries: 1,
            signs: one_circle(1),
        }
    } else {
        CutSpec::OrientPair {
            genus_x: 0,
            genus_y: 1,
            boundaries: 1,
            signs: one_circle(1),
        }
    };
    let name = format!("{}-disk:{m}", if flip { "klein" } else { "torus" });
    b.finish(&name, vec![corners[0]], Some(cut), grid_surface(flip))
}

/// Projective plane: a Möbius collar around a core circle of length `l` (side `Y`),
/// capped by a cone over its boundary (side `X`).
fn rp2_collar(l: usize) -> Result<Lattice> {
    if l < 2 {
        return Err(LoopError::InvalidInput("rp2 needs a core of length ≥ 2".into()));
    }
    let mut b = Builder::default();
    let core: Vec<usize> = (0..l).map(|_| b.vertex()).collect();
    let top: Vec<usize> = (0..l).map(|_| b.vertex()).collect();
    let bot: Vec<usize> = (0..l).map(|_| b.vertex()).collect();
    let core_e: Vec<usize> = (0..l).map(|i| b.edge(core[i], core[(i + 1) % l], Region::Y)).collect();
    let up: Vec<usize> = (0..l).map(|i| b.edge(core[i], top[i], Region::Y)).collect();
    let down: Vec<usize> = (0..l).map(|i| b.edge(core[i], bot[i], Region::Y)).collect();
    // boundary circle t_0 … t_{l-1} b_0 … b_{l-1}
    let ring: Vec<usize> = top.iter().chain(&bot).copied().collect();
    let rails: Vec<usize> = (0..2 * l)
        .map(|k| b.edge(ring[k], ring[(k + 1) % (2 * l)], Region::X))
        .collect();
    for i in 0..l {
        if i + 1 < l {
            b.plaquettes
                .push(vec![fwd(core_e[i]), fwd(up[i + 1]), bwd(rails[i]), bwd(up[i])]);
            b.plaquettes
                .push(vec![fwd(core_e[i]), fwd(down[i + 1]), bwd(rails[l + i]), bwd(down[i])]);
        } else {
            // crossing the twist: top row continues on the bottom row and back
            b.plaquettes
                .push(vec![fwd(core_e[i]), fwd(down[0]), bwd(rails[i]), bwd(up[i])]);
            b.plaquettes
                .push(vec![fwd(core_e[i]), fwd(up[0]), bwd(rails[2 * l - 1]), bwd(down[i])]);
        }
    }
    let centre = b.vertex();
    let spokes: Vec<usize> = ring.iter().map(|&v| b.edge(centre, v, Region::X)).collect();
    for k in 0..2 * l {
        b.plaquettes
            .push(vec![fwd(spokes[k]), fwd(rails[k]), bwd(spokes[(k + 1) % (2 * l)])]);
    }
    b.finish(
        &format!("rp2:{l}"),
        vec![top[0]],
        Some(CutSpec::Mixed {
            genus_x: 0,
            crosscaps_y: 1,
            boundaries: 1,
            signs: one_circle(1),
        }),
        SurfaceKind::NonOrientable { crosscaps: 1 },
    )
}

/// Single-vertex polygon lattices. `edges` lists the side of every loop edge,
/// plaquettes are signed 1-based edge words.
fn polygon(
    name: &str,
    edges: &[Region],
    plaquettes: &[&[i32]],
    cut: Option<CutSpec>,
    surface: SurfaceKind,
) -> Result<Lattice> {
    let mut b = Builder::default();
    let v = b.vertex();
    for &side in edges {
        b.edge(v, v, side);
    }
    for p in plaquettes {
        b.plaquettes.push(
            p.iter()
                .map(|&k| ((k.unsigned_abs() - 1) as usize, k > 0))
                .collect(),
        );
    }
    b.finish(name, vec![v], cut, surface)
}

fn tetrahedron() -> Result<Lattice> {
    let mut b = Builder::default();
    for _ in 0..4 {
        b.vertex();
    }
    let mut e = HashMap::new();
    for s in 0..4 {
        for t in s + 1..4 {
            e.insert((s, t), b.edge(s, t, Region::X));
        }
    }
    for (p, q, r) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        b.plaquettes
            .push(vec![fwd(e[&(p, q)]), fwd(e[&(q, r)]), bwd(e[&(p, r)])]);
    }
    b.finish("sphere", vec![0], None, SurfaceKind::Orientable { genus: 0 })
}

/// Names accepted by [`builtin_lattice`].
pub const BUILTIN_LATTICES: &[&str] = &[
    "torus:m",
    "klein:m",
    "torus-disk:m",
    "klein-disk:m",
    "rp2:l",
    "rp2-bigon",
    "rp2-mobius",
    "torus-hole",
    "klein-mobius",
    "genus2-octagon",
    "sphere",
];

/// Builds a lattice from a name such as `torus:2` or `genus2-octagon`.
pub fn builtin_lattice(spec: &str) -> Result<Lattice> {
    let (name, size) = match spec.split_once(':') {
        Some((n, s)) => {
            let size = s
                .trim()
                .parse::<usize>()
                .map_err(|_| LoopError::InvalidInput(format!("bad lattice size in '{spec}'")))?;
            (n.trim(), Some(size))
        }
        None => (spec.trim(), None),
    };
    let need = |default: usize| size.unwrap_or(default);
    use Region::{X, Y};
    let lat = match name {
        "torus" | "klein" => {
            let m = need(2);
            if m < 2 {
                return Err(LoopError::InvalidInput("grid lattices need m ≥ 2".into()));
            }
            grid_tube(m, name == "klein")?
        }
        "torus-disk" => grid_disk(need(3), false)?,
        "klein-disk" => grid_disk(need(3), true)?,
        "rp2" => rp2_collar(need(2))?,
        "rp2-bigon" => polygon(
            "rp2-bigon",
            &[X],
            &[&[1, 1]],
            None,
            SurfaceKind::NonOrientable { crosscaps: 1 },
        )?,
        "rp2-mobius" => polygon(
            "rp2-mobius",
            &[Y, X],
            &[&[1, 1, 2], &[-2]],
            Some(CutSpec::Mixed {
                genus_x: 0,
                crosscaps_y: 1,
                boundaries: 1,
                signs: one_circle(1),
            }),
            SurfaceKind::NonOrientable { crosscaps: 1 },
        )?,
        "torus-hole" => polygon(
            "torus-hole",
            &[Y, Y, X],
            &[&[1, 2, -1, -2, 3], &[-3]],
            Some(CutSpec::OrientPair {
                genus_x: 0,
                genus_y: 1,
                boundaries: 1,
                signs: one_circle(1),
            }),
            SurfaceKind::Orientable { genus: 1 },
        )?,
        "klein-mobius" => polygon(
            "klein-mobius",
            &[X, Y, X],
            &[&[1, 1, 3], &[-3, 2, 2]],
            Some(CutSpec::NonorientPair {
                crosscaps_x: 1,
                crosscaps_y: 1,
                boundaries: 1,
                signs: one_circle(1),
            }),
            SurfaceKind::NonOrientable { crosscaps: 2 },
        )?,
        "genus2-octagon" => polygon(
            "genus2-octagon",
            &[X, X, Y, Y],
            &[&[1, 2, -1, -2, 3, 4, -3, -4]],
            Some(CutSpec::OrientPair {
                genus_x: 1,
                genus_y: 1,
                boundaries: 1,
                signs: one_circle(1),
            }),
            SurfaceKind::Orientable { genus: 2 },
        )?,
        "sphere" => tetrahedron()?,
        other => {
            return Err(LoopError::InvalidInput(format!(
                "unknown lattice '{other}'; known: {}",
                BUILTIN_LATTICES.join(", ")
            )))
        }
    };
    if size.is_some() && !matches!(name, "torus" | "klein" | "torus-disk" | "klein-disk" | "rp2") {
        return Err(LoopError::InvalidInput(format!("lattice '{name}' takes no size")));
    }
    Ok(lat)
}

impl Lattice {
    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(LoopError::InvalidInput(format!("lattice {}: {m}", self.name)));
        for &(s, t) in &self.edges {
            if s >= self.num_vertices || t >= self.num_vertices {
                return bad(format!("edge ({s}, {t}) leaves the vertex range"));
            }
        }
        for (k, p) in self.plaquettes.iter().enumerate() {
            if p.is_empty() {
                return bad(format!("plaquette {k} is empty"));
            }
            let ends: Vec<(usize, usize)> = p
                .iter()
                .map(|&(e, f)| {
                    let (s, t) = self.edges[e];
                    if f {
                        (s, t)
                    } else {
                        (t, s)
                    }
                })
                .collect();
            for i in 0..ends.len() {
                if ends[i].1 != ends[(i + 1) % ends.len()].0 {
                    return bad(format!("plaquette {k} is not a closed walk"));
                }
            }
        }
        if self.base_points.is_empty() {
            return bad("no base point".into());
        }
        if let Some(region) = &self.region {
            let boundary = self.boundary_vertices();
            if let Some(b) = self.base_points.iter().find(|b| !boundary.contains(b)) {
                return bad(format!("base point {b} is not a boundary vertex"));
            }
            if region.len() != self.edges.len() {
                return bad("partition does not cover every edge".into());
            }
        }
        Ok(())
    }

    fn sides_at(&self) -> Vec<(bool, bool)> {
        let mut out = vec![(false, false); self.num_vertices];
        if let Some(region) = &self.region {
            for (&(s, t), r) in self.edges.iter().zip(region) {
                for v in [s, t] {
                    match r {
                        Region::X => out[v].0 = true,
                        Region::Y => out[v].1 = true,
                    }
                }
            }
        }
        out
    }

    /// Vertices incident to edges of both sides.
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.sides_at()
            .iter()
            .enumerate()
            .filter(|(_, &(x, y))| x && y)
            .map(|(v, _)| v)
            .collect()
    }

    /// Interior and boundary vertex counts of the cut.
    pub fn counts(&self) -> LatticeCounts {
        let mut c = LatticeCounts::default();
        for (x, y) in self.sides_at() {
            match (x, y) {
                (true, true) => c.boundary += 1,
                (true, false) => c.interior_x += 1,
                (false, true) => c.interior_y += 1,
                (false, false) => {}
            }
        }
        c
    }

    /// The lattice's cut, validated with its own vertex counts.
    pub fn validated_cut(&self) -> Result<ValidatedCut> {
        let spec = self
            .cut
            .clone()
            .ok_or_else(|| LoopError::InvalidInput(format!("lattice {} has no cut", self.name)))?;
        validate(spec, Some(self.counts()))
    }

    pub fn walk_holonomy(&self, g: &FiniteGroup, cfg: &[usize], walk: &[Step]) -> usize {
        walk.iter().fold(g.identity(), |acc, &(e, f)| {
            g.mul(acc, if f { cfg[e] } else { g.inv(cfg[e]) })
        })
    }

    pub fn is_flat(&self, g: &FiniteGroup, cfg: &[usize]) -> bool {
        self.plaquettes
            .iter()
            .all(|p| self.walk_holonomy(g, cfg, p) == g.identity())
    }

    /// Applies a vertex field; base points must carry the identity.
    pub fn gauge_transform(&self, g: &FiniteGroup, cfg: &[usize], field: &[usize]) -> Result<Configuration> {
        if field.len() != self.num_vertices {
            return Err(LoopError::InvalidInput(format!(
                "field has {} entries, lattice has {} vertices",
                field.len(),
                self.num_vertices
            )));
        }
        if let Some(&a) = self.base_points.iter().find(|&&a| field[a] != g.identity()) {
            return Err(LoopError::InvalidInput(format!("field acts on base point {a}")));
        }
        Ok(self.apply_field(g, cfg, field))
    }

    fn apply_field(&self, g: &FiniteGroup, cfg: &[usize], field: &[usize]) -> Configuration {
        self.edges
            .iter()
            .zip(cfg)
            .map(|(&(s, t), &x)| g.mul(g.mul(field[s], x), g.inv(field[t])))
            .collect()
    }

    /// Spanning forest grown from `roots`: `tree[e]` marks forest edges.
    fn forest(&self, roots: &[usize]) -> Result<Vec<bool>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (e, &(s, t)) in self.edges.iter().enumerate() {
            adj[s].push((e, t));
            adj[t].push((e, s));
        }
        let mut seen = vec![false; self.num_vertices];
        let mut tree = vec![false; self.edges.len()];
        let mut queue: VecDeque<usize> = roots.iter().copied().collect();
        for &r in roots {
            seen[r] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(LoopError::InvalidInput(format!("lattice {} is disconnected", self.name)));
        }
        Ok(tree)
    }

    /// Flat configurations whose forest edges (rooted at `roots`) are the identity.
    fn gauge_fixed(&self, g: &FiniteGroup, roots: &[usize], caps: &Caps) -> Result<Vec<Configuration>> {
        let tree = self.forest(roots)?;
        let free: Vec<usize> = (0..self.edges.len()).filter(|&e| !tree[e]).collect();
        let mut position = vec![usize::MAX; self.edges.len()];
        for (k, &e) in free.iter().enumerate() {
            position[e] = k;
        }
        // each plaquette is checked once its last free edge is assigned
        let mut due: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
        let mut always = Vec::new();
        for (p, walk) in self.plaquettes.iter().enumerate() {
            match walk.iter().map(|&(e, _)| position[e]).filter(|&k| k != usize::MAX).max() {
                Some(k) => due[k].push(p),
                None => always.push(p),
            }
        }
        let mut cfg = vec![g.identity(); self.edges.len()];
        if always
            .iter()
            .any(|&p| self.walk_holonomy(g, &cfg, &self.plaquettes[p]) != g.identity())
        {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut visited: u128 = 0;
        self.extend(g, &free, &due, 0, &mut cfg, &mut out, &mut visited, caps)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        g: &FiniteGroup,
        free: &[usize],
        due: &[Vec<usize>],
        k: usize,
        cfg: &mut Configuration,
        out: &mut Vec<Configuration>,
        visited: &mut u128,
        caps: &Caps,
    ) -> Result<()> {
        if k == free.len() {
            out.push(cfg.clone());
            return Ok(());
        }
        for x in 0..g.order() {
            *visited += 1;
            if *visited > caps.lattice.saturating_mul(g.order() as u128) {
                return Err(LoopError::CapExceeded {
                    what: "lattice search".into(),
                    needed: *visited,
                    cap: caps.lattice,
                });
            }
            cfg[free[k]] = x;
            if due[k]
                .iter()
                .all(|&p| self.walk_holonomy(g, cfg, &self.plaquettes[p]) == g.identity())
            {
                self.extend(g, free, due, k + 1, cfg, out, visited, caps)?;
            }
        }
        cfg[free[k]] = g.identity();
        Ok(())
    }

    fn non_base(&self) -> Vec<usize> {
        (0..self.num_vertices)
            .filter(|v| !self.base_points.contains(v))
            .collect()
    }

    /// `|Hom(π₁(M, A), G)| · |G|^{|V|−|A|}`, from the gauge-fixed solutions.
    pub fn flat_count(&self, g: &FiniteGroup, caps: &Caps) -> Result<u128> {
        let reps = self.gauge_fixed(g, &self.base_points, caps)?.len() as u128;
        Ok(reps * (g.order() as u128).pow(self.non_base().len() as u32))
    }

    /// Flat configurations counted by filtering all `|G|^{|E|}` labelings.
    pub fn flat_count_exhaustive(&self, g: &FiniteGroup, caps: &Caps) -> Result<u128> {
        let total = checked_power(g.order(), self.edges.len(), caps.lattice, "exhaustive lattice scan")?;
        let n = g.order();
        let count = (0..total)
            .into_par_iter()
            .filter(|&i| {
                let cfg = digits(i, n, self.edges.len());
                self.is_flat(g, &cfg)
            })
            .count();
        Ok(count as u128)
    }

    /// Every flat configuration: each gauge-fixed solution moved by every field on `V ∖ A`.
    pub fn flat_configurations(&self, g: &FiniteGroup, caps: &Caps) -> Result<Vec<Configuration>> {
        let reps = self.gauge_fixed(g, &self.base_points, caps)?;
        let movers = self.non_base();
        let fields = checked_power(g.order(), movers.len(), caps.lattice, "gauge fields")?;
        let needed = fields.saturating_mul(reps.len() as u128);
        if needed > caps.lattice {
            return Err(LoopError::CapExceeded {
                what: "flat configurations".into(),
                needed,
                cap: caps.lattice,
            });
        }
        let movers = &movers;
        Ok(reps
            .par_iter()
            .flat_map_iter(|rep| {
                (0..fields).map(move |i| {
                    let field = self.field_from(g, movers, i);
                    self.apply_field(g, rep, &field)
                })
            })
            .collect())
    }

    fn field_from(&self, g: &FiniteGroup, movers: &[usize], i: u128) -> Vec<usize> {
        let mut field = vec![g.identity(); self.num_vertices];
        for (&v, x) in movers.iter().zip(digits(i, g.order(), movers.len())) {
            field[v] = x;
        }
        field
    }

    /// Size of the orbit of `cfg` under fields that fix the base points.
    pub fn gauge_orbit_size(&self, g: &FiniteGroup, cfg: &[usize], caps: &Caps) -> Result<u128> {
        let movers = self.non_base();
        let fields = checked_power(g.order(), movers.len(), caps.lattice, "gauge fields")?;
        let orbit: BTreeSet<Configuration> = (0..fields)
            .map(|i| self.apply_field(g, cfg, &self.field_from(g, &movers, i)))
            .collect();
        Ok(orbit.len() as u128)
    }
}

fn checked_power(base: usize, exp: usize, cap: u128, what: &str) -> Result<u128> {
    let v = (base as u128)
        .checked_pow(exp as u32)
        .filter(|&v| v <= cap)
        .ok_or_else(|| LoopError::CapExceeded {
            what: what.into(),
            needed: (base as f64).powi(exp as i32).min(u128::MAX as f64) as u128,
            cap,
        })?;
    Ok(v)
}

fn digits(mut i: u128, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = (i % base as u128) as usize;
        i /= base as u128;
    }
    out
}

/// Block shapes of the amplitude matrix found by explicit enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalBlocks {
    pub flat_configurations: u128,
    pub x_restrictions: usize,
    pub y_restrictions: usize,
    /// `(rows, cols) → number of blocks`.
    pub shapes: BTreeMap<(u128, u128), u128>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Splits every flat configuration into its `X` and `Y` parts and reads off the
/// connected components of the compatibility graph. Each component must be a full block.
pub fn empirical_blocks(lat: &Lattice, g: &FiniteGroup, caps: &Caps) -> Result<EmpiricalBlocks> {
    let region = lat
        .region
        .as_ref()
        .ok_or_else(|| LoopError::InvalidInput(format!("lattice {} has no cut", lat.name)))?;
    let x_edges: Vec<usize> = (0..lat.edges.len()).filter(|&e| region[e] == Region::X).collect();
    let y_edges: Vec<usize> = (0..lat.edges.len()).filter(|&e| region[e] == Region::Y).collect();
    let flat = lat.flat_configurations(g, caps)?;
    let mut x_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut y_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut pairs = Vec::with_capacity(flat.len());
    for cfg in &flat {
        let xr: Vec<usize> = x_edges.iter().map(|&e| cfg[e]).collect();
        let yr: Vec<usize> = y_edges.iter().map(|&e| cfg[e]).collect();
        let nx = x_ids.len();
        let xi = *x_ids.entry(xr).or_insert(nx);
        let ny = y_ids.len();
        let yi = *y_ids.entry(yr).or_insert(ny);
        pairs.push((xi, yi));
    }
    let (nx, ny) = (x_ids.len(), y_ids.len());
    let mut uf = UnionFind((0..nx + ny).collect());
    for &(xi, yi) in &pairs {
        uf.union(xi, nx + yi);
    }
    // root → (rows, cols, entries)
    let mut comps: HashMap<usize, (u128, u128, u128)> = HashMap::new();
    for v in 0..nx + ny {
        let r = uf.find(v);
        let c = comps.entry(r).or_default();
        if v < nx {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    for &(xi, _) in &pairs {
        let r = uf.find(xi);
        comps.get_mut(&r).expect("component").2 += 1;
    }
    let mut shapes = BTreeMap::new();
    for (rows, cols, entries) in comps.into_values() {
        if rows * cols != entries {
            return Err(LoopError::Consistency(format!(
                "component with {rows} rows and {cols} columns has only {entries} nonzero entries"
            )));
        }
        *shapes.entry((rows, cols)).or_insert(0) += 1;
    }
    Ok(EmpiricalBlocks {
        flat_configurations: flat.len() as u128,
        x_restrictions: nx,
        y_restrictions: ny,
        shapes,
    })
}

/// Flat configurations modulo all gauge transformations, base points included.
pub fn empirical_gauge_dof(lat: &Lattice, g: &FiniteGroup, caps: &Caps) -> Result<u128> {
    let root = lat.base_points[0];
    let reps = lat.gauge_fixed(g, &[root], caps)?;
    // the remaining freedom is a single conjugation at the root
    let canon: BTreeSet<Configuration> = reps
        .par_iter()
        .map(|cfg| {
            (0..g.order())
                .map(|h| cfg.iter().map(|&x| g.conj(h, x)).collect::<Vec<_>>())
                .min()
                .expect("nonempty group")
        })
        .collect();
    Ok(canon.len() as u128)
}

/// `|Hom|` by trying every assignment of the free generators, with no pruning.
///
/// `fixed` pins generators to given values.
pub fn hom_count_exhaustive(
    g: &FiniteGroup,
    pres: &GroupPresentation,
    fixed: &[(usize, usize)],
    caps: &Caps,
) -> Result<u128> {
    let free: Vec<usize> = (0..pres.num_generators)
        .filter(|i| fixed.iter().all(|&(j, _)| j != *i))
        .collect();
    let total = checked_power(g.order(), free.len(), caps.homs, "exhaustive hom scan")?;
    let count = (0..total)
        .into_par_iter()
        .filter(|&i| {
            let mut a = vec![g.identity(); pres.num_generators];
            for &(j, v) in fixed {
                a[j] = v;
            }
            for (&j, v) in free.iter().zip(digits(i, g.order(), free.len())) {
                a[j] = v;
            }
            pres.relators.iter().all(|w| w.eval(g, &a) == g.identity())
        })
        .count();
    Ok(count as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    #[test]
    fn torus_two_counts() {
        let lat = builtin_lattice("torus:2").unwrap();
        assert_eq!((lat.num_vertices, lat.edges.len(), lat.plaquettes.len()), (4, 8, 4));
        let k = builtin_lattice("klein:2").unwrap();
        assert_eq!((k.num_vertices, k.edges.len(), k.plaquettes.len()), (4, 8, 4));
        let b = builtin_lattice("rp2-bigon").unwrap();
        assert_eq!((b.num_vertices, b.edges.len(), b.plaquettes.len()), (1, 1, 1));
    }

    #[test]
    fn single_edge_breaks_flatness() {
        let g = parse_group("Z2").unwrap();
        let lat = builtin_lattice("torus:2").unwrap();
        let mut cfg = vec![0; lat.edges.len()];
        assert!(lat.is_flat(&g, &cfg));
        cfg[0] = 1;
        assert!(!lat.is_flat(&g, &cfg));
    }

    #[test]
    fn gauge_field_rejected_on_base_point() {
        let g = parse_group("Z2").unwrap();
        let lat = builtin_lattice("torus:2").unwrap();
        let cfg = vec![0; lat.edges.len()];
        let mut field = vec![0; lat.num_vertices];
        field[lat.base_points[0]] = 1;
        assert!(lat.gauge_transform(&g, &cfg, &field).is_err());
    }

    #[test]
    fn constructive_and_exhaustive_flat_counts_agree() {
        let g = parse_group("S3").unwrap();
        let caps = Caps::default();
        for name in ["torus:2", "klein:2", "rp2-bigon", "genus2-octagon", "sphere"] {
            let lat = builtin_lattice(name).unwrap();
            assert_eq!(
                lat.flat_count(&g, &caps).unwrap(),
                lat.flat_count_exhaustive(&g, &caps).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn toric_code_dof() {
        let g = parse_group("Z2").unwrap();
        let caps = Caps::default();
        assert_eq!(empirical_gauge_dof(&builtin_lattice("torus:2").unwrap(), &g, &caps).unwrap(), 4);
        assert_eq!(empirical_gauge_dof(&builtin_lattice("sphere").unwrap(), &g, &caps).unwrap(), 1);
    }

    #[test]
    fn empirical_blocks_match_prediction() {
        use crate::blocks::blocks;
        use crate::rep::CharacterTable;
        let caps = Caps::default();
        for (group, name) in [
            ("Z2", "torus:2"),
            ("S3", "torus:2"),
            ("S3", "klein:2"),
            ("Z3", "klein:2"),
            ("Z2", "torus:3"),
            ("Z2", "torus-disk:3"),
            ("Z2", "klein-disk:3"),
            ("S3", "rp2:2"),
            ("D6", "rp2-mobius"),
            ("S3", "torus-hole"),
            ("S3", "klein-mobius"),
            ("S3", "genus2-octagon"),
        ] {
            let g = parse_group(group).unwrap();
            let ct = CharacterTable::new(&g).unwrap();
            let lat = builtin_lattice(name).unwrap();
            let cut = lat.validated_cut().unwrap();
            let predicted = blocks(&g, &ct, &cut, &caps).unwrap().expanded_shapes().unwrap();
            let found = empirical_blocks(&lat, &g, &caps).unwrap();
            assert_eq!(found.shapes, predicted, "{group} on {name}");
        }
    }
}
