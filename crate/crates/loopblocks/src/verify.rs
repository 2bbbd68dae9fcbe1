//! Cross-module consistency suites, run by `loopblocks verify`.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::blocks::{blocks, blocks_by_enumeration};
use crate::caps::Caps;
use crate::double::{check_s_matrix, QuantumDouble, SConvention};
use crate::error::Result;
use crate::gauge::{burnside_orbit_count_for, gauge_blocks, gsd, multiplicities_smatrix, GaugeEngine, Side};
use crate::group::{count_homs, FiniteGroup, HomSearch};
use crate::lattice::{builtin_lattice, empirical_blocks, empirical_gauge_dof, hom_count_exhaustive};
use crate::rep::{gluing_identity, glued_surface, higher_indicator, side_count, CharacterTable};
use crate::topology::{side_presentation, validate, CutSpec, Sign, SurfaceKind};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub passed: usize,
    pub failed: Vec<String>,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<5} {:<22} {:>6} checks  {:>7.2}s",
            if self.ok() { "PASS" } else { "FAIL" },
            self.suite,
            self.passed + self.failed.len(),
            self.seconds
        )?;
        for m in self.failed.iter().take(5) {
            write!(f, "\n      {m}")?;
        }
        if self.failed.len() > 5 {
            write!(f, "\n      … {} more", self.failed.len() - 5)?;
        }
        Ok(())
    }
}

struct Tally {
    suite: &'static str,
    passed: usize,
    failed: Vec<String>,
    start: Instant,
}

impl Tally {
    fn new(suite: &'static str) -> Self {
        Tally {
            suite,
            passed: 0,
            failed: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what());
        }
    }

    fn record<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failed.push(format!("{}: {e}", what()));
                None
            }
        }
    }

    fn done(self) -> CheckOutcome {
        CheckOutcome {
            suite: self.suite,
            passed: self.passed,
            failed: self.failed,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// Every surface with `2γ` (or `k`) plus `n` at most `budget`, for `n ≥ 1`.
pub fn surface_sides(budget: u32) -> Vec<(SurfaceKind, usize)> {
    let mut out = Vec::new();
    for n in 1..=budget as usize {
        let room = budget - n as u32;
        for genus in 0..=room / 2 {
            out.push((SurfaceKind::Orientable { genus }, n));
        }
        for crosscaps in 1..=room {
            out.push((SurfaceKind::NonOrientable { crosscaps }, n));
        }
    }
    out
}

/// Nondecreasing class tuples of length `n`.
pub fn sorted_class_tuples(num_classes: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in start..k {
            cur.push(c);
            rec(k, n, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(num_classes, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Degree-of-freedom identities for every pair of sides within `budget`.
pub fn gluing_suite(ct: &CharacterTable, budget: u32) -> CheckOutcome {
    let mut t = Tally::new("gluing identities");
    let sides = surface_sides(budget);
    for &(x, n) in &sides {
        for &(y, m) in &sides {
            if m != n || (!x.is_orientable() && y.is_orientable()) {
                continue;
            }
            if let Some((lhs, rhs)) = t.record(gluing_identity(ct, x, y, n), || format!("{x} + {y} along {n}")) {
                t.check(lhs == rhs, || format!("{x} + {y} along {n}: {lhs} ≠ {rhs}"));
            }
        }
    }
    t.done()
}

/// Character formulas against presentation counts, by pruned search and by exhaustive scan.
pub fn side_count_suite(g: &FiniteGroup, ct: &CharacterTable, budget: u32, caps: &Caps) -> CheckOutcome {
    let mut t = Tally::new("side counts");
    for (kind, n) in surface_sides(budget) {
        let pres = side_presentation(kind, n, &[]);
        let free = pres.num_generators - n;
        for classes in sorted_class_tuples(g.num_classes(), n) {
            let phi: Vec<usize> = classes.iter().map(|&c| g.class_rep(c)).collect();
            let what = || format!("{kind}, n={n}, classes {classes:?}");
            let Some(closed) = t.record(side_count(ct, kind, &classes), what) else {
                continue;
            };
            let mut search = match HomSearch::from_presentation(g, &pres) {
                Ok(s) => s,
                Err(e) => {
                    t.failed.push(e.to_string());
                    continue;
                }
            };
            for (j, &v) in phi.iter().enumerate() {
                search.fix(j, v);
            }
            if let Some(found) = t.record(search.count(caps), what) {
                t.check(found == closed as u128, || format!("{}: search {found} ≠ formula {closed}", what()));
            }
            if (g.order() as u128).checked_pow(free as u32).is_some_and(|v| v <= 200_000) {
                let fixed: Vec<(usize, usize)> = phi.iter().copied().enumerate().collect();
                if let Some(found) = t.record(hom_count_exhaustive(g, &pres, &fixed, caps), what) {
                    t.check(found == closed as u128, || format!("{}: scan {found} ≠ formula {closed}", what()));
                }
            }
        }
    }
    t.done()
}

/// Closed-form block structures against fiber-product enumeration.
pub fn block_routes_suite(g: &FiniteGroup, ct: &CharacterTable, caps: &Caps) -> CheckOutcome {
    let mut t = Tally::new("block routes");
    let mut specs = vec![
        CutSpec::OrientPair {
            genus_x: 0,
            genus_y: 0,
            boundaries: 2,
            signs: vec![Sign::Plus, Sign::Plus],
        },
        CutSpec::OrientPair {
            genus_x: 0,
            genus_y: 0,
            boundaries: 2,
            signs: vec![Sign::Plus, Sign::Minus],
        },
        CutSpec::OrientPair {
            genus_x: 1,
            genus_y: 0,
            boundaries: 1,
            signs: vec![],
        },
        CutSpec::NonorientPair {
            crosscaps_x: 1,
            crosscaps_y: 1,
            boundaries: 1,
            signs: vec![],
        },
        CutSpec::Mixed {
            genus_x: 0,
            crosscaps_y: 1,
            boundaries: 2,
            signs: vec![],
        },
        CutSpec::TorusSlab { dim: 3, slab: 1 },
        CutSpec::TorusSlab { dim: 3, slab: 2 },
        CutSpec::TorusSlab { dim: 3, slab: 3 },
    ];
    if g.order() <= 12 {
        specs.push(CutSpec::OrientPair {
            genus_x: 1,
            genus_y: 1,
            boundaries: 1,
            signs: vec![],
        });
    }
    for q in 0..=4 {
        for p in (1..=3).filter(|&p| gcd(p, q) == 1) {
            specs.push(CutSpec::Lens { q, p });
        }
    }
    for spec in specs {
        let what = || format!("{spec:?}");
        let Some(cut) = t.record(validate(spec.clone(), None), what) else {
            continue;
        };
        let a = t.record(blocks(g, ct, &cut, caps), what);
        let b = t.record(blocks_by_enumeration(g, &cut, caps), what);
        if let (Some(a), Some(b)) = (a, b) {
            t.check(a.blocks == b.blocks, || format!("{spec:?}: closed form and enumeration differ"));
        }
    }
    t.done()
}

/// S-matrix identities in both conventions.
pub fn smatrix_suite(qd: &QuantumDouble) -> CheckOutcome {
    let mut t = Tally::new("S matrix");
    for conv in [SConvention::Conjugated, SConvention::Plain] {
        let s = qd.s_matrix(conv);
        if let Some(r) = t.record(check_s_matrix(qd, &s), || format!("{conv:?}")) {
            t.check(r.passes(), || format!("{conv:?}: {r:?}"));
        }
    }
    t.done()
}

/// Fixed-point multiplicities against S-matrix multiplicities, with the fusion readings
/// of the three- and four-holed spheres.
pub fn two_path_suite(qd: &QuantumDouble, budget: u32, conv: SConvention, caps: &Caps) -> CheckOutcome {
    let mut t = Tally::new("two-path multiplicities");
    let g = qd.group();
    let engine = GaugeEngine::new(g, *caps);
    let s = qd.s_matrix(conv);
    let Some(charge) = t.record(qd.charge_conjugation(), || "charge conjugation".into()) else {
        return t.done();
    };
    let Some(tensor) = t.record(qd.fusion_tensor(&s), || "fusion tensor".into()) else {
        return t.done();
    };
    let na = qd.num_anyons();
    let fuse = |a: usize, b: usize, c: usize| tensor[(a * na + b) * na + c];
    for (kind, n) in surface_sides(budget) {
        let side = Side::surface(kind, n, &[]);
        for classes in sorted_class_tuples(g.num_classes(), n) {
            let phi: Vec<usize> = classes.iter().map(|&c| g.class_rep(c)).collect();
            let what = || format!("{kind}, n={n}, φ={phi:?}");
            let fp = t.record(engine.multiplicities(&side, &phi), what);
            let sm = t.record(multiplicities_smatrix(qd, &engine, conv, kind, &phi, &phi), what);
            let (Some(fp), Some(sm)) = (fp, sm) else { continue };
            t.check(fp == sm, || format!("{}: paths differ", what()));
            if kind != (SurfaceKind::Orientable { genus: 0 }) || n < 3 {
                continue;
            }
            let factors: Vec<_> = phi.iter().map(|&c| engine.factor(&[c])).collect::<Result<_>>().unwrap_or_default();
            for (irreps, x) in &fp {
                let anyons: Result<Vec<usize>> = irreps
                    .iter()
                    .zip(&phi)
                    .zip(&factors)
                    .map(|((&a, &c), f)| qd.anyon_with_character(c, |y| f.chi(a, y)))
                    .collect();
                let Some(a) = t.record(anyons, what) else { continue };
                let e = if n == 3 {
                    fuse(a[0], a[1], charge[a[2]])
                } else {
                    (0..na).map(|h| fuse(a[0], a[1], h) * fuse(a[2], a[3], charge[h])).sum()
                };
                t.check(*x == e, || format!("{}: multiplicity {x} ≠ fusion {e} for {irreps:?}", what()));
            }
        }
    }
    t.done()
}

/// `Σ x·y` over sectors against the degeneracy of the glued surface, for cuts with at most
/// `max_boundaries` circles; the Burnside orbit count is compared too while `n ≤ 2`.
pub fn degeneracy_suite(
    qd: &QuantumDouble,
    ct: &CharacterTable,
    budget: u32,
    max_boundaries: usize,
    caps: &Caps,
) -> CheckOutcome {
    let mut t = Tally::new("gauge degeneracy");
    let g = qd.group();
    let sides = surface_sides(budget);
    for &(x, n) in &sides {
        for &(y, m) in &sides {
            if m != n || n > max_boundaries || !(x.is_orientable() || !y.is_orientable()) {
                continue;
            }
            let spec = match (x, y) {
                (SurfaceKind::Orientable { genus: gx }, SurfaceKind::Orientable { genus: gy }) => CutSpec::OrientPair {
                    genus_x: gx,
                    genus_y: gy,
                    boundaries: n,
                    signs: vec![],
                },
                (SurfaceKind::NonOrientable { crosscaps: kx }, SurfaceKind::NonOrientable { crosscaps: ky }) => {
                    CutSpec::NonorientPair {
                        crosscaps_x: kx,
                        crosscaps_y: ky,
                        boundaries: n,
                        signs: vec![],
                    }
                }
                (SurfaceKind::Orientable { genus: gx }, SurfaceKind::NonOrientable { crosscaps: ky }) => CutSpec::Mixed {
                    genus_x: gx,
                    crosscaps_y: ky,
                    boundaries: n,
                    signs: vec![],
                },
                _ => continue,
            };
            let glued = glued_surface(x, y, n);
            let what = || format!("{x} + {y} along {n}");
            let Some(cut) = t.record(validate(spec, None), what) else { continue };
            let Some(gb) = t.record(gauge_blocks(g, ct, &cut, caps), what) else { continue };
            let Some(want) = t.record(gsd(qd, glued), what) else { continue };
            t.check(gb.total_states() == want, || format!("{}: Σx·y = {} ≠ gsd {want}", what(), gb.total_states()));
            if n > 2 {
                continue;
            }
            if let Some(b) = t.record(burnside_orbit_count_for(g, ct, &cut, caps), what) {
                t.check(b == want, || format!("{}: Burnside {b} ≠ gsd {want}", what()));
            }
        }
    }
    t.done()
}

/// Degeneracy from centralizer data against the S-matrix formula.
pub fn gsd_suite(qd: &QuantumDouble, budget: u32) -> CheckOutcome {
    let mut t = Tally::new("degeneracy formulas");
    let s = qd.s_matrix(SConvention::default());
    let mut kinds: Vec<SurfaceKind> = (0..=budget / 2).map(|genus| SurfaceKind::Orientable { genus }).collect();
    kinds.extend((1..=budget).map(|crosscaps| SurfaceKind::NonOrientable { crosscaps }));
    for kind in kinds {
        let a = t.record(gsd(qd, kind), || format!("{kind}"));
        let b = t.record(qd.gsd_from_s(&s, kind), || format!("{kind}"));
        if let (Some(a), Some(b)) = (a, b) {
            t.check(a == b as u128, || format!("{kind}: {a} ≠ {b}"));
        }
    }
    t.check(gsd(qd, SurfaceKind::Orientable { genus: 0 }).ok() == Some(1), || "sphere ≠ 1".into());
    t.done()
}

/// Lens-space image sizes from three routes, for every `p` coprime to `q`.
pub fn lens_suite(g: &FiniteGroup, ct: &CharacterTable, max_q: i64, caps: &Caps) -> CheckOutcome {
    let mut t = Tally::new("lens spaces");
    for q in 1..=max_q {
        let roots = (0..g.order()).filter(|&x| g.pow(x, q) == g.identity()).count() as u64;
        let by_indicator: Option<i64> = (0..ct.num_irreps())
            .map(|a| higher_indicator(g, ct, a, q).map(|nu| nu * ct.dim(a) as i64))
            .sum::<Result<i64>>()
            .ok();
        t.check(by_indicator == Some(roots as i64), || format!("q={q}: Σ d ν = {by_indicator:?} ≠ {roots}"));
        for p in 1..=q.max(1) {
            if gcd(p, q) != 1 {
                continue;
            }
            let what = || format!("L({q};{p})");
            let Some(cut) = t.record(validate(CutSpec::Lens { q, p }, None), what) else { continue };
            if let Some(bs) = t.record(blocks_by_enumeration(g, &cut, caps), what) {
                let image: u64 = bs.blocks.iter().map(|b| b.mult.coeff).sum();
                t.check(image == roots, || format!("{}: |Im| = {image} ≠ {roots}", what()));
            }
        }
    }
    t.done()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Explicit lattices against the closed forms, for small groups.
pub fn lattice_suite(g: &FiniteGroup, ct: &CharacterTable, caps: &Caps) -> CheckOutcome {
    let mut t = Tally::new("lattice oracle");
    let qd = QuantumDouble::new(g);
    let mut names = vec!["torus:2", "klein:2", "rp2-mobius", "torus-hole", "klein-mobius", "genus2-octagon"];
    if g.order() <= 6 {
        names.push("rp2:2");
    }
    if g.order() <= 3 {
        names.push("torus:3");
    }
    for name in names {
        let what = || name.to_string();
        let Some(lat) = t.record(builtin_lattice(name), what) else { continue };
        if let Some(closed) = t.record(
            crate::rep::closed_hom_count(ct, lat.surface),
            what,
        ) {
            let extra = (g.order() as u128).pow(lat.num_vertices as u32 - 1);
            if let Some(found) = t.record(lat.flat_count(g, caps), what) {
                t.check(found == closed * extra, || format!("{name}: flat count {found} ≠ {}", closed * extra));
            }
        }
        let Some(cut) = t.record(lat.validated_cut(), what) else { continue };
        let predicted = blocks(g, ct, &cut, caps).and_then(|bs| bs.expanded_shapes());
        let found = empirical_blocks(&lat, g, caps);
        if let (Some(p), Some(f)) = (t.record(predicted, what), t.record(found, what)) {
            t.check(p == f.shapes, || format!("{name}: empirical blocks differ"));
        }
        if let Ok(qd) = &qd {
            let dof = t.record(empirical_gauge_dof(&lat, g, caps), what);
            let want = t.record(gsd(qd, lat.surface), what);
            if let (Some(d), Some(w)) = (dof, want) {
                t.check(d == w, || format!("{name}: gauge orbits {d} ≠ gsd {w}"));
            }
        }
    }
    t.done()
}

/// Every suite for one group. `budget` bounds `2γ + n` and `k + n`.
pub fn verify_group(g: &FiniteGroup, budget: u32, conv: SConvention, caps: &Caps) -> Result<Vec<CheckOutcome>> {
    let ct = CharacterTable::new(g)?;
    let qd = QuantumDouble::new(g)?;
    let small = budget.min(4);
    let mut out = vec![
        gluing_suite(&ct, budget),
        side_count_suite(g, &ct, small, caps),
        block_routes_suite(g, &ct, caps),
        smatrix_suite(&qd),
        two_path_suite(&qd, small, conv, caps),
        degeneracy_suite(&qd, &ct, small, 2, caps),
        gsd_suite(&qd, budget),
        lens_suite(g, &ct, 6, caps),
    ];
    if g.order() <= 8 {
        out.push(lattice_suite(g, &ct, caps));
    }
    // sanity: the presentation counter agrees with the exhaustive counter on a closed torus
    let torus = side_presentation(SurfaceKind::Orientable { genus: 1 }, 0, &[]);
    let mut t = Tally::new("closed torus count");
    if let (Some(a), Some(b)) = (
        t.record(count_homs(g, &torus, caps), || "search".into()),
        t.record(hom_count_exhaustive(g, &torus, &[], caps), || "scan".into()),
    ) {
        t.check(a == b, || format!("{a} ≠ {b}"));
    }
    out.push(t.done());
    Ok(out)
}
