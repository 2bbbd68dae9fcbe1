//! Acceptance criteria 1–9. Each prints one PASS/FAIL line with its runtime.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use loopblocks::blocks::blocks;
use loopblocks::caps::Caps;
use loopblocks::double::{QuantumDouble, SConvention};
use loopblocks::gauge::{entropy_general, gauge_blocks, gsd, tee_minimal, GaugeBlockStructure, SectorAmplitudes, StateSpec};
use loopblocks::group::{catalog, parse_group, FiniteGroup};
use loopblocks::lattice::{builtin_lattice, empirical_blocks, hom_count_exhaustive};
use loopblocks::rep::side_count;
use loopblocks::topology::{parse_cut, side_presentation, validate, SurfaceKind};
use loopblocks::verify::{
    degeneracy_suite, gluing_suite, gsd_suite, lens_suite, smatrix_suite, sorted_class_tuples, surface_sides,
    two_path_suite, CheckOutcome,
};
use loopblocks::CharacterTable;

const TORUS_TUBE: &str = "orient:gx=0,gy=0,n=2,s=++";

struct Criterion {
    passed: bool,
    detail: String,
}

impl Criterion {
    fn from_outcomes(outcomes: &[CheckOutcome]) -> Self {
        let failed: Vec<&String> = outcomes.iter().flat_map(|o| &o.failed).collect();
        let checks: usize = outcomes.iter().map(|o| o.passed).sum();
        Criterion {
            passed: failed.is_empty(),
            detail: match failed.first() {
                None => format!("{checks} checks"),
                Some(f) => format!("{} failures, first: {f}", failed.len()),
            },
        }
    }

    fn expect(passed: bool, detail: impl Into<String>) -> Self {
        Criterion {
            passed,
            detail: detail.into(),
        }
    }
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Criterion) -> bool {
    let start = Instant::now();
    let c = f();
    let took = start.elapsed();
    let in_time = limit.is_none_or(|l| took <= l);
    let ok = c.passed && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" (limit {:.0?})", l));
    println!(
        "{} {id}. {name}: {} [{:.3}s{budget}]",
        if ok { "PASS" } else { "FAIL" },
        c.detail,
        took.as_secs_f64()
    );
    if c.passed && !in_time {
        println!("     over the runtime limit");
    }
    ok
}

fn catalog_upto(n: usize) -> Vec<FiniteGroup> {
    catalog().into_iter().filter(|g| g.order() <= n).collect()
}

fn table(g: &FiniteGroup) -> CharacterTable {
    CharacterTable::new(g).unwrap()
}

fn torus_tube(g: &FiniteGroup, ct: &CharacterTable) -> GaugeBlockStructure {
    let cut = validate(parse_cut(TORUS_TUBE).unwrap(), None).unwrap();
    gauge_blocks(g, ct, &cut, &Caps::default()).unwrap()
}

fn topological(group: &str, cut: &str) -> BTreeMap<(u64, u64), u64> {
    let g = parse_group(group).unwrap();
    let ct = table(&g);
    let cut = validate(parse_cut(cut).unwrap(), None).unwrap();
    blocks(&g, &ct, &cut, &Caps::default()).unwrap().topological_shapes()
}

fn criterion_1() -> Criterion {
    let got = topological("D6", TORUS_TUBE);
    let want = BTreeMap::from([((6, 6), 1), ((3, 3), 4), ((2, 2), 9)]);
    Criterion::expect(got == want, format!("{got:?}"))
}

fn criterion_2() -> Criterion {
    let got = topological("D6", "orient:gx=1,gy=1,n=1");
    let want = BTreeMap::from([((18, 18), 1), ((9, 9), 2)]);
    Criterion::expect(got == want, format!("{got:?}"))
}

fn criterion_3() -> Criterion {
    let outcomes: Vec<CheckOutcome> = catalog_upto(24).iter().map(|g| gluing_suite(&table(g), 6)).collect();
    Criterion::from_outcomes(&outcomes)
}

fn criterion_4() -> Criterion {
    let caps = Caps::default();
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for g in catalog_upto(12) {
        let ct = table(&g);
        for (kind, n) in surface_sides(6) {
            let pres = side_presentation(kind, n, &[]);
            if pres.num_generators - n > 4 {
                continue;
            }
            for classes in sorted_class_tuples(g.num_classes(), n) {
                let fixed: Vec<(usize, usize)> = classes.iter().map(|&c| g.class_rep(c)).enumerate().collect();
                let formula = side_count(&ct, kind, &classes).unwrap() as u128;
                let brute = hom_count_exhaustive(&g, &pres, &fixed, &caps).unwrap();
                checks += 1;
                if formula != brute {
                    failures.push(format!("{} {kind} n={n} {classes:?}: {formula} ≠ {brute}", g.name()));
                }
            }
        }
        if !["Z2", "Z3", "D6"].contains(&g.name()) {
            continue;
        }
        for name in ["torus:2", "klein:2"] {
            let lat = builtin_lattice(name).unwrap();
            let cut = lat.validated_cut().unwrap();
            let predicted = blocks(&g, &ct, &cut, &caps).unwrap().expanded_shapes().unwrap();
            let found = empirical_blocks(&lat, &g, &caps).unwrap();
            checks += 1;
            if predicted != found.shapes {
                failures.push(format!("{} {name}: {:?} ≠ {predicted:?}", g.name(), found.shapes));
            }
        }
    }
    match failures.first() {
        None => Criterion::expect(true, format!("{checks} checks")),
        Some(f) => Criterion::expect(false, format!("{} failures, first: {f}", failures.len())),
    }
}

fn criterion_5() -> Criterion {
    let outcomes: Vec<CheckOutcome> = catalog_upto(24)
        .iter()
        .map(|g| smatrix_suite(&QuantumDouble::new(g).unwrap()))
        .collect();
    Criterion::from_outcomes(&outcomes)
}

fn criterion_6() -> Criterion {
    let caps = Caps::default();
    let mut outcomes = Vec::new();
    for g in catalog_upto(12) {
        let ct = table(&g);
        let qd = QuantumDouble::new(&g).unwrap();
        outcomes.push(two_path_suite(&qd, 4, SConvention::Conjugated, &caps));
        outcomes.push(degeneracy_suite(&qd, &ct, 4, 4, &caps));
    }
    Criterion::from_outcomes(&outcomes)
}

fn criterion_7() -> Criterion {
    let mut bad = Vec::new();
    for g in catalog_upto(24) {
        let gb = torus_tube(&g, &table(&g));
        let Some((o, s)) = gb.sector(&[0, 0], &[0, 0]) else {
            bad.push(format!("{}: no vacuum sector", g.name()));
            continue;
        };
        let t = tee_minimal(g.order(), gb.base_points, o.orbit_size, s.dim);
        if (t - 2.0 * (g.order() as f64).ln()).abs() > 1e-12 {
            bad.push(format!("{}: vacuum TEE {t}", g.name()));
        }
    }

    let d6 = parse_group("D6").unwrap();
    let gb = torus_tube(&d6, &table(&d6));
    let r = d6.class_rep(d6.class_of(1));
    let anyon = gb
        .orbits
        .iter()
        .filter(|o| o.label[0] == r)
        .flat_map(|o| o.sectors.iter().map(move |s| (o, s)))
        .find(|(_, s)| s.irreps[0] != 0 && s.x > 0 && s.y > 0);
    match anyon {
        Some((o, s)) => {
            let t = tee_minimal(6, gb.base_points, o.orbit_size, s.dim);
            if (t - (2.0 * 6f64.ln() - 2.0 * 2f64.ln())).abs() > 1e-12 {
                bad.push(format!("D6 ([r], nontrivial): {t}"));
            }
        }
        None => bad.push("D6: no ([r], nontrivial) sector".into()),
    }

    for o in &gb.orbits {
        for s in o.sectors.iter().filter(|s| s.x > 0 && s.y > 0) {
            let single = StateSpec {
                amplitudes: vec![SectorAmplitudes {
                    orbit: o.label.clone(),
                    sector: s.irreps.clone(),
                    values: vec![0.7],
                }],
            };
            let r = entropy_general(&gb, &single).unwrap();
            let t = tee_minimal(6, gb.base_points, o.orbit_size, s.dim);
            if (r.correction - t).abs() > 1e-12 {
                bad.push(format!("D6 {:?}{:?}: single amplitude {} ≠ {t}", o.label, s.irreps, r.correction));
            }
        }
    }

    let z2 = parse_group("Z2").unwrap();
    let gb = torus_tube(&z2, &table(&z2));
    let sectors: Vec<SectorAmplitudes> = gb
        .orbits
        .iter()
        .flat_map(|o| {
            o.sectors.iter().filter(|s| s.x > 0 && s.y > 0).map(|s| SectorAmplitudes {
                orbit: o.label.clone(),
                sector: s.irreps.clone(),
                values: vec![1.0],
            })
        })
        .collect();
    if sectors.len() != 4 {
        bad.push(format!("Z2 torus has {} sectors", sectors.len()));
    }
    let vacuum = StateSpec {
        amplitudes: vec![sectors[0].clone()],
    };
    let minimal = entropy_general(&gb, &vacuum).unwrap();
    let equal = entropy_general(&gb, &StateSpec { amplitudes: sectors }).unwrap();
    let gain = equal.entropy - minimal.entropy;
    if (gain - 4f64.ln()).abs() > 1e-12 || (minimal.correction - equal.correction - 4f64.ln()).abs() > 1e-12 {
        bad.push(format!("Z2 equal weight: entropy gain {gain}"));
    }
    Criterion::expect(bad.is_empty(), bad.first().cloned().unwrap_or_else(|| "all TEE values match".into()))
}

fn criterion_8() -> Criterion {
    let caps = Caps::default();
    let outcomes: Vec<CheckOutcome> = catalog_upto(24).iter().map(|g| lens_suite(g, &table(g), 6, &caps)).collect();
    Criterion::from_outcomes(&outcomes)
}

fn criterion_9() -> Criterion {
    let mut outcomes = Vec::new();
    let mut bad = Vec::new();
    for g in catalog_upto(24) {
        let qd = QuantumDouble::new(&g).unwrap();
        outcomes.push(gsd_suite(&qd, 6));
        let sphere = gsd(&qd, SurfaceKind::Orientable { genus: 0 }).unwrap();
        if sphere != 1 {
            bad.push(format!("{}: sphere {sphere}", g.name()));
        }
    }
    let torus_s3 = gsd(&QuantumDouble::new(&parse_group("S3").unwrap()).unwrap(), SurfaceKind::Orientable { genus: 1 }).unwrap();
    let klein_z2 = gsd(
        &QuantumDouble::new(&parse_group("Z2").unwrap()).unwrap(),
        SurfaceKind::NonOrientable { crosscaps: 2 },
    )
    .unwrap();
    if torus_s3 != 8 {
        bad.push(format!("S3 torus {torus_s3}"));
    }
    if klein_z2 != 4 {
        bad.push(format!("Z2 Klein {klein_z2}"));
    }
    let c = Criterion::from_outcomes(&outcomes);
    match bad.first() {
        None => c,
        Some(b) => Criterion::expect(false, b.clone()),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "D6 torus tube blocks", Some(secs(1)), criterion_1),
        run(2, "D6 genus-2 blocks", Some(secs(1)), criterion_2),
        run(3, "gluing identities", Some(secs(30)), criterion_3),
        run(4, "side counts and lattice oracle", Some(secs(120)), criterion_4),
        run(5, "S-matrix identities", None, criterion_5),
        run(6, "two-path multiplicities", Some(secs(120)), criterion_6),
        run(7, "entanglement entropy", None, criterion_7),
        run(8, "lens spaces", None, criterion_8),
        run(9, "ground-state degeneracy", None, criterion_9),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
