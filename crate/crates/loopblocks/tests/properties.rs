use std::sync::OnceLock;

use proptest::prelude::*;

use loopblocks::blocks::{blocks, blocks_by_enumeration, BlockStructure};
use loopblocks::caps::Caps;
use loopblocks::double::QuantumDouble;
use loopblocks::gauge::{entropy_general, gauge_blocks, gsd, tee_minimal, GaugeBlockStructure, SectorAmplitudes, StateSpec};
use loopblocks::group::{catalog, FiniteGroup};
use loopblocks::lattice::builtin_lattice;
use loopblocks::rep::{closed_hom_count, gluing_identity, side_count};
use loopblocks::topology::{parse_cut, validate, ClosedManifold, CutSpec, Sign, SurfaceKind};
use loopblocks::CharacterTable;

struct Entry {
    group: FiniteGroup,
    table: CharacterTable,
    double: QuantumDouble,
}

impl std::fmt::Debug for Entry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.group.name())
    }
}

/// Built-in groups of order at most 12, with their tables.
fn small() -> &'static [Entry] {
    static CELL: OnceLock<Vec<Entry>> = OnceLock::new();
    CELL.get_or_init(|| {
        catalog()
            .into_iter()
            .filter(|g| g.order() <= 12)
            .map(|group| Entry {
                table: CharacterTable::new(&group).unwrap(),
                double: QuantumDouble::new(&group).unwrap(),
                group,
            })
            .collect()
    })
}

fn entry() -> impl Strategy<Value = &'static Entry> {
    (0..small().len()).prop_map(|i| &small()[i])
}

fn kind() -> impl Strategy<Value = SurfaceKind> {
    prop_oneof![
        (0u32..=2).prop_map(|genus| SurfaceKind::Orientable { genus }),
        (1u32..=3).prop_map(|crosscaps| SurfaceKind::NonOrientable { crosscaps }),
    ]
}

fn surface_cut() -> impl Strategy<Value = CutSpec> {
    let signs = |n: usize| proptest::collection::vec(prop_oneof![Just(Sign::Plus), Just(Sign::Minus)], n);
    prop_oneof![
        (0u32..=1, 0u32..=1, 1usize..=2)
            .prop_flat_map(move |(gx, gy, n)| signs(n).prop_map(move |s| CutSpec::OrientPair {
                genus_x: gx,
                genus_y: gy,
                boundaries: n,
                signs: s,
            })),
        (1u32..=2, 1u32..=2, 1usize..=2).prop_map(|(kx, ky, n)| CutSpec::NonorientPair {
            crosscaps_x: kx,
            crosscaps_y: ky,
            boundaries: n,
            signs: vec![],
        }),
        (0u32..=1, 1u32..=2, 1usize..=2).prop_map(|(gx, ky, n)| CutSpec::Mixed {
            genus_x: gx,
            crosscaps_y: ky,
            boundaries: n,
            signs: vec![],
        }),
    ]
}

fn topological_dof(bs: &BlockStructure) -> u128 {
    bs.blocks
        .iter()
        .map(|b| b.mult.coeff as u128 * b.rows.coeff as u128 * b.cols.coeff as u128)
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(e in entry(), a in 0usize..24, b in 0usize..24, c in 0usize..24) {
        let g = &e.group;
        let (a, b, c) = (a % g.order(), b % g.order(), c % g.order());
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), 0);
    }

    #[test]
    fn class_sizes_and_centralizers(e in entry()) {
        let (g, ct) = (&e.group, &e.table);
        let total: usize = (0..g.num_classes()).map(|c| g.class_size(c)).sum();
        prop_assert_eq!(total, g.order());
        for c in 0..g.num_classes() {
            let x = g.class_rep(c);
            let squares: f64 = (0..ct.num_irreps()).map(|a| ct.value(a, x).norm_sqr()).sum();
            prop_assert!((squares - (g.order() / g.class_size(c)) as f64).abs() < 1e-8);
            prop_assert_eq!(ct.centralizer_order(c), g.order() / g.class_size(c));
        }
    }

    #[test]
    fn column_orthogonality(e in entry(), c in 0usize..24, d in 0usize..24) {
        let (g, ct) = (&e.group, &e.table);
        let (c, d) = (c % g.num_classes(), d % g.num_classes());
        let (x, y) = (g.class_rep(c), g.class_rep(d));
        let s: num_complex::Complex64 = (0..ct.num_irreps()).map(|a| ct.value(a, x) * ct.value(a, y).conj()).sum();
        let want = if c == d { ct.centralizer_order(c) as f64 } else { 0.0 };
        prop_assert!((s.re - want).abs() < 1e-8 && s.im.abs() < 1e-8);
    }

    #[test]
    fn orientable_counts_invariant_under_inversion(
        e in entry(),
        genus in 0u32..=2,
        raw in proptest::collection::vec(0usize..24, 1..=3),
    ) {
        let g = &e.group;
        let classes: Vec<usize> = raw.iter().map(|c| c % g.num_classes()).collect();
        let inverted: Vec<usize> = classes.iter().map(|&c| g.inverse_class(c)).collect();
        let kind = SurfaceKind::Orientable { genus };
        prop_assert_eq!(side_count(&e.table, kind, &classes).unwrap(), side_count(&e.table, kind, &inverted).unwrap());
    }

    #[test]
    fn side_counts_symmetric_in_boundaries(e in entry(), k in kind(), raw in proptest::collection::vec(0usize..24, 2..=3)) {
        let g = &e.group;
        let classes: Vec<usize> = raw.iter().map(|c| c % g.num_classes()).collect();
        let mut rotated = classes.clone();
        rotated.rotate_left(1);
        prop_assert_eq!(side_count(&e.table, k, &classes).unwrap(), side_count(&e.table, k, &rotated).unwrap());
    }

    #[test]
    fn gluing_identities(e in entry(), x in kind(), y in kind(), n in 1usize..=2) {
        prop_assume!(x.is_orientable() || !y.is_orientable());
        let (lhs, rhs) = gluing_identity(&e.table, x, y, n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn validation_is_idempotent(spec in surface_cut()) {
        let once = validate(spec, None).unwrap();
        let twice = validate(once.spec().clone(), None).unwrap();
        prop_assert_eq!(once.spec(), twice.spec());
        prop_assert_eq!(once.glued(), twice.glued());
        prop_assert_eq!(once.base_points(), twice.base_points());
    }

    #[test]
    fn json_round_trip(e in entry(), spec in surface_cut()) {
        let cut = validate(spec, None).unwrap();
        let bs = blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        let back: BlockStructure = serde_json::from_str(&serde_json::to_string(&bs).unwrap()).unwrap();
        prop_assert_eq!(back.recompute_total_dof(), bs.total_dof);
        prop_assert_eq!(&back, &bs);
        let gb = gauge_blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        let back: GaugeBlockStructure = serde_json::from_str(&serde_json::to_string(&gb).unwrap()).unwrap();
        prop_assert_eq!(back.total_states(), gb.total_states());
        prop_assert_eq!(back, gb);
    }

    #[test]
    fn single_amplitude_entropy_is_minimal(e in entry(), value in 0.01f64..10.0) {
        let cut = validate(parse_cut("orient:gx=0,gy=0,n=2").unwrap(), None).unwrap();
        let gb = gauge_blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        for o in &gb.orbits {
            for s in o.sectors.iter().filter(|s| s.x > 0 && s.y > 0) {
                let state = StateSpec {
                    amplitudes: vec![SectorAmplitudes { orbit: o.label.clone(), sector: s.irreps.clone(), values: vec![value] }],
                };
                let r = entropy_general(&gb, &state).unwrap();
                let t = tee_minimal(gb.group_order, gb.base_points, o.orbit_size, s.dim);
                prop_assert!((r.correction - t).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_enumeration(e in entry(), spec in surface_cut()) {
        prop_assume!(e.group.order() <= 8);
        let cut = validate(spec, None).unwrap();
        let a = blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        let b = blocks_by_enumeration(&e.group, &cut, &Caps::default()).unwrap();
        prop_assert_eq!(a.blocks, b.blocks);
    }

    #[test]
    fn topological_dof_counts_glued_homs(e in entry(), spec in surface_cut()) {
        let cut = validate(spec, None).unwrap();
        let ClosedManifold::Surface(glued) = cut.glued() else { unreachable!() };
        let bs = blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        let n = cut.base_points() as u32;
        let order = e.group.order() as u128;
        prop_assert_eq!(topological_dof(&bs), closed_hom_count(&e.table, glued).unwrap() * order.pow(n - 1));
    }

    #[test]
    fn sector_states_fill_degeneracy(e in entry(), spec in surface_cut()) {
        let cut = validate(spec, None).unwrap();
        let ClosedManifold::Surface(glued) = cut.glued() else { unreachable!() };
        let gb = gauge_blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        prop_assert_eq!(gb.total_states(), gsd(&e.double, glued).unwrap());
    }

    #[test]
    fn gauge_transforms_preserve_flatness(
        e in entry(),
        lattice in prop_oneof![Just("torus:2"), Just("klein:2"), Just("torus-hole"), Just("rp2-mobius")],
        pick in any::<prop::sample::Index>(),
        field_seed in proptest::collection::vec(0usize..24, 16),
    ) {
        prop_assume!(e.group.order() <= 6);
        let g = &e.group;
        let lat = builtin_lattice(lattice).unwrap();
        let caps = Caps::default();
        let flat = lat.flat_configurations(g, &caps).unwrap();
        let cfg = &flat[pick.index(flat.len())];
        let field: Vec<usize> = (0..lat.num_vertices)
            .map(|v| if lat.base_points.contains(&v) { 0 } else { field_seed[v % field_seed.len()] % g.order() })
            .collect();
        let moved = lat.gauge_transform(g, cfg, &field).unwrap();
        prop_assert!(lat.is_flat(g, &moved));
        let free = (lat.num_vertices - lat.base_points.len()) as u32;
        prop_assert_eq!(lat.gauge_orbit_size(g, cfg, &caps).unwrap(), (g.order() as u128).pow(free));
    }
}

#[test]
fn klein_tube_labels_are_self_inverse_classes() {
    let cut = validate(parse_cut("orient:gx=0,gy=0,n=2,s=+-").unwrap(), None).unwrap();
    for e in small() {
        let g = &e.group;
        let bs = blocks(g, &e.table, &cut, &Caps::default()).unwrap();
        for b in &bs.blocks {
            let c = g.class_of(b.label[0]);
            assert_eq!(c, g.inverse_class(c), "{}: {:?}", g.name(), b.label_names);
        }
        let kept: usize = bs.blocks.len();
        let self_inverse = (0..g.num_classes()).filter(|&c| g.inverse_class(c) == c).count();
        assert_eq!(kept, self_inverse, "{}", g.name());
    }
}

#[test]
fn mobius_cut_keeps_only_positive_counts() {
    let cut = validate(parse_cut("nonorient:kx=1,ky=1,n=1").unwrap(), None).unwrap();
    for e in small() {
        let bs = blocks(&e.group, &e.table, &cut, &Caps::default()).unwrap();
        for b in &bs.blocks {
            assert!(b.rows.coeff > 0 && b.cols.coeff > 0 && b.mult.coeff > 0);
            let c = e.group.class_of(b.label[0]);
            let k = side_count(&e.table, SurfaceKind::NonOrientable { crosscaps: 1 }, &[c]).unwrap();
            assert_eq!(b.rows.coeff, k);
        }
    }
}

#[test]
fn two_torus_slab_matches_torus_tube() {
    let slab = validate(parse_cut("torus-slab:n=2,k=1").unwrap(), None).unwrap();
    let tube = validate(parse_cut("orient:gx=0,gy=0,n=2").unwrap(), None).unwrap();
    for e in small() {
        let a = blocks(&e.group, &e.table, &slab, &Caps::default()).unwrap();
        let b = blocks(&e.group, &e.table, &tube, &Caps::default()).unwrap();
        assert_eq!(a.topological_shapes(), b.topological_shapes(), "{}", e.group.name());
    }
}
