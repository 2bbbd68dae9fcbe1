use loopblocks::blocks::blocks;
use loopblocks::caps::Caps;
use loopblocks::double::QuantumDouble;
use loopblocks::gauge::gsd;
use loopblocks::group::{catalog, parse_group, FiniteGroup};
use loopblocks::lattice::{builtin_lattice, empirical_blocks, empirical_gauge_dof};
use loopblocks::rep::closed_hom_count;
use loopblocks::CharacterTable;

fn agree(g: &FiniteGroup, lattice: &str) {
    let caps = Caps::default();
    let ct = CharacterTable::new(g).unwrap();
    let lat = builtin_lattice(lattice).unwrap();
    let cut = lat.validated_cut().unwrap();
    let predicted = blocks(g, &ct, &cut, &caps).unwrap().expanded_shapes().unwrap();
    let found = empirical_blocks(&lat, g, &caps).unwrap();
    assert_eq!(found.shapes, predicted, "{} on {lattice}", g.name());
}

#[test]
fn empirical_blocks_for_groups_up_to_six() {
    for g in catalog().iter().filter(|g| g.order() <= 6) {
        for lattice in ["torus:2", "klein:2", "rp2:2", "rp2-mobius"] {
            agree(g, lattice);
        }
    }
}

#[test]
fn refined_meshes_give_the_same_blocks() {
    for name in ["Z2", "Z3"] {
        let g = parse_group(name).unwrap();
        for lattice in ["torus:3", "klein:3", "torus-disk:3", "klein-disk:3", "rp2:3"] {
            agree(&g, lattice);
        }
    }
    let s3 = parse_group("S3").unwrap();
    agree(&s3, "torus-hole");
    agree(&s3, "klein-mobius");
    agree(&s3, "genus2-octagon");
}

#[test]
fn flat_counts_scale_with_free_vertices() {
    let caps = Caps::default();
    for name in ["Z2", "Z3", "S3", "Q8"] {
        let g = parse_group(name).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        for lattice in ["torus:2", "klein:2", "rp2-bigon", "genus2-octagon", "sphere"] {
            let lat = builtin_lattice(lattice).unwrap();
            let closed = closed_hom_count(&ct, lat.surface).unwrap();
            let want = closed * (g.order() as u128).pow(lat.num_vertices as u32 - 1);
            assert_eq!(lat.flat_count(&g, &caps).unwrap(), want, "{name} on {lattice}");
        }
    }
}

#[test]
fn gauge_orbits_count_ground_states() {
    let caps = Caps::default();
    for name in ["Z2", "Z3", "S3"] {
        let g = parse_group(name).unwrap();
        let qd = QuantumDouble::new(&g).unwrap();
        for lattice in ["torus:2", "klein:2", "rp2-mobius", "sphere"] {
            let lat = builtin_lattice(lattice).unwrap();
            assert_eq!(
                empirical_gauge_dof(&lat, &g, &caps).unwrap(),
                gsd(&qd, lat.surface).unwrap(),
                "{name} on {lattice}"
            );
        }
    }
}

#[test]
fn caps_are_enforced() {
    let g = parse_group("S3").unwrap();
    let lat = builtin_lattice("torus:3").unwrap();
    let tiny = Caps::uniform(10);
    assert!(lat.flat_configurations(&g, &tiny).is_err());
}
