use std::path::PathBuf;

use hypercluster::code::build_code;
use hypercluster::homology::{distance_search, DistanceOptions};
use hypercluster::lattice::{dual, load_lattice, validate};

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../lattices").join(name)
}

#[test]
fn minimal_83_counts_and_genus() {
    let lat = load_lattice(bundled("hyperbolic-8-3-e24.lat")).unwrap();
    assert_eq!((lat.num_edges(), lat.num_faces(), lat.num_vertices()), (24, 6, 16));
    assert_eq!(lat.genus(), 2);
    assert!(validate(lat.data()).all_passed());

    let d = dual(&lat);
    assert_eq!((d.p(), d.q()), (3, 8));
    assert_eq!((d.num_edges(), d.num_faces(), d.num_vertices()), (24, 16, 6));
    assert_eq!(3 * d.num_faces(), 2 * d.num_edges());
    assert_eq!(8 * d.num_vertices(), 2 * d.num_edges());
}

#[test]
fn minimal_83_code_agrees_with_generic_search() {
    let lat = load_lattice(bundled("hyperbolic-8-3-e24.lat")).unwrap();
    let code = build_code(&lat).unwrap();
    assert_eq!((code.n(), code.k()), (24, 4));
    let opts = DistanceOptions::default();
    let dz = distance_search(code.hx(), code.basis().x_logicals(), &opts);
    let dx = distance_search(code.hz(), code.basis().z_logicals(), &opts);
    assert_eq!(code.d_z(), dz);
    assert_eq!(code.d_x(), dx);
}

#[test]
fn larger_83_instances_have_table_parameters() {
    for (e, k) in [(216, 20), (288, 26), (384, 34), (600, 52)] {
        let lat = load_lattice(bundled(&format!("hyperbolic-8-3-e{e}.lat"))).unwrap();
        assert_eq!(lat.genus() * 2, k as i64);
        let code = build_code(&lat).unwrap();
        assert_eq!((code.n(), code.k()), (e, k));
        assert_eq!((code.d_z().value, code.d_x().value), (12, 4), "E={e}");
        assert!(code.d_z().exact && code.d_x().exact);
    }
}

#[test]
fn e216_distances_by_generic_search() {
    let lat = load_lattice(bundled("hyperbolic-8-3-e216.lat")).unwrap();
    let code = build_code(&lat).unwrap();
    let opts = DistanceOptions::default();
    let dz = distance_search(code.hx(), code.basis().x_logicals(), &opts);
    let dx = distance_search(code.hz(), code.basis().z_logicals(), &opts);
    assert_eq!((dz.value, dz.exact), (12, true));
    assert_eq!((dx.value, dx.exact), (4, true));
}
