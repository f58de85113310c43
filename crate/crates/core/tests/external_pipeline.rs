//! The d = 12 comparison pipeline run on a user-supplied base file. The
//! base here is a stand-in (Weyl operators of dimension 4 with four
//! removed), not a real unextendible set.

mod common;

use common::{cli, p};
use umeb::constructions::{bravyi_smolin_3, lift, weyl_family, Provenance};
use umeb::linalg::Tolerances;
use umeb::matrix_set::{load_umeb, save_umeb};
use umeb::spectral::{compare_signatures, signature, Distinction, DEFAULT_BOUND};

#[test]
fn stand_in_base_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let base = weyl_family(4)
        .select(&(0..12).collect::<Vec<_>>(), "stand-in d=4")
        .unwrap();
    let base_path = dir.path().join("ext4.json");
    save_umeb(&base, &base_path).unwrap();

    let lifted_path = dir.path().join("ext12.json");
    let (c, out, err) = cli(&["lift", p(&base_path), "-q", "3", "-o", p(&lifted_path)]);
    assert_eq!(c, 0, "{err}");
    assert!(out.contains("132 elements of dimension 12"));
    // q(q-1)d^2 + qN with d = 4, N = 12, q = 3, and (qd)^2 - (d^2 - N).
    assert!(out.contains("= 132") && out.contains("= 140"));

    let lifted = load_umeb(&lifted_path).unwrap();
    assert!(matches!(
        lifted.provenance(),
        Provenance::Lift {
            q: 3,
            base_dim: 4,
            base_count: 12,
            ..
        }
    ));

    let ours_path = dir.path().join("bs12.json");
    save_umeb(&lift(&bravyi_smolin_3(), 4).unwrap(), &ours_path).unwrap();
    let (c, out, _) = cli(&["compare", p(&ours_path), p(&lifted_path)]);
    assert_eq!(c, 0);
    assert!(out.contains("DISTINGUISHED"));

    // The stand-in's complement contains the removed Weyl operators, so
    // the base-case check of its certificate fails.
    let (c, out, _) = cli(&["certify", p(&lifted_path)]);
    assert_eq!(c, 2, "{out}");

    let tol = Tolerances::default();
    let a = signature(&lifted, DEFAULT_BOUND, &tol).unwrap();
    assert_eq!(a.summary.infinite_elements, 0);
    assert_eq!(a.summary.undetermined_elements, 0);
    let b = signature(&load_umeb(&ours_path).unwrap(), DEFAULT_BOUND, &tol).unwrap();
    assert_eq!(compare_signatures(&a, &b, &tol), Distinction::Distinguished);
}
