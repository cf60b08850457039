use cdgsk_core::bloch::{self, flat_symbol, BlochError, Verdict, XiGrid};
use cdgsk_core::profile::{newton_solve, DEFAULT_N};
use cdgsk_core::WaveProfile;

fn wave(a: f64, k: f64) -> WaveProfile {
    newton_solve(a, k, DEFAULT_N, 1e-13, None).unwrap().profile
}

#[test]
fn flat_spectrum_is_the_dispersion_relation() {
    let k = 1.4;
    let flat = WaveProfile::trivial(k, 8).unwrap();
    for xi in [-0.5, -0.2, 0.0, 0.35] {
        let mut got: Vec<f64> = bloch::slice(&flat, xi, 32)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|l| {
                assert_eq!(l.re, 0.0);
                l.im
            })
            .collect();
        let mut want: Vec<f64> = (-32..=32).map(|n| flat_symbol(n, xi, k)).collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-10 * w.abs().max(1.0), "{g} vs {w}");
        }
    }
}

#[test]
fn co_periodic_slice_keeps_the_triple_zero() {
    let p = wave(0.02, 1.0);
    let s = bloch::slice(&p, 0.0, 48).unwrap();
    let zeros = s.eigenvalues.iter().filter(|l| l.norm() <= 1e-10).count();
    assert_eq!(zeros, 3);
    assert!(s.deflation_residual <= 1e-12);
}

#[test]
fn quad_fold_symmetry_between_mirror_slices() {
    let p = wave(0.03, 1.0);
    let s = bloch::slice(&p, 0.2, 48).unwrap();
    let m = bloch::slice(&p, -0.2, 48).unwrap();
    assert!(s.quad_fold_defect(&m) <= 1e-8);
}

#[test]
fn small_scan_is_stable() {
    let p = wave(0.02, 1.0);
    let grid = XiGrid::uniform(21).unwrap();
    let (report, slices) = bloch::scan(&p, &grid, 48, 1e-8).unwrap();
    assert_eq!(slices.len(), 21);
    assert_eq!(report.verdict, Verdict::Stable);
    assert!(report.grid_includes_zero);
    assert!(report.symmetry_defect <= 1e-8);
    assert_eq!((report.grid_min, report.grid_max), (-0.5, 0.5));
}

#[test]
fn verdict_bands() {
    assert_eq!(Verdict::classify(1e-9, 1e-8), Verdict::Stable);
    assert_eq!(Verdict::classify(5e-8, 1e-8), Verdict::Inconclusive);
    assert_eq!(Verdict::classify(2e-7, 1e-8), Verdict::Unstable);
}

#[test]
fn invalid_floquet_exponents() {
    let flat = WaveProfile::trivial(1.0, 8).unwrap();
    assert!(matches!(bloch::slice(&flat, 0.6, 16), Err(BlochError::Xi(_))));
    assert!(matches!(XiGrid::uniform(1), Err(BlochError::GridSize(1))));
    assert!(matches!(XiGrid::from_points(vec![]), Err(BlochError::EmptyGrid)));
    assert!(matches!(bloch::assemble(&flat, 0.0, 4), Err(BlochError::Truncation { .. })));
}

#[test]
fn no_collisions_away_from_origin() {
    let found = bloch::collision_analysis(2.0, 8, &XiGrid::uniform(101).unwrap());
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].modes, vec![-1, 0, 1]);
}
