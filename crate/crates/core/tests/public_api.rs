use nbcrit::approximants::{breakpoints, evaluate, DEFAULT_MAX_BREAKPOINTS};
use nbcrit::l2engine::{gram_inner, panel_integrate};
use nbcrit::mellin::{mellin_closed, titchmarsh};
use nbcrit::{
    ApproximantKind, ApproximantSpec, ApproximantSpec64, ErrorKind, MoebiusTable, QuadratureConfig, QuadratureConfig64,
    ZetaEngine, ZetaEngine64,
};

fn table() -> MoebiusTable {
    MoebiusTable::sieve(1000).unwrap()
}

#[test]
fn f32_and_f64_distances_agree_to_single_precision() {
    let t = table();
    let d64 = panel_integrate(
        &ApproximantSpec64::natural(10),
        true,
        &QuadratureConfig64::default().with_x_min(1e-3),
        &t,
        &ZetaEngine64::new(1e-12).unwrap(),
    )
    .unwrap();
    let d32 = panel_integrate(
        &ApproximantSpec::<f32>::natural(10),
        true,
        &QuadratureConfig::<f32>::default().with_x_min(1e-3),
        &t,
        &ZetaEngine::<f32>::new(1e-5).unwrap(),
    )
    .unwrap();
    assert!((d32.distance as f64 - d64.distance).abs() < 1e-4 * d64.distance);
}

#[test]
fn kinds_parse_by_name() {
    for name in ["natural", "selberg", "regularized", "regularized_limit"] {
        let k: ApproximantKind = name.parse().unwrap();
        assert_eq!(k.name(), name);
    }
    assert_eq!("bogus".parse::<ApproximantKind>().unwrap_err().kind(), ErrorKind::RejectedInput);
    let spec = ApproximantSpec64::regularized(0.25, 7);
    assert_eq!(ApproximantSpec64::from_parts(spec.kind, spec.n, spec.eps).unwrap(), spec);
}

#[test]
fn breakpoints_cover_every_reciprocal_of_a_multiple() {
    let t = table();
    let b = breakpoints(&ApproximantSpec64::natural(2), 1e-2, &t, DEFAULT_MAX_BREAKPOINTS).unwrap();
    // every m ≤ 100 is a multiple of 1 or 2
    assert_eq!(b.denominators.len(), 100);
    assert!(b.points.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn rho_one_gram_entry_matches_its_norm() {
    let t = table();
    let cfg = QuadratureConfig64::default().with_x_min(1e-4);
    let z = ZetaEngine64::new(1e-12).unwrap();
    let n = panel_integrate(&ApproximantSpec64::natural(1), false, &cfg, &t, &z).unwrap();
    let g = gram_inner(1, 1, &cfg).unwrap();
    assert!((n.distance * n.distance - g).abs() < 1e-10);
}

#[test]
fn closed_form_of_rho_one_is_titchmarsh() {
    let t = table();
    let z = ZetaEngine64::new(1e-13).unwrap();
    let a = mellin_closed(&ApproximantSpec64::natural(1), 0.1, 3.0, &t, &z).unwrap();
    let b = titchmarsh(0.1, 3.0, &z).unwrap();
    assert!((a.value - b.value).norm() < 1e-15);
}

#[test]
fn natural_one_is_the_fractional_part() {
    let t = table();
    let z = ZetaEngine64::new(1e-12).unwrap();
    let v = evaluate(&ApproximantSpec64::natural(1), 0.3, &t, &z).unwrap();
    assert!((v - (1.0 / 0.3 - 3.0)).abs() < 1e-15);
}
