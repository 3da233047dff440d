use julia_coding::cod_space::RadialClass;
use julia_coding::lifted_ifs::{
    attractor_raster, closed_form_measure, growth_rate_exact, hutchinson_defect, lift_radial_class,
    measure_estimate, multiplicity_estimate, tiling_check, Window,
};
use julia_coding::Family;
use proptest::prelude::*;

fn lift(fam: Family, s: &str) -> julia_coding::LiftedIfs {
    lift_radial_class(&RadialClass::parse(fam, s).unwrap()).unwrap()
}

#[test]
fn interval_tiles_measure_their_multiplicity() {
    for n in 1..=3i64 {
        let ifs = lift_radial_class(&RadialClass::power(2, &[0, n]).unwrap()).unwrap();
        let m = multiplicity_estimate(&ifs, 128).unwrap();
        assert_eq!(m.n, n);
    }
}

#[test]
fn lattes_triangle_has_unit_area_and_tiles() {
    let ifs = lift(Family::Lattes, "-i/2+1+i,-1/2+2");
    let r = attractor_raster(&ifs, 128).unwrap();
    assert!((measure_estimate(&r) - 1.0).abs() < 0.03);
    assert!(hutchinson_defect(&ifs, &r).unwrap().is_clean());
    let t = tiling_check(&ifs, Window::square(0.0, 2.0).unwrap(), 64).unwrap();
    assert!(t.coverage > 0.98 && t.overlap < 0.03, "{t:?}");
}

#[test]
fn rasters_are_deterministic() {
    let ifs = lift(Family::Chebyshev(2), "1/4,-1/4+1");
    let a = attractor_raster(&ifs, 64).unwrap().to_pgm("x");
    let b = attractor_raster(&ifs, 64).unwrap().to_pgm("x");
    assert_eq!(a, b);
}

#[test]
fn closed_forms_for_catalog_classes() {
    let cases = [
        (Family::Power(2), "0,3/2", "3"),
        (Family::Chebyshev(2), "1/4,-1/4+1", "1"),
        (Family::Lattes, "i/2,1/2+1+i", "1"),
    ];
    for (fam, s, want) in cases {
        let c = RadialClass::parse(fam, s).unwrap();
        assert_eq!(closed_form_measure(&c).unwrap().to_string(), want, "{fam} {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn growth_is_monotone_and_bounded(n in proptest::collection::vec(-4i64..=4, 2..=3)) {
        let d = n.len() as u32;
        let ifs = lift_radial_class(&RadialClass::power(d, &n).unwrap()).unwrap();
        let counts = growth_rate_exact(&ifs, 8).counts;
        for (k, w) in counts.windows(2).enumerate() {
            prop_assert!(w[0] <= w[1]);
            prop_assert!(w[1] <= (d as usize).pow(k as u32 + 2));
        }
    }

    #[test]
    fn power_two_rasters_are_self_similar(n in 1i64..=4) {
        let ifs = lift_radial_class(&RadialClass::power(2, &[0, n]).unwrap()).unwrap();
        let r = attractor_raster(&ifs, 64).unwrap();
        prop_assert!(r.converged());
        prop_assert!(hutchinson_defect(&ifs, &r).unwrap().is_clean());
    }
}
