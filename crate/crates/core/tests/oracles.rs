//! Frozen reference values computed independently in 40-digit arithmetic
//! (series summed directly, `u` by adaptive quadrature of the series).

// Reference values are kept at the precision the oracle printed them.
#![allow(clippy::excessive_precision)]

use laplace_growth::borel::BorelEvaluator;
use laplace_growth::contour::{u_eval, LaplaceConfig, LaplaceSplit, QuadratureSpec};
use laplace_growth::product::ProductEvaluator;
use laplace_growth::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn borel_transform_reference_values() {
    let g = BorelEvaluator::default();
    let cases = [
        (c(-4.0, 0.0), c(-0.242_138_863_270_169_763_5, 0.0)),
        (c(-3.5, 0.0), c(-0.273_983_264_909_676_264_2, 0.0)),
        (c(-3.0, 0.0), c(-0.314_750_413_856_714_439_3, 0.0)),
        (c(2.55, 0.0), c(0.362_133_759_022_791_704_6, 0.0)),
        (
            Complex64::from_polar(2.55, 1.0),
            c(0.242_249_324_441_760_251_0, -0.327_221_481_842_411_367_7),
        ),
        (c(0.0, 2.6), c(0.0, -0.411_400_351_703_068_406_5)),
    ];
    for (s, want) in cases {
        let got = g.borel_eval(s).unwrap();
        assert!(
            rel(got, want) <= 4.0 * f64::EPSILON,
            "g({s}) = {got}, want {want}"
        );
    }
}

#[test]
fn u_reference_values() {
    let spec = QuadratureSpec::default();
    let cases = [
        (c(0.0, 0.0), c(0.0, -0.043_841_397_413_168_331_19)),
        (c(1.0, 0.0), c(0.0, -0.001_409_642_963_242_286_793)),
        (c(2.0, 0.0), c(0.0, -4.894_109_219_944_799_638e-5)),
        (
            c(2.0, 3.0),
            c(1.692_413_994_246_807_369e-5, 3.208_187_305_286_893_398e-5),
        ),
        (
            c(-3.0, 1.0),
            c(1_108.585_993_243_325_146, 1_749.004_239_099_768_671),
        ),
        (
            c(-6.5, -2.25),
            c(789_355_316.678_573_112_6, 816_067_819.769_185_797_0),
        ),
        (c(10.0, 0.0), c(0.0, -4.556_362_694_224_202_273e-16)),
    ];
    for (z, want) in cases {
        let got = u_eval(z, &spec).unwrap().value;
        assert!(rel(got, want) <= 1e-13, "u({z}) = {got}, want {want}");
    }
}

#[test]
fn splitting_against_reference_f() {
    let split = LaplaceSplit::new(LaplaceConfig::default()).unwrap();
    let prod = ProductEvaluator::default();
    let cases = [
        (
            c(2.0, 3.0),
            c(4.696_529_977_291_942_300, -3.347_895_835_903_668_559),
        ),
        (
            c(-3.0, 1.0),
            c(-1.454_163_238_398_132_073, 0.960_954_822_604_836_474_4),
        ),
        (
            c(-6.5, -2.25),
            c(-56.808_660_596_657_175_52, 106.330_972_652_207_195_6),
        ),
    ];
    for (z, want) in cases {
        let f = prod.eval_log_f(z).to_complex();
        assert!(rel(f, want) <= 1e-13, "f({z}) = {f}, want {want}");
        let sum = split.big_f(z).unwrap().value + split.u(z).unwrap().value;
        assert!(
            (sum - want).norm() <= 1e-7 * (1.0 + want.norm()),
            "F + u at {z} = {sum}"
        );
    }
    let f10 = prod.eval_log_f(c(10.0, 0.0)).to_complex();
    assert!(rel(f10, c(-4_528.927_831_880_594_199, 0.0)) <= 1e-13);
}
