// Coefficients are kept as published.
#![allow(clippy::excessive_precision)]

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Smallest and largest probabilities `phi` returns, so that every value it
/// produces is a valid input for `phi_inv`.
const P_MIN: f64 = f64::MIN_POSITIVE;
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// Standard normal CDF.
///
/// Evaluated as `erfc(-z/√2)/2`, which keeps full relative precision in the
/// lower tail. The result is clamped into `[f64::MIN_POSITIVE, 1 - 2⁻⁵³]`.
pub fn normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain {
            what: "normal_cdf argument",
            value: z,
        });
    }
    Ok(phi(z))
}

/// Standard normal quantile `Φ⁻¹(p)` for `p` in the open unit interval.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "normal_quantile probability",
            value: p,
        });
    }
    Ok(phi_inv(p))
}

#[inline]
pub(crate) fn phi(z: f64) -> f64 {
    (0.5 * libm::erfc(-z * FRAC_1_SQRT_2)).clamp(P_MIN, P_MAX)
}

// Wichura's AS 241 (PPND16), relative accuracy about 1e-16.
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_30,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_610,
    28_729.085_735_721_942_674,
    5_226.495_278_852_854_561_0,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_90,
    5.769_497_221_460_691_405_50,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_770,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_40e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_40,
    0.689_767_334_985_100_004_550,
    0.148_103_976_427_480_074_590,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946_00e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_20,
    5.463_784_911_164_114_369_90,
    1.784_826_539_917_291_335_80,
    0.296_560_571_828_504_891_230,
    0.026_532_189_526_576_123_093_0,
    0.001_242_660_947_388_078_438_60,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_690,
    0.136_929_880_922_735_805_310,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591_00e-4,
    1.846_318_317_510_054_681_80e-5,
    1.421_511_758_316_445_888_70e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| libm::fma(acc, x, c))
}

/// Unchecked quantile; `p` must lie in `(0, 1)`.
#[inline]
pub(crate) fn phi_inv(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = libm::sqrt(-libm::log(tail));
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integration of the standard normal density from
    /// `-12` to `z`; an oracle independent of `erfc`.
    fn cdf_by_quadrature(z: f64) -> f64 {
        let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt();
        let lo = -12.0;
        let steps = 200_000;
        let h = (z - lo) / steps as f64;
        let mut sum = density(lo) + density(z);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * density(lo + i as f64 * h);
        }
        sum * h / 3.0
    }

    fn quantile_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_by_quadrature(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-10 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(normal_cdf(0.0).unwrap(), 0.5);
        let oracle = cdf_by_quadrature(1.959964);
        assert!((oracle - 0.975).abs() < 1e-6);
        assert!((normal_cdf(1.959964).unwrap() - oracle).abs() < 1e-9);
        let oracle = cdf_by_quadrature(-1.0);
        assert!((oracle - 0.158655).abs() < 1e-6);
        assert!((normal_cdf(-1.0).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn cdf_matches_quadrature_on_grid() {
        for i in 0..=32 {
            let z = -8.0 + 0.5 * i as f64;
            let err = (normal_cdf(z).unwrap() - cdf_by_quadrature(z)).abs();
            assert!(err < 1e-9, "z={z} err={err}");
        }
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(normal_cdf(f64::NAN).is_err());
        assert!(normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_stays_inside_open_interval() {
        for &z in &[-60.0, -40.0, 9.0, 40.0] {
            let p = normal_cdf(z).unwrap();
            assert!(p > 0.0 && p < 1.0, "z={z} p={p}");
            assert!(normal_quantile(p).is_ok());
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        let oracle = quantile_by_bisection(0.975);
        assert!((oracle - 1.959964).abs() < 1e-5);
        assert!((normal_quantile(0.975).unwrap() - oracle).abs() < 1e-8);
        for z in -3..=3 {
            let z = z as f64;
            let back = normal_quantile(normal_cdf(z).unwrap()).unwrap();
            assert!((back - z).abs() < 1e-7, "z={z} back={back}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let mut p = 1e-300;
        while p < 1.0 {
            for &x in &[p, 1.0 - p] {
                if x > 0.0 && x < 1.0 {
                    let back = normal_cdf(normal_quantile(x).unwrap()).unwrap();
                    assert!((back - x).abs() < 1e-8, "p={x} back={back}");
                }
            }
            p *= 3.7;
        }
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let back = normal_cdf(normal_quantile(p).unwrap()).unwrap();
            assert!((back - p).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn quantile_domain() {
        for &p in &[0.0, 1.0, -0.1, 1.1, f64::NAN] {
            assert!(normal_quantile(p).is_err(), "{p}");
        }
    }

    #[test]
    fn cdf_monotone_on_grid() {
        // Strictly increasing while Φ(z) is resolvable in f64; beyond z≈7 the
        // upper tail is narrower than one ulp below 1.
        let steps = 10_000;
        let mut prev = 0.0;
        for i in 0..=steps {
            let z = -8.0 + 16.0 * i as f64 / steps as f64;
            let p = normal_cdf(z).unwrap();
            if z <= 7.0 {
                assert!(p > prev, "not strictly increasing at {z}");
            } else {
                assert!(p >= prev, "decreasing at {z}");
            }
            prev = p;
        }
    }
}
