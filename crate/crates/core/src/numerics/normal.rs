use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{check_probability, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn std_normal_ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Standard normal distribution function, `0.5 * erfc(-z / sqrt(2))`.
///
/// Accurate to a few ulps across the whole line; `Phi(z) + Phi(-z) == 1` up to rounding.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Phi(z)`, finite for every finite `z`.
///
/// Below `z = -35` the asymptotic Mills-ratio series is used, since `Phi` itself
/// approaches the subnormal range there.
pub fn std_normal_ln_cdf(z: f64) -> f64 {
    if z > -35.0 {
        return std_normal_cdf(z).ln();
    }
    if z == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10)
    let w = 1.0 / (z * z);
    let series = 1.0 - w * (1.0 - w * (3.0 - w * (15.0 - w * (105.0 - w * 945.0))));
    std_normal_ln_pdf(z) - (-z).ln() + series.ln()
}

/// Inverse of the standard normal distribution function (Wichura's AS 241, PPND16).
pub fn std_normal_quantile(u: f64) -> Result<f64> {
    check_probability("u", u)?;
    Ok(ppnd16(u))
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_4e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_049e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_values() {
        assert!((std_normal_pdf(0.0) - 0.398_942_280_4).abs() < 1e-10);
        assert_eq!(std_normal_pdf(1.3), std_normal_pdf(-1.3));
        // exp(-1/2) / sqrt(2 pi) at extended precision
        assert!((std_normal_pdf(1.0) - 0.241_970_724_519_143_37).abs() < 1e-14);
        assert!((std_normal_ln_pdf(0.0) + 0.918_938_533_204_672_8).abs() < 1e-15);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        // high-precision erf reference values
        assert!((std_normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
        assert!((std_normal_cdf(-3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-17);
        assert!((std_normal_cdf(-8.0) - 6.220_960_574_271_784e-16).abs() < 1e-29);
        for i in -80..=80 {
            let z = i as f64 * 0.1;
            assert!((std_normal_cdf(z) + std_normal_cdf(-z) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn ln_cdf_matches_direct_and_asymptotic_regimes() {
        for z in [-34.9, -20.0, -5.0, 0.0, 3.0] {
            assert!((std_normal_ln_cdf(z) - std_normal_cdf(z).ln()).abs() < 1e-12);
        }
        // continuity across the switch to the series
        let a = std_normal_ln_cdf(-35.0 + 1e-9);
        let b = std_normal_ln_cdf(-35.0 - 1e-9);
        assert!((a - b).abs() < 1e-6);
        assert!(std_normal_ln_cdf(-1e6).is_finite());
        // ln Phi(-40) = -804.6084420137538 (mpmath)
        assert!((std_normal_ln_cdf(-40.0) + 804.608_442_013_753_8).abs() < 1e-9);
    }

    #[test]
    fn quantile_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        for i in -5..=5 {
            let z = i as f64;
            let back = std_normal_quantile(std_normal_cdf(z)).unwrap();
            assert!((back - z).abs() < 1e-10, "{z} -> {back}");
        }
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf_everywhere() {
        let mut u = 1e-12;
        while u < 1.0 - 1e-12 {
            let z = std_normal_quantile(u).unwrap();
            assert!(
                (std_normal_cdf(z) - u).abs() <= 1e-12 * u.max(1e-3),
                "u = {u}"
            );
            u = if u < 0.01 { u * 1.7 } else { u + 0.003 };
        }
        let tiny = std_normal_quantile(1e-300).unwrap();
        assert!((tiny + 37.047_096_299_361_2).abs() < 1e-9);
    }
}
