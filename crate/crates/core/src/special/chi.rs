use num_complex::Complex;

use super::gamma::log_gamma;
use super::ComplexPoint;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `log χ(s)` for the functional equation `ζ(s) = χ(s) ζ(1−s)`,
/// `χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s)`. The imaginary part is only
/// defined modulo 2π.
pub fn log_chi_factor<T: Real>(s: ComplexPoint<T>) -> Result<Complex<T>> {
    s.check_finite()?;
    let sc = s.to_complex();
    let one_minus = ComplexPoint::new(T::one() - s.sigma, -s.tau)?;
    let lg = log_gamma(one_minus)?.value;
    let ln2 = T::LN_2();
    let lnpi = T::PI().ln();
    Ok(sc * ln2 + (sc - T::one()) * lnpi + log_sin(sc * T::FRAC_PI_2()) + lg)
}

/// `|ζ(1/2−ε+iτ)| / |ζ(1/2+ε+iτ)| = |χ(1/2−ε+iτ)|`, for `0 ≤ ε < 1/4`.
///
/// The denominator equals `|ζ(1−s)|` at `s = 1/2−ε+iτ`, so the ratio is the
/// modulus of the χ-factor and needs no ζ evaluation at all.
pub fn zeta_ratio<T: Real>(eps: T, tau: T) -> Result<T> {
    if !(eps >= T::zero() && eps < T::lit(0.25)) {
        return Err(Error::rejected(format!(
            "zeta_ratio needs 0 <= eps < 1/4 (got {eps})"
        )));
    }
    if !tau.is_finite() {
        return Err(Error::rejected("tau must be finite"));
    }
    if eps == T::zero() {
        // |ζ(1/2+iτ)| = |ζ(1/2−iτ)| exactly
        return Ok(T::one());
    }
    let s = ComplexPoint::new(T::lit(0.5) - eps, tau)?;
    Ok(log_chi_factor(s)?.re.exp())
}

/// Principal-ish `log sin z`, stable for large `|Im z|`.
fn log_sin<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.im.abs() < T::one() {
        return z.sin().ln();
    }
    if z.im < T::zero() {
        return log_sin(z.conj()).conj();
    }
    // sin z = (i/2) e^{-iz} (1 − e^{2iz}),  |e^{2iz}| = e^{-2y} < e^{-2}
    let e2 = Complex::from_polar((-T::lit(2.0) * z.im).exp(), T::lit(2.0) * z.re);
    let one = Complex::new(T::one(), T::zero());
    Complex::new(z.im - T::LN_2(), T::FRAC_PI_2() - z.re) + (one - e2).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sin_matches_direct_in_overlap() {
        for (x, y) in [(0.3, 1.5), (-1.2, 2.5), (2.0, -3.0), (0.1, 8.0)] {
            let z = Complex::new(x, y);
            let direct = z.sin();
            let via = log_sin(z).exp();
            assert!((direct - via).norm() < 1e-12 * direct.norm(), "{z}");
        }
    }

    #[test]
    fn chi_formula_is_unimodular_on_the_critical_line() {
        for t in [0.0f64, 1.0, 14.0, 300.0, 5e4] {
            let lc = log_chi_factor(ComplexPoint::new(0.5, t).unwrap()).unwrap();
            assert!(lc.re.abs() < 1e-13 + 1e-15 * t, "t = {t}: {}", lc.re);
        }
    }

    #[test]
    fn ratio_at_zero_epsilon_is_one() {
        for t in [0.0, -3.0, 1e3] {
            assert_eq!(zeta_ratio(0.0, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn ratio_rejects_out_of_range_eps() {
        assert!(zeta_ratio(0.25, 0.0).is_err());
        assert!(zeta_ratio(-0.01, 0.0).is_err());
        assert!(zeta_ratio(0.1, f64::NAN).is_err());
    }

    #[test]
    fn ratio_is_even_in_tau() {
        for t in [0.5f64, 20.0, 777.0] {
            let a = zeta_ratio(0.15, t).unwrap();
            let b = zeta_ratio(0.15, -t).unwrap();
            assert!((a - b).abs() < 1e-14 * a);
        }
    }
}
