use num_complex::Complex;

use super::bernoulli::BERNOULLI_EVEN;
use super::{ComplexPoint, SpecialValue};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::ComplexNeumaier;

/// Argument modulus above which the Stirling series is applied directly.
const STIRLING_RADIUS: f64 = 12.0;

/// Principal-branch `log Γ(s)`.
///
/// For `Re(s) ≤ 0` the value is the continuation obtained from
/// `log Γ(s) = log Γ(s + m) − Σ_{k<m} log(s + k)` with principal logarithms,
/// which agrees with the principal branch away from the negative real axis.
pub fn log_gamma<T: Real>(s: ComplexPoint<T>) -> Result<SpecialValue<T>> {
    s.check_finite()?;
    if s.tau == T::zero() && s.sigma <= T::zero() && s.sigma == s.sigma.floor() {
        return Err(Error::Domain(format!(
            "log_gamma has a pole at s = {}",
            s.sigma
        )));
    }

    let radius = T::lit(STIRLING_RADIUS);
    let mut z = s.to_complex();
    let mut shift = ComplexNeumaier::new();
    let mut shift_abs = T::zero();
    while z.re < T::zero() || z.norm() < radius {
        let l = z.ln();
        shift_abs += l.norm();
        shift.add(l);
        z.re += T::one();
    }

    let (stirling, bound, stirling_abs) = stirling(z);
    let value = stirling - shift.value();
    let rounding = T::epsilon() * T::lit(4.0) * (stirling_abs + shift_abs);
    Ok(SpecialValue {
        value,
        abs_error_bound: bound,
        rounding_estimate: rounding,
    })
}

/// Stirling series at `z` with `Re z ≥ 0`, `|z| ≥ STIRLING_RADIUS`.
/// Returns (value, remainder bound, sum of term magnitudes).
fn stirling<T: Real>(z: Complex<T>) -> (Complex<T>, T, T) {
    let half = T::lit(0.5);
    let lnz = z.ln();
    let lead = (z - half) * lnz - z + Complex::from(half * (T::TAU()).ln());
    let mut total = ComplexNeumaier::new();
    total.add(lead);
    let mut mags = lead.norm() + (z.norm() * lnz.norm());

    let inv = z.inv();
    let inv2 = inv * inv;
    let r = z.norm();
    // remainder in the sector |arg z| < π is bounded by the next term times sec^{2K+2}(θ/2)
    let sec_half = T::one() / (half * z.arg()).cos();
    let tol = T::epsilon() * T::lit(0.25) * lead.norm().max(T::one());

    let mut power = inv; // z^{-(2k-1)}
    let mut bound = T::infinity();
    for k in 1..BERNOULLI_EVEN.len() {
        let kk = T::from_count(2 * k as u64);
        let coeff = T::lit(BERNOULLI_EVEN[k - 1]) / (kk * (kk - T::one()));
        let term = power * coeff;
        total.add(term);
        mags += term.norm();

        let next = T::from_count(2 * k as u64 + 2);
        let next_coeff = T::lit(BERNOULLI_EVEN[k]).abs() / (next * (next - T::one()));
        bound = next_coeff / r.powi(2 * k as i32 + 1) * sec_half.powi(2 * k as i32 + 2);
        if bound <= tol {
            break;
        }
        power = power * inv2;
    }
    (total.value(), bound, mags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lg(sigma: f64, tau: f64) -> SpecialValue<f64> {
        log_gamma(ComplexPoint::new(sigma, tau).unwrap()).unwrap()
    }

    #[test]
    fn classical_values() {
        assert!(lg(1.0, 0.0).value.norm() < 1e-14);
        assert!(lg(2.0, 0.0).value.norm() < 1e-14);
        let half = lg(0.5, 0.0).value;
        assert!((half.re - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        // Γ(5) = 24
        assert!((lg(5.0, 0.0).value.re - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles_are_domain_errors() {
        for p in [0.0, -1.0, -7.0] {
            let err = log_gamma(ComplexPoint::new(p, 0.0).unwrap()).unwrap_err();
            assert_eq!(err.kind(), crate::error::ErrorKind::Domain);
        }
        assert!(log_gamma(ComplexPoint::new(-1.0, 1e-3).unwrap()).is_ok());
    }

    #[test]
    fn reflection_consistency_in_modulus() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.5, 3.0, 17.0, 140.0] {
            let v = lg(0.5, t).value.re;
            let expect = 0.5 * (std::f64::consts::PI.ln() - (std::f64::consts::PI * t).cosh().ln());
            assert!((v - expect).abs() < 1e-12 * (1.0 + expect.abs()), "t = {t}");
        }
    }

    #[test]
    fn negative_real_part_via_recurrence() {
        // Γ(-1/2) = -2√π, so Re log Γ(-1/2) = log(2√π)
        let v = lg(-0.5, 0.0).value;
        assert!((v.re - (2.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry() {
        let a = lg(0.3, 7.5).value;
        let b = lg(0.3, -7.5).value;
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn f32_instantiation() {
        let v = log_gamma(ComplexPoint::<f32>::new(0.5, 0.0).unwrap()).unwrap();
        assert!((v.value.re - 0.572_364_9).abs() < 1e-6);
    }
}
