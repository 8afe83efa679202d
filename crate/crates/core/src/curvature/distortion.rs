//! Distortion coefficients `s_κ`, `c_κ`, `t_κ`, `σ_{K,N}` and `τ_{K,N}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ext::Ext;

/// Below this angle the ratios `θ/s_κ(θ)` and `θ/t_κ(θ)` use their Taylor
/// expansion.
pub const SMALL_THETA: f64 = 1e-8;

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "angle must be finite and nonnegative, got {theta}"
        )))
    }
}

/// `s_κ(θ)` on its principal branch `θ < π/√κ` (no bound for `κ ≤ 0`).
pub fn s_kappa(kappa: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if kappa > 0.0 {
        let r = kappa.sqrt();
        if r * theta >= PI {
            return Err(Error::DomainError(format!("s_κ needs √κ·θ < π, got {}", r * theta)));
        }
        Ok((r * theta).sin() / r)
    } else if kappa == 0.0 {
        Ok(theta)
    } else {
        let r = (-kappa).sqrt();
        Ok((r * theta).sinh() / r)
    }
}

pub fn c_kappa(kappa: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(if kappa > 0.0 {
        (kappa.sqrt() * theta).cos()
    } else if kappa == 0.0 {
        1.0
    } else {
        ((-kappa).sqrt() * theta).cosh()
    })
}

/// `(s_κ, c_κ, t_κ = s_κ/c_κ)`, defined for `√κ·θ < π/2` when `κ > 0`.
pub fn s_c_t(kappa: f64, theta: f64) -> Result<(f64, f64, f64)> {
    check_theta(theta)?;
    if kappa > 0.0 && kappa.sqrt() * theta >= PI / 2.0 {
        return Err(Error::DomainError(format!(
            "t_κ has a pole at √κ·θ = π/2, got {}",
            kappa.sqrt() * theta
        )));
    }
    let s = s_kappa(kappa, theta)?;
    let c = c_kappa(kappa, theta)?;
    Ok((s, c, s / c))
}

/// `σ_{K,N}^{(t)}(θ)`: `+∞` once `Kθ² ≥ Nπ²`, `t` when `Kθ² = 0`, else
/// `s_{K/N}(tθ) / s_{K/N}(θ)`.
pub fn sigma(k: f64, n: f64, t: f64, theta: f64) -> Result<Ext> {
    check_theta(theta)?;
    if !(n > 0.0) {
        return Err(Error::DomainError(format!("σ needs N > 0, got {n}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("σ needs t in [0, 1], got {t}")));
    }
    let kt2 = k * theta * theta;
    if kt2 >= n * PI * PI {
        return Ok(Ext::Infinite);
    }
    if kt2 == 0.0 {
        return Ok(Ext::Finite(t));
    }
    let kappa = k / n;
    Ok(Ext::Finite(s_kappa(kappa, t * theta)? / s_kappa(kappa, theta)?))
}

/// `τ_{K,N}^{(t)}(θ) = t^{1/N} σ_{K,N−1}^{(t)}(θ)^{(N−1)/N}`, with `τ = t`
/// at `N = 1`.
pub fn tau(k: f64, n: f64, t: f64, theta: f64) -> Result<Ext> {
    if !(n >= 1.0) {
        return Err(Error::DomainError(format!("τ needs N ≥ 1, got {n}")));
    }
    if n == 1.0 {
        check_theta(theta)?;
        return Ok(Ext::Finite(t));
    }
    Ok(match sigma(k, n - 1.0, t, theta)? {
        Ext::Infinite => Ext::Infinite,
        Ext::Finite(s) => Ext::Finite(t.powf(1.0 / n) * s.powf((n - 1.0) / n)),
    })
}

/// `θ / s_κ(θ)`, equal to 1 at `θ = 0`.
pub fn theta_over_s(kappa: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta < SMALL_THETA {
        return Ok(1.0 + kappa * theta * theta / 6.0);
    }
    Ok(theta / s_kappa(kappa, theta)?)
}

/// `θ / t_κ(θ)`, equal to 1 at `θ = 0`.
pub fn theta_over_t(kappa: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta < SMALL_THETA {
        return Ok(1.0 - kappa * theta * theta / 3.0);
    }
    let (_, _, t) = s_c_t(kappa, theta)?;
    Ok(theta / t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_case() {
        assert_eq!(s_c_t(0.0, 0.7).unwrap(), (0.7, 1.0, 0.7));
        for &theta in &[0.0, 0.3, 5.0] {
            assert_eq!(sigma(0.0, 3.0, 0.25, theta).unwrap(), Ext::Finite(0.25));
            assert_eq!(
                tau(0.0, 3.0, 0.25, theta).unwrap().to_f64(),
                0.25f64.powf(1.0 / 3.0) * 0.25f64.powf(2.0 / 3.0)
            );
        }
    }

    #[test]
    fn hyperbolic_values_match_series() {
        // sinh(1) and cosh(1) summed term by term.
        let mut s = 0.0;
        let mut c = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 0 {
                c += 1.0 / fact;
            } else {
                s += 1.0 / fact;
            }
        }
        let (s1, c1, _) = s_c_t(-1.0, 1.0).unwrap();
        assert!((s1 - s).abs() < 1e-15 && (c1 - c).abs() < 1e-15);
        assert!((s1 - 1.1752012).abs() < 1e-7);
        assert!((c1 - 1.5430806).abs() < 1e-7);
    }

    #[test]
    fn spherical_values() {
        assert!((s_kappa(1.0, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(s_kappa(1.0, PI).is_err());
        assert!(s_c_t(1.0, PI / 2.0).is_err());
        assert_eq!(sigma(1.0, 1.0, 0.5, PI).unwrap(), Ext::Infinite);
        let v = sigma(1.0, 1.0, 0.5, PI / 2.0).unwrap().to_f64();
        assert!((v - (PI / 4.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn endpoints_of_sigma() {
        for &(k, n, theta) in &[(1.0, 2.0, 1.0), (-3.0, 1.5, 2.0), (0.5, 4.0, 0.1)] {
            assert!(sigma(k, n, 0.0, theta).unwrap().to_f64().abs() < 1e-15);
            assert!((sigma(k, n, 1.0, theta).unwrap().to_f64() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn small_angle_branches() {
        for &kappa in &[-2.0, -0.5, 0.5, 2.0] {
            assert_eq!(theta_over_s(kappa, 0.0).unwrap(), 1.0);
            assert_eq!(theta_over_t(kappa, 0.0).unwrap(), 1.0);
            let th: f64 = 1e-6;
            let s_series = 1.0 + kappa * th * th / 6.0 + 7.0 * kappa * kappa * th.powi(4) / 360.0;
            let t_series = 1.0 - kappa * th * th / 3.0 - kappa * kappa * th.powi(4) / 45.0;
            assert!((theta_over_s(kappa, th).unwrap() / s_series - 1.0).abs() < 1e-10);
            assert!((theta_over_t(kappa, th).unwrap() / t_series - 1.0).abs() < 1e-10);
        }
    }
}
