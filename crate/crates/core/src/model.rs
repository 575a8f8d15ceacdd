//! The Landau-Zener two-level model.
//!
//! The Hamiltonian in the diabatic basis is
//!
//! ```text
//! H(t) = | γ/2   Δ/2 |      γ = α t
//!        | Δ/2  -γ/2 |
//! ```
//!
//! and the state is the amplitude pair `(a, b)` evolving under `iħ d/dt (a, b) = H (a, b)`.
//! The eigenvalues are `±E/2` with `E = sqrt(γ² + Δ²)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{LzError, Result};

/// Physical configuration of a sweep: gap `delta`, sweep rate `alpha` and the
/// reduced Planck constant `hbar` of the unit system in use.
///
/// The quickness `eta = 2 hbar alpha / delta²` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzParams {
    delta: f64,
    alpha: f64,
    hbar: f64,
}

impl LzParams {
    pub fn new(delta: f64, alpha: f64, hbar: f64) -> Result<Self> {
        for (name, value) in [("delta", delta), ("alpha", alpha), ("hbar", hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(LzError::InvalidParams(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(Self { delta, alpha, hbar })
    }

    /// Natural units `ħ = Δ = 1`, with the sweep rate given in units of `Δ²/(2ħ)`.
    /// In those units the rate equals the quickness, so `from_eta(eta).eta() == eta`.
    pub fn from_eta(eta: f64) -> Result<Self> {
        Self::new(1.0, 0.5 * eta, 1.0)
    }

    /// Uncoupled sweep (`Δ = 0`). The diabatic populations are frozen; only
    /// useful as a degenerate reference case.
    pub fn uncoupled(alpha: f64, hbar: f64) -> Result<Self> {
        let mut p = Self::new(1.0, alpha, hbar)?;
        p.delta = 0.0;
        Ok(p)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn eta(&self) -> f64 {
        2.0 * self.hbar * self.alpha / (self.delta * self.delta)
    }

    /// Sweep rate in units of `Δ²/(2ħ)`; numerically equal to `eta`.
    pub fn alpha_reduced(&self) -> f64 {
        self.eta()
    }

    /// `γ = α t`.
    pub fn gamma(&self, t: f64) -> f64 {
        self.alpha * t
    }

    /// Adiabatic time scale `Δ/α`.
    pub fn adiabatic_time(&self) -> f64 {
        self.delta / self.alpha
    }

    /// Sudden time scale `sqrt(ħ/α)`.
    pub fn sudden_time(&self) -> f64 {
        (self.hbar / self.alpha).sqrt()
    }

    /// Dimensionless coupling `Δ / sqrt(α ħ) = sqrt(2/η)`.
    pub(crate) fn coupling_ratio(&self) -> f64 {
        self.delta / (self.alpha * self.hbar).sqrt()
    }
}

/// State vector `(a, b)` in the diabatic basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub a: Complex64,
    pub b: Complex64,
}

impl Amplitudes {
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Amplitudes) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    pub fn max_abs_diff(&self, other: &Amplitudes) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Diabatic,
    Adiabatic,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Diabatic => "diabatic",
            Basis::Adiabatic => "adiabatic",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Basis {
    type Err = LzError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diabatic" | "d" => Ok(Basis::Diabatic),
            "adiabatic" | "a" => Ok(Basis::Adiabatic),
            other => Err(LzError::InvalidParams(format!("unknown basis '{other}'"))),
        }
    }
}

/// `H(t)` in the diabatic basis. The matrix is real symmetric and traceless.
pub fn hamiltonian(params: &LzParams, t: f64) -> [[f64; 2]; 2] {
    let g = 0.5 * params.gamma(t);
    let d = 0.5 * params.delta;
    [[g, d], [d, -g]]
}

/// Half-angle components `(cos θ/2, sin θ/2)` with `cos θ = γ/E`, `sin θ = Δ/E`,
/// evaluated without cancellation for large `|γ|/Δ`.
fn half_angles(gamma: f64, delta: f64) -> (f64, f64) {
    let e = gamma.hypot(delta);
    if e == 0.0 {
        return (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    }
    if gamma >= 0.0 {
        let c1 = ((e + gamma) / (2.0 * e)).sqrt();
        let c2 = delta / (2.0 * e * (e + gamma)).sqrt();
        (c1, c2)
    } else {
        let c1 = delta / (2.0 * e * (e - gamma)).sqrt();
        let c2 = ((e - gamma) / (2.0 * e)).sqrt();
        (c1, c2)
    }
}

/// Instantaneous eigenvector with eigenvalue `+E/2`, real with non-negative components.
/// Tends to `(0, 1)` before the crossing and to `(1, 0)` after it.
pub fn upper_eigenstate(params: &LzParams, t: f64) -> Amplitudes {
    let (c1, c2) = half_angles(params.gamma(t), params.delta);
    Amplitudes::real(c1, c2)
}

/// Instantaneous eigenvector with eigenvalue `-E/2`, orthogonal to
/// [`upper_eigenstate`], with non-negative first component. Tends to `(1, 0)`
/// before the crossing.
pub fn lower_eigenstate(params: &LzParams, t: f64) -> Amplitudes {
    let (c1, c2) = half_angles(params.gamma(t), params.delta);
    Amplitudes::real(c2, -c1)
}

/// Closed-form asymptote `P(+∞)` for the standard initial condition `a(-∞) = 1`:
/// `1 - exp(-π/η)` in the diabatic basis, `exp(-π/η)` in the adiabatic basis.
pub fn lz_asymptote(params: &LzParams, basis: Basis) -> f64 {
    let x = -PI / params.eta();
    match basis {
        Basis::Diabatic => -x.exp_m1(),
        Basis::Adiabatic => x.exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn apply(h: &[[f64; 2]; 2], v: &Amplitudes) -> Amplitudes {
        Amplitudes::new(
            v.a * h[0][0] + v.b * h[0][1],
            v.a * h[1][0] + v.b * h[1][1],
        )
    }

    #[test]
    fn hamiltonian_examples() {
        let p = LzParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(hamiltonian(&p, 0.0), [[0.0, 0.5], [0.5, 0.0]]);
        let p = LzParams::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(hamiltonian(&p, 3.0), [[3.0, 0.5], [0.5, -3.0]]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LzParams::new(0.0, 1.0, 1.0).is_err());
        assert!(LzParams::new(1.0, -1.0, 1.0).is_err());
        assert!(LzParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(LzParams::from_eta(0.0).is_err());
    }

    #[test]
    fn eta_is_derived() {
        let p = LzParams::new(2.0, 3.0, 0.5).unwrap();
        assert_eq!(p.eta(), 2.0 * 0.5 * 3.0 / 4.0);
        assert_eq!(LzParams::from_eta(0.37).unwrap().eta(), 0.37);
    }

    #[test]
    fn eigenstate_limits() {
        let p = LzParams::new(1.0, 1.0, 1.0).unwrap();
        let v = upper_eigenstate(&p, 0.0);
        assert_relative_eq!(v.a.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(v.b.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let v = upper_eigenstate(&p, -1e12);
        assert!(v.a.re < 1e-11 && (v.b.re - 1.0).abs() < 1e-15);
        let v = upper_eigenstate(&p, 1e12);
        assert!(v.b.re < 1e-11 && (v.a.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lower_eigenstate_far_before_crossing() {
        let p = LzParams::new(1.0, 1.0, 1.0).unwrap();
        let v = lower_eigenstate(&p, -2000.0);
        assert_relative_eq!(v.a.re, 1.0, epsilon = 1e-7);
        // second component ≈ -Δ/(2|γ|)
        assert_relative_eq!(v.b.re, -2.5e-4, max_relative = 1e-6);
        assert!(upper_eigenstate(&p, -2000.0).inner(&v).norm() < 1e-18);
    }

    #[test]
    fn asymptote_examples() {
        let p = LzParams::from_eta(PI).unwrap();
        assert_relative_eq!(lz_asymptote(&p, Basis::Diabatic), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        let p = LzParams::from_eta(1.0).unwrap();
        assert_relative_eq!(lz_asymptote(&p, Basis::Adiabatic), (-PI).exp(), epsilon = 1e-16);
        let p = LzParams::from_eta(1e-3).unwrap();
        assert_eq!(lz_asymptote(&p, Basis::Adiabatic), 0.0);
    }

    #[test]
    fn basis_round_trips_through_text() {
        for b in [Basis::Diabatic, Basis::Adiabatic] {
            assert_eq!(b.to_string().parse::<Basis>().unwrap(), b);
        }
        assert!("bloch".parse::<Basis>().is_err());
    }

    proptest! {
        #[test]
        fn hamiltonian_is_symmetric_traceless_with_known_spectrum(
            delta in 1e-3f64..1e3, alpha in 1e-3f64..1e3, t in -1e3f64..1e3,
        ) {
            let p = LzParams::new(delta, alpha, 1.0).unwrap();
            let h = hamiltonian(&p, t);
            prop_assert_eq!(h[0][1], h[1][0]);
            prop_assert_eq!(h[0][0] + h[1][1], 0.0);
            let half_e = 0.5 * p.gamma(t).hypot(delta);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            prop_assert!((det + half_e * half_e).abs() <= 1e-12 * half_e * half_e);
        }

        #[test]
        fn upper_eigenstate_residual(ratio in -1e6f64..1e6, delta in 1e-2f64..1e2) {
            let p = LzParams::new(delta, 1.0, 1.0).unwrap();
            let t = ratio * delta;
            let v = upper_eigenstate(&p, t);
            let lambda = 0.5 * p.gamma(t).hypot(delta);
            let hv = apply(&hamiltonian(&p, t), &v);
            let res = (hv.a - v.a * lambda).norm().max((hv.b - v.b * lambda).norm());
            prop_assert!(res <= 1e-12 * lambda, "residual {res} at γ/Δ = {ratio}");
            prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
            prop_assert!(v.a.re >= 0.0 && v.b.re >= 0.0);
        }

        #[test]
        fn upper_eigenstate_is_continuous(t in -50f64..50.0) {
            let p = LzParams::new(1.0, 1.0, 1.0).unwrap();
            let dt = 1e-6 * p.adiabatic_time();
            let v0 = upper_eigenstate(&p, t);
            let v1 = upper_eigenstate(&p, t + dt);
            prop_assert!(v0.max_abs_diff(&v1) <= 1e-4);
        }

        #[test]
        fn asymptotes_are_complementary(eta in 1e-3f64..1e4) {
            let p = LzParams::from_eta(eta).unwrap();
            let sum = lz_asymptote(&p, Basis::Diabatic) + lz_asymptote(&p, Basis::Adiabatic);
            prop_assert!((sum - 1.0).abs() < 1e-15);
        }
    }
}
