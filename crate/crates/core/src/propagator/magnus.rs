//! Sixth-order Magnus integrator for `dψ/dy = -i (v(y)·σ) ψ` on SU(2), with an
//! embedded fourth-order estimate sharing the same three Gauss-Legendre nodes.
//!
//! Generators `-i (u·σ)` are carried as real 3-vectors `u`; the commutator of
//! `-i u·σ` and `-i w·σ` is `-i (2 u×w)·σ`. Each step applies the closed-form
//! exponential, so the update is unitary up to rounding.

use num_complex::Complex64;

use crate::model::Amplitudes;

pub(crate) type Vec3 = [f64; 3];

const SQRT15: f64 = 3.872_983_346_207_417;
const NODE_LO: f64 = 0.5 - SQRT15 / 10.0;
const NODE_HI: f64 = 0.5 + SQRT15 / 10.0;

fn add(u: Vec3, w: Vec3) -> Vec3 {
    [u[0] + w[0], u[1] + w[1], u[2] + w[2]]
}

fn scale(s: f64, u: Vec3) -> Vec3 {
    [s * u[0], s * u[1], s * u[2]]
}

/// Commutator in vector form.
fn bracket(u: Vec3, w: Vec3) -> Vec3 {
    [
        2.0 * (u[1] * w[2] - u[2] * w[1]),
        2.0 * (u[2] * w[0] - u[0] * w[2]),
        2.0 * (u[0] * w[1] - u[1] * w[0]),
    ]
}

fn norm(u: Vec3) -> f64 {
    (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
}

/// Landau-Zener generator in scaled time `y = t / sqrt(ħ/α)`:
/// `H/ħ · sqrt(ħ/α) = (κ/2) σx + (y/2) σz` with `κ = Δ/sqrt(αħ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Generator {
    pub kappa: f64,
}

impl Generator {
    pub fn at(&self, y: f64) -> Vec3 {
        [0.5 * self.kappa, 0.0, 0.5 * y]
    }

    /// Magnitude of the generator, i.e. half the instantaneous angular
    /// frequency of the relative phase.
    pub fn magnitude(&self, y: f64) -> f64 {
        norm(self.at(y))
    }

    /// Sixth-order Magnus exponent over `[y, y + h]` and the size of its
    /// difference from the fourth-order exponent.
    pub fn exponent(&self, y: f64, h: f64) -> (Vec3, f64) {
        let a1 = self.at(y + NODE_LO * h);
        let a2 = self.at(y + 0.5 * h);
        let a3 = self.at(y + NODE_HI * h);

        let m1 = scale(h, a2);
        let m2 = scale(SQRT15 * h / 3.0, add(a3, scale(-1.0, a1)));
        let m3 = scale(10.0 * h / 3.0, add(add(a3, scale(-2.0, a2)), a1));

        let c1 = bracket(m1, m2);
        let c2 = scale(-1.0 / 60.0, bracket(m1, add(scale(2.0, m3), c1)));
        let tail = bracket(add(add(scale(-20.0, m1), scale(-1.0, m3)), c1), add(m2, c2));

        let base = add(m1, scale(1.0 / 12.0, m3));
        let omega6 = add(base, scale(1.0 / 240.0, tail));
        let omega4 = add(base, scale(-1.0 / 12.0, c1));
        let err = norm(add(omega6, scale(-1.0, omega4)));
        (omega6, err)
    }

    pub fn step(&self, y: f64, h: f64, psi: &Amplitudes) -> Amplitudes {
        apply_exp(self.exponent(y, h).0, psi)
    }
}

/// `(u·σ) ψ`.
pub(crate) fn apply_pauli(u: Vec3, psi: &Amplitudes) -> Amplitudes {
    let off_minus = Complex64::new(u[0], -u[1]);
    let off_plus = Complex64::new(u[0], u[1]);
    Amplitudes::new(
        psi.a * u[2] + off_minus * psi.b,
        off_plus * psi.a - psi.b * u[2],
    )
}

/// `exp(-i u·σ) ψ = cos|u| ψ - i sin|u| (û·σ) ψ`.
pub(crate) fn apply_exp(u: Vec3, psi: &Amplitudes) -> Amplitudes {
    let theta = norm(u);
    if theta == 0.0 {
        return *psi;
    }
    let c = theta.cos();
    let s = theta.sin() / theta;
    let rotated = apply_pauli(u, psi);
    let minus_i_s = Complex64::new(0.0, -s);
    Amplitudes::new(psi.a * c + minus_i_s * rotated.a, psi.b * c + minus_i_s * rotated.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(gen: &Generator, y0: f64, y1: f64, n: usize, psi: Amplitudes) -> Amplitudes {
        let h = (y1 - y0) / n as f64;
        (0..n).fold(psi, |acc, i| gen.step(y0 + i as f64 * h, h, &acc))
    }

    #[test]
    fn exponential_matches_rotation_about_z() {
        let psi = Amplitudes::real(0.6, 0.8);
        let out = apply_exp([0.0, 0.0, 0.3], &psi);
        let expect_a = Complex64::from_polar(0.6, -0.3);
        let expect_b = Complex64::from_polar(0.8, 0.3);
        assert!((out.a - expect_a).norm() < 1e-15);
        assert!((out.b - expect_b).norm() < 1e-15);
    }

    #[test]
    fn step_is_unitary() {
        let gen = Generator { kappa: 1.3 };
        let psi = Amplitudes::new(Complex64::new(0.3, 0.4), Complex64::new(0.0, (0.75f64).sqrt()));
        let out = gen.step(-2.0, 0.7, &psi);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn global_error_is_sixth_order() {
        let gen = Generator { kappa: 1.0 };
        let psi0 = Amplitudes::real(1.0, 0.0);
        let reference = run(&gen, -3.0, 3.0, 4096, psi0);
        let coarse = run(&gen, -3.0, 3.0, 32, psi0).max_abs_diff(&reference);
        let fine = run(&gen, -3.0, 3.0, 64, psi0).max_abs_diff(&reference);
        let order = (coarse / fine).log2();
        assert!((5.6..6.6).contains(&order), "observed order {order}");
    }

    #[test]
    fn embedded_estimate_scales_as_fifth_power() {
        let gen = Generator { kappa: 0.8 };
        let (_, e1) = gen.exponent(0.4, 0.2);
        let (_, e2) = gen.exponent(0.4, 0.1);
        let ratio = (e1 / e2).log2();
        assert!((4.5..5.5).contains(&ratio), "estimate order {ratio}");
    }
}
