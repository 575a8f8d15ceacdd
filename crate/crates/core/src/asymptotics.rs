//! Closed-form limit curves and limiting tunneling times.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{LzError, Result};
use crate::model::{Basis, LzParams};

/// Which limit of the quickness parameter a closed form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    /// `η ≪ 1`.
    AdiabaticLimit,
    /// `η ≫ 1`.
    SuddenLimit,
}

impl LimitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitKind::AdiabaticLimit => "adiabatic_limit",
            LimitKind::SuddenLimit => "sudden_limit",
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LimitKind {
    type Err = LzError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adiabatic" | "adiabatic_limit" => Ok(LimitKind::AdiabaticLimit),
            "sudden" | "sudden_limit" => Ok(LimitKind::SuddenLimit),
            other => Err(LzError::InvalidParams(format!("unknown limit '{other}'"))),
        }
    }
}

/// Time measured in units of `sqrt(ħ/α)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaledTime {
    pub y: f64,
}

impl ScaledTime {
    pub fn new(y: f64) -> Self {
        ScaledTime { y }
    }

    pub fn from_time(params: &LzParams, t: f64) -> Self {
        ScaledTime { y: t / params.sudden_time() }
    }

    pub fn to_time(self, params: &LzParams) -> f64 {
        self.y * params.sudden_time()
    }
}

const SERIES_LIMIT: f64 = 1.5;
const ASYMPTOTIC_LIMIT: f64 = 50.0;

/// Fresnel integrals `C(x) = ∫₀ˣ cos(πu²/2) du`, `S(x) = ∫₀ˣ sin(πu²/2) du`.
///
/// Power series near the origin, a continued fraction for the complementary
/// error function at intermediate arguments and the auxiliary-function
/// expansion beyond `|x| = 50`.
pub fn fresnel(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (c, s) = if ax == 0.0 {
        (0.0, 0.0)
    } else if ax <= SERIES_LIMIT {
        fresnel_series(ax)
    } else if ax <= ASYMPTOTIC_LIMIT {
        fresnel_continued_fraction(ax)
    } else if ax.is_finite() {
        fresnel_asymptotic(ax)
    } else {
        (0.5, 0.5)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

fn fresnel_series(x: f64) -> (f64, f64) {
    let z = FRAC_PI_2 * x * x;
    let mut term = x; // z^n x / n!
    let mut c = 0.0;
    let mut s = 0.0;
    for n in 0..60 {
        let k = (2 * n + 1) as f64;
        let contribution = term / k;
        if n % 4 < 2 {
            if n % 2 == 0 {
                c += contribution;
            } else {
                s += contribution;
            }
        } else if n % 2 == 0 {
            c -= contribution;
        } else {
            s -= contribution;
        }
        term *= z / (n + 1) as f64;
        if contribution.abs() < 1e-17 * (c.abs() + s.abs()) {
            break;
        }
    }
    (c, s)
}

fn fresnel_continued_fraction(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let pix2 = PI * x * x;
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 0..200 {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = one / (d * a + b);
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (one - phase * h);
    (cs.re, cs.im)
}

fn fresnel_asymptotic(x: f64) -> (f64, f64) {
    let w = PI * x * x;
    let w2 = 1.0 / (w * w);
    let f = (1.0 - 3.0 * w2 * (1.0 - 35.0 * w2)) / (PI * x);
    let g = (1.0 - 15.0 * w2 * (1.0 - 63.0 * w2)) / (PI * w * x);
    let (sin, cos) = (0.5 * w).sin_cos();
    (0.5 + f * sin - g * cos, 0.5 - f * cos - g * sin)
}

/// `b₁(y) = ∫_{-∞}^{y} exp(-i x²/2) dx`.
pub fn b1(y: ScaledTime) -> Complex64 {
    let (c, s) = fresnel(y.y / PI.sqrt());
    Complex64::new(0.5 + c, -(0.5 + s)) * PI.sqrt()
}

/// `P_d(t) = 1/2 + αt / (2 sqrt(α²t² + Δ²))`.
pub fn curve_adiabatic_diabatic(params: &LzParams, t: f64) -> f64 {
    let g = params.gamma(t);
    0.5 + 0.5 * g / g.hypot(params.delta())
}

/// `P_a(t) = α²ħ²Δ² / (4 (α²t² + Δ²)³)`.
pub fn curve_adiabatic_adiabatic(params: &LzParams, t: f64) -> f64 {
    let ah = params.alpha() * params.hbar();
    let d = params.delta();
    let e2 = params.gamma(t).powi(2) + d * d;
    ah * ah * d * d / (4.0 * e2 * e2 * e2)
}

/// Leading sudden-limit diabatic probability `|b₁(y)|² / (2η)`.
pub fn curve_sudden_diabatic(eta: f64, y: ScaledTime) -> f64 {
    b1(y).norm_sqr() / (2.0 * eta)
}

/// First-order sudden-limit adiabatic probability.
pub fn curve_sudden_adiabatic(eta: f64, y: ScaledTime) -> f64 {
    let y = y.y;
    let ratio = y / (y * y + 2.0 / eta).sqrt();
    let (_, s) = fresnel(y / PI.sqrt());
    let sine_integral = PI.sqrt() * (0.5 + s);
    0.5 + 0.5 * ratio - (0.5 * y * y).cos() * sine_integral / (eta * (eta * y * y + 2.0)).sqrt()
        + (0.5 - 0.5 * ratio) / (2.0 * eta)
}

/// Leading two terms of [`curve_sudden_adiabatic`], `1/2 + αt / (2 sqrt(α²t² + Δ²))`.
pub fn curve_sudden_adiabatic_leading(params: &LzParams, t: f64) -> f64 {
    curve_adiabatic_diabatic(params, t)
}

fn sudden_half_width_gap(y: f64) -> f64 {
    let (c, s) = fresnel(y / PI.sqrt());
    (0.5 + c).powi(2) + (0.5 + s).powi(2) - 0.25
}

/// Negative root of `[1/2 + C(y/√π)]² + [1/2 + S(y/√π)]² = 1/4`, where the
/// leading sudden-limit diabatic curve falls to half its value at `y = 0`.
pub fn sudden_half_width_root() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let (mut lo, mut hi) = (-1.5, 0.0);
        debug_assert!(sudden_half_width_gap(lo) < 0.0 && sudden_half_width_gap(hi) > 0.0);
        while hi - lo > 1e-16 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if sudden_half_width_gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Coefficient of `sqrt(ħ/α)` in the sudden-limit diabatic tunneling time.
pub fn sudden_tau_coefficient() -> f64 {
    4.0 * sudden_half_width_root().abs()
}

/// `2 sqrt(2^{1/3} - 1)`.
pub fn adiabatic_adiabatic_coefficient() -> f64 {
    2.0 * (2f64.cbrt() - 1.0).sqrt()
}

/// `2√3/3`.
pub fn adiabatic_diabatic_coefficient() -> f64 {
    2.0 / 3f64.sqrt()
}

/// Closed-form tunneling time for a basis in one of the two limits.
pub fn limit_tau(basis: Basis, limit: LimitKind, params: &LzParams) -> f64 {
    match (basis, limit) {
        (Basis::Diabatic, LimitKind::AdiabaticLimit) | (Basis::Adiabatic, LimitKind::SuddenLimit) => {
            adiabatic_diabatic_coefficient() * params.adiabatic_time()
        }
        (Basis::Diabatic, LimitKind::SuddenLimit) => sudden_tau_coefficient() * params.sudden_time(),
        (Basis::Adiabatic, LimitKind::AdiabaticLimit) => {
            adiabatic_adiabatic_coefficient() * params.adiabatic_time()
        }
    }
}

/// Vitanov's adiabatic-basis, adiabatic-limit time
/// `√2 Δ/sqrt(αħ) · exp(-πΔ²/(4αħ))`, converted from units of `sqrt(ħ/α)` to
/// absolute time.
pub fn vitanov_zeta_adiabatic(params: &LzParams) -> f64 {
    let (d, a, h) = (params.delta(), params.alpha(), params.hbar());
    let scaled = 2f64.sqrt() * d / (a * h).sqrt() * (-PI * d * d / (4.0 * a * h)).exp();
    scaled * params.sudden_time()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    fn gk15(f: &impl Fn(f64) -> (f64, f64), a: f64, b: f64) -> ((f64, f64), f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mid = f(c);
        let mut k = (WGK[7] * mid.0, WGK[7] * mid.1);
        let mut g = (WG[3] * mid.0, WG[3] * mid.1);
        for j in 0..7 {
            let lo = f(c - h * XGK[j]);
            let hi = f(c + h * XGK[j]);
            k.0 += WGK[j] * (lo.0 + hi.0);
            k.1 += WGK[j] * (lo.1 + hi.1);
            if j % 2 == 1 {
                g.0 += WG[j / 2] * (lo.0 + hi.0);
                g.1 += WG[j / 2] * (lo.1 + hi.1);
            }
        }
        let err = ((k.0 - g.0).abs() + (k.1 - g.1).abs()) * h;
        ((k.0 * h, k.1 * h), err)
    }

    fn adaptive(f: &impl Fn(f64) -> (f64, f64), a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        let l = adaptive(f, a, m, tol, depth - 1);
        let r = adaptive(f, m, b, tol, depth - 1);
        (l.0 + r.0, l.1 + r.1)
    }

    /// Reference Fresnel pair by quadrature over half-oscillation panels
    /// bounded by `u = sqrt(k)`.
    fn fresnel_quadrature(x: f64) -> (f64, f64) {
        let f = |u: f64| {
            let (s, c) = (FRAC_PI_2 * u * u).sin_cos();
            (c, s)
        };
        let ax = x.abs();
        let mut sum = (0.0, 0.0);
        let mut comp = (0.0, 0.0);
        let mut k = 0u64;
        let mut lo = 0.0;
        while lo < ax {
            k += 1;
            let hi = ((k as f64).sqrt()).min(ax);
            let v = adaptive(&f, lo, hi, 1e-15, 12);
            // Kahan summation over panels
            let y0 = v.0 - comp.0;
            let t0 = sum.0 + y0;
            comp.0 = (t0 - sum.0) - y0;
            sum.0 = t0;
            let y1 = v.1 - comp.1;
            let t1 = sum.1 + y1;
            comp.1 = (t1 - sum.1) - y1;
            sum.1 = t1;
            lo = hi;
        }
        if x < 0.0 {
            (-sum.0, -sum.1)
        } else {
            sum
        }
    }

    #[test]
    fn fresnel_examples() {
        assert_eq!(fresnel(0.0), (0.0, 0.0));
        let (c, s) = fresnel(1.0);
        assert!((c - 0.779_893_400_376_822_8).abs() < 1e-15);
        assert!((s - 0.438_259_147_390_354_7).abs() < 1e-15);
        let (c, s) = fresnel(1e8);
        assert!((c - 0.5).abs() < 1e-8 && (s - 0.5).abs() < 1e-8);
        assert_eq!(fresnel(f64::INFINITY), (0.5, 0.5));
    }

    #[test]
    fn fresnel_is_odd() {
        for &x in &[0.3, 1.2, 1.5, 1.7, 7.0, 49.9, 50.1, 300.0] {
            let (c, s) = fresnel(x);
            let (cn, sn) = fresnel(-x);
            assert_eq!((c, s), (-cn, -sn));
        }
    }

    #[test]
    fn fresnel_matches_quadrature_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-50.0..=50.0);
            let (c, s) = fresnel(x);
            let (qc, qs) = fresnel_quadrature(x);
            worst = worst.max((c - qc).abs()).max((s - qs).abs());
        }
        assert!(worst <= 1e-12, "worst deviation {worst:e}");
    }

    #[test]
    fn fresnel_branches_agree_at_switch_points() {
        for &x in &[SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            let q = fresnel_quadrature(x);
            for v in [fresnel_series(x), fresnel_continued_fraction(x)] {
                if x == ASYMPTOTIC_LIMIT && v == fresnel_series(x) {
                    continue;
                }
                assert!((v.0 - q.0).abs() < 1e-12 && (v.1 - q.1).abs() < 1e-12);
            }
        }
        let a = fresnel_asymptotic(ASYMPTOTIC_LIMIT);
        let q = fresnel_quadrature(ASYMPTOTIC_LIMIT);
        assert!((a.0 - q.0).abs() < 1e-12 && (a.1 - q.1).abs() < 1e-12);
    }

    #[test]
    fn b1_limits() {
        assert!(b1(ScaledTime::new(-1e9)).norm() < 1e-8);
        let z = b1(ScaledTime::new(0.0));
        assert_relative_eq!(z.re, 0.5 * PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(z.im, -0.5 * PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(z.norm_sqr(), FRAC_PI_2, epsilon = 1e-15);
        let inf = b1(ScaledTime::new(1e9));
        let expect = Complex64::from_polar((2.0 * PI).sqrt(), -PI / 4.0);
        assert!((inf - expect).norm() < 1e-8);
    }

    #[test]
    fn adiabatic_diabatic_curve() {
        let p = LzParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(curve_adiabatic_diabatic(&p, 0.0), 0.5);
        assert_relative_eq!(curve_adiabatic_diabatic(&p, -1.0 / 3f64.sqrt()), 0.25, epsilon = 1e-15);
        assert_relative_eq!(curve_adiabatic_diabatic(&p, 1e12), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn adiabatic_adiabatic_curve() {
        let p = LzParams::from_eta(0.1).unwrap();
        let peak = curve_adiabatic_adiabatic(&p, 0.0);
        assert_relative_eq!(peak, 0.1 * 0.1 / 16.0, max_relative = 1e-14);
        let t = (2f64.cbrt() - 1.0).sqrt() * p.adiabatic_time();
        assert_relative_eq!(curve_adiabatic_adiabatic(&p, t), 0.5 * peak, max_relative = 1e-12);
        assert_relative_eq!(curve_adiabatic_adiabatic(&p, -t), 0.5 * peak, max_relative = 1e-12);
        let far = curve_adiabatic_adiabatic(&p, 1e6);
        let farther = curve_adiabatic_adiabatic(&p, 2e6);
        assert_relative_eq!(far / farther, 64.0, max_relative = 1e-6);
    }

    #[test]
    fn sudden_diabatic_curve() {
        let eta = 200.0;
        assert_relative_eq!(curve_sudden_diabatic(eta, ScaledTime::new(0.0)), PI / (4.0 * eta), max_relative = 1e-14);
        assert_relative_eq!(curve_sudden_diabatic(eta, ScaledTime::new(1e9)), PI / eta, max_relative = 1e-8);
        let half = curve_sudden_diabatic(eta, ScaledTime::new(-0.6241));
        assert!((half / (PI / (8.0 * eta)) - 1.0).abs() < 5e-4);
    }

    #[test]
    fn sudden_diabatic_tail_approaches_lz_formula() {
        let gap = |eta: f64| {
            let lz = -(-PI / eta).exp_m1();
            (curve_sudden_diabatic(eta, ScaledTime::new(1e9)) - lz).abs()
        };
        for &eta in &[50.0, 100.0, 200.0] {
            assert!(gap(eta) / gap(2.0 * eta) >= 3.9, "eta {eta}");
        }
    }

    #[test]
    fn sudden_adiabatic_curve() {
        let eta = 500.0;
        let early = curve_sudden_adiabatic(eta, ScaledTime::new(-1e6));
        assert!((early - 1.0 / (2.0 * eta)).abs() < 1e-9);
        let p = LzParams::from_eta(eta).unwrap();
        assert_eq!(curve_sudden_adiabatic_leading(&p, 0.0), 0.5);
    }

    #[test]
    fn sudden_adiabatic_leading_form_equals_adiabatic_diabatic_curve() {
        for &eta in &[0.01, 1.0, 100.0] {
            let p = LzParams::from_eta(eta).unwrap();
            for i in -200..=200 {
                let t = i as f64 * 0.05 * p.adiabatic_time();
                let d = curve_sudden_adiabatic_leading(&p, t) - curve_adiabatic_diabatic(&p, t);
                assert!(d.abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn half_width_root_constant() {
        let root = sudden_half_width_root();
        assert!(sudden_half_width_gap(root).abs() < 1e-15);
        assert!((root - (-0.6241)).abs() < 5e-5);
        assert!((sudden_tau_coefficient() - 2.4964).abs() < 5e-4);
        assert_relative_eq!(root, -0.624_066_360_084_819_7, epsilon = 1e-13);
    }

    #[test]
    fn limit_taus() {
        let p = LzParams::new(1.0, 0.01, 1.0).unwrap();
        assert_relative_eq!(limit_tau(Basis::Diabatic, LimitKind::AdiabaticLimit, &p), 115.470_053_837_925_16, max_relative = 1e-14);
        assert_relative_eq!(limit_tau(Basis::Adiabatic, LimitKind::SuddenLimit, &p), 115.470_053_837_925_16, max_relative = 1e-14);
        assert_relative_eq!(limit_tau(Basis::Adiabatic, LimitKind::AdiabaticLimit, &p), 101.964_905_706_791_73, max_relative = 1e-13);
        let p = LzParams::new(1.0, 100.0, 1.0).unwrap();
        let sudden = limit_tau(Basis::Diabatic, LimitKind::SuddenLimit, &p);
        assert!((sudden - 0.24964).abs() < 5e-5);
    }

    #[test]
    fn vitanov_zeta() {
        let p = LzParams::from_eta(2.0).unwrap();
        assert_relative_eq!(vitanov_zeta_adiabatic(&p), 0.644_793_883_889_669, max_relative = 1e-14);
        let p = LzParams::from_eta(0.01).unwrap();
        assert!(vitanov_zeta_adiabatic(&p) < 1e-60);
        // η = 2/π in natural units: α = 1/π, value √2·π·exp(-π²/4)
        let p = LzParams::from_eta(2.0 / PI).unwrap();
        let expect = 2f64.sqrt() * PI * (-PI * PI / 4.0).exp();
        assert_relative_eq!(vitanov_zeta_adiabatic(&p), expect, max_relative = 1e-13);
    }

    #[test]
    fn scaled_time_round_trip() {
        let p = LzParams::new(2.0, 3.0, 0.5).unwrap();
        let y = ScaledTime::from_time(&p, 1.7);
        assert_relative_eq!(y.to_time(&p), 1.7, max_relative = 1e-15);
        assert_eq!("sudden".parse::<LimitKind>().unwrap(), LimitKind::SuddenLimit);
    }
}
