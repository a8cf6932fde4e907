//! The soliton family on the real line and the two double-constrained
//! problems (prescribed mass and prescribed value at the origin) built on it.
//!
//! With `r = 2/(p-2)`, the unit-mass soliton is `phi_1(x) = A sech(B x)^r`
//! where `A^(p-2) = r(r+1) B^2`, the multiplier is `lambda = r^2 B^2`, and `B`
//! is fixed by `A^2/B * int sech^(2r) = 1`. Other masses follow from
//! `phi_mu(x) = mu^alpha phi_1(mu^beta x)`.

use serde::Serialize;
use thiserror::Error;

use crate::quad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("exponent p = {0} outside (2, 6)")]
    ExponentOutOfRange(f64),
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("soliton constants failed the unit-mass check (mass {0})")]
    Normalisation(f64),
    #[error("could not bracket the shift equation")]
    NoBracket,
}

fn positive(name: &'static str, value: f64) -> Result<f64, SolitonError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SolitonError::NotPositive { name, value })
    }
}

/// Nonlinearity exponent and mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub p: f64,
    pub mu: f64,
}

impl ProblemParams {
    pub fn new(p: f64, mu: f64) -> Result<Self, SolitonError> {
        if !(p > 2.0 && p < 6.0) {
            return Err(SolitonError::ExponentOutOfRange(p));
        }
        positive("mass", mu)?;
        Ok(ProblemParams { p, mu })
    }
}

/// `sech(y)`, accurate in the tails.
pub(crate) fn sech(y: f64) -> f64 {
    let e = (-y.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn ln_sech(y: f64) -> f64 {
    let y = y.abs();
    std::f64::consts::LN_2 - y - (-2.0 * y).exp().ln_1p()
}

/// `1 - tanh(w)`, accurate for large positive `w`.
fn one_minus_tanh(w: f64) -> f64 {
    2.0 / (1.0 + (2.0 * w).exp())
}

/// Constants of the soliton family for one exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonParams {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Amplitude `C_p = phi_1(0)`.
    pub amplitude: f64,
    /// Width constant `c_p`.
    pub width: f64,
    /// Profile exponent `alpha / beta = 2 / (p - 2)`.
    pub power: f64,
    /// Multiplier of `phi_1`: `phi'' + phi^(p-1) = lambda phi`.
    pub lambda: f64,
    /// `E(phi_1, R)`.
    pub unit_energy: f64,
}

impl SolitonParams {
    pub fn new(p: f64) -> Result<Self, SolitonError> {
        if !(p > 2.0 && p < 6.0) {
            return Err(SolitonError::ExponentOutOfRange(p));
        }
        let alpha = 2.0 / (6.0 - p);
        let beta = (p - 2.0) / (6.0 - p);
        let r = 2.0 / (p - 2.0);
        let sech_mass = sech_power_integral(2.0 * r);
        let width = (1.0 / ((r * (r + 1.0)).powf(r) * sech_mass)).powf(1.0 / (2.0 * r - 1.0));
        let amplitude = (r * (r + 1.0)).powf(0.5 * r) * width.powf(r);
        let mut params = SolitonParams {
            p,
            alpha,
            beta,
            amplitude,
            width,
            power: r,
            lambda: r * r * width * width,
            unit_energy: 0.0,
        };
        let reach = params.tail_cutoff();
        let mass = 2.0 * quad::integrate(|x| params.unit(x).powi(2), 0.0, reach, 1e-16, 1e-14);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(SolitonError::Normalisation(mass));
        }
        let density = |x: f64| 0.5 * params.unit_derivative(x).powi(2) - params.unit(x).powf(p) / p;
        params.unit_energy = 2.0 * quad::integrate(density, 0.0, reach, 1e-17, 1e-14);
        Ok(params)
    }

    /// Abscissa beyond which `phi_1^2` is below `1e-36` of its peak.
    fn tail_cutoff(&self) -> f64 {
        (std::f64::consts::LN_2 + 36.0 * std::f64::consts::LN_10 / (2.0 * self.power)) / self.width
    }

    pub fn unit(&self, x: f64) -> f64 {
        self.amplitude * sech(self.width * x).powf(self.power)
    }

    pub fn unit_derivative(&self, x: f64) -> f64 {
        let y = self.width * x;
        -self.amplitude * self.width * self.power * sech(y).powf(self.power) * y.tanh()
    }

    pub fn unit_second_derivative(&self, x: f64) -> f64 {
        let s = sech(self.width * x);
        let r = self.power;
        self.amplitude * self.width * self.width * r * (r * s.powf(r) - (r + 1.0) * s.powf(r + 2.0))
    }

    fn ln_unit(&self, x: f64) -> f64 {
        self.amplitude.ln() + self.power * ln_sech(self.width * x)
    }

    /// `phi_mu(x) = mu^alpha phi_1(mu^beta x)`.
    pub fn value(&self, mu: f64, x: f64) -> f64 {
        mu.powf(self.alpha) * self.unit(mu.powf(self.beta) * x)
    }

    pub fn derivative(&self, mu: f64, x: f64) -> f64 {
        mu.powf(self.alpha + self.beta) * self.unit_derivative(mu.powf(self.beta) * x)
    }

    pub fn second_derivative(&self, mu: f64, x: f64) -> f64 {
        mu.powf(self.alpha + 2.0 * self.beta) * self.unit_second_derivative(mu.powf(self.beta) * x)
    }

    /// Multiplier of `phi_mu`.
    pub fn lambda_of(&self, mu: f64) -> f64 {
        mu.powf(2.0 * self.beta) * self.lambda
    }

    /// `phi_mu(0)`.
    pub fn peak(&self, mu: f64) -> f64 {
        mu.powf(self.alpha) * self.amplitude
    }

    /// The `x >= 0` with `phi_mu(x) = t`, for `0 < t <= phi_mu(0)`.
    pub fn inverse(&self, mu: f64, t: f64) -> f64 {
        let ratio = (self.peak(mu) / t).max(1.0).powf(1.0 / self.power);
        ratio.acosh() / (self.width * mu.powf(self.beta))
    }

    /// `E(phi_mu, R) = mu^((p+2)/(6-p)) E(phi_1, R)`.
    pub fn energy(&self, mu: f64) -> f64 {
        mu.powf((self.p + 2.0) / (6.0 - self.p)) * self.unit_energy
    }

    /// Half-width beyond which `phi_mu` drops below `rel` times its peak.
    pub fn decay_length(&self, mu: f64, rel: f64) -> f64 {
        self.inverse(mu, rel * self.peak(mu))
    }

    /// `int_z^inf phi_1(s)^2 ds`.
    pub fn unit_tail_mass(&self, z: f64) -> f64 {
        let (a, b) = (self.amplitude, self.width);
        let w = b * z;
        let r = self.power;
        if r == 1.0 {
            a * a / b * one_minus_tanh(w)
        } else if r == 2.0 {
            let d = one_minus_tanh(w);
            a * a / b * d * d * (3.0 - d) / 3.0
        } else {
            let start = z.max(0.0);
            let end = start + self.tail_cutoff();
            let mut total = quad::integrate(|s| self.unit(s).powi(2), start, end, 0.0, 1e-14);
            if z < 0.0 {
                total += quad::integrate(|s| self.unit(s).powi(2), z, 0.0, 0.0, 1e-14);
            }
            total
        }
    }

    /// `ln g(z)` with `g(z) = phi_1(z)^(-1/alpha) int_0^inf phi_1(z+t)^2 dt`.
    pub fn ln_shift_function(&self, z: f64) -> f64 {
        -self.ln_unit(z) / self.alpha + self.unit_tail_mass(z).ln()
    }

    pub fn shift_function(&self, z: f64) -> f64 {
        self.ln_shift_function(z).exp()
    }
}

/// `int_R sech(y)^s dy`, by quadrature.
fn sech_power_integral(s: f64) -> f64 {
    let reach = std::f64::consts::LN_2 + 40.0 * std::f64::consts::LN_10 / s;
    2.0 * quad::integrate(|y| sech(y).powf(s), 0.0, reach, 1e-17, 1e-15)
}

/// The soliton `phi_M` and shift `y` with `phi_M(y) = a` and
/// `int_0^inf phi_M(y+x)^2 dx = m/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfLineSolution {
    pub a: f64,
    pub m: f64,
    /// Mass of the full soliton.
    pub big_m: f64,
    pub y: f64,
    /// Shift in unit-soliton coordinates, `z = M^beta y`.
    pub z: f64,
}

impl HalfLineSolution {
    /// `x -> phi_M(y + x)` on the half-line.
    pub fn value(&self, params: &SolitonParams, x: f64) -> f64 {
        params.value(self.big_m, self.y + x)
    }
}

/// Solve the half-line problem with boundary value `a` and total mass `m`.
pub fn solve_half_line(params: &SolitonParams, a: f64, m: f64) -> Result<HalfLineSolution, SolitonError> {
    positive("boundary value", a)?;
    positive("mass", m)?;
    let target = (0.5 * m).ln() - a.ln() / params.alpha;
    let residual = |z: f64| params.ln_shift_function(z) - target;

    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut guard = 0;
    while residual(lo) < 0.0 {
        lo *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(SolitonError::NoBracket);
        }
    }
    while residual(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 120 || !residual(hi).is_finite() {
            return Err(SolitonError::NoBracket);
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0f64).max(lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    let big_m = (a / params.unit(z)).powf(1.0 / params.alpha);
    Ok(HalfLineSolution { a, m, big_m, y: z * big_m.powf(-params.beta), z })
}

/// The three regimes of the whole-line problem with `phi(0) = a` and mass `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LineCase {
    /// `a < phi_m(0)`: the translates `phi_m(x +- y)`.
    TwoTranslates { y: f64 },
    /// `a = phi_m(0)`: the centred soliton.
    Centered,
    /// `a > phi_m(0)`: `x -> phi_M(|x| + y)`.
    Truncated { big_m: f64, y: f64 },
}

/// Relative tolerance for deciding `a = phi_m(0)`.
pub const CENTERED_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineSolution {
    pub case: LineCase,
    pub m: f64,
    #[serde(skip)]
    params: SolitonParams,
}

impl LineSolution {
    /// Values of every solution at `x`.
    pub fn values(&self, x: f64) -> Vec<f64> {
        match self.case {
            LineCase::TwoTranslates { y } => vec![self.params.value(self.m, x + y), self.params.value(self.m, x - y)],
            LineCase::Centered => vec![self.params.value(self.m, x)],
            LineCase::Truncated { big_m, y } => vec![self.params.value(big_m, x.abs() + y)],
        }
    }
}

pub fn classify_line_problem(params: &SolitonParams, a: f64, m: f64) -> Result<LineSolution, SolitonError> {
    positive("boundary value", a)?;
    positive("mass", m)?;
    let peak = params.peak(m);
    let case = if (a - peak).abs() <= CENTERED_RTOL * peak {
        LineCase::Centered
    } else if a < peak {
        LineCase::TwoTranslates { y: params.inverse(m, a) }
    } else {
        let s = solve_half_line(params, a, m)?;
        LineCase::Truncated { big_m: s.big_m, y: s.y }
    };
    Ok(LineSolution { case, m, params: *params })
}
