use std::f64::consts::PI;

use nls_graphs::soliton::{classify_line_problem, solve_half_line, LineCase, SolitonParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

const EXPONENTS: [f64; 4] = [2.5, 3.0, 4.0, 5.0];

/// `int_R sech(y)^s dy` via the Beta function.
fn sech_integral(s: f64) -> f64 {
    PI.sqrt() * gamma(0.5 * s) / gamma(0.5 * s + 0.5)
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn constants_match_the_gamma_closed_forms() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        let r = 2.0 / (p - 2.0);
        let (a, b) = (s.amplitude, s.width);
        assert!((a * a / b * sech_integral(2.0 * r) - 1.0).abs() < 1e-12, "p={p}");
        assert!((a.powf(p - 2.0) / (r * (r + 1.0) * b * b) - 1.0).abs() < 1e-12, "p={p}");
        assert!((s.lambda - r * r * b * b).abs() < 1e-14);
        let kinetic = a * a * r * r * b * (sech_integral(2.0 * r) - sech_integral(2.0 * r + 2.0));
        let potential = a.powf(p) / b * sech_integral(r * p);
        let energy = 0.5 * kinetic - potential / p;
        assert!((s.unit_energy - energy).abs() < 1e-12 * energy.abs(), "p={p}: {} vs {energy}", s.unit_energy);
        assert!(s.unit_energy < 0.0);
    }
}

#[test]
fn profile_solves_the_ode() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        for mu in [0.5, 1.0, 3.0] {
            let phi0 = s.value(mu, 0.0);
            let lambda = (s.second_derivative(mu, 0.0) + phi0.powf(p - 1.0)) / phi0;
            assert!((lambda / s.lambda_of(mu) - 1.0).abs() < 1e-10);
            for i in 0..=200 {
                let x = -10.0 + 0.1 * i as f64;
                let v = s.value(mu, x);
                let res = s.second_derivative(mu, x) + v.powf(p - 1.0) - lambda * v;
                assert!(res.abs() <= 1e-6, "p={p} mu={mu} x={x}: {res}");
            }
        }
    }
}

#[test]
fn mass_on_a_finite_window() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        for mu in [0.5, 1.0, 2.0] {
            let l = 40.0;
            let mass = simpson(|x| s.value(mu, x).powi(2), -l, l, 40_000);
            let far = s.decay_length(mu, 1e-13).max(2.0 * l);
            let tail = 2.0 * simpson(|x| s.value(mu, x).powi(2), l, far, 400_000);
            assert!((mass + tail - mu).abs() <= 1e-10, "p={p} mu={mu}: {mass} + {tail}");
        }
    }
}

#[test]
fn scaling_of_values_and_energies() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        for mu in [0.5, 2.0, 4.0] {
            let ratio = s.energy(mu) / s.energy(1.0);
            assert!((ratio / mu.powf((p + 2.0) / (6.0 - p)) - 1.0).abs() < 1e-10);
            let direct = {
                let d = |x: f64| 0.5 * s.derivative(mu, x).powi(2) - s.value(mu, x).powf(p) / p;
                let reach = s.decay_length(mu, 1e-12);
                2.0 * simpson(d, 0.0, reach, 200_000)
            };
            assert!((direct - s.energy(mu)).abs() < 1e-9 * s.energy(mu).abs(), "p={p} mu={mu}");
        }
    }
    let s = SolitonParams::new(4.0).unwrap();
    for x in [0.0, 0.3, 1.7, 5.0] {
        assert!((s.value(2.0, x) - 2.0 * s.value(1.0, 2.0 * x)).abs() < 1e-15);
    }
}

#[test]
fn shift_function_is_strictly_decreasing() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        let zs: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
        let g: Vec<f64> = zs.iter().map(|&z| s.ln_shift_function(z)).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]), "p={p}");
        let tail = simpson(|t| s.unit(1.5 + t).powi(2), 0.0, 100.0 / s.width, 400_000);
        let g = s.unit(1.5).powf(-1.0 / s.alpha) * tail;
        assert!((s.shift_function(1.5) - g).abs() < 1e-9 * g, "p={p}: {} vs {g}", s.shift_function(1.5));
    }
}

#[test]
fn random_half_line_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = rng.random_range(2.2..5.8);
        let s = SolitonParams::new(p).unwrap();
        let m = rng.random_range(0.1..5.0);
        let a = s.peak(m) * rng.random_range(0.05..3.0);
        let sol = solve_half_line(&s, a, m).unwrap();
        assert!((sol.value(&s, 0.0) - a).abs() <= 1e-8 * a.max(1.0), "value residual at p={p} a={a} m={m}");
        let reach = sol.y.abs() + s.decay_length(sol.big_m, 1e-10);
        let half = simpson(|x| sol.value(&s, x).powi(2), 0.0, reach, 100_000);
        assert!((half - 0.5 * m).abs() <= 1e-8 * m.max(1.0), "mass residual at p={p} a={a} m={m}: {half}");
        // a > phi_m(0) exactly when y > 0
        assert_eq!(a > s.peak(m), sol.y > 0.0, "p={p} a={a} m={m} y={}", sol.y);
        assert_eq!(a > s.peak(m), sol.big_m > m);
    }
}

#[test]
fn symmetric_case_is_the_centred_soliton() {
    for p in EXPONENTS {
        let s = SolitonParams::new(p).unwrap();
        for m in [0.3, 1.0, 2.5] {
            let sol = solve_half_line(&s, s.peak(m), m).unwrap();
            assert!((sol.big_m - m).abs() <= 1e-10 * m, "{sol:?}");
            assert!(sol.y.abs() <= 1e-10, "{sol:?}");
            assert!(matches!(classify_line_problem(&s, s.peak(m), m).unwrap().case, LineCase::Centered));
        }
    }
}

/// Half-line energy `1/2 int v'^2 - 1/p int v^p` and mass `int v^2`.
fn half_line_energy(v: impl Fn(f64) -> f64, dv: impl Fn(f64) -> f64, p: f64, reach: f64) -> (f64, f64) {
    let e = simpson(|x| 0.5 * dv(x).powi(2) - v(x).powf(p) / p, 0.0, reach, 60_000);
    (e, simpson(|x| v(x).powi(2), 0.0, reach, 60_000))
}

/// `k` with `int_0^inf (a e^{-kx} (1 + cx))^2 dx = half`.
fn decay_rate(a: f64, c: f64, half: f64) -> f64 {
    let mass = |k: f64| a * a * (0.5 / k + 0.5 * c / (k * k) + 0.25 * c * c / (k * k * k));
    let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mass(mid) > half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

#[test]
fn half_line_solution_beats_competitors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = 4.0;
    let s = SolitonParams::new(p).unwrap();
    for (a, m) in [(0.5 * s.peak(1.0), 1.0), (1.2 * s.peak(1.0), 1.0), (0.4, 2.0)] {
        let sol = solve_half_line(&s, a, m).unwrap();
        let reach = sol.y.abs() + s.decay_length(sol.big_m, 1e-9);
        let (best, mass) = half_line_energy(|x| sol.value(&s, x), |x| s.derivative(sol.big_m, sol.y + x), p, reach);
        assert!((mass - 0.5 * m).abs() < 1e-8);
        for _ in 0..20 {
            let c = rng.random_range(0.0..3.0);
            let k = decay_rate(a, c, 0.5 * m);
            let v = |x: f64| a * (-k * x).exp() * (1.0 + c * x);
            let dv = |x: f64| a * (-k * x).exp() * (c - k * (1.0 + c * x));
            let (e, mass) = half_line_energy(v, dv, p, 60.0 / k);
            assert!((mass - 0.5 * m).abs() < 1e-7, "competitor mass {mass}");
            assert!(e > best, "a={a} m={m} c={c}: competitor {e} below {best}");
        }
    }
}

#[test]
fn line_problem_cases() {
    let s = SolitonParams::new(4.0).unwrap();
    match classify_line_problem(&s, s.value(1.0, 1.0), 1.0).unwrap().case {
        LineCase::TwoTranslates { y } => assert!((y - 1.0).abs() < 1e-12),
        c => panic!("{c:?}"),
    }
    let sol = classify_line_problem(&s, 1.2 * s.peak(1.0), 1.0).unwrap();
    match sol.case {
        LineCase::Truncated { big_m, y } => {
            assert!(y > 0.0 && big_m > 1.0);
            let v = sol.values(0.7);
            assert_eq!(v.len(), 1);
            assert_eq!(v[0], sol.values(-0.7)[0]);
        }
        c => panic!("{c:?}"),
    }
    assert!(classify_line_problem(&s, 0.0, 1.0).is_err());
    assert!(solve_half_line(&s, 1.0, -1.0).is_err());
}
