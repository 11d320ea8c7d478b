//! Exponential integral E1.
//!
//! Power series below 1, modified-Lentz continued fraction above. The
//! scaled form `exp_e1(x) = e^x * E1(x)` stays finite for large arguments,
//! which is what the ergodic-capacity closed form needs.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E1(x) = integral of exp(-t)/t from x to infinity, for x > 0.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "e1 domain: x > 0, got {x}");
    if x <= 1.0 {
        e1_series(x)
    } else {
        (-x).exp() * exp_e1_cf(x)
    }
}

/// exp(x) * E1(x), stable for large x (asymptotically ~ 1/x).
pub fn exp_e1(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "exp_e1 domain: x > 0, got {x}");
    if x <= 1.0 {
        x.exp() * e1_series(x)
    } else {
        exp_e1_cf(x)
    }
}

/// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // x^k / k!
    for k in 1..=40 {
        term *= x / k as f64;
        let contrib = term / k as f64;
        if k % 2 == 1 {
            sum += contrib;
        } else {
            sum -= contrib;
        }
        if contrib < 1e-17 * sum.abs().max(1.0) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Continued fraction for exp(x)*E1(x), x > 1 (modified Lentz):
/// exp(x)E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...)))).
fn exp_e1_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for k in 1..=200u32 {
        let a = -((k * k) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
