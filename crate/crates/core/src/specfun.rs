//! Exponential integral and the closed-form Rayleigh log-expectation.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `exp(x) * E1(x)` for `x > 0`, without overflow for large `x`.
///
/// Power series for `x <= 1`, Lentz continued fraction otherwise.
pub fn exp_e1_scaled(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x.is_infinite() {
        return 0.0;
    }
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < f64::EPSILON * sum.abs().max(1e-300) {
                break;
            }
        }
        return (-EULER_GAMMA - x.ln() - sum) * x.exp();
    }
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `E1(x)` for `x > 0`.
pub fn e1(x: f64) -> f64 {
    exp_e1_scaled(x) * (-x).exp()
}

/// `E[ln(1 + c X)]` for `X ~ Exp(1)`, in nats: `exp(1/c) E1(1/c)`.
pub fn expect_log1p_scalar(c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    if c <= 0.0 {
        return 0.0;
    }
    if c.is_infinite() {
        return f64::INFINITY;
    }
    exp_e1_scaled(1.0 / c)
}
