//! Independent re-implementations used as oracles by several test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use quadlab::nn::{Activation, Mlp};

/// Dense forward pass written directly against the flat parameter layout.
pub fn mlp_oracle(net: &Mlp, input: &[f64]) -> Vec<f64> {
    let sizes = net.layer_sizes().to_vec();
    let p = net.params();
    let mut at = 0;
    let mut x = input.to_vec();
    for k in 0..sizes.len() - 1 {
        let (n_in, n_out) = (sizes[k], sizes[k + 1]);
        let w = &p[at..at + n_in * n_out];
        let b = &p[at + n_in * n_out..at + n_in * n_out + n_out];
        at += n_in * n_out + n_out;
        let last = k == sizes.len() - 2;
        x = (0..n_out)
            .map(|i| {
                let mut s = b[i];
                for j in 0..n_in {
                    s += w[i * n_in + j] * x[j];
                }
                match (last, net.output_activation()) {
                    (false, _) | (true, Activation::Relu) => s.max(0.0),
                    (true, Activation::Tanh) => s.tanh(),
                    (true, Activation::Identity) => s,
                }
            })
            .collect();
    }
    x
}

pub fn reward_oracle(dd: f64, e_prev: f64, e: f64, roll: f64, current: f64) -> f64 {
    let forward = dd;
    let turned = e_prev.abs() - e.abs();
    let yaw_pen = 0.1 * e.abs();
    let roll_pen = 0.1 * roll.abs();
    forward + turned - yaw_pen - roll_pen - current
}

/// Arctangent by argument halving and a Maclaurin series; no libm calls
/// besides `sqrt`.
pub fn series_atan(x: f64) -> f64 {
    if x.abs() > 1.0 {
        return x.signum() * PI / 2.0 - series_atan(1.0 / x);
    }
    // atan(x) = 2·atan(x / (1 + √(1 + x²)))
    let mut y = x;
    let mut scale = 1.0;
    for _ in 0..3 {
        y /= 1.0 + (1.0 + y * y).sqrt();
        scale *= 2.0;
    }
    let y2 = y * y;
    let mut term = y;
    let mut sum = 0.0;
    for k in 0..40 {
        sum += term / (2 * k + 1) as f64;
        term *= -y2;
    }
    scale * sum
}

pub fn series_atan2(y: f64, x: f64) -> f64 {
    if x > 0.0 {
        series_atan(y / x)
    } else if x < 0.0 {
        let base = series_atan(y / x);
        if y >= 0.0 {
            base + PI
        } else {
            base - PI
        }
    } else if y > 0.0 {
        PI / 2.0
    } else {
        -PI / 2.0
    }
}
