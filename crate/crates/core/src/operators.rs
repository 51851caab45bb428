//! Real-coded and binary variation operators.

use rand::Rng;

const EPS: f64 = 1.0e-14;

/// Bounded simulated binary crossover. Returns the first child; genes are
/// exchanged per variable with probability one half.
pub fn sbx_crossover<R: Rng>(a: &[f64], b: &[f64], bounds: &[(f64, f64)], eta: f64, rng: &mut R) -> Vec<f64> {
    let mut child = a.to_vec();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let (x1, x2) = (a[i], b[i]);
        if (x1 - x2).abs() <= EPS || hi - lo <= EPS {
            continue;
        }
        let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        let u: f64 = rng.gen();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let beta_low = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
        let c1 = 0.5 * ((y1 + y2) - spread(beta_low) * (y2 - y1));
        let beta_high = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
        let c2 = 0.5 * ((y1 + y2) + spread(beta_high) * (y2 - y1));
        let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
        // Keep the child on the side of the first parent half the time.
        child[i] = if rng.gen::<f64>() <= 0.5 { c2 } else { c1 };
    }
    child
}

/// Bounded polynomial mutation applied to each gene with probability `rate`.
pub fn polynomial_mutation<R: Rng>(genome: &mut [f64], bounds: &[(f64, f64)], rate: f64, eta: f64, rng: &mut R) {
    let power = 1.0 / (eta + 1.0);
    for (x, &(lo, hi)) in genome.iter_mut().zip(bounds) {
        if rng.gen::<f64>() >= rate {
            continue;
        }
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        let d1 = (*x - lo) / span;
        let d2 = (hi - *x) / span;
        let r: f64 = rng.gen();
        let delta = if r < 0.5 {
            let v = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta + 1.0);
            v.powf(power) - 1.0
        } else {
            let v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(power)
        };
        *x = (*x + delta * span).clamp(lo, hi);
    }
}

/// Uniform crossover over bit genes; returns the first child.
pub fn uniform_crossover<R: Rng>(a: &[f64], b: &[f64], rng: &mut R) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| if rng.gen::<bool>() { x } else { y }).collect()
}

pub fn bit_flip_mutation<R: Rng>(genome: &mut [f64], rate: f64, rng: &mut R) {
    for g in genome.iter_mut() {
        if rng.gen::<f64>() < rate {
            *g = if *g >= 0.5 { 0.0 } else { 1.0 };
        }
    }
}
